//! Direct minimization of the length of polyline horizontal curves.
//!
//! This is an independent upper-bound estimate of the Carnot–Carathéodory
//! distance that never touches the closed-form geodesics. Each restart
//! minimizes the discrete energy `(K - 1) Σ |p_{i+1} - p_i|^2` over the
//! interior knots subject to the vertical endpoint constraint, using an
//! augmented Lagrangian with damped Newton inner solves (energy and
//! constraint are both quadratic, so the Hessian is exact and cheap). The final knots are
//! projected onto the constraint by Gauss–Newton, so the reported length
//! belongs to an admissible curve.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::polyline::{polyline_endpoint, polyline_length};
use crate::algebra::{GroupPoint, HTypeAlgebra};
use crate::error::{Error, Result};
use crate::par::Execution;

pub const DEFAULT_SEED: u64 = 0x5EED_2011;

/// Feasibility required of a restart before its length is accepted,
/// relative to `max(|x|, sqrt|z|)^2`.
const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BruteOptions {
    pub knot_count: usize,
    pub restarts: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for BruteOptions {
    fn default() -> Self {
        Self {
            knot_count: 16,
            restarts: 32,
            seed: DEFAULT_SEED,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BruteEstimate {
    /// Length of the best admissible polyline found.
    pub length: f64,
    /// `|z(path) - z_target|` of that polyline.
    pub constraint_residual: f64,
    /// Index of the restart that produced it.
    pub restart: usize,
    pub knots: Vec<DVector<f64>>,
    /// Number of restarts that reached a feasible polyline.
    pub feasible_restarts: usize,
}

pub fn brute_distance(
    alg: &HTypeAlgebra,
    target: &GroupPoint,
    knot_count: usize,
    restarts: usize,
) -> Result<BruteEstimate> {
    brute_distance_with(
        alg,
        target,
        &BruteOptions {
            knot_count,
            restarts,
            ..BruteOptions::default()
        },
    )
}

pub fn brute_distance_with(
    alg: &HTypeAlgebra,
    target: &GroupPoint,
    opts: &BruteOptions,
) -> Result<BruteEstimate> {
    if opts.knot_count < 8 {
        return Err(Error::Invalid(format!(
            "brute_distance needs at least 8 knots, got {}",
            opts.knot_count
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::Invalid("brute_distance needs at least one restart".into()));
    }
    let scale = target.x.norm().max(target.z.norm().sqrt());
    if scale == 0.0 {
        return Ok(BruteEstimate {
            length: 0.0,
            constraint_residual: 0.0,
            restart: 0,
            knots: vec![DVector::zeros(alg.m()); opts.knot_count],
            feasible_restarts: opts.restarts,
        });
    }
    // Work at unit scale through the dilation (x, z) -> (x/s, z/s^2).
    let problem = Problem {
        alg,
        x_end: &target.x / scale,
        z_end: &target.z / (scale * scale),
        knots: opts.knot_count,
    };
    let runs = opts.execution.map_range(opts.restarts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(
            opts.seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        problem.solve(&mut rng)
    });

    let feasible_restarts = runs.iter().filter(|r| r.is_some()).count();
    let (restart, (w, residual)) = runs
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .min_by(|a, b| problem.length(&a.1 .0).total_cmp(&problem.length(&b.1 .0)))
        .ok_or_else(|| Error::Invalid("no restart reached a feasible polyline".into()))?;

    let knots: Vec<_> = problem.knots_of(&w).into_iter().map(|k| k * scale).collect();
    Ok(BruteEstimate {
        length: polyline_length(&knots),
        constraint_residual: residual * scale * scale,
        restart,
        knots,
        feasible_restarts,
    })
}

struct Problem<'a> {
    alg: &'a HTypeAlgebra,
    x_end: DVector<f64>,
    z_end: DVector<f64>,
    knots: usize,
}

impl Problem<'_> {
    fn dim(&self) -> usize {
        (self.knots - 2) * self.alg.m()
    }

    fn knots_of(&self, w: &DVector<f64>) -> Vec<DVector<f64>> {
        let m = self.alg.m();
        let mut out = Vec::with_capacity(self.knots);
        out.push(DVector::zeros(m));
        for i in 0..self.knots - 2 {
            out.push(w.rows(i * m, m).into_owned());
        }
        out.push(self.x_end.clone());
        out
    }

    fn length(&self, w: &DVector<f64>) -> f64 {
        polyline_length(&self.knots_of(w))
    }

    fn constraint(&self, p: &[DVector<f64>]) -> DVector<f64> {
        polyline_endpoint(self.alg, p).expect("dimensions fixed by construction").z - &self.z_end
    }

    /// Rows are `∇ z_k` with respect to the interior knots.
    fn constraint_jacobian(&self, p: &[DVector<f64>]) -> DMatrix<f64> {
        let m = self.alg.m();
        let mut jac = DMatrix::zeros(self.alg.r(), self.dim());
        for (k, ck) in self.alg.structure_matrices().iter().enumerate() {
            for i in 1..self.knots - 1 {
                let g = ck * (&p[i - 1] - &p[i + 1]) * 0.5;
                jac.view_mut((k, (i - 1) * m), (1, m)).copy_from(&g.transpose());
            }
        }
        jac
    }

    /// Hessian of `z_k` with respect to the interior knots (constant).
    fn constraint_hessian(&self, k: usize) -> DMatrix<f64> {
        let m = self.alg.m();
        let ck = self.alg.structure_matrix(k);
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for i in 1..self.knots - 2 {
            // ∂²z_k / ∂p_{i+1} ∂p_i = C^k / 2
            h.view_mut((i * m, (i - 1) * m), (m, m)).copy_from(&(ck * 0.5));
            h.view_mut(((i - 1) * m, i * m), (m, m)).copy_from(&(ck * -0.5));
        }
        h
    }

    fn energy_hessian(&self) -> DMatrix<f64> {
        let m = self.alg.m();
        let segs = (self.knots - 1) as f64;
        let n = self.knots - 2;
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..n {
            for j in 0..m {
                h[(i * m + j, i * m + j)] = 4.0 * segs;
                if i + 1 < n {
                    h[(i * m + j, (i + 1) * m + j)] = -2.0 * segs;
                    h[((i + 1) * m + j, i * m + j)] = -2.0 * segs;
                }
            }
        }
        h
    }

    /// Augmented Lagrangian value, gradient and Hessian.
    fn lagrangian(
        &self,
        w: &DVector<f64>,
        lambda: &DVector<f64>,
        rho: f64,
        hess: &Hessians,
    ) -> (f64, DVector<f64>, DMatrix<f64>) {
        let p = self.knots_of(w);
        let segs = (self.knots - 1) as f64;
        let energy: f64 = p.windows(2).map(|s| (&s[1] - &s[0]).norm_squared()).sum::<f64>() * segs;
        let c = self.constraint(&p);
        let value = energy + lambda.dot(&c) + 0.5 * rho * c.norm_squared();

        let jac = self.constraint_jacobian(&p);
        let mult = lambda + &c * rho;
        let grad = &hess.energy * w - self.energy_offset() + jac.transpose() * &mult;
        let mut h = &hess.energy + jac.transpose() * &jac * rho;
        for (k, hk) in hess.constraint.iter().enumerate() {
            h += hk * mult[k];
        }
        (value, grad, h)
    }

    /// Energy gradient is `H_E w - b`, with `b` from the fixed last knot.
    fn energy_offset(&self) -> DVector<f64> {
        let m = self.alg.m();
        let segs = (self.knots - 1) as f64;
        let mut b = DVector::zeros(self.dim());
        b.rows_mut((self.knots - 3) * m, m).copy_from(&(&self.x_end * (2.0 * segs)));
        b
    }

    fn solve(&self, rng: &mut ChaCha8Rng) -> Option<(DVector<f64>, f64)> {
        let m = self.alg.m();
        let mut w = DVector::zeros(self.dim());
        for i in 0..self.knots - 2 {
            let frac = (i + 1) as f64 / (self.knots - 1) as f64;
            for j in 0..m {
                let noise: f64 = StandardNormal.sample(rng);
                w[i * m + j] = frac * self.x_end[j] + 0.5 * noise;
            }
        }

        let hess = Hessians {
            energy: self.energy_hessian(),
            constraint: (0..self.alg.r()).map(|k| self.constraint_hessian(k)).collect(),
        };
        let mut lambda = DVector::zeros(self.alg.r());
        let mut rho = 10.0;
        let mut prev = f64::INFINITY;
        for _ in 0..60 {
            w = newton(|v| self.lagrangian(v, &lambda, rho, &hess), w, 100, 1e-11);
            let c = self.constraint(&self.knots_of(&w));
            let cn = c.norm();
            if cn < 1e-11 {
                break;
            }
            lambda += &c * rho;
            if cn > 0.25 * prev {
                rho = (rho * 10.0).min(1e6);
            }
            prev = cn;
        }
        self.project(w)
    }

    /// Minimal-norm Gauss–Newton steps onto `z(path) = z_end`.
    fn project(&self, mut w: DVector<f64>) -> Option<(DVector<f64>, f64)> {
        for _ in 0..50 {
            let p = self.knots_of(&w);
            let c = self.constraint(&p);
            if c.norm() <= FEASIBILITY_TOL * 1e-3 {
                break;
            }
            let jac = self.constraint_jacobian(&p);
            let gram = &jac * jac.transpose();
            let y = gram.lu().solve(&c)?;
            w -= jac.transpose() * y;
        }
        let residual = self.constraint(&self.knots_of(&w)).norm();
        (residual <= FEASIBILITY_TOL && w.iter().all(|v| v.is_finite())).then_some((w, residual))
    }
}

struct Hessians {
    energy: DMatrix<f64>,
    constraint: Vec<DMatrix<f64>>,
}

/// Newton's method with a Levenberg shift whenever the Hessian is not
/// positive definite, and Armijo backtracking.
fn newton<F>(f: F, mut x: DVector<f64>, max_iter: usize, gtol: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>),
{
    let n = x.len();
    let (mut fx, mut g, mut h) = f(&x);
    for _ in 0..max_iter {
        let gn = g.norm();
        if gn < gtol {
            break;
        }
        let mut shift = 0.0;
        let d = loop {
            let shifted = &h + DMatrix::<f64>::identity(n, n) * shift;
            if let Some(chol) = shifted.cholesky() {
                break -chol.solve(&g);
            }
            shift = if shift == 0.0 { 1e-6 * h.amax().max(1.0) } else { shift * 10.0 };
        };
        let slope = d.dot(&g);
        let mut step = 1.0;
        let accepted = loop {
            let xn = &x + &d * step;
            let (fn_, gn_, hn) = f(&xn);
            if fn_.is_finite() && fn_ <= fx + 1e-4 * step * slope {
                break Some((xn, fn_, gn_, hn));
            }
            step *= 0.5;
            if step < 1e-16 {
                break None;
            }
        };
        let Some((xn, fn_, gn_, hn)) = accepted else {
            break;
        };
        x = xn;
        fx = fn_;
        g = gn_;
        h = hn;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_minimizes_a_quartic() {
        // (v0 - 1)^4 + (v0 - 1)^2 + 10 (v1 + 2)^2
        let f = |v: &DVector<f64>| {
            let d0 = v[0] - 1.0;
            let d1 = v[1] + 2.0;
            (
                d0.powi(4) + d0 * d0 + 10.0 * d1 * d1,
                DVector::from_vec(vec![4.0 * d0.powi(3) + 2.0 * d0, 20.0 * d1]),
                DMatrix::from_row_slice(2, 2, &[12.0 * d0 * d0 + 2.0, 0.0, 0.0, 20.0]),
            )
        };
        let x = newton(f, DVector::from_vec(vec![-3.0, 5.0]), 100, 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-10 && (x[1] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn lagrangian_derivatives_match_finite_differences() {
        let alg = HTypeAlgebra::build(2, 4).unwrap();
        let problem = Problem {
            alg: &alg,
            x_end: DVector::from_vec(vec![0.3, -0.2, 0.5, 0.1]),
            z_end: DVector::from_vec(vec![0.4, -0.7]),
            knots: 8,
        };
        let hess = Hessians {
            energy: problem.energy_hessian(),
            constraint: (0..2).map(|k| problem.constraint_hessian(k)).collect(),
        };
        let lambda = DVector::from_vec(vec![0.8, -1.3]);
        let w = DVector::from_fn(problem.dim(), |i, _| ((i * 7 % 11) as f64 - 5.0) / 7.0);
        let (_, g, h) = problem.lagrangian(&w, &lambda, 3.0, &hess);
        let eps = 1e-6;
        for j in 0..problem.dim() {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += eps;
            wm[j] -= eps;
            let (fp, gp, _) = problem.lagrangian(&wp, &lambda, 3.0, &hess);
            let (fm, gm, _) = problem.lagrangian(&wm, &lambda, 3.0, &hess);
            assert!(((fp - fm) / (2.0 * eps) - g[j]).abs() < 1e-6);
            assert!(((gp - gm) / (2.0 * eps) - h.column(j)).amax() < 1e-6);
        }
    }

    #[test]
    fn horizontal_target_is_a_straight_line() {
        let alg = HTypeAlgebra::build(1, 2).unwrap();
        let target = GroupPoint::new(&alg, vec![1.0, 0.0], vec![0.0]).unwrap();
        let est = brute_distance(&alg, &target, 8, 4).unwrap();
        assert!(est.length >= 1.0 - 1e-12);
        assert!(est.length < 1.01, "length {}", est.length);
        assert!(est.constraint_residual < 1e-10);
    }

    #[test]
    fn origin_and_argument_checks() {
        let alg = HTypeAlgebra::build(1, 2).unwrap();
        let origin = GroupPoint::origin(&alg);
        assert_eq!(brute_distance(&alg, &origin, 8, 1).unwrap().length, 0.0);
        assert!(brute_distance(&alg, &origin, 4, 1).is_err());
        assert!(brute_distance(&alg, &origin, 8, 0).is_err());
    }

    #[test]
    fn deterministic_across_policies() {
        let alg = HTypeAlgebra::build(1, 2).unwrap();
        let target = GroupPoint::new(&alg, vec![0.5, 0.2], vec![0.3]).unwrap();
        let run = |execution| {
            let opts = BruteOptions { knot_count: 10, restarts: 4, seed: 7, execution };
            brute_distance_with(&alg, &target, &opts).unwrap()
        };
        let a = run(Execution::Sequential);
        let b = run(Execution::Parallel);
        assert_eq!(a.length.to_bits(), b.length.to_bits());
        assert_eq!(a.restart, b.restart);
    }
}
