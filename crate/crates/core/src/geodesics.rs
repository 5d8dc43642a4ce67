//! Normal sub-Riemannian geodesics from the origin.
//!
//! A geodesic is fixed by its initial horizontal velocity `a = ẋ(0)` and a
//! vertical covector `θ`, with `Ω = Σ θ_k C^k` and `w = |θ|`:
//!
//! ```text
//! x(t) = sin(tw)/w a + (1 - cos(tw))/w^2 Ω a
//! ẋ(t) = cos(tw) a + sin(tw)/w Ω a
//! z(t) = |a|^2 / (2 w^2) (t - sin(tw)/w) θ
//! ```
//!
//! Every coefficient is evaluated through a guarded ratio in `u = tw`, so
//! `θ = 0` needs no special case: the formulas collapse to the straight
//! line `(t a, 0)`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{Covector, GroupPoint, HTypeAlgebra};
use crate::error::{Error, Result};
use crate::numeric::{sinc_like, sine_deficit_ratio, versine_ratio};

/// Initial data of a normal geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSpec {
    pub xdot0: DVector<f64>,
    pub theta: Covector,
}

impl GeodesicSpec {
    pub fn new(xdot0: DVector<f64>, theta: Covector) -> Self {
        Self { xdot0, theta }
    }

    /// The straight line `t ↦ (t a, 0)`.
    pub fn straight(xdot0: DVector<f64>, r: usize) -> Self {
        Self {
            xdot0,
            theta: Covector::zeros(r),
        }
    }

    pub fn speed(&self) -> f64 {
        self.xdot0.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: GroupPoint,
    pub velocity_x: DVector<f64>,
}

impl GeodesicSample {
    pub fn speed(&self) -> f64 {
        self.velocity_x.norm()
    }
}

/// A geodesic bound to its algebra, with `Ω` and `Ω a` precomputed.
#[derive(Debug, Clone)]
pub struct Geodesic<'a> {
    alg: &'a HTypeAlgebra,
    spec: GeodesicSpec,
    omega: DMatrix<f64>,
    omega_a: DVector<f64>,
}

impl<'a> Geodesic<'a> {
    pub fn new(alg: &'a HTypeAlgebra, spec: GeodesicSpec) -> Result<Self> {
        if spec.xdot0.len() != alg.m() {
            return Err(Error::DimensionMismatch {
                what: "initial velocity",
                expected: alg.m(),
                found: spec.xdot0.len(),
            });
        }
        if spec.xdot0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial velocity"));
        }
        let omega = alg.omega(&spec.theta)?;
        let omega_a = &omega * &spec.xdot0;
        Ok(Self {
            alg,
            spec,
            omega,
            omega_a,
        })
    }

    pub fn spec(&self) -> &GeodesicSpec {
        &self.spec
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    fn check_t(t: f64) -> Result<()> {
        if t.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("curve parameter"))
        }
    }

    pub fn x(&self, t: f64) -> DVector<f64> {
        let u = t * self.spec.theta.norm();
        &self.spec.xdot0 * (t * sinc_like(u)) + &self.omega_a * (t * t * versine_ratio(u))
    }

    pub fn z(&self, t: f64) -> DVector<f64> {
        let u = t * self.spec.theta.norm();
        let coeff = 0.5 * self.spec.xdot0.norm_squared() * t * t * t * sine_deficit_ratio(u);
        self.spec.theta.as_vector() * coeff
    }

    pub fn velocity_x(&self, t: f64) -> DVector<f64> {
        let u = t * self.spec.theta.norm();
        &self.spec.xdot0 * u.cos() + &self.omega_a * (t * sinc_like(u))
    }

    /// Closed-form vertical velocity `|a|^2 (1 - cos(tw)) / (2 w^2) θ`.
    pub fn velocity_z(&self, t: f64) -> DVector<f64> {
        let u = t * self.spec.theta.norm();
        let coeff = 0.5 * self.spec.xdot0.norm_squared() * t * t * versine_ratio(u);
        self.spec.theta.as_vector() * coeff
    }

    pub fn eval(&self, t: f64) -> Result<GeodesicSample> {
        Self::check_t(t)?;
        Ok(GeodesicSample {
            t,
            point: GroupPoint {
                x: self.x(t),
                z: self.z(t),
            },
            velocity_x: self.velocity_x(t),
        })
    }

    /// Vertical velocity from the unsimplified four-term expression
    ///
    /// ```text
    /// ż^k = ½ aᵀ [ C^k/w cs + C^kΩ/w^2 c(1-c) + ΩᵀC^k/w^2 s^2 + ΩᵀC^kΩ/w^3 s(1-c) ] a
    /// ```
    ///
    /// with `c = cos(tw)`, `s = sin(tw)`. Kept as an independent check of
    /// [`Geodesic::velocity_z`].
    pub fn zdot_full(&self, t: f64) -> Result<DVector<f64>> {
        Self::check_t(t)?;
        let w = self.spec.theta.norm();
        if w == 0.0 {
            return Err(Error::ZeroTheta);
        }
        let (s, c) = (t * w).sin_cos();
        let a = &self.spec.xdot0;
        let om = &self.omega;
        let om_t = om.transpose();
        Ok(DVector::from_iterator(
            self.alg.r(),
            self.alg.structure_matrices().iter().map(|ck| {
                let bracket = ck * (c * s / w)
                    + ck * om * (c * (1.0 - c) / (w * w))
                    + &om_t * ck * (s * s / (w * w))
                    + &om_t * ck * om * (s * (1.0 - c) / (w * w * w));
                0.5 * a.dot(&(bracket * a))
            }),
        ))
    }

    /// Length over `[0, horizon]`; the curve has constant speed `|a|`.
    pub fn length(&self, horizon: f64) -> Result<f64> {
        geodesic_length(&self.spec, horizon)
    }

    /// `samples` points on the uniform grid over `[0, horizon]`, endpoints
    /// included.
    pub fn sample(&self, samples: usize, horizon: f64) -> Result<Vec<GeodesicSample>> {
        if samples < 2 {
            return Err(Error::Invalid(format!("need at least 2 samples, got {samples}")));
        }
        if !(horizon >= 0.0) {
            return Err(Error::Negative("horizon"));
        }
        (0..samples)
            .map(|i| {
                let t = if i + 1 == samples {
                    horizon
                } else {
                    horizon * i as f64 / (samples - 1) as f64
                };
                self.eval(t)
            })
            .collect()
    }
}

pub fn eval_geodesic(alg: &HTypeAlgebra, spec: &GeodesicSpec, t: f64) -> Result<GeodesicSample> {
    Geodesic::new(alg, spec.clone())?.eval(t)
}

pub fn zdot_full(alg: &HTypeAlgebra, spec: &GeodesicSpec, t: f64) -> Result<DVector<f64>> {
    Geodesic::new(alg, spec.clone())?.zdot_full(t)
}

pub fn geodesic_length(spec: &GeodesicSpec, horizon: f64) -> Result<f64> {
    if horizon.is_nan() {
        return Err(Error::NonFinite("horizon"));
    }
    if horizon < 0.0 {
        return Err(Error::Negative("horizon"));
    }
    Ok(horizon * spec.speed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::fd_derivative;
    use std::f64::consts::PI;

    fn dv(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn spec(a: &[f64], theta: &[f64]) -> GeodesicSpec {
        GeodesicSpec::new(dv(a), Covector::from_vec(theta.to_vec()).unwrap())
    }

    #[test]
    fn starts_at_origin() {
        let alg = HTypeAlgebra::build(2, 4).unwrap();
        let s = spec(&[1.0, -0.5, 0.2, 0.3], &[0.7, -1.1]);
        let g = eval_geodesic(&alg, &s, 0.0).unwrap();
        assert_eq!(g.point, GroupPoint::origin(&alg));
        assert_eq!(g.velocity_x, s.xdot0);
    }

    #[test]
    fn straight_line_when_theta_vanishes() {
        let alg = HTypeAlgebra::build(1, 2).unwrap();
        let s = GeodesicSpec::straight(dv(&[0.6, -0.8]), 1);
        let g = eval_geodesic(&alg, &s, 1.0).unwrap();
        assert_eq!(g.point.x, dv(&[0.6, -0.8]));
        assert_eq!(g.point.z, dv(&[0.0]));
        assert!(matches!(zdot_full(&alg, &s, 0.5), Err(Error::ZeroTheta)));
        assert!((geodesic_length(&s, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_turn_returns_to_the_center() {
        let alg = HTypeAlgebra::build(3, 4).unwrap();
        let dir = dv(&[1.0, 2.0, -2.0]) / 3.0;
        let theta = &dir * (2.0 * PI);
        let a = dv(&[0.5, 1.0, -0.3, 0.2]);
        let s = GeodesicSpec::new(a.clone(), Covector::new(theta.clone()).unwrap());
        let g = eval_geodesic(&alg, &s, 1.0).unwrap();
        assert!(g.point.x.amax() < 1e-15);
        let expected = &theta * (a.norm_squared() / (8.0 * PI * PI));
        assert!((g.point.z - expected).amax() < 1e-15);
    }

    #[test]
    fn small_theta_is_continuous() {
        let alg = HTypeAlgebra::build(1, 2).unwrap();
        let a = [0.3, 0.9];
        let g0 = eval_geodesic(&alg, &spec(&a, &[0.0]), 1.0).unwrap();
        for &w in &[1e-3, 1e-5, 1e-8] {
            let g = eval_geodesic(&alg, &spec(&a, &[w]), 1.0).unwrap();
            assert!((&g.point.x - &g0.point.x).amax() < 2.0 * w);
            // z ~ |a|^2 w / 12
            assert!((g.point.z[0] - 0.9 * w / 12.0).abs() < 1e-3 * w);
        }
    }

    #[test]
    fn unit_speed_and_z_parallel_to_theta() {
        let alg = HTypeAlgebra::build(3, 8).unwrap();
        let s = spec(&[0.1, 0.4, -0.7, 1.0, 0.0, 0.3, -0.2, 0.5], &[2.0, -1.0, 0.5]);
        let g = Geodesic::new(&alg, s.clone()).unwrap();
        let unit = s.theta.as_vector() / s.theta.norm();
        for i in 0..=20 {
            let sample = g.eval(i as f64 / 20.0).unwrap();
            assert!((sample.speed() - s.speed()).abs() < 1e-13);
            let z = &sample.point.z;
            assert!((z - &unit * unit.dot(z)).amax() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_full_bracket_and_finite_differences() {
        let alg = HTypeAlgebra::build(2, 8).unwrap();
        let s = spec(&[0.1, 0.4, -0.7, 1.0, 0.0, 0.3, -0.2, 0.5], &[1.3, -2.2]);
        let g = Geodesic::new(&alg, s).unwrap();
        for &t in &[0.0, 0.2, 0.55, 1.0, 1.7] {
            let full = g.zdot_full(t).unwrap();
            assert!((&full - g.velocity_z(t)).amax() < 1e-13);
            if t > 0.0 {
                let fd = fd_derivative(|u| g.z(u), t, 1e-5).unwrap();
                assert!((&fd - &full).amax() < 1e-8);
                let fdx = fd_derivative(|u| g.x(u), t, 1e-5).unwrap();
                assert!((&fdx - g.velocity_x(t)).amax() < 1e-8);
            }
        }
        assert_eq!(g.zdot_full(0.0).unwrap(), DVector::zeros(2));
    }

    #[test]
    fn horizontality_sign() {
        // ż = +½ [x, ẋ] with [v, w]_k = ⟨C^k v, w⟩.
        let alg = HTypeAlgebra::build(3, 4).unwrap();
        let g = Geodesic::new(&alg, spec(&[0.3, -0.1, 0.8, 0.4], &[0.9, 0.1, -1.4])).unwrap();
        for &t in &[0.1, 0.5, 0.9] {
            let rule = alg.bracket(&g.x(t), &g.velocity_x(t)).unwrap() * 0.5;
            assert!((rule - g.velocity_z(t)).amax() < 1e-14);
        }
    }

    #[test]
    fn length_and_errors() {
        let s = spec(&[3.0, 4.0], &[1.0]);
        assert_eq!(geodesic_length(&s, 0.0).unwrap(), 0.0);
        assert_eq!(geodesic_length(&s, 2.0).unwrap(), 10.0);
        assert!(matches!(geodesic_length(&s, -1.0), Err(Error::Negative(_))));

        let alg = HTypeAlgebra::build(1, 2).unwrap();
        assert!(eval_geodesic(&alg, &spec(&[1.0, 0.0, 0.0], &[1.0]), 0.5).is_err());
        assert!(eval_geodesic(&alg, &spec(&[1.0, 0.0], &[1.0, 0.0]), 0.5).is_err());
        assert!(eval_geodesic(&alg, &spec(&[1.0, 0.0], &[1.0]), f64::NAN).is_err());
        let g = Geodesic::new(&alg, spec(&[1.0, 0.0], &[1.0])).unwrap();
        let rows = g.sample(2, 1.0).unwrap();
        assert_eq!((rows[0].t, rows[1].t), (0.0, 1.0));
        assert!(g.sample(1, 1.0).is_err());
    }
}
