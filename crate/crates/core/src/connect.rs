//! Inversion of the exponential map from the origin.
//!
//! Targets split into four classes. The origin is joined by the constant
//! curve. A horizontal target `(x, 0)` is joined only by the straight line.
//! A vertical target `(0, z)` is reached by the families with `|θ| = 2kπ`
//! and squared length `4kπ|z|`; the `k = 1` family is a whole sphere of
//! minimizers, so these points form the cut locus. A generic target
//! `(x, z)` is reached by one geodesic per solution of
//! `μ(|θ|/2) = 4|z|/|x|^2`, and the first solution is the unique minimizer.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::algebra::{Covector, GroupPoint, HTypeAlgebra};
use crate::error::{Error, Result};
use crate::geodesics::{Geodesic, GeodesicSpec};
use crate::numeric::{refine_root, sinc_like, sine_deficit_ratio, versine_ratio, Bracket};
use crate::par::Execution;

/// Default search range for `α = |θ|/2`, i.e. `|θ| ∈ (0, 16π)`.
pub const DEFAULT_ALPHA_CAP: f64 = 8.0 * PI;

/// Grid points per inter-pole interval in the sign scan.
pub const SCAN_POINTS: usize = 1024;

/// Relative band around `nπ` treated as a pole of `μ`.
const POLE_REL: f64 = 1e-14;

/// Interval minima this close to the target mark the roots as unreliable.
const TANGENCY_TOL: f64 = 1e-8;

/// Allowed endpoint miss of a reconstructed geodesic, scaled by
/// `max(1, |x|, |z|)`.
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Relative band below which a component counts as zero when classifying.
pub const CLASSIFY_EPS: f64 = 1e-12;

/// `μ(α) = α / sin^2 α - cot α`, with `μ(0) = 0`.
///
/// Evaluated as `4α · (2α - sin 2α)/(2α)^3 / (sin α / α)^2`, which is free
/// of cancellation near zero. Fails at the poles `α = nπ`, `n ≠ 0`.
pub fn mu(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("mu argument"));
    }
    let n = (alpha.abs() / PI).round();
    if n >= 1.0 && (alpha.abs() - n * PI).abs() <= POLE_REL * n * PI {
        return Err(Error::Pole(alpha));
    }
    let s = sinc_like(alpha);
    Ok(4.0 * alpha * sine_deficit_ratio(2.0 * alpha) / (s * s))
}

/// `ν(α) = α^2 / (2(1 + α - cos α - sin α))`, with `ν(0) = 1`.
///
/// The denominator is rewritten as `2α^2 ((1 - cos α)/α^2 + α (α - sin α)/α^3)`.
pub fn nu(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha.is_infinite() {
        return Err(Error::NonFinite("nu argument"));
    }
    if alpha < 0.0 {
        return Err(Error::Negative("nu argument"));
    }
    Ok(0.5 / (versine_ratio(alpha) + alpha * sine_deficit_ratio(alpha)))
}

/// One solution of `μ(α) = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuRoot {
    pub alpha: f64,
    /// `|θ| = 2α`.
    pub theta_norm: f64,
    /// Final bisection bracket, in the `α` variable.
    pub bracket: Bracket,
    pub residual: f64,
    /// Index `n` of the inter-pole interval `(nπ, (n+1)π)` holding `α`.
    pub branch: usize,
    /// The interval minimum of `μ` lies within `1e-8` of the target, so the
    /// pair of roots around it is ill-conditioned.
    pub near_tangent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub target_ratio: f64,
    pub alpha_cap: f64,
    /// Ascending in `α`.
    pub roots: Vec<MuRoot>,
}

impl RootSet {
    pub fn theta_norms(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.theta_norm).collect()
    }

    /// Whether every residual meets `1e-12 · max(1, target)`.
    pub fn within_tolerance(&self) -> bool {
        let tol = 1e-12 * self.target_ratio.max(1.0);
        self.roots.iter().all(|r| r.residual <= tol)
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * b.abs() {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Finds every `α ∈ (0, alpha_cap)` with `μ(α) = target_ratio`.
///
/// Each inter-pole interval is scanned on [`SCAN_POINTS`] interior points
/// for sign changes; the poles count as `+∞`. In intervals past the first,
/// the grid minimum is refined by golden section so that a pair of roots
/// falling between two grid points is still found. Brackets are bisected to
/// full f64 resolution.
pub fn solve_mu(target_ratio: f64, alpha_cap: f64) -> Result<RootSet> {
    if !(target_ratio > 0.0) || !target_ratio.is_finite() {
        return Err(Error::NonPositiveRatio(target_ratio));
    }
    if !(alpha_cap > 0.0) || !alpha_cap.is_finite() {
        return Err(Error::CapTooSmall(alpha_cap));
    }
    let g = |a: f64| mu(a).map(|v| v - target_ratio).unwrap_or(f64::INFINITY);
    let mut roots = Vec::new();

    let mut n = 0usize;
    while (n as f64) * PI < alpha_cap {
        let lo = n as f64 * PI;
        let pole_hi = (n + 1) as f64 * PI;
        let hi_is_pole = alpha_cap >= pole_hi * (1.0 - 1e-12);
        let hi = if hi_is_pole { pole_hi } else { alpha_cap };

        // (abscissa, g) along the interval; pole ends carry +∞.
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(SCAN_POINTS + 2);
        pts.push((lo, if n == 0 { -target_ratio } else { f64::INFINITY }));
        for j in 1..=SCAN_POINTS {
            let a = lo + (hi - lo) * j as f64 / (SCAN_POINTS + 1) as f64;
            pts.push((a, g(a)));
        }
        pts.push((hi, if hi_is_pole { f64::INFINITY } else { g(hi) }));

        let mut brackets: Vec<(f64, f64, f64, f64)> = Vec::new();
        for w in pts.windows(2) {
            let ((a0, g0), (a1, g1)) = (w[0], w[1]);
            if g1 == 0.0 && a1 < hi {
                brackets.push((a1, a1, 0.0, 0.0));
            } else if (g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0) {
                brackets.push((a0, a1, g0, g1));
            }
        }

        let mut near_tangent = false;
        if n >= 1 {
            let (jmin, _) = pts[1..pts.len() - 1]
                .iter()
                .enumerate()
                .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
                .map(|(j, p)| (j + 1, *p))
                .expect("interval has interior points");
            let (amin, gmin) = golden_min(g, pts[jmin - 1].0, pts[jmin + 1].0);
            near_tangent = gmin.abs() <= TANGENCY_TOL * target_ratio.max(1.0);
            if brackets.is_empty() && gmin <= 0.0 && hi_is_pole {
                if gmin == 0.0 {
                    brackets.push((amin, amin, 0.0, 0.0));
                } else {
                    let (al, gl) = pts[jmin - 1];
                    let (ar, gr) = pts[jmin + 1];
                    brackets.push((al, amin, gl, gmin));
                    brackets.push((amin, ar, gmin, gr));
                }
            }
        }

        for (mut a0, mut a1, mut g0, mut g1) in brackets {
            if a0 == a1 {
                roots.push(MuRoot {
                    alpha: a0,
                    theta_norm: 2.0 * a0,
                    bracket: Bracket { lo: a0, hi: a1, f_lo: 0.0, f_hi: 0.0 },
                    residual: 0.0,
                    branch: n,
                    near_tangent,
                });
                continue;
            }
            // Pull infinite (pole) ends in until the value is finite and positive.
            if g0.is_infinite() {
                (a0, g0) = approach_pole(&g, lo, a1, 1.0);
            }
            if g1.is_infinite() {
                (a1, g1) = approach_pole(&g, hi, a0, -1.0);
            }
            if !(g0.is_finite() && g1.is_finite()) {
                continue;
            }
            let b = Bracket::from_values(a0, a1, g0, g1)?;
            let r = refine_root(g, b, 0.0)?;
            roots.push(MuRoot {
                alpha: r.x,
                theta_norm: 2.0 * r.x,
                bracket: r.bracket,
                residual: r.residual,
                branch: n,
                near_tangent,
            });
        }
        n += 1;
    }

    roots.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    if roots.first().is_none_or(|r| r.branch != 0) {
        return Err(Error::CapTooSmall(alpha_cap));
    }
    Ok(RootSet {
        target_ratio,
        alpha_cap,
        roots,
    })
}

/// Walks from `inner` toward the pole at `pole` (direction `sign` away from
/// it) until `g` is finite and positive.
fn approach_pole<G: Fn(f64) -> f64>(g: &G, pole: f64, inner: f64, sign: f64) -> (f64, f64) {
    let mut delta = (inner - pole).abs() * 0.5;
    let floor = 4.0 * POLE_REL * pole.abs().max(PI);
    while delta > floor {
        let a = pole + sign * delta;
        let v = g(a);
        if v.is_finite() && v > 0.0 {
            return (a, v);
        }
        delta *= 0.5;
    }
    (pole, f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetClass {
    Origin,
    Horizontal,
    Vertical,
    Generic,
}

impl TargetClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetClass::Origin => "origin",
            TargetClass::Horizontal => "horizontal",
            TargetClass::Vertical => "vertical",
            TargetClass::Generic => "generic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "origin" => TargetClass::Origin,
            "horizontal" => TargetClass::Horizontal,
            "vertical" => TargetClass::Vertical,
            "generic" => TargetClass::Generic,
            _ => return None,
        })
    }

    /// Classifies with the band `|x| <= ε ρ`, `|z| <= ε ρ^2`, where
    /// `ρ = max(|x|, sqrt|z|)` is invariant under the group dilations.
    pub fn of(target: &GroupPoint) -> Self {
        let (xn, zn) = (target.x.norm(), target.z.norm());
        let rho = xn.max(zn.sqrt());
        if rho == 0.0 {
            return TargetClass::Origin;
        }
        let x_zero = xn <= CLASSIFY_EPS * rho;
        let z_zero = zn <= CLASSIFY_EPS * rho * rho;
        match (x_zero, z_zero) {
            (true, true) => TargetClass::Origin,
            (false, true) => TargetClass::Horizontal,
            (true, false) => TargetClass::Vertical,
            (false, false) => TargetClass::Generic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    /// Exactly this many minimizing geodesics.
    Finite(usize),
    /// A sphere of minimizers, represented by a witness set.
    SphereFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectingGeodesic {
    pub spec: GeodesicSpec,
    pub length: f64,
    /// Max-entry distance between the geodesic at `t = 1` and the target.
    pub endpoint_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionResult {
    pub target: GroupPoint,
    pub class: TargetClass,
    pub geodesics: Vec<ConnectingGeodesic>,
    pub minimizer_indices: Vec<usize>,
    pub distance: f64,
    pub in_cut_locus: bool,
    pub multiplicity: Multiplicity,
    /// Present for generic targets.
    pub roots: Option<RootSet>,
}

impl ConnectionResult {
    pub fn is_minimizer(&self, idx: usize) -> bool {
        self.minimizer_indices.contains(&idx)
    }

    pub fn minimizer(&self) -> Option<&ConnectingGeodesic> {
        self.minimizer_indices.first().map(|&i| &self.geodesics[i])
    }
}

fn endpoint_residual(alg: &HTypeAlgebra, spec: &GeodesicSpec, target: &GroupPoint) -> Result<f64> {
    let end = Geodesic::new(alg, spec.clone())?.eval(1.0)?.point;
    Ok((&end.x - &target.x).amax().max((&end.z - &target.z).amax()))
}

fn check_endpoint(residual: f64, target: &GroupPoint) -> Result<()> {
    let scale = 1f64.max(target.x.amax()).max(target.z.amax());
    if residual > ENDPOINT_TOL * scale || residual.is_nan() {
        return Err(Error::EndpointMismatch(residual));
    }
    Ok(())
}

/// Indices whose length is within a relative `1e-12` of the shortest one.
fn minimizers(geodesics: &[ConnectingGeodesic]) -> (Vec<usize>, f64) {
    let best = geodesics
        .iter()
        .map(|g| g.length)
        .fold(f64::INFINITY, f64::min);
    let idx = geodesics
        .iter()
        .enumerate()
        .filter(|(_, g)| g.length <= best * (1.0 + 1e-12))
        .map(|(i, _)| i)
        .collect();
    (idx, best)
}

/// Geodesics `k = 1..=k_max` from the origin to `(0, z)` leaving along
/// `direction`: `ẋ(0) = sqrt(4kπ|z|) d` and `θ = 8k^2π^2 z / |ẋ(0)|^2`, so
/// `|θ| = 2kπ` and the squared length is `4kπ|z|`.
pub fn connect_vertical(
    alg: &HTypeAlgebra,
    z: &DVector<f64>,
    k_max: usize,
    direction: &DVector<f64>,
) -> Result<Vec<ConnectingGeodesic>> {
    let target = GroupPoint::from_vectors(alg, DVector::zeros(alg.m()), z.clone())?;
    let zn = z.norm();
    if zn == 0.0 {
        return Err(Error::DegenerateTarget("vertical connection needs z != 0"));
    }
    if direction.len() != alg.m() {
        return Err(Error::DimensionMismatch {
            what: "direction",
            expected: alg.m(),
            found: direction.len(),
        });
    }
    let dn = direction.norm();
    if (dn - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit(dn));
    }
    (1..=k_max)
        .map(|k| {
            let kf = k as f64;
            let speed_sq = 4.0 * kf * PI * zn;
            let xdot0 = direction * speed_sq.sqrt();
            let theta = Covector::new(z * (8.0 * kf * kf * PI * PI / speed_sq))?;
            let spec = GeodesicSpec::new(xdot0, theta);
            let endpoint_residual = endpoint_residual(alg, &spec, &target)?;
            check_endpoint(endpoint_residual, &target)?;
            Ok(ConnectingGeodesic {
                length: spec.speed(),
                spec,
                endpoint_residual,
            })
        })
        .collect()
}

/// All geodesics from the origin to `(x, z)` with `x ≠ 0`, `z ≠ 0` whose
/// `|θ|/2` lies below `alpha_cap`.
///
/// For each root `|θ|_k`: `θ = |θ|_k z/|z|`, and
/// `ẋ(0) = ((|θ|_k/2) cot(|θ|_k/2) Id - Ω/2) x` inverts the horizontal
/// endpoint map.
pub fn connect_generic(
    alg: &HTypeAlgebra,
    target: &GroupPoint,
    alpha_cap: f64,
) -> Result<ConnectionResult> {
    let target = GroupPoint::from_vectors(alg, target.x.clone(), target.z.clone())?;
    let (xn, zn) = (target.x.norm(), target.z.norm());
    if xn == 0.0 || zn == 0.0 {
        return Err(Error::DegenerateTarget("generic connection needs x != 0 and z != 0"));
    }
    let roots = solve_mu(4.0 * zn / (xn * xn), alpha_cap)?;
    let z_unit = &target.z / zn;

    let geodesics = roots
        .roots
        .iter()
        .map(|root| {
            let theta = Covector::new(&z_unit * root.theta_norm)?;
            let omega = alg.omega(&theta)?;
            // (|θ|/2) cot(|θ|/2) = cos(α) / sinc(α)
            let half = root.alpha;
            let cot_coeff = half.cos() / sinc_like(half);
            let xdot0 = &target.x * cot_coeff - (&omega * &target.x) * 0.5;
            let spec = GeodesicSpec::new(xdot0, theta);
            let endpoint_residual = endpoint_residual(alg, &spec, &target)?;
            check_endpoint(endpoint_residual, &target)?;
            Ok(ConnectingGeodesic {
                length: spec.speed(),
                spec,
                endpoint_residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (minimizer_indices, distance) = minimizers(&geodesics);
    Ok(ConnectionResult {
        target,
        class: TargetClass::Generic,
        in_cut_locus: minimizer_indices.len() > 1,
        multiplicity: Multiplicity::Finite(minimizer_indices.len()),
        minimizer_indices,
        distance,
        geodesics,
        roots: Some(roots),
    })
}

/// The straight line `t ↦ (t x, 0)`, the only geodesic reaching `(x, 0)`.
pub fn connect_horizontal(alg: &HTypeAlgebra, x: &DVector<f64>) -> Result<ConnectionResult> {
    let target = GroupPoint::from_vectors(alg, x.clone(), DVector::zeros(alg.r()))?;
    if x.norm() == 0.0 {
        return Err(Error::DegenerateTarget("horizontal connection needs x != 0"));
    }
    let spec = GeodesicSpec::straight(x.clone(), alg.r());
    let endpoint_residual = endpoint_residual(alg, &spec, &target)?;
    let geodesic = ConnectingGeodesic {
        length: spec.speed(),
        spec,
        endpoint_residual,
    };
    Ok(ConnectionResult {
        target,
        class: TargetClass::Horizontal,
        distance: geodesic.length,
        geodesics: vec![geodesic],
        minimizer_indices: vec![0],
        in_cut_locus: false,
        multiplicity: Multiplicity::Finite(1),
        roots: None,
    })
}

/// Witness directions for the sphere of minimizers to a vertical point:
/// `e_1`, `-e_1`, `e_2`.
pub fn vertical_witnesses(m: usize) -> Vec<DVector<f64>> {
    let e = |i: usize, s: f64| {
        let mut v = DVector::zeros(m);
        v[i] = s;
        v
    };
    vec![e(0, 1.0), e(0, -1.0), e(1, 1.0)]
}

pub fn classify(alg: &HTypeAlgebra, target: &GroupPoint) -> Result<ConnectionResult> {
    classify_with(alg, target, DEFAULT_ALPHA_CAP)
}

pub fn classify_with(
    alg: &HTypeAlgebra,
    target: &GroupPoint,
    alpha_cap: f64,
) -> Result<ConnectionResult> {
    let target = GroupPoint::from_vectors(alg, target.x.clone(), target.z.clone())?;
    match TargetClass::of(&target) {
        TargetClass::Origin => {
            let spec = GeodesicSpec::straight(DVector::zeros(alg.m()), alg.r());
            Ok(ConnectionResult {
                geodesics: vec![ConnectingGeodesic {
                    endpoint_residual: target.x.amax().max(target.z.amax()),
                    spec,
                    length: 0.0,
                }],
                target,
                class: TargetClass::Origin,
                minimizer_indices: vec![0],
                distance: 0.0,
                in_cut_locus: false,
                multiplicity: Multiplicity::Finite(1),
                roots: None,
            })
        }
        TargetClass::Horizontal => {
            let mut res = connect_horizontal(alg, &target.x)?;
            res.target = target;
            Ok(res)
        }
        TargetClass::Vertical => {
            let mut geodesics = Vec::new();
            for d in vertical_witnesses(alg.m()) {
                geodesics.extend(connect_vertical(alg, &target.z, 1, &d)?);
            }
            let (minimizer_indices, distance) = minimizers(&geodesics);
            Ok(ConnectionResult {
                target,
                class: TargetClass::Vertical,
                geodesics,
                minimizer_indices,
                distance,
                in_cut_locus: true,
                multiplicity: Multiplicity::SphereFamily,
                roots: None,
            })
        }
        TargetClass::Generic => connect_generic(alg, &target, alpha_cap),
    }
}

/// Classifies independent targets, in input order.
pub fn classify_many(
    alg: &HTypeAlgebra,
    targets: &[GroupPoint],
    alpha_cap: f64,
    execution: Execution,
) -> Vec<Result<ConnectionResult>> {
    execution.map_slice(targets, |t| classify_with(alg, t, alpha_cap))
}
