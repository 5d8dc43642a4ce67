//! File formats: algebra JSON, connection JSON, geodesic samples and
//! figure data.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{Covector, GroupPoint, HTypeAlgebra};
use crate::connect::{mu, nu, ConnectionResult, Multiplicity, TargetClass, ENDPOINT_TOL};
use crate::error::{Error, Result};
use crate::geodesics::{Geodesic, GeodesicSample, GeodesicSpec};
use crate::numeric::sinc_like;
use crate::par::Execution;

/// Shortest round-trip decimal form of a float.
pub fn fmt_f64(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| String::new())
}

/// Parses a comma-separated list of floats such as `"1,-0.5,2e-3"`.
pub fn parse_csv_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| Error::Invalid(format!("not a number: {tok:?}")))
                .and_then(|v| if v.is_finite() { Ok(v) } else { Err(Error::NonFinite("vector entry")) })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgebraJson {
    pub r: usize,
    pub m: usize,
    #[serde(rename = "C")]
    pub c: Vec<Vec<Vec<i64>>>,
}

impl AlgebraJson {
    pub fn from_algebra(alg: &HTypeAlgebra) -> Result<Self> {
        let c = alg
            .structure_matrices()
            .iter()
            .map(|mat| {
                (0..mat.nrows())
                    .map(|i| {
                        (0..mat.ncols())
                            .map(|j| {
                                let v = mat[(i, j)];
                                if v.fract() == 0.0 && v.abs() < 2f64.powi(53) {
                                    Ok(v as i64)
                                } else {
                                    Err(Error::Invalid(format!(
                                        "structure matrix entry {v} is not an integer"
                                    )))
                                }
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { r: alg.r(), m: alg.m(), c })
    }

    /// Rebuilds the algebra and re-verifies its relations.
    pub fn into_algebra(self) -> Result<HTypeAlgebra> {
        if self.c.len() != self.r {
            return Err(Error::DimensionMismatch {
                what: "number of structure matrices",
                expected: self.r,
                found: self.c.len(),
            });
        }
        let mats = self
            .c
            .iter()
            .map(|rows| {
                if rows.len() != self.m || rows.iter().any(|row| row.len() != self.m) {
                    return Err(Error::DimensionMismatch {
                        what: "structure matrix",
                        expected: self.m,
                        found: rows.len(),
                    });
                }
                Ok(DMatrix::from_fn(self.m, self.m, |i, j| rows[i][j] as f64))
            })
            .collect::<Result<Vec<_>>>()?;
        HTypeAlgebra::validated(mats)
    }
}

pub fn algebra_to_json(alg: &HTypeAlgebra) -> Result<String> {
    Ok(serde_json::to_string(&AlgebraJson::from_algebra(alg)?)?)
}

pub fn algebra_from_json(s: &str) -> Result<HTypeAlgebra> {
    serde_json::from_str::<AlgebraJson>(s)?.into_algebra()
}

pub fn load_algebra(path: &std::path::Path) -> Result<HTypeAlgebra> {
    algebra_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PointJson {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConnectingGeodesicJson {
    pub theta: Vec<f64>,
    pub xdot0: Vec<f64>,
    pub length: f64,
    pub is_minimizer: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MultiplicityJson {
    Count(usize),
    Family(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConnectionJson {
    pub target: PointJson,
    pub class: String,
    pub distance: f64,
    pub in_cut_locus: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimizer_multiplicity: Option<MultiplicityJson>,
    pub geodesics: Vec<ConnectingGeodesicJson>,
}

impl ConnectionJson {
    pub fn from_result(res: &ConnectionResult) -> Self {
        Self {
            target: PointJson {
                x: res.target.x.iter().copied().collect(),
                z: res.target.z.iter().copied().collect(),
            },
            class: res.class.as_str().to_string(),
            distance: res.distance,
            in_cut_locus: res.in_cut_locus,
            minimizer_multiplicity: Some(match res.multiplicity {
                Multiplicity::Finite(n) => MultiplicityJson::Count(n),
                Multiplicity::SphereFamily => MultiplicityJson::Family("sphere-family".into()),
            }),
            geodesics: res
                .geodesics
                .iter()
                .enumerate()
                .map(|(i, g)| ConnectingGeodesicJson {
                    theta: g.spec.theta.as_vector().iter().copied().collect(),
                    xdot0: g.spec.xdot0.iter().copied().collect(),
                    length: g.length,
                    is_minimizer: res.is_minimizer(i),
                })
                .collect(),
        }
    }

    /// Re-checks a parsed result against `alg`: the class matches the
    /// target, every geodesic reaches the target with the stated length,
    /// the distance is the least length, the minimizer flags are right and
    /// the cut-locus verdict agrees with the class.
    pub fn validate(&self, alg: &HTypeAlgebra) -> Result<()> {
        let invalid = |msg: String| Err(Error::Invalid(msg));
        let target = GroupPoint::new(alg, self.target.x.clone(), self.target.z.clone())?;
        let class = TargetClass::parse(&self.class)
            .ok_or_else(|| Error::Invalid(format!("unknown class {:?}", self.class)))?;
        if class != TargetClass::of(&target) {
            return invalid(format!("class {:?} does not match the target", self.class));
        }
        if self.geodesics.is_empty() {
            return invalid("no geodesics".into());
        }
        let scale = 1f64.max(target.x.amax()).max(target.z.amax());
        let mut best = f64::INFINITY;
        for g in &self.geodesics {
            let spec = GeodesicSpec::new(
                DVector::from_vec(g.xdot0.clone()),
                Covector::from_vec(g.theta.clone())?,
            );
            let end = Geodesic::new(alg, spec.clone())?.eval(1.0)?.point;
            let miss = (&end.x - &target.x).amax().max((&end.z - &target.z).amax());
            if miss > ENDPOINT_TOL * scale {
                return Err(Error::EndpointMismatch(miss));
            }
            if (spec.speed() - g.length).abs() > 1e-12 * g.length.max(1.0) {
                return invalid(format!("length {} does not match |xdot0|", g.length));
            }
            best = best.min(g.length);
        }
        if (best - self.distance).abs() > 1e-12 * best.max(1.0) {
            return invalid(format!("distance {} is not the least length {best}", self.distance));
        }
        for g in &self.geodesics {
            let min = g.length <= best * (1.0 + 1e-12);
            if min != g.is_minimizer {
                return invalid("minimizer flags are inconsistent".into());
            }
        }
        if self.in_cut_locus != (class == TargetClass::Vertical) {
            return invalid("cut-locus verdict contradicts the target class".into());
        }
        Ok(())
    }
}

pub fn connection_to_json(res: &ConnectionResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ConnectionJson::from_result(res))?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeodesicSpecJson {
    pub r: usize,
    pub m: usize,
    pub xdot0: Vec<f64>,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SampleJson {
    pub t: f64,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub speed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeodesicSamplesJson {
    pub spec: GeodesicSpecJson,
    pub samples: Vec<SampleJson>,
}

pub fn geodesic_samples_json(
    alg: &HTypeAlgebra,
    spec: &GeodesicSpec,
    rows: &[GeodesicSample],
) -> Result<String> {
    let doc = GeodesicSamplesJson {
        spec: GeodesicSpecJson {
            r: alg.r(),
            m: alg.m(),
            xdot0: spec.xdot0.iter().copied().collect(),
            theta: spec.theta.as_vector().iter().copied().collect(),
        },
        samples: rows
            .iter()
            .map(|s| SampleJson {
                t: s.t,
                x: s.point.x.iter().copied().collect(),
                z: s.point.z.iter().copied().collect(),
                speed: s.speed(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// CSV with columns `t, x_1..x_m, z_1..z_n, speed`.
pub fn write_geodesic_csv<W: Write + ?Sized>(out: &mut W, alg: &HTypeAlgebra, rows: &[GeodesicSample]) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=alg.m()).map(|i| format!("x_{i}")));
    header.extend((1..=alg.r()).map(|i| format!("z_{i}")));
    header.push("speed".into());
    writeln!(out, "{}", header.join(","))?;
    for s in rows {
        let mut cells = vec![fmt_f64(s.t)];
        cells.extend(s.point.x.iter().map(|&v| fmt_f64(v)));
        cells.extend(s.point.z.iter().map(|&v| fmt_f64(v)));
        cells.push(fmt_f64(s.speed()));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// `μ(|θ|/2)` against `|θ|`.
    Mu,
    /// `ν(α)` against `α`.
    Nu,
    /// `sin(2α)/(2α)` against `α`.
    Sinc,
}

/// Abscissae closer than this to a pole `2nπ` of `μ(|θ|/2)` get a blank cell.
pub const FIGURE_POLE_BAND: f64 = 1e-9;

impl Figure {
    pub fn header(self) -> &'static str {
        match self {
            Figure::Mu => "theta_norm,mu_half_theta_norm",
            Figure::Nu => "alpha,nu",
            Figure::Sinc => "alpha,sinc_2alpha",
        }
    }

    fn value(self, a: f64) -> Option<f64> {
        match self {
            Figure::Mu => {
                let n = (a / (2.0 * PI)).round();
                if n >= 1.0 && (a - 2.0 * n * PI).abs() <= FIGURE_POLE_BAND {
                    None
                } else {
                    mu(0.5 * a).ok()
                }
            }
            Figure::Nu => nu(a).ok(),
            Figure::Sinc => Some(sinc_like(2.0 * a)),
        }
    }
}

/// Uniform grid of `points` abscissae on `[0, max]`, plus the marked
/// points `2nπ <= max` for `μ` and `ν`.
pub fn figure_rows(which: Figure, max: f64, points: usize, exec: Execution) -> Result<Vec<(f64, Option<f64>)>> {
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::Invalid(format!("figure range must be positive, got {max}")));
    }
    if points < 2 {
        return Err(Error::Invalid(format!("need at least 2 points, got {points}")));
    }
    let mut xs: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { max } else { max * i as f64 / (points - 1) as f64 })
        .collect();
    if which != Figure::Sinc {
        let mut n = 1.0;
        while 2.0 * n * PI <= max {
            let mark = 2.0 * n * PI;
            xs.retain(|&x| (x - mark).abs() > 1e-12 * mark);
            xs.push(mark);
            n += 1.0;
        }
        xs.sort_by(f64::total_cmp);
    }
    Ok(exec.map_slice(&xs, |&a| (a, which.value(a))))
}

pub fn write_figure_csv<W: Write + ?Sized>(out: &mut W, which: Figure, rows: &[(f64, Option<f64>)]) -> Result<()> {
    writeln!(out, "{}", which.header())?;
    for (a, v) in rows {
        writeln!(out, "{},{}", fmt_f64(*a), v.map(fmt_f64).unwrap_or_default())?;
    }
    Ok(())
}
