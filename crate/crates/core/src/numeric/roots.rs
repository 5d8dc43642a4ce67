use nalgebra::DVector;

use crate::error::{Error, Result};

/// A sign-change interval `[lo, hi]` of a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Evaluates `f` at both ends and checks the sign change.
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        Self::from_values(lo, hi, f(lo), f(hi))
    }

    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        let ok = lo < hi && f_lo.is_finite() && f_hi.is_finite() && f_lo * f_hi <= 0.0;
        if !ok {
            return Err(Error::InvalidBracket { lo, hi, f_lo, f_hi });
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEstimate {
    pub x: f64,
    pub residual: f64,
    /// Final bracket around `x`.
    pub bracket: Bracket,
}

/// Bisection until the bracket is narrower than `tol` or cannot be split
/// any further in f64.
pub fn refine_root<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<RootEstimate> {
    let mut b = Bracket::from_values(bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi)?;
    if b.f_lo == 0.0 {
        return Ok(RootEstimate { x: b.lo, residual: 0.0, bracket: b });
    }
    if b.f_hi == 0.0 {
        return Ok(RootEstimate { x: b.hi, residual: 0.0, bracket: b });
    }
    loop {
        let mid = 0.5 * (b.lo + b.hi);
        if b.width() <= tol || mid <= b.lo || mid >= b.hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(RootEstimate { x: mid, residual: 0.0, bracket: b });
        }
        if (fm < 0.0) == (b.f_lo < 0.0) {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    let x = 0.5 * (b.lo + b.hi);
    Ok(RootEstimate { x, residual: f(x).abs(), bracket: b })
}

/// Central difference `(f(t + h) - f(t - h)) / 2h`.
pub fn fd_derivative<F>(f: F, t: f64, h: f64) -> Result<DVector<f64>>
where
    F: Fn(f64) -> DVector<f64>,
{
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("finite-difference step must be positive, got {h}")));
    }
    Ok((f(t + h) - f(t - h)) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let f = |u: f64| u * u - 2.0;
        let root = refine_root(f, Bracket::new(f, 1.0, 2.0).unwrap(), 1e-14).unwrap();
        assert!((root.x - 2f64.sqrt()).abs() < 1e-14);
        assert!(root.bracket.width() <= 1e-14);
    }

    #[test]
    fn full_precision_when_tol_is_zero() {
        let f = |u: f64| u.cos() - u;
        let root = refine_root(f, Bracket::new(f, 0.0, 1.0).unwrap(), 0.0).unwrap();
        assert!(root.residual < 1e-15);
    }

    #[test]
    fn invalid_brackets() {
        let f = |u: f64| u * u + 1.0;
        assert!(matches!(Bracket::new(f, -1.0, 1.0), Err(Error::InvalidBracket { .. })));
        assert!(Bracket::new(|u| u, 1.0, -1.0).is_err());
        assert!(Bracket::new(|u| u, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn endpoint_root() {
        let f = |u: f64| u - 1.0;
        let root = refine_root(f, Bracket::new(f, 1.0, 2.0).unwrap(), 1e-12).unwrap();
        assert_eq!(root.x, 1.0);
    }

    #[test]
    fn central_differences() {
        let sq = |t: f64| DVector::from_vec(vec![t * t]);
        let d = fd_derivative(sq, 1.0, 1e-5).unwrap();
        assert!((d[0] - 2.0).abs() < 1e-9);
        let c = |_t: f64| DVector::from_vec(vec![3.0, -1.0]);
        assert_eq!(fd_derivative(c, 0.3, 1e-3).unwrap(), DVector::zeros(2));
        assert!(fd_derivative(sq, 0.0, 0.0).is_err());
    }
}
