//! Ratios of trigonometric functions that cancel near zero.
//!
//! `sinc_like(u) = sin u / u`, `versine_ratio(u) = (1 - cos u) / u^2` and
//! `sine_deficit_ratio(u) = (u - sin u) / u^3`, each with its analytic
//! limit at `u = 0`.

/// Below this magnitude `sinc_like` and `versine_ratio` use their Taylor
/// polynomials.
pub const SERIES_GUARD: f64 = 1e-4;

/// Below this magnitude `sine_deficit_ratio` uses its Taylor series. The
/// direct quotient loses about `-log10(u^2)` digits to cancellation, so the
/// seam has to sit much further out than for the other two ratios.
pub const DEFICIT_GUARD: f64 = 1.0;

pub fn sinc_like(u: f64) -> f64 {
    if u.abs() < SERIES_GUARD {
        branches::sinc_series(u)
    } else {
        branches::sinc_direct(u)
    }
}

pub fn versine_ratio(u: f64) -> f64 {
    if u.abs() < SERIES_GUARD {
        branches::versine_series(u)
    } else {
        branches::versine_direct(u)
    }
}

pub fn sine_deficit_ratio(u: f64) -> f64 {
    if u.abs() < DEFICIT_GUARD {
        branches::deficit_series(u)
    } else {
        branches::deficit_direct(u)
    }
}

/// The two evaluation branches of each guarded ratio, exposed so the seam
/// agreement can be checked directly.
pub mod branches {
    pub fn sinc_series(u: f64) -> f64 {
        let u2 = u * u;
        1.0 - u2 / 6.0 * (1.0 - u2 / 20.0)
    }

    pub fn sinc_direct(u: f64) -> f64 {
        u.sin() / u
    }

    pub fn versine_series(u: f64) -> f64 {
        let u2 = u * u;
        0.5 - u2 / 24.0 * (1.0 - u2 / 30.0)
    }

    /// Half-angle form `2 sin^2(u/2) / u^2`, free of cancellation.
    pub fn versine_direct(u: f64) -> f64 {
        let s = super::branches::sinc_direct(0.5 * u);
        0.5 * s * s
    }

    /// `Σ_k (-1)^k u^{2k} / (2k + 3)!`, truncated well below f64 resolution
    /// for `|u| <= 1`.
    pub fn deficit_series(u: f64) -> f64 {
        let u2 = u * u;
        let mut term = 1.0 / 6.0;
        let mut sum = term;
        for k in 1..12 {
            let n = (2 * k + 3) as f64;
            term *= -u2 / (n * (n - 1.0));
            sum += term;
        }
        sum
    }

    pub fn deficit_direct(u: f64) -> f64 {
        (u - u.sin()) / (u * u * u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn limits_at_zero() {
        assert_eq!(sinc_like(0.0), 1.0);
        assert_eq!(versine_ratio(0.0), 0.5);
        assert_eq!(sine_deficit_ratio(0.0), 1.0 / 6.0);
    }

    #[test]
    fn sinc_values() {
        assert!(sinc_like(PI).abs() < 1e-16);
        let u = 1e-9;
        assert_eq!(sinc_like(u), 1.0 - u * u / 6.0);
        for u in [1e-7, 1e-5, 1e-3, 0.1, 1.0, 3.0, -2.0, 10.0] {
            assert!(sinc_like(u) < 1.0, "u = {u}");
        }
    }

    #[test]
    fn seams_agree() {
        for &g in &[SERIES_GUARD, -SERIES_GUARD] {
            assert!((branches::sinc_series(g) - branches::sinc_direct(g)).abs() < 1e-13);
            assert!((branches::versine_series(g) - branches::versine_direct(g)).abs() < 1e-13);
        }
        for &g in &[DEFICIT_GUARD, -DEFICIT_GUARD] {
            assert!((branches::deficit_series(g) - branches::deficit_direct(g)).abs() < 1e-13);
        }
    }

    #[test]
    fn deficit_series_matches_high_precision_reference() {
        // (u - sin u)/u^3 at u = 0.5, evaluated with 40-digit arithmetic.
        let reference = 0.164_595_691_166_376;
        assert!((sine_deficit_ratio(0.5) - reference).abs() < 1e-15);
        // direct branch far from the seam
        let u: f64 = 3.0;
        assert!((sine_deficit_ratio(u) - (u - u.sin()) / 27.0).abs() < 1e-16);
    }
}
