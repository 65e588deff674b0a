//! Adaptive Simpson integration.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target error relative to the magnitude of the integral.
    pub rel_tol: f64,
    /// Maximum bisection depth of any sub-interval.
    pub max_depth: u32,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_depth: 60, max_evals: 2_000_000 }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerance must be > 0"));
        }
        if self.max_depth == 0 || self.max_evals < 5 {
            return Err(Error::invalid("quadrature caps must allow at least one refinement"));
        }
        Ok(())
    }
}

struct Budget {
    evals: usize,
    max_evals: usize,
    failed: bool,
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::NumericalFailure`] carrying the partial estimate if a
/// sub-interval hits `max_depth` unconverged or the evaluation budget runs
/// out.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut budget = Budget { evals: 3, max_evals: cfg.max_evals, failed: false };
    let tol = (cfg.rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    let value = refine(&mut f, a, b, fa, fm, fb, whole, tol, cfg.max_depth, &mut budget);
    if budget.failed || !value.is_finite() {
        Err(Error::NumericalFailure { what: "adaptive Simpson quadrature", partial: value })
    } else {
        Ok(value)
    }
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    if budget.evals + 2 > budget.max_evals {
        budget.failed = true;
        return whole;
    }
    let (flm, frm) = (f(lm), f(rm));
    budget.evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let split = left + right;
    let delta = split - whole;
    // Second clause: further bisection cannot beat round-off.
    if delta.abs() <= 15.0 * tol || delta.abs() <= 64.0 * f64::EPSILON * split.abs() {
        return split + delta / 15.0;
    }
    if depth <= 1 {
        budget.failed = true;
        return split + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = QuadratureConfig::default();
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, &q).unwrap();
        assert!((v - 16.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn smooth_transcendental() {
        let q = QuadratureConfig::default();
        let v = adaptive_simpson(libm::sin, 0.0, core::f64::consts::PI, &q).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn sqrt_endpoint_converges() {
        let q = QuadratureConfig::default();
        let v = adaptive_simpson(libm::sqrt, 0.0, 1.0, &q).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let q = QuadratureConfig { rel_tol: 1e-12, max_depth: 60, max_evals: 7 };
        let err = adaptive_simpson(libm::sqrt, 0.0, 1.0, &q).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure { .. }));
    }

    #[test]
    fn depth_cap_is_reported() {
        let q = QuadratureConfig { rel_tol: 1e-14, max_depth: 2, max_evals: 1000 };
        let err = adaptive_simpson(libm::sqrt, 0.0, 1.0, &q).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure { partial, .. } if partial > 0.6));
    }

    #[test]
    fn rejects_bad_config() {
        let q = QuadratureConfig { rel_tol: 0.0, ..Default::default() };
        assert!(adaptive_simpson(|x| x, 0.0, 1.0, &q).is_err());
    }
}
