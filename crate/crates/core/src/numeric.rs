//! Numerical kernels shared by the geometry, emission and grating modules:
//! tanh-sinh quadrature (`quadrature`), Brent root finding (`roots`) and
//! golden-section search (`argmin`), wrapped with tolerance handling.

use std::cell::{Cell, RefCell};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use roots::{Convergency, SearchError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("quadrature did not reach tolerance (estimated error {error:e} on {value:e})")]
    QuadratureTolerance { value: f64, error: f64 },
    #[error("root is not bracketed: f({lo}) and f({hi}) have the same sign")]
    NotBracketed { lo: f64, hi: f64 },
    #[error("root finder did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("non-finite value encountered at {0}")]
    NonFinite(f64),
    #[error("optimizer failed: {0}")]
    Optimizer(String),
}

/// Interval halvings allowed when one tanh-sinh pass misses the target.
const MAX_SPLIT_DEPTH: u32 = 12;

/// Tanh-sinh quadrature on `[a, b]` to an absolute target, halving the
/// interval where a single pass falls short. Returns (value, error).
fn integrate_abs(f: &dyn Fn(f64) -> f64, a: f64, b: f64, target: f64, depth: u32) -> (f64, f64, bool) {
    let out = quadrature::integrate(f, a, b, target);
    if out.error_estimate <= target || depth == 0 {
        return (out.integral, out.error_estimate, out.error_estimate <= target);
    }
    let mid = 0.5 * (a + b);
    let (vl, el, okl) = integrate_abs(f, a, mid, 0.5 * target, depth - 1);
    let (vr, er, okr) = integrate_abs(f, mid, b, 0.5 * target, depth - 1);
    (vl + vr, el + er, okl && okr)
}

/// Integral of `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64, NumericError> {
    if a == b {
        return Ok(0.0);
    }
    // The quadrature crate maps non-finite samples to zero; catch them here.
    let bad = Cell::new(None);
    let g = |x: f64| {
        let v = f(x);
        if !v.is_finite() && bad.get().is_none() {
            bad.set(Some(x));
        }
        v
    };
    let coarse = quadrature::integrate(g, a, b, abs_tol.max(1e-3 * rel_tol.max(1e-12)));
    if let Some(x) = bad.get() {
        return Err(NumericError::NonFinite(x));
    }
    let target = abs_tol.max(rel_tol * coarse.integral.abs());
    if coarse.error_estimate <= target {
        return Ok(coarse.integral);
    }
    let (value, error, ok) = integrate_abs(&g, a, b, target, MAX_SPLIT_DEPTH);
    if let Some(x) = bad.get() {
        return Err(NumericError::NonFinite(x));
    }
    if ok {
        Ok(value)
    } else {
        Err(NumericError::QuadratureTolerance { value, error })
    }
}

/// Relative shortfall tolerated on a single inner integral.
const INNER_SLACK: f64 = 1e-3;

/// Iterated quadrature over the rectangle `[x0,x1] × [y0,y1]`.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    rel_tol: f64,
) -> Result<f64, NumericError> {
    let inner_tol = rel_tol * 0.1;
    let failure = RefCell::new(None);
    let value = integrate(
        |x| match integrate(|y| f(x, y), y0, y1, inner_tol, 1e-300) {
            Ok(v) => v,
            // Outer nodes crowd the edges, where the inner integrand can
            // be too sharp to resolve; a small shortfall there carries
            // negligible weight and shows up in the outer estimate.
            Err(NumericError::QuadratureTolerance { value, error }) if error <= INNER_SLACK * value.abs() => value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        x0,
        x1,
        rel_tol,
        1e-300,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => value,
    }
}

struct Negated<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Negated<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, x: &f64) -> Result<f64, argmin::core::Error> {
        Ok(-(self.0)(*x))
    }
}

/// Maximum of a unimodal `f` on `[lo, hi]` by golden-section search,
/// to an absolute bracket width of about `x_tol`. Returns `(x*, f(x*))`.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> Result<(f64, f64), NumericError> {
    let fail = |e: argmin::core::Error| NumericError::Optimizer(e.to_string());
    // argmin stops on a bracket relative to |x1| + |x2| ≈ |lo| + |hi|.
    let rel = x_tol / (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE);
    let solver = GoldenSectionSearch::new(lo, hi).and_then(|s| s.with_tolerance(rel)).map_err(fail)?;
    let result = Executor::new(Negated(&f), solver)
        .configure(|state| state.param(0.5 * (lo + hi)).max_iters(1000))
        .run()
        .map_err(fail)?;
    let x = *result.state().get_best_param().ok_or_else(|| NumericError::Optimizer("no iterate".into()))?;
    Ok((x, f(x)))
}

/// Brent stopping rule: a bracket narrower than `x_tol`, or an exact zero.
struct Bracket {
    x_tol: f64,
    max_iter: usize,
}

impl Convergency<f64> for Bracket {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }

    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.x_tol
    }

    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

/// Root of `f` bracketed by `[lo, hi]`, located to within `x_tol`.
pub fn find_root(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> Result<f64, NumericError> {
    const MAX_ITER: usize = 200;
    let mut bad = None;
    let mut g = |x: f64| {
        let v = f(x);
        if !v.is_finite() {
            bad.get_or_insert(x);
        }
        v
    };
    let mut conv = Bracket { x_tol, max_iter: MAX_ITER };
    let root = roots::find_root_brent(lo, hi, &mut g, &mut conv);
    if let Some(x) = bad {
        return Err(NumericError::NonFinite(x));
    }
    root.map_err(|e| match e {
        SearchError::NoBracketing => NumericError::NotBracketed { lo, hi },
        SearchError::NoConvergency | SearchError::ZeroDerivative => NumericError::NoConvergence(MAX_ITER),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-12, 0.0).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn integrates_peaked_function() {
        // ∫ 1/(1+x²) over [-100, 100] = 2·atan(100).
        let v = integrate(|x| 1.0 / (1.0 + x * x), -100.0, 100.0, 1e-10, 0.0).unwrap();
        assert!((v - 2.0 * 100f64.atan()).abs() < 1e-9);
    }

    #[test]
    fn integrates_sphere_area() {
        let v = integrate_2d(|t, _| t.sin(), (0.0, PI), (0.0, 2.0 * PI), 1e-10).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn non_finite_integrand_reported() {
        assert!(matches!(integrate(|_| f64::NAN, 0.0, 1.0, 1e-9, 0.0), Err(NumericError::NonFinite(_))));
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-9).unwrap();
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn brent_finds_sqrt_two() {
        let r = find_root(|x| x * x - 2.0, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = find_root(|x| 2.0 - x * x, 0.0, 3.0, 1e-13).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unbracketed_root_reported() {
        assert!(matches!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(NumericError::NotBracketed { .. })));
    }
}
