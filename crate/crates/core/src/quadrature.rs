//! Adaptive Gauss–Kronrod quadrature with log-magnitude accumulation.
//!
//! Integrands return [`LogComplex`] values, so panels whose contributions
//! differ by hundreds of orders of magnitude combine without overflow; the
//! final sum is formed pairwise in spatial order for reproducibility. Error
//! control is the classic 15-point Kronrod / 7-point Gauss pair: the worst
//! panel is bisected until the summed discrepancy drops below the requested
//! relative tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::logcomplex::LogComplex;

/// Kronrod abscissae on `[0, 1]` boundary side (symmetric pairs), last entry
/// the center node.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

/// 7-point Gauss weights, paired with `XGK[1]`, `XGK[3]`, `XGK[5]` and the
/// center node.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod weights, aligned with `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Default cap on the number of panels an adaptive run may create.
pub const DEFAULT_MAX_PANELS: usize = 4096;

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Quadrature {
    /// The integral.
    pub value: LogComplex,
    /// `log` of the absolute error estimate (Kronrod minus Gauss, summed).
    pub error_log: f64,
    /// Number of panels in the final partition.
    pub panels: usize,
}

struct Panel {
    lo: f64,
    hi: f64,
    value: LogComplex,
    error_log: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error_log == other.error_log
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error_log.total_cmp(&other.error_log)
    }
}

/// Integrate `f` over `[lo, hi]` to relative tolerance `rel_tol`.
///
/// The integrand may fail (its own evaluations are fallible); such errors
/// propagate. If the error estimate cannot be brought below
/// `rel_tol * |integral|` within `max_panels` panels, the run aborts with
/// [`Error::QuadratureNonConvergence`].
pub fn integrate<F>(f: F, lo: f64, hi: f64, rel_tol: f64, max_panels: usize) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<LogComplex>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "quadrature interval [{lo}, {hi}] is not a finite proper interval"
        )));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature tolerance {rel_tol} must be positive"
        )));
    }

    let mut heap = BinaryHeap::new();
    heap.push(gk15(&f, lo, hi)?);

    loop {
        let total = pairwise_total(&heap);
        let error_log = summed_error_log(&heap);
        if error_log <= rel_tol.ln() + total.abs_log() || error_log == f64::NEG_INFINITY {
            let panels = heap.len();
            return Ok(Quadrature {
                value: total,
                error_log,
                panels,
            });
        }
        if heap.len() + 1 > max_panels {
            return Err(Error::QuadratureNonConvergence {
                lo,
                hi,
                tol: rel_tol,
                achieved: (error_log - total.abs_log()).exp(),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(gk15(&f, worst.lo, mid)?);
        heap.push(gk15(&f, mid, worst.hi)?);
    }
}

/// One Kronrod-15 panel with its Gauss-7 discrepancy.
fn gk15<F>(f: &F, lo: f64, hi: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<LogComplex>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let mut kronrod: Vec<LogComplex> = Vec::with_capacity(15);
    let mut gauss: Vec<LogComplex> = Vec::with_capacity(7);
    for (i, &x) in XGK.iter().enumerate() {
        let weight_log = WGK[i].ln();
        if i == 7 {
            let value = f(center)?;
            kronrod.push(value.shift_log(weight_log));
            gauss.push(value.shift_log(WG[3].ln()));
        } else {
            let below = f(center - half * x)?;
            let above = f(center + half * x)?;
            kronrod.push(below.shift_log(weight_log));
            kronrod.push(above.shift_log(weight_log));
            if i % 2 == 1 {
                let gauss_log = WG[i / 2].ln();
                gauss.push(below.shift_log(gauss_log));
                gauss.push(above.shift_log(gauss_log));
            }
        }
    }

    let k_sum = pairwise_sum(&kronrod);
    let g_sum = pairwise_sum(&gauss);
    let scale = half.ln();
    Ok(Panel {
        lo,
        hi,
        value: k_sum.shift_log(scale),
        error_log: k_sum.sub(&g_sum).abs_log() + scale,
    })
}

/// Pairwise (tree) sum: keeps cancellation error at `O(log n)` roundings.
fn pairwise_sum(terms: &[LogComplex]) -> LogComplex {
    match terms.len() {
        0 => LogComplex::ZERO,
        1 => terms[0],
        n => {
            let (left, right) = terms.split_at(n / 2);
            pairwise_sum(left).add(&pairwise_sum(right))
        }
    }
}

fn pairwise_total(heap: &BinaryHeap<Panel>) -> LogComplex {
    let mut ordered: Vec<&Panel> = heap.iter().collect();
    ordered.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let values: Vec<LogComplex> = ordered.iter().map(|p| p.value).collect();
    pairwise_sum(&values)
}

/// `log(sum of exp(error_log))` over panels, in ascending spatial order.
fn summed_error_log(heap: &BinaryHeap<Panel>) -> f64 {
    let mut logs: Vec<f64> = heap.iter().map(|p| p.error_log).collect();
    let peak = logs
        .iter()
        .fold(f64::NEG_INFINITY, |acc, &v| acc.max(v));
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    logs.sort_by(|a, b| a.total_cmp(b));
    let sum: f64 = logs.iter().map(|&l| (l - peak).exp()).sum();
    peak + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<LogComplex> {
        move |x| Ok(LogComplex::from_complex(Complex64::new(f(x), 0.0)))
    }

    #[test]
    fn integrates_polynomial() {
        let quad = integrate(real(|x| x * x * x), 0.0, 1.0, 1e-12, 64).unwrap();
        let value = quad.value.to_complex().unwrap();
        assert!((value.re - 0.25).abs() < 1e-13);
        assert!(value.im.abs() < 1e-15);
    }

    #[test]
    fn integrates_sine_over_half_period() {
        let quad = integrate(real(|x| x.sin()), 0.0, std::f64::consts::PI, 1e-12, 256).unwrap();
        let value = quad.value.to_complex().unwrap();
        assert!((value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_decaying_integrand() {
        // int_0^inf e^{-s} e^{5is} ds = 1/(1 - 5i); the truncation tail at
        // s = 60 is ~1e-27.
        let f = |s: f64| {
            Ok(LogComplex::from_log_polar(-s, 5.0 * s))
        };
        let quad = integrate(f, 0.0, 60.0, 1e-12, 1024).unwrap();
        let value = quad.value.to_complex().unwrap();
        let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0, -5.0);
        assert!((value - exact).norm() < 1e-12 * exact.norm());
    }

    #[test]
    fn handles_magnitudes_beyond_f64() {
        // int_0^500 e^s ds = e^500 - 1: representable only in log form.
        let f = |s: f64| Ok(LogComplex::from_log_polar(s, 0.0));
        let quad = integrate(f, 0.0, 500.0, 1e-11, 2048).unwrap();
        assert!((quad.value.abs_log() - 500.0).abs() < 1e-10);
        assert!(quad.value.arg().abs() < 1e-12);
    }

    #[test]
    fn reports_nonconvergence_when_budget_too_small() {
        let f = real(|x: f64| (x - 0.3).abs().powf(-0.5));
        let err = integrate(f, 0.0, 1.0, 1e-13, 8).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn integrand_errors_propagate() {
        let f = |x: f64| {
            if x > 0.9 {
                Err(Error::InvalidParameter("probe".into()))
            } else {
                Ok(LogComplex::ONE)
            }
        };
        assert!(integrate(f, 0.0, 1.0, 1e-10, 64).is_err());
    }

    #[test]
    fn exact_zero_integrand_converges_immediately() {
        let quad = integrate(|_| Ok(LogComplex::ZERO), 0.0, 1.0, 1e-12, 8).unwrap();
        assert!(quad.value.is_zero());
        assert_eq!(quad.panels, 1);
    }
}
