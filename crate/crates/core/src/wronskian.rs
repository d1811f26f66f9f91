//! The Wronskian W(ζ) of the two recessive solutions.
//!
//! W(ζ) = f⁺·(f⁻)' − (f⁺)'·f⁻ is x-independent, entire in ζ, and
//! vanishes exactly at the ζ where the recessive solutions become
//! proportional — the eigenvalue condition. Each evaluation shoots both
//! solutions inward from ±X∞ and forms the Wronskian at two separate
//! matching points; the discrepancy between the two values is a direct
//! a-posteriori error estimate.
//!
//! Because each factor can be astronomically large or small, W is
//! carried in log-magnitude form together with `frame_log`, the log of
//! the natural magnitude scale of the factors at the matching point.
//! |W|/e^{frame_log} is the meaningful "how close to zero" measure: it
//! is the size of W relative to the cancellation that produced it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{initial_data, Side};
use crate::error::Result;
use crate::logcomplex::LogComplex;
use crate::ode::{integrate, wronskian_of, SolutionState};
use crate::problem::{Problem, Tolerances};

/// Abscissae where the two inward integrations meet and the Wronskian
/// is formed, in ascending order.
pub const MATCH_POINTS: [f64; 2] = [0.0, 0.4];

/// One evaluation of W(ζ) with its error bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WronskianEval {
    pub zeta: Complex64,
    /// W(ζ) at the first matching point.
    pub value: LogComplex,
    /// |W(x₀) − W(x₁)| relative to max(|W(x₀)|, |W(x₁)|).
    pub constancy_defect: f64,
    /// |W(x₀) − W(x₁)| relative to the factor frame e^{frame_log};
    /// stays near the integrator noise floor even when W ≈ 0.
    pub frame_defect: f64,
    /// Log of the natural magnitude of the Wronskian's constituent
    /// factors at the matching point.
    pub frame_log: f64,
    /// Inward-integration start |x| on each side.
    pub cutoff_plus: f64,
    pub cutoff_minus: f64,
    /// Total accepted integrator steps across the four legs.
    pub steps: usize,
}

impl WronskianEval {
    /// log |W| − frame_log: how far the Wronskian sits below its
    /// factors' natural scale. Near a zero of W this is very negative.
    pub fn residual_log(&self) -> f64 {
        self.value.abs_log() - self.frame_log
    }

    /// Whether the phase of this evaluation can be trusted for winding
    /// counts: the two matching points must agree relative to the
    /// frame, and |W| must sit clearly above the shooting noise floor.
    pub fn phase_reliable(&self, tolerances: &Tolerances) -> bool {
        self.frame_defect < tolerances.match_tol
            && self.residual_log() > (50.0 * tolerances.ode_rel_tol).ln()
    }
}

fn frame_log_at(problem: &Problem, zeta: Complex64, a: &SolutionState, b: &SolutionState) -> f64 {
    let l_x = (1.0 + problem.potential(zeta, a.x).norm()).powf(-0.5);
    a.log_scale + b.log_scale + (a.frame_norm(l_x) * b.frame_norm(l_x)).ln()
}

/// Evaluate W(ζ) by two-sided inward shooting.
pub fn eval_w(problem: &Problem, zeta: Complex64) -> Result<WronskianEval> {
    let rel = problem.tolerances.ode_rel_tol;
    let [x_lo, x_hi] = MATCH_POINTS;
    let q = |x: f64| problem.potential(zeta, x);

    let plus = initial_data(problem, zeta, Side::PlusInfinity)?;
    let minus = initial_data(problem, zeta, Side::MinusInfinity)?;

    // The tracked solution is dominant going inward on each side, so no
    // leg loses accuracy to contamination by the other branch.
    let p_hi = integrate(q, &plus.state, x_hi, rel, false)?;
    let p_lo = integrate(q, &p_hi.end, x_lo, rel, false)?;
    let m_lo = integrate(q, &minus.state, x_lo, rel, false)?;
    let m_hi = integrate(q, &m_lo.end, x_hi, rel, false)?;

    // Ordered so W(0) > 0: at ζ = 0 both solutions are positive and
    // decaying outward, making f⁺·(f⁻)' − (f⁺)'·f⁻ a sum of positive terms.
    let w_lo = wronskian_of(&p_lo.end, &m_lo.end)?;
    let w_hi = wronskian_of(&p_hi.end, &m_hi.end)?;

    let frame_lo = frame_log_at(problem, zeta, &m_lo.end, &p_lo.end);
    let frame_hi = frame_log_at(problem, zeta, &m_hi.end, &p_hi.end);
    let frame_log = frame_lo.max(frame_hi);

    let diff = w_lo.sub(&w_hi);
    let frame_defect = if diff.is_zero() {
        0.0
    } else {
        (diff.abs_log() - frame_log).exp()
    };
    let constancy_defect = if diff.is_zero() {
        0.0
    } else {
        let denom = w_lo.abs_log().max(w_hi.abs_log());
        if denom == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            (diff.abs_log() - denom).exp()
        }
    };

    Ok(WronskianEval {
        zeta,
        value: w_lo,
        constancy_defect,
        frame_defect,
        frame_log,
        cutoff_plus: plus.cutoff,
        cutoff_minus: minus.cutoff,
        steps: p_hi.steps + p_lo.steps + m_lo.steps + m_hi.steps,
    })
}

/// Rectangular ζ-grid specification for scanning W.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanGrid {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl ScanGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.n_re * self.n_im);
        for i in 0..self.n_im {
            let im = if self.n_im == 1 {
                self.im_lo
            } else {
                self.im_lo + (self.im_hi - self.im_lo) * i as f64 / (self.n_im - 1) as f64
            };
            for j in 0..self.n_re {
                let re = if self.n_re == 1 {
                    self.re_lo
                } else {
                    self.re_lo + (self.re_hi - self.re_lo) * j as f64 / (self.n_re - 1) as f64
                };
                pts.push(Complex64::new(re, im));
            }
        }
        pts
    }
}

/// One grid cell of a scan: the evaluation, or the failure that marked it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanCell {
    pub zeta: Complex64,
    pub eval: Option<WronskianEval>,
    /// Present exactly when `eval` is absent.
    pub failure: Option<String>,
}

/// Evaluate W over a grid, in parallel; row-major with the imaginary
/// part varying slowest. Per-cell failures mark their cell and never
/// abort the rest of the scan.
pub fn scan(problem: &Problem, grid: &ScanGrid) -> Vec<ScanCell> {
    use rayon::prelude::*;
    grid.points()
        .par_iter()
        .map(|&zeta| match eval_w(problem, zeta) {
            Ok(eval) => ScanCell {
                zeta,
                eval: Some(eval),
                failure: None,
            },
            Err(err) => ScanCell {
                zeta,
                eval: None,
                failure: Some(err.to_string()),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form_at_origin(m: u32) -> f64 {
        // W(0) = 2m / sin(π/(2m)); the recessive solutions at ζ = 0 are
        // Bessel-K functions of order 1/(2m) in the variable x^m.
        let mf = f64::from(m);
        2.0 * mf / (std::f64::consts::PI / (2.0 * mf)).sin()
    }

    #[test]
    fn matches_closed_form_at_origin() {
        for &m in &[2u32, 3, 4] {
            let problem = Problem::new(m).unwrap();
            let eval = eval_w(&problem, Complex64::new(0.0, 0.0)).unwrap();
            let w = eval.value.to_complex().unwrap();
            let want = closed_form_at_origin(m);
            assert!(
                (w - Complex64::new(want, 0.0)).norm() < 1e-8 * want,
                "m = {m}: W(0) = {w}, want {want}"
            );
            assert!(eval.constancy_defect < 1e-8, "{}", eval.constancy_defect);
        }
    }

    #[test]
    fn hermite_case_satisfies_global_law() {
        // m = 2 reduces to Weber's equation: W(ζ) = 4√2 · e^{ζ²/2}.
        let problem = Problem::new(2).unwrap();
        let zeta = Complex64::new(1.5, 0.5);
        let eval = eval_w(&problem, zeta).unwrap();
        let want_log = (32.0f64).ln() / 2.0 + (zeta * zeta / 2.0).re;
        let want_arg = (zeta * zeta / 2.0).im;
        assert!((eval.value.abs_log() - want_log).abs() < 1e-7);
        let got = eval.value.to_complex().unwrap();
        let want = (want_log + Complex64::new(0.0, want_arg)).exp();
        assert!((got - want).norm() < 1e-7 * want.norm());
    }

    #[test]
    fn conjugation_symmetry() {
        let problem = Problem::new(3).unwrap();
        let zeta = Complex64::new(1.0, 0.7);
        let w = eval_w(&problem, zeta).unwrap().value.to_complex().unwrap();
        let w_bar = eval_w(&problem, zeta.conj())
            .unwrap()
            .value
            .to_complex()
            .unwrap();
        assert!((w.conj() - w_bar).norm() < 1e-8 * w.norm());
    }

    #[test]
    fn even_m_reflection_symmetry() {
        let problem = Problem::new(4).unwrap();
        let zeta = Complex64::new(0.9, 1.1);
        let w = eval_w(&problem, zeta).unwrap().value.to_complex().unwrap();
        let w_neg = eval_w(&problem, -zeta)
            .unwrap()
            .value
            .to_complex()
            .unwrap();
        assert!((w - w_neg).norm() < 1e-8 * w.norm());
    }

    #[test]
    fn evaluation_is_phase_reliable_away_from_zeros() {
        let problem = Problem::new(3).unwrap();
        let eval = eval_w(&problem, Complex64::new(0.5, 0.5)).unwrap();
        assert!(eval.phase_reliable(&problem.tolerances));
        assert!(eval.frame_defect < 1e-9);
    }

    #[test]
    fn grid_points_row_major() {
        let grid = ScanGrid {
            re_lo: -1.0,
            re_hi: 1.0,
            im_lo: 0.0,
            im_hi: 2.0,
            n_re: 3,
            n_im: 2,
        };
        let pts = grid.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], Complex64::new(-1.0, 0.0));
        assert_eq!(pts[2], Complex64::new(1.0, 0.0));
        assert_eq!(pts[3], Complex64::new(-1.0, 2.0));
    }
}
