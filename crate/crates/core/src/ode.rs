//! Adaptive integration of f'' = q(x) f with running renormalization.
//!
//! The integrator advances the pair (f, f') with an embedded 5(4)
//! Runge-Kutta pair (Dormand-Prince coefficients, FSAL). Because the
//! tracked solutions sweep through hundreds of decades of magnitude, the
//! state is stored as a renormalized pair plus an accumulated natural-log
//! scale: whenever the weighted max-norm of the pair leaves [1e-2, 1e2]
//! the pair is rescaled to unit max-norm and the log absorbed into
//! `log_scale`. The weighted norm uses the local length scale
//! L(x) = (1 + |q(x)|)^{-1/2}, which makes f and f'·L comparable.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logcomplex::LogComplex;

/// Renormalized solution data at a single abscissa.
///
/// The true solution is `value * exp(log_scale)` and its derivative
/// `derivative * exp(log_scale)`; `value` and `derivative` are kept
/// within a few orders of magnitude of 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionState {
    pub x: f64,
    pub value: Complex64,
    pub derivative: Complex64,
    pub log_scale: f64,
}

impl SolutionState {
    /// Weighted max-norm of the renormalized pair, with derivative
    /// weighted by the local length scale `l_x`.
    pub fn frame_norm(&self, l_x: f64) -> f64 {
        self.value.norm().max(self.derivative.norm() * l_x)
    }

    /// The solution value in log-magnitude form.
    pub fn true_value(&self) -> LogComplex {
        LogComplex::from_scaled(self.value, self.log_scale)
    }

    /// The solution derivative in log-magnitude form.
    pub fn true_derivative(&self) -> LogComplex {
        LogComplex::from_scaled(self.derivative, self.log_scale)
    }
}

/// Wronskian a·b' − a'·b of two states at the same abscissa, carried in
/// log-magnitude form so enormous common frames cancel exactly.
pub fn wronskian_of(a: &SolutionState, b: &SolutionState) -> Result<LogComplex> {
    if (a.x - b.x).abs() > 1e-12 * (1.0 + a.x.abs()) {
        return Err(Error::MismatchedAbscissae { a: a.x, b: b.x });
    }
    let combination = a.value * b.derivative - a.derivative * b.value;
    Ok(LogComplex::from_scaled(
        combination,
        a.log_scale + b.log_scale,
    ))
}

/// One accepted step, recorded for dense output. Endpoint values share
/// the frame `log_scale`; `q_left`/`q_right` supply f'' = q f for the
/// Hermite reconstruction of both f and f'.
#[derive(Debug, Clone, Copy)]
struct StepRecord {
    x_left: f64,
    x_right: f64,
    log_scale: f64,
    f_left: Complex64,
    d_left: Complex64,
    f_right: Complex64,
    d_right: Complex64,
    q_left: Complex64,
    q_right: Complex64,
}

/// Piecewise cubic Hermite reconstruction of an integrated solution.
///
/// Each interval keeps its own log frame, so evaluation anywhere in the
/// covered range returns a `SolutionState` free of overflow.
#[derive(Debug, Clone)]
pub struct DenseOutput {
    records: Vec<StepRecord>,
    x_first: f64,
    x_last: f64,
}

impl DenseOutput {
    /// Covered abscissa range as (low, high).
    pub fn range(&self) -> (f64, f64) {
        if self.x_first <= self.x_last {
            (self.x_first, self.x_last)
        } else {
            (self.x_last, self.x_first)
        }
    }

    /// Step boundaries in integration order (first point through last).
    pub fn knots(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self.records.iter().map(|r| r.x_left).collect();
        xs.push(self.x_last);
        xs
    }

    /// Evaluate solution and derivative at `x` inside the covered range.
    pub fn eval(&self, x: f64) -> Result<SolutionState> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * (1.0 + x.abs());
        if x < lo - slack || x > hi + slack {
            return Err(Error::OutsideDenseRange { x, lo, hi });
        }
        let x = x.clamp(lo, hi);
        // Records are ordered in integration direction; binary-search on
        // the interval containing x.
        let ascending = self.x_first <= self.x_last;
        let idx = self
            .records
            .partition_point(|r| {
                if ascending {
                    r.x_right < x
                } else {
                    r.x_right > x
                }
            })
            .min(self.records.len() - 1);
        let r = &self.records[idx];
        let h = r.x_right - r.x_left;
        if h == 0.0 {
            return Ok(SolutionState {
                x,
                value: r.f_left,
                derivative: r.d_left,
                log_scale: r.log_scale,
            });
        }
        let t = ((x - r.x_left) / h).clamp(0.0, 1.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let dd_left = r.q_left * r.f_left;
        let dd_right = r.q_right * r.f_right;
        let value = h00 * r.f_left + h10 * h * r.d_left + h01 * r.f_right + h11 * h * r.d_right;
        let derivative =
            h00 * r.d_left + h10 * h * dd_left + h01 * r.d_right + h11 * h * dd_right;
        Ok(SolutionState {
            x,
            value,
            derivative,
            log_scale: r.log_scale,
        })
    }
}

/// Result of one integration sweep.
#[derive(Debug, Clone)]
pub struct Integration {
    pub end: SolutionState,
    pub dense: Option<DenseOutput>,
    pub steps: usize,
    pub rejected: usize,
}

const MAX_STEPS: usize = 20_000_000;
const RENORM_LO: f64 = 1e-2;
const RENORM_HI: f64 = 1e2;

#[derive(Clone, Copy)]
struct Pair {
    v: Complex64,
    d: Complex64,
}

impl Pair {
    fn add_scaled(self, h: f64, terms: &[(f64, Pair)]) -> Pair {
        let mut v = self.v;
        let mut d = self.d;
        for &(c, k) in terms {
            v += h * c * k.v;
            d += h * c * k.d;
        }
        Pair { v, d }
    }
}

/// Integrate f'' = q(x) f from `start` to `x_end` with relative
/// tolerance `rel_tol`, optionally recording dense output.
pub fn integrate<Q>(
    q: Q,
    start: &SolutionState,
    x_end: f64,
    rel_tol: f64,
    want_dense: bool,
) -> Result<Integration>
where
    Q: Fn(f64) -> Complex64,
{
    let x0 = start.x;
    if !x_end.is_finite() || !x0.is_finite() {
        return Err(Error::InvalidParameter(
            "integration endpoints must be finite".into(),
        ));
    }
    let span = x_end - x0;
    if span == 0.0 {
        return Ok(Integration {
            end: *start,
            dense: want_dense.then(|| DenseOutput {
                records: vec![StepRecord {
                    x_left: x0,
                    x_right: x0,
                    log_scale: start.log_scale,
                    f_left: start.value,
                    d_left: start.derivative,
                    f_right: start.value,
                    d_right: start.derivative,
                    q_left: q(x0),
                    q_right: q(x0),
                }],
                x_first: x0,
                x_last: x0,
            }),
            steps: 0,
            rejected: 0,
        });
    }
    let direction = span.signum();

    let local_scale = |x: f64| (1.0 + q(x).norm()).powf(-0.5);

    let mut x = x0;
    let mut y = Pair {
        v: start.value,
        d: start.derivative,
    };
    let mut log_scale = start.log_scale;
    let mut qx = q(x);
    let mut k1 = Pair { v: y.d, d: qx * y.v };

    let mut h = direction * (0.01 * local_scale(x0)).min(span.abs());
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut records: Vec<StepRecord> = Vec::new();

    let atol = 1e-300;
    loop {
        if steps + rejected > MAX_STEPS {
            return Err(Error::StepBudgetExhausted { x, steps });
        }
        let remaining = x_end - x;
        if remaining == 0.0 || remaining.signum() != direction {
            break;
        }
        if h.abs() >= remaining.abs() {
            h = remaining;
        }
        if h.abs() < 1e-14 * (1.0 + x.abs()) {
            return Err(Error::StepUnderflow { x, start: x0 });
        }

        let rhs = |x: f64, p: Pair| Pair {
            v: p.d,
            d: q(x) * p.v,
        };

        let k2 = rhs(x + 0.2 * h, y.add_scaled(h, &[(0.2, k1)]));
        let k3 = rhs(
            x + 0.3 * h,
            y.add_scaled(h, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]),
        );
        let k4 = rhs(
            x + 0.8 * h,
            y.add_scaled(
                h,
                &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
            ),
        );
        let k5 = rhs(
            x + 8.0 / 9.0 * h,
            y.add_scaled(
                h,
                &[
                    (19372.0 / 6561.0, k1),
                    (-25360.0 / 2187.0, k2),
                    (64448.0 / 6561.0, k3),
                    (-212.0 / 729.0, k4),
                ],
            ),
        );
        let k6 = rhs(
            x + h,
            y.add_scaled(
                h,
                &[
                    (9017.0 / 3168.0, k1),
                    (-355.0 / 33.0, k2),
                    (46732.0 / 5247.0, k3),
                    (49.0 / 176.0, k4),
                    (-5103.0 / 18656.0, k5),
                ],
            ),
        );
        let y_new = y.add_scaled(
            h,
            &[
                (35.0 / 384.0, k1),
                (500.0 / 1113.0, k3),
                (125.0 / 192.0, k4),
                (-2187.0 / 6784.0, k5),
                (11.0 / 84.0, k6),
            ],
        );
        let x_new = x + h;
        let q_new = q(x_new);
        let k7 = Pair {
            v: y_new.d,
            d: q_new * y_new.v,
        };

        let err_v = h
            * ((71.0 / 57600.0) * k1.v + (-71.0 / 16695.0) * k3.v
                + (71.0 / 1920.0) * k4.v
                + (-17253.0 / 339200.0) * k5.v
                + (22.0 / 525.0) * k6.v
                + (-1.0 / 40.0) * k7.v);
        let err_d = h
            * ((71.0 / 57600.0) * k1.d + (-71.0 / 16695.0) * k3.d
                + (71.0 / 1920.0) * k4.d
                + (-17253.0 / 339200.0) * k5.d
                + (22.0 / 525.0) * k6.d
                + (-1.0 / 40.0) * k7.d);
        if !(err_v.is_finite() && err_d.is_finite() && y_new.v.is_finite() && y_new.d.is_finite())
        {
            return Err(Error::NonFiniteCoefficient { x: x_new });
        }

        // Weighted error norm: the derivative component is commensurate
        // with the value component only after multiplying by the local
        // length scale, and each component's scale guards against zero
        // crossings of the other.
        let l_new = (1.0 + q_new.norm()).powf(-0.5);
        let v_mag = y.v.norm().max(y_new.v.norm());
        let d_mag = y.d.norm().max(y_new.d.norm());
        let scale_v = atol + rel_tol * v_mag.max(d_mag * l_new);
        let scale_d = atol + rel_tol * d_mag.max(v_mag / l_new);
        let e0 = err_v.norm() / scale_v;
        let e1 = err_d.norm() / scale_d;
        let err = (0.5 * (e0 * e0 + e1 * e1)).sqrt();

        if err <= 1.0 {
            steps += 1;
            if want_dense {
                records.push(StepRecord {
                    x_left: x,
                    x_right: x_new,
                    log_scale,
                    f_left: y.v,
                    d_left: y.d,
                    f_right: y_new.v,
                    d_right: y_new.d,
                    q_left: qx,
                    q_right: q_new,
                });
            }
            x = x_new;
            y = y_new;
            qx = q_new;
            k1 = k7;

            let norm = y.v.norm().max(y.d.norm() * l_new);
            if !(RENORM_LO..=RENORM_HI).contains(&norm) {
                if norm == 0.0 || !norm.is_finite() {
                    return Err(Error::NonFiniteCoefficient { x });
                }
                // The increment is quantized to a multiple of 2^-8 so the
                // accumulator stays exactly representable: a plain `+=` of
                // irrational increments rounds at ulp(log_scale), and paths
                // renormalizing at different points then disagree by
                // ~|log_scale| * eps — the dominant noise in fine-grained
                // comparisons of nearby solution values.
                let increment = (norm.ln() * 256.0).round() / 256.0;
                let divisor = increment.exp();
                y.v /= divisor;
                y.d /= divisor;
                k1.v /= divisor;
                k1.d /= divisor;
                log_scale += increment;
            }

            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.14) * err_old.powf(0.08)).clamp(0.2, 5.0)
            };
            err_old = err.max(1e-10);
            h *= fac;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
    }

    let end = SolutionState {
        x: x_end,
        value: y.v,
        derivative: y.d,
        log_scale,
    };
    let dense = if want_dense {
        Some(DenseOutput {
            records,
            x_first: x0,
            x_last: x_end,
        })
    } else {
        None
    };
    Ok(Integration {
        end,
        dense,
        steps,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_state(x: f64, sign: f64) -> SolutionState {
        // f = e^{sign·x} in renormalized form: unit value, derivative sign.
        SolutionState {
            x,
            value: Complex64::new(1.0, 0.0),
            derivative: Complex64::new(sign, 0.0),
            log_scale: sign * x,
        }
    }

    #[test]
    fn tracks_decaying_exponential() {
        // q ≡ 1, f = e^{-x}, integrating from 5 down to 0.
        let start = exp_state(5.0, -1.0);
        let out = integrate(|_| Complex64::new(1.0, 0.0), &start, 0.0, 1e-11, false).unwrap();
        let ratio = out.end.true_value().abs_ratio(&start.true_value());
        assert!((ratio - 5.0f64.exp()).abs() < 1e-8 * 5.0f64.exp());
        let log_deriv = out.end.derivative / out.end.value;
        assert!((log_deriv + Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn wronskian_constant_through_integration() {
        // Pair e^x and e^{-x}: Wronskian is exactly -2 at any x.
        let q = |_: f64| Complex64::new(1.0, 0.0);
        let a0 = exp_state(0.0, 1.0);
        let b0 = exp_state(0.0, -1.0);
        let w0 = wronskian_of(&a0, &b0).unwrap().to_complex().unwrap();
        assert!((w0 - Complex64::new(-2.0, 0.0)).norm() < 1e-14);

        let a = integrate(q, &a0, 12.0, 1e-11, false).unwrap().end;
        let b = integrate(q, &b0, 12.0, 1e-11, false).unwrap().end;
        let w = wronskian_of(&a, &b).unwrap().to_complex().unwrap();
        assert!((w - Complex64::new(-2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn wronskian_antisymmetry() {
        let a = SolutionState {
            x: 1.0,
            value: Complex64::new(0.3, -0.7),
            derivative: Complex64::new(1.1, 0.2),
            log_scale: 4.0,
        };
        let b = SolutionState {
            x: 1.0,
            value: Complex64::new(-0.5, 0.9),
            derivative: Complex64::new(0.4, -1.3),
            log_scale: -2.0,
        };
        let wab = wronskian_of(&a, &b).unwrap();
        let wba = wronskian_of(&b, &a).unwrap();
        let sum = wab.add(&wba);
        assert!(sum.is_zero() || sum.abs_log() - wab.abs_log() < -14.0);
        assert!(wronskian_of(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn mismatched_abscissae_rejected() {
        let a = exp_state(1.0, 1.0);
        let b = exp_state(1.5, 1.0);
        assert!(matches!(
            wronskian_of(&a, &b),
            Err(Error::MismatchedAbscissae { .. })
        ));
    }

    #[test]
    fn dense_output_matches_endpoints_and_interior() {
        // Oscillator q = -1: f = cos x from (1, 0) at x = 0.
        let q = |_: f64| Complex64::new(-1.0, 0.0);
        let start = SolutionState {
            x: 0.0,
            value: Complex64::new(1.0, 0.0),
            derivative: Complex64::new(0.0, 0.0),
            log_scale: 0.0,
        };
        let out = integrate(q, &start, 3.0, 1e-11, true).unwrap();
        let dense = out.dense.unwrap();
        let (lo, hi) = dense.range();
        assert_eq!((lo, hi), (0.0, 3.0));
        for &x in &[0.0, 0.77, 1.3, 2.0, 2.999, 3.0] {
            let s = dense.eval(x).unwrap();
            let truth = x.cos();
            let got = s.true_value().to_complex().unwrap();
            assert!(
                (got - Complex64::new(truth, 0.0)).norm() < 2e-8,
                "x = {x}: got {got}, want {truth}"
            );
            let dtruth = -x.sin();
            let dgot = s.true_derivative().to_complex().unwrap();
            assert!((dgot - Complex64::new(dtruth, 0.0)).norm() < 2e-7);
        }
        assert!(dense.eval(3.2).is_err());
        assert!(dense.eval(-0.1).is_err());
    }

    #[test]
    fn dense_output_descending_direction() {
        let q = |_: f64| Complex64::new(-1.0, 0.0);
        let start = SolutionState {
            x: 2.0,
            value: Complex64::new(2.0f64.cos(), 0.0),
            derivative: Complex64::new(-(2.0f64.sin()), 0.0),
            log_scale: 0.0,
        };
        let out = integrate(q, &start, -1.0, 1e-11, true).unwrap();
        let dense = out.dense.unwrap();
        for &x in &[-1.0, -0.4, 0.0, 1.1, 2.0] {
            let s = dense.eval(x).unwrap();
            let got = s.true_value().to_complex().unwrap();
            assert!((got - Complex64::new(x.cos(), 0.0)).norm() < 2e-8);
        }
    }

    #[test]
    fn renormalization_keeps_state_bounded() {
        // Strongly growing solution over a long range: the in-frame pair
        // must stay within the renormalization band while log_scale
        // absorbs ~400 e-folds.
        let q = |_: f64| Complex64::new(4.0, 0.0);
        let start = SolutionState {
            x: 0.0,
            value: Complex64::new(1.0, 0.0),
            derivative: Complex64::new(2.0, 0.0),
            log_scale: 0.0,
        };
        let out = integrate(q, &start, 200.0, 1e-10, false).unwrap();
        let l_x = (1.0f64 + 4.0).powf(-0.5);
        let norm = out.end.frame_norm(l_x);
        assert!((1e-3..=1e3).contains(&norm), "frame norm {norm}");
        let total_log = out.end.log_scale + out.end.value.norm().ln();
        assert!((total_log - 400.0).abs() < 1e-5 * 400.0, "{total_log}");
    }

    #[test]
    fn zero_span_integration_is_identity() {
        let start = exp_state(1.0, 1.0);
        let out = integrate(|_| Complex64::new(1.0, 0.0), &start, 1.0, 1e-11, true).unwrap();
        assert_eq!(out.end, start);
        assert_eq!(out.steps, 0);
        let s = out.dense.unwrap().eval(1.0).unwrap();
        assert_eq!(s.value, start.value);
    }
}
