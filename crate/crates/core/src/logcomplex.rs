use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex scalar stored as (log-magnitude, unit phase): value = e^{log_mag} · unit.
///
/// Survives magnitudes like e^{±x^m} and (mk)! that overflow plain doubles.
/// `log_mag = −∞` encodes an exact zero (the unit is then arbitrary and held at 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "LogComplexRepr", into = "LogComplexRepr")]
pub struct LogComplex {
    pub log_mag: f64,
    pub unit: Complex64,
}

/// Serialized form: {"log_mag": …, "arg": …}, with `log_mag: null` for an exact zero.
#[derive(Serialize, Deserialize)]
struct LogComplexRepr {
    log_mag: Option<f64>,
    arg: f64,
}

impl From<LogComplexRepr> for LogComplex {
    fn from(r: LogComplexRepr) -> Self {
        match r.log_mag {
            None => LogComplex::ZERO,
            Some(lm) => LogComplex {
                log_mag: lm,
                unit: Complex64::from_polar(1.0, r.arg),
            },
        }
    }
}

impl From<LogComplex> for LogComplexRepr {
    fn from(v: LogComplex) -> Self {
        if v.is_zero() {
            LogComplexRepr { log_mag: None, arg: 0.0 }
        } else {
            LogComplexRepr { log_mag: Some(v.log_mag), arg: v.arg() }
        }
    }
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        unit: Complex64::new(1.0, 0.0),
    };

    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        unit: Complex64::new(1.0, 0.0),
    };

    pub fn from_complex(z: Complex64) -> Self {
        let n = z.norm();
        if n == 0.0 {
            return Self::ZERO;
        }
        LogComplex { log_mag: n.ln(), unit: z / n }
    }

    /// Build from a known log-magnitude and phase angle.
    pub fn from_log_polar(log_mag: f64, arg: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex { log_mag, unit: Complex64::from_polar(1.0, arg) }
    }

    /// Build e^{log_mag} · unit, renormalizing the carried unit into the log part.
    pub fn from_scaled(unit_like: Complex64, log_mag: f64) -> Self {
        let n = unit_like.norm();
        if n == 0.0 || log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex { log_mag: log_mag + n.ln(), unit: unit_like / n }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// log |value|; −∞ for an exact zero.
    pub fn abs_log(&self) -> f64 {
        self.log_mag
    }

    pub fn arg(&self) -> f64 {
        self.unit.arg()
    }

    pub fn to_complex(&self) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.log_mag > 709.0 {
            return Err(Error::Overflow(self.log_mag));
        }
        Ok(self.unit * self.log_mag.exp())
    }

    /// Value divided by e^{ref_log} as a plain complex — the re-based frame used
    /// by the zero refiner. Errors if even the shifted value overflows.
    pub fn to_complex_rebased(&self, ref_log: f64) -> Result<Complex64> {
        LogComplex { log_mag: self.log_mag - ref_log, unit: self.unit }.to_complex()
    }

    pub fn mul(&self, rhs: &LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        let u = self.unit * rhs.unit;
        // renormalize: |u| drifts from 1 only by rounding
        LogComplex { log_mag: self.log_mag + rhs.log_mag, unit: u / u.norm() }
    }

    pub fn div(&self, rhs: &LogComplex) -> LogComplex {
        if self.is_zero() {
            return Self::ZERO;
        }
        debug_assert!(!rhs.is_zero(), "division by exact zero");
        let u = self.unit / rhs.unit;
        LogComplex { log_mag: self.log_mag - rhs.log_mag, unit: u / u.norm() }
    }

    /// Exact in the shifted frame: the smaller operand is rescaled to the larger's
    /// log-magnitude before the complex addition.
    pub fn add(&self, rhs: &LogComplex) -> LogComplex {
        if self.is_zero() {
            return *rhs;
        }
        if rhs.is_zero() {
            return *self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag { (self, rhs) } else { (rhs, self) };
        let shift = small.log_mag - big.log_mag;
        if shift < -745.0 {
            return *big;
        }
        let s = big.unit + small.unit * shift.exp();
        let n = s.norm();
        if n == 0.0 {
            return Self::ZERO;
        }
        LogComplex { log_mag: big.log_mag + n.ln(), unit: s / n }
    }

    pub fn neg(&self) -> LogComplex {
        if self.is_zero() {
            return *self;
        }
        LogComplex { log_mag: self.log_mag, unit: -self.unit }
    }

    pub fn sub(&self, rhs: &LogComplex) -> LogComplex {
        self.add(&rhs.neg())
    }

    pub fn conj(&self) -> LogComplex {
        LogComplex { log_mag: self.log_mag, unit: self.unit.conj() }
    }

    /// Multiply by a plain complex factor.
    pub fn scale(&self, factor: Complex64) -> LogComplex {
        self.mul(&LogComplex::from_complex(factor))
    }

    /// Multiply by e^{shift}.
    pub fn shift_log(&self, shift: f64) -> LogComplex {
        if self.is_zero() {
            return *self;
        }
        LogComplex { log_mag: self.log_mag + shift, unit: self.unit }
    }

    /// |self/rhs| as a plain double (exp of the log-magnitude difference).
    pub fn abs_ratio(&self, rhs: &LogComplex) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (self.log_mag - rhs.log_mag).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * (a.norm() + b.norm() + f64::MIN_POSITIVE)
    }

    #[test]
    fn round_trip() {
        let z = Complex64::new(3.0, 4.0);
        let l = LogComplex::from_complex(z);
        assert!((l.log_mag - 5.0f64.ln()).abs() < 1e-14);
        assert!(close(l.to_complex().unwrap(), z, 1e-14));
    }

    #[test]
    fn exact_zero() {
        let l = LogComplex::from_complex(Complex64::new(0.0, 0.0));
        assert!(l.is_zero());
        assert_eq!(l.to_complex().unwrap(), Complex64::new(0.0, 0.0));
        assert!(l.mul(&LogComplex::ONE).is_zero());
        assert_eq!(l.add(&LogComplex::ONE).to_complex().unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn add_dominant() {
        // e^700 + e^0: the small operand is negligible
        let a = LogComplex::from_log_polar(700.0, 0.0);
        let b = LogComplex::ONE;
        let s = a.add(&b);
        assert!((s.log_mag - 700.0).abs() < 1e-12);
        assert!((s.unit - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn add_cancellation() {
        let a = LogComplex::from_complex(Complex64::new(1.0, 1e-8));
        let s = a.sub(&LogComplex::ONE);
        // 1 + 1e-8 i minus 1 leaves ~1e-8 i
        assert!((s.log_mag - (1e-8f64).ln()).abs() < 1e-6);
        assert!((s.arg() - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn overflow_signalled() {
        let l = LogComplex::from_log_polar(1e4, 0.3);
        assert!(matches!(l.to_complex(), Err(Error::Overflow(_))));
        // but the re-based value is fine
        let z = l.to_complex_rebased(1e4).unwrap();
        assert!(close(z, Complex64::from_polar(1.0, 0.3), 1e-14));
    }

    #[test]
    fn serde_round_trip_including_zero() {
        for l in [
            LogComplex::from_complex(Complex64::new(-2.5, 1.25)),
            LogComplex::from_log_polar(1e5, -2.0),
            LogComplex::ZERO,
        ] {
            let s = serde_json::to_string(&l).unwrap();
            let back: LogComplex = serde_json::from_str(&s).unwrap();
            if l.is_zero() {
                assert!(back.is_zero());
            } else {
                assert!((back.log_mag - l.log_mag).abs() <= 1e-12 * l.log_mag.abs().max(1.0));
                assert!((back.unit - l.unit).norm() < 1e-12);
            }
        }
    }

    fn arb_complex(max_mag: f64) -> impl Strategy<Value = Complex64> {
        (-max_mag..max_mag, -max_mag..max_mag).prop_map(|(re, im)| Complex64::new(re, im))
    }

    proptest! {
        #[test]
        fn matches_plain_arithmetic(a in arb_complex(1e3), b in arb_complex(1e3)) {
            prop_assume!(a.norm() > 1e-6 && b.norm() > 1e-6);
            let (la, lb) = (LogComplex::from_complex(a), LogComplex::from_complex(b));
            prop_assert!(close(la.mul(&lb).to_complex().unwrap(), a * b, 1e-12));
            prop_assert!(close(la.div(&lb).to_complex().unwrap(), a / b, 1e-12));
            let sum = la.add(&lb).to_complex().unwrap();
            // addition is exact in the shifted frame; only rounding noise remains
            prop_assert!((sum - (a + b)).norm() <= 1e-12 * (a.norm() + b.norm()));
        }

        #[test]
        fn unit_stays_normalized(a in arb_complex(1e6), b in arb_complex(1e6)) {
            prop_assume!(a.norm() > 1e-9 && b.norm() > 1e-9);
            let mut v = LogComplex::from_complex(a);
            for _ in 0..50 {
                v = v.mul(&LogComplex::from_complex(b));
            }
            prop_assert!((v.unit.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn huge_frames_compose(sa in -3e5f64..3e5, sb in -3e5f64..3e5,
                               a in arb_complex(10.0), b in arb_complex(10.0)) {
            prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
            let la = LogComplex::from_complex(a).shift_log(sa);
            let lb = LogComplex::from_complex(b).shift_log(sb);
            let p = la.mul(&lb);
            prop_assert!((p.log_mag - (sa + sb + (a.norm()*b.norm()).ln())).abs() < 1e-9 * (sa.abs()+sb.abs()+1.0));
        }
    }
}
