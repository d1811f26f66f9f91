//! Double-double arithmetic (~31 significant digits) via error-free transforms.
//!
//! Used where subtractive cancellation exceeds what f64 can absorb: the Airy
//! Maclaurin oracle in the test suite (Ai(8) cancels ~14 digits) and, behind the
//! `extended-precision` feature, the Riccati-series recursion of `asymptotics`.

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Renormalized sum of two components.
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r2 = r.sub(rhs.mul_f64(q2));
        let q3 = r2.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo + q3)
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let e = e + self.lo * x;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div_f64(self, x: f64) -> Dd {
        self.div(Dd::from_f64(x))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn from_f64(re: f64, im: f64) -> DdComplex {
        DdComplex { re: Dd::from_f64(re), im: Dd::from_f64(im) }
    }

    pub fn add(self, rhs: DdComplex) -> DdComplex {
        DdComplex { re: self.re.add(rhs.re), im: self.im.add(rhs.im) }
    }

    pub fn sub(self, rhs: DdComplex) -> DdComplex {
        DdComplex { re: self.re.sub(rhs.re), im: self.im.sub(rhs.im) }
    }

    pub fn mul(self, rhs: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    pub fn mul_f64(self, x: f64) -> DdComplex {
        DdComplex { re: self.re.mul_f64(x), im: self.im.mul_f64(x) }
    }

    pub fn div(self, rhs: DdComplex) -> DdComplex {
        let den = rhs.re.mul(rhs.re).add(rhs.im.mul(rhs.im));
        let num = self.mul(DdComplex { re: rhs.re, im: rhs.im.neg() });
        DdComplex { re: num.re.div(den), im: num.im.div(den) }
    }

    pub fn norm_sqr_f64(self) -> f64 {
        self.re.mul(self.re).add(self.im.mul(self.im)).to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_is_compensated() {
        // 1 + 1e-25 is invisible in f64 but representable in dd
        let s = Dd::ONE.add(Dd::from_f64(1e-25));
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-25);
        assert_eq!(s.sub(Dd::ONE).to_f64(), 1e-25);
    }

    #[test]
    fn mul_recovers_rounding_error() {
        let a = Dd::from_f64(1.0 / 3.0);
        let p = a.mul_f64(3.0);
        // (fl(1/3))*3 in dd keeps the deficit from 1 exactly
        let defect = p.sub(Dd::ONE).to_f64();
        assert!(defect.abs() < 1e-16 && defect != 0.0);
    }

    #[test]
    fn div_round_trips() {
        let a = Dd::new(std::f64::consts::PI, 1.2246467991473532e-16);
        let b = Dd::from_f64(7.25);
        let q = a.div(b);
        let back = q.mul(b);
        assert!(back.sub(a).to_f64().abs() < 1e-30);
    }

    #[test]
    fn factorial_cancellation() {
        // sum_k (-25)^k / k! = e^{-25}: the largest term is ~e^25/sqrt(50π),
        // so ~21 digits cancel — far beyond f64, comfortably inside dd.
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for k in 1..200 {
            term = term.mul_f64(-25.0).div_f64(k as f64);
            sum = sum.add(term);
        }
        let exact = (-25.0f64).exp();
        assert!((sum.to_f64() - exact).abs() < 1e-8 * exact.abs());
    }

    #[test]
    fn complex_mul_matches() {
        let a = DdComplex::from_f64(1.5, -2.25);
        let b = DdComplex::from_f64(-0.125, 3.0);
        let p = a.mul(b);
        assert_eq!(p.re.to_f64(), 1.5 * -0.125 - -2.25 * 3.0);
        assert_eq!(p.im.to_f64(), 1.5 * 3.0 + -2.25 * -0.125);
    }
}
