use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance bundle threaded through the whole pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Local relative error per integrator step (scaled frame).
    pub ode_rel_tol: f64,
    /// Wronskian constancy / proportionality acceptance threshold.
    pub match_tol: f64,
    /// Zero-refinement step tolerance; certification radius is 10x this.
    pub zero_tol: f64,
    /// Quadrature tolerance for the singular-solution integrals.
    pub quad_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_rel_tol: 1e-11,
            match_tol: 1e-8,
            zero_tol: 1e-9,
            quad_tol: 1e-10,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("ode_rel_tol", self.ode_rel_tol),
            ("match_tol", self.match_tol),
            ("zero_tol", self.zero_tol),
            ("quad_tol", self.quad_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters governing the choice of the asymptotic matching abscissa X∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffPolicy {
    /// Lower bound on X∞.
    pub x_min: f64,
    /// Hard cap; exceeding it is an error.
    pub x_cap: f64,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy { x_min: 2.0, x_cap: 50.0 }
    }
}

/// Exact rational −(m−1)/2 in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Rational {
        debug_assert!(den > 0);
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        let g = gcd(num, den);
        Rational { num: num / g, den: den / g }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// A point of ℝ³ at which the singular solution F is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl EvalPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Result<EvalPoint> {
        if !(x.is_finite() && y.is_finite() && t.is_finite()) {
            return Err(Error::InvalidEvalPoint(format!("non-finite coordinates ({x}, {y}, {t})")));
        }
        Ok(EvalPoint { x, y, t })
    }
}

/// Degree, variant coefficient, tolerances, and series/cutoff policy for one
/// ODE family −f″ + (ζ − m x^{m−1})² f (plus the optional α term).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub m: u32,
    /// Coefficient of the commutator variant term; 0 recovers the plain family.
    pub alpha: f64,
    pub tolerances: Tolerances,
    /// Number of Riccati-series correction orders K (coefficients c_{m−1−j}, j = 0..=K).
    pub series_order: usize,
    pub cutoff: CutoffPolicy,
}

pub const MAX_SERIES_ORDER: usize = 64;

/// Default Riccati truncation order. Deep enough that the inward
/// integration can start at moderate X∞: the cutoff conditions are met
/// near X∞ ≈ 5–6 for m ≤ 4, where the series is still well inside its
/// optimal-truncation regime, instead of the X∞ ≈ 25 a short series
/// would force (integration cost grows like X∞^m).
pub const DEFAULT_SERIES_ORDER: usize = 16;

impl Problem {
    pub fn new(m: u32) -> Result<Problem> {
        Problem::with(
            m,
            0.0,
            Tolerances::default(),
            DEFAULT_SERIES_ORDER,
            CutoffPolicy::default(),
        )
    }

    pub fn with(
        m: u32,
        alpha: f64,
        tolerances: Tolerances,
        series_order: usize,
        cutoff: CutoffPolicy,
    ) -> Result<Problem> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("m must be >= 2, got {m}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        tolerances.validate()?;
        if !(2..=MAX_SERIES_ORDER).contains(&series_order) {
            return Err(Error::SeriesOrder { requested: series_order, max: MAX_SERIES_ORDER });
        }
        if !(cutoff.x_min > 0.0 && cutoff.x_cap >= cutoff.x_min) {
            return Err(Error::InvalidParameter(format!(
                "cutoff policy requires 0 < x_min <= x_cap, got [{}, {}]",
                cutoff.x_min, cutoff.x_cap
            )));
        }
        Ok(Problem { m, alpha, tolerances, series_order, cutoff })
    }

    pub fn validate(&self) -> Result<()> {
        Self::with(self.m, self.alpha, self.tolerances, self.series_order, self.cutoff).map(|_| ())
    }

    /// Φ_ζ(x) = ζx − x^m.
    pub fn phi(&self, zeta: Complex64, x: f64) -> Complex64 {
        zeta * x - x.powi(self.m as i32)
    }

    /// γ = −(m−1)/2, exactly.
    pub fn gamma_exponent(&self) -> Rational {
        Rational::new(-((self.m as i64) - 1), 2)
    }

    /// ζ − m x^{m−1} (the square root of the α=0 potential; also Φ′_ζ).
    pub fn phi_prime(&self, zeta: Complex64, x: f64) -> Complex64 {
        zeta - (self.m as f64) * x.powi(self.m as i32 - 1)
    }

    /// (ζ − m x^{m−1})² + α·m(m−1)x^{m−2}.
    ///
    /// The α term realizes the commutator variant of the operator under the
    /// e^{−i(τt+ζy)} transform convention (with e^{+i} the sign would flip);
    /// α = 0 everywhere in the acceptance suite.
    pub fn potential(&self, zeta: Complex64, x: f64) -> Complex64 {
        let m = self.m as f64;
        let base = self.phi_prime(zeta, x);
        let mut v = base * base;
        if self.alpha != 0.0 {
            v += self.alpha * m * (m - 1.0) * x.powi(self.m as i32 - 2);
        }
        v
    }
}
