//! Large-|x| Riccati expansion of the recessive solutions and the
//! initial data it furnishes to the integrator.
//!
//! Writing f'/f = r(x) turns f'' = V f into the Riccati equation
//! r' + r² = V. Near x = ±∞ the recessive branch admits the expansion
//! r(x) = Σ_j c_j x^{m-1-j}, whose leading coefficients reproduce
//! ±Φ'(x) = ±(ζ - m x^{m-1}) and whose x^{-1} coefficient is the
//! algebraic prefactor exponent γ = -(m-1)/2. Truncating at order K and
//! integrating term by term yields log f, from which renormalized
//! initial data for inward integration is assembled.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::SolutionState;
use crate::problem::{Problem, MAX_SERIES_ORDER};

/// Which end of the real line the recessive solution decays toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    PlusInfinity,
    MinusInfinity,
}

impl Side {
    /// Sign of x on this side.
    pub fn sign(self) -> f64 {
        match self {
            Side::PlusInfinity => 1.0,
            Side::MinusInfinity => -1.0,
        }
    }

    /// Sign σ of the leading Riccati coefficient c_{m-1} = -σm for the
    /// decaying branch. On the minus side of odd m the roles of the two
    /// WKB branches swap, because x^m → -∞ there.
    fn sigma(self, m: u32) -> f64 {
        match self {
            Side::PlusInfinity => 1.0,
            Side::MinusInfinity => {
                if m.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Truncated Riccati expansion r(x) ≈ Σ_{j=0..=K} c_j x^{m-1-j} of the
/// recessive logarithmic derivative on one side.
#[derive(Debug, Clone)]
pub struct RiccatiSeries {
    side: Side,
    m: u32,
    zeta: Complex64,
    coefficients: Vec<Complex64>,
    #[cfg(feature = "extended-precision")]
    dd_coefficients: Vec<crate::dd::DdComplex>,
}

impl RiccatiSeries {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    /// Truncation order K (the series carries K + 1 coefficients).
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Coefficient of x^exponent, if the exponent is within the series.
    pub fn coefficient(&self, exponent: i64) -> Option<Complex64> {
        let j = self.m as i64 - 1 - exponent;
        if (0..self.coefficients.len() as i64).contains(&j) {
            Some(self.coefficients[j as usize])
        } else {
            None
        }
    }

    /// r(x) = f'(x)/f(x).
    pub fn r(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in self.coefficients.iter().enumerate() {
            let p = self.m as i64 - 1 - j as i64;
            acc += c * x.powi(p as i32);
        }
        acc
    }

    /// r'(x), differentiated term by term.
    pub fn r_prime(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in self.coefficients.iter().enumerate() {
            let p = self.m as i64 - 1 - j as i64;
            if p != 0 {
                acc += c * (p as f64) * x.powi((p - 1) as i32);
            }
        }
        acc
    }

    /// log f(x), the term-by-term antiderivative of r. The x^{-1}
    /// coefficient integrates to γ·ln|x| and all negative-power terms
    /// vanish at infinity, so exp(log f) carries the normalization
    /// f(x) ~ e^{Φ_ζ(x)} |x|^γ (1 + o(1)) with no spurious constant.
    pub fn log_f(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in self.coefficients.iter().enumerate() {
            let p = self.m as i64 - 1 - j as i64;
            if p == -1 {
                acc += c * x.abs().ln();
            } else {
                acc += c * x.powi((p + 1) as i32) / ((p + 1) as f64);
            }
        }
        acc
    }

    /// log f(x) evaluated with double-double accumulation of the powers
    /// and the sum; coefficients come from the double-double recursion.
    #[cfg(feature = "extended-precision")]
    pub fn log_f_extended(&self, x: f64) -> Complex64 {
        use crate::dd::{Dd, DdComplex};
        let mut acc = DdComplex::ZERO;
        for (j, &c) in self.dd_coefficients.iter().enumerate() {
            let p = self.m as i64 - 1 - j as i64;
            if p == -1 {
                acc = acc.add(c.mul(DdComplex {
                    re: Dd::from_f64(x.abs().ln()),
                    im: Dd::ZERO,
                }));
            } else {
                let power = dd_powi(x, p + 1);
                acc = acc.add(c.mul(DdComplex {
                    re: power.div_f64((p + 1) as f64),
                    im: Dd::ZERO,
                }));
            }
        }
        acc.to_complex()
    }

    /// Magnitude of the last retained r-series term relative to the
    /// dominant one at |x|; the cutoff selector drives this below
    /// ode_rel_tol / 10.
    pub fn tail_relative(&self, x_abs: f64) -> f64 {
        let mut dominant = 0.0f64;
        let mut last = 0.0f64;
        for (j, &c) in self.coefficients.iter().enumerate() {
            let p = self.m as i64 - 1 - j as i64;
            let t = c.norm() * x_abs.powi(p as i32);
            dominant = dominant.max(t);
            last = t;
        }
        if dominant == 0.0 {
            0.0
        } else {
            last / dominant
        }
    }

    /// Defect |r' + r² - V| / |V| of the truncated series at x.
    pub fn relative_residual(&self, problem: &Problem, x: f64) -> f64 {
        let v = problem.potential(self.zeta, x);
        let defect = self.r_prime(x) + self.r(x) * self.r(x) - v;
        defect.norm() / v.norm()
    }
}

#[cfg(feature = "extended-precision")]
fn dd_powi(x: f64, p: i64) -> crate::dd::Dd {
    use crate::dd::Dd;
    let mut acc = Dd::ONE;
    let base = Dd::from_f64(x);
    for _ in 0..p.unsigned_abs() {
        acc = acc.mul(base);
    }
    if p < 0 {
        Dd::ONE.div(acc)
    } else {
        acc
    }
}

/// Contribution of the potential V = (ζ - m x^{m-1})² + α m(m-1) x^{m-2}
/// at descending-order index s (exponent 2(m-1) - s). The s = 0 term m²
/// is consumed by the leading coefficient and never queried.
fn potential_term(m: u32, alpha: f64, zeta: Complex64, s: usize) -> Complex64 {
    let m_us = m as usize;
    let mf = f64::from(m);
    let mut v = Complex64::new(0.0, 0.0);
    if s == m_us - 1 {
        v += -2.0 * mf * zeta;
    }
    if s == 2 * m_us - 2 {
        v += zeta * zeta;
    }
    if s == m_us {
        v += Complex64::new(alpha * mf * (mf - 1.0), 0.0);
    }
    v
}

/// Compute the Riccati coefficients c_0..c_K for the recessive branch
/// on `side`. Matching powers of x in r' + r² = V gives
/// c_0 = -σm and, at each subsequent order s,
/// 2 c_0 c_s = V_s - (2m-1-s) c_{s-m} - Σ_{i=1}^{s-1} c_i c_{s-i},
/// where the middle term (from r') enters only once s ≥ m.
pub fn riccati_series(
    problem: &Problem,
    zeta: Complex64,
    side: Side,
    order: usize,
) -> Result<RiccatiSeries> {
    problem.validate()?;
    if !(2..=MAX_SERIES_ORDER).contains(&order) {
        return Err(Error::SeriesOrder {
            requested: order,
            max: MAX_SERIES_ORDER,
        });
    }
    let m = problem.m;
    let sigma = side.sigma(m);
    let mf = f64::from(m);
    let c0 = Complex64::new(-sigma * mf, 0.0);

    let mut c = Vec::with_capacity(order + 1);
    c.push(c0);
    for s in 1..=order {
        let mut r_sum = Complex64::new(0.0, 0.0);
        for i in 1..s {
            r_sum += c[i] * c[s - i];
        }
        if s >= m as usize {
            let p = (2 * m as i64 - 1) - s as i64;
            r_sum += (p as f64) * c[s - m as usize];
        }
        r_sum -= potential_term(m, problem.alpha, zeta, s);
        c.push(-r_sum / (2.0 * c0));
    }

    #[cfg(feature = "extended-precision")]
    let dd_coefficients = riccati_series_dd(problem, zeta, sigma, order);

    Ok(RiccatiSeries {
        side,
        m,
        zeta,
        coefficients: c,
        #[cfg(feature = "extended-precision")]
        dd_coefficients,
    })
}

#[cfg(feature = "extended-precision")]
fn riccati_series_dd(
    problem: &Problem,
    zeta: Complex64,
    sigma: f64,
    order: usize,
) -> Vec<crate::dd::DdComplex> {
    use crate::dd::DdComplex;
    let m = problem.m;
    let mf = f64::from(m);
    let c0 = DdComplex::from_f64(-sigma * mf, 0.0);
    let two_c0 = c0.mul_f64(2.0);
    let mut c = Vec::with_capacity(order + 1);
    c.push(c0);
    for s in 1..=order {
        let mut r_sum = DdComplex::ZERO;
        for i in 1..s {
            r_sum = r_sum.add(c[i].mul(c[s - i]));
        }
        if s >= m as usize {
            let p = (2 * m as i64 - 1) - s as i64;
            r_sum = r_sum.add(c[s - m as usize].mul_f64(p as f64));
        }
        let v = potential_term(m, problem.alpha, zeta, s);
        r_sum = r_sum.sub(DdComplex::from_f64(v.re, v.im));
        c.push(r_sum.mul_f64(-1.0).div(two_c0));
    }
    c
}

/// Pick the inward-integration start |x| = X∞ for ζ: the potential must
/// be firmly in its decaying regime, m X^{m-1} ≥ 4(1 + |ζ|), and the
/// last retained series term must sit below ode_rel_tol / 10 relative to
/// the dominant one — on both sides, since odd m has distinct branches.
pub fn choose_cutoff(problem: &Problem, zeta: Complex64) -> Result<f64> {
    let order = problem.series_order;
    if order + 1 < problem.m as usize + 2 {
        return Err(Error::InvalidParameter(format!(
            "series order {order} too small to resolve the x^{{-1}} tail for m = {}",
            problem.m
        )));
    }
    let mut all_series = vec![riccati_series(problem, zeta, Side::PlusInfinity, order)?];
    if problem.m % 2 == 1 {
        all_series.push(riccati_series(problem, zeta, Side::MinusInfinity, order)?);
    }
    let tol = problem.tolerances.ode_rel_tol / 10.0;
    let mf = f64::from(problem.m);
    let x_regime = (4.0 * (1.0 + zeta.norm()) / mf).powf(1.0 / (mf - 1.0));
    let mut x = problem.cutoff.x_min.max(x_regime);
    while x <= problem.cutoff.x_cap * (1.0 + 1e-12) {
        if all_series
            .iter()
            .all(|s| s.tail_relative(x) < tol && s.tail_relative(-x) < tol)
        {
            return Ok(x);
        }
        x *= 1.05;
    }
    Err(Error::CutoffExhausted {
        cap: problem.cutoff.x_cap,
        zeta_abs: zeta.norm(),
    })
}

/// Renormalized initial data for inward integration from one side.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub state: SolutionState,
    pub series: RiccatiSeries,
    /// |x| actually used; at least the value from [`choose_cutoff`].
    pub cutoff: f64,
}

/// Build the renormalized state at x0 = ±X∞ from the series: value on
/// the unit circle carrying the phase of f, derivative r·value, and the
/// real part of log f absorbed into the log scale.
pub fn initial_state_at(series: &RiccatiSeries, x0: f64) -> SolutionState {
    #[cfg(feature = "extended-precision")]
    let log_f = series.log_f_extended(x0);
    #[cfg(not(feature = "extended-precision"))]
    let log_f = series.log_f(x0);
    let value = Complex64::from_polar(1.0, log_f.im);
    SolutionState {
        x: x0,
        value,
        derivative: series.r(x0) * value,
        log_scale: log_f.re,
    }
}

/// Initial data for the recessive solution on `side`, with the cutoff
/// pushed outward if needed until the series satisfies its own equation
/// to within 10·ode_rel_tol relative to the potential.
pub fn initial_data(problem: &Problem, zeta: Complex64, side: Side) -> Result<InitialData> {
    let mut x_abs = choose_cutoff(problem, zeta)?;
    let series = riccati_series(problem, zeta, side, problem.series_order)?;
    let residual_cap = 10.0 * problem.tolerances.ode_rel_tol;
    loop {
        let x0 = side.sign() * x_abs;
        if series.relative_residual(problem, x0) < residual_cap {
            let state = initial_state_at(&series, x0);
            return Ok(InitialData {
                state,
                series,
                cutoff: x_abs,
            });
        }
        x_abs *= 1.05;
        if x_abs > problem.cutoff.x_cap {
            return Err(Error::CutoffExhausted {
                cap: problem.cutoff.x_cap,
                zeta_abs: zeta.norm(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_for(m: u32, zeta: Complex64, side: Side) -> RiccatiSeries {
        let problem = Problem::new(m).unwrap();
        riccati_series(&problem, zeta, side, problem.series_order).unwrap()
    }

    #[test]
    fn leading_coefficients_reproduce_phase_derivative() {
        for &m in &[2u32, 3, 4] {
            let zeta = Complex64::new(1.3, -0.8);
            let s = series_for(m, zeta, Side::PlusInfinity);
            assert_eq!(
                s.coefficient(m as i64 - 1).unwrap(),
                Complex64::new(-(f64::from(m)), 0.0)
            );
            assert!((s.coefficient(0).unwrap() - zeta).norm() < 1e-15);
            // Nothing between the two leading orders.
            for e in 1..(m as i64 - 1) {
                assert_eq!(s.coefficient(e).unwrap(), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn algebraic_prefactor_exponent_is_gamma() {
        for &m in &[2u32, 3, 4] {
            let problem = Problem::new(m).unwrap();
            let gamma = problem.gamma_exponent().as_f64();
            let zeta = Complex64::new(-0.4, 2.1);
            for side in [Side::PlusInfinity, Side::MinusInfinity] {
                let s = series_for(m, zeta, side);
                let c = s.coefficient(-1).unwrap();
                assert!(
                    (c - Complex64::new(gamma, 0.0)).norm() < 1e-14,
                    "m = {m}: x^-1 coefficient {c} should be {gamma}"
                );
            }
        }
    }

    #[test]
    fn first_inverse_power_correction() {
        // c_{-m} = ζγ/m on the branch with r ~ +Φ'.
        for &m in &[2u32, 3, 4] {
            let problem = Problem::new(m).unwrap();
            let gamma = problem.gamma_exponent().as_f64();
            let zeta = Complex64::new(0.9, 0.7);
            let s = series_for(m, zeta, Side::PlusInfinity);
            let want = zeta * gamma / f64::from(m);
            let got = s.coefficient(-(m as i64)).unwrap();
            assert!((got - want).norm() < 1e-14 * want.norm().max(1.0));
        }
    }

    #[test]
    fn alpha_shifts_prefactor_exponent() {
        // With the curvature term on, the x^{-1} coefficient becomes
        // γ(1 + ασ).
        let problem = Problem::with(
            3,
            0.7,
            crate::problem::Tolerances::default(),
            8,
            crate::problem::CutoffPolicy::default(),
        )
        .unwrap();
        let zeta = Complex64::new(0.2, 0.4);
        let plus = riccati_series(&problem, zeta, Side::PlusInfinity, 8).unwrap();
        let minus = riccati_series(&problem, zeta, Side::MinusInfinity, 8).unwrap();
        let gamma = -1.0;
        let got_plus = plus.coefficient(-1).unwrap();
        let got_minus = minus.coefficient(-1).unwrap();
        assert!((got_plus - Complex64::new(gamma * 1.7, 0.0)).norm() < 1e-14);
        assert!((got_minus - Complex64::new(gamma * 0.3, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn odd_m_minus_side_mirrors_plus_side() {
        // V is even in x for odd m (α = 0), so the two recessive branches
        // are reflections: c_j^- = (-1)^{p_j + 1} c_j^+.
        let zeta = Complex64::new(1.1, -2.3);
        let plus = series_for(3, zeta, Side::PlusInfinity);
        let minus = series_for(3, zeta, Side::MinusInfinity);
        for j in 0..=plus.order() {
            let p = 3i64 - 1 - j as i64;
            let want = plus.coefficient(p).unwrap()
                * if (p + 1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let got = minus.coefficient(p).unwrap();
            assert!(
                (got - want).norm() < 1e-13 * (1.0 + want.norm()),
                "exponent {p}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn even_m_sides_share_coefficients() {
        let zeta = Complex64::new(-1.7, 0.9);
        let plus = series_for(4, zeta, Side::PlusInfinity);
        let minus = series_for(4, zeta, Side::MinusInfinity);
        for j in 0..=plus.order() {
            let p = 4i64 - 1 - j as i64;
            assert_eq!(plus.coefficient(p), minus.coefficient(p));
        }
    }

    #[test]
    fn coefficients_conjugate_with_zeta() {
        let zeta = Complex64::new(0.6, 1.4);
        let s = series_for(3, zeta, Side::PlusInfinity);
        let s_bar = series_for(3, zeta.conj(), Side::PlusInfinity);
        for j in 0..=s.order() {
            let p = 3i64 - 1 - j as i64;
            let a = s.coefficient(p).unwrap();
            let b = s_bar.coefficient(p).unwrap();
            assert!((a.conj() - b).norm() < 1e-15 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn residual_decays_like_next_order() {
        // Truncating at order K leaves an equation defect one full order
        // below the last matched one: relative residual ~ x^{-(K+1)}.
        // The probe window must stay where the true defect clears the
        // f64 rounding floor of r' + r² - V, which forces small x for a
        // deep series.
        let problem = Problem::new(3).unwrap();
        let zeta = Complex64::new(1.0, 0.5);
        let s = series_for(3, zeta, Side::PlusInfinity);
        let r_near = s.relative_residual(&problem, 3.0);
        let r_far = s.relative_residual(&problem, 5.0);
        assert!(r_near > 0.0 && r_far > 0.0);
        let slope = (r_far / r_near).ln() / (5.0f64 / 3.0).ln();
        let k = problem.series_order as f64;
        assert!(
            slope < -(k - 3.0) && slope > -(k + 5.0),
            "decay slope {slope} for K = {k}"
        );
    }

    #[test]
    fn cutoff_meets_both_conditions() {
        let problem = Problem::new(3).unwrap();
        let zeta = Complex64::new(2.0, 2.0);
        let x = choose_cutoff(&problem, zeta).unwrap();
        let mf = 3.0;
        assert!(mf * x.powi(2) >= 4.0 * (1.0 + zeta.norm()) * (1.0 - 1e-12));
        let tol = problem.tolerances.ode_rel_tol / 10.0;
        for side in [Side::PlusInfinity, Side::MinusInfinity] {
            let s = series_for(3, zeta, side);
            assert!(s.tail_relative(side.sign() * x) < tol);
        }
        assert!(x <= problem.cutoff.x_cap);
    }

    #[test]
    fn cutoff_cap_exhaustion_reported() {
        let problem = Problem::with(
            3,
            0.0,
            crate::problem::Tolerances::default(),
            8,
            crate::problem::CutoffPolicy {
                x_min: 2.0,
                x_cap: 2.1,
            },
        )
        .unwrap();
        let zeta = Complex64::new(100.0, 0.0);
        assert!(matches!(
            choose_cutoff(&problem, zeta),
            Err(Error::CutoffExhausted { .. })
        ));
    }

    #[test]
    fn initial_data_satisfies_invariants() {
        for &m in &[2u32, 3, 4] {
            let problem = Problem::new(m).unwrap();
            let zeta = Complex64::new(0.8, -1.2);
            for side in [Side::PlusInfinity, Side::MinusInfinity] {
                let data = initial_data(&problem, zeta, side).unwrap();
                let state = data.state;
                assert_eq!(state.x, side.sign() * data.cutoff);
                assert!((state.value.norm() - 1.0).abs() < 1e-14);
                let r = data.series.r(state.x);
                assert!((state.derivative / state.value - r).norm() < 1e-13 * r.norm());
                let residual = data.series.relative_residual(&problem, state.x);
                assert!(residual < 10.0 * problem.tolerances.ode_rel_tol);
                // The state sits inside the integrator's renormalization band.
                let l_x = (1.0 + problem.potential(zeta, state.x).norm()).powf(-0.5);
                let norm = state.frame_norm(l_x);
                assert!((1e-2..=1e2).contains(&norm), "frame norm {norm}");
            }
        }
    }

    #[test]
    fn log_f_vanishing_tail_normalization() {
        // Beyond the Φ and γ·ln|x| pieces, log f is a pure inverse-power
        // tail: log f - Φ - γ ln|x| → 0 as x → ∞.
        let problem = Problem::new(3).unwrap();
        let zeta = Complex64::new(0.5, 0.3);
        let s = series_for(3, zeta, Side::PlusInfinity);
        let gamma = problem.gamma_exponent().as_f64();
        for &x in &[20.0, 40.0] {
            let tail = s.log_f(x) - problem.phi(zeta, x) - gamma * x.ln();
            assert!(tail.norm() < 1e-2 / x, "tail {tail} at x = {x}");
        }
    }

    #[cfg(feature = "extended-precision")]
    #[test]
    fn extended_precision_path_agrees() {
        let problem = Problem::new(3).unwrap();
        let zeta = Complex64::new(1.0, 1.0);
        let s = riccati_series(&problem, zeta, Side::PlusInfinity, 8).unwrap();
        for &x in &[4.0, 9.0] {
            let plain = s.log_f(x);
            let extended = s.log_f_extended(x);
            assert!((plain - extended).norm() < 1e-12 * (1.0 + plain.norm()));
        }
    }
}
