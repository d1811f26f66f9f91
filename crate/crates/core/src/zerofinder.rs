//! Argument-principle location and certification of Wronskian zeros.
//!
//! The Wronskian is entire in `zeta`, so the number of zeros inside a closed
//! contour equals the winding number of its image. Winding numbers are
//! computed by adaptive phase tracking: edges are first bisected down to a
//! scale-aware spacing (so a cluster of zeros near one edge cannot hide a full
//! turn between samples), then the phase increment between adjacent samples is
//! kept below `pi/2` by midpoint insertion. Regions are quadrisected
//! until each cell isolates at most one zero, the zero is polished by Muller
//! iteration on frame-rebased Wronskian values, and the result is certified by
//! a winding-one circle of radius `10 * zero_tol` plus a frame-relative
//! residual bound.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::wronskian::{eval_w, WronskianEval};

/// Cap on adaptive phase samples per contour edge.
pub const EDGE_SAMPLE_CAP: usize = 1 << 14;
/// Hard cap on the spacing of contour samples. The phase test alone can alias
/// when ~2*pi of swing hides between sparse samples (e.g. a conjugate pair of
/// zeros near one long edge), so edges are bisected on geometry first.
const SEG_LEN_CAP: f64 = 0.5;
/// Spacing shrinks like `SEG_LEN_SCALE / |zeta|` at large `|zeta|`, keeping
/// the growth-phase sweep of `W` (rate at worst ~`|zeta|` rad per unit for
/// m = 2) well under `pi/2` per sample gap.
const SEG_LEN_SCALE: f64 = 1.5;
/// Certification circle radius as a multiple of `zero_tol`.
pub const CERT_RADIUS_FACTOR: f64 = 10.0;
/// Cells below this diameter with winding one go straight to refinement.
const COARSE_DIAMETER: f64 = 0.4;
/// Quadrisection depth budget.
const MAX_DEPTH: usize = 48;
/// Muller / Newton iteration cap.
const MAX_REFINE_ITERS: usize = 60;
/// Split fractions tried when a subdivision line passes too close to a zero.
const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.55, 0.45, 0.6, 0.4];
/// Merge radius for duplicate zeros, as a multiple of `zero_tol`.
const DEDUP_FACTOR: f64 = 3.0;

/// Memoizing Wronskian evaluator shared by every contour walk of a search.
///
/// Quadrisection re-visits cell corners and edge midpoints constantly; keying
/// evaluations on the exact bit pattern of `zeta` makes those repeats free
/// without any tolerance bookkeeping.
pub struct Evaluator<'a> {
    problem: &'a Problem,
    cache: Mutex<HashMap<(u64, u64), WronskianEval>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Evaluator {
            problem,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    /// Evaluate the Wronskian at `zeta`, reusing any previous evaluation at
    /// the identical point.
    pub fn eval(&self, zeta: Complex64) -> Result<WronskianEval> {
        let key = (zeta.re.to_bits(), zeta.im.to_bits());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let eval = eval_w(self.problem, zeta)?;
        self.cache
            .lock()
            .unwrap()
            .insert(key, eval.clone());
        Ok(eval)
    }

    /// Number of distinct points evaluated so far.
    pub fn distinct_evals(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}

/// A closed, positively oriented contour in the `zeta` plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Contour {
    Rectangle {
        re_lo: f64,
        re_hi: f64,
        im_lo: f64,
        im_hi: f64,
    },
    Circle {
        center: Complex64,
        radius: f64,
    },
}

impl Contour {
    /// Initial polyline nodes, counter-clockwise. Adjacent pairs are the
    /// "edges" to which the per-edge sample cap applies.
    fn nodes(&self) -> Vec<Complex64> {
        match *self {
            Contour::Rectangle {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
            } => vec![
                Complex64::new(re_lo, im_lo),
                Complex64::new(re_hi, im_lo),
                Complex64::new(re_hi, im_hi),
                Complex64::new(re_lo, im_hi),
            ],
            Contour::Circle { center, radius } => (0..16)
                .map(|k| {
                    let theta = TAU * k as f64 / 16.0;
                    center + radius * Complex64::new(theta.cos(), theta.sin())
                })
                .collect(),
        }
    }
}

/// A zero of the Wronskian together with its argument-principle certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifiedZero {
    /// Refined location of the zero.
    pub zeta_star: Complex64,
    /// `log |W(zeta_star)|` relative to the matching frame; bounded by
    /// `log(zero_tol)` for a certified zero.
    pub residual_log: f64,
    /// Winding number of the certifying circle (always one).
    pub winding: i64,
    /// Radius of the certifying circle.
    pub cert_radius: f64,
    /// Location of the conjugate partner when the search region contained it.
    pub conjugate_of: Option<Complex64>,
}

/// Refinement scheme used to polish a bracketed zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefineMethod {
    /// Derivative-free three-point Muller iteration (default).
    Muller,
    /// Newton iteration with a central finite-difference derivative.
    NewtonFd,
}

/// Rectangular search region. It must avoid the real axis or be symmetric
/// about it, since zeros come in conjugate pairs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl SearchRegion {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Self> {
        let all_finite =
            re_lo.is_finite() && re_hi.is_finite() && im_lo.is_finite() && im_hi.is_finite();
        if !all_finite || re_lo >= re_hi || im_lo >= im_hi {
            return Err(Error::InvalidParameter(format!(
                "degenerate search region [{re_lo},{re_hi}]x[{im_lo},{im_hi}]"
            )));
        }
        let symmetric = (im_lo + im_hi).abs() < 1e-12 * (im_hi - im_lo);
        if im_lo < 0.0 && im_hi > 0.0 && !symmetric {
            return Err(Error::InvalidParameter(
                "search region straddles the real axis without conjugate symmetry".into(),
            ));
        }
        Ok(SearchRegion {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        })
    }
}

/// Winding number of the Wronskian image of `contour`.
///
/// Every sample must be phase-reliable; a sample that is too close to a zero
/// (or otherwise below the noise floor) aborts the walk with
/// [`Error::UnreliableContour`] so the caller can perturb the contour. The
/// result is a certified non-negative integer: the accumulated phase must land
/// within five percent of a full turn of an integer multiple.
pub fn winding_number(evaluator: &Evaluator<'_>, contour: &Contour) -> Result<i64> {
    let nodes = contour.nodes();
    let mut walker = PhaseWalker {
        evaluator,
        samples: 0,
    };
    let args: Vec<f64> = nodes
        .iter()
        .map(|&z| walker.sample(z).map(|w| w.value.arg()))
        .collect::<Result<_>>()?;

    let mut total = 0.0;
    for k in 0..nodes.len() {
        let next = (k + 1) % nodes.len();
        total += walker.edge_phase(nodes[k], args[k], nodes[next], args[next])?;
    }

    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.05 || rounded < 0.0 {
        return Err(Error::NonIntegerWinding { sum: turns });
    }
    Ok(rounded as i64)
}

struct PhaseWalker<'e, 'p> {
    evaluator: &'e Evaluator<'p>,
    samples: usize,
}

impl PhaseWalker<'_, '_> {
    fn sample(&mut self, zeta: Complex64) -> Result<WronskianEval> {
        let eval = self.evaluator.eval(zeta)?;
        let index = self.samples;
        self.samples += 1;
        if !eval.phase_reliable(&self.evaluator.problem().tolerances) {
            return Err(Error::UnreliableContour {
                index,
                log_w_frame: eval.residual_log(),
            });
        }
        Ok(eval)
    }

    /// Accumulated phase change along one edge, inserting midpoints until
    /// every adjacent pair differs by less than `pi/2`.
    fn edge_phase(&mut self, a: Complex64, arg_a: f64, b: Complex64, arg_b: f64) -> Result<f64> {
        let mut budget = EDGE_SAMPLE_CAP;
        let mut total = 0.0;
        let mut stack = vec![(a, arg_a, b, arg_b)];
        while let Some((xa, aa, xb, ab)) = stack.pop() {
            let delta = wrap_angle(ab - aa);
            let mid = 0.5 * (xa + xb);
            let seg_limit = (SEG_LEN_SCALE / (1.0 + mid.norm())).min(SEG_LEN_CAP);
            if delta.abs() < FRAC_PI_2 && (xb - xa).norm() <= seg_limit {
                total += delta;
                continue;
            }
            if budget == 0 {
                return Err(Error::EdgeCapExceeded {
                    cap: EDGE_SAMPLE_CAP,
                });
            }
            budget -= 1;
            let arg_mid = self.sample(mid)?.value.arg();
            // Process the left half first so phases accumulate in traversal
            // order (the sum is then bit-reproducible).
            stack.push((mid, arg_mid, xb, ab));
            stack.push((xa, aa, mid, arg_mid));
        }
        Ok(total)
    }
}

/// Reduce an angle difference to `[-pi, pi)`.
fn wrap_angle(delta: f64) -> f64 {
    (delta + PI).rem_euclid(TAU) - PI
}

/// Locate and certify every Wronskian zero in `region`, up to `max_zeros`.
///
/// Returns zeros sorted by `|Im zeta*|` ascending, then `|Re zeta*|`, with
/// duplicates within `3 * zero_tol` merged (keeping the smaller residual) and
/// conjugate partners cross-linked when the region contains both.
pub fn find_zeros(
    problem: &Problem,
    region: &SearchRegion,
    max_zeros: usize,
) -> Result<Vec<CertifiedZero>> {
    problem.validate()?;
    let evaluator = Evaluator::new(problem);
    let root = Cell {
        re_lo: region.re_lo,
        re_hi: region.re_hi,
        im_lo: region.im_lo,
        im_hi: region.im_hi,
        depth: 0,
    };

    let mut active = vec![root];
    let mut raw: Vec<CertifiedZero> = Vec::new();
    while !active.is_empty() {
        let outcomes: Vec<Result<Outcome>> = active
            .par_iter()
            .map(|cell| process_cell(&evaluator, cell))
            .collect();
        let mut next = Vec::new();
        for outcome in outcomes {
            match outcome? {
                Outcome::Empty => {}
                Outcome::Zero(zero) => raw.push(zero),
                Outcome::Split(children) => next.extend(children),
            }
        }
        active = next;
    }

    let zero_tol = problem.tolerances.zero_tol;
    let mut zeros = dedup(raw, zero_tol);
    zeros.sort_by(|a, b| {
        let ka = (a.zeta_star.im.abs(), a.zeta_star.re.abs(), a.zeta_star.im);
        let kb = (b.zeta_star.im.abs(), b.zeta_star.re.abs(), b.zeta_star.im);
        ka.partial_cmp(&kb).expect("zero coordinates are finite")
    });
    zeros.truncate(max_zeros);
    link_conjugates(&mut zeros, zero_tol);
    Ok(zeros)
}

/// Polish a seed with a fresh evaluator and certify the result.
///
/// The seed must lie within the convergence basin of a genuine zero; the
/// certificate (winding-one circle, residual bound, off-axis check) rejects
/// anything else.
pub fn refine_zero(problem: &Problem, seed: Complex64) -> Result<CertifiedZero> {
    problem.validate()?;
    let evaluator = Evaluator::new(problem);
    refine_with(&evaluator, seed, RefineMethod::Muller)
}

/// [`refine_zero`] with an explicit refinement scheme.
pub fn refine_zero_with(
    problem: &Problem,
    seed: Complex64,
    method: RefineMethod,
) -> Result<CertifiedZero> {
    problem.validate()?;
    let evaluator = Evaluator::new(problem);
    refine_with(&evaluator, seed, method)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    re_lo: f64,
    re_hi: f64,
    im_lo: f64,
    im_hi: f64,
    depth: usize,
}

impl Cell {
    fn contour(&self) -> Contour {
        Contour::Rectangle {
            re_lo: self.re_lo,
            re_hi: self.re_hi,
            im_lo: self.im_lo,
            im_hi: self.im_hi,
        }
    }

    fn diameter(&self) -> f64 {
        (self.re_hi - self.re_lo).hypot(self.im_hi - self.im_lo)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_lo + self.re_hi),
            0.5 * (self.im_lo + self.im_hi),
        )
    }
}

enum Outcome {
    Empty,
    Zero(CertifiedZero),
    Split(Vec<Cell>),
}

fn process_cell(evaluator: &Evaluator<'_>, cell: &Cell) -> Result<Outcome> {
    let winding = winding_number(evaluator, &cell.contour())?;
    if winding == 0 {
        return Ok(Outcome::Empty);
    }
    if winding == 1 && cell.diameter() < COARSE_DIAMETER {
        let zero = refine_with(evaluator, cell.center(), RefineMethod::Muller)?;
        return Ok(Outcome::Zero(zero));
    }
    if cell.depth >= MAX_DEPTH {
        return Err(Error::SubdivisionBudget {
            depth: cell.depth,
            re_lo: cell.re_lo,
            re_hi: cell.re_hi,
            im_lo: cell.im_lo,
            im_hi: cell.im_hi,
        });
    }
    Ok(Outcome::Split(quadrisect(evaluator, cell, winding)?))
}

/// Split a cell into four quadrants whose windings are all computable and sum
/// to the parent winding. A split line passing too close to a zero makes a
/// child contour unreliable (or breaks additivity); in that case the cut
/// fractions are nudged and the split retried.
fn quadrisect(evaluator: &Evaluator<'_>, cell: &Cell, parent_winding: i64) -> Result<Vec<Cell>> {
    let mut last_err = None;
    for &f_im in &SPLIT_FRACTIONS {
        for &f_re in &SPLIT_FRACTIONS {
            let re_mid = cell.re_lo + f_re * (cell.re_hi - cell.re_lo);
            let im_mid = cell.im_lo + f_im * (cell.im_hi - cell.im_lo);
            let children = [
                (cell.re_lo, re_mid, cell.im_lo, im_mid),
                (re_mid, cell.re_hi, cell.im_lo, im_mid),
                (cell.re_lo, re_mid, im_mid, cell.im_hi),
                (re_mid, cell.re_hi, im_mid, cell.im_hi),
            ]
            .map(|(re_lo, re_hi, im_lo, im_hi)| Cell {
                re_lo,
                re_hi,
                im_lo,
                im_hi,
                depth: cell.depth + 1,
            });

            let mut sum = 0;
            let mut failed = None;
            for child in &children {
                match winding_number(evaluator, &child.contour()) {
                    Ok(w) => sum += w,
                    Err(err @ Error::UnreliableContour { .. }) => {
                        failed = Some(err);
                        break;
                    }
                    Err(other) => return Err(other),
                }
            }
            match failed {
                Some(err) => last_err = Some(err),
                None if sum == parent_winding => return Ok(children.to_vec()),
                // Additivity broken: a zero sits between samples on a cut
                // line. Treat like an unreliable cut and nudge.
                None => {
                    last_err = Some(Error::NonIntegerWinding {
                        sum: sum as f64 - parent_winding as f64,
                    })
                }
            }
        }
    }
    Err(last_err.expect("split loop ran at least once"))
}

fn refine_with(
    evaluator: &Evaluator<'_>,
    seed: Complex64,
    method: RefineMethod,
) -> Result<CertifiedZero> {
    let tolerances = evaluator.problem().tolerances;
    let zero_tol = tolerances.zero_tol;
    // One fixed rebase level keeps iterates as plain complex numbers without
    // changing the zero set.
    let ref_log = evaluator.eval(seed)?.frame_log;

    let zeta_star = match method {
        RefineMethod::Muller => muller(evaluator, seed, ref_log, zero_tol)?,
        RefineMethod::NewtonFd => newton_fd(evaluator, seed, ref_log, zero_tol)?,
    };

    if zeta_star.im.abs() < zero_tol {
        return Err(Error::RealAxisZero { zeta: zeta_star });
    }

    let at_zero = evaluator.eval(zeta_star)?;
    let residual_log = at_zero.residual_log();
    let bound = zero_tol.ln();
    if !(residual_log <= bound) {
        return Err(Error::ResidualTooLarge {
            zeta: zeta_star,
            residual_log,
            bound,
        });
    }

    let cert_radius = CERT_RADIUS_FACTOR * zero_tol;
    let circle = Contour::Circle {
        center: zeta_star,
        radius: cert_radius,
    };
    let winding = winding_number(evaluator, &circle)?;
    if winding != 1 {
        return Err(Error::CertificationFailed {
            zeta: zeta_star,
            winding,
        });
    }

    Ok(CertifiedZero {
        zeta_star,
        residual_log,
        winding,
        cert_radius,
        conjugate_of: None,
    })
}

fn rebased(evaluator: &Evaluator<'_>, zeta: Complex64, ref_log: f64) -> Result<Complex64> {
    evaluator.eval(zeta)?.value.to_complex_rebased(ref_log)
}

fn muller(
    evaluator: &Evaluator<'_>,
    seed: Complex64,
    ref_log: f64,
    zero_tol: f64,
) -> Result<Complex64> {
    let spread = 1e-3 * (1.0 + seed.norm());
    let mut p0 = seed + Complex64::new(spread, 0.0);
    let mut p1 = seed - Complex64::new(spread, 0.0);
    let mut p2 = seed;
    let mut f0 = rebased(evaluator, p0, ref_log)?;
    let mut f1 = rebased(evaluator, p1, ref_log)?;
    let mut f2 = rebased(evaluator, p2, ref_log)?;

    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_REFINE_ITERS {
        if f2 == Complex64::new(0.0, 0.0) {
            return Ok(p2);
        }
        let spacing = p1 - p0;
        if spacing == Complex64::new(0.0, 0.0) {
            return Err(Error::RefineDiverged {
                iters: MAX_REFINE_ITERS,
                last_step,
            });
        }
        let q = (p2 - p1) / spacing;
        let a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        let b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        let c = (1.0 + q) * f2;
        let disc = (b * b - 4.0 * a * c).sqrt();
        let denom = if (b + disc).norm() >= (b - disc).norm() {
            b + disc
        } else {
            b - disc
        };
        if denom == Complex64::new(0.0, 0.0) {
            return Err(Error::RefineDiverged {
                iters: MAX_REFINE_ITERS,
                last_step,
            });
        }
        let step = -(p2 - p1) * 2.0 * c / denom;
        if !step.re.is_finite() || !step.im.is_finite() {
            return Err(Error::RefineDiverged {
                iters: MAX_REFINE_ITERS,
                last_step,
            });
        }
        p0 = p1;
        f0 = f1;
        p1 = p2;
        f1 = f2;
        p2 += step;
        f2 = rebased(evaluator, p2, ref_log)?;
        last_step = step.norm();
        if last_step < zero_tol {
            return Ok(p2);
        }
    }
    Err(Error::RefineDiverged {
        iters: MAX_REFINE_ITERS,
        last_step,
    })
}

fn newton_fd(
    evaluator: &Evaluator<'_>,
    seed: Complex64,
    ref_log: f64,
    zero_tol: f64,
) -> Result<Complex64> {
    let mut z = seed;
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_REFINE_ITERS {
        let f = rebased(evaluator, z, ref_log)?;
        if f == Complex64::new(0.0, 0.0) {
            return Ok(z);
        }
        let h = 1e-7 * (1.0 + z.norm());
        let f_plus = rebased(evaluator, z + Complex64::new(h, 0.0), ref_log)?;
        let f_minus = rebased(evaluator, z - Complex64::new(h, 0.0), ref_log)?;
        let derivative = (f_plus - f_minus) / Complex64::new(2.0 * h, 0.0);
        if derivative == Complex64::new(0.0, 0.0) {
            return Err(Error::RefineDiverged {
                iters: MAX_REFINE_ITERS,
                last_step,
            });
        }
        let step = -f / derivative;
        if !step.re.is_finite() || !step.im.is_finite() {
            return Err(Error::RefineDiverged {
                iters: MAX_REFINE_ITERS,
                last_step,
            });
        }
        z += step;
        last_step = step.norm();
        if last_step < zero_tol {
            return Ok(z);
        }
    }
    Err(Error::RefineDiverged {
        iters: MAX_REFINE_ITERS,
        last_step,
    })
}

fn dedup(zeros: Vec<CertifiedZero>, zero_tol: f64) -> Vec<CertifiedZero> {
    let merge_radius = DEDUP_FACTOR * zero_tol;
    let mut kept: Vec<CertifiedZero> = Vec::new();
    for zero in zeros {
        match kept
            .iter_mut()
            .find(|k| (k.zeta_star - zero.zeta_star).norm() < merge_radius)
        {
            Some(existing) => {
                if zero.residual_log < existing.residual_log {
                    *existing = zero;
                }
            }
            None => kept.push(zero),
        }
    }
    kept
}

fn link_conjugates(zeros: &mut [CertifiedZero], zero_tol: f64) {
    let radius = DEDUP_FACTOR * zero_tol;
    let locations: Vec<Complex64> = zeros.iter().map(|z| z.zeta_star).collect();
    for (i, zero) in zeros.iter_mut().enumerate() {
        let mirror = zero.zeta_star.conj();
        zero.conjugate_of = locations
            .iter()
            .enumerate()
            .find(|&(j, &loc)| j != i && (loc - mirror).norm() < radius)
            .map(|(_, &loc)| loc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // First zeros confirmed independently by a high-precision shooting
    // prototype (values frozen there, not produced by this crate).
    const M3_FIRST: Complex64 = Complex64::new(0.567680827212, 1.513883845602);
    const M3_SECOND: Complex64 = Complex64::new(1.520280310477, 2.975901612539);
    const M4_FIRST_IM: f64 = 1.706999346287;

    #[test]
    fn hermite_square_has_winding_zero() {
        let problem = Problem::new(2).unwrap();
        let evaluator = Evaluator::new(&problem);
        let contour = Contour::Rectangle {
            re_lo: -4.0,
            re_hi: 4.0,
            im_lo: -4.0,
            im_hi: 4.0,
        };
        assert_eq!(winding_number(&evaluator, &contour).unwrap(), 0);

        let region = SearchRegion::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let zeros = find_zeros(&problem, &region, 8).unwrap();
        assert!(zeros.is_empty());
    }

    #[test]
    fn locates_first_zero_for_m3() {
        let problem = Problem::new(3).unwrap();
        let region = SearchRegion::new(0.2, 1.0, 1.1, 1.9).unwrap();
        let zeros = find_zeros(&problem, &region, 4).unwrap();
        assert_eq!(zeros.len(), 1);
        let zero = &zeros[0];
        assert!(
            (zero.zeta_star - M3_FIRST).norm() < 1e-6,
            "found {} expected {}",
            zero.zeta_star,
            M3_FIRST
        );
        assert_eq!(zero.winding, 1);
        assert!(zero.residual_log <= problem.tolerances.zero_tol.ln());
        assert_eq!(zero.cert_radius, 1e-8);
        assert!(zero.conjugate_of.is_none());
    }

    #[test]
    fn locates_imaginary_axis_zero_for_m4() {
        // The cell center and the natural mid-split line both sit on the
        // imaginary axis, where all the zeros live: exercises the nudged
        // quadrisection path.
        let problem = Problem::new(4).unwrap();
        let region = SearchRegion::new(-0.5, 0.5, 1.2, 2.2).unwrap();
        let zeros = find_zeros(&problem, &region, 4).unwrap();
        assert_eq!(zeros.len(), 1);
        let zero = &zeros[0];
        assert!(zero.zeta_star.re.abs() < 1e-7, "re = {}", zero.zeta_star.re);
        assert!((zero.zeta_star.im - M4_FIRST_IM).abs() < 1e-6);
    }

    #[test]
    fn winding_is_additive_over_partitions() {
        let problem = Problem::new(3).unwrap();
        let evaluator = Evaluator::new(&problem);
        let whole = Contour::Rectangle {
            re_lo: 0.0,
            re_hi: 2.0,
            im_lo: 1.0,
            im_hi: 3.2,
        };
        // Contains the first two zeros.
        let total = winding_number(&evaluator, &whole).unwrap();
        assert_eq!(total, 2);

        let cut = 0.55 * 2.0;
        let left = Contour::Rectangle {
            re_lo: 0.0,
            re_hi: cut,
            im_lo: 1.0,
            im_hi: 3.2,
        };
        let right = Contour::Rectangle {
            re_lo: cut,
            re_hi: 2.0,
            im_lo: 1.0,
            im_hi: 3.2,
        };
        let sum = winding_number(&evaluator, &left).unwrap()
            + winding_number(&evaluator, &right).unwrap();
        assert_eq!(sum, total);
    }

    #[test]
    fn refinement_is_stable_under_seed_perturbation() {
        let problem = Problem::new(3).unwrap();
        let refined = refine_zero(&problem, M3_FIRST).unwrap();
        let perturbed = refine_zero(&problem, M3_FIRST + Complex64::new(0.05, 0.05)).unwrap();
        assert!((refined.zeta_star - perturbed.zeta_star).norm() < 1e-7);
        assert!((refined.zeta_star - M3_FIRST).norm() < 1e-6);
    }

    #[test]
    fn newton_agrees_with_muller() {
        let problem = Problem::new(3).unwrap();
        let muller = refine_zero(&problem, M3_FIRST).unwrap();
        let newton = refine_zero_with(&problem, M3_FIRST, RefineMethod::NewtonFd).unwrap();
        assert!((muller.zeta_star - newton.zeta_star).norm() < 1e-7);
    }

    #[test]
    fn conjugate_zeros_are_linked_in_symmetric_regions() {
        let problem = Problem::new(3).unwrap();
        let region = SearchRegion::new(0.2, 1.0, -1.9, 1.9).unwrap();
        let zeros = find_zeros(&problem, &region, 4).unwrap();
        assert_eq!(zeros.len(), 2);
        assert!((zeros[0].zeta_star - zeros[1].zeta_star.conj()).norm() < 1e-8);
        assert_eq!(zeros[0].conjugate_of, Some(zeros[1].zeta_star));
        assert_eq!(zeros[1].conjugate_of, Some(zeros[0].zeta_star));
        // Sorted by |Im| then |Re|: the pair shares both keys, so the final
        // ascending-Im tiebreak puts the lower-half zero first.
        assert!(zeros[0].zeta_star.im < 0.0);
    }

    #[test]
    fn region_straddling_axis_must_be_symmetric() {
        assert!(SearchRegion::new(0.0, 1.0, -0.5, 1.5).is_err());
        assert!(SearchRegion::new(0.0, 1.0, -1.5, 1.5).is_ok());
        assert!(SearchRegion::new(0.0, 1.0, 0.0, 1.5).is_ok());
    }

    #[test]
    fn second_zero_matches_frozen_value() {
        let problem = Problem::new(3).unwrap();
        let refined = refine_zero(&problem, M3_SECOND + Complex64::new(0.02, -0.02)).unwrap();
        assert!((refined.zeta_star - M3_SECOND).norm() < 1e-6);
    }
}
