//! Append-only store of Wronskian evaluations, one JSON record per line.
//!
//! The key is canonical text of everything that determines the value: degree,
//! α, ζ (shortest round-trip decimals, so distinct f64 inputs never collide),
//! and a digest of the accuracy knobs (tolerances, series order, cutoff
//! policy). Records carry the evaluation losslessly — the phase unit is
//! stored componentwise, not as an angle — so a cache hit is bit-identical to
//! the fresh evaluation that produced it.
//!
//! Concurrency: the file only ever grows, so any number of readers may scan
//! it while one owner appends; `put` goes through `&mut self`, which is the
//! single-writer discipline. A corrupt or truncated line (e.g. from a crash
//! mid-append) is skipped with a warning and its key simply recomputed.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::logcomplex::LogComplex;
use crate::problem::Problem;
use crate::wronskian::{eval_w, WronskianEval};

/// Environment variable the CLI consults for the cache directory.
pub const CACHE_DIR_ENV: &str = "WZETA_CACHE_DIR";

const FILE_NAME: &str = "wronskian.jsonl";

/// Canonical cache key for `(problem, zeta)`.
pub fn cache_key(problem: &Problem, zeta: Complex64) -> String {
    let knobs = serde_json::to_string(&(
        &problem.tolerances,
        problem.series_order,
        &problem.cutoff,
    ))
    .expect("accuracy knobs always serialize");
    let digest = Sha256::digest(knobs.as_bytes());
    let mut acc = String::with_capacity(16);
    for byte in &digest[..8] {
        acc.push_str(&format!("{byte:02x}"));
    }
    format!(
        "m={} alpha={} zeta={},{} acc={acc}",
        problem.m, problem.alpha, zeta.re, zeta.im
    )
}

/// Lossless record form of a [`LogComplex`]: the unit is kept componentwise
/// (an angle would round-trip through trigonometry), `None` log-magnitude
/// encodes an exact zero (JSON has no -inf).
#[derive(Serialize, Deserialize)]
struct StoredLog {
    log_mag: Option<f64>,
    unit: Complex64,
}

impl From<LogComplex> for StoredLog {
    fn from(v: LogComplex) -> StoredLog {
        StoredLog {
            log_mag: (!v.is_zero()).then_some(v.log_mag),
            unit: v.unit,
        }
    }
}

impl From<StoredLog> for LogComplex {
    fn from(s: StoredLog) -> LogComplex {
        match s.log_mag {
            None => LogComplex::ZERO,
            Some(log_mag) => LogComplex {
                log_mag,
                unit: s.unit,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    key: String,
    zeta: Complex64,
    value: StoredLog,
    constancy_defect: f64,
    frame_defect: f64,
    frame_log: f64,
    cutoff_plus: f64,
    cutoff_minus: f64,
    steps: usize,
}

impl Record {
    fn new(key: &str, eval: &WronskianEval) -> Record {
        Record {
            key: key.to_string(),
            zeta: eval.zeta,
            value: eval.value.into(),
            constancy_defect: eval.constancy_defect,
            frame_defect: eval.frame_defect,
            frame_log: eval.frame_log,
            cutoff_plus: eval.cutoff_plus,
            cutoff_minus: eval.cutoff_minus,
            steps: eval.steps,
        }
    }

    fn into_parts(self) -> (String, WronskianEval) {
        (
            self.key,
            WronskianEval {
                zeta: self.zeta,
                value: self.value.into(),
                constancy_defect: self.constancy_defect,
                frame_defect: self.frame_defect,
                frame_log: self.frame_log,
                cutoff_plus: self.cutoff_plus,
                cutoff_minus: self.cutoff_minus,
                steps: self.steps,
            },
        )
    }
}

/// The open cache: an in-memory index over an append-only file.
pub struct WronskianCache {
    path: PathBuf,
    entries: HashMap<String, WronskianEval>,
    writer: File,
}

impl WronskianCache {
    /// Open (creating if needed) the cache under `dir`.
    pub fn open(dir: &Path) -> Result<WronskianCache> {
        fs::create_dir_all(dir)
            .map_err(|e| Error::CacheIo(format!("creating {}: {e}", dir.display())))?;
        let path = dir.join(FILE_NAME);
        let mut entries = HashMap::new();
        if path.exists() {
            let file = File::open(&path)
                .map_err(|e| Error::CacheIo(format!("opening {}: {e}", path.display())))?;
            for (lineno, line) in BufReader::new(file).lines().enumerate() {
                let line =
                    line.map_err(|e| Error::CacheIo(format!("reading {}: {e}", path.display())))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<Record>(&line) {
                    Ok(record) => {
                        let (key, eval) = record.into_parts();
                        entries.insert(key, eval);
                    }
                    Err(err) => eprintln!(
                        "warning: {}:{}: corrupt cache entry ignored ({err})",
                        path.display(),
                        lineno + 1
                    ),
                }
            }
        }
        let writer = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::CacheIo(format!("opening {} for append: {e}", path.display())))?;
        Ok(WronskianCache {
            path,
            entries,
            writer,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&WronskianEval> {
        self.entries.get(key)
    }

    /// Record an evaluation. The first record for a key wins; a repeat put is
    /// a no-op (the store is append-only and deterministic, so a second value
    /// for the same key could only be the same value).
    pub fn put(&mut self, key: &str, eval: &WronskianEval) -> Result<()> {
        if self.entries.contains_key(key) {
            return Ok(());
        }
        let line = serde_json::to_string(&Record::new(key, eval))
            .map_err(|e| Error::CacheIo(format!("encoding cache record: {e}")))?;
        writeln!(self.writer, "{line}")
            .and_then(|()| self.writer.flush())
            .map_err(|e| Error::CacheIo(format!("appending to {}: {e}", self.path.display())))?;
        self.entries.insert(key.to_string(), eval.clone());
        Ok(())
    }

    /// Cached Wronskian evaluation: hit returns the stored value, miss
    /// computes, records, and returns it.
    pub fn eval(&mut self, problem: &Problem, zeta: Complex64) -> Result<WronskianEval> {
        let key = cache_key(problem, zeta);
        if let Some(hit) = self.entries.get(&key) {
            return Ok(hit.clone());
        }
        let eval = eval_w(problem, zeta)?;
        self.put(&key, &eval)?;
        Ok(eval)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Tolerances;

    fn scratch_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "wzeta-cache-{tag}-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    fn assert_bit_identical(a: &WronskianEval, b: &WronskianEval) {
        assert_eq!(a.zeta.re.to_bits(), b.zeta.re.to_bits());
        assert_eq!(a.zeta.im.to_bits(), b.zeta.im.to_bits());
        assert_eq!(a.value.log_mag.to_bits(), b.value.log_mag.to_bits());
        assert_eq!(a.value.unit.re.to_bits(), b.value.unit.re.to_bits());
        assert_eq!(a.value.unit.im.to_bits(), b.value.unit.im.to_bits());
        assert_eq!(a.constancy_defect.to_bits(), b.constancy_defect.to_bits());
        assert_eq!(a.frame_defect.to_bits(), b.frame_defect.to_bits());
        assert_eq!(a.frame_log.to_bits(), b.frame_log.to_bits());
        assert_eq!(a.cutoff_plus.to_bits(), b.cutoff_plus.to_bits());
        assert_eq!(a.cutoff_minus.to_bits(), b.cutoff_minus.to_bits());
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn hit_is_bit_identical_to_fresh_evaluation() {
        let dir = scratch_dir("hit");
        let problem = Problem::new(3).unwrap();
        let zeta = Complex64::new(0.7, 1.3);

        let mut cache = WronskianCache::open(&dir).unwrap();
        let first = cache.eval(&problem, zeta).unwrap();
        let fresh = eval_w(&problem, zeta).unwrap();
        assert_bit_identical(&first, &fresh);

        // reopen: the hit must survive the disk round trip unchanged
        drop(cache);
        let mut cache = WronskianCache::open(&dir).unwrap();
        assert_eq!(cache.len(), 1);
        let hit = cache.eval(&problem, zeta).unwrap();
        assert_bit_identical(&hit, &fresh);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn tolerance_change_is_a_miss() {
        let problem = Problem::new(3).unwrap();
        let zeta = Complex64::new(1.0, 2.0);
        let loose = Problem::with(
            3,
            0.0,
            Tolerances {
                ode_rel_tol: 1e-9,
                ..Tolerances::default()
            },
            problem.series_order,
            problem.cutoff,
        )
        .unwrap();
        assert_ne!(cache_key(&problem, zeta), cache_key(&loose, zeta));
        // distinct zetas differing at the last bit get distinct keys
        let nudged = Complex64::new(1.0 + f64::EPSILON, 2.0);
        assert_ne!(cache_key(&problem, zeta), cache_key(&problem, nudged));
    }

    #[test]
    fn thousand_records_survive_reopen() {
        let dir = scratch_dir("bulk");
        let problem = Problem::new(2).unwrap();
        let base = eval_w(&problem, Complex64::new(0.3, 0.4)).unwrap();

        let mut cache = WronskianCache::open(&dir).unwrap();
        for i in 0..1000u32 {
            let mut eval = base.clone();
            eval.zeta = Complex64::new(f64::from(i), 0.5);
            eval.steps = i as usize;
            cache.put(&format!("k{i}"), &eval).unwrap();
        }
        drop(cache);

        let cache = WronskianCache::open(&dir).unwrap();
        assert_eq!(cache.len(), 1000);
        for i in 0..1000u32 {
            let eval = cache.get(&format!("k{i}")).unwrap();
            assert_eq!(eval.zeta.re, f64::from(i));
            assert_eq!(eval.steps, i as usize);
        }
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corrupt_lines_are_skipped() {
        let dir = scratch_dir("corrupt");
        let problem = Problem::new(2).unwrap();
        let eval = eval_w(&problem, Complex64::new(0.1, 0.2)).unwrap();

        let mut cache = WronskianCache::open(&dir).unwrap();
        cache.put("good", &eval).unwrap();
        drop(cache);

        let path = dir.join(FILE_NAME);
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("{\"key\": \"broken\", truncated nonsense\n");
        fs::write(&path, text).unwrap();

        let mut cache = WronskianCache::open(&dir).unwrap();
        assert_eq!(cache.len(), 1);
        assert!(cache.get("good").is_some());
        assert!(cache.get("broken").is_none());
        // the store still accepts appends after skipping the bad line
        cache.put("after", &eval).unwrap();
        drop(cache);
        assert_eq!(WronskianCache::open(&dir).unwrap().len(), 2);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn exact_zero_value_round_trips() {
        let dir = scratch_dir("zero");
        let problem = Problem::new(2).unwrap();
        let mut eval = eval_w(&problem, Complex64::new(0.0, 0.0)).unwrap();
        eval.value = LogComplex::ZERO;

        let mut cache = WronskianCache::open(&dir).unwrap();
        cache.put("zero", &eval).unwrap();
        drop(cache);
        let cache = WronskianCache::open(&dir).unwrap();
        assert!(cache.get("zero").unwrap().value.is_zero());
        fs::remove_dir_all(&dir).unwrap();
    }
}
