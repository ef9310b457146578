//! End-to-end analysis runs and range scans.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_oracle::{self, DEFAULT_ORACLE_LIMIT};
use crate::function_model::{localize, parse_spec, LocalFunction};
use crate::matrix_engine::{
    build_ihat, build_m, cycle_eigenvector, inverse_via_neumann, inverse_via_orbits,
    EigenvectorCertificate, SparseSignMatrix,
};
use crate::orbit_engine::{decompose, detect_cycle, heights, CycleReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Run the dense oracle when `n <= oracle_limit`.
    pub verify: bool,
    /// Build the inverse and the power sequence; otherwise only counts.
    pub materialize_inverse: bool,
    pub oracle_limit: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            verify: false,
            materialize_inverse: true,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub localize_ms: f64,
    pub analysis_ms: f64,
    pub oracle_ms: f64,
    pub total_ms: f64,
}

/// Serialized analysis result. Fields are emitted in declaration order;
/// fields that only make sense without a cycle are absent when one exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub spec_text: String,
    pub n: usize,
    pub has_cycle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_elements: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition_pi: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jnk_counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_nnz: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_check: Option<bool>,
    pub timings: Timings,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))
    }

    /// Copy with zeroed timings, for golden comparisons.
    pub fn without_timings(&self) -> Self {
        AnalysisReport {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    /// Checks the counting identities that tie the fields together.
    pub fn check_identities(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("report identity failed: {what}")));
        if self.has_cycle {
            if self.partition_pi.is_some() || self.cycle_elements.is_none() {
                return fail("cycle reports carry a cycle and no partition");
            }
            return Ok(());
        }
        let (Some(pi), Some(m), Some(jnk), Some(nnz), Some(classes)) = (
            &self.partition_pi,
            self.degree_m,
            &self.jnk_counts,
            self.inverse_nnz,
            self.class_count,
        ) else {
            return fail("missing no-cycle fields");
        };
        if pi.len() != m || jnk.len() != m {
            return fail("lengths match degree");
        }
        if pi.iter().sum::<usize>() != self.n || pi.contains(&0) {
            return fail("partition of n without internal zeros");
        }
        let mut remaining = self.n;
        for (p, &count) in pi.iter().zip(jnk) {
            remaining -= p;
            if count != remaining {
                return fail("jnk_counts[k] = n - sum p");
            }
        }
        let weighted: u64 = pi
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as u64 + 1) * p as u64)
            .sum();
        if weighted != nnz {
            return fail("inverse_nnz = sum nu p_nu");
        }
        if m > 0 && classes != self.n - jnk[0] {
            return fail("class_count = n - jnk_counts[1]");
        }
        Ok(())
    }
}

/// A finished run: the report plus the matrices needed for plotting.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub local: LocalFunction,
    pub cycle: CycleReport,
    pub ihat: SparseSignMatrix,
    pub inverse: Option<SparseSignMatrix>,
    pub eigenvector: Option<EigenvectorCertificate>,
}

struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed_ms(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64() * 1e3
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

fn internal(what: &str) -> Error {
    Error::Internal(what.to_string())
}

pub fn run_analyze(spec_text: &str, n: usize, opts: &AnalyzeOptions) -> Result<Analysis> {
    let total = Stopwatch::start();
    let spec = parse_spec(spec_text)?;
    let clock = Stopwatch::start();
    let local = localize(&spec, n)?;
    let localize_ms = clock.elapsed_ms();

    let clock = Stopwatch::start();
    let cycle = detect_cycle(&local);
    let m = build_m(&local);
    let ihat = build_ihat(&local);
    let mut report = AnalysisReport {
        spec_text: spec_text.to_string(),
        n,
        has_cycle: cycle.found,
        cycle_elements: None,
        det: None,
        degree_m: None,
        partition_pi: None,
        jnk_counts: None,
        inverse_nnz: None,
        class_count: None,
        bound_check: None,
        timings: Timings::default(),
    };
    let mut inverse = None;
    let mut eigenvector = None;
    if cycle.found {
        report.cycle_elements = Some(cycle.elements.clone());
        eigenvector = Some(cycle_eigenvector(&m, &cycle)?);
    } else {
        let hp = heights(&local)?;
        let (jnk, classes) = if opts.materialize_inverse {
            let jnk: Vec<usize> = m.powers().map(|p| p.nnz()).collect();
            let classes = decompose(&local)?.class_count();
            let inv = inverse_via_orbits(&local, &hp)?;
            report.inverse_nnz = Some(inv.nnz() as u64);
            inverse = Some(inv);
            (jnk, classes)
        } else {
            report.inverse_nnz = Some(hp.height_sum());
            let roots = local.images().iter().filter(|&&y| y == 0).count();
            (hp.tail_counts(), roots)
        };
        report.degree_m = Some(hp.degree_m);
        report.jnk_counts = Some(jnk);
        report.class_count = Some(classes);
        report.bound_check = Some(hp.height_sum() <= hp.height_sum_bound());
        report.partition_pi = Some(hp.partition_pi);
    }
    let analysis_ms = clock.elapsed_ms();

    let clock = Stopwatch::start();
    if opts.verify && n <= opts.oracle_limit {
        let det = exact_oracle::det_indicator(&ihat, opts.oracle_limit)?;
        if (det == 0) != cycle.found {
            return Err(internal("determinant disagrees with cycle detection"));
        }
        if !cycle.found {
            if m.nilpotency_degree() != report.degree_m {
                return Err(internal("nilpotency degree differs from maximum height"));
            }
            let by_orbits = match &inverse {
                Some(inv) => inv.clone(),
                None => inverse_via_orbits(&local, &heights(&local)?)?,
            };
            if inverse_via_neumann(&m)? != by_orbits {
                return Err(internal("orbit and power-series inverses differ"));
            }
            if !exact_oracle::verify_inverse(&ihat, &by_orbits, opts.oracle_limit)? {
                return Err(internal("inverse fails dense verification"));
            }
        }
        report.det = Some(det);
    }
    let oracle_ms = clock.elapsed_ms();

    report.timings = Timings {
        localize_ms,
        analysis_ms,
        oracle_ms,
        total_ms: total.elapsed_ms(),
    };
    report.check_identities()?;
    Ok(Analysis {
        report,
        local,
        cycle,
        ihat,
        inverse,
        eigenvector,
    })
}

/// Dense-oracle verdict for one local function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub spec_text: String,
    pub n: usize,
    pub det: u8,
    /// Whether `I - M` times the orbit inverse is exactly `I`; absent with a
    /// cycle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_verified: Option<bool>,
}

/// Determinant and inverse verification only, capped at `limit`.
pub fn run_oracle(spec_text: &str, n: usize, limit: usize) -> Result<OracleReport> {
    if n > limit {
        return Err(Error::SizeLimitExceeded { size: n, limit });
    }
    let local = localize(&parse_spec(spec_text)?, n)?;
    let ihat = build_ihat(&local);
    let det = exact_oracle::det_indicator(&ihat, limit)?;
    let inverse_verified = match heights(&local) {
        Ok(hp) => {
            let inv = inverse_via_orbits(&local, &hp)?;
            let series = inverse_via_neumann(&build_m(&local))?;
            Some(inv == series && exact_oracle::verify_inverse(&ihat, &inv, limit)?)
        }
        Err(Error::CyclePresent) => None,
        Err(e) => return Err(e),
    };
    Ok(OracleReport {
        spec_text: spec_text.to_string(),
        n,
        det,
        inverse_verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOutcome {
    /// Smallest `n` in range whose local function has a cycle.
    pub first: Option<usize>,
    /// Whether every sampled `n` agreed with the threshold behavior.
    pub monotone: bool,
    /// The `n` values checked directly after locating the threshold.
    pub sampled: Vec<usize>,
}

const SCAN_SAMPLES: usize = 16;

/// Finds the least `n` in `[n_min, n_max]` with a cycle. The table for
/// `n_max` is built once; smaller windows are restrictions of it.
pub fn scan_for_cycle(spec_text: &str, n_min: usize, n_max: usize) -> Result<ScanOutcome> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_min <= n_max, got [{n_min}, {n_max}]"
        )));
    }
    let spec = parse_spec(spec_text)?;
    let full = localize(&spec, n_max)?;
    let found_at = |n: usize| -> Result<bool> { Ok(detect_cycle(&full.restrict(n)?).found) };

    let first = if !found_at(n_max)? {
        None
    } else {
        // Cycles persist once they fit, so the predicate is monotone in n.
        let (mut lo, mut hi) = (n_min, n_max);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if found_at(mid)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    };

    let mut sampled = Vec::new();
    let mut monotone = true;
    let start = first.unwrap_or(n_min);
    if let Some(f) = first {
        if f > n_min {
            sampled.push(f - 1);
            monotone &= !found_at(f - 1)?;
        }
    }
    let span = n_max - start;
    let steps = SCAN_SAMPLES.min(span + 1);
    for i in 0..steps {
        let n = if steps == 1 {
            start
        } else {
            start + span * i / (steps - 1)
        };
        if sampled.last() == Some(&n) {
            continue;
        }
        sampled.push(n);
        monotone &= found_at(n)? == first.is_some();
    }
    Ok(ScanOutcome {
        first,
        monotone,
        sampled,
    })
}
