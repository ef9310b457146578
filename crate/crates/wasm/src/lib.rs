//! Browser bindings for the static demo page in `www/`.
//!
//! Three operations are exposed: `explore` (report plus both sparsity plots),
//! `scan` (first window size with a cycle) and `orbit` (one trajectory with
//! heights). Each returns a JSON string; errors come back as JS strings.

use orbitmat::orbit_engine::{heights, orbit as orbit_of};
use orbitmat::svg::render_svg;
use orbitmat::{localize, parse_spec, run_analyze, scan_for_cycle, AnalysisReport, AnalyzeOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest window the page will plot.
pub const PLOT_LIMIT: usize = 400;
/// Largest window the page will analyze at all.
pub const ANALYZE_LIMIT: usize = 2_000_000;

#[derive(Debug, Serialize)]
pub struct Exploration {
    pub report: AnalysisReport,
    pub ihat_svg: Option<String>,
    pub inverse_svg: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Trajectory {
    /// `(x, h(x))` along the orbit, ending at the class root.
    pub steps: Vec<(usize, usize)>,
    pub root: usize,
}

pub fn explore_native(spec: &str, n: usize, verify: bool) -> Result<Exploration, String> {
    if n > ANALYZE_LIMIT {
        return Err(format!("n = {n} exceeds the demo limit {ANALYZE_LIMIT}"));
    }
    let plot = n <= PLOT_LIMIT;
    let opts = AnalyzeOptions {
        verify,
        materialize_inverse: plot,
        ..Default::default()
    };
    let analysis = run_analyze(spec, n, &opts).map_err(|e| e.to_string())?;
    let (ihat_svg, inverse_svg) = if plot {
        let ihat = render_svg(&analysis.ihat).map_err(|e| e.to_string())?;
        let inverse = analysis
            .inverse
            .as_ref()
            .map(|inv| render_svg(inv))
            .transpose()
            .map_err(|e| e.to_string())?;
        (Some(ihat), inverse)
    } else {
        (None, None)
    };
    Ok(Exploration {
        report: analysis.report,
        ihat_svg,
        inverse_svg,
    })
}

pub fn orbit_native(spec: &str, n: usize, x: usize) -> Result<Trajectory, String> {
    if n > ANALYZE_LIMIT {
        return Err(format!("n = {n} exceeds the demo limit {ANALYZE_LIMIT}"));
    }
    let spec = parse_spec(spec).map_err(|e| e.to_string())?;
    let local = localize(&spec, n).map_err(|e| e.to_string())?;
    let path = orbit_of(&local, x).map_err(|e| e.to_string())?;
    let hp = heights(&local).map_err(|e| e.to_string())?;
    let root = *path.last().expect("orbits are nonempty");
    Ok(Trajectory {
        steps: path.into_iter().map(|y| (y, hp.height(y))).collect(),
        root,
    })
}

fn to_json<T: Serialize>(value: Result<T, String>) -> Result<String, JsValue> {
    value
        .and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn explore(spec: &str, n: usize, verify: bool) -> Result<String, JsValue> {
    to_json(explore_native(spec, n, verify))
}

#[wasm_bindgen]
pub fn scan(spec: &str, n_min: usize, n_max: usize) -> Result<String, JsValue> {
    if n_max > ANALYZE_LIMIT {
        return Err(JsValue::from_str("range exceeds the demo limit"));
    }
    to_json(scan_for_cycle(spec, n_min, n_max).map_err(|e| e.to_string()))
}

#[wasm_bindgen]
pub fn orbit(spec: &str, n: usize, x: usize) -> Result<String, JsValue> {
    to_json(orbit_native(spec, n, x))
}
