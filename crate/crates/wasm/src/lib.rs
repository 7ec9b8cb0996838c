//! Browser bindings for the demo page. Each export takes plain strings and
//! numbers and returns JSON text or a flat `Float64Array`, so the page needs
//! no generated type glue beyond wasm-bindgen's.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use matmono::classifiers::{is_n_concave, is_n_convex, is_n_monotone_dd, Route, SearchConfig};
use matmono::divdiff::{local_criterion_matrix, loewner_matrix, CriterionKind};
use matmono::{Error, FunctionSpec, IntervalSpec, Result};

/// Widest window drawn for an unbounded interval.
const VIEW_REACH: f64 = 10.0;
/// Grid and sample counts above this are refused; the page stays responsive.
const MAX_RESOLUTION: usize = 400;

fn parse(function: &str, interval: &str) -> Result<(FunctionSpec, IntervalSpec)> {
    let interval: IntervalSpec = interval.parse()?;
    Ok((FunctionSpec::parse(function, interval)?, interval))
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 || n > MAX_RESOLUTION {
        return Err(Error::InvalidArgument(format!("resolution must be in 2..={MAX_RESOLUTION}, got {n}")));
    }
    Ok(())
}

/// Interior window clipped to [`VIEW_REACH`] from a finite end.
fn view_window(interval: &IntervalSpec) -> (f64, f64) {
    let (lo, hi) = interval.interior_window();
    match (interval.lower.is_finite(), interval.upper.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, lo + VIEW_REACH),
        (false, true) => (hi - VIEW_REACH, hi),
        (false, false) => (-VIEW_REACH, VIEW_REACH),
    }
}

/// `size` evenly spaced interior points of the view window.
fn grid(interval: &IntervalSpec, size: usize) -> Vec<f64> {
    let (lo, hi) = view_window(interval);
    let h = (hi - lo) / size as f64;
    (0..size).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

/// Class report for `property` in {monotone, convex, concave}, as JSON.
pub fn classify_json(
    function: &str,
    interval: &str,
    property: &str,
    order: usize,
    trials: usize,
    seed: u64,
) -> Result<String> {
    let (f, interval) = parse(function, interval)?;
    let cfg = SearchConfig::new(trials, seed);
    let report = match property {
        "monotone" => is_n_monotone_dd(&f, &interval, order, &cfg)?,
        "convex" => is_n_convex(&f, &interval, order, &cfg, Route::KrausDd)?,
        "concave" => is_n_concave(&f, &interval, order, &cfg, Route::KrausDd)?,
        other => return Err(Error::InvalidArgument(format!("unknown property '{other}'"))),
    };
    Ok(serde_json::to_string(&report)?)
}

/// Scaled minimum eigenvalue of the 2×2 Loewner matrix at every node pair
/// of a `size × size` grid, row major. Negative cells witness a failure of
/// 2-monotonicity.
pub fn heatmap(function: &str, interval: &str, size: usize) -> Result<Vec<f64>> {
    check_resolution(size)?;
    let (f, interval) = parse(function, interval)?;
    let xs = grid(&interval, size);
    let mut out = Vec::with_capacity(size * size);
    for &a in &xs {
        for &b in &xs {
            out.push(loewner_matrix(&f, &[a, b])?.entries.psd_check(0.0).margin());
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct Profile {
    pub t: Vec<f64>,
    /// Scaled minimum eigenvalue of `[[f′, f″/2], [f″/2, f‴/6]]`.
    pub monotone: Vec<f64>,
    /// Scaled minimum eigenvalue of `[[f″/2, f‴/6], [f‴/6, f⁗/24]]`.
    pub convex: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

/// Local 2×2 monotone and convex margins along the interval.
pub fn profile(function: &str, interval: &str, samples: usize) -> Result<Profile> {
    check_resolution(samples)?;
    let (f, interval) = parse(function, interval)?;
    let t = grid(&interval, samples);
    let margin = |x: f64, kind| Ok(local_criterion_matrix(&f, x, kind)?.entries.psd_check(0.0).margin());
    let monotone = t.iter().map(|&x| margin(x, CriterionKind::LocalMonotone)).collect::<Result<_>>()?;
    let convex = t.iter().map(|&x| margin(x, CriterionKind::LocalConvex)).collect::<Result<_>>()?;
    let (lo, hi) = view_window(&interval);
    Ok(Profile { t, monotone, convex, lo, hi })
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn classify(
    function: &str,
    interval: &str,
    property: &str,
    order: usize,
    trials: usize,
    seed: u64,
) -> std::result::Result<String, JsError> {
    classify_json(function, interval, property, order, trials, seed).map_err(js)
}

#[wasm_bindgen]
pub fn loewner_heatmap(function: &str, interval: &str, size: usize) -> std::result::Result<Vec<f64>, JsError> {
    heatmap(function, interval, size).map_err(js)
}

#[wasm_bindgen]
pub fn local_profile(function: &str, interval: &str, samples: usize) -> std::result::Result<String, JsError> {
    let p = profile(function, interval, samples).map_err(js)?;
    serde_json::to_string(&p).map_err(|e| JsError::new(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_square() {
        let v: serde_json::Value =
            serde_json::from_str(&classify_json("poly:0,0,1", "0,1", "monotone", 2, 200, 1).unwrap()).unwrap();
        assert_eq!(v["verdict"], "FAIL");
        let v: serde_json::Value =
            serde_json::from_str(&classify_json("poly:0,0,1", "0,1", "convex", 3, 200, 1).unwrap()).unwrap();
        assert_eq!(v["verdict"], "PASS");
        assert!(classify_json("poly:0,0,1", "0,1", "wiggly", 2, 10, 1).is_err());
    }

    #[test]
    fn square_heatmap_is_minus_gap_squared() {
        // Loewner matrix of t² at {a, b}: eigenvalues a+b ± sqrt(2(a²+b²))
        let size = 8;
        let h = heatmap("poly:0,0,1", "0,1", size).unwrap();
        let xs = grid(&IntervalSpec::open(0.0, 1.0), size);
        for (i, &a) in xs.iter().enumerate() {
            for (j, &b) in xs.iter().enumerate() {
                let r = (2.0 * (a * a + b * b)).sqrt();
                let want = (a + b - r) / (a + b + r).max(1.0);
                assert!((h[i * size + j] - want).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn sqrt_profile_is_nonnegative_for_monotone() {
        let p = profile("sqrt", "0,4", 50).unwrap();
        assert_eq!(p.t.len(), 50);
        assert!(p.monotone.iter().all(|m| *m >= -1e-12));
        // sqrt is concave: the convex Hankel has negative f''
        assert!(p.convex.iter().all(|m| *m < 0.0));
    }

    #[test]
    fn unbounded_interval_is_clipped() {
        let (lo, hi) = view_window(&IntervalSpec::positive());
        assert!(lo > 0.0 && (hi - VIEW_REACH - lo).abs() < 1e-12);
        assert!(heatmap("poly:0,1", "0,1", 1).is_err());
        assert!(profile("poly:0,1", "0,1", MAX_RESOLUTION + 1).is_err());
    }
}
