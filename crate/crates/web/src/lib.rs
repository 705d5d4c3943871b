//! Browser bindings: curve laminations, point coding and orbits as JSON strings.
//!
//! The `*_json` functions hold the logic and run natively in tests; the
//! `#[wasm_bindgen]` wrappers only convert errors for JavaScript.

use hdcoding::coding::{h_i_assemble, h_j_assemble, words_at, ExactHenon};
use hdcoding::curves::{branches, sample_branch, CurvesConfig, Family, MirrorSide, SamplingConfig};
use hdcoding::map::{orbit_float, HomPoint, MapConfig, Point};
use hdcoding::scalar::{format_rational, parse_rational, rational_to_f64, Rational};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Highest curve level the page may request; level n has about 2^n branches.
pub const MAX_LEVEL: usize = 7;
/// Deepest coding the page may request.
pub const MAX_DEPTH: usize = 40;
/// Longest orbit, per direction.
pub const MAX_STEPS: usize = 500;

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Polylines of both families for levels 1..=level, clipped to |x|, |y| <= view.
pub fn lamination_json(level: usize, samples: usize, view: f64) -> Result<Value, String> {
    if level == 0 || level > MAX_LEVEL {
        return Err(format!("level must be in 1..={MAX_LEVEL}"));
    }
    let cfg = CurvesConfig::default();
    let sc = SamplingConfig { samples: samples.clamp(2, 2000), view, ..SamplingConfig::default() };
    let mut families = serde_json::Map::new();
    for (name, fam) in [("R", Family::PreimageOfYZero), ("L", Family::ImageOfAntiDiagonal)] {
        let mut lines = Vec::new();
        for n in 1..=level {
            for b in branches(fam, n, &cfg).map_err(|e| e.to_string())? {
                let pts: Vec<[f64; 2]> = sample_branch(&b, &sc, &cfg.map)
                    .into_iter()
                    .filter(|&(_, x, y)| x.is_finite() && y.is_finite())
                    .map(|(_, x, y)| [x.clamp(-4.0 * view, 4.0 * view), y.clamp(-4.0 * view, 4.0 * view)])
                    .collect();
                let side = match b.side {
                    MirrorSide::Positive => "positive",
                    MirrorSide::Negative => "negative",
                };
                lines.push(json!({ "level": n, "side": side, "points": pts }));
            }
        }
        families.insert(name.into(), Value::Array(lines));
    }
    Ok(Value::Object(families))
}

/// Exact coordinate words and both symbol sequences of (x, y).
pub fn code_point_json(x: &str, y: &str, depth: usize) -> Result<Value, String> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(format!("depth must be in 1..={MAX_DEPTH}"));
    }
    let p = Point::new(rational(x)?, rational(y)?);
    let m = ExactHenon { cfg: MapConfig::default() };
    let (wi, wj) = words_at(&m, &HomPoint::from_point(&p), depth).map_err(|e| e.to_string())?;
    let window = depth.saturating_sub(2).max(1);
    let hi = h_i_assemble(&wi, &wj, window).map_err(|e| e.to_string())?;
    let hj = h_j_assemble(&wi, &wj, window).map_err(|e| e.to_string())?;
    Ok(json!({
        "point": [format_rational(&p.x), format_rational(&p.y)],
        "approx": [rational_to_f64(&p.x), rational_to_f64(&p.y)],
        "i_word": wi.to_string(),
        "j_word": wj.to_string(),
        "h_i": hi.to_string(),
        "h_j": hj.to_string(),
    }))
}

/// Float orbit of (x, y) in time order, with how each side ended.
pub fn orbit_points_json(x: &str, y: &str, fwd: usize, bwd: usize) -> Result<Value, String> {
    if fwd > MAX_STEPS || bwd > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps per direction"));
    }
    let p = Point::new(rational_to_f64(&rational(x)?), rational_to_f64(&rational(y)?));
    let o = orbit_float(&p, fwd, bwd, &MapConfig::default()).map_err(|e| e.to_string())?;
    let pts: Vec<Value> = o.timeline().into_iter().map(|(t, q)| json!([t, q.x, q.y])).collect();
    Ok(json!({
        "points": pts,
        "forward_end": format!("{:?}", o.forward_termination),
        "backward_end": format!("{:?}", o.backward_termination),
    }))
}

fn js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lamination(level: usize, samples: usize, view: f64) -> Result<String, JsError> {
    js(lamination_json(level, samples, view))
}

#[wasm_bindgen]
pub fn code_point(x: &str, y: &str, depth: usize) -> Result<String, JsError> {
    js(code_point_json(x, y, depth))
}

#[wasm_bindgen]
pub fn orbit_points(x: &str, y: &str, fwd: usize, bwd: usize) -> Result<String, JsError> {
    js(orbit_points_json(x, y, fwd, bwd))
}
