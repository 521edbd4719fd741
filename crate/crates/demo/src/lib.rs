//! Browser front end: three JSON-returning operations over the slope engine.
//!
//! The plain functions are usable natively; the `#[wasm_bindgen]` wrappers turn
//! errors into JS exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use freelat::lattice::{lattice_from_json, slope_profile_with};
use freelat::pairs::SParams;
use freelat::projective::pair_freeness_with;
use freelat::{Limits, PointPair, ProjectivePoint};

/// Lattice searches in the page are kept small so a bad input cannot hang the tab.
const DEMO_LIMITS: Limits = Limits { max_vectors: 50_000 };

fn parse_point(s: &str) -> Result<ProjectivePoint, String> {
    s.trim().parse::<ProjectivePoint>().map_err(|e| e.to_string())
}

/// Slopes, canonical polygon and freeness of the tangent lattice at a point.
pub fn point_profile(point: &str) -> Result<String, String> {
    let x = parse_point(point)?;
    let profile = x.slope_profile(&DEMO_LIMITS).map_err(|e| e.to_string())?;
    let data = x.freeness_data(&DEMO_LIMITS).map_err(|e| e.to_string())?;
    Ok(json!({
        "point": x,
        "normSq": x.norm_sq(),
        "logH": data.log_height,
        "freeness": data.freeness,
        "profile": profile,
    })
    .to_string())
}

/// Congruence modulus, distance, second height, S membership and pair freeness.
pub fn pair_report(p1: &str, p2: &str, c: f64, delta: f64) -> Result<String, String> {
    let params = SParams::new(c, delta).map_err(|e| e.to_string())?;
    let pair = PointPair::new(parse_point(p1)?, parse_point(p2)?).map_err(|e| e.to_string())?;
    let row = pair.row(&params);
    let freeness: Value = match pair_freeness_with(&pair.x1, &pair.x2, &DEMO_LIMITS) {
        Ok(f) => json!(f),
        Err(_) => Value::Null,
    };
    Ok(json!({
        "x1": row.x1,
        "x2": row.x2,
        "W": row.w,
        "dist_sq": [row.dist_sq_num, row.dist_sq_den],
        "c": row.c,
        "balanced": params.balanced(pair.x1.norm_sq(), pair.x2.norm_sq()),
        "in_S": row.in_s,
        "pair_freeness": freeness,
    })
    .to_string())
}

/// Slope profile of a lattice in the `{"rank":m,"gram":[[num,den],...]}` form.
pub fn gram_profile(gram_json: &str) -> Result<String, String> {
    let lattice = lattice_from_json(gram_json).map_err(|e| e.to_string())?;
    let profile = slope_profile_with(&lattice, &DEMO_LIMITS).map_err(|e| e.to_string())?;
    serde_json::to_string(&profile).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = pointProfile)]
pub fn point_profile_js(point: &str) -> Result<String, JsError> {
    point_profile(point).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pairReport)]
pub fn pair_report_js(p1: &str, p2: &str, c: f64, delta: f64) -> Result<String, JsError> {
    pair_report(p1, p2, c, delta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gramProfile)]
pub fn gram_profile_js(gram_json: &str) -> Result<String, JsError> {
    gram_profile(gram_json).map_err(|e| JsError::new(&e))
}
