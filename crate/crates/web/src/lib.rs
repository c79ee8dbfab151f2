//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes a channel spec as JSON and returns JSON, so the page
//! needs nothing beyond `JSON.parse`.

use fadinglab::analysis::{
    average_ep, average_ep_asymptotic, diversity_order, outage, outage_asymptotic, WeightedGaussianSum,
};
use fadinglab::channels::{db_to_linear, ChannelSpec};
use fadinglab::mgf::PosynomialMgf;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 400;

#[derive(Serialize)]
struct Coefficients {
    mgf: PosynomialMgf,
    diversity_order: f64,
}

#[derive(Serialize)]
struct Curve {
    x_db: Vec<f64>,
    exact: Vec<f64>,
    asymptotic: Vec<f64>,
    methods: Vec<&'static str>,
}

fn parse(spec_json: &str) -> Result<PosynomialMgf, String> {
    let spec = ChannelSpec::from_json(spec_json).map_err(|e| format!("invalid channel spec: {e}"))?;
    spec.to_mgf().map_err(|e| e.to_string())
}

fn db_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(start.is_finite() && stop.is_finite() && stop > start) {
        return Err(format!("need start < stop, got {start} and {stop}"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be between 2 and {MAX_POINTS}"));
    }
    Ok((0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect())
}

/// Simplified coefficients and diversity order.
pub fn coefficients_json(spec_json: &str) -> Result<String, String> {
    let mgf = parse(spec_json)?.simplify();
    let diversity_order = diversity_order(&mgf).map_err(|e| e.to_string())?;
    serde_json::to_string(&Coefficients { mgf, diversity_order }).map_err(|e| e.to_string())
}

/// BPSK average error probability against an SNR gain in dB.
pub fn error_curve_json(spec_json: &str, start_db: f64, stop_db: f64, points: usize) -> Result<String, String> {
    let mgf = parse(spec_json)?;
    let bpsk = WeightedGaussianSum::bpsk();
    let x_db = db_grid(start_db, stop_db, points)?;
    let mut curve = Curve {
        x_db: Vec::with_capacity(points),
        exact: Vec::with_capacity(points),
        asymptotic: Vec::with_capacity(points),
        methods: Vec::with_capacity(points),
    };
    for x in x_db {
        let sum = bpsk.scaled(db_to_linear(x));
        let r = average_ep(&mgf, &sum).map_err(|e| e.to_string())?;
        curve.asymptotic.push(average_ep_asymptotic(&mgf, &sum).map_err(|e| e.to_string())?);
        curve.exact.push(r.value);
        curve.methods.push(r.method.tag());
        curve.x_db.push(x);
    }
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

/// Outage probability against a threshold in dB.
pub fn outage_curve_json(spec_json: &str, start_db: f64, stop_db: f64, points: usize) -> Result<String, String> {
    let mgf = parse(spec_json)?;
    let x_db = db_grid(start_db, stop_db, points)?;
    let mut curve = Curve {
        x_db: Vec::with_capacity(points),
        exact: Vec::with_capacity(points),
        asymptotic: Vec::with_capacity(points),
        methods: Vec::with_capacity(points),
    };
    for x in x_db {
        let th = db_to_linear(x);
        let r = outage(&mgf, th).map_err(|e| e.to_string())?;
        curve.asymptotic.push(outage_asymptotic(&mgf, th).map_err(|e| e.to_string())?);
        curve.exact.push(r.value);
        curve.methods.push(r.method.tag());
        curve.x_db.push(x);
    }
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn coefficients(spec_json: &str) -> Result<String, JsError> {
    coefficients_json(spec_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = errorCurve)]
pub fn error_curve(spec_json: &str, start_db: f64, stop_db: f64, points: usize) -> Result<String, JsError> {
    error_curve_json(spec_json, start_db, stop_db, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = outageCurve)]
pub fn outage_curve(spec_json: &str, start_db: f64, stop_db: f64, points: usize) -> Result<String, JsError> {
    outage_curve_json(spec_json, start_db, stop_db, points).map_err(|e| JsError::new(&e))
}
