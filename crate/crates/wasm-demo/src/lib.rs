//! Three engine operations exported to JavaScript.
//!
//! The `*_text` functions hold the logic and return `Result<String,
//! String>`, so they can be tested natively; the exported wrappers only
//! convert errors into JS exceptions.

use wasm_bindgen::prelude::*;

use lambda_sseq::chart::{page_chart, page_svg};
use lambda_sseq::lambda::d_element;
use lambda_sseq::ss::{Bounds, Session, SignMode};
use lambda_sseq::{Element, PrimeContext};

/// Pages are limited so the browser tab stays responsive.
pub const MAX_M: u32 = 40;
pub const MAX_LENGTH: usize = 10;

fn parse(p: u32, expr: &str) -> Result<Element, String> {
    let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
    Element::parse(expr, &ctx).map_err(|e| e.to_string())
}

pub fn normalize_text(p: u32, expr: &str) -> Result<String, String> {
    Ok(parse(p, expr)?.to_string())
}

pub fn differential_text(p: u32, expr: &str) -> Result<String, String> {
    Ok(d_element(&parse(p, expr)?).to_string())
}

/// SVG chart of `E^r` over `S^n` with no asserted differentials.
pub fn page_svg_text(p: u32, sphere: u32, r: u32, max_m: u32, max_length: usize) -> Result<String, String> {
    if max_m > MAX_M || max_length > MAX_LENGTH {
        return Err(format!("bounds are limited to m ≤ {MAX_M}, length ≤ {MAX_LENGTH} here"));
    }
    let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
    let bounds = Bounds { max_m, max_length };
    let mut s = Session::new(&ctx, vec![sphere], bounds, SignMode::Derivation);
    let page = page_chart(&mut s, sphere, r).map_err(|e| e.to_string())?;
    Ok(page_svg(&page, bounds))
}

#[wasm_bindgen]
pub fn normalize(p: u32, expr: &str) -> Result<String, JsError> {
    normalize_text(p, expr).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn differential(p: u32, expr: &str) -> Result<String, JsError> {
    differential_text(p, expr).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pageSvg)]
pub fn page_svg_js(p: u32, sphere: u32, r: u32, max_m: u32, max_length: usize) -> Result<String, JsError> {
    page_svg_text(p, sphere, r, max_m, max_length).map_err(|e| JsError::new(&e))
}
