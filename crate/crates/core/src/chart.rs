//! Chart documents: dots, arrows, truncation flags and assumptions for each
//! sphere and page, as JSON or SVG.
//!
//! Axes are `x = m` (homotopy degree) and `y = k` (length).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ss::{AssumedZero, Bidegree, Bounds, Provenance, Session, SignMode, SsError};

pub const CHART_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub k: usize,
    pub m: u32,
}

impl From<Bidegree> for Position {
    fn from(b: Bidegree) -> Self {
        Position { k: b.k, m: b.m }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dot {
    pub k: usize,
    pub m: u32,
    pub dim: usize,
    pub labels: Vec<String>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    /// Ledger id; absent for the intrinsic `d^1`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id: Option<u64>,
    pub r: u32,
    pub source: Position,
    pub target: Position,
    pub source_label: String,
    pub target_label: String,
    pub provenance: Provenance,
    /// An asserted zero differential (drawn as a badge, not a line).
    pub zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageChart {
    pub sphere: u32,
    pub r: u32,
    pub dots: Vec<Dot>,
    pub arrows: Vec<Arrow>,
    pub truncated: Vec<Position>,
    /// Classes of this page whose `d^r` was defaulted to zero.
    pub assumptions: Vec<AssumedZero>,
    /// True when an earlier page relied on assumed zeros.
    pub conditional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereChart {
    pub sphere: u32,
    pub pages: Vec<PageChart>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDocument {
    pub version: u32,
    pub prime: u32,
    pub bounds: Bounds,
    pub sign_mode: SignMode,
    pub revision: u64,
    pub charts: Vec<SphereChart>,
}

/// The chart of page `r` over `S^n`.
pub fn page_chart(session: &mut Session, sphere: u32, r: u32) -> Result<PageChart, SsError> {
    let earlier = session.assumptions_through(sphere, r.saturating_sub(1).max(1))?;
    let assumptions = session.assumptions(sphere, r)?;
    let page = session.page(sphere, r)?.clone();
    let mut dots = Vec::new();
    let mut truncated = Vec::new();
    for cell in page.cells() {
        if cell.truncated {
            truncated.push(cell.bidegree.into());
        }
        if cell.dim() == 0 {
            continue;
        }
        dots.push(Dot {
            k: cell.bidegree.k,
            m: cell.bidegree.m,
            dim: cell.dim(),
            labels: page.class_elements(cell.bidegree).iter().map(|e| e.to_string()).collect(),
            truncated: cell.truncated,
        });
    }
    let mut arrows = Vec::new();
    if r == 1 {
        for cell in page.cells() {
            let b = cell.bidegree;
            let Some(t) = b.target(1).filter(|t| page.in_bounds(*t)) else { continue };
            for x in page.class_elements(b) {
                let dx = crate::lambda::d_element(&x);
                if dx.is_zero() {
                    continue;
                }
                arrows.push(Arrow {
                    id: None,
                    r: 1,
                    source: b.into(),
                    target: t.into(),
                    source_label: x.to_string(),
                    target_label: dx.to_string(),
                    provenance: Provenance::Intrinsic,
                    zero: false,
                });
            }
        }
    } else {
        for a in session.ledger().iter().filter(|a| !a.deleted && a.sphere == sphere && a.page == r) {
            arrows.push(Arrow {
                id: Some(a.id),
                r,
                source: a.source_bidegree.into(),
                target: a.target_bidegree().into(),
                source_label: a.source.to_string(),
                target_label: a.target.to_string(),
                provenance: a.provenance,
                zero: a.target.is_zero(),
            });
        }
    }
    Ok(PageChart {
        sphere,
        r,
        dots,
        arrows,
        truncated,
        assumptions,
        conditional: r > 2 && !earlier.is_empty(),
    })
}

/// Highest page worth exporting for a sphere: one past the last asserted
/// page, and at least 2.
pub fn default_max_page(session: &Session, sphere: u32) -> u32 {
    session
        .ledger()
        .iter()
        .filter(|a| !a.deleted && a.sphere == sphere)
        .map(|a| a.page + 1)
        .max()
        .unwrap_or(2)
        .max(2)
}

/// Every session sphere, pages `1..=max_page` (or the default per sphere).
pub fn chart_document(session: &mut Session, max_page: Option<u32>) -> Result<ChartDocument, SsError> {
    let mut charts = Vec::new();
    for sphere in session.spheres().to_vec() {
        let top = max_page.unwrap_or_else(|| default_max_page(session, sphere));
        let mut pages = Vec::new();
        for r in 1..=top {
            pages.push(page_chart(session, sphere, r)?);
        }
        charts.push(SphereChart { sphere, pages });
    }
    Ok(ChartDocument {
        version: CHART_VERSION,
        prime: session.ctx().p(),
        bounds: session.bounds(),
        sign_mode: session.sign_mode(),
        revision: session.revision(),
        charts,
    })
}

impl ChartDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("chart serializes");
        s.push('\n');
        s
    }
}

const CELL: f64 = 36.0;
const MARGIN: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Draw one page into `out` at vertical offset `y0`; returns its height.
fn draw_page(out: &mut String, page: &PageChart, bounds: Bounds, y0: f64) -> f64 {
    let cols = bounds.max_m.saturating_sub(page.sphere) as f64 + 1.0;
    let rows = bounds.max_length as f64 + 1.0;
    let width = cols * CELL;
    let height = rows * CELL;
    let x = |m: u32| MARGIN + (m.saturating_sub(page.sphere) as f64 + 0.5) * CELL;
    let y = |k: usize| y0 + MARGIN + height - (k as f64 + 0.5) * CELL;
    let _ = writeln!(
        out,
        r#"<g class="page" data-sphere="{}" data-r="{}">"#,
        page.sphere, page.r
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{}" font-size="14">E^{}(S^{})</text>"#,
        y0 + MARGIN - 12.0,
        page.r,
        page.sphere
    );
    let _ = writeln!(
        out,
        r##"<rect class="frame" x="{MARGIN}" y="{}" width="{width}" height="{height}" fill="none" stroke="#bbb"/>"##,
        y0 + MARGIN
    );
    for t in &page.truncated {
        let _ = writeln!(
            out,
            r##"<rect class="truncated" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#eee"/>"##,
            x(t.m) - CELL / 2.0,
            y(t.k) - CELL / 2.0
        );
    }
    for m in page.sphere..=bounds.max_m {
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{}" y="{}" font-size="9" text-anchor="middle">{m}</text>"#,
            x(m),
            y0 + MARGIN + height + 12.0
        );
    }
    for a in &page.arrows {
        let stroke = match a.provenance {
            Provenance::Intrinsic => "#555",
            Provenance::User => "#1f5fbf",
            Provenance::Leibniz => "#2a9d3a",
            Provenance::AssumedZero => "#999",
        };
        let dash = if a.zero { r#" stroke-dasharray="3,3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<path class="arrow" d="M{:.1},{:.1} L{:.1},{:.1}" stroke="{stroke}" fill="none"{dash}><title>{} → {}</title></path>"#,
            x(a.source.m),
            y(a.source.k),
            x(a.target.m),
            y(a.target.k),
            escape(&a.source_label),
            escape(&a.target_label)
        );
    }
    for d in &page.dots {
        let radius = 4.0 + (d.dim.min(6) as f64);
        let _ = writeln!(
            out,
            r#"<circle class="dot" cx="{:.1}" cy="{:.1}" r="{radius}" fill="black"><title>{}</title></circle>"#,
            x(d.m),
            y(d.k),
            escape(&d.labels.join(", "))
        );
        if d.dim > 1 {
            let _ = writeln!(
                out,
                r#"<text class="dim" x="{:.1}" y="{:.1}" font-size="9" fill="white" text-anchor="middle">{}</text>"#,
                x(d.m),
                y(d.k) + 3.0,
                d.dim
            );
        }
    }
    let _ = writeln!(out, "</g>");
    height + 2.0 * MARGIN
}

/// SVG 1.1 rendering of a page.
pub fn page_svg(page: &PageChart, bounds: Bounds) -> String {
    svg_of(&[page], bounds)
}

/// SVG 1.1 rendering of every page of a document, stacked vertically.
pub fn document_svg(doc: &ChartDocument) -> String {
    let pages: Vec<&PageChart> = doc.charts.iter().flat_map(|c| c.pages.iter()).collect();
    svg_of(&pages, doc.bounds)
}

fn svg_of(pages: &[&PageChart], bounds: Bounds) -> String {
    let mut body = String::new();
    let mut y0 = 0.0;
    let mut width: f64 = 0.0;
    for p in pages {
        y0 += draw_page(&mut body, p, bounds, y0);
        let cols = bounds.max_m.saturating_sub(p.sphere) as f64 + 1.0;
        width = width.max(cols * CELL + 2.0 * MARGIN);
    }
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{y0}\" viewBox=\"0 0 {width} {y0}\">\n{body}</svg>\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::PrimeContext;

    #[test]
    fn page_one_chart_for_s2() {
        let ctx = PrimeContext::new(3).unwrap();
        let mut s = Session::new(&ctx, vec![2], Bounds { max_m: 10, max_length: 3 }, SignMode::Derivation);
        let pc = page_chart(&mut s, 2, 1).unwrap();
        let at = |k, m| pc.dots.iter().find(|d| d.k == k && d.m == m).map(|d| d.dim);
        assert_eq!(at(0, 2), Some(1));
        assert_eq!(at(1, 5), Some(1));
        assert_eq!(at(1, 6), Some(1));
        assert!(pc
            .arrows
            .iter()
            .any(|a| a.source == Position { k: 1, m: 6 } && a.target == Position { k: 2, m: 5 }));
        let svg = page_svg(&pc, s.bounds());
        assert_eq!(svg.matches("<circle").count(), pc.dots.len());
        assert_eq!(svg.matches("<path").count(), pc.arrows.len());
    }
}
