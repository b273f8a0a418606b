//! Deterministic SVG output for labelled planar partitions.

use std::fmt::Write;

use pwrot_core::geometry::ConvexRegion;

use crate::input::Window;

/// One region to draw. Regions sharing a label share a fill.
#[derive(Clone, Debug)]
pub struct Labelled {
    pub label: String,
    pub region: ConvexRegion,
}

const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#86bcb6", "#d4a6c8",
];

/// FNV-1a, so colours do not depend on the std hasher's seed.
fn fill(label: &str) -> &'static str {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    PALETTE[(h % PALETTE.len() as u64) as usize]
}

/// Fixed 9-decimal coordinate with trailing zeros trimmed and no "-0".
pub fn coord(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".to_string(),
        _ => s.to_string(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Draws every region clipped exactly to the window, in input order. The
/// y axis points up. An empty input yields the background alone.
pub fn render_svg(parts: &[Labelled], window: &Window) -> String {
    let (x0, y0, x1, y1) = window.to_f64();
    let (w, h) = (x1 - x0, y1 - y0);
    let px_h = (800.0 * h / w).round().max(1.0) as u64;
    let clip = window.region();
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"{px_h}\" viewBox=\"{} {} {} {}\">",
        coord(x0),
        coord(-y1),
        coord(w),
        coord(h)
    );
    let _ = writeln!(
        out,
        "<metadata>window={} precision=1e-9 clipping=exact y-axis=up</metadata>",
        window.text
    );
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        coord(x0),
        coord(-y1),
        coord(w),
        coord(h)
    );
    for p in parts {
        let Ok(r) = p.region.lift(clip.order()) else {
            continue;
        };
        let r = r.intersect(&clip);
        if r.is_empty() {
            continue;
        }
        let pts: Vec<String> = r
            .vertices()
            .iter()
            .map(|v| {
                let (x, y) = v.to_f64();
                format!("{},{}", coord(x), coord(-y))
            })
            .collect();
        if pts.len() < 3 {
            continue;
        }
        let _ = writeln!(
            out,
            "<polygon data-label=\"{}\" fill=\"{}\" stroke=\"#222222\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\" points=\"{}\"/>",
            escape(&p.label),
            fill(&p.label),
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}
