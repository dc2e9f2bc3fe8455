//! Minimal SVG heatmap of the (count, length) posterior marginal.

use std::fmt::Write as _;

use tls_noise::inference::Expectations;

const CELL: f64 = 24.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;

/// White to dark blue, linear in probability relative to the largest cell.
fn shade(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let ch = |hi: f64, lo: f64| (hi + (lo - hi) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(255.0, 8.0), ch(255.0, 48.0), ch(255.0, 107.0))
}

/// Rows are counts (largest at the top), columns are lengths.
pub fn heatmap(e: &Expectations) -> String {
    let (counts, lengths) = e.axes();
    let max = e.marginal.iter().map(|c| c.probability).fold(0.0, f64::max);
    let w = LEFT + CELL * lengths.len() as f64 + 10.0;
    let h = TOP + CELL * counts.len() as f64 + BOTTOM;
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="9">"#).unwrap();
    for c in &e.marginal {
        let i = counts.binary_search(&c.n_tls).unwrap();
        let j = lengths.binary_search_by(|l| l.total_cmp(&c.ell_nm)).unwrap();
        let x = LEFT + CELL * j as f64;
        let y = TOP + CELL * (counts.len() - 1 - i) as f64;
        let t = if max > 0.0 { c.probability / max } else { 0.0 };
        writeln!(
            s,
            r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"><title>n={} ell={:.4} p={:.4e}</title></rect>"#,
            shade(t),
            c.n_tls,
            c.ell_nm,
            c.probability
        )
        .unwrap();
    }
    for (i, n) in counts.iter().enumerate() {
        let y = TOP + CELL * (counts.len() - 1 - i) as f64 + CELL * 0.65;
        writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{n}</text>"#, LEFT - 4.0).unwrap();
    }
    let base = TOP + CELL * counts.len() as f64;
    for (j, l) in lengths.iter().enumerate() {
        let x = LEFT + CELL * (j as f64 + 0.5);
        writeln!(s, r#"<text x="{x}" y="{}" text-anchor="end" transform="rotate(-60 {x} {})">{l:.3}</text>"#, base + 10.0, base + 10.0).unwrap();
    }
    writeln!(s, r#"<text x="12" y="{}" transform="rotate(-90 12 {})">n_T</text>"#, TOP + 40.0, TOP + 40.0).unwrap();
    writeln!(s, r#"<text x="{}" y="{}">ell (nm)</text>"#, LEFT, h - 4.0).unwrap();
    s.push_str("</svg>\n");
    s
}
