use std::fmt::Write as _;

use num_complex::Complex64;

use super::{CellLabel, ContourSet, ContourTag, RegionMap};
use crate::omega::BranchCutSet;

/// Contour vertices as CSV, one block per polyline separated by a blank line.
pub fn contour_csv(set: &ContourSet) -> String {
    let mut out = String::from("polyline,tag,re,im\n");
    for (idx, (line, tag)) in set.polylines.iter().zip(&set.classification).enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        let tag = match tag {
            ContourTag::Ray => "RAY",
            ContourTag::Loop => "LOOP",
            ContourTag::Arc => "ARC",
        };
        for z in line {
            let _ = writeln!(out, "{idx},{tag},{:.12e},{:.12e}", z.re, z.im);
        }
    }
    out
}

const SIZE: f64 = 800.0;

/// SVG picture with Im k pointing up: D1 shaded, the contour `Im Ω = 0` as
/// solid lines, cuts dotted, branch points as filled dots.
pub fn region_svg(map: &RegionMap, contour: Option<&ContourSet>, cuts: &BranchCutSet, title: &str) -> String {
    let l = map.half_width;
    let px = |z: Complex64| ((z.re + l) / (2.0 * l) * SIZE, (l - z.im) / (2.0 * l) * SIZE);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{}" viewBox="0 0 {SIZE} {}">"#,
        SIZE + 60.0,
        SIZE + 60.0
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>"#);

    // D1 cells, merged into horizontal runs.
    let n = map.resolution;
    let cell = SIZE / n as f64;
    let _ = writeln!(s, r##"<g fill="#9ecae1" stroke="none">"##);
    for row in 0..n {
        let mut col = 0;
        while col < n {
            if map.label(col, row) != CellLabel::D1 {
                col += 1;
                continue;
            }
            let start = col;
            while col < n && map.label(col, row) == CellLabel::D1 {
                col += 1;
            }
            let y = SIZE - (row + 1) as f64 * cell;
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
                start as f64 * cell,
                y,
                (col - start) as f64 * cell,
                cell
            );
        }
    }
    let _ = writeln!(s, "</g>");

    let (ox, oy) = px(Complex64::new(0.0, 0.0));
    let _ = writeln!(
        s,
        r##"<g stroke="#bbbbbb" stroke-width="0.5"><line x1="0" y1="{oy:.2}" x2="{SIZE}" y2="{oy:.2}"/><line x1="{ox:.2}" y1="0" x2="{ox:.2}" y2="{SIZE}"/></g>"##
    );

    if let Some(set) = contour {
        let _ = writeln!(s, r#"<g fill="none" stroke="black" stroke-width="1.2">"#);
        for line in &set.polylines {
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, points_attr(line, &px));
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r##"<g fill="none" stroke="#d62728" stroke-width="2" stroke-dasharray="2,4">"##);
    for cut in &cuts.cuts {
        let _ = writeln!(s, r#"<polyline points="{}"/>"#, points_attr(&cut.vertices, &px));
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g fill="black">"#);
    for bp in &cuts.branch_points {
        let (x, y) = px(bp.point);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4"/>"#);
    }
    let _ = writeln!(s, "</g>");

    let base = SIZE + 20.0;
    let _ = writeln!(
        s,
        r##"<g font-family="sans-serif" font-size="13"><text x="10" y="{base}">{}</text><rect x="10" y="{:.0}" width="14" height="10" fill="#9ecae1"/><text x="30" y="{:.0}">D1</text><line x1="80" y1="{:.0}" x2="110" y2="{:.0}" stroke="black"/><text x="115" y="{:.0}">Im Ω = 0</text><line x1="200" y1="{:.0}" x2="230" y2="{:.0}" stroke="#d62728" stroke-width="2" stroke-dasharray="2,4"/><text x="235" y="{:.0}">branch cut</text><circle cx="330" cy="{:.0}" r="4"/><text x="340" y="{:.0}">branch point</text><text x="460" y="{:.0}">box [-{l:.3}, {l:.3}]²</text></g>"##,
        escape(title),
        base + 15.0,
        base + 24.0,
        base + 20.0,
        base + 20.0,
        base + 24.0,
        base + 20.0,
        base + 20.0,
        base + 24.0,
        base + 20.0,
        base + 24.0,
        base + 24.0
    );
    s.push_str("</svg>\n");
    s
}

fn points_attr(line: &[Complex64], px: &impl Fn(Complex64) -> (f64, f64)) -> String {
    let mut out = String::with_capacity(line.len() * 16);
    for &z in line {
        let (x, y) = px(z);
        let _ = write!(out, "{x:.2},{y:.2} ");
    }
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_blocks() {
        let set = ContourSet {
            half_width: 1.0,
            resolution: 128,
            polylines: vec![vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], vec![Complex64::new(0.5, 0.5)]],
            classification: vec![ContourTag::Ray, ContourTag::Arc],
        };
        let csv = contour_csv(&set);
        assert_eq!(csv.lines().count(), 1 + 2 + 1 + 1);
        assert!(csv.contains("\n\n1,ARC,"));
    }
}
