//! Plot of one gauss run: the circle `|z| = R`, asymptote ticks, boundary
//! nodes, traced arcs and the located crossing. Coordinates are printed
//! with fixed precision so identical runs give identical bytes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use polyroots::{Field, GaussRun, NodeKind};

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

pub fn render_svg(run: &GaussRun) -> String {
    let radius = run.nodes.radius;
    let n = run.nodes.degree;
    let extent = radius + 1.0;
    let unit = extent / 250.0;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="600" height="600" viewBox="{} {} {} {}">"#,
        num(-extent),
        num(-extent),
        num(2.0 * extent),
        num(2.0 * extent)
    );
    let _ = writeln!(
        out,
        "<style>.disc{{fill:none;stroke:#444}} .tick-p{{stroke:#c0392b}} .tick-q{{stroke:#2471a3}} \
         .arc-g{{fill:none;stroke:#c0392b}} .arc-h{{fill:none;stroke:#2471a3}} .node-p{{fill:#c0392b}} \
         .node-q{{fill:#2471a3}} .crossing{{fill:none;stroke:#000}}</style>"
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" stroke-width="{}">"#, num(unit));
    let _ = writeln!(out, r#"<circle class="disc" cx="0" cy="0" r="{}"/>"#, num(radius));

    for (class, kind) in [("tick-p", NodeKind::P), ("tick-q", NodeKind::Q)] {
        for i in 0..2 * n {
            let theta = polyroots::annulus::asymptote(kind, i, n);
            let (c, s) = (theta.cos(), theta.sin());
            let (r0, r1) = (radius + 0.2, radius + 0.7);
            let _ = writeln!(
                out,
                r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                num(r0 * c),
                num(r0 * s),
                num(r1 * c),
                num(r1 * s)
            );
        }
    }

    for arc in run.matchings.p_arcs.iter().chain(&run.matchings.q_arcs) {
        let class = match arc.field {
            Field::G => "arc-g",
            Field::H => "arc-h",
        };
        let points: Vec<String> = arc.samples.iter().map(|&(x, y)| format!("{},{}", num(x), num(y))).collect();
        let _ = writeln!(out, r#"<polyline class="{class}" points="{}"/>"#, points.join(" "));
    }

    for node in &run.nodes.nodes {
        let class = match node.kind {
            NodeKind::P => "node-p",
            NodeKind::Q => "node-q",
        };
        let z = node.position(radius);
        let _ = writeln!(
            out,
            r#"<circle class="{class}" cx="{}" cy="{}" r="{}"/>"#,
            num(z.re),
            num(z.im),
            num(4.0 * unit)
        );
    }

    let _ = writeln!(
        out,
        r#"<circle class="crossing" cx="{}" cy="{}" r="{}" stroke-width="{}"/>"#,
        num(run.crossing.x),
        num(run.crossing.y),
        num(8.0 * unit),
        num(2.0 * unit)
    );
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

pub fn emit_svg(run: &GaussRun, path: &Path) -> io::Result<()> {
    std::fs::write(path, render_svg(run))
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyroots::{gauss_run, GaussOptions, Poly};

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!(r#"class="{class}""#)).count()
    }

    #[test]
    fn linear_plot_has_two_diameters() {
        let run = gauss_run(&Poly::monomial(1), &GaussOptions::default()).unwrap();
        let svg = render_svg(&run);
        assert_eq!(count(&svg, "arc-g"), 1);
        assert_eq!(count(&svg, "arc-h"), 1);
        assert_eq!(count(&svg, "crossing"), 1);
        for arc in run.matchings.p_arcs.iter().chain(&run.matchings.q_arcs) {
            let (a, b) = (arc.samples[0], *arc.samples.last().unwrap());
            // every sample on the chord through the centre
            for &(x, y) in &arc.samples {
                let cross = (b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0);
                assert!(cross.abs() < 1e-9);
            }
            assert!((a.0 + b.0).abs() < 1e-9 && (a.1 + b.1).abs() < 1e-9);
        }
        assert!(run.crossing.point().norm() < 1e-6);
    }

    #[test]
    fn cubic_monomial_has_twelve_nodes() {
        let run = gauss_run(&Poly::monomial(3), &GaussOptions::default()).unwrap();
        let svg = render_svg(&run);
        assert_eq!(count(&svg, "node-p") + count(&svg, "node-q"), 12);
        assert_eq!(count(&svg, "tick-p"), 6);
        assert_eq!(count(&svg, "tick-q"), 6);
    }

    #[test]
    fn rendering_is_deterministic() {
        let p = Poly::from_real(&[1.0, -2.0, 0.5, 1.0]);
        let a = render_svg(&gauss_run(&p, &GaussOptions::default()).unwrap());
        let b = render_svg(&gauss_run(&p, &GaussOptions::default()).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(num(-0.0), "0.000000");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(1.5), "1.500000");
    }
}
