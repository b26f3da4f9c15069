//! Static SVG 1.1 documents: sweep curves, region rasters and laminate sketches.

use std::fmt::Write;

use threephase::{Axis, LaminateNode, Phase, Region, SgCell};

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;

fn open(w: f64, h: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    )
}

fn close(mut s: String) -> String {
    s.push_str("</svg>\n");
    s
}

pub fn region_color(r: Region) -> &'static str {
    match r {
        Region::A1 => "#4e79a7",
        Region::A2 => "#a0cbe8",
        Region::B => "#f28e2b",
        Region::C => "#59a14f",
        Region::D => "#e15759",
        Region::E => "#bab0ac",
        Region::A1p => "#76b7b2",
        Region::A2p => "#d4eeec",
        Region::Bp => "#ffbe7d",
        Region::Cp => "#8cd17d",
        Region::Dp => "#ff9d9a",
    }
}

/// Linear map from data to the padded plot area, y pointing up.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        PAD + (v - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn y(&self, v: f64) -> f64 {
        H - PAD - (v - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            s,
            "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        for (v, anchor) in [(self.x0, "start"), (self.x1, "end")] {
            let _ = writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{}\" font-size=\"11\" text-anchor=\"{anchor}\">{v}</text>",
                self.x(v),
                H - PAD + 14.0
            );
        }
        for v in [self.y0, self.y1] {
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>",
                PAD - 4.0,
                self.y(v) + 4.0,
                v
            );
        }
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{xlabel}</text>", W / 2.0, H - 12.0);
        let _ = writeln!(
            s,
            "<text x=\"14\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{ylabel}</text>",
            H / 2.0,
            H / 2.0
        );
    }

    /// Polyline through the finite points; `None` breaks the line.
    fn curve(&self, s: &mut String, pts: &[(f64, Option<f64>)], style: &str) {
        let mut run = String::new();
        let flush = |run: &mut String, s: &mut String| {
            if run.split_whitespace().count() >= 2 {
                let _ = writeln!(s, "<polyline fill=\"none\" {style} points=\"{}\"/>", run.trim());
            }
            run.clear();
        };
        for &(x, y) in pts {
            match y {
                Some(y) => {
                    let _ = write!(run, "{:.2},{:.2} ", self.x(x), self.y(y));
                }
                None => flush(&mut run, s),
            }
        }
        flush(&mut run, s);
    }
}

pub struct SweepRow {
    pub rho: f64,
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub k_hs: f64,
    pub l_hs: f64,
}

/// K* solid, L* dashed, the Hashin–Shtrikman values dotted.
pub fn sweep(rows: &[SweepRow]) -> String {
    let values = rows.iter().flat_map(|r| [r.k, r.l, Some(r.k_hs), Some(r.l_hs)]).flatten();
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let f = Frame {
        x0: rows.first().map_or(-1.0, |r| r.rho),
        x1: rows.last().map_or(1.0, |r| r.rho),
        y0: lo.min(0.0),
        y1: hi * 1.05,
    };
    let mut s = open(W, H);
    f.axes(&mut s, "rho", "moduli");
    let pick = |g: fn(&SweepRow) -> Option<f64>| rows.iter().map(|r| (r.rho, g(r))).collect::<Vec<_>>();
    f.curve(&mut s, &pick(|r| r.k), "stroke=\"#1f4e79\" stroke-width=\"1.5\"");
    f.curve(&mut s, &pick(|r| r.l), "stroke=\"#1f4e79\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"");
    f.curve(&mut s, &pick(|r| Some(r.k_hs)), "stroke=\"#888\" stroke-dasharray=\"1 3\"");
    f.curve(&mut s, &pick(|r| Some(r.l_hs)), "stroke=\"#888\" stroke-dasharray=\"1 3\"");
    close(s)
}

/// Raster of region labels, row `j` holding cells of increasing ρ at the `j`-th m1 value,
/// with boundary polylines drawn over it.
pub fn region_map(labels: &[Region], n: usize, m: usize, m1_max: f64, lines: &[(String, Vec<(f64, f64)>)]) -> String {
    let f = Frame {
        x0: -1.0,
        x1: 1.0,
        y0: 0.0,
        y1: m1_max,
    };
    let (cw, ch) = ((W - 2.0 * PAD) / n as f64, (H - 2.0 * PAD) / m as f64);
    let mut s = open(W, H);
    s.push_str("<g shape-rendering=\"crispEdges\">\n");
    for j in 0..m {
        let y = H - PAD - (j + 1) as f64 * ch;
        let row = &labels[j * n..(j + 1) * n];
        // one rectangle per run of equal labels
        let mut i = 0;
        while i < n {
            let r = row[i];
            let start = i;
            while i < n && row[i] == r {
                i += 1;
            }
            let _ = writeln!(
                s,
                "<rect x=\"{:.3}\" y=\"{y:.3}\" width=\"{:.3}\" height=\"{ch:.3}\" fill=\"{}\"/>",
                PAD + start as f64 * cw,
                (i - start) as f64 * cw,
                region_color(r)
            );
        }
    }
    s.push_str("</g>\n");
    for (name, pts) in lines {
        let _ = writeln!(s, "<!-- {name} -->");
        let pts: Vec<(f64, Option<f64>)> = pts.iter().map(|&(x, y)| (x, Some(y))).collect();
        f.curve(&mut s, &pts, "stroke=\"black\" stroke-width=\"1\"");
    }
    f.axes(&mut s, "rho", "m1");
    for r in Region::ALL {
        let i = Region::ALL.iter().position(|&q| q == r).unwrap();
        let y = PAD + 14.0 * i as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{y}\" width=\"10\" height=\"10\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.5\"/><text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>",
            W - PAD + 6.0,
            region_color(r),
            W - PAD + 20.0,
            y + 9.0,
            r.label()
        );
    }
    close(s)
}

fn phase_fill(p: Phase) -> &'static str {
    match p {
        Phase::One => "#3b3b3b",
        Phase::Two => "#a9a9a9",
        Phase::Void => "#ffffff",
    }
}

/// Nested rectangles: a layer with normal `e1` splits its box along x1.
pub fn laminate(tree: &LaminateNode) -> String {
    let side = 400.0;
    let mut s = open(side + 20.0, side + 20.0);
    fn draw(s: &mut String, node: &LaminateNode, x: f64, y: f64, w: f64, h: f64) {
        match node {
            LaminateNode::Leaf { phase, .. } => {
                let _ = writeln!(
                    s,
                    "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{w:.3}\" height=\"{h:.3}\" fill=\"{}\" stroke=\"#666\" stroke-width=\"0.3\"/>",
                    phase_fill(*phase)
                );
            }
            LaminateNode::Layered { normal, fraction, a, b } => match normal {
                Axis::E1 => {
                    draw(s, a, x, y, w * fraction, h);
                    draw(s, b, x + w * fraction, y, w * (1.0 - fraction), h);
                }
                Axis::E2 => {
                    draw(s, a, x, y, w, h * fraction);
                    draw(s, b, x, y + h * fraction, w, h * (1.0 - fraction));
                }
            },
        }
    }
    draw(&mut s, tree, 10.0, 10.0, side, side);
    close(s)
}

/// The periodic cell: phase 2 in the corner rectangle, two striped phase-1 strips, void.
pub fn sg_cell(c: &SgCell) -> String {
    let side = 400.0;
    let (o, b1, b2) = (10.0, c.beta1 * side, c.beta2 * side);
    let mut s = open(side + 20.0, side + 20.0);
    let _ = writeln!(s, "<rect x=\"{o}\" y=\"{o}\" width=\"{side}\" height=\"{side}\" fill=\"white\" stroke=\"black\"/>");
    // y grows downwards in SVG, so the cell is drawn from its bottom-left corner
    let bottom = o + side;
    let _ = writeln!(
        s,
        "<rect x=\"{o}\" y=\"{:.3}\" width=\"{b1:.3}\" height=\"{b2:.3}\" fill=\"{}\"/>",
        bottom - b2,
        phase_fill(Phase::Two)
    );
    const STRIPES: usize = 8;
    // strip right of phase 2, layers with normal e2
    let (w, h) = (side - b1, b2);
    for k in 0..STRIPES {
        let y = bottom - b2 + h * k as f64 / STRIPES as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{:.3}\" y=\"{y:.3}\" width=\"{w:.3}\" height=\"{:.3}\" fill=\"{}\"/>",
            o + b1,
            h * c.beta3 / STRIPES as f64,
            phase_fill(Phase::One)
        );
    }
    // strip above phase 2, layers with normal e1
    let (w, h) = (b1, side - b2);
    for k in 0..STRIPES {
        let x = o + w * k as f64 / STRIPES as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{x:.3}\" y=\"{o}\" width=\"{:.3}\" height=\"{h:.3}\" fill=\"{}\"/>",
            w * c.beta4 / STRIPES as f64,
            phase_fill(Phase::One)
        );
    }
    close(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use threephase::{build, build_sg, Materials};

    fn well_formed(s: &str) {
        assert!(s.starts_with("<?xml"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<svg").count(), 1);
    }

    #[test]
    fn documents_are_closed() {
        let spec = Materials::from_compliances([1.0, 2.0, 3.0, 4.0]).unwrap().spec(0.12, 0.35, 0.8).unwrap();
        well_formed(&laminate(&build(&spec).unwrap().tree));
        well_formed(&sg_cell(&build_sg(&spec).unwrap()));
        let rows: Vec<SweepRow> = [-1.0, -0.5, 0.0, 0.5, 1.0]
            .into_iter()
            .map(|rho: f64| {
                let k = (rho != 0.0).then_some(3.0 + rho);
                SweepRow { rho, k, l: k.map(|k| k + 1.0), k_hs: 5.0, l_hs: 9.0 }
            })
            .collect();
        let s = sweep(&rows);
        well_formed(&s);
        // the gap splits each moduli curve
        assert_eq!(s.matches("<polyline").count(), 6);
    }

    #[test]
    fn raster_merges_runs() {
        let labels = vec![Region::A1, Region::A1, Region::C, Region::C];
        let s = region_map(&labels, 2, 2, 0.65, &[]);
        well_formed(&s);
        assert_eq!(s.matches("<rect x=\"48.000\"").count(), 2);
    }
}
