//! Hand-written SVG plots. Output depends only on the input values, so
//! regenerating a plot from the same logs yields identical bytes.

use std::fmt::Write as _;

const FRONT_COLOR: &str = "#d62728";
const TRIAL_COLOR: &str = "#9e9e9e";
const LINK_COLOR: &str = "#1f77b4";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub id: usize,
    pub e_x: f64,
    pub e_tau: f64,
    pub front: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

/// Maps data coordinates onto a pixel rectangle.
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn upper_bound(values: impl Iterator<Item = f64>) -> f64 {
    let max = values.fold(0.0f64, f64::max);
    if max > 0.0 {
        max * 1.05
    } else {
        1.0
    }
}

/// Objective-space scatter of feasible trials; front members go in the
/// `front` layer, joined in order of increasing `e_x`.
pub fn scatter(title: &str, points: &[ScatterPoint]) -> String {
    let (width, height) = (640.0, 480.0);
    let (left, right, top, bottom) = (80.0, 20.0, 40.0, 60.0);
    let x = Axis {
        lo: 0.0,
        hi: upper_bound(points.iter().map(|p| p.e_x)),
        px_lo: left,
        px_hi: width - right,
    };
    let y = Axis {
        lo: 0.0,
        hi: upper_bound(points.iter().map(|p| p.e_tau)),
        px_lo: height - bottom,
        px_hi: top,
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        width / 2.0,
        escape(title)
    );
    let _ = writeln!(s, "<g id=\"axes\" stroke=\"black\" fill=\"none\">");
    let _ = writeln!(
        s,
        "<path d=\"M{left:.1} {top:.1} V{:.1} H{:.1}\"/>",
        height - bottom,
        width - right
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let vx = x.lo + f * (x.hi - x.lo);
        let vy = y.lo + f * (y.hi - y.lo);
        let (px, py) = (x.map(vx), y.map(vy));
        let _ = writeln!(s, "<path d=\"M{px:.1} {:.1} v5\"/>", height - bottom);
        let _ = writeln!(s, "<path d=\"M{left:.1} {py:.1} h-5\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">{}</text>",
            height - bottom + 20.0,
            tick_label(vx)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" stroke=\"none\" fill=\"black\">{}</text>",
            left - 8.0,
            py + 4.0,
            tick_label(vy)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">E_x [m]</text>",
        (left + width - right) / 2.0,
        height - 16.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">E_tau [N m]</text>",
        (top + height - bottom) / 2.0,
        (top + height - bottom) / 2.0
    );

    let _ = writeln!(s, "<g id=\"trials\" fill=\"{TRIAL_COLOR}\">");
    for p in points.iter().filter(|p| !p.front) {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\"/>",
            x.map(p.e_x),
            y.map(p.e_tau)
        );
    }
    let _ = writeln!(s, "</g>");

    let mut front: Vec<&ScatterPoint> = points.iter().filter(|p| p.front).collect();
    front.sort_by(|a, b| a.e_x.total_cmp(&b.e_x).then(a.id.cmp(&b.id)));
    let _ = writeln!(s, "<g id=\"front\" fill=\"{FRONT_COLOR}\" stroke=\"{FRONT_COLOR}\">");
    if front.len() > 1 {
        let path: Vec<String> = front
            .iter()
            .map(|p| format!("{:.2},{:.2}", x.map(p.e_x), y.map(p.e_tau)))
            .collect();
        let _ = writeln!(s, "<polyline fill=\"none\" points=\"{}\"/>", path.join(" "));
    }
    for p in &front {
        let _ = writeln!(
            s,
            "<circle class=\"front\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\"><title>trial {}</title></circle>",
            x.map(p.e_x),
            y.map(p.e_tau),
            p.id
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

/// Top (x-y) and side (x-z) views of a chain at several poses.
///
/// Each pose lists the first joint's origin, the following joint origins and
/// finally the tip. Targets are drawn as crosses, the world origin as a square.
pub fn skeleton(title: &str, poses: &[Vec<[f64; 3]>], targets: &[[f64; 3]]) -> String {
    let panel = 360.0;
    let (width, height) = (2.0 * panel, panel + 40.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        width / 2.0,
        escape(title)
    );
    for (k, (name, (a, b))) in [("top view (x, y)", (0, 1)), ("side view (x, z)", (0, 2))]
        .into_iter()
        .enumerate()
    {
        let all = poses
            .iter()
            .flatten()
            .chain(targets)
            .chain(std::iter::once(&[0.0; 3]));
        let (mut lo_a, mut hi_a, mut lo_b, mut hi_b) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in all {
            lo_a = lo_a.min(p[a]);
            hi_a = hi_a.max(p[a]);
            lo_b = lo_b.min(p[b]);
            hi_b = hi_b.max(p[b]);
        }
        let span = (hi_a - lo_a).max(hi_b - lo_b).max(0.1) * 1.15;
        let (mid_a, mid_b) = ((lo_a + hi_a) / 2.0, (lo_b + hi_b) / 2.0);
        let x0 = k as f64 * panel;
        let ha = Axis {
            lo: mid_a - span / 2.0,
            hi: mid_a + span / 2.0,
            px_lo: x0 + 20.0,
            px_hi: x0 + panel - 20.0,
        };
        let vb = Axis {
            lo: mid_b - span / 2.0,
            hi: mid_b + span / 2.0,
            px_lo: height - 20.0,
            px_hi: 60.0,
        };
        let _ = writeln!(s, "<g id=\"panel{k}\">");
        let _ = writeln!(
            s,
            "<rect x=\"{:.1}\" y=\"40\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#cccccc\"/>",
            x0 + 4.0,
            panel - 8.0,
            height - 44.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"54\" text-anchor=\"middle\">{name}</text>",
            x0 + panel / 2.0
        );
        let (ox, oy) = (ha.map(0.0), vb.map(0.0));
        let _ = writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"6\" height=\"6\" fill=\"black\"/>",
            ox - 3.0,
            oy - 3.0
        );
        for pose in poses {
            let pts: Vec<String> = pose
                .iter()
                .map(|p| format!("{:.2},{:.2}", ha.map(p[a]), vb.map(p[b])))
                .collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{LINK_COLOR}\" stroke-width=\"3\" stroke-opacity=\"0.6\" points=\"{}\"/>",
                pts.join(" ")
            );
            for p in pose.iter().take(pose.len().saturating_sub(1)) {
                let _ = writeln!(
                    s,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"black\"/>",
                    ha.map(p[a]),
                    vb.map(p[b])
                );
            }
        }
        for t in targets {
            let (tx, ty) = (ha.map(t[a]), vb.map(t[b]));
            let _ = writeln!(
                s,
                "<path d=\"M{:.2} {:.2} l8 8 m0 -8 l-8 8\" stroke=\"{FRONT_COLOR}\" stroke-width=\"2\"/>",
                tx - 4.0,
                ty - 4.0
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points() -> Vec<ScatterPoint> {
        vec![
            ScatterPoint { id: 0, e_x: 1.0, e_tau: 5.0, front: false },
            ScatterPoint { id: 1, e_x: 0.5, e_tau: 2.0, front: true },
            ScatterPoint { id: 2, e_x: 0.1, e_tau: 9.0, front: true },
        ]
    }

    #[test]
    fn front_layer_holds_front_points() {
        let svg = scatter("demo", &points());
        let front = svg.split("<g id=\"front\"").nth(1).unwrap();
        assert_eq!(front.matches("class=\"front\"").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn empty_front_layer() {
        let svg = scatter("none", &[]);
        assert!(svg.contains("<g id=\"front\""));
        assert!(!svg.contains("class=\"front\""));
    }

    #[test]
    fn deterministic() {
        assert_eq!(scatter("a", &points()), scatter("a", &points()));
        let poses = vec![vec![[0.0, 0.0, 0.0], [0.0, 0.0, 0.3], [0.3, 0.0, 0.3]]];
        assert_eq!(
            skeleton("s", &poses, &[[0.3, 0.0, 0.3]]),
            skeleton("s", &poses, &[[0.3, 0.0, 0.3]])
        );
    }
}
