//! Small SVG renderings: a circle layout for arbitrary models and a
//! left-to-right chain for riddle models.

use std::fmt::Write as _;

use mendax::riddle::RiddleState;
use mendax::PointedModel;

const COLORS: [&str; 4] = ["#c0392b", "#2c6fbb", "#27864a", "#8e44ad"];
const R: f64 = 22.0;

fn color(a: usize) -> &'static str {
    COLORS[a % COLORS.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Draw `pm` with states at `pos`. Arrows of different agents between the
/// same two states are offset so that they stay apart.
fn render(pm: &PointedModel, pos: &[(f64, f64)], labels: &[String], width: f64, height: f64) -> String {
    let m = &pm.model;
    let agents = m.agents().len();
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:.0} {height:.0}" width="{width:.0}" height="{height:.0}" font-family="sans-serif" font-size="12">"#
    );
    out.push_str("<defs>");
    for a in 0..agents {
        let _ = write!(
            out,
            r#"<marker id="arrow{a}" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" fill="{}"/></marker>"#,
            color(a)
        );
    }
    out.push_str("</defs>");
    for a in 0..agents {
        let c = color(a);
        for s in 0..m.len() {
            for t in m.successors(a, s).iter() {
                let (x1, y1) = pos[s];
                if s == t {
                    let dy = R + 8.0 + 7.0 * a as f64;
                    let _ = write!(
                        out,
                        r#"<circle cx="{x1:.1}" cy="{:.1}" r="{:.1}" fill="none" stroke="{c}"/>"#,
                        y1 - dy,
                        8.0 + 3.0 * a as f64
                    );
                    continue;
                }
                let (x2, y2) = pos[t];
                let (dx, dy) = (x2 - x1, y2 - y1);
                let len = (dx * dx + dy * dy).sqrt().max(1.0);
                let (ux, uy) = (dx / len, dy / len);
                // Perpendicular offset per agent and direction.
                let off = 4.0 + 5.0 * a as f64;
                let (ox, oy) = (-uy * off, ux * off);
                let _ = write!(
                    out,
                    r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{c}" marker-end="url(#arrow{a})"/>"#,
                    x1 + ux * R + ox,
                    y1 + uy * R + oy,
                    x2 - ux * R + ox,
                    y2 - uy * R + oy
                );
            }
        }
    }
    for s in 0..m.len() {
        let (x, y) = pos[s];
        let stroke = if s == pm.point { 3.0 } else { 1.0 };
        let _ = write!(
            out,
            r#"<circle cx="{x:.1}" cy="{y:.1}" r="{R}" fill="white" stroke="black" stroke-width="{stroke}"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y + 4.0,
            escape(&labels[s])
        );
    }
    for (a, agent) in m.agents().iter().enumerate() {
        let _ = write!(
            out,
            r#"<text x="8" y="{}" fill="{}">{}</text>"#,
            16 + 14 * a,
            color(a),
            escape(agent.as_str())
        );
    }
    out.push_str("</svg>");
    out
}

/// States on a circle, labelled with their true atoms.
pub fn model(pm: &PointedModel) -> String {
    let m = &pm.model;
    let n = m.len().max(1) as f64;
    let radius = if m.len() <= 1 { 0.0 } else { 50.0 + 18.0 * n };
    let size = 2.0 * radius + 140.0;
    let c = size / 2.0;
    let pos: Vec<(f64, f64)> = (0..m.len())
        .map(|s| {
            let angle = std::f64::consts::TAU * s as f64 / n - std::f64::consts::FRAC_PI_2;
            (c + radius * angle.cos(), c + 20.0 + radius * angle.sin())
        })
        .collect();
    let labels: Vec<String> = (0..m.len())
        .map(|s| {
            let atoms: Vec<&str> =
                (0..m.atoms().len()).filter(|&p| m.valuation(p).contains(s)).map(|p| m.atoms()[p].as_str()).collect();
            if atoms.is_empty() {
                m.state_name(s)
            } else {
                atoms.join(",")
            }
        })
        .collect();
    render(pm, &pos, &labels, size, size + 20.0)
}

/// Riddle states ordered by `m + n`, one row per parity half and extra rows
/// for copies created by product updates.
pub fn riddle(state: &RiddleState) -> String {
    let pm = state.kripke();
    let m = &pm.model;
    let pairs: Vec<(u32, u32)> = (0..m.len()).map(|s| state.pair(s)).collect();
    let mut seen: Vec<(u32, u32)> = Vec::new();
    let pos: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(a, b)| {
            let copy = seen.iter().filter(|&&p| p == (a, b)).count();
            seen.push((a, b));
            let row = (a % 2) as f64 + 2.0 * copy as f64;
            (50.0 + 34.0 * (a + b) as f64, 70.0 + 90.0 * row)
        })
        .collect();
    let width = pos.iter().map(|p| p.0).fold(100.0, f64::max) + 50.0;
    let height = pos.iter().map(|p| p.1).fold(100.0, f64::max) + 50.0;
    let labels: Vec<String> = pairs.iter().map(|(a, b)| format!("{a},{b}")).collect();
    render(&pm, &pos, &labels, width, height)
}
