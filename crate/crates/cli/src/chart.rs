//! Static SVG line charts of a trajectory.

use std::fmt::Write as _;

use mafia_dynamics::Trajectory;

const WIDTH: f64 = 760.0;
const PANEL_HEIGHT: f64 = 260.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const GAP: f64 = 60.0;

struct Series {
    label: &'static str,
    color: &'static str,
    values: Vec<(f64, f64)>,
}

/// Two stacked panels: population shares, then lawlessness and integrity.
pub fn trajectory_svg(title: &str, traj: &Trajectory) -> String {
    let shares = |f: fn(&mafia_dynamics::Sample) -> f64| -> Vec<(f64, f64)> {
        traj.samples.iter().map(|s| (s.t, f(s))).collect()
    };
    let populations = [
        Series {
            label: "Peasants",
            color: "#2b7a0b",
            values: shares(|s| s.state.peasants / s.params.population),
        },
        Series {
            label: "Bandits",
            color: "#b22222",
            values: shares(|s| s.state.bandits / s.params.population),
        },
        Series {
            label: "Mafia",
            color: "#1f3f8f",
            values: shares(|s| s.state.mafia / s.params.population),
        },
    ];
    let indices = [
        Series {
            label: "Lawlessness",
            color: "#b22222",
            values: shares(|s| s.aux.lawlessness),
        },
        Series {
            label: "Integrity",
            color: "#2b7a0b",
            values: shares(|s| s.aux.integrity),
        },
    ];
    let t_end = traj.last().t.max(1e-9);
    let height = TOP + 2.0 * PANEL_HEIGHT + GAP + 40.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{LEFT}\" y=\"18\" font-size=\"14\">{}</text>",
        escape(title)
    );
    panel(&mut svg, TOP, "Population share", &populations, t_end);
    panel(
        &mut svg,
        TOP + PANEL_HEIGHT + GAP,
        "Indices",
        &indices,
        t_end,
    );
    svg.push_str("</svg>\n");
    svg
}

fn panel(svg: &mut String, top: f64, label: &str, series: &[Series], t_end: f64) {
    let plot_w = WIDTH - LEFT - RIGHT;
    let x = |t: f64| LEFT + plot_w * t / t_end;
    let y = |v: f64| top + PANEL_HEIGHT * (1.0 - v.clamp(0.0, 1.0));

    let _ = writeln!(
        svg,
        "<rect x=\"{LEFT}\" y=\"{top}\" width=\"{plot_w}\" height=\"{PANEL_HEIGHT}\" fill=\"none\" stroke=\"#444\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"12\" y=\"{:.1}\" transform=\"rotate(-90 12 {:.1})\" text-anchor=\"middle\">{label}</text>",
        top + PANEL_HEIGHT / 2.0,
        top + PANEL_HEIGHT / 2.0
    );
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{LEFT}\" y1=\"{0:.1}\" x2=\"{1:.1}\" y2=\"{0:.1}\" stroke=\"#ddd\"/><text x=\"{2:.1}\" y=\"{3:.1}\" text-anchor=\"end\">{v:.2}</text>",
            y(v),
            LEFT + plot_w,
            LEFT - 6.0,
            y(v) + 4.0
        );
    }
    let tick = if t_end > 100.0 { 50.0 } else { 10.0 };
    let mut t = 0.0;
    while t <= t_end + 1e-9 {
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{t}</text>",
            x(t),
            top + PANEL_HEIGHT + 16.0
        );
        t += tick;
    }
    for (i, s) in series.iter().enumerate() {
        let points: Vec<String> = s
            .values
            .iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", x(t), y(v)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
            s.color,
            points.join(" ")
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{:.1}\" y2=\"{ly}\" stroke=\"{}\" stroke-width=\"2\"/><text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            lx + 20.0,
            s.color,
            lx + 26.0,
            ly + 4.0,
            s.label
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use mafia_dynamics::{IntegrationConfig, StockState};

    #[test]
    fn chart_has_five_series() {
        let traj = mafia_dynamics::Experiment::Base
            .scenario()
            .run_from(
                &StockState::from_criminals(0.0, 110.0, 3.0, 0.0, 9.98, 0.28),
                &IntegrationConfig::default(),
            )
            .unwrap();
        let svg = trajectory_svg("base <run>", &traj);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert!(svg.contains("base &lt;run&gt;"));
    }
}
