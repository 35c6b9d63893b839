//! Text renderings of trajectories and reports.
//!
//! All numbers go through [`fmt_sig`] so repeated runs produce identical bytes.

use std::fmt::Write as _;

use mafia_dynamics::equilibrium::FixedPointResult;
use mafia_dynamics::loops::{
    enumerate_loops, find_named_loops, SignedDigraph, PUBLISHED_MAFIA_LOOP_COUNT,
};
use mafia_dynamics::scenario::OutcomeDetail;
use mafia_dynamics::{OutcomeSigns, Sample, Scenario, Trajectory};

pub const SIGNIFICANT_DIGITS: usize = 9;

pub const CSV_HEADER: &str = "t,P,B,M,Y,F,pi,R_B,T_B,I_B,i_B,T_P,I_P,i_P,ihat_P,ihat_B,attractiveness,B_star,W,L,l,p_M,D_M,m_B,lambda_M,lawlessness,integrity";

/// `%.9g`-style rendering: nine significant digits, trailing zeros removed,
/// scientific notation outside `[1e-5, 1e9)`.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_digits(x, SIGNIFICANT_DIGITS)
}

pub fn fmt_sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -5 || exponent >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Values of one sample in [`CSV_HEADER`] order.
pub fn sample_row(s: &Sample) -> Vec<(&'static str, f64)> {
    let a = &s.aux;
    vec![
        ("t", s.t),
        ("P", s.state.peasants),
        ("B", s.state.bandits),
        ("M", s.state.mafia),
        ("Y", a.output),
        ("F", a.avoidance),
        ("pi", a.theft_success),
        ("R_B", a.appropriations),
        ("T_B", a.tribute),
        ("I_B", a.bandit_income),
        ("i_B", a.income_per_bandit),
        ("T_P", a.protection_payment),
        ("I_P", a.peasant_income),
        ("i_P", a.income_per_peasant),
        ("ihat_P", s.state.perceived_peasant_income),
        ("ihat_B", s.state.perceived_bandit_income),
        ("attractiveness", a.attractiveness),
        ("B_star", a.potential_bandits),
        ("W", a.willingness_to_pay),
        ("L", a.protection_budget),
        ("l", a.protection_spending),
        ("p_M", a.protection_price),
        ("D_M", a.protection_demand),
        ("m_B", a.required_mafia),
        ("lambda_M", a.mafia_control),
        ("lawlessness", a.lawlessness),
        ("integrity", a.integrity),
    ]
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.samples.len() * 300);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let cells: Vec<String> = sample_row(s).iter().map(|(_, v)| fmt_sig(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn trajectory_json(name: &str, traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.samples.len() * 500);
    let _ = write!(
        out,
        "{{\"scenario\":{},\"dt\":{},\"method\":\"{}\",\"samples\":[",
        serde_json::to_string(name).expect("string serializes"),
        fmt_sig(traj.config.dt),
        traj.config.method
    );
    for (i, s) in traj.samples.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('{');
        for (j, (key, v)) in sample_row(s).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "\"{key}\":{}", fmt_sig(*v));
        }
        out.push('}');
    }
    out.push_str("]}\n");
    out
}

pub fn equilibrium_report(scenario: &Scenario, fp: &FixedPointResult) -> String {
    let mut out = String::new();
    let s = &fp.state;
    let _ = writeln!(out, "scenario: {}", scenario.name);
    let _ = writeln!(out, "converged: {}", fp.converged);
    let _ = writeln!(out, "relaxation_months: {}", fmt_sig(fp.months));
    let _ = writeln!(out, "state:");
    for (name, v) in [
        ("P", s.peasants),
        ("B", s.bandits),
        ("M", s.mafia),
        ("ihat_P", s.perceived_peasant_income),
        ("ihat_B", s.perceived_bandit_income),
    ] {
        let _ = writeln!(out, "  {name:<8} {}", fmt_sig(v));
    }
    let _ = writeln!(out, "residuals:");
    for (name, v) in fp.residuals.named() {
        let _ = writeln!(out, "  {name:<12} {}", fmt_sig_digits(v, 3));
    }
    let _ = writeln!(out, "tolerance: {}", fmt_sig(fp.residuals.tolerance));
    let _ = writeln!(
        out,
        "verdict: {}",
        if fp.residuals.passed { "pass" } else { "fail" }
    );
    out
}

pub fn signs_report(
    name: &str,
    pre: (f64, f64),
    post: (f64, f64),
    threshold: f64,
    detail: &OutcomeDetail,
    published: Option<OutcomeSigns>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "experiment: {name}");
    let _ = writeln!(out, "pre_window: [{}, {}]", fmt_sig(pre.0), fmt_sig(pre.1));
    let _ = writeln!(
        out,
        "post_window: [{}, {}]",
        fmt_sig(post.0),
        fmt_sig(post.1)
    );
    let _ = writeln!(out, "threshold: {}", fmt_sig(threshold));
    let _ = writeln!(out, "quantity,pre_mean,post_mean,sign,published");
    let computed = detail.signs.row();
    let expected = published.map(|p| p.row());
    for (i, label) in OutcomeSigns::LABELS.iter().enumerate() {
        let published = expected.map_or("".to_string(), |row| row[i].to_string());
        let _ = writeln!(
            out,
            "{label},{},{},{},{published}",
            fmt_sig(detail.pre_means[i]),
            fmt_sig(detail.post_means[i]),
            computed[i]
        );
    }
    if let Some(p) = published {
        let _ = writeln!(
            out,
            "match: {}",
            if p == detail.signs { "yes" } else { "no" }
        );
    }
    out
}

pub fn loops_report(g: &SignedDigraph) -> String {
    let mut out = String::new();
    let named = find_named_loops(g);
    let all = enumerate_loops(g, None);
    let through = enumerate_loops(g, Some("Mafia"));
    let _ = writeln!(out, "nodes: {}", g.node_count());
    let _ = writeln!(out, "edges: {}", g.edges().len());
    let _ = writeln!(out, "feedback loops: {}", all.len());
    let _ = writeln!(
        out,
        "loops through Mafia: {} (published diagram: {PUBLISHED_MAFIA_LOOP_COUNT})",
        through.len()
    );
    let reinforcing = all
        .iter()
        .filter(|l| l.polarity == mafia_dynamics::loops::Polarity::Positive)
        .count();
    let _ = writeln!(
        out,
        "reinforcing: {reinforcing}, balancing: {}",
        all.len() - reinforcing
    );
    let _ = writeln!(out, "\nnamed loops:");
    for check in &named.checks {
        let _ = writeln!(out, "  {check}");
    }
    let _ = writeln!(out, "\nall loops:");
    for lp in &all {
        let _ = writeln!(out, "  {lp}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1070.0), "1070");
        assert_eq!(fmt_sig(300.0), "300");
        assert_eq!(fmt_sig(107.0 / 116.0), "0.922413793");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(1.0 / 3.0 * 1e-7), "3.33333333e-08");
        assert_eq!(fmt_sig(123456789012.0), "1.23456789e+11");
        assert_eq!(fmt_sig(0.000123456789123), "0.000123456789");
        assert_eq!(fmt_sig(9.9999999999), "10");
        assert_eq!(fmt_sig(999999999.7), "1e+09");
        assert_eq!(fmt_sig_digits(1.23456e-9, 3), "1.23e-09");
    }

    #[test]
    fn rendered_values_round_trip_to_nine_digits() {
        for x in [1.0 / 7.0, 81.44269520008777, 3.990332680358664e-13, 110.0] {
            let back: f64 = fmt_sig(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-8, "{x}");
        }
    }

    #[test]
    fn header_matches_row_keys() {
        let keys: Vec<&str> = CSV_HEADER.split(',').collect();
        let traj = mafia_dynamics::Experiment::Base
            .scenario()
            .run_from(
                &mafia_dynamics::StockState::from_criminals(0.0, 110.0, 3.0, 0.0, 9.98, 0.28),
                &mafia_dynamics::IntegrationConfig::default(),
            )
            .unwrap();
        let row: Vec<&str> = sample_row(&traj.samples[0])
            .iter()
            .map(|(k, _)| *k)
            .collect();
        assert_eq!(keys, row);
        let csv = trajectory_csv(&traj);
        assert_eq!(csv.lines().count(), traj.samples.len() + 1);
        let json: serde_json::Value =
            serde_json::from_str(&trajectory_json("base", &traj)).unwrap();
        assert_eq!(
            json["samples"].as_array().unwrap().len(),
            traj.samples.len()
        );
        assert_eq!(json["samples"][0]["P"].as_f64().unwrap(), 107.0);
    }
}
