//! Parameter studies: critical-velocity tables, same-direction vs pincer
//! comparisons, CSV output and SVG line plots.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::model::{lower_bound_velocity, validate_scenario, ScenarioParams, Strategy};
use crate::plan::TrajectoryPlan;
use crate::spiral_same::RadiusMode;
use crate::{circular_pincer, circular_same, spiral_pincer, spiral_same};

/// Decimal with 9 significant digits; scientific only from 1e6 upward.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if a >= 1e6 {
        return format!("{x:.8e}");
    }
    let decimals = (8 - a.log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn critical_velocity(strategy: Strategy, params: &ScenarioParams) -> Result<f64> {
    validate_scenario(*params)?;
    match strategy {
        Strategy::CircularPincer => Ok(circular_pincer::critical_velocity(params)),
        Strategy::SpiralPincer => spiral_pincer::critical_velocity(params),
        Strategy::CircularSame => Ok(circular_same::critical_velocity(params).linearized),
        Strategy::SpiralSame => spiral_same::critical_velocity(params),
    }
}

pub fn total_time(
    strategy: Strategy,
    params: &ScenarioParams,
    v_s: f64,
    mode: RadiusMode,
) -> Result<f64> {
    match strategy {
        Strategy::CircularPincer => Ok(circular_pincer::time_breakdown(params, v_s)?.total_time),
        Strategy::SpiralPincer => Ok(spiral_pincer::time_breakdown(params, v_s)?.total_time),
        Strategy::CircularSame => circular_same::total_time(params, v_s),
        Strategy::SpiralSame => Ok(spiral_same::total_time(params, v_s, mode)?.total_time),
    }
}

pub fn trajectory_plan(
    strategy: Strategy,
    params: &ScenarioParams,
    v_s: f64,
    mode: RadiusMode,
) -> Result<TrajectoryPlan> {
    match strategy {
        Strategy::CircularPincer => circular_pincer::trajectory_plan(params, v_s),
        Strategy::SpiralPincer => spiral_pincer::trajectory_plan(params, v_s),
        Strategy::CircularSame => circular_same::trajectory_plan(params, v_s),
        Strategy::SpiralSame => spiral_same::trajectory_plan(params, v_s, mode),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalVelocityRow {
    pub swarm_size: u32,
    pub lower_bound: f64,
    pub circular_pincer: Option<f64>,
    pub spiral_pincer: Option<f64>,
    pub circular_same: Option<f64>,
    pub spiral_same: Option<f64>,
}

impl CriticalVelocityRow {
    /// Lower bound below spiral pincer below circular pincer.
    pub fn ordered(&self) -> bool {
        match (self.spiral_pincer, self.circular_pincer) {
            (Some(sp), Some(cp)) => self.lower_bound < sp && sp < cp,
            _ => false,
        }
    }
}

pub fn study_critical_velocities(
    template: &ScenarioParams,
    sizes: &[u32],
) -> Vec<CriticalVelocityRow> {
    sizes
        .iter()
        .map(|&n| {
            let p = template.with_swarm_size(n);
            let get = |s| critical_velocity(s, &p).ok();
            CriticalVelocityRow {
                swarm_size: n,
                lower_bound: lower_bound_velocity(&p),
                circular_pincer: get(Strategy::CircularPincer),
                spiral_pincer: get(Strategy::SpiralPincer),
                circular_same: get(Strategy::CircularSame),
                spiral_same: get(Strategy::SpiralSame),
            }
        })
        .collect()
}

pub fn write_critical_velocity_csv<W: Write>(
    rows: &[CriticalVelocityRow],
    out: W,
) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["n", "V_LB", "Vc_cp", "Vc_sp", "Vc_cs", "Vc_ss"])?;
    for r in rows {
        w.write_record([
            r.swarm_size.to_string(),
            format_number(r.lower_bound),
            format_opt(r.circular_pincer),
            format_opt(r.spiral_pincer),
            format_opt(r.circular_same),
            format_opt(r.spiral_same),
        ])?;
    }
    w.flush()
}

/// Strategy pair compared in a study: same-direction against pincer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Circular,
    Spiral,
}

impl Family {
    pub fn pair(self) -> (Strategy, Strategy) {
        match self {
            Family::Circular => (Strategy::CircularSame, Strategy::CircularPincer),
            Family::Spiral => (Strategy::SpiralSame, Strategy::SpiralPincer),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "circular" => Ok(Family::Circular),
            "spiral" => Ok(Family::Spiral),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// Speed baseline shared by both strategies: the two-agent same-direction
/// critical velocity of the family.
pub fn family_baseline(family: Family, template: &ScenarioParams) -> Result<f64> {
    critical_velocity(family.pair().0, &template.with_swarm_size(2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRecord {
    pub swarm_size: u32,
    pub speed_margin: f64,
    pub strategy_a: Strategy,
    pub strategy_b: Strategy,
    /// Common speed before the margin is added.
    pub baseline: f64,
    pub critical_a: Option<f64>,
    pub critical_b: Option<f64>,
    pub time_a: Option<f64>,
    pub time_b: Option<f64>,
    pub ratio: Option<f64>,
    pub feasible: bool,
}

/// One record per (swarm size, margin). Both strategies run at
/// `baseline + margin`; failures are kept as infeasible rows.
pub fn study_compare(
    template: &ScenarioParams,
    sizes: &[u32],
    margins: &[f64],
    pair: (Strategy, Strategy),
    baseline: f64,
    mode: RadiusMode,
) -> Vec<ComparisonRecord> {
    let mut out = Vec::with_capacity(sizes.len() * margins.len());
    for &n in sizes {
        let p = template.with_swarm_size(n);
        let critical_a = critical_velocity(pair.0, &p).ok();
        let critical_b = critical_velocity(pair.1, &p).ok();
        for &dv in margins {
            let v_s = baseline + dv;
            let time_a = total_time(pair.0, &p, v_s, mode).ok();
            let time_b = if pair.1 == pair.0 {
                time_a
            } else {
                total_time(pair.1, &p, v_s, mode).ok()
            };
            let ratio = time_a.zip(time_b).map(|(a, b)| a / b);
            out.push(ComparisonRecord {
                swarm_size: n,
                speed_margin: dv,
                strategy_a: pair.0,
                strategy_b: pair.1,
                baseline,
                critical_a,
                critical_b,
                time_a,
                time_b,
                ratio,
                feasible: ratio.is_some(),
            });
        }
    }
    out
}

pub fn study_family(
    family: Family,
    template: &ScenarioParams,
    sizes: &[u32],
    margins: &[f64],
    mode: RadiusMode,
) -> Result<Vec<ComparisonRecord>> {
    let baseline = family_baseline(family, template)?;
    Ok(study_compare(
        template,
        sizes,
        margins,
        family.pair(),
        baseline,
        mode,
    ))
}

pub fn write_comparison_csv<W: Write>(records: &[ComparisonRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "n",
        "dV",
        "strategy_a",
        "strategy_b",
        "V_ca",
        "V_cb",
        "T_a",
        "T_b",
        "ratio",
        "feasible",
    ])?;
    for r in records {
        w.write_record([
            r.swarm_size.to_string(),
            format_number(r.speed_margin),
            r.strategy_a.to_string(),
            r.strategy_b.to_string(),
            format_opt(r.critical_a),
            format_opt(r.critical_b),
            format_opt(r.time_a),
            format_opt(r.time_b),
            format_opt(r.ratio),
            r.feasible.to_string(),
        ])?;
    }
    w.flush()
}

pub fn write_plan_csv<W: Write>(plan: &TrajectoryPlan, out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["phase", "kind", "start", "end", "duration"])?;
    for (i, (phase, (start, end))) in plan.phases.iter().zip(plan.phase_spans()).enumerate() {
        w.write_record([
            i.to_string(),
            phase.kind.to_string(),
            format_number(start),
            format_number(end),
            format_number(phase.duration),
        ])?;
    }
    w.flush()
}

/// Even sizes from 2 to `max` inclusive.
pub fn even_sizes(max: u32) -> Vec<u32> {
    (1..=max / 2).map(|k| 2 * k).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Self-contained SVG line plot. Each polyline carries its data in
/// `data-x`/`data-y` attributes using the CSV number format.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h, left, right, top, bottom) = (720.0, 480.0, 70.0, 170.0, 40.0, 50.0);
    let pts = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        left + plot_w / 2.0,
        escape_xml(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * f64::from(k) / 4.0;
        let fy = y0 + (y1 - y0) * f64::from(k) / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            sx(fx),
            top + plot_h + 16.0,
            format_number((fx * 1e3).round() / 1e3)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            left - 6.0,
            sy(fy) + 4.0,
            format_number((fy * 1e3).round() / 1e3)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        left + plot_w / 2.0,
        h - 10.0,
        escape_xml(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        escape_xml(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let finite: Vec<_> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .collect();
        let coords: Vec<String> = finite
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        let xs: Vec<String> = finite.iter().map(|p| format_number(p.0)).collect();
        let ys: Vec<String> = finite.iter().map(|p| format_number(p.1)).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}" data-series="{}" data-x="{}" data-y="{}"/>"#,
            coords.join(" "),
            escape_xml(&s.name),
            xs.join(" "),
            ys.join(" ")
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            w - right + 10.0,
            w - right + 30.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            w - right + 36.0,
            ly + 4.0,
            escape_xml(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Ratio against swarm size, one series per margin.
pub fn comparison_series(records: &[ComparisonRecord]) -> Vec<Series> {
    let mut margins: Vec<f64> = Vec::new();
    for r in records {
        if !margins.contains(&r.speed_margin) {
            margins.push(r.speed_margin);
        }
    }
    margins
        .iter()
        .map(|&dv| Series {
            name: format!("dV = {}", format_number(dv)),
            points: records
                .iter()
                .filter(|r| r.speed_margin == dv)
                .filter_map(|r| r.ratio.map(|q| (f64::from(r.swarm_size), q)))
                .collect(),
        })
        .collect()
}

/// Critical velocity against swarm size, one series per column.
pub fn critical_velocity_series(rows: &[CriticalVelocityRow]) -> Vec<Series> {
    let column = |name: &str, f: &dyn Fn(&CriticalVelocityRow) -> Option<f64>| Series {
        name: name.to_string(),
        points: rows
            .iter()
            .filter_map(|r| f(r).map(|v| (f64::from(r.swarm_size), v)))
            .collect(),
    };
    vec![
        column("V_LB", &|r| Some(r.lower_bound)),
        column("circular-pincer", &|r| r.circular_pincer),
        column("spiral-pincer", &|r| r.spiral_pincer),
        column("circular-same", &|r| r.circular_same),
        column("spiral-same", &|r| r.spiral_same),
    ]
}
