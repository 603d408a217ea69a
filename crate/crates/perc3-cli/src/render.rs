//! Rendering of event checks, walk traces and coverage scans into the
//! uniform report container, plus output emission.

use std::path::Path;

use perc3::events::{EventQuery, EventReport, Mode};
use perc3::geometry::CoverageReport;
use perc3::montecarlo::ExperimentReport;
use perc3::walks::{Leg, LegLabel, WalkOutcome, WalkTrace};

use crate::cfg::CliError;

/// Sentinel for "not applicable" numeric cells (absent violation, no query).
pub const NONE_CELL: f64 = -1.0;

pub fn label_code(label: LegLabel) -> f64 {
    match label {
        LegLabel::Doubling => 0.0,
        LegLabel::Chain => 1.0,
        LegLabel::Triangle => 2.0,
        LegLabel::Fallback => 3.0,
    }
}

fn query_cells(query: Option<&EventQuery>) -> [f64; 4] {
    match query {
        None => [NONE_CELL; 4],
        Some(EventQuery::Square { m, face, quadrant, .. }) => {
            [0.0, *m as f64, *face as f64, *quadrant as f64]
        }
        Some(EventQuery::Ball { r_squared, triangle, .. }) => {
            [1.0, *r_squared as f64, triangle.index() as f64, 0.0]
        }
    }
}

fn leg_row(index: usize, leg: &Leg) -> Vec<f64> {
    let q = query_cells(leg.query.as_ref());
    vec![
        index as f64,
        label_code(leg.label),
        leg.cost as f64,
        leg.from.x as f64,
        leg.from.y as f64,
        leg.from.z as f64,
        leg.to.x as f64,
        leg.to.y as f64,
        leg.to.z as f64,
        q[0],
        q[1],
        q[2],
        q[3],
        leg.ball_in_box.map_or(NONE_CELL, |b| b as u8 as f64),
    ]
}

pub fn outcome_text(outcome: WalkOutcome) -> String {
    match outcome {
        WalkOutcome::Reached => "reached".to_string(),
        WalkOutcome::BudgetExceeded { leg_index } => format!("budget_exceeded:{leg_index}"),
        WalkOutcome::StepLimit => "step_limit".to_string(),
    }
}

/// One row per leg; label codes 0=doubling, 1=chain, 2=triangle, 3=fallback.
pub fn walk_report(experiment: &str, trace: &WalkTrace) -> ExperimentReport {
    let mut report = ExperimentReport::new(experiment, "exact");
    report.columns = vec![
        "leg".into(),
        "label".into(),
        "cost".into(),
        "from_x".into(),
        "from_y".into(),
        "from_z".into(),
        "to_x".into(),
        "to_y".into(),
        "to_z".into(),
        "q_kind".into(),
        "q_m_or_r2".into(),
        "q_face_or_tri".into(),
        "q_quadrant".into(),
        "ball_in_box".into(),
    ];
    for (i, leg) in trace.legs.iter().enumerate() {
        report.push_row(leg_row(i, leg));
    }
    report.set_param("outcome", outcome_text(trace.outcome));
    report.set_param("total_cost", trace.total_cost);
    report.set_param("steps", trace.steps());
    report
}

pub fn mode_text(mode: &Mode) -> &'static str {
    match mode {
        Mode::Exhaustive => "exhaustive",
        Mode::Sampled { .. } => "sampled",
        Mode::OnDemand(_) => "on_demand",
    }
}

/// Single-row summary of an event check; violation cells use the -1
/// sentinel when the event holds.
pub fn event_report(experiment: &str, result: &EventReport) -> ExperimentReport {
    let confidence = match result.mode {
        Mode::Sampled { .. } => "wilson-one-sided-95",
        _ => "exact",
    };
    let mut report = ExperimentReport::new(experiment, confidence);
    report.columns = vec![
        "holds".into(),
        "checks".into(),
        "measured".into(),
        "center_x".into(),
        "center_y".into(),
        "center_z".into(),
        "q_kind".into(),
        "q_m_or_r2".into(),
        "q_face_or_tri".into(),
        "q_quadrant".into(),
        "violation_upper95".into(),
    ];
    let mut row = vec![result.holds as u8 as f64, result.checks_performed as f64];
    match &result.violation {
        None => row.extend([NONE_CELL; 8]),
        Some(v) => {
            let c = v.query.center();
            row.push(v.measured as f64);
            row.extend([c.x as f64, c.y as f64, c.z as f64]);
            row.extend(query_cells(Some(&v.query)));
        }
    }
    row.push(result.violation_upper_bound.unwrap_or(NONE_CELL));
    report.push_row(row);
    report.set_param("k", result.k);
    report.set_param("mode", mode_text(&result.mode));
    report
}

/// One row per checked squared radius.
pub fn coverage_report(results: &[CoverageReport], t: f64, rmax_squared: i64) -> ExperimentReport {
    let mut report = ExperimentReport::new("coverage", "exact");
    report.set_param("t", t);
    report.set_param("rmax_squared", rmax_squared);
    let all_hold = results.iter().all(|r| r.holds);
    report.set_param("holds", all_hold);
    report.set_param("radii_checked", results.len());
    report.columns = vec![
        "r_squared".into(),
        "holds".into(),
        "boundary_sites".into(),
        "max_distance".into(),
        "worst_x".into(),
        "worst_y".into(),
        "worst_z".into(),
    ];
    for r in results {
        report.push_row(vec![
            r.r_squared as f64,
            r.holds as u8 as f64,
            r.boundary_sites as f64,
            r.max_distance,
            r.worst_site.x as f64,
            r.worst_site.y as f64,
            r.worst_site.z as f64,
        ]);
    }
    report
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes the rendered report to the file or standard output.
pub fn emit(report: &ExperimentReport, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => {
            let mut t = report.to_json();
            t.push('\n');
            t
        }
    };
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}
