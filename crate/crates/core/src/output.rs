//! Files written for a run or suite: one trajectory CSV per run, a JSON
//! summary, and an optional SVG scatter of the objective space.
//!
//! Trajectory header: `t,f_1,...,f_M,norm_d,g_plus_l1,h_l1,kkt`. Floats use
//! the shortest representation that parses back to the same value.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::SuiteReport;
use crate::config::{ConfigFile, ExperimentSpec, ProblemSpec};
use crate::error::{Error, Result};
use crate::metrics::{pf_distance_synthetic, synthetic_front_point};
use crate::solvers::RunReport;

pub const SUMMARY_FILE: &str = "summary.json";
pub const PLOT_FILE: &str = "plot.svg";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn trajectory_csv(report: &RunReport) -> String {
    let m = report.objectives_final.len();
    let mut out = String::from("t");
    for i in 1..=m {
        let _ = write!(out, ",f_{i}");
    }
    out.push_str(",norm_d,g_plus_l1,h_l1,kkt\n");
    for r in &report.trajectory {
        let _ = write!(out, "{}", r.t);
        for f in &r.objectives {
            let _ = write!(out, ",{f}");
        }
        let _ = writeln!(out, ",{},{},{},{}", r.norm_d, r.g_plus_l1, r.h_l1, r.kkt);
    }
    out
}

/// File name of run `index`: `trajectory.csv` for a single run,
/// `trajectory_000.csv`, ... in a suite.
pub fn trajectory_file_name(index: usize, single: bool) -> String {
    if single {
        "trajectory.csv".to_string()
    } else {
        format!("trajectory_{index:03}.csv")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub objectives: Vec<f64>,
    pub norm_d: f64,
    pub g_plus_l1: f64,
    pub h_l1: f64,
    pub kkt: f64,
    pub iterations: usize,
    pub stopped_early: bool,
    /// Distance to the analytic front (synthetic problem only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_distance: Option<f64>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub index: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<FinalMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ConfigFile,
    pub runs: Vec<RunSummary>,
    pub hypervolume: Option<f64>,
    pub reference_point: Option<Vec<f64>>,
    pub alignments: Vec<Option<f64>>,
    pub mean_kkt: Option<f64>,
}

impl Summary {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("summary: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is always serializable")
    }
}

pub fn build_summary(spec: &ExperimentSpec, suite: &SuiteReport) -> Summary {
    let single = suite.runs.len() == 1;
    let synthetic = matches!(spec.problem, ProblemSpec::SyntheticConcave { .. });
    let runs = suite
        .runs
        .iter()
        .map(|run| {
            let metrics = run.report.as_ref().map(|r| FinalMetrics {
                objectives: r.objectives_final.clone(),
                norm_d: r.norm_d,
                g_plus_l1: r.g_plus_l1,
                h_l1: r.h_l1,
                kkt: r.kkt,
                iterations: r.iterations,
                stopped_early: r.stopped_early,
                front_distance: synthetic
                    .then(|| pf_distance_synthetic(&r.final_objectives()).ok())
                    .flatten(),
                wall_time_secs: r.wall_time_secs,
            });
            RunSummary {
                index: run.index,
                seed: run.seed,
                ray: spec.constraint_sets.get(run.index).and_then(|s| s.ray.clone()),
                trajectory_file: run.report.as_ref().map(|_| trajectory_file_name(run.index, single)),
                metrics,
                error: run.error.clone(),
            }
        })
        .collect();
    Summary {
        config: spec.to_config_file(),
        runs,
        hypervolume: suite.hypervolume,
        reference_point: suite.reference_point.clone(),
        alignments: suite.alignments.clone(),
        mean_kkt: suite.mean_kkt,
    }
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub trajectories: Vec<PathBuf>,
    pub summary: PathBuf,
    pub plot: Option<PathBuf>,
}

/// Writes trajectories, the summary, and (if `plot`) the SVG into `dir`,
/// creating it if needed. Failed runs get no trajectory file.
pub fn emit_outputs(dir: &Path, spec: &ExperimentSpec, suite: &SuiteReport, plot: bool) -> Result<WrittenFiles> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let single = suite.runs.len() == 1;
    let mut trajectories = Vec::new();
    for run in &suite.runs {
        if let Some(report) = &run.report {
            let path = dir.join(trajectory_file_name(run.index, single));
            fs::write(&path, trajectory_csv(report)).map_err(io_err(&path))?;
            trajectories.push(path);
        }
    }
    let summary = dir.join(SUMMARY_FILE);
    fs::write(&summary, build_summary(spec, suite).to_json()).map_err(io_err(&summary))?;
    let plot = if plot {
        let path = dir.join(PLOT_FILE);
        fs::write(&path, objective_plot_svg(spec, suite)).map_err(io_err(&path))?;
        Some(path)
    } else {
        None
    };
    Ok(WrittenFiles {
        trajectories,
        summary,
        plot,
    })
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Scatter of the first two objectives: trajectories, final points,
/// preference rays, and the analytic front for the synthetic problem.
pub fn objective_plot_svg(spec: &ExperimentSpec, suite: &SuiteReport) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 50.0;
    let reports: Vec<(usize, &RunReport)> = suite
        .runs
        .iter()
        .filter_map(|r| r.report.as_ref().map(|rep| (r.index, rep)))
        .collect();
    let synthetic = matches!(spec.problem, ProblemSpec::SyntheticConcave { .. });

    let mut hi = if synthetic { 1.0f64 } else { 0.0 };
    let mut lo = 0.0f64;
    for (_, rep) in &reports {
        for rec in &rep.trajectory {
            for &f in rec.objectives.iter().take(2) {
                if f.is_finite() {
                    hi = hi.max(f);
                    lo = lo.min(f);
                }
            }
        }
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let span = (hi - lo) * 1.05;
    let sx = |x: f64| PAD + (x - lo) / span * (SIZE - 2.0 * PAD);
    let sy = |y: f64| SIZE - PAD - (y - lo) / span * (SIZE - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0, x1, y1) = (sx(lo), sy(lo), sx(lo + span), sy(lo + span));
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let v = lo + span * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"#,
            sx(v),
            y0 + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            x0 - 6.0,
            sy(v) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">f_1</text>"#,
        (x0 + x1) / 2.0,
        SIZE - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">f_2</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    if synthetic {
        let mut d = String::new();
        for k in 0..=200 {
            let p = synthetic_front_point(-1.0 + 2.0 * k as f64 / 200.0);
            let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, sx(p[0]), sy(p[1]));
        }
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="gray" stroke-width="1.5" stroke-dasharray="4 3"/>"#,
            d.trim_end()
        );
    }

    for (i, set) in spec.constraint_sets.iter().enumerate() {
        if let Some(ray) = set.ray.as_ref().filter(|r| r.len() >= 2) {
            let scale = (lo + span) / ray[0].abs().max(ray[1].abs()).max(f64::MIN_POSITIVE);
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-opacity="0.5"/>"#,
                sx(0.0),
                sy(0.0),
                sx(ray[0] * scale),
                sy(ray[1] * scale),
                PALETTE[i % PALETTE.len()]
            );
        }
    }

    for (index, rep) in &reports {
        if rep.objectives_final.len() < 2 {
            continue;
        }
        let color = PALETTE[index % PALETTE.len()];
        let mut d = String::new();
        for (k, rec) in rep.trajectory.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2} ",
                if k == 0 { "M" } else { "L" },
                sx(rec.objectives[0]),
                sy(rec.objectives[1])
            );
        }
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1" stroke-opacity="0.6"/>"#,
            d.trim_end()
        );
        let f = &rep.objectives_final;
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
            sx(f[0]),
            sy(f[1])
        );
    }
    svg.push_str("</svg>\n");
    svg
}
