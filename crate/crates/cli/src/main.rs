// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! `grainflow`: runs a scene through the flow engine and writes frames, a
//! per-step report and optional diagnostics.
//!
//! Exit status: 0 on success, 1 when the input or parameters fail
//! validation (or a step check fails), 2 on runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use serde_json::json;

use grainflow::diagnostics::{area_modulus, brakke_residual, density_ratio_scan, huisken_functional, DensityOptions};
use grainflow::flow::{run, schedule_params, FlowConfig, Mode, ScheduleOptions};
use grainflow::io::{DirectorySink, FrameFormat};
use grainflow::scene::{parse_scene_seeded, OmegaKind};
use grainflow::weights::{make_test_function, TestKind, WeightFunction};
use grainflow::{Point, Trace};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Paper,
    Practical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OmegaArg {
    Const,
    Exp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DiagnosticArg {
    Density,
    Huisken,
    Modulus,
    Brakke,
}

#[derive(Debug, Parser)]
#[command(name = "grainflow", version, about = "Mean curvature flow of grain-boundary networks")]
struct Cli {
    /// Scene file.
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, value_enum, default_value = "practical")]
    mode: ModeArg,
    /// Deformation scale; defaults to 1.
    #[arg(long)]
    j: Option<u32>,
    /// Smoothing scale; practical mode defaults to 0.05, paper mode derives it from j.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Time step for practical mode; defaults to 1e-4.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Weight Ω; defaults to the scene header, then const.
    #[arg(long, value_enum)]
    omega: Option<OmegaArg>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Frame cadence in steps; 0 keeps the first and last frame only.
    #[arg(long, default_value_t = 100)]
    frame_every: usize,
    /// Comma-separated diagnostics computed after the run.
    #[arg(long, value_enum, value_delimiter = ',')]
    diagnostics: Vec<DiagnosticArg>,
    /// Seed for random scene generators, overriding the scene file.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated frame formats.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv")]
    format: Vec<FormatArg>,
}

enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&cli.scene)
        .with_context(|| format!("cannot read scene {}", cli.scene.display()))
        .map_err(Failure::Validation)?;
    let scene = parse_scene_seeded::<f64>(&text, cli.seed)
        .with_context(|| format!("scene {}", cli.scene.display()))
        .map_err(Failure::Validation)?;
    let omega_kind = match cli.omega {
        Some(OmegaArg::Const) => OmegaKind::Const,
        Some(OmegaArg::Exp) => OmegaKind::Exp,
        None => scene.omega.unwrap_or(OmegaKind::Const),
    };
    let omega: WeightFunction<f64> = omega_kind.weight();
    let mode = match cli.mode {
        ModeArg::Paper => Mode::Paper,
        ModeArg::Practical => Mode::Practical,
    };
    let j = cli.j.unwrap_or(1);
    let (epsilon, dt) = match mode {
        Mode::Paper => (cli.epsilon, None),
        Mode::Practical => (Some(cli.epsilon.unwrap_or(0.05)), Some(cli.dt.unwrap_or(1e-4))),
    };
    let opts = ScheduleOptions { dt, steps: cli.steps, c1: omega.c1(), ..ScheduleOptions::default() };
    let schedule = schedule_params(mode, 1, j, epsilon, &opts).map_err(|e| Failure::Validation(e.into()))?;

    let formats: Vec<FrameFormat> = cli
        .format
        .iter()
        .map(|f| match f {
            FormatArg::Csv => FrameFormat::Csv,
            FormatArg::Svg => FrameFormat::Svg,
        })
        .collect();
    let mut sink = DirectorySink::create(&cli.out, &formats)
        .with_context(|| format!("cannot create output directory {}", cli.out.display()))
        .map_err(Failure::Runtime)?;
    let cfg = FlowConfig {
        omega,
        keep_states: cli.diagnostics.contains(&DiagnosticArg::Brakke),
        frame_every: cli.frame_every,
        ..FlowConfig::default()
    };
    let trace = run(&scene.network, &schedule, &cfg, &mut sink).map_err(|f| Failure::Runtime(f.error.into()))?;
    if let Some(e) = sink.error.take() {
        return Err(Failure::Runtime(anyhow::Error::new(e).context("writing output")));
    }
    let last = trace.last_frame().expect("a run keeps its first frame");
    let violating = trace.reports.iter().filter(|r| !r.violations.is_empty()).count();
    println!(
        "steps {} t {} mass {} frames {}",
        trace.reports.len(),
        last.time,
        grainflow::flow::weighted_length(&last.network, &omega),
        sink.frames_written
    );
    match trace.extinction {
        Some(t) => println!("extinction at t = {t}"),
        None => println!("no extinction"),
    }
    if !cli.diagnostics.is_empty() {
        let value = diagnostics(&trace, &cli.diagnostics).map_err(Failure::Runtime)?;
        let path = cli.out.join("diagnostics.json");
        let body = serde_json::to_string_pretty(&value).map_err(|e| Failure::Runtime(e.into()))?;
        std::fs::write(&path, body + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Runtime)?;
    }
    if violating > 0 {
        return Err(Failure::Validation(anyhow::anyhow!("{violating} steps failed their checks; see report.jsonl")));
    }
    Ok(())
}

fn diagnostics(trace: &Trace, which: &[DiagnosticArg]) -> anyhow::Result<serde_json::Value> {
    let first = &trace.frames[0];
    let last = trace.last_frame().expect("a run keeps its first frame");
    let mut out = serde_json::Map::new();
    for d in which {
        match d {
            DiagnosticArg::Density => {
                let table = density_ratio_scan(&last.network, &[0.01, 0.02, 0.05], &DensityOptions::default());
                out.insert("density".into(), json!({
                    "radii": table.radii,
                    "min_ratio": table.min_ratio,
                    "below_floor": table.below_floor,
                    "non_monotone": table.non_monotone,
                }));
            }
            DiagnosticArg::Huisken => {
                let y: Point = first.network.vertices.first().copied().unwrap_or_default();
                let s = last.time + 0.01;
                let values: Vec<_> = trace
                    .frames
                    .iter()
                    .map(|f| huisken_functional(trace, y, s, 0.2, f.time).map(|v| json!([f.time, v])))
                    .collect::<Result<_, _>>()?;
                out.insert("huisken".into(), json!({ "y": [y.x, y.y], "s": s, "radius": 0.2, "values": values }));
            }
            DiagnosticArg::Modulus => {
                let mut per_label = Vec::new();
                for label in 1..=last.network.n_labels {
                    match area_modulus(trace, label, None, 0.0) {
                        Ok(m) => per_label.push(json!({ "label": label, "modulus": m.modulus })),
                        Err(e) => per_label.push(json!({ "label": label, "error": e.to_string() })),
                    }
                }
                out.insert("area_modulus".into(), json!(per_label));
            }
            DiagnosticArg::Brakke => {
                let omega = make_test_function(1, TestKind::Omega, Point::default(), WeightFunction::One)?;
                let phi = omega.as_scalar().expect("Ω is a scalar test function");
                let value = if last.step > first.step {
                    let r = brakke_residual(trace, phi, first.time, last.time)?;
                    json!({ "residual": r.residual, "slack": r.slack, "holds": r.holds(), "upper_holds": r.upper_holds() })
                } else {
                    json!(null)
                };
                out.insert("brakke".into(), value);
            }
        }
    }
    Ok(serde_json::Value::Object(out))
}
