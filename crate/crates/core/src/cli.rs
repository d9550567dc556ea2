//! Command-line front end: `gate`, `robustness`, `scan`, `lindblad`,
//! `figure`.
//!
//! Exit status is 0 when every computation converged and every check
//! passed, 1 when a computation failed, and 2 for usage or configuration
//! errors.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::{channel_parameter, resolve_out_dir, RunConfig};
use crate::error::{Error, Result};
use crate::figures::{reproduce_figure, FigureOptions};
use crate::linalg::phase_invariant_distance;
use crate::metrics::{suppression_order, FidelityCurve, SuppressionFit, SIX_STATE_LABELS};
use crate::propagate::default_step;
use crate::pulse::{phase_decomposition, solid_angle, t_gate, PulseSequence, SequenceDocument};
use crate::scenario::MHZ;
use crate::sweep::{find_optimum, scan, AxisDocument, Manifest, PanelDocument, SweepAxis, SweepMetadata, SweepResult, Table};

/// Gate identity tolerance for `gate`.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "geotgate", version, about = "Geometric and dynamical T-gate simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config and GEOTGATE_OUT).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 picks one per core.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub workers: usize,
    /// Integration step override.
    #[arg(long, value_name = "SECONDS")]
    pub step: Option<f64>,
    /// Points per sweep axis.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a sequence, check it against T and report its phases.
    Gate(CommonArgs),
    /// Fidelity versus error amplitude per channel, with power-law fits.
    Robustness(CommonArgs),
    /// One- or two-axis parameter sweep.
    Scan(CommonArgs),
    /// Open-system run: time traces, or a sweep when one is configured.
    Lindblad(CommonArgs),
    /// Write the datasets behind a figure.
    Figure {
        /// Figure number (3-12).
        id: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownFigure { .. } | Error::Io(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Gate(c) => cmd_gate(c),
        Command::Robustness(c) => cmd_robustness(c),
        Command::Scan(c) => cmd_scan(c),
        Command::Lindblad(c) => cmd_lindblad(c),
        Command::Figure { id, common } => cmd_figure(*id, common),
    };
    match outcome {
        Ok(0) => 0,
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

fn check_common(c: &CommonArgs) -> std::result::Result<(), Failure> {
    if let Some(s) = c.step {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Failure::Usage(format!("--step must be positive, got {s}")));
        }
    }
    if c.grid == Some(0) {
        return Err(Failure::Usage("--grid must be at least 1".into()));
    }
    Ok(())
}

fn load(c: &CommonArgs) -> std::result::Result<(RunConfig, PathBuf), Failure> {
    check_common(c)?;
    let path = c
        .config
        .as_ref()
        .ok_or_else(|| Failure::Usage("--config PATH is required".into()))?;
    // anything wrong with the document itself is a usage error
    let cfg = RunConfig::load(path)
        .and_then(|c| c.validate().map(|_| c))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let out = cfg.output_dir(c.out.as_deref());
    Ok((cfg, out))
}

fn step_of(c: &CommonArgs, cfg: &RunConfig) -> Option<f64> {
    c.step.or(cfg.step_seconds)
}

fn write_json<T: Serialize>(path: &FsPath, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// `x` as a multiple of π, exact for multiples of π/16.
pub fn format_pi(x: f64) -> String {
    let k = x / PI * 16.0;
    if (k - k.round()).abs() < 1e-9 {
        let (mut num, mut den) = (k.round() as i64, 16i64);
        while den > 1 && num % 2 == 0 {
            num /= 2;
            den /= 2;
        }
        return match (num, den) {
            (0, _) => "0".into(),
            (1, 1) => "π".into(),
            (-1, 1) => "-π".into(),
            (n, 1) => format!("{n}π"),
            (1, d) => format!("π/{d}"),
            (-1, d) => format!("-π/{d}"),
            (n, d) => format!("{n}π/{d}"),
        };
    }
    format!("{:.6}π", x / PI)
}

#[derive(Debug, Serialize)]
struct GateReport {
    sequence: SequenceDocument,
    distance_to_t: f64,
    gamma_d: Option<f64>,
    gamma_g: Option<f64>,
    solid_angle: Option<f64>,
    total_area: f64,
    passed: bool,
}

fn gate_sequence(cfg: &RunConfig) -> Result<PulseSequence> {
    if cfg.is_logical() {
        cfg.logical_scenario(None)?.sequence()
    } else {
        PulseSequence::from_spec(&cfg.scheme.trajectory()?)
    }
}

fn cmd_gate(c: &CommonArgs) -> std::result::Result<i32, Failure> {
    let (cfg, out) = load(c)?;
    let seq = gate_sequence(&cfg)?;
    let distance = phase_invariant_distance(&seq.propagate(), &t_gate());
    let step = c.step.unwrap_or_else(|| default_step(&seq.hamiltonian_segments()));
    let phases = phase_decomposition(&seq, step);
    let geometric = seq.spec.scheme.is_geometric();
    let omega = solid_angle(&seq.spec).ok();
    let passed = distance < IDENTITY_TOL && phases.is_ok();

    let spec = &seq.spec;
    println!("scheme        {} (path {}, n = {}, p = {:?})", spec.scheme, u8::from(spec.path), spec.n, spec.p);
    println!("distance to T {distance:.3e}");
    match &phases {
        Ok(r) => {
            println!("gamma_d       {:.3e} rad", r.gamma_d);
            println!("gamma_g       {:.9} rad ({})", r.gamma_g_accumulated, format_pi(r.gamma_g_accumulated));
        }
        Err(e) => println!("phases        {e}"),
    }
    if let Some(o) = omega {
        println!("solid angle   {:.9} sr ({})", o, format_pi(o));
    }
    println!("pulse area    {}", format_pi(seq.total_area()));
    println!("{:>3} {:>12} {:>10} {:>12} {:>12} {:>8}", "k", "phase_rad", "rabi_MHz", "detuning_MHz", "duration_us", "area");
    for (k, s) in seq.segments.iter().enumerate() {
        println!(
            "{:>3} {:>12.6} {:>10.4} {:>12.4} {:>12.6} {:>8}",
            k,
            s.phase,
            s.rabi / MHZ,
            s.detuning / MHZ,
            s.duration * 1e6,
            format_pi(s.area())
        );
    }

    let report = GateReport {
        sequence: seq.to_document(),
        distance_to_t: distance,
        gamma_d: phases.as_ref().ok().map(|r| r.gamma_d),
        gamma_g: phases.as_ref().ok().map(|r| r.gamma_g_accumulated),
        solid_angle: if geometric { omega } else { None },
        total_area: seq.total_area(),
        passed,
    };
    write_json(&out.join("gate.json"), &report)?;
    if !passed {
        eprintln!("gate check failed");
        return Ok(1);
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct CurveSummary {
    channel: String,
    file: String,
    fit: Option<SuppressionFit>,
    fit_error: Option<String>,
    failed_cells: usize,
}

fn cmd_robustness(c: &CommonArgs) -> std::result::Result<i32, Failure> {
    let (cfg, out) = load(c)?;
    let block = cfg.robustness.clone().unwrap_or_default();
    let amps = block.amplitudes(c.grid)?;
    let logical = cfg.is_logical();
    let step = step_of(c, &cfg);
    let mut curves = Vec::new();
    for ch in &block.channels {
        let param = channel_parameter(*ch, logical);
        let axis = SweepAxis::new(param, "", amps.clone())?;
        let meta = SweepMetadata::new(serde_json::to_value(&cfg).map_err(Error::from)?, step);
        let r = scan(vec![axis], "fidelity", meta, c.workers, |p| {
            cfg.with_parameter(param, p[0])?.evaluate(step)
        })?;
        curves.push((*ch, param, r));
    }
    fs::create_dir_all(&out).map_err(Error::from)?;
    let mut manifest = Manifest::new(None, step);
    manifest.config = Some(serde_json::to_value(&cfg).map_err(Error::from)?);
    let mut summaries = Vec::new();
    let mut failed = 0;
    for (ch, param, r) in &curves {
        let file = format!("robustness_{}.csv", ch.name());
        r.write_csv(&out.join(&file))?;
        failed += r.failed_cells();
        let (fit, fit_error) = if r.failed_cells() == 0 {
            let fs_: Vec<f64> = r.cells.iter().filter_map(|c| c.value()).collect();
            // mirrored amplitudes are averaged so odd orders drop out of the fit
            let curve = FidelityCurve::new(*ch, amps.clone(), fs_).map(|cv| cv.even_part().unwrap_or(cv));
            match curve.and_then(|cv| suppression_order(&cv)) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            }
        } else {
            (None, Some("curve has failed cells".into()))
        };
        match (&fit, &fit_error) {
            (Some(f), _) => println!(
                "{:<10} order {:.3}  coefficient {:.4e}  residual {:.2e}  points {}",
                ch.name(),
                f.order,
                f.leading_coefficient,
                f.fit_residual,
                f.points_used
            ),
            (None, Some(e)) => println!("{:<10} no fit: {e}", ch.name()),
            _ => {}
        }
        manifest.panels.push(panel(&file, r, &cfg, json!({"channel": ch, "parameter": param})));
        summaries.push(CurveSummary {
            channel: ch.name().to_string(),
            file,
            fit,
            fit_error,
            failed_cells: r.failed_cells(),
        });
    }
    write_json(&out.join("robustness_fits.json"), &summaries)?;
    manifest.write(&out.join("manifest.json"))?;
    Ok(if failed > 0 { 1 } else { 0 })
}

fn panel(file: &str, r: &SweepResult, cfg: &RunConfig, noise: serde_json::Value) -> PanelDocument {
    PanelDocument {
        file: file.into(),
        axes: r.axes.iter().map(AxisDocument::from).collect(),
        scheme: serde_json::to_value(&cfg.scheme).unwrap_or_default(),
        noise,
        hardware: serde_json::to_value(&cfg.hardware).unwrap_or_default(),
    }
}

fn run_sweep(c: &CommonArgs, cfg: &RunConfig, out: &FsPath, stem: &str) -> std::result::Result<i32, Failure> {
    let block = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Failure::Usage("config has no sweep block".into()))?;
    let names: Vec<String> = block.axes.iter().map(|a| a.name.clone()).collect();
    let axes = block
        .axes
        .iter()
        .map(|a| a.to_axis(c.grid))
        .collect::<Result<Vec<_>>>()?;
    // reject configurations that cannot be evaluated before any output
    let mut probe = cfg.clone();
    for (n, a) in names.iter().zip(&axes) {
        probe = probe.with_parameter(n, a.values()[0])?;
    }
    probe.validate()?;
    let step = step_of(c, cfg);
    let meta = SweepMetadata::new(serde_json::to_value(cfg).map_err(Error::from)?, step);
    let r = scan(axes, "fidelity", meta, c.workers, |p| {
        let mut point = cfg.clone();
        for (n, v) in names.iter().zip(p) {
            point = point.with_parameter(n, *v)?;
        }
        point.evaluate(step)
    })?;
    fs::create_dir_all(out).map_err(Error::from)?;
    let file = format!("{stem}.csv");
    r.write_csv(&out.join(&file))?;
    let mut manifest = Manifest::new(None, step);
    manifest.config = Some(r.metadata.config.clone());
    manifest.panels.push(panel(&file, &r, cfg, serde_json::to_value(&cfg.noise).unwrap_or_default()));
    manifest.write(&out.join("manifest.json"))?;
    match find_optimum(&r) {
        Ok(o) => {
            let coords: Vec<String> = names
                .iter()
                .zip(&o.coordinates)
                .map(|(n, v)| format!("{n} = {v:.9}"))
                .collect();
            println!("cells {}  failed {}", r.cells.len(), r.failed_cells());
            println!("optimum fidelity {:.12} at {}", o.value, coords.join(", "));
        }
        Err(e) => println!("no optimum: {e}"),
    }
    if r.failed_cells() > 0 {
        for (k, cell) in r.cells.iter().enumerate() {
            if let crate::sweep::Cell::Failed(m) = cell {
                eprintln!("cell {k} at {:?}: {m}", r.coordinates(k));
            }
        }
        return Ok(1);
    }
    Ok(0)
}

fn cmd_scan(c: &CommonArgs) -> std::result::Result<i32, Failure> {
    let (cfg, out) = load(c)?;
    run_sweep(c, &cfg, &out, "scan")
}

fn cmd_lindblad(c: &CommonArgs) -> std::result::Result<i32, Failure> {
    let (cfg, out) = load(c)?;
    if cfg.decoherence.is_none() {
        return Err(Failure::Usage("lindblad needs a decoherence block".into()));
    }
    if cfg.sweep.is_some() {
        return run_sweep(c, &cfg, &out, "lindblad_scan");
    }
    let step = step_of(c, &cfg);
    if !cfg.is_logical() {
        let f = cfg.evaluate(step)?;
        println!("average fidelity {f:.12}");
        write_json(&out.join("lindblad.json"), &json!({"fidelity": f, "config": cfg}))?;
        return Ok(0);
    }
    let samples = c.grid.unwrap_or(400);
    let run = cfg.logical_scenario(step)?.run(samples)?;
    let mut columns = vec!["t_us".to_string()];
    for l in SIX_STATE_LABELS {
        for q in ["p0", "p1", "leakage", "overlap"] {
            columns.push(format!("{q}[{l}]"));
        }
    }
    let rows = (0..run.times.len())
        .map(|i| {
            let mut row = vec![Some(run.times[i] * 1e6)];
            for tr in &run.traces {
                row.extend([tr.p0[i], tr.p1[i], tr.leakage[i], tr.overlap[i]].map(Some));
            }
            row
        })
        .collect();
    fs::create_dir_all(&out).map_err(Error::from)?;
    Table { columns, rows }.write_csv(&out.join("lindblad_traces.csv"))?;
    println!("average fidelity {:.12}", run.fidelity);
    for (l, f) in SIX_STATE_LABELS.iter().zip(run.state_fidelities) {
        println!("  |{l}>  {f:.12}");
    }
    println!("final leakage    {:.3e}", run.final_leakage);
    println!("step             {:.3e} s", run.step);
    write_json(
        &out.join("lindblad.json"),
        &json!({
            "fidelity": run.fidelity,
            "state_fidelities": run.state_fidelities,
            "final_leakage": run.final_leakage,
            "step": run.step,
            "config": cfg,
        }),
    )?;
    Ok(0)
}

fn cmd_figure(id: u32, c: &CommonArgs) -> std::result::Result<i32, Failure> {
    check_common(c)?;
    let fallback = match &c.config {
        Some(p) => RunConfig::load(p).map_err(|e| Failure::Usage(e.to_string()))?.output.dir,
        None => PathBuf::from("out"),
    };
    let out = resolve_out_dir(c.out.as_deref(), &fallback).join(format!("fig{id}"));
    let opts = FigureOptions {
        grid: c.grid,
        step: c.step,
        workers: c.workers,
    };
    let report = reproduce_figure(id, &out, &opts)?;
    for p in &report.manifest.panels {
        println!("{}", out.join(&p.file).display());
    }
    if report.failed_cells > 0 {
        eprintln!("{} failed cells", report.failed_cells);
        return Ok(1);
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_fractions() {
        assert_eq!(format_pi(5.0 * PI / 4.0), "5π/4");
        assert_eq!(format_pi(PI), "π");
        assert_eq!(format_pi(PI / 8.0), "π/8");
        assert_eq!(format_pi(-PI / 16.0), "-π/16");
        assert_eq!(format_pi(4.0 * PI), "4π");
        assert_eq!(format_pi(0.0), "0");
        assert_eq!(format_pi(1.0), "0.318310π");
    }
}
