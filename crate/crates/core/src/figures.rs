//! Named dataset recipes for the robustness, hardware and optimization
//! figures (ids 3–12).

use std::f64::consts::PI;
use std::path::Path as FsPath;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, StateVector};
use crate::metrics::Channel;
use crate::noise::{CoherentNoise, HardwareNoise};
use crate::pulse::{Path, PulseSequence, TrajectorySpec};
use crate::scenario::{
    benchmark_delta, coherent_fidelity, open_system_fidelity, optimal_p1, optimal_p_three_loop,
    robust_gt_path, LogicalScenario, LogicalScheme, KHZ, MHZ, STANDARD_BETA,
};
use crate::sweep::{scan, AxisDocument, Manifest, PanelDocument, SweepAxis, SweepMetadata, Table};
use crate::transmon::{logical_rabi, no_dfs_baseline_fidelity, Decoherence};

pub const SUPPORTED_FIGURES: [u32; 10] = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

/// Coherent amplitude range of the physical-level robustness plots.
pub const AMPLITUDE_RANGE: (f64, f64) = (-0.3, 0.3);
/// Free-angle range of the path-parameter scans.
pub const P_RANGE: (f64, f64) = (-2.0 * PI, 2.0 * PI);
/// `β` and `Δ` (MHz) ranges of the modulation landscapes.
pub const BETA_RANGE: (f64, f64) = (0.5, 3.0);
pub const DELTA_MHZ_RANGE: (f64, f64) = (100.0, 800.0);
/// Decay-rate range (kHz) and hardware error range (MHz).
pub const KAPPA_KHZ_RANGE: (f64, f64) = (0.0, 4.0);
pub const HARDWARE_ERROR_MHZ_RANGE: (f64, f64) = (-2.0, 2.0);
/// Error amplitude used by the path-parameter scans.
pub const SCAN_AMPLITUDE: f64 = 0.2;

#[derive(Debug, Clone, Default)]
pub struct FigureOptions {
    /// Points per axis; each figure has its own default.
    pub grid: Option<usize>,
    pub step: Option<f64>,
    /// Worker threads, 0 for the rayon default.
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureReport {
    pub manifest: Manifest,
    pub failed_cells: usize,
}

struct Builder<'a> {
    out: &'a FsPath,
    opts: &'a FigureOptions,
    manifest: Manifest,
    failed: usize,
}

impl<'a> Builder<'a> {
    fn grid(&self, default: usize) -> usize {
        self.opts.grid.unwrap_or(default)
    }

    fn meta(&self, config: Value) -> SweepMetadata {
        SweepMetadata::new(config, self.opts.step)
    }

    fn curve<F>(&mut self, x: &SweepAxis, f: F) -> Result<Vec<Option<f64>>>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let r = scan(vec![x.clone()], "fidelity", self.meta(Value::Null), self.opts.workers, |p| f(p[0]))?;
        self.failed += r.failed_cells();
        Ok(r.series())
    }

    fn write_series(
        &mut self,
        file: &str,
        x: &SweepAxis,
        series: Vec<(String, Vec<Option<f64>>)>,
        scheme: Value,
        noise: Value,
        hardware: Value,
    ) -> Result<()> {
        Table::from_series(x, &series)?.write_csv(&self.out.join(file))?;
        self.manifest.panels.push(PanelDocument {
            file: file.into(),
            axes: vec![AxisDocument::from(x)],
            scheme,
            noise,
            hardware,
        });
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn map<F>(
        &mut self,
        file: &str,
        a: SweepAxis,
        b: SweepAxis,
        scheme: Value,
        noise: Value,
        hardware: Value,
        f: F,
    ) -> Result<()>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let config = json!({"scheme": scheme, "noise": noise, "hardware": hardware});
        let r = scan(vec![a, b], "fidelity", self.meta(config), self.opts.workers, |p| f(p[0], p[1]))?;
        self.failed += r.failed_cells();
        r.write_csv(&self.out.join(file))?;
        self.manifest.panels.push(PanelDocument {
            file: file.into(),
            axes: r.axes.iter().map(AxisDocument::from).collect(),
            scheme,
            noise,
            hardware,
        });
        Ok(())
    }
}

/// Writes the datasets for figure `id` into `outdir`, plus
/// `manifest.json`. Failed cells are written as markers and counted.
pub fn reproduce_figure(id: u32, outdir: &FsPath, opts: &FigureOptions) -> Result<FigureReport> {
    if !SUPPORTED_FIGURES.contains(&id) {
        return Err(Error::UnknownFigure {
            id,
            supported: SUPPORTED_FIGURES.map(|i| i.to_string()).join(", "),
        });
    }
    std::fs::create_dir_all(outdir)?;
    let mut b = Builder {
        out: outdir,
        opts,
        manifest: Manifest::new(Some(id), opts.step),
        failed: 0,
    };
    match id {
        3 => fig3(&mut b)?,
        4 => fig4(&mut b)?,
        5 => fig5(&mut b)?,
        6 => fig6(&mut b)?,
        7 => fig7(&mut b)?,
        8 => fig8(&mut b)?,
        9 => fig9(&mut b)?,
        10 => fig10(&mut b)?,
        11 => fig11(&mut b)?,
        12 => fig12(&mut b)?,
        _ => unreachable!(),
    }
    b.manifest.write(&outdir.join("manifest.json"))?;
    Ok(FigureReport {
        manifest: b.manifest,
        failed_cells: b.failed,
    })
}

const PANEL_LETTERS: [char; 9] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i'];

fn amplitude_axis(channel: Channel, points: usize) -> Result<SweepAxis> {
    SweepAxis::linspace(symbol(channel), "", AMPLITUDE_RANGE.0, AMPLITUDE_RANGE.1, points)
}

fn symbol(channel: Channel) -> &'static str {
    match channel {
        Channel::Rabi => "epsilon",
        Channel::Detuning => "delta",
        Channel::Crosstalk => "eta",
    }
}

fn spec_label(spec: &TrajectorySpec) -> String {
    let path = u8::from(spec.path);
    match spec.scheme {
        crate::pulse::Scheme::Dt => "DT".into(),
        crate::pulse::Scheme::Gt => format!("GT_path{path}"),
        s => format!("{}{}_path{path}", s.name(), spec.n),
    }
}

fn coherent_curves(b: &mut Builder, file: &str, channel: Channel, specs: &[TrajectorySpec]) -> Result<()> {
    let x = amplitude_axis(channel, b.grid(101))?;
    let mut series = Vec::new();
    for spec in specs {
        let seq = PulseSequence::from_spec(spec)?;
        let values = b.curve(&x, |a| coherent_fidelity(&seq, &CoherentNoise::single(channel, a)))?;
        series.push((spec_label(spec), values));
    }
    let scheme = serde_json::to_value(specs)?;
    b.write_series(file, &x, series, scheme, json!({"channel": channel}), Value::Null)
}

fn fig3(b: &mut Builder) -> Result<()> {
    for (k, ch) in Channel::ALL.iter().enumerate() {
        let file = format!("fig3_{}_{}.csv", PANEL_LETTERS[k], ch.name());
        coherent_curves(b, &file, *ch, &[TrajectorySpec::gt(Path::One), TrajectorySpec::gt(Path::Two)])?;
    }
    for (row, path) in [Path::One, Path::Two].into_iter().enumerate() {
        for (k, ch) in Channel::ALL.iter().enumerate() {
            let letter = PANEL_LETTERS[3 * (row + 1) + k];
            let file = format!("fig3_{letter}_{}_path{}.csv", ch.name(), u8::from(path));
            let specs = [TrajectorySpec::gt(path), TrajectorySpec::cgt(2, path), TrajectorySpec::cgt(3, path)];
            coherent_curves(b, &file, *ch, &specs)?;
        }
    }
    Ok(())
}

fn fig4(b: &mut Builder) -> Result<()> {
    for (k, ch) in Channel::ALL.iter().enumerate() {
        let path = robust_gt_path(*ch);
        let p3 = optimal_p_three_loop(path);
        let specs = [
            TrajectorySpec::ocgt(path, vec![optimal_p1(path)]),
            TrajectorySpec::ocgt(path, vec![p3, p3]),
            TrajectorySpec::gt(path),
        ];
        let file = format!("fig4_{}_{}.csv", PANEL_LETTERS[k], ch.name());
        coherent_curves(b, &file, *ch, &specs)?;
    }
    Ok(())
}

fn fig5(b: &mut Builder) -> Result<()> {
    let n = b.grid(41);
    for (row, ch) in Channel::ALL.iter().enumerate() {
        let specs = [
            TrajectorySpec::ocgt(Path::One, vec![optimal_p1(Path::One)]),
            TrajectorySpec::gt(robust_gt_path(*ch)),
            TrajectorySpec::dt(),
        ];
        for (col, spec) in specs.iter().enumerate() {
            let seq = PulseSequence::from_spec(spec)?;
            let step = b.opts.step;
            let file = format!("fig5_{}_{}_{}.csv", PANEL_LETTERS[3 * row + col], ch.name(), spec_label(spec));
            let ch = *ch;
            b.map(
                &file,
                amplitude_axis(ch, n)?,
                SweepAxis::linspace("kappa", "kHz", KAPPA_KHZ_RANGE.0, KAPPA_KHZ_RANGE.1, n)?,
                serde_json::to_value(spec)?,
                json!({"channel": ch, "decoherence": "kappa_minus = kappa_z = kappa"}),
                Value::Null,
                |a, k| open_system_fidelity(&seq, &CoherentNoise::single(ch, a), k * KHZ, k * KHZ, step),
            )?;
        }
    }
    Ok(())
}

fn hardware_doc(s: &LogicalScenario) -> Value {
    json!({
        "Delta_MHz": s.pair.delta() / MHZ,
        "g12_MHz": s.pair.g12() / MHZ,
        "alpha1_MHz": s.pair.alpha1() / MHZ,
        "alpha2_MHz": s.pair.alpha2() / MHZ,
        "beta": s.beta,
        "kappa_minus_kHz": s.decoherence.kappa_minus[0] / KHZ,
        "kappa_z_kHz": s.decoherence.kappa_z[0] / KHZ,
    })
}

fn landscape(b: &mut Builder, file: &str, scheme: LogicalScheme, decoherence: Decoherence) -> Result<()> {
    let n = b.grid(61);
    let step = b.opts.step;
    let proto = LogicalScenario::new(scheme, benchmark_delta(&scheme)).with_decoherence(decoherence);
    let mut hw = hardware_doc(&proto);
    hw["Delta_MHz"] = Value::Null;
    hw["beta"] = Value::Null;
    b.map(
        file,
        SweepAxis::linspace("beta", "", BETA_RANGE.0, BETA_RANGE.1, n)?,
        SweepAxis::linspace("Delta", "MHz", DELTA_MHZ_RANGE.0, DELTA_MHZ_RANGE.1, n)?,
        json!({"logical": scheme.label(), "spec": scheme.trajectory()}),
        Value::Null,
        hw,
        |beta, d| {
            LogicalScenario::new(scheme, d * MHZ)
                .with_beta(beta)
                .with_decoherence(decoherence)
                .with_step(step)
                .fidelity()
        },
    )
}

fn fig6(b: &mut Builder) -> Result<()> {
    let scheme = LogicalScheme::standard_ocgt();
    landscape(b, "fig6_a_landscape.csv", scheme, Decoherence::standard())?;

    let sc = LogicalScenario::new(scheme, benchmark_delta(&scheme))
        .with_decoherence(Decoherence::standard())
        .with_step(b.opts.step);
    let run = sc.run(400)?;
    let plus = run
        .traces
        .iter()
        .find(|t| t.label == "+")
        .expect("six probe states include |+>");
    let table = Table {
        columns: ["t_us", "fidelity", "p0", "p1", "leakage"].map(String::from).to_vec(),
        rows: (0..run.times.len())
            .map(|i| {
                vec![
                    Some(run.times[i] * 1e6),
                    Some(plus.overlap[i]),
                    Some(plus.p0[i]),
                    Some(plus.p1[i]),
                    Some(plus.leakage[i]),
                ]
            })
            .collect(),
    };
    table.write_csv(&b.out.join("fig6_b_trace.csv"))?;
    let duration = run.times.last().copied().unwrap_or(0.0);
    b.manifest.panels.push(PanelDocument {
        file: "fig6_b_trace.csv".into(),
        axes: vec![AxisDocument {
            name: "t".into(),
            unit: "us".into(),
            start: 0.0,
            stop: duration * 1e6,
            points: run.times.len(),
        }],
        scheme: json!({"logical": scheme.label(), "spec": scheme.trajectory(), "initial_state": "+"}),
        noise: Value::Null,
        hardware: json!({"point": hardware_doc(&sc), "average_fidelity": run.fidelity}),
    });
    Ok(())
}

fn fig7(b: &mut Builder) -> Result<()> {
    let x = SweepAxis::linspace("lambda", "MHz", -2.0, 2.0, b.grid(41))?;
    let scheme = LogicalScheme::standard_ocgt();
    let step = b.opts.step;
    let proto = LogicalScenario::new(scheme, benchmark_delta(&scheme));
    let dfs = b.curve(&x, |l| proto.clone().with_lambda(l * MHZ).with_step(step).fidelity())?;
    b.write_series(
        "fig7_dfs.csv",
        &x,
        vec![("OCGT_dfs".into(), dfs)],
        json!({"logical": scheme.label(), "spec": scheme.trajectory()}),
        json!({"collective_dephasing": "lambda (n1 + n2)"}),
        hardware_doc(&proto),
    )?;
    let omega_l = logical_rabi(&proto.pair, STANDARD_BETA)?;
    let seq = PulseSequence::from_spec(&scheme.trajectory().with_rabi(omega_l))?;
    let bare = b.curve(&x, |l| no_dfs_baseline_fidelity(&seq, l * MHZ))?;
    b.write_series(
        "fig7_no_dfs.csv",
        &x,
        vec![("OCGT_no_dfs".into(), bare)],
        json!({"spec": seq.spec}),
        json!({"dephasing": "lambda |1><1| on a bare two-level qubit"}),
        json!({"Omega_MHz": omega_l / MHZ}),
    )
}

/// Decay only, as used for the scheme comparison.
fn comparison_decoherence() -> Decoherence {
    Decoherence::uniform(2.0 * KHZ, 0.0)
}

fn fig8(b: &mut Builder) -> Result<()> {
    let schemes = [
        LogicalScheme::Gt { path: Path::One },
        LogicalScheme::Gt { path: Path::Two },
        LogicalScheme::Dt,
    ];
    for (k, s) in schemes.iter().enumerate() {
        let file = format!("fig8_{}_{}.csv", PANEL_LETTERS[k], s.label());
        landscape(b, &file, *s, comparison_decoherence())?;
    }
    Ok(())
}

fn fig9(b: &mut Builder) -> Result<()> {
    let n = b.grid(21);
    let step = b.opts.step;
    for (row, ch) in Channel::ALL.iter().enumerate() {
        let schemes = [
            LogicalScheme::standard_ocgt(),
            LogicalScheme::Gt { path: robust_gt_path(*ch) },
            LogicalScheme::Dt,
        ];
        for (col, s) in schemes.iter().enumerate() {
            let ch = *ch;
            let s = *s;
            let proto = LogicalScenario::new(s, benchmark_delta(&s)).with_step(step);
            let mut hw = hardware_doc(&proto);
            hw["kappa_minus_kHz"] = Value::Null;
            let file = format!("fig9_{}_{}_{}.csv", PANEL_LETTERS[3 * row + col], ch.name(), s.label());
            b.map(
                &file,
                SweepAxis::linspace(format!("{}_prime", symbol(ch)), "MHz", HARDWARE_ERROR_MHZ_RANGE.0, HARDWARE_ERROR_MHZ_RANGE.1, n)?,
                SweepAxis::linspace("kappa_minus", "kHz", KAPPA_KHZ_RANGE.0, KAPPA_KHZ_RANGE.1, n)?,
                json!({"logical": s.label(), "spec": s.trajectory()}),
                json!({"channel": ch, "spectators": "six, identical coupling, all in |0>"}),
                hw,
                |e, k| {
                    proto
                        .clone()
                        .with_noise(HardwareNoise::single(ch, e * MHZ))
                        .with_decoherence(Decoherence::uniform(k * KHZ, 0.0))
                        .fidelity()
                },
            )?;
        }
    }
    Ok(())
}

fn p_axis(name: &str, points: usize) -> Result<SweepAxis> {
    SweepAxis::linspace(name, "rad", P_RANGE.0, P_RANGE.1, points)
}

fn fig10(b: &mut Builder) -> Result<()> {
    let x = p_axis("p1", b.grid(101))?;
    for (row, path) in [Path::One, Path::Two].into_iter().enumerate() {
        for (k, ch) in Channel::ALL.iter().enumerate() {
            let ch = *ch;
            let noise = CoherentNoise::single(ch, SCAN_AMPLITUDE);
            let values = b.curve(&x, |p| {
                coherent_fidelity(&PulseSequence::from_spec(&TrajectorySpec::ocgt(path, vec![p]))?, &noise)
            })?;
            let file = format!("fig10_{}_{}_path{}.csv", PANEL_LETTERS[3 * row + k], ch.name(), u8::from(path));
            b.write_series(
                &file,
                &x,
                vec![("fidelity".into(), values)],
                json!({"scheme": "OCGT", "n": 2, "path": path}),
                serde_json::to_value(noise)?,
                Value::Null,
            )?;
        }
    }
    Ok(())
}

fn fig11(b: &mut Builder) -> Result<()> {
    let n = b.grid(61);
    for (row, path) in [Path::One, Path::Two].into_iter().enumerate() {
        for (k, ch) in Channel::ALL.iter().enumerate() {
            let noise = CoherentNoise::single(*ch, SCAN_AMPLITUDE);
            let file = format!("fig11_{}_{}_path{}.csv", PANEL_LETTERS[3 * row + k], ch.name(), u8::from(path));
            b.map(
                &file,
                p_axis("p1", n)?,
                p_axis("p2", n)?,
                json!({"scheme": "OCGT", "n": 3, "path": path}),
                serde_json::to_value(noise)?,
                Value::Null,
                |p1, p2| coherent_fidelity(&PulseSequence::from_spec(&TrajectorySpec::ocgt(path, vec![p1, p2]))?, &noise),
            )?;
        }
    }
    Ok(())
}

/// Bloch-sphere samples of the evolution state starting at the north pole.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    /// Polar angle.
    pub alpha: f64,
    /// Azimuth.
    pub beta: f64,
    pub xyz: [f64; 3],
}

/// Samples `per_segment` points inside every segment (plus `t = 0`).
pub fn bloch_trajectory(seq: &PulseSequence, per_segment: usize) -> Result<Vec<TrajectoryPoint>> {
    if per_segment == 0 {
        return Err(Error::OutOfRange("need at least one sample per segment".into()));
    }
    let mut psi = StateVector::basis(2, 0);
    let mut t0 = 0.0;
    let mut out = vec![bloch_point(0.0, &psi)];
    for seg in &seq.segments {
        let h = seg.hamiltonian();
        let dt = seg.duration / per_segment as f64;
        let u = expm_hermitian(&h, dt);
        for k in 1..=per_segment {
            psi = psi.evolve(&u)?;
            out.push(bloch_point(t0 + k as f64 * dt, &psi));
        }
        t0 += seg.duration;
    }
    Ok(out)
}

fn bloch_point(t: f64, psi: &StateVector) -> TrajectoryPoint {
    let a = psi.amplitudes();
    let c = a[0].conj() * a[1];
    let x = 2.0 * c.re;
    let y = 2.0 * c.im;
    let z = a[0].norm_sqr() - a[1].norm_sqr();
    TrajectoryPoint {
        t,
        alpha: z.clamp(-1.0, 1.0).acos(),
        beta: y.atan2(x),
        xyz: [x, y, z],
    }
}

fn fig12(b: &mut Builder) -> Result<()> {
    let per = b.grid(100);
    for (k, path) in [Path::One, Path::Two].into_iter().enumerate() {
        let spec = TrajectorySpec::ocgt(path, vec![optimal_p1(path)]);
        let seq = PulseSequence::from_spec(&spec)?;
        let pts = bloch_trajectory(&seq, per)?;
        let table = Table {
            columns: ["t_us", "alpha_rad", "beta_rad", "x", "y", "z"].map(String::from).to_vec(),
            rows: pts
                .iter()
                .map(|p| {
                    vec![
                        Some(p.t * 1e6),
                        Some(p.alpha),
                        Some(p.beta),
                        Some(p.xyz[0]),
                        Some(p.xyz[1]),
                        Some(p.xyz[2]),
                    ]
                })
                .collect(),
        };
        let file = format!("fig12_{}_path{}.csv", ['a', 'c'][k], u8::from(path));
        table.write_csv(&b.out.join(&file))?;
        b.manifest.panels.push(PanelDocument {
            file,
            axes: vec![AxisDocument {
                name: "t".into(),
                unit: "us".into(),
                start: 0.0,
                stop: seq.duration() * 1e6,
                points: pts.len(),
            }],
            scheme: serde_json::to_value(&spec)?,
            noise: Value::Null,
            hardware: Value::Null,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(grid: usize) -> FigureOptions {
        FigureOptions {
            grid: Some(grid),
            step: None,
            workers: 1,
        }
    }

    #[test]
    fn unknown_id_lists_supported() {
        let dir = tempfile::tempdir().unwrap();
        let err = reproduce_figure(2, dir.path(), &opts(3)).unwrap_err();
        assert!(err.to_string().contains("3, 4, 5, 6, 7, 8, 9, 10, 11, 12"));
    }

    #[test]
    fn fig10_writes_six_panels() {
        let dir = tempfile::tempdir().unwrap();
        let r = reproduce_figure(10, dir.path(), &opts(5)).unwrap();
        assert_eq!(r.manifest.panels.len(), 6);
        assert_eq!(r.failed_cells, 0);
        for p in &r.manifest.panels {
            assert!(dir.path().join(&p.file).exists());
        }
        assert!(dir.path().join("manifest.json").exists());
    }

    #[test]
    fn fig4_three_panels_three_curves() {
        let dir = tempfile::tempdir().unwrap();
        let r = reproduce_figure(4, dir.path(), &opts(5)).unwrap();
        assert_eq!(r.manifest.panels.len(), 3);
        let text = std::fs::read_to_string(dir.path().join(&r.manifest.panels[0].file)).unwrap();
        assert_eq!(text.lines().next().unwrap(), "epsilon,OCGT2_path1,OCGT3_path1,GT_path1");
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn trajectory_is_closed_and_on_sphere() {
        let seq = PulseSequence::from_spec(&TrajectorySpec::ocgt(Path::One, vec![optimal_p1(Path::One)])).unwrap();
        let pts = bloch_trajectory(&seq, 50).unwrap();
        assert_eq!(pts.len(), 4 * 50 + 1);
        for p in &pts {
            let r: f64 = p.xyz.iter().map(|v| v * v).sum();
            assert!((r - 1.0).abs() < 1e-12);
        }
        let last = pts.last().unwrap();
        assert!((last.xyz[2] - 1.0).abs() < 1e-12);
        // first segment passes through the south pole at its end
        assert!((pts[50].xyz[2] + 1.0).abs() < 1e-12);
    }
}
