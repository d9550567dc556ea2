//! Run configuration document.
//!
//! Frequencies are given in MHz or kHz and converted to rad/s on ingestion;
//! angles are in radians. Unknown keys are rejected.

use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Channel;
use crate::noise::{CoherentNoise, HardwareNoise, NoiseDocument, NoiseModel};
use crate::pulse::{Path, PulseSequence, Scheme, TrajectorySpec, T_GAMMA};
use crate::scenario::{
    coherent_fidelity, open_system_fidelity, LogicalScenario, LogicalScheme, KHZ, MHZ,
    STANDARD_BETA,
};
use crate::sweep::SweepAxis;
use crate::transmon::{Decoherence, ParametricDrive, TransmonPair};

pub const CONFIG_VERSION: u32 = 1;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "GEOTGATE_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub scheme: SchemeBlock,
    #[serde(default)]
    pub noise: NoiseDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardware: Option<HardwareBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoherence: Option<DecoherenceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robustness: Option<RobustnessBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    /// Integration step override, seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeBlock {
    pub scheme: Scheme,
    #[serde(default = "default_path")]
    pub path: Path,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma_g: f64,
    #[serde(default = "default_rabi_mhz", rename = "rabi_MHz")]
    pub rabi_mhz: f64,
}

fn default_path() -> Path {
    Path::One
}
fn default_gamma() -> f64 {
    T_GAMMA
}
fn default_rabi_mhz() -> f64 {
    10.0
}

impl SchemeBlock {
    pub fn trajectory(&self) -> Result<TrajectorySpec> {
        if !(self.rabi_mhz > 0.0) || !self.rabi_mhz.is_finite() {
            return Err(Error::Config(format!("rabi_MHz must be positive, got {}", self.rabi_mhz)));
        }
        if !self.gamma_g.is_finite() {
            return Err(Error::Config("gamma_g must be finite".into()));
        }
        let n = match (self.scheme, self.n) {
            (Scheme::Gt | Scheme::Dt, None | Some(1)) => 1,
            (Scheme::Gt | Scheme::Dt, Some(n)) => {
                return Err(Error::Config(format!("{} has a single loop, got n = {n}", self.scheme)))
            }
            (Scheme::LogicalOcgt, None | Some(2)) => 2,
            (Scheme::LogicalOcgt, Some(n)) => {
                return Err(Error::Config(format!("LOGICAL_OCGT has two loops, got n = {n}")))
            }
            (Scheme::Ocgt, None) => self.p.len() + 1,
            (Scheme::Cgt, None) => 1,
            (_, Some(n)) => n,
        };
        let spec = TrajectorySpec {
            scheme: self.scheme,
            path: self.path,
            n,
            p: self.p.clone(),
            gamma_g: self.gamma_g,
            alpha0: 0.0,
            beta0: 0.0,
            rabi: self.rabi_mhz * MHZ,
        };
        // validation lives in the builder
        PulseSequence::from_spec(&spec)?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareBlock {
    #[serde(default, rename = "omega1_MHz", skip_serializing_if = "Option::is_none")]
    pub omega1_mhz: Option<f64>,
    #[serde(default, rename = "omega2_MHz", skip_serializing_if = "Option::is_none")]
    pub omega2_mhz: Option<f64>,
    #[serde(default, rename = "Delta_MHz", skip_serializing_if = "Option::is_none")]
    pub delta_mhz: Option<f64>,
    #[serde(default = "default_alpha", rename = "alpha1_MHz")]
    pub alpha1_mhz: f64,
    #[serde(default = "default_alpha", rename = "alpha2_MHz")]
    pub alpha2_mhz: f64,
    #[serde(default = "default_g12", rename = "g12_MHz")]
    pub g12_mhz: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub phi_rad: f64,
    /// Collective dephasing strength.
    #[serde(default, rename = "lambda_MHz")]
    pub lambda_mhz: f64,
}

fn default_alpha() -> f64 {
    220.0
}
fn default_g12() -> f64 {
    10.0
}
fn default_beta() -> f64 {
    STANDARD_BETA
}

impl Default for HardwareBlock {
    fn default() -> Self {
        Self {
            omega1_mhz: None,
            omega2_mhz: None,
            delta_mhz: Some(462.0),
            alpha1_mhz: default_alpha(),
            alpha2_mhz: default_alpha(),
            g12_mhz: default_g12(),
            beta: default_beta(),
            phi_rad: 0.0,
            lambda_mhz: 0.0,
        }
    }
}

impl HardwareBlock {
    pub fn pair(&self) -> Result<TransmonPair> {
        let (a1, a2, g) = (self.alpha1_mhz * MHZ, self.alpha2_mhz * MHZ, self.g12_mhz * MHZ);
        match (self.omega1_mhz, self.omega2_mhz, self.delta_mhz) {
            (None, None, Some(d)) => TransmonPair::with_detuning(d * MHZ, a1, a2, g),
            (Some(w1), Some(w2), None) => TransmonPair::new(w1 * MHZ, w2 * MHZ, a1, a2, g),
            (None, None, None) => Err(Error::Config(
                "hardware block needs Delta_MHz or omega1_MHz and omega2_MHz".into(),
            )),
            _ => Err(Error::Config(
                "give either Delta_MHz or both omega1_MHz and omega2_MHz".into(),
            )),
        }
    }

    pub fn delta_mhz(&self) -> Result<f64> {
        Ok(self.pair()?.delta() / MHZ)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoherenceBlock {
    #[serde(default = "default_kappa", rename = "kappa_minus_kHz")]
    pub kappa_minus_khz: f64,
    #[serde(default = "default_kappa", rename = "kappa_z_kHz")]
    pub kappa_z_khz: f64,
}

fn default_kappa() -> f64 {
    2.0
}

impl DecoherenceBlock {
    pub fn rates(&self) -> Result<(f64, f64)> {
        let (m, z) = (self.kappa_minus_khz, self.kappa_z_khz);
        if !(m >= 0.0 && z >= 0.0) || !m.is_finite() || !z.is_finite() {
            return Err(Error::Config(format!("decoherence rates must be >= 0, got {m}, {z}")));
        }
        Ok((m * KHZ, z * KHZ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl AxisBlock {
    /// `grid` replaces the point count of ranged axes.
    pub fn to_axis(&self, grid: Option<usize>) -> Result<SweepAxis> {
        let (name, unit) = split_parameter(&self.name)?;
        match (&self.values, self.start, self.stop) {
            (Some(v), None, None) if self.points.is_none() => SweepAxis::new(name, unit, v.clone()),
            (None, Some(a), Some(b)) => {
                let n = grid.or(self.points).unwrap_or(101);
                SweepAxis::linspace(name, unit, a, b, n)
            }
            _ => Err(Error::Config(format!(
                "axis {} needs either values or start/stop[/points]",
                self.name
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axes: Vec<AxisBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessBlock {
    #[serde(default = "all_channels")]
    pub channels: Vec<Channel>,
    #[serde(default = "default_min_amp")]
    pub min_amplitude: f64,
    #[serde(default = "default_max_amp")]
    pub max_amplitude: f64,
    /// Magnitudes per sign.
    #[serde(default = "default_amp_points")]
    pub points: usize,
}

fn all_channels() -> Vec<Channel> {
    Channel::ALL.to_vec()
}
fn default_min_amp() -> f64 {
    1e-3
}
fn default_max_amp() -> f64 {
    0.05
}
fn default_amp_points() -> usize {
    12
}

impl Default for RobustnessBlock {
    fn default() -> Self {
        Self {
            channels: all_channels(),
            min_amplitude: default_min_amp(),
            max_amplitude: default_max_amp(),
            points: default_amp_points(),
        }
    }
}

impl RobustnessBlock {
    /// Log-spaced magnitudes, both signs, ascending.
    pub fn amplitudes(&self, grid: Option<usize>) -> Result<Vec<f64>> {
        let (lo, hi) = (self.min_amplitude, self.max_amplitude);
        let n = grid.unwrap_or(self.points);
        if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
            return Err(Error::Config(format!(
                "error range must satisfy 0 < min < max, got [{lo}, {hi}]"
            )));
        }
        if n < 2 {
            return Err(Error::Config("robustness curve needs at least 2 points per sign".into()));
        }
        let mags: Vec<f64> = (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect();
        let mut out: Vec<f64> = mags.iter().rev().map(|m| -m).collect();
        out.extend(mags);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
        }
    }
}

/// Splits a sweep parameter into its base name and unit and checks that it
/// is known.
pub fn split_parameter(name: &str) -> Result<(&str, &str)> {
    const PLAIN: [&str; 5] = ["epsilon", "delta", "eta", "gamma_g", "beta"];
    const WITH_UNIT: [(&str, &str); 11] = [
        ("epsilon", "MHz"),
        ("delta", "MHz"),
        ("eta", "MHz"),
        ("rabi", "MHz"),
        ("Delta", "MHz"),
        ("g12", "MHz"),
        ("lambda", "MHz"),
        ("kappa_minus", "kHz"),
        ("kappa_z", "kHz"),
        ("phi", "rad"),
        ("p", "rad"),
    ];
    if PLAIN.contains(&name) {
        return Ok((name, ""));
    }
    if let Some(k) = name.strip_prefix('p') {
        if !k.is_empty() && k.chars().all(|c| c.is_ascii_digit()) && k != "0" {
            return Ok((name, "rad"));
        }
    }
    for (base, unit) in WITH_UNIT {
        if name == format!("{base}_{unit}") && base != "p" {
            return Ok((base, unit));
        }
    }
    Err(Error::Config(format!(
        "unknown sweep parameter {name}; expected one of epsilon, delta, eta, epsilon_MHz, \
         delta_MHz, eta_MHz, p1.., gamma_g, rabi_MHz, beta, Delta_MHz, g12_MHz, phi_rad, \
         lambda_MHz, kappa_minus_kHz, kappa_z_kHz"
    )))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &FsPath) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Default document for `scheme` with everything else at defaults.
    pub fn for_scheme(scheme: SchemeBlock) -> Self {
        Self {
            version: CONFIG_VERSION,
            scheme,
            noise: NoiseDocument::default(),
            hardware: None,
            decoherence: None,
            sweep: None,
            robustness: None,
            output: OutputBlock::default(),
            step_seconds: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {}; expected {CONFIG_VERSION}",
                self.version
            )));
        }
        self.scheme.trajectory()?;
        let noise = self.noise.to_model()?;
        if let Some(h) = &self.hardware {
            h.pair()?;
            ParametricDrive::new(h.beta, 0.0, h.phi_rad)?;
            if !h.lambda_mhz.is_finite() {
                return Err(Error::Config("lambda_MHz must be finite".into()));
            }
            LogicalScheme::from_spec(&self.scheme.trajectory()?)?;
            if let NoiseModel::Dimensionless(n) = noise {
                if n != CoherentNoise::default() {
                    return Err(Error::Config(
                        "hardware-level runs take epsilon_MHz/delta_MHz/eta_MHz".into(),
                    ));
                }
            }
        } else if let NoiseModel::Dimensionful(n) = noise {
            if n != HardwareNoise::default() {
                return Err(Error::Config(
                    "_MHz error amplitudes need a hardware block; use epsilon/delta/eta".into(),
                ));
            }
        }
        if let Some(d) = &self.decoherence {
            d.rates()?;
        }
        if let Some(s) = self.step_seconds {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Config(format!("step_seconds must be positive, got {s}")));
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.axes.is_empty() || sw.axes.len() > 2 {
                return Err(Error::Config(format!("sweep needs 1 or 2 axes, got {}", sw.axes.len())));
            }
            for a in &sw.axes {
                a.to_axis(None)?;
            }
        }
        if let Some(r) = &self.robustness {
            r.amplitudes(None)?;
        }
        Ok(())
    }

    pub fn is_logical(&self) -> bool {
        self.hardware.is_some()
    }

    /// Copy with sweep parameter `name` set to `value`.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        split_parameter(name)?;
        let mut c = self.clone();
        match name {
            "epsilon" => c.noise.epsilon = Some(value),
            "delta" => c.noise.delta = Some(value),
            "eta" => c.noise.eta = Some(value),
            "epsilon_MHz" => c.noise.epsilon_mhz = Some(value),
            "delta_MHz" => c.noise.delta_mhz = Some(value),
            "eta_MHz" => c.noise.eta_mhz = Some(value),
            "gamma_g" => c.scheme.gamma_g = value,
            "rabi_MHz" => c.scheme.rabi_mhz = value,
            "beta" => hardware_mut(&mut c, name)?.beta = value,
            "Delta_MHz" => {
                let h = hardware_mut(&mut c, name)?;
                h.omega1_mhz = None;
                h.omega2_mhz = None;
                h.delta_mhz = Some(value);
            }
            "g12_MHz" => hardware_mut(&mut c, name)?.g12_mhz = value,
            "phi_rad" => hardware_mut(&mut c, name)?.phi_rad = value,
            "lambda_MHz" => hardware_mut(&mut c, name)?.lambda_mhz = value,
            "kappa_minus_kHz" => {
                c.decoherence
                    .get_or_insert(DecoherenceBlock {
                        kappa_minus_khz: 0.0,
                        kappa_z_khz: 0.0,
                    })
                    .kappa_minus_khz = value
            }
            "kappa_z_kHz" => {
                c.decoherence
                    .get_or_insert(DecoherenceBlock {
                        kappa_minus_khz: 0.0,
                        kappa_z_khz: 0.0,
                    })
                    .kappa_z_khz = value
            }
            p => {
                let k: usize = p[1..].parse().expect("checked by split_parameter");
                if k > c.scheme.p.len() {
                    return Err(Error::Config(format!(
                        "parameter {p} but the scheme has {} free angles",
                        c.scheme.p.len()
                    )));
                }
                c.scheme.p[k - 1] = value;
            }
        }
        Ok(c)
    }

    pub fn logical_scenario(&self, step: Option<f64>) -> Result<LogicalScenario> {
        let h = self
            .hardware
            .as_ref()
            .ok_or_else(|| Error::Config("logical run needs a hardware block".into()))?;
        let spec = self.scheme.trajectory()?;
        let scheme = LogicalScheme::from_spec(&spec)?;
        let noise = match self.noise.to_model()? {
            NoiseModel::Dimensionful(n) => n,
            NoiseModel::Dimensionless(_) => HardwareNoise::default(),
        };
        let decoherence = match &self.decoherence {
            Some(d) => {
                let (m, z) = d.rates()?;
                Decoherence::uniform(m, z)
            }
            None => Decoherence::default(),
        };
        let mut sc = LogicalScenario::new(scheme, 0.0)
            .with_beta(h.beta)
            .with_decoherence(decoherence)
            .with_noise(noise)
            .with_lambda(h.lambda_mhz * MHZ)
            .with_step(step.or(self.step_seconds));
        sc.pair = h.pair()?;
        sc.phi = h.phi_rad;
        Ok(sc)
    }

    /// Gate fidelity at this configuration: unitary fidelity for coherent
    /// two-level runs, six-state average with decoherence, and the full
    /// transmon model when a hardware block is present.
    pub fn evaluate(&self, step: Option<f64>) -> Result<f64> {
        if self.is_logical() {
            return self.logical_scenario(step)?.fidelity();
        }
        let seq = PulseSequence::from_spec(&self.scheme.trajectory()?)?;
        let noise = match self.noise.to_model()? {
            NoiseModel::Dimensionless(n) => n,
            NoiseModel::Dimensionful(_) => {
                return Err(Error::Config("_MHz error amplitudes need a hardware block".into()))
            }
        };
        match &self.decoherence {
            Some(d) => {
                let (m, z) = d.rates()?;
                open_system_fidelity(&seq, &noise, m, z, step.or(self.step_seconds))
            }
            None => coherent_fidelity(&seq, &noise),
        }
    }

    /// Output directory: explicit flag, then environment, then config.
    pub fn output_dir(&self, flag: Option<&FsPath>) -> PathBuf {
        resolve_out_dir(flag, &self.output.dir)
    }
}

fn hardware_mut<'a>(c: &'a mut RunConfig, name: &str) -> Result<&'a mut HardwareBlock> {
    c.hardware
        .as_mut()
        .ok_or_else(|| Error::Config(format!("parameter {name} needs a hardware block")))
}

pub fn resolve_out_dir(flag: Option<&FsPath>, fallback: &FsPath) -> PathBuf {
    if let Some(f) = flag {
        return f.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => fallback.to_path_buf(),
    }
}

/// Name of the noise field for `channel` at either level.
pub fn channel_parameter(channel: Channel, logical: bool) -> &'static str {
    match (channel, logical) {
        (Channel::Rabi, false) => "epsilon",
        (Channel::Detuning, false) => "delta",
        (Channel::Crosstalk, false) => "eta",
        (Channel::Rabi, true) => "epsilon_MHz",
        (Channel::Detuning, true) => "delta_MHz",
        (Channel::Crosstalk, true) => "eta_MHz",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OCGT: &str = r#"{
        "version": 1,
        "scheme": {"scheme": "OCGT", "path": 1, "p": [3.3379421944391554]},
        "noise": {"epsilon": 0.02}
    }"#;

    #[test]
    fn parses_and_evaluates() {
        let c = RunConfig::from_json(OCGT).unwrap();
        assert_eq!(c.scheme.trajectory().unwrap().n, 2);
        let f = c.evaluate(None).unwrap();
        assert!(f < 1.0 && f > 0.999999);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            r#"{"version": 2, "scheme": {"scheme": "GT"}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "extra": 1}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT", "rabi": 1}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT", "path": 3}}"#,
            r#"{"version": 1, "scheme": {"scheme": "OCGT", "n": 3, "p": [1.0]}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "noise": {"epsilon": 0.1, "delta_MHz": 1}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "noise": {"epsilon_MHz": 1}}"#,
            r#"{"version": 1, "scheme": {"scheme": "CGT", "n": 2}, "hardware": {"Delta_MHz": 400}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "hardware": {"Delta_MHz": 400, "omega1_MHz": 1}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "decoherence": {"kappa_z_kHz": -1}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "sweep": {"axes": [{"name": "foo", "start": 0, "stop": 1}]}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "robustness": {"min_amplitude": 0.1, "max_amplitude": 0.1}}"#,
            r#"{"version": 1, "scheme": {"scheme": "GT"}, "hardware": {"Delta_MHz": 400, "beta": 6}}"#,
        ];
        for b in bad {
            assert!(RunConfig::from_json(b).is_err(), "accepted {b}");
        }
    }

    #[test]
    fn parameter_names() {
        for ok in ["epsilon", "eta_MHz", "p1", "p12", "Delta_MHz", "kappa_z_kHz", "phi_rad", "beta"] {
            assert!(split_parameter(ok).is_ok(), "{ok}");
        }
        for bad in ["p0", "p", "p_rad", "Delta", "kappa", "epsilon_kHz"] {
            assert!(split_parameter(bad).is_err(), "{bad}");
        }
        assert_eq!(split_parameter("Delta_MHz").unwrap(), ("Delta", "MHz"));
    }

    #[test]
    fn with_parameter_sets_fields() {
        let c = RunConfig::from_json(OCGT).unwrap();
        let d = c.with_parameter("p1", 1.0).unwrap();
        assert_eq!(d.scheme.p, vec![1.0]);
        assert!(c.with_parameter("p2", 1.0).is_err());
        assert!(c.with_parameter("beta", 1.0).is_err());
        let k = c.with_parameter("kappa_z_kHz", 3.0).unwrap();
        assert_eq!(k.decoherence.unwrap().kappa_z_khz, 3.0);
    }

    #[test]
    fn robustness_amplitudes() {
        let r = RobustnessBlock::default();
        let a = r.amplitudes(Some(3)).unwrap();
        assert_eq!(a.len(), 6);
        assert!(a.windows(2).all(|w| w[1] > w[0]));
        assert!((a[5] - 0.05).abs() < 1e-15 && (a[3] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn hardware_units_and_defaults() {
        let c = RunConfig::from_json(
            r#"{"version": 1, "scheme": {"scheme": "LOGICAL_OCGT", "p": [3.3379421944391554]},
                "hardware": {"omega1_MHz": 5462, "omega2_MHz": 5000}, "decoherence": {}}"#,
        )
        .unwrap();
        let sc = c.logical_scenario(None).unwrap();
        assert!((sc.pair.delta() - 462.0 * MHZ).abs() < 1e-3);
        assert!((sc.pair.g12() - 10.0 * MHZ).abs() < 1e-6);
        assert!((sc.decoherence.kappa_z[1] - 2.0 * KHZ).abs() < 1e-9);
        assert_eq!(sc.beta, 1.85);
    }
}
