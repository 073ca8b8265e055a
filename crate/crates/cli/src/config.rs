//! Experiment configuration: JSON schema, defaults and validation.
//!
//! Every field has an explicit default, and the parsed value is what gets
//! echoed into output files, so an output always records the run that made it.

use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use epstein_core::foliation::{c_of_k, Mode, ModelSurface, PhiSpec, SolverConfig, SurfaceSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Default ε ladder for solved branches.
pub const DEFAULT_LADDER: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

/// What a bare `epstein run` does with this config.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigMode {
    KSurface,
    Cmc,
    EpsteinSample,
    VerifySuite,
}

impl ConfigMode {
    /// The foliation mode, when this config names one.
    pub fn solver_mode(self) -> Option<Mode> {
        match self {
            ConfigMode::KSurface => Some(Mode::KSurface),
            ConfigMode::Cmc => Some(Mode::Cmc),
            _ => None,
        }
    }
}

impl FromStr for ConfigMode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "k-surface" => Ok(ConfigMode::KSurface),
            "cmc" => Ok(ConfigMode::Cmc),
            "epstein-sample" => Ok(ConfigMode::EpsteinSample),
            "verify-suite" => Ok(ConfigMode::VerifySuite),
            _ => Err(CliError::Config(format!(
                "unknown mode `{s}`, expected one of k-surface, cmc, epstein-sample, verify-suite"
            ))),
        }
    }
}

/// Named property suites of `epstein verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Flow,
    Distance,
    Curvature,
    Schwarzian,
    Naturality,
    Nehari,
    Jet,
    Branch,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Flow,
        Suite::Distance,
        Suite::Curvature,
        Suite::Schwarzian,
        Suite::Naturality,
        Suite::Nehari,
        Suite::Jet,
        Suite::Branch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Flow => "flow",
            Suite::Distance => "distance",
            Suite::Curvature => "curvature",
            Suite::Schwarzian => "schwarzian",
            Suite::Naturality => "naturality",
            Suite::Nehari => "nehari",
            Suite::Jet => "jet",
            Suite::Branch => "branch",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::EACH.iter().map(|x| x.name()).collect();
                CliError::Config(format!(
                    "unknown suite `{s}`, expected one of {}, all",
                    names.join(", ")
                ))
            })
    }
}

/// `φ = a·exp(2πi n z/ℓ) dz²` on the cylinder, `a·dz²` on the disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiConfig {
    /// Complex amplitude `a` as `[re, im]`.
    #[serde(default = "zero")]
    pub amplitude: Complex64,
    #[serde(default)]
    pub mode: i32,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Default for PhiConfig {
    fn default() -> Self {
        Self {
            amplitude: zero(),
            mode: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Cylinder {
        ell: f64,
        r: f64,
        nx: usize,
        ny: usize,
        phi: PhiConfig,
    },
    Disk {
        half_width: f64,
        n: usize,
        phi: PhiConfig,
    },
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig::Cylinder {
            ell: 2.0 * PI,
            r: 3.0,
            nx: 128,
            ny: 64,
            phi: PhiConfig {
                amplitude: Complex64::new(0.05, 0.0),
                mode: 0,
            },
        }
    }
}

impl SurfaceConfig {
    pub fn spec(&self) -> SurfaceSpec {
        let phi_spec = |phi: &PhiConfig| {
            if phi.amplitude == zero() {
                PhiSpec::Zero
            } else {
                PhiSpec::Fourier {
                    amplitude: phi.amplitude,
                    mode: phi.mode,
                }
            }
        };
        match self {
            SurfaceConfig::Cylinder {
                ell,
                r,
                nx,
                ny,
                phi,
            } => SurfaceSpec::cylinder(*ell, *r, *nx, *ny, phi_spec(phi)),
            SurfaceConfig::Disk { half_width, n, phi } => {
                SurfaceSpec::disk(*half_width, *n, phi_spec(phi))
            }
        }
    }
}

/// Mirror of the core solver settings with every field defaulted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub k_step: f64,
    pub linear_solver_tol: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            newton_tol: d.newton_tol,
            max_iter: d.max_iter,
            k_step: d.k_step,
            linear_solver_tol: d.linear_solver_tol,
        }
    }
}

impl SolverSection {
    pub fn to_core(&self) -> SolverConfig {
        SolverConfig {
            newton_tol: self.newton_tol,
            max_iter: self.max_iter,
            k_step: self.k_step,
            linear_solver_tol: self.linear_solver_tol,
        }
    }
}

/// Which solved surface `epstein sample` meshes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub k: f64,
}

impl Default for SampleSection {
    fn default() -> Self {
        Self { k: -0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub seed: u64,
    /// Random cases per randomized check.
    pub cases: usize,
    pub suite: Suite,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            seed: 20_240_917,
            cases: 50,
            suite: Suite::All,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_mode")]
    pub mode: ConfigMode,
    #[serde(default)]
    pub surface: SurfaceConfig,
    /// Curvature parameters in (−1, 0). Exclusive with `eps_ladder`.
    #[serde(default)]
    pub k_list: Option<Vec<f64>>,
    /// `ε = −k` values in (0, 1). Exclusive with `k_list`.
    #[serde(default)]
    pub eps_ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sample: SampleSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_mode() -> ConfigMode {
    ConfigMode::KSurface
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            surface: SurfaceConfig::default(),
            k_list: None,
            eps_ladder: Some(DEFAULT_LADDER.to_vec()),
            solver: SolverSection::default(),
            sample: SampleSection::default(),
            verify: VerifySection::default(),
            output: OutputSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON config. Errors name the offending field
    /// and its line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("field `{path}`: {}", e.into_inner()))
        })?;
        if config.k_list.is_none() && config.eps_ladder.is_none() {
            config.eps_ladder = Some(DEFAULT_LADDER.to_vec());
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.k_list.is_some() && self.eps_ladder.is_some() {
            return bad("give either `k_list` or `eps_ladder`, not both".into());
        }
        let ks = self.k_values();
        if ks.is_empty() {
            return bad("the k list is empty".into());
        }
        for &k in &ks {
            if c_of_k(k).is_err() {
                return bad(format!(
                    "k = {k} is outside (-1, 0); eps values must lie in (0, 1)"
                ));
            }
        }
        let mut sorted = ks.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("the k list contains duplicates".into());
        }
        if c_of_k(self.sample.k).is_err() {
            return bad(format!("sample.k = {} is outside (-1, 0)", self.sample.k));
        }
        if self.verify.cases == 0 {
            return bad("verify.cases must be at least 1".into());
        }
        if self.output.dir.is_empty() {
            return bad("output.dir must not be empty".into());
        }
        self.solver
            .to_core()
            .validate()
            .map_err(|e| CliError::Config(format!("solver: {e}")))?;
        self.model_surface()?;
        Ok(())
    }

    /// The k values to solve at, in the order given.
    pub fn k_values(&self) -> Vec<f64> {
        match (&self.k_list, &self.eps_ladder) {
            (Some(ks), _) => ks.clone(),
            (None, Some(eps)) => eps.iter().map(|e| -e).collect(),
            (None, None) => DEFAULT_LADDER.iter().map(|e| -e).collect(),
        }
    }

    pub fn model_surface(&self) -> Result<ModelSurface, CliError> {
        ModelSurface::new(self.surface.spec())
            .map_err(|e| CliError::Config(format!("surface: {e}")))
    }

    /// Foliation mode for solve-type commands.
    pub fn solver_mode(&self) -> Result<Mode, CliError> {
        self.mode.solver_mode().ok_or_else(|| {
            CliError::Config(
                "this command needs mode `k-surface` or `cmc` (use --mode to override)".into(),
            )
        })
    }

    /// Compact JSON echo of the resolved config.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(e: CliError) -> String {
        match e {
            CliError::Config(m) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn bundled_config_is_the_default() {
        let text = include_str!("../../../configs/cylinder.json");
        assert_eq!(
            ExperimentConfig::parse(text).unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn defaults_are_filled_and_echoed() {
        let c = ExperimentConfig::parse(
            r#"{"surface": {"kind": "cylinder", "ell": 6.0, "r": 2.0, "nx": 32, "ny": 16, "phi": {}}}"#,
        )
        .unwrap();
        assert_eq!(c.eps_ladder.as_deref(), Some(&DEFAULT_LADDER[..]));
        let echo: serde_json::Value = serde_json::from_str(&c.echo()).unwrap();
        assert_eq!(echo["solver"]["newton_tol"], 1e-10);
        assert_eq!(
            echo["surface"]["phi"]["amplitude"],
            serde_json::json!([0.0, 0.0])
        );
        assert_eq!(ExperimentConfig::parse(&c.echo()).unwrap(), c);
    }

    #[test]
    fn unknown_fields_are_rejected_with_location() {
        let m = msg(ExperimentConfig::parse(
            "{\n  \"solver\": {\"newton_tol\": 1e-9, \"tolerance\": 2}\n}",
        )
        .unwrap_err());
        assert!(
            m.contains("solver") && m.contains("tolerance") && m.contains("line 2"),
            "{m}"
        );
        let m = msg(ExperimentConfig::parse(r#"{"surfaces": {}}"#).unwrap_err());
        assert!(m.contains("surfaces"), "{m}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            r#"{"k_list": [-0.1, 0.2]}"#,
            r#"{"eps_ladder": [0.1, 0.1]}"#,
            r#"{"k_list": [-0.1], "eps_ladder": [0.1]}"#,
            r#"{"solver": {"max_iter": 0}}"#,
            r#"{"surface": {"kind": "disk", "half_width": 0.9, "n": 16, "phi": {}}}"#,
            r#"{"surface": {"kind": "cylinder", "ell": 6.0, "r": 3.0, "nx": 4, "ny": 16, "phi": {}}}"#,
            r#"{"mode": "fast"}"#,
        ] {
            assert!(
                matches!(ExperimentConfig::parse(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("cmc".parse::<ConfigMode>().unwrap(), ConfigMode::Cmc);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
