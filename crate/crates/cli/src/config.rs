//! JSON run configuration.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Branch,
    Stability,
    Evolve,
    Kernel,
    Variational,
    NlsBranch,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Branch => "branch",
            Command::Stability => "stability",
            Command::Evolve => "evolve",
            Command::Kernel => "kernel",
            Command::Variational => "variational",
            Command::NlsBranch => "nls-branch",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| ConfigError::new(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    BeamPoly,
    BeamExp,
    Nls,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_points: usize,
    pub half_length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_points: 1024,
            half_length: 12.0 * PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Newton residual for single solves.
    pub newton: f64,
    /// Corrector residual along branches.
    pub continuation: f64,
    /// Stage iteration of the time stepper.
    pub inner: f64,
    /// Projected-gradient norm of the variational ascent.
    pub variational: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton: 1e-11,
            continuation: 1e-10,
            inner: 1e-13,
            variational: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationConfig {
    /// Anchor of the branch; defaults to `c` or `omega`.
    pub anchor: Option<f64>,
    pub param_start: Option<f64>,
    pub param_end: Option<f64>,
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            anchor: None,
            param_start: None,
            param_end: None,
            ds: 0.01,
            ds_min: 1e-4,
            ds_max: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub t_final: f64,
    pub dt: f64,
    /// Size of the eigenmode perturbation; 0 runs the bare wave.
    pub epsilon: f64,
    /// Index into the unstable mode followed by the internal modes.
    pub mode_index: usize,
    pub sample_every: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_final: 10.0,
            dt: 1e-3,
            epsilon: 1e-3,
            mode_index: 0,
            sample_every: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub x_max: f64,
    pub points: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            x_max: 30.0,
            points: 601,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationalConfig {
    pub lambda: f64,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self { lambda: 1.0 }
    }
}

/// Validated run configuration. Unset scalars are filled per equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub equation: Option<Equation>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub continuation: ContinuationConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub variational: VariationalConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub message: String,
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses and validates a JSON config, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config: RunConfig = serde_json::from_str(text)
        .map_err(|e| ConfigError::new(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    config.fill_defaults();
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Minimal config for `command` with every default filled.
    pub fn for_command(command: Command) -> Self {
        let mut config = RunConfig {
            command,
            equation: None,
            grid: GridConfig::default(),
            c: None,
            gamma: None,
            coefficients: None,
            mu: None,
            omega: None,
            tolerances: Tolerances::default(),
            continuation: ContinuationConfig::default(),
            evolution: EvolutionConfig::default(),
            kernel: KernelConfig::default(),
            variational: VariationalConfig::default(),
            output_dir: default_output_dir(),
        };
        config.fill_defaults();
        config
    }

    pub fn equation(&self) -> Equation {
        self.equation.unwrap_or(Equation::BeamPoly)
    }

    fn fill_defaults(&mut self) {
        let equation = *self.equation.get_or_insert(match self.command {
            Command::NlsBranch => Equation::Nls,
            _ => Equation::BeamPoly,
        });
        match equation {
            Equation::BeamPoly | Equation::BeamExp => {
                self.c.get_or_insert(1.0);
                self.gamma.get_or_insert(1.0);
                if equation == Equation::BeamPoly {
                    self.coefficients.get_or_insert_with(|| vec![1.0]);
                }
            }
            Equation::Nls => {
                self.mu.get_or_insert(1.0);
                self.omega.get_or_insert(1.0);
            }
        }
        let (lo, hi) = match (self.command, equation) {
            (_, Equation::Nls) => (0.3, 2.0),
            (_, Equation::BeamExp) => (0.3, 1.4),
            _ => (0.5, 1.40),
        };
        self.continuation.param_start.get_or_insert(lo);
        self.continuation.param_end.get_or_insert(hi);
        let anchor = match equation {
            Equation::Nls => self.omega,
            _ => self.c,
        };
        if self.continuation.anchor.is_none() {
            self.continuation.anchor = anchor;
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let equation = self.equation();
        let needs = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::new(format!(
                    "command {} needs {what}, got equation {}",
                    self.command.name(),
                    equation_name(equation)
                )))
            }
        };
        match self.command {
            Command::Branch | Command::Evolve | Command::Kernel => {
                needs(equation != Equation::Nls, "a beam equation")?
            }
            Command::Variational => needs(equation == Equation::BeamPoly, "equation beam-poly")?,
            Command::NlsBranch => needs(equation == Equation::Nls, "equation nls")?,
            Command::Solve | Command::Stability => {}
        }

        if self.grid.n_points < 8 || !self.grid.n_points.is_multiple_of(2) {
            return Err(ConfigError::new(format!(
                "grid.n_points must be even and at least 8, got {}",
                self.grid.n_points
            )));
        }
        positive("grid.half_length", self.grid.half_length)?;

        match equation {
            Equation::BeamPoly | Equation::BeamExp => {
                let c = self.c.unwrap_or(1.0);
                check_wavespeed("c", c)?;
                positive("gamma", self.gamma.unwrap_or(1.0))?;
                if let Some(a) = &self.coefficients {
                    if equation == Equation::BeamExp {
                        return Err(ConfigError::new("coefficients apply to beam-poly only"));
                    }
                    if a.is_empty() || a.iter().any(|x| !x.is_finite() || *x < 0.0) {
                        return Err(ConfigError::new(
                            "coefficients must be a non-empty list of finite non-negative numbers",
                        ));
                    }
                }
                if self.mu.is_some() || self.omega.is_some() {
                    return Err(ConfigError::new("mu and omega apply to the nls equation only"));
                }
            }
            Equation::Nls => {
                let (mu, omega) = (self.mu.unwrap_or(1.0), self.omega.unwrap_or(1.0));
                check_nls(mu, omega)?;
                if self.c.is_some() || self.gamma.is_some() || self.coefficients.is_some() {
                    return Err(ConfigError::new(
                        "c, gamma and coefficients apply to beam equations only",
                    ));
                }
            }
        }

        let t = &self.tolerances;
        positive("tolerances.newton", t.newton)?;
        positive("tolerances.continuation", t.continuation)?;
        positive("tolerances.inner", t.inner)?;
        positive("tolerances.variational", t.variational)?;

        let k = &self.continuation;
        positive("continuation.ds", k.ds)?;
        positive("continuation.ds_min", k.ds_min)?;
        positive("continuation.ds_max", k.ds_max)?;
        if !(k.ds_min <= k.ds && k.ds <= k.ds_max) {
            return Err(ConfigError::new(format!(
                "continuation step sizes must satisfy ds_min <= ds <= ds_max, got {} <= {} <= {}",
                k.ds_min, k.ds, k.ds_max
            )));
        }
        if matches!(self.command, Command::Branch | Command::NlsBranch) {
            let (lo, hi) = (k.param_start.unwrap_or(0.0), k.param_end.unwrap_or(0.0));
            let anchor = k.anchor.unwrap_or(f64::NAN);
            if !(lo < hi) {
                return Err(ConfigError::new(format!(
                    "continuation.param_start must be below param_end, got {lo} and {hi}"
                )));
            }
            if !(lo <= anchor && anchor <= hi) {
                return Err(ConfigError::new(format!(
                    "continuation anchor {anchor} lies outside [{lo}, {hi}]"
                )));
            }
            if equation == Equation::Nls {
                check_nls(self.mu.unwrap_or(1.0), lo)?;
            } else {
                check_wavespeed("continuation.param_start", lo)?;
                check_wavespeed("continuation.param_end", hi)?;
            }
        }

        let e = &self.evolution;
        positive("evolution.t_final", e.t_final)?;
        positive("evolution.dt", e.dt)?;
        if !(e.epsilon.is_finite() && e.epsilon >= 0.0) {
            return Err(ConfigError::new(format!(
                "evolution.epsilon must be >= 0, got {}",
                e.epsilon
            )));
        }
        if e.sample_every == 0 {
            return Err(ConfigError::new("evolution.sample_every must be positive"));
        }
        positive("kernel.x_max", self.kernel.x_max)?;
        if self.kernel.points < 2 {
            return Err(ConfigError::new("kernel.points must be at least 2"));
        }
        positive("variational.lambda", self.variational.lambda)?;
        Ok(())
    }
}

pub fn equation_name(equation: Equation) -> &'static str {
    match equation {
        Equation::BeamPoly => "beam-poly",
        Equation::BeamExp => "beam-exp",
        Equation::Nls => "nls",
    }
}

fn positive(name: &str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(format!("{name} must be positive, got {value}")))
    }
}

fn check_wavespeed(name: &str, c: f64) -> Result<(), ConfigError> {
    if c.is_finite() && (0.0..SQRT_2).contains(&c) {
        Ok(())
    } else {
        Err(ConfigError::new(format!(
            "{name}: wavespeed must satisfy 0 ≤ c < √2 ≈ 1.41421, got {c}"
        )))
    }
}

fn check_nls(mu: f64, omega: f64) -> Result<(), ConfigError> {
    if mu.is_finite() && omega.is_finite() && omega > 0.0 && omega > mu * mu / 4.0 {
        Ok(())
    } else {
        Err(ConfigError::new(format!(
            "nls parameters must satisfy ω > μ²/4 and ω > 0, got μ = {mu}, ω = {omega}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_beam_config() {
        let config = parse_config(r#"{"command": "solve", "c": 1.0}"#).unwrap();
        assert_eq!(config.grid, GridConfig::default());
        assert_eq!(config.equation(), Equation::BeamPoly);
        assert_eq!(config.coefficients, Some(vec![1.0]));
        assert_eq!(config.tolerances, Tolerances::default());
    }

    #[test]
    fn wavespeed_bound() {
        let err = parse_config(r#"{"command": "solve", "c": 1.5}"#).unwrap_err();
        assert!(
            err.message
                .contains("wavespeed must satisfy 0 ≤ c < √2 ≈ 1.41421"),
            "{err}"
        );
    }

    #[test]
    fn nls_bound() {
        let err = parse_config(r#"{"command": "nls-branch", "mu": 1.0, "omega": 0.2}"#).unwrap_err();
        assert!(err.message.contains("ω > μ²/4"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config(r#"{"command": "solve", "speed": 1.0}"#).unwrap_err();
        assert!(err.message.contains("unknown field `speed`"), "{err}");
        let err = parse_config(r#"{"command": "solve", "tolerances": {"newtn": 1e-9}}"#).unwrap_err();
        assert!(err.message.contains("newtn"), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config("{\n  \"command\": \"solve\",\n  \"c\": }").unwrap_err();
        assert!(err.message.starts_with("line 3"), "{err}");
    }

    #[test]
    fn command_equation_mismatch() {
        assert!(parse_config(r#"{"command": "evolve", "equation": "nls"}"#).is_err());
        assert!(parse_config(r#"{"command": "variational", "equation": "beam-exp"}"#).is_err());
        assert!(parse_config(r#"{"command": "solve", "equation": "nls", "c": 1.0}"#).is_err());
    }

    #[test]
    fn branch_defaults() {
        let config = parse_config(r#"{"command": "branch"}"#).unwrap();
        assert_eq!(config.continuation.param_start, Some(0.5));
        assert_eq!(config.continuation.param_end, Some(1.40));
        assert_eq!(config.continuation.anchor, Some(1.0));
        let config = parse_config(r#"{"command": "nls-branch"}"#).unwrap();
        assert_eq!(config.equation(), Equation::Nls);
        assert_eq!(config.continuation.param_start, Some(0.3));
    }

    #[test]
    fn round_trips_through_json() {
        let config = RunConfig::for_command(Command::Evolve);
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(parse_config(&text).unwrap(), config);
    }
}
