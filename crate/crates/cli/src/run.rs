//! Dispatch of a validated config to the solvers, with artifact emission.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use beamwave_core::analysis::{
    decay_rate_theory, fit_decay_rate, fit_envelope, green_kernel, green_kernel_derivative,
    variational_maximize,
};
use beamwave_core::continuation::{
    branch_diagnostics, locate_transition, trace_branch, ContinuationControls, ContinuationCurve,
};
use beamwave_core::dynamics::{evolve, perturbed_wave_initial, EvolutionTermination, EvolveOptions};
use beamwave_core::profile::profile_residual;
use beamwave_core::stability::{eigen_linearization, index_report, EIGEN_TOL};
use beamwave_core::{
    make_grid, solve_wave, BeamParameters, Error, NewtonOptions, NlsParameters, Nonlinearity, PeriodicGrid,
    TravelingWave, WaveParameters,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, Equation, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Residual bound for re-substituting a profile on the doubled grid.
pub const VERIFY_RESIDUAL: f64 = 1e-8;
/// Relative energy drift accepted for bounded evolutions.
pub const VERIFY_DRIFT: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    /// File name to role.
    pub artifacts: BTreeMap<String, String>,
    pub headline: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub status: String,
    pub failure: Option<String>,
    pub exit_code: i32,
}

impl RunReport {
    fn new(config: &RunConfig) -> Self {
        Self {
            config: config.clone(),
            artifacts: BTreeMap::new(),
            headline: BTreeMap::new(),
            checks: Vec::new(),
            status: "ok".into(),
            failure: None,
            exit_code: EXIT_OK,
        }
    }

    fn headline(&mut self, key: &str, value: impl Into<Value>) {
        self.headline.insert(key.to_string(), value.into());
    }

    fn check(&mut self, name: &str, value: f64, threshold: f64, passed: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            value,
            threshold,
            passed,
        });
    }

    fn fail(&mut self, code: i32, message: String) {
        self.status = "failed".into();
        self.failure = Some(message);
        self.exit_code = code;
    }
}

enum RunError {
    Solver(Error),
    Io(std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Solver(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

type Step = std::result::Result<(), RunError>;

/// Runs the configured pipeline, writing artifacts and `report.json` into
/// `config.output_dir`. Failures are recorded in the report.
pub fn run(config: &RunConfig, verify: bool) -> RunReport {
    let mut report = RunReport::new(config);
    let outcome = fs::create_dir_all(&config.output_dir)
        .map_err(RunError::from)
        .and_then(|_| {
            let mut ctx = Context {
                config,
                dir: config.output_dir.clone(),
                report: &mut report,
                verify,
            };
            ctx.dispatch()
        });
    match outcome {
        Ok(()) => {
            if let Some(check) = report.checks.iter().find(|c| !c.passed) {
                let message = format!(
                    "verification `{}` failed: {:.6e} against {:.6e}",
                    check.name, check.value, check.threshold
                );
                report.fail(EXIT_MISMATCH, message);
            }
        }
        Err(RunError::Solver(e @ Error::IndexMismatch { .. })) => report.fail(EXIT_MISMATCH, e.to_string()),
        Err(RunError::Solver(e)) => report.fail(EXIT_SOLVER, e.to_string()),
        Err(RunError::Io(e)) => report.fail(EXIT_SOLVER, format!("i/o: {e}")),
    }
    let path = config.output_dir.join("report.json");
    if let Err(e) = write_json(&path, &report) {
        log::error!("cannot write {}: {e}", path.display());
    }
    report
}

struct Context<'a> {
    config: &'a RunConfig,
    dir: PathBuf,
    report: &'a mut RunReport,
    verify: bool,
}

impl Context<'_> {
    fn dispatch(&mut self) -> Step {
        match self.config.command {
            Command::Solve => self.solve(),
            Command::Branch | Command::NlsBranch => self.branch(),
            Command::Stability => self.stability(),
            Command::Evolve => self.evolve(),
            Command::Kernel => self.kernel(),
            Command::Variational => self.variational(),
        }
    }

    fn grid(&self) -> Result<PeriodicGrid, Error> {
        make_grid(self.config.grid.n_points, self.config.grid.half_length)
    }

    fn parameters(&self) -> Result<WaveParameters, Error> {
        let c = &self.config;
        Ok(match c.equation() {
            Equation::BeamPoly => WaveParameters::Beam(BeamParameters::new(
                c.c.unwrap_or(1.0),
                c.gamma.unwrap_or(1.0),
                Nonlinearity::polynomial(c.coefficients.clone().unwrap_or_else(|| vec![1.0]))?,
            )?),
            Equation::BeamExp => WaveParameters::Beam(BeamParameters::new(
                c.c.unwrap_or(1.0),
                c.gamma.unwrap_or(1.0),
                Nonlinearity::Exponential,
            )?),
            Equation::Nls => {
                WaveParameters::Nls(NlsParameters::new(c.mu.unwrap_or(1.0), c.omega.unwrap_or(1.0))?)
            }
        })
    }

    fn wave(&self) -> Result<TravelingWave, Error> {
        let options = NewtonOptions::with_tol(self.config.tolerances.newton);
        solve_wave(&self.parameters()?, &self.grid()?, &options)
    }

    fn artifact(&mut self, name: &str, role: &str) -> PathBuf {
        self.report.artifacts.insert(name.to_string(), role.to_string());
        self.dir.join(name)
    }

    fn solve(&mut self) -> Step {
        let wave = self.wave()?;
        let path = self.artifact("wave.csv", "profile samples (x, phi)");
        let nodes = wave.grid().nodes();
        write_csv(
            &path,
            &["x", "phi"],
            nodes.iter().zip(wave.profile.values()).map(|(&x, &p)| vec![x, p]),
        )?;
        self.report.headline("residual", wave.residual_sup);
        self.report.headline("sup_phi", wave.profile.sup_norm());
        if let Some(c) = wave.wavespeed() {
            let fit = fit_decay_rate(&wave, None).ok().map(|f| f.rate);
            self.report.headline("decay_rate", fit);
            self.report.headline("decay_rate_theory", decay_rate_theory(c)?);
        }
        if self.verify {
            let fine = make_grid(2 * wave.grid().n_points(), wave.grid().half_length())?;
            let phi = wave.profile.interpolate_to(&fine)?;
            let r = profile_residual(&wave.equation(), &phi).sup_norm();
            self.report
                .check("resubstituted residual", r, VERIFY_RESIDUAL, r < VERIFY_RESIDUAL);
        }
        Ok(())
    }

    fn branch(&mut self) -> Step {
        let k = &self.config.continuation;
        let (lo, hi) = (k.param_start.unwrap_or(0.5), k.param_end.unwrap_or(1.4));
        let anchor = k.anchor.unwrap_or(1.0);
        let params = self.parameters()?.with_continuation_value(anchor)?;
        let options = NewtonOptions::with_tol(self.config.tolerances.newton);
        let start = solve_wave(&params, &self.grid()?, &options)?;
        let controls = ContinuationControls {
            ds_min: k.ds_min,
            ds_max: k.ds_max,
            newton: NewtonOptions::with_tol(self.config.tolerances.continuation),
            ..ContinuationControls::default()
        };
        let mut curve = trace_branch(&start, lo, hi, k.ds, &controls)?;
        branch_diagnostics(&mut curve)?;
        self.write_branch(&curve)?;

        self.report.headline("points", curve.len());
        self.report
            .headline("termination", format!("{:?}", curve.termination));
        self.report.headline("param_min", curve.points[0].parameter);
        self.report
            .headline("param_max", curve.points[curve.len() - 1].parameter);
        if self.config.command == Command::Branch {
            match locate_transition(&curve) {
                Ok(t) => {
                    self.report.headline("c_star", t.c_star);
                    self.report.headline("eigen_crossing", t.eigen_crossing);
                }
                Err(Error::NoTransitionInRange) => {
                    self.report.headline("c_star", Value::Null);
                    self.report.headline("eigen_crossing", Value::Null);
                }
                Err(e) => return Err(e.into()),
            }
        }
        let skipped = curve.points.iter().filter(|p| p.spectrum.is_none()).count();
        self.report.headline("points_without_spectrum", skipped);
        if let Some(p) = curve
            .points
            .iter()
            .find(|p| p.spectrum.is_some_and(|s| !s.identity_ok))
        {
            let s = p.spectrum.expect("filtered on presence");
            return Err(Error::IndexMismatch {
                lhs: s.counts.total(),
                rhs: s.n_l as i64 - s.n_d as i64,
            }
            .into());
        }
        if self.verify {
            let mismatches = curve
                .points
                .iter()
                .filter(|p| match (p.vk_value, p.max_re_lambda) {
                    (Some(vk), Some(re)) => sign_mismatch(vk, re),
                    _ => false,
                })
                .count();
            self.report.check(
                "vk/eigenvalue sign mismatches",
                mismatches as f64,
                0.0,
                mismatches == 0,
            );
        }
        Ok(())
    }

    fn write_branch(&mut self, curve: &ContinuationCurve) -> Step {
        let path = self.artifact("branch.csv", "branch diagnostics per continuation point");
        let nan = f64::NAN;
        if self.config.command == Command::Branch {
            write_csv(
                &path,
                &[
                    "c",
                    "norm_phi_prime_sq",
                    "c_norm_phi_prime_sq",
                    "vk",
                    "max_re_lambda",
                ],
                curve.points.iter().map(|p| {
                    vec![
                        p.parameter,
                        p.diag_norm,
                        p.diag_momentum,
                        p.vk_value.unwrap_or(nan),
                        p.max_re_lambda.unwrap_or(nan),
                    ]
                }),
            )?;
        } else {
            write_csv(
                &path,
                &["omega", "norm_phi_sq", "l_plus_inverse_phi_phi", "max_re_lambda"],
                curve.points.iter().map(|p| {
                    vec![
                        p.parameter,
                        p.diag_momentum,
                        p.vk_value.unwrap_or(nan),
                        p.max_re_lambda.unwrap_or(nan),
                    ]
                }),
            )?;
        }
        Ok(())
    }

    fn stability(&mut self) -> Step {
        let wave = self.wave()?;
        let spectrum = eigen_linearization(&wave)?;
        let path = self.artifact("spectrum.json", "eigenvalues, index counts and verdict");
        let eigenvalues: Vec<[f64; 2]> = spectrum.eigenvalues.iter().map(|z| [z.re, z.im]).collect();
        let kernel: Vec<[f64; 2]> = spectrum.kernel_eigenvalues.iter().map(|z| [z.re, z.im]).collect();
        let internal: Vec<[f64; 2]> = spectrum
            .internal_modes
            .iter()
            .map(|m| [m.lambda.re, m.lambda.im])
            .collect();
        let verdict = spectrum.verdict();
        write_json(
            &path,
            &json!({
                "eigenvalues": eigenvalues,
                "kernel_eigenvalues": kernel,
                "internal_modes": internal,
                "max_re": spectrum.max_re,
                "morse_l_plus": spectrum.morse_l_plus,
                "morse_l_minus": spectrum.morse_l_minus,
                "vk": spectrum.vk_value,
                "counts": {
                    "k_r": spectrum.counts.k_r,
                    "k_c": spectrum.counts.k_c,
                    "k_i_minus": spectrum.counts.k_i_minus,
                },
                "n_l": spectrum.n_l,
                "n_d": spectrum.n_d,
                "verdict": verdict.as_str(),
            }),
        )?;
        self.report.headline("residual", wave.residual_sup);
        self.report.headline("max_re", spectrum.max_re);
        self.report.headline("vk", spectrum.vk_value);
        self.report.headline("verdict", verdict.as_str());
        index_report(&spectrum)?;
        if self.verify {
            let bad = sign_mismatch(spectrum.vk_value, spectrum.max_re);
            self.report
                .check("vk/eigenvalue sign mismatch", bad as u8 as f64, 0.0, !bad);
        }
        Ok(())
    }

    fn evolve(&mut self) -> Step {
        let wave = self.wave()?;
        let params = match &wave.params {
            WaveParameters::Beam(p) => p.clone(),
            WaveParameters::Nls(_) => unreachable!("validated as a beam equation"),
        };
        let e = &self.config.evolution;
        let initial = if e.epsilon > 0.0 {
            let spectrum = eigen_linearization(&wave)?;
            let modes: Vec<_> = spectrum
                .unstable_mode
                .iter()
                .chain(&spectrum.internal_modes)
                .collect();
            let mode = modes.get(e.mode_index).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "mode_index {} but only {} unstable or internal modes",
                    e.mode_index,
                    modes.len()
                ))
            })?;
            self.report
                .headline("mode_lambda", vec![mode.lambda.re, mode.lambda.im]);
            perturbed_wave_initial(&wave, mode, e.epsilon)?
        } else {
            let zero = beamwave_core::RealField::zeros(wave.grid());
            let mode = beamwave_core::stability::Eigenmode {
                lambda: Default::default(),
                v: zero.clone(),
                w: zero,
                localization: 0.0,
                krein: 0.0,
            };
            perturbed_wave_initial(&wave, &mode, 0.0)?
        };
        let options = EvolveOptions {
            inner_tol: self.config.tolerances.inner,
            epsilon: (e.epsilon > 0.0).then_some(e.epsilon),
            ..EvolveOptions::default()
        };
        let summary = evolve(
            &initial,
            e.t_final,
            e.dt,
            &params,
            Some(&wave),
            e.sample_every,
            &options,
        )?;
        let path = self.artifact(
            "evolution.csv",
            "sampled time series (t, hamiltonian, sup_u, deviation)",
        );
        write_csv(
            &path,
            &["t", "hamiltonian", "sup_u", "deviation"],
            summary
                .samples
                .iter()
                .map(|s| vec![s.time, s.hamiltonian, s.sup_u, s.deviation.unwrap_or(f64::NAN)]),
        )?;
        let drift = summary.relative_energy_drift();
        self.report.headline("h_drift", drift);
        self.report.headline("termination", summary.termination.as_str());
        self.report.headline("final_time", summary.final_state.time);
        self.report.headline("max_deviation", summary.max_deviation());
        self.report
            .headline("growth_rate", summary.growth_fit.map(|g| g.rate));
        if self.verify && summary.termination == EvolutionTermination::Completed {
            self.report
                .check("relative energy drift", drift, VERIFY_DRIFT, drift < VERIFY_DRIFT);
        }
        Ok(())
    }

    fn kernel(&mut self) -> Step {
        let c = self.config.c.unwrap_or(1.0);
        let k = &self.config.kernel;
        let path = self.artifact("kernel.csv", "Green's kernel and derivatives (x, K, K1, K2, K3)");
        let xs: Vec<f64> = (0..k.points)
            .map(|i| -k.x_max + 2.0 * k.x_max * i as f64 / (k.points - 1) as f64)
            .collect();
        let mut rows = Vec::with_capacity(xs.len());
        for &x in &xs {
            rows.push(vec![
                x,
                green_kernel(x, c)?,
                green_kernel_derivative(x, c, 1)?,
                green_kernel_derivative(x, c, 2)?,
                green_kernel_derivative(x, c, 3)?,
            ]);
        }
        write_csv(&path, &["x", "K", "K1", "K2", "K3"], rows.into_iter())?;
        let theory = decay_rate_theory(c)?;
        let dense: Vec<f64> = (0..=30_000).map(|i| i as f64 * 1e-3).collect();
        let values = dense
            .iter()
            .map(|&x| green_kernel(x, c))
            .collect::<Result<Vec<_>, _>>()?;
        let fit = fit_envelope(&dense, &values, (5.0, 25.0), 0.0, f64::INFINITY)?;
        self.report.headline("k0", green_kernel(0.0, c)?);
        self.report.headline("decay_rate", fit.rate);
        self.report.headline("decay_rate_theory", theory);
        Ok(())
    }

    fn variational(&mut self) -> Step {
        let c = self.config.c.unwrap_or(1.0);
        let lambda = self.config.variational.lambda;
        let nl = Nonlinearity::polynomial(self.config.coefficients.clone().unwrap_or_else(|| vec![1.0]))?;
        let result = variational_maximize(lambda, c, &nl, &self.grid()?, self.config.tolerances.variational)?;
        let path = self.artifact("variational.json", "constrained maximizer summary");
        write_json(
            &path,
            &json!({
                "lambda": result.lambda,
                "kappa": result.kappa,
                "kappa_rayleigh": result.kappa_rayleigh,
                "M_lambda": result.objective,
                "el_residual": result.el_residual,
                "iterations": result.iterations,
            }),
        )?;
        self.report.headline("kappa", result.kappa);
        self.report.headline("M_lambda", result.objective);
        self.report.headline("el_residual", result.el_residual);
        Ok(())
    }
}

/// Beams are unstable exactly when the VK quantity is positive; NLS
/// standing waves exactly when `<L+^{-1} phi, phi>` is positive.
fn sign_mismatch(vk: f64, max_re: f64) -> bool {
    (vk > 0.0) != (max_re > EIGEN_TOL)
}

/// Fixed-format float: 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_float).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()
}

fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.1), "-1.0000000000000001e-1");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn sign_rule() {
        assert!(!sign_mismatch(1.0, 0.5));
        assert!(!sign_mismatch(-1.0, 1e-6));
        assert!(sign_mismatch(-1.0, 0.5));
        assert!(sign_mismatch(2.0, 0.0));
    }
}
