//! Lab-frame evolution of `u_tt + u_xxxx + u - g(u) = 0` as the Hamiltonian
//! pair `u_t = v`, `v_t = -(d^4 + 1) u + g(u)` with the 2-stage Gauss–Legendre
//! method.
//!
//! The potential is `W(u) = u^2/2 - (gamma/2) G(u^2)` for polynomial
//! nonlinearities and `e^u - 1 - u` for the exponential one, so that
//! `g(u) = u - W'(u)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, RealField};
use crate::params::BeamParameters;
use crate::profile::TravelingWave;
use crate::stability::Eigenmode;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_INNER_TOL: f64 = 1e-13;
pub const DEFAULT_INNER_MAX: usize = 100;
pub const BLOWUP_THRESHOLD: f64 = 1e6;

const SQRT3_6: f64 = 0.288_675_134_594_812_9;
/// Gauss–Legendre Butcher matrix; both weights are 1/2.
const A: [[f64; 2]; 2] = [[0.25, 0.25 - SQRT3_6], [0.25 + SQRT3_6, 0.25]];

#[derive(Clone, Debug)]
pub struct EvolutionState {
    pub u: RealField,
    pub v: RealField,
    pub time: f64,
    pub hamiltonian: f64,
}

impl EvolutionState {
    pub fn new(u: RealField, v: RealField, time: f64, params: &BeamParameters) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::InvalidArgument("u and v live on different grids".into()));
        }
        let hamiltonian = hamiltonian(&u, &v, params);
        Ok(Self {
            u,
            v,
            time,
            hamiltonian,
        })
    }

    pub fn zero(grid: &PeriodicGrid, params: &BeamParameters) -> Self {
        let z = RealField::zeros(grid);
        Self {
            u: z.clone(),
            v: z,
            time: 0.0,
            hamiltonian: hamiltonian(&RealField::zeros(grid), &RealField::zeros(grid), params),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.u.grid()
    }
}

fn hamiltonian(u: &RealField, v: &RealField, params: &BeamParameters) -> f64 {
    let grid = u.grid();
    let uxx = grid.derivative(u.values(), 2).expect("order 2 is valid");
    let density: Vec<f64> = u
        .values()
        .iter()
        .zip(v.values())
        .zip(&uxx)
        .map(|((&u, &v), &d2)| {
            0.5 * v * v + 0.5 * d2 * d2 + params.nonlinearity.potential_energy(params.gamma, u)
        })
        .collect();
    grid.integrate(&density)
}

/// `h sum [v^2/2 + u_xx^2/2 + W(u)]`, recomputed from the fields.
pub fn energy(state: &EvolutionState, params: &BeamParameters) -> f64 {
    hamiltonian(&state.u, &state.v, params)
}

fn forcing(params: &BeamParameters, u: f64) -> f64 {
    u - params.nonlinearity.zeroth_order(params.gamma, u)
}

/// One Gauss–Legendre step. The stage values are found by fixed-point
/// iteration on the nonlinear forcing, with the linear part inverted
/// exactly mode by mode. Negative `dt` steps backwards.
pub fn irk_gauss4_step(
    state: &EvolutionState,
    dt: f64,
    params: &BeamParameters,
    inner_tol: f64,
    inner_max: usize,
) -> Result<EvolutionState> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be finite and nonzero, got {dt}"
        )));
    }
    if !(inner_tol > 0.0) || inner_max == 0 {
        return Err(Error::InvalidArgument(
            "inner tolerance and cap must be positive".into(),
        ));
    }
    let grid = state.grid();
    let n = grid.n_points();
    let u_hat = grid.forward(state.u.values());
    let v_hat = grid.forward(state.v.values());
    let symbol: Vec<f64> = grid.wavenumbers().iter().map(|&k| k.powi(4) + 1.0).collect();

    let a2 = mat_mul(&A, &A);
    let row_sum = [A[0][0] + A[0][1], A[1][0] + A[1][1]];
    // (I + dt^2 s A^2)^{-1} per mode.
    let inverses: Vec<[[f64; 2]; 2]> = symbol
        .iter()
        .map(|&s| {
            let t = dt * dt * s;
            let m = [
                [1.0 + t * a2[0][0], t * a2[0][1]],
                [t * a2[1][0], 1.0 + t * a2[1][1]],
            ];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
        })
        .collect();

    let mut stages = [state.u.values().to_vec(), state.u.values().to_vec()];
    let mut g_hat = [Vec::new(), Vec::new()];
    let mut u_stage_hat = [vec![Complex64::default(); n], vec![Complex64::default(); n]];
    let mut change = f64::INFINITY;
    let mut converged = false;
    for _ in 0..inner_max {
        for i in 0..2 {
            let g: Vec<f64> = stages[i].iter().map(|&u| forcing(params, u)).collect();
            g_hat[i] = grid.forward(&g);
        }
        for j in 0..n {
            let rhs = [0, 1].map(|i| {
                u_hat[j]
                    + v_hat[j] * (dt * row_sum[i])
                    + (g_hat[0][j] * a2[i][0] + g_hat[1][j] * a2[i][1]) * (dt * dt)
            });
            let inv = &inverses[j];
            u_stage_hat[0][j] = rhs[0] * inv[0][0] + rhs[1] * inv[0][1];
            u_stage_hat[1][j] = rhs[0] * inv[1][0] + rhs[1] * inv[1][1];
        }
        let mut scale = 1.0f64;
        change = 0.0;
        for i in 0..2 {
            let next = grid.inverse(u_stage_hat[i].clone());
            for (old, new) in stages[i].iter().zip(&next) {
                change = change.max((old - new).abs());
                scale = scale.max(new.abs());
            }
            stages[i] = next;
        }
        if !change.is_finite() {
            break;
        }
        if change <= inner_tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::StageNonConvergence {
            time: state.time,
            change,
        });
    }
    // Forcing at the converged stages, then the stage velocities.
    for i in 0..2 {
        let g: Vec<f64> = stages[i].iter().map(|&u| forcing(params, u)).collect();
        g_hat[i] = grid.forward(&g);
    }
    let mut u_new = vec![Complex64::default(); n];
    let mut v_new = vec![Complex64::default(); n];
    for j in 0..n {
        let s = symbol[j];
        let accel = [0, 1].map(|i| g_hat[i][j] - u_stage_hat[i][j] * s);
        let vel = [0, 1].map(|i| v_hat[j] + (accel[0] * A[i][0] + accel[1] * A[i][1]) * dt);
        u_new[j] = u_hat[j] + (vel[0] + vel[1]) * (0.5 * dt);
        v_new[j] = v_hat[j] + (accel[0] + accel[1]) * (0.5 * dt);
    }
    let u = RealField::new(grid, grid.inverse(u_new))?;
    let v = RealField::new(grid, grid.inverse(v_new))?;
    EvolutionState::new(u, v, state.time + dt, params)
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Lab-frame data `(phi + eps v, -c phi' + eps w)` at `t = 0`.
pub fn perturbed_wave_initial(
    wave: &TravelingWave,
    mode: &Eigenmode,
    epsilon: f64,
) -> Result<EvolutionState> {
    let params = beam_parameters(wave)?;
    if !epsilon.is_finite() {
        return Err(Error::NonFinite);
    }
    let phi = &wave.profile;
    let dphi = crate::grid::differentiate(phi, 1)?;
    let u = phi.axpy(epsilon, &mode.v);
    let v = dphi.scaled(-params.wavespeed).axpy(epsilon, &mode.w);
    EvolutionState::new(u, v, 0.0, &params)
}

fn beam_parameters(wave: &TravelingWave) -> Result<BeamParameters> {
    match &wave.params {
        crate::params::WaveParameters::Beam(p) => Ok(p.clone()),
        crate::params::WaveParameters::Nls(_) => Err(Error::UnsupportedForFamily("nls")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionSample {
    pub time: f64,
    pub hamiltonian: f64,
    pub sup_u: f64,
    /// `min_s |u - phi(. - s)|_2`, when a reference wave is given.
    pub deviation: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthFit {
    pub rate: f64,
    pub window: (f64, f64),
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvolutionTermination {
    Completed,
    Blowup { time: f64 },
    StageNonConvergence { time: f64, change: f64 },
}

impl EvolutionTermination {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvolutionTermination::Completed => "completed",
            EvolutionTermination::Blowup { .. } => "blowup",
            EvolutionTermination::StageNonConvergence { .. } => "stage-nonconvergence",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionSummary {
    pub samples: Vec<EvolutionSample>,
    pub growth_fit: Option<GrowthFit>,
    pub termination: EvolutionTermination,
    pub final_state: EvolutionState,
}

impl EvolutionSummary {
    /// `max |H(t) - H(0)| / |H(0)|` over the samples.
    pub fn relative_energy_drift(&self) -> f64 {
        let h0 = self.samples[0].hamiltonian;
        let scale = if h0 == 0.0 { 1.0 } else { h0.abs() };
        self.samples
            .iter()
            .map(|s| (s.hamiltonian - h0).abs() / scale)
            .fold(0.0, f64::max)
    }

    pub fn max_deviation(&self) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| s.deviation)
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub inner_tol: f64,
    pub inner_max: usize,
    pub blowup_threshold: f64,
    /// Perturbation size defining the growth-fit window `[10 eps, 100 eps]`;
    /// the initial deviation is used when absent.
    pub epsilon: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            inner_tol: DEFAULT_INNER_TOL,
            inner_max: DEFAULT_INNER_MAX,
            blowup_threshold: BLOWUP_THRESHOLD,
            epsilon: None,
        }
    }
}

/// Steps `initial` to time `T`, sampling every `sample_every` steps. The step
/// count is `ceil(T / dt)` with the step shrunk to land on `T`.
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    initial: &EvolutionState,
    t_final: f64,
    dt: f64,
    params: &BeamParameters,
    wave_reference: Option<&TravelingWave>,
    sample_every: usize,
    options: &EvolveOptions,
) -> Result<EvolutionSummary> {
    if !(t_final.is_finite() && t_final > 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need T > 0 and dt > 0, got T = {t_final}, dt = {dt}"
        )));
    }
    if sample_every == 0 {
        return Err(Error::InvalidArgument("sample_every must be positive".into()));
    }
    if let Some(w) = wave_reference {
        if w.grid() != initial.grid() {
            return Err(Error::InvalidArgument(
                "reference wave lives on another grid".into(),
            ));
        }
    }
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let matcher = wave_reference.map(|w| ShiftMatcher::new(&w.profile));

    let sample = |s: &EvolutionState| EvolutionSample {
        time: s.time,
        hamiltonian: s.hamiltonian,
        sup_u: s.u.sup_norm(),
        deviation: matcher.as_ref().map(|m| m.deviation(&s.u)),
    };
    let mut samples = vec![sample(initial)];
    let mut state = initial.clone();
    let mut termination = EvolutionTermination::Completed;
    for step in 1..=steps {
        match irk_gauss4_step(&state, dt, params, options.inner_tol, options.inner_max) {
            Ok(mut next) => {
                // Avoid accumulating roundoff in the clock.
                next.time = initial.time + step as f64 * dt;
                state = next;
            }
            Err(Error::StageNonConvergence { time, change }) => {
                log::warn!("stage iteration failed at t = {time}: change {change:.3e}");
                termination = EvolutionTermination::StageNonConvergence { time, change };
                break;
            }
            Err(Error::NonFinite) => {
                termination = EvolutionTermination::Blowup {
                    time: state.time + dt,
                };
                break;
            }
            Err(e) => return Err(e),
        }
        let sup = state.u.sup_norm();
        if !(sup <= options.blowup_threshold) || !state.hamiltonian.is_finite() {
            termination = EvolutionTermination::Blowup { time: state.time };
            samples.push(sample(&state));
            break;
        }
        if step % sample_every == 0 || step == steps {
            samples.push(sample(&state));
        }
    }
    if !matches!(termination, EvolutionTermination::Blowup { .. })
        && samples.last().map(|s| s.time) != Some(state.time)
    {
        samples.push(sample(&state));
    }
    let epsilon = options
        .epsilon
        .or_else(|| samples[0].deviation.filter(|&d| d > 0.0));
    let growth_fit = epsilon.and_then(|eps| fit_growth(&samples, 10.0 * eps, 100.0 * eps));
    Ok(EvolutionSummary {
        samples,
        growth_fit,
        termination,
        final_state: state,
    })
}

/// Least-squares rate of `log deviation` over the first excursion through `[lo, hi]`.
pub fn fit_growth(samples: &[EvolutionSample], lo: f64, hi: f64) -> Option<GrowthFit> {
    let start = samples
        .iter()
        .position(|s| s.deviation.is_some_and(|d| d >= lo))?;
    let points: Vec<(f64, f64)> = samples[start..]
        .iter()
        .map_while(|s| {
            s.deviation
                .filter(|&d| d <= hi && d > 0.0)
                .map(|d| (s.time, d.ln()))
        })
        .collect();
    if points.len() < 3 {
        return None;
    }
    let (slope, _) = least_squares(&points);
    Some(GrowthFit {
        rate: slope,
        window: (points[0].0, points[points.len() - 1].0),
        points: points.len(),
    })
}

/// Slope and intercept of the least-squares line through `points`.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Best translate of a reference profile by cross-correlation.
pub struct ShiftMatcher {
    reference: RealField,
    coeffs: Vec<Complex64>,
}

impl ShiftMatcher {
    pub fn new(reference: &RealField) -> Self {
        Self {
            reference: reference.clone(),
            coeffs: reference.grid().forward(reference.values()),
        }
    }

    /// Shift `s` maximizing `<u, phi(. - s)>`, in `[-L, L)`.
    pub fn best_shift(&self, u: &RealField) -> f64 {
        let grid = u.grid();
        let n = grid.n_points();
        let u_hat = grid.forward(u.values());
        // corr(s) = sum_j u_hat_j conj(phi_hat_j) e^{i k_j s}
        let z: Vec<Complex64> = u_hat
            .iter()
            .zip(&self.coeffs)
            .map(|(a, b)| a * b.conj())
            .collect();
        let on_grid = grid.inverse(z.clone());
        let m = (0..n)
            .max_by(|&a, &b| on_grid[a].total_cmp(&on_grid[b]))
            .unwrap_or(0);
        let two_l = 2.0 * grid.half_length();
        let mut s = m as f64 * grid.spacing();
        let nyquist = grid.nyquist_index();
        for _ in 0..20 {
            let (mut d1, mut d2) = (0.0, 0.0);
            for (j, (zj, &k)) in z.iter().zip(grid.wavenumbers()).enumerate() {
                if j == nyquist {
                    continue;
                }
                let e = zj * Complex64::from_polar(1.0, k * s);
                d1 -= k * e.im;
                d2 -= k * k * e.re;
            }
            if d2 >= 0.0 {
                break;
            }
            let step = (-d1 / d2).clamp(-grid.spacing(), grid.spacing());
            s += step;
            if step.abs() < 1e-14 * two_l {
                break;
            }
        }
        s -= two_l * ((s + grid.half_length()) / two_l).floor();
        s
    }

    pub fn deviation(&self, u: &RealField) -> f64 {
        let s = self.best_shift(u);
        let shifted = self.reference.shifted(s);
        u.axpy(-1.0, &shifted).norm_sq().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::nonlinearity::Nonlinearity;
    use std::f64::consts::PI;

    fn linear() -> BeamParameters {
        BeamParameters {
            wavespeed: 0.0,
            gamma: 0.0,
            nonlinearity: Nonlinearity::cubic(),
        }
    }

    #[test]
    fn energy_of_cosine() {
        let grid = make_grid(64, PI).unwrap();
        let u = grid.sample(f64::cos);
        let state = EvolutionState::new(u, RealField::zeros(&grid), 0.0, &linear()).unwrap();
        assert!((state.hamiltonian - PI).abs() < 1e-12);
        assert_eq!(EvolutionState::zero(&grid, &linear()).hamiltonian, 0.0);
    }

    #[test]
    fn single_mode_oscillates_at_dispersion_frequency() {
        let grid = make_grid(32, PI).unwrap();
        let k = 2.0;
        let params = linear();
        let mut state = EvolutionState::new(
            grid.sample(|x| (k * x).cos()),
            RealField::zeros(&grid),
            0.0,
            &params,
        )
        .unwrap();
        let dt = 0.01;
        for _ in 0..100 {
            state = irk_gauss4_step(&state, dt, &params, 1e-14, 100).unwrap();
        }
        let omega = (k.powi(4) + 1.0f64).sqrt();
        let expected = grid.sample(|x| (omega * state.time).cos() * (k * x).cos());
        let err = state.u.axpy(-1.0, &expected).sup_norm();
        // Global error of order (omega dt)^4 omega T / 2880.
        assert!(err < 1e-6, "err {err}");
        let h0 = PI * (1.0 + k.powi(4)) / 2.0;
        assert!((state.hamiltonian - h0).abs() < 1e-12 * h0);
    }

    #[test]
    fn zero_state_stays_zero() {
        let grid = make_grid(32, 10.0).unwrap();
        let params = BeamParameters::cubic(1.0).unwrap();
        let state = EvolutionState::zero(&grid, &params);
        let next = irk_gauss4_step(&state, 0.1, &params, 1e-13, 100).unwrap();
        assert!(next.u.values().iter().chain(next.v.values()).all(|&x| x == 0.0));
    }

    #[test]
    fn reversible() {
        let grid = make_grid(64, 10.0).unwrap();
        let params = BeamParameters::cubic(1.0).unwrap();
        let u = grid.sample(|x| 1.2 / x.cosh());
        let v = grid.sample(|x| 0.3 * x.tanh() / x.cosh());
        let state = EvolutionState::new(u, v, 0.0, &params).unwrap();
        let tol = 1e-13;
        let fwd = irk_gauss4_step(&state, 0.01, &params, tol, 100).unwrap();
        let back = irk_gauss4_step(&fwd, -0.01, &params, tol, 100).unwrap();
        let err = back
            .u
            .axpy(-1.0, &state.u)
            .sup_norm()
            .max(back.v.axpy(-1.0, &state.v).sup_norm());
        assert!(err < 10.0 * tol * 10.0, "err {err}");
        assert!(back.time.abs() < 1e-15);
    }

    #[test]
    fn nonlinear_energy_drift() {
        let grid = make_grid(128, 15.0).unwrap();
        let params = BeamParameters::cubic(0.5).unwrap();
        let u = grid.sample(|x| 0.8 / x.cosh());
        let state = EvolutionState::new(u, RealField::zeros(&grid), 0.0, &params).unwrap();
        let summary = evolve(&state, 1.0, 1e-3, &params, None, 100, &EvolveOptions::default()).unwrap();
        assert_eq!(summary.termination, EvolutionTermination::Completed);
        assert_eq!(summary.samples.len(), 11);
        assert!(summary.relative_energy_drift() < 1e-9);
        let recomputed = energy(&summary.final_state, &params);
        assert!((recomputed - summary.final_state.hamiltonian).abs() < 1e-12);
    }

    #[test]
    fn stage_failure_is_reported() {
        let grid = make_grid(32, 10.0).unwrap();
        let params = BeamParameters::cubic(1.0).unwrap();
        let u = grid.sample(|x| 50.0 / x.cosh());
        let state = EvolutionState::new(u, RealField::zeros(&grid), 0.0, &params).unwrap();
        let err = irk_gauss4_step(&state, 0.5, &params, 1e-13, 5).unwrap_err();
        assert!(matches!(err, Error::StageNonConvergence { .. }));
        let summary = evolve(
            &state,
            1.0,
            0.5,
            &params,
            None,
            1,
            &EvolveOptions {
                inner_max: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            summary.termination,
            EvolutionTermination::StageNonConvergence { .. }
        ));
        assert_eq!(summary.samples.len(), 1);
    }

    #[test]
    fn shift_matcher_recovers_translation() {
        let grid = make_grid(256, 20.0).unwrap();
        let phi = grid.sample(|x| 1.0 / x.cosh());
        let matcher = ShiftMatcher::new(&phi);
        for &s in &[0.0, 0.3, -4.71, 19.9] {
            let moved = phi.shifted(s);
            let found = matcher.best_shift(&moved);
            let wrapped = (found - s + 20.0).rem_euclid(40.0) - 20.0;
            assert!(wrapped.abs() < 1e-10, "s {s} found {found}");
            assert!(matcher.deviation(&moved) < 1e-10);
        }
    }

    #[test]
    fn growth_fit_on_exponential() {
        let samples: Vec<EvolutionSample> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.1;
                EvolutionSample {
                    time: t,
                    hamiltonian: 0.0,
                    sup_u: 1.0,
                    deviation: Some(1e-3 * (0.9 * t).exp()),
                }
            })
            .collect();
        let fit = fit_growth(&samples, 1e-2, 1e-1).unwrap();
        assert!((fit.rate - 0.9).abs() < 1e-10);
        assert!(fit.window.0 >= 2.5 && fit.window.1 <= 5.2);
    }
}
