//! Newton–conjugate-gradient solution of the profile equation, seeded by a
//! homotopy from the explicit second-order soliton.
//!
//! All solves work with the generalized operator
//!
//! ```text
//! alpha phi'''' + mu phi'' + omega phi - gamma F_theta(phi^2) phi = 0
//! ```
//!
//! where `F_theta = (1 - theta) r + theta F(r)` blends the cubic case into a
//! general polynomial. For the exponential family the zeroth-order term is
//! `omega phi + theta (e^phi - 1 - phi) + (1 - theta) phi^2 / 2`, which is the
//! Chen–McKenna term at `theta = 1, omega = 1` and a quadratic nonlinearity
//! with an explicit `sech^2` soliton at `theta = 0`.
//!
//! Iterates are kept even about `x = 0`, which removes the translation mode
//! `phi'` from every linear solve.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{even_part, PeriodicGrid, RealField};
use crate::nonlinearity::{poly_f, poly_f_prime, Nonlinearity};
use crate::params::{Family, WaveParameters};

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileEquation {
    /// Coefficient of `phi''''`.
    pub fourth: f64,
    /// Coefficient of `phi''`.
    pub second: f64,
    /// Coefficient of `phi`.
    pub linear: f64,
    pub gamma: f64,
    pub nonlinearity: Nonlinearity,
    /// Homotopy weight `theta` of the target nonlinearity.
    pub blend: f64,
}

impl ProfileEquation {
    pub fn for_parameters(params: &WaveParameters) -> Self {
        match params {
            WaveParameters::Beam(p) => ProfileEquation {
                fourth: 1.0,
                second: p.wavespeed * p.wavespeed,
                linear: 1.0,
                gamma: if params.is_exponential() { 1.0 } else { p.gamma },
                nonlinearity: p.nonlinearity.clone(),
                blend: 1.0,
            },
            WaveParameters::Nls(p) => ProfileEquation {
                fourth: 1.0,
                second: p.mu,
                linear: p.omega,
                gamma: 1.0,
                nonlinearity: Nonlinearity::cubic(),
                blend: 1.0,
            },
        }
    }

    /// `-phi'' + omega phi - phi^3 = 0`, solved by `sqrt(2 omega) sech(sqrt(omega) x)`.
    pub fn second_order_cubic(omega: f64) -> Self {
        ProfileEquation {
            fourth: 0.0,
            second: -1.0,
            linear: omega,
            gamma: 1.0,
            nonlinearity: Nonlinearity::cubic(),
            blend: 1.0,
        }
    }

    /// Infimum over real `k` of `alpha k^4 - mu k^2 + omega`.
    pub fn symbol_min(&self) -> f64 {
        if self.second <= 0.0 {
            self.linear
        } else if self.fourth > 0.0 {
            self.linear - self.second * self.second / (4.0 * self.fourth)
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn symbol(&self, k: f64) -> f64 {
        let k2 = k * k;
        self.fourth * k2 * k2 - self.second * k2 + self.linear
    }

    /// Sup-norm below which a converged profile counts as the zero solution.
    pub fn trivial_threshold(&self) -> f64 {
        1e-3 * self.symbol_min().max(0.0).sqrt()
    }

    pub fn get(&self, parameter: HomotopyParameter) -> f64 {
        match parameter {
            HomotopyParameter::Fourth => self.fourth,
            HomotopyParameter::Second => self.second,
            HomotopyParameter::Linear => self.linear,
            HomotopyParameter::Gamma => self.gamma,
            HomotopyParameter::Blend => self.blend,
        }
    }

    pub fn set(&mut self, parameter: HomotopyParameter, value: f64) {
        match parameter {
            HomotopyParameter::Fourth => self.fourth = value,
            HomotopyParameter::Second => self.second = value,
            HomotopyParameter::Linear => self.linear = value,
            HomotopyParameter::Gamma => self.gamma = value,
            HomotopyParameter::Blend => self.blend = value,
        }
    }

    pub(crate) fn pointwise(&self) -> Pointwise {
        match &self.nonlinearity {
            Nonlinearity::Polynomial(a) => {
                let mut coeffs: Vec<f64> = a.iter().map(|ak| self.blend * ak).collect();
                coeffs[0] += 1.0 - self.blend;
                Pointwise::Polynomial {
                    linear: self.linear,
                    gamma: self.gamma,
                    coeffs,
                }
            }
            Nonlinearity::Exponential => Pointwise::Exponential {
                linear: self.linear,
                blend: self.blend,
            },
        }
    }
}

impl fmt::Display for ProfileEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={:.6}, mu={:.6}, omega={:.6}, gamma={:.6}, theta={:.6}",
            self.fourth, self.second, self.linear, self.gamma, self.blend
        )
    }
}

pub(crate) enum Pointwise {
    Polynomial {
        linear: f64,
        gamma: f64,
        coeffs: Vec<f64>,
    },
    Exponential {
        linear: f64,
        blend: f64,
    },
}

impl Pointwise {
    pub(crate) fn value(&self, p: f64) -> f64 {
        match self {
            Pointwise::Polynomial {
                linear,
                gamma,
                coeffs,
            } => linear * p - gamma * poly_f(coeffs, p * p) * p,
            Pointwise::Exponential { linear, blend } => {
                linear * p + blend * (p.exp_m1() - p) + (1.0 - blend) * 0.5 * p * p
            }
        }
    }

    pub(crate) fn derivative(&self, p: f64) -> f64 {
        match self {
            Pointwise::Polynomial {
                linear,
                gamma,
                coeffs,
            } => {
                let r = p * p;
                linear - gamma * (poly_f(coeffs, r) + 2.0 * poly_f_prime(coeffs, r) * r)
            }
            Pointwise::Exponential { linear, blend } => linear + blend * p.exp_m1() + (1.0 - blend) * p,
        }
    }
}

/// Discrete residual `alpha D4 phi + mu D2 phi + N(phi)`.
pub fn profile_residual(equation: &ProfileEquation, phi: &RealField) -> RealField {
    let pw = equation.pointwise();
    RealField::from_vec_unchecked(
        phi.grid(),
        residual_values(equation, &pw, phi.grid(), phi.values()),
    )
}

fn residual_values(eq: &ProfileEquation, pw: &Pointwise, grid: &PeriodicGrid, phi: &[f64]) -> Vec<f64> {
    let mut out = grid.apply_even_multiplier(phi, |k| {
        let k2 = k * k;
        eq.fourth * k2 * k2 - eq.second * k2
    });
    for (o, &p) in out.iter_mut().zip(phi) {
        *o += pw.value(p);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_outer: usize,
    pub cg_max_iter: usize,
    /// Inner CG stops at `forcing * min(1, |R|_inf)` relative residual.
    pub forcing: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_outer: 50,
            cg_max_iter: 500,
            forcing: 1e-3,
            max_halvings: 20,
        }
    }
}

impl NewtonOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// A converged solution of a [`ProfileEquation`].
#[derive(Clone, Debug)]
pub struct ProfileSolution {
    pub profile: RealField,
    pub residual_sup: f64,
    pub newton_steps: usize,
    pub cg_iterations: usize,
}

/// Linearization `J = alpha D4 + mu D2 + diag(N'(phi))` with the constant
/// symbol as preconditioner.
pub(crate) struct Jacobian<'a> {
    grid: &'a PeriodicGrid,
    fourth: f64,
    second: f64,
    preconditioner: Vec<f64>,
    diagonal: Vec<f64>,
}

impl<'a> Jacobian<'a> {
    pub(crate) fn new(grid: &'a PeriodicGrid, eq: &ProfileEquation, phi: &[f64]) -> Self {
        let pw = eq.pointwise();
        Self {
            grid,
            fourth: eq.fourth,
            second: eq.second,
            preconditioner: grid.wavenumbers().iter().map(|&k| 1.0 / eq.symbol(k)).collect(),
            diagonal: phi.iter().map(|&p| pw.derivative(p)).collect(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.grid.apply_even_multiplier(x, |k| {
            let k2 = k * k;
            self.fourth * k2 * k2 - self.second * k2
        });
        for ((o, d), xi) in out.iter_mut().zip(&self.diagonal).zip(x) {
            *o += d * xi;
        }
        out
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let mut coeffs = self.grid.forward(r);
        for (z, p) in coeffs.iter_mut().zip(&self.preconditioner) {
            *z *= *p;
        }
        self.grid.inverse(coeffs)
    }

    /// Preconditioned CG for `J x = b` restricted to even fields. `J` is
    /// symmetric but indefinite (one negative direction); CG is run as is
    /// and stopped on breakdown.
    pub(crate) fn solve(&self, b: &[f64], rel_tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
        let n = b.len();
        let b = even_part(self.grid, b);
        let b_norm = dot(&b, &b).sqrt();
        let mut x = vec![0.0; n];
        if b_norm == 0.0 {
            return (x, 0);
        }
        let mut r = b.clone();
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut iterations = 0;
        for it in 0..max_iter {
            iterations = it + 1;
            let ap = self.apply(&p);
            let pap = dot(&p, &ap);
            if pap == 0.0 || !pap.is_finite() {
                break;
            }
            let step = rz / pap;
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            if dot(&r, &r).sqrt() <= rel_tol * b_norm {
                break;
            }
            z = self.precondition(&r);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        (even_part(self.grid, &x), iterations)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Even real fields stored by their cosine coefficients `a_j = (-1)^j f_hat_j`
/// (real and symmetric in `j`). Newton iterates live here rather than in
/// physical space: a node value can only move by one ulp, and a one-ulp
/// change is amplified by `kmax^4` in the residual, while coefficients of
/// the high modes can be arbitrarily small.
pub(crate) struct CosineBasis<'a> {
    grid: &'a PeriodicGrid,
}

impl<'a> CosineBasis<'a> {
    pub(crate) fn new(grid: &'a PeriodicGrid) -> Self {
        Self { grid }
    }

    pub(crate) fn analyze(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        let coeffs = self.grid.forward(values);
        let signed: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(j, z)| if j % 2 == 0 { z.re } else { -z.re })
            .collect();
        (0..n).map(|j| 0.5 * (signed[j] + signed[(n - j) % n])).collect()
    }

    pub(crate) fn synthesize(&self, a: &[f64]) -> Vec<f64> {
        self.synthesize_with(a, |_| 1.0)
    }

    pub(crate) fn synthesize_with(&self, a: &[f64], multiplier: impl Fn(f64) -> f64) -> Vec<f64> {
        let coeffs = a
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
            .map(|(j, (&aj, &k))| {
                let v = aj * multiplier(k);
                Complex64::new(if j % 2 == 0 { v } else { -v }, 0.0)
            })
            .collect();
        even_part(self.grid, &self.grid.inverse(coeffs))
    }

    /// Samples of `phi` and of the residual for coefficients `a`.
    pub(crate) fn residual(&self, eq: &ProfileEquation, pw: &Pointwise, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let phi = self.synthesize(a);
        let mut r = self.synthesize_with(a, |k| {
            let k2 = k * k;
            eq.fourth * k2 * k2 - eq.second * k2
        });
        for (ri, &p) in r.iter_mut().zip(&phi) {
            *ri += pw.value(p);
        }
        (phi, r)
    }
}

/// Newton–CG on a generalized profile equation.
pub fn solve_equation(
    seed: &RealField,
    equation: &ProfileEquation,
    options: &NewtonOptions,
) -> Result<ProfileSolution> {
    if !(options.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if !(equation.symbol_min() > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "profile symbol is not positive ({equation}); no decaying wave exists"
        )));
    }
    let grid = seed.grid();
    let basis = CosineBasis::new(grid);
    let pw = equation.pointwise();
    let mut coeffs = basis.analyze(seed.values());
    let (mut phi, mut residual) = basis.residual(equation, &pw, &coeffs);
    let mut res_sup = sup(&residual);
    let mut newton_steps = 0;
    let mut cg_iterations = 0;

    while res_sup >= options.tol {
        if newton_steps >= options.max_outer {
            return Err(Error::NoConvergence {
                iterations: newton_steps,
                residual: res_sup,
            });
        }
        newton_steps += 1;
        let jacobian = Jacobian::new(grid, equation, &phi);
        let rhs: Vec<f64> = residual.iter().map(|r| -r).collect();
        let rel_tol = (options.forcing * res_sup.min(1.0)).max(1e-14);
        let (delta, its) = jacobian.solve(&rhs, rel_tol, options.cg_max_iter);
        cg_iterations += its;
        let delta = basis.analyze(&delta);

        let merit = dot(&residual, &residual);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            let trial: Vec<f64> = coeffs.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
            let (trial_phi, trial_residual) = basis.residual(equation, &pw, &trial);
            if dot(&trial_residual, &trial_residual) < merit {
                accepted = Some((trial, trial_phi, trial_residual));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, trial_phi, trial_residual)) => {
                coeffs = trial;
                phi = trial_phi;
                residual = trial_residual;
                res_sup = sup(&residual);
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: newton_steps,
                    residual: res_sup,
                })
            }
        }
        log::trace!("newton step {newton_steps}: residual {res_sup:.3e}, cg {its}");
    }

    if newton_steps == 0 {
        phi = even_part(grid, seed.values());
    }
    let sup_norm = sup(&phi);
    if sup_norm < equation.trivial_threshold() {
        return Err(Error::TrivialSolution { sup_norm });
    }
    Ok(ProfileSolution {
        profile: RealField::from_vec_unchecked(grid, phi),
        residual_sup: res_sup,
        newton_steps,
        cg_iterations,
    })
}

/// A converged traveling-wave (or standing-wave) profile.
#[derive(Clone, Debug)]
pub struct TravelingWave {
    pub profile: RealField,
    pub params: WaveParameters,
    pub residual_sup: f64,
    /// Whether `max |phi|` sits at `x = 0`.
    pub centered: bool,
}

impl TravelingWave {
    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.profile.grid()
    }

    pub fn equation(&self) -> ProfileEquation {
        ProfileEquation::for_parameters(&self.params)
    }

    /// `c` for beam waves.
    pub fn wavespeed(&self) -> Option<f64> {
        match &self.params {
            WaveParameters::Beam(p) => Some(p.wavespeed),
            WaveParameters::Nls(_) => None,
        }
    }

    /// Wraps a given profile without solving, recording its discrete residual.
    pub fn from_profile(profile: RealField, params: WaveParameters) -> Self {
        let residual_sup = profile_residual(&ProfileEquation::for_parameters(&params), &profile).sup_norm();
        let centered = is_centered(&profile);
        TravelingWave {
            profile,
            params,
            residual_sup,
            centered,
        }
    }

    pub(crate) fn from_solution(solution: ProfileSolution, params: WaveParameters) -> Self {
        let centered = is_centered(&solution.profile);
        TravelingWave {
            profile: solution.profile,
            params,
            residual_sup: solution.residual_sup,
            centered,
        }
    }
}

fn is_centered(phi: &RealField) -> bool {
    let values = phi.values();
    let peak = phi.sup_norm();
    (values[phi.grid().origin_index()].abs() - peak).abs() <= 1e-12 * peak.max(1.0)
}

/// `sqrt(2 omega) sech(sqrt(omega) x)`.
pub fn seed_profile(grid: &PeriodicGrid, omega: f64) -> Result<RealField> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "omega must be positive, got {omega}"
        )));
    }
    let amplitude = (2.0 * omega).sqrt();
    let rate = omega.sqrt();
    Ok(grid.sample(|x| amplitude / (rate * x).cosh()))
}

/// `-3 omega sech^2(sqrt(omega) x / 2)`, the soliton of `-phi'' + omega phi + phi^2 / 2 = 0`.
pub fn seed_profile_quadratic(grid: &PeriodicGrid, omega: f64) -> Result<RealField> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "omega must be positive, got {omega}"
        )));
    }
    let rate = 0.5 * omega.sqrt();
    Ok(grid.sample(|x| -3.0 * omega / (rate * x).cosh().powi(2)))
}

/// Newton–CG solve of the family equation from `seed`.
pub fn newton_cg_solve(
    seed: &RealField,
    params: &WaveParameters,
    options: &NewtonOptions,
) -> Result<TravelingWave> {
    let solution = solve_equation(seed, &ProfileEquation::for_parameters(params), options)?;
    Ok(TravelingWave::from_solution(solution, params.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomotopyParameter {
    Fourth,
    Second,
    Linear,
    Gamma,
    Blend,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomotopyStage {
    pub parameter: HomotopyParameter,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Seed {
    Sech { omega: f64 },
    SechSquared { omega: f64 },
}

impl Seed {
    pub fn sample(&self, grid: &PeriodicGrid) -> Result<RealField> {
        match *self {
            Seed::Sech { omega } => seed_profile(grid, omega),
            Seed::SechSquared { omega } => seed_profile_quadratic(grid, omega),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyPlan {
    pub seed: Seed,
    /// Equation solved by the seed; stages move one coefficient at a time.
    pub start: ProfileEquation,
    pub stages: Vec<HomotopyStage>,
}

fn stage(parameter: HomotopyParameter, start: f64, end: f64, max_increment: f64) -> HomotopyStage {
    let steps = ((end - start).abs() / max_increment).ceil().max(1.0) as usize;
    HomotopyStage {
        parameter,
        start,
        end,
        steps,
    }
}

impl HomotopyPlan {
    /// Default route from the second-order soliton to the family equation:
    /// switch on the fourth derivative with `mu = -1`, move `mu` to its target,
    /// then blend the nonlinearity and `gamma`.
    pub fn for_parameters(params: &WaveParameters) -> Self {
        use HomotopyParameter::*;
        let target = ProfileEquation::for_parameters(params);
        match params {
            WaveParameters::Beam(_) if params.is_exponential() => {
                // The sech^2 branch of the quadratic problem is blended into
                // the exponential one at small amplitude, near the top of the
                // wavespeed window.
                let blend_second = target.second.max(1.3 * 1.3);
                let mut start = target.clone();
                start.fourth = 0.0;
                start.second = -1.0;
                start.blend = 0.0;
                let mut stages = vec![
                    stage(Fourth, 0.0, 1.0, 0.1),
                    stage(Second, -1.0, blend_second, 0.1),
                    stage(Blend, 0.0, 1.0, 0.1),
                ];
                if blend_second != target.second {
                    stages.push(stage(Second, blend_second, target.second, 0.05));
                }
                HomotopyPlan {
                    seed: Seed::SechSquared { omega: 1.0 },
                    start,
                    stages,
                }
            }
            WaveParameters::Beam(p) => {
                let mut start = target.clone();
                start.fourth = 0.0;
                start.second = -1.0;
                start.gamma = 1.0;
                start.blend = 0.0;
                let mut stages = vec![
                    stage(Fourth, 0.0, 1.0, 0.1),
                    stage(Second, -1.0, target.second, 0.1),
                ];
                if !p.nonlinearity.is_cubic() {
                    stages.push(stage(Blend, 0.0, 1.0, 0.1));
                } else {
                    start.blend = 1.0;
                }
                if p.gamma != 1.0 {
                    stages.push(stage(Gamma, 1.0, p.gamma, 0.1));
                }
                HomotopyPlan {
                    seed: Seed::Sech { omega: 1.0 },
                    start,
                    stages,
                }
            }
            WaveParameters::Nls(p) => {
                let mut start = target.clone();
                start.fourth = 0.0;
                start.second = -1.0;
                HomotopyPlan {
                    seed: Seed::Sech { omega: p.omega },
                    start,
                    stages: vec![
                        stage(Fourth, 0.0, 1.0, 0.1),
                        stage(Second, -1.0, target.second, 0.1),
                    ],
                }
            }
        }
    }

    /// Plan for an arbitrary generalized target, reached from the cubic
    /// second-order soliton (used to probe targets outside the family windows).
    pub fn for_equation(target: &ProfileEquation) -> Self {
        use HomotopyParameter::*;
        let mut start = target.clone();
        start.fourth = 0.0;
        start.second = -1.0;
        start.linear = 1.0;
        HomotopyPlan {
            seed: Seed::Sech { omega: 1.0 },
            start,
            stages: vec![
                stage(Fourth, 0.0, target.fourth, 0.1),
                stage(Linear, 1.0, target.linear, 0.1),
                stage(Second, -1.0, target.second, 0.1),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut current = self.start.clone();
        for (i, s) in self.stages.iter().enumerate() {
            if s.steps == 0 {
                return Err(Error::InvalidArgument(format!("stage {i} has zero steps")));
            }
            if !(s.start.is_finite() && s.end.is_finite()) {
                return Err(Error::InvalidArgument(format!("stage {i} has non-finite bounds")));
            }
            let now = current.get(s.parameter);
            if (now - s.start).abs() > 1e-12 * (1.0 + now.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "stage {i} starts {:?} at {} but the chain is at {now}",
                    s.parameter, s.start
                )));
            }
            current.set(s.parameter, s.end);
        }
        Ok(())
    }

    /// Equation reached at the end of the plan.
    pub fn target(&self) -> ProfileEquation {
        let mut eq = self.start.clone();
        for s in &self.stages {
            eq.set(s.parameter, s.end);
        }
        eq
    }
}

/// Runs the plan, solving at every intermediate parameter value from the
/// previous converged profile.
pub fn homotopy_solve(
    plan: &HomotopyPlan,
    grid: &PeriodicGrid,
    options: &NewtonOptions,
) -> Result<ProfileSolution> {
    plan.validate()?;
    let mut equation = plan.start.clone();
    let seed = plan.seed.sample(grid)?;
    let mut current = solve_equation(&seed, &equation, options).map_err(|e| Error::HomotopyBroken {
        stage: 0,
        last_good: "seed".into(),
        source: Box::new(e),
    })?;
    for (index, s) in plan.stages.iter().enumerate() {
        for step in 1..=s.steps {
            let last_good = equation.to_string();
            let value = s.start + (s.end - s.start) * step as f64 / s.steps as f64;
            equation.set(s.parameter, value);
            current =
                solve_equation(&current.profile, &equation, options).map_err(|e| Error::HomotopyBroken {
                    stage: index,
                    last_good,
                    source: Box::new(e),
                })?;
        }
        log::debug!("homotopy stage {index} done: {equation}");
    }
    Ok(current)
}

/// Computes the wave for `params` on `grid` through the default homotopy.
pub fn solve_wave(
    params: &WaveParameters,
    grid: &PeriodicGrid,
    options: &NewtonOptions,
) -> Result<TravelingWave> {
    let plan = HomotopyPlan::for_parameters(params);
    let solution = homotopy_solve(&plan, grid, options)?;
    newton_cg_solve(&solution.profile, params, options)
}
