//! Pseudo-arclength continuation of wave branches in the wavespeed `c`
//! (beam families) or the frequency `omega` (NLS).
//!
//! The unknowns are the even profile and the parameter. Each corrector step
//! is a bordered Newton solve assembled from two CG solves with the profile
//! Jacobian; evenness of the profile is the phase condition.

use crate::error::{Error, Result};
use crate::grid::{differentiate, PeriodicGrid, RealField};
use crate::params::WaveParameters;
use crate::profile::{solve_equation, CosineBasis, Jacobian, NewtonOptions, ProfileEquation, TravelingWave};
use crate::stability::{eigen_linearization, IndexCounts, Verdict, EIGEN_TOL};

#[derive(Clone, Debug)]
pub struct BranchPoint {
    /// `c` or `omega`.
    pub parameter: f64,
    pub wave: TravelingWave,
    /// `|phi'|^2`.
    pub diag_norm: f64,
    /// `c |phi'|^2` (beam) or `|phi|^2` (NLS).
    pub diag_momentum: f64,
    pub vk_value: Option<f64>,
    pub max_re_lambda: Option<f64>,
    pub spectrum: Option<PointSpectrum>,
}

/// Index data of a branch point's linearization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSpectrum {
    pub counts: IndexCounts,
    pub n_l: usize,
    pub n_d: usize,
    pub identity_ok: bool,
    pub verdict: Verdict,
}

impl BranchPoint {
    pub fn new(wave: TravelingWave) -> Result<Self> {
        let parameter = wave.params.continuation_value();
        let (diag_norm, diag_momentum) = diagnostics(&wave)?;
        Ok(Self {
            parameter,
            wave,
            diag_norm,
            diag_momentum,
            vk_value: None,
            max_re_lambda: None,
            spectrum: None,
        })
    }
}

fn diagnostics(wave: &TravelingWave) -> Result<(f64, f64)> {
    let norm = differentiate(&wave.profile, 1)?.norm_sq();
    let momentum = match &wave.params {
        WaveParameters::Beam(p) => p.wavespeed * norm,
        WaveParameters::Nls(_) => wave.profile.norm_sq(),
    };
    Ok((norm, momentum))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    StepFailure,
    ParameterBound,
    /// The parameter turned back; the arm stops at the last point before it.
    Fold,
}

#[derive(Clone, Debug)]
pub struct ContinuationCurve {
    pub points: Vec<BranchPoint>,
    /// `+1` when the parameter initially increases, `-1` otherwise.
    pub direction: f64,
    pub termination: Termination,
}

impl ContinuationCurve {
    pub fn parameters(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.parameter).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.diag_momentum).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationControls {
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_steps: usize,
    pub max_corrector: usize,
    /// Halve `ds` when the corrector needs more iterations than this.
    pub slow_corrector: usize,
    /// Double `ds` when the corrector needs fewer iterations than this.
    pub fast_corrector: usize,
    pub newton: NewtonOptions,
}

impl Default for ContinuationControls {
    fn default() -> Self {
        Self {
            ds_min: 1e-4,
            ds_max: 0.05,
            max_steps: 5000,
            max_corrector: 15,
            slow_corrector: 8,
            fast_corrector: 3,
            newton: NewtonOptions::with_tol(1e-10),
        }
    }
}

fn admissible(template: &WaveParameters, p: f64) -> Option<WaveParameters> {
    if !p.is_finite() {
        return None;
    }
    template.with_continuation_value(p).ok()
}

/// Derivative of the profile residual with respect to the parameter.
fn parameter_derivative(params: &WaveParameters, grid: &PeriodicGrid, phi: &[f64]) -> Vec<f64> {
    match params {
        WaveParameters::Beam(p) => {
            let d2 = grid.derivative(phi, 2).expect("order 2 is valid");
            d2.iter().map(|v| 2.0 * p.wavespeed * v).collect()
        }
        WaveParameters::Nls(_) => phi.to_vec(),
    }
}

struct State {
    coeffs: Vec<f64>,
    phi: Vec<f64>,
    p: f64,
    residual_sup: f64,
}

struct Tangent {
    phi: Vec<f64>,
    p: f64,
}

struct Stepper<'a> {
    grid: &'a PeriodicGrid,
    basis: CosineBasis<'a>,
    template: WaveParameters,
    weight: f64,
    controls: ContinuationControls,
}

impl Stepper<'_> {
    /// Weighted inner product `<a, b> / |phi|^2`, with `|phi|` taken at the
    /// last accepted point so that steps stay relative along branches whose
    /// amplitude varies by orders of magnitude.
    fn winner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid.inner(a, b) / self.weight
    }

    fn normalize(&self, mut t: Tangent) -> Tangent {
        let norm = (self.winner(&t.phi, &t.phi) + t.p * t.p).sqrt();
        t.phi.iter_mut().for_each(|v| *v /= norm);
        t.p /= norm;
        t
    }

    fn solve_tol(&self, res: f64) -> f64 {
        (self.controls.newton.forcing * res.min(1.0)).max(1e-12)
    }

    /// Tangent from differentiating the profile equation in the parameter.
    fn natural_tangent(&self, state: &State, direction: f64) -> Result<Tangent> {
        let params = admissible(&self.template, state.p).ok_or(Error::NonFinite)?;
        let eq = ProfileEquation::for_parameters(&params);
        let jac = Jacobian::new(self.grid, &eq, &state.phi);
        let rp = parameter_derivative(&params, self.grid, &state.phi);
        let (b, _) = jac.solve(&rp, 1e-12, self.controls.newton.cg_max_iter);
        Ok(self.normalize(Tangent {
            phi: b.iter().map(|v| -direction * v).collect(),
            p: direction,
        }))
    }

    /// Bordered Newton corrector from the predicted point.
    fn correct(&self, predicted: &State, tangent: &Tangent) -> Option<(State, usize)> {
        let tol = self.controls.newton.tol;
        let mut coeffs = predicted.coeffs.clone();
        let mut p = predicted.p;
        let mut initial = None;
        for iteration in 0..=self.controls.max_corrector {
            let params = admissible(&self.template, p)?;
            let eq = ProfileEquation::for_parameters(&params);
            if !(eq.symbol_min() > 0.0) {
                return None;
            }
            let pw = eq.pointwise();
            let (phi, residual) = self.basis.residual(&eq, &pw, &coeffs);
            let res_sup = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !res_sup.is_finite() {
                return None;
            }
            let diff: Vec<f64> = phi.iter().zip(&predicted.phi).map(|(a, b)| a - b).collect();
            let arclength = self.winner(&tangent.phi, &diff) + tangent.p * (p - predicted.p);
            if res_sup < tol && arclength.abs() < 1e-9 {
                return Some((
                    State {
                        coeffs,
                        phi,
                        p,
                        residual_sup: res_sup,
                    },
                    iteration,
                ));
            }
            let first = *initial.get_or_insert(res_sup);
            if iteration == self.controls.max_corrector || res_sup > 1e3 * first.max(tol) {
                return None;
            }
            let jac = Jacobian::new(self.grid, &eq, &phi);
            let rel = self.solve_tol(res_sup);
            let rhs: Vec<f64> = residual.iter().map(|r| -r).collect();
            let (a, _) = jac.solve(&rhs, rel, self.controls.newton.cg_max_iter);
            let rp = parameter_derivative(&params, self.grid, &phi);
            let (b, _) = jac.solve(&rp, rel, self.controls.newton.cg_max_iter);
            let denominator = tangent.p - self.winner(&tangent.phi, &b);
            if denominator.abs() < 1e-14 {
                return None;
            }
            let dp = (-arclength - self.winner(&tangent.phi, &a)) / denominator;
            let dphi: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - dp * y).collect();
            let dcoeffs = self.basis.analyze(&dphi);
            coeffs.iter_mut().zip(&dcoeffs).for_each(|(c, d)| *c += d);
            p += dp;
        }
        None
    }

    fn state_from(&self, wave: &TravelingWave) -> State {
        let coeffs = self.basis.analyze(wave.profile.values());
        State {
            phi: self.basis.synthesize(&coeffs),
            coeffs,
            p: wave.params.continuation_value(),
            residual_sup: wave.residual_sup,
        }
    }

    fn wave_from(&self, state: &State) -> Result<TravelingWave> {
        let params = admissible(&self.template, state.p).ok_or(Error::NonFinite)?;
        let mut wave = TravelingWave::from_profile(
            RealField::from_vec_unchecked(self.grid, state.phi.clone()),
            params,
        );
        wave.residual_sup = state.residual_sup;
        Ok(wave)
    }

    /// Natural-parameter solve exactly at `target`, seeded along the tangent.
    /// A solution farther from the seed than the step itself belongs to
    /// another sheet and is refused.
    fn land(&self, state: &State, tangent: &Tangent, target: f64, ds: f64) -> Option<State> {
        let params = admissible(&self.template, target)?;
        let t = (target - state.p) / tangent.p;
        let seed: Vec<f64> = state
            .phi
            .iter()
            .zip(&tangent.phi)
            .map(|(a, b)| a + t * b)
            .collect();
        let seed = RealField::from_vec_unchecked(self.grid, seed);
        let solution = solve_equation(
            &seed,
            &ProfileEquation::for_parameters(&params),
            &self.controls.newton,
        )
        .ok()?;
        let jump: Vec<f64> = solution
            .profile
            .values()
            .iter()
            .zip(seed.values())
            .map(|(a, b)| a - b)
            .collect();
        if self.winner(&jump, &jump).sqrt() > ds.max(t.abs()) {
            return None;
        }
        let coeffs = self.basis.analyze(solution.profile.values());
        Some(State {
            coeffs,
            phi: solution.profile.into_values(),
            p: target,
            residual_sup: solution.residual_sup,
        })
    }
}

/// Continues `start` toward `target_parameter` with initial step `ds`.
pub fn extend_branch(
    start: &TravelingWave,
    target_parameter: f64,
    ds: f64,
    controls: &ContinuationControls,
) -> Result<ContinuationCurve> {
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(Error::InvalidArgument(format!("ds must be positive, got {ds}")));
    }
    if !target_parameter.is_finite() {
        return Err(Error::InvalidArgument("target parameter must be finite".into()));
    }
    if !(start.residual_sup < controls.newton.tol.max(1e-8)) {
        return Err(Error::InvalidArgument(format!(
            "start wave is not converged (residual {:.3e})",
            start.residual_sup
        )));
    }
    let grid = start.grid();
    let weight = start.profile.norm_sq();
    if !(weight > 0.0) {
        return Err(Error::InvalidArgument("start wave is trivial".into()));
    }
    let mut stepper = Stepper {
        grid,
        basis: CosineBasis::new(grid),
        template: start.params.clone(),
        weight,
        controls: *controls,
    };
    let p0 = start.params.continuation_value();
    let direction = if target_parameter >= p0 { 1.0 } else { -1.0 };
    let mut points = vec![BranchPoint::new(start.clone())?];
    if target_parameter == p0 {
        return Ok(ContinuationCurve {
            points,
            direction,
            termination: Termination::ReachedEnd,
        });
    }

    let mut current = stepper.state_from(start);
    let mut previous: Option<State> = None;
    let mut ds = ds.clamp(controls.ds_min, controls.ds_max);
    let mut termination = Termination::StepFailure;
    for _ in 0..controls.max_steps {
        let tangent = match &previous {
            None => stepper.natural_tangent(&current, direction)?,
            Some(prev) => stepper.normalize(Tangent {
                phi: current.phi.iter().zip(&prev.phi).map(|(a, b)| a - b).collect(),
                p: current.p - prev.p,
            }),
        };
        let predicted_p = current.p + ds * tangent.p;
        if (predicted_p - target_parameter) * direction >= 0.0 && tangent.p * direction > 0.0 {
            match stepper.land(&current, &tangent, target_parameter, ds) {
                Some(last) => {
                    points.push(BranchPoint::new(stepper.wave_from(&last)?)?);
                    termination = Termination::ReachedEnd;
                    break;
                }
                None if ds > controls.ds_min => {
                    ds = (ds * 0.5).max(controls.ds_min);
                    continue;
                }
                None => break,
            }
        }
        if admissible(&start.params, predicted_p).is_none() {
            termination = Termination::ParameterBound;
            break;
        }
        let predicted_coeffs: Vec<f64> = {
            let dt = stepper.basis.analyze(&tangent.phi);
            current.coeffs.iter().zip(&dt).map(|(a, d)| a + ds * d).collect()
        };
        let predicted = State {
            phi: stepper.basis.synthesize(&predicted_coeffs),
            coeffs: predicted_coeffs,
            p: predicted_p,
            residual_sup: f64::NAN,
        };
        match stepper.correct(&predicted, &tangent) {
            Some((next, _)) if (next.p - current.p) * direction < 0.0 => {
                termination = Termination::Fold;
                break;
            }
            Some((next, iterations)) => {
                points.push(BranchPoint::new(stepper.wave_from(&next)?)?);
                stepper.weight = grid.norm_sq(&next.phi);
                previous = Some(std::mem::replace(&mut current, next));
                if iterations > controls.slow_corrector {
                    ds = (ds * 0.5).max(controls.ds_min);
                } else if iterations < controls.fast_corrector {
                    ds = (ds * 2.0).min(controls.ds_max);
                }
            }
            None if ds > controls.ds_min => {
                ds = (ds * 0.5).max(controls.ds_min);
            }
            None => break,
        }
    }
    log::debug!(
        "branch from {p0} toward {target_parameter}: {} points, {termination:?}",
        points.len()
    );
    Ok(ContinuationCurve {
        points,
        direction,
        termination,
    })
}

/// Traces from `start` down to `lower` and up to `upper` and merges the two
/// arms into one curve ordered by increasing parameter.
pub fn trace_branch(
    start: &TravelingWave,
    lower: f64,
    upper: f64,
    ds: f64,
    controls: &ContinuationControls,
) -> Result<ContinuationCurve> {
    let p0 = start.params.continuation_value();
    if !(lower <= p0 && p0 <= upper) {
        return Err(Error::InvalidArgument(format!(
            "start parameter {p0} outside [{lower}, {upper}]"
        )));
    }
    let down = extend_branch(start, lower, ds, controls)?;
    let up = extend_branch(start, upper, ds, controls)?;
    let termination = if down.termination != Termination::ReachedEnd {
        down.termination
    } else {
        up.termination
    };
    let mut points: Vec<BranchPoint> = down.points.into_iter().rev().collect();
    points.extend(up.points.into_iter().skip(1));
    Ok(ContinuationCurve {
        points,
        direction: 1.0,
        termination,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticRow {
    pub parameter: f64,
    pub diag_norm: f64,
    pub diag_momentum: f64,
    pub vk_value: Option<f64>,
    pub max_re_lambda: Option<f64>,
    pub spectrum: Option<PointSpectrum>,
}

/// Fills `vk_value`, `max_re_lambda` and the index data of every point,
/// spreading the eigensolves over the available cores.
///
/// Points whose `L+` kernel is numerically degenerate keep these fields
/// empty; every other stability failure is returned.
pub fn branch_diagnostics(curve: &mut ContinuationCurve) -> Result<Vec<DiagnosticRow>> {
    if curve.points.is_empty() {
        return Err(Error::InvalidArgument("empty curve".into()));
    }
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = curve.points.len().div_ceil(threads);
    let outcomes: Vec<Result<()>> = std::thread::scope(|scope| {
        let handles: Vec<_> = curve
            .points
            .chunks_mut(chunk)
            .map(|points| scope.spawn(move || points.iter_mut().try_for_each(point_diagnostics)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("diagnostic worker panicked"))
            .collect()
    });
    outcomes.into_iter().collect::<Result<()>>()?;
    Ok(curve
        .points
        .iter()
        .map(|point| DiagnosticRow {
            parameter: point.parameter,
            diag_norm: point.diag_norm,
            diag_momentum: point.diag_momentum,
            vk_value: point.vk_value,
            max_re_lambda: point.max_re_lambda,
            spectrum: point.spectrum,
        })
        .collect())
}

fn point_diagnostics(point: &mut BranchPoint) -> Result<()> {
    match eigen_linearization(&point.wave) {
        Ok(report) => {
            point.vk_value = Some(report.vk_value);
            point.max_re_lambda = Some(report.max_re);
            point.spectrum = Some(PointSpectrum {
                counts: report.counts,
                n_l: report.n_l,
                n_d: report.n_d,
                identity_ok: report.index_identity_ok,
                verdict: report.verdict(),
            });
            Ok(())
        }
        Err(Error::DegenerateKernel { dimension }) => {
            log::warn!(
                "kernel of L+ has dimension {dimension} at parameter {}; diagnostics skipped",
                point.parameter
            );
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Vertex of the parabola through three points.
pub fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Result<f64> {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d12 - d01) / (x[2] - x[0]);
    if curvature == 0.0 || !curvature.is_finite() {
        return Err(Error::NoTransitionInRange);
    }
    // y = y0 + d01 (x - x0) + curvature (x - x0)(x - x1)
    Ok(0.5 * (x[0] + x[1]) - 0.5 * d01 / curvature)
}

/// Location of the interior maximum of `values` over increasing `params`,
/// refined by quadratic interpolation.
pub fn locate_extremum(params: &[f64], values: &[f64]) -> Result<f64> {
    let n = params.len().min(values.len());
    if n < 3 {
        return Err(Error::NoTransitionInRange);
    }
    let (mut best, mut best_value) = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate().take(n) {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    if best == 0 || best == n - 1 {
        return Err(Error::NoTransitionInRange);
    }
    parabola_vertex(
        [params[best - 1], params[best], params[best + 1]],
        [values[best - 1], values[best], values[best + 1]],
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    /// Maximizer of the momentum diagnostic.
    pub c_star: f64,
    /// Where the unstable real pair reaches the origin, from the computed spectra.
    pub eigen_crossing: Option<f64>,
}

/// Locates the stability transition of a beam branch.
pub fn locate_transition(curve: &ContinuationCurve) -> Result<Transition> {
    let mut order: Vec<usize> = (0..curve.points.len()).collect();
    order.sort_by(|&a, &b| curve.points[a].parameter.total_cmp(&curve.points[b].parameter));
    let params: Vec<f64> = order.iter().map(|&i| curve.points[i].parameter).collect();
    let values: Vec<f64> = order.iter().map(|&i| curve.points[i].diag_momentum).collect();
    let c_star = locate_extremum(&params, &values)?;
    let eigen: Vec<(f64, f64)> = order
        .iter()
        .filter_map(|&i| {
            curve.points[i]
                .max_re_lambda
                .map(|m| (curve.points[i].parameter, m))
        })
        .collect();
    Ok(Transition {
        c_star,
        eigen_crossing: eigen_crossing(&eigen),
    })
}

/// Zero of the squared unstable eigenvalue, linearly extrapolated from the
/// last two unstable points before the first stable one.
pub fn eigen_crossing(samples: &[(f64, f64)]) -> Option<f64> {
    let first_stable = samples
        .iter()
        .position(|&(_, m)| m <= EIGEN_TOL)
        .filter(|&i| i >= 1)?;
    let (c2, m2) = samples[first_stable - 1];
    let (c_stable, _) = samples[first_stable];
    if first_stable >= 2 {
        let (c1, m1) = samples[first_stable - 2];
        let (s1, s2) = (m1 * m1, m2 * m2);
        if s1 != s2 {
            let root = c2 - s2 * (c2 - c1) / (s2 - s1);
            if root >= c2 && root <= c_stable {
                return Some(root);
            }
        }
    }
    Some(0.5 * (c2 + c_stable))
}

/// Centered differences of `values` on a nonuniform increasing grid, at the
/// interior nodes.
pub fn centered_differences(params: &[f64], values: &[f64]) -> Vec<f64> {
    (1..params.len().saturating_sub(1))
        .map(|i| {
            let (h0, h1) = (params[i] - params[i - 1], params[i + 1] - params[i]);
            let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
            (h0 * h0 * (y2 - y1) + h1 * h1 * (y1 - y0)) / (h0 * h1 * (h0 + h1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::params::{BeamParameters, NlsParameters};
    use crate::profile::solve_wave;
    use std::f64::consts::PI;

    fn dummy_curve(cs: &[f64], momentum: impl Fn(f64) -> f64) -> ContinuationCurve {
        let g = make_grid(16, PI).unwrap();
        let points = cs
            .iter()
            .map(|&c| {
                let wave = TravelingWave::from_profile(
                    RealField::zeros(&g),
                    WaveParameters::Beam(BeamParameters::cubic(c).unwrap()),
                );
                let mut p = BranchPoint::new(wave).unwrap();
                p.diag_momentum = momentum(c);
                p
            })
            .collect();
        ContinuationCurve {
            points,
            direction: 1.0,
            termination: Termination::ReachedEnd,
        }
    }

    #[test]
    fn quadratic_transition_is_exact() {
        let curve = dummy_curve(&[0.9, 1.0, 1.1], |c| -(c - 1.0) * (c - 1.0) + 2.0);
        let t = locate_transition(&curve).unwrap();
        assert!((t.c_star - 1.0).abs() < 1e-14);
        assert_eq!(t.eigen_crossing, None);
        let shifted = dummy_curve(&[0.9, 1.02, 1.1], |c| -(c - 1.03) * (c - 1.03) + 2.0);
        assert!((locate_transition(&shifted).unwrap().c_star - 1.03).abs() < 1e-12);
    }

    #[test]
    fn monotone_curve_has_no_transition() {
        let curve = dummy_curve(&[0.5, 0.7, 0.9, 1.1], |c| -c);
        assert!(matches!(
            locate_transition(&curve),
            Err(Error::NoTransitionInRange)
        ));
    }

    #[test]
    fn nonuniform_differences_exact_on_quadratics() {
        let x = [0.0, 0.1, 0.35, 0.4];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v - v + 2.0).collect();
        let d = centered_differences(&x, &y);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (6.0 * x[i + 1] - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn crossing_from_square_root_law() {
        // m = sqrt(1.35 - c)
        let samples: Vec<(f64, f64)> = [1.30, 1.32, 1.34, 1.36]
            .iter()
            .map(|&c: &f64| (c, (1.35 - c).max(0.0).sqrt()))
            .collect();
        assert!((eigen_crossing(&samples).unwrap() - 1.35).abs() < 1e-12);
    }

    #[test]
    fn zero_length_request() {
        let g = make_grid(256, 12.0 * PI).unwrap();
        let params = WaveParameters::Beam(BeamParameters::cubic(1.0).unwrap());
        let wave = solve_wave(&params, &g, &NewtonOptions::with_tol(1e-10)).unwrap();
        let curve = extend_branch(&wave, 1.0, 0.01, &ContinuationControls::default()).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve.termination, Termination::ReachedEnd);
        let mut curve = curve;
        assert_eq!(branch_diagnostics(&mut curve).unwrap().len(), 1);
    }

    #[test]
    fn short_beam_branch() {
        let g = make_grid(256, 12.0 * PI).unwrap();
        let params = WaveParameters::Beam(BeamParameters::cubic(1.0).unwrap());
        let controls = ContinuationControls::default();
        let wave = solve_wave(&params, &g, &controls.newton).unwrap();
        let curve = extend_branch(&wave, 1.1, 0.01, &controls).unwrap();
        assert_eq!(curve.termination, Termination::ReachedEnd);
        let cs = curve.parameters();
        assert_eq!(*cs.last().unwrap(), 1.1);
        assert!(cs.windows(2).all(|w| w[1] > w[0]));
        for point in &curve.points {
            let eq = ProfileEquation::for_parameters(&point.wave.params);
            let r = crate::profile::profile_residual(&eq, &point.wave.profile);
            assert!(r.sup_norm() < 1e-9, "{}", r.sup_norm());
        }
        // reproducible bit for bit
        let again = extend_branch(&wave, 1.1, 0.01, &controls).unwrap();
        assert_eq!(again.parameters(), cs);
    }

    #[test]
    fn nls_branch_momentum_decreases_toward_boundary() {
        let g = make_grid(256, 12.0 * PI).unwrap();
        let params = WaveParameters::Nls(NlsParameters::new(1.0, 1.0).unwrap());
        let controls = ContinuationControls::default();
        let wave = solve_wave(&params, &g, &controls.newton).unwrap();
        let curve = extend_branch(&wave, 0.6, 0.02, &controls).unwrap();
        assert_eq!(curve.termination, Termination::ReachedEnd);
        let m = curve.momenta();
        assert!(m.windows(2).all(|w| w[1] < w[0]));
    }
}
