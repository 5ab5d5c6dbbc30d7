//! Green's kernel of `d^4 + c^2 d^2 + 1`, tail-decay fits and the
//! constrained variational construction of the wave.

use num_complex::Complex64;

use crate::dynamics::least_squares;
use crate::error::{Error, Result};
use crate::grid::{apply_beam_symbol, check_wavespeed, invert_beam_symbol, PeriodicGrid, RealField};
use crate::nonlinearity::Nonlinearity;
use crate::profile::TravelingWave;

/// `(a, b, q)` with quartic roots `+-a +- ib` and `q = sqrt(4 - c^4)`.
fn kernel_constants(c: f64) -> Result<(f64, f64, f64)> {
    check_wavespeed(c)?;
    let c2 = c * c;
    Ok((
        (2.0 + c2).sqrt() / 2.0,
        (2.0 - c2).sqrt() / 2.0,
        (4.0 - c2 * c2).sqrt(),
    ))
}

/// Decay rate `sqrt(2 - c^2) / 2` of the kernel and of the wave tails.
pub fn decay_rate_theory(c: f64) -> Result<f64> {
    Ok(kernel_constants(c)?.1)
}

/// `K(x) = (1/2pi) int e^{i xi x} / (xi^4 - c^2 xi^2 + 1) d xi`
/// `= e^{-b|x|} (a cos(ax) + b sin(a|x|)) / q`.
pub fn green_kernel(x: f64, c: f64) -> Result<f64> {
    let (a, b, q) = kernel_constants(c)?;
    let ax = x.abs();
    Ok((-b * ax).exp() * (a * (a * ax).cos() + b * (a * ax).sin()) / q)
}

/// `j`-th derivative of [`green_kernel`], `j = 1..=3`.
///
/// For `x > 0`, `K(x) = 2 Re[C e^{i xi0 x}]` with `xi0 = a + ib` and
/// `C = 1 / (2 q xi0)`. `K'''` jumps by 1 at the origin and is reported as 0
/// there, the mean of its one-sided limits.
pub fn green_kernel_derivative(x: f64, c: f64, j: i32) -> Result<f64> {
    if !(1..=3).contains(&j) {
        return Err(Error::InvalidOrder(j));
    }
    let (a, b, q) = kernel_constants(c)?;
    if x == 0.0 && j % 2 == 1 {
        return Ok(0.0);
    }
    let xi0 = Complex64::new(a, b);
    let coeff = 1.0 / (2.0 * q * xi0);
    let ax = x.abs();
    let value = 2.0 * (coeff * (Complex64::i() * xi0).powi(j) * (Complex64::i() * xi0 * ax).exp()).re;
    Ok(if x < 0.0 && j % 2 == 1 { -value } else { value })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub residual_r2: f64,
    pub points: usize,
}

/// Fit of the tail decay rate of a computed wave on `x > 0`.
///
/// The default window runs over `x < 2L/3` (clear of the periodic image) and
/// keeps envelope values between `1e2` times the noise level and
/// `1e-2 |phi|_inf`. The noise level is the larger of machine precision
/// times `|phi|_inf` and the wave's residual.
pub fn fit_decay_rate(wave: &TravelingWave, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let noise = wave.residual_sup.max(f64::EPSILON * wave.profile.sup_norm());
    fit_field_decay(&wave.profile, window, noise)
}

/// [`fit_decay_rate`] for an arbitrary field with explicit noise level.
pub fn fit_field_decay(field: &RealField, window: Option<(f64, f64)>, noise: f64) -> Result<DecayFit> {
    let grid = field.grid();
    let nodes = grid.nodes();
    let window = window.unwrap_or((0.0, 2.0 * grid.half_length() / 3.0));
    fit_envelope(&nodes, field.values(), window, noise, field.sup_norm())
}

/// Envelope fit through the local maxima of `|f|` on sampled data.
pub fn fit_envelope(
    xs: &[f64],
    values: &[f64],
    window: (f64, f64),
    noise: f64,
    scale: f64,
) -> Result<DecayFit> {
    if xs.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            found: values.len(),
        });
    }
    if !(window.0 < window.1) {
        return Err(Error::InvalidArgument(format!("empty window {window:?}")));
    }
    let floor = 1e2 * noise;
    let ceiling = 1e-2 * scale;
    let mut peaks = Vec::new();
    for i in 1..xs.len().saturating_sub(1) {
        let (l, m, r) = (values[i - 1].abs(), values[i].abs(), values[i + 1].abs());
        if !(m > l && m >= r) || xs[i] < window.0 || xs[i] > window.1 {
            continue;
        }
        // Parabola through the three samples.
        let h = xs[i + 1] - xs[i];
        let curvature = l - 2.0 * m + r;
        let (x, y) = if curvature < 0.0 {
            let offset = 0.5 * (l - r) / curvature;
            (xs[i] + offset * h, m - 0.25 * (l - r) * offset)
        } else {
            (xs[i], m)
        };
        peaks.push((x, y));
    }
    let in_band: Vec<(f64, f64)> = peaks
        .iter()
        .filter(|p| p.1 >= floor && p.1 <= ceiling)
        .map(|&(x, y)| (x, y.ln()))
        .collect();
    if in_band.is_empty() && peaks.iter().any(|p| p.1 <= ceiling) {
        return Err(Error::WindowBelowFloor);
    }
    if in_band.len() < 4 {
        return Err(Error::InsufficientTail { found: in_band.len() });
    }
    let (slope, intercept) = least_squares(&in_band);
    let mean = in_band.iter().map(|p| p.1).sum::<f64>() / in_band.len() as f64;
    let ss_tot: f64 = in_band.iter().map(|p| (p.1 - mean).powi(2)).sum();
    let ss_res: f64 = in_band
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    Ok(DecayFit {
        rate: -slope,
        intercept,
        window: (in_band[0].0, in_band[in_band.len() - 1].0),
        residual_r2: if ss_tot > 0.0 {
            (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
        } else {
            0.0
        },
        points: in_band.len(),
    })
}

#[derive(Clone, Debug)]
pub struct VariationalResult {
    pub maximizer: RealField,
    pub lambda: f64,
    /// `(1/lambda) int F(U^2) U^2`.
    pub kappa: f64,
    /// `|F(U^2) U|^2 / <L U, F(U^2) U>`, the multiplier read off the
    /// Euler–Lagrange equation by least squares.
    pub kappa_rayleigh: f64,
    /// `I[U] = int G(U^2)`.
    pub objective: f64,
    /// `|U'''' + c^2 U'' + U - F(U^2) U / kappa|_inf`.
    pub el_residual: f64,
    pub iterations: usize,
}

pub const VARIATIONAL_MAX_ITER: usize = 20_000;

/// Maximizes `int G(u^2)` subject to `int u''^2 - c^2 u'^2 + u^2 = lambda`
/// by projected ascent, preconditioned with the constraint operator. The
/// ascent direction is `A^{-1} F(u^2) u - kappa u`, which is tangent to the
/// constraint; iterates are rescaled back onto it.
pub fn variational_maximize(
    lambda: f64,
    c: f64,
    nl: &Nonlinearity,
    grid: &PeriodicGrid,
    tol: f64,
) -> Result<VariationalResult> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "constraint level must be positive, got {lambda}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    check_wavespeed(c)?;
    let coefficients = match nl {
        Nonlinearity::Polynomial(a) => a.clone(),
        Nonlinearity::Exponential => return Err(Error::UnsupportedForFamily("exponential")),
    };
    let f = |u: f64| crate::nonlinearity::poly_f(&coefficients, u * u);
    let objective = |u: &RealField| {
        grid.integrate(
            &u.values()
                .iter()
                .map(|&x| crate::nonlinearity::poly_g(&coefficients, x * x))
                .collect::<Vec<_>>(),
        )
    };
    let project = |u: RealField| {
        let level = apply_beam_symbol(&u, c).inner(&u);
        u.scaled((lambda / level).sqrt())
    };

    let mut u = project(grid.sample(|x| 1.0 / x.cosh()));
    let mut value = objective(&u);
    let mut iterations = 0;
    let mut step: f64 = 1.0;
    loop {
        let fu = u
            .map(f)
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| a * b)
            .collect::<Vec<_>>();
        let fu = RealField::new(grid, fu)?;
        let kappa = fu.inner(&u) / lambda;
        let direction = invert_beam_symbol(&fu, c)?.axpy(-kappa, &u);
        let slope = 2.0 * apply_beam_symbol(&direction, c).inner(&direction);
        let gradient_norm = (slope / 2.0 / lambda).sqrt() / kappa;
        if gradient_norm < tol {
            break;
        }
        if iterations >= VARIATIONAL_MAX_ITER {
            return Err(Error::NoConvergence {
                iterations,
                residual: gradient_norm,
            });
        }
        iterations += 1;
        step = (2.0 * step).min(1.0 / kappa);
        if step * slope < 64.0 * f64::EPSILON * value.abs() {
            // The increase is below the resolution of the objective; the
            // full step is a contraction this close to the maximizer.
            step = 1.0 / kappa;
            u = project(u.axpy(step, &direction));
            value = objective(&u);
            continue;
        }
        loop {
            let trial = project(u.axpy(step, &direction));
            let trial_value = objective(&trial);
            if trial_value >= value + 1e-4 * step * slope {
                u = trial;
                value = trial_value;
                break;
            }
            step *= 0.5;
            if step < 1e-12 / kappa {
                return Err(Error::NoConvergence {
                    iterations,
                    residual: gradient_norm,
                });
            }
        }
    }

    let fu: Vec<f64> = u.values().iter().map(|&x| f(x) * x).collect();
    let fu = RealField::new(grid, fu)?;
    let kappa = fu.inner(&u) / lambda;
    let lu = apply_beam_symbol(&u, c);
    let kappa_rayleigh = fu.norm_sq() / lu.inner(&fu);
    let el_residual = lu.axpy(-1.0 / kappa, &fu).sup_norm();
    Ok(VariationalResult {
        objective: objective(&u),
        maximizer: u,
        lambda,
        kappa,
        kappa_rayleigh,
        el_residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::SQRT_2;

    #[test]
    fn kernel_at_origin_and_symmetry() {
        assert!((green_kernel(0.0, 0.0).unwrap() - 1.0 / (2.0 * SQRT_2)).abs() < 1e-15);
        for &c in &[0.0, 0.7, 1.3] {
            for &x in &[0.1, 2.5, 17.0] {
                assert_eq!(green_kernel(x, c).unwrap(), green_kernel(-x, c).unwrap());
            }
        }
        assert!(matches!(
            green_kernel(0.0, SQRT_2),
            Err(Error::SymbolNotPositive { .. })
        ));
        assert!(matches!(
            green_kernel_derivative(1.0, 0.5, 4),
            Err(Error::InvalidOrder(4))
        ));
    }

    #[test]
    fn kernel_derivatives_match_differences() {
        let d = 1e-3;
        for &c in &[0.0, 1.0] {
            for &x in &[-2.0, 0.7, 5.0] {
                let k = |x: f64| green_kernel(x, c).unwrap();
                let k1 = |x: f64| green_kernel_derivative(x, c, 1).unwrap();
                let k2 = |x: f64| green_kernel_derivative(x, c, 2).unwrap();
                let fd1 = (k(x - 2.0 * d) - 8.0 * k(x - d) + 8.0 * k(x + d) - k(x + 2.0 * d)) / (12.0 * d);
                assert!((fd1 - k1(x)).abs() < 1e-10, "c {c} x {x}");
                let fd2 =
                    (k1(x - 2.0 * d) - 8.0 * k1(x - d) + 8.0 * k1(x + d) - k1(x + 2.0 * d)) / (12.0 * d);
                assert!((fd2 - k2(x)).abs() < 1e-10);
                let fd3 =
                    (k2(x - 2.0 * d) - 8.0 * k2(x - d) + 8.0 * k2(x + d) - k2(x + 2.0 * d)) / (12.0 * d);
                assert!((fd3 - green_kernel_derivative(x, c, 3).unwrap()).abs() < 1e-10);
            }
        }
        assert_eq!(green_kernel_derivative(0.0, 0.4, 1).unwrap(), 0.0);
    }

    #[test]
    fn kernel_inverts_symbol() {
        // K * (d^4 + c^2 d^2 + 1) f = f for a smooth bump, by quadrature;
        // the jump in K''' at the origin limits the trapezoid rule to O(h^4).
        let c = 0.9;
        let grid = make_grid(4096, 40.0).unwrap();
        let f = grid.sample(|x| (-x * x).exp());
        let g = apply_beam_symbol(&f, c);
        let nodes = grid.nodes();
        let m0 = grid.origin_index();
        let conv: f64 = nodes
            .iter()
            .zip(g.values())
            .map(|(&y, &gy)| green_kernel(-y, c).unwrap() * gy)
            .sum::<f64>()
            * grid.spacing();
        assert!((conv - f.values()[m0]).abs() < 1e-8, "{conv}");
    }

    #[test]
    fn synthetic_decay() {
        let grid = make_grid(2048, 60.0).unwrap();
        let field = grid.sample(|x| (-0.5 * x.abs()).exp() * (1.2 * x).cos());
        let fit = fit_field_decay(&field, None, 1e-16).unwrap();
        assert!((fit.rate - 0.5).abs() < 1e-3, "rate {}", fit.rate);
        assert!(fit.residual_r2 > 0.99);
    }

    #[test]
    fn decay_fit_errors() {
        let grid = make_grid(256, 20.0).unwrap();
        let field = grid.sample(|x| (-0.5 * x.abs()).exp() * (1.2 * x).cos());
        assert!(matches!(
            fit_field_decay(&field, Some((1.0, 4.0)), 1e-16),
            Err(Error::InsufficientTail { .. })
        ));
        assert!(matches!(
            fit_field_decay(&field, Some((5.0, 13.0)), 1e-3),
            Err(Error::WindowBelowFloor)
        ));
    }

    #[test]
    fn variational_rejects_bad_input() {
        let grid = make_grid(64, 10.0).unwrap();
        let nl = Nonlinearity::cubic();
        assert!(matches!(
            variational_maximize(0.0, 1.0, &nl, &grid, 1e-8),
            Err(Error::InvalidArgument(_))
        ));
        assert!(variational_maximize(1.0, 1.0, &Nonlinearity::Exponential, &grid, 1e-8).is_err());
    }

    #[test]
    fn variational_cubic_scaling() {
        let grid = make_grid(256, 12.0 * std::f64::consts::PI / 2.0).unwrap();
        let nl = Nonlinearity::cubic();
        let one = variational_maximize(1.0, 0.5, &nl, &grid, 1e-10).unwrap();
        let two = variational_maximize(2.0, 0.5, &nl, &grid, 1e-10).unwrap();
        assert!(one.el_residual < 1e-7);
        assert!(((one.kappa - one.kappa_rayleigh) / one.kappa).abs() < 1e-8);
        // Homogeneity of the quartic objective: M_{2} = 4 M_{1}.
        assert!((two.objective - 4.0 * one.objective).abs() < 1e-8 * two.objective);
    }
}
