//! Periodic Fourier collocation.
//!
//! Nodes are `x_m = -L + m h`, `m = 0..n`, with `h = 2L / n`. The forward
//! transform divides by `n`, so a field is `f(x_m) = sum_j f_hat[j] e^{i k_j (x_m + L)}`
//! and every Fourier multiplier acts directly on `f_hat`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n_points: usize,
    half_length: f64,
    spacing: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n_points", &self.inner.n_points)
            .field("half_length", &self.inner.half_length)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n_points == other.inner.n_points && self.inner.half_length == other.inner.half_length
    }
}

/// Builds a grid on `[-half_length, half_length)`.
pub fn make_grid(n_points: usize, half_length: f64) -> Result<PeriodicGrid> {
    PeriodicGrid::new(n_points, half_length)
}

impl PeriodicGrid {
    pub fn new(n_points: usize, half_length: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_points must be even and at least 8, got {n_points}"
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half_length must be positive, got {half_length}"
            )));
        }
        let spacing = 2.0 * half_length / n_points as f64;
        let wavenumbers = (0..n_points)
            .map(|j| {
                let index = if j <= n_points / 2 {
                    j as f64
                } else {
                    j as f64 - n_points as f64
                };
                PI * index / half_length
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        Ok(Self {
            inner: Arc::new(GridInner {
                n_points,
                half_length,
                spacing,
                wavenumbers,
                forward,
                inverse,
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    pub fn half_length(&self) -> f64 {
        self.inner.half_length
    }

    pub fn spacing(&self) -> f64 {
        self.inner.spacing
    }

    /// Wavenumbers in FFT order; index `n/2` is the Nyquist mode.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    pub fn nyquist_index(&self) -> usize {
        self.inner.n_points / 2
    }

    /// Index of the node at `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.inner.n_points / 2
    }

    pub fn node(&self, m: usize) -> f64 {
        -self.inner.half_length + m as f64 * self.inner.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points()).map(|m| self.node(m)).collect()
    }

    /// Index of the mirror node `-x_m`.
    pub fn mirror_index(&self, m: usize) -> usize {
        (self.n_points() - m) % self.n_points()
    }

    pub fn max_wavenumber(&self) -> f64 {
        PI * (self.n_points() / 2) as f64 / self.half_length()
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n_points());
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.inner.forward.process(&mut buf);
        let scale = 1.0 / self.n_points() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }

    pub fn forward_complex(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.inner.forward.process(&mut buf);
        let scale = 1.0 / self.n_points() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n_points());
        self.inner.inverse.process(&mut coeffs);
        coeffs.into_iter().map(|z| z.re).collect()
    }

    pub fn inverse_complex(&self, mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
        self.inner.inverse.process(&mut coeffs);
        coeffs
    }

    /// Applies a real even multiplier `m(k)` (no Nyquist special-casing needed).
    pub fn apply_even_multiplier(&self, values: &[f64], multiplier: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut coeffs = self.forward(values);
        for (z, &k) in coeffs.iter_mut().zip(self.wavenumbers()) {
            *z *= multiplier(k);
        }
        self.inverse(coeffs)
    }

    /// Spectral derivative of order 1..=4 on raw samples.
    pub fn derivative(&self, values: &[f64], order: i32) -> Result<Vec<f64>> {
        if !(1..=4).contains(&order) {
            return Err(Error::InvalidOrder(order));
        }
        let mut coeffs = self.forward(values);
        self.differentiate_coefficients(&mut coeffs, order);
        Ok(self.inverse(coeffs))
    }

    pub(crate) fn differentiate_coefficients(&self, coeffs: &mut [Complex64], order: i32) {
        let nyquist = self.nyquist_index();
        for (j, (z, &k)) in coeffs.iter_mut().zip(self.wavenumbers()).enumerate() {
            if j == nyquist && order % 2 == 1 {
                *z = Complex64::new(0.0, 0.0);
            } else {
                *z *= Complex64::new(0.0, k).powi(order);
            }
        }
    }

    /// Periodic trapezoid rule, `h * sum f`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.spacing() * values.iter().sum::<f64>()
    }

    /// `h * sum a b`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.spacing() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn norm_sq(&self, a: &[f64]) -> f64 {
        self.inner(a, a)
    }

    /// Dense matrix of the order-`order` spectral derivative.
    pub fn differentiation_matrix(&self, order: i32) -> Result<Mat<f64>> {
        let n = self.n_points();
        let mut unit = vec![0.0; n];
        unit[0] = 1.0;
        let column = self.derivative(&unit, order)?;
        Ok(Mat::from_fn(n, n, |i, j| column[(i + n - j) % n]))
    }

    /// Dense circulant matrix of a real even multiplier.
    pub fn multiplier_matrix(&self, multiplier: impl Fn(f64) -> f64) -> Mat<f64> {
        let n = self.n_points();
        let mut unit = vec![0.0; n];
        unit[0] = 1.0;
        let column = self.apply_even_multiplier(&unit, multiplier);
        Mat::from_fn(n, n, |i, j| column[(i + n - j) % n])
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            values: (0..self.n_points()).map(|m| f(self.node(m))).collect(),
            grid: self.clone(),
        }
    }
}

/// Symbol of `d^4 + c^2 d^2 + 1`.
pub fn beam_symbol(k: f64, c: f64) -> f64 {
    let k2 = k * k;
    k2 * k2 - c * c * k2 + 1.0
}

/// Minimum of `k^4 - c^2 k^2 + 1` over real `k`.
pub fn symbol_min(c: f64) -> Result<f64> {
    check_wavespeed(c)?;
    Ok(1.0 - c.powi(4) / 4.0)
}

pub(crate) fn check_wavespeed(c: f64) -> Result<()> {
    if c.is_finite() && c.abs() < std::f64::consts::SQRT_2 {
        Ok(())
    } else {
        Err(Error::SymbolNotPositive { c })
    }
}

/// Real samples on a [`PeriodicGrid`].
#[derive(Clone, Debug)]
pub struct RealField {
    values: Vec<f64>,
    grid: PeriodicGrid,
}

impl RealField {
    pub fn new(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            values,
            grid: grid.clone(),
        })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self {
            values: vec![0.0; grid.n_points()],
            grid: grid.clone(),
        }
    }

    pub(crate) fn from_vec_unchecked(grid: &PeriodicGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self {
            values,
            grid: grid.clone(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `h * sum f^2`.
    pub fn norm_sq(&self) -> f64 {
        self.grid.norm_sq(&self.values)
    }

    pub fn inner(&self, other: &RealField) -> f64 {
        self.grid.inner(&self.values, &other.values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_vec_unchecked(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, s: f64) -> RealField {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &RealField) -> RealField {
        RealField::from_vec_unchecked(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    /// Symmetrizes about `x = 0`.
    pub fn even_part(&self) -> RealField {
        RealField::from_vec_unchecked(&self.grid, even_part(&self.grid, &self.values))
    }

    /// Largest `|f(x) - f(-x)|`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.len())
            .map(|m| (self.values[m] - self.values[self.grid.mirror_index(m)]).abs())
            .fold(0.0, f64::max)
    }

    /// Trigonometric interpolation onto a grid with the same period and at
    /// least as many points.
    pub fn interpolate_to(&self, target: &PeriodicGrid) -> Result<RealField> {
        let n = self.grid.n_points();
        let n_target = target.n_points();
        if (target.half_length() - self.grid.half_length()).abs() > 1e-12 * self.grid.half_length()
            || n_target < n
        {
            return Err(Error::InvalidGrid(
                "interpolation target must share the period and be at least as fine".into(),
            ));
        }
        let coeffs = self.grid.forward(&self.values);
        let mut padded = vec![Complex64::new(0.0, 0.0); n_target];
        let half = n / 2;
        padded[..half].copy_from_slice(&coeffs[..half]);
        for j in half + 1..n {
            padded[n_target - (n - j)] = coeffs[j];
        }
        if n_target == n {
            padded[half] = coeffs[half];
        } else {
            padded[half] = coeffs[half] * 0.5;
            padded[n_target - half] = coeffs[half] * 0.5;
        }
        Ok(RealField::from_vec_unchecked(target, target.inverse(padded)))
    }

    /// `f(x - s)` evaluated through the trigonometric interpolant.
    pub fn shifted(&self, s: f64) -> RealField {
        let mut coeffs = self.grid.forward(&self.values);
        let nyquist = self.grid.nyquist_index();
        for (j, (z, &k)) in coeffs.iter_mut().zip(self.grid.wavenumbers()).enumerate() {
            if j == nyquist {
                *z *= (k * s).cos();
            } else {
                *z *= Complex64::from_polar(1.0, -k * s);
            }
        }
        RealField::from_vec_unchecked(&self.grid, self.grid.inverse(coeffs))
    }
}

pub(crate) fn even_part(grid: &PeriodicGrid, values: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|m| 0.5 * (values[m] + values[grid.mirror_index(m)]))
        .collect()
}

/// Spectral derivative of order 1..=4.
pub fn differentiate(f: &RealField, order: i32) -> Result<RealField> {
    let values = f.grid().derivative(f.values(), order)?;
    Ok(RealField::from_vec_unchecked(f.grid(), values))
}

/// `d^4 f + c^2 d^2 f + f`.
pub fn apply_beam_symbol(f: &RealField, c: f64) -> RealField {
    RealField::from_vec_unchecked(
        f.grid(),
        f.grid().apply_even_multiplier(f.values(), |k| beam_symbol(k, c)),
    )
}

/// Inverse of [`apply_beam_symbol`].
pub fn invert_beam_symbol(f: &RealField, c: f64) -> Result<RealField> {
    check_wavespeed(c)?;
    Ok(RealField::from_vec_unchecked(
        f.grid(),
        f.grid()
            .apply_even_multiplier(f.values(), |k| 1.0 / beam_symbol(k, c)),
    ))
}

/// Discrete `int (f'')^2 - c^2 (f')^2 + f^2 dx`.
pub fn constraint_functional(f: &RealField, c: f64) -> f64 {
    let grid = f.grid();
    let d1 = grid.derivative(f.values(), 1).expect("order 1 is valid");
    let d2 = grid.derivative(f.values(), 2).expect("order 2 is valid");
    let integrand: Vec<f64> = f
        .values()
        .iter()
        .zip(&d1)
        .zip(&d2)
        .map(|((u, du), ddu)| ddu * ddu - c * c * du * du + u * u)
        .collect();
    grid.integrate(&integrand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_arithmetic() {
        let g = make_grid(256, 12.0 * PI).unwrap();
        assert!((g.spacing() - 24.0 * PI / 256.0).abs() < 1e-15);
        assert!((g.spacing() - 0.2945243).abs() < 1e-6);
        let kmax = g.wavenumbers().iter().fold(0.0f64, |a, k| a.max(k.abs()));
        assert!((kmax - 256.0 / 24.0).abs() < 1e-12);
        assert!((g.spacing() * 256.0 - 2.0 * g.half_length()).abs() < 1e-12);
    }

    #[test]
    fn small_grid_nodes() {
        let g = make_grid(8, PI).unwrap();
        let nodes = g.nodes();
        for (m, x) in nodes.iter().enumerate() {
            assert!((x - (-PI + m as f64 * PI / 4.0)).abs() < 1e-15);
        }
        assert!((nodes[7] - 3.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(g.origin_index(), 4);
        assert_eq!(nodes[4], 0.0);
    }

    #[test]
    fn wavenumbers_symmetric_except_nyquist() {
        let g = make_grid(16, 3.0).unwrap();
        let k = g.wavenumbers();
        for j in 1..8 {
            assert!((k[j] + k[16 - j]).abs() < 1e-14);
        }
        assert_eq!(k[0], 0.0);
    }

    #[test]
    fn invalid_grids() {
        assert!(matches!(make_grid(0, PI), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(6, PI), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(9, PI), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(16, 0.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(16, -1.0), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn derivative_of_sine() {
        let g = make_grid(64, PI).unwrap();
        let f = g.sample(f64::sin);
        let df = differentiate(&f, 1).unwrap();
        let expected = g.sample(f64::cos);
        assert!(sup_diff(df.values(), expected.values()) < 1e-12);
    }

    #[test]
    fn derivative_of_constant() {
        let g = make_grid(32, 2.0).unwrap();
        let f = g.sample(|_| 1.0);
        for order in 1..=4 {
            assert!(differentiate(&f, order).unwrap().sup_norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_order_out_of_range() {
        let g = make_grid(16, 1.0).unwrap();
        let f = RealField::zeros(&g);
        assert!(matches!(differentiate(&f, 0), Err(Error::InvalidOrder(0))));
        assert!(matches!(differentiate(&f, 5), Err(Error::InvalidOrder(5))));
    }

    // Fourth-order central differences, independent of the FFT path.
    fn central_difference(values: &[f64], h: f64) -> Vec<f64> {
        let n = values.len();
        (0..n)
            .map(|m| {
                let at = |o: isize| values[(m as isize + o).rem_euclid(n as isize) as usize];
                (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)
            })
            .collect()
    }

    #[test]
    fn derivative_agrees_with_finite_differences() {
        let mut previous = f64::INFINITY;
        for &n in &[32usize, 64, 128] {
            let g = make_grid(n, PI).unwrap();
            let f = g.sample(|x| x.cos().exp());
            let spectral = differentiate(&f, 1).unwrap();
            let fd = central_difference(f.values(), g.spacing());
            let err = sup_diff(spectral.values(), &fd);
            if previous.is_finite() {
                let ratio = previous / err;
                assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
            }
            previous = err;
        }
    }

    #[test]
    fn odd_derivative_kills_nyquist() {
        let g = make_grid(16, PI).unwrap();
        let f = RealField::new(&g, (0..16).map(|m| if m % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap();
        assert!(differentiate(&f, 1).unwrap().sup_norm() < 1e-14);
        assert!(differentiate(&f, 2).unwrap().sup_norm() > 1.0);
    }

    #[test]
    fn beam_symbol_on_cosine() {
        let g = make_grid(64, PI).unwrap();
        let f = g.sample(f64::cos);
        let out = apply_beam_symbol(&f, 1.0);
        // roundoff in the top modes is amplified by kmax^4
        assert!(sup_diff(out.values(), f.values()) < 1e-15 * g.max_wavenumber().powi(4));
        let inv = invert_beam_symbol(&f, 1.0).unwrap();
        assert!(sup_diff(inv.values(), f.values()) < 1e-12);
        let zero = RealField::zeros(&g);
        assert_eq!(apply_beam_symbol(&zero, 1.0).sup_norm(), 0.0);
        let one = g.sample(|_| 1.0);
        assert!(sup_diff(invert_beam_symbol(&one, 0.7).unwrap().values(), one.values()) < 1e-14);
    }

    #[test]
    fn invert_rejects_large_wavespeed() {
        let g = make_grid(16, PI).unwrap();
        let f = RealField::zeros(&g);
        assert!(matches!(
            invert_beam_symbol(&f, 1.5),
            Err(Error::SymbolNotPositive { .. })
        ));
        assert!(matches!(
            symbol_min(2.0f64.sqrt()),
            Err(Error::SymbolNotPositive { .. })
        ));
    }

    #[test]
    fn symbol_minimum_values() {
        assert_eq!(symbol_min(0.0).unwrap(), 1.0);
        assert_eq!(symbol_min(1.0).unwrap(), 0.75);
        let near = symbol_min(2.0f64.sqrt() - 1e-9).unwrap();
        assert!(near > 0.0 && near < 1e-8);
        // brute-force minimum over k
        for &c in &[0.3, 1.0, 1.3] {
            let brute = (0..200_000)
                .map(|i| beam_symbol(i as f64 * 1e-5, c))
                .fold(f64::INFINITY, f64::min);
            assert!((brute - symbol_min(c).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn constraint_functional_of_sine() {
        let g = make_grid(32, PI).unwrap();
        let f = g.sample(f64::sin);
        for &c in &[0.0, 0.5, 1.2] {
            let expected = PI * (2.0 - c * c);
            assert!((constraint_functional(&f, c) - expected).abs() < 1e-12);
        }
        assert_eq!(constraint_functional(&RealField::zeros(&g), 1.0), 0.0);
    }

    #[test]
    fn interpolation_is_exact_for_band_limited() {
        let g = make_grid(32, PI).unwrap();
        let fine = make_grid(64, PI).unwrap();
        let f = g.sample(|x| (3.0 * x).sin() + 0.5 * (2.0 * x).cos());
        let up = f.interpolate_to(&fine).unwrap();
        let exact = fine.sample(|x| (3.0 * x).sin() + 0.5 * (2.0 * x).cos());
        assert!(sup_diff(up.values(), exact.values()) < 1e-13);
    }

    #[test]
    fn shift_moves_profile() {
        let g = make_grid(64, PI).unwrap();
        let f = g.sample(|x| x.cos().exp());
        let s = 0.37;
        let shifted = f.shifted(s);
        let exact = g.sample(|x| (x - s).cos().exp());
        assert!(sup_diff(shifted.values(), exact.values()) < 1e-12);
    }

    #[test]
    fn differentiation_matrix_matches_fft() {
        let g = make_grid(16, 2.0).unwrap();
        let f = g.sample(|x| (x * PI / 2.0).sin().exp());
        for order in 1..=4 {
            let d = g.differentiation_matrix(order).unwrap();
            let fft = g.derivative(f.values(), order).unwrap();
            for i in 0..16 {
                let row: f64 = (0..16).map(|j| d[(i, j)] * f.values()[j]).sum();
                assert!((row - fft[i]).abs() < 1e-11);
            }
        }
        let d1 = g.differentiation_matrix(1).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                assert!((d1[(i, j)] + d1[(j, i)]).abs() < 1e-13);
            }
        }
    }

    fn random_field(grid: &PeriodicGrid, coeffs: &[f64]) -> RealField {
        grid.sample(|x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(j, a)| a * ((j as f64 + 1.0) * x + j as f64).sin())
                .sum()
        })
    }

    proptest! {
        #[test]
        fn symbol_round_trip(coeffs in prop::collection::vec(-1.0f64..1.0, 1..12), c in 0.0f64..1.41) {
            let g = make_grid(64, PI).unwrap();
            let f = random_field(&g, &coeffs);
            let back = invert_beam_symbol(&apply_beam_symbol(&f, c), c).unwrap();
            let scale = g.max_wavenumber().powi(4);
            prop_assert!(sup_diff(back.values(), f.values()) < 1e-15 * scale * (1.0 + f.sup_norm()));
        }

        #[test]
        fn pure_modes_differentiate_exactly(j in 1usize..15, order in 1i32..=4) {
            let g = make_grid(32, PI).unwrap();
            let k = j as f64;
            let f = g.sample(|x| (k * x).cos());
            let d = differentiate(&f, order).unwrap();
            let expected = g.sample(|x| match order {
                1 => -k * (k * x).sin(),
                2 => -k * k * (k * x).cos(),
                3 => k.powi(3) * (k * x).sin(),
                _ => k.powi(4) * (k * x).cos(),
            });
            let scale = g.max_wavenumber().powi(order);
            prop_assert!(sup_diff(d.values(), expected.values()) < 1e-14 * scale);
        }

        #[test]
        fn coercivity(coeffs in prop::collection::vec(-1.0f64..1.0, 1..12), c in 0.0f64..1.41) {
            let g = make_grid(64, PI).unwrap();
            let f = random_field(&g, &coeffs);
            let lhs = constraint_functional(&f, c);
            let rhs = symbol_min(c).unwrap() * f.norm_sq();
            prop_assert!(lhs >= rhs - 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn parseval(values in prop::collection::vec(-10.0f64..10.0, 32)) {
            let g = make_grid(32, 1.7).unwrap();
            let coeffs = g.forward(&values);
            let physical = g.norm_sq(&values);
            let spectral: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() * 2.0 * g.half_length();
            prop_assert!((physical - spectral).abs() < 1e-12 * (1.0 + physical));
        }
    }
}
