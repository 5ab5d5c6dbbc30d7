//! Linearized operators about a wave, Morse indices, constrained solves,
//! Vakhitov–Kolokolov quantities and the spectrum of the full linearization.

use std::sync::OnceLock;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, RealField};
use crate::nonlinearity::Nonlinearity;
use crate::params::WaveParameters;
use crate::profile::TravelingWave;

/// Eigenvalues of `L` with modulus below this are treated as kernel.
pub const KERNEL_TOL: f64 = 1e-6;
/// Real parts below this are treated as zero when classifying the spectrum.
pub const EIGEN_TOL: f64 = 1e-4;
/// Relative Morse tolerance; multiplied by [`LinearOperatorMatrix::symbol_scale`].
pub const MORSE_REL_TOL: f64 = 1e-8;
/// Admissible relative overlap of a right-hand side with the kernel.
pub const ORTHO_TOL: f64 = 1e-6;
/// Fraction of mode energy inside `|x| < L/3` above which an eigenmode is
/// reported as an internal (localized) mode.
pub const LOCALIZATION_THRESHOLD: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    LPlus,
    LMinus,
}

#[derive(Clone, Debug)]
struct SymmetricEigen {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

/// Dense symmetric matrix of `L+` or `L-` on the collocation grid.
#[derive(Debug)]
pub struct LinearOperatorMatrix {
    entries: Mat<f64>,
    which: OperatorKind,
    grid: PeriodicGrid,
    potential: Vec<f64>,
    second: f64,
    linear: f64,
    symbol_scale: f64,
    eigen: OnceLock<SymmetricEigen>,
}

impl LinearOperatorMatrix {
    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn which(&self) -> OperatorKind {
        self.which
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Largest symbol value on the grid, roughly the operator norm.
    pub fn symbol_scale(&self) -> f64 {
        self.symbol_scale
    }

    pub fn default_morse_tol(&self) -> f64 {
        MORSE_REL_TOL * self.symbol_scale
    }

    /// Spectral (FFT) application, identical to the matrix up to roundoff.
    pub fn apply(&self, f: &RealField) -> RealField {
        let mut out = self.grid.apply_even_multiplier(f.values(), |k| self.symbol(k));
        for ((o, v), x) in out.iter_mut().zip(&self.potential).zip(f.values()) {
            *o -= v * x;
        }
        RealField::from_vec_unchecked(&self.grid, out)
    }

    /// Dense matrix-vector product.
    pub fn apply_dense(&self, f: &RealField) -> RealField {
        let n = f.len();
        let values = (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)] * f.values()[j]).sum())
            .collect();
        RealField::from_vec_unchecked(&self.grid, values)
    }

    fn symbol(&self, k: f64) -> f64 {
        let k2 = k * k;
        k2 * k2 - self.second * k2 + self.linear
    }

    fn apply_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut coeffs = self.grid.forward_complex(x);
        for (z, &k) in coeffs.iter_mut().zip(self.grid.wavenumbers()) {
            *z *= self.symbol(k);
        }
        let mut out = self.grid.inverse_complex(coeffs);
        for ((o, v), xi) in out.iter_mut().zip(&self.potential).zip(x) {
            *o -= xi * v;
        }
        out
    }

    fn eigen(&self) -> Result<&SymmetricEigen> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let decomposition = self
            .entries
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
        let values = decomposition.S().column_vector().iter().copied().collect();
        let vectors = decomposition.U().to_owned();
        Ok(self.eigen.get_or_init(|| SymmetricEigen { values, vectors }))
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> Result<&[f64]> {
        Ok(&self.eigen()?.values)
    }

    /// Number of eigenvalues with modulus below [`KERNEL_TOL`].
    pub fn kernel_dimension(&self) -> Result<usize> {
        Ok(self
            .eigenvalues()?
            .iter()
            .filter(|l| l.abs() < KERNEL_TOL)
            .count())
    }

    /// Eigenvector of the smallest eigenvalue, normalized in `L^2` and
    /// positive at `x = 0`.
    pub fn lowest_eigenfunction(&self) -> Result<RealField> {
        let e = self.eigen()?;
        let n = self.grid.n_points();
        let mut v: Vec<f64> = (0..n).map(|i| e.vectors[(i, 0)]).collect();
        let norm = self.grid.norm_sq(&v).sqrt();
        let sign = if v[self.grid.origin_index()] < 0.0 {
            -1.0
        } else {
            1.0
        };
        v.iter_mut().for_each(|x| *x *= sign / norm);
        Ok(RealField::from_vec_unchecked(&self.grid, v))
    }
}

fn potentials(wave: &TravelingWave) -> (Option<Vec<f64>>, Vec<f64>) {
    let phi = wave.profile.values();
    let (nonlinearity, gamma) = match &wave.params {
        WaveParameters::Beam(p) => (p.nonlinearity.clone(), p.gamma),
        WaveParameters::Nls(_) => (Nonlinearity::cubic(), 1.0),
    };
    let pairs: Vec<(Option<f64>, f64)> = phi.iter().map(|&p| nonlinearity.potentials(gamma, p)).collect();
    let minus = if matches!(nonlinearity, Nonlinearity::Exponential) {
        None
    } else {
        Some(pairs.iter().map(|(m, _)| m.unwrap_or(0.0)).collect())
    };
    (minus, pairs.into_iter().map(|(_, p)| p).collect())
}

/// `D4 + s D2 + w - diag(V)` for `L+` or `L-`, symmetrized.
pub fn assemble_operator(wave: &TravelingWave, which: OperatorKind) -> Result<LinearOperatorMatrix> {
    let (minus, plus) = potentials(wave);
    let potential = match which {
        OperatorKind::LPlus => plus,
        OperatorKind::LMinus => minus.ok_or(Error::UnsupportedForFamily("exponential"))?,
    };
    let grid = wave.grid().clone();
    let second = wave.params.second_order_coefficient();
    let linear = wave.params.linear_coefficient();
    let symbol = |k: f64| {
        let k2 = k * k;
        k2 * k2 - second * k2 + linear
    };
    let n = grid.n_points();
    let base = grid.multiplier_matrix(symbol);
    let entries = Mat::from_fn(n, n, |i, j| {
        let sym = 0.5 * (base[(i, j)] + base[(j, i)]);
        if i == j {
            sym - potential[i]
        } else {
            sym
        }
    });
    let symbol_scale = grid
        .wavenumbers()
        .iter()
        .map(|&k| symbol(k).abs())
        .fold(1.0, f64::max);
    Ok(LinearOperatorMatrix {
        entries,
        which,
        grid,
        potential,
        second,
        linear,
        symbol_scale,
        eigen: OnceLock::new(),
    })
}

/// Number of eigenvalues below `-tol`.
pub fn morse_index(op: &LinearOperatorMatrix, tol: f64) -> Result<usize> {
    Ok(op.eigenvalues()?.iter().filter(|&&l| l < -tol).count())
}

/// Morse index when the operator is known to have a `kernel`-dimensional
/// null space. Inside the band `|l| <= tol` the `kernel` eigenvalues nearest
/// zero are taken as the null space and the rest are classified by sign, so
/// a small but genuine negative eigenvalue is not swallowed by the band.
pub fn morse_index_modulo_kernel(op: &LinearOperatorMatrix, tol: f64, kernel: usize) -> Result<usize> {
    let values = op.eigenvalues()?;
    let mut band: Vec<f64> = values.iter().copied().filter(|l| l.abs() <= tol).collect();
    band.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let clear = values.iter().filter(|&&l| l < -tol).count();
    Ok(clear + band.iter().skip(kernel).filter(|&&l| l < 0.0).count())
}

/// Solves `L+ w = rhs` for `w` orthogonal to the numerical kernel.
pub fn solve_l_plus_constrained(
    op: &LinearOperatorMatrix,
    rhs: &RealField,
    kernel: &RealField,
) -> Result<RealField> {
    if op.which != OperatorKind::LPlus {
        return Err(Error::InvalidArgument("constrained solve needs L+".into()));
    }
    let grid = &op.grid;
    let rhs_norm = rhs.norm_sq().sqrt();
    let kernel_norm = kernel.norm_sq().sqrt();
    if rhs_norm > 0.0 && kernel_norm > 0.0 {
        let overlap = rhs.inner(kernel).abs() / (rhs_norm * kernel_norm);
        if overlap > ORTHO_TOL {
            return Err(Error::FredholmViolation { overlap });
        }
    }
    let e = op.eigen()?;
    let dimension = e.values.iter().filter(|l| l.abs() < KERNEL_TOL).count();
    if dimension > 1 {
        return Err(Error::DegenerateKernel { dimension });
    }
    let n = grid.n_points();
    let b = Mat::from_fn(n, 1, |i, _| rhs.values()[i]);
    let mut c = e.vectors.transpose() * &b;
    for (i, &l) in e.values.iter().enumerate() {
        c[(i, 0)] = if l.abs() < KERNEL_TOL { 0.0 } else { c[(i, 0)] / l };
    }
    let w = &e.vectors * &c;
    Ok(RealField::from_vec_unchecked(
        grid,
        (0..n).map(|i| w[(i, 0)]).collect(),
    ))
}

fn beam_vk_with(op: &LinearOperatorMatrix, wave: &TravelingWave, c: f64) -> Result<f64> {
    let d1 = crate::grid::differentiate(&wave.profile, 1)?;
    let d2 = crate::grid::differentiate(&wave.profile, 2)?;
    let w = solve_l_plus_constrained(op, &d2, &d1)?;
    Ok(4.0 * c * c * w.inner(&d2) + d1.norm_sq())
}

fn nls_vk_with(op: &LinearOperatorMatrix, wave: &TravelingWave) -> Result<f64> {
    let d1 = crate::grid::differentiate(&wave.profile, 1)?;
    let w = solve_l_plus_constrained(op, &wave.profile, &d1)?;
    Ok(w.inner(&wave.profile))
}

/// `4 c^2 <L+^{-1} phi'', phi''> + |phi'|^2`, which equals `d/dc (c |phi'|^2)`.
pub fn vk_beam(wave: &TravelingWave) -> Result<f64> {
    let c = wave
        .wavespeed()
        .ok_or_else(|| Error::InvalidArgument("vk_beam needs a beam wave".into()))?;
    beam_vk_with(&assemble_operator(wave, OperatorKind::LPlus)?, wave, c)
}

/// `<L+^{-1} phi, phi>` for the NLS standing wave.
pub fn vk_nls(wave: &TravelingWave) -> Result<f64> {
    if !matches!(wave.params, WaveParameters::Nls(_)) {
        return Err(Error::InvalidArgument("vk_nls needs an NLS wave".into()));
    }
    nls_vk_with(&assemble_operator(wave, OperatorKind::LPlus)?, wave)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IndexCounts {
    /// Positive real eigenvalues.
    pub k_r: usize,
    /// Quadruples off both axes.
    pub k_c: usize,
    /// Imaginary pairs with negative Krein signature.
    pub k_i_minus: usize,
}

impl IndexCounts {
    pub fn total(&self) -> i64 {
        (self.k_r + 2 * self.k_c + 2 * self.k_i_minus) as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        }
    }
}

/// Eigenpair of the linearization in physical variables, `(v, w)`.
#[derive(Clone, Debug)]
pub struct Eigenmode {
    pub lambda: Complex64,
    pub v: RealField,
    pub w: RealField,
    /// Fraction of `|v|^2 + |w|^2` inside `|x| < L/3`.
    pub localization: f64,
    /// Energy `<L f, f>` of the mode normalized by `|f|^2`.
    pub krein: f64,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues attributed to the generalized kernel and excluded from the counts.
    pub kernel_eigenvalues: Vec<Complex64>,
    pub max_re: f64,
    pub morse_l_plus: usize,
    pub morse_l_minus: Option<usize>,
    pub vk_value: f64,
    pub counts: IndexCounts,
    /// `n(L)`.
    pub n_l: usize,
    /// `n(D)`.
    pub n_d: usize,
    pub index_identity_ok: bool,
    /// Eigenfunction of the negative eigenvalue of `L+`.
    pub negative_eigenfunction: Option<RealField>,
    /// Leading real unstable mode (real eigenvector, unit `L^2` norm).
    pub unstable_mode: Option<Eigenmode>,
    /// Localized purely imaginary modes with positive imaginary part.
    pub internal_modes: Vec<Eigenmode>,
}

impl SpectrumReport {
    pub fn verdict(&self) -> Verdict {
        if self.counts.k_r == 0 && self.counts.k_c == 0 {
            Verdict::Stable
        } else {
            Verdict::Unstable
        }
    }
}

/// Largest distance from the spectrum to its images under `-lambda` and `conj`.
pub fn quartet_defect(eigenvalues: &[Complex64]) -> f64 {
    let nearest = |z: Complex64| {
        eigenvalues
            .iter()
            .map(|w| (w - z).norm())
            .fold(f64::INFINITY, f64::min)
    };
    eigenvalues
        .iter()
        .map(|&z| nearest(-z).max(nearest(z.conj())))
        .fold(0.0, f64::max)
}

fn mode_fields(grid: &PeriodicGrid, column: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.n_points();
    (column[..n].to_vec(), column[n..].to_vec())
}

fn localization(grid: &PeriodicGrid, a: &[Complex64], b: &[Complex64]) -> f64 {
    let cut = grid.half_length() / 3.0;
    let mut inside = 0.0;
    let mut total = 0.0;
    for m in 0..grid.n_points() {
        let e = a[m].norm_sqr() + b[m].norm_sqr();
        total += e;
        if grid.node(m).abs() < cut {
            inside += e;
        }
    }
    if total > 0.0 {
        inside / total
    } else {
        0.0
    }
}

fn inner_c(grid: &PeriodicGrid, a: &[Complex64], b: &[Complex64]) -> f64 {
    grid.spacing() * a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
}

/// Rotates a complex vector so its largest entry is real and positive, and
/// returns the real part.
fn realify(x: &[Complex64]) -> Vec<f64> {
    let pivot = x
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    x.iter().map(|z| (z * phase).re).collect()
}

enum Linearization<'a> {
    Beam {
        lp: &'a LinearOperatorMatrix,
        c: f64,
    },
    Nls {
        lp: &'a LinearOperatorMatrix,
        lm: &'a LinearOperatorMatrix,
    },
}

impl Linearization<'_> {
    /// Physical `(v, w)` from an eigenvector of the assembled matrix.
    fn physical(&self, grid: &PeriodicGrid, column: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let (a, b) = mode_fields(grid, column);
        match self {
            Linearization::Beam { lp, .. } => {
                // undo the balancing v~ = P v
                let mut coeffs = grid.forward_complex(&a);
                for (z, &k) in coeffs.iter_mut().zip(grid.wavenumbers()) {
                    *z /= lp.symbol(k).sqrt();
                }
                (grid.inverse_complex(coeffs), b)
            }
            Linearization::Nls { .. } => (a, b),
        }
    }

    fn krein(&self, v: &[Complex64], w: &[Complex64], grid: &PeriodicGrid) -> f64 {
        let (energy, norm) = match self {
            Linearization::Beam { lp, .. } => (
                inner_c(grid, v, &lp.apply_complex(v)) + inner_c(grid, w, w),
                inner_c(grid, v, v) + inner_c(grid, w, w),
            ),
            Linearization::Nls { lp, lm } => (
                inner_c(grid, v, &lp.apply_complex(v)) + inner_c(grid, w, &lm.apply_complex(w)),
                inner_c(grid, v, v) + inner_c(grid, w, w),
            ),
        };
        energy / norm
    }
}

fn assemble_linearization(grid: &PeriodicGrid, lin: &Linearization) -> Result<Mat<f64>> {
    let n = grid.n_points();
    match lin {
        Linearization::Beam { lp, c } => {
            // Similarity by diag(P, I) with P = sqrt(symbol): the blocks become
            // P and P - V P^{-1}, of size kmax^2 instead of kmax^4.
            let p = grid.multiplier_matrix(|k| lp.symbol(k).sqrt());
            let q = grid.multiplier_matrix(|k| 1.0 / lp.symbol(k).sqrt());
            let d1 = grid.differentiation_matrix(1)?;
            Ok(Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
                (true, true) => 0.0,
                (true, false) => p[(i, j - n)],
                (false, true) => {
                    let (r, s) = (i - n, j);
                    -(p[(r, s)] - lp.potential[r] * q[(r, s)])
                }
                (false, false) => 2.0 * c * d1[(i - n, j - n)],
            }))
        }
        Linearization::Nls { lp, lm } => Ok(Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, false) => -lm.entries[(i, j - n)],
            (false, true) => lp.entries[(i - n, j)],
            _ => 0.0,
        })),
    }
}

/// Full spectrum of the linearization with index counts.
///
/// Beam waves use `[[0, I], [-L+, 2c D1]]` acting on `(v, v_t)` in the
/// co-moving frame; NLS waves use `[[0, -L-], [L+, 0]]`.
pub fn eigen_linearization(wave: &TravelingWave) -> Result<SpectrumReport> {
    let grid = wave.grid().clone();
    let n = grid.n_points();
    let lp = assemble_operator(wave, OperatorKind::LPlus)?;
    let lm = match wave.params {
        WaveParameters::Nls(_) => Some(assemble_operator(wave, OperatorKind::LMinus)?),
        WaveParameters::Beam(_) if !wave.params.is_exponential() => {
            Some(assemble_operator(wave, OperatorKind::LMinus)?)
        }
        WaveParameters::Beam(_) => None,
    };
    // Translation (L+) and phase or scaling (L-) each contribute one kernel vector.
    let morse_l_plus = morse_index_modulo_kernel(&lp, lp.default_morse_tol(), 1)?;
    let morse_l_minus = match &lm {
        Some(op) => Some(morse_index_modulo_kernel(op, op.default_morse_tol(), 1)?),
        None => None,
    };

    let (lin, vk_value, n_l, kernel_pairs) = match &wave.params {
        WaveParameters::Beam(p) => {
            let kernel = lp.kernel_dimension()?;
            (
                Linearization::Beam {
                    lp: &lp,
                    c: p.wavespeed,
                },
                beam_vk_with(&lp, wave, p.wavespeed)?,
                morse_l_plus,
                kernel,
            )
        }
        WaveParameters::Nls(_) => {
            let lm_ref = lm.as_ref().expect("NLS has L-");
            let kernel = lp.kernel_dimension()? + lm_ref.kernel_dimension()?;
            (
                Linearization::Nls { lp: &lp, lm: lm_ref },
                nls_vk_with(&lp, wave)?,
                morse_l_plus + morse_l_minus.unwrap_or(0),
                kernel,
            )
        }
    };
    let n_d = usize::from(vk_value < 0.0);

    let matrix = assemble_linearization(&grid, &lin)?;
    let decomposition = matrix
        .eigen()
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    let eigenvalues: Vec<Complex64> = decomposition.S().column_vector().iter().copied().collect();
    if eigenvalues
        .iter()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::EigenFailure("non-finite eigenvalue".into()));
    }
    let vectors = decomposition.U();
    let column = |j: usize| -> Vec<Complex64> { (0..2 * n).map(|i| vectors[(i, j)]).collect() };

    // each kernel direction carries a Jordan pair at the origin
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[a].norm().total_cmp(&eigenvalues[b].norm()));
    let removed: Vec<usize> = order[..(2 * kernel_pairs).min(order.len())].to_vec();
    let is_removed = |j: usize| removed.contains(&j);

    let mut counts = IndexCounts::default();
    let mut unstable: Option<(usize, f64)> = None;
    let mut internal_modes = Vec::new();
    for (j, z) in eigenvalues.iter().enumerate() {
        if is_removed(j) {
            continue;
        }
        if z.re > EIGEN_TOL {
            if z.im.abs() <= EIGEN_TOL {
                counts.k_r += 1;
                if unstable.is_none_or(|(_, re)| z.re > re) {
                    unstable = Some((j, z.re));
                }
            } else if z.im > 0.0 {
                counts.k_c += 1;
            }
        } else if z.re.abs() <= EIGEN_TOL && z.im > EIGEN_TOL {
            let (v, w) = lin.physical(&grid, &column(j));
            let krein = lin.krein(&v, &w, &grid);
            if krein < 0.0 {
                counts.k_i_minus += 1;
            }
            let loc = localization(&grid, &v, &w);
            if loc > LOCALIZATION_THRESHOLD {
                internal_modes.push(Eigenmode {
                    lambda: *z,
                    v: RealField::from_vec_unchecked(&grid, realify(&v)),
                    w: RealField::from_vec_unchecked(&grid, realify(&w)),
                    localization: loc,
                    krein,
                });
            }
        }
    }
    internal_modes.sort_by(|a, b| a.lambda.im.total_cmp(&b.lambda.im));

    let unstable_mode = unstable.map(|(j, _)| real_mode(&grid, &lin, eigenvalues[j], &column(j), wave));
    let max_re = eigenvalues
        .iter()
        .enumerate()
        .filter(|(j, _)| !is_removed(*j))
        .map(|(_, z)| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let negative_eigenfunction = if morse_l_plus > 0 {
        Some(lp.lowest_eigenfunction()?)
    } else {
        None
    };
    let index_identity_ok = counts.total() == n_l as i64 - n_d as i64;
    Ok(SpectrumReport {
        kernel_eigenvalues: removed.iter().map(|&j| eigenvalues[j]).collect(),
        eigenvalues,
        max_re,
        morse_l_plus,
        morse_l_minus,
        vk_value,
        counts,
        n_l,
        n_d,
        index_identity_ok,
        negative_eigenfunction,
        unstable_mode,
        internal_modes,
    })
}

fn real_mode(
    grid: &PeriodicGrid,
    lin: &Linearization,
    lambda: Complex64,
    column: &[Complex64],
    wave: &TravelingWave,
) -> Eigenmode {
    let (v, w) = lin.physical(grid, column);
    let loc = localization(grid, &v, &w);
    let krein = lin.krein(&v, &w, grid);
    let joint: Vec<Complex64> = v.iter().chain(&w).copied().collect();
    let real = realify(&joint);
    let (mut rv, mut rw) = (real[..v.len()].to_vec(), real[v.len()..].to_vec());
    let norm = (grid.norm_sq(&rv) + grid.norm_sq(&rw)).sqrt();
    let sign = if grid.inner(&rv, wave.profile.values()) < 0.0 {
        -1.0
    } else {
        1.0
    };
    rv.iter_mut().for_each(|x| *x *= sign / norm);
    rw.iter_mut().for_each(|x| *x *= sign / norm);
    Eigenmode {
        lambda,
        v: RealField::from_vec_unchecked(grid, rv),
        w: RealField::from_vec_unchecked(grid, rw),
        localization: loc,
        krein,
    }
}

/// Checks `k_r + 2 k_c + 2 k_i^- = n(L) - n(D)` and returns the verdict.
pub fn index_report(report: &SpectrumReport) -> Result<Verdict> {
    let lhs = report.counts.total();
    let rhs = report.n_l as i64 - report.n_d as i64;
    if lhs != rhs {
        return Err(Error::IndexMismatch { lhs, rhs });
    }
    Ok(report.verdict())
}
