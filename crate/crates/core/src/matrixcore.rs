//! Dense complex-matrix substrate shared by every construction.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex64`. Singular value
//! and eigenvalue decompositions go through `faer`; nalgebra's complex SVD
//! with singular vectors loses accuracy on rank-deficient inputs. This module
//! adds the tolerance policy, a checked linear solve that reports how close the
//! system is to singular, seeded Haar generators, and the handful of block and
//! subspace helpers the colligation code needs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Deterministic generator used everywhere randomness occurs.
pub type SeededRng = ChaCha8Rng;

pub const TOL_PROFILE_ENV: &str = "COLLIGATION_TOL_PROFILE";

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Numerical tolerances. All values are relative and lie in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bound on `‖U*U - I‖_F / sqrt(N)`.
    pub unitarity_tol: f64,
    /// Relative residual accepted from a linear solve.
    pub residual_tol: f64,
    /// Singular-value cutoff relative to the largest singular value.
    pub rank_tol: f64,
    /// Minimum `sigma_min / max(sigma_max, 1)` of an eliminated system before the
    /// argument is treated as lying on the singular locus.
    pub surface_guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity_tol: 1e-10,
            residual_tol: 1e-9,
            rank_tol: 1e-9,
            surface_guard: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn strict() -> Self {
        Self {
            unitarity_tol: 1e-12,
            residual_tol: 1e-11,
            rank_tol: 1e-11,
            surface_guard: 1e-6,
        }
    }

    /// Preset named by `COLLIGATION_TOL_PROFILE` (`strict` or `default`).
    pub fn from_env() -> Self {
        match std::env::var(TOL_PROFILE_ENV).as_deref() {
            Ok("strict") => Self::strict(),
            _ => Self::default(),
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.unitarity_tol, self.residual_tol, self.rank_tol, self.surface_guard]
            .iter()
            .all(|t| *t > 0.0 && *t < 1.0)
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a matrix from row-major nested slices of complex entries.
pub fn from_rows(rows: &[Vec<Complex64>]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    ComplexMatrix::from_fn(nrows, ncols, |i, j| rows[i][j])
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    ComplexMatrix::from_fn(nrows, ncols, |i, j| c64(rows[i][j], 0.0))
}

pub fn diag(entries: &[Complex64]) -> ComplexMatrix {
    let n = entries.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { c64(0.0, 0.0) })
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn to_faer(m: &ComplexMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full singular value decomposition `m = U diag(s) V*`, with `U` and `V`
/// square and `s` descending of length `min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Svd {
            u: identity(rows),
            s: Vec::new(),
            v: identity(cols),
        };
    }
    let f = to_faer(m).svd().expect("SVD of a finite matrix converges");
    Svd {
        u: from_faer(f.U()),
        s: f.S().column_vector().iter().map(|z| z.re).collect(),
        v: from_faer(f.V()),
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv = to_faer(m).singular_values().expect("SVD of a finite matrix converges");
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of the Hermitian
/// part of `h`.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * c64(0.5, 0.0);
    let e = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("Hermitian eigensolver converges");
    let values = e.S().column_vector().iter().map(|z| z.re).collect();
    (values, from_faer(e.U()))
}

/// Largest singular value (0 for empty matrices).
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `(sigma_max, sigma_min)` of a non-empty matrix.
pub fn extreme_singular_values(m: &ComplexMatrix) -> (f64, f64) {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(hi), Some(lo)) => (*hi, *lo),
        _ => (0.0, 0.0),
    }
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// `‖U*U - I‖_F / sqrt(N)`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    if n == 0 {
        return 0.0;
    }
    let g = u.adjoint() * u - identity(n);
    g.norm() / (n as f64).sqrt()
}

pub fn check_unitary(u: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    if !is_finite(u) {
        return Err(Error::NonFinite);
    }
    if !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = unitarity_defect(u);
    if defect > tol.unitarity_tol {
        return Err(Error::NotUnitary {
            defect,
            tol: tol.unitarity_tol,
        });
    }
    Ok(())
}

/// Checks a real orthogonal matrix stored with complex entries.
pub fn check_orthogonal(o: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    if !is_finite(o) {
        return Err(Error::NonFinite);
    }
    if !o.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            o.nrows(),
            o.ncols()
        )));
    }
    let n = o.nrows().max(1) as f64;
    let imag = o.iter().map(|z| z.im * z.im).sum::<f64>().sqrt() / n.sqrt();
    let defect = unitarity_defect(o).max(imag);
    if defect > tol.unitarity_tol {
        return Err(Error::NotOrthogonal {
            defect,
            tol: tol.unitarity_tol,
        });
    }
    Ok(())
}

/// Result of [`solve`]: the solution together with the singular-value
/// certificate of the coefficient matrix.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: ComplexMatrix,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Solves `M X = RHS`.
///
/// Fails with `NearSingular` when `sigma_min / max(sigma_max, 1) < surface_guard`;
/// this is how callers detect arguments on or near a singular locus.
pub fn solve(m: &ComplexMatrix, rhs: &ComplexMatrix, tol: &Tolerances) -> Result<Solution> {
    if !m.is_square() || m.nrows() != rhs.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: matrix {}x{}, right-hand side {}x{}",
            m.nrows(),
            m.ncols(),
            rhs.nrows(),
            rhs.ncols()
        )));
    }
    if !is_finite(m) || !is_finite(rhs) {
        return Err(Error::NonFinite);
    }
    if m.nrows() == 0 {
        return Ok(Solution {
            x: zeros(0, rhs.ncols()),
            sigma_min: 0.0,
            sigma_max: 0.0,
        });
    }
    let (sigma_max, sigma_min) = extreme_singular_values(m);
    let ratio = sigma_min / sigma_max.max(1.0);
    if ratio < tol.surface_guard {
        return Err(Error::NearSingular { sigma_min, ratio });
    }
    let x = m
        .clone()
        .lu()
        .solve(rhs)
        .ok_or(Error::NearSingular { sigma_min, ratio })?;
    let residual = (m * &x - rhs).norm();
    let scale = sigma_max * x.norm() + rhs.norm();
    if scale > 0.0 && residual > tol.residual_tol * scale {
        return Err(Error::ResidualTooLarge {
            residual: residual / scale,
        });
    }
    Ok(Solution {
        x,
        sigma_min,
        sigma_max,
    })
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians (`E|z|^2 = 1`).
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn real_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c64(rng.sample(StandardNormal), 0.0))
}

/// Q factor of `g` with the diagonal of R normalized to be positive real.
fn phase_fixed_q(g: ComplexMatrix) -> ComplexMatrix {
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed unitary drawn from `rng`.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    phase_fixed_q(gaussian_matrix(dim, dim, rng))
}

/// Haar-distributed unitary, deterministic per `(dim, seed)`.
pub fn haar_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(dim, &mut rng(seed))
}

pub fn haar_orthogonal_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut q = phase_fixed_q(real_gaussian_matrix(dim, dim, rng));
    // Householder QR of a real matrix stays real up to signed zeros.
    for z in q.iter_mut() {
        z.im = 0.0;
    }
    q
}

/// Haar-distributed real orthogonal matrix, deterministic per `(dim, seed)`.
pub fn haar_orthogonal(dim: usize, seed: u64) -> ComplexMatrix {
    haar_orthogonal_with(dim, &mut rng(seed))
}

/// Random square matrix with operator norm exactly `radius`.
pub fn matrix_with_norm<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let norm = op_norm(&g);
    g * c64(radius / norm, 0.0)
}

/// Random square matrix with operator norm uniform in `(0, radius]`.
pub fn ball_matrix<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> ComplexMatrix {
    let r = radius * (1.0 - rng.random::<f64>());
    matrix_with_norm(n, r, rng)
}

/// Point uniformly distributed in the disc `|z| < radius`.
pub fn disc_point<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

/// Point on the unit circle.
pub fn circle_point<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    block_diag(&[a, b])
}

/// `S ⊗ I_m`: the `(j, k)` block of size `m` is `s_jk · I_m`.
pub fn kron_identity(s: &ComplexMatrix, m: usize) -> ComplexMatrix {
    let mut out = zeros(s.nrows() * m, s.ncols() * m);
    for j in 0..s.nrows() {
        for k in 0..s.ncols() {
            let v = s[(j, k)];
            for t in 0..m {
                out[(j * m + t, k * m + t)] = v;
            }
        }
    }
    out
}

/// Assembles a matrix from a grid of blocks; every block row must agree in
/// height and every block column in width.
pub fn block_matrix(blocks: &[Vec<&ComplexMatrix>]) -> ComplexMatrix {
    let heights: Vec<usize> = blocks.iter().map(|row| row[0].nrows()).collect();
    let widths: Vec<usize> = blocks[0].iter().map(|b| b.ncols()).collect();
    let mut out = zeros(heights.iter().sum(), widths.iter().sum());
    let mut r = 0;
    for (i, row) in blocks.iter().enumerate() {
        let mut c = 0;
        for (j, b) in row.iter().enumerate() {
            debug_assert_eq!(b.nrows(), heights[i]);
            debug_assert_eq!(b.ncols(), widths[j]);
            out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
            c += widths[j];
        }
        r += heights[i];
    }
    out
}

pub fn hstack(parts: &[&ComplexMatrix]) -> ComplexMatrix {
    block_matrix(&[parts.to_vec()])
}

pub fn vstack(parts: &[&ComplexMatrix]) -> ComplexMatrix {
    let rows: Vec<Vec<&ComplexMatrix>> = parts.iter().map(|p| vec![*p]).collect();
    block_matrix(&rows)
}

/// Orthonormal basis (as columns) of the kernel of `m`, with singular values
/// at most `rank_tol · sigma_max` treated as zero.
pub fn null_space(m: &ComplexMatrix, rank_tol: f64) -> ComplexMatrix {
    kernel_below(m, |sigma_max| rank_tol * sigma_max)
}

/// Kernel with singular values at most `cutoff` treated as zero. Suited to
/// matrices assembled from orthonormal bases, where a numerically zero
/// matrix must give the full kernel.
pub fn null_space_abs(m: &ComplexMatrix, cutoff: f64) -> ComplexMatrix {
    kernel_below(m, |_| cutoff)
}

fn kernel_below(m: &ComplexMatrix, cutoff: impl Fn(f64) -> f64) -> ComplexMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return zeros(0, 0);
    }
    let d = svd(m);
    let sigma_max = d.s.first().copied().unwrap_or(0.0);
    let cut = cutoff(sigma_max);
    // Columns of V past min(rows, cols) belong to the kernel outright.
    let keep: Vec<usize> = (0..cols)
        .filter(|&i| d.s.get(i).is_none_or(|&s| sigma_max == 0.0 || s <= cut))
        .collect();
    ComplexMatrix::from_fn(cols, keep.len(), |r, c| d.v[(r, keep[c])])
}

/// Orthonormal basis of the column span of `m` at relative cutoff `rank_tol`.
pub fn orthonormal_range(m: &ComplexMatrix, rank_tol: f64) -> ComplexMatrix {
    range_above(m, |sigma_max| rank_tol * sigma_max)
}

/// Column span keeping singular values above the absolute `cutoff`.
pub fn orthonormal_range_abs(m: &ComplexMatrix, cutoff: f64) -> ComplexMatrix {
    range_above(m, |_| cutoff)
}

fn range_above(m: &ComplexMatrix, cutoff: impl Fn(f64) -> f64) -> ComplexMatrix {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return zeros(rows, 0);
    }
    let d = svd(m);
    let sigma_max = d.s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return zeros(rows, 0);
    }
    let cut = cutoff(sigma_max);
    let keep = d.s.iter().take_while(|&&s| s > cut).count();
    d.u.columns(0, keep).into_owned()
}

/// Eigenvalues of a square matrix, unordered.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m[(0, 0)]];
    }
    to_faer(m).eigenvalues().expect("eigensolver converges")
}

pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return c64(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Entrywise complex conjugate (no transpose).
pub fn conjugate(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

/// `‖a - b‖₂`.
pub fn distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&identity(3)) - 1.0).abs() < 1e-15);
        assert_eq!(op_norm(&zeros(2, 4)), 0.0);
        let d = diag(&[c64(0.0, 2.0), c64(1.0, 0.0)]);
        assert!((op_norm(&d) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn solve_examples() {
        let b = gaussian_matrix(3, 2, &mut rng(1));
        let s = solve(&identity(3), &b, &tol()).unwrap();
        assert!((s.x - b).norm() < 1e-15);

        let m = diag(&[c64(2.0, 0.0), c64(4.0, 0.0)]);
        let rhs = from_real_rows(&[&[2.0], &[4.0]]);
        let s = solve(&m, &rhs, &tol()).unwrap();
        assert!((s.x - from_real_rows(&[&[1.0], &[1.0]])).norm() < 1e-15);
        assert!((s.sigma_min - 2.0).abs() < 1e-15);

        let err = solve(&zeros(2, 2), &rhs, &tol()).unwrap_err();
        assert!(matches!(err, Error::NearSingular { .. }));
    }

    #[test]
    fn solve_rejects_shape_mismatch() {
        let err = solve(&identity(2), &zeros(3, 1), &tol()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn haar_unitary_examples() {
        let u1 = haar_unitary(1, 9);
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-14);

        let u = haar_unitary(5, 42);
        assert!(unitarity_defect(&u) <= tol().unitarity_tol);

        let again = haar_unitary(5, 42);
        assert_eq!(u, again);
        for (a, b) in u.iter().zip(again.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn haar_orthogonal_examples() {
        let o1 = haar_orthogonal(1, 3);
        assert!((o1[(0, 0)].re.abs() - 1.0).abs() < 1e-14);
        assert_eq!(o1[(0, 0)].im, 0.0);

        let o = haar_orthogonal(4, 7);
        assert!(o.iter().all(|z| z.im == 0.0));
        let defect = (o.transpose() * &o - identity(4)).norm() / 2.0;
        assert!(defect <= tol().unitarity_tol);
        assert!(check_orthogonal(&o, &tol()).is_ok());
        assert_eq!(o, haar_orthogonal(4, 7));
    }

    #[test]
    fn haar_phases_are_uniform_on_average() {
        // For Haar measure E[U] = 0; the phase fix is what removes the bias
        // towards positive diagonal entries.
        let dim = 3;
        let trials = 4000;
        let mut acc = zeros(dim, dim);
        let mut r = rng(11);
        for _ in 0..trials {
            acc += haar_unitary_with(dim, &mut r);
        }
        acc /= c64(trials as f64, 0.0);
        assert!(acc.norm() < 0.1, "mean of Haar samples {}", acc.norm());
    }

    #[test]
    fn null_space_and_range() {
        let m = from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let k = null_space(&m, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
        assert!((k.adjoint() * &k - identity(2)).norm() < 1e-14);

        let r = orthonormal_range(&m, 1e-12);
        assert_eq!(r.ncols(), 1);

        assert_eq!(null_space(&zeros(2, 3), 1e-9).ncols(), 3);
        assert_eq!(orthonormal_range(&zeros(2, 3), 1e-9).ncols(), 0);
    }

    #[test]
    fn eigenvalues_of_triangular_and_random() {
        let d = diag(&[c64(1.0, 0.0), c64(0.0, 1.0), c64(-1.0, 0.0)]);
        let mut ev = eigenvalues(&d);
        ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        assert!((ev[0] - c64(0.0, 0.0)).norm() > 0.5);

        let m = gaussian_matrix(5, 5, &mut rng(4));
        let ev = eigenvalues(&m);
        let prod = ev.iter().fold(c64(1.0, 0.0), |acc, z| acc * z);
        assert!((prod - determinant(&m)).norm() < 1e-10 * determinant(&m).norm().max(1.0));
    }

    #[test]
    fn kron_identity_layout() {
        let s = from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let k = kron_identity(&s, 2);
        assert_eq!(k[(0, 2)], c64(2.0, 0.0));
        assert_eq!(k[(1, 3)], c64(2.0, 0.0));
        assert_eq!(k[(0, 3)], c64(0.0, 0.0));
        assert_eq!(k[(3, 1)], c64(3.0, 0.0));
    }

    #[test]
    fn tolerance_profiles() {
        assert!(Tolerances::default().is_valid());
        assert!(Tolerances::strict().is_valid());
        let bad = Tolerances {
            rank_tol: 0.0,
            ..Tolerances::default()
        };
        assert!(!bad.is_valid());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn op_norm_is_adjoint_invariant(seed in any::<u64>(), r in 1usize..6, c in 1usize..6) {
                let m = gaussian_matrix(r, c, &mut rng(seed));
                let a = op_norm(&m);
                prop_assert!((a - op_norm(&m.adjoint())).abs() <= 1e-9 * a.max(1.0));
            }

            #[test]
            fn solve_recovers_planted_solution(seed in any::<u64>(), n in 1usize..7) {
                let mut g = rng(seed);
                let m = gaussian_matrix(n, n, &mut g);
                let x0 = gaussian_matrix(n, 2, &mut g);
                let (hi, lo) = extreme_singular_values(&m);
                prop_assume!(lo / hi > 1e-4);
                let s = solve(&m, &(&m * &x0), &Tolerances::default()).unwrap();
                prop_assert!((s.x - &x0).norm() <= 1e-9 * (hi / lo) * x0.norm().max(1.0));
            }

            #[test]
            fn haar_determinant_has_unit_modulus(seed in any::<u64>(), n in 1usize..7) {
                let u = haar_unitary(n, seed);
                prop_assert!((determinant(&u).norm() - 1.0).abs() <= 1e-9);
            }
        }
    }
}
