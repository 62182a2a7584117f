//! Families of unitaries up to two-sided real-orthogonal inner equivalence,
//! `g_j ↦ diag(1, u) g_j diag(1, v)` with `u, v` real orthogonal.
//!
//! Each member acts on the "plus" variables through `g_j` and on the "minus"
//! variables through `g_j^{t-1}`, which for unitary `g_j` is the entrywise
//! conjugate. With `y⁺ = 𝐒 y⁻` and `x⁻ = 𝐑 x⁺` the unknowns `(x⁺, y⁻)` solve
//!
//! ```text
//! [ -𝐃      𝐒 ] [x⁺]   [ 𝐂 p⁺ ]
//! [ -𝐃̃𝐑     I ] [y⁻] = [ 𝐂̃ p⁻ ]
//! ```
//!
//! and `q⁺ = 𝐀 p⁺ + 𝐁 x⁺`, `q⁻ = 𝐀̃ p⁻ + 𝐁̃ 𝐑 x⁺`. The value `χ(S, R)` acts on
//! `(p⁺_1, ..., p⁺_n, p⁻_1, ..., p⁻_n)`.

use num_complex::Complex64;
use rand::Rng;

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::matrixcore::{
    block_diag, block_matrix, check_orthogonal, check_unitary, conjugate, direct_sum, distance,
    extreme_singular_values, haar_unitary_with, identity, kron_identity, op_norm, solve, zeros, ComplexMatrix,
    Tolerances,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleCosetFamily {
    alpha: usize,
    inner: usize,
    members: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone)]
pub struct CharFun2Value {
    pub value: ComplexMatrix,
    /// Smallest singular value of the eliminated `2nm` system.
    pub sigma_min: f64,
    pub regular: bool,
}

/// Inner vectors of one solve, kept for the form estimates.
#[derive(Debug, Clone)]
pub struct InnerState {
    pub x_plus: ComplexMatrix,
    pub y_minus: ComplexMatrix,
    pub q: ComplexMatrix,
}

impl DoubleCosetFamily {
    pub fn new(members: Vec<ComplexMatrix>, alpha: usize, tol: &Tolerances) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::DimensionMismatch("family needs at least one member".into()))?;
        let size = first.nrows();
        if alpha == 0 || alpha >= size {
            return Err(Error::BadSplit { alpha, size });
        }
        for m in &members {
            if m.shape() != (size, size) {
                return Err(Error::DimensionMismatch(format!(
                    "members must all be {size}x{size}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            check_unitary(m, tol)?;
        }
        Ok(Self {
            alpha,
            inner: size - alpha,
            members,
        })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, alpha: usize, inner: usize, rng: &mut R) -> Self {
        Self {
            alpha,
            inner,
            members: (0..n).map(|_| haar_unitary_with(alpha + inner, rng)).collect(),
        }
    }

    pub fn identity(n: usize, alpha: usize, inner: usize) -> Self {
        Self {
            alpha,
            inner,
            members: vec![identity(alpha + inner); n],
        }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn inner(&self) -> usize {
        self.inner
    }

    pub fn n(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    fn blocks(&self, minus: bool, rows: (usize, usize), cols: (usize, usize)) -> ComplexMatrix {
        let parts: Vec<ComplexMatrix> = self
            .members
            .iter()
            .map(|g| {
                let block = g.view((rows.0, cols.0), (rows.1, cols.1)).into_owned();
                if minus {
                    conjugate(&block)
                } else {
                    block
                }
            })
            .collect();
        let refs: Vec<&ComplexMatrix> = parts.iter().collect();
        block_diag(&refs)
    }

    fn big_a(&self, minus: bool) -> ComplexMatrix {
        self.blocks(minus, (0, self.alpha), (0, self.alpha))
    }

    fn big_b(&self, minus: bool) -> ComplexMatrix {
        self.blocks(minus, (0, self.alpha), (self.alpha, self.inner))
    }

    fn big_c(&self, minus: bool) -> ComplexMatrix {
        self.blocks(minus, (self.alpha, self.inner), (0, self.alpha))
    }

    fn big_d(&self, minus: bool) -> ComplexMatrix {
        self.blocks(minus, (self.alpha, self.inner), (self.alpha, self.inner))
    }

    /// Largest deviation between `conj(g_j)` and an explicitly computed
    /// `(g_jᵀ)⁻¹`, relative to `‖g_j‖`.
    pub fn transpose_inverse_defect(&self) -> f64 {
        self.members
            .iter()
            .map(|g| match g.transpose().try_inverse() {
                Some(inv) => distance(&inv, &conjugate(g)) / op_norm(g).max(1.0),
                None => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    /// `g_j ↦ diag(1, u) g_j diag(1, v)` for real orthogonal `u, v`.
    pub fn act(&self, u: &ComplexMatrix, v: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        for o in [u, v] {
            if o.shape() != (self.inner, self.inner) {
                return Err(Error::DimensionMismatch(format!(
                    "orthogonal factors must be {0}x{0}",
                    self.inner
                )));
            }
            check_orthogonal(o, tol)?;
        }
        let left = direct_sum(&identity(self.alpha), u);
        let right = direct_sum(&identity(self.alpha), v);
        Ok(Self {
            members: self.members.iter().map(|g| &left * g * &right).collect(),
            ..self.clone()
        })
    }

    /// Member-wise colligation product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.alpha != other.alpha {
            return Err(Error::AlphaMismatch {
                left: self.alpha,
                right: other.alpha,
            });
        }
        if self.n() != other.n() {
            return Err(Error::ArityMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| {
                let a = Colligation::from_unitary_unchecked(a.clone(), self.alpha);
                let b = Colligation::from_unitary_unchecked(b.clone(), self.alpha);
                a.product(&b).map(Colligation::into_matrix)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alpha: self.alpha,
            inner: self.inner + other.inner,
            members,
        })
    }

    fn check_arguments(&self, s: &ComplexMatrix, r: &ComplexMatrix) -> Result<()> {
        let n = self.n();
        if s.shape() != (n, n) || r.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("arguments must be {n}x{n}")));
        }
        Ok(())
    }

    /// The `2nm x 2nm` matrix acting on `(x⁺, y⁻)`.
    pub fn surface_system(&self, s: &ComplexMatrix, r: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_arguments(s, r)?;
        let nm = self.n() * self.inner;
        let big_s = kron_identity(s, self.inner);
        let big_r = kron_identity(r, self.inner);
        let top_left = -self.big_d(false);
        let bottom_left = -(self.big_d(true) * big_r);
        let eye = identity(nm);
        Ok(block_matrix(&[vec![&top_left, &big_s], vec![&bottom_left, &eye]]))
    }

    pub fn surface_singular_values(&self, s: &ComplexMatrix, r: &ComplexMatrix) -> Result<(f64, f64)> {
        Ok(extreme_singular_values(&self.surface_system(s, r)?))
    }

    pub fn eigensurface_det(&self, s: &ComplexMatrix, r: &ComplexMatrix) -> Result<Complex64> {
        Ok(crate::matrixcore::determinant(&self.surface_system(s, r)?))
    }

    /// Solves for the inner vectors with the columns of `p` as inputs.
    pub fn solve_inner(
        &self,
        s: &ComplexMatrix,
        r: &ComplexMatrix,
        p: &ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<(InnerState, f64)> {
        let system = self.surface_system(s, r)?;
        let na = self.n() * self.alpha;
        let nm = self.n() * self.inner;
        if p.nrows() != 2 * na {
            return Err(Error::DimensionMismatch(format!("inputs must have {} rows", 2 * na)));
        }
        let p_plus = p.rows(0, na).into_owned();
        let p_minus = p.rows(na, na).into_owned();
        let rhs = crate::matrixcore::vstack(&[&(self.big_c(false) * &p_plus), &(self.big_c(true) * &p_minus)]);
        let sol = solve(&system, &rhs, tol).map_err(|e| match e {
            Error::NearSingular { sigma_min, .. } => Error::OnEigensurface { sigma_min },
            other => other,
        })?;
        let x_plus = sol.x.rows(0, nm).into_owned();
        let y_minus = sol.x.rows(nm, nm).into_owned();
        let big_r = kron_identity(r, self.inner);
        let q_plus = self.big_a(false) * &p_plus + self.big_b(false) * &x_plus;
        let q_minus = self.big_a(true) * &p_minus + self.big_b(true) * (big_r * &x_plus);
        Ok((
            InnerState {
                x_plus,
                y_minus,
                q: crate::matrixcore::vstack(&[&q_plus, &q_minus]),
            },
            sol.sigma_min,
        ))
    }

    pub fn charfun(&self, s: &ComplexMatrix, r: &ComplexMatrix, tol: &Tolerances) -> Result<CharFun2Value> {
        let (state, sigma_min) = self.solve_inner(s, r, &identity(2 * self.n() * self.alpha), tol)?;
        Ok(CharFun2Value {
            value: state.q,
            sigma_min,
            regular: true,
        })
    }

    /// Returns `(Λ χ(S, R) Λ⁻¹, χ(λSλ⁻¹, λRλ⁻¹))` with
    /// `Λ = diag(λ_j I_α)` repeated on the plus and the minus half.
    pub fn dilation_check(
        &self,
        s: &ComplexMatrix,
        r: &ComplexMatrix,
        lambda: &[Complex64],
        tol: &Tolerances,
    ) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let scale = self.scaling(lambda, false)?;
        let lam = diag_scalars(lambda);
        let lam_inv = lam.clone().try_inverse().expect("nonzero scalars");
        let left = &scale * self.charfun(s, r, tol)?.value * scale.clone().try_inverse().expect("nonzero scalars");
        let right = self.charfun(&(&lam * s * &lam_inv), &(&lam * r * &lam_inv), tol)?.value;
        Ok((left, right))
    }

    /// The same identity with `Λ = diag(λ, λ⁻¹)` on the two halves, which
    /// corresponds to the arguments `(λSλ, λ⁻¹Rλ⁻¹)`.
    pub fn dilation_check_split(
        &self,
        s: &ComplexMatrix,
        r: &ComplexMatrix,
        lambda: &[Complex64],
        tol: &Tolerances,
    ) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let scale = self.scaling(lambda, true)?;
        let lam = diag_scalars(lambda);
        let lam_inv = lam.clone().try_inverse().expect("nonzero scalars");
        let left = &scale * self.charfun(s, r, tol)?.value * scale.clone().try_inverse().expect("nonzero scalars");
        let right = self.charfun(&(&lam * s * &lam), &(&lam_inv * r * &lam_inv), tol)?.value;
        Ok((left, right))
    }

    fn scaling(&self, lambda: &[Complex64], invert_minus: bool) -> Result<ComplexMatrix> {
        if lambda.len() != self.n() || lambda.iter().any(|l| l.norm() == 0.0) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} nonzero scalars",
                self.n()
            )));
        }
        let a = self.alpha;
        let na = self.n() * a;
        let mut entries = Vec::with_capacity(2 * na);
        for half in 0..2 {
            for l in lambda {
                let v = if half == 1 && invert_minus { l.inv() } else { *l };
                entries.extend(std::iter::repeat_n(v, a));
            }
        }
        Ok(crate::matrixcore::diag(&entries))
    }

    /// Evaluates the form defects at `(S, R)` for the given inputs.
    pub fn form_checks(
        &self,
        s: &ComplexMatrix,
        r: &ComplexMatrix,
        p: &ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<FormReport> {
        let forms = FormPair::new(self.n(), self.alpha);
        let (state, _) = self.solve_inner(s, r, p, tol)?;
        let chi = self.charfun(s, r, tol)?.value;
        let chi_norm = op_norm(&chi).max(1.0);

        let gains = (0..p.ncols())
            .map(|k| {
                let pk = p.column(k).into_owned();
                let qk = state.q.column(k).into_owned();
                let x = state.x_plus.column(k).into_owned();
                let y = state.y_minus.column(k).into_owned();
                FormGain {
                    gain: forms.m_value(qk.as_slice()) - forms.m_value(pk.as_slice()),
                    inner_energy: x.norm_squared() + y.norm_squared(),
                }
            })
            .collect();

        let m = forms.m_matrix();
        let pseudo_unitary_defect = (chi.adjoint() * &m * &chi - &m).norm() / (chi_norm * chi_norm);
        let l = forms.lambda_matrix();
        let symplectic_defect = (chi.transpose() * &l * &chi - &l).norm() / (chi_norm * chi_norm);

        let transposed = self.charfun(&s.transpose(), &r.transpose(), tol)?.value;
        let triangle_defect = match forms.lambda_transpose(&chi).try_inverse() {
            Some(inv) => distance(&transposed, &inv) / chi_norm.powi(2),
            None => f64::INFINITY,
        };
        Ok(FormReport {
            gains,
            pseudo_unitary_defect,
            symplectic_defect,
            triangle_defect,
        })
    }
}

fn diag_scalars(lambda: &[Complex64]) -> ComplexMatrix {
    crate::matrixcore::diag(lambda)
}

/// The indefinite Hermitian form `𝓜 = diag(I_{nα}, -I_{nα})` and the skew
/// bilinear form `Λ = [[0, I], [-I, 0]]` on `(p⁺, p⁻)`.
#[derive(Debug, Clone, Copy)]
pub struct FormPair {
    pub n: usize,
    pub alpha: usize,
}

impl FormPair {
    pub fn new(n: usize, alpha: usize) -> Self {
        Self { n, alpha }
    }

    fn half(&self) -> usize {
        self.n * self.alpha
    }

    pub fn m_matrix(&self) -> ComplexMatrix {
        let h = self.half();
        direct_sum(&identity(h), &(-identity(h)))
    }

    pub fn lambda_matrix(&self) -> ComplexMatrix {
        let h = self.half();
        let eye = identity(h);
        let neg = -identity(h);
        let zero = zeros(h, h);
        block_matrix(&[vec![&zero, &eye], vec![&neg, &zero]])
    }

    /// `‖v⁺‖² - ‖v⁻‖²`.
    pub fn m_value(&self, v: &[Complex64]) -> f64 {
        let (plus, minus) = v.split_at(self.half());
        let sq = |x: &[Complex64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>();
        sq(plus) - sq(minus)
    }

    /// `g^△` with `Λ(g p, p̃) = Λ(p, g^△ p̃)`, i.e. `Λ⁻¹ gᵀ Λ`.
    pub fn lambda_transpose(&self, g: &ComplexMatrix) -> ComplexMatrix {
        let l = self.lambda_matrix();
        // Λ⁻¹ = -Λ.
        -(&l * g.transpose() * &l)
    }

    /// `g^□ = 𝓜 g* 𝓜`, the adjoint with respect to `𝓜`.
    pub fn m_adjoint(&self, g: &ComplexMatrix) -> ComplexMatrix {
        let m = self.m_matrix();
        &m * g.adjoint() * &m
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FormGain {
    /// `𝓜(q, q) - 𝓜(p, p)`.
    pub gain: f64,
    /// `‖x⁺‖² + ‖y⁻‖²`.
    pub inner_energy: f64,
}

#[derive(Debug, Clone)]
pub struct FormReport {
    pub gains: Vec<FormGain>,
    /// `‖χ* 𝓜 χ - 𝓜‖_F / ‖χ‖²`; meaningful for unitary `S, R`.
    pub pseudo_unitary_defect: f64,
    /// `‖χᵀ Λ χ - Λ‖_F / ‖χ‖²`; meaningful for symmetric `S, R`.
    pub symplectic_defect: f64,
    /// `‖χ(Sᵀ, Rᵀ) - (χ^△)⁻¹‖_F / ‖χ‖²`.
    pub triangle_defect: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::{ball_matrix, c64, gaussian_matrix, haar_orthogonal, haar_unitary, rng};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn conjugate_is_transpose_inverse() {
        let f = DoubleCosetFamily::random(2, 2, 3, &mut rng(1));
        assert!(f.transpose_inverse_defect() < 1e-12);
    }

    #[test]
    fn trivial_action_is_identity() {
        let f = DoubleCosetFamily::random(2, 1, 2, &mut rng(2));
        let g = f.act(&identity(2), &identity(2), &tol()).unwrap();
        assert_eq!(f, g);
        assert!(f.act(&haar_unitary(2, 3), &identity(2), &tol()).is_err());
    }

    #[test]
    fn action_preserves_chi() {
        let f = DoubleCosetFamily::random(2, 2, 3, &mut rng(4));
        let g = f.act(&haar_orthogonal(3, 5), &haar_orthogonal(3, 6), &tol()).unwrap();
        for m in g.members() {
            assert!(check_unitary(m, &tol()).is_ok());
        }
        let mut r = rng(7);
        let (s, rr) = (gaussian_matrix(2, 2, &mut r), gaussian_matrix(2, 2, &mut r));
        let x = f.charfun(&s, &rr, &tol()).unwrap().value;
        let y = g.charfun(&s, &rr, &tol()).unwrap().value;
        assert!((x - y).norm() < 1e-9);
    }

    #[test]
    fn origin_decouples() {
        // At S = R = 0: x⁺ = -D⁻¹ C p⁺ and y⁻ = C̃ p⁻.
        let f = DoubleCosetFamily::random(1, 1, 2, &mut rng(8));
        let z = zeros(1, 1);
        let chi = f.charfun(&z, &z, &tol()).unwrap().value;
        let g = &f.members()[0];
        let (a, b, c, d) = (
            g.view((0, 0), (1, 1)).into_owned(),
            g.view((0, 1), (1, 2)).into_owned(),
            g.view((1, 0), (2, 1)).into_owned(),
            g.view((1, 1), (2, 2)).into_owned(),
        );
        let schur = &a - &b * d.try_inverse().unwrap() * &c;
        let expected = direct_sum(&schur, &conjugate(&a));
        assert!((chi - expected).norm() < 1e-10);
    }

    #[test]
    fn product_multiplies() {
        let mut g = rng(9);
        let f = DoubleCosetFamily::random(2, 2, 2, &mut g);
        let h = DoubleCosetFamily::random(2, 2, 1, &mut g);
        let fh = f.product(&h).unwrap();
        let (s, r) = (gaussian_matrix(2, 2, &mut g), gaussian_matrix(2, 2, &mut g));
        let lhs = fh.charfun(&s, &r, &tol()).unwrap().value;
        let rhs = f.charfun(&s, &r, &tol()).unwrap().value * h.charfun(&s, &r, &tol()).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-9 * (1.0 + 10.0));
        let padded = f.product(&DoubleCosetFamily::identity(2, 2, 3)).unwrap();
        let x = padded.charfun(&s, &r, &tol()).unwrap().value;
        let y = f.charfun(&s, &r, &tol()).unwrap().value;
        assert!((x - y).norm() < 1e-9);
    }

    #[test]
    fn dilation_identities() {
        let f = DoubleCosetFamily::random(2, 2, 2, &mut rng(10));
        let mut g = rng(11);
        let (s, r) = (gaussian_matrix(2, 2, &mut g), gaussian_matrix(2, 2, &mut g));
        let ones = [c64(1.0, 0.0); 2];
        let (l, rr) = f.dilation_check(&s, &r, &ones, &tol()).unwrap();
        assert!((l - rr).norm() < 1e-12);
        let lambda = [c64(0.7, 0.4), c64(-1.3, 0.2)];
        let (l, rr) = f.dilation_check(&s, &r, &lambda, &tol()).unwrap();
        assert!((&l - &rr).norm() < 1e-9 * l.norm().max(1.0));
        let (l, rr) = f.dilation_check_split(&s, &r, &lambda, &tol()).unwrap();
        assert!((&l - &rr).norm() < 1e-9 * l.norm().max(1.0));
    }

    #[test]
    fn forms_on_ball_and_boundary() {
        let f = DoubleCosetFamily::random(2, 2, 3, &mut rng(12));
        let mut g = rng(13);
        let p = gaussian_matrix(8, 4, &mut g);
        let (s, r) = (ball_matrix(2, 0.9, &mut g), ball_matrix(2, 0.9, &mut g));
        let report = f.form_checks(&s, &r, &p, &tol()).unwrap();
        for gain in &report.gains {
            assert!(gain.gain > 0.0);
            assert!(gain.gain >= 0.19 * gain.inner_energy - 1e-9);
        }
        let (s, r) = (haar_unitary(2, 14), haar_unitary(2, 15));
        let report = f.form_checks(&s, &r, &p, &tol()).unwrap();
        assert!(report.pseudo_unitary_defect < 1e-9);
        let sym = |m: ComplexMatrix| &m + m.transpose();
        let (s, r) = (sym(gaussian_matrix(2, 2, &mut g)), sym(gaussian_matrix(2, 2, &mut g)));
        let report = f.form_checks(&s, &r, &p, &tol()).unwrap();
        assert!(report.symplectic_defect < 1e-9);
        assert!(report.triangle_defect < 1e-9);
    }

    #[test]
    fn real_diagonal_signs_are_both_unitary_and_symmetric() {
        let f = DoubleCosetFamily::random(2, 1, 2, &mut rng(16));
        let s = crate::matrixcore::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let r = crate::matrixcore::diag(&[c64(-1.0, 0.0), c64(-1.0, 0.0)]);
        let p = identity(4);
        let report = f.form_checks(&s, &r, &p, &tol()).unwrap();
        assert!(report.pseudo_unitary_defect < 1e-9);
        assert!(report.symplectic_defect < 1e-9);
    }
}
