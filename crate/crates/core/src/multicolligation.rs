//! Multiple colligations: `n` unitaries `g_j = [[a_j, b_j], [c_j, d_j]]`
//! sharing the exposed dimension `alpha` and the inner space, taken up to a
//! simultaneous inner conjugation.
//!
//! For an `n x n` matrix `S` the characteristic function eliminates the inner
//! variables from
//!
//! ```text
//! q_j              = a_j p_j + b_j x_j
//! sum_k s_jk x_k   = c_j p_j + d_j x_j
//! ```
//!
//! giving `χ(S) = 𝐀 + 𝐁 (𝐒 - 𝐃)⁻¹ 𝐂`, where bold letters are block-diagonal
//! and `𝐒 = S ⊗ I_m` in the ordering `(x_1, ..., x_n)`.

use num_complex::Complex64;
use rand::Rng;

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::matrixcore::{
    block_diag, determinant, extreme_singular_values, kron_identity, solve, ComplexMatrix, Tolerances,
};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiColligation {
    alpha: usize,
    inner: usize,
    members: Vec<Colligation>,
}

/// Value of `χ(S)` with its regularity certificate.
#[derive(Debug, Clone)]
pub struct CharFunValue {
    pub value: ComplexMatrix,
    /// Smallest singular value of `𝐒 - 𝐃`.
    pub sigma_min: f64,
    pub regular: bool,
}

impl MultiColligation {
    pub fn new(members: Vec<Colligation>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::DimensionMismatch("multi-colligation needs at least one member".into()))?;
        let (alpha, inner) = (first.alpha(), first.inner());
        for m in &members {
            if m.alpha() != alpha {
                return Err(Error::AlphaMismatch {
                    left: alpha,
                    right: m.alpha(),
                });
            }
            if m.inner() != inner {
                return Err(Error::DimensionMismatch(format!(
                    "members have inner dimensions {inner} and {}",
                    m.inner()
                )));
            }
        }
        Ok(Self { alpha, inner, members })
    }

    /// Validates each matrix as a colligation with the given split.
    pub fn from_matrices(matrices: Vec<ComplexMatrix>, alpha: usize, tol: &Tolerances) -> Result<Self> {
        let members = matrices
            .into_iter()
            .map(|u| Colligation::new(u, alpha, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, alpha: usize, inner: usize, rng: &mut R) -> Self {
        let members = (0..n).map(|_| Colligation::random(alpha, inner, rng)).collect();
        Self { alpha, inner, members }
    }

    pub fn identity(n: usize, alpha: usize, inner: usize) -> Self {
        Self {
            alpha,
            inner,
            members: vec![Colligation::identity(alpha, inner); n],
        }
    }

    /// `n` copies of the 2x2 swap; `χ(S) = S⁻¹`.
    pub fn swaps(n: usize) -> Self {
        Self {
            alpha: 1,
            inner: 1,
            members: vec![Colligation::swap(); n],
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

    pub fn members(&self) -> &[Colligation] {
        &self.members
    }

    fn stacked(&self, block: impl Fn(&Colligation) -> ComplexMatrix) -> ComplexMatrix {
        let blocks: Vec<ComplexMatrix> = self.members.iter().map(block).collect();
        let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
        block_diag(&refs)
    }

    pub fn big_a(&self) -> ComplexMatrix {
        self.stacked(Colligation::a)
    }

    pub fn big_b(&self) -> ComplexMatrix {
        self.stacked(Colligation::b)
    }

    pub fn big_c(&self) -> ComplexMatrix {
        self.stacked(Colligation::c)
    }

    pub fn big_d(&self) -> ComplexMatrix {
        self.stacked(Colligation::d)
    }

    /// Conjugates every member by `diag(1, u)`.
    pub fn conjugate(&self, u: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| m.conjugate_inner(u, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alpha: self.alpha,
            inner: self.inner,
            members,
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
            .map(|(a, b)| a.product(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alpha: self.alpha,
            inner: self.inner + other.inner,
            members,
        })
    }

    pub fn pad(&self, k: usize) -> Self {
        Self {
            alpha: self.alpha,
            inner: self.inner + k,
            members: self.members.iter().map(|m| m.pad(k)).collect(),
        }
    }

    fn check_argument(&self, s: &ComplexMatrix) -> Result<()> {
        if s.nrows() != self.n() || s.ncols() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "argument must be {0}x{0}, got {1}x{2}",
                self.n(),
                s.nrows(),
                s.ncols()
            )));
        }
        Ok(())
    }

    /// `𝐒 - 𝐃`, the system eliminated by the characteristic function.
    pub fn surface_system(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_argument(s)?;
        Ok(kron_identity(s, self.inner) - self.big_d())
    }

    /// `χ(S) = 𝐀 + 𝐁 (𝐒 - 𝐃)⁻¹ 𝐂`.
    pub fn charfun(&self, s: &ComplexMatrix, tol: &Tolerances) -> Result<CharFunValue> {
        let system = self.surface_system(s)?;
        let sol = solve(&system, &self.big_c(), tol).map_err(|e| match e {
            Error::NearSingular { sigma_min, .. } => Error::OnEigensurface { sigma_min },
            other => other,
        })?;
        Ok(CharFunValue {
            value: self.big_a() + self.big_b() * sol.x,
            sigma_min: sol.sigma_min,
            regular: true,
        })
    }

    /// `det(𝐒 - 𝐃)`; vanishes exactly on the eigensurface.
    pub fn eigensurface_det(&self, s: &ComplexMatrix) -> Result<Complex64> {
        Ok(determinant(&self.surface_system(s)?))
    }

    /// `(sigma_max, sigma_min)` of `𝐒 - 𝐃`.
    pub fn surface_singular_values(&self, s: &ComplexMatrix) -> Result<(f64, f64)> {
        Ok(extreme_singular_values(&self.surface_system(s)?))
    }

    /// Returns `(χ(λ S λ⁻¹), Λ χ(S) Λ⁻¹)` with `Λ = blockdiag(λ_j I_α)`.
    pub fn diag_conjugation(
        &self,
        s: &ComplexMatrix,
        lambda: &[Complex64],
        tol: &Tolerances,
    ) -> Result<(ComplexMatrix, ComplexMatrix)> {
        self.check_argument(s)?;
        if lambda.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} scaling factors, got {}",
                self.n(),
                lambda.len()
            )));
        }
        if lambda.iter().any(|l| l.norm() == 0.0) {
            return Err(Error::DimensionMismatch("scaling factors must be nonzero".into()));
        }
        let scaled = ComplexMatrix::from_fn(self.n(), self.n(), |i, j| lambda[i] * s[(i, j)] / lambda[j]);
        let left = self.charfun(&scaled, tol)?.value;
        let chi = self.charfun(s, tol)?.value;
        let a = self.alpha;
        let right = ComplexMatrix::from_fn(self.n() * a, self.n() * a, |i, j| {
            lambda[i / a] * chi[(i, j)] / lambda[j / a]
        });
        Ok((left, right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::{c64, from_real_rows, gaussian_matrix, haar_unitary, identity, rng};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn conjugate_examples() {
        let a = MultiColligation::random(3, 2, 3, &mut rng(1));
        let same = a.conjugate(&identity(3), &tol()).unwrap();
        for (x, y) in same.members().iter().zip(a.members()) {
            assert!((x.matrix() - y.matrix()).norm() < 1e-15);
        }

        let u = haar_unitary(3, 2);
        let single = MultiColligation::new(vec![a.members()[0].clone()]).unwrap();
        let via_multi = single.conjugate(&u, &tol()).unwrap();
        let via_single = a.members()[0].conjugate_inner(&u, &tol()).unwrap();
        assert_eq!(via_multi.members()[0], via_single);

        let s = gaussian_matrix(3, 3, &mut rng(3));
        let b = a.conjugate(&u, &tol()).unwrap();
        let d = a.charfun(&s, &tol()).unwrap().value - b.charfun(&s, &tol()).unwrap().value;
        assert!(d.norm() < 1e-10);
    }

    #[test]
    fn product_examples() {
        let a = MultiColligation::random(2, 2, 2, &mut rng(4));
        let ident = MultiColligation::identity(2, 2, 3);
        let prod = a.product(&ident).unwrap();
        let padded = a.pad(3);
        let s = gaussian_matrix(2, 2, &mut rng(5));
        let d = prod.charfun(&s, &tol()).unwrap().value - padded.charfun(&s, &tol()).unwrap().value;
        assert!(d.norm() < 1e-10);
        for m in prod.members() {
            assert!(crate::matrixcore::check_unitary(m.matrix(), &tol()).is_ok());
        }

        let single_a = MultiColligation::new(vec![a.members()[0].clone()]).unwrap();
        let single_b = MultiColligation::new(vec![a.members()[1].clone()]).unwrap();
        assert_eq!(
            single_a.product(&single_b).unwrap().members()[0],
            a.members()[0].product(&a.members()[1]).unwrap()
        );
    }

    #[test]
    fn product_mismatches() {
        let a = MultiColligation::random(2, 2, 2, &mut rng(4));
        let b = MultiColligation::random(3, 2, 2, &mut rng(5));
        let c = MultiColligation::random(2, 1, 2, &mut rng(6));
        assert!(matches!(a.product(&b), Err(Error::ArityMismatch { .. })));
        assert!(matches!(a.product(&c), Err(Error::AlphaMismatch { .. })));
    }

    #[test]
    fn identity_members_give_identity() {
        let a = MultiColligation::identity(3, 2, 2);
        let s = gaussian_matrix(3, 3, &mut rng(9)) * c64(0.3, 0.0);
        let v = a.charfun(&s, &tol()).unwrap().value;
        assert!((v - identity(6)).norm() < 1e-14);
    }

    #[test]
    fn swap_pair_gives_inverse() {
        let a = MultiColligation::swaps(2);
        let s = from_real_rows(&[&[2.0, 1.0], &[0.5, 3.0]]);
        let v = a.charfun(&s, &tol()).unwrap().value;
        let inv = s.clone().try_inverse().unwrap();
        assert!((v - inv).norm() < 1e-14);
        let det = a.eigensurface_det(&s).unwrap();
        assert!((det - determinant(&s)).norm() < 1e-14);
    }

    #[test]
    fn single_member_matches_one_variable_function() {
        let c = Colligation::random(2, 3, &mut rng(10));
        let a = MultiColligation::new(vec![c.clone()]).unwrap();
        let s = c64(1.7, -0.6);
        let lhs = a.charfun(&ComplexMatrix::from_element(1, 1, s), &tol()).unwrap().value;
        let rhs = c.charfun(c64(1.0, 0.0) / s, &tol()).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn identity_members_at_identity_are_on_surface() {
        let a = MultiColligation::identity(2, 1, 2);
        assert!(a.eigensurface_det(&identity(2)).unwrap().norm() < 1e-15);
        let err = a.charfun(&identity(2), &tol()).unwrap_err();
        assert!(matches!(err, Error::OnEigensurface { .. }));
    }

    #[test]
    fn planted_surface_point_has_vanishing_det() {
        let a = MultiColligation::random(2, 1, 2, &mut rng(12));
        let s0 = gaussian_matrix(2, 2, &mut rng(13));
        let mu = crate::matrixcore::eigenvalues(&a.surface_system(&s0).unwrap())[0];
        let s = s0 - identity(2) * mu;
        assert!(matches!(a.charfun(&s, &tol()), Err(Error::OnEigensurface { .. })));
        assert!(a.eigensurface_det(&s).unwrap().norm() < 1e-10);
    }

    #[test]
    fn diag_conjugation_examples() {
        let a = MultiColligation::random(2, 2, 2, &mut rng(14));
        let s = gaussian_matrix(2, 2, &mut rng(15));
        let (l, r) = a.diag_conjugation(&s, &[c64(1.0, 0.0); 2], &tol()).unwrap();
        let chi = a.charfun(&s, &tol()).unwrap().value;
        assert!((&l - &chi).norm() < 1e-12 && (&r - &chi).norm() < 1e-12);

        let sw = MultiColligation::swaps(2);
        let lam = [c64(2.0, 1.0), c64(-0.5, 0.3)];
        let (l, r) = sw.diag_conjugation(&s, &lam, &tol()).unwrap();
        let inv = s.clone().try_inverse().unwrap();
        let expected = ComplexMatrix::from_fn(2, 2, |i, j| lam[i] * inv[(i, j)] / lam[j]);
        assert!((&l - &expected).norm() < 1e-12);
        assert!((&r - &expected).norm() < 1e-12);
    }

    #[test]
    fn argument_shape_is_checked() {
        let a = MultiColligation::random(2, 1, 1, &mut rng(1));
        assert!(matches!(
            a.charfun(&identity(3), &tol()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
