//! Linear relations and the subspace-argument characteristic relation.
//!
//! A linear relation `P: V ⇉ W` is a subspace of `V ⊕ W`, stored as a matrix
//! with orthonormal columns. Equality and containment of subspaces are decided
//! by orthogonal-projection residuals.

use crate::error::{Error, Result};
use crate::matrixcore::{
    block_matrix, extreme_singular_values, hstack, identity, kron_identity, null_space, null_space_abs, op_norm,
    orthonormal_range, orthonormal_range_abs, zeros, ComplexMatrix, Tolerances,
};
use crate::multicolligation::MultiColligation;

#[derive(Debug, Clone)]
pub struct LinearRelation {
    dim_v: usize,
    dim_w: usize,
    basis: ComplexMatrix,
}

impl LinearRelation {
    /// Relation spanned by the columns of `spanning` (rows ordered `V` then `W`).
    pub fn span(dim_v: usize, dim_w: usize, spanning: &ComplexMatrix, rank_tol: f64) -> Result<Self> {
        if spanning.nrows() != dim_v + dim_w {
            return Err(Error::DimensionMismatch(format!(
                "spanning set has {} rows, expected {}",
                spanning.nrows(),
                dim_v + dim_w
            )));
        }
        Ok(Self {
            dim_v,
            dim_w,
            basis: orthonormal_range(spanning, rank_tol),
        })
    }

    /// Graph of `a: V → W`, i.e. the span of `[I; a]`.
    pub fn graph(a: &ComplexMatrix) -> Self {
        let (dim_w, dim_v) = a.shape();
        let spanning = block_matrix(&[vec![&identity(dim_v)], vec![a]]);
        Self {
            dim_v,
            dim_w,
            basis: orthonormal_range(&spanning, 1e-14),
        }
    }

    pub fn full(dim_v: usize, dim_w: usize) -> Self {
        Self {
            dim_v,
            dim_w,
            basis: identity(dim_v + dim_w),
        }
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_w(&self) -> usize {
        self.dim_w
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    fn v_rows(&self) -> ComplexMatrix {
        self.basis.rows(0, self.dim_v).into_owned()
    }

    fn w_rows(&self) -> ComplexMatrix {
        self.basis.rows(self.dim_v, self.dim_w).into_owned()
    }

    /// Composition `self` then `next`: all `v ⊕ y` for which some `w`
    /// satisfies `v ⊕ w ∈ self` and `w ⊕ y ∈ next`.
    ///
    /// For graphs, `graph(a).compose(graph(b)) = graph(b a)`.
    pub fn compose(&self, next: &Self, tol: &Tolerances) -> Result<Self> {
        if self.dim_w != next.dim_v {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose a relation into dimension {} with one from dimension {}",
                self.dim_w, next.dim_v
            )));
        }
        let (k1, k2) = (self.dim(), next.dim());
        let out_rows = self.dim_v + next.dim_w;
        // Composing with the zero relation still keeps the other side's
        // indeterminacy, `{0} ∘ R = {(0, y) : (0, y) ∈ R}`.
        if k1 + k2 == 0 {
            return Ok(Self {
                dim_v: self.dim_v,
                dim_w: next.dim_w,
                basis: zeros(out_rows, 0),
            });
        }
        // Coefficients (a, b) with P_w a = Q_w b.
        let matching = hstack(&[&self.w_rows(), &(-next.v_rows())]);
        // Both bases are orthonormal, so the cutoffs are absolute.
        let kernel = null_space_abs(&matching, tol.rank_tol);
        let coeff_a = kernel.rows(0, k1).into_owned();
        let coeff_b = kernel.rows(k1, k2).into_owned();
        let image = block_matrix(&[vec![&(self.v_rows() * coeff_a)], vec![&(next.w_rows() * coeff_b)]]);
        Ok(Self {
            dim_v: self.dim_v,
            dim_w: next.dim_w,
            basis: orthonormal_range_abs(&image, tol.rank_tol),
        })
    }

    /// Largest distance from a basis vector of `other` to `span(self)`.
    pub fn containment_residual(&self, other: &Self) -> f64 {
        if other.dim() == 0 {
            return 0.0;
        }
        let projected = &self.basis * (self.basis.adjoint() * &other.basis);
        let residual = &other.basis - projected;
        (0..residual.ncols())
            .map(|j| residual.column(j).norm())
            .fold(0.0, f64::max)
    }

    /// `other ⊆ self` up to projection residual `rank_tol`.
    pub fn contains(&self, other: &Self, tol: &Tolerances) -> bool {
        self.dim_v == other.dim_v && self.dim_w == other.dim_w && self.containment_residual(other) <= tol.rank_tol
    }

    fn projector(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Operator-norm distance between orthogonal projectors (1 when the
    /// dimensions differ).
    pub fn distance(&self, other: &Self) -> f64 {
        if self.dim_v != other.dim_v || self.dim_w != other.dim_w || self.dim() != other.dim() {
            return 1.0;
        }
        op_norm(&(self.projector() - other.projector()))
    }
}

/// An `n`-dimensional subspace `L ⊂ ℂⁿ ⊕ ℂⁿ`, kept both as equations
/// `S v + Σ w = 0` and as an orthonormal basis.
#[derive(Debug, Clone)]
pub struct SubspaceL {
    n: usize,
    s: ComplexMatrix,
    sigma: ComplexMatrix,
    basis: ComplexMatrix,
}

impl SubspaceL {
    pub fn from_equations(s: ComplexMatrix, sigma: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n = s.nrows();
        if !s.is_square() || sigma.shape() != (n, n) {
            return Err(Error::DimensionMismatch("equation matrices must both be n x n".into()));
        }
        let stacked = hstack(&[&s, &sigma]);
        let basis = null_space(&stacked, tol.rank_tol);
        if basis.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "equations define a subspace of dimension {}, expected {n}",
                basis.ncols()
            )));
        }
        Ok(Self { n, s, sigma, basis })
    }

    pub fn from_basis(basis: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n = basis.ncols();
        if basis.nrows() != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "basis of an n-dimensional subspace of C^n + C^n must be {}x{n}",
                2 * n
            )));
        }
        let basis = orthonormal_range(basis, tol.rank_tol);
        if basis.ncols() != n {
            return Err(Error::DimensionMismatch("basis is rank deficient".into()));
        }
        let normals = null_space(&basis.adjoint(), tol.rank_tol);
        let rows = normals.adjoint();
        let s = rows.columns(0, n).into_owned();
        let sigma = rows.columns(n, n).into_owned();
        Ok(Self { n, s, sigma, basis })
    }

    /// `L = {(v, w) : w = S v}`.
    pub fn graph(s: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n = s.nrows();
        Self::from_equations(s.clone(), -identity(n), tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> &ComplexMatrix {
        &self.s
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }
}

fn check_arity(a: &MultiColligation, l: &SubspaceL) -> Result<()> {
    if a.n() != l.n() {
        return Err(Error::ArityMismatch {
            left: a.n(),
            right: l.n(),
        });
    }
    Ok(())
}

/// System in `(x, y)`: `y = 𝐃 x` and `(S ⊗ I) x + (Σ ⊗ I) y = 0`.
fn eigen_system(a: &MultiColligation, l: &SubspaceL) -> ComplexMatrix {
    let m = a.inner();
    let nm = a.n() * m;
    block_matrix(&[
        vec![&a.big_d(), &(-identity(nm))],
        vec![&kron_identity(l.s(), m), &kron_identity(l.sigma(), m)],
    ])
}

/// Whether `L` lies on the eigensurface: the eigen system above has a
/// nonzero solution (relative smallest singular value below the guard).
pub fn on_eigensurface(a: &MultiColligation, l: &SubspaceL, tol: &Tolerances) -> Result<bool> {
    check_arity(a, l)?;
    let (hi, lo) = extreme_singular_values(&eigen_system(a, l));
    Ok(lo / hi.max(1.0) < tol.surface_guard)
}

/// The relation `X(𝔄; L)` on `(ℂ^α)ⁿ ⇉ (ℂ^α)ⁿ`: all `(p, q)` for which
/// some `(x, y)` satisfies `q = 𝐀p + 𝐁x`, `y = 𝐂p + 𝐃x` and the equations
/// of `L`. Well-defined on the eigensurface as well.
pub fn char_relation(a: &MultiColligation, l: &SubspaceL, tol: &Tolerances) -> Result<LinearRelation> {
    check_arity(a, l)?;
    let m = a.inner();
    let na = a.n() * a.alpha();
    let nm = a.n() * m;
    let constraints = block_matrix(&[
        vec![&a.big_a(), &(-identity(na)), &a.big_b(), &zeros(na, nm)],
        vec![&a.big_c(), &zeros(nm, na), &a.big_d(), &(-identity(nm))],
        vec![
            &zeros(nm, na),
            &zeros(nm, na),
            &kron_identity(l.s(), m),
            &kron_identity(l.sigma(), m),
        ],
    ]);
    let solutions = null_space(&constraints, tol.rank_tol);
    let pq = solutions.rows(0, 2 * na).into_owned();
    LinearRelation::span(na, na, &pq, tol.rank_tol)
}

/// Hermitian form with a diagonal signature matrix `J` (entries ±1).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianFormSpec {
    signs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormClass {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

impl HermitianFormSpec {
    /// `diag(I_positive, -I_negative)`.
    pub fn signature(positive: usize, negative: usize) -> Self {
        let mut signs = vec![1.0; positive];
        signs.extend(std::iter::repeat_n(-1.0, negative));
        Self { signs }
    }

    pub fn dimension(&self) -> usize {
        self.signs.len()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.signs.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                num_complex::Complex64::new(self.signs[i], 0.0)
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Classifies the restriction of the form to `span(basis)` by the
    /// eigenvalues of `basis* J basis` at threshold `rank_tol`.
    pub fn classify(&self, basis: &ComplexMatrix, tol: &Tolerances) -> Result<FormClass> {
        if basis.nrows() != self.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "form has dimension {}, basis has {} rows",
                self.dimension(),
                basis.nrows()
            )));
        }
        if basis.ncols() == 0 {
            return Ok(FormClass::Degenerate);
        }
        let gram = basis.adjoint() * self.matrix() * basis;
        let (eig, _) = crate::matrixcore::hermitian_eigen(&gram);
        let pos = eig.iter().any(|l| *l > tol.rank_tol);
        let neg = eig.iter().any(|l| *l < -tol.rank_tol);
        let zero = eig.iter().any(|l| l.abs() <= tol.rank_tol);
        Ok(match (pos, neg, zero) {
            (true, true, _) => FormClass::Indefinite,
            (_, _, true) => FormClass::Degenerate,
            (true, false, false) => FormClass::PositiveDefinite,
            (false, true, false) => FormClass::NegativeDefinite,
            (false, false, false) => FormClass::Degenerate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::{from_real_rows, gaussian_matrix, matrix_with_norm, rng};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn graph_examples() {
        let g = LinearRelation::graph(&zeros(2, 2));
        assert_eq!(g.dim(), 2);
        let horizontal =
            LinearRelation::span(2, 2, &block_matrix(&[vec![&identity(2)], vec![&zeros(2, 2)]]), 1e-12).unwrap();
        assert!(g.distance(&horizontal) < 1e-14);

        let diag = LinearRelation::graph(&identity(3));
        let expected =
            LinearRelation::span(3, 3, &block_matrix(&[vec![&identity(3)], vec![&identity(3)]]), 1e-12).unwrap();
        assert!(diag.distance(&expected) < 1e-14);

        let a = gaussian_matrix(4, 2, &mut rng(1));
        assert_eq!(LinearRelation::graph(&a).dim(), 2);
    }

    #[test]
    fn zero_relation_keeps_indeterminacy() {
        let zero = LinearRelation::span(2, 1, &zeros(3, 0), 1e-12).unwrap();
        // R contains (0, e1) and the graph-like direction (1, 0; 1).
        let r = LinearRelation::span(1, 2, &from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]]), 1e-12).unwrap();
        let composed = zero.compose(&r, &tol()).unwrap();
        let expected = LinearRelation::span(2, 2, &from_real_rows(&[&[0.0], &[0.0], &[1.0], &[0.0]]), 1e-12).unwrap();
        assert!(composed.distance(&expected) < 1e-12);
    }

    #[test]
    fn compose_graphs() {
        let mut g = rng(2);
        let a = gaussian_matrix(3, 2, &mut g);
        let b = gaussian_matrix(4, 3, &mut g);
        let composed = LinearRelation::graph(&a)
            .compose(&LinearRelation::graph(&b), &tol())
            .unwrap();
        assert!(composed.distance(&LinearRelation::graph(&(&b * &a))) < 1e-9);

        let p = LinearRelation::span(2, 3, &gaussian_matrix(5, 3, &mut g), 1e-12).unwrap();
        let same = p.compose(&LinearRelation::graph(&identity(3)), &tol()).unwrap();
        assert!(same.distance(&p) < 1e-9);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let p = LinearRelation::graph(&identity(2));
        let q = LinearRelation::graph(&identity(3));
        assert!(p.compose(&q, &tol()).is_err());
    }

    #[test]
    fn compose_with_multivalued_relations() {
        // P = {0} ⊕ W and Q = graph(b): the composition is {0} ⊕ range(b).
        let p = LinearRelation::span(1, 2, &block_matrix(&[vec![&zeros(1, 2)], vec![&identity(2)]]), 1e-12).unwrap();
        let b = from_rows_real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let c = p.compose(&LinearRelation::graph(&b), &tol()).unwrap();
        assert_eq!(c.dim(), 1);
        let expected = LinearRelation::span(1, 2, &from_rows_real(&[&[0.0], &[1.0], &[0.0]]), 1e-12).unwrap();
        assert!(c.distance(&expected) < 1e-12);
    }

    fn from_rows_real(rows: &[&[f64]]) -> ComplexMatrix {
        crate::matrixcore::from_real_rows(rows)
    }

    #[test]
    fn contains_examples() {
        let p = LinearRelation::span(2, 2, &gaussian_matrix(4, 2, &mut rng(3)), 1e-12).unwrap();
        assert!(p.contains(&p, &tol()));
        assert!(LinearRelation::full(2, 2).contains(&p, &tol()));
        assert!(!p.contains(&LinearRelation::full(2, 2), &tol()));
    }

    #[test]
    fn subspace_conversions() {
        let s = gaussian_matrix(3, 3, &mut rng(4));
        let l = SubspaceL::graph(&s, &tol()).unwrap();
        let back = SubspaceL::from_basis(l.basis(), &tol()).unwrap();
        let rel_a = LinearRelation::span(3, 3, l.basis(), 1e-12).unwrap();
        let rel_b = LinearRelation::span(3, 3, back.basis(), 1e-12).unwrap();
        assert!(rel_a.distance(&rel_b) < 1e-10);
        assert!((back.s() * back.basis().rows(0, 3) + back.sigma() * back.basis().rows(3, 3)).norm() < 1e-10);
        assert!(SubspaceL::from_equations(zeros(2, 2), zeros(2, 2), &tol()).is_err());
    }

    #[test]
    fn eigensurface_membership_examples() {
        let ident = MultiColligation::identity(2, 1, 2);
        let l = SubspaceL::graph(&identity(2), &tol()).unwrap();
        assert!(on_eigensurface(&ident, &l, &tol()).unwrap());

        // D = 0: the eigen system reduces to S x = 0.
        let swaps = MultiColligation::swaps(2);
        let generic = SubspaceL::from_equations(gaussian_matrix(2, 2, &mut rng(5)), identity(2), &tol()).unwrap();
        assert!(!on_eigensurface(&swaps, &generic, &tol()).unwrap());
        let horizontal = SubspaceL::from_equations(zeros(2, 2), identity(2), &tol()).unwrap();
        assert!(on_eigensurface(&swaps, &horizontal, &tol()).unwrap());
    }

    #[test]
    fn eigensurface_membership_agrees_with_det() {
        let a = MultiColligation::random(2, 2, 2, &mut rng(6));
        let s0 = gaussian_matrix(2, 2, &mut rng(7));
        assert!(!on_eigensurface(&a, &SubspaceL::graph(&s0, &tol()).unwrap(), &tol()).unwrap());
        let mu = crate::matrixcore::eigenvalues(&a.surface_system(&s0).unwrap())[1];
        let s = s0 - identity(2) * mu;
        assert!(a.eigensurface_det(&s).unwrap().norm() < 1e-10);
        assert!(on_eigensurface(&a, &SubspaceL::graph(&s, &tol()).unwrap(), &tol()).unwrap());
    }

    #[test]
    fn char_relation_off_surface_is_graph_of_charfun() {
        let a = MultiColligation::random(3, 2, 2, &mut rng(8));
        let s = gaussian_matrix(3, 3, &mut rng(9));
        let x = char_relation(&a, &SubspaceL::graph(&s, &tol()).unwrap(), &tol()).unwrap();
        assert_eq!(x.dim(), 6);
        let chi = a.charfun(&s, &tol()).unwrap().value;
        assert!(x.distance(&LinearRelation::graph(&chi)) < 1e-8);
    }

    #[test]
    fn char_relation_of_identity_members() {
        let a = MultiColligation::identity(2, 2, 3);
        let l = SubspaceL::from_basis(&gaussian_matrix(4, 2, &mut rng(10)), &tol()).unwrap();
        let x = char_relation(&a, &l, &tol()).unwrap();
        assert!(x.distance(&LinearRelation::graph(&identity(4))) < 1e-9);
    }

    #[test]
    fn form_examples() {
        let j = HermitianFormSpec::signature(3, 0);
        let basis = orthonormal_range(&gaussian_matrix(3, 2, &mut rng(11)), 1e-12);
        assert_eq!(j.classify(&basis, &tol()).unwrap(), FormClass::PositiveDefinite);

        let j = HermitianFormSpec::signature(1, 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let null = crate::matrixcore::from_real_rows(&[&[s], &[s]]);
        assert_eq!(j.classify(&null, &tol()).unwrap(), FormClass::Degenerate);
        assert_eq!(j.classify(&identity(2), &tol()).unwrap(), FormClass::Indefinite);
        let down = crate::matrixcore::from_real_rows(&[&[0.0], &[1.0]]);
        assert_eq!(j.classify(&down, &tol()).unwrap(), FormClass::NegativeDefinite);
    }

    #[test]
    fn definiteness_transfers_through_char_relation() {
        let a = MultiColligation::random(2, 2, 3, &mut rng(12));
        let t = matrix_with_norm(2, 0.7, &mut rng(13));
        let l = SubspaceL::graph(&t, &tol()).unwrap();
        let m = HermitianFormSpec::signature(2, 2);
        assert_eq!(m.classify(l.basis(), &tol()).unwrap(), FormClass::PositiveDefinite);
        let x = char_relation(&a, &l, &tol()).unwrap();
        let big_m = HermitianFormSpec::signature(4, 4);
        assert_eq!(big_m.classify(x.basis(), &tol()).unwrap(), FormClass::NegativeDefinite);
    }
}
