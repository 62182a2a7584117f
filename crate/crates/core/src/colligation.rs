//! Single operator colligations.
//!
//! A colligation is a unitary matrix `U = [[A, B], [C, D]]` on `H ⊕ K` with
//! `dim H = alpha` and `dim K = inner`, considered up to conjugation by
//! unitaries acting on `K` alone. The infinite-dimensional inner space is
//! modelled by a finite `inner`, padded with identity blocks when needed.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrixcore::{
    block_matrix, c64, check_unitary, direct_sum, disc_point, eigenvalues, haar_unitary_with, identity, rng, solve,
    zeros, ComplexMatrix, Tolerances,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Colligation {
    alpha: usize,
    inner: usize,
    matrix: ComplexMatrix,
}

/// Value of a characteristic function together with the smallest singular
/// value of the system that was inverted to produce it.
#[derive(Debug, Clone)]
pub struct CharValue {
    pub value: ComplexMatrix,
    pub sigma_min: f64,
}

impl Colligation {
    /// Validates `u` and splits it as `alpha + (size - alpha)`.
    pub fn new(u: ComplexMatrix, alpha: usize, tol: &Tolerances) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "colligation matrix must be square, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let size = u.nrows();
        if alpha == 0 || alpha >= size {
            return Err(Error::BadSplit { alpha, size });
        }
        check_unitary(&u, tol)?;
        Ok(Self::from_unitary_unchecked(u, alpha))
    }

    /// Wraps a matrix already known to be unitary (e.g. a product of
    /// validated colligations).
    pub(crate) fn from_unitary_unchecked(u: ComplexMatrix, alpha: usize) -> Self {
        let inner = u.nrows() - alpha;
        Self {
            alpha,
            inner,
            matrix: u,
        }
    }

    pub fn identity(alpha: usize, inner: usize) -> Self {
        Self::from_unitary_unchecked(identity(alpha + inner), alpha)
    }

    /// The 2x2 swap `[[0, 1], [1, 0]]` with `alpha = 1`; its characteristic
    /// function is `z`.
    pub fn swap() -> Self {
        let mut u = zeros(2, 2);
        u[(0, 1)] = c64(1.0, 0.0);
        u[(1, 0)] = c64(1.0, 0.0);
        Self::from_unitary_unchecked(u, 1)
    }

    /// Haar-random colligation.
    pub fn random<R: Rng + ?Sized>(alpha: usize, inner: usize, rng: &mut R) -> Self {
        Self::from_unitary_unchecked(haar_unitary_with(alpha + inner, rng), alpha)
    }

    /// Unitary dilation of a contraction `d` (`‖d‖ ≤ 1`):
    /// `[[-d*, (I - d*d)^½], [(I - d d*)^½, d]]`, so that `d` is the inner
    /// block and `alpha = inner = dim d`.
    pub fn dilation(d: &ComplexMatrix) -> Self {
        let m = d.nrows();
        let left = psd_sqrt(&(identity(m) - d.adjoint() * d));
        let right = psd_sqrt(&(identity(m) - d * d.adjoint()));
        let u = block_matrix(&[vec![&(-d.adjoint()), &left], vec![&right, d]]);
        Self::from_unitary_unchecked(u, m)
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn inner(&self) -> usize {
        self.inner
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn a(&self) -> ComplexMatrix {
        self.matrix.view((0, 0), (self.alpha, self.alpha)).into_owned()
    }

    pub fn b(&self) -> ComplexMatrix {
        self.matrix.view((0, self.alpha), (self.alpha, self.inner)).into_owned()
    }

    pub fn c(&self) -> ComplexMatrix {
        self.matrix.view((self.alpha, 0), (self.inner, self.alpha)).into_owned()
    }

    pub fn d(&self) -> ComplexMatrix {
        self.matrix
            .view((self.alpha, self.alpha), (self.inner, self.inner))
            .into_owned()
    }

    /// `diag(1, u) · U · diag(1, u)⁻¹`.
    pub fn conjugate_inner(&self, u: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if u.nrows() != self.inner || u.ncols() != self.inner {
            return Err(Error::DimensionMismatch(format!(
                "inner unitary must be {0}x{0}",
                self.inner
            )));
        }
        check_unitary(u, tol)?;
        let g = direct_sum(&identity(self.alpha), u);
        let matrix = &g * &self.matrix * g.adjoint();
        Ok(Self::from_unitary_unchecked(matrix, self.alpha))
    }

    /// Appends `I_k` to the inner block as a direct summand.
    pub fn pad(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        Self::from_unitary_unchecked(direct_sum(&self.matrix, &identity(k)), self.alpha)
    }

    /// Product `self ∘ other`:
    ///
    /// ```text
    /// [[A P, B, A Q],
    ///  [C P, D, C Q],
    ///  [R,   0, T  ]]
    /// ```
    ///
    /// with the inner space of `self` placed before that of `other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.alpha != other.alpha {
            return Err(Error::AlphaMismatch {
                left: self.alpha,
                right: other.alpha,
            });
        }
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        let (p, q, r, t) = (other.a(), other.b(), other.c(), other.d());
        let zero = zeros(other.inner, self.inner);
        let u = block_matrix(&[
            vec![&(&a * &p), &b, &(&a * &q)],
            vec![&(&c * &p), &d, &(&c * &q)],
            vec![&r, &zero, &t],
        ]);
        Ok(Self::from_unitary_unchecked(u, self.alpha))
    }

    /// `χ(z) = A + z B (1 - z D)⁻¹ C`.
    ///
    /// Fails with `NearPole` when `1 - zD` is numerically singular.
    pub fn charfun(&self, z: Complex64, tol: &Tolerances) -> Result<CharValue> {
        let system = identity(self.inner) - self.d() * z;
        let sol = solve(&system, &self.c(), tol).map_err(|e| match e {
            Error::NearSingular { sigma_min, .. } => Error::NearPole { sigma_min },
            other => other,
        })?;
        let value = self.a() + self.b() * sol.x * z;
        Ok(CharValue {
            value,
            sigma_min: sol.sigma_min,
        })
    }

    /// Unit-circle eigenvalues of `D` other than 1, with multiplicities.
    pub fn xi(&self, tol: &Tolerances) -> XiMultiset {
        let eps = tol.rank_tol;
        let on_circle: Vec<Complex64> = eigenvalues(&self.d())
            .into_iter()
            .filter(|l| (l.norm() - 1.0).abs() <= eps && (l - c64(1.0, 0.0)).norm() > eps)
            .collect();
        XiMultiset::cluster(&on_circle, eps)
    }

    /// Probes whether two colligations are equivalent by comparing `χ` at
    /// `num_samples` random points of the unit disc and comparing `Ξ`.
    ///
    /// A `false` answer certifies inequivalence; `true` is evidence only.
    pub fn equivalent_probe(&self, other: &Self, num_samples: usize, seed: u64, tol: &Tolerances) -> bool {
        if self.alpha != other.alpha {
            return false;
        }
        let mut g = rng(seed);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < num_samples && attempts < 10 * num_samples.max(1) {
            attempts += 1;
            let z = disc_point(0.99, &mut g);
            let (Ok(x), Ok(y)) = (self.charfun(z, tol), other.charfun(z, tol)) else {
                continue;
            };
            let scale = 1.0_f64.max(x.value.norm());
            if (x.value - y.value).norm() > tol.residual_tol * scale {
                return false;
            }
            checked += 1;
        }
        checked == num_samples && self.xi(tol).matches(&other.xi(tol), tol.rank_tol)
    }
}

/// Square root of a Hermitian positive semidefinite matrix.
fn psd_sqrt(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let (values, v) = crate::matrixcore::hermitian_eigen(h);
    let roots: Vec<Complex64> = values.iter().map(|l| c64(l.max(0.0).sqrt(), 0.0)).collect();
    &v * crate::matrixcore::diag(&roots) * v.adjoint()
}

/// Multiset of unit-circle eigenvalues, stored as `(value, multiplicity)`
/// sorted by argument.
#[derive(Debug, Clone, PartialEq)]
pub struct XiMultiset {
    entries: Vec<(Complex64, usize)>,
}

impl XiMultiset {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// Single-linkage clustering of `values` with radius `radius`; each
    /// cluster is represented by its mean.
    pub fn cluster(values: &[Complex64], radius: f64) -> Self {
        let n = values.len();
        let mut label: Vec<usize> = (0..n).collect();
        fn find(label: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while label[r] != r {
                r = label[r];
            }
            label[i] = r;
            r
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (values[i] - values[j]).norm() <= radius {
                    let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                    if ri != rj {
                        label[rj] = ri;
                    }
                }
            }
        }
        let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            let root = find(&mut label, i);
            match groups.iter_mut().find(|g| g.0 == root) {
                Some(g) => {
                    g.1 += v;
                    g.2 += 1;
                }
                None => groups.push((root, v, 1)),
            }
        }
        let mut entries: Vec<(Complex64, usize)> = groups
            .into_iter()
            .map(|(_, sum, count)| (sum / count as f64, count))
            .collect();
        entries.sort_by(|a, b| a.0.arg().total_cmp(&b.0.arg()));
        Self { entries }
    }

    pub fn entries(&self) -> &[(Complex64, usize)] {
        &self.entries
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiset union.
    pub fn union(&self, other: &Self, radius: f64) -> Self {
        let mut values = Vec::new();
        for (v, k) in self.entries.iter().chain(other.entries.iter()) {
            values.extend(std::iter::repeat_n(*v, *k));
        }
        Self::cluster(&values, radius)
    }

    /// Same values (within `radius`) with the same multiplicities.
    pub fn matches(&self, other: &Self, radius: f64) -> bool {
        if self.entries.len() != other.entries.len() {
            return false;
        }
        let mut used = vec![false; other.entries.len()];
        for (v, k) in &self.entries {
            let hit = other
                .entries
                .iter()
                .enumerate()
                .find(|(j, (w, l))| !used[*j] && l == k && (v - w).norm() <= radius);
            match hit {
                Some((j, _)) => used[j] = true,
                None => return false,
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::{circle_point, diag, from_real_rows, haar_unitary, op_norm};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn make_colligation_examples() {
        let c = Colligation::new(identity(3), 1, &tol()).unwrap();
        assert_eq!(c.a(), identity(1));
        assert_eq!(c.b(), zeros(1, 2));
        assert_eq!(c.c(), zeros(2, 1));
        assert_eq!(c.d(), identity(2));

        let swap = from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let c = Colligation::new(swap, 1, &tol()).unwrap();
        assert_eq!(c.a()[(0, 0)], c64(0.0, 0.0));
        assert_eq!(c.b()[(0, 0)], c64(1.0, 0.0));
        assert_eq!(c.c()[(0, 0)], c64(1.0, 0.0));
        assert_eq!(c.d()[(0, 0)], c64(0.0, 0.0));

        let bad = from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let err = Colligation::new(bad, 1, &tol()).unwrap_err();
        assert!(matches!(err, Error::NotUnitary { .. }));
        assert!(err.to_string().starts_with("NotUnitary"));
    }

    #[test]
    fn bad_split_is_rejected() {
        assert!(matches!(
            Colligation::new(identity(2), 2, &tol()),
            Err(Error::BadSplit { .. })
        ));
        assert!(matches!(
            Colligation::new(identity(2), 0, &tol()),
            Err(Error::BadSplit { .. })
        ));
    }

    #[test]
    fn conjugate_inner_examples() {
        let a = Colligation::random(2, 3, &mut rng(5));
        assert!((a.conjugate_inner(&identity(3), &tol()).unwrap().matrix() - a.matrix()).norm() < 1e-15);

        let s = Colligation::swap();
        let flipped = s.conjugate_inner(&diag(&[c64(-1.0, 0.0)]), &tol()).unwrap();
        assert_eq!(flipped.a()[(0, 0)], c64(0.0, 0.0));
        assert_eq!(flipped.b()[(0, 0)], c64(-1.0, 0.0));
        assert_eq!(flipped.c()[(0, 0)], c64(-1.0, 0.0));
        assert_eq!(flipped.d()[(0, 0)], c64(0.0, 0.0));

        let u = haar_unitary(3, 77);
        let b = a.conjugate_inner(&u, &tol()).unwrap();
        assert!(check_unitary(b.matrix(), &tol()).is_ok());

        let not_unitary = identity(3) * c64(2.0, 0.0);
        assert!(a.conjugate_inner(&not_unitary, &tol()).is_err());
    }

    #[test]
    fn pad_examples() {
        let a = Colligation::random(1, 2, &mut rng(3));
        assert_eq!(a.pad(0), a);

        let padded = Colligation::swap().pad(1);
        let expected = from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(padded.matrix(), &expected);
        assert_eq!(padded.inner(), 2);

        let a = Colligation::random(2, 2, &mut rng(8));
        let p = a.pad(3);
        let mut g = rng(9);
        for _ in 0..10 {
            let z = disc_point(0.95, &mut g);
            let d = a.charfun(z, &tol()).unwrap().value - p.charfun(z, &tol()).unwrap().value;
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn swap_squared_is_cyclic_with_chi_z_squared() {
        let s = Colligation::swap();
        let p = s.product(&s).unwrap();
        let expected = from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        assert_eq!(p.matrix(), &expected);
        let z = c64(0.3, -0.4);
        let chi = p.charfun(z, &tol()).unwrap().value;
        assert!((chi[(0, 0)] - z * z).norm() < 1e-15);
    }

    #[test]
    fn identity_product_is_padding() {
        let a = Colligation::identity(2, 3);
        let p = Colligation::random(2, 2, &mut rng(21));
        let prod = a.product(&p).unwrap();
        assert!(prod.equivalent_probe(&p.pad(3), 10, 1, &tol()));
        assert!(check_unitary(prod.matrix(), &tol()).is_ok());
    }

    #[test]
    fn alpha_mismatch() {
        let a = Colligation::random(1, 2, &mut rng(1));
        let b = Colligation::random(2, 2, &mut rng(2));
        assert!(matches!(a.product(&b), Err(Error::AlphaMismatch { left: 1, right: 2 })));
    }

    #[test]
    fn charfun_examples() {
        let a = Colligation::random(2, 3, &mut rng(13));
        let at0 = a.charfun(c64(0.0, 0.0), &tol()).unwrap().value;
        assert!((at0 - a.a()).norm() < 1e-15);

        let z = c64(0.25, 0.5);
        let v = Colligation::swap().charfun(z, &tol()).unwrap().value;
        assert!((v[(0, 0)] - z).norm() < 1e-15);

        let w = circle_point(&mut rng(2));
        let v = a.charfun(w, &tol()).unwrap().value;
        assert!((v.adjoint() * &v - identity(2)).norm() < 1e-10);
    }

    #[test]
    fn charfun_reports_pole() {
        let lam = c64(0.5, 0.2);
        let a = Colligation::dilation(&diag(&[lam]));
        assert!(check_unitary(a.matrix(), &tol()).is_ok());
        let err = a.charfun(c64(1.0, 0.0) / lam, &tol()).unwrap_err();
        assert!(matches!(err, Error::NearPole { .. }));
    }

    #[test]
    fn simple_pole_grows_like_inverse_distance() {
        // A simple eigenvalue of D gives a first-order pole of χ at 1/λ: the
        // norm doubles each time the distance halves.
        let lam = c64(0.6, -0.3);
        let a = Colligation::dilation(&diag(&[lam]));
        let pole = c64(1.0, 0.0) / lam;
        let norms: Vec<f64> = (0..6)
            .map(|k| {
                let delta = 1e-3 / 2f64.powi(k);
                op_norm(&a.charfun(pole + delta, &tol()).unwrap().value)
            })
            .collect();
        for w in norms.windows(2) {
            let ratio = w[1] / w[0];
            assert!((ratio - 2.0).abs() < 0.01, "ratio {ratio}");
        }
    }

    #[test]
    fn xi_examples() {
        let u = diag(&[c64(1.0, 0.0), c64(0.0, 1.0), c64(-1.0, 0.0)]);
        let c = Colligation::new(u, 1, &tol()).unwrap();
        let xi = c.xi(&tol());
        let expected = XiMultiset::cluster(&[c64(0.0, 1.0), c64(-1.0, 0.0)], 1e-9);
        assert!(xi.matches(&expected, 1e-9));
        assert_eq!(xi.total(), 2);

        assert!(Colligation::swap().xi(&tol()).is_empty());

        // λ = 1 from identity padding is excluded.
        assert!(Colligation::identity(1, 3).xi(&tol()).is_empty());
    }

    #[test]
    fn xi_counts_multiplicity() {
        let i = c64(0.0, 1.0);
        let u = diag(&[c64(1.0, 0.0), i, i, c64(-1.0, 0.0)]);
        let c = Colligation::new(u, 1, &tol())
            .unwrap()
            .conjugate_inner(&haar_unitary(3, 4), &tol())
            .unwrap();
        let xi = c.xi(&tol());
        assert_eq!(xi.entries().len(), 2);
        assert!(xi.entries().iter().any(|(v, k)| *k == 2 && (v - i).norm() < 1e-9));
    }

    #[test]
    fn equivalent_probe_examples() {
        let a = Colligation::random(2, 3, &mut rng(31));
        let u = haar_unitary(3, 32);
        assert!(a.equivalent_probe(&a.conjugate_inner(&u, &tol()).unwrap(), 10, 7, &tol()));
        assert!(a.equivalent_probe(&a.pad(2), 10, 7, &tol()));
        assert!(!Colligation::swap().equivalent_probe(&Colligation::identity(1, 1), 10, 7, &tol()));
    }

    #[test]
    fn dilation_has_prescribed_inner_block() {
        let d = crate::matrixcore::matrix_with_norm(3, 0.8, &mut rng(6));
        let c = Colligation::dilation(&d);
        assert!(check_unitary(c.matrix(), &tol()).is_ok());
        assert!((c.d() - d).norm() < 1e-15);
    }
}
