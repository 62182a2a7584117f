//! Colligations with several coupled inner slots.
//!
//! A unitary `U` of size `alpha + slots·p` is split as
//!
//! ```text
//! [[a,   b_1,  ..., b_n ],
//!  [c_1, d_11, ..., d_1n],
//!  ...
//!  [c_n, d_n1, ..., d_nn]]
//! ```
//!
//! and considered up to conjugation by `diag(1, u, ..., u)` with the same
//! `u ∈ U(p)` in every slot. Unlike multiple colligations the inner block
//! `𝐃 = (d_ij)` is a full matrix, so the characteristic function
//! `χ(S) = a + 𝐁 (S ⊗ I_p - 𝐃)⁻¹ 𝐂` takes values in `Mat(alpha)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrixcore::{
    check_unitary, determinant, extreme_singular_values, haar_unitary_with, identity, kron_identity, solve, zeros,
    ComplexMatrix, Tolerances,
};

#[derive(Debug, Clone, PartialEq)]
pub struct TriColligation {
    alpha: usize,
    p: usize,
    slots: usize,
    matrix: ComplexMatrix,
}

impl TriColligation {
    pub fn new(u: ComplexMatrix, alpha: usize, p: usize, slots: usize, tol: &Tolerances) -> Result<Self> {
        if !u.is_square() || u.nrows() != alpha + slots * p {
            return Err(Error::DimensionMismatch(format!(
                "matrix of size {}x{} does not split as {alpha} + {slots}*{p}",
                u.nrows(),
                u.ncols()
            )));
        }
        if alpha == 0 || p == 0 || slots == 0 {
            return Err(Error::BadSplit { alpha, size: u.nrows() });
        }
        check_unitary(&u, tol)?;
        Ok(Self {
            alpha,
            p,
            slots,
            matrix: u,
        })
    }

    pub fn random<R: Rng + ?Sized>(alpha: usize, p: usize, slots: usize, rng: &mut R) -> Self {
        Self {
            alpha,
            p,
            slots,
            matrix: haar_unitary_with(alpha + slots * p, rng),
        }
    }

    pub fn identity(alpha: usize, p: usize, slots: usize) -> Self {
        Self {
            alpha,
            p,
            slots,
            matrix: identity(alpha + slots * p),
        }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn inner_dim(&self) -> usize {
        self.slots * self.p
    }

    pub fn a(&self) -> ComplexMatrix {
        self.matrix.view((0, 0), (self.alpha, self.alpha)).into_owned()
    }

    /// `[b_1 ... b_n]`.
    pub fn big_b(&self) -> ComplexMatrix {
        self.matrix
            .view((0, self.alpha), (self.alpha, self.inner_dim()))
            .into_owned()
    }

    /// `[c_1; ...; c_n]`.
    pub fn big_c(&self) -> ComplexMatrix {
        self.matrix
            .view((self.alpha, 0), (self.inner_dim(), self.alpha))
            .into_owned()
    }

    /// The full coupled block `(d_ij)`.
    pub fn big_d(&self) -> ComplexMatrix {
        self.matrix
            .view((self.alpha, self.alpha), (self.inner_dim(), self.inner_dim()))
            .into_owned()
    }

    /// Conjugation by `diag(1, u, ..., u)`.
    pub fn conjugate(&self, u: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if u.shape() != (self.p, self.p) {
            return Err(Error::DimensionMismatch(format!(
                "slot unitary must be {0}x{0}",
                self.p
            )));
        }
        check_unitary(u, tol)?;
        let g = crate::matrixcore::direct_sum(&identity(self.alpha), &kron_identity_right(self.slots, u));
        Ok(Self {
            matrix: &g * &self.matrix * g.adjoint(),
            ..self.clone()
        })
    }

    /// Coordinates of `self` inside a product whose slots have size
    /// `p + q`, with the own block first (`own_first`) or second.
    fn embedded(&self, other_p: usize, own_first: bool) -> ComplexMatrix {
        let width = self.p + other_p;
        let size = self.alpha + self.slots * width;
        let offset = if own_first { 0 } else { other_p };
        let index = |i: usize| -> usize {
            if i < self.alpha {
                i
            } else {
                let (slot, t) = ((i - self.alpha) / self.p, (i - self.alpha) % self.p);
                self.alpha + slot * width + offset + t
            }
        };
        let mut out = identity(size);
        let own = self.alpha + self.inner_dim();
        for i in 0..own {
            for k in 0..own {
                out[(index(i), index(k))] = self.matrix[(i, k)];
            }
        }
        out
    }

    /// Product: `self` embedded on `(alpha, own slots)` times `other`
    /// embedded on `(alpha, other slots)`, slot `j` of the result being
    /// slot `j` of `self` followed by slot `j` of `other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.alpha != other.alpha {
            return Err(Error::AlphaMismatch {
                left: self.alpha,
                right: other.alpha,
            });
        }
        if self.slots != other.slots {
            return Err(Error::ArityMismatch {
                left: self.slots,
                right: other.slots,
            });
        }
        let left = self.embedded(other.p, true);
        let right = other.embedded(self.p, false);
        Ok(Self {
            alpha: self.alpha,
            p: self.p + other.p,
            slots: self.slots,
            matrix: left * right,
        })
    }

    /// Grows every slot by `k` identity coordinates.
    pub fn pad_slots(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        Self {
            alpha: self.alpha,
            p: self.p + k,
            slots: self.slots,
            matrix: self.embedded(k, true),
        }
    }

    fn check_argument(&self, s: &ComplexMatrix) -> Result<()> {
        if s.shape() != (self.slots, self.slots) {
            return Err(Error::DimensionMismatch(format!(
                "argument must be {0}x{0}, got {1}x{2}",
                self.slots,
                s.nrows(),
                s.ncols()
            )));
        }
        Ok(())
    }

    /// `S ⊗ I_p - 𝐃`.
    pub fn surface_system(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_argument(s)?;
        Ok(kron_identity(s, self.p) - self.big_d())
    }

    pub fn eigensurface_det(&self, s: &ComplexMatrix) -> Result<num_complex::Complex64> {
        Ok(determinant(&self.surface_system(s)?))
    }

    pub fn surface_singular_values(&self, s: &ComplexMatrix) -> Result<(f64, f64)> {
        Ok(extreme_singular_values(&self.surface_system(s)?))
    }

    /// `χ(S) = a + 𝐁 (S ⊗ I_p - 𝐃)⁻¹ 𝐂`, with the smallest singular value
    /// of the eliminated system.
    pub fn charfun(&self, s: &ComplexMatrix, tol: &Tolerances) -> Result<(ComplexMatrix, f64)> {
        let system = self.surface_system(s)?;
        let sol = solve(&system, &self.big_c(), tol).map_err(|e| match e {
            Error::NearSingular { sigma_min, .. } => Error::OnEigensurface { sigma_min },
            other => other,
        })?;
        Ok((self.a() + self.big_b() * sol.x, sol.sigma_min))
    }
}

/// `I_slots ⊗ u`.
fn kron_identity_right(slots: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let p = u.nrows();
    let mut out = zeros(slots * p, slots * p);
    for j in 0..slots {
        out.view_mut((j * p, j * p), (p, p)).copy_from(u);
    }
    out
}
