//! Brute-force evaluation of the characteristic functions.
//!
//! Each routine writes every defining equation as a row block of one big
//! linear system in all unknowns (outputs and inner variables), solves it
//! once per standard basis input and reads the outputs off. Nothing is
//! eliminated by hand, so agreement with the closed forms is a genuine
//! cross-check.

use crate::conjclass::TriColligation;
use crate::doublecoset::DoubleCosetFamily;
use crate::error::Result;
use crate::matrixcore::{conjugate, identity, solve, zeros, ComplexMatrix, Tolerances};
use crate::multicolligation::MultiColligation;

fn set_block(target: &mut ComplexMatrix, row: usize, col: usize, block: &ComplexMatrix) {
    target
        .view_mut((row, col), (block.nrows(), block.ncols()))
        .copy_from(block);
}

fn scaled_identity(scale: num_complex::Complex64, m: usize) -> ComplexMatrix {
    identity(m) * scale
}

/// Unknowns `(q_1, ..., q_n, x_1, ..., x_n)`; rows
/// `q_j - b_j x_j = a_j p_j` and `sum_k s_jk x_k - d_j x_j = c_j p_j`.
pub fn multi_charfun(a: &MultiColligation, s: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (n, al, m) = (a.n(), a.alpha(), a.inner());
    let size = n * al + n * m;
    let mut lhs = zeros(size, size);
    let mut rhs = zeros(size, n * al);
    for (j, g) in a.members().iter().enumerate() {
        let (qj, xj, pj) = (j * al, n * al + j * m, j * al);
        let row_q = j * al;
        let row_x = n * al + j * m;
        set_block(&mut lhs, row_q, qj, &identity(al));
        set_block(&mut lhs, row_q, xj, &(-g.b()));
        set_block(&mut rhs, row_q, pj, &g.a());
        for k in 0..n {
            set_block(&mut lhs, row_x, n * al + k * m, &scaled_identity(s[(j, k)], m));
        }
        let diag = lhs.view((row_x, xj), (m, m)).into_owned() - g.d();
        set_block(&mut lhs, row_x, xj, &diag);
        set_block(&mut rhs, row_x, pj, &g.c());
    }
    let sol = solve(&lhs, &rhs, tol)?;
    Ok(sol.x.rows(0, n * al).into_owned())
}

/// Unknowns `(q, x_1, ..., x_n)`; rows `q - sum_i b_i x_i = a p` and
/// `sum_k s_ik x_k - sum_k d_ik x_k = c_i p`.
pub fn tri_charfun(t: &TriColligation, s: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (al, p, n) = (t.alpha(), t.p(), t.slots());
    let u = t.matrix();
    let size = al + n * p;
    let mut lhs = zeros(size, size);
    let mut rhs = zeros(size, al);
    set_block(&mut lhs, 0, 0, &identity(al));
    set_block(&mut rhs, 0, 0, &u.view((0, 0), (al, al)).into_owned());
    for i in 0..n {
        let bi = u.view((0, al + i * p), (al, p)).into_owned();
        set_block(&mut lhs, 0, al + i * p, &(-bi));
        let row = al + i * p;
        set_block(&mut rhs, row, 0, &u.view((row, 0), (p, al)).into_owned());
        for k in 0..n {
            let dik = u.view((row, al + k * p), (p, p)).into_owned();
            set_block(&mut lhs, row, al + k * p, &(scaled_identity(s[(i, k)], p) - dik));
        }
    }
    let sol = solve(&lhs, &rhs, tol)?;
    Ok(sol.x.rows(0, al).into_owned())
}

/// Unknowns `(q⁺, q⁻, y⁺, y⁻, x⁺, x⁻)`, slot-major inside each group. Rows:
/// the two member actions `(q, y) = g (p, x)` on each side, then
/// `y⁺ = 𝐒 y⁻` and `x⁻ = 𝐑 x⁺`. The minus side uses an explicitly
/// inverted transpose rather than the entrywise conjugate.
pub fn doublecoset_charfun(
    f: &DoubleCosetFamily,
    s: &ComplexMatrix,
    r: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let (n, al, m) = (f.n(), f.alpha(), f.inner());
    let na = n * al;
    let nm = n * m;
    let (q_plus, q_minus, y_plus, y_minus, x_plus, x_minus) =
        (0, na, 2 * na, 2 * na + nm, 2 * na + 2 * nm, 2 * na + 3 * nm);
    let size = 2 * na + 4 * nm;
    let mut lhs = zeros(size, size);
    let mut rhs = zeros(size, 2 * na);
    let mut row = 0;
    for (side, g_side) in [(0usize, false), (1usize, true)] {
        let (q0, y0, x0, p0) = if side == 0 {
            (q_plus, y_plus, x_plus, 0)
        } else {
            (q_minus, y_minus, x_minus, na)
        };
        for (j, g) in f.members().iter().enumerate() {
            let h = if g_side {
                g.transpose().try_inverse().unwrap_or_else(|| conjugate(g))
            } else {
                g.clone()
            };
            let a = h.view((0, 0), (al, al)).into_owned();
            let b = h.view((0, al), (al, m)).into_owned();
            let c = h.view((al, 0), (m, al)).into_owned();
            let d = h.view((al, al), (m, m)).into_owned();
            // q_j - b x_j = a p_j
            set_block(&mut lhs, row, q0 + j * al, &identity(al));
            set_block(&mut lhs, row, x0 + j * m, &(-b));
            set_block(&mut rhs, row, p0 + j * al, &a);
            row += al;
            // y_j - d x_j = c p_j
            set_block(&mut lhs, row, y0 + j * m, &identity(m));
            set_block(&mut lhs, row, x0 + j * m, &(-d));
            set_block(&mut rhs, row, p0 + j * al, &c);
            row += m;
        }
    }
    for j in 0..n {
        // y⁺_j - sum_k s_jk y⁻_k = 0
        set_block(&mut lhs, row, y_plus + j * m, &identity(m));
        for k in 0..n {
            set_block(&mut lhs, row, y_minus + k * m, &scaled_identity(-s[(j, k)], m));
        }
        row += m;
    }
    for j in 0..n {
        // x⁻_j - sum_k r_jk x⁺_k = 0
        set_block(&mut lhs, row, x_minus + j * m, &identity(m));
        for k in 0..n {
            set_block(&mut lhs, row, x_plus + k * m, &scaled_identity(-r[(j, k)], m));
        }
        row += m;
    }
    debug_assert_eq!(row, size);
    let sol = solve(&lhs, &rhs, tol)?;
    Ok(sol.x.rows(0, 2 * na).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::{from_real_rows, gaussian_matrix, rng};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn multi_matches_closed_form() {
        let a = MultiColligation::random(3, 2, 3, &mut rng(1));
        let s = gaussian_matrix(3, 3, &mut rng(2));
        let closed = a.charfun(&s, &tol()).unwrap().value;
        let brute = multi_charfun(&a, &s, &tol()).unwrap();
        assert!((closed - brute).norm() < 1e-10);
    }

    #[test]
    fn swap_pair_gives_inverse() {
        let a = MultiColligation::swaps(2);
        let s = from_real_rows(&[&[2.0, 1.0], &[0.5, 3.0]]);
        let brute = multi_charfun(&a, &s, &tol()).unwrap();
        assert!((brute - s.try_inverse().unwrap()).norm() < 1e-14);
    }

    #[test]
    fn tri_matches_closed_form() {
        let t = TriColligation::random(2, 3, 2, &mut rng(3));
        let s = gaussian_matrix(2, 2, &mut rng(4));
        let closed = t.charfun(&s, &tol()).unwrap().0;
        let brute = tri_charfun(&t, &s, &tol()).unwrap();
        assert!((closed - brute).norm() < 1e-10);
    }

    #[test]
    fn doublecoset_matches_closed_form() {
        let f = DoubleCosetFamily::random(2, 2, 3, &mut rng(5));
        let mut g = rng(6);
        let (s, r) = (gaussian_matrix(2, 2, &mut g), gaussian_matrix(2, 2, &mut g));
        let closed = f.charfun(&s, &r, &tol()).unwrap().value;
        let brute = doublecoset_charfun(&f, &s, &r, &tol()).unwrap();
        assert!((closed - brute).norm() < 1e-9);
    }

    #[test]
    fn identity_family_matches_oracle() {
        let f = DoubleCosetFamily::identity(2, 1, 2);
        let mut g = rng(7);
        let (s, r) = (gaussian_matrix(2, 2, &mut g), gaussian_matrix(2, 2, &mut g));
        let closed = f.charfun(&s, &r, &tol()).unwrap().value;
        let brute = doublecoset_charfun(&f, &s, &r, &tol()).unwrap();
        assert!((closed - brute).norm() < 1e-10);
    }
}
