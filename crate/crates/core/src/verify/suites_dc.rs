//! Double-coset families and the two-argument characteristic function.

use super::rational::line_fit_error;
use super::{
    rel_defect, relative_sigma, Outcome, Suite, SuiteKind, Trial, BALL_RADIUS, DEFECT_TOL, NORM_TOL, POINTS_PER_TRIAL,
    RATIONAL_HELD_OUT, RATIONAL_TOL,
};
use crate::doublecoset::DoubleCosetFamily;
use crate::error::Result;
use crate::matrixcore::{
    ball_matrix, gaussian_matrix, haar_orthogonal_with, haar_unitary_with, op_norm, ComplexMatrix, SeededRng,
};
use crate::oracle;

/// Trivial-action tolerance on `conj(g) = (gᵀ)⁻¹`.
const TRANSPOSE_INVERSE_TOL: f64 = 1e-12;
/// Input columns per form-gain trial.
const GAIN_INPUTS: usize = 4;
/// `1 - r²` for the ball radius used by the gain estimate.
const GAIN_FACTOR: f64 = 1.0 - BALL_RADIUS * BALL_RADIUS;

pub(super) fn suites() -> Vec<Suite> {
    vec![
        Suite {
            name: "dc-oracle",
            description: "closed-form χ(S, R) equals the literal full-system solve, conj(g) = (gᵀ)⁻¹",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: oracle_agreement,
        },
        Suite {
            name: "dc-rational",
            description: "χ is rational of degree nm along lines in S alone and in R alone",
            kind: SuiteKind::Property,
            threshold: RATIONAL_TOL,
            run: rational,
        },
        Suite {
            name: "dc-rational-joint",
            description: "χ is rational of degree 2nm along lines moving S and R together",
            kind: SuiteKind::Property,
            threshold: RATIONAL_TOL,
            run: rational_joint,
        },
        Suite {
            name: "dc-action",
            description: "χ is invariant under the real orthogonal two-sided action",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: action,
        },
        Suite {
            name: "dc-multiplicativity",
            description: "χ(F∘H; S, R) = χ(F; S, R) χ(H; S, R) at 20 random points",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: multiplicativity,
        },
        Suite {
            name: "dc-equivariance",
            description: "χ(λSλ⁻¹, λRλ⁻¹) = Λ χ(S, R) Λ⁻¹ with Λ = diag(λ, λ)",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: equivariance,
        },
        Suite {
            name: "dc-form-gain",
            description: "on the 0.9-ball the indefinite form grows by at least 0.19 of the inner energy",
            kind: SuiteKind::Property,
            threshold: NORM_TOL,
            run: form_gain,
        },
        Suite {
            name: "dc-pseudo-unitary",
            description: "χ preserves the indefinite form for unitary S, R",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: pseudo_unitary,
        },
        Suite {
            name: "dc-transpose",
            description: "χ(Sᵀ, Rᵀ) = (χ(S, R)^△)⁻¹",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: transpose,
        },
        Suite {
            name: "dc-symplectic",
            description: "χ preserves the skew form for symmetric S, R",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: symplectic,
        },
    ]
}

/// Sizes for the joint rational fit. Interpolating at degree 2nm on the
/// unit circle loses accuracy past 2nm = 12.
const JOINT_DIMS: (usize, usize, usize) = (2, 2, 3);

fn random_family(t: &mut Trial) -> DoubleCosetFamily {
    let (n, alpha, inner) = (t.n(), t.alpha(), t.inner());
    DoubleCosetFamily::random(n, alpha, inner, &mut t.rng)
}

type Pair = (ComplexMatrix, ComplexMatrix);

/// Draws `(S, R)` from `sample` until every family in `systems` is well
/// posed there.
fn regular_pair(
    t: &mut Trial,
    systems: &[&DoubleCosetFamily],
    sample: impl FnMut(&mut SeededRng) -> Pair,
) -> Result<Pair> {
    t.well_posed(sample, |(s, r)| {
        systems
            .iter()
            .map(|f| f.surface_singular_values(s, r).map(relative_sigma))
            .try_fold(f64::INFINITY, |acc, x| x.map(|x| acc.min(x)))
    })
}

fn gaussian_pair(n: usize) -> impl FnMut(&mut SeededRng) -> Pair {
    move |g| (gaussian_matrix(n, n, g), gaussian_matrix(n, n, g))
}

fn oracle_agreement(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let (s, r) = regular_pair(t, &[&f], gaussian_pair(f.n()))?;
    let closed = f.charfun(&s, &r, &t.tol)?.value;
    let brute = oracle::doublecoset_charfun(&f, &s, &r, &t.tol)?;
    let d = rel_defect(&closed, &brute, op_norm(&closed));
    let conj = f.transpose_inverse_defect();
    Ok(Outcome {
        defect: d.max(conj),
        passed: d <= DEFECT_TOL && conj <= TRANSPOSE_INVERSE_TOL,
    })
}

fn rational(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let n = f.n();
    let nm = n * f.inner();
    let draw = |t: &mut Trial| gaussian_matrix(n, n, &mut t.rng);
    let (s0, s1, r0, r1) = (draw(t), draw(t), draw(t), draw(t));
    let tol = t.tol;
    let along_s = line_fit_error(
        |x| f.charfun(&(&s0 + &s1 * x), &r0, &tol).map(|v| v.value),
        nm,
        RATIONAL_HELD_OUT,
        &mut t.rng,
    )?;
    let along_r = line_fit_error(
        |x| f.charfun(&s0, &(&r0 + &r1 * x), &tol).map(|v| v.value),
        nm,
        RATIONAL_HELD_OUT,
        &mut t.rng,
    )?;
    Ok(Outcome::within(along_s.max(along_r), RATIONAL_TOL))
}

fn rational_joint(t: &mut Trial) -> Result<Outcome> {
    let (cap_n, cap_alpha, cap_inner) = JOINT_DIMS;
    let dims = t.dims.capped(cap_n, cap_alpha, cap_inner);
    let (n, alpha, inner) = (t.upto(dims.n), t.upto(dims.alpha), t.upto(dims.inner));
    let f = DoubleCosetFamily::random(n, alpha, inner, &mut t.rng);
    let draw = |t: &mut Trial| gaussian_matrix(n, n, &mut t.rng);
    let (s0, s1, r0, r1) = (draw(t), draw(t), draw(t), draw(t));
    let tol = t.tol;
    let joint = line_fit_error(
        |x| f.charfun(&(&s0 + &s1 * x), &(&r0 + &r1 * x), &tol).map(|v| v.value),
        2 * n * inner,
        RATIONAL_HELD_OUT,
        &mut t.rng,
    )?;
    Ok(Outcome::within(joint, RATIONAL_TOL))
}

fn action(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let u = haar_orthogonal_with(f.inner(), &mut t.rng);
    let v = haar_orthogonal_with(f.inner(), &mut t.rng);
    let g = f.act(&u, &v, &t.tol)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let (s, r) = regular_pair(t, &[&f], gaussian_pair(f.n()))?;
        let x = f.charfun(&s, &r, &t.tol)?.value;
        let y = g.charfun(&s, &r, &t.tol)?.value;
        worst = worst.max(rel_defect(&x, &y, op_norm(&x)));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn multiplicativity(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let inner = t.upto(t.dims.inner.min(3));
    let h = DoubleCosetFamily::random(f.n(), f.alpha(), inner, &mut t.rng);
    let fh = f.product(&h)?;
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let (s, r) = regular_pair(t, &[&f, &h, &fh], gaussian_pair(f.n()))?;
        let x = f.charfun(&s, &r, &t.tol)?.value;
        let y = h.charfun(&s, &r, &t.tol)?.value;
        let xy = fh.charfun(&s, &r, &t.tol)?.value;
        let scale = op_norm(&x) * op_norm(&y);
        worst = worst.max(rel_defect(&xy, &(x * y), scale));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn scale_conj(m: &ComplexMatrix, lambda: &[num_complex::Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| lambda[i] * m[(i, j)] / lambda[j])
}

fn equivariance(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let n = f.n();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let lambda: Vec<_> = (0..n).map(|_| t.scalar()).collect();
        let (s, r) = t.well_posed(gaussian_pair(n), |(s, r)| {
            let a = f.surface_singular_values(s, r).map(relative_sigma)?;
            let b = f
                .surface_singular_values(&scale_conj(s, &lambda), &scale_conj(r, &lambda))
                .map(relative_sigma)?;
            Ok(a.min(b))
        })?;
        let (left, right) = f.dilation_check(&s, &r, &lambda, &t.tol)?;
        worst = worst.max(rel_defect(&left, &right, op_norm(&right)));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn form_gain(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let n = f.n();
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let (s, r) = regular_pair(t, &[&f], |g| {
            (ball_matrix(n, BALL_RADIUS, g), ball_matrix(n, BALL_RADIUS, g))
        })?;
        let p = gaussian_matrix(2 * n * f.alpha(), GAIN_INPUTS, &mut t.rng);
        let report = f.form_checks(&s, &r, &p, &t.tol)?;
        for g in &report.gains {
            // Strict growth is part of the claim; a nonpositive gain fails
            // outright.
            if g.gain <= 0.0 {
                return Ok(Outcome::within(f64::INFINITY, NORM_TOL));
            }
            let shortfall = (GAIN_FACTOR * g.inner_energy - g.gain) / g.inner_energy.max(1.0);
            worst = worst.max(shortfall);
        }
    }
    Ok(Outcome::within(worst.max(0.0), NORM_TOL))
}

fn pseudo_unitary(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let n = f.n();
    let p = gaussian_matrix(2 * n * f.alpha(), 1, &mut t.rng);
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let (s, r) = regular_pair(t, &[&f], |g| (haar_unitary_with(n, g), haar_unitary_with(n, g)))?;
        worst = worst.max(f.form_checks(&s, &r, &p, &t.tol)?.pseudo_unitary_defect);
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn transpose(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let n = f.n();
    let p = gaussian_matrix(2 * n * f.alpha(), 1, &mut t.rng);
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let (s, r) = t.well_posed(gaussian_pair(n), |(s, r)| {
            let a = f.surface_singular_values(s, r).map(relative_sigma)?;
            let b = f
                .surface_singular_values(&s.transpose(), &r.transpose())
                .map(relative_sigma)?;
            Ok(a.min(b))
        })?;
        worst = worst.max(f.form_checks(&s, &r, &p, &t.tol)?.triangle_defect);
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn symplectic(t: &mut Trial) -> Result<Outcome> {
    let f = random_family(t);
    let n = f.n();
    let p = gaussian_matrix(2 * n * f.alpha(), 1, &mut t.rng);
    let sym = |g: &mut SeededRng| {
        let m = gaussian_matrix(n, n, g);
        &m + m.transpose()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let (s, r) = regular_pair(t, &[&f], |g| (sym(g), sym(g)))?;
        worst = worst.max(f.form_checks(&s, &r, &p, &t.tol)?.symplectic_defect);
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}
