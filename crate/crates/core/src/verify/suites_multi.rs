//! Multiple colligations and the matrix-argument characteristic function.

use super::rational::line_fit_error;
use super::{
    rel_defect, relative_sigma, Outcome, Suite, SuiteKind, Trial, BALL_RADIUS, DEFECT_TOL, NORM_TOL, POINTS_PER_TRIAL,
    RATIONAL_HELD_OUT, RATIONAL_TOL,
};
use crate::colligation::Colligation;
use crate::error::Result;
use crate::matrixcore::{
    ball_matrix, c64, gaussian_matrix, haar_unitary_with, identity, op_norm, singular_values, solve, ComplexMatrix,
};
use crate::multicolligation::MultiColligation;
use crate::oracle;

pub(super) fn suites() -> Vec<Suite> {
    vec![
        Suite {
            name: "multi-oracle",
            description: "closed-form χ(S) equals the literal full-system solve",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: oracle_agreement,
        },
        Suite {
            name: "multi-rational",
            description: "χ(S0 + tS1) is rational of degree (nm, nm) in t",
            kind: SuiteKind::Property,
            threshold: RATIONAL_TOL,
            run: rational,
        },
        Suite {
            name: "multi-conjugation",
            description: "χ(S) is invariant under simultaneous inner conjugation",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: conjugation,
        },
        Suite {
            name: "multi-multiplicativity",
            description: "χ(A∘P; S) = χ(A; S) χ(P; S) at 20 random S",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: multiplicativity,
        },
        Suite {
            name: "multi-expanding",
            description: "for ‖S‖ ≤ 0.9 every singular value of χ(S) is at least 1 and χ(S)⁻¹ exists",
            kind: SuiteKind::Property,
            threshold: NORM_TOL,
            run: expanding,
        },
        Suite {
            name: "multi-boundary-unitary",
            description: "χ(S) is unitary for unitary S",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: boundary_unitary,
        },
        Suite {
            name: "multi-reflection",
            description: "χ(S*⁻¹) = χ(S)*⁻¹",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: reflection,
        },
        Suite {
            name: "multi-equivariance",
            description: "χ(λSλ⁻¹) = Λ χ(S) Λ⁻¹ for diagonal λ",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: equivariance,
        },
        Suite {
            name: "multi-single-slot",
            description: "for n = 1, χ([s]) equals the one-variable χ at z = 1/s",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: single_slot,
        },
    ]
}

fn random_multi(t: &mut Trial) -> MultiColligation {
    let (n, alpha, inner) = (t.n(), t.alpha(), t.inner());
    MultiColligation::random(n, alpha, inner, &mut t.rng)
}

/// A Gaussian argument that is well away from the eigensurfaces of all
/// `systems`.
fn regular_argument(t: &mut Trial, systems: &[&MultiColligation]) -> Result<ComplexMatrix> {
    let n = systems[0].n();
    t.well_posed(
        |g| gaussian_matrix(n, n, g),
        |s| {
            systems
                .iter()
                .map(|a| a.surface_singular_values(s).map(relative_sigma))
                .try_fold(f64::INFINITY, |acc, r| r.map(|r| acc.min(r)))
        },
    )
}

fn oracle_agreement(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let s = regular_argument(t, &[&a])?;
    let closed = a.charfun(&s, &t.tol)?.value;
    let brute = oracle::multi_charfun(&a, &s, &t.tol)?;
    Ok(Outcome::within(
        rel_defect(&closed, &brute, op_norm(&closed)),
        DEFECT_TOL,
    ))
}

fn rational(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let n = a.n();
    let degree = n * a.inner();
    let s0 = gaussian_matrix(n, n, &mut t.rng);
    let s1 = gaussian_matrix(n, n, &mut t.rng);
    let tol = t.tol;
    let err = line_fit_error(
        |x| a.charfun(&(&s0 + &s1 * x), &tol).map(|v| v.value),
        degree,
        RATIONAL_HELD_OUT,
        &mut t.rng,
    )?;
    Ok(Outcome::within(err, RATIONAL_TOL))
}

fn conjugation(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let u = haar_unitary_with(a.inner(), &mut t.rng);
    let b = a.conjugate(&u, &t.tol)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let s = regular_argument(t, &[&a])?;
        let x = a.charfun(&s, &t.tol)?.value;
        let y = b.charfun(&s, &t.tol)?.value;
        worst = worst.max(rel_defect(&x, &y, op_norm(&x)));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn multiplicativity(t: &mut Trial) -> Result<Outcome> {
    let (n, alpha) = (t.n(), t.alpha());
    let (m1, m2) = (t.inner(), t.inner());
    let a = MultiColligation::random(n, alpha, m1, &mut t.rng);
    let p = MultiColligation::random(n, alpha, m2, &mut t.rng);
    let ap = a.product(&p)?;
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let s = regular_argument(t, &[&a, &p, &ap])?;
        let x = a.charfun(&s, &t.tol)?.value;
        let y = p.charfun(&s, &t.tol)?.value;
        let xy = ap.charfun(&s, &t.tol)?.value;
        let scale = op_norm(&x) * op_norm(&y);
        worst = worst.max(rel_defect(&xy, &(x * y), scale));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn expanding(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let n = a.n();
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let s = t.well_posed(
            |g| ball_matrix(n, BALL_RADIUS, g),
            |s| a.surface_singular_values(s).map(relative_sigma),
        )?;
        let chi = a.charfun(&s, &t.tol)?.value;
        let smallest = singular_values(&chi).last().copied().unwrap_or(0.0);
        // The inverse must exist, with norm at most 1.
        let inv = solve(&chi, &identity(chi.nrows()), &t.tol)?.x;
        worst = worst.max(1.0 - smallest).max(op_norm(&inv) - 1.0);
    }
    Ok(Outcome::within(worst.max(0.0), NORM_TOL))
}

fn boundary_unitary(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let n = a.n();
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let s = t.well_posed(
            |g| haar_unitary_with(n, g),
            |s| a.surface_singular_values(s).map(relative_sigma),
        )?;
        let chi = a.charfun(&s, &t.tol)?.value;
        worst = worst.max(rel_defect(&(chi.adjoint() * &chi), &identity(chi.nrows()), 1.0));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn reflection(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let n = a.n();
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let (s, mirrored) = t.well_posed(
            |g| {
                let s = gaussian_matrix(n, n, g);
                let m = s.adjoint().try_inverse().unwrap_or_else(|| s.clone());
                (s, m)
            },
            |(s, m)| {
                let r1 = a.surface_singular_values(s).map(relative_sigma)?;
                let r2 = a.surface_singular_values(m).map(relative_sigma)?;
                Ok(r1
                    .min(r2)
                    .min(relative_sigma(crate::matrixcore::extreme_singular_values(s))))
            },
        )?;
        let x = a.charfun(&s, &t.tol)?.value;
        let y = a.charfun(&mirrored, &t.tol)?.value;
        let scale = op_norm(&x) * op_norm(&y);
        worst = worst.max(rel_defect(&(&y * x.adjoint()), &identity(x.nrows()), scale));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn equivariance(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let n = a.n();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let lambda: Vec<_> = (0..n).map(|_| t.scalar()).collect();
        let (s, _) = t.well_posed(
            |g| {
                let s = gaussian_matrix(n, n, g);
                let scaled = ComplexMatrix::from_fn(n, n, |i, j| lambda[i] * s[(i, j)] / lambda[j]);
                (s, scaled)
            },
            |(s, scaled)| {
                let r1 = a.surface_singular_values(s).map(relative_sigma)?;
                let r2 = a.surface_singular_values(scaled).map(relative_sigma)?;
                Ok(r1.min(r2))
            },
        )?;
        let (left, right) = a.diag_conjugation(&s, &lambda, &t.tol)?;
        worst = worst.max(rel_defect(&left, &right, op_norm(&right)));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn single_slot(t: &mut Trial) -> Result<Outcome> {
    let c = Colligation::random(t.alpha(), t.inner(), &mut t.rng);
    let a = MultiColligation::new(vec![c.clone()])?;
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let s = t.well_posed(
            |g| gaussian_matrix(1, 1, g),
            |s| {
                let r = a.surface_singular_values(s).map(relative_sigma)?;
                Ok(r.min(s[(0, 0)].norm()))
            },
        )?;
        let x = a.charfun(&s, &t.tol)?.value;
        let y = c.charfun(c64(1.0, 0.0) / s[(0, 0)], &t.tol)?.value;
        worst = worst.max(rel_defect(&x, &y, op_norm(&x)));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}
