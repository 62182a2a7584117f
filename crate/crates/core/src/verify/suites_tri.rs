//! Colligations with coupled slots, considered up to a common slot
//! conjugation.

use super::{
    rel_defect, relative_sigma, Outcome, Suite, SuiteKind, Trial, BALL_RADIUS, DEFECT_TOL, NORM_TOL, POINTS_PER_TRIAL,
};
use crate::conjclass::TriColligation;
use crate::error::Result;
use crate::matrixcore::{
    ball_matrix, extreme_singular_values, gaussian_matrix, haar_unitary_with, identity, op_norm, singular_values,
    solve, ComplexMatrix,
};
use crate::oracle;

const SLOTS: usize = 2;

pub(super) fn suites() -> Vec<Suite> {
    vec![
        Suite {
            name: "tri-oracle",
            description: "closed-form χ(S) equals the literal full-system solve",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: oracle_agreement,
        },
        Suite {
            name: "tri-conjugation",
            description: "χ(S) is invariant under the common slot conjugation",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: conjugation,
        },
        Suite {
            name: "tri-multiplicativity",
            description: "χ(T1∘T2; S) = χ(T1; S) χ(T2; S) at 20 random S",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: multiplicativity,
        },
        Suite {
            name: "tri-expanding",
            description: "for ‖S‖ ≤ 0.9 every singular value of χ(S) is at least 1",
            kind: SuiteKind::Property,
            threshold: NORM_TOL,
            run: expanding,
        },
        Suite {
            name: "tri-boundary-unitary",
            description: "χ(S) is unitary for unitary S",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: boundary_unitary,
        },
        Suite {
            name: "tri-reflection",
            description: "χ(S*⁻¹) = χ(S)*⁻¹",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: reflection,
        },
        Suite {
            name: "tri-equivariance-negative-control",
            description: "χ(λSλ⁻¹) = χ(S) fails once the slots are coupled",
            kind: SuiteKind::NegativeControl,
            threshold: DEFECT_TOL,
            run: equivariance_fails,
        },
    ]
}

fn random_tri(t: &mut Trial) -> TriColligation {
    let (alpha, p) = (t.alpha(), t.upto(t.dims.inner.min(3)));
    TriColligation::random(alpha, p, SLOTS, &mut t.rng)
}

fn regular_argument(t: &mut Trial, systems: &[&TriColligation]) -> Result<ComplexMatrix> {
    t.well_posed(
        |g| gaussian_matrix(SLOTS, SLOTS, g),
        |s| {
            systems
                .iter()
                .map(|a| a.surface_singular_values(s).map(relative_sigma))
                .try_fold(f64::INFINITY, |acc, r| r.map(|r| acc.min(r)))
        },
    )
}

fn oracle_agreement(t: &mut Trial) -> Result<Outcome> {
    let a = random_tri(t);
    let s = regular_argument(t, &[&a])?;
    let (closed, _) = a.charfun(&s, &t.tol)?;
    let brute = oracle::tri_charfun(&a, &s, &t.tol)?;
    Ok(Outcome::within(
        rel_defect(&closed, &brute, op_norm(&closed)),
        DEFECT_TOL,
    ))
}

fn conjugation(t: &mut Trial) -> Result<Outcome> {
    let a = random_tri(t);
    let u = haar_unitary_with(a.p(), &mut t.rng);
    let b = a.conjugate(&u, &t.tol)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let s = regular_argument(t, &[&a])?;
        let (x, _) = a.charfun(&s, &t.tol)?;
        let (y, _) = b.charfun(&s, &t.tol)?;
        worst = worst.max(rel_defect(&x, &y, op_norm(&x)));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn multiplicativity(t: &mut Trial) -> Result<Outcome> {
    let a = random_tri(t);
    let p2 = t.upto(t.dims.inner.min(3));
    let b = TriColligation::random(a.alpha(), p2, SLOTS, &mut t.rng);
    let ab = a.product(&b)?;
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let s = regular_argument(t, &[&a, &b, &ab])?;
        let (x, _) = a.charfun(&s, &t.tol)?;
        let (y, _) = b.charfun(&s, &t.tol)?;
        let (xy, _) = ab.charfun(&s, &t.tol)?;
        let scale = op_norm(&x) * op_norm(&y);
        worst = worst.max(rel_defect(&xy, &(x * y), scale));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn expanding(t: &mut Trial) -> Result<Outcome> {
    let a = random_tri(t);
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let s = t.well_posed(
            |g| ball_matrix(SLOTS, BALL_RADIUS, g),
            |s| a.surface_singular_values(s).map(relative_sigma),
        )?;
        let (chi, _) = a.charfun(&s, &t.tol)?;
        let smallest = singular_values(&chi).last().copied().unwrap_or(0.0);
        let inv = solve(&chi, &identity(chi.nrows()), &t.tol)?.x;
        worst = worst.max(1.0 - smallest).max(op_norm(&inv) - 1.0);
    }
    Ok(Outcome::within(worst.max(0.0), NORM_TOL))
}

fn boundary_unitary(t: &mut Trial) -> Result<Outcome> {
    let a = random_tri(t);
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let s = t.well_posed(
            |g| haar_unitary_with(SLOTS, g),
            |s| a.surface_singular_values(s).map(relative_sigma),
        )?;
        let (chi, _) = a.charfun(&s, &t.tol)?;
        worst = worst.max(rel_defect(&(chi.adjoint() * &chi), &identity(chi.nrows()), 1.0));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn reflection(t: &mut Trial) -> Result<Outcome> {
    let a = random_tri(t);
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let (s, mirrored) = t.well_posed(
            |g| {
                let s = gaussian_matrix(SLOTS, SLOTS, g);
                let m = s.adjoint().try_inverse().unwrap_or_else(|| s.clone());
                (s, m)
            },
            |(s, m)| {
                let r1 = a.surface_singular_values(s).map(relative_sigma)?;
                let r2 = a.surface_singular_values(m).map(relative_sigma)?;
                Ok(r1.min(r2).min(relative_sigma(extreme_singular_values(s))))
            },
        )?;
        let (x, _) = a.charfun(&s, &t.tol)?;
        let (y, _) = a.charfun(&mirrored, &t.tol)?;
        let scale = op_norm(&x) * op_norm(&y);
        worst = worst.max(rel_defect(&(&y * x.adjoint()), &identity(x.nrows()), scale));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn equivariance_fails(t: &mut Trial) -> Result<Outcome> {
    let a = random_tri(t);
    let lambda: Vec<_> = (0..SLOTS).map(|_| t.scalar()).collect();
    let (s, scaled) = t.well_posed(
        |g| {
            let s = gaussian_matrix(SLOTS, SLOTS, g);
            let scaled = ComplexMatrix::from_fn(SLOTS, SLOTS, |i, j| lambda[i] * s[(i, j)] / lambda[j]);
            (s, scaled)
        },
        |(s, scaled)| {
            let r1 = a.surface_singular_values(s).map(relative_sigma)?;
            let r2 = a.surface_singular_values(scaled).map(relative_sigma)?;
            Ok(r1.min(r2))
        },
    )?;
    let (x, _) = a.charfun(&s, &t.tol)?;
    let (y, _) = a.charfun(&scaled, &t.tol)?;
    Ok(Outcome::within(rel_defect(&x, &y, op_norm(&x)), DEFECT_TOL))
}
