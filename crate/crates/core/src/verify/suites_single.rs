//! Single colligations: product laws, norm laws, `Ξ` and poles.

use num_complex::Complex64;
use rand::Rng;

use super::{rel_defect, Outcome, Suite, SuiteKind, Trial, DEFECT_TOL, NORM_TOL, POINTS_PER_TRIAL, POLE_GROWTH};
use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::matrixcore::{
    ball_matrix, c64, circle_point, diag, direct_sum, disc_point, haar_unitary_with, identity, op_norm,
    unitarity_defect, ComplexMatrix,
};

pub(super) fn suites() -> Vec<Suite> {
    vec![
        Suite {
            name: "single-well-defined",
            description: "product of inner-conjugated factors has the same χ and Ξ as the product",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: well_defined,
        },
        Suite {
            name: "single-associativity",
            description: "(A∘P)∘Q and A∘(P∘Q) agree as matrices and in χ",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: associativity,
        },
        Suite {
            name: "single-multiplicativity",
            description: "χ(A∘P; z) = χ(A; z) χ(P; z) at 20 random z",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: multiplicativity,
        },
        Suite {
            name: "single-contraction",
            description: "‖χ(z)‖ ≤ 1 for |z| < 1",
            kind: SuiteKind::Property,
            threshold: NORM_TOL,
            run: contraction,
        },
        Suite {
            name: "single-boundary-unitary",
            description: "χ(z) is unitary for |z| = 1",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: boundary_unitary,
        },
        Suite {
            name: "single-reflection",
            description: "χ(1/z̄) = χ(z)*⁻¹",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: reflection,
        },
        Suite {
            name: "single-conjugation",
            description: "χ and Ξ are invariant under inner conjugation",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: conjugation,
        },
        Suite {
            name: "single-padding",
            description: "χ and Ξ are invariant under identity padding",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: padding,
        },
        Suite {
            name: "single-spectral-union",
            description: "Ξ(A∘P) is the multiset union of Ξ(A) and Ξ(P)",
            kind: SuiteKind::Property,
            threshold: 0.0,
            run: spectral_union,
        },
        Suite {
            name: "single-pole-growth",
            description: "‖χ‖ grows at least 10x per halving of the distance to 1/λ; defect is 10 / smallest growth",
            kind: SuiteKind::Property,
            threshold: 1.0,
            run: pole_growth,
        },
    ]
}

fn random_pair(t: &mut Trial) -> (Colligation, Colligation) {
    let alpha = t.alpha();
    let (m1, m2) = (t.inner(), t.inner());
    (
        Colligation::random(alpha, m1, &mut t.rng),
        Colligation::random(alpha, m2, &mut t.rng),
    )
}

/// Largest relative χ difference over `count` points of the disc of the
/// given radius, skipping points near a pole of either side.
fn chi_defect(a: &Colligation, b: &Colligation, count: usize, radius: f64, t: &mut Trial) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut done = 0;
    for _ in 0..50 * count {
        if done == count {
            break;
        }
        let z = disc_point(radius, &mut t.rng);
        let (Ok(x), Ok(y)) = (a.charfun(z, &t.tol), b.charfun(z, &t.tol)) else {
            continue;
        };
        worst = worst.max(rel_defect(&x.value, &y.value, op_norm(&x.value)));
        done += 1;
    }
    if done < count {
        return Err(Error::NearPole { sigma_min: 0.0 });
    }
    Ok(worst)
}

fn xi_penalty(a: &Colligation, b: &Colligation, t: &Trial) -> f64 {
    if a.xi(&t.tol).matches(&b.xi(&t.tol), t.tol.rank_tol) {
        0.0
    } else {
        f64::INFINITY
    }
}

fn well_defined(t: &mut Trial) -> Result<Outcome> {
    let (a, p) = random_pair(t);
    let u = haar_unitary_with(a.inner(), &mut t.rng);
    let v = haar_unitary_with(p.inner(), &mut t.rng);
    let lhs = a
        .conjugate_inner(&u, &t.tol)?
        .product(&p.conjugate_inner(&v, &t.tol)?)?;
    let rhs = a.product(&p)?;
    let d = chi_defect(&lhs, &rhs, 10, 0.99, t)?.max(xi_penalty(&lhs, &rhs, t));
    Ok(Outcome::within(d, DEFECT_TOL))
}

fn associativity(t: &mut Trial) -> Result<Outcome> {
    let (a, p) = random_pair(t);
    let q = Colligation::random(a.alpha(), t.inner(), &mut t.rng);
    let left = a.product(&p)?.product(&q)?;
    let right = a.product(&p.product(&q)?)?;
    let matrices = (left.matrix() - right.matrix()).norm() / (left.matrix().nrows() as f64).sqrt();
    let unitary = unitarity_defect(left.matrix());
    let d = chi_defect(&left, &right, 10, 0.99, t)?.max(matrices).max(unitary);
    Ok(Outcome::within(d, DEFECT_TOL))
}

fn multiplicativity(t: &mut Trial) -> Result<Outcome> {
    let (a, p) = random_pair(t);
    let ap = a.product(&p)?;
    let mut worst: f64 = 0.0;
    let mut done = 0;
    for _ in 0..50 * POINTS_PER_TRIAL {
        if done == POINTS_PER_TRIAL {
            break;
        }
        let z = disc_point(1.5, &mut t.rng);
        let (Ok(x), Ok(y), Ok(xy)) = (a.charfun(z, &t.tol), p.charfun(z, &t.tol), ap.charfun(z, &t.tol)) else {
            continue;
        };
        let scale = op_norm(&x.value) * op_norm(&y.value);
        worst = worst.max(rel_defect(&xy.value, &(x.value * y.value), scale));
        done += 1;
    }
    if done < POINTS_PER_TRIAL {
        return Err(Error::NearPole { sigma_min: 0.0 });
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn contraction(t: &mut Trial) -> Result<Outcome> {
    let a = Colligation::random(t.alpha(), t.inner(), &mut t.rng);
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let z = disc_point(1.0, &mut t.rng);
        worst = worst.max(op_norm(&a.charfun(z, &t.tol)?.value) - 1.0);
    }
    Ok(Outcome::within(worst.max(0.0), NORM_TOL))
}

fn boundary_unitary(t: &mut Trial) -> Result<Outcome> {
    let a = Colligation::random(t.alpha(), t.inner(), &mut t.rng);
    let mut worst: f64 = 0.0;
    for _ in 0..POINTS_PER_TRIAL {
        let z = circle_point(&mut t.rng);
        let v = a.charfun(z, &t.tol)?.value;
        worst = worst.max(rel_defect(&(v.adjoint() * &v), &identity(a.alpha()), 1.0));
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

fn reflection(t: &mut Trial) -> Result<Outcome> {
    let a = Colligation::random(t.alpha(), t.inner(), &mut t.rng);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    for _ in 0..50 * POINTS_PER_TRIAL {
        if done == POINTS_PER_TRIAL {
            break;
        }
        let z = disc_point(1.0, &mut t.rng);
        if z.norm() < 0.05 {
            continue;
        }
        let w = c64(1.0, 0.0) / z.conj();
        let (Ok(x), Ok(y)) = (a.charfun(z, &t.tol), a.charfun(w, &t.tol)) else {
            continue;
        };
        // χ(1/z̄) χ(z)* = I avoids inverting either side.
        let scale = op_norm(&x.value) * op_norm(&y.value);
        worst = worst.max(rel_defect(&(&y.value * x.value.adjoint()), &identity(a.alpha()), scale));
        done += 1;
    }
    if done < POINTS_PER_TRIAL {
        return Err(Error::NearPole { sigma_min: 0.0 });
    }
    Ok(Outcome::within(worst, DEFECT_TOL))
}

/// Random colligation whose inner block carries the given unit-circle
/// eigenvalues, hidden by a random inner conjugation.
fn with_phases(alpha: usize, inner: usize, phases: &[Complex64], t: &mut Trial) -> Result<Colligation> {
    let base = Colligation::random(alpha, inner, &mut t.rng);
    let u = direct_sum(base.matrix(), &diag(phases));
    let c = Colligation::new(u, alpha, &t.tol)?;
    let w = haar_unitary_with(c.inner(), &mut t.rng);
    c.conjugate_inner(&w, &t.tol)
}

fn random_phases(count: usize, pool: &[Complex64], t: &mut Trial) -> Vec<Complex64> {
    (0..count).map(|_| pool[t.rng.random_range(0..pool.len())]).collect()
}

fn conjugation(t: &mut Trial) -> Result<Outcome> {
    let pool: Vec<Complex64> = (0..3).map(|_| circle_point(&mut t.rng)).collect();
    let count = t.rng.random_range(0..=2);
    let phases = random_phases(count, &pool, t);
    let (alpha, inner) = (t.alpha(), t.inner());
    let a = with_phases(alpha, inner, &phases, t)?;
    let u = haar_unitary_with(a.inner(), &mut t.rng);
    let b = a.conjugate_inner(&u, &t.tol)?;
    let d = chi_defect(&a, &b, 10, 0.99, t)?.max(xi_penalty(&a, &b, t));
    Ok(Outcome::within(d, DEFECT_TOL))
}

fn padding(t: &mut Trial) -> Result<Outcome> {
    let pool: Vec<Complex64> = (0..3).map(|_| circle_point(&mut t.rng)).collect();
    let count = t.rng.random_range(0..=2);
    let phases = random_phases(count, &pool, t);
    let (alpha, inner) = (t.alpha(), t.inner());
    let a = with_phases(alpha, inner, &phases, t)?;
    let k = t.upto(3);
    let padded = a.pad(k);
    let d = chi_defect(&a, &padded, 10, 0.99, t)?.max(xi_penalty(&a, &padded, t));
    Ok(Outcome::within(d, DEFECT_TOL))
}

fn spectral_union(t: &mut Trial) -> Result<Outcome> {
    // A shared pool makes repeated values, and hence multiplicities, common.
    let pool: Vec<Complex64> = (0..3).map(|_| circle_point(&mut t.rng)).collect();
    let alpha = t.alpha();
    let (ka, kp) = (t.rng.random_range(0..=2), t.rng.random_range(0..=2));
    let pa = random_phases(ka, &pool, t);
    let pp = random_phases(kp, &pool, t);
    let (ma, mp) = (t.inner(), t.inner());
    let a = with_phases(alpha, ma, &pa, t)?;
    let p = with_phases(alpha, mp, &pp, t)?;
    let radius = t.tol.rank_tol;
    let expected = a.xi(&t.tol).union(&p.xi(&t.tol), radius);
    let got = a.product(&p)?.xi(&t.tol);
    let ok = got.matches(&expected, radius) && got.total() == ka + kp;
    Ok(Outcome::within(if ok { 0.0 } else { 1.0 }, 0.0))
}

/// Growth of `‖χ‖` as `z` approaches `1/λ` for a planted eigenvalue `λ` of
/// `D` with `|λ| ≤ 0.9`.
pub(crate) fn pole_growth_factors(t: &mut Trial) -> Result<Vec<f64>> {
    let m = t.inner();
    let modulus = t.rng.random_range(0.3..=0.9);
    let lambda = Complex64::from_polar(modulus, std::f64::consts::TAU * t.rng.random::<f64>());
    let rest = ball_matrix(m.saturating_sub(1).max(1), 0.9, &mut t.rng);
    let core = if m == 1 {
        diag(&[lambda])
    } else {
        direct_sum(&diag(&[lambda]), &rest)
    };
    let w = haar_unitary_with(m, &mut t.rng);
    let d: ComplexMatrix = &w * core * w.adjoint();
    let a = Colligation::dilation(&d);
    let pole = c64(1.0, 0.0) / lambda;
    let direction = circle_point(&mut t.rng);
    let start = 1e-3 * pole.norm();
    let norms = (0..4)
        .map(|k| {
            let z = pole + direction * (start / f64::powi(2.0, k));
            a.charfun(z, &t.tol).map(|v| op_norm(&v.value))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(norms.windows(2).map(|w| w[1] / w[0]).collect())
}

fn pole_growth(t: &mut Trial) -> Result<Outcome> {
    let factors = pole_growth_factors(t)?;
    let smallest = factors.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Outcome::within(POLE_GROWTH / smallest, 1.0))
}
