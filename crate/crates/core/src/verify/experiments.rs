//! Numerical experiments that report observations instead of asserting a
//! property. Each one checks a claim whose precise form is ambiguous or
//! not established, so the output records what holds and what does not.

use num_complex::Complex64;
use serde_json::{json, Value};

use super::suites_single::pole_growth_factors;
use super::{rel_defect, relative_sigma, Dims, Trial, DEFECT_TOL, POLE_GROWTH};
use crate::doublecoset::{DoubleCosetFamily, FormPair};
use crate::error::Result;
use crate::matrixcore::{
    diag, gaussian_matrix, haar_unitary_with, identity, op_norm, rng, solve, ComplexMatrix, Tolerances,
};
use crate::multicolligation::MultiColligation;

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    run: fn(usize, u64, Dims, &Tolerances) -> Value,
}

impl Experiment {
    pub fn run(&self, trials: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Value {
        let observations = (self.run)(trials, seed, dims, tol);
        json!({
            "experiment": self.name,
            "description": self.description,
            "trials": trials,
            "seed": seed,
            "observations": observations,
        })
    }
}

pub fn registry() -> Vec<Experiment> {
    vec![
        Experiment {
            name: "dc-reflection-conventions",
            description: "χ(S^□⁻¹, R^□⁻¹) against (χ^□)⁻¹ with □ = * and with □ = -*",
            run: reflection_conventions,
        },
        Experiment {
            name: "multi-boundary-norm",
            description: "‖χ(S)⁻¹‖ for non-unitary S with ‖S‖ = 1",
            run: boundary_norm,
        },
        Experiment {
            name: "dc-equivariance-variants",
            description: "dilation identity with Λ = diag(λ, λ) and with Λ = diag(λ, λ⁻¹)",
            run: equivariance_variants,
        },
        Experiment {
            name: "single-pole-growth",
            description: "growth of ‖χ(z)‖ per halving of the distance to a planted pole",
            run: pole_growth,
        },
    ]
}

pub fn find(name: &str) -> Option<Experiment> {
    registry().into_iter().find(|e| e.name == name)
}

fn trial(index: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Trial {
    let s = seed.wrapping_add(index as u64);
    Trial {
        rng: rng(s),
        dims,
        tol: *tol,
        index,
        seed: s,
    }
}

/// Maximum, count within [`DEFECT_TOL`] and count of skipped trials.
#[derive(Default)]
struct Tally {
    max: f64,
    held: usize,
    skipped: usize,
}

impl Tally {
    fn add(&mut self, defect: Result<f64>) {
        match defect {
            Ok(d) => {
                self.max = self.max.max(d);
                if d <= DEFECT_TOL {
                    self.held += 1;
                }
            }
            Err(_) => self.skipped += 1,
        }
    }

    fn to_json(&self) -> Value {
        json!({ "max_defect": self.max, "held": self.held, "skipped": self.skipped })
    }
}

fn random_family(t: &mut Trial) -> DoubleCosetFamily {
    let dims = t.dims.capped(2, 2, 3);
    let (n, alpha, inner) = (t.upto(dims.n), t.upto(dims.alpha), t.upto(dims.inner));
    DoubleCosetFamily::random(n, alpha, inner, &mut t.rng)
}

fn inverse(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    Ok(solve(m, &identity(m.nrows()), tol)?.x)
}

fn reflection_conventions(trials: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Value {
    let mut tallies = [Tally::default(), Tally::default()];
    for i in 0..trials {
        let mut t = trial(i, seed, dims, tol);
        let f = random_family(&mut t);
        let n = f.n();
        let forms = FormPair::new(n, f.alpha());
        let s = gaussian_matrix(n, n, &mut t.rng);
        let r = gaussian_matrix(n, n, &mut t.rng);
        for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
            let defect = (|| {
                let s_box = inverse(&(s.adjoint() * Complex64::from(sign)), tol)?;
                let r_box = inverse(&(r.adjoint() * Complex64::from(sign)), tol)?;
                let chi = f.charfun(&s, &r, tol)?.value;
                let lhs = f.charfun(&s_box, &r_box, tol)?.value;
                let rhs = inverse(&forms.m_adjoint(&chi), tol)?;
                Ok(rel_defect(&lhs, &rhs, op_norm(&lhs) * op_norm(&chi)))
            })();
            tallies[k].add(defect);
        }
    }
    json!({
        "conjugate_transpose": tallies[0].to_json(),
        "negated_conjugate_transpose": tallies[1].to_json(),
    })
}

/// `U diag(1, σ_2, ..., σ_n) V` with `σ_k < 1`.
fn unit_norm_non_unitary(t: &mut Trial, n: usize) -> ComplexMatrix {
    use rand::Rng;
    let mut sigma = vec![Complex64::from(1.0)];
    sigma.extend((1..n).map(|_| Complex64::from(t.rng.random_range(0.0..0.99))));
    let u = haar_unitary_with(n, &mut t.rng);
    let v = haar_unitary_with(n, &mut t.rng);
    u * diag(&sigma) * v
}

fn boundary_norm(trials: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Value {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let (mut away, mut evaluated) = (0usize, 0usize);
    for i in 0..trials {
        let mut t = trial(i, seed, dims, tol);
        let n = t.upto(dims.n.max(2)).max(2);
        let (alpha, inner) = (t.alpha(), t.inner());
        let a = MultiColligation::random(n, alpha, inner, &mut t.rng);
        let s = unit_norm_non_unitary(&mut t, n);
        let Ok(ratio) = a.surface_singular_values(&s).map(relative_sigma) else {
            continue;
        };
        if ratio < super::WELL_POSED {
            continue;
        }
        let Ok(chi) = a.charfun(&s, tol) else { continue };
        let Ok(inv) = inverse(&chi.value, tol) else { continue };
        let norm = op_norm(&inv);
        evaluated += 1;
        lo = lo.min(norm);
        hi = hi.max(norm);
        if (norm - 1.0).abs() > DEFECT_TOL {
            away += 1;
        }
    }
    json!({
        "evaluated": evaluated,
        "min_inverse_norm": lo,
        "max_inverse_norm": hi,
        "not_equal_to_one": away,
    })
}

fn equivariance_variants(trials: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Value {
    let (mut same, mut printed, mut split) = (Tally::default(), Tally::default(), Tally::default());
    for i in 0..trials {
        let mut t = trial(i, seed, dims, tol);
        let f = random_family(&mut t);
        let n = f.n();
        let lambda: Vec<Complex64> = (0..n).map(|_| t.scalar()).collect();
        let s = gaussian_matrix(n, n, &mut t.rng);
        let r = gaussian_matrix(n, n, &mut t.rng);
        let measure = |pair: Result<(ComplexMatrix, ComplexMatrix)>| pair.map(|(l, r)| rel_defect(&l, &r, op_norm(&r)));
        same.add(measure(f.dilation_check(&s, &r, &lambda, tol)));
        split.add(measure(f.dilation_check_split(&s, &r, &lambda, tol)));
        printed.add(measure(printed_dilation(&f, &s, &r, &lambda, tol)));
    }
    json!({
        "same_scaling_conjugated_arguments": same.to_json(),
        "split_scaling_conjugated_arguments": printed.to_json(),
        "split_scaling_split_arguments": split.to_json(),
    })
}

/// `Λ χ(S, R) Λ⁻¹` with `Λ = diag(λ, λ⁻¹)` against `χ(λSλ⁻¹, λRλ⁻¹)`.
fn printed_dilation(
    f: &DoubleCosetFamily,
    s: &ComplexMatrix,
    r: &ComplexMatrix,
    lambda: &[Complex64],
    tol: &Tolerances,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let a = f.alpha();
    let mut entries = Vec::new();
    for l in lambda {
        entries.extend(std::iter::repeat_n(*l, a));
    }
    for l in lambda {
        entries.extend(std::iter::repeat_n(l.inv(), a));
    }
    let scale = diag(&entries);
    let scale_inv = diag(&entries.iter().map(|z| z.inv()).collect::<Vec<_>>());
    let lam = diag(lambda);
    let lam_inv = diag(&lambda.iter().map(|z| z.inv()).collect::<Vec<_>>());
    let left = &scale * f.charfun(s, r, tol)?.value * scale_inv;
    let right = f.charfun(&(&lam * s * &lam_inv), &(&lam * r * &lam_inv), tol)?.value;
    Ok((left, right))
}

fn pole_growth(trials: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Value {
    let mut smallest = f64::INFINITY;
    let mut largest: f64 = 0.0;
    let mut reaching = 0usize;
    let mut errors = Vec::new();
    for i in 0..trials {
        let mut t = trial(i, seed, dims, tol);
        match pole_growth_factors(&mut t) {
            Ok(factors) => {
                let lo = factors.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = factors.iter().copied().fold(0.0, f64::max);
                smallest = smallest.min(lo);
                largest = largest.max(hi);
                if lo >= POLE_GROWTH {
                    reaching += 1;
                }
            }
            Err(e) => errors.push(json!({ "trial": i, "error": e.to_string() })),
        }
    }
    json!({
        "smallest_factor": smallest,
        "largest_factor": largest,
        "required_factor": POLE_GROWTH,
        "trials_reaching_required": reaching,
        "errors": errors,
    })
}
