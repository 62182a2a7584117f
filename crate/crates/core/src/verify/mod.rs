//! Randomized property suites.
//!
//! A suite runs a trial function on `trials` independent instances; trial
//! `i` draws everything from a generator seeded with `seed + i`, so any
//! failure is reproducible from the reported seed. Trials run in parallel
//! and are collected in order.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrixcore::{c64, rng, ComplexMatrix, SeededRng, Tolerances};

pub mod experiments;
pub mod rational;
mod suites_dc;
mod suites_multi;
mod suites_relations;
mod suites_single;
mod suites_tri;

/// Relative defect accepted for algebraic identities, measured against
/// `max(1, product of operand norms)`.
pub const DEFECT_TOL: f64 = 1e-8;
/// Slack for the norm inequalities (contraction, expansion).
pub const NORM_TOL: f64 = 1e-8;
/// Projection residual accepted for relation containment.
pub const CONTAINMENT_TOL: f64 = 1e-7;
/// Subspace distance accepted for `compose(graph A, graph B) = graph(BA)`.
pub const GRAPH_TOL: f64 = 1e-9;
/// Relative error of the rational fit at held-out points.
pub const RATIONAL_TOL: f64 = 1e-6;
/// Held-out points per rational fit.
pub const RATIONAL_HELD_OUT: usize = 10;
/// Required growth of `‖χ‖` per halving of the distance to a pole.
pub const POLE_GROWTH: f64 = 10.0;
/// Random arguments per trial for the pointwise identities.
pub const POINTS_PER_TRIAL: usize = 20;
/// Radius of the matrix ball used for the interior inequalities.
pub const BALL_RADIUS: f64 = 0.9;
/// Random arguments whose eliminated system has a relative smallest
/// singular value below this are redrawn.
pub const WELL_POSED: f64 = 1e-4;

/// Upper bounds on the sizes drawn for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub n: usize,
    pub alpha: usize,
    pub inner: usize,
}

impl Default for Dims {
    fn default() -> Self {
        Self {
            n: 3,
            alpha: 3,
            inner: 4,
        }
    }
}

impl Dims {
    pub fn capped(self, n: usize, alpha: usize, inner: usize) -> Self {
        Self {
            n: self.n.min(n),
            alpha: self.alpha.min(alpha),
            inner: self.inner.min(inner),
        }
    }
}

/// Result of one trial: a normalized defect and whether the property held.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub defect: f64,
    pub passed: bool,
}

impl Outcome {
    pub fn within(defect: f64, threshold: f64) -> Self {
        Self {
            defect,
            passed: defect <= threshold,
        }
    }
}

/// Per-trial state handed to a suite.
pub struct Trial {
    pub rng: SeededRng,
    pub dims: Dims,
    pub tol: Tolerances,
    pub index: usize,
    pub seed: u64,
}

impl Trial {
    pub fn upto(&mut self, max: usize) -> usize {
        self.rng.random_range(1..=max.max(1))
    }

    pub fn n(&mut self) -> usize {
        self.upto(self.dims.n)
    }

    pub fn alpha(&mut self) -> usize {
        self.upto(self.dims.alpha)
    }

    pub fn inner(&mut self) -> usize {
        self.upto(self.dims.inner)
    }

    /// Nonzero scalar with log-normal modulus and uniform phase.
    pub fn scalar(&mut self) -> Complex64 {
        let log_r: f64 = self.rng.sample(rand_distr::StandardNormal);
        Complex64::from_polar((0.5 * log_r).exp(), std::f64::consts::TAU * self.rng.random::<f64>())
    }

    /// Draws from `sample` until `ratio` reports a relative smallest singular
    /// value of at least [`WELL_POSED`].
    pub fn well_posed<T>(
        &mut self,
        mut sample: impl FnMut(&mut SeededRng) -> T,
        ratio: impl Fn(&T) -> Result<f64>,
    ) -> Result<T> {
        for _ in 0..200 {
            let x = sample(&mut self.rng);
            if ratio(&x)? >= WELL_POSED {
                return Ok(x);
            }
        }
        Err(Error::OnEigensurface { sigma_min: 0.0 })
    }
}

/// `sigma_min / max(sigma_max, 1)` from a `(sigma_max, sigma_min)` pair.
pub fn relative_sigma((hi, lo): (f64, f64)) -> f64 {
    lo / hi.max(1.0)
}

/// `‖a - b‖_F / max(1, scale)`.
pub fn rel_defect(a: &ComplexMatrix, b: &ComplexMatrix, scale: f64) -> f64 {
    (a - b).norm() / scale.max(1.0)
}

pub fn ones(n: usize) -> Vec<Complex64> {
    vec![c64(1.0, 0.0); n]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    /// Passes when every trial satisfies the property.
    Property,
    /// Passes when at least one trial violates the property.
    NegativeControl,
}

pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: SuiteKind,
    /// Threshold applied to the reported defects.
    pub threshold: f64,
    pub run: fn(&mut Trial) -> Result<Outcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub seed: u64,
    pub defect: Option<f64>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub kind: SuiteKind,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
    pub failures: Vec<Failure>,
    pub max_defect: f64,
    /// Trials on which the property held.
    pub held: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn registry() -> Vec<Suite> {
    let mut all = Vec::new();
    all.extend(suites_single::suites());
    all.extend(suites_multi::suites());
    all.extend(suites_relations::suites());
    all.extend(suites_tri::suites());
    all.extend(suites_dc::suites());
    all
}

pub fn find(name: &str) -> Option<Suite> {
    registry().into_iter().find(|s| s.name == name)
}

/// Runs one trial in isolation.
pub fn run_trial(suite: &Suite, index: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Result<Outcome> {
    let trial_seed = seed.wrapping_add(index as u64);
    let mut trial = Trial {
        rng: rng(trial_seed),
        dims,
        tol: *tol,
        index,
        seed: trial_seed,
    };
    (suite.run)(&mut trial)
}

pub fn run_suite(suite: &Suite, trials: usize, seed: u64, dims: Dims, tol: &Tolerances) -> Report {
    let outcomes: Vec<Result<Outcome>> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(suite, i, seed, dims, tol))
        .collect();
    let mut failures = Vec::new();
    let mut max_defect: f64 = 0.0;
    let mut held = 0;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let trial_seed = seed.wrapping_add(i as u64);
        match outcome {
            Ok(o) => {
                max_defect = max_defect.max(o.defect);
                if o.passed {
                    held += 1;
                } else if suite.kind == SuiteKind::Property {
                    failures.push(Failure {
                        trial: i,
                        seed: trial_seed,
                        defect: Some(o.defect),
                        message: format!("defect {:.3e} above threshold {:.1e}", o.defect, suite.threshold),
                    });
                }
            }
            Err(e) => failures.push(Failure {
                trial: i,
                seed: trial_seed,
                defect: None,
                message: e.to_string(),
            }),
        }
    }
    if suite.kind == SuiteKind::NegativeControl && trials > 0 && held == trials {
        failures.push(Failure {
            trial: trials - 1,
            seed,
            defect: Some(max_defect),
            message: "the identity held on every instance".into(),
        });
    }
    Report {
        suite: suite.name.to_string(),
        kind: suite.kind,
        trials,
        seed,
        threshold: suite.threshold,
        failures,
        max_defect,
        held,
    }
}
