//! Rational interpolation along a line, used to check that a matrix function
//! is rational of bounded degree in the line parameter.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::matrixcore::{c64, disc_point, svd, zeros, ComplexMatrix};

/// `p(t) / q(t)` with coefficients in increasing degree.
#[derive(Debug, Clone)]
pub struct RationalFit {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
}

fn horner(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c64(0.0, 0.0), |acc, c| acc * t + c)
}

impl RationalFit {
    /// Linearized interpolation `p(t_k) = f_k q(t_k)` with `deg p, deg q ≤
    /// degree` through `2 degree + 1` nodes; rows are scaled by `1 + |f_k|`.
    pub fn fit(nodes: &[Complex64], values: &[Complex64], degree: usize) -> Self {
        let width = 2 * (degree + 1);
        let mut m = zeros(width, width);
        for (k, (&t, &f)) in nodes.iter().zip(values).enumerate() {
            let w = 1.0 / (1.0 + f.norm());
            let mut power = c64(w, 0.0);
            for d in 0..=degree {
                m[(k, d)] = power;
                m[(k, degree + 1 + d)] = -f * power;
                power *= t;
            }
        }
        // Singular values are descending, so the last column of V spans the
        // best null direction.
        let d = svd(&m);
        let v: Vec<Complex64> = d.v.column(width - 1).iter().copied().collect();
        Self {
            num: v[..=degree].to_vec(),
            den: v[degree + 1..].to_vec(),
        }
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        horner(&self.num, t) / horner(&self.den, t)
    }
}

/// Fits every entry of `f` on the line with `2 degree + 1` nodes on the unit
/// circle and returns the largest relative error at `held_out` random points
/// of the unit disc.
pub fn line_fit_error<R, F>(f: F, degree: usize, held_out: usize, rng: &mut R) -> Result<f64>
where
    R: Rng + ?Sized,
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    let count = 2 * degree + 1;
    let rotation: f64 = rng.random();
    let nodes: Vec<Complex64> = (0..count)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + rotation) / count as f64))
        .collect();
    let samples = nodes.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let (rows, cols) = samples[0].shape();
    let fits: Vec<RationalFit> = (0..rows * cols)
        .map(|e| {
            let values: Vec<Complex64> = samples.iter().map(|s| s[(e / cols, e % cols)]).collect();
            RationalFit::fit(&nodes, &values, degree)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..held_out {
        let t = disc_point(1.0, rng);
        let exact = f(t)?;
        let fitted = ComplexMatrix::from_fn(rows, cols, |i, j| fits[i * cols + j].eval(t));
        let err = (fitted - &exact).norm() / exact.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(err);
    }
    Ok(worst)
}
