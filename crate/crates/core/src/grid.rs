//! Pointwise and grid evaluation with NDJSON output.
//!
//! Grid points are produced from their index alone, evaluated in parallel
//! chunk by chunk and written in index order, so the output does not depend
//! on the number of worker threads.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::document::{MatrixJson, Object};
use crate::error::{Error, Result};
use crate::matrixcore::{ball_matrix, c64, disc_point, rng, ComplexMatrix, Tolerances};

/// Number of points evaluated between two writes.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    #[serde(rename = "z")]
    Z,
    S,
    R,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// Polar grid: `resolution` radii in `(0, radius]` times `resolution`
    /// angles. Only for `z`.
    Disc { radius: f64, resolution: usize },
    /// `start + t * direction` with `t` on a rectangular grid, real part
    /// outer, imaginary part inner.
    Segment {
        start: MatrixJson,
        direction: MatrixJson,
        t_re: [f64; 2],
        t_im: [f64; 2],
        resolution: [usize; 2],
    },
    /// `count` random points of norm below `radius`; point `k` is drawn from
    /// its own generator seeded with `seed + k`.
    Ball { radius: f64, count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub variable: Variable,
    pub shape: Shape,
    /// The argument that stays fixed for two-argument documents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<MatrixJson>,
}

/// An argument of a characteristic function.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Z(Complex64),
    S(ComplexMatrix),
    SR(ComplexMatrix, ComplexMatrix),
}

impl Point {
    pub fn to_json(&self) -> Value {
        match self {
            Point::Z(z) => json!([z.re, z.im]),
            Point::S(s) => json!(MatrixJson::from_matrix(s)),
            Point::SR(s, r) => json!({"S": MatrixJson::from_matrix(s), "R": MatrixJson::from_matrix(r)}),
        }
    }

    /// Reads a literal: `[re, im]` for single colligations, a matrix for
    /// multi and tri documents, `{"S": .., "R": ..}` for double cosets.
    pub fn from_json(value: &Value, obj: &Object) -> Result<Self> {
        let bad = |what: &str| Error::DimensionMismatch(format!("point literal: expected {what}"));
        let matrix = |v: &Value| -> Result<ComplexMatrix> {
            serde_json::from_value::<MatrixJson>(v.clone())
                .map_err(|_| bad("a matrix of [re, im] pairs"))?
                .to_matrix()
        };
        let point = match obj {
            Object::Colligation(_) => {
                let [re, im]: [f64; 2] = serde_json::from_value(value.clone()).map_err(|_| bad("[re, im]"))?;
                Point::Z(c64(re, im))
            }
            Object::Multi(_) | Object::Tri(_) => Point::S(matrix(value)?),
            Object::DoubleCoset(_) => {
                let s = value.get("S").ok_or_else(|| bad("an object with S and R"))?;
                let r = value.get("R").ok_or_else(|| bad("an object with S and R"))?;
                Point::SR(matrix(s)?, matrix(r)?)
            }
        };
        check_point(&point, obj)?;
        Ok(point)
    }
}

fn arity(obj: &Object) -> usize {
    match obj {
        Object::Colligation(_) => 1,
        Object::Multi(m) => m.n(),
        Object::Tri(t) => t.slots(),
        Object::DoubleCoset(f) => f.n(),
    }
}

fn check_point(point: &Point, obj: &Object) -> Result<()> {
    let n = arity(obj);
    let square = |m: &ComplexMatrix| m.shape() == (n, n);
    let ok = match (point, obj) {
        (Point::Z(z), Object::Colligation(_)) => z.re.is_finite() && z.im.is_finite(),
        (Point::S(s), Object::Multi(_) | Object::Tri(_)) => square(s),
        (Point::SR(s, r), Object::DoubleCoset(_)) => square(s) && square(r),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "argument does not fit a {} document with arity {n}",
            obj.kind()
        )))
    }
}

fn linspace(range: [f64; 2], count: usize, i: usize) -> f64 {
    if count <= 1 {
        range[0]
    } else {
        range[0] + (range[1] - range[0]) * i as f64 / (count - 1) as f64
    }
}

impl GridSpec {
    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn len(&self) -> usize {
        match &self.shape {
            Shape::Disc { resolution, .. } => resolution * resolution,
            Shape::Segment { resolution, .. } => resolution[0] * resolution[1],
            Shape::Ball { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks the grid against a document and returns the fixed argument,
    /// if one is needed.
    pub fn validate(&self, obj: &Object) -> Result<Option<ComplexMatrix>> {
        let bad = |msg: &str| Err(Error::DimensionMismatch(format!("grid: {msg}")));
        let n = arity(obj);
        let var_ok = matches!(
            (self.variable, obj),
            (Variable::Z, Object::Colligation(_))
                | (Variable::S, Object::Multi(_) | Object::Tri(_) | Object::DoubleCoset(_))
                | (Variable::R, Object::DoubleCoset(_))
        );
        if !var_ok {
            return bad(&format!(
                "variable {:?} does not apply to a {} document",
                self.variable,
                obj.kind()
            ));
        }
        let size = if self.variable == Variable::Z { 1 } else { n };
        match &self.shape {
            Shape::Disc { radius, resolution } => {
                if self.variable != Variable::Z {
                    return bad("disc grids are only defined for z");
                }
                if !(radius.is_finite() && *radius > 0.0) || *resolution == 0 {
                    return bad("disc needs a positive radius and resolution");
                }
            }
            Shape::Segment {
                start,
                direction,
                t_re,
                t_im,
                resolution,
            } => {
                let (a, b) = (start.to_matrix()?, direction.to_matrix()?);
                if a.shape() != (size, size) || b.shape() != (size, size) {
                    return bad(&format!("segment endpoints must be {size}x{size}"));
                }
                if t_re.iter().chain(t_im).any(|x| !x.is_finite()) || resolution.contains(&0) {
                    return bad("segment needs finite parameter ranges and positive resolution");
                }
            }
            Shape::Ball { radius, count, .. } => {
                if !(radius.is_finite() && *radius > 0.0) || *count == 0 {
                    return bad("ball needs a positive radius and count");
                }
            }
        }
        match obj {
            Object::DoubleCoset(_) => {
                let fixed = self
                    .fixed
                    .as_ref()
                    .ok_or_else(|| Error::DimensionMismatch("grid: double-coset grids need a fixed argument".into()))?
                    .to_matrix()?;
                if fixed.shape() != (n, n) {
                    return bad(&format!("fixed argument must be {n}x{n}"));
                }
                Ok(Some(fixed))
            }
            _ => Ok(None),
        }
    }

    fn varying(&self, k: usize, size: usize) -> ComplexMatrix {
        match &self.shape {
            Shape::Disc { radius, resolution } => {
                let (i, j) = (k / resolution, k % resolution);
                let r = radius * (i + 1) as f64 / *resolution as f64;
                let theta = std::f64::consts::TAU * j as f64 / *resolution as f64;
                ComplexMatrix::from_element(1, 1, Complex64::from_polar(r, theta))
            }
            Shape::Segment {
                start,
                direction,
                t_re,
                t_im,
                resolution,
            } => {
                let (i, j) = (k / resolution[1], k % resolution[1]);
                let t = c64(linspace(*t_re, resolution[0], i), linspace(*t_im, resolution[1], j));
                let a = start.to_matrix().expect("validated");
                let b = direction.to_matrix().expect("validated");
                a + b * t
            }
            Shape::Ball { radius, seed, .. } => {
                let mut g = rng(seed.wrapping_add(k as u64));
                if self.variable == Variable::Z {
                    ComplexMatrix::from_element(1, 1, disc_point(*radius, &mut g))
                } else {
                    ball_matrix(size, *radius, &mut g)
                }
            }
        }
    }

    /// The `k`-th grid point. `validate` must have succeeded.
    pub fn point(&self, k: usize, obj: &Object, fixed: Option<&ComplexMatrix>) -> Point {
        let v = self.varying(k, arity(obj));
        match (self.variable, fixed) {
            (Variable::Z, _) => Point::Z(v[(0, 0)]),
            (Variable::S, Some(r)) => Point::SR(v, r.clone()),
            (Variable::R, Some(s)) => Point::SR(s.clone(), v),
            (_, None) => Point::S(v),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRecord {
    pub index: usize,
    pub point: Value,
    pub value: Option<MatrixJson>,
    pub sigma_min: f64,
    pub regular: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceRecord {
    pub index: usize,
    pub point: Value,
    pub abs_det: f64,
    pub sigma_min: f64,
}

/// Smallest singular value of the system behind the characteristic function.
fn system_sigma_min(obj: &Object, point: &Point) -> Result<f64> {
    Ok(match (obj, point) {
        (Object::Colligation(c), Point::Z(z)) => {
            let m = crate::matrixcore::identity(c.inner()) - c.d() * *z;
            crate::matrixcore::extreme_singular_values(&m).1
        }
        (Object::Multi(m), Point::S(s)) => m.surface_singular_values(s)?.1,
        (Object::Tri(t), Point::S(s)) => t.surface_singular_values(s)?.1,
        (Object::DoubleCoset(f), Point::SR(s, r)) => f.surface_singular_values(s, r)?.1,
        _ => return Err(Error::DimensionMismatch("point does not match document".into())),
    })
}

/// Evaluates the characteristic function at one point. Singular points give
/// a record with `regular: false` instead of an error.
pub fn evaluate(obj: &Object, point: &Point, index: usize, tol: &Tolerances) -> Result<EvalRecord> {
    let result = match (obj, point) {
        (Object::Colligation(c), Point::Z(z)) => c.charfun(*z, tol).map(|v| (v.value, v.sigma_min)),
        (Object::Multi(m), Point::S(s)) => m.charfun(s, tol).map(|v| (v.value, v.sigma_min)),
        (Object::Tri(t), Point::S(s)) => t.charfun(s, tol),
        (Object::DoubleCoset(f), Point::SR(s, r)) => f.charfun(s, r, tol).map(|v| (v.value, v.sigma_min)),
        _ => return Err(Error::DimensionMismatch("point does not match document".into())),
    };
    let (value, sigma_min, regular) = match result {
        Ok((value, sigma_min)) => (Some(MatrixJson::from_matrix(&value)), sigma_min, true),
        Err(Error::NearPole { sigma_min } | Error::OnEigensurface { sigma_min }) => (None, sigma_min, false),
        Err(Error::ResidualTooLarge { .. }) => (None, system_sigma_min(obj, point)?, false),
        Err(e) => return Err(e),
    };
    Ok(EvalRecord {
        index,
        point: point.to_json(),
        value,
        sigma_min,
        regular,
    })
}

/// `|det|` and smallest singular value of the eliminated system.
pub fn surface(obj: &Object, point: &Point, index: usize) -> Result<SurfaceRecord> {
    let abs_det = match (obj, point) {
        (Object::Multi(m), Point::S(s)) => m.eigensurface_det(s)?.norm(),
        (Object::Tri(t), Point::S(s)) => t.eigensurface_det(s)?.norm(),
        (Object::DoubleCoset(f), Point::SR(s, r)) => f.eigensurface_det(s, r)?.norm(),
        _ => {
            return Err(Error::DimensionMismatch(format!(
                "surfaces are defined for multi, tri and doublecoset documents, not {}",
                obj.kind()
            )))
        }
    };
    Ok(SurfaceRecord {
        index,
        point: point.to_json(),
        abs_det,
        sigma_min: system_sigma_min(obj, point)?,
    })
}

/// Summary of a grid run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStats {
    pub points: usize,
    pub regular: usize,
}

/// Evaluates `records(k)` for `k < count` on a pool of `threads` workers and
/// writes one line per point in index order.
pub fn run_ordered<W, F>(count: usize, threads: usize, out: &mut W, record: F) -> Result<RunStats>
where
    W: Write + ?Sized,
    F: Fn(usize) -> Result<(String, bool)> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::DimensionMismatch(format!("thread pool: {e}")))?;
    let mut stats = RunStats { points: 0, regular: 0 };
    let mut start = 0;
    while start < count {
        let end = (start + CHUNK).min(count);
        let lines: Vec<Result<(String, bool)>> = pool.install(|| (start..end).into_par_iter().map(&record).collect());
        for line in lines {
            let (line, regular) = line?;
            out.write_all(line.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|e| Error::DimensionMismatch(format!("write failed: {e}")))?;
            stats.points += 1;
            stats.regular += usize::from(regular);
        }
        start = end;
    }
    Ok(stats)
}

/// Evaluates the characteristic function over a grid.
pub fn eval_grid<W: Write + ?Sized>(
    obj: &Object,
    spec: &GridSpec,
    tol: &Tolerances,
    threads: usize,
    out: &mut W,
) -> Result<RunStats> {
    let fixed = spec.validate(obj)?;
    run_ordered(spec.len(), threads, out, |k| {
        let point = spec.point(k, obj, fixed.as_ref());
        let rec = evaluate(obj, &point, k, tol)?;
        Ok((serde_json::to_string(&rec).expect("records serialize"), rec.regular))
    })
}

/// Samples `|det|` and `sigma_min` of the eliminated system over a grid.
pub fn surface_grid<W: Write + ?Sized>(obj: &Object, spec: &GridSpec, threads: usize, out: &mut W) -> Result<RunStats> {
    let fixed = spec.validate(obj)?;
    run_ordered(spec.len(), threads, out, |k| {
        let point = spec.point(k, obj, fixed.as_ref());
        let rec = surface(obj, &point, k)?;
        Ok((serde_json::to_string(&rec).expect("records serialize"), true))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::Colligation;
    use crate::matrixcore::{identity, zeros};
    use crate::multicolligation::MultiColligation;

    fn segment_spec(n: usize, res: [usize; 2]) -> GridSpec {
        GridSpec {
            variable: Variable::S,
            shape: Shape::Segment {
                start: MatrixJson::from_matrix(&zeros(n, n)),
                direction: MatrixJson::from_matrix(&identity(n)),
                t_re: [-1.0, 1.0],
                t_im: [-0.5, 0.5],
                resolution: res,
            },
            fixed: None,
        }
    }

    #[test]
    fn swap_at_half() {
        let obj = Object::Colligation(Colligation::swap());
        let rec = evaluate(&obj, &Point::Z(c64(0.5, 0.0)), 0, &Tolerances::default()).unwrap();
        assert!(rec.regular);
        assert_eq!(rec.value.unwrap().0, vec![vec![[0.5, 0.0]]]);
    }

    #[test]
    fn identity_multi_at_identity_is_singular() {
        let obj = Object::Multi(MultiColligation::identity(2, 1, 1));
        let rec = evaluate(&obj, &Point::S(identity(2)), 0, &Tolerances::default()).unwrap();
        assert!(!rec.regular);
        assert!(rec.value.is_none());
        let s = surface(&obj, &Point::S(identity(2)), 0).unwrap();
        assert!(s.abs_det < 1e-14);
    }

    #[test]
    fn swap_pair_surface_is_t_squared() {
        let obj = Object::Multi(MultiColligation::swaps(2));
        let spec = segment_spec(2, [5, 1]);
        let mut out = Vec::new();
        surface_grid(&obj, &spec, 2, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        for (i, line) in text.lines().enumerate() {
            let v: Value = serde_json::from_str(line).unwrap();
            let t = -1.0 + 0.5 * i as f64;
            let expected = (t * t + 0.25) * 1.0;
            // t = re - 0.5i, |t|^2 = re^2 + 0.25
            assert!((v["abs_det"].as_f64().unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn output_independent_of_threads() {
        let obj = Object::Multi(MultiColligation::random(2, 2, 2, &mut rng(3)));
        let spec = segment_spec(2, [30, 30]);
        let run = |threads| {
            let mut out = Vec::new();
            eval_grid(&obj, &spec, &Tolerances::default(), threads, &mut out).unwrap();
            out
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(String::from_utf8(one).unwrap().lines().count(), 900);
    }

    #[test]
    fn spec_validation() {
        let obj = Object::Multi(MultiColligation::identity(2, 1, 1));
        let disc = GridSpec {
            variable: Variable::S,
            shape: Shape::Disc {
                radius: 1.0,
                resolution: 3,
            },
            fixed: None,
        };
        assert!(disc.validate(&obj).is_err());
        assert!(segment_spec(3, [2, 2]).validate(&obj).is_err());
        let text = serde_json::to_string(&segment_spec(2, [2, 2])).unwrap();
        assert_eq!(GridSpec::parse(&text).unwrap(), segment_spec(2, [2, 2]));
    }
}
