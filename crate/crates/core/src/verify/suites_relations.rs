//! Linear relations and the relation-valued characteristic function.

use rand::Rng;

use super::{Outcome, Suite, SuiteKind, Trial, CONTAINMENT_TOL, DEFECT_TOL, GRAPH_TOL};
use crate::error::{Error, Result};
use crate::grassmann::{char_relation, on_eigensurface, FormClass, HermitianFormSpec, LinearRelation, SubspaceL};
use crate::matrixcore::{ball_matrix, eigenvalues, gaussian_matrix, identity, kron_identity, ComplexMatrix};
use crate::multicolligation::MultiColligation;

pub(super) fn suites() -> Vec<Suite> {
    vec![
        Suite {
            name: "relation-compose-graph",
            description: "compose(graph A, graph B) = graph(BA)",
            kind: SuiteKind::Property,
            threshold: GRAPH_TOL,
            run: compose_graph,
        },
        Suite {
            name: "relation-compose-associative",
            description: "composition of random relations is associative",
            kind: SuiteKind::Property,
            threshold: GRAPH_TOL,
            run: compose_associative,
        },
        Suite {
            name: "relation-char-graph",
            description: "X(A; {y = Sx}) is the graph of χ(A; S)",
            kind: SuiteKind::Property,
            threshold: DEFECT_TOL,
            run: char_graph,
        },
        Suite {
            name: "relation-containment",
            description: "X(A∘P; L) contains X(A; L) X(P; L), every fifth L on an eigensurface",
            kind: SuiteKind::Property,
            threshold: CONTAINMENT_TOL,
            run: containment,
        },
        Suite {
            name: "relation-definiteness",
            description: "M positive on L implies the output form negative on X(A; L)",
            kind: SuiteKind::Property,
            threshold: 0.0,
            run: definiteness,
        },
    ]
}

fn compose_graph(t: &mut Trial) -> Result<Outcome> {
    let (d0, d1, d2) = (t.upto(4), t.upto(4), t.upto(4));
    let a = gaussian_matrix(d1, d0, &mut t.rng);
    let b = gaussian_matrix(d2, d1, &mut t.rng);
    let composed = LinearRelation::graph(&a).compose(&LinearRelation::graph(&b), &t.tol)?;
    Ok(Outcome::within(
        composed.distance(&LinearRelation::graph(&(b * a))),
        GRAPH_TOL,
    ))
}

/// Span of a random matrix with a random number of columns.
fn random_relation(dim_v: usize, dim_w: usize, t: &mut Trial) -> Result<LinearRelation> {
    let k = t.rng.random_range(0..=dim_v + dim_w);
    let spanning = gaussian_matrix(dim_v + dim_w, k, &mut t.rng);
    LinearRelation::span(dim_v, dim_w, &spanning, t.tol.rank_tol)
}

fn compose_associative(t: &mut Trial) -> Result<Outcome> {
    let (d0, d1, d2, d3) = (t.upto(3), t.upto(3), t.upto(3), t.upto(3));
    let p = random_relation(d0, d1, t)?;
    let q = random_relation(d1, d2, t)?;
    let r = random_relation(d2, d3, t)?;
    let left = p.compose(&q, &t.tol)?.compose(&r, &t.tol)?;
    let right = p.compose(&q.compose(&r, &t.tol)?, &t.tol)?;
    Ok(Outcome::within(left.distance(&right), GRAPH_TOL))
}

fn random_multi(t: &mut Trial) -> MultiColligation {
    let dims = t.dims;
    let (n, alpha, inner) = (t.upto(dims.n), t.upto(dims.alpha), t.upto(dims.inner));
    MultiColligation::random(n, alpha, inner, &mut t.rng)
}

fn char_graph(t: &mut Trial) -> Result<Outcome> {
    let a = random_multi(t);
    let n = a.n();
    let s = t.well_posed(
        |g| gaussian_matrix(n, n, g),
        |s| a.surface_singular_values(s).map(super::relative_sigma),
    )?;
    let l = SubspaceL::graph(&s, &t.tol)?;
    let x = char_relation(&a, &l, &t.tol)?;
    let chi = a.charfun(&s, &t.tol)?.value;
    let dim_ok = x.dim() == n * a.alpha() && !on_eigensurface(&a, &l, &t.tol)?;
    let d = if dim_ok {
        x.distance(&LinearRelation::graph(&chi))
    } else {
        f64::INFINITY
    };
    Ok(Outcome::within(d, DEFECT_TOL))
}

/// `S0 - μ I` for an eigenvalue `μ` of `S0 ⊗ I - 𝐃`, which puts the graph
/// `{y = Sx}` exactly on the eigensurface of `a`.
fn surface_argument(a: &MultiColligation, t: &mut Trial) -> ComplexMatrix {
    let n = a.n();
    let s0 = gaussian_matrix(n, n, &mut t.rng);
    let system = kron_identity(&s0, a.inner()) - a.big_d();
    let mus = eigenvalues(&system);
    let mu = mus[t.rng.random_range(0..mus.len())];
    s0 - identity(n) * mu
}

fn containment(t: &mut Trial) -> Result<Outcome> {
    let dims = t.dims;
    let (n, alpha) = (t.upto(dims.n), t.upto(dims.alpha));
    let (m1, m2) = (t.upto(dims.inner), t.upto(dims.inner));
    let a = MultiColligation::random(n, alpha, m1, &mut t.rng);
    let p = MultiColligation::random(n, alpha, m2, &mut t.rng);
    let ap = a.product(&p)?;
    let l = if t.index.is_multiple_of(5) {
        // Alternate which factor's eigensurface carries L.
        let host = if (t.index / 5).is_multiple_of(2) { &a } else { &p };
        let s = surface_argument(host, t);
        let l = SubspaceL::graph(&s, &t.tol)?;
        if !on_eigensurface(host, &l, &t.tol)? {
            return Err(Error::DimensionMismatch(
                "planted argument is not on the eigensurface".into(),
            ));
        }
        l
    } else {
        let s = gaussian_matrix(n, n, &mut t.rng);
        let sigma = gaussian_matrix(n, n, &mut t.rng);
        SubspaceL::from_equations(s, sigma, &t.tol)?
    };
    let xa = char_relation(&a, &l, &t.tol)?;
    let xp = char_relation(&p, &l, &t.tol)?;
    let xap = char_relation(&ap, &l, &t.tol)?;
    // P then Q in the composition order reads "first X(P), then X(A)".
    let composed = xp.compose(&xa, &t.tol)?;
    Ok(Outcome::within(xap.containment_residual(&composed), CONTAINMENT_TOL))
}

fn definiteness(t: &mut Trial) -> Result<Outcome> {
    // Strictness needs injective 𝐂: for p in its kernel q = 𝐀p keeps the
    // norm, so α ≤ m is drawn.
    let dims = t.dims;
    let (n, alpha) = (t.upto(dims.n), t.upto(dims.alpha));
    let inner = t.rng.random_range(alpha..=dims.inner.max(alpha));
    let a = MultiColligation::random(n, alpha, inner, &mut t.rng);
    let tcon = ball_matrix(n, 0.95, &mut t.rng);
    let l = SubspaceL::graph(&tcon, &t.tol)?;
    let m = HermitianFormSpec::signature(n, n);
    if m.classify(l.basis(), &t.tol)? != FormClass::PositiveDefinite {
        return Ok(Outcome::within(1.0, 0.0));
    }
    let x = char_relation(&a, &l, &t.tol)?;
    let na = n * a.alpha();
    let out = HermitianFormSpec::signature(na, na);
    let class = out.classify(x.basis(), &t.tol)?;
    Ok(Outcome::within(
        if class == FormClass::NegativeDefinite { 0.0 } else { 1.0 },
        0.0,
    ))
}
