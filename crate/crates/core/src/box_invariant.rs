//! The alternating vertex-product sum `J` of a rectangular box.
//!
//! `J(R) = Σ_x (-1)^{n - par(x)} x_1⋯x_n` over the `2^n` vertices, with
//! parity measured from the lexicographically smallest vertex. It equals
//! `±perm(V)` for the matrix of edge vectors `V`, hence `±vol` for
//! axis-aligned boxes, and stays within `vol/4` of `±vol` when the box is
//! rotated by less than `ε` in operator norm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    op_norm_dist_identity, parallelotope_vertices, ComplexPoint, OrientedBox, Subset,
    VertexParities,
};
use crate::permanent::{permanent, SquareMatrix, MAX_SUBSET_DIM};
use crate::scalar::factorial;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JValue {
    pub value: f64,
    /// Subset mask of the base vertex that fixed the sign.
    pub base_subset: Subset,
}

fn signed_sum(points: &[Vec<f64>], parities: &VertexParities, n: usize) -> f64 {
    points
        .iter()
        .enumerate()
        .map(|(t, x)| parities.sign(n, t as Subset) * x.iter().product::<f64>())
        .sum()
}

/// `J` of the parallelotope with base point `p` and edge vectors `edges`.
pub fn alternating_vertex_product(p: &[f64], edges: &[Vec<f64>]) -> Result<JValue> {
    let n = edges.len();
    if n > MAX_SUBSET_DIM {
        return Err(Error::TooLarge {
            what: "alternating vertex product",
            got: n,
            limit: MAX_SUBSET_DIM,
        });
    }
    let points = parallelotope_vertices(p, edges)?;
    let parities = VertexParities::from_points(&points)?;
    Ok(JValue {
        value: signed_sum(&points, &parities, n),
        base_subset: parities.base,
    })
}

pub fn invariant_j(b: &OrientedBox) -> Result<JValue> {
    alternating_vertex_product(&b.base_point(), &b.edge_vectors())
}

/// Same sum with an arbitrary vertex promoted to base. Differs from
/// [`invariant_j`] by a sign only.
pub fn invariant_j_with_base(b: &OrientedBox, base: Subset) -> Result<f64> {
    let n = b.dim();
    let points = parallelotope_vertices(&b.base_point(), &b.edge_vectors())?;
    let parity = (0..points.len() as Subset)
        .map(|t| ((t ^ base).count_ones() % 2) as u8)
        .collect();
    Ok(signed_sum(&points, &VertexParities { base, parity }, n))
}

pub fn edge_matrix(b: &OrientedBox) -> SquareMatrix<f64> {
    let rows = b.edge_vectors();
    SquareMatrix::from_fn(b.dim(), |j, k| rows[j][k])
}

/// `perm(V)` with rows `v_j = a_j U e_j`.
pub fn j_via_permanent(b: &OrientedBox) -> Result<f64> {
    permanent(&edge_matrix(b))
}

/// `1 / (2^{n+2} n!)`.
pub fn paper_eps(n: usize) -> f64 {
    1.0 / ((1u64 << (n + 2)) as f64 * factorial(n) as f64)
}

/// `(n! + n - 1) ε (1+ε)^{n-1}`: the relative deviation of `perm(V)` from
/// the volume allowed by an `ε`-rotation, before coarsening to `2^n n! ε`.
pub fn chain_factor(n: usize, eps: f64) -> f64 {
    (factorial(n) as f64 + n as f64 - 1.0) * eps * (1.0 + eps).powi(n as i32 - 1)
}

/// Largest `ε` with `chain_factor(n, ε) ≤ 1/4`, by bisection to `1e-12`.
pub fn sharp_eps(n: usize) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if chain_factor(n, mid) <= 0.25 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub n: usize,
    pub eps: f64,
    pub edges: Vec<f64>,
    pub rotation_distance: f64,
    pub volume: f64,
    pub permanent: f64,
    pub j: f64,
    /// `|perm(V) - vol|`
    pub deviation: f64,
    /// `vol / 4`
    pub bound: f64,
    pub slack: f64,
    /// `|Π v_jj - vol|` against `n ε (1+ε)^{n-1} vol`
    pub diagonal_deviation: f64,
    pub diagonal_bound: f64,
    /// `Σ_{σ≠id} |Π v_{j,σ(j)}|` against `(n!-1) ε (1+ε)^{n-1} vol`
    pub off_diagonal_mass: f64,
    pub off_diagonal_bound: f64,
    /// `2^n n! ε vol`
    pub coarse_bound: f64,
    /// `|J| ∈ (3/4, 5/4)`; only evaluated for unit-volume boxes.
    pub j_in_interval: Option<bool>,
    pub pass: bool,
}

/// Checks the near-identity bound `|perm(V) - vol| ≤ vol/4` term by term.
///
/// `eps` may be anything up to [`sharp_eps`]; the box rotation must be
/// strictly closer than `eps` to the identity.
pub fn perturbation_bound_check(b: &OrientedBox, eps: f64) -> Result<PerturbationReport> {
    let n = b.dim();
    let admissible = sharp_eps(n);
    if !(eps > 0.0 && eps <= admissible) {
        return Err(Error::InvalidEps {
            eps,
            lo: 0.0,
            hi: admissible,
        });
    }
    let dist = op_norm_dist_identity(b.rotation());
    if dist >= eps {
        return Err(Error::Precondition(format!(
            "rotation at operator-norm distance {dist} is not within eps = {eps}"
        )));
    }
    let volume = b.volume();
    let v = edge_matrix(b);
    let perm = permanent(&v)?;
    let j = invariant_j(b)?.value;
    let diag: f64 = (0..n).map(|i| *v.get(i, i)).product();
    let abs_perm = permanent(&v.map(|x| x.abs()))?;
    let off_diagonal_mass = (abs_perm - diag.abs()).max(0.0);
    let growth = eps * (1.0 + eps).powi(n as i32 - 1) * volume;
    let diagonal_bound = n as f64 * growth;
    let off_diagonal_bound = (factorial(n) as f64 - 1.0) * growth;
    let deviation = (perm - volume).abs();
    let bound = volume / 4.0;
    let diagonal_deviation = (diag - volume).abs();
    // rounding allowance on the measured quantities
    let fuzz = 1e-12 * volume.max(abs_perm);
    let j_in_interval = ((volume - 1.0).abs() <= 1e-12).then(|| j.abs() > 0.75 && j.abs() < 1.25);
    let pass = deviation <= bound
        && diagonal_deviation <= diagonal_bound + fuzz
        && off_diagonal_mass <= off_diagonal_bound + fuzz
        && j_in_interval != Some(false);
    Ok(PerturbationReport {
        n,
        eps,
        edges: b.aligned().edges().to_vec(),
        rotation_distance: dist,
        volume,
        permanent: perm,
        j,
        deviation,
        bound,
        slack: bound - deviation,
        diagonal_deviation,
        diagonal_bound,
        off_diagonal_mass,
        off_diagonal_bound,
        coarse_bound: (1u64 << n) as f64 * factorial(n) as f64 * eps * volume,
        j_in_interval,
        pass,
    })
}

/// `J` of the parallelogram `z, z+a, z+a+v, z+v` (one side horizontal).
/// Its absolute value is `a·|Im v|` for every `z`.
pub fn horizontal_parallelogram_j(z: ComplexPoint, a: f64, v: ComplexPoint) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Precondition(format!(
            "side length must be positive, got {a}"
        )));
    }
    let edges = vec![vec![a, 0.0], vec![v.re, v.im]];
    Ok(alternating_vertex_product(&[z.re, z.im], &edges)?.value)
}
