//! Points, rotations and rectangular boxes.
//!
//! A box is stored as an axis-aligned box `q + [0,a_1]×…×[0,a_n]` together
//! with a rotation `U` about the origin, so its vertices are
//! `U q + Σ_{j∈T} a_j U e_j` for subsets `T ⊆ {1,…,n}`. Subsets are encoded
//! as bitmasks: bit `j-1` set means `j ∈ T`.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Complex64;

/// Complex coordinate of a plane point.
pub type ComplexPoint = Complex64;

/// Vertex subset as a bitmask over edge indices.
pub type Subset = u32;

/// Largest dimension for which the `2^n` vertices are enumerated.
pub const MAX_VERTEX_DIM: usize = 24;

/// Tolerance for orthonormality and unit determinant of rotation matrices.
pub const ROTATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealVec(Vec<f64>);

impl RealVec {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for RealVec {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn check_complex(z: ComplexPoint) -> Result<ComplexPoint> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite)
    }
}

/// A special orthogonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    /// Validates orthonormal columns and `det = +1`, both within [`ROTATION_TOL`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidRotation(format!(
                "expected a nonempty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = matrix.nrows();
        let gram = matrix.transpose() * &matrix;
        let dev = (gram - DMatrix::<f64>::identity(n, n)).amax();
        if dev > ROTATION_TOL {
            return Err(Error::InvalidRotation(format!(
                "columns not orthonormal (deviation {dev:e})"
            )));
        }
        let det = matrix.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidRotation(format!("determinant {det} != 1")));
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidRotation(
                "rows must form a square matrix".into(),
            ));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Counterclockwise planar rotation by `theta`.
    pub fn planar(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        }
    }

    /// Rotation of R^3 represented by the quaternion `w + xi + yj + zk`.
    /// The quaternion is normalized first.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|v| v / norm);
        #[rustfmt::skip]
        let m = [
            1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z),       2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),       1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),       2.0 * (y * z + w * x),       1.0 - 2.0 * (x * x + y * y),
        ];
        Self {
            matrix: DMatrix::from_row_slice(3, 3, &m),
        }
    }

    /// Unit quaternion `[w, x, y, z]` with `w >= 0` (Shepperd's method).
    /// Only meaningful for `n = 3`.
    pub fn to_quaternion(&self) -> [f64; 4] {
        let m = &self.matrix;
        let (m00, m11, m22) = (m[(0, 0)], m[(1, 1)], m[(2, 2)]);
        let trace = m00 + m11 + m22;
        let q = if trace >= m00 && trace >= m11 && trace >= m22 {
            let s = (1.0 + trace).sqrt() * 2.0;
            [
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            ]
        } else if m00 >= m11 && m00 >= m22 {
            let s = (1.0 + m00 - m11 - m22).sqrt() * 2.0;
            [
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            ]
        } else if m11 >= m22 {
            let s = (1.0 + m11 - m00 - m22).sqrt() * 2.0;
            [
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            ]
        } else {
            let s = (1.0 + m22 - m00 - m11).sqrt() * 2.0;
            [
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            ]
        };
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
        q.map(|v| sign * v / norm)
    }

    /// Counterclockwise angle of a planar rotation, in `(-π, π]`.
    pub fn planar_angle(&self) -> f64 {
        self.matrix[(1, 0)].atan2(self.matrix[(0, 0)])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)]).collect())
            .collect()
    }

    /// `U x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * x[j]).sum())
            .collect()
    }

    /// `U⁻¹ x = Uᵀ x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(j, i)] * x[j]).sum())
            .collect()
    }

    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Rotation) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }
}

/// `q + [0,a_1]×…×[0,a_n]` with every `a_j > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignedBox {
    base: RealVec,
    edges: Vec<f64>,
}

impl AlignedBox {
    pub fn new(base: RealVec, edges: Vec<f64>) -> Result<Self> {
        if base.dim() != edges.len() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: edges.len(),
            });
        }
        if base.dim() == 0 {
            return Err(Error::Precondition(
                "box dimension must be at least 1".into(),
            ));
        }
        for (index, &length) in edges.iter().enumerate() {
            if !length.is_finite() {
                return Err(Error::NonFinite);
            }
            if length <= 0.0 {
                return Err(Error::DegenerateBox { index, length });
            }
        }
        Ok(Self { base, edges })
    }

    pub fn base(&self) -> &RealVec {
        &self.base
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn volume(&self) -> f64 {
        self.edges.iter().product()
    }
}

/// The image `U·R₀` of an aligned box under a rotation about the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedBox {
    aligned: AlignedBox,
    rotation: Rotation,
}

impl OrientedBox {
    pub fn new(aligned: AlignedBox, rotation: Rotation) -> Result<Self> {
        if aligned.dim() != rotation.dim() {
            return Err(Error::DimensionMismatch {
                expected: aligned.dim(),
                got: rotation.dim(),
            });
        }
        Ok(Self { aligned, rotation })
    }

    pub fn axis_aligned(base: Vec<f64>, edges: Vec<f64>) -> Result<Self> {
        let n = edges.len();
        Self::new(
            AlignedBox::new(RealVec::new(base)?, edges)?,
            Rotation::identity(n),
        )
    }

    pub fn aligned(&self) -> &AlignedBox {
        &self.aligned
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    pub fn dim(&self) -> usize {
        self.aligned.dim()
    }

    pub fn volume(&self) -> f64 {
        self.aligned.volume()
    }

    /// `p = U q`.
    pub fn base_point(&self) -> Vec<f64> {
        self.rotation.apply(self.aligned.base.as_slice())
    }

    /// Rows `v_j = a_j U e_j`.
    pub fn edge_vectors(&self) -> Vec<Vec<f64>> {
        let m = self.rotation.matrix();
        let n = self.dim();
        self.aligned
            .edges
            .iter()
            .enumerate()
            .map(|(j, &a)| (0..n).map(|k| a * m[(k, j)]).collect())
            .collect()
    }

    /// Same box seen through `V⁻¹`, i.e. the box `V⁻¹·R`.
    pub fn rotated_back(&self, v: &Rotation) -> Self {
        Self {
            aligned: self.aligned.clone(),
            rotation: v.inverse().compose(&self.rotation),
        }
    }
}

/// Vertices `p + Σ_{j∈T} v_j` of the parallelotope spanned by `edges` at `p`,
/// indexed by subset mask.
pub fn parallelotope_vertices(p: &[f64], edges: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = edges.len();
    if n > MAX_VERTEX_DIM {
        return Err(Error::TooLarge {
            what: "vertex enumeration",
            got: n,
            limit: MAX_VERTEX_DIM,
        });
    }
    let dim = p.len();
    Ok((0..1u32 << n)
        .map(|mask| {
            let mut x = p.to_vec();
            for (j, e) in edges.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    for k in 0..dim {
                        x[k] += e[k];
                    }
                }
            }
            x
        })
        .collect())
}

/// All `2^n` vertices of the box paired with their subset masks.
pub fn box_vertices(b: &OrientedBox) -> Result<Vec<(Subset, Vec<f64>)>> {
    let points = parallelotope_vertices(&b.base_point(), &b.edge_vectors())?;
    Ok(points
        .into_iter()
        .enumerate()
        .map(|(mask, x)| (mask as Subset, x))
        .collect())
}

/// Index of the lexicographically smallest point. Exact comparison, no tolerance.
pub fn lex_min_index<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let mut best = 0;
    let mut tie = false;
    for i in 1..points.len() {
        match lex_cmp(points[i].as_ref(), points[best].as_ref()) {
            Ordering::Less => {
                best = i;
                tie = false;
            }
            Ordering::Equal => tie = true,
            Ordering::Greater => {}
        }
    }
    if tie {
        return Err(Error::LexicographicTie);
    }
    Ok(best)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Parity of each vertex relative to the lexicographically smallest one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexParities {
    pub base: Subset,
    /// `parity[T] = |T Δ base| mod 2`.
    pub parity: Vec<u8>,
}

impl VertexParities {
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let base = lex_min_index(points)? as Subset;
        let parity = (0..points.len() as Subset)
            .map(|t| ((t ^ base).count_ones() % 2) as u8)
            .collect();
        Ok(Self { base, parity })
    }

    /// `(-1)^{n - par(T)}`.
    pub fn sign(&self, n: usize, t: Subset) -> f64 {
        if (n + self.parity[t as usize] as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

pub fn vertex_parities(b: &OrientedBox) -> Result<VertexParities> {
    let vertices = box_vertices(b)?;
    let points: Vec<&[f64]> = vertices.iter().map(|(_, x)| x.as_slice()).collect();
    VertexParities::from_points(&points)
}

/// Largest singular value of `U - I`.
pub fn op_norm_dist_identity(u: &Rotation) -> f64 {
    let n = u.dim();
    let diff = u.matrix() - DMatrix::<f64>::identity(n, n);
    diff.singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sorted(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        pts.sort_by(|a, b| lex_cmp(a, b));
        pts
    }

    fn close(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
        a.iter()
            .zip(b)
            .all(|(x, y)| x.iter().zip(y).all(|(u, v)| (u - v).abs() < 1e-12))
    }

    #[test]
    fn unit_square_vertices() {
        let b = OrientedBox::axis_aligned(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let v = box_vertices(&b).unwrap();
        let pts: Vec<_> = v.iter().map(|(_, x)| x.clone()).collect();
        assert_eq!(
            pts,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0]
            ]
        );
    }

    #[test]
    fn offset_box_vertices() {
        let b = OrientedBox::axis_aligned(vec![1.0, 1.0], vec![2.0, 0.5]).unwrap();
        let pts: Vec<_> = box_vertices(&b)
            .unwrap()
            .into_iter()
            .map(|(_, x)| x)
            .collect();
        assert_eq!(
            pts,
            vec![
                vec![1.0, 1.0],
                vec![3.0, 1.0],
                vec![1.0, 1.5],
                vec![3.0, 1.5]
            ]
        );
    }

    #[test]
    fn quarter_turn_vertices() {
        let aligned = AlignedBox::new(RealVec::zeros(2), vec![1.0, 1.0]).unwrap();
        let b = OrientedBox::new(aligned, Rotation::planar(FRAC_PI_2)).unwrap();
        let pts: Vec<_> = box_vertices(&b)
            .unwrap()
            .into_iter()
            .map(|(_, x)| x)
            .collect();
        let expected = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![-1.0, 1.0],
        ];
        assert!(close(&pts, &expected));
        assert!(close(&sorted(pts), &sorted(expected)));
    }

    #[test]
    fn parities_axis_aligned_square() {
        let b = OrientedBox::axis_aligned(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let p = vertex_parities(&b).unwrap();
        assert_eq!(p.base, 0);
        assert_eq!(p.parity, vec![0, 1, 1, 0]);
    }

    #[test]
    fn parities_quarter_turn_square() {
        let aligned = AlignedBox::new(RealVec::zeros(2), vec![1.0, 1.0]).unwrap();
        let b = OrientedBox::new(aligned, Rotation::planar(FRAC_PI_2)).unwrap();
        let p = vertex_parities(&b).unwrap();
        // base vertex (-1, 0) is reached along the second edge
        let base_point = &box_vertices(&b).unwrap()[p.base as usize].1;
        assert!((base_point[0] + 1.0).abs() < 1e-12 && base_point[1].abs() < 1e-12);
        assert_eq!(p.base, 0b10);
        assert_eq!(p.parity[0b01], 0);
        assert_eq!(p.parity[0b00], 1);
        assert_eq!(p.parity[0b11], 1);
        assert_eq!(p.parity[0b10], 0);
    }

    #[test]
    fn cube_parities_balanced() {
        let b = OrientedBox::axis_aligned(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let p = vertex_parities(&b).unwrap();
        assert_eq!(p.parity.iter().filter(|&&x| x == 0).count(), 4);
    }

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm_dist_identity(&Rotation::identity(3)), 0.0);
        assert!((op_norm_dist_identity(&Rotation::planar(PI)) - 2.0).abs() < 1e-12);
        let phi = 0.7_f64;
        let u = Rotation::from_quaternion([(phi / 2.0).cos(), 0.0, (phi / 2.0).sin(), 0.0]);
        assert!((op_norm_dist_identity(&u) - 2.0 * (phi / 2.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            AlignedBox::new(RealVec::zeros(2), vec![1.0, 0.0]),
            Err(Error::DegenerateBox { index: 1, .. })
        ));
        assert!(RealVec::new(vec![f64::NAN]).is_err());
        let reflection = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Rotation::new(reflection).is_err());
        let scaled = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert!(Rotation::new(scaled).is_err());
        let edges = vec![vec![0.0; 25]; 25];
        assert!(matches!(
            parallelotope_vertices(&[0.0; 25], &edges),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn quaternion_round_trip() {
        let q = [0.3, -0.5, 0.1, 0.8];
        let norm = q.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
        let u = Rotation::from_quaternion(q);
        assert!(Rotation::new(u.matrix().clone()).is_ok());
        let back = u.to_quaternion();
        for (a, b) in back.iter().zip(q.iter()) {
            assert!((a - b / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn lex_tie_is_an_error() {
        let pts = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(lex_min_index(&pts), Err(Error::LexicographicTie)));
    }
}
