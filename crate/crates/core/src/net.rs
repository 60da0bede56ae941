//! Finite ε-nets of SO(2) and SO(3) with constant-time covering lookup.
//!
//! The planar net is the angle grid `θ_i = 2πi/m` with `m = ⌈π / asin(ε/2)⌉`.
//!
//! The spatial net lives on unit quaternions modulo sign. A quaternion is
//! assigned to the face of the 4-cube given by its largest coordinate (sign
//! normalized so that coordinate is positive), and the remaining three
//! coordinates divided by it land in `[-1, 1]^3`, which is cut into `N^3`
//! cubes. The representative of a cell is its normalized centre. Members are
//! computed from their index on demand; nothing is stored.
//!
//! In these gnomonic coordinates the arc length on `S^3` never exceeds the
//! Euclidean length, so every point of a cell is within quaternion angle
//! `√3/N` of the centre. The relative rotation then has operator-norm
//! distance `2 sin(angle)`, and `N` is chosen so that this stays below `ε`
//! with a 10% margin.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::box_invariant::{paper_eps, sharp_eps};
use crate::error::{Error, Result};
use crate::geometry::{Rotation, MAX_VERTEX_DIM};
use crate::rng::{seeded, trial_rng};

/// Safety factor folded into the SO(3) grid resolution.
pub const GRID_MARGIN: f64 = 1.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsMode {
    /// `ε = 1/(2^{n+2} n!)`
    Paper,
    /// Largest `ε` admitted by the un-coarsened perturbation chain.
    Sharp,
    Custom,
}

impl std::str::FromStr for EpsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(EpsMode::Paper),
            "sharp" => Ok(EpsMode::Sharp),
            other => Err(Error::Parse(format!(
                "unknown eps mode {other:?} (paper|sharp)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NetSpec {
    pub n: usize,
    pub eps: f64,
    pub mode: EpsMode,
}

impl NetSpec {
    pub fn paper(n: usize) -> Self {
        Self {
            n,
            eps: paper_eps(n),
            mode: EpsMode::Paper,
        }
    }

    pub fn sharp(n: usize) -> Self {
        Self {
            n,
            eps: sharp_eps(n),
            mode: EpsMode::Sharp,
        }
    }

    pub fn custom(n: usize, eps: f64) -> Self {
        Self {
            n,
            eps,
            mode: EpsMode::Custom,
        }
    }

    pub fn with_mode(n: usize, mode: EpsMode) -> Self {
        match mode {
            EpsMode::Sharp => Self::sharp(n),
            _ => Self::paper(n),
        }
    }

    /// Whether `ε` is small enough for the near-identity bound on `J`.
    pub fn is_certified(&self) -> bool {
        self.eps <= sharp_eps(self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Layout {
    Circle { m: u64 },
    QuaternionCells { per_axis: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationNet {
    spec: NetSpec,
    size: u64,
    layout: Layout,
}

pub fn build_net(spec: NetSpec) -> Result<RotationNet> {
    if !(spec.n == 2 || spec.n == 3) {
        return Err(Error::UnsupportedDimension(spec.n));
    }
    if !(spec.eps > 0.0 && spec.eps <= 2.0) {
        return Err(Error::InvalidEps {
            eps: spec.eps,
            lo: 0.0,
            hi: 2.0,
        });
    }
    let half_angle = (spec.eps / 2.0).asin();
    let (size, layout) = if spec.n == 2 {
        let m = ((PI / half_angle).ceil() as u64).max(1);
        (m, Layout::Circle { m })
    } else {
        let per_axis = ((GRID_MARGIN * 3f64.sqrt() / half_angle).ceil() as u64).max(1);
        (4 * per_axis.pow(3), Layout::QuaternionCells { per_axis })
    };
    Ok(RotationNet { spec, size, layout })
}

/// `q̄ · p` for quaternions `[w, x, y, z]`.
fn relative(q: &[f64; 4], p: &[f64; 4]) -> [f64; 4] {
    let [a1, b1, c1, d1] = [q[0], -q[1], -q[2], -q[3]];
    let [a2, b2, c2, d2] = *p;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

/// Operator-norm distance between the rotations of two unit quaternions.
pub fn quaternion_distance(q: &[f64; 4], p: &[f64; 4]) -> f64 {
    let r = relative(q, p);
    2.0 * (r[1] * r[1] + r[2] * r[2] + r[3] * r[3]).sqrt()
}

/// Operator-norm distance between planar rotations by `a` and `b`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    2.0 * ((a - b) / 2.0).sin().abs()
}

fn normalize(q: [f64; 4]) -> [f64; 4] {
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.map(|v| v / norm)
}

impl RotationNet {
    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn eps(&self) -> f64 {
        self.spec.eps
    }

    /// Number of members `m`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Grid resolution: `m` for the circle, cells per axis for SO(3).
    pub fn resolution(&self) -> u64 {
        match self.layout {
            Layout::Circle { m } => m,
            Layout::QuaternionCells { per_axis } => per_axis,
        }
    }

    fn angle(&self, i: u64) -> f64 {
        2.0 * PI * i as f64 / self.size as f64
    }

    /// Unit quaternion of member `i` (SO(3) nets only).
    pub fn member_quaternion(&self, i: u64) -> [f64; 4] {
        let Layout::QuaternionCells { per_axis } = self.layout else {
            panic!("member_quaternion called on a planar net");
        };
        let face = (i / per_axis.pow(3)) as usize;
        let mut cell = i % per_axis.pow(3);
        let mut ys = [0.0; 3];
        for y in ys.iter_mut().rev() {
            let c = cell % per_axis;
            cell /= per_axis;
            *y = -1.0 + (2 * c + 1) as f64 / per_axis as f64;
        }
        self.chart_point(face, ys)
    }

    fn chart_point(&self, face: usize, ys: [f64; 3]) -> [f64; 4] {
        let mut q = [0.0; 4];
        q[face] = 1.0;
        let mut it = ys.iter();
        for (c, slot) in q.iter_mut().enumerate() {
            if c != face {
                *slot = *it.next().unwrap();
            }
        }
        normalize(q)
    }

    pub fn member(&self, i: u64) -> Rotation {
        match self.layout {
            Layout::Circle { .. } => Rotation::planar(self.angle(i)),
            Layout::QuaternionCells { .. } => Rotation::from_quaternion(self.member_quaternion(i)),
        }
    }

    fn locate_quaternion(&self, q: [f64; 4], per_axis: u64) -> u64 {
        let mut face = 0;
        for c in 1..4 {
            if q[c].abs() > q[face].abs() {
                face = c;
            }
        }
        let lead = q[face];
        let mut idx = face as u64;
        for (c, &v) in q.iter().enumerate() {
            if c != face {
                let y = v / lead;
                let cell = (((y + 1.0) / 2.0) * per_axis as f64).floor();
                let cell = cell.clamp(0.0, per_axis as f64 - 1.0) as u64;
                idx = idx * per_axis + cell;
            }
        }
        idx
    }

    /// Index of the covering member and its distance to `u`, without
    /// checking the bound.
    pub fn locate(&self, u: &Rotation) -> (u64, f64) {
        match self.layout {
            Layout::Circle { m } => {
                let theta = u.planar_angle();
                let step = 2.0 * PI / m as f64;
                let i = ((theta / step).round() as i64).rem_euclid(m as i64) as u64;
                (i, angle_distance(theta, self.angle(i)))
            }
            Layout::QuaternionCells { per_axis } => {
                let q = u.to_quaternion();
                let i = self.locate_quaternion(q, per_axis);
                (i, quaternion_distance(&self.member_quaternion(i), &q))
            }
        }
    }

    /// Index `i` with `‖U_i⁻¹U - I‖_op < ε`.
    pub fn lookup(&self, u: &Rotation) -> Result<u64> {
        if u.dim() != self.spec.n {
            return Err(Error::DimensionMismatch {
                expected: self.spec.n,
                got: u.dim(),
            });
        }
        let (index, distance) = self.locate(u);
        if distance >= self.spec.eps {
            return Err(Error::CoverageViolation {
                index,
                distance,
                eps: self.spec.eps,
            });
        }
        Ok(index)
    }

    /// Largest distance from a cell representative to the corners of its
    /// cell, over every `stride`-th cell (SO(3)); half the angular spacing
    /// for SO(2).
    pub fn worst_corner_distance(&self, stride: u64) -> f64 {
        match self.layout {
            Layout::Circle { m } => angle_distance(PI / m as f64, 0.0),
            Layout::QuaternionCells { per_axis } => {
                let stride = stride.max(1);
                let cells = per_axis.pow(3);
                let count = cells.div_ceil(stride);
                (0..count)
                    .into_par_iter()
                    .map(|k| {
                        let i = k * stride;
                        let centre = self.member_quaternion(i);
                        let (c0, c1, c2) = (
                            i / (per_axis * per_axis),
                            (i / per_axis) % per_axis,
                            i % per_axis,
                        );
                        let edge = |c: u64, hi: u64| -1.0 + 2.0 * (c + hi) as f64 / per_axis as f64;
                        let mut worst = 0.0_f64;
                        for corner in 0..8u64 {
                            let ys = [
                                edge(c0, corner & 1),
                                edge(c1, (corner >> 1) & 1),
                                edge(c2, (corner >> 2) & 1),
                            ];
                            let q = self.chart_point(0, ys);
                            worst = worst.max(quaternion_distance(&centre, &q));
                        }
                        worst
                    })
                    .reduce(|| 0.0, f64::max)
            }
        }
    }
}

pub fn haar_rotation_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Rotation> {
    match n {
        2 => Ok(Rotation::planar(rng.random_range(-PI..PI))),
        3 => {
            let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
            Ok(Rotation::from_quaternion(q))
        }
        4..=MAX_VERTEX_DIM => {
            // QR of a Gaussian matrix with the sign of diag(R) folded into Q
            let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
            let (q, r) = g.qr().unpack();
            let mut q = DMatrix::from_fn(n, n, |i, j| q[(i, j)] * r[(j, j)].signum());
            if q.determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            Rotation::new(q)
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// Haar-distributed rotation, reproducible for a given seed.
pub fn haar_random_rotation(n: usize, seed: u64) -> Result<Rotation> {
    haar_rotation_with(&mut seeded(seed), n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub n: usize,
    pub eps: f64,
    pub mode: EpsMode,
    pub m: u64,
    pub samples: u64,
    pub failures: u64,
    pub worst_distance: f64,
    /// Mean of `‖U - I‖_op` over the sample.
    pub mean_identity_distance: f64,
    pub worst_corner_distance: f64,
}

/// Samples Haar rotations, looks each one up and records the worst distance.
pub fn certify_coverage(
    net: &RotationNet,
    samples: u64,
    seed: u64,
    corner_stride: u64,
) -> CoverageReport {
    let n = net.n();
    let (failures, worst, sum) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = haar_rotation_with(&mut trial_rng(seed, i), n).expect("supported dimension");
            let (_, d) = net.locate(&u);
            let to_identity = match n {
                2 => angle_distance(u.planar_angle(), 0.0),
                _ => quaternion_distance(&[1.0, 0.0, 0.0, 0.0], &u.to_quaternion()),
            };
            (u64::from(d >= net.eps()), d, to_identity)
        })
        .reduce(
            || (0, 0.0, 0.0),
            |a, b| (a.0 + b.0, a.1.max(b.1), a.2 + b.2),
        );
    CoverageReport {
        n,
        eps: net.eps(),
        mode: net.spec().mode,
        m: net.size(),
        samples,
        failures,
        worst_distance: worst,
        mean_identity_distance: if samples == 0 {
            0.0
        } else {
            sum / samples as f64
        },
        worst_corner_distance: net.worst_corner_distance(corner_stride),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::op_norm_dist_identity;

    #[test]
    fn planar_sizes() {
        assert_eq!(build_net(NetSpec::paper(2)).unwrap().size(), 202);
        assert_eq!(build_net(NetSpec::custom(2, 2.0)).unwrap().size(), 2);
    }

    #[test]
    fn sharp_net_is_much_smaller_in_3d() {
        let paper = build_net(NetSpec::paper(3)).unwrap();
        let sharp = build_net(NetSpec::sharp(3)).unwrap();
        assert!(
            paper.size() >= 100 * sharp.size(),
            "{} vs {}",
            paper.size(),
            sharp.size()
        );
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            build_net(NetSpec::paper(4)),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(build_net(NetSpec::custom(2, 0.0)).is_err());
        assert!(build_net(NetSpec::custom(3, 2.5)).is_err());
    }

    #[test]
    fn members_look_up_to_themselves() {
        let net = build_net(NetSpec::paper(2)).unwrap();
        for i in 0..net.size() {
            assert_eq!(net.lookup(&net.member(i)).unwrap(), i);
        }
        let net = build_net(NetSpec::custom(3, 0.3)).unwrap();
        for i in (0..net.size()).step_by(7) {
            let (j, d) = net.locate(&net.member(i));
            assert_eq!(j, i);
            assert!(d < 1e-7);
        }
    }

    #[test]
    fn between_grid_angles_rounds_to_nearest() {
        let net = build_net(NetSpec::paper(2)).unwrap();
        let step = 2.0 * PI / 202.0;
        assert_eq!(net.lookup(&Rotation::planar(5.3 * step)).unwrap(), 5);
        assert_eq!(net.lookup(&Rotation::planar(5.7 * step)).unwrap(), 6);
        assert_eq!(net.lookup(&Rotation::planar(-0.2 * step)).unwrap(), 0);
        assert_eq!(net.lookup(&Rotation::planar(-1.2 * step)).unwrap(), 201);
    }

    #[test]
    fn fast_distance_matches_svd() {
        for (k, spec) in [NetSpec::paper(2), NetSpec::custom(3, 0.2)]
            .into_iter()
            .enumerate()
        {
            let net = build_net(spec).unwrap();
            for s in 0..200 {
                let u = haar_random_rotation(spec.n, 1000 * k as u64 + s).unwrap();
                let (i, d) = net.locate(&u);
                let rel = net.member(i).inverse().compose(&u);
                assert!((op_norm_dist_identity(&rel) - d).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn corner_distances_below_eps() {
        let net = build_net(NetSpec::custom(3, 0.1)).unwrap();
        let worst = net.worst_corner_distance(1);
        assert!(worst < net.eps(), "{worst}");
        let planar = build_net(NetSpec::paper(2)).unwrap();
        assert!(planar.worst_corner_distance(1) < planar.eps());
    }

    #[test]
    fn net_size_monotone_in_eps() {
        for n in [2, 3] {
            let mut last = 0;
            for k in (1..=40).rev() {
                let m = build_net(NetSpec::custom(n, 0.05 * k as f64 / 2.0))
                    .unwrap()
                    .size();
                assert!(m >= last);
                last = m;
            }
        }
    }

    #[test]
    fn haar_is_reproducible_and_valid() {
        for n in [2, 3, 4, 6] {
            let a = haar_random_rotation(n, 99).unwrap();
            assert_eq!(a, haar_random_rotation(n, 99).unwrap());
            assert!(Rotation::new(a.matrix().clone()).is_ok());
        }
        assert!(haar_random_rotation(1, 0).is_err());
        assert!(haar_random_rotation(25, 0).is_err());
    }
}
