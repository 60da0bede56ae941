//! Random configurations with the area/volume/modulus product pinned to 1.
//!
//! Every configuration is decoded from a flat parameter vector so that the
//! adversarial search can perturb it without leaving the hypothesis.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geometry::{AlignedBox, ComplexPoint, OrientedBox, RealVec, Rotation};
use crate::plane::{Parallelogram, Skeleton};
use crate::rng::{seeded, TrialRng};

/// Resample attempts before a skeleton generator gives up.
pub const SKELETON_RESAMPLE_BUDGET: usize = 1000;
/// Minimum pairwise distance between skeleton points.
pub const SKELETON_SEPARATION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Rect2d,
    Parallelogram2d,
    BoxNd,
    Skeleton,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect2d" => Ok(Mode::Rect2d),
            "parallelogram2d" => Ok(Mode::Parallelogram2d),
            "box-nd" | "box" => Ok(Mode::BoxNd),
            "skeleton" => Ok(Mode::Skeleton),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranges {
    /// Log-uniform range for side lengths (or moduli) before renormalization.
    pub aspect: (f64, f64),
    /// Uniform range for each coordinate of the placement point.
    pub center: (f64, f64),
}

impl Default for Ranges {
    fn default() -> Self {
        Self {
            aspect: (1e-3, 1e3),
            center: (-10.0, 10.0),
        }
    }
}

impl Ranges {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.aspect;
        let (c0, c1) = self.center;
        if ![lo, hi, c0, c1].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::Precondition(format!(
                "aspect range [{lo}, {hi}] must satisfy 0 < lo <= hi"
            )));
        }
        if c0 > c1 {
            return Err(Error::Precondition(format!(
                "empty center range [{c0}, {c1}]"
            )));
        }
        Ok(())
    }

    fn log_aspect(&self) -> (f64, f64) {
        (self.aspect.0.ln(), self.aspect.1.ln())
    }
}

/// A point in the parameter space of one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub mode: Mode,
    pub n: usize,
    pub params: Vec<f64>,
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn rotation_params(n: usize) -> usize {
    match n {
        2 => 1,
        _ => 4,
    }
}

pub fn check_mode_dim(mode: Mode, n: usize) -> Result<()> {
    let ok = match mode {
        Mode::Rect2d | Mode::Parallelogram2d => n == 2,
        Mode::BoxNd => n == 2 || n == 3,
        Mode::Skeleton => (2..=8).contains(&n),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

impl State {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, mode: Mode, n: usize, ranges: &Ranges) -> Self {
        let la = ranges.log_aspect();
        let mut params = Vec::new();
        match mode {
            Mode::Rect2d => {
                params.extend([uniform(rng, ranges.center), uniform(rng, ranges.center)]);
                params.push(rng.random_range(0.0..2.0 * PI));
                params.push(uniform(rng, la));
            }
            Mode::Parallelogram2d => {
                params.extend([uniform(rng, ranges.center), uniform(rng, ranges.center)]);
                params.push(rng.random_range(0.0..2.0 * PI));
                params.push(rng.random_range(0.0..2.0 * PI));
                params.push(uniform(rng, la));
            }
            Mode::BoxNd => {
                params.extend((0..n).map(|_| uniform(rng, ranges.center)));
                if n == 2 {
                    params.push(rng.random_range(-PI..PI));
                } else {
                    params.extend((0..4).map(|_| -> f64 { StandardNormal.sample(rng) }));
                }
                params.extend((0..n).map(|_| uniform(rng, la)));
            }
            Mode::Skeleton => {
                params.extend([uniform(rng, ranges.center), uniform(rng, ranges.center)]);
                params.extend((0..n).map(|_| rng.random_range(0.0..2.0 * PI)));
                params.extend((0..n).map(|_| uniform(rng, la)));
            }
        }
        Self { mode, n, params }
    }

    /// Gaussian step in parameter space, clamped back into the ranges.
    pub fn perturb<R: Rng + ?Sized>(&self, rng: &mut R, ranges: &Ranges, scale: f64) -> Self {
        let (c0, c1) = ranges.center;
        let (l0, l1) = ranges.log_aspect();
        let pos = Normal::new(0.0, scale * (c1 - c0).max(1e-3) * 0.05).unwrap();
        let ang = Normal::new(0.0, scale * 0.1).unwrap();
        let log = Normal::new(0.0, scale * ((l1 - l0) * 0.05).max(1e-3)).unwrap();
        let n = self.n;
        let mut p = self.params.clone();
        let kinds: Vec<u8> = match self.mode {
            Mode::Rect2d => vec![0, 0, 1, 2],
            Mode::Parallelogram2d => vec![0, 0, 1, 1, 2],
            Mode::BoxNd => {
                let mut k = vec![0; n];
                k.extend(std::iter::repeat_n(1, rotation_params(n)));
                k.extend(std::iter::repeat_n(2, n));
                k
            }
            Mode::Skeleton => {
                let mut k = vec![0, 0];
                k.extend(std::iter::repeat_n(1, n));
                k.extend(std::iter::repeat_n(2, n));
                k
            }
        };
        for (v, kind) in p.iter_mut().zip(kinds) {
            match kind {
                0 => *v = (*v + pos.sample(rng)).clamp(c0, c1),
                1 => *v += ang.sample(rng),
                _ => *v = (*v + log.sample(rng)).clamp(l0, l1),
            }
        }
        Self {
            mode: self.mode,
            n,
            params: p,
        }
    }

    pub fn decode(&self) -> Result<Configuration> {
        let p = &self.params;
        let n = self.n;
        Ok(match self.mode {
            Mode::Rect2d => {
                let t = p[3].exp();
                let dir = ComplexPoint::from_polar(1.0, p[2]);
                Configuration::Rectangle(Parallelogram::new(
                    ComplexPoint::new(p[0], p[1]),
                    dir * t,
                    dir * ComplexPoint::i() / t,
                ))
            }
            Mode::Parallelogram2d => {
                let t = p[4].exp();
                Configuration::Parallelogram(Parallelogram::new(
                    ComplexPoint::new(p[0], p[1]),
                    ComplexPoint::from_polar(t, p[2]),
                    ComplexPoint::from_polar(1.0 / t, p[3]),
                ))
            }
            Mode::BoxNd => {
                let centre = &p[..n];
                let r = rotation_params(n);
                let rotation = if n == 2 {
                    Rotation::planar(p[n])
                } else {
                    Rotation::from_quaternion([p[n], p[n + 1], p[n + 2], p[n + 3]])
                };
                let edges = renormalized(&p[n + r..]);
                let back = rotation.apply_inverse(centre);
                let q: Vec<f64> = back.iter().zip(&edges).map(|(c, a)| c - a / 2.0).collect();
                Configuration::Box(OrientedBox::new(
                    AlignedBox::new(RealVec::new(q)?, edges)?,
                    rotation,
                )?)
            }
            Mode::Skeleton => {
                let moduli = renormalized(&p[2 + n..]);
                let u = moduli
                    .iter()
                    .zip(&p[2..2 + n])
                    .map(|(&a, &phi)| ComplexPoint::from_polar(a, phi))
                    .collect();
                Configuration::Skeleton(Skeleton {
                    z: ComplexPoint::new(p[0], p[1]),
                    u,
                })
            }
        })
    }
}

/// `exp(l_j - mean(l))`, whose product is 1 up to rounding.
fn renormalized(logs: &[f64]) -> Vec<f64> {
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    logs.iter().map(|l| (l - mean).exp()).collect()
}

fn well_separated(points: &[ComplexPoint]) -> bool {
    points.iter().enumerate().all(|(i, a)| {
        points[i + 1..]
            .iter()
            .all(|b| (a - b).norm() >= SKELETON_SEPARATION)
    })
}

/// Draws a configuration of `mode`, resampling skeletons until their points
/// are pairwise separated.
pub fn sample_configuration(
    rng: &mut TrialRng,
    mode: Mode,
    n: usize,
    ranges: &Ranges,
) -> Result<(State, Configuration)> {
    check_mode_dim(mode, n)?;
    for _ in 0..SKELETON_RESAMPLE_BUDGET {
        let state = State::sample(rng, mode, n, ranges);
        let cfg = state.decode()?;
        if let Configuration::Skeleton(s) = &cfg {
            if !well_separated(&s.vertices()) {
                continue;
            }
        }
        return Ok((state, cfg));
    }
    Err(Error::ResampleBudget(SKELETON_RESAMPLE_BUDGET))
}

pub fn gen_unit_area_rectangle(seed: u64, ranges: &Ranges) -> Result<Parallelogram> {
    match sample_configuration(&mut seeded(seed), Mode::Rect2d, 2, ranges)?.1 {
        Configuration::Rectangle(p) => Ok(p),
        _ => unreachable!(),
    }
}

/// Parallelogram with `|u||v| = 1` and independent side directions.
pub fn gen_unit_product_parallelogram(seed: u64, ranges: &Ranges) -> Result<Parallelogram> {
    match sample_configuration(&mut seeded(seed), Mode::Parallelogram2d, 2, ranges)?.1 {
        Configuration::Parallelogram(p) => Ok(p),
        _ => unreachable!(),
    }
}

pub fn gen_unit_volume_box(seed: u64, n: usize, ranges: &Ranges) -> Result<OrientedBox> {
    match sample_configuration(&mut seeded(seed), Mode::BoxNd, n, ranges)?.1 {
        Configuration::Box(b) => Ok(b),
        _ => unreachable!(),
    }
}

pub fn gen_unit_product_skeleton(seed: u64, n: usize, ranges: &Ranges) -> Result<Skeleton> {
    match sample_configuration(&mut seeded(seed), Mode::Skeleton, n, ranges)?.1 {
        Configuration::Skeleton(s) => Ok(s),
        _ => unreachable!(),
    }
}

/// Unit-volume box whose rotation satisfies `‖U - I‖_op < eps`
/// (`n ∈ {2, 3}`; the rotation angle is uniform below the bound).
pub fn gen_near_identity_box<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    eps: f64,
    ranges: &Ranges,
) -> Result<OrientedBox> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::InvalidEps {
            eps,
            lo: 0.0,
            hi: 2.0,
        });
    }
    let max_angle = 2.0 * (eps / 2.0).asin() * (1.0 - 1e-9);
    let angle = rng.random_range(0.0..max_angle);
    let rotation = match n {
        2 => Rotation::planar(if rng.random_bool(0.5) { angle } else { -angle }),
        3 => {
            let axis: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
            let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            let (s, c) = (angle / 2.0).sin_cos();
            Rotation::from_quaternion([
                c,
                s * axis[0] / norm,
                s * axis[1] / norm,
                s * axis[2] / norm,
            ])
        }
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let la = ranges.log_aspect();
    let logs: Vec<f64> = (0..n).map(|_| uniform(rng, la)).collect();
    let q: Vec<f64> = (0..n).map(|_| uniform(rng, ranges.center)).collect();
    OrientedBox::new(
        AlignedBox::new(RealVec::new(q)?, renormalized(&logs))?,
        rotation,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::op_norm_dist_identity;
    use crate::plane::invariant_i;

    #[test]
    fn unit_square_from_trivial_params() {
        let s = State {
            mode: Mode::Rect2d,
            n: 2,
            params: vec![0.0, 0.0, 0.0, 0.0],
        };
        let pts = s.decode().unwrap().points();
        assert_eq!(
            pts,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0]
            ]
        );
    }

    #[test]
    fn products_are_one() {
        let r = Ranges::default();
        for seed in 0..200 {
            let p = gen_unit_area_rectangle(seed, &r).unwrap();
            assert!((p.u.norm() * p.v.norm() - 1.0).abs() < 1e-12);
            assert!((invariant_i(&p).norm() - 2.0).abs() < 1e-9);
            let p = gen_unit_product_parallelogram(seed, &r).unwrap();
            assert!((p.u.norm() * p.v.norm() - 1.0).abs() < 1e-12);
            for n in [2, 3] {
                let b = gen_unit_volume_box(seed, n, &r).unwrap();
                assert!((b.volume() - 1.0).abs() < 1e-12);
            }
            let s = gen_unit_product_skeleton(seed, 4, &r).unwrap();
            assert!((s.modulus_product() - 1.0).abs() < 1e-12);
            assert!(well_separated(&s.vertices()));
        }
        assert_eq!(
            gen_unit_volume_box(3, 3, &r).unwrap(),
            gen_unit_volume_box(3, 3, &r).unwrap()
        );
    }

    #[test]
    fn box_is_centred() {
        let mut rng = seeded(1);
        let (state, cfg) =
            sample_configuration(&mut rng, Mode::BoxNd, 3, &Ranges::default()).unwrap();
        let pts = cfg.points();
        for k in 0..3 {
            let mean = pts.iter().map(|p| p[k]).sum::<f64>() / 8.0;
            assert!((mean - state.params[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn perturbation_stays_in_hypothesis() {
        let r = Ranges::default();
        let mut rng = seeded(9);
        for mode in [
            Mode::Rect2d,
            Mode::Parallelogram2d,
            Mode::BoxNd,
            Mode::Skeleton,
        ] {
            let n = if mode == Mode::Skeleton || mode == Mode::BoxNd {
                3
            } else {
                2
            };
            let mut s = State::sample(&mut rng, mode, n, &r);
            for _ in 0..100 {
                s = s.perturb(&mut rng, &r, 1.0);
                let m = s.decode().unwrap().measure().unwrap();
                assert!((m - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equal_moduli_and_dimension_limits() {
        let r = Ranges {
            aspect: (1.0, 1.0),
            center: (0.0, 0.0),
        };
        // equal moduli and random phases are fine
        assert!(gen_unit_product_skeleton(0, 3, &r).is_ok());
        assert!(check_mode_dim(Mode::Skeleton, 9).is_err());
        assert!(check_mode_dim(Mode::BoxNd, 4).is_err());
    }

    #[test]
    fn near_identity_boxes() {
        let mut rng = seeded(4);
        for n in [2, 3] {
            for _ in 0..100 {
                let b = gen_near_identity_box(&mut rng, n, 0.05, &Ranges::default()).unwrap();
                assert!(op_norm_dist_identity(b.rotation()) < 0.05);
                assert!((b.volume() - 1.0).abs() < 1e-12);
            }
        }
    }
}
