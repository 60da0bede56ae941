//! Slab classes and composite colors of R^n.
//!
//! A slab reading reduces the coordinate product `x_1⋯x_n` modulo `3/2` and
//! cuts the period into `3·2^n` half-open windows. A composite color is the
//! tuple of slab readings of `U_i⁻¹x` over every member `U_i` of a rotation
//! net. Tuples are never materialized: entries are produced on demand and
//! comparisons stop at the first disagreement.

use num::rational::BigRational;
use num::{BigInt, Integer, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{box_vertices, OrientedBox, Rotation};
use crate::net::RotationNet;
use crate::scalar::{floor_frac, from_f64, rat, to_f64};

/// Readings closer than this to a window boundary are treated as unreliable.
pub const MARGIN_FLOOR: f64 = 1e-9;

/// Beyond this magnitude the double-double product is replaced by exact
/// rational arithmetic.
const EXACT_THRESHOLD: f64 = 1125899906842624.0; // 2^50

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlabReading {
    pub index: u32,
    /// Distance from the reduced product to the nearest window boundary, in
    /// units of the period (a window has width `1/subdivisions`).
    pub margin: f64,
}

/// Partition of R^n by `x_1⋯x_n mod 3/2` into `subdivisions` windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slabs {
    subdivisions: u32,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Product of `xs` as an unevaluated sum `hi + lo`.
fn dd_product(xs: &[f64]) -> (f64, f64) {
    let (mut hi, mut lo) = (1.0_f64, 0.0_f64);
    for &x in xs {
        let p = hi * x;
        let e = hi.mul_add(x, -p);
        let (s, t) = two_sum(p, lo * x + e);
        hi = s;
        lo = t;
    }
    (hi, lo)
}

impl Slabs {
    /// The `3·2^n` windows used by the coloring of R^n.
    pub fn standard(n: usize) -> Self {
        Self {
            subdivisions: 3 << n,
        }
    }

    pub fn with_subdivisions(subdivisions: u32) -> Result<Self> {
        if subdivisions == 0 {
            return Err(Error::Precondition(
                "at least one slab window is required".into(),
            ));
        }
        Ok(Self { subdivisions })
    }

    pub fn subdivisions(&self) -> u32 {
        self.subdivisions
    }

    fn finish(&self, scaled: f64) -> SlabReading {
        let fl = scaled.floor();
        let index = (fl.max(0.0) as u32).min(self.subdivisions - 1);
        let frac = (scaled - fl).clamp(0.0, 1.0);
        SlabReading {
            index,
            margin: frac.min(1.0 - frac) / self.subdivisions as f64,
        }
    }

    pub fn read(&self, x: &[f64]) -> SlabReading {
        let (hi, lo) = dd_product(x);
        if !hi.is_finite() || hi.abs() > EXACT_THRESHOLD {
            return self.read_exact_doubles(x);
        }
        let mut t = hi % 1.5 + lo;
        if t < 0.0 {
            t += 1.5;
        }
        if t >= 1.5 {
            t -= 1.5;
        }
        // windows per unit of t
        let factor = self.subdivisions as f64 / 1.5;
        self.finish(t * factor)
    }

    fn read_exact_doubles(&self, x: &[f64]) -> SlabReading {
        let exact: Vec<BigRational> = x
            .iter()
            .map(|&v| from_f64(v).expect("finite coordinates"))
            .collect();
        self.read_exact(&exact)
    }

    /// Reading of an exactly given rational point.
    pub fn read_exact(&self, x: &[BigRational]) -> SlabReading {
        let prod = x.iter().fold(rat(1, 1), |acc, v| acc * v);
        let (_, frac) = floor_frac(&(prod / rat(3, 2)));
        let scaled = frac * BigRational::from_integer(self.subdivisions.into());
        let (fl, within) = floor_frac(&scaled);
        let index = fl
            .mod_floor(&BigInt::from(self.subdivisions))
            .to_u32()
            .unwrap();
        let w = to_f64(&within);
        SlabReading {
            index,
            margin: w.min(1.0 - w) / self.subdivisions as f64,
        }
    }
}

/// Slab window of `x` for the standard `3·2^n` partition, `n = x.len()`.
pub fn slab_index(x: &[f64]) -> SlabReading {
    Slabs::standard(x.len()).read(x)
}

pub fn slab_index_exact(x: &[BigRational]) -> SlabReading {
    Slabs::standard(x.len()).read_exact(x)
}

/// `U_i⁻¹ x` for net member `i`, without building the matrix.
pub fn net_inverse_apply(net: &RotationNet, i: u64, x: &[f64]) -> Vec<f64> {
    match net.n() {
        2 => {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / net.size() as f64;
            let (s, c) = theta.sin_cos();
            vec![c * x[0] + s * x[1], -s * x[0] + c * x[1]]
        }
        _ => {
            let [w, a, b, c] = net.member_quaternion(i);
            // rotate by the conjugate quaternion
            let (a, b, c) = (-a, -b, -c);
            let (x0, x1, x2) = (x[0], x[1], x[2]);
            let tx = 2.0 * (b * x2 - c * x1);
            let ty = 2.0 * (c * x0 - a * x2);
            let tz = 2.0 * (a * x1 - b * x0);
            vec![
                x0 + w * tx + (b * tz - c * ty),
                x1 + w * ty + (c * tx - a * tz),
                x2 + w * tz + (a * ty - b * tx),
            ]
        }
    }
}

/// A slab partition replicated over every member of a rotation net.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeColoring {
    net: RotationNet,
    slabs: Slabs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    SameColor,
    DiffersAt { index: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxVerdict {
    pub monochromatic: bool,
    pub witness: Option<u64>,
    /// The witness is the net member covering the box rotation.
    pub fast_path: bool,
    /// Smallest vertex margin at the witness index (or at the covering
    /// index when no witness exists).
    pub min_margin: f64,
}

impl CompositeColoring {
    pub fn new(net: RotationNet) -> Self {
        let slabs = Slabs::standard(net.n());
        Self { net, slabs }
    }

    pub fn with_slabs(net: RotationNet, slabs: Slabs) -> Self {
        Self { net, slabs }
    }

    pub fn net(&self) -> &RotationNet {
        &self.net
    }

    pub fn slabs(&self) -> Slabs {
        self.slabs
    }

    fn is_standard(&self) -> bool {
        self.slabs == Slabs::standard(self.net.n())
    }

    pub fn entry(&self, i: u64, x: &[f64]) -> SlabReading {
        self.slabs.read(&net_inverse_apply(&self.net, i, x))
    }

    pub fn color<'a>(&'a self, x: &[f64]) -> CompositeColor<'a> {
        CompositeColor {
            coloring: self,
            point: x.to_vec(),
        }
    }

    /// First net index at which the points disagree, scanning in order.
    pub fn monochromatic(&self, points: &[Vec<f64>]) -> Result<Verdict> {
        if points.len() < 2 {
            return Err(Error::Precondition("need at least two points".into()));
        }
        for p in points {
            if p.len() != self.net.n() {
                return Err(Error::DimensionMismatch {
                    expected: self.net.n(),
                    got: p.len(),
                });
            }
        }
        for i in 0..self.net.size() {
            let first = self.entry(i, &points[0]).index;
            if points[1..].iter().any(|p| self.entry(i, p).index != first) {
                return Ok(Verdict::DiffersAt { index: i });
            }
        }
        Ok(Verdict::SameColor)
    }

    fn readings_at(&self, i: u64, points: &[Vec<f64>]) -> (bool, f64) {
        let readings: Vec<SlabReading> = points.iter().map(|p| self.entry(i, p)).collect();
        let agree = readings.iter().all(|r| r.index == readings[0].index);
        let margin = readings
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min);
        (agree, margin)
    }

    /// Decides whether all vertices of `b` share a composite color, first at
    /// the net member covering the box rotation.
    pub fn box_monochromatic(&self, b: &OrientedBox) -> Result<BoxVerdict> {
        if b.dim() != self.net.n() {
            return Err(Error::DimensionMismatch {
                expected: self.net.n(),
                got: b.dim(),
            });
        }
        let points: Vec<Vec<f64>> = box_vertices(b)?.into_iter().map(|(_, x)| x).collect();
        let hint = self.net.lookup(b.rotation())?;
        let (agree, hint_margin) = self.readings_at(hint, &points);
        if !agree {
            return Ok(BoxVerdict {
                monochromatic: false,
                witness: Some(hint),
                fast_path: true,
                min_margin: hint_margin,
            });
        }
        if self.is_standard()
            && self.net.spec().is_certified()
            && (b.volume() - 1.0).abs() <= 1e-9
            && hint_margin >= MARGIN_FLOOR
        {
            return Err(Error::TheoremViolation(format!(
                "vertices of a unit-volume box share slab {} at covering index {hint}",
                self.entry(hint, &points[0]).index
            )));
        }
        Ok(match self.monochromatic(&points)? {
            Verdict::SameColor => BoxVerdict {
                monochromatic: true,
                witness: None,
                fast_path: false,
                min_margin: hint_margin,
            },
            Verdict::DiffersAt { index } => BoxVerdict {
                monochromatic: false,
                witness: Some(index),
                fast_path: false,
                min_margin: self.readings_at(index, &points).1,
            },
        })
    }
}

/// Lazily evaluated composite color of one point.
#[derive(Clone, Debug)]
pub struct CompositeColor<'a> {
    coloring: &'a CompositeColoring,
    point: Vec<f64>,
}

impl CompositeColor<'_> {
    pub fn len(&self) -> u64 {
        self.coloring.net.size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, i: u64) -> SlabReading {
        self.coloring.entry(i, &self.point)
    }

    pub fn prefix(&self, k: usize) -> Vec<SlabReading> {
        (0..(k as u64).min(self.len()))
            .map(|i| self.entry(i))
            .collect()
    }

    /// First index where the two colors differ, if any.
    pub fn first_difference(&self, other: &CompositeColor<'_>) -> Option<u64> {
        (0..self.len()).find(|&i| self.entry(i).index != other.entry(i).index)
    }

    /// 128-bit digest of the full tuple (little-endian `u32` entries).
    /// Forces every entry.
    pub fn digest(&self) -> [u8; 16] {
        const CHUNK: u64 = 1 << 16;
        let mut hasher = Sha256::new();
        let mut start = 0;
        while start < self.len() {
            let end = (start + CHUNK * 64).min(self.len());
            let block: Vec<u32> = (start as usize..end as usize)
                .into_par_iter()
                .with_min_len(CHUNK as usize / 16)
                .map(|i| self.entry(i as u64).index)
                .collect();
            for v in block {
                hasher.update(v.to_le_bytes());
            }
            start = end;
        }
        let full = hasher.finalize();
        let mut out = [0u8; 16];
        out.copy_from_slice(&full[..16]);
        out
    }

    pub fn digest_hex(&self) -> String {
        self.digest().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Free-standing form of [`CompositeColoring::monochromatic`].
pub fn monochromatic(net: &RotationNet, points: &[Vec<f64>]) -> Result<Verdict> {
    CompositeColoring::new(net.clone()).monochromatic(points)
}

pub fn box_monochromatic(net: &RotationNet, b: &OrientedBox) -> Result<BoxVerdict> {
    CompositeColoring::new(net.clone()).box_monochromatic(b)
}

/// The identity-frame reading that a net-free coloring would use.
pub fn identity_frame_reading(slabs: Slabs, x: &[f64]) -> SlabReading {
    slabs.read(x)
}

/// Applies `U⁻¹` and reads the standard slab.
pub fn rotated_reading(u: &Rotation, x: &[f64]) -> SlabReading {
    slab_index(&u.apply_inverse(x))
}

/// Open-interval disjointness of `(3/4, 5/4) ∪ (-5/4, -3/4)` from
/// `(3/2)Z + (-w, w)`, checked exactly for every relevant lattice shift.
pub fn intervals_disjoint(deviation: &BigRational, window: &BigRational) -> bool {
    let one = rat(1, 1);
    let period = rat(3, 2);
    let (lo, hi) = (&one - deviation, &one + deviation);
    let reach = (to_f64(&hi) / 1.5).ceil() as i64 + 1;
    (-reach..=reach).all(|k| {
        let c = BigRational::from_integer(k.into()) * &period;
        let (a, b) = (&c - window, &c + window);
        // positive branch, and its mirror image
        let pos = b <= lo || hi <= a;
        let neg = b <= -hi.clone() || -lo.clone() <= a;
        pos && neg
    })
}

/// Half-width of the window that confines the alternating vertex-product
/// sum when all `2^n` vertices share one of `subdivisions` slab windows.
pub fn confinement_window(n: usize, subdivisions: u32) -> BigRational {
    BigRational::new(
        BigInt::from(3u64 << n),
        BigInt::from(4u64 * subdivisions as u64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{build_net, NetSpec};

    #[test]
    fn slab_examples() {
        assert_eq!(slab_index(&[1.0, 1.0]).index, 8);
        assert_eq!(slab_index(&[0.0, 5.0, -2.0]).index, 0);
        assert_eq!(
            slab_index_exact(&[rat(3, 2), rat(1, 1)]),
            SlabReading {
                index: 0,
                margin: 0.0
            }
        );
        let h = 1.5f64.sqrt();
        assert_eq!(slab_index(&[h, 1.0]).index, 9);
        let r = slab_index(&[h, h]);
        assert!(r.margin < 1e-12);
        assert!(r.index == 0 || r.index == 11);
    }

    #[test]
    fn float_reading_matches_exact() {
        let pts = [[0.3, -7.25], [12.5, 0.125], [-3.1, -4.7], [1e7, 3.3e-3]];
        for p in pts {
            let f = slab_index(&p);
            let e = slab_index_exact(&p.map(|v| from_f64(v).unwrap()));
            assert_eq!(f.index, e.index);
            assert!((f.margin - e.margin).abs() < 1e-12);
        }
        // forces the exact fallback
        let big = [3.0e10, 7.0e9, 1.0 / 3.0];
        let e = slab_index_exact(&big.map(|v| from_f64(v).unwrap()));
        assert_eq!(slab_index(&big), e);
        let huge = [1e200, 1e200];
        assert!(slab_index(&huge).index < 12);
    }

    #[test]
    fn confinement_matches_quarter() {
        assert_eq!(confinement_window(2, 12), rat(1, 4));
        assert_eq!(confinement_window(3, 24), rat(1, 4));
        assert!(intervals_disjoint(&rat(1, 4), &rat(1, 4)));
        assert!(!intervals_disjoint(&rat(1, 4), &confinement_window(2, 1)));
        assert!(!intervals_disjoint(&rat(3, 10), &rat(1, 4)));
    }

    #[test]
    fn origin_composite_is_zero() {
        let c = CompositeColoring::new(build_net(NetSpec::paper(2)).unwrap());
        let col = c.color(&[0.0, 0.0]);
        assert!((0..col.len()).all(|i| col.entry(i).index == 0));
        let a = c.color(&[1.0, 1.0]);
        let b = c.color(&[1.0, 1.3]);
        assert!(a.first_difference(&b).is_some());
        assert_eq!(a.first_difference(&c.color(&[1.0, 1.0])), None);
        assert_eq!(a.digest(), c.color(&[1.0, 1.0]).digest());
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn identity_index_separates_nearby_points() {
        let c = CompositeColoring::new(build_net(NetSpec::paper(2)).unwrap());
        // products 1 and 1.3 fall in windows 8 and 6
        assert_eq!(c.entry(0, &[1.0, 1.0]).index, 8);
        assert_ne!(c.entry(0, &[1.0, 1.0]).index, c.entry(0, &[1.0, 1.3]).index);
    }

    #[test]
    fn inverse_apply_matches_matrix() {
        for spec in [NetSpec::paper(2), NetSpec::custom(3, 0.3)] {
            let net = build_net(spec).unwrap();
            let x: Vec<f64> = (0..spec.n).map(|k| 0.7 - k as f64 * 1.3).collect();
            for i in (0..net.size()).step_by(97) {
                let fast = net_inverse_apply(&net, i, &x);
                let slow = net.member(i).apply_inverse(&x);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unit_square_is_not_monochromatic() {
        let c = CompositeColoring::new(build_net(NetSpec::paper(2)).unwrap());
        let b = OrientedBox::axis_aligned(vec![0.3, 0.2], vec![2.0, 0.5]).unwrap();
        let v = c.box_monochromatic(&b).unwrap();
        assert!(!v.monochromatic);
        assert!(v.fast_path);
        assert_eq!(v.witness, Some(0));
    }

    #[test]
    fn identical_points_share_color() {
        let net = build_net(NetSpec::paper(2)).unwrap();
        let p = vec![vec![0.4, -1.2]; 3];
        assert_eq!(monochromatic(&net, &p).unwrap(), Verdict::SameColor);
        assert!(monochromatic(&net, &p[..1]).is_err());
    }
}
