//! The 25-color partition of the plane and its skeleton generalization.
//!
//! A point `z` is colored by where `z^2` falls inside the lattice cell of
//! `(10/3)(Z + iZ)`, the cell being cut into a 5×5 grid of half-open
//! subsquares. If four parallelogram vertices share a color, the alternating
//! sum of their squares lands in `(10/3)(Z + iZ + (-2/5, 2/5)^2)`, which the
//! circle `|w| = 2` never meets (see [`crate::separation`]).
//!
//! The skeleton scheme colors by `z^n` instead, with lattice scale
//! `L = (5/3)·n!` and `s = 5·2^{n-2}` subdivisions per axis; for `n = 2` it
//! is the 25-color partition again.

use num::rational::BigRational;
use num::{BigInt, Integer, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ComplexPoint;
use crate::scalar::{factorial, floor_frac, rat, to_f64};

/// Color class `(j, k)` with `0 ≤ j, k ≤ 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaneColor {
    pub j: u8,
    pub k: u8,
}

impl PlaneColor {
    pub fn new(j: u8, k: u8) -> Result<Self> {
        if j > 4 || k > 4 {
            return Err(Error::Precondition(format!(
                "plane color ({j},{k}) out of range"
            )));
        }
        Ok(Self { j, k })
    }

    pub fn index(self) -> usize {
        5 * self.j as usize + self.k as usize
    }
}

/// Subcell index `(j, k)` of a skeleton scheme, each in `0..s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkeletonColor {
    pub j: u32,
    pub k: u32,
}

impl From<PlaneColor> for SkeletonColor {
    fn from(c: PlaneColor) -> Self {
        Self {
            j: c.j as u32,
            k: c.k as u32,
        }
    }
}

/// A color together with the distance of the reduced point to the nearest
/// subcell boundary, measured in lattice-cell units (a subcell has width `1/s`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ColorReading<C> {
    pub color: C,
    pub margin: f64,
}

/// `z^n`. The square is formed as `((x-y)(x+y), 2xy)`.
pub fn complex_pow(z: ComplexPoint, n: u32) -> ComplexPoint {
    match n {
        0 => ComplexPoint::new(1.0, 0.0),
        1 => z,
        2 => ComplexPoint::new((z.re - z.im) * (z.re + z.im), 2.0 * z.re * z.im),
        _ => z.powu(n),
    }
}

/// Cell coordinates of `t = w·s/L`: `floor(t) mod s` per axis, plus margin.
fn lattice_cell(w: ComplexPoint, factor: f64, s: u32) -> (u32, u32, f64) {
    let axis = |x: f64| {
        let t = x * factor;
        let fl = t.floor();
        let idx = (fl as i64).rem_euclid(s as i64) as u32;
        let frac = t - fl;
        let dist = frac.min(1.0 - frac);
        (idx, dist / s as f64)
    };
    let (j, mj) = axis(w.re);
    let (k, mk) = axis(w.im);
    (j, k, mj.min(mk))
}

pub fn plane_color(z: ComplexPoint) -> ColorReading<PlaneColor> {
    // 5 / (10/3) = 3/2
    let (j, k, margin) = lattice_cell(complex_pow(z, 2), 1.5, 5);
    ColorReading {
        color: PlaneColor {
            j: j as u8,
            k: k as u8,
        },
        margin,
    }
}

fn exact_axis(x: &BigRational, factor: &BigRational, s: u32) -> u32 {
    let (fl, _) = floor_frac(&(x * factor));
    fl.mod_floor(&BigInt::from(s))
        .to_u32()
        .expect("residue below s")
}

/// Exact color of `re + i·im`.
pub fn plane_color_exact(re: &BigRational, im: &BigRational) -> PlaneColor {
    let wr = re * re - im * im;
    let wi = rat(2, 1) * re * im;
    let f = rat(3, 2);
    PlaneColor {
        j: exact_axis(&wr, &f, 5) as u8,
        k: exact_axis(&wi, &f, 5) as u8,
    }
}

/// Four plane points `z, z+u, z+u+v, z+v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parallelogram {
    pub z: ComplexPoint,
    pub u: ComplexPoint,
    pub v: ComplexPoint,
}

impl Parallelogram {
    pub fn new(z: ComplexPoint, u: ComplexPoint, v: ComplexPoint) -> Self {
        Self { z, u, v }
    }

    /// Vertices in cyclic order `A, B, C, D`.
    pub fn vertices(&self) -> [ComplexPoint; 4] {
        [
            self.z,
            self.z + self.u,
            self.z + self.u + self.v,
            self.z + self.v,
        ]
    }
}

fn lex_less(a: ComplexPoint, b: ComplexPoint) -> bool {
    a.re < b.re || (a.re == b.re && a.im < b.im)
}

/// `z_A² - z_B² + z_C² - z_D²`, with `A` the lexicographically smallest
/// vertex and `B, C, D` following it cyclically. Equals `±2uv`.
pub fn invariant_i(p: &Parallelogram) -> ComplexPoint {
    let verts = p.vertices();
    let mut a = 0;
    for i in 1..4 {
        if lex_less(verts[i], verts[a]) {
            a = i;
        }
    }
    let [za, zb, zc, zd] = [0, 1, 2, 3].map(|s| verts[(a + s) % 4]);
    (za - zb) * (za + zb) + (zc - zd) * (zc + zd)
}

/// The `2^n` points `z + Σ r_j u_j`, `r ∈ {0,1}^n`, of a planar embedding of
/// an `n`-box 1-skeleton, indexed by subset mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub z: ComplexPoint,
    pub u: Vec<ComplexPoint>,
}

impl Skeleton {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn vertices(&self) -> Vec<ComplexPoint> {
        (0u32..1 << self.u.len())
            .map(|mask| {
                self.u
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask & (1 << j) != 0)
                    .fold(self.z, |acc, (_, uj)| acc + uj)
            })
            .collect()
    }

    /// `Π |u_j|`.
    pub fn modulus_product(&self) -> f64 {
        self.u.iter().map(|u| u.norm()).product()
    }
}

/// Coloring of the plane by the position of `z^n` relative to `L(Z + iZ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonColorScheme {
    n: u32,
    scale: BigRational,
    subdivisions: u32,
    factor: f64,
}

impl SkeletonColorScheme {
    pub const MAX_N: u32 = 16;

    pub fn new(n: u32) -> Result<Self> {
        if !(2..=Self::MAX_N).contains(&n) {
            return Err(Error::Precondition(format!(
                "skeleton scheme needs 2 <= n <= {}, got {n}",
                Self::MAX_N
            )));
        }
        let fact = BigInt::from(factorial(n as usize));
        let scale = BigRational::new(BigInt::from(5) * fact, BigInt::from(3));
        let subdivisions = 5 * (1u32 << (n - 2));
        let factor = to_f64(&(BigRational::from_integer(subdivisions.into()) / &scale));
        Ok(Self {
            n,
            scale,
            subdivisions,
            factor,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Lattice scale `L`.
    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    /// Subdivisions `s` per axis; there are `s²` colors.
    pub fn subdivisions(&self) -> u32 {
        self.subdivisions
    }

    pub fn num_colors(&self) -> u64 {
        self.subdivisions as u64 * self.subdivisions as u64
    }

    /// Half-width, in lattice units, of the window the alternating power sum
    /// of a monochromatic skeleton is confined to: `2^{n-1}/s`.
    pub fn confinement_half_width(&self) -> BigRational {
        BigRational::new(BigInt::one() << (self.n - 1), self.subdivisions.into())
    }

    pub fn color(&self, z: ComplexPoint) -> ColorReading<SkeletonColor> {
        let (j, k, margin) = lattice_cell(complex_pow(z, self.n), self.factor, self.subdivisions);
        ColorReading {
            color: SkeletonColor { j, k },
            margin,
        }
    }

    pub fn color_exact(&self, re: &BigRational, im: &BigRational) -> SkeletonColor {
        let mut wr = BigRational::one();
        let mut wi = BigRational::zero();
        for _ in 0..self.n {
            let nr = &wr * re - &wi * im;
            let ni = &wr * im + &wi * re;
            wr = nr;
            wi = ni;
        }
        let f = BigRational::from_integer(self.subdivisions.into()) / &self.scale;
        SkeletonColor {
            j: exact_axis(&wr, &f, self.subdivisions),
            k: exact_axis(&wi, &f, self.subdivisions),
        }
    }
}

pub fn skeleton_color(
    scheme: &SkeletonColorScheme,
    z: ComplexPoint,
) -> ColorReading<SkeletonColor> {
    scheme.color(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::from_f64;

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    /// Oracle: reduce z²/(10/3) modulo Z + iZ exactly and read the 1/5-grid.
    fn oracle(re: f64, im: f64) -> PlaneColor {
        let (x, y) = (from_f64(re).unwrap(), from_f64(im).unwrap());
        let w_re = &x * &x - &y * &y;
        let w_im = rat(2, 1) * &x * &y;
        let scale = rat(10, 3);
        let (_, fr) = floor_frac(&(w_re / &scale));
        let (_, fi) = floor_frac(&(w_im / &scale));
        let five = rat(5, 1);
        let j = floor_frac(&(fr * &five)).0.to_u8().unwrap();
        let k = floor_frac(&(fi * &five)).0.to_u8().unwrap();
        PlaneColor { j, k }
    }

    #[test]
    fn origin_one_and_i() {
        assert_eq!(plane_color(c(0.0, 0.0)).color, PlaneColor { j: 0, k: 0 });
        assert_eq!(oracle(1.0, 0.0), PlaneColor { j: 1, k: 0 });
        assert_eq!(plane_color(c(1.0, 0.0)).color, PlaneColor { j: 1, k: 0 });
        // i² = -1, -3/10 ≡ 7/10 in the real part, imaginary part 0
        assert_eq!(oracle(0.0, 1.0), PlaneColor { j: 3, k: 0 });
        assert_eq!(plane_color(c(0.0, 1.0)).color, PlaneColor { j: 3, k: 0 });
    }

    #[test]
    fn float_and_exact_agree_on_grid() {
        for a in -40..=40 {
            for b in -40..=40 {
                let (re, im) = (a as f64 / 8.0, b as f64 / 8.0);
                let exact = plane_color_exact(&from_f64(re).unwrap(), &from_f64(im).unwrap());
                assert_eq!(exact, oracle(re, im));
                let reading = plane_color(c(re, im));
                if reading.margin > 1e-12 {
                    assert_eq!(reading.color, exact, "({re},{im})");
                }
            }
        }
    }

    #[test]
    fn invariant_unit_square_and_rectangle() {
        let i = invariant_i(&Parallelogram::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)));
        assert!((i - c(0.0, 2.0)).norm() < 1e-15);
        let i = invariant_i(&Parallelogram::new(c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.5)));
        assert!((i - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn invariant_scale_trade() {
        let z = c(0.4, -1.3);
        let (u, v) = (c(0.3, 0.8), c(-1.1, 0.25));
        let base = invariant_i(&Parallelogram::new(z, u, v)).norm();
        for t in [0.01, 0.5, 3.0, 70.0] {
            let scaled = invariant_i(&Parallelogram::new(z, u * t, v / t)).norm();
            assert!((scaled - base).abs() < 1e-9 * base.max(1.0));
        }
        assert!((base - 2.0 * u.norm() * v.norm()).abs() < 1e-12);
    }

    #[test]
    fn skeleton_scheme_parameters() {
        let s2 = SkeletonColorScheme::new(2).unwrap();
        assert_eq!(s2.scale(), &rat(10, 3));
        assert_eq!(s2.subdivisions(), 5);
        assert_eq!(s2.num_colors(), 25);
        assert_eq!(s2.confinement_half_width(), rat(2, 5));
        let s3 = SkeletonColorScheme::new(3).unwrap();
        assert_eq!(s3.scale(), &rat(10, 1));
        assert_eq!(s3.subdivisions(), 10);
        assert_eq!(s3.confinement_half_width(), rat(2, 5));
        assert!(SkeletonColorScheme::new(1).is_err());
        assert!(SkeletonColorScheme::new(17).is_err());
    }

    #[test]
    fn skeleton_examples() {
        let s3 = SkeletonColorScheme::new(3).unwrap();
        assert_eq!(s3.color(c(1.0, 0.0)).color, SkeletonColor { j: 1, k: 0 });
        assert_eq!(
            s3.color_exact(&rat(1, 1), &rat(0, 1)),
            SkeletonColor { j: 1, k: 0 }
        );
        for n in 2..=8 {
            let s = SkeletonColorScheme::new(n).unwrap();
            assert_eq!(s.color(c(0.0, 0.0)).color, SkeletonColor { j: 0, k: 0 });
        }
    }

    #[test]
    fn skeleton_two_is_plane_coloring() {
        let s2 = SkeletonColorScheme::new(2).unwrap();
        for a in -30..30 {
            for b in -30..30 {
                let z = c(a as f64 * 0.137, b as f64 * 0.091);
                assert_eq!(SkeletonColor::from(plane_color(z).color), s2.color(z).color);
            }
        }
    }

    #[test]
    fn skeleton_vertices() {
        let sk = Skeleton {
            z: c(0.0, 0.0),
            u: vec![c(1.0, 0.0), c(0.0, 1.0)],
        };
        assert_eq!(
            sk.vertices(),
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)]
        );
        assert_eq!(sk.modulus_product(), 1.0);
    }
}
