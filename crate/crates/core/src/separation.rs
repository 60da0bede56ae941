//! Exact check that the circle `|w| = r` misses every open square of
//! `scale·(Z + iZ + (-h, h)^2)`.
//!
//! For each cell the squared distance from the origin to the closed square
//! (`m²`) and the squared norm of its farthest corner (`M²`) are exact
//! rationals. The circle misses the open square iff `r² ≤ m²` or `r² ≥ M²`.
//! Cells whose `m` exceeds an integer upper bound of `r + diagonal` are
//! provably outside and are not listed.

use num::rational::BigRational;
use num::{BigInt, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{rat, to_f64};

fn ser_rat<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `scale·(Z + iZ + (-half_width, half_width)^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeCellSet {
    scale: BigRational,
    half_width: BigRational,
}

impl LatticeCellSet {
    pub fn new(scale: BigRational, half_width: BigRational) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::Precondition(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if !half_width.is_positive() || half_width >= rat(1, 2) {
            return Err(Error::Precondition(format!(
                "half width must lie in (0, 1/2), got {half_width}"
            )));
        }
        Ok(Self { scale, half_width })
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn half_width(&self) -> &BigRational {
        &self.half_width
    }

    /// Closed interval `[lo, hi]` covered by offset `a` along one axis.
    fn span(&self, a: i64) -> (BigRational, BigRational) {
        let c = BigRational::from_integer(a.into());
        (
            &self.scale * (&c - &self.half_width),
            &self.scale * (&c + &self.half_width),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellVerdict {
    /// The open square lies inside the circle (`M² ≤ r²`).
    Inside,
    /// The open square lies outside the circle (`m² ≥ r²`).
    Outside,
    Intersects,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRecord {
    pub offset: (i64, i64),
    #[serde(serialize_with = "ser_rat")]
    pub min_dist_sq: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub max_dist_sq: BigRational,
    pub verdict: CellVerdict,
    /// The open square touches the circle only on its boundary.
    pub tangent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationCertificate {
    #[serde(serialize_with = "ser_rat")]
    pub scale: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub half_width: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub radius_sq: BigRational,
    /// Cells with `m² ≤ enumeration_bound_sq` are listed; all others are outside.
    #[serde(serialize_with = "ser_rat")]
    pub enumeration_bound_sq: BigRational,
    pub pass: bool,
    pub failures: usize,
    pub cells: Vec<CellRecord>,
}

impl SeparationCertificate {
    pub fn cell(&self, offset: (i64, i64)) -> Option<&CellRecord> {
        self.cells.iter().find(|c| c.offset == offset)
    }

    pub fn ensure_pass(&self) -> Result<()> {
        if self.pass {
            Ok(())
        } else {
            Err(Error::CertificateRefuted {
                failures: self.failures,
            })
        }
    }
}

/// Smallest nonnegative integer `R` with `R² ≥ x`.
fn ceil_sqrt(x: &BigRational) -> BigInt {
    let guess = to_f64(x).max(0.0).sqrt().floor();
    let mut r = BigInt::from(guess.to_i64().unwrap_or(0).max(0));
    let sq = |r: &BigInt| BigRational::from_integer(r * r);
    while sq(&r) < *x {
        r += 1;
    }
    while r > BigInt::zero() && sq(&(&r - 1)) >= *x {
        r -= 1;
    }
    r
}

/// Squared distances from the origin to the nearest and farthest points of `[lo, hi]`.
fn axis_extent(lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let near = if lo.is_positive() {
        lo.clone()
    } else if hi.is_negative() {
        -hi.clone()
    } else {
        BigRational::zero()
    };
    let far = lo.abs().max(hi.abs());
    (&near * &near, &far * &far)
}

pub fn separation_certificate(
    cells: &LatticeCellSet,
    radius_sq: &BigRational,
) -> Result<SeparationCertificate> {
    if !radius_sq.is_positive() {
        return Err(Error::Precondition(format!(
            "squared radius must be positive, got {radius_sq}"
        )));
    }
    // 3h·scale bounds the diagonal 2√2·h·scale from above.
    let r_bound = BigRational::from_integer(ceil_sqrt(radius_sq));
    let reach = &r_bound + rat(3, 1) * &cells.half_width * &cells.scale;
    let reach_sq = &reach * &reach;
    let k = (to_f64(&(&reach / &cells.scale)).ceil() as i64) + 1;

    let spans: Vec<(i64, (BigRational, BigRational))> = (-k..=k)
        .map(|a| (a, axis_extent(&cells.span(a).0, &cells.span(a).1)))
        .collect();

    let mut records = Vec::new();
    for (a, (ax_near, ax_far)) in &spans {
        for (b, (by_near, by_far)) in &spans {
            let m2 = ax_near + by_near;
            if m2 > reach_sq {
                continue;
            }
            let big_m2 = ax_far + by_far;
            let verdict = if *radius_sq <= m2 {
                CellVerdict::Outside
            } else if *radius_sq >= big_m2 {
                CellVerdict::Inside
            } else {
                CellVerdict::Intersects
            };
            let tangent = *radius_sq == m2 || *radius_sq == big_m2;
            records.push(CellRecord {
                offset: (*a, *b),
                min_dist_sq: m2,
                max_dist_sq: big_m2,
                verdict,
                tangent,
            });
        }
    }
    let failures = records
        .iter()
        .filter(|r| r.verdict == CellVerdict::Intersects)
        .count();
    Ok(SeparationCertificate {
        scale: cells.scale.clone(),
        half_width: cells.half_width.clone(),
        radius_sq: radius_sq.clone(),
        enumeration_bound_sq: reach_sq,
        pass: failures == 0,
        failures,
        cells: records,
    })
}
