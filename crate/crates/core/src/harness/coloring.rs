//! Colorings the harness can search against, including deliberately broken
//! controls.

use std::collections::HashMap;

use serde::Serialize;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::geometry::ComplexPoint;
use crate::nd_coloring::{CompositeColoring, Slabs};
use crate::net::{build_net, EpsMode, NetSpec, RotationNet};
use crate::plane::{plane_color, SkeletonColorScheme};

/// Outcome of coloring the vertices of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Judgement {
    pub monochromatic: bool,
    /// Vertices outside the largest color class. For composite colorings the
    /// classes are taken at the first distinguishing net index, which can
    /// only underestimate the gap.
    pub gap: usize,
    pub min_margin: f64,
    pub witness_index: Option<u64>,
    pub fast_path: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coloring {
    /// The 25-class coloring of the plane.
    Plane25,
    /// Slabs replicated over a rotation net.
    Composite(CompositeColoring),
    Skeleton(SkeletonColorScheme),
    /// Control: sign pattern of `(x, y)`.
    Quadrant4,
    /// Control: standard slabs read in the identity frame only.
    NoRotationNet {
        n: usize,
    },
}

impl Coloring {
    pub fn composite(n: usize, mode: EpsMode) -> Result<Self> {
        Ok(Coloring::Composite(CompositeColoring::new(build_net(
            NetSpec::with_mode(n, mode),
        )?)))
    }

    /// Control: the composite construction with `subdivisions` slab windows.
    pub fn coarse_slab(n: usize, subdivisions: u32) -> Result<Self> {
        let net = build_net(NetSpec::paper(n))?;
        Ok(Coloring::Composite(CompositeColoring::with_slabs(
            net,
            Slabs::with_subdivisions(subdivisions)?,
        )))
    }

    pub fn skeleton(n: u32) -> Result<Self> {
        Ok(Coloring::Skeleton(SkeletonColorScheme::new(n)?))
    }

    pub fn name(&self) -> String {
        match self {
            Coloring::Plane25 => "plane25".into(),
            Coloring::Composite(c) if c.slabs() == Slabs::standard(c.net().n()) => "nd".into(),
            Coloring::Composite(c) => format!("coarse-slab/{}", c.slabs().subdivisions()),
            Coloring::Skeleton(s) => format!("skeleton/{}", s.n()),
            Coloring::Quadrant4 => "quadrant4".into(),
            Coloring::NoRotationNet { .. } => "no-rotation-net".into(),
        }
    }

    /// Dimension of the points this coloring accepts.
    pub fn dim(&self) -> usize {
        match self {
            Coloring::Composite(c) => c.net().n(),
            Coloring::NoRotationNet { n } => *n,
            _ => 2,
        }
    }

    /// Whether a monochromatic configuration would refute a theorem, as
    /// opposed to being the expected outcome of a control.
    pub fn is_theorem(&self) -> bool {
        match self {
            Coloring::Plane25 | Coloring::Skeleton(_) => true,
            Coloring::Composite(c) => {
                c.slabs() == Slabs::standard(c.net().n()) && c.net().spec().is_certified()
            }
            Coloring::Quadrant4 | Coloring::NoRotationNet { .. } => false,
        }
    }

    pub fn net(&self) -> Option<&RotationNet> {
        match self {
            Coloring::Composite(c) => Some(c.net()),
            _ => None,
        }
    }

    /// Class key and boundary margin of a single point, for pointwise
    /// colorings.
    fn point_color(&self, p: &[f64]) -> Option<(u64, f64)> {
        Some(match self {
            Coloring::Plane25 => {
                let r = plane_color(ComplexPoint::new(p[0], p[1]));
                (r.color.index() as u64, r.margin)
            }
            Coloring::Skeleton(s) => {
                let r = s.color(ComplexPoint::new(p[0], p[1]));
                (((r.color.j as u64) << 32) | r.color.k as u64, r.margin)
            }
            Coloring::Quadrant4 => {
                let key = u64::from(p[0] >= 0.0) | (u64::from(p[1] >= 0.0) << 1);
                (key, p[0].abs().min(p[1].abs()))
            }
            Coloring::NoRotationNet { n } => {
                let r = Slabs::standard(*n).read(p);
                (r.index as u64, r.margin)
            }
            Coloring::Composite(_) => return None,
        })
    }

    /// Human-readable color of one point.
    pub fn label(&self, p: &[f64]) -> String {
        match self {
            Coloring::Plane25 => {
                let c = plane_color(ComplexPoint::new(p[0], p[1])).color;
                format!("({},{})", c.j, c.k)
            }
            Coloring::Skeleton(s) => {
                let c = s.color(ComplexPoint::new(p[0], p[1])).color;
                format!("({},{})", c.j, c.k)
            }
            Coloring::Quadrant4 => format!("({},{})", u8::from(p[0] >= 0.0), u8::from(p[1] >= 0.0)),
            Coloring::NoRotationNet { n } => Slabs::standard(*n).read(p).index.to_string(),
            Coloring::Composite(c) => c.color(p).digest_hex(),
        }
    }

    fn check_dim(&self, cfg: &Configuration) -> Result<()> {
        if cfg.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: cfg.dim(),
            });
        }
        Ok(())
    }

    pub fn judge(&self, cfg: &Configuration) -> Result<Judgement> {
        self.check_dim(cfg)?;
        let points = cfg.points();
        let Coloring::Composite(c) = self else {
            let mut counts: HashMap<u64, usize> = HashMap::new();
            let mut margin = f64::INFINITY;
            for p in &points {
                let (key, m) = self.point_color(p).expect("pointwise");
                *counts.entry(key).or_default() += 1;
                margin = margin.min(m);
            }
            let largest = counts.values().copied().max().unwrap_or(0);
            return Ok(Judgement {
                monochromatic: counts.len() == 1,
                gap: points.len() - largest,
                min_margin: margin,
                witness_index: None,
                fast_path: false,
            });
        };
        let (monochromatic, witness, fast_path, margin) = match cfg {
            Configuration::Box(b) => {
                let v = c.box_monochromatic(b)?;
                (v.monochromatic, v.witness, v.fast_path, v.min_margin)
            }
            _ => match c.monochromatic(&points)? {
                crate::nd_coloring::Verdict::SameColor => {
                    let m = points
                        .iter()
                        .map(|p| c.entry(0, p).margin)
                        .fold(f64::INFINITY, f64::min);
                    (true, None, false, m)
                }
                crate::nd_coloring::Verdict::DiffersAt { index } => {
                    let m = points
                        .iter()
                        .map(|p| c.entry(index, p).margin)
                        .fold(f64::INFINITY, f64::min);
                    (false, Some(index), false, m)
                }
            },
        };
        let gap = match witness {
            None => 0,
            Some(i) => {
                let mut counts: HashMap<u32, usize> = HashMap::new();
                for p in &points {
                    *counts.entry(c.entry(i, p).index).or_default() += 1;
                }
                points.len() - counts.values().copied().max().unwrap_or(0)
            }
        };
        Ok(Judgement {
            monochromatic,
            gap,
            min_margin: margin,
            witness_index: witness,
            fast_path,
        })
    }

    /// Number of vertex pairs with different colors, and the smallest margin
    /// among the readings that decided them. Zero means monochromatic.
    pub fn disagreeing_pairs(&self, cfg: &Configuration) -> Result<(usize, f64)> {
        self.check_dim(cfg)?;
        let points = cfg.points();
        let Coloring::Composite(c) = self else {
            let colors: Vec<(u64, f64)> = points
                .iter()
                .map(|p| self.point_color(p).expect("pointwise"))
                .collect();
            let margin = colors.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            let mut pairs = 0;
            for (i, a) in colors.iter().enumerate() {
                pairs += colors[i + 1..].iter().filter(|b| b.0 != a.0).count();
            }
            return Ok((pairs, margin));
        };
        let k = points.len();
        let mut open: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .collect();
        let mut decided = 0;
        let mut margin = f64::INFINITY;
        for idx in 0..c.net().size() {
            if open.is_empty() {
                break;
            }
            let readings: Vec<_> = points.iter().map(|p| c.entry(idx, p)).collect();
            open.retain(|&(i, j)| {
                if readings[i].index != readings[j].index {
                    decided += 1;
                    margin = margin.min(readings[i].margin).min(readings[j].margin);
                    false
                } else {
                    true
                }
            });
            if idx == 0 {
                margin = margin.min(
                    readings
                        .iter()
                        .map(|r| r.margin)
                        .fold(f64::INFINITY, f64::min),
                );
            }
        }
        Ok((decided, margin))
    }
}

impl std::str::FromStr for Coloring {
    type Err = Error;

    /// `plane25`, `nd[:N[:paper|sharp]]`, `skeleton:N`, `quadrant4`,
    /// `coarse-slab[:N[:K]]`, `no-rotation-net[:N]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let mut num = |default: usize| -> Result<usize> {
            parts
                .next()
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad number in coloring {s:?}")))
                })
                .unwrap_or(Ok(default))
        };
        match head {
            "plane25" => Ok(Coloring::Plane25),
            "quadrant4" => Ok(Coloring::Quadrant4),
            "nd" => {
                let n = num(2)?;
                let mode = match s.split(':').nth(2) {
                    Some(m) => m.parse()?,
                    None => EpsMode::Paper,
                };
                Coloring::composite(n, mode)
            }
            "skeleton" => Coloring::skeleton(num(2)? as u32),
            "coarse-slab" => {
                let n = num(2)?;
                let k = num(1)?;
                Coloring::coarse_slab(n, k as u32)
            }
            "no-rotation-net" => Ok(Coloring::NoRotationNet { n: num(2)? }),
            _ => Err(Error::Parse(format!("unknown coloring {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    fn cfg(json: &str) -> Configuration {
        ConfigFile::from_json(json).unwrap().validate().unwrap()
    }

    #[test]
    fn quadrant_square_is_monochromatic() {
        let c = cfg(r#"{"type":"rectangle2d","params":{"corner":[10,10],"width":1,"height":1}}"#);
        let j = Coloring::Quadrant4.judge(&c).unwrap();
        assert!(j.monochromatic);
        assert_eq!(j.gap, 0);
        assert_eq!(Coloring::Quadrant4.disagreeing_pairs(&c).unwrap().0, 0);
        assert!(!Coloring::Plane25.judge(&c).unwrap().monochromatic);
    }

    #[test]
    fn unit_square_at_origin_plane25() {
        let c = cfg(r#"{"type":"rectangle2d","params":{"corner":[0.1,0.2],"width":1,"height":1}}"#);
        let j = Coloring::Plane25.judge(&c).unwrap();
        assert!(!j.monochromatic);
        assert!(j.gap >= 1);
        let (pairs, _) = Coloring::Plane25.disagreeing_pairs(&c).unwrap();
        assert!(pairs >= 3);
    }

    #[test]
    fn parse_names() {
        for s in [
            "plane25",
            "quadrant4",
            "nd",
            "nd:3:sharp",
            "skeleton:3",
            "coarse-slab",
            "no-rotation-net:3",
        ] {
            let c: Coloring = s.parse().unwrap();
            assert!(!c.name().is_empty());
        }
        assert!("nd:3:sharp".parse::<Coloring>().unwrap().is_theorem());
        assert!(!"coarse-slab".parse::<Coloring>().unwrap().is_theorem());
        assert!("bogus".parse::<Coloring>().is_err());
        assert!("skeleton:x".parse::<Coloring>().is_err());
    }

    #[test]
    fn coarse_slab_is_constant() {
        let c: Coloring = "coarse-slab".parse().unwrap();
        let b = cfg(r#"{"type":"box","params":{"q":[0.3,-4],"a":[7,0.142857142857142857]}}"#);
        assert!(c.judge(&b).unwrap().monochromatic);
        assert_eq!(c.disagreeing_pairs(&b).unwrap().0, 0);
    }

    #[test]
    fn composite_pairs_match_pointwise_at_identity() {
        let c: Coloring = "nd".parse().unwrap();
        let b = cfg(r#"{"type":"box","params":{"q":[0.3,0.2],"a":[2,0.5]}}"#);
        let j = c.judge(&b).unwrap();
        assert!(!j.monochromatic && j.fast_path);
        assert!(c.disagreeing_pairs(&b).unwrap().0 >= 3);
        assert!(c
            .judge(&cfg(
                r#"{"type":"rectangle2d","params":{"corner":[0,0],"width":1,"height":1}}"#
            ))
            .is_ok());
        let mismatch = cfg(r#"{"type":"points","points":[[0,0,0],[1,1,1]],"n":3}"#);
        assert!(c.judge(&mismatch).is_err());
    }
}
