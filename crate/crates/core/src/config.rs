//! JSON configuration files and their validated in-memory form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    box_vertices, check_complex, AlignedBox, ComplexPoint, OrientedBox, RealVec, Rotation,
};
use crate::plane::{Parallelogram, Skeleton};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectangleParams {
    /// Corner `z` of the rectangle.
    pub corner: [f64; 2],
    pub width: f64,
    pub height: f64,
    /// Direction of the `width` side, radians.
    #[serde(default)]
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelogramParams {
    pub z: [f64; 2],
    pub u: [f64; 2],
    pub v: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxParams {
    /// Base corner before rotation.
    pub q: Vec<f64>,
    /// Edge lengths.
    pub a: Vec<f64>,
    /// Rotation matrix rows; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonParams {
    pub z: [f64; 2],
    pub u: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ConfigFile {
    Rectangle2d { params: RectangleParams },
    Parallelogram { params: ParallelogramParams },
    Box { params: BoxParams },
    Skeleton { params: SkeletonParams },
    Points { points: Vec<Vec<f64>>, n: usize },
}

/// A validated configuration whose vertices can be colored.
#[derive(Clone, Debug, PartialEq)]
pub enum Configuration {
    Rectangle(Parallelogram),
    Parallelogram(Parallelogram),
    Box(OrientedBox),
    Skeleton(Skeleton),
    Points(Vec<Vec<f64>>),
}

fn c(p: [f64; 2]) -> Result<ComplexPoint> {
    check_complex(ComplexPoint::new(p[0], p[1]))
}

fn pair(z: ComplexPoint) -> [f64; 2] {
    [z.re, z.im]
}

impl ConfigFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<Configuration> {
        match self {
            ConfigFile::Rectangle2d { params: r } => {
                for (what, len) in [("width", r.width), ("height", r.height)] {
                    if !(len.is_finite() && len > 0.0) {
                        return Err(Error::Parse(format!("rectangle {what} must be positive")));
                    }
                }
                if !r.angle.is_finite() {
                    return Err(Error::NonFinite);
                }
                let dir = ComplexPoint::from_polar(1.0, r.angle);
                Ok(Configuration::Rectangle(Parallelogram::new(
                    c(r.corner)?,
                    dir * r.width,
                    dir * ComplexPoint::i() * r.height,
                )))
            }
            ConfigFile::Parallelogram { params: p } => {
                let (u, v) = (c(p.u)?, c(p.v)?);
                if u.norm() == 0.0 || v.norm() == 0.0 {
                    return Err(Error::Parse("parallelogram sides must be nonzero".into()));
                }
                Ok(Configuration::Parallelogram(Parallelogram::new(
                    c(p.z)?,
                    u,
                    v,
                )))
            }
            ConfigFile::Box { params: b } => {
                if b.q.len() != b.a.len() {
                    return Err(Error::DimensionMismatch {
                        expected: b.a.len(),
                        got: b.q.len(),
                    });
                }
                let rotation = match &b.rotation {
                    Some(rows) => Rotation::from_rows(rows)?,
                    None => Rotation::identity(b.a.len()),
                };
                let aligned = AlignedBox::new(RealVec::new(b.q.clone())?, b.a.clone())?;
                let ob = OrientedBox::new(aligned, rotation)?;
                box_vertices(&ob)?;
                Ok(Configuration::Box(ob))
            }
            ConfigFile::Skeleton { params: s } => {
                if s.u.len() < 2 {
                    return Err(Error::Parse(
                        "a skeleton needs at least two edge vectors".into(),
                    ));
                }
                let u = s.u.iter().map(|&p| c(p)).collect::<Result<Vec<_>>>()?;
                Ok(Configuration::Skeleton(Skeleton { z: c(s.z)?, u }))
            }
            ConfigFile::Points { points, n } => {
                if points.len() < 2 {
                    return Err(Error::Parse("need at least two points".into()));
                }
                for p in points {
                    if p.len() != *n {
                        return Err(Error::DimensionMismatch {
                            expected: *n,
                            got: p.len(),
                        });
                    }
                    RealVec::new(p.clone())?;
                }
                Ok(Configuration::Points(points.clone()))
            }
        }
    }
}

impl Configuration {
    /// Ambient dimension of the vertices.
    pub fn dim(&self) -> usize {
        match self {
            Configuration::Box(b) => b.dim(),
            Configuration::Points(p) => p[0].len(),
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Configuration::Rectangle(_) => "rectangle2d",
            Configuration::Parallelogram(_) => "parallelogram",
            Configuration::Box(_) => "box",
            Configuration::Skeleton(_) => "skeleton",
            Configuration::Points(_) => "points",
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            Configuration::Rectangle(p) | Configuration::Parallelogram(p) => {
                p.vertices().iter().map(|z| vec![z.re, z.im]).collect()
            }
            Configuration::Box(b) => box_vertices(b)
                .expect("validated box")
                .into_iter()
                .map(|(_, x)| x)
                .collect(),
            Configuration::Skeleton(s) => s.vertices().iter().map(|z| vec![z.re, z.im]).collect(),
            Configuration::Points(p) => p.clone(),
        }
    }

    /// Area, side-length product, volume or modulus product, whichever the
    /// configuration's hypothesis constrains to 1.
    pub fn measure(&self) -> Option<f64> {
        match self {
            Configuration::Rectangle(p) | Configuration::Parallelogram(p) => {
                Some(p.u.norm() * p.v.norm())
            }
            Configuration::Box(b) => Some(b.volume()),
            Configuration::Skeleton(s) => Some(s.modulus_product()),
            Configuration::Points(_) => None,
        }
    }

    pub fn to_file(&self) -> ConfigFile {
        match self {
            Configuration::Rectangle(p) => ConfigFile::Rectangle2d {
                params: RectangleParams {
                    corner: pair(p.z),
                    width: p.u.norm(),
                    height: p.v.norm(),
                    angle: p.u.arg(),
                },
            },
            Configuration::Parallelogram(p) => ConfigFile::Parallelogram {
                params: ParallelogramParams {
                    z: pair(p.z),
                    u: pair(p.u),
                    v: pair(p.v),
                },
            },
            Configuration::Box(b) => ConfigFile::Box {
                params: BoxParams {
                    q: b.aligned().base().as_slice().to_vec(),
                    a: b.aligned().edges().to_vec(),
                    rotation: Some(b.rotation().rows()),
                },
            },
            Configuration::Skeleton(s) => ConfigFile::Skeleton {
                params: SkeletonParams {
                    z: pair(s.z),
                    u: s.u.iter().map(|&u| pair(u)).collect(),
                },
            },
            Configuration::Points(p) => ConfigFile::Points {
                points: p.clone(),
                n: p[0].len(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_round_trip() {
        let json = r#"{"type":"rectangle2d","params":{"corner":[0.5,-1],"width":2,"height":0.5,"angle":0.3}}"#;
        let cfg = ConfigFile::from_json(json).unwrap().validate().unwrap();
        assert!((cfg.measure().unwrap() - 1.0).abs() < 1e-15);
        let back = ConfigFile::from_json(&cfg.to_file().to_json().unwrap())
            .unwrap()
            .validate()
            .unwrap();
        for (a, b) in cfg.points().iter().zip(back.points()) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn box_defaults_to_identity() {
        let json = r#"{"type":"box","params":{"q":[1,1],"a":[2,0.5]}}"#;
        let cfg = ConfigFile::from_json(json).unwrap().validate().unwrap();
        assert_eq!(cfg.points().len(), 4);
        assert_eq!(cfg.points()[3], vec![3.0, 1.5]);
    }

    #[test]
    fn rejects_bad_documents() {
        for json in [
            r#"{"type":"box","params":{"q":[1],"a":[2,0.5]}}"#,
            r#"{"type":"box","params":{"q":[1,1],"a":[2,0.5],"rotation":[[1,1],[0,1]]}}"#,
            r#"{"type":"points","points":[[1,2],[3]],"n":2}"#,
            r#"{"type":"rectangle2d","params":{"corner":[0,0],"width":-1,"height":1}}"#,
            r#"{"type":"skeleton","params":{"z":[0,0],"u":[[1,0]]}}"#,
            r#"{"type":"circle","params":{}}"#,
        ] {
            let parsed = ConfigFile::from_json(json).and_then(|f| f.validate());
            assert!(parsed.is_err(), "{json}");
        }
    }

    #[test]
    fn skeleton_and_points() {
        let json = r#"{"type":"skeleton","params":{"z":[0,0],"u":[[1,0],[0,1]]}}"#;
        let cfg = ConfigFile::from_json(json).unwrap().validate().unwrap();
        assert_eq!(cfg.points().len(), 4);
        let json = r#"{"type":"points","points":[[0,0,0],[1,2,3]],"n":3}"#;
        let cfg = ConfigFile::from_json(json).unwrap().validate().unwrap();
        assert_eq!(cfg.dim(), 3);
        assert_eq!(cfg.to_file(), ConfigFile::from_json(json).unwrap());
    }
}
