//! Boundaries of the 25 plane color classes: the hyperbola families
//! `x² - y² = 2a/3` and `xy = b/3` for integers `a, b`.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if x0 >= x1 || y0 >= y1 {
            return Err(Error::Precondition(format!(
                "empty window [{x0},{x1}]x[{y0},{y1}]"
            )));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `x² - y² = 2a/3`
    RealPart,
    /// `xy = b/3`
    ImagPart,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RealPart => "real",
            Family::ImagPart => "imag",
        }
    }
}

/// One clipped polyline of a boundary curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub family: Family,
    pub parameter: i64,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn level(&self) -> f64 {
        match self.family {
            Family::RealPart => 2.0 * self.parameter as f64 / 3.0,
            Family::ImagPart => self.parameter as f64 / 3.0,
        }
    }

    pub fn residual(&self, x: f64, y: f64) -> f64 {
        match self.family {
            Family::RealPart => (x - y) * (x + y) - self.level(),
            Family::ImagPart => x * y - self.level(),
        }
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(move |i| {
        if i + 1 == count {
            hi
        } else {
            lo + step * i as f64
        }
    })
}

/// Splits a sampled branch into runs of in-window points.
fn clip(
    family: Family,
    parameter: i64,
    window: &Window,
    pts: Vec<(f64, f64)>,
    out: &mut Vec<Curve>,
) {
    let mut run = Vec::new();
    for (x, y) in pts {
        if window.contains(x, y) {
            run.push((x, y));
        } else if !run.is_empty() {
            let points = std::mem::take(&mut run);
            if points.len() >= 2 {
                out.push(Curve {
                    family,
                    parameter,
                    points,
                });
            }
        }
    }
    if run.len() >= 2 {
        out.push(Curve {
            family,
            parameter,
            points: run,
        });
    }
}

fn real_part_branches(c: f64, w: &Window, samples: usize) -> Vec<Vec<(f64, f64)>> {
    if c > 0.0 {
        [1.0, -1.0]
            .iter()
            .map(|&s| {
                linspace(w.y0, w.y1, samples)
                    .map(|y| (s * (c + y * y).sqrt(), y))
                    .collect()
            })
            .collect()
    } else if c < 0.0 {
        [1.0, -1.0]
            .iter()
            .map(|&s| {
                linspace(w.x0, w.x1, samples)
                    .map(|x| (x, s * (x * x - c).sqrt()))
                    .collect()
            })
            .collect()
    } else {
        [1.0, -1.0]
            .iter()
            .map(|&s| linspace(w.x0, w.x1, samples).map(|x| (x, s * x)).collect())
            .collect()
    }
}

fn imag_part_branches(d: f64, w: &Window, samples: usize) -> Vec<Vec<(f64, f64)>> {
    if d == 0.0 {
        return vec![
            linspace(w.x0, w.x1, samples).map(|x| (x, 0.0)).collect(),
            linspace(w.y0, w.y1, samples).map(|y| (0.0, y)).collect(),
        ];
    }
    let x_max = w.x0.abs().max(w.x1.abs());
    let y_max = w.y0.abs().max(w.y1.abs());
    let x_min = d.abs() / y_max;
    if x_min >= x_max {
        return Vec::new();
    }
    let (lo, hi) = (x_min.ln(), x_max.ln());
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            linspace(lo, hi, samples)
                .map(|t| {
                    let x = s * t.exp();
                    (x, d / x)
                })
                .collect()
        })
        .collect()
}

/// Sampled, window-clipped boundary curves for `a ∈ a_range`, `b ∈ b_range`.
pub fn boundary_curves(
    window: &Window,
    a_range: RangeInclusive<i64>,
    b_range: RangeInclusive<i64>,
    samples: usize,
) -> Vec<Curve> {
    let samples = samples.max(2);
    let mut out = Vec::new();
    for a in a_range {
        let c = 2.0 * a as f64 / 3.0;
        for branch in real_part_branches(c, window, samples) {
            clip(Family::RealPart, a, window, branch, &mut out);
        }
    }
    for b in b_range {
        let d = b as f64 / 3.0;
        for branch in imag_part_branches(d, window, samples) {
            clip(Family::ImagPart, b, window, branch, &mut out);
        }
    }
    out
}

pub fn to_csv(curves: &[Curve]) -> String {
    let mut s = String::from("family,parameter,x,y\n");
    for c in curves {
        for (x, y) in &c.points {
            let _ = writeln!(s, "{},{},{x},{y}", c.family.name(), c.parameter);
        }
    }
    s
}

pub fn to_svg(curves: &[Curve], window: &Window) -> String {
    let (w, h) = (window.x1 - window.x0, window.y1 - window.y0);
    let stroke = w.max(h) / 400.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="{}" viewBox="{} {} {w} {h}">"#,
        (800.0 * h / w).round(),
        window.x0,
        -window.y1
    );
    let _ = writeln!(
        s,
        r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}">"#
    );
    for c in curves {
        let colour = match c.family {
            Family::RealPart => "#1f77b4",
            Family::ImagPart => "#d62728",
        };
        let pts: Vec<String> = c.points.iter().map(|(x, y)| format!("{x},{y}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="{}" data-parameter="{}" stroke="{colour}" points="{}"/>"#,
            c.family.name(),
            c.parameter,
            pts.join(" ")
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
