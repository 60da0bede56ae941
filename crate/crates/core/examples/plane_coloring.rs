//! Colors a few points of the plane and shows why no unit-area rectangle is
//! monochromatic: the alternating sum of squared vertices has modulus 2.

use monobox::geometry::ComplexPoint;
use monobox::plane::{invariant_i, plane_color, Parallelogram};

fn main() {
    for (x, y) in [(0.0, 0.0), (1.0, 0.0), (0.3, 0.9), (-2.5, 1.25)] {
        let r = plane_color(ComplexPoint::new(x, y));
        println!(
            "({x:>5}, {y:>5}) -> class ({}, {})  margin {:.4}",
            r.color.j, r.color.k, r.margin
        );
    }

    // a long thin rectangle of area 1, tilted by 0.4 rad
    let dir = ComplexPoint::from_polar(1.0, 0.4);
    let rect = Parallelogram::new(
        ComplexPoint::new(3.0, -1.0),
        dir * 40.0,
        dir * ComplexPoint::i() / 40.0,
    );
    println!("\nrectangle vertices and classes:");
    for z in rect.vertices() {
        let c = plane_color(z).color;
        println!("  {:>9.4} {:>9.4}  ({}, {})", z.re, z.im, c.j, c.k);
    }
    let i = invariant_i(&rect);
    println!("I = {:.6} {:+.6}i, |I| = {:.12}", i.re, i.im, i.norm());
}
