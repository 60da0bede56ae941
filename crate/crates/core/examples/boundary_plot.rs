//! Writes the class boundaries of the plane coloring to an SVG file
//! (first argument, default `boundaries.svg`).

use monobox::boundary::{boundary_curves, to_svg, Window};

fn main() -> monobox::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "boundaries.svg".into());
    let window = Window::new(-3.0, -3.0, 3.0, 3.0)?;
    let curves = boundary_curves(&window, -9..=9, -9..=9, 400);
    std::fs::write(&out, to_svg(&curves, &window))?;
    println!("{} curves written to {out}", curves.len());
    Ok(())
}
