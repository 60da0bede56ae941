//! Exact check that the circle |w| = 2 avoids every open lattice cell used by
//! the plane coloring, and that a slightly wider cell breaks it.

use monobox::scalar::rat;
use monobox::separation::{separation_certificate, CellVerdict, LatticeCellSet};

fn main() -> monobox::Result<()> {
    let cells = LatticeCellSet::new(rat(10, 3), rat(2, 5))?;
    let cert = separation_certificate(&cells, &rat(4, 1))?;
    println!("cells listed: {}, pass: {}", cert.cells.len(), cert.pass);
    for c in cert
        .cells
        .iter()
        .filter(|c| c.verdict != CellVerdict::Outside || c.tangent)
    {
        println!(
            "  offset {:?}: m^2 = {}, M^2 = {}, {:?}{}",
            c.offset,
            c.min_dist_sq,
            c.max_dist_sq,
            c.verdict,
            if c.tangent { " (tangent)" } else { "" }
        );
    }

    let wider =
        separation_certificate(&LatticeCellSet::new(rat(10, 3), rat(49, 100))?, &rat(4, 1))?;
    println!(
        "half width 49/100: pass = {}, {} cells cut by the circle",
        wider.pass, wider.failures
    );
    Ok(())
}
