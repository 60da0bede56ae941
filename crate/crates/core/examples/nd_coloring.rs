//! Composite colors of R^3 and the fast-path check for a unit-volume box.

use monobox::geometry::{AlignedBox, OrientedBox, RealVec};
use monobox::harness::{gen_unit_volume_box, Ranges};
use monobox::nd_coloring::CompositeColoring;
use monobox::net::{build_net, NetSpec};

fn main() -> monobox::Result<()> {
    let coloring = CompositeColoring::new(build_net(NetSpec::sharp(3))?);
    let color = coloring.color(&[1.0, -2.0, 0.5]);
    let head: Vec<u32> = color.prefix(8).iter().map(|r| r.index).collect();
    println!("{} entries, first {:?}", color.len(), head);

    let b = gen_unit_volume_box(7, 3, &Ranges::default())?;
    let v = coloring.box_monochromatic(&b)?;
    println!(
        "random unit box: monochromatic {}, witness {:?}, fast path {}, margin {:.3e}",
        v.monochromatic, v.witness, v.fast_path, v.min_margin
    );

    // volume 8: outside the hypothesis, the verdict is whatever it is
    let big = OrientedBox::new(
        AlignedBox::new(RealVec::new(vec![0.3, 0.2, 0.1])?, vec![2.0; 3])?,
        b.rotation().clone(),
    )?;
    println!("volume-8 box: {:?}", coloring.box_monochromatic(&big)?);
    Ok(())
}
