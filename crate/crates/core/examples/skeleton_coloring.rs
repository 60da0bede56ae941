//! Planar images of box skeletons: 2^n points z + Σ r_j u_j with
//! Π|u_j| = 1 never share a class of the degree-n scheme.

use monobox::harness::{gen_unit_product_skeleton, Ranges};
use monobox::permanent::complex_power_identity_check;
use monobox::plane::SkeletonColorScheme;

fn main() -> monobox::Result<()> {
    for n in 2..=5u32 {
        let s = SkeletonColorScheme::new(n)?;
        println!(
            "n={n}: scale {}, {} subdivisions, {} colors",
            s.scale(),
            s.subdivisions(),
            s.num_colors()
        );
    }

    let scheme = SkeletonColorScheme::new(3)?;
    let sk = gen_unit_product_skeleton(5, 3, &Ranges::default())?;
    let colors: Vec<_> = sk
        .vertices()
        .iter()
        .map(|&z| scheme.color(z).color)
        .collect();
    println!("\nskeleton with product {:.12}:", sk.modulus_product());
    for c in &colors {
        println!("  ({}, {})", c.j, c.k);
    }

    let check = complex_power_identity_check(sk.z, &sk.u)?;
    println!("power identity: lhs {:.9}, rhs {:.9}", check.lhs, check.rhs);
    Ok(())
}
