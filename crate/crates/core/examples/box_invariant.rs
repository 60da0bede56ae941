//! For a unit-volume box rotated slightly away from the axes, the signed
//! vertex-product sum J stays within 1/4 of ±1.

use monobox::box_invariant::{invariant_j, paper_eps, perturbation_bound_check, sharp_eps};
use monobox::geometry::{AlignedBox, OrientedBox, RealVec, Rotation};

fn main() -> monobox::Result<()> {
    let n = 3;
    println!("eps: paper {:.6}, sharp {:.6}", paper_eps(n), sharp_eps(n));

    let rotation = Rotation::from_quaternion([1.0, 0.004, -0.006, 0.002]);
    let b = OrientedBox::new(
        AlignedBox::new(RealVec::new(vec![2.0, -1.0, 5.0])?, vec![8.0, 0.25, 0.5])?,
        rotation,
    )?;
    let j = invariant_j(&b)?;
    println!(
        "J = {:.9} (base vertex mask {:#05b})",
        j.value, j.base_subset
    );

    let r = perturbation_bound_check(&b, sharp_eps(n))?;
    println!("|U - I| = {:.6}", r.rotation_distance);
    println!(
        "|perm - vol| = {:.3e} <= {:.3e} = vol/4",
        r.deviation, r.bound
    );
    println!(
        "diagonal {:.3e} <= {:.3e}",
        r.diagonal_deviation, r.diagonal_bound
    );
    println!(
        "off-diagonal {:.3e} <= {:.3e}",
        r.off_diagonal_mass, r.off_diagonal_bound
    );
    println!("|J| in (3/4, 5/4): {:?}", r.j_in_interval);
    Ok(())
}
