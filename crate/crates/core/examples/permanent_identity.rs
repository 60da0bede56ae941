//! The alternating sum of vertex-coordinate products of a parallelotope
//! equals the permanent of its edge matrix, whatever the base point.

use monobox::permanent::{
    alternating_subset_sum, identity_check, permanent_factorial, permanent_ryser, SquareMatrix,
};
use monobox::scalar::rat;

fn main() -> monobox::Result<()> {
    let v = SquareMatrix::from_rows(vec![
        vec![2.0, -1.0, 0.5],
        vec![0.25, 3.0, 1.0],
        vec![-1.5, 0.5, 4.0],
    ])?;
    for p in [[0.0, 0.0, 0.0], [7.0, -3.0, 1.5]] {
        println!(
            "base {p:?}: alternating sum = {:.12}",
            alternating_subset_sum(&p, &v)?
        );
    }
    println!(
        "Ryser = {:.12}, factorial = {:.12}",
        permanent_ryser(&v)?,
        permanent_factorial(&v)?
    );

    let exact = SquareMatrix::from_rows(vec![
        vec![rat(1, 3), rat(-2, 5)],
        vec![rat(7, 2), rat(1, 1)],
    ])?;
    let check = identity_check(&[rat(5, 7), rat(-11, 3)], &exact)?;
    println!(
        "rational: lhs = {}, rhs = {}, exact = {}",
        check.lhs,
        check.rhs,
        check.is_exact()
    );
    Ok(())
}
