//! Permanents and the alternating subset-sum identity
//!
//! ```text
//! Σ_{T⊆{1..n}} (-1)^{n-|T|} Π_k (p_k + Σ_{j∈T} v_{j,k}) = perm(V)
//! ```
//!
//! together with its specialization `p_k = z`, `v_{j,k} = u_j`, which reads
//! `Σ_T (-1)^{n-|T|} (z + Σ_{j∈T} u_j)^n = n! u_1⋯u_n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Complex64, Scalar};

/// Largest `n` accepted by the subset-sum and inclusion–exclusion evaluators.
pub const MAX_SUBSET_DIM: usize = 20;
/// Largest `n` accepted by the factorial-sum evaluator.
pub const MAX_FACTORIAL_DIM: usize = 12;
/// Largest `n` accepted by the complex power identity.
pub const MAX_POWER_DIM: usize = 16;

/// Row-major `n×n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<S> {
    n: usize,
    entries: Vec<S>,
}

impl<S: Scalar> SquareMatrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let entries = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.entries[row * self.n + col]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SquareMatrix<T> {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

fn guard(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge {
            what,
            got: n,
            limit,
        });
    }
    Ok(())
}

/// Whether `(-1)^{n-size}` is negative.
fn odd_gap(n: usize, size: u32) -> bool {
    (n - size as usize) % 2 == 1
}

/// Left-hand side of the identity, evaluated literally over all `2^n` subsets.
pub fn alternating_subset_sum<S: Scalar>(p: &[S], v: &SquareMatrix<S>) -> Result<S> {
    let n = v.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    guard("alternating subset sum", n, MAX_SUBSET_DIM)?;
    let mut total = S::zero();
    for mask in 0u32..(1 << n) {
        let mut prod = S::one();
        for (k, pk) in p.iter().enumerate() {
            let mut coord = pk.clone();
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    coord = coord + v.get(j, k).clone();
                }
            }
            prod = prod * coord;
        }
        if odd_gap(n, mask.count_ones()) {
            total = total - prod;
        } else {
            total = total + prod;
        }
    }
    Ok(total)
}

/// `Σ_{σ∈S_n} Π_j v_{j,σ(j)}`, summed term by term (depth-first over
/// partial permutations). This is the reference evaluator.
pub fn permanent_factorial<S: Scalar>(v: &SquareMatrix<S>) -> Result<S> {
    let n = v.dim();
    guard("factorial-sum permanent", n, MAX_FACTORIAL_DIM)?;
    fn walk<S: Scalar>(v: &SquareMatrix<S>, row: usize, used: u32, acc: S) -> S {
        let n = v.dim();
        if row == n {
            return acc;
        }
        let mut total = S::zero();
        for col in 0..n {
            if used & (1 << col) == 0 {
                let term = acc.clone() * v.get(row, col).clone();
                total = total + walk(v, row + 1, used | (1 << col), term);
            }
        }
        total
    }
    Ok(walk(v, 0, 0, S::one()))
}

/// Ryser's inclusion–exclusion formula over column subsets, visited in Gray
/// code order so each step updates the row sums by one column.
pub fn permanent_ryser<S: Scalar>(v: &SquareMatrix<S>) -> Result<S> {
    let n = v.dim();
    guard("inclusion-exclusion permanent", n, MAX_SUBSET_DIM)?;
    if n == 0 {
        return Ok(S::one());
    }
    let mut row_sums = vec![S::zero(); n];
    let mut total = S::zero();
    let mut gray = 0u32;
    for step in 1u32..(1 << n) {
        let next = step ^ (step >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let adding = next & (1 << col) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            let e = v.get(i, col).clone();
            *sum = if adding {
                sum.clone() + e
            } else {
                sum.clone() - e
            };
        }
        gray = next;
        let prod = row_sums.iter().fold(S::one(), |acc, s| acc * s.clone());
        if odd_gap(n, gray.count_ones()) {
            total = total - prod;
        } else {
            total = total + prod;
        }
    }
    Ok(total)
}

/// Permanent via inclusion–exclusion (valid up to `n = 20`).
pub fn permanent<S: Scalar>(v: &SquareMatrix<S>) -> Result<S> {
    permanent_ryser(v)
}

/// Both sides of an identity and their discrepancy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck<S> {
    pub lhs: S,
    pub rhs: S,
    pub abs_error: f64,
    /// `abs_error / max(|lhs|, |rhs|)`, or 0 when both sides vanish.
    pub rel_error: f64,
}

impl<S: Scalar> IdentityCheck<S> {
    fn new(lhs: S, rhs: S) -> Self {
        let abs_error = (lhs.clone() - rhs.clone()).modulus();
        let scale = lhs.modulus().max(rhs.modulus());
        let rel_error = if scale == 0.0 {
            abs_error
        } else {
            abs_error / scale
        };
        Self {
            lhs,
            rhs,
            abs_error,
            rel_error,
        }
    }

    /// Exact equality of the two sides (meaningful in rational mode).
    pub fn is_exact(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn identity_check<S: Scalar>(p: &[S], v: &SquareMatrix<S>) -> Result<IdentityCheck<S>> {
    let lhs = alternating_subset_sum(p, v)?;
    let rhs = permanent(v)?;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// `Σ_T (-1)^{n-|T|} (z + Σ_{j∈T} u_j)^n` against `n! Π u_j`.
pub fn complex_power_identity_check(
    z: Complex64,
    u: &[Complex64],
) -> Result<IdentityCheck<Complex64>> {
    let n = u.len();
    guard("complex power identity", n, MAX_POWER_DIM)?;
    let mut lhs = Complex64::new(0.0, 0.0);
    for mask in 0u32..(1 << n) {
        let mut w = z;
        for (j, uj) in u.iter().enumerate() {
            if mask & (1 << j) != 0 {
                w += uj;
            }
        }
        let term = w.powu(n as u32);
        if odd_gap(n, mask.count_ones()) {
            lhs -= term;
        } else {
            lhs += term;
        }
    }
    let fact = (1..=n).map(|k| k as f64).product::<f64>();
    let rhs = u.iter().fold(Complex64::new(fact, 0.0), |acc, uj| acc * uj);
    Ok(IdentityCheck::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num::rational::BigRational;

    fn m(rows: Vec<Vec<f64>>) -> SquareMatrix<f64> {
        SquareMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn subset_sum_base_case_exact() {
        let p = vec![rat(7, 3)];
        let v = SquareMatrix::from_rows(vec![vec![rat(-5, 2)]]).unwrap();
        let check = identity_check(&p, &v).unwrap();
        assert!(check.is_exact());
        assert_eq!(check.lhs, rat(-5, 2));
        assert_eq!(check.abs_error, 0.0);
    }

    #[test]
    fn subset_sum_two_by_two() {
        // T=∅: 0·0; {1}: 1·2; {2}: 3·4; {1,2}: 4·6 → 0 - 2 - 12 + 24
        let v = m(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(alternating_subset_sum(&[0.0, 0.0], &v).unwrap(), 10.0);
        assert_eq!(permanent(&v).unwrap(), 10.0);
        assert_eq!(permanent_factorial(&v).unwrap(), 10.0);
    }

    #[test]
    fn zero_matrix_cancels() {
        for n in 1..=5 {
            let v = SquareMatrix::<f64>::from_fn(n, |_, _| 0.0);
            let p: Vec<f64> = (0..n).map(|k| k as f64 + 0.5).collect();
            assert_eq!(alternating_subset_sum(&p, &v).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_and_diagonal_permanents() {
        for n in 0..=6 {
            assert_eq!(permanent(&SquareMatrix::<f64>::identity(n)).unwrap(), 1.0);
        }
        let d = SquareMatrix::from_fn(4, |i, j| if i == j { (i + 2) as f64 } else { 0.0 });
        assert_eq!(permanent(&d).unwrap(), 2.0 * 3.0 * 4.0 * 5.0);
        assert_eq!(permanent_factorial(&d).unwrap(), 120.0);
    }

    #[test]
    fn all_ones_permanent_is_factorial() {
        let ones = SquareMatrix::<BigRational>::from_fn(7, |_, _| rat(1, 1));
        assert_eq!(permanent(&ones).unwrap(), rat(5040, 1));
        assert_eq!(permanent_factorial(&ones).unwrap(), rat(5040, 1));
    }

    #[test]
    fn complex_entries_satisfy_identity() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let v = SquareMatrix::from_rows(vec![
            vec![c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0)],
            vec![c(0.1, 0.0), c(3.0, 1.5), c(-2.0, 0.7)],
            vec![c(1.2, -0.4), c(0.0, 1.0), c(0.8, 0.8)],
        ])
        .unwrap();
        let p = vec![c(0.3, -1.0), c(2.0, 0.5), c(-1.5, 0.2)];
        let check = identity_check(&p, &v).unwrap();
        assert!(check.rel_error <= 1e-9, "{check:?}");
        let fact = permanent_factorial(&v).unwrap();
        assert!((fact - check.rhs).norm() <= 1e-12 * fact.norm());
    }

    #[test]
    fn power_identity_square() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let check = complex_power_identity_check(c(0.0, 0.0), &[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(check.rhs, c(0.0, 2.0));
        assert!(check.abs_error < 1e-15);
    }

    #[test]
    fn power_identity_zero_factor() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let u = [c(0.7, -0.2), c(0.0, 0.0), c(1.1, 0.4), c(-0.3, 0.9)];
        let check = complex_power_identity_check(c(0.5, 0.5), &u).unwrap();
        assert_eq!(check.rhs, c(0.0, 0.0));
        assert!(check.lhs.norm() <= 1e-9 * 3.0_f64.powi(4));
    }

    #[test]
    fn size_guards() {
        let big = SquareMatrix::<f64>::identity(13);
        assert!(matches!(
            permanent_factorial(&big),
            Err(Error::TooLarge { .. })
        ));
        assert!(permanent(&big).is_ok());
        let huge = SquareMatrix::<f64>::identity(21);
        assert!(permanent(&huge).is_err());
        let v = SquareMatrix::<f64>::identity(2);
        assert!(matches!(
            alternating_subset_sum(&[0.0], &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
