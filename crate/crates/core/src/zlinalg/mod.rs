//! Exact integer linear algebra: Smith normal form and solvability of linear systems over ℤ
//! modulo a relation lattice.
//!
//! Every "no relations" argument is an `n x 0` matrix rather than an option, so there is a
//! single code path for free and presented groups.

mod matrix;
mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfResult};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("shape error: {message}")]
pub struct ShapeError {
    pub message: String,
}

impl ShapeError {
    pub fn new(message: impl Into<String>) -> Self {
        ShapeError { message: message.into() }
    }
}

/// Invariant factors of a finitely generated abelian group: nonzero factors `> 1` in
/// divisibility order, followed by one `0` per free summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantFactors {
    pub factors: Vec<BigInt>,
}

impl InvariantFactors {
    /// For the group `ℤ^n / im(relations)` with `relations` of shape `n x m`.
    pub fn of_presentation(relations: &IntMatrix) -> Self {
        let snf = smith_normal_form(relations);
        let n = relations.rows();
        let diag = snf.diagonal();
        let mut factors: Vec<BigInt> = diag.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
        let rank = snf.rank();
        factors.extend(std::iter::repeat_n(BigInt::zero(), n - rank));
        InvariantFactors { factors }
    }

    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    /// Order of the group, `None` when it is infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(self.factors.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{}", d) }).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Find `X` with `A·X ≡ B` modulo the column lattice of `relations_dst`.
///
/// Returns the particular solution read off the Smith form (free coordinates set to zero), so
/// the answer is deterministic.
pub fn solve_matrix_equation(
    a: &IntMatrix,
    b: &IntMatrix,
    relations_dst: &IntMatrix,
) -> Result<Option<IntMatrix>, ShapeError> {
    if a.rows() != b.rows() || a.rows() != relations_dst.rows() {
        return Err(ShapeError::new(format!(
            "solve: A is {}x{}, B is {}x{}, relations are {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            relations_dst.rows(),
            relations_dst.cols()
        )));
    }
    let n = a.cols();
    let m = a.hstack(relations_dst)?;
    let snf = smith_normal_form(&m);
    let ub = snf.u.mul(b)?;
    let diag = snf.diagonal();
    let unknowns = m.cols();
    let mut w = IntMatrix::zeros(unknowns, b.cols());
    for i in 0..ub.rows() {
        let d = diag.get(i).cloned().unwrap_or_default();
        for j in 0..b.cols() {
            let rhs = ub.get(i, j);
            if d.is_zero() {
                if !rhs.is_zero() {
                    return Ok(None);
                }
            } else {
                let (q, r) = rhs.div_rem(&d);
                if !r.is_zero() {
                    return Ok(None);
                }
                w.set(i, j, q);
            }
        }
    }
    let z = snf.v.mul(&w)?;
    Ok(Some(z.select_rows(0..n)))
}

/// Is every column of `gens_a` in the subgroup generated by the columns of `gens_b` and
/// `relations`?
pub fn lattice_contains(gens_a: &IntMatrix, gens_b: &IntMatrix, relations: &IntMatrix) -> Result<bool, ShapeError> {
    if gens_a.rows() != gens_b.rows() || gens_a.rows() != relations.rows() {
        return Err(ShapeError::new(format!(
            "lattice_contains: row counts {}, {}, {} differ",
            gens_a.rows(),
            gens_b.rows(),
            relations.rows()
        )));
    }
    Ok(solve_matrix_equation(gens_b, gens_a, relations)?.is_some())
}

/// Two generator sets span the same subgroup modulo `relations`.
pub fn lattice_equal(gens_a: &IntMatrix, gens_b: &IntMatrix, relations: &IntMatrix) -> Result<bool, ShapeError> {
    Ok(lattice_contains(gens_a, gens_b, relations)? && lattice_contains(gens_b, gens_a, relations)?)
}

/// Generators of `{ x : A·x ∈ column lattice of relations_dst }`, in column echelon form.
pub fn kernel_generators(a: &IntMatrix, relations_dst: &IntMatrix) -> Result<IntMatrix, ShapeError> {
    if a.rows() != relations_dst.rows() {
        return Err(ShapeError::new(format!(
            "kernel: A has {} rows but relations have {}",
            a.rows(),
            relations_dst.rows()
        )));
    }
    let n = a.cols();
    let m = a.hstack(relations_dst)?;
    let snf = smith_normal_form(&m);
    let rank = snf.rank();
    let idx: Vec<usize> = (rank..m.cols()).collect();
    let kernel = snf.v.select_cols(&idx).select_rows(0..n);
    Ok(lattice_basis(&kernel))
}

/// A basis of the lattice spanned by the columns of `gens`, in column echelon form with
/// positive pivots. Zero columns disappear.
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let mut g = gens.clone();
    let rows = g.rows();
    let mut next = 0;
    for r in 0..rows {
        if next >= g.cols() {
            break;
        }
        // Euclid across columns next.. on row r.
        loop {
            let mut best: Option<(usize, BigInt)> = None;
            for j in next..g.cols() {
                let x = g.get(r, j);
                if !x.is_zero() && best.as_ref().is_none_or(|(_, b)| x.abs() < *b) {
                    best = Some((j, x.abs()));
                }
            }
            let Some((p, _)) = best else { break };
            g.swap_cols(next, p);
            let mut done = true;
            for j in next + 1..g.cols() {
                if g.get(r, j).is_zero() {
                    continue;
                }
                let q = -(g.get(r, j) / g.get(r, next));
                g.add_col_multiple(j, next, &q);
                done &= g.get(r, j).is_zero();
            }
            if done {
                if g.get(r, next).is_negative() {
                    g.negate_col(next);
                }
                next += 1;
                break;
            }
        }
    }
    let keep: Vec<usize> = (0..next).collect();
    g.select_cols(&keep)
}

/// Whether every column of `v` lies in the relation lattice, i.e. `v ≡ 0`.
pub fn is_in_lattice(v: &IntMatrix, relations: &IntMatrix) -> Result<bool, ShapeError> {
    let empty = IntMatrix::zeros(v.rows(), 0);
    lattice_contains(v, &empty, relations)
}

/// `|det|` of a square matrix, as the product of its Smith diagonal.
pub fn abs_determinant(a: &IntMatrix) -> Option<BigInt> {
    if !a.is_square() {
        return None;
    }
    let snf = smith_normal_form(a);
    Some(snf.diagonal().iter().fold(BigInt::one(), |acc, d| acc * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn none(n: usize) -> IntMatrix {
        IntMatrix::zeros(n, 0)
    }

    #[test]
    fn invariant_factors_of_small_presentations() {
        // ℤ²/⟨(2,0),(0,3)⟩ ≅ ℤ/6.
        let f = InvariantFactors::of_presentation(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(f.to_string(), "Z/6");
        assert_eq!(f.order(), Some(BigInt::from(6)));
        let f = InvariantFactors::of_presentation(&m(&[vec![4], vec![0]]));
        assert_eq!(f.to_string(), "Z/4 + Z");
        assert_eq!(f.order(), None);
        assert!(InvariantFactors::of_presentation(&m(&[vec![1]])).is_trivial());
    }

    #[test]
    fn solves_over_the_integers_and_modulo_relations() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        let x = solve_matrix_equation(&a, &m(&[vec![4], vec![9]]), &none(2)).unwrap().unwrap();
        assert_eq!(x, m(&[vec![2], vec![3]]));
        // 2x = 1 has no integer solution, but does modulo 3.
        assert!(solve_matrix_equation(&m(&[vec![2]]), &m(&[vec![1]]), &none(1)).unwrap().is_none());
        let x = solve_matrix_equation(&m(&[vec![2]]), &m(&[vec![1]]), &m(&[vec![3]])).unwrap().unwrap();
        assert_eq!((2 * x.get(0, 0) - 1i32) % 3, BigInt::zero());
        assert!(solve_matrix_equation(&a, &m(&[vec![1]]), &none(2)).is_err());
    }

    #[test]
    fn kernels_and_lattices() {
        // x + y = 0 over ℤ.
        let k = kernel_generators(&m(&[vec![1, 1]]), &none(1)).unwrap();
        assert_eq!(k.cols(), 1);
        assert!(lattice_equal(&k, &m(&[vec![1], vec![-1]]), &none(2)).unwrap());
        // 2x ≡ 0 mod 4: x even.
        let k = kernel_generators(&m(&[vec![2]]), &m(&[vec![4]])).unwrap();
        assert_eq!(k, m(&[vec![2]]));
        assert!(lattice_contains(&m(&[vec![6]]), &m(&[vec![2]]), &none(1)).unwrap());
        assert!(!lattice_contains(&m(&[vec![3]]), &m(&[vec![2]]), &none(1)).unwrap());
        assert!(is_in_lattice(&m(&[vec![10]]), &m(&[vec![5]])).unwrap());
        assert_eq!(lattice_basis(&m(&[vec![4, 6, 0]])), m(&[vec![2]]));
    }

    #[test]
    fn determinants() {
        assert_eq!(abs_determinant(&m(&[vec![2, 1], vec![7, 4]])), Some(BigInt::one()));
        assert_eq!(abs_determinant(&m(&[vec![0, 3], vec![2, 0]])), Some(BigInt::from(6)));
        assert_eq!(abs_determinant(&m(&[vec![1, 2]])), None);
    }
}
