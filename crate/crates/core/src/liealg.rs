//! Cartan matrices for the A and tadpole families, exact rational linear
//! algebra, Kronecker products and the effective central charge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{fmt_rat, parse_rat, Rat};

/// The two Dynkin families used by the search: `A_r` and the tadpole `T_r`
/// (the `rr` entry of its Cartan matrix is 1 instead of 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    A,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DynkinSpec {
    pub family: Family,
    pub rank: u32,
}

impl DynkinSpec {
    pub fn new(family: Family, rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invalid("Dynkin rank must be at least 1"));
        }
        Ok(DynkinSpec { family, rank })
    }

    /// Dual Coxeter number: `h(A_r) = r + 1`, `h(T_r) = 2r + 1`.
    pub fn dual_coxeter(&self) -> u32 {
        match self.family {
            Family::A => self.rank + 1,
            Family::T => 2 * self.rank + 1,
        }
    }
}

/// Dense matrix of exact rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixQ {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl MatrixQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        MatrixQ {
            rows,
            cols,
            entries: vec![Rat::new(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixQ::zeros(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = Rat::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::invalid("matrix must be nonempty"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let r = rows.len();
        Ok(MatrixQ {
            rows: r,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &MatrixQ) -> Result<MatrixQ> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = MatrixQ::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                for j in 0..other.cols {
                    let add = Rat::from(a * other.get(k, j));
                    *out.get_mut(i, j) += add;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch("matrix-vector".into()));
        }
        let mut out = vec![Rat::new(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i] += Rat::from(self.get(i, j) * &v[j]);
            }
        }
        Ok(out)
    }

    /// Exact inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn invert(&self) -> Result<MatrixQ> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = MatrixQ::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| a.get(r, col).cmp0() != std::cmp::Ordering::Equal)
                .ok_or(Error::SingularMatrix)?;
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let pivot = a.get(col, col).clone();
            let pivot_inv = Rat::from(pivot.recip_ref());
            for j in 0..n {
                *a.get_mut(col, j) *= &pivot_inv;
                *inv.get_mut(col, j) *= &pivot_inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                for j in 0..n {
                    let sub_a = Rat::from(&factor * a.get(col, j));
                    *a.get_mut(r, j) -= sub_a;
                    let sub_i = Rat::from(&factor * inv.get(col, j));
                    *inv.get_mut(r, j) -= sub_i;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.cols {
            self.entries.swap(r1 * self.cols + j, r2 * self.cols + j);
        }
    }

    /// Kronecker product with the standard block layout.
    pub fn kronecker(&self, other: &MatrixQ) -> MatrixQ {
        let mut out = MatrixQ::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        *out.get_mut(i * other.rows + p, j * other.cols + q) =
                            Rat::from(a * other.get(p, q));
                    }
                }
            }
        }
        out
    }

    /// Exact positive-definiteness test: symmetric and all Gaussian pivots
    /// positive (equivalently all leading principal minors positive).
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        let mut a = self.clone();
        for col in 0..n {
            let pivot = a.get(col, col).clone();
            if pivot.cmp0() != std::cmp::Ordering::Greater {
                return false;
            }
            for r in (col + 1)..n {
                let factor = Rat::from(a.get(r, col) / &pivot);
                if factor.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                for j in col..n {
                    let sub = Rat::from(&factor * a.get(col, j));
                    *a.get_mut(r, j) -= sub;
                }
            }
        }
        true
    }

    /// Entries converted to f64 (used only for enumeration box bounds).
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64()).collect())
            .collect()
    }
}

/// Cartan matrix of `A_r` or `T_r`: tridiagonal 2/-1, with the bottom-right
/// entry replaced by 1 in the tadpole case.
pub fn cartan_matrix(spec: DynkinSpec) -> MatrixQ {
    let r = spec.rank as usize;
    let mut m = MatrixQ::zeros(r, r);
    for i in 0..r {
        *m.get_mut(i, i) = Rat::from(2);
        if i + 1 < r {
            *m.get_mut(i, i + 1) = Rat::from(-1);
            *m.get_mut(i + 1, i) = Rat::from(-1);
        }
    }
    if spec.family == Family::T {
        *m.get_mut(r - 1, r - 1) = Rat::from(1);
    }
    m
}

/// `A = C(X) kron C(Y)^{-1}`, the matrix of the Nahm sum attached to the
/// Dynkin pair `(X, Y)`.
pub fn nahm_matrix(x: DynkinSpec, y: DynkinSpec) -> MatrixQ {
    let cy_inv = cartan_matrix(y)
        .invert()
        .expect("Cartan matrices are invertible");
    cartan_matrix(x).kronecker(&cy_inv)
}

/// Effective central charge `r(X) r(Y) h(X) / (h(X) + h(Y))`.
pub fn effective_central_charge(x: DynkinSpec, y: DynkinSpec) -> Rat {
    let num = x.rank as u64 * y.rank as u64 * x.dual_coxeter() as u64;
    let den = (x.dual_coxeter() + y.dual_coxeter()) as u64;
    Rat::from((num, den))
}

/// Wire format for matrices: exact rational strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl From<&MatrixQ> for MatrixJson {
    fn from(m: &MatrixQ) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows)
                .map(|i| (0..m.cols).map(|j| fmt_rat(m.get(i, j))).collect())
                .collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for MatrixQ {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::DimensionMismatch("matrix JSON shape".into()));
        }
        let rows = j
            .entries
            .iter()
            .map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        MatrixQ::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat;

    fn mat(rows: &[&[(i64, i64)]]) -> MatrixQ {
        MatrixQ::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| Rat::from((n, d))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cartan_matrices_of_both_families() {
        let a1 = cartan_matrix(DynkinSpec::new(Family::A, 1).unwrap());
        assert_eq!(*a1.get(0, 0), rat(2, 1));

        let t1 = cartan_matrix(DynkinSpec::new(Family::T, 1).unwrap());
        assert_eq!(*t1.get(0, 0), rat(1, 1));

        let t2 = cartan_matrix(DynkinSpec::new(Family::T, 2).unwrap());
        assert_eq!(t2, mat(&[&[(2, 1), (-1, 1)], &[(-1, 1), (1, 1)]]));
    }

    #[test]
    fn tadpole_differs_from_a_only_in_last_entry() {
        for r in 1..=8u32 {
            let a = cartan_matrix(DynkinSpec::new(Family::A, r).unwrap());
            let t = cartan_matrix(DynkinSpec::new(Family::T, r).unwrap());
            for i in 0..r as usize {
                for j in 0..r as usize {
                    if i == r as usize - 1 && j == r as usize - 1 {
                        assert_eq!(*a.get(i, j), rat(2, 1));
                        assert_eq!(*t.get(i, j), rat(1, 1));
                    } else {
                        assert_eq!(a.get(i, j), t.get(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_of_scalar_and_a3() {
        let two = mat(&[&[(2, 1)]]);
        assert_eq!(two.invert().unwrap(), mat(&[&[(1, 2)]]));

        let a3 = cartan_matrix(DynkinSpec::new(Family::A, 3).unwrap());
        let inv = a3.invert().unwrap();
        let expected = mat(&[
            &[(3, 4), (1, 2), (1, 4)],
            &[(1, 2), (1, 1), (1, 2)],
            &[(1, 4), (1, 2), (3, 4)],
        ]);
        assert_eq!(inv, expected);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = mat(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert!(matches!(m.invert(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn kronecker_examples() {
        let two = mat(&[&[(2, 1)]]);
        let a3_inv = cartan_matrix(DynkinSpec::new(Family::A, 3).unwrap())
            .invert()
            .unwrap();
        let k = two.kronecker(&a3_inv);
        let expected = mat(&[
            &[(3, 2), (1, 1), (1, 2)],
            &[(1, 1), (2, 1), (1, 1)],
            &[(1, 2), (1, 1), (3, 2)],
        ]);
        assert_eq!(k, expected);

        let half = mat(&[&[(1, 2)]]);
        assert_eq!(two.kronecker(&half), mat(&[&[(1, 1)]]));

        let m = mat(&[&[(1, 1), (2, 1)], &[(3, 1), (4, 1)]]);
        let block = MatrixQ::identity(2).kronecker(&m);
        assert_eq!(*block.get(0, 0), rat(1, 1));
        assert_eq!(*block.get(2, 2), rat(1, 1));
        assert_eq!(*block.get(0, 2), rat(0, 1));
        assert_eq!(*block.get(3, 2), rat(3, 1));
    }

    #[test]
    fn nahm_matrix_examples() {
        let a1 = DynkinSpec::new(Family::A, 1).unwrap();
        let t1 = DynkinSpec::new(Family::T, 1).unwrap();
        assert_eq!(nahm_matrix(a1, t1), mat(&[&[(2, 1)]]));
        assert_eq!(nahm_matrix(a1, a1), mat(&[&[(1, 1)]]));

        let a3 = DynkinSpec::new(Family::A, 3).unwrap();
        let m = nahm_matrix(a1, a3);
        assert_eq!(*m.get(0, 0), rat(3, 2));
        assert!(m.is_symmetric());
        assert!(m.is_positive_definite());
    }

    #[test]
    fn nahm_matrices_are_positive_definite() {
        let a1 = DynkinSpec::new(Family::A, 1).unwrap();
        for n in 1..=8u32 {
            for fam in [Family::A, Family::T] {
                let y = DynkinSpec::new(fam, n).unwrap();
                let m = nahm_matrix(a1, y);
                assert!(m.is_symmetric());
                assert!(m.is_positive_definite(), "{:?} rank {}", fam, n);
            }
        }
    }

    #[test]
    fn effective_central_charge_formulas() {
        let a1 = DynkinSpec::new(Family::A, 1).unwrap();
        for n in 1..=8u32 {
            let tn = DynkinSpec::new(Family::T, n).unwrap();
            let expect = Rat::from(1) - Rat::from((3u64, 2 * n as u64 + 3));
            assert_eq!(effective_central_charge(a1, tn), expect);

            let an = DynkinSpec::new(Family::A, n).unwrap();
            let expect = Rat::from((2 * n as u64, n as u64 + 3));
            assert_eq!(effective_central_charge(a1, an), expect);
        }
        let t1 = DynkinSpec::new(Family::T, 1).unwrap();
        assert_eq!(effective_central_charge(a1, t1), rat(2, 5));
        assert_eq!(effective_central_charge(a1, a1), rat(1, 2));
        let a3 = DynkinSpec::new(Family::A, 3).unwrap();
        assert_eq!(effective_central_charge(a1, a3), rat(1, 1));
    }

    #[test]
    fn kronecker_inverse_is_inverse_of_kronecker() {
        let a = mat(&[&[(2, 1), (1, 1)], &[(1, 1), (3, 1)]]);
        let b = mat(&[&[(1, 1), (1, 2)], &[(0, 1), (2, 1)]]);
        let left = a.kronecker(&b).invert().unwrap();
        let right = a.invert().unwrap().kronecker(&b.invert().unwrap());
        assert_eq!(left, right);
    }

    #[test]
    fn matrix_json_round_trip() {
        let a3_inv = cartan_matrix(DynkinSpec::new(Family::A, 3).unwrap())
            .invert()
            .unwrap();
        let j = MatrixJson::from(&a3_inv);
        assert_eq!(j.entries[0], vec!["3/4", "1/2", "1/4"]);
        let back = MatrixQ::try_from(&j).unwrap();
        assert_eq!(back, a3_inv);
    }
}
