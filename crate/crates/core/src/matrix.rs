//! Small dense integer matrices.
//!
//! Everything here is exact. Entries are `i64`; products and sums are
//! checked and overflow aborts. Determinants use fraction-free (Bareiss)
//! elimination in `i128`, and rational work goes through `Ratio<i128>`.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub(crate) type Q = Ratio<i128>;

#[inline]
pub(crate) fn mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("integer overflow in lattice arithmetic")
}

#[inline]
pub(crate) fn add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("integer overflow in lattice arithmetic")
}

#[inline]
pub(crate) fn sub(a: i64, b: i64) -> i64 {
    a.checked_sub(b).expect("integer overflow in lattice arithmetic")
}

/// Row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix::new(rows, cols, vec![0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let mut m = IntMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(IntMatrix::new(rows.len(), cols, rows.concat()))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[&[i64]]) -> Self {
        let rows = columns.first().map_or(0, |c| c.len());
        let mut m = IntMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = add(out[(i, j)], mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// `xᵀ · self · y`.
    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> i64 {
        debug_assert!(self.rows == x.len() && self.cols == y.len());
        let mut acc = 0i64;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            acc = add(acc, mul(xi, dot(self.row(i), y)));
        }
        acc
    }

    /// Determinant by Bareiss elimination.
    pub fn det(&self) -> i128 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                        .expect("overflow in determinant");
                    a[i][j] = v / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    /// Inertia `(positive, negative, zero)` of a symmetric matrix, by exact
    /// rational congruence diagonalisation.
    pub fn inertia(&self) -> (usize, usize, usize) {
        assert!(self.is_symmetric(), "inertia of a non-symmetric matrix");
        let n = self.rows;
        let mut a: Vec<Vec<Q>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| Q::from_integer(x as i128)).collect()).collect();
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[i][i].is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => {
                    // Zero diagonal: a nonzero off-diagonal entry lets us
                    // create a nonzero diagonal one by adding row/column j to i.
                    let pair =
                        (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| i != j && !a[i][j].is_zero());
                    match pair {
                        Some((i, j)) => {
                            for c in 0..n {
                                let v = a[j][c];
                                a[i][c] += v;
                            }
                            for r in 0..n {
                                let v = a[r][j];
                                a[r][i] += v;
                            }
                            i
                        }
                        None => {
                            zero += n - k;
                            break;
                        }
                    }
                }
            };
            a.swap(pivot, k);
            for row in a.iter_mut() {
                row.swap(pivot, k);
            }
            let d = a[k][k];
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for r in k + 1..n {
                let f = a[r][k] / d;
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = a[k][c];
                    a[r][c] -= f * v;
                }
                for rr in k..n {
                    let v = a[rr][k];
                    a[rr][r] -= f * v;
                }
            }
        }
        (pos, neg, zero)
    }

    /// Exact rational inverse, or `None` if singular.
    pub(crate) fn rational_inverse(&self) -> Option<Vec<Vec<Q>>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut r: Vec<Q> = self.row(i).iter().map(|&x| Q::from_integer(x as i128)).collect();
                r.extend((0..n).map(|j| Q::from_integer((i == j) as i128)));
                r
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero())?;
            a.swap(p, k);
            let inv = a[k][k].recip();
            for v in a[k].iter_mut() {
                *v *= inv;
            }
            for r in 0..n {
                if r != k && !a[r][k].is_zero() {
                    let f = a[r][k];
                    for c in 0..2 * n {
                        let v = a[k][c];
                        a[r][c] -= f * v;
                    }
                }
            }
        }
        Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// Integer inverse of a unimodular matrix; `None` otherwise.
    pub fn inverse(&self) -> Option<IntMatrix> {
        let inv = self.rational_inverse()?;
        let n = self.rows;
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let q = inv[i][j];
                if !q.is_integer() {
                    return None;
                }
                out[(i, j)] = i64::try_from(q.to_integer()).ok()?;
            }
        }
        Some(out)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = String;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, String> {
        IntMatrix::from_rows(&rows).ok_or_else(|| "ragged matrix rows".to_string())
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

pub(crate) fn dot(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).fold(0i64, |acc, (&a, &b)| add(acc, mul(a, b)))
}

/// An integral basis of the kernel `{x : v·x = 0}` of a nonzero linear
/// functional, together with the coordinate map onto that basis.
#[derive(Clone, Debug)]
pub struct FunctionalKernel {
    /// `n × (n-1)`; columns form a basis of the kernel.
    pub basis: IntMatrix,
    /// `(n-1) × n`; sends a kernel vector to its coordinates in `basis`.
    pub coordinates: IntMatrix,
    /// `|gcd(v)|`, the index of `v(Zⁿ)` in `Z`.
    pub content: i64,
}

/// Kernel of `x ↦ v·x` via unimodular column reduction of `v`.
///
/// When `v` has a single nonzero entry the kernel basis is the remaining
/// standard basis vectors, in order.
pub fn functional_kernel(v: &[i64]) -> Option<FunctionalKernel> {
    let n = v.len();
    if v.iter().all(|&x| x == 0) {
        return None;
    }
    let mut w = v.to_vec();
    let mut u = IntMatrix::identity(n);
    let mut u_inv = IntMatrix::identity(n);
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| w[i] != 0).collect();
        let p = *nonzero.iter().min_by_key(|&&i| (w[i].abs(), i)).expect("nonzero functional");
        if nonzero.len() == 1 {
            let keep: Vec<usize> = (0..n).filter(|&j| j != p).collect();
            let mut basis = IntMatrix::zeros(n, n - 1);
            let mut coordinates = IntMatrix::zeros(n - 1, n);
            for (k, &j) in keep.iter().enumerate() {
                for i in 0..n {
                    basis[(i, k)] = u[(i, j)];
                    coordinates[(k, i)] = u_inv[(j, i)];
                }
            }
            return Some(FunctionalKernel { basis, coordinates, content: w[p].abs() });
        }
        for &j in &nonzero {
            if j == p {
                continue;
            }
            let q = Integer::div_floor(&w[j], &w[p]);
            if q == 0 {
                continue;
            }
            // column j -= q · column p
            w[j] = sub(w[j], mul(q, w[p]));
            for i in 0..n {
                u[(i, j)] = sub(u[(i, j)], mul(q, u[(i, p)]));
            }
            // inverse: row p += q · row j
            for c in 0..n {
                u_inv[(p, c)] = add(u_inv[(p, c)], mul(q, u_inv[(j, c)]));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        let m = IntMatrix::from_rows(&[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(m.det(), -1);
        let m = IntMatrix::from_rows(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 1]]).unwrap();
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(m.det(), 0);
        assert_eq!(IntMatrix::diagonal(&[1, -1, -1]).det(), 1);
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let u = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(u.inertia(), (1, 1, 0));
        let d = IntMatrix::diagonal(&[1, -1, -1, 0]);
        assert_eq!(d.inertia(), (1, 2, 1));
        let f2 = IntMatrix::from_rows(&[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(f2.inertia(), (1, 1, 0));
    }

    #[test]
    fn unimodular_inverse() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), IntMatrix::identity(2));
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(m.inverse().is_none());
    }

    #[test]
    fn kernel_of_coordinate_functional_is_standard() {
        let k = functional_kernel(&[0, 0, -1]).unwrap();
        assert_eq!(k.basis, IntMatrix::from_columns(&[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(k.content, 1);
    }

    #[test]
    fn kernel_without_unit_entries() {
        let v = [6, 3, 2, 2, 2];
        let k = functional_kernel(&v).unwrap();
        assert_eq!(k.content, 1);
        for j in 0..4 {
            assert_eq!(dot(&v, &k.basis.column(j)), 0);
        }
        // coordinates ∘ basis = identity on the kernel
        assert_eq!(k.coordinates.mul(&k.basis), IntMatrix::identity(4));
        // the basis extends to a unimodular matrix, so its maximal minors are coprime;
        // spot-check by reconstructing a kernel vector.
        let x = [1, -2, 0, 0, 0];
        assert_eq!(dot(&v, &x), 0);
        let c = k.coordinates.mul_vec(&x);
        assert_eq!(k.basis.mul_vec(&c), x.to_vec());
    }
}
