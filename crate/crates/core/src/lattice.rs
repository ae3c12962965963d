//! Integer matrices, Hermite and Smith normal forms, saturations, and the
//! lattice charts that fix every volume normalization in the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{primitive_integer, QVec, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i][i] = BigInt::one();
        }
        m
    }

    /// `cols` is needed so that an empty row list still has a shape.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        IntMatrix { rows: rows.len(), cols, entries: rows }
    }

    pub fn from_i64(rows: &[Vec<i64>], cols: usize) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.entries[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i][j] += &self.entries[i][k] * &other.entries[k][j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j][i] = self.entries[i][j].clone();
            }
        }
        out
    }

    /// Bareiss fraction-free determinant of a square matrix.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.entries.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.entries.iter_mut() {
            r.swap(i, j);
        }
    }

    /// row_i += f * row_j
    fn add_row(&mut self, i: usize, j: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = &self.entries[j][c] * f;
            self.entries[i][c] += t;
        }
    }

    /// col_i += f * col_j
    fn add_col(&mut self, i: usize, j: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for r in self.entries.iter_mut() {
            let t = &r[j] * f;
            r[i] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.entries[i].iter_mut() {
            *x = -&*x;
        }
    }
}

/// Row Hermite normal form: returns `(h, u)` with `u` unimodular and `u·m = h`.
/// Pivots are positive and entries above a pivot lie in `[0, pivot)`.
pub fn hermite_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        loop {
            let best = (row..m.rows)
                .filter(|&i| !h.entries[i][col].is_zero())
                .min_by(|&a, &b| h.entries[a][col].abs().cmp(&h.entries[b][col].abs()));
            let Some(p) = best else { break };
            h.swap_rows(row, p);
            u.swap_rows(row, p);
            let mut done = true;
            for i in row + 1..m.rows {
                if h.entries[i][col].is_zero() {
                    continue;
                }
                let f = -h.entries[i][col].div_floor(&h.entries[row][col]);
                h.add_row(i, row, &f);
                u.add_row(i, row, &f);
                if !h.entries[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.entries[row][col].is_zero() {
            continue;
        }
        if h.entries[row][col].is_negative() {
            h.negate_row(row);
            u.negate_row(row);
        }
        let piv = h.entries[row][col].clone();
        for i in 0..row {
            let f = -h.entries[i][col].div_floor(&piv);
            h.add_row(i, row, &f);
            u.add_row(i, row, &f);
        }
        row += 1;
    }
    (h, u)
}

/// Smith normal form: `(d, u, v)` with `u·m·v` diagonal, diagonal entries `d`
/// nonnegative and each dividing the next (zeros last).
pub fn smith_form(m: &IntMatrix) -> (Vec<BigInt>, IntMatrix, IntMatrix) {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut diag = Vec::new();
    for t in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                let x = &a.entries[i][j];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.entries[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        u.swap_rows(t, bi);
        a.swap_cols(t, bj);
        v.swap_cols(t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..m.rows {
                if a.entries[i][t].is_zero() {
                    continue;
                }
                let f = -a.entries[i][t].div_floor(&a.entries[t][t]);
                a.add_row(i, t, &f);
                u.add_row(i, t, &f);
                if !a.entries[i][t].is_zero() {
                    clean = false;
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                }
            }
            for j in t + 1..m.cols {
                if a.entries[t][j].is_zero() {
                    continue;
                }
                let f = -a.entries[t][j].div_floor(&a.entries[t][t]);
                a.add_col(j, t, &f);
                v.add_col(j, t, &f);
                if !a.entries[t][j].is_zero() {
                    clean = false;
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let piv = a.entries[t][t].clone();
            let bad = (t + 1..m.rows).find(|&i| (t + 1..m.cols).any(|j| !a.entries[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    a.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a.entries[t][t].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        diag.push(a.entries[t][t].clone());
    }
    (diag, u, v)
}

/// Index of the lattice spanned by the rows of `sub` inside its saturation.
pub fn lattice_index(sub: &IntMatrix) -> BigInt {
    let (d, _, _) = smith_form(sub);
    d.iter().fold(BigInt::one(), |acc, x| acc * x)
}

/// Integer rows spanning the same rational subspace as the given rational rows.
pub fn integer_rows(rows: &[QVec], dim: usize) -> IntMatrix {
    IntMatrix::from_rows(
        rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).map(|r| primitive_integer(r)).collect(),
        dim,
    )
}

/// Saturated basis of span(rows) ∩ Z^dim together with a unimodular `v` whose
/// first `rank` columns give coordinates on that saturation.
fn saturation(rows: &IntMatrix) -> (usize, IntMatrix) {
    let (d, _, v) = smith_form(rows);
    (d.len(), v)
}

/// Chart onto Z^dim / (L ∩ Z^dim) for a rational subspace L.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientChart {
    pub dim: usize,
    /// Saturated basis of L ∩ Z^dim, one row per vector.
    pub kernel: IntMatrix,
    /// Rows are integer functionals; `projection·x` gives quotient coordinates.
    pub projection: IntMatrix,
    /// Volume form on the quotient is `normalization` times Lebesgue in chart coordinates.
    pub normalization: Q,
}

impl QuotientChart {
    pub fn quotient_dim(&self) -> usize {
        self.projection.rows
    }

    pub fn project(&self, x: &[Q]) -> QVec {
        self.projection
            .entries
            .iter()
            .map(|row| row.iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + Q::from_integer(a.clone()) * b))
            .collect()
    }
}

pub fn quotient_chart(kernel_generators: &IntMatrix, dim: usize, target: Q) -> QuotientChart {
    let (r, v) = saturation(kernel_generators);
    let vinv = unimodular_inverse(&v);
    let kernel = IntMatrix::from_rows(vinv.entries[..r].to_vec(), dim);
    let mut proj: Vec<Vec<BigInt>> = (r..dim).map(|j| (0..dim).map(|i| v.entries[i][j].clone()).collect()).collect();
    for row in proj.iter_mut() {
        if row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
    }
    let projection = IntMatrix::from_rows(proj, dim);
    QuotientChart { dim, kernel, projection, normalization: target }
}

fn unimodular_inverse(v: &IntMatrix) -> IntMatrix {
    let n = v.rows;
    let rows: Vec<QVec> = v.entries.iter().map(|r| r.iter().cloned().map(Q::from_integer).collect()).collect();
    let inv = crate::rational::inverse(&rows).expect("unimodular matrix is invertible");
    IntMatrix::from_rows(inv.into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect(), n)
}

/// Unimodular coordinates on the affine lattice `p0 + (M ∩ Z^dim)`, where M is
/// the span of the given directions. Lebesgue volume in these coordinates is
/// the volume normalized by that lattice.
#[derive(Clone, Debug)]
pub struct LatticeFrame {
    pub origin: QVec,
    pub rank: usize,
    /// rank × dim, the coordinate functionals.
    coord: Vec<QVec>,
    /// rank × dim, a basis of the saturated direction lattice dual to `coord`.
    basis: Vec<QVec>,
}

impl LatticeFrame {
    pub fn new(origin: QVec, directions: &[QVec]) -> Self {
        let dim = origin.len();
        let ints = integer_rows(directions, dim);
        let (rank, v) = saturation(&ints);
        let coord = (0..rank).map(|j| (0..dim).map(|i| Q::from_integer(v.entries[i][j].clone())).collect()).collect();
        let vinv = unimodular_inverse(&v);
        let basis = vinv.entries[..rank].iter().map(|r| r.iter().cloned().map(Q::from_integer).collect()).collect();
        LatticeFrame { origin, rank, coord, basis }
    }

    pub fn from_points(points: &[QVec]) -> Self {
        let p0 = points[0].clone();
        let dirs: Vec<QVec> = points[1..].iter().map(|p| crate::rational::sub(p, &p0)).collect();
        Self::new(p0, &dirs)
    }

    pub fn coords(&self, x: &[Q]) -> QVec {
        let d = crate::rational::sub(x, &self.origin);
        self.coord.iter().map(|c| crate::rational::dot(c, &d)).collect()
    }

    /// Inverse of `coords` on the affine span.
    pub fn point(&self, c: &[Q]) -> QVec {
        let mut x = self.origin.clone();
        for (cj, bj) in c.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(bj) {
                *xi += cj * bi;
            }
        }
        x
    }
}
