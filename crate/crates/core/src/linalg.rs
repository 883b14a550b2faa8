//! Exact integer and rational matrices: Hermite and Smith normal forms,
//! exact solving, kernels.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::CoreError;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display + Clone + Zero + One> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn with_shape(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = o.clone() + a.clone() * self[(k, j)].clone();
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(blocks: &[Self]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(r, c);
        let (mut oi, mut oj) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(oi + i, oj + j)] = b[(i, j)].clone();
                }
            }
            oi += b.rows;
            oj += b.cols;
        }
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }
}

pub fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

pub fn int_matrix(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
}

pub fn to_rat(m: &IntMatrix) -> RatMatrix {
    RatMatrix::with_shape(m.rows, m.cols, m.data.iter().map(rat_int).collect())
}

/// The integer matrix equal to `m`, if all entries are integral.
pub fn to_int(m: &RatMatrix) -> Option<IntMatrix> {
    let data: Option<Vec<BigInt>> = m.data.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect();
    Some(IntMatrix::with_shape(m.rows, m.cols, data?))
}

/// Least common multiple of all denominators.
pub fn common_denominator(vals: &[BigRational]) -> BigInt {
    vals.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// `a * form * b^T` for row vectors.
pub fn pairing(a: &[BigRational], form: &RatMatrix, b: &[BigRational]) -> BigRational {
    dot(&form.vec_mul(a), b)
}

fn addmul_row(m: &mut IntMatrix, dst: usize, src: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    for j in 0..m.cols {
        let v = &m[(dst, j)] + c * &m[(src, j)];
        m[(dst, j)] = v;
    }
}

fn addmul_col(m: &mut IntMatrix, dst: usize, src: usize, c: &BigInt) {
    for i in 0..m.rows {
        let v = &m[(i, dst)] + c * &m[(i, src)];
        m[(i, dst)] = v;
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for j in 0..m.cols {
        let v = -&m[(i, j)];
        m[(i, j)] = v;
    }
}

/// Replaces rows `a`, `b` by `(p*a + q*b, r*a + s*b)`.
fn combine_rows(m: &mut IntMatrix, a: usize, b: usize, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) {
    for j in 0..m.cols {
        let x = m[(a, j)].clone();
        let y = m[(b, j)].clone();
        m[(a, j)] = p * &x + q * &y;
        m[(b, j)] = r * &x + s * &y;
    }
}

fn combine_cols(m: &mut IntMatrix, a: usize, b: usize, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) {
    for i in 0..m.rows {
        let x = m[(i, a)].clone();
        let y = m[(i, b)].clone();
        m[(i, a)] = p * &x + q * &y;
        m[(i, b)] = r * &x + s * &y;
    }
}

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U * m = H`. Nonzero rows of `H` come first, pivots are positive and the
/// entries above each pivot lie in `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivot_row = 0;
    for col in 0..m.cols {
        if pivot_row == m.rows {
            break;
        }
        // Fold every lower entry of this column into the pivot row by gcd steps.
        for i in pivot_row + 1..m.rows {
            if h[(i, col)].is_zero() {
                continue;
            }
            let a = h[(pivot_row, col)].clone();
            let b = h[(i, col)].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (p, q) = (&a / &g, &b / &g);
            // [x y; -q p] has determinant x*p + y*q = 1.
            combine_rows(&mut h, pivot_row, i, &x, &y, &-&q, &p);
            combine_rows(&mut u, pivot_row, i, &x, &y, &-&q, &p);
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            negate_row(&mut h, pivot_row);
            negate_row(&mut u, pivot_row);
        }
        let piv = h[(pivot_row, col)].clone();
        for i in 0..pivot_row {
            let c = -h[(i, col)].div_floor(&piv);
            addmul_row(&mut h, i, pivot_row, &c);
            addmul_row(&mut u, i, pivot_row, &c);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(D, U, V)` with `U * m * V = D`, `U`, `V`
/// unimodular and `D` diagonal with nonnegative entries `d_1 | d_2 | ...`
/// (zeros last).
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (r, c) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let n = r.min(c);
    for t in 0..n {
        // Choose the smallest nonzero entry in the remaining block as pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if !d[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..r {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let a = d[(t, t)].clone();
                let b = d[(i, t)].clone();
                if b.is_multiple_of(&a) {
                    let c = -(&b / &a);
                    addmul_row(&mut d, i, t, &c);
                    addmul_row(&mut u, i, t, &c);
                    continue;
                }
                let eg = a.extended_gcd(&b);
                let (p, q) = (&a / &eg.gcd, &b / &eg.gcd);
                combine_rows(&mut d, t, i, &eg.x, &eg.y, &-&q, &p);
                combine_rows(&mut u, t, i, &eg.x, &eg.y, &-&q, &p);
                changed = true;
            }
            for j in t + 1..c {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let a = d[(t, t)].clone();
                let b = d[(t, j)].clone();
                if b.is_multiple_of(&a) {
                    let c = -(&b / &a);
                    addmul_col(&mut d, j, t, &c);
                    addmul_col(&mut v, j, t, &c);
                    continue;
                }
                let eg = a.extended_gcd(&b);
                let (p, q) = (&a / &eg.gcd, &b / &eg.gcd);
                combine_cols(&mut d, t, j, &eg.x, &eg.y, &-&q, &p);
                combine_cols(&mut v, t, j, &eg.x, &eg.y, &-&q, &p);
                changed = true;
            }
            if !changed {
                // Divisibility: if some entry of the block is not divisible by
                // the pivot, add its row to the pivot row and repeat.
                let piv = d[(t, t)].clone();
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d[(i, j)].is_multiple_of(&piv)));
                match bad {
                    Some(i) => {
                        addmul_row(&mut d, t, i, &BigInt::one());
                        addmul_row(&mut u, t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
        }
        if d[(t, t)].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    (d, u, v)
}

/// Determinant of a square integer matrix (fraction-free elimination).
pub fn det_int(m: &IntMatrix) -> BigInt {
    assert!(m.is_square());
    det_rat(&to_rat(m)).to_integer()
}

pub fn det_rat(m: &RatMatrix) -> BigRational {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap_rows(p, col);
            det = -det;
        }
        let piv = a[(col, col)].clone();
        det *= &piv;
        for i in col + 1..n {
            if a[(i, col)].is_zero() {
                continue;
            }
            let f = &a[(i, col)] / &piv;
            for j in col..n {
                let v = &a[(i, j)] - &f * &a[(col, j)];
                a[(i, j)] = v;
            }
        }
    }
    det
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !m[(i, col)].is_zero()) else { continue };
        m.swap_rows(p, r);
        let piv = m[(r, col)].clone();
        for j in 0..m.cols {
            let v = &m[(r, j)] / &piv;
            m[(r, j)] = v;
        }
        for i in 0..m.rows {
            if i == r || m[(i, col)].is_zero() {
                continue;
            }
            let f = m[(i, col)].clone();
            for j in 0..m.cols {
                let v = &m[(i, j)] - &f * &m[(r, j)];
                m[(i, j)] = v;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(&mut m.clone()).len()
}

/// Some `x` with `m * x = b` (free variables set to zero).
pub fn solve_exact(m: &RatMatrix, b: &[BigRational]) -> Result<Vec<BigRational>, CoreError> {
    assert_eq!(b.len(), m.rows);
    let bcol = RatMatrix::from_rows(b.iter().map(|x| vec![x.clone()]).collect());
    let mut aug = m.hcat(&bcol);
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&m.cols) {
        return Err(CoreError::NoSolution);
    }
    let mut x = vec![BigRational::zero(); m.cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[(r, m.cols)].clone();
    }
    Ok(x)
}

/// Row vector `x` with `x * m = b`.
pub fn solve_left(m: &RatMatrix, b: &[BigRational]) -> Result<Vec<BigRational>, CoreError> {
    solve_exact(&m.transpose(), b)
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix, CoreError> {
    assert!(m.is_square());
    let n = m.rows;
    let mut aug = m.hcat(&RatMatrix::identity(n));
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(CoreError::Singular);
    }
    Ok(aug.submatrix(0..n, n..2 * n))
}

/// Basis (as rows) of the integer left kernel `{x in Z^r : x * m = 0}`.
pub fn left_kernel_int(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(m);
    let zero_rows: Vec<usize> = (0..h.rows).filter(|&i| h.row(i).iter().all(|x| x.is_zero())).collect();
    let rows: Vec<Vec<BigInt>> = zero_rows.iter().map(|&i| u.row(i).to_vec()).collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, m.rows);
    }
    IntMatrix::from_rows(rows)
}

/// A basis for the Z-span of rational row vectors (rows of the result are
/// independent; order follows the Hermite form).
pub fn lattice_span(vectors: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let all: Vec<BigRational> = vectors.iter().flatten().cloned().collect();
    let den = common_denominator(&all);
    let scaled = IntMatrix::from_rows(
        vectors.iter().map(|v| v.iter().map(|x| (x * rat_int(&den)).to_integer()).collect()).collect(),
    );
    let (h, _) = hnf(&scaled);
    (0..h.rows)
        .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
        .map(|i| h.row(i).iter().map(|x| BigRational::new(x.clone(), den.clone())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_unimodular(u: &IntMatrix) -> bool {
        det_int(u).abs() == BigInt::one()
    }

    #[test]
    fn hnf_identity() {
        let i3 = IntMatrix::identity(3);
        let (h, u) = hnf(&i3);
        assert_eq!(h, i3);
        assert_eq!(u, i3);
    }

    #[test]
    fn hnf_small_example() {
        let m = int_matrix(&[&[2, 0], &[1, 1]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, int_matrix(&[&[1, 1], &[0, 2]]));
        assert_eq!(u.mul(&m), h);
    }

    #[test]
    fn snf_examples() {
        let (d, _, _) = snf(&int_matrix(&[&[2, 0], &[0, 4]]));
        assert_eq!(d, int_matrix(&[&[2, 0], &[0, 4]]));
        let a3 = int_matrix(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        let (d, u, v) = snf(&a3);
        assert_eq!(d, int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 4]]));
        assert_eq!(u.mul(&a3).mul(&v), d);
        let (d, _, _) = snf(&int_matrix(&[&[2]]));
        assert_eq!(d, int_matrix(&[&[2]]));
        // Not already a divisibility chain.
        let (d, _, _) = snf(&int_matrix(&[&[2, 0], &[0, 3]]));
        assert_eq!(d, int_matrix(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn solve_cases() {
        let id = to_rat(&IntMatrix::identity(2));
        let b = vec![rat(3, 2), rat(-1, 1)];
        assert_eq!(solve_exact(&id, &b).unwrap(), b);
        let two = to_rat(&int_matrix(&[&[2]]));
        assert_eq!(solve_exact(&two, &[rat(1, 1)]).unwrap(), vec![rat(1, 2)]);
        let sing = to_rat(&int_matrix(&[&[1, 1], &[1, 1]]));
        assert_eq!(solve_exact(&sing, &[rat(1, 1), rat(2, 1)]), Err(CoreError::NoSolution));
    }

    #[test]
    fn kernel_and_span() {
        let m = int_matrix(&[&[1, 2], &[2, 4], &[0, 1]]);
        let k = left_kernel_int(&m);
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&m).row(0).iter().all(|x| x.is_zero()));
        let span = lattice_span(&[vec![rat(1, 2), rat(0, 1)], vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 3)]]);
        assert_eq!(span, vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 3)]]);
    }

    fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-6i64..7, r * c)
            .prop_map(move |v| IntMatrix::with_shape(r, c, v.into_iter().map(int).collect()))
    }

    proptest! {
        #[test]
        fn hnf_contract(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| small_matrix(r, c))) {
            let (h, u) = hnf(&m);
            prop_assert_eq!(u.mul(&m), h.clone());
            prop_assert!(is_unimodular(&u));
            if m.is_square() {
                prop_assert_eq!(det_int(&h).abs(), det_int(&m).abs());
            }
        }

        #[test]
        fn snf_contract(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| small_matrix(r, c))) {
            let (d, u, v) = snf(&m);
            prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
            prop_assert!(is_unimodular(&u) && is_unimodular(&v));
            let n = d.rows().min(d.cols());
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    if i != j {
                        prop_assert!(d[(i, j)].is_zero());
                    }
                }
            }
            for i in 0..n.saturating_sub(1) {
                let (a, b) = (&d[(i, i)], &d[(i + 1, i + 1)]);
                let divides = if a.is_zero() { b.is_zero() } else { b.is_multiple_of(a) };
                prop_assert!(divides);
            }
        }

        #[test]
        fn solve_round_trip(m in small_matrix(3, 3), x in proptest::collection::vec(-5i64..6, 3)) {
            let mr = to_rat(&m);
            prop_assume!(!det_rat(&mr).is_zero());
            let xr: Vec<BigRational> = x.iter().map(|&v| rat(v, 1)).collect();
            let b: Vec<BigRational> = (0..3).map(|i| dot(mr.row(i), &xr)).collect();
            prop_assert_eq!(solve_exact(&mr, &b).unwrap(), xr);
        }
    }
}
