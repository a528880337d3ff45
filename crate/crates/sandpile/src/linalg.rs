//! Exact integer matrices, Smith normal form and cokernels.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(row.iter().map(|&x| x.into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// The matrix with row `r` and column `c` deleted.
    pub fn minor(&self, r: usize, c: usize) -> IntMatrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != r) {
            for j in (0..self.cols).filter(|&j| j != c) {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Entries reduced into `[0, modulus)`.
    pub fn reduce_mod(&self, modulus: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mod_floor(modulus)).collect(),
        }
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    /// Bareiss fraction-free determinant.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Inverse over the rationals, computed by Gauss-Jordan elimination.
    pub fn rational_inverse(&self) -> Option<Vec<Vec<BigRational>>> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> =
                    self.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
                row.extend((0..n).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero())?;
            a.swap(p, c);
            let inv = a[c][c].recip();
            for x in a[c].iter_mut() {
                *x *= &inv;
            }
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..2 * n {
                        let t = &f * &a[c][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl std::str::FromStr for IntMatrix {
    type Err = Error;

    /// Parses `[[a,b],[c,d]]`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("matrix `{s}`")))?;
        if inner.is_empty() {
            return Ok(IntMatrix::zeros(0, 0));
        }
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for chunk in inner.split("],") {
            let body = chunk.trim_start_matches('[').trim_end_matches(']');
            let row = if body.is_empty() {
                Vec::new()
            } else {
                body.split(',')
                    .map(|x| x.parse::<BigInt>().map_err(|_| Error::Parse(format!("entry `{x}`"))))
                    .collect::<Result<Vec<_>>>()?
            };
            rows.push(row);
        }
        let c = rows[0].len();
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let r = rows.len();
        IntMatrix::new(r, c, rows.into_iter().flatten().collect())
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut s = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

/// Which unimodular transforms to accumulate during the Smith reduction.
#[derive(Clone, Copy, Debug)]
pub struct Transforms {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
}

impl Transforms {
    pub const ALL: Transforms = Transforms { u: true, u_inv: true, v: true };
    pub const NONE: Transforms = Transforms { u: false, u_inv: false, v: false };
}

/// `u * m * v = diag(d)` with `d` nonnegative, each nonzero entry dividing the
/// next and zeros last. Transforms that were not requested are `None`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: Vec<BigInt>,
    pub u: Option<IntMatrix>,
    pub u_inv: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    rows: usize,
    cols: usize,
}

struct Work {
    n: usize,
    m: usize,
    a: Vec<BigInt>,
    u: Option<Vec<BigInt>>,
    ui: Option<Vec<BigInt>>,
    v: Option<Vec<BigInt>>,
}

fn identity_vec(n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = BigInt::one();
    }
    v
}

fn axpy_rows(buf: &mut [BigInt], width: usize, dst: usize, src: usize, q: &BigInt) {
    // row dst -= q * row src
    for j in 0..width {
        let s = &buf[src * width + j];
        if !s.is_zero() {
            let t = q * s;
            buf[dst * width + j] -= t;
        }
    }
}

fn axpy_cols(buf: &mut [BigInt], height: usize, width: usize, dst: usize, src: usize, q: &BigInt) {
    // column dst -= q * column src
    for i in 0..height {
        let s = &buf[i * width + src];
        if !s.is_zero() {
            let t = q * s;
            buf[i * width + dst] -= t;
        }
    }
}

fn swap_rows(buf: &mut [BigInt], width: usize, a: usize, b: usize) {
    if a != b {
        for j in 0..width {
            buf.swap(a * width + j, b * width + j);
        }
    }
}

fn swap_cols(buf: &mut [BigInt], height: usize, width: usize, a: usize, b: usize) {
    if a != b {
        for i in 0..height {
            buf.swap(i * width + a, i * width + b);
        }
    }
}

impl Work {
    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.m + j]
    }

    // row i -= q row t
    fn row_op(&mut self, i: usize, t: usize, q: &BigInt) {
        axpy_rows(&mut self.a, self.m, i, t, q);
        if let Some(u) = self.u.as_mut() {
            axpy_rows(u, self.n, i, t, q);
        }
        if let Some(ui) = self.ui.as_mut() {
            let nq = -q;
            axpy_cols(ui, self.n, self.n, t, i, &nq);
        }
    }

    // col j -= q col t
    fn col_op(&mut self, j: usize, t: usize, q: &BigInt) {
        axpy_cols(&mut self.a, self.n, self.m, j, t, q);
        if let Some(v) = self.v.as_mut() {
            axpy_cols(v, self.m, self.m, j, t, q);
        }
    }

    fn swap_row(&mut self, a: usize, b: usize) {
        swap_rows(&mut self.a, self.m, a, b);
        if let Some(u) = self.u.as_mut() {
            swap_rows(u, self.n, a, b);
        }
        if let Some(ui) = self.ui.as_mut() {
            swap_cols(ui, self.n, self.n, a, b);
        }
    }

    fn swap_col(&mut self, a: usize, b: usize) {
        swap_cols(&mut self.a, self.n, self.m, a, b);
        if let Some(v) = self.v.as_mut() {
            swap_cols(v, self.m, self.m, a, b);
        }
    }

    fn negate_row(&mut self, t: usize) {
        for x in &mut self.a[t * self.m..(t + 1) * self.m] {
            *x = -std::mem::take(x);
        }
        if let Some(u) = self.u.as_mut() {
            for x in &mut u[t * self.n..(t + 1) * self.n] {
                *x = -std::mem::take(x);
            }
        }
        if let Some(ui) = self.ui.as_mut() {
            for i in 0..self.n {
                let x = &mut ui[i * self.n + t];
                *x = -std::mem::take(x);
            }
        }
    }

    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.n {
            for j in t..self.m {
                let x = self.at(i, j);
                if x.is_zero() {
                    continue;
                }
                if x.is_one() || (-x).is_one() {
                    return Some((i, j));
                }
                match best {
                    Some((bi, bj)) if self.at(bi, bj).magnitude() <= x.magnitude() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn run(&mut self) -> Vec<BigInt> {
        let k = self.n.min(self.m);
        let mut d = Vec::with_capacity(k);
        'outer: for t in 0..k {
            loop {
                let Some((pi, pj)) = self.min_pivot(t) else {
                    d.extend(std::iter::repeat(BigInt::zero()).take(k - t));
                    break 'outer;
                };
                self.swap_row(t, pi);
                self.swap_col(t, pj);
                let p = self.at(t, t).clone();
                let mut dirty = false;
                for i in t + 1..self.n {
                    if !self.at(i, t).is_zero() {
                        let q = self.at(i, t) / &p;
                        if !q.is_zero() {
                            self.row_op(i, t, &q);
                        }
                        dirty |= !self.at(i, t).is_zero();
                    }
                }
                for j in t + 1..self.m {
                    if !self.at(t, j).is_zero() {
                        let q = self.at(t, j) / &p;
                        if !q.is_zero() {
                            self.col_op(j, t, &q);
                        }
                        dirty |= !self.at(t, j).is_zero();
                    }
                }
                if dirty {
                    continue;
                }
                if !p.is_one() && !(-&p).is_one() {
                    let bad = (t + 1..self.n)
                        .find(|&i| (t + 1..self.m).any(|j| !(self.at(i, j) % &p).is_zero()));
                    if let Some(i) = bad {
                        // row t += row i, then the pivot no longer divides row t
                        let m1 = -BigInt::one();
                        self.row_op(t, i, &m1);
                        continue;
                    }
                }
                if p.is_negative() {
                    self.negate_row(t);
                }
                d.push(self.at(t, t).clone());
                break;
            }
        }
        d
    }
}

/// Smith normal form with all three transforms.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    smith_normal_form_with(m, Transforms::ALL)
}

pub fn smith_normal_form_with(m: &IntMatrix, tr: Transforms) -> Snf {
    let (n, c) = (m.rows, m.cols);
    let mut w = Work {
        n,
        m: c,
        a: m.data.clone(),
        u: tr.u.then(|| identity_vec(n)),
        ui: tr.u_inv.then(|| identity_vec(n)),
        v: tr.v.then(|| identity_vec(c)),
    };
    let d = w.run();
    let wrap = |rows, data: Option<Vec<BigInt>>| data.map(|data| IntMatrix { rows, cols: rows, data });
    Snf {
        d,
        u: wrap(n, w.u),
        u_inv: wrap(n, w.ui),
        v: wrap(c, w.v),
        rows: n,
        cols: c,
    }
}

/// Invariant factors only; no transforms are accumulated.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    smith_normal_form_with(m, Transforms::NONE).d
}

impl Snf {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }

    /// Rank of the free part of the cokernel.
    pub fn free_rank(&self) -> usize {
        self.rows - self.rank()
    }

    /// The diagonal matrix `u * m * v` should equal.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for (i, x) in self.d.iter().enumerate() {
            out.set(i, i, x.clone());
        }
        out
    }

    /// Finds `k > 0` minimal and `s` with `m s = k t`. Requires `u` and `v`.
    pub fn scaled_preimage(&self, t: &[BigInt]) -> Result<(BigInt, Vec<BigInt>)> {
        let (u, v) = match (&self.u, &self.v) {
            (Some(u), Some(v)) => (u, v),
            _ => return Err(Error::InvalidParameter("Smith form computed without transforms".into())),
        };
        let y = u.mul_vec(t)?;
        let mut k = BigInt::one();
        for (i, yi) in y.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            match self.d.get(i) {
                Some(di) if !di.is_zero() => {
                    k = k.lcm(&(di / di.gcd(yi)));
                }
                _ => return Err(Error::NotInSpan),
            }
        }
        let z: Vec<BigInt> = (0..self.cols)
            .map(|i| match (self.d.get(i), y.get(i)) {
                (Some(di), Some(yi)) if !di.is_zero() => &k * yi / di,
                _ => BigInt::zero(),
            })
            .collect();
        Ok((k, v.mul_vec(&z)?))
    }
}

/// Smallest `k > 0` and integer `s` with `m s = k t`.
pub fn solve_scaled_membership(m: &IntMatrix, t: &[BigInt]) -> Result<(BigInt, Vec<BigInt>)> {
    if t.len() != m.rows {
        return Err(Error::DimensionMismatch("target length".into()));
    }
    let snf = smith_normal_form_with(m, Transforms { u: true, u_inv: false, v: true });
    snf.scaled_preimage(t)
}

/// An integer solution of `a x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    match solve_scaled_membership(a, b) {
        Ok((k, s)) if k.is_one() => Ok(Some(s)),
        Ok(_) | Err(Error::NotInSpan) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The cokernel `Z^rows / col(m)` in the Smith basis. The class of `x` has
/// coordinates `u x` reduced modulo `d`.
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub snf: Snf,
}

impl Cokernel {
    pub fn new(m: &IntMatrix) -> Self {
        Cokernel { snf: smith_normal_form(m) }
    }

    pub fn from_snf(snf: Snf) -> Self {
        Cokernel { snf }
    }

    /// Indices `i` with `d_i > 1`.
    pub fn torsion_indices(&self) -> Vec<usize> {
        self.snf
            .d
            .iter()
            .enumerate()
            .filter(|(_, x)| *x > &BigInt::one())
            .map(|(i, _)| i)
            .collect()
    }

    /// Invariant factors of the torsion part, ascending.
    pub fn torsion_invariants(&self) -> Vec<BigInt> {
        self.torsion_indices().into_iter().map(|i| self.snf.d[i].clone()).collect()
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion_invariants().iter().product()
    }

    pub fn free_rank(&self) -> usize {
        self.snf.free_rank()
    }

    /// An integer vector representing the `i`-th Smith generator.
    pub fn generator_lift(&self, i: usize) -> Option<Vec<BigInt>> {
        self.snf.u_inv.as_ref().map(|ui| ui.column(i))
    }

    /// Smith coordinates of the class of `x`; free coordinates are left unreduced.
    pub fn coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let u = self
            .snf
            .u
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("missing transform".into()))?;
        let y = u.mul_vec(x)?;
        Ok(y
            .into_iter()
            .enumerate()
            .map(|(i, yi)| match self.snf.d.get(i) {
                Some(di) if !di.is_zero() => yi.mod_floor(di),
                _ => yi,
            })
            .collect())
    }
}

pub fn cokernel_structure(m: &IntMatrix) -> Cokernel {
    Cokernel::new(m)
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form_with(m, Transforms::NONE).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_snf(m: &IntMatrix) -> Snf {
        let s = smith_normal_form(m);
        let u = s.u.as_ref().unwrap();
        let v = s.v.as_ref().unwrap();
        let ui = s.u_inv.as_ref().unwrap();
        assert_eq!(u.mul(m).unwrap().mul(v).unwrap(), s.diagonal_matrix());
        assert_eq!(u.mul(ui).unwrap(), IntMatrix::identity(m.rows()));
        assert!(v.determinant().unwrap().magnitude().is_one());
        s
    }

    #[test]
    fn diag_two_three() {
        let s = check_snf(&mat(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.d, ints(&[1, 6]));
    }

    #[test]
    fn path_laplacian_block() {
        let s = check_snf(&mat(&[vec![2, -1], vec![-1, 2]]));
        assert_eq!(s.d, ints(&[1, 3]));
    }

    #[test]
    fn zero_matrix_has_full_free_rank() {
        let s = check_snf(&IntMatrix::zeros(3, 3));
        assert_eq!(s.free_rank(), 3);
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn rectangular() {
        let s = check_snf(&mat(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16], vec![0, 0, 0]]));
        assert_eq!(s.d, ints(&[2, 6, 12]));
        assert_eq!(s.free_rank(), 1);
    }

    #[test]
    fn determinant_small() {
        assert_eq!(mat(&[vec![2, 1], vec![1, 2]]).determinant().unwrap(), BigInt::from(3));
        assert_eq!(
            mat(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]).determinant().unwrap(),
            BigInt::from(-2)
        );
    }

    #[test]
    fn cokernels() {
        let c = Cokernel::new(&mat(&[vec![2, 1], vec![1, 2]]));
        assert_eq!(c.torsion_invariants(), ints(&[3]));
        assert_eq!(c.free_rank(), 0);
        let k3 = mat(&[vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]]);
        let c = Cokernel::new(&k3);
        assert_eq!(c.torsion_invariants(), ints(&[3]));
        assert_eq!(c.free_rank(), 1);
    }

    #[test]
    fn scaled_membership_examples() {
        let m = mat(&[vec![2, 1], vec![1, 2]]);
        let (k, s) = solve_scaled_membership(&m, &ints(&[1, 0])).unwrap();
        assert_eq!(k, BigInt::from(3));
        assert_eq!(s, ints(&[2, -1]));
        let m = mat(&[vec![1, 0], vec![0, 0]]);
        assert_eq!(solve_scaled_membership(&m, &ints(&[0, 1])), Err(Error::NotInSpan));
    }

    #[test]
    fn parse_and_display() {
        let m: IntMatrix = "[[2, -1],[ -1,2]]".parse().unwrap();
        assert_eq!(m.to_string(), "[[2,-1],[-1,2]]");
        assert!("[[1,2],[3]]".parse::<IntMatrix>().is_err());
    }

    #[test]
    fn rational_inverse_times_matrix() {
        let m = mat(&[vec![2, 1], vec![1, 2]]);
        let inv = m.rational_inverse().unwrap();
        assert_eq!(inv[0][0], BigRational::new(2.into(), 3.into()));
        assert_eq!(inv[0][1], BigRational::new((-1).into(), 3.into()));
        assert!(mat(&[vec![1, 1], vec![1, 1]]).rational_inverse().is_none());
    }
}
