//! Dense square matrices over a finite field.
//!
//! Vectors are rows and matrices act on the right.

use crate::gf::{Elem, Field, GfError};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operands live over different fields")]
    MixedFields,
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("cannot parse matrix: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone)]
pub struct Matrix {
    n: usize,
    field: Arc<Field>,
    data: Vec<u16>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data == other.data && same_field(&self.field, &other.field)
    }
}
impl Eq for Matrix {}

impl std::hash::Hash for Matrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.data.hash(state);
    }
}

pub fn same_field(a: &Arc<Field>, b: &Arc<Field>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_text())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Matrix {
    pub fn zero(n: usize, field: &Arc<Field>) -> Matrix {
        Matrix { n, field: field.clone(), data: vec![0; n * n] }
    }

    pub fn identity(n: usize, field: &Arc<Field>) -> Matrix {
        let mut m = Matrix::zero(n, field);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds from rows of codes; every code must lie in the field.
    pub fn from_rows(field: &Arc<Field>, rows: &[Vec<Elem>]) -> Result<Matrix, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(LinalgError::DimensionMismatch(n, r.len()));
            }
            for &c in r {
                data.push(field.check(c as u64)? as u16);
            }
        }
        Ok(Matrix { n, field: field.clone(), data })
    }

    /// Like [`Matrix::from_rows`], with entries given as integers reduced
    /// into the prime subfield.
    pub fn from_ints(field: &Arc<Field>, rows: &[&[i64]]) -> Matrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "ragged matrix");
            data.extend(r.iter().map(|&v| field.from_int(v) as u16));
        }
        Matrix { n, field: field.clone(), data }
    }

    pub(crate) fn from_raw(n: usize, field: &Arc<Field>, data: Vec<u16>) -> Matrix {
        debug_assert_eq!(data.len(), n * n);
        Matrix { n, field: field.clone(), data }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn raw(&self) -> &[u16] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.n + j] as Elem
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.n + j] = v as u16;
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    fn compatible(&self, other: &Matrix) -> Result<(), LinalgError> {
        if !same_field(&self.field, &other.field) {
            return Err(LinalgError::MixedFields);
        }
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.compatible(other)?;
        let mut out = vec![0u16; self.n * self.n];
        mul_into(&self.field, self.n, &self.data, &other.data, &mut out);
        Ok(Matrix { n: self.n, field: self.field.clone(), data: out })
    }

    /// Product with the operands known to be compatible.
    pub fn mul_unchecked(&self, other: &Matrix) -> Matrix {
        let mut out = vec![0u16; self.n * self.n];
        mul_into(&self.field, self.n, &self.data, &other.data, &mut out);
        Matrix { n: self.n, field: self.field.clone(), data: out }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j];
            }
        }
        Matrix { n, field: self.field.clone(), data: out }
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        let n = self.n;
        let fld = &*self.field;
        let mut a: Vec<u32> = self.data.iter().map(|&x| x as u32).collect();
        let mut b: Vec<u32> = Matrix::identity(n, &self.field).data.iter().map(|&x| x as u32).collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r * n + col] != 0).ok_or(LinalgError::Singular)?;
            if piv != col {
                for k in 0..n {
                    a.swap(piv * n + k, col * n + k);
                    b.swap(piv * n + k, col * n + k);
                }
            }
            let inv = fld.inv(a[col * n + col])?;
            for k in 0..n {
                a[col * n + k] = fld.mul(a[col * n + k], inv);
                b[col * n + k] = fld.mul(b[col * n + k], inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let c = a[r * n + col];
                if c == 0 {
                    continue;
                }
                let nc = fld.neg(c);
                for k in 0..n {
                    a[r * n + k] = fld.add(a[r * n + k], fld.mul(nc, a[col * n + k]));
                    b[r * n + k] = fld.add(b[r * n + k], fld.mul(nc, b[col * n + k]));
                }
            }
        }
        Ok(Matrix { n, field: self.field.clone(), data: b.into_iter().map(|x| x as u16).collect() })
    }

    /// `(g^{-1})^T`.
    pub fn inverse_transpose(&self) -> Result<Matrix, LinalgError> {
        Ok(self.inverse()?.transpose())
    }

    pub fn det(&self) -> Elem {
        let n = self.n;
        let fld = &*self.field;
        let mut a: Vec<u32> = self.data.iter().map(|&x| x as u32).collect();
        let mut det = 1;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for k in 0..n {
                    a.swap(piv * n + k, col * n + k);
                }
                det = fld.neg(det);
            }
            let d = a[col * n + col];
            det = fld.mul(det, d);
            let inv = fld.inv(d).expect("pivot is nonzero");
            for r in col + 1..n {
                let c = a[r * n + col];
                if c == 0 {
                    continue;
                }
                let f = fld.neg(fld.mul(c, inv));
                for k in col..n {
                    a[r * n + k] = fld.add(a[r * n + k], fld.mul(f, a[col * n + k]));
                }
            }
        }
        det
    }

    /// Entrywise `a -> a^(p^j)`.
    pub fn frobenius(&self, j: u32) -> Matrix {
        if j % self.field.degree() == 0 {
            return self.clone();
        }
        let data = self.data.iter().map(|&x| self.field.frobenius(x as Elem, j) as u16).collect();
        Matrix { n: self.n, field: self.field.clone(), data }
    }

    pub fn scale(&self, c: Elem) -> Matrix {
        let data = self.data.iter().map(|&x| self.field.mul(x as Elem, c) as u16).collect();
        Matrix { n: self.n, field: self.field.clone(), data }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.add(a as Elem, b as Elem) as u16)
            .collect();
        Ok(Matrix { n: self.n, field: self.field.clone(), data })
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.n, &self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.data.first().is_none_or(|&x| x == 1)
    }

    pub fn is_scalar(&self) -> bool {
        self.is_diagonal() && (0..self.n).all(|i| self.data[i * self.n + i] == self.data[0])
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| i == j || self.data[i * n + j] == 0))
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..i).all(|j| self.data[i * n + j] == 0))
    }

    pub fn is_lower_triangular(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (i + 1..n).all(|j| self.data[i * n + j] == 0))
    }

    /// `n`, then the row-major codes as little-endian u16.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 2 * self.data.len());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for &x in &self.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    /// Rows separated by `;`, entries by `,`.
    pub fn to_text(&self) -> String {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(field: &Arc<Field>, text: &str) -> Result<Matrix, LinalgError> {
        let text = text.trim().trim_start_matches('[').trim_end_matches(']');
        let rows: Vec<Vec<Elem>> = text
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|e| e.trim().parse::<Elem>().map_err(|_| LinalgError::Parse(format!("bad entry {e:?}"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LinalgError::Parse("empty matrix".into()));
        }
        Matrix::from_rows(field, &rows)
    }

    /// Image of the row vector `v` under the matrix.
    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        let n = self.n;
        let f = &*self.field;
        let mut out = vec![0; n];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for j in 0..n {
                out[j] = f.add(out[j], f.mul(c, self.data[i * n + j] as Elem));
            }
        }
        out
    }
}

/// `out = a * b` for row-major `n x n` code arrays.
pub fn mul_into(field: &Field, n: usize, a: &[u16], b: &[u16], out: &mut [u16]) {
    if field.is_prime_field() {
        let p = field.p() as u64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for k in 0..n {
                    acc += a[i * n + k] as u64 * b[k * n + j] as u64;
                }
                out[i * n + j] = (acc % p) as u16;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    let x = a[i * n + k];
                    if x != 0 {
                        acc = field.add(acc, field.mul(x as Elem, b[k * n + j] as Elem));
                    }
                }
                out[i * n + j] = acc as u16;
            }
        }
    }
}

/// Permutation matrix of `sigma` (0-based images): `e_i` maps to `e_{sigma(i)}`.
pub fn perm_matrix(field: &Arc<Field>, sigma: &[usize]) -> Result<Matrix, LinalgError> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(LinalgError::NotPermutation(n));
        }
        seen[s] = true;
    }
    let mut m = Matrix::zero(n, field);
    for (i, &s) in sigma.iter().enumerate() {
        m.set(i, s, 1);
    }
    Ok(m)
}

/// Sign of a permutation as a field element.
pub fn sgn(field: &Field, sigma: &[usize]) -> Elem {
    let mut seen = vec![false; sigma.len()];
    let mut odd = false;
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = sigma[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    if odd {
        field.neg(1)
    } else {
        1
    }
}

/// Kronecker product: block `(i, j)` is `h[i][j] * g`, so entry
/// `(i*n + a, j*n + b)` equals `h[i][j] * g[a][b]` for `g` of size `n`.
pub fn kron(g: &Matrix, h: &Matrix) -> Result<Matrix, LinalgError> {
    if !same_field(&g.field, &h.field) {
        return Err(LinalgError::MixedFields);
    }
    let (n, m) = (g.n, h.n);
    let f = &*g.field;
    let mut out = Matrix::zero(n * m, &g.field);
    for i in 0..m {
        for j in 0..m {
            let c = h.get(i, j);
            if c == 0 {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    out.set(i * n + a, j * n + b, f.mul(c, g.get(a, b)));
                }
            }
        }
    }
    Ok(out)
}

pub fn block_diag(blocks: &[Matrix]) -> Result<Matrix, LinalgError> {
    let first = blocks.first().ok_or(LinalgError::DimensionMismatch(0, 0))?;
    let field = first.field.clone();
    if blocks.iter().any(|b| !same_field(&b.field, &field)) {
        return Err(LinalgError::MixedFields);
    }
    let total = blocks.iter().map(|b| b.n).sum();
    let mut out = Matrix::zero(total, &field);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.n {
            for j in 0..b.n {
                out.set(off + i, off + j, b.get(i, j));
            }
        }
        off += b.n;
    }
    Ok(out)
}

pub fn diag(field: &Arc<Field>, entries: &[Elem]) -> Matrix {
    let n = entries.len();
    let mut m = Matrix::zero(n, field);
    for (i, &e) in entries.iter().enumerate() {
        m.set(i, i, e);
    }
    m
}

/// Elementary matrix `I + c E_{ij}`.
pub fn transvection(field: &Arc<Field>, n: usize, i: usize, j: usize, c: Elem) -> Matrix {
    let mut m = Matrix::identity(n, field);
    m.set(i, j, field.add(m.get(i, j), c));
    m
}

/// Row-reduced echelon basis of the span of `rows` (each of length n).
pub fn row_reduce(field: &Field, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let mut m: Vec<Vec<Elem>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = field.inv(m[rank][col]).expect("nonzero pivot");
        for x in m[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let c = field.neg(m[r][col]);
                for k in 0..ncols {
                    let v = field.mul(c, m[rank][k]);
                    m[r][k] = field.add(m[r][k], v);
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

pub fn rank(field: &Field, rows: &[Vec<Elem>]) -> usize {
    row_reduce(field, rows).len()
}

/// Basis of `{v : v . y = 0 for all y in rows}` under the standard bilinear form.
pub fn orthogonal_complement(field: &Field, n: usize, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let rref = row_reduce(field, rows);
    let pivots: Vec<usize> = rref.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; n];
        v[free] = 1;
        for (r, &pc) in rref.iter().zip(&pivots) {
            v[pc] = field.neg(r[free]);
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Arc<Field> {
        Arc::new(Field::of_order(q).unwrap())
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut v = p.clone();
                v.insert(pos, n - 1);
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn basics() {
        let f5 = gf(5);
        let i3 = Matrix::identity(3, &f5);
        assert_eq!(i3.inverse().unwrap(), i3);
        assert_eq!(diag(&f5, &[2, 3]).det(), 1);
        let sing = Matrix::from_ints(&f5, &[&[1, 2], &[2, 4]]);
        assert_eq!(sing.inverse(), Err(LinalgError::Singular));
        assert_eq!(sing.det(), 0);
        let other = Matrix::identity(2, &gf(7));
        assert_eq!(sing.mul(&other), Err(LinalgError::MixedFields));
        assert_eq!(sing.mul(&i3), Err(LinalgError::DimensionMismatch(2, 3)));
    }

    #[test]
    fn perm_det_is_sign() {
        let f5 = gf(5);
        for s in permutations(4) {
            let m = perm_matrix(&f5, &s).unwrap();
            assert_eq!(m.det(), sgn(&f5, &s));
            // e_i maps to e_{s(i)}
            for (i, &si) in s.iter().enumerate() {
                let mut e = vec![0; 4];
                e[i] = 1;
                let img = m.apply(&e);
                assert_eq!(img.iter().position(|&x| x == 1), Some(si));
            }
        }
        assert_eq!(perm_matrix(&f5, &[0, 1, 2]).unwrap(), Matrix::identity(3, &f5));
        assert!(perm_matrix(&f5, &[0, 0]).is_err());
        // reversal on five points: two transpositions
        assert_eq!(sgn(&f5, &[4, 3, 2, 1, 0]), 1);
    }

    #[test]
    fn kron_hand_expansion() {
        let f2 = gf(2);
        let u = Matrix::from_ints(&f2, &[&[1, 1], &[0, 1]]);
        let k = kron(&u, &u).unwrap();
        let expected = Matrix::from_ints(
            &f2,
            &[&[1, 1, 1, 1], &[0, 1, 0, 1], &[0, 0, 1, 1], &[0, 0, 0, 1]],
        );
        assert_eq!(k, expected);
        let f3 = gf(3);
        assert_eq!(
            kron(&Matrix::identity(2, &f3), &Matrix::identity(3, &f3)).unwrap(),
            Matrix::identity(6, &f3)
        );
    }

    #[test]
    fn block_constructors() {
        let f3 = gf(3);
        let b = block_diag(&[Matrix::identity(2, &f3), Matrix::identity(3, &f3)]).unwrap();
        assert_eq!(b, Matrix::identity(5, &f3));
        let x = Matrix::from_ints(&f3, &[&[2, 1], &[0, 1]]);
        let y = diag(&f3, &[2, 1, 1]);
        let bd = block_diag(&[x.clone(), y.clone()]).unwrap();
        assert_eq!(bd.det(), f3.mul(x.det(), y.det()));
        for s in permutations(3) {
            let d = diag(&f3, &[sgn(&f3, &s), 1, 1]);
            assert_eq!(d.mul(&perm_matrix(&f3, &s).unwrap()).unwrap().det(), 1);
        }
    }

    #[test]
    fn text_round_trip() {
        let f9 = gf(9);
        let m = Matrix::from_rows(&f9, &[vec![3, 8], vec![0, 1]]).unwrap();
        assert_eq!(m.to_text(), "3,8;0,1");
        assert_eq!(Matrix::parse(&f9, "3,8;0,1").unwrap(), m);
        assert!(Matrix::parse(&f9, "3,9;0,1").is_err());
        assert!(Matrix::parse(&f9, "3,x;0,1").is_err());
        assert!(Matrix::parse(&f9, "1,2,3;0,1").is_err());
    }

    #[test]
    fn complement_and_rank() {
        let f3 = gf(3);
        let rows = vec![vec![1, 1, 0]];
        let c = orthogonal_complement(&f3, 3, &rows);
        assert_eq!(c.len(), 2);
        for v in &c {
            let dot = (0..3).fold(0, |a, k| f3.add(a, f3.mul(v[k], rows[0][k])));
            assert_eq!(dot, 0);
        }
        assert_eq!(rank(&f3, &[vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 1]]), 2);
    }
}
