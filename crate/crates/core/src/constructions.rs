//! Builders for the explicit subgroups and conjugating matrices.
//!
//! Index parameters that name basis vectors (`r`, `j1`, block rows, `l`)
//! are 1-based, matching the way the matrices are usually written down;
//! row `i` of a matrix is the image of the `i`-th basis vector.

use crate::gf::{prime_divisors, Elem, Field, GfError};
use crate::linalg::{block_diag, diag, kron, perm_matrix, rank, sgn, transvection, LinalgError, Matrix};
use crate::semilinear::{closure, Ambient, MatGroup, SemiElement, SemiError, DEFAULT_CLOSURE_CAP};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Semi(#[from] SemiError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConstructionError::Invalid(msg.into()))
}

fn unit(n: usize, i: usize) -> Vec<Elem> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn rows_to_matrix(field: &Arc<Field>, rows: Vec<Vec<Elem>>) -> Result<Matrix> {
    Ok(Matrix::from_rows(field, &rows)?)
}

/// `block` placed on the diagonal at `offset`, identity elsewhere.
pub fn embed(n: usize, offset: usize, block: &Matrix) -> Matrix {
    let mut m = Matrix::identity(n, block.field());
    for i in 0..block.n() {
        for j in 0..block.n() {
            m.set(offset + i, offset + j, block.get(i, j));
        }
    }
    m
}

/// Order of an invertible matrix whose order divides `bound`.
fn order_dividing(m: &Matrix, bound: u64) -> u64 {
    let mut ord = bound;
    for r in prime_divisors(bound) {
        while ord % r == 0 && m.pow(ord / r).is_identity() {
            ord /= r;
        }
    }
    ord
}

/// Elementary generators of `SL_n(q)`: the transvections `I + c E_{i,i+1}`
/// and `I + c E_{i+1,i}` for `c` running over a basis of the field over
/// its prime subfield.
pub fn sl_generators(n: usize, field: &Arc<Field>) -> Vec<Matrix> {
    if n == 1 {
        return vec![Matrix::identity(1, field)];
    }
    let theta = field.primitive_element();
    let mut gens = Vec::new();
    for k in 0..field.degree() {
        let c = field.pow(theta, k as u64);
        for i in 0..n - 1 {
            gens.push(transvection(field, n, i, i + 1, c));
            gens.push(transvection(field, n, i + 1, i, c));
        }
    }
    gens
}

/// Generators of `GL_n(q)`: those of `SL_n(q)` plus `diag(theta, 1, ..., 1)`.
pub fn gl_generators(n: usize, field: &Arc<Field>) -> Vec<Matrix> {
    let mut gens = sl_generators(n, field);
    let mut d = vec![1; n];
    d[0] = field.primitive_element();
    gens.push(diag(field, &d));
    gens
}

pub fn scalar(n: usize, field: &Arc<Field>, c: Elem) -> Matrix {
    diag(field, &vec![c; n])
}

fn lin(ms: Vec<Matrix>) -> Vec<SemiElement> {
    ms.into_iter().map(SemiElement::linear).collect()
}

/// `GL_n(q)` as a generated (not enumerated) group.
pub fn general_linear(n: usize, field: &Arc<Field>) -> MatGroup {
    MatGroup { ambient: Ambient::linear(n, field), gens: lin(gl_generators(n, field)), elements: None }
}

/// `SL_n(q)` as a generated group.
pub fn special_linear(n: usize, field: &Arc<Field>) -> MatGroup {
    MatGroup { ambient: Ambient::linear(n, field), gens: lin(sl_generators(n, field)), elements: None }
}

/// Generators of `Sym(k)` as 0-based image lists: a transposition and a
/// `k`-cycle.
pub fn sym_generators(k: usize) -> Vec<Vec<usize>> {
    if k < 2 {
        return vec![(0..k).collect()];
    }
    let mut t: Vec<usize> = (0..k).collect();
    t.swap(0, 1);
    let c: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
    if k == 2 {
        vec![t]
    } else {
        vec![t, c]
    }
}

/// The reversal `i -> n+1-i`, as 0-based images.
pub fn reversal(n: usize) -> Vec<usize> {
    (0..n).rev().collect()
}

/// `diag(sgn(sigma), 1, ..., 1) * perm(sigma)`, which has determinant 1.
pub fn signed_perm(field: &Arc<Field>, sigma: &[usize]) -> Result<Matrix> {
    let p = perm_matrix(field, sigma)?;
    let mut d = vec![1; sigma.len()];
    d[0] = sgn(field, sigma);
    Ok(diag(field, &d).mul(&p)?)
}

// ---------------------------------------------------------------------------
// Singer cycles

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SingerVariant {
    /// `alpha I + beta [[0,1],[a,0]]`, `a` a non-square, `q` odd.
    Gl2Odd,
    /// `alpha I + beta [[0,1],[a,1]]`, `x^2+x+a` without roots, `q` even.
    Gl2Even,
    /// Multiplication by a root of a primitive polynomial on `1, l, ..., l^(n-1)`.
    FieldModel,
}

#[derive(Clone, Debug)]
pub struct SingerModel {
    pub n: usize,
    pub field: Arc<Field>,
    pub variant: SingerVariant,
    pub a: Option<Elem>,
}

/// Admissible `a` for the 2-dimensional models, in code order.
pub fn singer_params(field: &Field) -> Vec<Elem> {
    if field.p() == 2 {
        field
            .elements()
            .filter(|&a| field.elements().all(|x| field.add(field.add(field.mul(x, x), x), a) != 0))
            .collect()
    } else {
        field.elements().filter(|&a| a != 0 && !field.is_square(a)).collect()
    }
}

impl SingerModel {
    /// The 2-dimensional model of the right parity; `a` defaults to the
    /// least admissible code.
    pub fn gl2(field: &Arc<Field>, a: Option<Elem>) -> Result<SingerModel> {
        let params = singer_params(field);
        let a = match a {
            Some(a) if params.contains(&a) => a,
            Some(a) => return invalid(format!("a = {a} does not give a Singer cycle over {field}")),
            None => params[0],
        };
        let variant = if field.p() == 2 { SingerVariant::Gl2Even } else { SingerVariant::Gl2Odd };
        Ok(SingerModel { n: 2, field: field.clone(), variant, a: Some(a) })
    }

    pub fn field_model(n: usize, field: &Arc<Field>) -> Result<SingerModel> {
        if n == 0 {
            return invalid("dimension must be positive");
        }
        Ok(SingerModel { n, field: field.clone(), variant: SingerVariant::FieldModel, a: None })
    }

    pub fn singer_order(&self) -> u64 {
        (self.field.order() as u64).pow(self.n as u32) - 1
    }

    /// `[[0,1],[a,0]]` or `[[0,1],[a,1]]`; `None` for the field model.
    pub fn basis_matrix(&self) -> Option<Matrix> {
        let a = self.a?;
        let d = if self.variant == SingerVariant::Gl2Even { 1 } else { 0 };
        Some(Matrix::from_rows(&self.field, &[vec![0, 1], vec![a, d]]).expect("codes in range"))
    }

    /// An element of order `q^n - 1` generating the cycle.
    pub fn generator(&self) -> Matrix {
        let f = &self.field;
        let ord = self.singer_order();
        match self.basis_matrix() {
            Some(b) => {
                for beta in 1..f.order() {
                    for alpha in 0..f.order() {
                        let m = scalar(2, f, alpha).add(&b.scale(beta)).expect("same field");
                        if order_dividing(&m, ord) == ord {
                            return m;
                        }
                    }
                }
                unreachable!("the 2-dimensional model is a field")
            }
            None => companion(f, &least_primitive_over(f, self.n)),
        }
    }

    /// An element normalising the cycle and acting on it as `t -> t^q`
    /// (field model), or the displayed involution / unipotent (2-dim).
    pub fn normalizing_element(&self) -> Matrix {
        let f = &self.field;
        match self.variant {
            SingerVariant::Gl2Odd => diag(f, &[f.neg(1), 1]),
            SingerVariant::Gl2Even => Matrix::from_ints(f, &[&[1, 0], &[1, 1]]),
            SingerVariant::FieldModel => {
                let c = self.generator();
                let q = f.order() as u64;
                let rows = (0..self.n).map(|i| c.pow(i as u64 * q).row(0).iter().map(|&x| x as Elem).collect()).collect();
                rows_to_matrix(f, rows).expect("codes in range")
            }
        }
    }
}

/// Companion matrix of the monic polynomial with low coefficients `c`
/// (`x^n + c[n-1] x^(n-1) + ... + c[0]`), acting on `1, x, ..., x^(n-1)`.
pub fn companion(field: &Arc<Field>, c: &[Elem]) -> Matrix {
    let n = c.len();
    let mut m = Matrix::zero(n, field);
    for i in 0..n - 1 {
        m.set(i, i + 1, 1);
    }
    for (j, &cj) in c.iter().enumerate() {
        m.set(n - 1, j, field.neg(cj));
    }
    m
}

/// The lexicographically least (highest coefficient first) primitive monic
/// polynomial of degree `n` over the field, as low coefficients.
pub fn least_primitive_over(field: &Arc<Field>, n: usize) -> Vec<Elem> {
    let q = field.order() as u64;
    let ord = q.pow(n as u32) - 1;
    let total = q.pow(n as u32);
    for idx in 0..total {
        // digit k of idx (most significant first) is the coefficient of x^(n-1-k)
        let mut c = vec![0; n];
        let mut t = idx;
        for k in 0..n {
            c[k] = (t % q) as Elem;
            t /= q;
        }
        if c[0] == 0 {
            continue;
        }
        let m = companion(field, &c);
        if m.pow(ord).is_identity() && order_dividing(&m, ord) == ord {
            return c;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

/// The Singer cycle of the model, enumerated.
pub fn singer(model: &SingerModel) -> Result<MatGroup> {
    let amb = Ambient::linear(model.n, &model.field);
    Ok(closure(&amb, vec![SemiElement::linear(model.generator())], DEFAULT_CLOSURE_CAP)?)
}

/// `N_GL(T) = T x| <normalizing element>`, enumerated.
pub fn singer_normalizer(model: &SingerModel) -> Result<MatGroup> {
    let amb = Ambient::linear(model.n, &model.field);
    let gens = lin(vec![model.generator(), model.normalizing_element()]);
    Ok(closure(&amb, gens, DEFAULT_CLOSURE_CAP)?)
}

/// The element `phi * g` extending the 2-dimensional normaliser to the
/// semilinear group. For odd `q` this is `phi diag(a^{-(p-1)/2}, 1)`. For
/// even `q` the least `g` (row-major code order) with `phi g` normalising
/// the cycle is found by search.
pub fn gamma_singer_element(model: &SingerModel) -> Result<SemiElement> {
    let f = &model.field;
    if f.degree() == 1 {
        return invalid("the semilinear extension needs a non-prime field");
    }
    let a = model.a.ok_or_else(|| ConstructionError::Invalid("needs a 2-dimensional model".into()))?;
    match model.variant {
        SingerVariant::Gl2Odd => {
            let e = (f.p() as u64 - 1) / 2;
            let c = f.inv(f.pow(a, e))?;
            Ok(SemiElement::new(0, 1, diag(f, &[c, 1]))?)
        }
        _ => {
            let t = singer(model)?;
            let gen = SemiElement::linear(model.generator());
            let q = f.order();
            for code in 0..(q as u64).pow(4) {
                let mut d = [0 as Elem; 4];
                let mut c = code;
                for k in (0..4).rev() {
                    d[k] = (c % q as u64) as Elem;
                    c /= q as u64;
                }
                let g = Matrix::from_rows(f, &[vec![d[0], d[1]], vec![d[2], d[3]]])?;
                if g.det() == 0 {
                    continue;
                }
                let x = SemiElement::new(0, 1, g)?;
                if t.member(&gen.conj(&x)?)? {
                    return Ok(x);
                }
            }
            invalid("no semilinear normalising element found")
        }
    }
}

/// `N_{GammaL_2(q)}(S_a)`, enumerated.
pub fn gamma_singer_normalizer(model: &SingerModel) -> Result<MatGroup> {
    let x = gamma_singer_element(model)?;
    let amb = Ambient::semilinear(2, &model.field);
    let gens = vec![SemiElement::linear(model.generator()), SemiElement::linear(model.normalizing_element()), x];
    Ok(closure(&amb, gens, DEFAULT_CLOSURE_CAP)?)
}

// ---------------------------------------------------------------------------
// Imprimitive groups

/// `X wr Y` for a linear group `X` of degree `m` and permutation generators
/// of `Y` on `k` points. Generators: every `X`-generator in every block, and
/// the block permutation matrices `I_m (x) perm(y)`.
pub fn wreath(x: &MatGroup, y_gens: &[Vec<usize>], k: usize) -> Result<MatGroup> {
    if x.gens.iter().any(|g| !g.is_linear()) {
        return invalid("wreath factor must be linear");
    }
    let m = x.ambient.n;
    let f = &x.ambient.field;
    let n = m * k;
    let mut gens = Vec::new();
    for b in 0..k {
        for g in &x.gens {
            gens.push(SemiElement::linear(embed(n, b * m, &g.g)));
        }
    }
    let im = Matrix::identity(m, f);
    for y in y_gens {
        if y.len() != k {
            return invalid("permutation degree does not match k");
        }
        gens.push(SemiElement::linear(kron(&im, &perm_matrix(f, y)?)?));
    }
    Ok(MatGroup::generated(Ambient::linear(n, f), gens)?)
}

/// Unit upper-triangular matrix with entry `(-1)^(j-i)` above the diagonal.
pub fn matrix_big_a(field: &Arc<Field>, n: usize) -> Matrix {
    let mut m = Matrix::zero(n, field);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, if (j - i) % 2 == 0 { 1 } else { field.neg(1) });
        }
    }
    m
}

/// The block involution `[[0,0,I_m],[0,I_{n-2m},0],[I_m,0,0]]`.
pub fn matrix_small_a(field: &Arc<Field>, n: usize, m: usize) -> Result<Matrix> {
    if m == 0 || 2 * m > n {
        return invalid(format!("need 1 <= m <= n/2, got n = {n}, m = {m}"));
    }
    let sigma: Vec<usize> = (0..n)
        .map(|i| if i < m { n - m + i } else if i >= n - m { i - (n - m) } else { i })
        .collect();
    Ok(perm_matrix(field, &sigma)?)
}

/// `x = diag(x_k, ..., x_1)` from blocks given as `x_1, ..., x_k`, and
/// `y = diag(sgn(s), 1, ..., 1) perm(s)` with `s` the reversal.
pub fn conjugator_irrtog(blocks: &[Matrix], n: usize) -> Result<(Matrix, Matrix)> {
    if blocks.iter().map(|b| b.n()).sum::<usize>() != n || blocks.is_empty() {
        return invalid("block sizes must sum to n");
    }
    let rev: Vec<Matrix> = blocks.iter().rev().cloned().collect();
    let x = block_diag(&rev)?;
    let y = signed_perm(x.field(), &reversal(n))?;
    Ok((x, y))
}

/// `z` fixing `v_1..v_{n-m}` with `v_{n-m+i} -> v_1 + ... + v_{n-m} + v_{n-m+i}`.
pub fn conjugator_diag_z(field: &Arc<Field>, n: usize, m: usize) -> Result<Matrix> {
    if m == 0 || m >= n {
        return invalid(format!("need 1 <= m < n, got n = {n}, m = {m}"));
    }
    let mut z = Matrix::identity(n, field);
    for i in n - m..n {
        for j in 0..n - m {
            z.set(i, j, 1);
        }
    }
    Ok(z)
}

/// `diag(x_1, ..., x_k) (I_m (x) A(k))`: block `(i, j)` is `A(k)_{ij} x_i`.
pub fn conjugator_igrekl(parts: &[Matrix]) -> Result<Matrix> {
    let first = parts.first().ok_or_else(|| ConstructionError::Invalid("no parts".into()))?;
    let m = first.n();
    if parts.iter().any(|p| p.n() != m) {
        return invalid("all parts must have the same size");
    }
    let f = first.field().clone();
    let d = block_diag(parts)?;
    let a = kron(&Matrix::identity(m, &f), &matrix_big_a(&f, parts.len()))?;
    Ok(d.mul(&a)?)
}

// ---------------------------------------------------------------------------
// Conjugators for reducible groups

/// The triple for a group stabilising a full flag of last basis vectors:
/// `x` the signed reversal, `(v_n)y = v_1 + ... + v_n`,
/// `(v_n)z = theta v_1 + v_2 + ... + v_n`, other basis vectors fixed.
pub fn prop_ni1_xyz(field: &Arc<Field>, n: usize) -> Result<(Matrix, Matrix, Matrix)> {
    let q = field.order();
    if n < 2 || (n == 2 && (q == 2 || q == 3)) {
        return invalid(format!("excluded (n, q) = ({n}, {q})"));
    }
    let x = signed_perm(field, &reversal(n))?;
    let mut y = Matrix::identity(n, field);
    let mut z = Matrix::identity(n, field);
    for j in 0..n {
        y.set(n - 1, j, 1);
        z.set(n - 1, j, 1);
    }
    z.set(n - 1, 0, field.primitive_element());
    Ok((x, y, z))
}

/// Matrices used for 3-dimensional groups with a 2-dimensional composition
/// factor: `perm((1,2,3))`, the parity-dependent `z`, the `theta` variant
/// of `y`, and the prime-field `y = [[0,-1,0],[1,0,0],[1,1,1]]`.
#[derive(Clone, Debug)]
pub struct N3Matrices {
    pub cycle: Matrix,
    pub z: Matrix,
    pub y_theta: Matrix,
    pub y_prime: Matrix,
    pub x_swap: Matrix,
}

pub fn n3gl_matrices(field: &Arc<Field>) -> Result<N3Matrices> {
    let cycle = perm_matrix(field, &[1, 2, 0])?;
    let z = if field.p() == 2 {
        Matrix::from_ints(field, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])
    } else {
        Matrix::from_ints(field, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]])
    };
    let mut y_theta = Matrix::from_ints(field, &[&[0, 1, 0], &[1, 0, 0], &[0, 1, 1]]);
    y_theta.set(2, 0, field.primitive_element());
    let y_prime = Matrix::from_ints(field, &[&[0, -1, 0], &[1, 0, 0], &[1, 1, 1]]);
    let x_swap = signed_perm(field, &[2, 1, 0])?;
    Ok(N3Matrices { cycle, z, y_theta, y_prime, x_swap })
}

/// Which family of orbit witnesses to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum OrbitScheme {
    /// `U = <v_{n-m+1}, ..., v_n>`, images built around `theta v_1` and `v_2`.
    Orb { m: usize },
    /// A single 2x2 block in rows `(l, l+1)`, `U = <v_l, ..., v_n>`.
    Orb2 { l: usize },
}

impl OrbitScheme {
    /// Dimension of `U`.
    pub fn dim_u(&self, n: usize) -> usize {
        match *self {
            OrbitScheme::Orb { m } => m,
            OrbitScheme::Orb2 { l } => n + 1 - l,
        }
    }
}

/// The images `u_(i,1..m)` of the basis of `U` for witness `i` in 1..=5,
/// as coefficient vectors.
pub fn orbit_images(field: &Arc<Field>, scheme: OrbitScheme, n: usize, i: usize) -> Result<Vec<Vec<Elem>>> {
    if !(1..=5).contains(&i) {
        return invalid("witness index must be in 1..=5");
    }
    let theta = field.primitive_element();
    let vec_of = |terms: &[(usize, Elem)]| {
        let mut v = vec![0; n];
        for &(k, c) in terms {
            v[k - 1] = c;
        }
        v
    };
    match scheme {
        OrbitScheme::Orb { m } => {
            if m < 2 || n < m + 2 || n < 4 {
                return invalid(format!("orb needs m >= 2, n - m >= 2, n >= 4 (n = {n}, m = {m})"));
            }
            let th = (1, theta);
            let base = if i <= 3 { th } else { (2, 1) };
            let first: Vec<(usize, Elem)> = match i {
                1 => vec![th, (2, 1)],
                2 => vec![th, (3, 1)],
                3 => vec![th, (4, 1)],
                4 => vec![(2, 1), (3, 1)],
                _ => vec![(2, 1), (4, 1)],
            };
            let second: Vec<(usize, Elem)> = match i {
                1 => vec![th, (3, 1), (4, 1)],
                2 | 4 => vec![th, (2, 1), (4, 1)],
                _ => vec![th, (2, 1), (3, 1)],
            };
            let mut last = vec![base];
            last.extend((m + 2..=n).map(|r| (r, 1)));
            let mut rows = vec![vec_of(&first)];
            if m == 2 {
                // both the second and the last line describe u_(i,2): keep the
                // second line and append the tail v_5 + ... + v_n of the last one
                let mut t = second.clone();
                t.extend((5..=n).map(|r| (r, 1)));
                rows.push(vec_of(&t));
            } else {
                rows.push(vec_of(&second));
                for r in 1..=m - 3 {
                    rows.push(vec_of(&[base, (4 + r, 1)]));
                }
                rows.push(vec_of(&last));
            }
            Ok(rows)
        }
        OrbitScheme::Orb2 { l } => {
            let s = n.wrapping_sub(l);
            let m = n + 1 - l.min(n + 1);
            let half_ok = if n % 2 == 0 { 2 * l > n } else { 2 * l > n + 1 };
            if n < 9 || !half_ok || m < 3 || n < m + 3 {
                return invalid(format!("orb2 needs n >= 9, l > n/2, m >= 3, n - m >= 3 (n = {n}, l = {l})"));
            }
            let w: Vec<usize> = (1..s).chain(s + 2..l).chain(l + 2..=n).collect();
            debug_assert_eq!(w.len(), n - 4);
            let wi: Vec<usize> = w.iter().enumerate().filter(|&(k, _)| k + 1 != i).map(|(_, &x)| x).collect();
            let mut rows = vec![vec_of(&[(s, 1), (l + 1, 1)]), vec_of(&[(s, 1), (s + 1, 1), (l, 1), (w[i - 1], 1)])];
            for r in 1..=m - 3 {
                rows.push(vec_of(&[(s + 1, 1), (wi[r - 1], 1)]));
            }
            let mut last = vec![(s + 1, 1)];
            last.extend(wi[m - 3..].iter().map(|&x| (x, 1)));
            rows.push(vec_of(&last));
            Ok(rows)
        }
    }
}

/// Completes prescribed last rows to a matrix of determinant 1: the free
/// rows are the least standard basis vectors keeping full rank, and the
/// first free row is rescaled by the inverse determinant.
pub fn complete_to_sl(field: &Arc<Field>, n: usize, last_rows: &[Vec<Elem>]) -> Result<Matrix> {
    let k = n - last_rows.len();
    if rank(field, last_rows) != last_rows.len() {
        return invalid("prescribed images are linearly dependent");
    }
    let mut chosen: Vec<Vec<Elem>> = Vec::new();
    for e in 0..n {
        if chosen.len() == k {
            break;
        }
        let mut trial: Vec<Vec<Elem>> = chosen.clone();
        trial.push(unit(n, e));
        trial.extend(last_rows.iter().cloned());
        if rank(field, &trial) == trial.len() {
            chosen.push(unit(n, e));
        }
    }
    let mut rows = chosen;
    rows.extend(last_rows.iter().cloned());
    let mut z = rows_to_matrix(field, rows)?;
    let d = z.det();
    if d != 1 && k > 0 {
        let c = field.inv(d)?;
        for j in 0..n {
            z.set(0, j, field.mul(c, z.get(0, j)));
        }
    }
    Ok(z)
}

/// The five witnesses `z_1..z_5` in `SL_n(q)`, with `(v_{n-m+j}) z_i = u_(i,j)`.
pub fn orbit_witnesses(field: &Arc<Field>, scheme: OrbitScheme, n: usize) -> Result<Vec<Matrix>> {
    (1..=5).map(|i| complete_to_sl(field, n, &orbit_images(field, scheme, n, i)?)).collect()
}

/// Parameters of the `z` matrices for groups not contained in the
/// semilinear group (all indices 1-based).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GrVariant {
    /// `U != W`; `r` is the least index with `alpha_r = alpha_{r+1}`.
    Def1 { m: usize, r: usize },
    /// `U = W`, `m = n/2`.
    Def2,
    /// `m >= 2`; `blocks` are the first rows `j_1 < j_2 < ...` of the 2x2 blocks.
    Q23 { m: usize, blocks: Vec<usize> },
    /// `m_1 = 1`; `d` is the first partial sum `d_t` with `m_t >= 2`.
    Q23mr { d: usize, blocks: Vec<usize> },
    /// `m = 2` and `U ∩ W = 0`.
    Case221,
    /// `m != 2`, the single 2x2 block in rows `(j1, j1+1)`.
    Case222 { m: usize, j1: usize },
}

/// Builds the `z` matrix of the given variant in `SL_n(q)`.
pub fn gr_z(field: &Arc<Field>, n: usize, variant: &GrVariant) -> Result<Matrix> {
    let theta = field.primitive_element();
    let mut z = Matrix::identity(n, field);
    // set row `i` (1-based) to `v_i + sum of the listed v_k`
    let put = |z: &mut Matrix, i: usize, terms: &[(usize, Elem)]| {
        for j in 0..n {
            z.set(i - 1, j, if j + 1 == i { 1 } else { 0 });
        }
        for &(k, c) in terms {
            z.set(i - 1, k - 1, field.add(z.get(i - 1, k - 1), c));
        }
    };
    let ones = |range: std::ops::RangeInclusive<usize>, skip: &dyn Fn(usize) -> bool| -> Vec<(usize, Elem)> {
        range.filter(|&k| !skip(k)).map(|k| (k, 1)).collect()
    };
    match variant {
        &GrVariant::Def1 { m, r } => {
            if m == 0 || 2 * m > n || n < 3 || r == 0 || r >= n {
                return invalid(format!("Def1 needs 1 <= m <= n/2, 1 <= r < n (n = {n}, m = {m}, r = {r})"));
            }
            let k = n - m;
            if r <= k {
                let mut t = ones(1..=k, &|i| i == r);
                t.push((r, theta));
                put(&mut z, k + 1, &t);
            } else {
                if m < 2 {
                    return invalid("r > n - m needs m >= 2");
                }
                let mut t = ones(1..=k - 1, &|_| false);
                t.push((k, theta));
                put(&mut z, k + 1, &t);
            }
            for i in k + 2..=n {
                put(&mut z, i, &[(k, 1)]);
            }
        }
        GrVariant::Def2 => {
            if n % 2 != 0 || n < 4 {
                return invalid("Def2 needs even n >= 4");
            }
            let k = n / 2;
            put(&mut z, k + 1, &[(k, theta)]);
            for i in k + 2..=n {
                put(&mut z, i, &[(k, 1)]);
            }
        }
        GrVariant::Q23 { m, blocks } => {
            let m = *m;
            if m < 2 || m >= n || blocks.is_empty() {
                return invalid("Q23 needs 2 <= m < n and at least one block");
            }
            let k = n - m;
            let j1 = blocks[0];
            let lam2: Vec<usize> = blocks.iter().map(|j| j + 1).collect();
            put(&mut z, k + 1, &ones(1..=k, &|i| i == j1));
            put(&mut z, k + 2, &ones(1..=k, &|i| lam2.contains(&i)));
            for i in k + 3..=n {
                put(&mut z, i, &ones(1..=k, &|_| false));
            }
        }
        GrVariant::Q23mr { d, blocks } => {
            let d = *d;
            if d < 3 || d >= n || blocks.is_empty() {
                return invalid("Q23mr needs 3 <= d < n and at least one block");
            }
            let k = n - d;
            let j1 = blocks[0];
            let lam2: Vec<usize> = blocks.iter().map(|j| j + 1).collect();
            put(&mut z, k + 1, &ones(1..=k, &|i| i == j1));
            put(&mut z, k + 2, &ones(1..=k, &|i| lam2.contains(&i)));
            put(&mut z, n, &ones(1..=n - 1, &|_| false));
        }
        GrVariant::Case221 => {
            if n < 5 {
                return invalid("Case221 needs n >= 5");
            }
            put(&mut z, n - 1, &ones(2..=n - 2, &|_| false));
            let mut t = vec![(1, 1)];
            t.extend(ones(3..=n - 2, &|_| false));
            put(&mut z, n, &t);
        }
        &GrVariant::Case222 { m, j1 } => {
            if m == 0 || 2 * m > n || j1 < 3 || j1 + 1 >= n {
                return invalid(format!("Case222 needs 3 <= j1 < n - 1 and 1 <= m <= n/2 (n = {n}, j1 = {j1})"));
            }
            put(&mut z, j1, &[(1, 1)]);
            put(&mut z, j1 + 1, &[(2, 1)]);
            put(&mut z, n, &ones(1..=n - m, &|_| false));
        }
    }
    Ok(z)
}

// ---------------------------------------------------------------------------
// Pair stabilisers

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PairKind {
    /// `U <= W`: `U = <v_{n-m+1}..v_n>`, `W = <v_{m+1}..v_n>`.
    Parabolic,
    /// `U ∩ W = 0`: `U = <v_{n-m+1}..v_n>`, `W = <v_1..v_{n-m}>`.
    DirectSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PairStabilizerSpec {
    pub n: usize,
    pub m: usize,
    pub kind: PairKind,
    pub include_phi: bool,
    pub include_iota: bool,
}

impl PairStabilizerSpec {
    fn check(&self) -> Result<()> {
        if self.m == 0 || 2 * self.m > self.n {
            return invalid(format!("need 1 <= m <= n/2, got n = {}, m = {}", self.n, self.m));
        }
        Ok(())
    }

    /// Bases of `U` and `W` as coefficient rows.
    pub fn subspaces(&self) -> (Vec<Vec<Elem>>, Vec<Vec<Elem>>) {
        let (n, m) = (self.n, self.m);
        let u = (n - m..n).map(|i| unit(n, i)).collect();
        let w = match self.kind {
            PairKind::Parabolic => (m..n).map(|i| unit(n, i)).collect(),
            PairKind::DirectSum => (0..n - m).map(|i| unit(n, i)).collect(),
        };
        (u, w)
    }

    /// Diagonal block sizes of the stabiliser.
    pub fn blocks(&self) -> Vec<usize> {
        let (n, m) = (self.n, self.m);
        match self.kind {
            PairKind::Parabolic => [m, n - 2 * m, m].into_iter().filter(|&b| b > 0).collect(),
            PairKind::DirectSum => vec![n - m, m],
        }
    }

    /// The extension element `iota a(n,m)` or `iota`.
    pub fn iota_element(&self, field: &Arc<Field>) -> Result<SemiElement> {
        self.check()?;
        let g = match self.kind {
            PairKind::Parabolic => matrix_small_a(field, self.n, self.m)?,
            PairKind::DirectSum => Matrix::identity(self.n, field),
        };
        Ok(SemiElement::new(1, 0, g)?)
    }

    pub fn ambient(&self, field: &Arc<Field>) -> Result<Ambient> {
        Ok(if self.include_iota {
            Ambient::with_iota(self.n, field)?
        } else if self.include_phi && field.degree() > 1 {
            Ambient::semilinear(self.n, field)
        } else {
            Ambient::linear(self.n, field)
        })
    }

    /// Whether `x` lies in the stabiliser of `(U, W)` extended by the
    /// flagged outer parts.
    pub fn contains(&self, field: &Arc<Field>, x: &SemiElement) -> Result<bool> {
        if (x.l != 0 && !self.include_iota) || (x.j != 0 && !self.include_phi) {
            return Ok(false);
        }
        let y = if x.l != 0 { self.iota_element(field)?.mul(x)? } else { x.clone() };
        let (u, w) = self.subspaces();
        let f = &**field;
        Ok(y.act_on_subspace(&u) == crate::linalg::row_reduce(f, &u)
            && y.act_on_subspace(&w) == crate::linalg::row_reduce(f, &w))
    }
}

/// Generators of `Stab(U, W)` (block triangular or block diagonal), with
/// `phi` and the `iota` extension element when flagged.
pub fn pair_stabilizer(field: &Arc<Field>, spec: &PairStabilizerSpec) -> Result<MatGroup> {
    spec.check()?;
    let n = spec.n;
    let blocks = spec.blocks();
    let mut offsets = Vec::new();
    let mut o = 0;
    for &b in &blocks {
        offsets.push(o);
        o += b;
    }
    let mut gens = Vec::new();
    for (&b, &off) in blocks.iter().zip(&offsets) {
        for g in gl_generators(b, field) {
            gens.push(SemiElement::linear(embed(n, off, &g)));
        }
    }
    if spec.kind == PairKind::Parabolic {
        let theta = field.primitive_element();
        for bi in 0..offsets.len() {
            for bj in bi + 1..offsets.len() {
                for k in 0..field.degree() {
                    let t = transvection(field, n, offsets[bi], offsets[bj], field.pow(theta, k as u64));
                    gens.push(SemiElement::linear(t));
                }
            }
        }
    }
    if spec.include_phi && field.degree() > 1 {
        gens.push(SemiElement::phi(n, field));
    }
    if spec.include_iota {
        gens.push(spec.iota_element(field)?);
    }
    Ok(MatGroup::generated(spec.ambient(field)?, gens)?)
}

// ---------------------------------------------------------------------------
// Small named groups

/// `GL_2(3) Z(GL_2(9))` in the standard basis, optionally extended by `phi`.
pub fn gl23_in_gl29(with_phi: bool) -> Result<MatGroup> {
    let f9 = Arc::new(Field::of_order(9)?);
    let mut gens = vec![
        Matrix::from_ints(&f9, &[&[1, 1], &[0, 1]]),
        Matrix::from_ints(&f9, &[&[0, 1], &[2, 0]]),
        Matrix::from_ints(&f9, &[&[2, 0], &[0, 1]]),
        scalar(2, &f9, f9.primitive_element()),
    ]
    .into_iter()
    .map(SemiElement::linear)
    .collect::<Vec<_>>();
    let amb = if with_phi {
        gens.push(SemiElement::phi(2, &f9));
        Ambient::semilinear(2, &f9)
    } else {
        Ambient::linear(2, &f9)
    };
    Ok(closure(&amb, gens, DEFAULT_CLOSURE_CAP)?)
}

/// The least-code `omega` in `GF(9)` with `omega^2 = omega + 1`, and the pair
/// `x = [[omega^-1, omega^2], [0, omega]]`, `y = [[0, -1], [1, 0]]`.
pub fn gl29_xy() -> Result<(Arc<Field>, Elem, Matrix, Matrix)> {
    let f9 = Arc::new(Field::of_order(9)?);
    let omega = f9
        .elements()
        .find(|&w| f9.mul(w, w) == f9.add(w, 1))
        .ok_or_else(|| ConstructionError::Invalid("no root of x^2 - x - 1".into()))?;
    let x = Matrix::from_rows(&f9, &[vec![f9.inv(omega)?, f9.mul(omega, omega)], vec![0, omega]])?;
    let y = Matrix::from_ints(&f9, &[&[0, -1], &[1, 0]]);
    Ok((f9, omega, x, y))
}

/// Singer generator `t`, conjugator `x` and the claimed generator of the
/// order-3 intersection in `GL_3(2)`.
pub fn gl32_matrices() -> Result<(Arc<Field>, Matrix, Matrix, Matrix)> {
    let f2 = Arc::new(Field::of_order(2)?);
    let t = Matrix::from_ints(&f2, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 1]]);
    let x = Matrix::from_ints(&f2, &[&[1, 0, 1], &[1, 1, 1], &[0, 0, 1]]);
    let c = Matrix::from_ints(&f2, &[&[1, 1, 1], &[0, 1, 0], &[1, 0, 0]]);
    Ok((f2, t, x, c))
}

/// `N_{GL_3(2)}(<t>)` for the displayed Singer generator `t`: the cycle
/// together with the Frobenius-type element found by search.
pub fn gl32_singer_normalizer() -> Result<MatGroup> {
    let (f2, t, _, _) = gl32_matrices()?;
    let amb = Ambient::linear(3, &f2);
    let tg = closure(&amb, vec![SemiElement::linear(t.clone())], 64)?;
    let ts = SemiElement::linear(t.clone());
    let target = SemiElement::linear(t.pow(2));
    // smallest g (row-major bit order) with g^-1 t g = t^2
    for code in 0u32..512 {
        let rows: Vec<Vec<Elem>> = (0..3).map(|i| (0..3).map(|j| (code >> (8 - (3 * i + j))) & 1).collect()).collect();
        let g = Matrix::from_rows(&f2, &rows)?;
        if g.det() == 0 {
            continue;
        }
        let x = SemiElement::linear(g);
        if ts.conj(&x)? == target {
            let _ = &tg;
            return Ok(closure(&amb, vec![ts, x], 1024)?);
        }
    }
    invalid("no normalising element")
}

/// `a`, `b` with `a^2 + b^2 = -1`, least `(a, b)` in code order.
pub fn sum_of_two_squares_minus_one(field: &Field) -> Result<(Elem, Elem)> {
    let target = field.neg(1);
    for a in field.elements() {
        for b in field.elements() {
            if field.add(field.mul(a, a), field.mul(b, b)) == target {
                return Ok((a, b));
            }
        }
    }
    invalid("no solution of a^2 + b^2 = -1")
}

/// The normaliser in `GL_2(q)`, `q` odd, of the quaternion group
/// `<i, j>` with `i = [[0,1],[-1,0]]`, `j = [[a,b],[b,-a]]`, `a^2+b^2 = -1`;
/// its image modulo scalars is `2^2.Sp_2(2)`. Generators: `i`, `j`,
/// `-(I+i+j+k)/2`, `i + j` and the scalars.
pub fn quaternion_normalizer(field: &Arc<Field>) -> Result<MatGroup> {
    if field.p() == 2 {
        return invalid("needs odd characteristic");
    }
    let (a, b) = sum_of_two_squares_minus_one(field)?;
    let i = Matrix::from_ints(field, &[&[0, 1], &[-1, 0]]);
    let j = Matrix::from_rows(field, &[vec![a, b], vec![b, field.neg(a)]])?;
    let k = i.mul(&j)?;
    let id = Matrix::identity(2, field);
    let sum = id.add(&i)?.add(&j)?.add(&k)?;
    let w = sum.scale(field.neg(field.inv(2)?));
    let ij = i.add(&j)?;
    let gens = lin(vec![i, j, w, ij, scalar(2, field, field.primitive_element())]);
    Ok(closure(&Ambient::linear(2, field), gens, DEFAULT_CLOSURE_CAP)?)
}

/// `Sym(k)` as `k x k` permutation matrices.
pub fn symmetric_matrices(field: &Arc<Field>, k: usize) -> Result<MatGroup> {
    let gens = sym_generators(k).iter().map(|s| perm_matrix(field, s).map(SemiElement::linear)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(MatGroup::generated(Ambient::linear(k, field), gens)?)
}

/// `Sym(a) wr Sym(b)` as permutation matrices of degree `a b`.
pub fn sym_wreath_matrices(field: &Arc<Field>, a: usize, b: usize) -> Result<MatGroup> {
    let inner = symmetric_matrices(field, a)?;
    wreath(&inner, &sym_generators(b), b)
}
