//! Elements `iota^l phi^j g` of `GammaL_n(q) x| <iota>` and enumerated subgroups.
//!
//! `phi` raises matrix entries to the `p`-th power and `iota` sends `g` to
//! `(g^-1)^T`. Conjugation follows `h^x = x^-1 h x`, so
//! `phi^-1 g phi = frob(g)` and `iota g iota = g^-T`. The product law is
//!
//! `(l1, j1, g1)(l2, j2, g2) = (l1 + l2, j1 + j2, frob^j2(iota^l2(g1)) g2)`.

use crate::gf::{Elem, Field};
use crate::linalg::{mul_into, orthogonal_complement, row_reduce, same_field, LinalgError, Matrix};
use rustc_hash::FxHashSet;
use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Default closure cap: 2^22 elements.
pub const DEFAULT_CLOSURE_CAP: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("elements live in different ambient groups")]
    AmbientMismatch,
    #[error("inverse-transpose is only admitted in dimension at least 3")]
    IotaInDimensionTwo,
    #[error("element uses {0} but the ambient group does not allow it")]
    NotAllowed(&'static str),
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("group elements have not been enumerated")]
    NotEnumerated,
    #[error("cannot parse element: {0}")]
    Parse(String),
    #[error("computed core is not normal")]
    NotNormal,
}

/// The group an element lives in: dimension, field and which outer parts
/// are admitted.
#[derive(Clone, Debug)]
pub struct Ambient {
    pub n: usize,
    pub field: Arc<Field>,
    pub allow_phi: bool,
    pub allow_iota: bool,
}

impl PartialEq for Ambient {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && same_field(&self.field, &other.field)
            && self.allow_phi == other.allow_phi
            && self.allow_iota == other.allow_iota
    }
}
impl Eq for Ambient {}

impl Ambient {
    pub fn linear(n: usize, field: &Arc<Field>) -> Ambient {
        Ambient { n, field: field.clone(), allow_phi: false, allow_iota: false }
    }

    pub fn semilinear(n: usize, field: &Arc<Field>) -> Ambient {
        Ambient { n, field: field.clone(), allow_phi: true, allow_iota: false }
    }

    /// Fails for `n < 3`.
    pub fn with_iota(n: usize, field: &Arc<Field>) -> Result<Ambient, SemiError> {
        if n < 3 {
            return Err(SemiError::IotaInDimensionTwo);
        }
        Ok(Ambient { n, field: field.clone(), allow_phi: true, allow_iota: true })
    }

    /// The smallest ambient of the same shape that admits `x`.
    pub fn admitting(&self, x: &SemiElement) -> Ambient {
        let mut a = self.clone();
        a.allow_phi |= x.j != 0;
        a.allow_iota |= x.l != 0;
        a
    }

    pub fn join(&self, other: &Ambient) -> Result<Ambient, SemiError> {
        if self.n != other.n || !same_field(&self.field, &other.field) {
            return Err(SemiError::AmbientMismatch);
        }
        let mut a = self.clone();
        a.allow_phi |= other.allow_phi;
        a.allow_iota |= other.allow_iota;
        Ok(a)
    }

    pub fn codec(&self) -> Codec {
        Codec::new(self.n, &self.field)
    }

    pub fn identity(&self) -> SemiElement {
        SemiElement::linear(Matrix::identity(self.n, &self.field))
    }

    pub fn admits(&self, x: &SemiElement) -> bool {
        x.g.n() == self.n
            && same_field(x.g.field(), &self.field)
            && (x.j == 0 || self.allow_phi)
            && (x.l == 0 || self.allow_iota)
    }
}

/// The normal form `iota^l phi^j g`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SemiElement {
    pub l: u8,
    pub j: u8,
    pub g: Matrix,
}

impl fmt::Debug for SemiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for SemiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl SemiElement {
    pub fn linear(g: Matrix) -> SemiElement {
        SemiElement { l: 0, j: 0, g }
    }

    pub fn new(l: u8, j: u32, g: Matrix) -> Result<SemiElement, SemiError> {
        if l > 1 {
            return Err(SemiError::Parse(format!("iota exponent {l}")));
        }
        if l == 1 && g.n() < 3 {
            return Err(SemiError::IotaInDimensionTwo);
        }
        if g.det() == 0 {
            return Err(LinalgError::Singular.into());
        }
        let f = g.field().degree();
        Ok(SemiElement { l, j: (j % f) as u8, g })
    }

    pub fn phi(n: usize, field: &Arc<Field>) -> SemiElement {
        SemiElement { l: 0, j: 1 % field.degree() as u8, g: Matrix::identity(n, field) }
    }

    pub fn iota(n: usize, field: &Arc<Field>) -> Result<SemiElement, SemiError> {
        SemiElement::new(1, 0, Matrix::identity(n, field))
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn field(&self) -> &Arc<Field> {
        self.g.field()
    }

    pub fn is_identity(&self) -> bool {
        self.l == 0 && self.j == 0 && self.g.is_identity()
    }

    pub fn is_linear(&self) -> bool {
        self.l == 0 && self.j == 0
    }

    pub fn mul(&self, other: &SemiElement) -> Result<SemiElement, SemiError> {
        if self.n() != other.n() || !same_field(self.field(), other.field()) {
            return Err(SemiError::AmbientMismatch);
        }
        let f = self.field().degree();
        let mut t = if other.l == 1 { self.g.inverse_transpose()? } else { self.g.clone() };
        if other.j != 0 {
            t = t.frobenius(other.j as u32);
        }
        Ok(SemiElement {
            l: self.l ^ other.l,
            j: ((self.j as u32 + other.j as u32) % f) as u8,
            g: t.mul_unchecked(&other.g),
        })
    }

    pub fn inv(&self) -> SemiElement {
        let f = self.field().degree();
        let back = (f - self.j as u32) % f;
        let mut t = if self.l == 1 { self.g.inverse_transpose().expect("invertible") } else { self.g.clone() };
        t = t.frobenius(back);
        SemiElement { l: self.l, j: back as u8, g: t.inverse().expect("invertible") }
    }

    /// `x^-1 self x`.
    pub fn conj(&self, x: &SemiElement) -> Result<SemiElement, SemiError> {
        x.inv().mul(self)?.mul(x)
    }

    pub fn pow(&self, mut e: u64) -> SemiElement {
        let mut acc = SemiElement::linear(Matrix::identity(self.n(), self.field()));
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ambient");
            }
            base = base.mul(&base).expect("same ambient");
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order, by repeated multiplication.
    pub fn order(&self) -> u64 {
        let mut x = self.clone();
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul(self).expect("same ambient");
            k += 1;
        }
        k
    }

    /// `iota^l phi^j [rows]`.
    pub fn to_text(&self) -> String {
        format!("iota^{} phi^{} [{}]", self.l, self.j, self.g.to_text())
    }

    /// Accepts the output of [`SemiElement::to_text`] or a bare matrix.
    pub fn parse(field: &Arc<Field>, text: &str) -> Result<SemiElement, SemiError> {
        let text = text.trim();
        let (mut l, mut j) = (0u8, 0u32);
        let mut rest = text;
        loop {
            rest = rest.trim_start();
            if let Some(r) = rest.strip_prefix("iota^") {
                let (num, tail) = split_number(r)?;
                l = u8::try_from(num).map_err(|_| SemiError::Parse(text.into()))?;
                rest = tail;
            } else if let Some(r) = rest.strip_prefix("phi^") {
                let (num, tail) = split_number(r)?;
                j = num;
                rest = tail;
            } else {
                break;
            }
        }
        let g = Matrix::parse(field, rest)?;
        SemiElement::new(l, j, g)
    }

    /// Image of the subspace spanned by `rows`: `frob^j(Y or Y^perp) g`.
    pub fn act_on_subspace(&self, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
        let field = self.field();
        let base = if self.l == 1 { orthogonal_complement(field, self.n(), rows) } else { rows.to_vec() };
        let img: Vec<Vec<Elem>> = base
            .iter()
            .map(|v| {
                let w: Vec<Elem> = v.iter().map(|&c| field.frobenius(c, self.j as u32)).collect();
                self.g.apply(&w)
            })
            .collect();
        row_reduce(field, &img)
    }
}

fn split_number(s: &str) -> Result<(u32, &str), SemiError> {
    let end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    let num = s[..end].parse().map_err(|_| SemiError::Parse(s.into()))?;
    Ok((num, &s[end..]))
}

/// A canonical element key. Ordering is lexicographic in `(l, j, entries)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Key {
    Packed(u128),
    Wide(Box<[u16]>),
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Key::Packed(a), Key::Packed(b)) => a.cmp(b),
            (Key::Wide(a), Key::Wide(b)) => a.cmp(b),
            (Key::Packed(_), Key::Wide(_)) => Ordering::Less,
            (Key::Wide(_), Key::Packed(_)) => Ordering::Greater,
        }
    }
}

/// Converts between elements and keys for one dimension and field.
#[derive(Clone, Debug)]
pub struct Codec {
    n: usize,
    bits: u32,
    jbits: u32,
    packed: bool,
    field: Arc<Field>,
}

impl Codec {
    pub fn new(n: usize, field: &Arc<Field>) -> Codec {
        let bits = 32 - (field.order() - 1).leading_zeros();
        let jbits = 32 - (field.degree() - 1).leading_zeros();
        let packed = 1 + jbits as usize + n * n * bits as usize <= 128;
        Codec { n, bits, jbits, packed, field: field.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn encode_raw(&self, l: u8, j: u8, data: &[u16]) -> Key {
        if self.packed {
            let mut k = l as u128;
            k = (k << self.jbits) | j as u128;
            for &x in data {
                k = (k << self.bits) | x as u128;
            }
            Key::Packed(k)
        } else {
            let mut v = Vec::with_capacity(data.len() + 2);
            v.push(l as u16);
            v.push(j as u16);
            v.extend_from_slice(data);
            Key::Wide(v.into_boxed_slice())
        }
    }

    pub fn encode(&self, x: &SemiElement) -> Key {
        self.encode_raw(x.l, x.j, x.g.raw())
    }

    /// Writes the entries into `out` and returns `(l, j)`.
    pub fn decode_raw(&self, key: &Key, out: &mut [u16]) -> (u8, u8) {
        match key {
            Key::Packed(k) => {
                let mut k = *k;
                let mask = (1u128 << self.bits) - 1;
                for slot in out.iter_mut().rev() {
                    *slot = (k & mask) as u16;
                    k >>= self.bits;
                }
                let j = (k & ((1u128 << self.jbits) - 1)) as u8;
                let l = (k >> self.jbits) as u8;
                (l, j)
            }
            Key::Wide(v) => {
                out.copy_from_slice(&v[2..]);
                (v[0] as u8, v[1] as u8)
            }
        }
    }

    pub fn decode(&self, key: &Key) -> SemiElement {
        let mut data = vec![0u16; self.n * self.n];
        let (l, j) = self.decode_raw(key, &mut data);
        SemiElement { l, j, g: Matrix::from_raw(self.n, &self.field, data) }
    }
}

/// Precomputed right multiplication by a fixed element, on raw entries.
pub(crate) struct RightMul {
    l: u8,
    j: u8,
    g: Vec<u16>,
    n: usize,
    field: Arc<Field>,
    f: u8,
}

impl RightMul {
    pub(crate) fn new(x: &SemiElement) -> RightMul {
        RightMul {
            l: x.l,
            j: x.j,
            g: x.g.raw().to_vec(),
            n: x.n(),
            field: x.field().clone(),
            f: x.field().degree() as u8,
        }
    }

    /// `(l, j, src) * self`, with entries written to `out`.
    pub(crate) fn apply(&self, l: u8, j: u8, src: &[u16], tmp: &mut Vec<u16>, out: &mut [u16]) -> (u8, u8) {
        let left: &[u16] = if self.l == 0 && self.j == 0 {
            src
        } else {
            let mut m = Matrix::from_raw(self.n, &self.field, src.to_vec());
            if self.l == 1 {
                m = m.inverse_transpose().expect("group elements are invertible");
            }
            m = m.frobenius(self.j as u32);
            tmp.clear();
            tmp.extend_from_slice(m.raw());
            tmp
        };
        mul_into(&self.field, self.n, left, &self.g, out);
        (l ^ self.l, (j + self.j) % self.f)
    }
}

/// A sorted set of element keys.
#[derive(Clone, Debug)]
pub struct ElementSet {
    codec: Codec,
    keys: Vec<Key>,
}

impl ElementSet {
    pub fn from_keys(codec: Codec, mut keys: Vec<Key>) -> ElementSet {
        keys.sort_unstable();
        keys.dedup();
        ElementSet { codec, keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn contains_key(&self, k: &Key) -> bool {
        self.keys.binary_search(k).is_ok()
    }

    pub fn contains(&self, x: &SemiElement) -> bool {
        self.contains_key(&self.codec.encode(x))
    }

    pub fn get(&self, i: usize) -> SemiElement {
        self.codec.decode(&self.keys[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = SemiElement> + '_ {
        self.keys.iter().map(|k| self.codec.decode(k))
    }
}

/// A finitely generated subgroup, optionally with its elements enumerated.
#[derive(Clone, Debug)]
pub struct MatGroup {
    pub ambient: Ambient,
    pub gens: Vec<SemiElement>,
    pub elements: Option<Arc<ElementSet>>,
}

impl MatGroup {
    /// A generated group without enumeration.
    pub fn generated(ambient: Ambient, gens: Vec<SemiElement>) -> Result<MatGroup, SemiError> {
        for g in &gens {
            if !ambient.admits(g) {
                return Err(if g.n() != ambient.n || !same_field(g.field(), &ambient.field) {
                    SemiError::AmbientMismatch
                } else if g.l != 0 {
                    SemiError::NotAllowed("iota")
                } else {
                    SemiError::NotAllowed("phi")
                });
            }
        }
        Ok(MatGroup { ambient, gens, elements: None })
    }

    pub fn order(&self) -> Option<usize> {
        self.elements.as_ref().map(|e| e.len())
    }

    pub fn elements(&self) -> Result<&ElementSet, SemiError> {
        self.elements.as_deref().ok_or(SemiError::NotEnumerated)
    }

    pub fn member(&self, x: &SemiElement) -> Result<bool, SemiError> {
        Ok(self.elements()?.contains(x))
    }

    /// Enumerates the group if that has not happened yet.
    pub fn enumerate(mut self, cap: usize) -> Result<MatGroup, SemiError> {
        if self.elements.is_none() {
            let set = enumerate(&self.ambient, &self.gens, cap)?;
            self.elements = Some(Arc::new(set));
        }
        Ok(self)
    }

    pub fn codec(&self) -> Codec {
        self.ambient.codec()
    }

    /// Group equality: element sets if enumerated, else forced enumeration.
    pub fn same_elements(&self, other: &MatGroup, cap: usize) -> Result<bool, SemiError> {
        let a = self.clone().enumerate(cap)?;
        let b = other.clone().enumerate(cap)?;
        Ok(a.elements()?.keys == b.elements()?.keys)
    }
}

/// Enumerates `<gens>` by breadth-first search, failing beyond `cap` elements.
pub fn enumerate(ambient: &Ambient, gens: &[SemiElement], cap: usize) -> Result<ElementSet, SemiError> {
    let codec = ambient.codec();
    let n = ambient.n;
    let movers: Vec<RightMul> = gens.iter().filter(|g| !g.is_identity()).map(RightMul::new).collect();
    let id = ambient.identity();
    let mut seen: FxHashSet<Key> = FxHashSet::default();
    let mut queue: VecDeque<Key> = VecDeque::new();
    let start = codec.encode(&id);
    seen.insert(start.clone());
    queue.push_back(start);
    let mut cur = vec![0u16; n * n];
    let mut out = vec![0u16; n * n];
    let mut tmp = Vec::new();
    while let Some(k) = queue.pop_front() {
        let (l, j) = codec.decode_raw(&k, &mut cur);
        for m in &movers {
            let (l2, j2) = m.apply(l, j, &cur, &mut tmp, &mut out);
            let nk = codec.encode_raw(l2, j2, &out);
            if !seen.contains(&nk) {
                if seen.len() >= cap {
                    return Err(SemiError::CapExceeded(cap));
                }
                seen.insert(nk.clone());
                queue.push_back(nk);
            }
        }
    }
    Ok(ElementSet::from_keys(codec, seen.into_iter().collect()))
}

/// `<gens>` with its elements enumerated.
pub fn closure(ambient: &Ambient, gens: Vec<SemiElement>, cap: usize) -> Result<MatGroup, SemiError> {
    MatGroup::generated(ambient.clone(), gens)?.enumerate(cap)
}

/// A small generating set for an enumerated element list: candidates are
/// taken in key order and kept when they enlarge the subgroup so far.
pub fn greedy_generators(codec: &Codec, keys: &[Key]) -> Vec<SemiElement> {
    let n = codec.n();
    let mut have: FxHashSet<Key> = FxHashSet::default();
    let mut list: Vec<Key> = Vec::new();
    let id = SemiElement::linear(Matrix::identity(n, codec.field()));
    let idk = codec.encode(&id);
    have.insert(idk.clone());
    list.push(idk);
    let mut gens: Vec<SemiElement> = Vec::new();
    let mut movers: Vec<RightMul> = Vec::new();
    let mut cur = vec![0u16; n * n];
    let mut out = vec![0u16; n * n];
    let mut tmp = Vec::new();
    for k in keys {
        if have.len() == keys.len() {
            break;
        }
        if have.contains(k) {
            continue;
        }
        let g = codec.decode(k);
        movers.push(RightMul::new(&g));
        gens.push(g);
        // everything in <old, new> is a product of old elements and generators
        let mut queue: VecDeque<Key> = list.iter().cloned().collect();
        while let Some(x) = queue.pop_front() {
            let (l, j) = codec.decode_raw(&x, &mut cur);
            for m in &movers {
                let (l2, j2) = m.apply(l, j, &cur, &mut tmp, &mut out);
                let nk = codec.encode_raw(l2, j2, &out);
                if have.insert(nk.clone()) {
                    list.push(nk.clone());
                    queue.push_back(nk);
                }
            }
        }
    }
    gens
}

fn from_filtered(ambient: &Ambient, keys: Vec<Key>) -> MatGroup {
    let codec = ambient.codec();
    let set = ElementSet::from_keys(codec.clone(), keys);
    let gens = greedy_generators(&codec, set.keys());
    MatGroup { ambient: ambient.clone(), gens, elements: Some(Arc::new(set)) }
}

/// `G1 ∩ G2`, enumerating the smaller side and filtering by the larger.
pub fn intersect(a: &MatGroup, b: &MatGroup) -> Result<MatGroup, SemiError> {
    let ambient = a.ambient.join(&b.ambient)?;
    let (ea, eb) = (a.elements()?, b.elements()?);
    let (small, large) = if ea.len() <= eb.len() { (ea, eb) } else { (eb, ea) };
    let codec = ambient.codec();
    let keys: Vec<Key> = if small.codec().packed == codec.packed {
        small.keys().iter().filter(|k| large.contains_key(k)).cloned().collect()
    } else {
        small.iter().map(|x| codec.encode(&x)).filter(|k| large.contains(&codec.decode(k))).collect()
    };
    Ok(from_filtered(&ambient, keys))
}

/// Elements of the enumerated group satisfying `pred`, as a subgroup.
/// The caller guarantees that the selected elements form a subgroup.
pub fn filter_subgroup(g: &MatGroup, pred: impl Fn(&SemiElement) -> bool) -> Result<MatGroup, SemiError> {
    let e = g.elements()?;
    let keys = e.keys().iter().filter(|k| pred(&e.codec().decode(k))).cloned().collect();
    Ok(from_filtered(&g.ambient, keys))
}

/// `G^x = x^-1 G x`, transporting the element set if present.
pub fn conj_group(g: &MatGroup, x: &SemiElement) -> Result<MatGroup, SemiError> {
    let ambient = g.ambient.admitting(x);
    if !ambient.admits(x) {
        return Err(SemiError::AmbientMismatch);
    }
    let xi = x.inv();
    let conj = |h: &SemiElement| xi.mul(h).and_then(|t| t.mul(x));
    let gens = g.gens.iter().map(conj).collect::<Result<Vec<_>, _>>()?;
    let elements = match &g.elements {
        Some(e) => {
            let codec = ambient.codec();
            let keys = e.iter().map(|h| conj(&h).map(|c| codec.encode(&c))).collect::<Result<Vec<_>, _>>()?;
            Some(Arc::new(ElementSet::from_keys(codec, keys)))
        }
        None => None,
    };
    Ok(MatGroup { ambient, gens, elements })
}

/// Matrix-part shapes used by the structural predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Shape {
    Scalar,
    Diagonal,
    UpperTriangular,
    LowerTriangular,
}

impl Shape {
    pub fn holds(self, g: &Matrix) -> bool {
        match self {
            Shape::Scalar => g.is_scalar(),
            Shape::Diagonal => g.is_diagonal(),
            Shape::UpperTriangular => g.is_upper_triangular(),
            Shape::LowerTriangular => g.is_lower_triangular(),
        }
    }
}

/// Whether every element has matrix part of the given shape. Without
/// `modulo_phi` the `iota` and `phi` parts must also be trivial.
pub fn all_in_shape(g: &MatGroup, shape: Shape, modulo_phi: bool) -> Result<bool, SemiError> {
    let e = g.elements()?;
    Ok(e.iter().all(|x| (modulo_phi || x.is_linear()) && shape.holds(&x.g)))
}

pub fn is_in_z(g: &MatGroup, modulo_phi: bool) -> Result<bool, SemiError> {
    all_in_shape(g, Shape::Scalar, modulo_phi)
}

pub fn is_in_d(g: &MatGroup, modulo_phi: bool) -> Result<bool, SemiError> {
    all_in_shape(g, Shape::Diagonal, modulo_phi)
}

pub fn is_in_rt(g: &MatGroup, modulo_phi: bool) -> Result<bool, SemiError> {
    all_in_shape(g, Shape::UpperTriangular, modulo_phi)
}

pub fn is_in_lt(g: &MatGroup, modulo_phi: bool) -> Result<bool, SemiError> {
    all_in_shape(g, Shape::LowerTriangular, modulo_phi)
}

/// The core of the enumerated group `s` in the group generated by
/// `g_gens`: repeatedly replace `C` by `C ∩ C^x` over the generators until
/// stable. The result is checked to be normalised by every generator.
pub fn core_in(s: &MatGroup, g_gens: &[SemiElement]) -> Result<MatGroup, SemiError> {
    let codec = s.codec();
    let mut keys: Vec<Key> = s.elements()?.keys().to_vec();
    loop {
        let set = ElementSet::from_keys(codec.clone(), keys.clone());
        let mut kept = Vec::with_capacity(keys.len());
        for k in &keys {
            let c = codec.decode(k);
            // c lies in C^x iff x c x^-1 lies in C
            let ok = g_gens.iter().all(|x| {
                let t = x.mul(&c).and_then(|t| t.mul(&x.inv()));
                t.map(|t| set.contains(&t)).unwrap_or(false)
            });
            if ok {
                kept.push(k.clone());
            }
        }
        if kept.len() == keys.len() {
            break;
        }
        keys = kept;
    }
    let core = from_filtered(&s.ambient, keys);
    let set = core.elements()?;
    for x in g_gens {
        for c in &core.gens {
            if !set.contains(&c.conj(x)?) {
                return Err(SemiError::NotNormal);
            }
        }
    }
    Ok(core)
}
