//! Coset actions, exact base sizes, regular-orbit counts and
//! intersection certificates.
//!
//! Points of a coset space are right cosets `S r`. Nothing here enumerates
//! the big group: cosets are told apart by membership of `r g r'^-1` in `S`,
//! optionally narrowed by an `S`-invariant bucketing key.

use crate::gf::Elem;
use crate::linalg::row_reduce;
use crate::semilinear::{core_in, Key, MatGroup, SemiElement, SemiError, Shape};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;
use thiserror::Error;

pub const DEFAULT_INDEX_CAP: usize = 10_000;
pub const DEFAULT_WORK_CAP: u64 = 2_000_000;
/// Word length used by the random element sampler.
pub const WORD_LENGTH: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseError {
    #[error(transparent)]
    Semi(#[from] SemiError),
    #[error("coset space has more than {0} points")]
    IndexCapExceeded(usize),
    #[error("work cap exhausted; base size is at least {lower_bound}")]
    WorkCapExceeded { lower_bound: usize },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("no certificate found in {trials} trials")]
    NotFound { trials: usize },
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, BaseError>;

/// An `S`-invariant function of cosets used to bucket them.
#[derive(Clone, Debug, Default)]
pub enum CosetKey {
    #[default]
    None,
    /// A set of subspaces permuted by `S`; the key of `S r` is the sorted
    /// list of the images under `r`.
    SubspaceSet(Vec<Vec<Vec<Elem>>>),
}

impl CosetKey {
    fn key(&self, x: &SemiElement) -> Vec<u32> {
        match self {
            CosetKey::None => Vec::new(),
            CosetKey::SubspaceSet(spaces) => {
                let mut imgs: Vec<Vec<Elem>> =
                    spaces.iter().map(|u| x.act_on_subspace(u).concat()).collect();
                imgs.sort();
                imgs.into_iter().flat_map(|v| std::iter::once(v.len() as u32).chain(v)).collect()
            }
        }
    }
}

/// Right cosets of `S` in `G = <g_gens>`, with the induced permutations.
pub struct CosetSpace {
    pub g_gens: Vec<SemiElement>,
    pub s: MatGroup,
    pub reps: Vec<SemiElement>,
    /// `action[k][i]` is the image of point `i` under `g_gens[k]`.
    pub action: Vec<Vec<u32>>,
    pub core: MatGroup,
    key: CosetKey,
    rep_invs: Vec<SemiElement>,
    buckets: FxHashMap<Vec<u32>, Vec<u32>>,
    perm_cache: RefCell<FxHashMap<Key, Rc<Vec<u32>>>>,
}

/// Result of an exact base-size search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseSize {
    /// The minimum, with a witness base as point indices (starting at 0).
    Exact { b: usize, base: Vec<u32> },
    /// No base of length at most `b - 1` exists.
    AtLeast(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegMode {
    /// All of `Omega^k`.
    Full,
    /// The first point fixed and the others drawn from `Omega` minus it.
    PaperCode,
}

struct Work {
    used: u64,
    cap: u64,
    lower_bound: usize,
}

impl Work {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            return Err(BaseError::WorkCapExceeded { lower_bound: self.lower_bound });
        }
        Ok(())
    }
}

impl CosetSpace {
    /// Grows the transversal by orbit expansion from the identity coset.
    /// `g_order`, when known, is checked against `|Omega| |S|`.
    pub fn new(
        g_gens: Vec<SemiElement>,
        s: MatGroup,
        key: CosetKey,
        cap: usize,
        g_order: Option<u128>,
    ) -> Result<CosetSpace> {
        let set = s.elements()?.clone();
        let id = s.ambient.identity();
        for x in &s.gens {
            if key.key(x) != key.key(&id) {
                return Err(BaseError::Invalid("coset key is not invariant under S".into()));
            }
        }
        let core = core_in(&s, &g_gens)?;
        let mut cs = CosetSpace {
            action: vec![Vec::new(); g_gens.len()],
            g_gens,
            s,
            reps: Vec::new(),
            core,
            key,
            rep_invs: Vec::new(),
            buckets: FxHashMap::default(),
            perm_cache: RefCell::new(FxHashMap::default()),
        };
        cs.push_rep(id);
        let mut i = 0;
        while i < cs.reps.len() {
            for k in 0..cs.g_gens.len() {
                let x = cs.reps[i].mul(&cs.g_gens[k])?;
                let j = match cs.locate(&x)? {
                    Some(j) => j,
                    None => {
                        if cs.reps.len() >= cap {
                            return Err(BaseError::IndexCapExceeded(cap));
                        }
                        cs.push_rep(x)
                    }
                };
                cs.action[k].push(j);
            }
            i += 1;
        }
        if let Some(go) = g_order {
            if cs.reps.len() as u128 * set.len() as u128 != go {
                return Err(BaseError::NotSubgroup(format!(
                    "|Omega| |S| = {} * {} differs from |G| = {go}",
                    cs.reps.len(),
                    set.len()
                )));
            }
        }
        Ok(cs)
    }

    fn push_rep(&mut self, x: SemiElement) -> u32 {
        let idx = self.reps.len() as u32;
        self.buckets.entry(self.key.key(&x)).or_default().push(idx);
        self.rep_invs.push(x.inv());
        self.reps.push(x);
        idx
    }

    /// The point `S x`.
    pub fn locate(&self, x: &SemiElement) -> Result<Option<u32>> {
        let Some(bucket) = self.buckets.get(&self.key.key(x)) else {
            return Ok(None);
        };
        for &j in bucket {
            if self.s.member(&x.mul(&self.rep_invs[j as usize])?)? {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn s_order(&self) -> usize {
        self.s.order().unwrap_or(0)
    }

    pub fn core_order(&self) -> usize {
        self.core.order().unwrap_or(0)
    }

    /// Keys of all elements of `S`.
    pub fn s_keys(&self) -> Vec<Key> {
        self.s.elements().map(|e| e.keys().to_vec()).unwrap_or_default()
    }

    /// The permutation of the points induced by an element of `G`.
    pub fn perm_of(&self, h: &SemiElement) -> Result<Rc<Vec<u32>>> {
        let k = self.s.codec().encode(h);
        if let Some(p) = self.perm_cache.borrow().get(&k) {
            return Ok(p.clone());
        }
        let mut p = Vec::with_capacity(self.len());
        for r in &self.reps {
            let j = self
                .locate(&r.mul(h)?)?
                .ok_or_else(|| BaseError::NotSubgroup("element moves a coset outside the space".into()))?;
            p.push(j);
        }
        let p = Rc::new(p);
        self.perm_cache.borrow_mut().insert(k, p.clone());
        Ok(p)
    }

    /// Whether the element of `S` given by `k` fixes `point`.
    fn fixes(&self, k: &Key, point: u32) -> Result<bool> {
        if point == 0 {
            return Ok(true);
        }
        let h = self.s.codec().decode(k);
        let i = point as usize;
        let t = self.reps[i].mul(&h)?.mul(&self.rep_invs[i])?;
        Ok(self.s.member(&t)?)
    }

    /// `H_omega` for a subset `H` of `S` given by keys.
    pub fn stabilizer_of_point(&self, h: &[Key], point: u32) -> Result<Vec<Key>> {
        let mut out = Vec::new();
        for k in h {
            if self.fixes(k, point)? {
                out.push(k.clone());
            }
        }
        Ok(out)
    }

    /// Orbits of the subgroup `H <= S` (given by all its keys) on the points,
    /// each sorted, listed by least point.
    pub fn orbit_partition(&self, h: &[Key]) -> Result<Vec<Vec<u32>>> {
        let codec = self.s.codec();
        let gens = crate::semilinear::greedy_generators(&codec, h);
        let perms = gens.iter().map(|g| self.perm_of(g)).collect::<Result<Vec<_>>>()?;
        Ok(orbits_of(self.len(), perms.iter().map(|p| p.as_slice())))
    }

    /// Orbits of `G` on the points; a single orbit by construction.
    pub fn g_orbits(&self) -> Vec<Vec<u32>> {
        orbits_of(self.len(), self.action.iter().map(|p| p.as_slice()))
    }

    fn search(&self, h: &[Key], d: u32, work: &mut Work) -> Result<Option<Vec<u32>>> {
        work.tick()?;
        let core = self.core_order();
        if h.len() == core {
            return Ok(Some(Vec::new()));
        }
        if d == 0 {
            return Ok(None);
        }
        let reg = h.len() / core;
        if let Some(room) = (self.len() as u128).checked_pow(d) {
            if reg as u128 > room {
                return Ok(None);
            }
        }
        let mut orbits = self.orbit_partition(h)?;
        if d == 1 {
            return Ok(orbits.iter().find(|o| o.len() == reg).map(|o| vec![o[0]]));
        }
        orbits.sort_by_key(|o| std::cmp::Reverse(o.len()));
        for o in orbits.iter().filter(|o| o.len() > 1) {
            let stab = self.stabilizer_of_point(h, o[0])?;
            if let Some(mut t) = self.search(&stab, d - 1, work)? {
                t.insert(0, o[0]);
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// Whether some `(k+1)`-tuple starting at the base point is a base,
    /// i.e. whether `b <= k + 1`; `Some` carries the witness.
    pub fn find_base(&self, len: usize, work_cap: u64) -> Result<Option<Vec<u32>>> {
        let mut work = Work { used: 0, cap: work_cap, lower_bound: 1 };
        let found = self.search(&self.s_keys(), len.saturating_sub(1) as u32, &mut work)?;
        Ok(found.map(|t| std::iter::once(0).chain(t).collect()))
    }

    fn count(&self, h: &[Key], d: u32, exclude_root: bool, work: &mut Work) -> Result<BigUint> {
        work.tick()?;
        let core = self.core_order();
        let avail = self.len() - usize::from(exclude_root);
        if h.len() == core {
            return Ok(BigUint::from(avail).pow(d));
        }
        if d == 0 {
            return Ok(BigUint::zero());
        }
        let reg = h.len() / core;
        if let Some(room) = (self.len() as u128).checked_pow(d) {
            if reg as u128 > room {
                return Ok(BigUint::zero());
            }
        }
        let orbits = self.orbit_partition(h)?;
        let orbits = orbits.into_iter().filter(|o| !(exclude_root && o[0] == 0));
        let mut total = BigUint::zero();
        if d == 1 {
            for o in orbits.filter(|o| o.len() == reg) {
                total += BigUint::from(o.len());
            }
            return Ok(total);
        }
        for o in orbits {
            let stab = self.stabilizer_of_point(h, o[0])?;
            total += BigUint::from(o.len()) * self.count(&stab, d - 1, exclude_root, work)?;
        }
        Ok(total)
    }
}

fn orbits_of<'a>(n: usize, perms: impl Iterator<Item = &'a [u32]> + Clone) -> Vec<Vec<u32>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start as u32];
        let mut queue = VecDeque::from([start as u32]);
        while let Some(x) = queue.pop_front() {
            for p in perms.clone() {
                let y = p[x as usize];
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Minimal length of a base of `G/S_G` on the cosets, by iterative
/// deepening over stabiliser-orbit representatives.
pub fn base_size_exact(cs: &CosetSpace, max_c: usize, work_cap: u64) -> Result<BaseSize> {
    let mut work = Work { used: 0, cap: work_cap, lower_bound: 1 };
    let s = cs.s_keys();
    for c in 1..=max_c {
        work.lower_bound = c;
        if let Some(t) = cs.search(&s, (c - 1) as u32, &mut work)? {
            let base = std::iter::once(0).chain(t).collect();
            return Ok(BaseSize::Exact { b: c, base });
        }
    }
    Ok(BaseSize::AtLeast(max_c + 1))
}

/// Number of regular `G`-orbits on `Omega^k` (or on the restricted tuples
/// in paper-code mode).
pub fn reg_count(cs: &CosetSpace, k: usize, mode: RegMode, work_cap: u64) -> Result<BigUint> {
    if k == 0 {
        return Ok(BigUint::from(usize::from(cs.s_order() == cs.core_order())));
    }
    let mut work = Work { used: 0, cap: work_cap, lower_bound: 1 };
    let n = cs.count(&cs.s_keys(), (k - 1) as u32, mode == RegMode::PaperCode, &mut work)?;
    let reg = BigUint::from(cs.s_order() / cs.core_order());
    debug_assert!((&n % &reg).is_zero());
    Ok(n / reg)
}

// ---------------------------------------------------------------------------
// Intersections

/// What the intersection `S ∩ S^a_1 ∩ ...` should satisfy.
#[derive(Clone, Debug)]
pub enum Target {
    Shape { shape: Shape, modulo_phi: bool },
    /// Equal to this enumerated group (for example the core).
    Equals(MatGroup),
}

#[derive(Clone, Debug)]
pub struct IntersectionReport {
    /// `|S|`, then the order after each further intersection.
    pub order_trace: Vec<usize>,
    pub intersection: MatGroup,
    pub verified: bool,
}

/// Keys of `S ∩ S^a_1 ∩ ... ∩ S^a_k`, with the running orders.
pub fn intersect_conjugates(s: &MatGroup, conjugators: &[SemiElement]) -> Result<(Vec<Key>, Vec<usize>)> {
    let e = s.elements()?;
    let codec = e.codec();
    let mut keys = e.keys().to_vec();
    let mut trace = vec![keys.len()];
    for a in conjugators {
        let ai = a.inv();
        let mut kept = Vec::with_capacity(keys.len());
        for k in keys {
            // x lies in S^a iff a x a^-1 lies in S
            let x = codec.decode(&k);
            if e.contains(&a.mul(&x)?.mul(&ai)?) {
                kept.push(k);
            }
        }
        keys = kept;
        trace.push(keys.len());
    }
    Ok((keys, trace))
}

pub fn check_intersection(s: &MatGroup, conjugators: &[SemiElement], target: &Target) -> Result<IntersectionReport> {
    let (keys, order_trace) = intersect_conjugates(s, conjugators)?;
    let kk = keys.clone();
    let intersection = crate::semilinear::filter_subgroup(s, |x| kk.binary_search(&s.codec().encode(x)).is_ok())?;
    let verified = match target {
        Target::Shape { shape, modulo_phi } => crate::semilinear::all_in_shape(&intersection, *shape, *modulo_phi)?,
        Target::Equals(t) => {
            let te = t.elements()?;
            te.len() == keys.len() && te.iter().all(|x| intersection.elements().map(|e| e.contains(&x)).unwrap_or(false))
        }
    };
    Ok(IntersectionReport { order_trace, intersection, verified })
}

/// Deterministic sampler of words of fixed length in the generators.
pub struct WordSampler {
    gens: Vec<SemiElement>,
    rng: ChaCha8Rng,
    len: usize,
}

impl WordSampler {
    pub fn new(gens: Vec<SemiElement>, seed: u64) -> WordSampler {
        WordSampler { gens, rng: ChaCha8Rng::seed_from_u64(seed), len: WORD_LENGTH }
    }

    pub fn sample(&mut self) -> Result<SemiElement> {
        let mut x = self.gens[0].mul(&self.gens[0].inv())?;
        for _ in 0..self.len {
            let i = self.rng.gen_range(0..self.gens.len());
            x = x.mul(&self.gens[i])?;
        }
        Ok(x)
    }
}

/// Searches for `c - 1` conjugators meeting the target. Returns them and
/// the trial index at which they were found.
pub fn random_search(
    s: &MatGroup,
    g_gens: &[SemiElement],
    c: usize,
    target: &Target,
    seed: u64,
    trials: usize,
) -> Result<(Vec<SemiElement>, IntersectionReport, usize)> {
    if c == 0 {
        return Err(BaseError::Invalid("c must be at least 1".into()));
    }
    let mut sampler = WordSampler::new(g_gens.to_vec(), seed);
    for t in 0..trials.max(1) {
        let conj = (0..c - 1).map(|_| sampler.sample()).collect::<Result<Vec<_>>>()?;
        let rep = check_intersection(s, &conj, target)?;
        if rep.verified {
            return Ok((conj, rep, t));
        }
    }
    Err(BaseError::NotFound { trials })
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpec {
    pub n: usize,
    pub q: u32,
    pub phi: bool,
    pub iota: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub tag: String,
    pub params: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    IntersectionShape { shape: Shape, modulo_phi: bool },
    IntersectionEquals { generators: Vec<String> },
    IntersectionCore,
    BaseSize { b: usize },
    BaseSizeAtMost { b: usize },
    BaseSizeAtLeast { b: usize },
    RegAtLeast { k: usize, r: u64 },
}

/// Outcome of checking a claim. Cap exhaustion is never a refutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Verified
        } else {
            Verdict::Refuted
        }
    }

    /// The worse of two verdicts: refuted beats inconclusive beats verified.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Refuted, _) | (_, Refuted) => Refuted,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Verified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub case: String,
    pub ambient: AmbientSpec,
    pub subgroup: SubgroupSpec,
    pub conjugators: Vec<String>,
    pub claim: Claim,
    pub verified: Verdict,
    pub order_trace: Vec<usize>,
    pub seed: Option<u64>,
    pub wall_time_ms: Option<u64>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(text: &str) -> std::result::Result<Certificate, serde_json::Error> {
        serde_json::from_str(text)
    }
}

// ---------------------------------------------------------------------------
// Permutation image and fixed-point data

/// `G/S_G` as a list of permutations of the points, enumerated from the
/// generator actions. Fails beyond `cap` elements.
pub fn permutation_image(cs: &CosetSpace, cap: usize) -> Result<Vec<Vec<u32>>> {
    let n = cs.len();
    let id: Vec<u32> = (0..n as u32).collect();
    let mut seen: FxHashMap<Vec<u32>, ()> = FxHashMap::default();
    let mut list = vec![id.clone()];
    seen.insert(id, ());
    let mut i = 0;
    while i < list.len() {
        for g in &cs.action {
            let y: Vec<u32> = list[i].iter().map(|&p| g[p as usize]).collect();
            if !seen.contains_key(&y) {
                if list.len() >= cap {
                    return Err(BaseError::Semi(SemiError::CapExceeded(cap)));
                }
                seen.insert(y.clone(), ());
                list.push(y);
            }
        }
        i += 1;
    }
    Ok(list)
}

pub fn perm_order(p: &[u32]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut ord: u64 = 1;
    for s in 0..p.len() {
        let mut len = 0u64;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        if len > 0 {
            ord = num_integer::lcm(ord, len);
        }
    }
    ord
}

pub fn fixed_points(p: &[u32]) -> usize {
    p.iter().enumerate().filter(|&(i, &x)| i as u32 == x).count()
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().map(|&x| b[x as usize]).collect()
}

fn invert(a: &[u32]) -> Vec<u32> {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

/// Conjugacy classes of prime-order elements of a permutation group given
/// by its elements and generators.
pub fn prime_order_classes(elements: &[Vec<u32>], gens: &[Vec<u32>]) -> Vec<Vec<Vec<u32>>> {
    let mut done: FxHashMap<Vec<u32>, ()> = FxHashMap::default();
    let mut classes = Vec::new();
    let ginv: Vec<Vec<u32>> = gens.iter().map(|g| invert(g)).collect();
    for x in elements {
        let o = perm_order(x);
        if o < 2 || !crate::gf::is_prime(o) || done.contains_key(x) {
            continue;
        }
        done.insert(x.clone(), ());
        let mut class = vec![x.clone()];
        let mut i = 0;
        while i < class.len() {
            for (g, gi) in gens.iter().zip(&ginv) {
                let y = compose(&compose(gi, &class[i]), g);
                if !done.contains_key(&y) {
                    done.insert(y.clone(), ());
                    class.push(y);
                }
            }
            i += 1;
        }
        classes.push(class);
    }
    classes
}

/// Exact fixed-point data at tuple length `c`.
#[derive(Clone, Debug)]
pub struct Dominance {
    /// Probability that a uniformly random `c`-tuple is not a base.
    pub q_exact: num_rational::BigRational,
    /// Sum over prime-order `x` of `fpr(x)^c`.
    pub q_hat: num_rational::BigRational,
    /// Number of prime-order elements in the point stabiliser.
    pub a: BigUint,
    /// Least size of a prime-order class meeting the point stabiliser.
    pub b: BigUint,
    /// `B (A/B)^c`.
    pub ab_bound: num_rational::BigRational,
    /// Whether `fpr(x) = |x^G ∩ H| / |x^G|` held for every class.
    pub fpr_identity: bool,
}

pub fn dominance(cs: &CosetSpace, c: u32, group_cap: usize) -> Result<Dominance> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let elems = permutation_image(cs, group_cap)?;
    let n = cs.len();
    let mut regular_tuples = BigUint::zero();
    // tuples whose pointwise stabiliser in the image is trivial
    let mut work = Work { used: 0, cap: u64::MAX, lower_bound: 0 };
    if c >= 1 {
        let r = cs.count(&cs.s_keys(), c - 1, false, &mut work)?;
        regular_tuples = r * BigUint::from(n);
    }
    let total = BigUint::from(n).pow(c);
    let one = BigRational::one();
    let q_exact = one - BigRational::new(BigInt::from(regular_tuples), BigInt::from(total.clone()));
    let classes = prime_order_classes(&elems, &cs.action);
    let mut q_hat = BigRational::zero();
    let mut a = BigUint::zero();
    let mut b: Option<BigUint> = None;
    let mut fpr_identity = true;
    let mut class_sum = BigRational::zero();
    for class in &classes {
        let size = class.len();
        let fix = fixed_points(&class[0]);
        let meet = class.iter().filter(|x| x[0] == 0).count();
        if fix * size != meet * n {
            fpr_identity = false;
        }
        let fpr = BigRational::new(BigInt::from(fix), BigInt::from(n));
        let term = num_traits::pow::pow(fpr, c as usize);
        q_hat += term.clone() * BigRational::from_integer(BigInt::from(size));
        if meet > 0 {
            class_sum += term * BigRational::from_integer(BigInt::from(size));
            a += BigUint::from(meet);
            let s = BigUint::from(size);
            b = Some(match b {
                Some(old) if old <= s => old,
                _ => s,
            });
        }
    }
    let b = b.unwrap_or_else(BigUint::one);
    let ab_bound = crate::bounds::qhat_ab(
        &BigRational::from_integer(BigInt::from(a.clone())),
        &BigRational::from_integer(BigInt::from(b.clone())),
        c,
    )
    .map_err(|e| BaseError::Invalid(e.to_string()))?;
    debug_assert!(class_sum <= ab_bound || a.is_zero());
    Ok(Dominance { q_exact, q_hat, a, b, ab_bound, fpr_identity })
}

/// Sum over prime-order classes meeting the point stabiliser of
/// `|x^G| fpr(x)^c`.
pub fn class_sum(cs: &CosetSpace, c: u32, group_cap: usize) -> Result<num_rational::BigRational> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let elems = permutation_image(cs, group_cap)?;
    let n = cs.len();
    let mut total = BigRational::zero();
    for class in prime_order_classes(&elems, &cs.action) {
        let fix = fixed_points(&class[0]);
        if fix == 0 {
            continue;
        }
        let fpr = BigRational::new(BigInt::from(fix), BigInt::from(n));
        total += num_traits::pow::pow(fpr, c as usize) * BigRational::from_integer(BigInt::from(class.len()));
    }
    Ok(total)
}

/// Order of `G/S_G` as `|Omega| |S| / |S_G|`.
pub fn image_order(cs: &CosetSpace) -> u128 {
    cs.len() as u128 * (cs.s_order() / cs.core_order()) as u128
}

/// Convenience: the rref of a list of rows, for building coset keys.
pub fn rref(field: &crate::gf::Field, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    row_reduce(field, rows)
}

pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gl_generators, singer_normalizer, SingerModel};
    use crate::gf::Field;
    use crate::semilinear::{closure, Ambient, DEFAULT_CLOSURE_CAP};
    use std::sync::Arc;

    fn lin(ms: Vec<crate::linalg::Matrix>) -> Vec<SemiElement> {
        ms.into_iter().map(SemiElement::linear).collect()
    }

    fn singer_space(q: u32) -> CosetSpace {
        let f = Arc::new(Field::of_order(q).unwrap());
        let s = singer_normalizer(&SingerModel::gl2(&f, None).unwrap()).unwrap();
        CosetSpace::new(lin(gl_generators(2, &f)), s, CosetKey::None, 1000, None).unwrap()
    }

    #[test]
    fn trivial_space() {
        let f = Arc::new(Field::of_order(3).unwrap());
        let g = closure(&Ambient::linear(2, &f), lin(gl_generators(2, &f)), DEFAULT_CLOSURE_CAP).unwrap();
        let cs = CosetSpace::new(g.gens.clone(), g, CosetKey::None, 10, Some(48)).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs.action.iter().all(|p| p == &vec![0]));
        assert_eq!(base_size_exact(&cs, 3, 1000).unwrap(), BaseSize::Exact { b: 1, base: vec![0] });
    }

    #[test]
    fn singer_gl2_5() {
        let cs = singer_space(5);
        assert_eq!(cs.len(), 10);
        assert_eq!(cs.core_order(), 4);
        match base_size_exact(&cs, 4, 100_000).unwrap() {
            BaseSize::Exact { b, .. } => assert_eq!(b, 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(reg_count(&cs, 1, RegMode::Full, 1000).unwrap(), BigUint::zero());
        assert_eq!(reg_count(&cs, 2, RegMode::Full, 1000).unwrap(), BigUint::zero());
        assert!(reg_count(&cs, 3, RegMode::Full, 100_000).unwrap() >= BigUint::one());
    }

    #[test]
    fn orbit_stabilizer_on_singer_space() {
        let cs = singer_space(7);
        let s = cs.s_keys();
        let orbits = cs.orbit_partition(&s).unwrap();
        assert_eq!(orbits.iter().map(|o| o.len()).sum::<usize>(), cs.len());
        for o in &orbits {
            let st = cs.stabilizer_of_point(&s, o[0]).unwrap();
            assert_eq!(st.len() * o.len(), s.len());
        }
        assert_eq!(cs.g_orbits().len(), 1);
    }

    #[test]
    fn certificate_round_trip() {
        let c = Certificate {
            case: "x".into(),
            ambient: AmbientSpec { n: 2, q: 5, phi: false, iota: false },
            subgroup: SubgroupSpec { tag: "t".into(), params: BTreeMap::from([("a".into(), 2)]) },
            conjugators: vec![],
            claim: Claim::BaseSize { b: 3 },
            verified: Verdict::Verified,
            order_trace: vec![48],
            seed: Some(1),
            wall_time_ms: None,
        };
        assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
        assert!(Certificate::from_json("{").is_err());
    }

    #[test]
    fn empty_conjugators_equal_s() {
        let f = Arc::new(Field::of_order(5).unwrap());
        let s = singer_normalizer(&SingerModel::gl2(&f, None).unwrap()).unwrap();
        let r = check_intersection(&s, &[], &Target::Equals(s.clone())).unwrap();
        assert!(r.verified);
        assert_eq!(r.order_trace, vec![48]);
        let (conj, _, t) = random_search(&s, &s.gens, 1, &Target::Equals(s.clone()), 0, 1).unwrap();
        assert!(conj.is_empty() && t == 0);
    }
}
