//! Named desk-scale cases with their expected claims, certificate
//! production, re-verification of certificates and the reproduction tables.
//!
//! A scenario is a subgroup builder (tag plus integer parameters) and a list
//! of plans. Each plan yields one certificate. Every verdict, whether fresh
//! or re-checked from a file, goes through [`evaluate`], so re-verifying a
//! certificate reproduces its verdict.

use crate::basesize::{
    base_size_exact, check_intersection, random_search, reg_count, AmbientSpec, BaseError,
    BaseSize, Certificate, Claim, CosetKey, CosetSpace, RegMode, SubgroupSpec, Target, Verdict, DEFAULT_INDEX_CAP,
    DEFAULT_WORK_CAP,
};
use crate::bounds::{sinbase_row, Denominator};
use crate::constructions::{
    gamma_singer_normalizer, general_linear, gl23_in_gl29, gl29_xy, gl32_matrices, gl32_singer_normalizer,
    gl_generators, quaternion_normalizer, singer, singer_normalizer, sl_generators, sym_wreath_matrices,
    symmetric_matrices, wreath, ConstructionError, SingerModel,
};
use crate::gf::{Elem, Field, GfError};
use crate::linalg::{LinalgError, Matrix};
use crate::semilinear::{closure, core_in, MatGroup, SemiElement, SemiError, Shape, DEFAULT_CLOSURE_CAP};
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?}")]
    Unknown(String),
    #[error("unknown subgroup tag {0:?}")]
    UnknownTag(String),
    #[error("missing parameter {0:?}")]
    MissingParam(String),
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Semi(#[from] SemiError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub trials: usize,
    pub closure_cap: usize,
    pub index_cap: usize,
    pub work_cap: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 1,
            trials: 200,
            closure_cap: DEFAULT_CLOSURE_CAP,
            index_cap: DEFAULT_INDEX_CAP,
            work_cap: DEFAULT_WORK_CAP,
        }
    }
}

/// The `counter`-th seed derived from `seed`: the first word of the ChaCha
/// stream numbered `counter`.
pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(counter);
    rng.next_u64()
}

// ---------------------------------------------------------------------------
// Builders

/// A point stabiliser `S`, the generators of `G`, and the generators used to
/// sample conjugators (always inside `SL`, or `G` itself for permutation
/// groups).
pub struct Desk {
    pub field: Arc<Field>,
    pub ambient: AmbientSpec,
    pub s: MatGroup,
    pub g_gens: Vec<SemiElement>,
    pub sampler_gens: Vec<SemiElement>,
    pub key: CosetKey,
    pub core: MatGroup,
    cs: OnceCell<CosetSpace>,
}

impl Desk {
    fn new(
        field: Arc<Field>,
        s: MatGroup,
        g_gens: Vec<SemiElement>,
        sampler_gens: Vec<SemiElement>,
        key: CosetKey,
    ) -> Result<Desk> {
        let ambient = AmbientSpec {
            n: s.ambient.n,
            q: field.order(),
            phi: s.ambient.allow_phi,
            iota: s.ambient.allow_iota,
        };
        let core = core_in(&s, &g_gens)?;
        Ok(Desk { field, ambient, s, g_gens, sampler_gens, key, core, cs: OnceCell::new() })
    }

    pub fn s_order(&self) -> usize {
        self.s.order().unwrap_or(0)
    }

    pub fn core_order(&self) -> usize {
        self.core.order().unwrap_or(0)
    }

    /// The coset space, built on first use.
    pub fn coset_space(&self, index_cap: usize) -> std::result::Result<&CosetSpace, BaseError> {
        if let Some(cs) = self.cs.get() {
            return Ok(cs);
        }
        let cs = CosetSpace::new(self.g_gens.clone(), self.s.clone(), self.key.clone(), index_cap, None)?;
        Ok(self.cs.get_or_init(|| cs))
    }
}

fn lin(ms: Vec<Matrix>) -> Vec<SemiElement> {
    ms.into_iter().map(SemiElement::linear).collect()
}

fn param(spec: &SubgroupSpec, name: &str) -> Result<i64> {
    spec.params.get(name).copied().ok_or_else(|| ScenarioError::MissingParam(name.into()))
}

fn field_param(spec: &SubgroupSpec) -> Result<Arc<Field>> {
    let q = u32::try_from(param(spec, "q")?).map_err(|_| ScenarioError::Invalid("q out of range".into()))?;
    Ok(Arc::new(Field::of_order(q)?))
}

fn elem_param(spec: &SubgroupSpec, name: &str) -> Result<Option<Elem>> {
    spec.params.get(name).map(|&a| Elem::try_from(a).map_err(|_| ScenarioError::Invalid(format!("{name} out of range")))).transpose()
}

fn subgroup(tag: &str, params: &[(&str, i64)]) -> SubgroupSpec {
    SubgroupSpec { tag: tag.into(), params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect() }
}

/// Rebuilds the desk case named by a subgroup tag and its parameters.
pub fn build(spec: &SubgroupSpec, opts: &RunOptions) -> Result<Desk> {
    let cap = opts.closure_cap;
    match spec.tag.as_str() {
        // the normaliser of a Singer cycle in GL_n(q), with G = GL_n(q)
        "singer-normalizer" => {
            let f = field_param(spec)?;
            let n = param(spec, "n")? as usize;
            let model = if n == 2 {
                SingerModel::gl2(&f, elem_param(spec, "a")?)?
            } else {
                SingerModel::field_model(n, &f)?
            };
            let s = singer_normalizer(&model)?;
            check_cap(&s, cap)?;
            Desk::new(f.clone(), s, lin(gl_generators(n, &f)), lin(sl_generators(n, &f)), CosetKey::None)
        }
        // its semilinear normaliser, with G = GammaL_2(q)
        "gamma-singer-normalizer" => {
            let f = field_param(spec)?;
            let model = SingerModel::gl2(&f, elem_param(spec, "a")?)?;
            let s = gamma_singer_normalizer(&model)?;
            let mut g = lin(gl_generators(2, &f));
            g.push(SemiElement::phi(2, &f));
            Desk::new(f.clone(), s, g, lin(sl_generators(2, &f)), CosetKey::None)
        }
        // GL_2(3) Z(GL_2(9)), optionally with phi, and G = S SL_2(9)
        "gl23-z" => {
            let with_phi = param(spec, "phi").unwrap_or(0) != 0;
            let s = gl23_in_gl29(with_phi)?;
            let f = s.ambient.field.clone();
            let mut g = s.gens.clone();
            g.extend(lin(sl_generators(2, &f)));
            Desk::new(f.clone(), s, g, lin(sl_generators(2, &f)), CosetKey::None)
        }
        "quaternion-normalizer" => {
            let f = field_param(spec)?;
            let s = quaternion_normalizer(&f)?;
            let mut g = s.gens.clone();
            g.extend(lin(sl_generators(2, &f)));
            Desk::new(f.clone(), s, g, lin(sl_generators(2, &f)), CosetKey::None)
        }
        "gl32-singer-normalizer" => {
            let s = gl32_singer_normalizer()?;
            let f = s.ambient.field.clone();
            Desk::new(f.clone(), s, lin(gl_generators(3, &f)), lin(sl_generators(3, &f)), CosetKey::None)
        }
        // GL_2(3) wr Sym(2) in GL_4(3); cosets bucketed by the image of the block system
        "gl23-wreath-sym2" => {
            let f = Arc::new(Field::of_order(3)?);
            let s = wreath(&general_linear(2, &f), &crate::constructions::sym_generators(2), 2)?.enumerate(cap)?;
            let blocks = vec![vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]], vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1]]];
            Desk::new(f.clone(), s, lin(gl_generators(4, &f)), lin(sl_generators(4, &f)), CosetKey::SubspaceSet(blocks))
        }
        // Sym(4) wr Sym(2) in Sym(8), as permutation matrices over GF(2)
        "sym4-wreath-sym2" => {
            let f = Arc::new(Field::of_order(2)?);
            let s = sym_wreath_matrices(&f, 4, 2)?.enumerate(cap)?;
            let g = symmetric_matrices(&f, 8)?.gens;
            Desk::new(f.clone(), s, g.clone(), g, CosetKey::None)
        }
        other => Err(ScenarioError::UnknownTag(other.into())),
    }
}

fn check_cap(s: &MatGroup, cap: usize) -> Result<()> {
    match s.order() {
        Some(o) if o > cap => Err(SemiError::CapExceeded(cap).into()),
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Registry

/// Conjugators given explicitly rather than found by search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Explicit {
    /// The least `x` in `SL_2(q)` (code order) carrying the cycle `S_a`
    /// onto `S_b`.
    SingerPair { b: Elem },
    /// The displayed `x` for `GL_2(3) Z(GL_2(9))` with `phi`.
    Gl29X,
    /// `x`, `y` and `xy`: the second step of the same chain.
    Gl29Xy,
    /// The least `x` in `SL_2(9)` (by entry codes) with `S ∩ S^x ≤ RT ⋊ <φ>`,
    /// then the least `y` finishing the chain at `Z ⋊ <φ>`.
    Gl29Search,
    /// The displayed `x` for the Singer normaliser in `GL_3(2)`.
    Gl32X,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    /// `b` by exhaustive tuple search.
    BaseExact { b: usize },
    /// `b - 1` conjugators by seeded search reaching the core, with the
    /// lower bound from the absence of regular `(b-1)`-orbits.
    BaseSearch { b: usize },
    /// At least `r` regular orbits on `k`-tuples.
    Reg { k: usize, r: u64 },
    /// Some `x` in `SL` with `S ∩ S^x` of the given shape, by seeded search.
    ShapeSearch { shape: Shape, modulo_phi: bool },
    Explicit { conjugators: Explicit, claim: Claim },
}

impl Plan {
    fn claim(&self) -> Claim {
        match self {
            Plan::BaseExact { b } | Plan::BaseSearch { b } => Claim::BaseSize { b: *b },
            Plan::Reg { k, r } => Claim::RegAtLeast { k: *k, r: *r },
            Plan::ShapeSearch { shape, modulo_phi } => Claim::IntersectionShape { shape: *shape, modulo_phi: *modulo_phi },
            Plan::Explicit { claim, .. } => claim.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// The statement being checked, in words.
    pub anchor: &'static str,
    pub subgroup: SubgroupSpec,
    pub plans: Vec<Plan>,
    /// Reproduction table, row label and field order.
    pub table: Option<(&'static str, &'static str, u32)>,
}

const ANCHOR_SINGER_ODD: &str = "b_S(S.SL_2(q)) = 3 for S the normaliser of a Singer cycle, q > 3 odd; for q > 5 some x in SL_2(q) has S ∩ S^x ≤ D(GL_2(q))";
const ANCHOR_SINGER_EVEN: &str = "b_S(S.SL_2(q)) = 3 for S the normaliser of a Singer cycle, q ≥ 4 even; some x in SL_2(q) has S ∩ S^x ≤ RT(GL_2(q))";
const ANCHOR_GL23: &str = "S = GL_2(3).Z(GL_2(9)), b_S(S.SL_2(9)) = 3; some x in SL_2(9) has S ∩ S^x ≤ RT(GL_2(9))";
const ANCHOR_QUATERNION: &str = "S/Z(GL_2(q)) ≅ 2^2.Sp_2(2): b_S(S.SL_2(q)) is 4 and 3 for q equal to 5 and 7";
const ANCHOR_GL32: &str = "n = 3, q = 2, S the normaliser of a Singer cycle: b_S(S.SL_3(2)) = 3";
const ANCHOR_WREATH: &str = "S = GL_2(3) wr Sym(2) in GL_4(3): b_S(S.SL_4(3)) = 3 and S ∩ S^x ≤ RT(GL_4(3)) for some x";
const ANCHOR_SYM8: &str = "b_S(G) = 5 if G = Sym(8) and S = Sym(4) wr Sym(2), with Reg_S(G, 5) ≥ 5";
const ANCHOR_PAIR: &str = "N_ΓL(S_a) ∩ N_ΓL(S_b) = <φ>Z(GL_2(q)): diagonal for q odd, lower triangular for q even; so S ∩ S^x ≤ RT for some x in SL_2(q)";
const ANCHOR_GL29: &str = "S = GL_2(3).Z(GL_2(9)) ⋊ <φ>, ω^2 - ω - 1 = 0: S ∩ S^x ≤ RT ⋊ <φ> and (S ∩ S^x) ∩ (S ∩ S^x)^y ≤ Z ⋊ <φ>";
const ANCHOR_GL32X: &str = "S the Singer normaliser in GL_3(2): S ∩ S^x = <[[1,1,1],[0,1,0],[1,0,0]]> has order 3";
const ANCHOR_TAB: &str = "n ≥ 6, S primitive maximal solvable with e = 1 (a Singer normaliser): b_S(S.SL_n(q)) = 2";

/// Every registered scenario, in listing order.
pub fn registry() -> Vec<Scenario> {
    let mut out = Vec::new();
    let tri = |odd: bool| if odd { Shape::Diagonal } else { Shape::UpperTriangular };
    for q in [5u32, 7, 9, 11] {
        let mut plans = vec![Plan::BaseExact { b: 3 }];
        if q > 5 {
            plans.push(Plan::ShapeSearch { shape: tri(true), modulo_phi: false });
        }
        out.push(Scenario {
            name: format!("thm-irred-1-q{q}"),
            anchor: ANCHOR_SINGER_ODD,
            subgroup: subgroup("singer-normalizer", &[("n", 2), ("q", q as i64)]),
            plans,
            table: Some(("irred", "1", q)),
        });
    }
    for q in [4u32, 8] {
        out.push(Scenario {
            name: format!("thm-irred-2-q{q}"),
            anchor: ANCHOR_SINGER_EVEN,
            subgroup: subgroup("singer-normalizer", &[("n", 2), ("q", q as i64)]),
            plans: vec![Plan::BaseExact { b: 3 }, Plan::ShapeSearch { shape: tri(false), modulo_phi: false }],
            table: Some(("irred", "2", q)),
        });
    }
    out.push(Scenario {
        name: "thm-irred-3".into(),
        anchor: ANCHOR_GL23,
        subgroup: subgroup("gl23-z", &[("phi", 0)]),
        plans: vec![Plan::BaseExact { b: 3 }, Plan::ShapeSearch { shape: Shape::UpperTriangular, modulo_phi: false }],
        table: Some(("irred", "3", 9)),
    });
    for (q, b) in [(5u32, 4usize), (7, 3)] {
        out.push(Scenario {
            name: format!("thm-irred-4-q{q}"),
            anchor: ANCHOR_QUATERNION,
            subgroup: subgroup("quaternion-normalizer", &[("q", q as i64)]),
            plans: vec![Plan::BaseExact { b }],
            table: Some(("irred", "4", q)),
        });
    }
    out.push(Scenario {
        name: "thm-irred-5".into(),
        anchor: ANCHOR_GL32,
        subgroup: subgroup("gl32-singer-normalizer", &[]),
        plans: vec![Plan::BaseExact { b: 3 }],
        table: Some(("irred", "5", 2)),
    });
    out.push(Scenario {
        name: "thm-irred-6".into(),
        anchor: ANCHOR_WREATH,
        subgroup: subgroup("gl23-wreath-sym2", &[]),
        plans: vec![Plan::BaseSearch { b: 3 }, Plan::ShapeSearch { shape: Shape::UpperTriangular, modulo_phi: false }],
        table: Some(("irred", "6", 3)),
    });
    out.push(Scenario {
        name: "sym8-wreath".into(),
        anchor: ANCHOR_SYM8,
        subgroup: subgroup("sym4-wreath-sym2", &[]),
        plans: vec![Plan::BaseExact { b: 5 }, Plan::Reg { k: 5, r: 5 }],
        table: None,
    });
    for q in [4u32, 8, 9] {
        let f = Field::of_order(q).expect("small field");
        let params = crate::constructions::singer_params(&f);
        let a = params[0];
        let b = params.iter().copied().find(|&b| b != a && b != f.neg(a)).expect("a second parameter exists");
        let shape = if q % 2 == 1 { Shape::Diagonal } else { Shape::LowerTriangular };
        out.push(Scenario {
            name: format!("lemma-rtdiagfield-1-q{q}"),
            anchor: ANCHOR_PAIR,
            subgroup: subgroup("gamma-singer-normalizer", &[("q", q as i64), ("a", a as i64)]),
            plans: vec![Plan::Explicit {
                conjugators: Explicit::SingerPair { b },
                claim: Claim::IntersectionShape { shape, modulo_phi: true },
            }],
            table: None,
        });
    }
    out.push(Scenario {
        name: "lemma-rtdiagfield-2".into(),
        anchor: ANCHOR_GL29,
        subgroup: subgroup("gl23-z", &[("phi", 1)]),
        plans: vec![
            Plan::Explicit {
                conjugators: Explicit::Gl29X,
                claim: Claim::IntersectionShape { shape: Shape::UpperTriangular, modulo_phi: true },
            },
            Plan::Explicit {
                conjugators: Explicit::Gl29Xy,
                claim: Claim::IntersectionShape { shape: Shape::Scalar, modulo_phi: true },
            },
            Plan::Explicit {
                conjugators: Explicit::Gl29Search,
                claim: Claim::IntersectionShape { shape: Shape::Scalar, modulo_phi: true },
            },
        ],
        table: None,
    });
    let c = gl32_matrices().expect("fixed matrices").3;
    out.push(Scenario {
        name: "lemma-rtdiagfield-3".into(),
        anchor: ANCHOR_GL32X,
        subgroup: subgroup("gl32-singer-normalizer", &[]),
        plans: vec![Plan::Explicit {
            conjugators: Explicit::Gl32X,
            claim: Claim::IntersectionEquals { generators: vec![SemiElement::linear(c).to_text()] },
        }],
        table: None,
    });
    for (case, n) in [("1", 6i64), ("4", 7)] {
        for q in [2u32, 3] {
            out.push(Scenario {
                name: format!("tab-case{case}-q{q}"),
                anchor: ANCHOR_TAB,
                subgroup: subgroup("singer-normalizer", &[("n", n), ("q", q as i64)]),
                plans: vec![Plan::BaseSearch { b: 2 }],
                table: Some(("tab", case, q)),
            });
        }
    }
    out
}

pub fn find(name: &str) -> Result<Scenario> {
    registry().into_iter().find(|s| s.name == name).ok_or_else(|| ScenarioError::Unknown(name.into()))
}

/// `(name, anchor)` for every scenario.
pub fn list() -> Vec<(String, &'static str)> {
    registry().into_iter().map(|s| (s.name, s.anchor)).collect()
}

// ---------------------------------------------------------------------------
// Evaluation

/// Maps cap exhaustion to `None`.
fn capped<T>(r: std::result::Result<T, BaseError>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(BaseError::IndexCapExceeded(_) | BaseError::WorkCapExceeded { .. } | BaseError::Semi(SemiError::CapExceeded(_))) => {
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

/// Result of evaluating one claim.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub verdict: Verdict,
    pub order_trace: Vec<usize>,
    /// The computed value, in words.
    pub computed: String,
}

/// Whether no base of length `b - 1` exists, i.e. `Reg(b - 1) = 0`.
fn lower_bound(desk: &Desk, b: usize, opts: &RunOptions) -> Result<(Verdict, String)> {
    if b <= 1 {
        return Ok((Verdict::Verified, String::new()));
    }
    if b == 2 {
        let ok = desk.s_order() > desk.core_order();
        return Ok((Verdict::from_bool(ok), format!("|S| = {} > |S_G| = {}", desk.s_order(), desk.core_order())));
    }
    let Some(cs) = capped(desk.coset_space(opts.index_cap))? else {
        return Ok((Verdict::Inconclusive, "index cap".into()));
    };
    match capped(reg_count(cs, b - 1, RegMode::Full, opts.work_cap))? {
        Some(r) => Ok((Verdict::from_bool(r == 0u32.into()), format!("Reg_{} = {r} on {} points", b - 1, cs.len()))),
        None => Ok((Verdict::Inconclusive, "work cap".into())),
    }
}

/// Checks `claim` for the desk case with the given conjugators.
pub fn evaluate(desk: &Desk, claim: &Claim, conj: &[SemiElement], opts: &RunOptions) -> Result<Evaluation> {
    let core = Target::Equals(desk.core.clone());
    let ev = |verdict, order_trace, computed| Evaluation { verdict, order_trace, computed };
    match claim {
        Claim::IntersectionShape { shape, modulo_phi } => {
            let rep = check_intersection(&desk.s, conj, &Target::Shape { shape: *shape, modulo_phi: *modulo_phi })?;
            let o = *rep.order_trace.last().unwrap_or(&0);
            Ok(ev(Verdict::from_bool(rep.verified), rep.order_trace, format!("order {o}, {shape:?}: {}", rep.verified)))
        }
        Claim::IntersectionEquals { generators } => {
            let gens = generators
                .iter()
                .map(|t| SemiElement::parse(&desk.field, t))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let t = closure(&desk.s.ambient, gens, opts.closure_cap)?;
            let rep = check_intersection(&desk.s, conj, &Target::Equals(t.clone()))?;
            let o = *rep.order_trace.last().unwrap_or(&0);
            Ok(ev(Verdict::from_bool(rep.verified), rep.order_trace, format!("order {o} (target order {})", t.order().unwrap_or(0))))
        }
        Claim::IntersectionCore => {
            let rep = check_intersection(&desk.s, conj, &core)?;
            let o = *rep.order_trace.last().unwrap_or(&0);
            Ok(ev(Verdict::from_bool(rep.verified), rep.order_trace, format!("order {o}, core order {}", desk.core_order())))
        }
        Claim::BaseSize { b } | Claim::BaseSizeAtMost { b } => {
            let rep = check_intersection(&desk.s, conj, &core)?;
            let exact = matches!(claim, Claim::BaseSize { .. });
            let len_ok = if exact { conj.len() + 1 == *b } else { conj.len() < *b };
            let upper = Verdict::from_bool(len_ok && rep.verified);
            let mut computed = if rep.verified {
                format!("b ≤ {}", conj.len() + 1)
            } else {
                format!("{} conjugators miss the core", conj.len())
            };
            let mut verdict = upper;
            if exact {
                let (lower, why) = lower_bound(desk, *b, opts)?;
                verdict = verdict.and(lower);
                computed = match (upper, lower) {
                    (Verdict::Verified, Verdict::Verified) => format!("b = {b} ({why})"),
                    _ => format!("{computed}; lower bound {lower:?} ({why})"),
                };
            }
            Ok(ev(verdict, rep.order_trace, computed))
        }
        Claim::BaseSizeAtLeast { b } => {
            let (v, why) = lower_bound(desk, *b, opts)?;
            Ok(ev(v, Vec::new(), why))
        }
        Claim::RegAtLeast { k, r } => {
            let Some(cs) = capped(desk.coset_space(opts.index_cap))? else {
                return Ok(ev(Verdict::Inconclusive, Vec::new(), "index cap".into()));
            };
            match capped(reg_count(cs, *k, RegMode::Full, opts.work_cap))? {
                Some(count) => {
                    let ok = count.to_u64().map_or(true, |c| c >= *r);
                    Ok(ev(Verdict::from_bool(ok), Vec::new(), format!("Reg_{k} = {count}")))
                }
                None => Ok(ev(Verdict::Inconclusive, Vec::new(), "work cap".into())),
            }
        }
    }
}

fn explicit_conjugators(desk: &Desk, which: &Explicit) -> Result<Vec<SemiElement>> {
    match which {
        Explicit::SingerPair { b } => {
            let f = &desk.field;
            let target = singer(&SingerModel::gl2(f, Some(*b))?)?;
            let a = desk.s.gens.first().ok_or_else(|| ScenarioError::Invalid("no generators".into()))?;
            // the first generator of the semilinear normaliser is the cycle generator
            let t = SemiElement::linear(a.g.clone());
            for x in special_linear_2(f)? {
                let x = SemiElement::linear(x);
                if target.member(&t.conj(&x)?)? {
                    return Ok(vec![x]);
                }
            }
            Err(ScenarioError::Invalid("no conjugating element in SL_2(q)".into()))
        }
        Explicit::Gl29X => Ok(vec![SemiElement::linear(gl29_xy()?.2)]),
        Explicit::Gl29Xy => {
            let (_, _, x, y) = gl29_xy()?;
            let xy = x.mul(&y)?;
            Ok(lin(vec![x, y, xy]))
        }
        Explicit::Gl29Search => {
            let sl: Vec<Matrix> = special_linear_2(&desk.field)?;
            let rt = Target::Shape { shape: Shape::UpperTriangular, modulo_phi: true };
            let z = Target::Shape { shape: Shape::Scalar, modulo_phi: true };
            for x in &sl {
                let xs = SemiElement::linear(x.clone());
                if !check_intersection(&desk.s, std::slice::from_ref(&xs), &rt)?.verified {
                    continue;
                }
                for y in &sl {
                    let conj = lin(vec![x.clone(), y.clone(), x.mul(y)?]);
                    if check_intersection(&desk.s, &conj, &z)?.verified {
                        return Ok(conj);
                    }
                }
            }
            Err(ScenarioError::Invalid("no chain in SL_2(9)".into()))
        }
        Explicit::Gl32X => Ok(vec![SemiElement::linear(gl32_matrices()?.2)]),
    }
}

/// `SL_2(q)` in order of the entry codes read row by row.
fn special_linear_2(f: &Arc<Field>) -> Result<Vec<Matrix>> {
    let q = f.order() as u64;
    let mut out = Vec::new();
    for code in 0..q.pow(4) {
        let d: Vec<Elem> = (0..4).map(|k| ((code / q.pow(3 - k)) % q) as Elem).collect();
        let x = Matrix::from_rows(f, &[vec![d[0], d[1]], vec![d[2], d[3]]])?;
        if x.det() == 1 {
            out.push(x);
        }
    }
    Ok(out)
}

/// One verified (or not) claim of a scenario.
#[derive(Clone, Debug, Serialize)]
pub struct Line {
    pub claim: String,
    pub computed: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub scenario: String,
    pub certificates: Vec<Certificate>,
    pub lines: Vec<Line>,
    pub verdict: Verdict,
}

pub fn describe_claim(claim: &Claim) -> String {
    match claim {
        Claim::IntersectionShape { shape, modulo_phi } => {
            let name = match shape {
                Shape::Scalar => "Z",
                Shape::Diagonal => "D",
                Shape::UpperTriangular => "RT",
                Shape::LowerTriangular => "LT",
            };
            if *modulo_phi {
                format!("intersection ≤ {name} ⋊ <φ>")
            } else {
                format!("intersection ≤ {name}")
            }
        }
        Claim::IntersectionEquals { generators } => format!("intersection = <{}>", generators.join(", ")),
        Claim::IntersectionCore => "intersection = core".into(),
        Claim::BaseSize { b } => format!("b = {b}"),
        Claim::BaseSizeAtMost { b } => format!("b ≤ {b}"),
        Claim::BaseSizeAtLeast { b } => format!("b ≥ {b}"),
        Claim::RegAtLeast { k, r } => format!("Reg_{k} ≥ {r}"),
    }
}

fn certificate(case: &str, desk: &Desk, spec: &SubgroupSpec, conj: &[SemiElement], claim: Claim, ev: &Evaluation, seed: Option<u64>) -> Certificate {
    Certificate {
        case: case.into(),
        ambient: desk.ambient.clone(),
        subgroup: spec.clone(),
        conjugators: conj.iter().map(|c| c.to_text()).collect(),
        claim,
        verified: ev.verdict,
        order_trace: ev.order_trace.clone(),
        seed,
        wall_time_ms: None,
    }
}

/// Produces the certificate for plan number `index` of a scenario.
fn run_plan(sc: &Scenario, desk: &Desk, index: usize, opts: &RunOptions) -> Result<(Certificate, Line)> {
    let plan = &sc.plans[index];
    let claim = plan.claim();
    let seed = derive_seed(opts.seed, index as u64);
    let inconclusive = |why: &str, seed| {
        let ev = Evaluation { verdict: Verdict::Inconclusive, order_trace: Vec::new(), computed: why.to_string() };
        let cert = certificate(&sc.name, desk, &sc.subgroup, &[], claim.clone(), &ev, seed);
        Ok((cert, Line { claim: describe_claim(&claim), computed: ev.computed, verdict: ev.verdict }))
    };
    let (conj, used_seed) = match plan {
        Plan::BaseExact { b } => {
            let Some(cs) = capped(desk.coset_space(opts.index_cap))? else {
                return inconclusive("index cap", None);
            };
            match capped(base_size_exact(cs, b + 1, opts.work_cap))? {
                Some(BaseSize::Exact { base, .. }) => (base[1..].iter().map(|&p| cs.reps[p as usize].clone()).collect(), None),
                Some(BaseSize::AtLeast(k)) => {
                    let ev = Evaluation { verdict: Verdict::Refuted, order_trace: Vec::new(), computed: format!("b ≥ {k}") };
                    let cert = certificate(&sc.name, desk, &sc.subgroup, &[], claim.clone(), &ev, None);
                    return Ok((cert, Line { claim: describe_claim(&claim), computed: ev.computed, verdict: ev.verdict }));
                }
                None => return inconclusive("work cap", None),
            }
        }
        Plan::BaseSearch { b } => {
            match random_search(&desk.s, &desk.sampler_gens, *b, &Target::Equals(desk.core.clone()), seed, opts.trials) {
                Ok((conj, _, _)) => (conj, Some(seed)),
                Err(BaseError::NotFound { .. }) => return inconclusive("no conjugators found", Some(seed)),
                Err(e) => return Err(e.into()),
            }
        }
        Plan::ShapeSearch { shape, modulo_phi } => {
            let target = Target::Shape { shape: *shape, modulo_phi: *modulo_phi };
            match random_search(&desk.s, &desk.sampler_gens, 2, &target, seed, opts.trials) {
                Ok((conj, _, _)) => (conj, Some(seed)),
                Err(BaseError::NotFound { .. }) => return inconclusive("no conjugator found", Some(seed)),
                Err(e) => return Err(e.into()),
            }
        }
        Plan::Reg { .. } => (Vec::new(), None),
        Plan::Explicit { conjugators, .. } => (explicit_conjugators(desk, conjugators)?, None),
    };
    let ev = evaluate(desk, &claim, &conj, opts)?;
    let cert = certificate(&sc.name, desk, &sc.subgroup, &conj, claim.clone(), &ev, used_seed);
    Ok((cert, Line { claim: describe_claim(&claim), computed: ev.computed, verdict: ev.verdict }))
}

/// Runs every plan of a scenario.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Result<Outcome> {
    let desk = match build(&sc.subgroup, opts) {
        Ok(d) => d,
        Err(ScenarioError::Semi(SemiError::CapExceeded(_))) => {
            let lines = sc
                .plans
                .iter()
                .map(|p| Line { claim: describe_claim(&p.claim()), computed: "closure cap".into(), verdict: Verdict::Inconclusive })
                .collect();
            return Ok(Outcome { scenario: sc.name.clone(), certificates: Vec::new(), lines, verdict: Verdict::Inconclusive });
        }
        Err(e) => return Err(e),
    };
    let mut certificates = Vec::new();
    let mut lines = Vec::new();
    let mut verdict = Verdict::Verified;
    for i in 0..sc.plans.len() {
        let (c, l) = run_plan(sc, &desk, i, opts)?;
        verdict = verdict.and(l.verdict);
        certificates.push(c);
        lines.push(l);
    }
    Ok(Outcome { scenario: sc.name.clone(), certificates, lines, verdict })
}

pub fn run_named(name: &str, opts: &RunOptions) -> Result<Outcome> {
    run(&find(name)?, opts)
}

/// Re-checks a certificate from its own contents. The verdict is
/// `Verified` only when the recomputed certificate equals the given one
/// and verifies; `Refuted` when it recomputes differently; `Inconclusive`
/// when caps block the recomputation or the certificate claims nothing.
pub fn verify_certificate(cert: &Certificate, opts: &RunOptions) -> Result<(Verdict, Certificate, String)> {
    let desk = build(&cert.subgroup, opts)?;
    if desk.ambient != cert.ambient {
        return Ok((Verdict::Refuted, cert.clone(), "ambient does not match the subgroup".into()));
    }
    let conj = cert
        .conjugators
        .iter()
        .map(|t| SemiElement::parse(&desk.field, t))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    for c in &conj {
        if !desk.s.ambient.admits(c) {
            return Ok((Verdict::Refuted, cert.clone(), "conjugator outside the ambient group".into()));
        }
    }
    let ev = evaluate(&desk, &cert.claim, &conj, opts)?;
    let mut again = cert.clone();
    again.verified = ev.verdict;
    again.order_trace = ev.order_trace.clone();
    let verdict = if cert.verified == Verdict::Inconclusive || ev.verdict == Verdict::Inconclusive {
        Verdict::Inconclusive
    } else if again == *cert {
        ev.verdict
    } else {
        Verdict::Refuted
    };
    Ok((verdict, again, ev.computed))
}

/// Parses a file holding one certificate or a JSON array of them.
pub fn parse_certificates(text: &str) -> std::result::Result<Vec<Certificate>, serde_json::Error> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|c| vec![c])
    }
}

// ---------------------------------------------------------------------------
// Reproduction tables

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub table: String,
    pub row: String,
    pub scenario: String,
    pub claimed: String,
    pub computed: String,
    pub verdict: Verdict,
    pub note: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// Verified when every row is, including the empty report.
    pub fn verdict(&self) -> Verdict {
        self.rows.iter().fold(Verdict::Verified, |v, r| v.and(r.verdict))
    }
}

pub const TABLES: &[&str] = &["irred", "tab"];

/// Rows of a table, restricted to the listed rows (all when `None`) and to
/// fields of order at most `qmax`. A row is named by its label (`1`) or its
/// printed form (`(1) q=2`).
pub fn reproduce(table: &str, rows: Option<&[String]>, qmax: u32, opts: &RunOptions) -> Result<Report> {
    if !TABLES.contains(&table) {
        return Err(ScenarioError::Unknown(table.into()));
    }
    let mut report = Report::default();
    for sc in registry() {
        let Some((t, label, q)) = sc.table else { continue };
        let printed = format!("({label}) q={q}");
        if t != table || q > qmax || rows.is_some_and(|r| !r.iter().any(|x| x == label || *x == printed)) {
            continue;
        }
        let out = run(&sc, opts)?;
        let note = if t == "tab" {
            let n = sc.subgroup.params["n"] as u64;
            let bound = sinbase_row(n, q as u64, Denominator::QMinusOne);
            if bound.fails {
                "fixed-point bound a^2/b ≥ 1, settled by the certificate".into()
            } else {
                "fixed-point bound a^2/b < 1 also gives b = 2".into()
            }
        } else {
            String::new()
        };
        for l in out.lines {
            report.rows.push(ReportRow {
                table: t.into(),
                row: printed.clone(),
                scenario: sc.name.clone(),
                claimed: l.claim,
                computed: l.computed,
                verdict: l.verdict,
                note: note.clone(),
            });
        }
    }
    Ok(report)
}

/// Parameters of a scenario's subgroup, for display.
pub fn params_text(spec: &SubgroupSpec) -> String {
    let p: BTreeMap<_, _> = spec.params.iter().collect();
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}
