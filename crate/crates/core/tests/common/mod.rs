//! Desk cases and deterministic checks shared by the property suite and the
//! acceptance runner.
#![allow(dead_code)]

use num_bigint::BigUint;
use rustc_hash::FxHashSet;
use solvbase::constructions::{singer, singer_params, SingerModel};
use solvbase::linalg::Matrix;
use solvbase::basesize::{base_size_exact, reg_count, BaseSize, CosetSpace, RegMode};
use solvbase::bounds::log_lower;
use solvbase::gf::{prime_power, Field};
use solvbase::scenarios::{build, find, Desk, RunOptions};
use std::sync::Arc;

/// Scenarios whose coset space is small enough for exact search.
pub const SMALL_DESK: &[&str] = &[
    "thm-irred-1-q5",
    "thm-irred-1-q7",
    "thm-irred-1-q9",
    "thm-irred-1-q11",
    "thm-irred-2-q4",
    "thm-irred-2-q8",
    "thm-irred-3",
    "thm-irred-4-q5",
    "thm-irred-4-q7",
    "thm-irred-5",
    "sym8-wreath",
];

/// Every desk case with a coset space, including the 5265-point one.
pub const ALL_DESK: &[&str] = &[
    "thm-irred-1-q5",
    "thm-irred-1-q7",
    "thm-irred-1-q9",
    "thm-irred-1-q11",
    "thm-irred-2-q4",
    "thm-irred-2-q8",
    "thm-irred-3",
    "thm-irred-4-q5",
    "thm-irred-4-q7",
    "thm-irred-5",
    "thm-irred-6",
    "sym8-wreath",
];

pub fn gf(q: u32) -> Arc<Field> {
    Arc::new(Field::of_order(q).expect("prime power"))
}

pub fn prime_powers_up_to(n: u32) -> Vec<u32> {
    (2..=n).filter(|&q| prime_power(q as u64).is_some()).collect()
}

pub fn desk(name: &str) -> Desk {
    let sc = find(name).expect("registered scenario");
    build(&sc.subgroup, &RunOptions::default()).expect("desk case builds")
}

pub fn space(d: &Desk) -> &CosetSpace {
    d.coset_space(RunOptions::default().index_cap).expect("index under cap")
}

pub const WORK: u64 = 50_000_000;

pub fn exact_b(cs: &CosetSpace) -> usize {
    match base_size_exact(cs, 6, WORK).expect("work cap") {
        BaseSize::Exact { b, .. } => b,
        BaseSize::AtLeast(k) => panic!("b ≥ {k}"),
    }
}

/// Field axioms on a field of order `q`: commutativity, inverses and
/// distributivity. Distributivity is checked as additivity of `b -> a b`
/// on every `b` against each additive generator (the codes `p^i`), which
/// implies it for every triple; full triples are also run when `q <= 64`.
pub fn field_axioms(q: u32) -> Result<(), String> {
    let f = Field::of_order(q).map_err(|e| e.to_string())?;
    let gens: Vec<u32> = (0..f.degree()).map(|i| f.p().pow(i)).collect();
    for a in f.elements() {
        if a != 0 && f.mul(a, f.inv(a).map_err(|e| e.to_string())?) != 1 {
            return Err(format!("q={q}: a inv(a) != 1 for a={a}"));
        }
        for b in f.elements() {
            if f.mul(a, b) != f.mul(b, a) {
                return Err(format!("q={q}: {a}*{b} not commutative"));
            }
            if f.add(a, b) != f.add(b, a) {
                return Err(format!("q={q}: {a}+{b} not commutative"));
            }
            let cs: Box<dyn Iterator<Item = u32>> =
                if q <= 64 { Box::new(f.elements()) } else { Box::new(gens.iter().copied()) };
            for c in cs {
                if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                    return Err(format!("q={q}: distributivity fails at ({a},{b},{c})"));
                }
            }
        }
    }
    Ok(())
}

/// `x -> x^p` respects addition and multiplication on every pair.
pub fn frobenius_is_automorphism(q: u32) -> Result<(), String> {
    let f = Field::of_order(q).map_err(|e| e.to_string())?;
    for a in f.elements() {
        for b in f.elements() {
            let fr = |x| f.frobenius(x, 1);
            if fr(f.add(a, b)) != f.add(fr(a), fr(b)) || fr(f.mul(a, b)) != f.mul(fr(a), fr(b)) {
                return Err(format!("q={q}: frobenius fails at ({a},{b})"));
            }
        }
    }
    Ok(())
}

/// `|orbit| |stabiliser| = |S|` for every `S`-orbit on the cosets.
pub fn orbit_stabilizer(cs: &CosetSpace) -> Result<(), String> {
    let s = cs.s_keys();
    let orbits = cs.orbit_partition(&s).map_err(|e| e.to_string())?;
    if orbits.iter().map(|o| o.len()).sum::<usize>() != cs.len() {
        return Err("orbits do not partition the points".into());
    }
    for o in &orbits {
        let st = cs.stabilizer_of_point(&s, o[0]).map_err(|e| e.to_string())?;
        if st.len() * o.len() != s.len() {
            return Err(format!("orbit of {} has size {} but stabiliser {}", o[0], o.len(), st.len()));
        }
    }
    Ok(())
}

/// `b ≤ 4` implies `Reg(5) ≥ 5`, and `b ≥ ceil(log_|Omega| |G/S_G|)`.
/// Returns `(b, Reg(5), log bound)`.
pub fn base_inequalities(cs: &CosetSpace) -> Result<(usize, BigUint, u64), String> {
    let b = exact_b(cs);
    let reg5 = reg_count(cs, 5, RegMode::Full, WORK).map_err(|e| e.to_string())?;
    let order = BigUint::from(solvbase::basesize::image_order(cs));
    let lower = if cs.len() >= 2 { log_lower(&order, cs.len() as u64) } else { 0 };
    if b <= 4 && reg5 < BigUint::from(5u32) {
        return Err(format!("b = {b} but Reg_5 = {reg5}"));
    }
    if (b as u64) < lower {
        return Err(format!("b = {b} below the log bound {lower}"));
    }
    Ok((b, reg5, lower))
}

/// `b ≤ k` exactly when `Reg(k) ≥ 1`, for `k` up to 5.
pub fn base_reg_equivalence(cs: &CosetSpace) -> Result<(), String> {
    let b = exact_b(cs);
    for k in 1..=5 {
        let r = reg_count(cs, k, RegMode::Full, WORK).map_err(|e| e.to_string())?;
        if (b <= k) != (r >= BigUint::from(1u32)) {
            return Err(format!("b = {b}, Reg_{k} = {r}"));
        }
    }
    Ok(())
}

/// `S_a` together with the zero matrix is closed under addition, for every
/// admissible `a`.
pub fn singer_field_closure(q: u32) -> Result<(), String> {
    let f = gf(q);
    for a in singer_params(&f) {
        let t = singer(&SingerModel::gl2(&f, Some(a)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mats: Vec<Matrix> = t.elements().map_err(|e| e.to_string())?.iter().map(|x| x.g).collect();
        let mut set: FxHashSet<Vec<u8>> = mats.iter().map(|m| m.canonical_bytes()).collect();
        set.insert(Matrix::zero(2, &f).canonical_bytes());
        if set.len() != (q * q) as usize {
            return Err(format!("q={q}, a={a}: {} elements", set.len()));
        }
        for x in &mats {
            for y in &mats {
                if !set.contains(&x.add(y).map_err(|e| e.to_string())?.canonical_bytes()) {
                    return Err(format!("q={q}, a={a}: sum leaves the cycle"));
                }
            }
        }
    }
    Ok(())
}

/// Whether every 2x2 block row of a 4x4 matrix has exactly one nonzero block.
pub fn block_monomial(h: &Matrix) -> bool {
    (0..2).all(|bi| {
        (0..2)
            .filter(|&bj| (0..2).any(|i| (0..2).any(|j| h.get(2 * bi + i, 2 * bj + j) != 0)))
            .count()
            == 1
    })
}

/// For `h = diag(D_1, D_2) s` in `GL_2(3) wr Sym(2)` and the block
/// conjugator `x` built from `x_1, x_2`: if `h^x` is block monomial then
/// `s = 1` and `D_1^(x_1) = D_2^(x_2)`. Checked on `trials` seeded samples.
pub fn block_conjugation_trials(seed: u64, trials: usize) -> Result<usize, String> {
    use rand::{Rng, SeedableRng};
    use solvbase::constructions::conjugator_igrekl;
    use solvbase::linalg::{block_diag, kron, perm_matrix};
    let f = gf(3);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let random_gl = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let rows: Vec<Vec<u32>> = (0..2).map(|_| (0..2).map(|_| rng.gen_range(0..3)).collect()).collect();
        let m = Matrix::from_rows(&f, &rows).expect("codes in range");
        if m.det() != 0 {
            return m;
        }
    };
    let mut swaps = 0;
    for _ in 0..trials {
        let (d1, d2, x1, x2) = (random_gl(&mut rng), random_gl(&mut rng), random_gl(&mut rng), random_gl(&mut rng));
        let swap = rng.gen_bool(0.5);
        let p = if swap { perm_matrix(&f, &[1, 0]).expect("permutation") } else { Matrix::identity(2, &f) };
        // block (i, j) of kron(g, h) is h_ij g
        let s = kron(&Matrix::identity(2, &f), &p).expect("same field");
        let h = block_diag(&[d1.clone(), d2.clone()]).expect("blocks").mul_unchecked(&s);
        let x = conjugator_igrekl(&[x1.clone(), x2.clone()]).map_err(|e| e.to_string())?;
        let hx = x.inverse().map_err(|e| e.to_string())?.mul_unchecked(&h).mul_unchecked(&x);
        if !block_monomial(&hx) {
            swaps += usize::from(swap);
            continue;
        }
        if swap {
            return Err(format!("h^x block monomial with s != 1: h = {}", h.to_text()));
        }
        let c1 = x1.inverse().map_err(|e| e.to_string())?.mul_unchecked(&d1).mul_unchecked(&x1);
        let c2 = x2.inverse().map_err(|e| e.to_string())?.mul_unchecked(&d2).mul_unchecked(&x2);
        if c1 != c2 {
            return Err(format!("D_1^x_1 != D_2^x_2 for h = {}", h.to_text()));
        }
    }
    Ok(swaps)
}
