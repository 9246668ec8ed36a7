#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smove::criterion::{CommutatorDecomposition, CriterionInstance};
use smove::freegroup::{Letter, Word};

/// Free reduction by repeatedly deleting the rightmost cancelling pair.
pub fn oracle_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut w = letters.to_vec();
    while let Some(i) = (0..w.len().saturating_sub(1)).rev().find(|&i| w[i].cancels(w[i + 1])) {
        w.drain(i..i + 2);
    }
    w
}

pub fn oracle_inverse(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

/// Concatenates raw letter sequences and reduces with the oracle.
pub fn oracle_product(parts: &[&[Letter]]) -> Vec<Letter> {
    let all: Vec<Letter> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    oracle_reduce(&all)
}

pub fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

pub fn random_word(rng: &mut ChaCha8Rng, gens: u32, max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    Word::from_letters((0..len).map(|_| Letter::new(rng.gen_range(1..=gens), if rng.gen() { 1 } else { -1 })))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiplies one randomly chosen conjugator of the decomposition by a
/// random letter on the right.
pub fn mutate_conjugator(inst: &CriterionInstance, rng: &mut ChaCha8Rng) -> CriterionInstance {
    let mut factors = inst.decomposition().factors.clone();
    let gens = inst.k().generator_count();
    let alpha = rng.gen_range(0..factors.len());
    let letter = Letter::new(rng.gen_range(1..=gens), if rng.gen() { 1 } else { -1 });
    let side = if rng.gen() { &mut factors[alpha].r } else { &mut factors[alpha].s };
    side.conjugator = side.conjugator.mul(&Word::from_letter(letter));
    CriterionInstance::new(
        inst.k().clone(),
        inst.l().clone(),
        inst.r_name(),
        inst.s_name(),
        CommutatorDecomposition::new(factors),
    )
    .unwrap()
}

/// Dense square matrices over F_p as nested vectors, kept apart from the
/// library's matrix type.
pub type Mat = Vec<Vec<u64>>;

pub fn mat_of(m: &smove::playground::Matrix) -> Mat {
    let d = m.dim();
    (0..d).map(|i| (0..d).map(|j| m.get(i, j)).collect()).collect()
}

pub fn mat_id(d: usize) -> Mat {
    (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat, p: u64) -> Mat {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j] % p).sum::<u64>() % p).collect())
        .collect()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Inverse by row reduction of `[A | I]`, with Fermat inverses of pivots.
pub fn mat_inv(a: &Mat, p: u64) -> Option<Mat> {
    let d = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().copied().chain((0..d).map(|j| u64::from(i == j))).collect())
        .collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        let inv = pow_mod(m[col][col], p - 2, p);
        for x in m[col].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..d {
            if r != col && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..2 * d {
                    m[r][c] = (m[r][c] + p - f * m[col][c] % p) % p;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[d..].to_vec()).collect())
}
