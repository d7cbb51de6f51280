//! Test-only reference semantics, written without any library evaluation code.

#![allow(dead_code)]

/// Clauses and conjuncts as signed integers.
#[derive(Clone, Debug)]
pub struct Raw {
    pub n: u32,
    pub units: Vec<i64>,
    pub clauses: Vec<Vec<i64>>,
}

fn holds(lit: i64, bits: u64) -> bool {
    let value = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
    value == (lit > 0)
}

/// Every total assignment (bit `v-1` is variable `v`) with exactly one true
/// literal occurrence per clause and every unit true.
pub fn models(raw: &Raw) -> Vec<u64> {
    assert!(raw.n <= 20);
    (0..1u64 << raw.n)
        .filter(|&bits| {
            raw.units.iter().all(|&u| holds(u, bits))
                && raw
                    .clauses
                    .iter()
                    .all(|c| c.iter().filter(|&&l| holds(l, bits)).count() == 1)
        })
        .collect()
}

/// Lexicographically lowest model with variable 1 most significant.
pub fn lowest_model(raw: &Raw) -> Option<Vec<bool>> {
    models(raw)
        .into_iter()
        .map(|bits| (1..=raw.n).map(|v| bits >> (v - 1) & 1 == 1).collect::<Vec<_>>())
        .min()
}

pub fn entailed(raw: &Raw, lit: i64) -> bool {
    models(raw).iter().all(|&b| holds(lit, b))
}

pub fn satisfies(raw: &Raw, values: &[bool]) -> bool {
    let bits = values
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &v)| acc | (u64::from(v) << i));
    raw.units.iter().all(|&u| holds(u, bits))
        && raw
            .clauses
            .iter()
            .all(|c| c.iter().filter(|&&l| holds(l, bits)).count() == 1)
}
