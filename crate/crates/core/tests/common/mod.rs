//! Seeded random instances shared by the property and acceptance suites.

#![allow(dead_code)]

use orbitmat::function_model::{localize, parse_spec, LocalFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub spec: String,
    pub n: usize,
    pub local: LocalFunction,
}

/// A random residue-class-wise affine spec that passes validation.
pub fn random_rcwa(rng: &mut impl Rng) -> String {
    loop {
        let d: i64 = rng.gen_range(2..=4);
        let mut text = format!("rcwa:mod={d}");
        for j in 0..d {
            let a: i64 = rng.gen_range(0..=2 * d);
            // Pick b so that a*j + b = 0 (mod d).
            let b = -a * j + d * rng.gen_range(-3..=3);
            text.push_str(&format!(";{j}:{a},{b}"));
        }
        let cut: u64 = rng.gen_range(0..=4);
        text.push_str(&format!(";cut={cut}"));
        if parse_spec(&text).is_ok() {
            return text;
        }
    }
}

/// A random finite table on `{1..=range}`. Sparse tables tend to be acyclic,
/// dense ones usually close a cycle.
pub fn random_table(rng: &mut impl Rng, range: u64) -> String {
    let density: f64 = rng.gen_range(0.2..1.0);
    let mut pairs = Vec::new();
    for x in 1..=range {
        if rng.gen_bool(density) {
            let mut y = rng.gen_range(1..=range);
            if y == x {
                y = if x == range { 1 } else { x + 1 };
            }
            if y != x {
                pairs.push(format!("{x}>{y}"));
            }
        }
    }
    if pairs.is_empty() {
        pairs.push(format!("1>{}", range.max(2)));
    }
    format!("table:{}", pairs.join(","))
}

/// A random table whose iteration is acyclic: each key maps strictly up.
pub fn random_forest_table(rng: &mut impl Rng, range: u64) -> String {
    let mut pairs = Vec::new();
    for x in 1..range {
        if rng.gen_bool(0.85) {
            pairs.push(format!("{x}>{}", rng.gen_range(x + 1..=range)));
        }
    }
    if pairs.is_empty() {
        return format!("table:1>{range}");
    }
    format!("table:{}", pairs.join(","))
}

/// `count` instances with `n <= 64`, deterministic for a given seed.
pub fn instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=64);
            let range = rng.gen_range(2..=n as u64 + 6);
            let spec = match i % 3 {
                0 => random_rcwa(&mut rng),
                1 => random_table(&mut rng, range),
                _ => random_forest_table(&mut rng, range),
            };
            let local = localize(&parse_spec(&spec).unwrap(), n).unwrap();
            Instance { spec, n, local }
        })
        .collect()
}
