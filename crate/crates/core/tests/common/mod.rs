#![allow(dead_code)]

use lexlab::avm::{canonicalize, unify, FeatureStructure, FeatureValue, Var};
use proptest::prelude::*;

pub const ATTRS: &[&str] = &["A", "B", "C", "D"];
pub const ATOMS: &[&str] = &["p", "q", "r"];
pub const VARS: &[&str] = &["X", "Y", "Z"];

fn value(depth: u32) -> BoxedStrategy<FeatureValue> {
    let leaf = prop_oneof![
        3 => prop::sample::select(ATOMS).prop_map(FeatureValue::atom),
        1 => prop::sample::select(VARS).prop_map(FeatureValue::var),
    ];
    if depth <= 1 {
        leaf.boxed()
    } else {
        prop_oneof![3 => leaf, 2 => structure(depth - 1).prop_map(FeatureValue::Nested)].boxed()
    }
}

/// Structures at most `depth` levels deep over a small vocabulary, so that
/// pairs overlap often enough to exercise both success and conflict.
pub fn structure(depth: u32) -> BoxedStrategy<FeatureStructure> {
    prop::collection::btree_map(prop::sample::select(ATTRS), value(depth), 0..=3)
        .prop_map(|m| m.into_iter().fold(FeatureStructure::new(), |fs, (a, v)| fs.with(a, v)))
        .boxed()
}

pub fn fs() -> BoxedStrategy<FeatureStructure> {
    structure(4)
}

/// Renames every variable apart with `suffix`.
pub fn apart(fs: &FeatureStructure, suffix: &str) -> FeatureStructure {
    fs.rename_vars(&mut |v: &Var| Var::new(&format!("{}{suffix}", v.as_str())))
}

pub fn same(a: &FeatureStructure, b: &FeatureStructure) -> bool {
    canonicalize(a) == canonicalize(b)
}

pub fn join(a: &FeatureStructure, b: &FeatureStructure) -> Option<FeatureStructure> {
    unify(a, b).ok().map(|u| u.structure)
}

pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Two-sided Fisher p by exact integer enumeration of every table with the
/// observed margins.
pub fn fisher_oracle(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let n = r1 + r2;
    if r1 == 0 || r2 == 0 || c1 == 0 || c1 == n {
        return 1.0;
    }
    let weight = |x: u64| binom(r1, x) * binom(r2, c1 - x);
    let observed = weight(a);
    let mut tail = 0u128;
    for x in 0..=r1.min(c1) {
        if c1 - x <= r2 {
            let w = weight(x);
            if w <= observed {
                tail += w;
            }
        }
    }
    tail as f64 / binom(n, c1) as f64
}

/// Tukey's hinges by depth: the median sits at depth (n+1)/2, the hinges at
/// depth (floor(median depth)+1)/2 counted from either end. Half depths
/// average the two neighbours.
pub fn hinge_oracle(values: &[u64]) -> (f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len();
    let at_depth = |from_top: bool, depth2: usize| {
        // depth2 is twice the depth, so odd values are half depths.
        let pick = |d: usize| if from_top { v[n - d] as f64 } else { v[d - 1] as f64 };
        if depth2.is_multiple_of(2) {
            pick(depth2 / 2)
        } else {
            (pick(depth2 / 2) + pick(depth2 / 2 + 1)) / 2.0
        }
    };
    let median_depth2 = n + 1;
    let hinge_depth2 = (median_depth2 / 2) + 1;
    (at_depth(false, hinge_depth2), at_depth(false, median_depth2), at_depth(true, hinge_depth2))
}
