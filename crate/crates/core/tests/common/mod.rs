//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semcom_core::entropy::MessageEnsemble;
use semcom_core::kb::{BallCenter, SynonymPartition};
use semcom_core::space::{Norm, SemanticSpace, Slot};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shannon entropy in bits, written out directly.
pub fn entropy(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &x in p {
        if x > 0.0 {
            h -= x * x.ln() / std::f64::consts::LN_2;
        }
    }
    h
}

/// Probability vector with roughly `zero_share` exact zeros and at least one
/// positive entry.
pub fn random_probs<R: Rng>(rng: &mut R, n: usize, zero_share: f64) -> Vec<f64> {
    let mut w: Vec<f64> =
        (0..n).map(|_| if rng.random_bool(zero_share) { 0.0 } else { rng.random::<f64>() + 1e-3 }).collect();
    if w.iter().all(|&x| x == 0.0) {
        let i = rng.random_range(0..n);
        w[i] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random space with up to `max_m` categories of 1..=4 attributes, null
/// slots, zero-mass entities and at most `max_n` distinct tuples.
pub fn random_space<R: Rng>(rng: &mut R, max_m: usize, max_n: usize) -> SemanticSpace {
    let m = rng.random_range(1..=max_m);
    let sizes: Vec<usize> = (0..m).map(|_| rng.random_range(1..=4)).collect();
    let target = rng.random_range(1..=max_n);
    let mut tuples: BTreeSet<Vec<Slot>> = BTreeSet::new();
    for _ in 0..target * 3 {
        if tuples.len() == target {
            break;
        }
        let t: Vec<Slot> = sizes
            .iter()
            .map(|&n| if rng.random_bool(0.15) { None } else { Some(rng.random_range(0..n)) })
            .collect();
        tuples.insert(t);
    }
    let tuples: Vec<Vec<Slot>> = tuples.into_iter().collect();
    let probs = random_probs(rng, tuples.len(), 0.1);
    let cats: Vec<(String, Vec<String>)> = sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| (format!("c{j}"), (0..n).map(|i| format!("a{i}")).collect()))
        .collect();
    let entries: Vec<(Vec<Slot>, f64)> = tuples.into_iter().zip(probs).collect();
    SemanticSpace::from_tuples(&cats, &entries, Norm::L2).expect("generated space is valid")
}

/// Random partition of `0..n` into groups.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> SynonymPartition {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut groups = Vec::new();
    let mut rest = idx.as_slice();
    while !rest.is_empty() {
        let size = rng.random_range(1..=rest.len().min(4));
        groups.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    SynonymPartition::new(groups, n).expect("generated partition is valid")
}

/// Random joint over `K <= max_k` positions of 1..=3 entities each.
pub fn random_ensemble<R: Rng>(rng: &mut R, max_k: usize) -> MessageEnsemble {
    let k = rng.random_range(1..=max_k);
    let sets: Vec<Vec<String>> = (0..k)
        .map(|p| (0..rng.random_range(1..=3)).map(|i| format!("p{p}e{i}")).collect())
        .collect();
    let size: usize = sets.iter().map(Vec::len).product();
    let joint = random_probs(rng, size, 0.3);
    MessageEnsemble::new(sets, joint).expect("generated ensemble is valid")
}

/// Attribute axis with a valid cover of disjoint balls: distinct integer
/// coordinates cut into contiguous runs, one ball per run.
pub struct Cover {
    pub labels: Vec<String>,
    pub coords: Vec<f64>,
    pub probs: Vec<f64>,
    pub centers: Vec<BallCenter>,
}

pub fn random_cover<R: Rng>(rng: &mut R) -> Cover {
    let n = rng.random_range(2..=8);
    let mut coords: Vec<f64> = (0..20).map(f64::from).collect();
    coords.shuffle(rng);
    coords.truncate(n);
    coords.sort_by(f64::total_cmp);
    let probs = random_probs(rng, n, 0.15);
    let mut centers = Vec::new();
    let mut start = 0;
    while start < n {
        let end = rng.random_range(start + 1..=n);
        let (lo, hi) = (coords[start], coords[end - 1]);
        let eps = ((hi - lo) / 2.0).max(0.25);
        centers.push(BallCenter::new(format!("b{}", centers.len()), (lo + hi) / 2.0, eps));
        start = end;
    }
    Cover { labels: (0..n).map(|i| format!("x{i}")).collect(), coords, probs, centers }
}
