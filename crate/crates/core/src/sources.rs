//! Synthetic sources: Zipf vectors, random semantic spaces, sequence KBs with
//! tunable dependency, and synonym KBs.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::entropy::MessageEnsemble;
use crate::error::{Error, Result};
use crate::kb::{KnowledgeBase, Substitution};
use crate::space::{Norm, SemanticSpace, Slot};

/// Upper bound on the number of attribute tuples of a random space.
pub const MAX_TUPLES: usize = 1 << 20;

/// `p(i) ∝ i^{-a}` for `i = 1..=n`.
pub fn zipf_probs(n: usize, a: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Zipf support must be at least 1".into()));
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("Zipf exponent must be non-negative, got {a}")));
    }
    let w: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-a)).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// Variance of the rank `I` when `I` is drawn from `zipf_probs(n, a)`.
pub fn zipf_index_variance(n: usize, a: f64) -> Result<f64> {
    let p = zipf_probs(n, a)?;
    let mean: f64 = p.iter().enumerate().map(|(i, q)| (i + 1) as f64 * q).sum();
    Ok(p.iter().enumerate().map(|(i, q)| q * ((i + 1) as f64 - mean).powi(2)).sum())
}

/// Dependency strength for each exponent of `grid`: the rank variance
/// normalized by its maximum over the grid.
pub fn zipf_dependency(n: usize, grid: &[f64]) -> Result<Vec<f64>> {
    let v: Vec<f64> = grid.iter().map(|&a| zipf_index_variance(n, a)).collect::<Result<_>>()?;
    let max = v.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Ok(vec![0.0; v.len()]);
    }
    Ok(v.into_iter().map(|x| x / max).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMode {
    #[default]
    Low,
    High,
}

impl VarianceMode {
    /// Symmetric Dirichlet concentration of the entity joint.
    pub fn concentration(self) -> f64 {
        match self {
            VarianceMode::Low => 10.0,
            VarianceMode::High => 0.3,
        }
    }
}

impl fmt::Display for VarianceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarianceMode::Low => "low",
            VarianceMode::High => "high",
        })
    }
}

impl FromStr for VarianceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(VarianceMode::Low),
            "high" => Ok(VarianceMode::High),
            other => Err(Error::InvalidParameter(format!("unknown variance mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    /// Attribute count of each category; its length is the dimension `M`.
    pub attrs_per_dim: Vec<usize>,
    pub variance: VarianceMode,
    pub seed: u64,
}

impl SpaceSpec {
    pub fn new(attrs_per_dim: Vec<usize>, variance: VarianceMode, seed: u64) -> Self {
        SpaceSpec { attrs_per_dim, variance, seed }
    }

    /// `m` categories of `n` attributes each.
    pub fn square(m: usize, n: usize, variance: VarianceMode, seed: u64) -> Self {
        SpaceSpec::new(vec![n; m], variance, seed)
    }
}

/// Symmetric Dirichlet sample via normalized Gamma draws.
fn dirichlet<R: Rng + ?Sized>(len: usize, alpha: f64, rng: &mut R) -> Result<Vec<f64>> {
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let draws: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidDistribution("Dirichlet draw underflowed".into()));
    }
    Ok(draws.into_iter().map(|x| x / total).collect())
}

/// Category names `c1..cM` and attribute labels `a1..an`.
pub fn grid_categories(attrs_per_dim: &[usize]) -> Vec<(String, Vec<String>)> {
    attrs_per_dim
        .iter()
        .enumerate()
        .map(|(j, &n)| (format!("c{}", j + 1), (1..=n).map(|i| format!("a{i}")).collect()))
        .collect()
}

/// A space over every attribute tuple whose joint is drawn from a symmetric
/// Dirichlet, with the integer-grid embedding.
pub fn random_space(spec: &SpaceSpec) -> Result<SemanticSpace> {
    if spec.attrs_per_dim.is_empty() || spec.attrs_per_dim.contains(&0) {
        return Err(Error::InvalidParameter("every category needs at least one attribute".into()));
    }
    let size = spec
        .attrs_per_dim
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n).filter(|&s| s <= MAX_TUPLES))
        .ok_or_else(|| Error::InvalidParameter(format!("more than {MAX_TUPLES} attribute tuples")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let joint = dirichlet(size, spec.variance.concentration(), &mut rng)?;
    let tuples: Vec<(Vec<Slot>, f64)> = joint
        .into_iter()
        .enumerate()
        .map(|(mut i, p)| {
            let mut t = vec![None; spec.attrs_per_dim.len()];
            for (j, &n) in spec.attrs_per_dim.iter().enumerate().rev() {
                t[j] = Some(i % n);
                i /= n;
            }
            (t, p)
        })
        .collect();
    SemanticSpace::from_tuples(&grid_categories(&spec.attrs_per_dim), &tuples, Norm::L2)
}

/// Two-category space whose entity probabilities are dyadic and whose
/// conditional books reproduce the flat Fano lengths (1, 2, 3, 3).
pub fn dyadic_space() -> SemanticSpace {
    let cats = vec![
        ("x".to_string(), vec!["x1".to_string(), "x2".to_string()]),
        ("y".to_string(), vec!["y1".to_string(), "y2".to_string(), "y3".to_string()]),
    ];
    let tuples = [
        (vec![Some(0), Some(0)], 0.5),
        (vec![Some(1), Some(0)], 0.25),
        (vec![Some(1), Some(1)], 0.125),
        (vec![Some(1), Some(2)], 0.125),
    ];
    SemanticSpace::from_tuples(&cats, &tuples, Norm::L2).expect("fixed space is valid")
}

/// Sequence KB where each position mixes a base distribution with a
/// deterministic function of the context:
/// `P(e_k | ctx) = (1 - ρ) Q_k(e_k) + ρ [e_k = π_k(Σ ctx mod n_k)]`,
/// with `π_k` a seeded permutation. The first position follows `Q_1`.
/// Returns the induced ensemble and the KB holding every context.
pub fn synth_kb(
    position_sets: Vec<Vec<String>>,
    base: &[Vec<f64>],
    rho: f64,
    seed: u64,
) -> Result<(MessageEnsemble, KnowledgeBase)> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("dependency must lie in [0, 1], got {rho}")));
    }
    if base.len() != position_sets.len() || position_sets.is_empty() {
        return Err(Error::InvalidParameter("one base distribution per position is required".into()));
    }
    for (q, set) in base.iter().zip(&position_sets) {
        if q.len() != set.len() {
            return Err(Error::InvalidParameter("base distribution and entity set differ in size".into()));
        }
        crate::space::check_distribution(q, "base distribution")?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables = Vec::with_capacity(position_sets.len());
    let mut contexts: Vec<Vec<usize>> = vec![Vec::new()];
    for (k, q) in base.iter().enumerate() {
        let n = q.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut table = BTreeMap::new();
        for ctx in &contexts {
            let mut dist = q.clone();
            if k > 0 {
                dist.iter_mut().for_each(|p| *p *= 1.0 - rho);
                dist[perm[ctx.iter().sum::<usize>() % n]] += rho;
            }
            table.insert(ctx.clone(), dist);
        }
        tables.push(table);
        if k + 1 < base.len() {
            contexts = contexts
                .iter()
                .flat_map(|c| (0..n).map(move |e| [c.as_slice(), &[e]].concat()))
                .collect();
        }
    }
    let kb = KnowledgeBase::new(position_sets, tables)?;
    let ensemble = kb.chain_ensemble()?;
    Ok((ensemble, kb))
}

/// Substitution KB that groups at least `fraction` of the positive-mass
/// entities of `space` into synonym classes of two or three members.
pub fn synth_synonym_kb(space: &SemanticSpace, fraction: f64, seed: u64) -> Result<KnowledgeBase> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("synonym fraction must lie in [0, 1], got {fraction}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> =
        (0..space.entities().len()).filter(|&e| space.entities()[e].prob > 0.0).collect();
    pool.shuffle(&mut rng);
    let mut take = (fraction * pool.len() as f64).ceil() as usize;
    if take == 1 {
        take = 2;
    }
    pool.truncate(take.min(pool.len()));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut rest = pool.as_slice();
    while rest.len() >= 2 {
        let size = if rest.len() == 3 || (rest.len() > 4 && rng.random_bool(0.5)) { 3 } else { 2 };
        groups.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    if let (Some(&last), Some(g)) = (rest.first(), groups.last_mut()) {
        g.push(last);
    }

    let mut subs = Vec::new();
    for g in &groups {
        for pair in g.windows(2) {
            let (a, b) = (space.entity_label(pair[0]), space.entity_label(pair[1]));
            subs.push(Substitution::certain(a.clone(), b.clone()));
            subs.push(Substitution::certain(b, a));
        }
    }
    KnowledgeBase::substitutions_only(subs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{fano_build, semantic_build};
    use crate::kb::{kb_mutual_information, space_synonyms};
    use crate::space::Perspective;

    #[test]
    fn zipf_examples() {
        assert_eq!(zipf_probs(4, 0.0).unwrap(), vec![0.25; 4]);
        let p = zipf_probs(3, 1.0).unwrap();
        for (x, y) in p.iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(zipf_probs(16, 12.0).unwrap()[0] > 0.999);
        assert!(zipf_probs(0, 1.0).is_err());
        assert!(zipf_probs(3, -1.0).is_err());
    }

    #[test]
    fn zipf_dependency_shape() {
        let grid = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0];
        let rho = zipf_dependency(16, &grid).unwrap();
        assert_eq!(rho[0], 1.0);
        assert!(rho.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn random_space_is_seeded() {
        let spec = SpaceSpec::square(2, 4, VarianceMode::Low, 3);
        let a = random_space(&spec).unwrap();
        assert_eq!(a, random_space(&spec).unwrap());
        assert_eq!(a.entities().len(), 16);
        assert_ne!(a, random_space(&SpaceSpec { seed: 4, ..spec.clone() }).unwrap());
        assert!(random_space(&SpaceSpec::new(vec![2, 0], VarianceMode::Low, 1)).is_err());
    }

    #[test]
    fn high_variance_spreads_more() {
        let var = |mode| {
            (0..100)
                .map(|seed| {
                    let p = random_space(&SpaceSpec::square(2, 4, mode, seed)).unwrap().entity_probs();
                    let m = 1.0 / p.len() as f64;
                    p.iter().map(|x| (x - m).powi(2)).sum::<f64>() / p.len() as f64
                })
                .sum::<f64>()
        };
        assert!(var(VarianceMode::High) > var(VarianceMode::Low));
    }

    #[test]
    fn dyadic_codes_agree() {
        let s = dyadic_space();
        let flat = fano_build(&s.entity_probs()).unwrap();
        let sem = semantic_build(&s, &Perspective::identity(2)).unwrap();
        for e in 0..4 {
            assert_eq!(flat.codeword(e), sem.encode(e).unwrap());
        }
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn synth_kb_limits() {
        let n = 8;
        let u = vec![1.0 / n as f64; n];
        let (ens, kb) = synth_kb(vec![names(n), names(n)], &[u.clone(), u.clone()], 0.0, 1).unwrap();
        assert!(kb_mutual_information(&ens, &kb).unwrap().abs() < 1e-12);
        let (ens, kb) = synth_kb(vec![names(n), names(n)], &[u.clone(), u], 1.0, 1).unwrap();
        assert!((kb_mutual_information(&ens, &kb).unwrap() - 3.0).abs() < 1e-12);
        assert!(synth_kb(vec![names(2)], &[vec![0.5, 0.5]], 1.5, 1).is_err());
    }

    #[test]
    fn synth_kb_dependency_increases_information() {
        let q = zipf_probs(6, 1.5).unwrap();
        let info: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&rho| {
                let (ens, kb) =
                    synth_kb(vec![names(6); 3], &[q.clone(), q.clone(), q.clone()], rho, 2).unwrap();
                kb_mutual_information(&ens, &kb).unwrap()
            })
            .collect();
        assert!(info.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn synonym_kb_coverage() {
        let s = random_space(&SpaceSpec::square(2, 5, VarianceMode::Low, 8)).unwrap();
        let kb = synth_synonym_kb(&s, 0.25, 8).unwrap();
        let part = space_synonyms(&kb, &s).unwrap();
        let grouped: usize = part.groups().iter().filter(|g| g.len() > 1).map(Vec::len).sum();
        assert!(grouped as f64 >= 0.25 * 25.0);
        assert!(part.groups().iter().all(|g| g.len() <= 4));
    }
}
