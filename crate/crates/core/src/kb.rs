//! Knowledge bases and the entropy reductions they enable.
//!
//! A [`KnowledgeBase`] stores two kinds of conditional knowledge:
//!
//! * sequence conditionals `P(e^k | e^1..e^{k-1})` for message positions
//!   `k <= K`, keyed by the exact context sequence;
//! * substitution entries `P(e^k = a | e^k = b)`, from which synonym classes
//!   are derived.
//!
//! Entity-level reduction comes from combining synonyms and from scaling
//! attributes into ε-balls; message-level reduction is measured by the KL
//! form of the KB mutual information, which feeds the gain `S_KB` and the
//! semantic capacity model.

use std::collections::{BTreeMap, HashMap};

use crate::entropy::{entropy_bits, MessageEnsemble};
use crate::error::{Error, Result};
use crate::space::{check_distribution, SemanticSpace, PROB_TOLERANCE};

/// Tolerance when comparing KB conditionals with the ensemble's own.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-6;

/// `P(e^k = target | e^k = given) = prob`.
#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    pub target: String,
    pub given: String,
    pub prob: f64,
}

impl Substitution {
    pub fn certain(target: impl Into<String>, given: impl Into<String>) -> Self {
        Substitution { target: target.into(), given: given.into(), prob: 1.0 }
    }
}

/// Conditional distributions over entities given entity-sequence contexts.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    depth: usize,
    positions: Vec<Vec<String>>,
    // tables[k]: context (k entity indices) -> distribution over positions[k]
    tables: Vec<BTreeMap<Vec<usize>, Vec<f64>>>,
    substitutions: Option<Vec<Substitution>>,
}

impl KnowledgeBase {
    /// A sequence KB of depth `positions.len()`. `tables[k]` maps each stored
    /// context of length `k` to a distribution over `positions[k]`.
    pub fn new(
        positions: Vec<Vec<String>>,
        tables: Vec<BTreeMap<Vec<usize>, Vec<f64>>>,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidParameter("knowledge base depth must be at least 1".into()));
        }
        if tables.len() != positions.len() {
            return Err(Error::InvalidParameter(format!(
                "{} tables for {} positions",
                tables.len(),
                positions.len()
            )));
        }
        for (k, table) in tables.iter().enumerate() {
            for (context, dist) in table {
                if context.len() != k {
                    return Err(Error::InvalidParameter(format!(
                        "context {context:?} stored at position {k}"
                    )));
                }
                if let Some((i, _)) =
                    context.iter().enumerate().find(|(i, &e)| e >= positions[*i].len())
                {
                    return Err(Error::InvalidParameter(format!(
                        "context {context:?} has out-of-range entity at position {i}"
                    )));
                }
                if dist.len() != positions[k].len() {
                    return Err(Error::InvalidDistribution(format!(
                        "conditional at position {k} has {} entries, expected {}",
                        dist.len(),
                        positions[k].len()
                    )));
                }
                check_distribution(dist, "conditional")?;
            }
        }
        Ok(KnowledgeBase { depth: positions.len(), positions, tables, substitutions: None })
    }

    /// A KB holding only substitution knowledge.
    pub fn substitutions_only(subs: Vec<Substitution>) -> Result<Self> {
        KnowledgeBase { depth: 1, positions: Vec::new(), tables: Vec::new(), substitutions: None }
            .with_substitutions(subs)
    }

    pub fn with_substitutions(mut self, subs: Vec<Substitution>) -> Result<Self> {
        if let Some(s) = subs.iter().find(|s| !(0.0..=1.0).contains(&s.prob)) {
            return Err(Error::InvalidDistribution(format!(
                "substitution probability {} for `{}` given `{}`",
                s.prob, s.target, s.given
            )));
        }
        self.substitutions = Some(subs);
        Ok(self)
    }

    /// The exact KB of an ensemble: every positive-mass context gets the
    /// conditional implied by the joint table.
    pub fn from_ensemble(ensemble: &MessageEnsemble) -> Self {
        let mut tables = Vec::with_capacity(ensemble.len());
        for k in 0..ensemble.len() {
            let n = ensemble.position_sets()[k].len();
            let prefix = ensemble.prefix_marginal(k);
            let extended = ensemble.prefix_marginal(k + 1);
            let mut table = BTreeMap::new();
            for (c, &mass) in prefix.iter().enumerate() {
                if mass > 0.0 {
                    let dist: Vec<f64> = extended[c * n..(c + 1) * n].iter().map(|p| p / mass).collect();
                    table.insert(ensemble.unravel(c, k), dist);
                }
            }
            tables.push(table);
        }
        KnowledgeBase {
            depth: ensemble.len(),
            positions: ensemble.position_sets().to_vec(),
            tables,
            substitutions: None,
        }
    }

    /// Depth `K`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn positions(&self) -> &[Vec<String>] {
        &self.positions
    }

    pub fn tables(&self) -> &[BTreeMap<Vec<usize>, Vec<f64>>] {
        &self.tables
    }

    pub fn substitutions(&self) -> Option<&[Substitution]> {
        self.substitutions.as_deref()
    }

    pub fn conditional(&self, position: usize, context: &[usize]) -> Option<&[f64]> {
        self.tables.get(position)?.get(context).map(Vec::as_slice)
    }

    /// The joint over all positions implied by chaining the conditionals.
    /// Requires every reachable context to be stored.
    pub fn chain_ensemble(&self) -> Result<MessageEnsemble> {
        let mut joint = vec![1.0];
        for k in 0..self.positions.len() {
            let n = self.positions[k].len();
            let mut next = vec![0.0; joint.len() * n];
            for (c, &mass) in joint.iter().enumerate() {
                if mass <= 0.0 {
                    continue;
                }
                let context = unravel(&self.positions, c, k);
                let dist = self.conditional(k, &context).ok_or_else(|| {
                    Error::MissingConditional(format!("position {} context {:?}", k + 1, context))
                })?;
                for (e, p) in dist.iter().enumerate() {
                    next[c * n + e] = mass * p;
                }
            }
            joint = next;
        }
        MessageEnsemble::new(self.positions.clone(), joint)
    }

    /// Visits every positive-mass context of `ensemble` with its mass and the
    /// KB conditional, after checking depth and consistency.
    pub(crate) fn for_each_context(
        &self,
        ensemble: &MessageEnsemble,
        mut visit: impl FnMut(usize, f64, &[f64]) -> Result<()>,
    ) -> Result<()> {
        let k_len = ensemble.len();
        if k_len > self.depth || k_len > self.positions.len() {
            return Err(Error::DepthExceeded { message: k_len, depth: self.positions.len().min(self.depth) });
        }
        for k in 0..k_len {
            if self.positions[k] != ensemble.position_sets()[k] {
                return Err(Error::InconsistentKb(format!(
                    "entity set of position {} differs",
                    k + 1
                )));
            }
        }
        for k in 0..k_len {
            let n = ensemble.position_sets()[k].len();
            let prefix = ensemble.prefix_marginal(k);
            let extended = ensemble.prefix_marginal(k + 1);
            for (c, &mass) in prefix.iter().enumerate() {
                if mass <= 0.0 {
                    continue;
                }
                let context = ensemble.unravel(c, k);
                let dist = self.conditional(k, &context).ok_or_else(|| {
                    Error::MissingConditional(format!("position {} context {:?}", k + 1, context))
                })?;
                for (e, &p) in dist.iter().enumerate() {
                    let implied = extended[c * n + e] / mass;
                    if (p - implied).abs() > CONSISTENCY_TOLERANCE {
                        return Err(Error::InconsistentKb(format!(
                            "P({} | {:?}) is {p} in the KB but {implied} in the ensemble",
                            ensemble.position_sets()[k][e],
                            context
                        )));
                    }
                }
                visit(k, mass, dist)?;
            }
        }
        Ok(())
    }
}

fn unravel(positions: &[Vec<String>], mut index: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        let n = positions[k].len();
        out[k] = index % n;
        index /= n;
    }
    out
}

/// Partition of an entity set into synonym classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynonymPartition {
    groups: Vec<Vec<usize>>,
}

impl SynonymPartition {
    /// Validates that `groups` are disjoint and cover `0..n`.
    pub fn new(groups: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::PartitionMismatch("empty group".into()));
            }
            for &i in g {
                if i >= n {
                    return Err(Error::PartitionMismatch(format!("index {i} out of range for {n} outcomes")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::PartitionMismatch(format!("index {i} appears twice")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::PartitionMismatch(format!("index {i} is not covered")));
        }
        Ok(SynonymPartition { groups })
    }

    pub fn singletons(n: usize) -> Self {
        SynonymPartition { groups: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Number of outcomes covered.
    pub fn outcomes(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Group index of every outcome.
    pub fn group_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.outcomes()];
        for (g, members) in self.groups.iter().enumerate() {
            for &i in members {
                out[i] = g;
            }
        }
        out
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Synonym classes of `entities`: the transitive closure of the relation
/// `P(a | b) = P(b | a) = 1`. Entities without synonyms are singletons.
pub fn synonyms<S: AsRef<str>>(kb: &KnowledgeBase, entities: &[S]) -> Result<SynonymPartition> {
    let subs = kb
        .substitutions()
        .ok_or_else(|| Error::MissingConditional("knowledge base has no substitution table".into()))?;
    let index: HashMap<&str, usize> =
        entities.iter().enumerate().map(|(i, e)| (e.as_ref(), i)).collect();
    let lookup: HashMap<(&str, &str), f64> =
        subs.iter().map(|s| ((s.given.as_str(), s.target.as_str()), s.prob)).collect();

    let mut parent: Vec<usize> = (0..entities.len()).collect();
    for s in subs {
        let (Some(&t), Some(&g)) = (index.get(s.target.as_str()), index.get(s.given.as_str())) else {
            continue;
        };
        if t == g || s.prob < 1.0 - PROB_TOLERANCE {
            continue;
        }
        let reverse = lookup.get(&(s.target.as_str(), s.given.as_str())).ok_or_else(|| {
            Error::MissingConditional(format!(
                "P({} | {}) is 1 but P({} | {}) is not stored",
                s.target, s.given, s.given, s.target
            ))
        })?;
        if *reverse >= 1.0 - PROB_TOLERANCE {
            let (a, b) = (find(&mut parent, t), find(&mut parent, g));
            parent[a.max(b)] = a.min(b);
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot_of_root: HashMap<usize, usize> = HashMap::new();
    for i in 0..entities.len() {
        let root = find(&mut parent, i);
        let g = *slot_of_root.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    SynonymPartition::new(groups, entities.len())
}

/// Synonym classes over the entities of `space`. Substitution entries may
/// name an entity by a member symbol or by its tuple label; entries naming
/// unknown entities are ignored.
pub fn space_synonyms(kb: &KnowledgeBase, space: &SemanticSpace) -> Result<SynonymPartition> {
    let subs = kb
        .substitutions()
        .ok_or_else(|| Error::MissingConditional("knowledge base has no substitution table".into()))?;
    let labels: Vec<String> = (0..space.entities().len()).map(|e| space.entity_label(e)).collect();
    let resolve = |id: &str| space.find_entity(id).map_or_else(|| id.to_string(), |e| labels[e].clone());
    let translated = subs
        .iter()
        .map(|s| Substitution { target: resolve(&s.target), given: resolve(&s.given), prob: s.prob })
        .collect();
    synonyms(&KnowledgeBase::substitutions_only(translated)?, &labels)
}

/// Result of merging synonym classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    /// Probability of each group, in partition order.
    pub probs: Vec<f64>,
    pub entropy_before: f64,
    pub entropy_after: f64,
}

impl Combination {
    /// Entity-level substitution information `H(E) - H(E_c)`.
    pub fn information(&self) -> f64 {
        self.entropy_before - self.entropy_after
    }
}

/// Sums the probabilities of each synonym class.
pub fn combine_synonyms(probs: &[f64], partition: &SynonymPartition) -> Result<Combination> {
    check_distribution(probs, "entity distribution")?;
    if partition.outcomes() != probs.len() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} outcomes, distribution has {}",
            partition.outcomes(),
            probs.len()
        )));
    }
    let merged: Vec<f64> =
        partition.groups().iter().map(|g| g.iter().map(|&i| probs[i]).sum()).collect();
    Ok(Combination {
        entropy_before: entropy_bits(probs),
        entropy_after: entropy_bits(&merged),
        probs: merged,
    })
}

/// Groups whose members carry two distinct non-null attributes in some
/// category, as `(group, category)` pairs. Such merges introduce semantic
/// ambiguity; callers may warn about them.
pub fn synonym_conflicts(space: &SemanticSpace, partition: &SynonymPartition) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (g, members) in partition.groups().iter().enumerate() {
        for c in 0..space.dimension() {
            let mut seen = None;
            for &e in members {
                if let Some(a) = space.entities()[e].coords[c] {
                    match seen {
                        None => seen = Some(a),
                        Some(prev) if prev != a => {
                            out.push((g, c));
                            break;
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    out
}

/// Target attribute of a scaling: every source attribute within `epsilon`
/// of `coord` is absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct BallCenter {
    pub label: String,
    pub coord: f64,
    pub epsilon: f64,
}

impl BallCenter {
    pub fn new(label: impl Into<String>, coord: f64, epsilon: f64) -> Self {
        BallCenter { label: label.into(), coord, epsilon }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledAttribute {
    pub label: String,
    /// Source attribute indices inside the ball.
    pub members: Vec<usize>,
    pub prob: f64,
    /// `ε / len(C_j)`.
    pub ambiguity: f64,
}

/// A category after scaling attributes into ε-balls.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCategory {
    pub source: String,
    /// Largest pairwise distance between source attribute coordinates.
    pub extent: f64,
    pub attributes: Vec<ScaledAttribute>,
    pub entropy_before: f64,
    pub entropy_after: f64,
}

/// Scales one attribute axis. `coords[i]` and `probs[i]` describe source
/// attribute `labels[i]`; the balls must be disjoint and cover every attribute.
pub fn scale_axis(
    source: &str,
    labels: &[String],
    coords: &[f64],
    probs: &[f64],
    centers: &[BallCenter],
) -> Result<ScaledCategory> {
    if labels.len() != coords.len() || coords.len() != probs.len() {
        return Err(Error::InvalidParameter("labels, coordinates and probabilities differ in length".into()));
    }
    check_distribution(probs, "attribute distribution")?;
    let lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let extent = hi - lo;

    let mut owner: Vec<Option<usize>> = vec![None; coords.len()];
    let mut attributes = Vec::with_capacity(centers.len());
    for (b, center) in centers.iter().enumerate() {
        if !(center.epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(center.epsilon));
        }
        if center.epsilon > extent {
            return Err(Error::EpsilonExceedsExtent { epsilon: center.epsilon, extent });
        }
        let members: Vec<usize> = (0..coords.len())
            .filter(|&i| (coords[i] - center.coord).abs() <= center.epsilon)
            .collect();
        if members.is_empty() {
            return Err(Error::EmptyBall(center.label.clone()));
        }
        for &i in &members {
            if owner[i].replace(b).is_some() {
                return Err(Error::OverlappingBalls(labels[i].clone()));
            }
        }
        attributes.push(ScaledAttribute {
            label: center.label.clone(),
            prob: members.iter().map(|&i| probs[i]).sum(),
            members,
            ambiguity: center.epsilon / extent,
        });
    }
    if let Some(i) = owner.iter().position(Option::is_none) {
        return Err(Error::UncoveredAttribute(labels[i].clone()));
    }
    let scaled: Vec<f64> = attributes.iter().map(|a| a.prob).collect();
    Ok(ScaledCategory {
        source: source.to_string(),
        extent,
        entropy_before: entropy_bits(probs),
        entropy_after: entropy_bits(&scaled),
        attributes,
    })
}

/// Scales category `category` of `space` using the space's embedding and the
/// attribute masses of elements relevant to that category.
pub fn scale_category(
    space: &SemanticSpace,
    category: usize,
    centers: &[BallCenter],
) -> Result<ScaledCategory> {
    let cat = space
        .categories()
        .get(category)
        .ok_or_else(|| Error::UnknownCategory(category.to_string()))?;
    let mut probs = vec![0.0; cat.attributes().len()];
    for e in space.entities() {
        if let Some(a) = e.coords[category] {
            probs[a] += e.prob;
        }
    }
    let relevant: f64 = probs.iter().sum();
    if relevant <= 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "category `{}` has no relevant mass",
            cat.name()
        )));
    }
    probs.iter_mut().for_each(|p| *p /= relevant);
    scale_axis(cat.name(), cat.attributes(), space.embedding().axis(category), &probs, centers)
}

/// `D_KL(p || q)` in bits, with `0 · log(0/q) = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidParameter("distributions differ in length".into()));
    }
    let mut d = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::AbsolutelyDiscontinuous(i.to_string()));
            }
            d += pi * (pi / qi).log2();
        }
    }
    Ok(d)
}

/// Message-level KB mutual information
/// `I_KB^M = Σ_k Σ_ctx p(ctx) D_KL(P(E_k | ctx) || Q(E_k))`.
pub fn kb_mutual_information(ensemble: &MessageEnsemble, kb: &KnowledgeBase) -> Result<f64> {
    let marginals: Vec<Vec<f64>> = (0..ensemble.len()).map(|k| ensemble.marginal(k)).collect();
    let mut total = 0.0;
    kb.for_each_context(ensemble, |k, mass, dist| {
        let d = kl_divergence(dist, &marginals[k]).map_err(|e| match e {
            Error::AbsolutelyDiscontinuous(i) => Error::AbsolutelyDiscontinuous(
                ensemble.position_sets()[k][i.parse::<usize>().unwrap_or(0)].clone(),
            ),
            other => other,
        })?;
        total += mass * d;
        Ok(())
    })?;
    Ok(total)
}

/// KB gain `S_KB = H_c / (H_c - I_KB)`.
pub fn kb_gain(classical_entropy: f64, i_kb: f64) -> Result<f64> {
    if !(classical_entropy > 0.0) || !classical_entropy.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "classical entropy must be positive, got {classical_entropy}"
        )));
    }
    if !(i_kb >= -1e-12) || !i_kb.is_finite() {
        return Err(Error::InvalidParameter(format!("I_KB must be non-negative, got {i_kb}")));
    }
    let i_kb = i_kb.max(0.0);
    if i_kb >= classical_entropy - 1e-12 {
        return Err(Error::GainSingularity { classical: classical_entropy, i_kb });
    }
    Ok(classical_entropy / (classical_entropy - i_kb))
}

/// Semantic channel capacity in suts per second:
/// `C_s = S_KB · (M / H_c) · B · log2(1 + γ)`.
pub fn semantic_capacity(
    s_kb: f64,
    classical_entropy: f64,
    dimension: usize,
    bandwidth_hz: f64,
    snr_linear: f64,
) -> Result<f64> {
    if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {bandwidth_hz}")));
    }
    if !(snr_linear >= 0.0) || !snr_linear.is_finite() {
        return Err(Error::InvalidParameter(format!("SNR must be non-negative, got {snr_linear}")));
    }
    if dimension == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(classical_entropy > 0.0) || !classical_entropy.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "classical entropy must be positive, got {classical_entropy}"
        )));
    }
    if !(s_kb >= 1.0) || !s_kb.is_finite() {
        return Err(Error::InvalidParameter(format!("S_KB must be at least 1, got {s_kb}")));
    }
    let density = classical_entropy / dimension as f64;
    Ok(s_kb / density * bandwidth_hz * (1.0 + snr_linear).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{classical_entropy, message_entropy_classical, message_entropy_semantic};

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn weather() -> MessageEnsemble {
        // P(Today) = P(Tomorrow) = 0.5; Today is surely Sunny; Tomorrow (0.2, 0.2, 0.6).
        MessageEnsemble::new(
            vec![ids(&["Today", "Tomorrow"]), ids(&["Rainy", "Sunny", "Cloudy"])],
            vec![0.0, 0.5, 0.0, 0.1, 0.1, 0.3],
        )
        .unwrap()
    }

    #[test]
    fn calendar_synonyms_form_one_group() {
        let kb = KnowledgeBase::substitutions_only(vec![
            Substitution::certain("this Tuesday", "tomorrow"),
            Substitution::certain("tomorrow", "this Tuesday"),
            Substitution::certain("16th", "this Tuesday"),
            Substitution::certain("this Tuesday", "16th"),
        ])
        .unwrap();
        let p = synonyms(&kb, &["tomorrow", "this Tuesday", "16th", "yesterday"]).unwrap();
        assert_eq!(p.groups(), &[vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn transitive_chain_and_empty_relation() {
        let kb = KnowledgeBase::substitutions_only(vec![
            Substitution::certain("a", "b"),
            Substitution::certain("b", "a"),
            Substitution::certain("c", "b"),
            Substitution::certain("b", "c"),
        ])
        .unwrap();
        assert_eq!(synonyms(&kb, &["a", "b", "c"]).unwrap().groups(), &[vec![0, 1, 2]]);

        let empty = KnowledgeBase::substitutions_only(vec![]).unwrap();
        assert_eq!(synonyms(&empty, &["a", "b"]).unwrap(), SynonymPartition::singletons(2));
    }

    #[test]
    fn one_way_or_partial_substitution() {
        let one_way = KnowledgeBase::substitutions_only(vec![Substitution::certain("a", "b")]).unwrap();
        assert!(matches!(synonyms(&one_way, &["a", "b"]), Err(Error::MissingConditional(_))));

        let partial = KnowledgeBase::substitutions_only(vec![
            Substitution::certain("a", "b"),
            Substitution { target: "b".into(), given: "a".into(), prob: 0.7 },
        ])
        .unwrap();
        assert_eq!(synonyms(&partial, &["a", "b"]).unwrap(), SynonymPartition::singletons(2));

        let seq_only = KnowledgeBase::from_ensemble(&weather());
        assert!(matches!(synonyms(&seq_only, &["a"]), Err(Error::MissingConditional(_))));
    }

    #[test]
    fn combine_first_three() {
        let p = SynonymPartition::new(vec![vec![0, 1, 2], vec![3]], 4).unwrap();
        let c = combine_synonyms(&[0.2, 0.1, 0.1, 0.6], &p).unwrap();
        assert!((c.probs[0] - 0.4).abs() < 1e-12 && (c.probs[1] - 0.6).abs() < 1e-12);
        // Hand evaluation: H(0.2,0.1,0.1,0.6) and H(0.4,0.6).
        let before = -(0.2f64 * 0.2f64.log2() + 2.0 * 0.1 * 0.1f64.log2() + 0.6 * 0.6f64.log2());
        let after = -(0.4f64 * 0.4f64.log2() + 0.6 * 0.6f64.log2());
        assert!((c.entropy_before - before).abs() < 1e-12);
        assert!((c.entropy_after - after).abs() < 1e-12);
        assert!((c.entropy_before - 1.571).abs() < 1e-3 && (c.entropy_after - 0.971).abs() < 1e-3);
    }

    #[test]
    fn combine_without_effect() {
        let probs = [0.3, 0.3, 0.4, 0.0, 0.0];
        let id = combine_synonyms(&probs, &SynonymPartition::singletons(5)).unwrap();
        assert!((id.entropy_before - id.entropy_after).abs() < 1e-15);
        let zeros = SynonymPartition::new(vec![vec![0, 3, 4], vec![1], vec![2]], 5).unwrap();
        let z = combine_synonyms(&probs, &zeros).unwrap();
        assert!((z.entropy_before - z.entropy_after).abs() < 1e-15);
        assert!(matches!(
            combine_synonyms(&probs, &SynonymPartition::singletons(4)),
            Err(Error::PartitionMismatch(_))
        ));
        assert!(SynonymPartition::new(vec![vec![0, 1], vec![1]], 2).is_err());
        assert!(SynonymPartition::new(vec![vec![0]], 2).is_err());
    }

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn scaling_five_attributes() {
        let coords = [1.0, 2.0, 3.0, 4.0, 5.0];
        let probs = [0.1, 0.2, 0.3, 0.2, 0.2];
        let s = scale_axis(
            "c",
            &labels(5),
            &coords,
            &probs,
            &[BallCenter::new("low", 2.0, 1.0), BallCenter::new("high", 4.5, 0.5)],
        )
        .unwrap();
        assert_eq!(s.extent, 4.0);
        assert_eq!(s.attributes[0].members, vec![0, 1, 2]);
        assert_eq!(s.attributes[1].members, vec![3, 4]);
        assert!((s.attributes[0].prob - 0.6).abs() < 1e-12);
        assert_eq!(s.attributes[0].ambiguity, 0.25);
        assert_eq!(s.attributes[1].ambiguity, 0.125);
        // Hand evaluation of both sides of the scaling inequality.
        let before = -(0.1f64 * 0.1f64.log2() + 3.0 * 0.2 * 0.2f64.log2() + 0.3 * 0.3f64.log2());
        let after = -(0.6f64 * 0.6f64.log2() + 0.4 * 0.4f64.log2());
        assert!((s.entropy_before - before).abs() < 1e-12);
        assert!((s.entropy_after - after).abs() < 1e-12);
        assert!(s.entropy_after < s.entropy_before);
    }

    #[test]
    fn red_shades_collapse() {
        let shades = ids(&["pink", "scarlet", "dark red", "ruby", "blue"]);
        let coords = [1.0, 1.2, 1.4, 1.6, 5.0];
        let probs = [0.1, 0.2, 0.2, 0.1, 0.4];
        let s = scale_axis(
            "color",
            &shades,
            &coords,
            &probs,
            &[BallCenter::new("red", 1.3, 0.35), BallCenter::new("blue", 5.0, 0.1)],
        )
        .unwrap();
        assert_eq!(s.attributes[0].label, "red");
        assert_eq!(s.attributes[0].members, vec![0, 1, 2, 3]);
        assert!((s.attributes[0].prob - 0.6).abs() < 1e-12);
    }

    #[test]
    fn tiny_balls_keep_entropy() {
        let coords = [1.0, 2.0, 3.0];
        let probs = [0.5, 0.3, 0.2];
        let centers: Vec<BallCenter> =
            coords.iter().enumerate().map(|(i, &x)| BallCenter::new(format!("y{i}"), x, 0.1)).collect();
        let s = scale_axis("c", &labels(3), &coords, &probs, &centers).unwrap();
        assert!((s.entropy_after - s.entropy_before).abs() < 1e-15);
        assert!(s.attributes.iter().all(|a| a.ambiguity > 0.0));
    }

    #[test]
    fn scaling_errors() {
        let coords = [1.0, 2.0, 3.0];
        let probs = [0.5, 0.3, 0.2];
        let l = labels(3);
        let overlap = [BallCenter::new("a", 1.5, 0.5), BallCenter::new("b", 2.5, 0.5)];
        assert!(matches!(scale_axis("c", &l, &coords, &probs, &overlap), Err(Error::OverlappingBalls(_))));
        let uncovered = [BallCenter::new("a", 1.0, 0.5)];
        assert!(matches!(scale_axis("c", &l, &coords, &probs, &uncovered), Err(Error::UncoveredAttribute(_))));
        let zero = [BallCenter::new("a", 1.0, 0.0)];
        assert!(matches!(scale_axis("c", &l, &coords, &probs, &zero), Err(Error::NonPositiveEpsilon(_))));
        let wide = [BallCenter::new("a", 2.0, 3.0)];
        assert!(matches!(scale_axis("c", &l, &coords, &probs, &wide), Err(Error::EpsilonExceedsExtent { .. })));
        let empty = [BallCenter::new("a", 2.0, 1.0), BallCenter::new("b", 9.0, 0.5)];
        assert!(matches!(scale_axis("c", &l, &coords, &probs, &empty), Err(Error::EmptyBall(_))));
    }

    #[test]
    fn independent_ensemble_has_no_kb_information() {
        let ens = MessageEnsemble::independent(
            vec![ids(&["a", "b"]), ids(&["x", "y", "z"])],
            &[vec![0.3, 0.7], vec![0.2, 0.5, 0.3]],
        )
        .unwrap();
        let kb = KnowledgeBase::from_ensemble(&ens);
        assert!(kb_mutual_information(&ens, &kb).unwrap().abs() < 1e-12);
        let hc = message_entropy_classical(&ens).unwrap();
        let hs = message_entropy_semantic(&ens, &kb).unwrap();
        assert!((hc - hs).abs() < 1e-12);
    }

    #[test]
    fn bijective_second_position_gives_log_n() {
        let n = 4;
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut joint = vec![0.0; n * n];
        for i in 0..n {
            joint[i * n + (i + 1) % n] = 1.0 / n as f64;
        }
        let ens = MessageEnsemble::new(vec![names.clone(), names], joint).unwrap();
        let kb = KnowledgeBase::from_ensemble(&ens);
        // Each context contributes D(δ || uniform) = log2 n.
        assert!((kb_mutual_information(&ens, &kb).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weather_kb_information_matches_chain_rule() {
        let ens = weather();
        let kb = KnowledgeBase::from_ensemble(&ens);
        let h2 = classical_entropy(&ens.marginal(1)).unwrap();
        // H(E2 | E1) by hand: Today contributes 0, Tomorrow H(0.2, 0.2, 0.6).
        let h2_given_1 = 0.5 * -(2.0 * 0.2 * 0.2f64.log2() + 0.6 * 0.6f64.log2());
        let i = kb_mutual_information(&ens, &kb).unwrap();
        assert!((i - (h2 - h2_given_1)).abs() < 1e-12);
        assert!(i > 0.0);
        // The deterministic Today context adds nothing to semantic entropy.
        let hs = message_entropy_semantic(&ens, &kb).unwrap();
        assert!((hs - (1.0 + h2_given_1)).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_and_shallow_kbs() {
        let ens = weather();
        let mut tables = KnowledgeBase::from_ensemble(&ens).tables().to_vec();
        tables[1].insert(vec![0], vec![0.1, 0.8, 0.1]);
        let bad = KnowledgeBase::new(ens.position_sets().to_vec(), tables).unwrap();
        assert!(matches!(message_entropy_semantic(&ens, &bad), Err(Error::InconsistentKb(_))));
        assert!(matches!(kb_mutual_information(&ens, &bad), Err(Error::InconsistentKb(_))));

        let shallow_ens = MessageEnsemble::new(vec![ens.position_sets()[0].clone()], vec![0.5, 0.5]).unwrap();
        let shallow = KnowledgeBase::from_ensemble(&shallow_ens);
        assert!(matches!(
            message_entropy_semantic(&ens, &shallow),
            Err(Error::DepthExceeded { message: 2, depth: 1 })
        ));

        let mut missing = KnowledgeBase::from_ensemble(&ens).tables().to_vec();
        missing[1].remove(&vec![1]);
        let missing = KnowledgeBase::new(ens.position_sets().to_vec(), missing).unwrap();
        assert!(matches!(kb_mutual_information(&ens, &missing), Err(Error::MissingConditional(_))));
    }

    #[test]
    fn kl_conventions() {
        assert_eq!(kl_divergence(&[0.0, 1.0], &[0.5, 0.5]).unwrap(), 1.0);
        assert!(matches!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), Err(Error::AbsolutelyDiscontinuous(_))));
    }

    #[test]
    fn gain_examples() {
        assert_eq!(kb_gain(4.0, 0.0).unwrap(), 1.0);
        assert_eq!(kb_gain(4.0, 2.0).unwrap(), 2.0);
        assert!(matches!(kb_gain(4.0, 4.0), Err(Error::GainSingularity { .. })));
        assert!(kb_gain(0.0, 0.0).is_err());
        assert!(kb_gain(1.0, -0.5).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(semantic_capacity(1.0, 4.0, 4, 1.0, 1.0).unwrap(), 1.0);
        let base = semantic_capacity(1.0, 8.0, 4, 1e6, 10.0).unwrap();
        let doubled = semantic_capacity(2.0, 8.0, 4, 1e6, 10.0).unwrap();
        assert!((doubled - 2.0 * base).abs() < 1e-6);
        let c = semantic_capacity(1.25, 8.0, 4, 1e6, 10.0).unwrap();
        assert!((c - 1.25 * 0.5 * 1e6 * 11f64.log2()).abs() < 1e-6);
        assert!(semantic_capacity(1.0, 4.0, 4, 0.0, 1.0).is_err());
        assert!(semantic_capacity(1.0, 4.0, 0, 1.0, 1.0).is_err());
        assert!(semantic_capacity(1.0, 4.0, 4, 1.0, -1.0).is_err());
    }

    #[test]
    fn chain_ensemble_roundtrip() {
        let ens = weather();
        let kb = KnowledgeBase::from_ensemble(&ens);
        let back = kb.chain_ensemble().unwrap();
        for (a, b) in back.joint().iter().zip(ens.joint()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
