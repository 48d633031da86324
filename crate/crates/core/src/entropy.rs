//! Classical entropy, categorizing entropy along a perspective and the
//! classical/semantic entropy of multi-entity messages.
//!
//! All logarithms are base 2 and `0 · log 0` is taken as 0.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::space::{check_distribution, Perspective, SemanticSpace, Slot};

/// `-Σ p log2 p` without validation.
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Shannon entropy in bits of a probability vector.
pub fn classical_entropy(probs: &[f64]) -> Result<f64> {
    check_distribution(probs, "distribution")?;
    Ok(entropy_bits(probs))
}

/// Chain-rule entropy of the entities along `perspective`:
/// `H(A_1) + Σ p(a_1) H(A_2 | a_1) + ...`, where each conditional is taken
/// over the subspace fixed by the preceding attributes. Contexts with zero
/// mass contribute nothing.
pub fn categorizing_entropy(space: &SemanticSpace, perspective: &Perspective) -> Result<f64> {
    perspective.check_for(space)?;
    let probs = space.entity_probs();
    if !probs.iter().any(|&p| p > 0.0) {
        return Err(Error::EmptySpace);
    }
    check_distribution(&probs, "entity distribution")?;

    let mut total = 0.0;
    for depth in 0..perspective.len() {
        // prefix (first `depth` slots along the perspective) -> next slot -> mass
        let mut children: HashMap<Vec<Slot>, BTreeMap<Slot, f64>> = HashMap::new();
        for e in space.entities() {
            if e.prob <= 0.0 {
                continue;
            }
            let prefix: Vec<Slot> =
                perspective.order()[..depth].iter().map(|&c| e.coords[c]).collect();
            let next = e.coords[perspective.order()[depth]];
            *children.entry(prefix).or_default().entry(next).or_insert(0.0) += e.prob;
        }
        for masses in children.values() {
            let context: f64 = masses.values().sum();
            let conditional: Vec<f64> = masses.values().map(|m| m / context).collect();
            total += context * entropy_bits(&conditional);
        }
    }
    Ok(total)
}

/// Joint distribution of `K`-entity messages, stored as an explicit
/// row-major table over `E_1 × ... × E_K` (last position varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct MessageEnsemble {
    position_sets: Vec<Vec<String>>,
    joint: Vec<f64>,
}

impl MessageEnsemble {
    pub fn new(position_sets: Vec<Vec<String>>, joint: Vec<f64>) -> Result<Self> {
        if position_sets.is_empty() || position_sets.iter().any(Vec::is_empty) {
            return Err(Error::InvalidDistribution("every position needs at least one entity".into()));
        }
        let size: usize = position_sets.iter().map(Vec::len).product();
        if joint.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "joint table has {} cells, expected {size}",
                joint.len()
            )));
        }
        check_distribution(&joint, "joint table")?;
        Ok(MessageEnsemble { position_sets, joint })
    }

    /// Independent positions with the given marginals.
    pub fn independent(position_sets: Vec<Vec<String>>, marginals: &[Vec<f64>]) -> Result<Self> {
        if marginals.len() != position_sets.len() {
            return Err(Error::InvalidDistribution("one marginal per position required".into()));
        }
        for m in marginals {
            check_distribution(m, "marginal")?;
        }
        let mut joint = vec![1.0];
        for m in marginals {
            joint = joint.iter().flat_map(|p| m.iter().map(move |q| p * q)).collect();
        }
        MessageEnsemble::new(position_sets, joint)
    }

    /// Message length `K`.
    pub fn len(&self) -> usize {
        self.position_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position_sets.is_empty()
    }

    pub fn position_sets(&self) -> &[Vec<String>] {
        &self.position_sets
    }

    pub fn joint(&self) -> &[f64] {
        &self.joint
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.position_sets.iter().map(Vec::len).collect()
    }

    /// Marginal of the first `len` positions, row-major over their product.
    pub fn prefix_marginal(&self, len: usize) -> Vec<f64> {
        let stride: usize = self.position_sets[len..].iter().map(Vec::len).product();
        self.joint.chunks(stride).map(|c| c.iter().sum()).collect()
    }

    /// Marginal distribution of position `k` (0-based).
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let n = self.position_sets[k].len();
        let inner: usize = self.position_sets[k + 1..].iter().map(Vec::len).product();
        let mut out = vec![0.0; n];
        for (i, p) in self.joint.iter().enumerate() {
            out[(i / inner) % n] += p;
        }
        out
    }

    /// Entity indices of a row-major prefix index of length `len`.
    pub fn unravel(&self, mut index: usize, len: usize) -> Vec<usize> {
        let mut out = vec![0; len];
        for k in (0..len).rev() {
            let n = self.position_sets[k].len();
            out[k] = index % n;
            index /= n;
        }
        out
    }
}

/// `Σ_k H(E_k)`: message entropy ignoring dependencies between entities.
pub fn message_entropy_classical(ensemble: &MessageEnsemble) -> Result<f64> {
    (0..ensemble.len()).map(|k| classical_entropy(&ensemble.marginal(k))).sum()
}

/// Chain-rule message entropy using the knowledge base's conditionals
/// `P(E_k | e^1..e^{k-1})`, weighted by the context masses of the ensemble.
pub fn message_entropy_semantic(ensemble: &MessageEnsemble, kb: &KnowledgeBase) -> Result<f64> {
    let mut total = 0.0;
    kb.for_each_context(ensemble, |_, p_context, conditional| {
        total += p_context * entropy_bits(conditional);
        Ok(())
    })?;
    Ok(total)
}
