//! Categories, semantic entities and the semantic probability space.
//!
//! A [`Category`] partitions the source alphabet into attribute-labelled
//! subsets plus a null subset of elements the category does not describe.
//! Given `M` categories every element lands on a tuple of attribute slots;
//! the distinct tuples are the [`Entity`] values of a [`SemanticSpace`], each
//! carrying the total mass of the elements that realize it.
//!
//! An unspecified slot is stored as `None` and printed as the reserved
//! attribute label `"0"`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance on probability sums.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Reserved label of the null subset of a category.
pub const NULL_ATTRIBUTE: &str = "0";

/// Attribute slot of an entity: `Some(index)` into the category's attribute
/// list, or `None` when the category does not apply.
pub type Slot = Option<usize>;

/// Set of alphabet element indices.
pub type ElementSet = BTreeSet<usize>;

pub(crate) fn check_distribution(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what} has invalid entry {p}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {total}"
        )));
    }
    Ok(())
}

/// Discrete source: symbols `b_1..b_N` with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceAlphabet {
    symbols: Vec<String>,
    probs: Vec<f64>,
    index: HashMap<String, usize>,
}

impl SourceAlphabet {
    pub fn new<S: Into<String>>(symbols: Vec<S>, probs: Vec<f64>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.len() != probs.len() {
            return Err(Error::ProbabilityViolation(format!(
                "{} symbols but {} probabilities",
                symbols.len(),
                probs.len()
            )));
        }
        if symbols.is_empty() {
            return Err(Error::ProbabilityViolation("alphabet is empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::ProbabilityViolation(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::ProbabilityViolation(format!(
                "alphabet mass is {total}, expected 1"
            )));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::ProbabilityViolation(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(SourceAlphabet { symbols, probs, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    /// Every element index.
    pub fn all(&self) -> ElementSet {
        (0..self.len()).collect()
    }

    pub fn mass(&self, set: &ElementSet) -> f64 {
        set.iter().map(|&i| self.probs[i]).sum()
    }
}

/// A semantic partition of the alphabet (one semantic dimension).
#[derive(Debug, Clone, PartialEq)]
pub struct Category {
    name: String,
    attributes: Vec<String>,
    assignment: Vec<Slot>,
}

impl Category {
    /// Builds a category from a per-element assignment. `assignment[i]` is the
    /// attribute of element `i`, or `None` for the null subset.
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        attributes: Vec<S>,
        assignment: Vec<Slot>,
    ) -> Result<Self> {
        let name = name.into();
        let attributes: Vec<String> = attributes.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if a == NULL_ATTRIBUTE {
                return Err(Error::PartitionViolation {
                    category: name,
                    detail: format!("attribute label `{NULL_ATTRIBUTE}` is reserved"),
                });
            }
            if !seen.insert(a.as_str()) {
                return Err(Error::PartitionViolation {
                    category: name.clone(),
                    detail: format!("duplicate attribute `{a}`"),
                });
            }
        }
        if let Some(bad) = assignment.iter().flatten().find(|&&a| a >= attributes.len()) {
            return Err(Error::PartitionViolation {
                category: name,
                detail: format!("attribute index {bad} out of range"),
            });
        }
        Ok(Category { name, attributes, assignment })
    }

    /// Builds a category from attribute groups over named symbols. The
    /// reserved key `"0"` lists the null subset. Every alphabet symbol must
    /// appear in exactly one group.
    pub fn from_groups<A, S>(
        name: impl Into<String>,
        alphabet: &SourceAlphabet,
        groups: impl IntoIterator<Item = (A, Vec<S>)>,
    ) -> Result<Self>
    where
        A: Into<String>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut attributes = Vec::new();
        let mut assignment: Vec<Option<Slot>> = vec![None; alphabet.len()];
        for (attr, members) in groups {
            let attr = attr.into();
            let slot = if attr == NULL_ATTRIBUTE {
                None
            } else {
                if attributes.contains(&attr) {
                    return Err(Error::PartitionViolation {
                        category: name,
                        detail: format!("duplicate attribute `{attr}`"),
                    });
                }
                attributes.push(attr);
                Some(attributes.len() - 1)
            };
            for m in members {
                let m = m.as_ref();
                let i = alphabet.index_of(m).ok_or_else(|| Error::PartitionViolation {
                    category: name.clone(),
                    detail: format!("symbol `{m}` is not in the alphabet"),
                })?;
                if assignment[i].is_some() {
                    return Err(Error::PartitionViolation {
                        category: name.clone(),
                        detail: format!("symbol `{m}` is assigned twice"),
                    });
                }
                assignment[i] = Some(slot);
            }
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| Error::PartitionViolation {
                    category: name.clone(),
                    detail: format!("symbol `{}` is unassigned", alphabet.symbols()[i]),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Category::new(name, attributes, assignment)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn assignment(&self) -> &[Slot] {
        &self.assignment
    }

    pub fn slot_of(&self, element: usize) -> Slot {
        self.assignment[element]
    }

    pub fn attribute_index(&self, attribute: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a == attribute)
            .ok_or_else(|| Error::UnknownAttribute {
                category: self.name.clone(),
                attribute: attribute.to_string(),
            })
    }

    /// Parses an attribute label, mapping `"0"` to the null slot.
    pub fn slot_by_label(&self, label: &str) -> Result<Slot> {
        if label == NULL_ATTRIBUTE {
            Ok(None)
        } else {
            self.attribute_index(label).map(Some)
        }
    }

    pub fn label(&self, slot: Slot) -> &str {
        match slot {
            Some(a) => &self.attributes[a],
            None => NULL_ATTRIBUTE,
        }
    }

    /// The subset `B_j^{slot}`.
    pub fn subset(&self, slot: Slot) -> ElementSet {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == slot)
            .map(|(i, _)| i)
            .collect()
    }

    fn check_covers(&self, alphabet: &SourceAlphabet) -> Result<()> {
        if self.assignment.len() != alphabet.len() {
            return Err(Error::PartitionViolation {
                category: self.name.clone(),
                detail: format!(
                    "assigns {} elements but the alphabet has {}",
                    self.assignment.len(),
                    alphabet.len()
                ),
            });
        }
        Ok(())
    }

    fn restrict(&self, elements: &[usize]) -> Category {
        Category {
            name: self.name.clone(),
            attributes: self.attributes.clone(),
            assignment: elements.iter().map(|&i| self.assignment[i]).collect(),
        }
    }
}

/// Norm used for entity distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    L1,
    #[default]
    L2,
    LInf,
}

impl Norm {
    pub fn combine(self, diffs: impl Iterator<Item = f64>) -> f64 {
        match self {
            Norm::L1 => diffs.map(f64::abs).sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::LInf => diffs.map(f64::abs).fold(0.0, f64::max),
        }
    }
}

/// A declared antonym pair inside one category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Antonym {
    pub category: usize,
    pub a: usize,
    pub b: usize,
}

/// Real coordinates of every attribute on its category axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    coords: Vec<Vec<f64>>,
    norm: Norm,
    antonyms: Vec<Antonym>,
}

impl Embedding {
    /// Coordinates `1..=M_j` in declared attribute order.
    pub fn integer_grid(categories: &[Category], norm: Norm) -> Self {
        let coords = categories
            .iter()
            .map(|c| (1..=c.attributes().len()).map(|x| x as f64).collect())
            .collect();
        Embedding { coords, norm, antonyms: Vec::new() }
    }

    pub fn from_coords(coords: Vec<Vec<f64>>, norm: Norm) -> Self {
        Embedding { coords, norm, antonyms: Vec::new() }
    }

    pub fn with_coordinate(mut self, category: usize, attribute: usize, x: f64) -> Self {
        self.coords[category][attribute] = x;
        self
    }

    pub fn with_antonym(mut self, category: usize, a: usize, b: usize) -> Self {
        self.antonyms.push(Antonym { category, a, b });
        self
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn antonyms(&self) -> &[Antonym] {
        &self.antonyms
    }

    pub fn axis(&self, category: usize) -> &[f64] {
        &self.coords[category]
    }

    pub fn coordinate(&self, category: usize, attribute: usize) -> f64 {
        self.coords[category][attribute]
    }

    /// Checks coverage, distinctness within each axis and exact antonym symmetry.
    pub fn validate(&self, categories: &[Category]) -> Result<()> {
        if self.coords.len() != categories.len() {
            return Err(Error::EmbeddingViolation(format!(
                "{} axes for {} categories",
                self.coords.len(),
                categories.len()
            )));
        }
        for (c, axis) in categories.iter().zip(&self.coords) {
            if axis.len() != c.attributes().len() {
                return Err(Error::EmbeddingViolation(format!(
                    "category `{}` has {} attributes but {} coordinates",
                    c.name(),
                    c.attributes().len(),
                    axis.len()
                )));
            }
            for (i, x) in axis.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::EmbeddingViolation(format!(
                        "`{}` has non-finite coordinate",
                        c.attributes()[i]
                    )));
                }
                if let Some(j) = axis[..i].iter().position(|y| y == x) {
                    return Err(Error::EmbeddingViolation(format!(
                        "`{}` and `{}` share coordinate {x} in `{}`",
                        c.attributes()[j],
                        c.attributes()[i],
                        c.name()
                    )));
                }
            }
        }
        for ant in &self.antonyms {
            let axis = self.coords.get(ant.category).ok_or_else(|| {
                Error::EmbeddingViolation(format!("antonym category {} out of range", ant.category))
            })?;
            let (Some(&xa), Some(&xb)) = (axis.get(ant.a), axis.get(ant.b)) else {
                return Err(Error::EmbeddingViolation("antonym attribute out of range".into()));
            };
            if xa != -xb {
                let c = &categories[ant.category];
                return Err(Error::EmbeddingViolation(format!(
                    "antonyms `{}` ({xa}) and `{}` ({xb}) are not mirrored",
                    c.attributes()[ant.a],
                    c.attributes()[ant.b]
                )));
            }
        }
        Ok(())
    }

    fn restrict(&self, keep: &[usize]) -> Embedding {
        let remap: HashMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        Embedding {
            coords: keep.iter().map(|&c| self.coords[c].clone()).collect(),
            norm: self.norm,
            antonyms: self
                .antonyms
                .iter()
                .filter_map(|a| remap.get(&a.category).map(|&c| Antonym { category: c, ..*a }))
                .collect(),
        }
    }
}

/// Whether two attributes of one category are ε-similar:
/// `0 < |f(a) - f(b)| <= eps`.
pub fn epsilon_similar(
    embedding: &Embedding,
    category: usize,
    a: usize,
    b: usize,
    eps: f64,
) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveThreshold(eps));
    }
    let d = (embedding.coordinate(category, a) - embedding.coordinate(category, b)).abs();
    Ok(d > 0.0 && d <= eps)
}

/// A semantic entity: one slot per category plus its probability mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub coords: Vec<Slot>,
    pub prob: f64,
    /// Alphabet elements realizing this tuple.
    pub members: Vec<usize>,
}

impl Entity {
    /// Amount of semantics in suts: the number of specified slots.
    pub fn suts(&self) -> usize {
        self.coords.iter().filter(|s| s.is_some()).count()
    }

    pub fn specified(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(i, _)| i)
    }
}

/// Sub-mapping `C_j^{j'}`: intersects its input with `B_j^{j'}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubMapping {
    pub category: usize,
    pub slot: Slot,
}

impl SubMapping {
    pub fn apply(&self, space: &SemanticSpace, input: &ElementSet) -> ElementSet {
        let cat = &space.categories[self.category];
        input.iter().copied().filter(|&i| cat.slot_of(i) == self.slot).collect()
    }
}

/// Composition `(a ∘ b)(B) = a(b(B)) = B_a ∩ B_b`.
pub fn compose(space: &SemanticSpace, a: SubMapping, b: SubMapping) -> Result<ElementSet> {
    space.check_mapping(a)?;
    space.check_mapping(b)?;
    Ok(a.apply(space, &b.apply(space, &space.alphabet.all())))
}

/// Order in which categories are used to locate an entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perspective {
    order: Vec<usize>,
}

impl Perspective {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &c in &order {
            if c >= order.len() || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidPerspective(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Perspective { order })
    }

    pub fn identity(m: usize) -> Self {
        Perspective { order: (0..m).collect() }
    }

    /// Every ordering of `m` categories.
    pub fn all(m: usize) -> Vec<Perspective> {
        use itertools::Itertools;
        (0..m).permutations(m).map(|order| Perspective { order }).collect()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub(crate) fn check_for(&self, space: &SemanticSpace) -> Result<()> {
        if self.order.len() != space.dimension() {
            return Err(Error::InvalidPerspective(format!(
                "perspective has {} categories, space has {}",
                self.order.len(),
                space.dimension()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.order.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// The semantic probability space `(Ω, E, P)` over an alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticSpace {
    alphabet: SourceAlphabet,
    categories: Vec<Category>,
    embedding: Embedding,
    entities: Vec<Entity>,
}

impl SemanticSpace {
    /// Locates every element and groups elements sharing a tuple into one entity.
    pub fn build(
        alphabet: SourceAlphabet,
        categories: Vec<Category>,
        embedding: Embedding,
    ) -> Result<Self> {
        for c in &categories {
            c.check_covers(&alphabet)?;
        }
        let mut names = BTreeSet::new();
        for c in &categories {
            if !names.insert(c.name()) {
                return Err(Error::PartitionViolation {
                    category: c.name().to_string(),
                    detail: "duplicate category name".into(),
                });
            }
        }
        embedding.validate(&categories)?;

        let mut entities: Vec<Entity> = Vec::new();
        let mut by_tuple: HashMap<Vec<Slot>, usize> = HashMap::new();
        for (i, &p) in alphabet.probs().iter().enumerate() {
            let tuple: Vec<Slot> = categories.iter().map(|c| c.slot_of(i)).collect();
            match by_tuple.get(&tuple) {
                Some(&e) => {
                    entities[e].prob += p;
                    entities[e].members.push(i);
                }
                None => {
                    by_tuple.insert(tuple.clone(), entities.len());
                    entities.push(Entity { coords: tuple, prob: p, members: vec![i] });
                }
            }
        }
        let total: f64 = entities.iter().map(|e| e.prob).sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::ProbabilityViolation(format!("entity mass is {total}")));
        }
        Ok(SemanticSpace { alphabet, categories, embedding, entities })
    }

    /// Builds a space with one synthetic element per tuple, named after the
    /// tuple's attribute labels. `categories` lists names and attribute labels.
    pub fn from_tuples(
        categories: &[(String, Vec<String>)],
        tuples: &[(Vec<Slot>, f64)],
        norm: Norm,
    ) -> Result<Self> {
        let mut symbols = Vec::with_capacity(tuples.len());
        let mut probs = Vec::with_capacity(tuples.len());
        for (t, p) in tuples {
            if t.len() != categories.len() {
                return Err(Error::PartitionViolation {
                    category: "*".into(),
                    detail: format!("tuple of length {} for {} categories", t.len(), categories.len()),
                });
            }
            let label: Vec<&str> = t
                .iter()
                .zip(categories)
                .map(|(s, (_, attrs))| match s {
                    Some(a) => attrs.get(*a).map(String::as_str).unwrap_or("?"),
                    None => NULL_ATTRIBUTE,
                })
                .collect();
            symbols.push(label.join("/"));
            probs.push(*p);
        }
        let alphabet = SourceAlphabet::new(symbols, probs)?;
        let cats = categories
            .iter()
            .enumerate()
            .map(|(j, (name, attrs))| {
                Category::new(name.clone(), attrs.clone(), tuples.iter().map(|(t, _)| t[j]).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let embedding = Embedding::integer_grid(&cats, norm);
        SemanticSpace::build(alphabet, cats, embedding)
    }

    pub fn alphabet(&self) -> &SourceAlphabet {
        &self.alphabet
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    /// Number of categories `M`.
    pub fn dimension(&self) -> usize {
        self.categories.len()
    }

    pub fn entity_probs(&self) -> Vec<f64> {
        self.entities.iter().map(|e| e.prob).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.entities.iter().map(|e| e.prob).sum()
    }

    pub fn category_index(&self, name: &str) -> Result<usize> {
        self.categories
            .iter()
            .position(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownCategory(name.to_string()))
    }

    /// Tuple label such as `blue/cartoon/cat`.
    pub fn entity_label(&self, entity: usize) -> String {
        self.tuple_label(&self.entities[entity].coords)
    }

    pub fn tuple_label(&self, tuple: &[Slot]) -> String {
        let parts: Vec<&str> =
            tuple.iter().zip(&self.categories).map(|(s, c)| c.label(*s)).collect();
        parts.join("/")
    }

    /// Finds an entity by one of its member symbols or by its tuple label.
    pub fn find_entity(&self, id: &str) -> Option<usize> {
        if let Some(i) = self.alphabet.index_of(id) {
            return self.entities.iter().position(|e| e.members.contains(&i));
        }
        (0..self.entities.len()).find(|&e| self.entity_label(e) == id)
    }

    pub fn entity_of_tuple(&self, tuple: &[Slot]) -> Option<usize> {
        self.entities.iter().position(|e| e.coords == tuple)
    }

    /// Resolves `(category, attribute)` labels to a sub-mapping.
    pub fn sub_mapping(&self, category: &str, attribute: &str) -> Result<SubMapping> {
        let c = self.category_index(category)?;
        let slot = self.categories[c].slot_by_label(attribute)?;
        Ok(SubMapping { category: c, slot })
    }

    fn check_mapping(&self, m: SubMapping) -> Result<()> {
        let cat = self
            .categories
            .get(m.category)
            .ok_or_else(|| Error::UnknownCategory(m.category.to_string()))?;
        if let Some(a) = m.slot {
            if a >= cat.attributes().len() {
                return Err(Error::UnknownAttribute {
                    category: cat.name().to_string(),
                    attribute: a.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn symbols_of(&self, set: &ElementSet) -> Vec<&str> {
        set.iter().map(|&i| self.alphabet.symbols()[i].as_str()).collect()
    }

    /// `p`-norm distance between two entities over their specified slots.
    pub fn distance(&self, e1: &Entity, e2: &Entity) -> Result<f64> {
        if e1.coords.len() != e2.coords.len()
            || e1.coords.iter().zip(&e2.coords).any(|(a, b)| a.is_some() != b.is_some())
        {
            return Err(Error::DimensionMismatch);
        }
        let diffs = e1.coords.iter().zip(&e2.coords).enumerate().filter_map(|(j, (a, b))| {
            Some(self.embedding.coordinate(j, (*a)?) - self.embedding.coordinate(j, (*b)?))
        });
        Ok(self.embedding.norm().combine(diffs))
    }

    /// Probability of the event fixed by `(category, slot)` pairs.
    pub fn event_mass(&self, fixed: &[(usize, Slot)]) -> Result<f64> {
        for &(c, slot) in fixed {
            self.check_mapping(SubMapping { category: c, slot })?;
        }
        Ok(self
            .entities
            .iter()
            .filter(|e| fixed.iter().all(|&(c, s)| e.coords[c] == s))
            .map(|e| e.prob)
            .sum())
    }

    /// The `(M - m)`-dimensional subspace selected by `fixed`, with masses
    /// renormalized by the probability of the conditioning event.
    pub fn condition(&self, fixed: &[(usize, Slot)]) -> Result<SemanticSpace> {
        let mass = self.event_mass(fixed)?;
        if mass <= 0.0 {
            return Err(Error::ZeroMassCondition);
        }
        let fixed_cats: BTreeSet<usize> = fixed.iter().map(|&(c, _)| c).collect();
        let elements: Vec<usize> = (0..self.alphabet.len())
            .filter(|&i| fixed.iter().all(|&(c, s)| self.categories[c].slot_of(i) == s))
            .collect();
        let alphabet = SourceAlphabet::new(
            elements.iter().map(|&i| self.alphabet.symbols()[i].clone()).collect(),
            elements.iter().map(|&i| self.alphabet.probs()[i] / mass).collect(),
        )?;
        let keep: Vec<usize> = (0..self.dimension()).filter(|c| !fixed_cats.contains(c)).collect();
        let categories = keep.iter().map(|&c| self.categories[c].restrict(&elements)).collect();
        let embedding = self.embedding.restrict(&keep);
        SemanticSpace::build(alphabet, categories, embedding)
    }

    /// Like [`condition`](Self::condition) with category and attribute labels.
    pub fn condition_by_name(&self, fixed: &[(&str, &str)]) -> Result<SemanticSpace> {
        let resolved = fixed
            .iter()
            .map(|(c, a)| {
                let ci = self.category_index(c)?;
                Ok((ci, self.categories[ci].slot_by_label(a)?))
            })
            .collect::<Result<Vec<_>>>()?;
        self.condition(&resolved)
    }

    /// The same categories and embedding over a new alphabet distribution.
    pub fn with_probs(&self, probs: Vec<f64>) -> Result<SemanticSpace> {
        let alphabet = SourceAlphabet::new(self.alphabet.symbols().to_vec(), probs)?;
        SemanticSpace::build(alphabet, self.categories.clone(), self.embedding.clone())
    }
}
