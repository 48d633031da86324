//! JSON documents for spaces, knowledge bases and message ensembles.
//!
//! Space document:
//!
//! ```json
//! {
//!   "alphabet": {"Tom": 0.5, "Jerry": 0.5},
//!   "categories": {"kind": {"cat": ["Tom"], "mouse": ["Jerry"]}},
//!   "embedding": {"kind": {"cat": 1.0, "mouse": 2.0}},
//!   "antonyms": {"kind": [["cat", "mouse"]]},
//!   "norm": "l2"
//! }
//! ```
//!
//! Every symbol must appear in exactly one group of every category; the group
//! `"0"` is the null subset. Attributes missing from `embedding` keep their
//! integer-grid coordinate.
//!
//! KB document:
//!
//! ```json
//! {
//!   "positions": [["Today", "Tomorrow"], ["Rainy", "Sunny"]],
//!   "conditionals": [
//!     {"context": [], "probs": [0.5, 0.5]},
//!     {"context": ["Today"], "probs": [0.0, 1.0]}
//!   ],
//!   "substitutions": [["this Tuesday", "tomorrow"], ["tomorrow", "this Tuesday", 1.0]]
//! }
//! ```
//!
//! A substitution `[a, b, p]` states `P(a | b) = p`; `p` defaults to 1.

use std::collections::BTreeMap;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::entropy::MessageEnsemble;
use crate::error::{Error, Result};
use crate::kb::{KnowledgeBase, Substitution};
use crate::space::{Category, Embedding, Norm, SemanticSpace, SourceAlphabet, NULL_ATTRIBUTE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub alphabet: IndexMap<String, f64>,
    pub categories: IndexMap<String, IndexMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub embedding: IndexMap<String, IndexMap<String, f64>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub antonyms: IndexMap<String, Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormName {
    L1,
    L2,
    Linf,
}

impl From<NormName> for Norm {
    fn from(n: NormName) -> Norm {
        match n {
            NormName::L1 => Norm::L1,
            NormName::L2 => Norm::L2,
            NormName::Linf => Norm::LInf,
        }
    }
}

impl From<Norm> for NormName {
    fn from(n: Norm) -> NormName {
        match n {
            Norm::L1 => NormName::L1,
            Norm::L2 => NormName::L2,
            Norm::LInf => NormName::Linf,
        }
    }
}

impl SpaceDoc {
    pub fn into_space(self) -> Result<SemanticSpace> {
        let (symbols, probs): (Vec<String>, Vec<f64>) = self.alphabet.into_iter().unzip();
        let alphabet = SourceAlphabet::new(symbols, probs)?;
        let mut categories = Vec::with_capacity(self.categories.len());
        for (name, groups) in &self.categories {
            categories.push(Category::from_groups(name.clone(), &alphabet, groups.clone())?);
        }
        let mut embedding = Embedding::integer_grid(&categories, self.norm.map_or(Norm::L2, Norm::from));
        for (cat, coords) in &self.embedding {
            let j = category_position(&categories, cat)?;
            for (attr, &x) in coords {
                embedding = embedding.with_coordinate(j, categories[j].attribute_index(attr)?, x);
            }
        }
        for (cat, pairs) in &self.antonyms {
            let j = category_position(&categories, cat)?;
            for [a, b] in pairs {
                let (a, b) = (categories[j].attribute_index(a)?, categories[j].attribute_index(b)?);
                embedding = embedding.with_antonym(j, a, b);
            }
        }
        SemanticSpace::build(alphabet, categories, embedding)
    }

    pub fn from_space(space: &SemanticSpace) -> Self {
        let a = space.alphabet();
        let alphabet = a.symbols().iter().cloned().zip(a.probs().iter().copied()).collect();
        let mut categories = IndexMap::new();
        let mut embedding = IndexMap::new();
        let mut antonyms: IndexMap<String, Vec<[String; 2]>> = IndexMap::new();
        for (j, c) in space.categories().iter().enumerate() {
            let mut groups: IndexMap<String, Vec<String>> =
                c.attributes().iter().map(|l| (l.clone(), Vec::new())).collect();
            for (i, &slot) in c.assignment().iter().enumerate() {
                groups.entry(c.label(slot).to_string()).or_default().push(a.symbols()[i].clone());
            }
            if let Some(null) = groups.shift_remove(NULL_ATTRIBUTE) {
                groups.insert(NULL_ATTRIBUTE.to_string(), null);
            }
            categories.insert(c.name().to_string(), groups);
            embedding.insert(
                c.name().to_string(),
                c.attributes().iter().cloned().zip(space.embedding().axis(j).iter().copied()).collect(),
            );
        }
        for ant in space.embedding().antonyms() {
            let c = &space.categories()[ant.category];
            antonyms
                .entry(c.name().to_string())
                .or_default()
                .push([c.attributes()[ant.a].clone(), c.attributes()[ant.b].clone()]);
        }
        SpaceDoc {
            alphabet,
            categories,
            embedding,
            antonyms,
            norm: Some(space.embedding().norm().into()),
        }
    }
}

fn category_position(categories: &[Category], name: &str) -> Result<usize> {
    categories
        .iter()
        .position(|c| c.name() == name)
        .ok_or_else(|| Error::UnknownCategory(name.to_string()))
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn space_from_json(text: &str) -> Result<SemanticSpace> {
    parse::<SpaceDoc>(text, "space document")?.into_space()
}

pub fn space_to_json(space: &SemanticSpace) -> String {
    serde_json::to_string_pretty(&SpaceDoc::from_space(space)).expect("space serializes")
}

pub fn load_space(path: &Path) -> Result<SemanticSpace> {
    space_from_json(&read(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalDoc {
    pub context: Vec<String>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubstitutionDoc {
    Certain(String, String),
    Weighted(String, String, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positions: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditionals: Vec<ConditionalDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitutions: Option<Vec<SubstitutionDoc>>,
}

impl KbDoc {
    pub fn into_kb(self) -> Result<KnowledgeBase> {
        let subs = self.substitutions.map(|list| {
            list.into_iter()
                .map(|s| match s {
                    SubstitutionDoc::Certain(t, g) => Substitution::certain(t, g),
                    SubstitutionDoc::Weighted(target, given, prob) => Substitution { target, given, prob },
                })
                .collect::<Vec<_>>()
        });
        if self.positions.is_empty() {
            if !self.conditionals.is_empty() {
                return Err(Error::Format("conditionals given without positions".into()));
            }
            let subs = subs.ok_or_else(|| Error::Format("document has neither positions nor substitutions".into()))?;
            return KnowledgeBase::substitutions_only(subs);
        }
        if let Some(d) = self.depth {
            if d != self.positions.len() {
                return Err(Error::Format(format!("depth {d} but {} positions", self.positions.len())));
            }
        }
        let mut tables: Vec<BTreeMap<Vec<usize>, Vec<f64>>> = vec![BTreeMap::new(); self.positions.len()];
        for c in self.conditionals {
            let k = c.context.len();
            if k >= self.positions.len() {
                return Err(Error::DepthExceeded { message: k + 1, depth: self.positions.len() });
            }
            let ctx = c
                .context
                .iter()
                .enumerate()
                .map(|(i, id)| {
                    self.positions[i]
                        .iter()
                        .position(|e| e == id)
                        .ok_or_else(|| Error::UnknownSymbol(format!("`{id}` at position {}", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if tables[k].insert(ctx, c.probs).is_some() {
                return Err(Error::Format(format!("context {:?} listed twice", c.context)));
            }
        }
        let kb = KnowledgeBase::new(self.positions, tables)?;
        match subs {
            Some(s) => kb.with_substitutions(s),
            None => Ok(kb),
        }
    }

    pub fn from_kb(kb: &KnowledgeBase) -> Self {
        let mut conditionals = Vec::new();
        for table in kb.tables() {
            for (ctx, probs) in table {
                conditionals.push(ConditionalDoc {
                    context: ctx.iter().enumerate().map(|(i, &e)| kb.positions()[i][e].clone()).collect(),
                    probs: probs.clone(),
                });
            }
        }
        KbDoc {
            depth: (!kb.positions().is_empty()).then(|| kb.positions().len()),
            positions: kb.positions().to_vec(),
            conditionals,
            substitutions: kb.substitutions().map(|subs| {
                subs.iter()
                    .map(|s| SubstitutionDoc::Weighted(s.target.clone(), s.given.clone(), s.prob))
                    .collect()
            }),
        }
    }
}

pub fn kb_from_json(text: &str) -> Result<KnowledgeBase> {
    parse::<KbDoc>(text, "knowledge base document")?.into_kb()
}

pub fn kb_to_json(kb: &KnowledgeBase) -> String {
    serde_json::to_string_pretty(&KbDoc::from_kb(kb)).expect("kb serializes")
}

pub fn load_kb(path: &Path) -> Result<KnowledgeBase> {
    kb_from_json(&read(path)?)
}

/// `{"positions": [[...], ...], "joint": [...]}` with the joint in row-major
/// order, last position fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDoc {
    pub positions: Vec<Vec<String>>,
    pub joint: Vec<f64>,
}

pub fn ensemble_from_json(text: &str) -> Result<MessageEnsemble> {
    let doc: EnsembleDoc = parse(text, "ensemble document")?;
    MessageEnsemble::new(doc.positions, doc.joint)
}

pub fn ensemble_to_json(ensemble: &MessageEnsemble) -> String {
    let doc = EnsembleDoc { positions: ensemble.position_sets().to_vec(), joint: ensemble.joint().to_vec() };
    serde_json::to_string_pretty(&doc).expect("ensemble serializes")
}

pub fn load_ensemble(path: &Path) -> Result<MessageEnsemble> {
    ensemble_from_json(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{categorizing_entropy, message_entropy_semantic};
    use crate::space::Perspective;

    const TOM: &str = r#"{
        "alphabet": {"Tom": 0.4, "Jerry": 0.3, "Spike": 0.2, "Nibbles": 0.1},
        "categories": {
            "kind": {"cat": ["Tom"], "mouse": ["Jerry", "Nibbles"], "dog": ["Spike"]},
            "color": {"blue": ["Tom"], "brown": ["Jerry", "Spike"], "0": ["Nibbles"]}
        },
        "embedding": {"color": {"blue": -1.0, "brown": 1.0}},
        "antonyms": {"color": [["blue", "brown"]]},
        "norm": "l1"
    }"#;

    #[test]
    fn space_roundtrip() {
        let s = space_from_json(TOM).unwrap();
        assert_eq!(s.entities().len(), 4);
        assert_eq!(s.embedding().axis(1), &[-1.0, 1.0]);
        assert_eq!(s.embedding().norm(), Norm::L1);
        let again = space_from_json(&space_to_json(&s)).unwrap();
        assert_eq!(again, s);
        let h = categorizing_entropy(&again, &Perspective::identity(2)).unwrap();
        assert!((h - categorizing_entropy(&s, &Perspective::new(vec![1, 0]).unwrap()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn space_errors_name_the_culprit() {
        let missing = TOM.replace(r#", "0": ["Nibbles"]"#, "");
        match space_from_json(&missing) {
            Err(Error::PartitionViolation { category, detail }) => {
                assert_eq!(category, "color");
                assert!(detail.contains("Nibbles"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let unknown = TOM.replace(r#""embedding": {"color""#, r#""embedding": {"size""#);
        assert!(matches!(space_from_json(&unknown), Err(Error::UnknownCategory(_))));
        assert!(matches!(space_from_json("{"), Err(Error::Format(_))));
    }

    const WEATHER: &str = r#"{
        "positions": [["Today", "Tomorrow"], ["Rainy", "Sunny", "Cloudy"]],
        "conditionals": [
            {"context": [], "probs": [0.5, 0.5]},
            {"context": ["Today"], "probs": [0.0, 1.0, 0.0]},
            {"context": ["Tomorrow"], "probs": [0.2, 0.2, 0.6]}
        ],
        "substitutions": [["Rainy", "Cloudy", 0.5]]
    }"#;

    #[test]
    fn kb_roundtrip() {
        let kb = kb_from_json(WEATHER).unwrap();
        assert_eq!(kb.depth(), 2);
        assert_eq!(kb_from_json(&kb_to_json(&kb)).unwrap(), kb);
        let ens = kb.chain_ensemble().unwrap();
        assert_eq!(ensemble_from_json(&ensemble_to_json(&ens)).unwrap(), ens);
        assert!(message_entropy_semantic(&ens, &kb).is_ok());
    }

    #[test]
    fn kb_document_errors() {
        let bad = WEATHER.replace(r#"[0.2, 0.2, 0.6]"#, r#"[0.2, 0.2, 0.5]"#);
        assert!(matches!(kb_from_json(&bad), Err(Error::InvalidDistribution(_))));
        let deep = WEATHER.replace(r#"{"context": [], "#, r#"{"context": ["Today", "Rainy"], "#);
        assert!(matches!(kb_from_json(&deep), Err(Error::DepthExceeded { .. })));
        let unknown = WEATHER.replace(r#"["Today"]"#, r#"["Yesterday"]"#);
        assert!(matches!(kb_from_json(&unknown), Err(Error::UnknownSymbol(_))));
        let subs_only = kb_from_json(r#"{"substitutions": [["a", "b"], ["b", "a"]]}"#).unwrap();
        assert_eq!(subs_only.substitutions().unwrap().len(), 2);
        assert!(kb_from_json("{}").is_err());
    }
}
