//! Fano source codes: flat, parity-extended, and perspective-ordered
//! semantic books with optional synonym merging.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::entropy::entropy_bits;
use crate::error::{Error, Result};
use crate::kb::{space_synonyms, KnowledgeBase, SynonymPartition};
use crate::space::{check_distribution, Perspective, SemanticSpace, Slot};

/// A sequence of bits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn append(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// Number of set bits.
    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("`{other}` is not a bit"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodecKind {
    Fano,
    FanoParity,
    SemanticFano,
    SemanticFanoKb,
}

impl CodecKind {
    pub const ALL: [CodecKind; 4] =
        [CodecKind::Fano, CodecKind::FanoParity, CodecKind::SemanticFano, CodecKind::SemanticFanoKb];

    pub fn name(self) -> &'static str {
        match self {
            CodecKind::Fano => "flat-fano",
            CodecKind::FanoParity => "fano-parity",
            CodecKind::SemanticFano => "semantic-fano",
            CodecKind::SemanticFanoKb => "semantic-fano-kb",
        }
    }

    pub fn is_semantic(self) -> bool {
        matches!(self, CodecKind::SemanticFano | CodecKind::SemanticFanoKb)
    }
}

impl fmt::Display for CodecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodecKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CodecKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown codec kind `{s}`")))
    }
}

const NO_CHILD: u32 = 0;

/// Binary trie over codewords; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
struct Trie {
    children: Vec<[u32; 2]>,
    leaf: Vec<Option<usize>>,
}

impl Trie {
    fn build(codewords: &[BitString]) -> Result<Self> {
        let mut t = Trie { children: vec![[NO_CHILD; 2]], leaf: vec![None] };
        for (i, w) in codewords.iter().enumerate() {
            let mut node = 0usize;
            for &b in w.bits() {
                if t.leaf[node].is_some() {
                    return Err(Error::InvalidParameter(format!("codeword {i} extends another codeword")));
                }
                let next = t.children[node][b as usize];
                node = if next == NO_CHILD {
                    t.children.push([NO_CHILD; 2]);
                    t.leaf.push(None);
                    let id = t.children.len() - 1;
                    t.children[node][b as usize] = id as u32;
                    id
                } else {
                    next as usize
                };
            }
            if t.leaf[node].is_some() || t.children[node] != [NO_CHILD; 2] {
                return Err(Error::InvalidParameter(format!("codeword {i} is a prefix of another codeword")));
            }
            t.leaf[node] = Some(i);
        }
        Ok(t)
    }

    /// Walks `bits` from the root until a leaf; returns the leaf and bits used.
    fn walk(&self, bits: &[bool]) -> Result<(usize, usize)> {
        let mut node = 0usize;
        let mut used = 0;
        loop {
            if let Some(i) = self.leaf[node] {
                return Ok((i, used));
            }
            let Some(&b) = bits.get(used) else {
                return Err(Error::DecodeFailure(format!("bits exhausted after {used} bits")));
            };
            let next = self.children[node][b as usize];
            if next == NO_CHILD {
                return Err(Error::DecodeFailure(format!("no codeword continues after {used} bits")));
            }
            node = next as usize;
            used += 1;
        }
    }
}

/// Fano codewords for `probs`, in input order.
fn fano_codewords(probs: &[f64]) -> Vec<BitString> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    let mut out = vec![BitString::new(); probs.len()];
    let mut prefix = Vec::new();
    fano_split(&order, probs, &mut prefix, &mut out);
    out
}

fn fano_split(order: &[usize], probs: &[f64], prefix: &mut Vec<bool>, out: &mut [BitString]) {
    if order.len() == 1 {
        out[order[0]] = BitString(prefix.clone());
        return;
    }
    let total: f64 = order.iter().map(|&i| probs[i]).sum();
    let mut left = 0.0;
    let mut best = (f64::INFINITY, 1);
    for k in 1..order.len() {
        left += probs[order[k - 1]];
        let gap = (2.0 * left - total).abs();
        if gap < best.0 - 1e-12 {
            best = (gap, k);
        }
    }
    let (lhs, rhs) = order.split_at(best.1);
    prefix.push(false);
    fano_split(lhs, probs, prefix, out);
    prefix.pop();
    prefix.push(true);
    fano_split(rhs, probs, prefix, out);
    prefix.pop();
}

/// A prefix-free code over symbols of type `S`.
#[derive(Debug, Clone)]
pub struct Codebook<S> {
    symbols: Vec<S>,
    probs: Vec<f64>,
    // codewords without the parity bit
    base: Vec<BitString>,
    parity: bool,
    index: HashMap<S, usize>,
    trie: Trie,
}

impl<S: PartialEq> PartialEq for Codebook<S> {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
            && self.probs == other.probs
            && self.base == other.base
            && self.parity == other.parity
    }
}

impl<S: Clone + Eq + Hash> Codebook<S> {
    fn assemble(symbols: Vec<S>, probs: Vec<f64>, base: Vec<BitString>, parity: bool) -> Result<Self> {
        let trie = Trie::build(&base)?;
        let index = symbols.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Codebook { symbols, probs, base, parity, index, trie })
    }

    /// Fano code over `symbols`; a lone symbol gets `"0"`.
    pub fn fano(symbols: Vec<S>, probs: Vec<f64>) -> Result<Self> {
        Self::fano_with(symbols, probs, false, false)
    }

    /// Fano code with one even-parity bit appended to every codeword.
    pub fn fano_parity(symbols: Vec<S>, probs: Vec<f64>) -> Result<Self> {
        Self::fano_with(symbols, probs, true, false)
    }

    fn fano_with(symbols: Vec<S>, probs: Vec<f64>, parity: bool, empty_if_single: bool) -> Result<Self> {
        if symbols.len() != probs.len() {
            return Err(Error::InvalidDistribution("symbol and probability counts differ".into()));
        }
        check_distribution(&probs, "code distribution")?;
        let base = if probs.len() == 1 && !empty_if_single {
            vec![BitString(vec![false])]
        } else {
            fano_codewords(&probs)
        };
        Self::assemble(symbols, probs, base, parity)
    }

    pub fn has_parity(&self) -> bool {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[S] {
        &self.symbols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn position(&self, symbol: &S) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    /// Full codeword of the `i`-th symbol, parity bit included.
    pub fn codeword(&self, i: usize) -> BitString {
        let mut w = self.base[i].clone();
        if self.parity {
            w.push(w.ones() % 2 == 1);
        }
        w
    }

    pub fn codewords(&self) -> Vec<BitString> {
        (0..self.len()).map(|i| self.codeword(i)).collect()
    }

    pub fn encode(&self, symbol: &S) -> Result<BitString> {
        self.position(symbol)
            .map(|i| self.codeword(i))
            .ok_or_else(|| Error::UnknownSymbol("symbol not in codebook".into()))
    }

    /// Decodes one codeword from the front of `bits`, returning the symbol's
    /// position and the number of bits consumed.
    pub fn decode_index(&self, bits: &[bool]) -> Result<(usize, usize)> {
        let (i, used) = self.trie.walk(bits)?;
        if !self.parity {
            return Ok((i, used));
        }
        let Some(&p) = bits.get(used) else {
            return Err(Error::DecodeFailure("missing parity bit".into()));
        };
        if (self.base[i].ones() + p as usize) % 2 == 1 {
            return Err(Error::ParityFailure);
        }
        Ok((i, used + 1))
    }

    pub fn decode(&self, bits: &[bool]) -> Result<(&S, usize)> {
        let (i, used) = self.decode_index(bits)?;
        Ok((&self.symbols[i], used))
    }

    /// Decodes a frame holding exactly one codeword. Parity books check the
    /// parity of the whole frame first.
    pub fn decode_frame(&self, frame: &[bool]) -> Result<&S> {
        if self.parity && frame.iter().filter(|&&b| b).count() % 2 == 1 {
            return Err(Error::ParityFailure);
        }
        let (s, used) = self.decode(frame)?;
        if used != frame.len() {
            return Err(Error::DecodeFailure(format!("{} trailing bits in frame", frame.len() - used)));
        }
        Ok(s)
    }

    pub fn average_length(&self) -> f64 {
        (0..self.len()).map(|i| self.probs[i] * self.codeword(i).len() as f64).sum()
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// `Σ 2^{-len}` over all codewords.
    pub fn kraft_sum(&self) -> f64 {
        (0..self.len()).map(|i| 0.5f64.powi(self.codeword(i).len() as i32)).sum()
    }

    /// Pairwise prefix check on the full codewords.
    pub fn is_prefix_free(&self) -> bool {
        let words = self.codewords();
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                if i != j && b.starts_with(a) {
                    return false;
                }
            }
        }
        true
    }

    /// `label<TAB>bits` lines in symbol order.
    pub fn dump(&self, label: impl Fn(&S) -> String) -> String {
        let mut out = String::new();
        for (i, s) in self.symbols.iter().enumerate() {
            out.push_str(&format!("{}\t{}\n", label(s), self.codeword(i)));
        }
        out
    }
}

/// Fano code over symbol indices `0..probs.len()`.
pub fn fano_build(probs: &[f64]) -> Result<Codebook<usize>> {
    Codebook::fano((0..probs.len()).collect(), probs.to_vec())
}

/// Fano code with an even-parity bit per codeword.
pub fn fano_parity_build(probs: &[f64]) -> Result<Codebook<usize>> {
    Codebook::fano_parity((0..probs.len()).collect(), probs.to_vec())
}

/// Sub-book for one position and context of a semantic code.
#[derive(Debug, Clone, PartialEq)]
pub struct SubBook {
    /// Probability of the context.
    pub context_mass: f64,
    pub book: Codebook<Slot>,
}

impl SubBook {
    /// A context with a single possible attribute, coded with zero bits.
    pub fn is_deterministic(&self) -> bool {
        self.book.len() == 1
    }
}

/// Positions decoded from the front of a semantic frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialDecode {
    /// Decoded slots in perspective order.
    pub slots: Vec<Slot>,
    pub consumed: usize,
    /// Why decoding stopped early, if it did.
    pub error: Option<Error>,
}

/// Perspective-ordered code: the attribute at each position is coded with a
/// Fano book conditioned on the attributes already sent.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticCodebook {
    kind: CodecKind,
    perspective: Perspective,
    books: Vec<BTreeMap<Vec<Slot>, SubBook>>,
    tuples: Vec<Vec<Slot>>,
    probs: Vec<f64>,
    // entity -> entity whose tuple is transmitted for it
    coded: Vec<usize>,
    by_tuple: HashMap<Vec<Slot>, usize>,
}

/// Semantic Fano code of `space` along `perspective`.
pub fn semantic_build(space: &SemanticSpace, perspective: &Perspective) -> Result<SemanticCodebook> {
    let n = space.entities().len();
    semantic_from_groups(space, perspective, &SynonymPartition::singletons(n), CodecKind::SemanticFano)
}

/// Semantic Fano code after merging the KB's synonym classes.
pub fn semantic_kb_build(
    space: &SemanticSpace,
    perspective: &Perspective,
    kb: &KnowledgeBase,
) -> Result<SemanticCodebook> {
    let partition = space_synonyms(kb, space)?;
    semantic_merged_build(space, perspective, &partition)
}

/// Semantic Fano code where each synonym class is sent as its most probable
/// member (ties to the lowest index), carrying the class's total mass.
pub fn semantic_merged_build(
    space: &SemanticSpace,
    perspective: &Perspective,
    partition: &SynonymPartition,
) -> Result<SemanticCodebook> {
    if partition.outcomes() != space.entities().len() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} outcomes, space has {} entities",
            partition.outcomes(),
            space.entities().len()
        )));
    }
    semantic_from_groups(space, perspective, partition, CodecKind::SemanticFanoKb)
}

fn semantic_from_groups(
    space: &SemanticSpace,
    perspective: &Perspective,
    partition: &SynonymPartition,
    kind: CodecKind,
) -> Result<SemanticCodebook> {
    perspective.check_for(space)?;
    let probs = space.entity_probs();
    check_distribution(&probs, "entity distribution")?;
    let tuples: Vec<Vec<Slot>> = space.entities().iter().map(|e| e.coords.clone()).collect();

    let mut coded: Vec<usize> = (0..tuples.len()).collect();
    let mut mass = probs.clone();
    for group in partition.groups() {
        let rep = *group
            .iter()
            .max_by(|&&a, &&b| probs[a].total_cmp(&probs[b]).then(b.cmp(&a)))
            .expect("groups are non-empty");
        let total: f64 = group.iter().map(|&i| probs[i]).sum();
        for &i in group {
            coded[i] = rep;
            mass[i] = 0.0;
        }
        mass[rep] = total;
    }

    let order = perspective.order();
    let mut books = Vec::with_capacity(order.len());
    for k in 0..order.len() {
        let mut contexts: BTreeMap<Vec<Slot>, BTreeMap<Slot, f64>> = BTreeMap::new();
        for (t, &m) in tuples.iter().zip(&mass) {
            if m > 0.0 {
                let ctx: Vec<Slot> = order[..k].iter().map(|&c| t[c]).collect();
                *contexts.entry(ctx).or_default().entry(t[order[k]]).or_insert(0.0) += m;
            }
        }
        let mut level = BTreeMap::new();
        for (ctx, slots) in contexts {
            let context_mass: f64 = slots.values().sum();
            let symbols: Vec<Slot> = slots.keys().copied().collect();
            let conditional: Vec<f64> = slots.values().map(|m| m / context_mass).collect();
            let book = Codebook::fano_with(symbols, conditional, false, true)?;
            level.insert(ctx, SubBook { context_mass, book });
        }
        books.push(level);
    }

    let by_tuple = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    Ok(SemanticCodebook { kind, perspective: perspective.clone(), books, tuples, probs, coded, by_tuple })
}

impl SemanticCodebook {
    pub fn kind(&self) -> CodecKind {
        self.kind
    }

    pub fn perspective(&self) -> &Perspective {
        &self.perspective
    }

    /// Sub-books of position `k` (0-based, along the perspective).
    pub fn position_books(&self, k: usize) -> &BTreeMap<Vec<Slot>, SubBook> {
        &self.books[k]
    }

    pub fn sub_books(&self) -> impl Iterator<Item = (usize, &Vec<Slot>, &SubBook)> {
        self.books.iter().enumerate().flat_map(|(k, m)| m.iter().map(move |(c, b)| (k, c, b)))
    }

    /// Entity whose tuple is transmitted for `entity`.
    pub fn representative(&self, entity: usize) -> usize {
        self.coded[entity]
    }

    pub fn encode_tuple(&self, tuple: &[Slot]) -> Result<BitString> {
        let order = self.perspective.order();
        if tuple.len() != order.len() {
            return Err(Error::UnknownSymbol(format!("tuple of length {}", tuple.len())));
        }
        let mut out = BitString::new();
        for (k, level) in self.books.iter().enumerate() {
            let ctx: Vec<Slot> = order[..k].iter().map(|&c| tuple[c]).collect();
            let sub = level.get(&ctx).ok_or_else(|| Error::UnreachableContext(format!("{ctx:?}")))?;
            out.append(&sub.book.encode(&tuple[order[k]]).map_err(|_| {
                Error::UnknownSymbol(format!("attribute {:?} at position {}", tuple[order[k]], k + 1))
            })?);
        }
        Ok(out)
    }

    pub fn encode(&self, entity: usize) -> Result<BitString> {
        let rep = *self
            .coded
            .get(entity)
            .ok_or_else(|| Error::UnknownSymbol(format!("entity {entity}")))?;
        if self.probs[entity] <= 0.0 {
            return Err(Error::UnknownSymbol(format!("entity {entity} has zero probability")));
        }
        self.encode_tuple(&self.tuples[rep])
    }

    /// Decodes position by position, stopping at the first failure.
    pub fn decode_partial(&self, bits: &[bool]) -> PartialDecode {
        let mut slots = Vec::with_capacity(self.books.len());
        let mut consumed = 0;
        for level in &self.books {
            let Some(sub) = level.get(&slots) else {
                return PartialDecode {
                    error: Some(Error::UnreachableContext(format!("{slots:?}"))),
                    slots,
                    consumed,
                };
            };
            match sub.book.decode(&bits[consumed..]) {
                Ok((&s, used)) => {
                    slots.push(s);
                    consumed += used;
                }
                Err(e) => return PartialDecode { slots, consumed, error: Some(e) },
            }
        }
        PartialDecode { slots, consumed, error: None }
    }

    /// Decodes one entity from the front of `bits`.
    pub fn decode(&self, bits: &[bool]) -> Result<(usize, usize)> {
        let partial = self.decode_partial(bits);
        if let Some(e) = partial.error {
            return Err(e);
        }
        let mut tuple = vec![None; partial.slots.len()];
        for (k, &c) in self.perspective.order().iter().enumerate() {
            tuple[c] = partial.slots[k];
        }
        let entity = *self
            .by_tuple
            .get(&tuple)
            .ok_or_else(|| Error::DecodeFailure("decoded tuple is not an entity".into()))?;
        Ok((entity, partial.consumed))
    }

    pub fn decode_frame(&self, frame: &[bool]) -> Result<usize> {
        let (e, used) = self.decode(frame)?;
        if used != frame.len() {
            return Err(Error::DecodeFailure(format!("{} trailing bits in frame", frame.len() - used)));
        }
        Ok(e)
    }

    /// Expected code length per entity.
    pub fn average_length(&self) -> Result<f64> {
        let mut total = 0.0;
        for (e, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                total += p * self.encode(e)?.len() as f64;
            }
        }
        Ok(total)
    }

    /// `Σ_k Σ_ctx p(ctx) L_avg(sub-book)`.
    pub fn context_weighted_length(&self) -> f64 {
        self.sub_books().map(|(_, _, s)| s.context_mass * s.book.average_length()).sum()
    }

    /// `context/attribute<TAB>bits` lines; contexts are attribute labels
    /// along the perspective joined by `/`.
    pub fn dump(&self, space: &SemanticSpace) -> String {
        let order = self.perspective.order();
        let mut out = String::new();
        for (k, ctx, sub) in self.sub_books() {
            let mut path: Vec<&str> =
                ctx.iter().enumerate().map(|(i, &s)| space.categories()[order[i]].label(s)).collect();
            for (i, &s) in sub.book.symbols().iter().enumerate() {
                path.push(space.categories()[order[k]].label(s));
                out.push_str(&format!("{}\t{}\n", path.join("/"), sub.book.codeword(i)));
                path.pop();
            }
        }
        out
    }
}

/// Any of the four codecs, addressed by entity index.
#[derive(Debug, Clone, PartialEq)]
pub enum Codec {
    /// Flat book over the positive-mass entity indices.
    Flat(Codebook<usize>),
    Semantic(SemanticCodebook),
}

impl Codec {
    /// Builds a codec for `space`. `kb` is required by the KB-merged kind.
    pub fn build(
        space: &SemanticSpace,
        kind: CodecKind,
        perspective: &Perspective,
        kb: Option<&KnowledgeBase>,
    ) -> Result<Self> {
        match kind {
            CodecKind::Fano | CodecKind::FanoParity => {
                let (symbols, probs): (Vec<usize>, Vec<f64>) = space
                    .entities()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.prob > 0.0)
                    .map(|(i, e)| (i, e.prob))
                    .unzip();
                let probs = normalize(probs)?;
                Ok(Codec::Flat(if kind == CodecKind::Fano {
                    Codebook::fano(symbols, probs)?
                } else {
                    Codebook::fano_parity(symbols, probs)?
                }))
            }
            CodecKind::SemanticFano => Ok(Codec::Semantic(semantic_build(space, perspective)?)),
            CodecKind::SemanticFanoKb => {
                let kb = kb.ok_or_else(|| {
                    Error::InvalidParameter("semantic-fano-kb needs a knowledge base".into())
                })?;
                Ok(Codec::Semantic(semantic_kb_build(space, perspective, kb)?))
            }
        }
    }

    pub fn kind(&self) -> CodecKind {
        match self {
            Codec::Flat(b) if b.has_parity() => CodecKind::FanoParity,
            Codec::Flat(_) => CodecKind::Fano,
            Codec::Semantic(s) => s.kind(),
        }
    }

    pub fn encode(&self, entity: usize) -> Result<BitString> {
        match self {
            Codec::Flat(b) => b.encode(&entity),
            Codec::Semantic(s) => s.encode(entity),
        }
    }

    pub fn decode_frame(&self, frame: &[bool]) -> Result<usize> {
        match self {
            Codec::Flat(b) => b.decode_frame(frame).copied(),
            Codec::Semantic(s) => s.decode_frame(frame),
        }
    }

    /// Entity the receiver should recover for `entity`.
    pub fn representative(&self, entity: usize) -> usize {
        match self {
            Codec::Flat(_) => entity,
            Codec::Semantic(s) => s.representative(entity),
        }
    }

    pub fn average_length(&self) -> Result<f64> {
        match self {
            Codec::Flat(b) => Ok(b.average_length()),
            Codec::Semantic(s) => s.average_length(),
        }
    }

    pub fn dump(&self, space: &SemanticSpace) -> String {
        match self {
            Codec::Flat(b) => b.dump(|&e| space.entity_label(e)),
            Codec::Semantic(s) => s.dump(space),
        }
    }
}

// Entity masses may carry rounding from file input; renormalize the
// positive ones exactly.
fn normalize(probs: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptySpace);
    }
    Ok(probs.into_iter().map(|p| p / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Substitution;
    use crate::space::Norm;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    const DYADIC: [f64; 4] = [0.5, 0.25, 0.125, 0.125];

    #[test]
    fn dyadic_fano() {
        let b = fano_build(&DYADIC).unwrap();
        let words: Vec<String> = b.codewords().iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["0", "10", "110", "111"]);
        assert_eq!(b.average_length(), 1.75);
        assert_eq!(b.encode(&2).unwrap(), bits("110"));
        assert_eq!(b.kraft_sum(), 1.0);
    }

    #[test]
    fn trivial_books() {
        let single = fano_build(&[1.0]).unwrap();
        assert_eq!(single.codeword(0), bits("0"));
        assert_eq!(single.average_length(), 1.0);
        let two = fano_build(&[0.5, 0.5]).unwrap();
        assert_eq!(two.codewords(), vec![bits("0"), bits("1")]);
    }

    #[test]
    fn ties_keep_input_order_and_short_left() {
        // Uniform over 3: best split puts one symbol on the left.
        let b = fano_build(&[1.0 / 3.0; 3]).unwrap();
        assert_eq!(b.codewords(), vec![bits("0"), bits("10"), bits("11")]);
        // Sorting is by descending probability.
        let b = fano_build(&[0.125, 0.5, 0.125, 0.25]).unwrap();
        assert_eq!(b.codewords(), vec![bits("110"), bits("0"), bits("111"), bits("10")]);
    }

    #[test]
    fn parity_extension() {
        let b = fano_parity_build(&DYADIC).unwrap();
        let words: Vec<String> = b.codewords().iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["00", "101", "1100", "1111"]);
        assert_eq!(b.average_length(), 2.75);
        let single = fano_parity_build(&[1.0]).unwrap();
        assert_eq!(single.codeword(0), bits("00"));
    }

    #[test]
    fn parity_detects_single_flips_only() {
        let b = fano_parity_build(&DYADIC).unwrap();
        assert_eq!(b.decode_frame(bits("1100").bits()).unwrap(), &2);
        assert_eq!(b.decode_frame(bits("1000").bits()), Err(Error::ParityFailure));
        assert_eq!(b.decode_frame(bits("1101").bits()), Err(Error::ParityFailure));
        // Two flips of 1100 give 1111, a valid codeword of another symbol.
        assert_eq!(b.decode_frame(bits("1111").bits()).unwrap(), &3);
    }

    #[test]
    fn flat_decode_failures() {
        let b = fano_build(&DYADIC).unwrap();
        assert!(matches!(b.decode(bits("11").bits()), Err(Error::DecodeFailure(_))));
        assert_eq!(b.decode(bits("1101").bits()).unwrap(), (&2, 3));
        assert!(matches!(b.decode_frame(bits("100").bits()), Err(Error::DecodeFailure(_))));
        assert!(matches!(b.encode(&7), Err(Error::UnknownSymbol(_))));
        assert!(fano_build(&[0.5, 0.4]).is_err());
        assert!(fano_build(&[]).is_err());
    }

    #[test]
    fn bitstring_parsing() {
        assert_eq!(bits("0110").to_string(), "0110");
        assert!("01a".parse::<BitString>().is_err());
        assert_eq!("flat-fano".parse::<CodecKind>().unwrap(), CodecKind::Fano);
        assert!("huffman".parse::<CodecKind>().is_err());
    }

    fn space_2x2(joint: [f64; 4]) -> SemanticSpace {
        let cats = vec![
            ("x".to_string(), vec!["x0".to_string(), "x1".to_string()]),
            ("y".to_string(), vec!["y0".to_string(), "y1".to_string()]),
        ];
        let tuples: Vec<(Vec<Slot>, f64)> =
            (0..4).map(|i| (vec![Some(i / 2), Some(i % 2)], joint[i])).collect();
        SemanticSpace::from_tuples(&cats, &tuples, Norm::L2).unwrap()
    }

    #[test]
    fn semantic_two_by_two() {
        let s = space_2x2([0.4, 0.1, 0.2, 0.3]);
        let book = semantic_build(&s, &Perspective::identity(2)).unwrap();
        // Marginal (0.5, 0.5), conditionals (0.8, 0.2) and (0.4, 0.6): one bit each.
        let first = &book.position_books(0)[&vec![]];
        assert_eq!(first.book.codewords(), vec![bits("0"), bits("1")]);
        let given_x1 = &book.position_books(1)[&vec![Some(1)]];
        assert_eq!(given_x1.book.codewords(), vec![bits("1"), bits("0")]);
        assert_eq!(book.encode(2).unwrap(), bits("11"));
        assert_eq!(book.encode(3).unwrap(), bits("10"));
        assert!((book.average_length().unwrap() - 2.0).abs() < 1e-12);
        assert!((book.context_weighted_length() - 2.0).abs() < 1e-12);
        for e in 0..4 {
            let w = book.encode(e).unwrap();
            assert_eq!(book.decode_frame(w.bits()).unwrap(), e);
        }
    }

    #[test]
    fn deterministic_context_costs_nothing() {
        // y is a function of x.
        let s = space_2x2([0.6, 0.0, 0.0, 0.4]);
        let book = semantic_build(&s, &Perspective::identity(2)).unwrap();
        assert!(book.position_books(1).values().all(SubBook::is_deterministic));
        assert_eq!(book.encode(0).unwrap(), bits("0"));
        assert_eq!(book.encode(3).unwrap(), bits("1"));
        assert!(matches!(book.encode(1), Err(Error::UnknownSymbol(_))));
        assert_eq!(book.decode_frame(bits("1").bits()).unwrap(), 3);
    }

    #[test]
    fn one_dimensional_semantic_matches_flat() {
        let cats = vec![("c".to_string(), (0..4).map(|i| format!("a{i}")).collect::<Vec<_>>())];
        let tuples: Vec<(Vec<Slot>, f64)> =
            DYADIC.iter().enumerate().map(|(i, &p)| (vec![Some(i)], p)).collect();
        let s = SemanticSpace::from_tuples(&cats, &tuples, Norm::L2).unwrap();
        let sem = semantic_build(&s, &Perspective::identity(1)).unwrap();
        let flat = fano_build(&DYADIC).unwrap();
        for e in 0..4 {
            assert_eq!(sem.encode(e).unwrap(), flat.codeword(e));
        }
    }

    #[test]
    fn merging_eight_into_four() {
        let cats = vec![
            ("x".to_string(), (0..4).map(|i| format!("x{i}")).collect::<Vec<_>>()),
            ("y".to_string(), vec!["u".to_string(), "v".to_string()]),
        ];
        let tuples: Vec<(Vec<Slot>, f64)> =
            (0..8).map(|i| (vec![Some(i / 2), Some(i % 2)], 0.125)).collect();
        let s = SemanticSpace::from_tuples(&cats, &tuples, Norm::L2).unwrap();
        let mut subs = Vec::new();
        for g in 0..4 {
            let (a, b) = (s.entity_label(2 * g), s.entity_label(2 * g + 1));
            subs.push(Substitution::certain(a.clone(), b.clone()));
            subs.push(Substitution::certain(b, a));
        }
        let kb = KnowledgeBase::substitutions_only(subs).unwrap();
        let plain = semantic_build(&s, &Perspective::identity(2)).unwrap();
        let merged = semantic_kb_build(&s, &Perspective::identity(2), &kb).unwrap();
        assert_eq!(plain.average_length().unwrap(), 3.0);
        assert_eq!(merged.average_length().unwrap(), 2.0);
        for e in 0..8 {
            let w = merged.encode(e).unwrap();
            assert_eq!(merged.decode_frame(w.bits()).unwrap(), merged.representative(e));
            assert_eq!(merged.representative(e), e - e % 2);
        }
    }

    #[test]
    fn kb_without_synonyms_changes_nothing() {
        let s = space_2x2([0.4, 0.1, 0.2, 0.3]);
        let kb = KnowledgeBase::substitutions_only(vec![]).unwrap();
        let a = semantic_build(&s, &Perspective::identity(2)).unwrap();
        let b = semantic_kb_build(&s, &Perspective::identity(2), &kb).unwrap();
        for e in 0..4 {
            assert_eq!(a.encode(e).unwrap(), b.encode(e).unwrap());
        }
    }

    #[test]
    fn semantic_partial_decode() {
        let s = space_2x2([0.4, 0.1, 0.2, 0.3]);
        let book = semantic_build(&s, &Perspective::identity(2)).unwrap();
        let p = book.decode_partial(bits("1").bits());
        assert_eq!(p.slots, vec![Some(1)]);
        assert!(matches!(p.error, Some(Error::DecodeFailure(_))));
    }

    #[test]
    fn dumps() {
        let s = space_2x2([0.4, 0.1, 0.2, 0.3]);
        let book = semantic_build(&s, &Perspective::identity(2)).unwrap();
        assert_eq!(book.dump(&s), "x0\t0\nx1\t1\nx0/y0\t0\nx0/y1\t1\nx1/y0\t1\nx1/y1\t0\n");
        let flat = Codec::build(&s, CodecKind::Fano, &Perspective::identity(2), None).unwrap();
        assert_eq!(flat.dump(&s), "x0/y0\t0\nx0/y1\t111\nx1/y0\t110\nx1/y1\t10\n");
    }
}
