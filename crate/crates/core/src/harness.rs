//! Seeded, config-driven sweeps that regenerate the evaluation figures as
//! CSV datasets.
//!
//! Every dataset starts with `#` comment lines carrying the fully resolved
//! configuration as JSON, followed by a header row and one row per grid
//! point. Grid points run on the rayon pool; each point draws from its own
//! RNG stream derived from the base seed and the point index, so output does
//! not depend on scheduling.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{point_seed, run_link_trial, ChannelModel, TrialReport, DEFAULT_SEED};
use crate::coding::{Codec, CodecKind};
use crate::entropy::{classical_entropy, message_entropy_classical};
use crate::error::{Error, Result};
use crate::kb::{kb_gain, kb_mutual_information, space_synonyms, KnowledgeBase};
use crate::sources::{
    dyadic_space, random_space, synth_kb, synth_synonym_kb, zipf_dependency, zipf_probs, SpaceSpec,
    VarianceMode, MAX_TUPLES,
};
use crate::space::{Perspective, SemanticSpace};

/// Largest joint table allowed for the KB-gain sweep.
pub const MAX_ENSEMBLE: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    #[default]
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::Fig5,
        ExperimentId::Fig6,
        ExperimentId::Fig7,
        ExperimentId::Fig8,
        ExperimentId::Fig9,
        ExperimentId::Fig10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Fig6 => "fig6",
            ExperimentId::Fig7 => "fig7",
            ExperimentId::Fig8 => "fig8",
            ExperimentId::Fig9 => "fig9",
            ExperimentId::Fig10 => "fig10",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("experiment: unknown id `{s}`")))
    }
}

/// Source used by the SNR sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ChannelSource {
    #[default]
    Dyadic,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SnrGrid {
    fn default() -> Self {
        SnrGrid { start: -5.0, stop: 15.0, step: 2.5 }
    }
}

impl SnrGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Config("snr_db: bounds must be finite".into()));
        }
        if !(self.step > 0.0) {
            return Err(Error::Config(format!("snr_db.step: must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(Error::Config("snr_db: stop is below start".into()));
        }
        if (self.stop - self.start) / self.step > 10_000.0 {
            return Err(Error::Config("snr_db: more than 10000 points".into()));
        }
        Ok(())
    }
}

/// Resolved experiment configuration. Fields irrelevant to the chosen
/// experiment are carried along unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    /// Messages per SNR point.
    pub messages: u64,
    /// Random spaces drawn per attribute count.
    pub seeds_per_point: u64,
    /// Number of categories of random spaces.
    pub dimensions: usize,
    /// Attributes per category, the x-axis of the coding sweeps.
    pub attrs: Vec<usize>,
    pub variance: VarianceMode,
    pub snr_db: SnrGrid,
    pub source: ChannelSource,
    /// Attributes per category when `source` is `random`.
    pub source_attrs: usize,
    /// Share of entities placed in synonym groups.
    pub synonym_fraction: f64,
    pub zipf_n: usize,
    pub zipf_exponents: Vec<f64>,
    pub k_values: Vec<usize>,
    pub out: Option<String>,
}

impl ExperimentConfig {
    /// Defaults for `id`.
    pub fn defaults(id: ExperimentId) -> Self {
        ExperimentConfig {
            experiment: id,
            seed: DEFAULT_SEED,
            messages: 100_000,
            seeds_per_point: 3,
            dimensions: 2,
            attrs: (2..=32).collect(),
            variance: VarianceMode::High,
            snr_db: SnrGrid::default(),
            source: ChannelSource::Dyadic,
            source_attrs: 4,
            synonym_fraction: 0.75,
            zipf_n: 64,
            zipf_exponents: vec![1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
            k_values: vec![2, 3, 4],
            out: None,
        }
    }

    /// Defaults for `id` overlaid with the keys of a JSON object. A
    /// `experiment` key in the object must agree with `id` when both are given.
    pub fn from_json(id: Option<ExperimentId>, text: &str) -> Result<Self> {
        let overlay: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        let Value::Object(map) = overlay else {
            return Err(Error::Config("config file: expected a JSON object".into()));
        };
        let from_file = match map.get("experiment") {
            Some(v) => Some(
                v.as_str()
                    .ok_or_else(|| Error::Config("experiment: expected a string".into()))?
                    .parse::<ExperimentId>()?,
            ),
            None => None,
        };
        let id = match (id, from_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("experiment: file says `{b}`, command says `{a}`")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("experiment: no experiment id given".into())),
        };
        let mut merged = serde_json::to_value(ExperimentConfig::defaults(id)).expect("config serializes");
        let obj = merged.as_object_mut().expect("config is an object");
        for (k, v) in map {
            obj.insert(k, v);
        }
        let config: ExperimentConfig =
            serde_json::from_value(merged).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(id: Option<ExperimentId>, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
        ExperimentConfig::from_json(id, &text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        if self.messages == 0 {
            return bad("messages", "must be at least 1".into());
        }
        if self.seeds_per_point == 0 {
            return bad("seeds_per_point", "must be at least 1".into());
        }
        if self.dimensions == 0 {
            return bad("dimensions", "must be at least 1".into());
        }
        if self.attrs.is_empty() {
            return bad("attrs", "grid is empty".into());
        }
        for &n in &self.attrs {
            if n == 0 {
                return bad("attrs", "counts must be at least 1".into());
            }
            if (n as f64).powi(self.dimensions as i32) > MAX_TUPLES as f64 {
                return bad("attrs", format!("{n}^{} tuples exceed {MAX_TUPLES}", self.dimensions));
            }
        }
        if self.source_attrs == 0 {
            return bad("source_attrs", "must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.synonym_fraction) {
            return bad("synonym_fraction", format!("must lie in [0, 1], got {}", self.synonym_fraction));
        }
        self.snr_db.validate()?;
        if self.zipf_n == 0 {
            return bad("zipf_n", "must be at least 1".into());
        }
        if self.zipf_exponents.is_empty() {
            return bad("zipf_exponents", "grid is empty".into());
        }
        if let Some(a) = self.zipf_exponents.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
            return bad("zipf_exponents", format!("exponent {a} is not a non-negative number"));
        }
        if self.k_values.is_empty() {
            return bad("k_values", "grid is empty".into());
        }
        for &k in &self.k_values {
            if k == 0 {
                return bad("k_values", "message length must be at least 1".into());
            }
            if (self.zipf_n as f64).powi(k as i32) > MAX_ENSEMBLE as f64 {
                return bad("k_values", format!("{}^{k} joint cells exceed {MAX_ENSEMBLE}", self.zipf_n));
            }
        }
        Ok(())
    }
}

/// A table of formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Dataset {
    fn new(columns: &[&str]) -> Self {
        Dataset { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; non-numeric cells become NaN.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else { return Vec::new() };
        self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
    }

    /// CSV text with the configuration as a comment header.
    pub fn to_csv(&self, config: &ExperimentConfig) -> String {
        self.to_csv_with(&[
            format!("experiment: {}", config.experiment),
            format!("config: {}", config.to_json()),
        ])
    }

    /// CSV text preceded by `# `-prefixed comment lines.
    pub fn to_csv_with(&self, comments: &[String]) -> String {
        let mut out: String = comments.iter().map(|c| format!("# {c}\n")).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 cells"));
        out
    }
}

fn cell(x: f64) -> String {
    format!("{x}")
}

/// One row of an SNR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub seed: u64,
    pub reports: Vec<(CodecKind, TrialReport)>,
}

/// Runs every codec at every SNR point. Codecs at the same point share the
/// point's seed, so equal-length codes see identical noise.
pub fn channel_sweep(
    space: &SemanticSpace,
    codecs: &[Codec],
    grid: &SnrGrid,
    messages: u64,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    grid.validate()?;
    grid.points()
        .into_par_iter()
        .enumerate()
        .map(|(i, snr)| {
            let channel = ChannelModel::from_snr_db(snr)?;
            let s = point_seed(seed, i as u64);
            let reports = codecs
                .iter()
                .map(|c| Ok((c.kind(), run_link_trial(space, c, &channel, messages, s)?)))
                .collect::<Result<_>>()?;
            Ok(SweepPoint { snr_db: snr, seed: s, reports })
        })
        .collect()
}

/// One row per codec and SNR point with every report field.
pub fn sweep_dataset(points: &[SweepPoint]) -> Dataset {
    let mut d = Dataset::new(&[
        "codec",
        "snr_db",
        "flip_prob",
        "seed",
        "messages",
        "suts_sent",
        "suts_correct",
        "bits_sent",
        "symbol_errors",
        "symbols_detected_error",
        "ser",
        "undetected_ser",
        "symbol_error_rate",
        "semantic_efficiency",
        "coding_efficiency",
    ]);
    let mut rows: Vec<(CodecKind, usize, Vec<String>)> = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        let flip = ChannelModel::from_snr_db(pt.snr_db).map_or(f64::NAN, |c| c.flip_prob());
        for (kind, r) in &pt.reports {
            rows.push((
                *kind,
                i,
                vec![
                    kind.to_string(),
                    cell(pt.snr_db),
                    cell(flip),
                    pt.seed.to_string(),
                    r.messages.to_string(),
                    r.suts_sent.to_string(),
                    r.suts_correct.to_string(),
                    r.bits_sent.to_string(),
                    r.symbol_errors.to_string(),
                    r.symbols_detected_error.to_string(),
                    cell(r.ser),
                    cell(r.undetected_ser),
                    cell(r.symbol_error_rate),
                    cell(r.semantic_efficiency),
                    cell(r.coding_efficiency),
                ],
            ));
        }
    }
    rows.sort_by_key(|(kind, i, _)| (*kind, *i));
    d.rows = rows.into_iter().map(|(_, _, r)| r).collect();
    d
}

/// Runs the configured experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Dataset> {
    config.validate()?;
    match config.experiment {
        ExperimentId::Fig5 => coding_efficiency(config),
        ExperimentId::Fig6 | ExperimentId::Fig7 => snr_sweep(config),
        ExperimentId::Fig8 => kb_lengths(config),
        ExperimentId::Fig9 => variance_lengths(config),
        ExperimentId::Fig10 => kb_gain_sweep(config),
    }
}

/// Runs the experiment and writes its CSV to `path`.
pub fn write_experiment(config: &ExperimentConfig, path: &Path) -> Result<Dataset> {
    let data = run_experiment(config)?;
    std::fs::write(path, data.to_csv(config))
        .map_err(|e| Error::Config(format!("out: cannot write {}: {e}", path.display())))?;
    Ok(data)
}

/// `(attrs, seed index)` grid points with their derived seeds, in row order.
fn space_points(config: &ExperimentConfig) -> Vec<(usize, u64)> {
    let mut points = Vec::new();
    for &n in &config.attrs {
        for _ in 0..config.seeds_per_point {
            let seed = point_seed(config.seed, points.len() as u64);
            points.push((n, seed));
        }
    }
    points
}

fn avg_len(space: &SemanticSpace, kind: CodecKind, kb: Option<&KnowledgeBase>) -> Result<f64> {
    Codec::build(space, kind, &Perspective::identity(space.dimension()), kb)?.average_length()
}

fn coding_efficiency(config: &ExperimentConfig) -> Result<Dataset> {
    let rows = space_points(config)
        .into_par_iter()
        .map(|(n, seed)| {
            let space = random_space(&SpaceSpec::square(config.dimensions, n, config.variance, seed))?;
            let h = classical_entropy(&space.entity_probs())?;
            let lens = [CodecKind::Fano, CodecKind::SemanticFano, CodecKind::FanoParity]
                .map(|k| avg_len(&space, k, None));
            let mut row = vec![n.to_string(), seed.to_string(), space.entities().len().to_string(), cell(h)];
            for l in lens {
                row.push(cell(h / l?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = Dataset::new(&["attrs", "seed", "entities", "entropy", "traditional", "semantic", "parity"]);
    d.rows = rows;
    Ok(d)
}

/// The space used by the SNR sweeps.
pub fn channel_space(config: &ExperimentConfig) -> Result<SemanticSpace> {
    match config.source {
        ChannelSource::Dyadic => Ok(dyadic_space()),
        ChannelSource::Random => random_space(&SpaceSpec::square(
            config.dimensions,
            config.source_attrs,
            config.variance,
            config.seed,
        )),
    }
}

fn snr_sweep(config: &ExperimentConfig) -> Result<Dataset> {
    let space = channel_space(config)?;
    let p = Perspective::identity(space.dimension());
    let kinds = [CodecKind::Fano, CodecKind::FanoParity, CodecKind::SemanticFano];
    let codecs = kinds.iter().map(|&k| Codec::build(&space, k, &p, None)).collect::<Result<Vec<_>>>()?;
    let points = channel_sweep(&space, &codecs, &config.snr_db, config.messages, config.seed)?;
    let mut d = if config.experiment == ExperimentId::Fig6 {
        Dataset::new(&["snr_db", "flip_prob", "seed", "n", "traditional", "parity", "semantic", "parity_undetected"])
    } else {
        Dataset::new(&["snr_db", "flip_prob", "seed", "n", "traditional", "parity", "semantic"])
    };
    for pt in points {
        let mut row = vec![
            cell(pt.snr_db),
            cell(ChannelModel::from_snr_db(pt.snr_db)?.flip_prob()),
            pt.seed.to_string(),
            config.messages.to_string(),
        ];
        for (_, r) in &pt.reports {
            row.push(cell(if config.experiment == ExperimentId::Fig6 { r.ser } else { r.semantic_efficiency }));
        }
        if config.experiment == ExperimentId::Fig6 {
            row.push(cell(pt.reports[1].1.undetected_ser));
        }
        d.rows.push(row);
    }
    Ok(d)
}

fn kb_lengths(config: &ExperimentConfig) -> Result<Dataset> {
    let rows = space_points(config)
        .into_par_iter()
        .map(|(n, seed)| {
            let space = random_space(&SpaceSpec::square(config.dimensions, n, config.variance, seed))?;
            let kb = synth_synonym_kb(&space, config.synonym_fraction, seed)?;
            let grouped: usize =
                space_synonyms(&kb, &space)?.groups().iter().filter(|g| g.len() > 1).map(Vec::len).sum();
            Ok(vec![
                n.to_string(),
                seed.to_string(),
                space.entities().len().to_string(),
                grouped.to_string(),
                cell(avg_len(&space, CodecKind::Fano, None)?),
                cell(avg_len(&space, CodecKind::SemanticFano, None)?),
                cell(avg_len(&space, CodecKind::SemanticFanoKb, Some(&kb))?),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = Dataset::new(&["attrs", "seed", "entities", "grouped", "traditional", "semantic", "semantic_kb"]);
    d.rows = rows;
    Ok(d)
}

fn variance_lengths(config: &ExperimentConfig) -> Result<Dataset> {
    let rows = space_points(config)
        .into_par_iter()
        .map(|(n, seed)| {
            let mut row = vec![n.to_string(), seed.to_string()];
            for mode in [VarianceMode::Low, VarianceMode::High] {
                let space = random_space(&SpaceSpec::square(config.dimensions, n, mode, seed))?;
                row.push(cell(avg_len(&space, CodecKind::Fano, None)?));
                row.push(cell(avg_len(&space, CodecKind::SemanticFano, None)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = Dataset::new(&[
        "attrs",
        "seed",
        "traditional_low",
        "semantic_low",
        "traditional_high",
        "semantic_high",
    ]);
    d.rows = rows;
    Ok(d)
}

fn kb_gain_sweep(config: &ExperimentConfig) -> Result<Dataset> {
    let rho = zipf_dependency(config.zipf_n, &config.zipf_exponents)?;
    let names: Vec<String> = (1..=config.zipf_n).map(|i| format!("e{i}")).collect();
    let rows = config
        .zipf_exponents
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let seed = point_seed(config.seed, i as u64);
            let q = zipf_probs(config.zipf_n, a)?;
            let mut row = vec![cell(a), cell(rho[i]), config.zipf_n.to_string(), seed.to_string()];
            for &k in &config.k_values {
                let (ens, kb) = synth_kb(vec![names.clone(); k], &vec![q.clone(); k], rho[i], seed)?;
                let hc = message_entropy_classical(&ens)?;
                row.push(cell(kb_gain(hc, kb_mutual_information(&ens, &kb)?)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["a".to_string(), "rho".into(), "n".into(), "seed".into()];
    columns.extend(config.k_values.iter().map(|k| format!("s_kb_k{k}")));
    Ok(Dataset { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_grid_points() {
        let g = SnrGrid::default().points();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], -5.0);
        assert_eq!(g[8], 15.0);
        assert!(SnrGrid { start: 0.0, stop: 1.0, step: 0.0 }.validate().is_err());
    }

    #[test]
    fn config_overlay_and_errors() {
        let c = ExperimentConfig::from_json(Some(ExperimentId::Fig6), r#"{"messages": 10}"#).unwrap();
        assert_eq!(c.messages, 10);
        assert_eq!(c.seed, DEFAULT_SEED);
        let c = ExperimentConfig::from_json(None, r#"{"experiment": "fig10", "k_values": [2]}"#).unwrap();
        assert_eq!(c.experiment, ExperimentId::Fig10);
        let err = |text: &str| ExperimentConfig::from_json(Some(ExperimentId::Fig5), text).unwrap_err();
        assert!(matches!(err(r#"{"attrs": []}"#), Error::Config(m) if m.starts_with("attrs")));
        assert!(matches!(err(r#"{"messages": 0}"#), Error::Config(m) if m.starts_with("messages")));
        assert!(matches!(err(r#"{"bogus": 1}"#), Error::Config(m) if m.contains("bogus")));
        assert!(matches!(err(r#"{"experiment": "fig6"}"#), Error::Config(_)));
        assert!(matches!(err("[1]"), Error::Config(_)));
        assert!("fig11".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn csv_header_embeds_config() {
        let mut c = ExperimentConfig::defaults(ExperimentId::Fig10);
        c.k_values = vec![2];
        c.zipf_exponents = vec![1.5, 4.0];
        let d = run_experiment(&c).unwrap();
        let text = d.to_csv(&c);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# experiment: fig10"));
        let json = lines.next().unwrap().strip_prefix("# config: ").unwrap();
        assert_eq!(ExperimentConfig::from_json(None, json).unwrap(), c);
        assert_eq!(lines.next(), Some("a,rho,n,seed,s_kb_k2"));
        assert_eq!(d.rows.len(), 2);
    }
}
