use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semcom_core::channel::DEFAULT_SEED;
use semcom_core::coding::{fano_build, fano_parity_build, Codec, CodecKind};
use semcom_core::entropy::{
    categorizing_entropy, classical_entropy, message_entropy_classical, message_entropy_semantic,
};
use semcom_core::format::{ensemble_to_json, kb_to_json, load_ensemble, load_kb, load_space, space_to_json};
use semcom_core::harness::{channel_sweep, sweep_dataset, ExperimentConfig, ExperimentId, SnrGrid};
use semcom_core::kb::{
    combine_synonyms, kb_gain, kb_mutual_information, scale_axis, scale_category, semantic_capacity,
    space_synonyms, synonym_conflicts, BallCenter, ScaledCategory, SynonymPartition,
};
use semcom_core::sources::{
    dyadic_space, random_space, synth_kb, synth_synonym_kb, zipf_probs, SpaceSpec, VarianceMode,
};
use semcom_core::space::{Perspective, SemanticSpace};
use semcom_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_LIBRARY: u8 = 3;

/// Semantic-space entropy, knowledge-base gain, Fano coding and channel
/// experiments.
#[derive(Parser, Debug)]
#[command(name = "semcom", version)]
struct Cli {
    /// Base seed for anything random.
    #[arg(long, global = true, env = "SEMCOM_SEED")]
    seed: Option<u64>,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Messages per Monte-Carlo point.
    #[arg(long, global = true)]
    messages: Option<u64>,
    /// JSON configuration file (experiments).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    #[command(flatten)]
    Calc(Calc),
    /// Same calculators under one namespace.
    #[command(name = "calc", subcommand)]
    CalcAlias(Calc),
    /// Generate synthetic sources and knowledge bases.
    #[command(subcommand)]
    Sources(Sources),
    /// Run one of the figure sweeps and write its CSV.
    Experiment {
        /// fig5 .. fig10
        id: String,
    },
}

#[derive(Subcommand, Debug)]
enum Calc {
    /// Shannon entropy of a distribution, a space, or a message ensemble.
    Entropy(EntropyArgs),
    /// Chain-rule entropy of a space along a perspective.
    CategorizingEntropy {
        #[arg(long)]
        space: PathBuf,
        /// Category order as comma-separated indices; identity by default.
        #[arg(long)]
        perspective: Option<String>,
        /// Print the value for every perspective.
        #[arg(long)]
        all: bool,
    },
    /// Merge synonym classes and report the entropy change.
    Combine(CombineArgs),
    /// Scale a category's attributes into ε-balls.
    Scale(ScaleArgs),
    /// KB gain S_KB = H_c / (H_c - I_KB).
    KbGain(KbGainArgs),
    /// Semantic channel capacity in suts per second.
    Capacity(CapacityArgs),
    /// Build a codebook and dump it as `symbol<TAB>bits`.
    Code(CodeArgs),
    /// Sweep SNR for one or more codecs and emit per-point reports as CSV.
    ChannelSim(ChannelSimArgs),
}

#[derive(Args, Debug)]
struct EntropyArgs {
    /// Probabilities.
    #[arg(allow_negative_numbers = true)]
    probs: Vec<f64>,
    /// Entity entropy of a space file.
    #[arg(long, conflicts_with_all = ["probs", "ensemble"])]
    space: Option<PathBuf>,
    /// Classical message entropy of an ensemble file.
    #[arg(long, conflicts_with = "probs")]
    ensemble: Option<PathBuf>,
    /// With --ensemble: semantic message entropy under this KB.
    #[arg(long, requires = "ensemble")]
    kb: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CombineArgs {
    /// Probabilities, with --groups.
    #[arg(allow_negative_numbers = true)]
    probs: Vec<f64>,
    /// Partition such as `0,1,2;3`.
    #[arg(long, requires = "probs")]
    groups: Option<String>,
    /// Space whose entities are merged using --kb.
    #[arg(long, requires = "kb", conflicts_with_all = ["probs", "groups"])]
    space: Option<PathBuf>,
    #[arg(long)]
    kb: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScaleArgs {
    /// Attribute coordinates, comma separated.
    #[arg(long, allow_hyphen_values = true, requires = "probs")]
    coords: Option<String>,
    /// Attribute probabilities, comma separated.
    #[arg(long)]
    probs: Option<String>,
    #[arg(long, requires = "category", conflicts_with_all = ["coords", "probs"])]
    space: Option<PathBuf>,
    #[arg(long)]
    category: Option<String>,
    /// Ball `label:center:epsilon`; repeat for each ball.
    #[arg(long = "center", required = true, allow_hyphen_values = true)]
    centers: Vec<String>,
}

#[derive(Args, Debug)]
struct KbGainArgs {
    #[arg(long, requires = "ikb")]
    hc: Option<f64>,
    #[arg(long)]
    ikb: Option<f64>,
    #[arg(long, requires = "kb", conflicts_with_all = ["hc", "ikb"])]
    ensemble: Option<PathBuf>,
    #[arg(long)]
    kb: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CapacityArgs {
    #[arg(long)]
    skb: f64,
    #[arg(long)]
    hc: f64,
    /// Number of categories.
    #[arg(long)]
    m: usize,
    /// Bandwidth in Hz.
    #[arg(long)]
    bw: f64,
    #[arg(long, conflicts_with = "snr_db", required_unless_present = "snr_db")]
    snr_linear: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// flat-fano, fano-parity, semantic-fano or semantic-fano-kb.
    #[arg(long, default_value = "flat-fano")]
    kind: String,
    /// Probabilities for a flat book.
    probs: Vec<f64>,
    #[arg(long, conflicts_with = "probs")]
    space: Option<PathBuf>,
    #[arg(long)]
    perspective: Option<String>,
    #[arg(long)]
    kb: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ChannelSimArgs {
    /// Space file; the built-in dyadic space by default.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Comma-separated codec kinds.
    #[arg(long, default_value = "flat-fano,fano-parity,semantic-fano")]
    kinds: String,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    snr_start: f64,
    #[arg(long, default_value_t = 15.0, allow_hyphen_values = true)]
    snr_stop: f64,
    #[arg(long, default_value_t = 2.5)]
    snr_step: f64,
    #[arg(long)]
    perspective: Option<String>,
    #[arg(long)]
    kb: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Sources {
    /// Zipf probability vector.
    Zipf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: f64,
    },
    /// Random space over all attribute tuples, as a space document.
    Space {
        /// Attribute counts per category, comma separated.
        #[arg(long)]
        attrs: String,
        #[arg(long, default_value = "low")]
        variance: String,
    },
    /// The built-in dyadic two-category space.
    Dyadic,
    /// Sequence KB with Zipf marginals and dependency rho.
    Kb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        rho: f64,
        /// Also write the induced ensemble to this file.
        #[arg(long)]
        ensemble_out: Option<PathBuf>,
    },
    /// Substitution KB grouping a share of a space's entities.
    Synonyms {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 0.75)]
        fraction: f64,
    },
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config(_)) { EXIT_CONFIG } else { EXIT_LIBRARY };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(EXIT_CONFIG)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Calc(c) | Command::CalcAlias(c) => calc(cli, c),
        Command::Sources(s) => sources(cli, s),
        Command::Experiment { id } => experiment(cli, id),
    }
}

fn line(x: f64) -> String {
    format!("{x}\n")
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| usage(format!("{what}: cannot parse `{s}`"))))
        .collect()
}

fn perspective_for(space: &SemanticSpace, text: Option<&str>) -> Result<Perspective, Failure> {
    match text {
        None => Ok(Perspective::identity(space.dimension())),
        Some(t) => Ok(Perspective::new(parse_list(t, "perspective")?)?),
    }
}

fn calc(cli: &Cli, c: &Calc) -> Outcome {
    match c {
        Calc::Entropy(a) => {
            if let Some(path) = &a.space {
                let s = load_space(path)?;
                return Ok(line(classical_entropy(&s.entity_probs())?));
            }
            if let Some(path) = &a.ensemble {
                let ens = load_ensemble(path)?;
                return Ok(match &a.kb {
                    Some(kb) => line(message_entropy_semantic(&ens, &load_kb(kb)?)?),
                    None => line(message_entropy_classical(&ens)?),
                });
            }
            Ok(line(classical_entropy(&a.probs)?))
        }
        Calc::CategorizingEntropy { space, perspective, all } => {
            let s = load_space(space)?;
            if *all {
                let mut out = String::new();
                for p in Perspective::all(s.dimension()) {
                    out.push_str(&format!("{p}\t{}\n", categorizing_entropy(&s, &p)?));
                }
                return Ok(out);
            }
            let p = perspective_for(&s, perspective.as_deref())?;
            Ok(line(categorizing_entropy(&s, &p)?))
        }
        Calc::Combine(a) => combine(a),
        Calc::Scale(a) => scale(a),
        Calc::KbGain(a) => {
            let (hc, ikb) = match (&a.ensemble, &a.kb, a.hc, a.ikb) {
                (Some(e), Some(k), _, _) => {
                    let ens = load_ensemble(e)?;
                    (message_entropy_classical(&ens)?, kb_mutual_information(&ens, &load_kb(k)?)?)
                }
                (_, _, Some(hc), Some(ikb)) => (hc, ikb),
                _ => return Err(usage("kb-gain needs --hc and --ikb, or --ensemble and --kb")),
            };
            Ok(line(kb_gain(hc, ikb)?))
        }
        Calc::Capacity(a) => {
            let gamma = match (a.snr_linear, a.snr_db) {
                (Some(g), _) => g,
                (None, Some(db)) => 10f64.powf(db / 10.0),
                (None, None) => return Err(usage("capacity needs --snr-linear or --snr-db")),
            };
            Ok(line(semantic_capacity(a.skb, a.hc, a.m, a.bw, gamma)?))
        }
        Calc::Code(a) => code(a),
        Calc::ChannelSim(a) => channel_sim(cli, a),
    }
}

fn combine(a: &CombineArgs) -> Outcome {
    let (probs, partition, conflicts) = match (&a.space, &a.kb, &a.groups) {
        (Some(space), Some(kb), _) => {
            let s = load_space(space)?;
            let p = space_synonyms(&load_kb(kb)?, &s)?;
            let conflicts = synonym_conflicts(&s, &p)
                .into_iter()
                .map(|(g, c)| {
                    let members: Vec<String> = p.groups()[g].iter().map(|&e| s.entity_label(e)).collect();
                    format!(
                        "warning: group [{}] mixes attributes of category `{}`",
                        members.join(", "),
                        s.categories()[c].name()
                    )
                })
                .collect();
            (s.entity_probs(), p, conflicts)
        }
        (None, _, Some(groups)) => {
            let groups = groups
                .split(';')
                .map(|g| parse_list::<usize>(g, "groups"))
                .collect::<Result<Vec<_>, _>>()?;
            let p = SynonymPartition::new(groups, a.probs.len())?;
            (a.probs.clone(), p, Vec::new())
        }
        (None, _, None) => (a.probs.clone(), SynonymPartition::singletons(a.probs.len()), Vec::new()),
        (Some(_), None, _) => return Err(usage("combine --space needs --kb")),
    };
    for w in conflicts {
        eprintln!("{w}");
    }
    let c = combine_synonyms(&probs, &partition)?;
    let merged: Vec<String> = c.probs.iter().map(|p| p.to_string()).collect();
    Ok(format!(
        "probs\t{}\nentropy_before\t{}\nentropy_after\t{}\n",
        merged.join(","),
        c.entropy_before,
        c.entropy_after
    ))
}

fn parse_center(text: &str) -> Result<BallCenter, Failure> {
    let parts: Vec<&str> = text.rsplitn(3, ':').collect();
    let [eps, coord, label] = parts[..] else {
        return Err(usage(format!("center: expected label:coord:epsilon, got `{text}`")));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("center: cannot parse `{s}`")));
    Ok(BallCenter::new(label, num(coord)?, num(eps)?))
}

fn scale(a: &ScaleArgs) -> Outcome {
    let centers = a.centers.iter().map(|c| parse_center(c)).collect::<Result<Vec<_>, _>>()?;
    let scaled: ScaledCategory = match (&a.space, &a.category, &a.coords, &a.probs) {
        (Some(space), Some(cat), _, _) => {
            let s = load_space(space)?;
            scale_category(&s, s.category_index(cat)?, &centers)?
        }
        (None, _, Some(coords), Some(probs)) => {
            let coords: Vec<f64> = parse_list(coords, "coords")?;
            let probs: Vec<f64> = parse_list(probs, "probs")?;
            let labels: Vec<String> = (1..=coords.len()).map(|i| format!("x{i}")).collect();
            scale_axis("input", &labels, &coords, &probs, &centers)?
        }
        _ => return Err(usage("scale needs --coords and --probs, or --space and --category")),
    };
    let mut out = String::from("attribute\tprob\tambiguity\n");
    for attr in &scaled.attributes {
        out.push_str(&format!("{}\t{}\t{}\n", attr.label, attr.prob, attr.ambiguity));
    }
    out.push_str(&format!(
        "entropy_before\t{}\nentropy_after\t{}\n",
        scaled.entropy_before, scaled.entropy_after
    ));
    Ok(out)
}

fn code(a: &CodeArgs) -> Outcome {
    let kind: CodecKind = a.kind.parse()?;
    match &a.space {
        Some(path) => {
            let s = load_space(path)?;
            let p = perspective_for(&s, a.perspective.as_deref())?;
            let kb = a.kb.as_deref().map(load_kb).transpose()?;
            Ok(Codec::build(&s, kind, &p, kb.as_ref())?.dump(&s))
        }
        None => {
            let book = match kind {
                CodecKind::Fano => fano_build(&a.probs)?,
                CodecKind::FanoParity => fano_parity_build(&a.probs)?,
                _ => return Err(usage("semantic codecs need --space")),
            };
            Ok(book.dump(|i| i.to_string()))
        }
    }
}

fn channel_sim(cli: &Cli, a: &ChannelSimArgs) -> Outcome {
    let space = match &a.space {
        Some(p) => load_space(p)?,
        None => dyadic_space(),
    };
    let p = perspective_for(&space, a.perspective.as_deref())?;
    let kb = a.kb.as_deref().map(load_kb).transpose()?;
    let codecs = a
        .kinds
        .split(',')
        .map(|k| Ok(Codec::build(&space, k.trim().parse()?, &p, kb.as_ref())?))
        .collect::<Result<Vec<_>, Failure>>()?;
    let grid = SnrGrid { start: a.snr_start, stop: a.snr_stop, step: a.snr_step };
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let messages = cli.messages.unwrap_or(100_000);
    if messages == 0 {
        return Err(usage("messages: must be at least 1"));
    }
    let points = channel_sweep(&space, &codecs, &grid, messages, seed)?;
    Ok(sweep_dataset(&points).to_csv_with(&[format!(
        "channel-sim seed={seed} messages={messages} kinds={}",
        a.kinds
    )]))
}

fn sources(cli: &Cli, s: &Sources) -> Outcome {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match s {
        Sources::Zipf { n, a } => {
            let p: Vec<String> = zipf_probs(*n, *a)?.iter().map(|x| x.to_string()).collect();
            Ok(format!("{}\n", p.join(",")))
        }
        Sources::Space { attrs, variance } => {
            let attrs: Vec<usize> = parse_list(attrs, "attrs")?;
            let mode: VarianceMode = variance.parse()?;
            Ok(space_to_json(&random_space(&SpaceSpec::new(attrs, mode, seed))?) + "\n")
        }
        Sources::Dyadic => Ok(space_to_json(&dyadic_space()) + "\n"),
        Sources::Kb { n, k, a, rho, ensemble_out } => {
            let names: Vec<String> = (1..=*n).map(|i| format!("e{i}")).collect();
            let q = zipf_probs(*n, *a)?;
            let (ens, kb) = synth_kb(vec![names; *k], &vec![q; *k], *rho, seed)?;
            if let Some(path) = ensemble_out {
                std::fs::write(path, ensemble_to_json(&ens) + "\n")
                    .map_err(|e| usage(format!("ensemble-out: {e}")))?;
            }
            Ok(kb_to_json(&kb) + "\n")
        }
        Sources::Synonyms { space, fraction } => {
            let s = load_space(space)?;
            Ok(kb_to_json(&synth_synonym_kb(&s, *fraction, seed)?) + "\n")
        }
    }
}

fn experiment(cli: &Cli, id: &str) -> Outcome {
    let id: ExperimentId = id.parse()?;
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(Some(id), path)?,
        None => ExperimentConfig::defaults(id),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(m) = cli.messages {
        config.messages = m;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.display().to_string());
    }
    config.validate()?;
    let data = semcom_core::harness::run_experiment(&config)?;
    let text = data.to_csv(&config);
    // A path from the config file is honoured when --out is absent.
    if let (None, Some(path)) = (&cli.out, &config.out) {
        std::fs::write(path, &text).map_err(|e| usage(format!("out: cannot write {path}: {e}")))?;
        return Ok(String::new());
    }
    Ok(text)
}
