//! Binary symmetric channel from BPSK over AWGN with hard decisions, and
//! Monte-Carlo link trials that score decoded entities attribute by attribute.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coding::{BitString, Codec};
use crate::entropy::entropy_bits;
use crate::error::{Error, Result};
use crate::space::{SemanticSpace, Slot};

/// Base seed used when none is given.
pub const DEFAULT_SEED: u64 = 0xC0DEC;

const MIN_FLIP: f64 = 1e-15;

/// Gaussian tail `Q(x) = P(N(0, 1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Hard-decision BPSK bit error probability `Q(sqrt(2γ))` at `snr_db`,
/// clamped to `[1e-15, 0.5]`.
pub fn snr_to_flip_prob(snr_db: f64) -> f64 {
    let gamma = 10f64.powf(snr_db / 10.0);
    let p = 0.5 * libm::erfc(gamma.sqrt());
    if p.is_nan() {
        return 0.5;
    }
    p.clamp(MIN_FLIP, 0.5)
}

/// RNG for grid point `index` of a sweep seeded with `base`. Each point gets
/// its own ChaCha stream, so results do not depend on scheduling.
pub fn point_rng(base: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng
}

/// Seed for grid point `index`.
pub fn point_seed(base: u64, index: u64) -> u64 {
    point_rng(base, index).next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    snr_db: f64,
    flip_prob: f64,
}

impl ChannelModel {
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidParameter(format!("SNR must be finite, got {snr_db}")));
        }
        Ok(ChannelModel { snr_db, flip_prob: snr_to_flip_prob(snr_db) })
    }

    /// A channel with a given flip probability, clamped to `[0, 0.5]`.
    pub fn from_flip_prob(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidParameter(format!("flip probability must be in [0, 1], got {p}")));
        }
        let flip_prob = p.min(0.5);
        let snr_db = if flip_prob == 0.0 { f64::INFINITY } else { f64::NAN };
        Ok(ChannelModel { snr_db, flip_prob })
    }

    pub fn noiseless() -> Self {
        ChannelModel { snr_db: f64::INFINITY, flip_prob: 0.0 }
    }

    /// SNR in dB; NaN when the channel was built from a flip probability.
    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn flip_prob(&self) -> f64 {
        self.flip_prob
    }

    pub fn transmit_with<R: Rng + ?Sized>(&self, bits: &[bool], rng: &mut R) -> BitString {
        bits.iter().map(|&b| b ^ (rng.random::<f64>() < self.flip_prob)).collect()
    }
}

/// Flips each bit independently; deterministic given `seed`.
pub fn transmit(bits: &BitString, channel: &ChannelModel, seed: u64) -> BitString {
    channel.transmit_with(bits.bits(), &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Outcome of a link trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialReport {
    pub messages: u64,
    pub suts_sent: u64,
    pub suts_correct: u64,
    pub bits_sent: u64,
    /// Entities not recovered exactly.
    pub symbol_errors: u64,
    /// Frames the receiver recognised as corrupted.
    pub symbols_detected_error: u64,
    /// Suts in error over suts sent.
    pub ser: f64,
    /// Suts in error within frames the receiver accepted, over suts sent.
    pub undetected_ser: f64,
    pub symbol_error_rate: f64,
    /// Correct suts per transmitted bit.
    pub semantic_efficiency: f64,
    /// Source entropy over expected codeword length.
    pub coding_efficiency: f64,
}

/// Sends `n_messages` entities drawn from `space` through `channel`, one
/// codeword per frame with known boundaries.
///
/// A sut is an attribute the transmitted tuple specifies. Flat codecs lose
/// every sut of a frame that does not decode to the sent entity; semantic
/// codecs are scored per attribute on whatever positions decode. The KB codec
/// is scored against the synonym representative it transmits.
pub fn run_link_trial(
    space: &SemanticSpace,
    codec: &Codec,
    channel: &ChannelModel,
    n_messages: u64,
    seed: u64,
) -> Result<TrialReport> {
    run_link_trial_with(space, codec, channel, n_messages, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn run_link_trial_with<R: Rng + ?Sized>(
    space: &SemanticSpace,
    codec: &Codec,
    channel: &ChannelModel,
    n_messages: u64,
    rng: &mut R,
) -> Result<TrialReport> {
    if n_messages == 0 {
        return Err(Error::InvalidParameter("at least one message is required".into()));
    }
    let probs = space.entity_probs();
    let sampler = WeightedIndex::new(&probs).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let codewords: Vec<Option<BitString>> = probs
        .iter()
        .enumerate()
        .map(|(e, &p)| if p > 0.0 { codec.encode(e).map(Some) } else { Ok(None) })
        .collect::<Result<_>>()?;
    let mean_len: f64 = probs
        .iter()
        .zip(&codewords)
        .filter_map(|(p, w)| w.as_ref().map(|w| p * w.len() as f64))
        .sum();

    let mut r = TrialReport {
        messages: n_messages,
        suts_sent: 0,
        suts_correct: 0,
        bits_sent: 0,
        symbol_errors: 0,
        symbols_detected_error: 0,
        ser: 0.0,
        undetected_ser: 0.0,
        symbol_error_rate: 0.0,
        semantic_efficiency: 0.0,
        coding_efficiency: 0.0,
    };
    let mut undetected_wrong = 0u64;
    for _ in 0..n_messages {
        let e = sampler.sample(rng);
        let truth = &space.entities()[codec.representative(e)].coords;
        let suts = truth.iter().filter(|s| s.is_some()).count() as u64;
        let word = codewords[e].as_ref().expect("sampled entities have positive mass");
        let received = channel.transmit_with(word.bits(), rng);
        r.bits_sent += word.len() as u64;
        r.suts_sent += suts;

        let (correct, exact, detected) = match codec {
            Codec::Flat(book) => match book.decode_frame(received.bits()) {
                Ok(&d) if d == codec.representative(e) => (suts, true, false),
                Ok(_) => (0, false, false),
                Err(_) => (0, false, true),
            },
            Codec::Semantic(book) => {
                let partial = book.decode_partial(received.bits());
                let order = book.perspective().order();
                let mut decoded: Vec<Option<Slot>> = vec![None; truth.len()];
                for (k, &s) in partial.slots.iter().enumerate() {
                    decoded[order[k]] = Some(s);
                }
                let correct = truth
                    .iter()
                    .zip(&decoded)
                    .filter(|(t, d)| t.is_some() && d.as_ref() == Some(*t))
                    .count() as u64;
                let detected = partial.error.is_some() || partial.consumed != received.len();
                let exact = !detected && decoded.iter().zip(truth).all(|(d, t)| d.as_ref() == Some(t));
                (correct, exact, detected)
            }
        };
        r.suts_correct += correct;
        if !exact {
            r.symbol_errors += 1;
        }
        if detected {
            r.symbols_detected_error += 1;
        } else {
            undetected_wrong += suts - correct;
        }
    }

    let sent = r.suts_sent.max(1) as f64;
    r.ser = (r.suts_sent - r.suts_correct) as f64 / sent;
    r.undetected_ser = undetected_wrong as f64 / sent;
    r.symbol_error_rate = r.symbol_errors as f64 / n_messages as f64;
    r.semantic_efficiency = if r.bits_sent > 0 { r.suts_correct as f64 / r.bits_sent as f64 } else { 0.0 };
    r.coding_efficiency = if mean_len > 0.0 { entropy_bits(&probs) / mean_len } else { 0.0 };
    Ok(r)
}
