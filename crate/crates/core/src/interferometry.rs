//! Antidot initialization and Fabry–Pérot readout of Fibonacci qubits.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion::Label;
use crate::scalar::golden;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterferometryError {
    #[error("only single flux quantum threading is modelled, got {0}")]
    Flux(i64),
    #[error("no tabulated monodromy for probe {probe} around {inner}")]
    Monodromy { probe: Label, inner: Label },
    #[error("tunnelling amplitude modulus {0} exceeds 1")]
    Amplitude(f64),
    #[error("pairing rule violated for l = {l}, {pf}")]
    Pairing { l: u8, pf: Label },
    #[error("channel must be I or eps, got {0}")]
    Channel(Label),
    #[error("antidot {antidot} still empty after {trials} trials")]
    ProtocolFailure { antidot: usize, trials: u32 },
    #[error("register needs at least one qubit")]
    NoQubits,
}

/// Filling fraction of the coset state.
pub fn filling() -> Rational64 {
    Rational64::new(3, 5)
}

/// Charge label l (mod 5) paired with a parafermion primary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorLabel {
    pub l: u8,
    pub pf: Label,
}

impl SectorLabel {
    /// Enforces μ + ν ≡ l (mod 3).
    pub fn new(l: u8, pf: Label) -> Result<Self, InterferometryError> {
        let l = l % 5;
        let (mu, nu) = pf.weight();
        if (mu + nu) % 3 != l % 3 {
            return Err(InterferometryError::Pairing { l, pf });
        }
        Ok(Self { l, pf })
    }

    pub fn electric_charge(&self) -> Rational64 {
        Rational64::new(i64::from(self.l), 5)
    }
}

/// Quasiparticles an antidot can bind after `flux` quanta are threaded.
pub fn allowed_localized_excitations(flux: i64) -> Result<Vec<SectorLabel>, InterferometryError> {
    if flux != 1 {
        return Err(InterferometryError::Flux(flux));
    }
    let q = filling() * Rational64::from_integer(flux);
    let mut out = Vec::new();
    for l in 0..5u8 {
        for pf in Label::ALL {
            if let Ok(s) = SectorLabel::new(l, pf) {
                if s.electric_charge() == q {
                    out.push(s);
                }
            }
        }
    }
    Ok(out)
}

/// Normalized monodromy ⟨M⟩ of a σ probe around the enclosed charge.
pub fn monodromy(probe: Label, inner: Label) -> Result<f64, InterferometryError> {
    let d = golden::<f64>();
    match (probe, inner) {
        (Label::Sigma1 | Label::Sigma2, Label::I) => Ok(1.0),
        (Label::Sigma1 | Label::Sigma2, Label::Eps) => Ok(-1.0 / (d * d)),
        _ => Err(InterferometryError::Monodromy { probe, inner }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub t1: Complex64,
    pub t2: Complex64,
    pub alpha: f64,
    pub inner: Label,
    pub probe: Label,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<(), InterferometryError> {
        for t in [self.t1, self.t2] {
            if t.norm() > 1.0 + 1e-12 {
                return Err(InterferometryError::Amplitude(t.norm()));
            }
        }
        Ok(())
    }
}

/// Longitudinal conductance |t₁|² + |t₂|² + 2 Re(t₁* t₂ e^{iα} M).
pub fn sigma_xx(c: &InterferometerConfig) -> Result<f64, InterferometryError> {
    c.validate()?;
    let m = monodromy(c.probe, c.inner)?;
    let cross = c.t1.conj() * c.t2 * Complex64::from_polar(1.0, c.alpha) * m;
    Ok(c.t1.norm_sqr() + c.t2.norm_sqr() + 2.0 * cross.re)
}

/// Peak-to-peak amplitude of σ_xx over α, divided by two.
pub fn oscillation_amplitude(c: &InterferometerConfig) -> Result<f64, InterferometryError> {
    c.validate()?;
    Ok(2.0 * c.t1.norm() * c.t2.norm() * monodromy(c.probe, c.inner)?.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub sigma_xx: f64,
    pub inner: Label,
}

/// `points` evenly spaced α values over [0, 2π).
pub fn sweep(base: &InterferometerConfig, points: usize) -> Result<Vec<SweepRow>, InterferometryError> {
    (0..points)
        .map(|k| {
            let alpha = std::f64::consts::TAU * k as f64 / points as f64;
            let c = InterferometerConfig { alpha, ..*base };
            Ok(SweepRow { alpha, sigma_xx: sigma_xx(&c)?, inner: c.inner })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("alpha,sigma_xx,inner_label\n");
    for r in rows {
        let _ = writeln!(s, "{:.16e},{:.16e},{}", r.alpha, r.sigma_xx, r.inner);
    }
    s
}

/// Probability that a threaded flux quantum binds an ε rather than 𝕀.
pub fn p_eps() -> f64 {
    let d2 = golden::<f64>().powi(2);
    d2 / (1.0 + d2)
}

pub fn sample_localization(rng: &mut ChaCha8Rng) -> Label {
    let b = Bernoulli::new(p_eps()).expect("probability in [0, 1]");
    if b.sample(rng) {
        Label::Eps
    } else {
        Label::I
    }
}

pub fn sample_localization_seeded(seed: u64) -> Label {
    sample_localization(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Interference suppression seen when probing a pair in the given channel.
pub fn measure_qubit(pair_channel: Label) -> Result<f64, InterferometryError> {
    match pair_channel {
        Label::I => Ok(1.0),
        Label::Eps => Ok(1.0 / golden::<f64>().powi(2)),
        other => Err(InterferometryError::Channel(other)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntidotState {
    pub occupied: Option<Label>,
    pub flux_quanta: u32,
    pub trial_count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub outcome: Label,
    pub suppression: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegisterInit {
    pub n_qubits: usize,
    pub seed: u64,
    pub antidots: Vec<AntidotState>,
    pub transcripts: Vec<Vec<TrialRecord>>,
    pub total_trials: u64,
}

/// Fills `2n+2` antidots one at a time: each trial resets the antidot,
/// threads one flux quantum and reads the channel non-destructively,
/// repeating until an ε is bound.
pub fn initialize_register(n_qubits: usize, seed: u64, max_trials: u32) -> Result<RegisterInit, InterferometryError> {
    if n_qubits == 0 {
        return Err(InterferometryError::NoQubits);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = 2 * n_qubits + 2;
    let mut antidots = Vec::with_capacity(count);
    let mut transcripts = Vec::with_capacity(count);
    let mut total = 0u64;
    for antidot in 0..count {
        let mut log = Vec::new();
        let mut state = AntidotState { occupied: None, flux_quanta: 0, trial_count: 0 };
        while state.occupied != Some(Label::Eps) {
            if state.trial_count >= max_trials {
                return Err(InterferometryError::ProtocolFailure { antidot, trials: state.trial_count });
            }
            state.trial_count += 1;
            state.flux_quanta = 1;
            let outcome = sample_localization(&mut rng);
            state.occupied = Some(outcome);
            log.push(TrialRecord { trial: state.trial_count, outcome, suppression: measure_qubit(outcome)? });
        }
        total += u64::from(state.trial_count);
        antidots.push(state);
        transcripts.push(log);
    }
    Ok(RegisterInit { n_qubits, seed, antidots, transcripts, total_trials: total })
}
