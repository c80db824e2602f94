//! Depolarizing channels, as abstract Pauli maps and as the time-domain
//! schedule of a pair of Pockels cells.
//!
//! One depolarizer is two cells with optical axes at 45°, each driven by a
//! square wave of period `T = 1/f` and pulse width `τ = νT`, the second
//! delayed by `τ/2`. Within one period, measured from the timeline phase:
//!
//! ```text
//! [0, τ/2)      first cell only   -> σ_x
//! [τ/2, τ)      both cells        -> σ_y
//! [τ, 3τ/2)     second cell only  -> σ_z
//! [3τ/2, T)     idle              -> I
//! ```
//!
//! Averaged over a period this is the Pauli channel
//! `(1 − 3ν/2, ν/2, ν/2, ν/2)`, i.e. a depolarizing map with `ξ = 1 − 2ν`.

use rayon::prelude::*;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::qmath::{ComplexMatrix, DensityMatrix};
use crate::qubit::{pauli, PauliLabel};
use crate::streams::Streams;

/// Drive frequency of the first depolarizer, in Hz.
pub const DEFAULT_FREQUENCY: f64 = 6.0e3;

/// Ratio between the drive frequencies of the second and first depolarizer.
pub const DEFAULT_FREQUENCY_RATIO: f64 = 1.7;

/// Arrival times are drawn over this many periods of the slower timeline.
pub const SAMPLING_HORIZON_PERIODS: f64 = 1000.0;

/// Random-unitary qubit map `ρ ↦ Σ_k p_k σ_k ρ σ_k` over `{I, X, Y, Z}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    weights: [f64; 4],
}

impl PauliChannel {
    pub const IDENTITY: PauliChannel = PauliChannel {
        weights: [1.0, 0.0, 0.0, 0.0],
    };

    pub fn new(weights: [f64; 4]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights { weights });
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    pub fn weight(&self, label: PauliLabel) -> f64 {
        self.weights[label.index()]
    }

    /// Factors multiplying the x, y and z Bloch components.
    pub fn bloch_scaling(&self) -> [f64; 3] {
        let [i, x, y, z] = self.weights;
        [i + x - y - z, i - x + y - z, i - x - y + z]
    }

    /// `ξ` of the depolarizing map with the same identity weight,
    /// `p_I = (1 + 3ξ)/4`.
    pub fn depolarizing_xi(&self) -> f64 {
        (4.0 * self.weights[0] - 1.0) / 3.0
    }
}

pub fn apply_pauli_channel(ch: &PauliChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(2);
    for label in PauliLabel::ALL {
        let w = ch.weight(label);
        if w == 0.0 {
            continue;
        }
        let term = rho.as_complex().conjugate_by(&pauli(label)).scale(w);
        out = &out + &term;
    }
    Ok(DensityMatrix::assume_valid(out))
}

/// `ξρ + (1 − ξ)·¼ Σ_k σ_k ρ σ_k` as Pauli weights.
pub fn depolarizing_channel(xi: f64) -> Result<PauliChannel> {
    check_unit_interval("xi", xi)?;
    let q = (1.0 - xi) / 4.0;
    PauliChannel::new([xi + q, q, q, q])
}

/// Drive schedule of one two-cell depolarizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PockelsTimeline {
    frequency: f64,
    duty_cycle: f64,
    phase: f64,
}

impl PockelsTimeline {
    pub fn new(frequency: f64, duty_cycle: f64, phase: f64) -> Result<Self> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::OutOfRange {
                name: "frequency",
                value: frequency,
                range: "(0, inf)",
            });
        }
        if !(0.0..=0.5).contains(&duty_cycle) {
            return Err(Error::OutOfRange {
                name: "duty cycle",
                value: duty_cycle,
                range: "[0, 1/2]",
            });
        }
        if !(0.0..1.0 / frequency).contains(&phase) {
            return Err(Error::OutOfRange {
                name: "phase",
                value: phase,
                range: "[0, 1/f)",
            });
        }
        Ok(Self {
            frequency,
            duty_cycle,
            phase,
        })
    }

    /// Duty cycle that yields a depolarizing fraction `1 − ξ`.
    pub fn for_xi(frequency: f64, xi: f64) -> Result<Self> {
        check_unit_interval("xi", xi)?;
        Self::new(frequency, (1.0 - xi) / 2.0, 0.0)
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn duty_cycle(&self) -> f64 {
        self.duty_cycle
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    /// Pulse width `τ = ν/f`.
    pub fn pulse_width(&self) -> f64 {
        self.duty_cycle / self.frequency
    }

    /// Same drive with another phase; `phase` is reduced modulo the period.
    pub fn with_phase(&self, phase: f64) -> Self {
        Self {
            phase: phase.rem_euclid(self.period()),
            ..*self
        }
    }

    fn offset(&self, t: f64) -> f64 {
        (t - self.phase).rem_euclid(self.period())
    }

    pub fn first_cell_active(&self, t: f64) -> bool {
        self.offset(t) < self.pulse_width()
    }

    /// The second cell fires `τ/2` after the first.
    pub fn second_cell_active(&self, t: f64) -> bool {
        let s = self.offset(t);
        let tau = self.pulse_width();
        s >= tau / 2.0 && s < 1.5 * tau
    }
}

pub fn label_at(t: f64, tl: &PockelsTimeline) -> PauliLabel {
    match (tl.first_cell_active(t), tl.second_cell_active(t)) {
        (true, false) => PauliLabel::X,
        (true, true) => PauliLabel::Y,
        (false, true) => PauliLabel::Z,
        (false, false) => PauliLabel::I,
    }
}

/// Period average of the schedule.
pub fn effective_channel(tl: &PockelsTimeline) -> PauliChannel {
    let slot = tl.pulse_width() / 2.0 / tl.period();
    PauliChannel {
        weights: [1.0 - 3.0 * slot, slot, slot, slot],
    }
}

/// Depolarizers on the two input modes, driven at distinct frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelPair {
    pub a: PockelsTimeline,
    pub b: PockelsTimeline,
}

impl ChannelPair {
    pub fn new(a: PockelsTimeline, b: PockelsTimeline) -> Result<Self> {
        if a.frequency == b.frequency {
            return Err(Error::InvalidConfig(format!(
                "both depolarizers driven at {} Hz",
                a.frequency
            )));
        }
        Ok(Self { a, b })
    }

    /// Duty cycles `nu_a`, `nu_b` at `frequency` and `ratio·frequency`.
    pub fn from_duty_cycles(nu_a: f64, nu_b: f64, frequency: f64, ratio: f64) -> Result<Self> {
        Self::new(
            PockelsTimeline::new(frequency, nu_a, 0.0)?,
            PockelsTimeline::new(frequency * ratio, nu_b, 0.0)?,
        )
    }

    pub fn with_defaults(nu_a: f64, nu_b: f64) -> Result<Self> {
        Self::from_duty_cycles(nu_a, nu_b, DEFAULT_FREQUENCY, DEFAULT_FREQUENCY_RATIO)
    }
}

/// Draws `n` photon-pair arrival times and reads off both depolarizers'
/// Pauli labels.
///
/// Each trial uses its own substream: an arrival time uniform over
/// [`SAMPLING_HORIZON_PERIODS`] periods of the slower drive, and fresh
/// uniform phases for both timelines.
pub fn sample_joint_labels(
    pair: &ChannelPair,
    n: usize,
    seed: u64,
) -> Result<Vec<(PauliLabel, PauliLabel)>> {
    sample_joint_labels_with(pair, n, &Streams::new(seed).child("labels"))
}

pub fn sample_joint_labels_with(
    pair: &ChannelPair,
    n: usize,
    streams: &Streams,
) -> Result<Vec<(PauliLabel, PauliLabel)>> {
    if n == 0 {
        return Err(Error::ZeroCounts);
    }
    let horizon = SAMPLING_HORIZON_PERIODS * pair.a.period().max(pair.b.period());
    let labels = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.item(i);
            let t = rng.random_range(0.0..horizon);
            let a = pair.a.with_phase(rng.random_range(0.0..pair.a.period()));
            let b = pair.b.with_phase(rng.random_range(0.0..pair.b.period()));
            (label_at(t, &a), label_at(t, &b))
        })
        .collect();
    Ok(labels)
}

/// Joint counts of sampled label pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointHistogram {
    pub counts: [[u64; 4]; 4],
    pub total: u64,
}

impl JointHistogram {
    pub fn from_labels(labels: &[(PauliLabel, PauliLabel)]) -> Self {
        let mut counts = [[0u64; 4]; 4];
        for (a, b) in labels {
            counts[a.index()][b.index()] += 1;
        }
        Self {
            counts,
            total: labels.len() as u64,
        }
    }

    pub fn joint(&self, a: PauliLabel, b: PauliLabel) -> f64 {
        self.counts[a.index()][b.index()] as f64 / self.total as f64
    }

    pub fn marginal_a(&self) -> [f64; 4] {
        let mut m = [0.0; 4];
        for (i, row) in self.counts.iter().enumerate() {
            m[i] = row.iter().sum::<u64>() as f64 / self.total as f64;
        }
        m
    }

    pub fn marginal_b(&self) -> [f64; 4] {
        let mut m = [0.0; 4];
        for row in &self.counts {
            for (j, &n) in row.iter().enumerate() {
                m[j] += n as f64 / self.total as f64;
            }
        }
        m
    }

    pub fn channel_a(&self) -> PauliChannel {
        normalized_channel(self.marginal_a())
    }

    pub fn channel_b(&self) -> PauliChannel {
        normalized_channel(self.marginal_b())
    }
}

fn normalized_channel(mut w: [f64; 4]) -> PauliChannel {
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    PauliChannel { weights: w }
}
