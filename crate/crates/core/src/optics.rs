//! Two-photon interference at a polarization-dependent beam splitter.
//!
//! Each photon lives in 8 single-photon modes: spatial (input `a`/`b`,
//! equivalently output `k_1`/`k_2`) × polarization (H/V) × temporal
//! (`t0`/`t1`). Mode `(s, p, t)` has index `4s + 2p + t`. Two photons occupy
//! the 36-dimensional bosonic sector, kept as a density operator in the
//! Fock basis `a†_m a†_n|0⟩` (`m < n`) and `(a†_m)²/√2 |0⟩`, ordered
//! lexicographically by `(m, n)` with `m ≤ n`.
//!
//! Internally the bosonic sector is mapped isometrically into the symmetric
//! part of the first-quantized space `C⁸ ⊗ C⁸`, where the beam splitter acts
//! as `U ⊗ U` and post-selection is a projection on both photons.
//!
//! Photon `b` arrives in the temporal mode `√V t0 + √(1−V) t1`, so `V` is the
//! squared temporal overlap of the two wavepackets: `V = 1` is full
//! interference, `V = 0` fully distinguishable photons.

use std::sync::LazyLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::qmath::{c, partial_trace, ComplexMatrix, DensityMatrix, Keep};

/// Single-photon modes per photon.
pub const MODES: usize = 8;

/// Dimension of the two-photon bosonic sector over [`MODES`] modes.
pub const FOCK_DIM: usize = MODES * (MODES + 1) / 2;

/// Post-selection probabilities below this are treated as zero.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-14;

/// Speed of light in m/s, for [`overlap_from_delay`].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Spatial mode. Input `A`/`B` are the beam-splitter inputs `k_a`/`k_b`;
/// the same indices label the outputs `k_1`/`k_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Port {
    K1 = 0,
    K2 = 1,
}

impl Port {
    pub const INPUT_A: Port = Port::K1;
    pub const INPUT_B: Port = Port::K2;
}

/// Index helpers for the 8 single-photon modes.
pub struct ModeBasis;

impl ModeBasis {
    pub fn index(port: Port, polarization: usize, temporal: usize) -> usize {
        debug_assert!(polarization < 2 && temporal < 2);
        4 * port as usize + 2 * polarization + temporal
    }

    pub fn port(mode: usize) -> usize {
        mode / 4
    }

    pub fn polarization(mode: usize) -> usize {
        (mode / 2) % 2
    }

    pub fn temporal(mode: usize) -> usize {
        mode % 2
    }

    /// Occupied mode pairs `(m, n)`, `m ≤ n`, in Fock-basis order.
    pub fn fock_pairs() -> &'static [(usize, usize)] {
        &FOCK_PAIRS
    }
}

static FOCK_PAIRS: LazyLock<Vec<(usize, usize)>> = LazyLock::new(|| {
    let mut pairs = Vec::with_capacity(FOCK_DIM);
    for m in 0..MODES {
        for n in m..MODES {
            pairs.push((m, n));
        }
    }
    pairs
});

/// Isometry from the Fock sector into `C⁸ ⊗ C⁸` (64 × 36).
static FOCK_TO_PRODUCT: LazyLock<DMatrix<Complex64>> = LazyLock::new(|| {
    let mut w = DMatrix::zeros(MODES * MODES, FOCK_DIM);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for (k, &(m, n)) in FOCK_PAIRS.iter().enumerate() {
        if m == n {
            w[(m * MODES + m, k)] = c(1.0, 0.0);
        } else {
            w[(m * MODES + n, k)] = c(s, 0.0);
            w[(n * MODES + m, k)] = c(s, 0.0);
        }
    }
    w
});

/// Two-photon density operator on the bosonic sector.
#[derive(Clone, Debug)]
pub struct TwoPhotonFockState(DensityMatrix);

impl TwoPhotonFockState {
    pub fn density(&self) -> &DensityMatrix {
        &self.0
    }

    /// First-quantized operator on `C⁸ ⊗ C⁸`, supported on the symmetric subspace.
    pub fn to_product_space(&self) -> ComplexMatrix {
        let w = &*FOCK_TO_PRODUCT;
        ComplexMatrix::from_raw(w * self.0.as_complex().as_matrix() * w.adjoint())
    }

    fn from_product_space(m: &ComplexMatrix) -> Self {
        let w = &*FOCK_TO_PRODUCT;
        let fock = w.adjoint() * m.as_matrix() * w;
        Self(DensityMatrix::assume_valid(ComplexMatrix::from_raw(fock)))
    }

    /// Probability that both photons are found in `port`.
    pub fn both_in(&self, port: Port) -> f64 {
        let p = port as usize;
        FOCK_PAIRS
            .iter()
            .enumerate()
            .filter(|(_, &(m, n))| ModeBasis::port(m) == p && ModeBasis::port(n) == p)
            .map(|(k, _)| self.0.get(k, k).re)
            .sum()
    }

    /// Probability of one photon in each port.
    pub fn split(&self) -> f64 {
        FOCK_PAIRS
            .iter()
            .enumerate()
            .filter(|(_, &(m, n))| ModeBasis::port(m) != ModeBasis::port(n))
            .map(|(k, _)| self.0.get(k, k).re)
            .sum()
    }

    /// `Σ_m ⟨a†_m a_m⟩`; every basis state of the sector holds two photons.
    pub fn photon_number(&self) -> f64 {
        2.0 * self.0.as_complex().trace().re
    }
}

/// Beam-splitter transmittances and the operating temporal overlap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeamSplitterSpec {
    pub t_h: f64,
    pub t_v: f64,
    pub overlap: f64,
}

impl BeamSplitterSpec {
    pub const BALANCED: BeamSplitterSpec = BeamSplitterSpec {
        t_h: 0.5,
        t_v: 0.5,
        overlap: 1.0,
    };

    pub fn new(t_h: f64, t_v: f64, overlap: f64) -> Result<Self> {
        for (name, t) in [("T_H", t_h), ("T_V", t_v)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::OutOfRange {
                    name,
                    value: t,
                    range: "(0, 1)",
                });
            }
        }
        check_unit_interval("overlap", overlap)?;
        Ok(Self { t_h, t_v, overlap })
    }

    pub fn with_overlap(self, overlap: f64) -> Result<Self> {
        Self::new(self.t_h, self.t_v, overlap)
    }

    /// Single-photon mode transformation on the 8 modes.
    ///
    /// For polarization `p`: `a†_p → √T_p c†_p + √(1−T_p) d†_p` and
    /// `b†_p → √(1−T_p) c†_p − √T_p d†_p`, where `c`, `d` are `k_1`, `k_2`.
    pub fn mode_unitary(&self) -> ComplexMatrix {
        let mut u = DMatrix::zeros(MODES, MODES);
        for (pol, t) in [(0, self.t_h), (1, self.t_v)] {
            let (tt, rr) = (t.sqrt(), (1.0 - t).sqrt());
            for temporal in 0..2 {
                let a = ModeBasis::index(Port::K1, pol, temporal);
                let b = ModeBasis::index(Port::K2, pol, temporal);
                u[(a, a)] = c(tt, 0.0);
                u[(b, a)] = c(rr, 0.0);
                u[(a, b)] = c(rr, 0.0);
                u[(b, b)] = c(-tt, 0.0);
            }
        }
        ComplexMatrix::from_raw(u)
    }
}

/// Maps a stage displacement `Z = 2cΔt` to an overlap assuming a Gaussian dip,
/// `V = exp(−(Z / (2cτ_coh))²)`.
pub fn overlap_from_delay(z_meters: f64, coherence_time_s: f64) -> f64 {
    let x = z_meters / (2.0 * SPEED_OF_LIGHT * coherence_time_s);
    (-x * x).exp()
}

/// Embedding of two labeled polarization qubits: photon a in `(k_a, t0)`,
/// photon b in `(k_b, √V t0 + √(1−V) t1)`. Returns a 64 × 4 isometry.
fn labeled_embedding(overlap: f64) -> DMatrix<Complex64> {
    let mut j = DMatrix::zeros(MODES * MODES, 4);
    let (same, other) = (overlap.sqrt(), (1.0 - overlap).sqrt());
    for pa in 0..2 {
        for pb in 0..2 {
            let col = 2 * pa + pb;
            let ma = ModeBasis::index(Port::INPUT_A, pa, 0);
            for (temporal, amp) in [(0, same), (1, other)] {
                if amp == 0.0 {
                    continue;
                }
                let mb = ModeBasis::index(Port::INPUT_B, pb, temporal);
                j[(ma * MODES + mb, col)] = c(amp, 0.0);
            }
        }
    }
    j
}

/// Symmetrizer `(I + SWAP)/√2` on `C⁸ ⊗ C⁸`.
fn symmetrizer() -> &'static DMatrix<Complex64> {
    static S: LazyLock<DMatrix<Complex64>> = LazyLock::new(|| {
        let n = MODES * MODES;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(n, n);
        for x in 0..MODES {
            for y in 0..MODES {
                m[(x * MODES + y, x * MODES + y)] += c(s, 0.0);
                m[(y * MODES + x, x * MODES + y)] += c(s, 0.0);
            }
        }
        m
    });
    &S
}

/// Photons with polarization states `rho_a`, `rho_b` entering ports `k_a`, `k_b`.
pub fn two_photon_input(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    overlap: f64,
) -> Result<TwoPhotonFockState> {
    for rho in [rho_a, rho_b] {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            });
        }
    }
    two_photon_input_joint(&rho_a.tensor(rho_b), overlap)
}

/// As [`two_photon_input`] for a possibly correlated two-qubit polarization
/// state, first factor on `k_a`.
pub fn two_photon_input_joint(rho_ab: &DensityMatrix, overlap: f64) -> Result<TwoPhotonFockState> {
    if rho_ab.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho_ab.dim(),
        });
    }
    check_unit_interval("overlap", overlap)?;
    let j = labeled_embedding(overlap);
    let labeled = &j * rho_ab.as_complex().as_matrix() * j.adjoint();
    let s = symmetrizer();
    let symmetric = s * labeled * s.adjoint();
    Ok(TwoPhotonFockState::from_product_space(&ComplexMatrix::from_raw(
        symmetric,
    )))
}

/// Bosonic representation `W†(U ⊗ U)W` of a single-photon mode unitary.
pub fn fock_unitary(u: &ComplexMatrix) -> ComplexMatrix {
    let w = &*FOCK_TO_PRODUCT;
    let uu = u.as_matrix().kronecker(u.as_matrix());
    ComplexMatrix::from_raw(w.adjoint() * uu * w)
}

pub fn apply_bs(state: &TwoPhotonFockState, bs: &BeamSplitterSpec) -> TwoPhotonFockState {
    let uf = fock_unitary(&bs.mode_unitary());
    let out = state.0.as_complex().conjugate_by(&uf);
    TwoPhotonFockState(DensityMatrix::assume_valid(out))
}

/// Conditions on both photons leaving through `port`.
///
/// Returns the probability of that event and the two-qubit polarization
/// state of the pair (first-quantized, symmetric under exchange of the two
/// photon labels, temporal labels traced out).
pub fn postselect_bunched(
    state: &TwoPhotonFockState,
    port: Port,
) -> Result<(f64, DensityMatrix)> {
    let full = state.to_product_space();
    let f = full.as_matrix();
    let local: Vec<usize> = (0..MODES)
        .filter(|&m| ModeBasis::port(m) == port as usize)
        .collect();
    // restricted to port: photon index (pol, temporal) -> 4 local modes each
    let mut pol = DMatrix::<Complex64>::zeros(4, 4);
    for &m1 in &local {
        for &m2 in &local {
            for &n1 in &local {
                for &n2 in &local {
                    if ModeBasis::temporal(m1) != ModeBasis::temporal(n1)
                        || ModeBasis::temporal(m2) != ModeBasis::temporal(n2)
                    {
                        continue;
                    }
                    let row = 2 * ModeBasis::polarization(m1) + ModeBasis::polarization(m2);
                    let col = 2 * ModeBasis::polarization(n1) + ModeBasis::polarization(n2);
                    pol[(row, col)] += f[(m1 * MODES + m2, n1 * MODES + n2)];
                }
            }
        }
    }
    let prob = pol.trace().re;
    if prob < MIN_POSTSELECTION_PROBABILITY {
        return Err(Error::ZeroProbability { prob });
    }
    let rho = ComplexMatrix::from_raw(pol).scale(1.0 / prob);
    Ok((prob, DensityMatrix::assume_valid(rho)))
}

/// Polarization state of one photon of a post-selected pair.
pub fn single_photon_state(rho_sym: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::assume_valid(partial_trace(
        rho_sym.as_complex(),
        Keep::First,
    )?))
}

/// Coincidence probability between the two detectors behind the 50:50
/// splitter on `k_1`, given both photons in `k_1`.
pub fn bs1_coincidence(prob_bunched: f64) -> Result<f64> {
    check_unit_interval("bunched probability", prob_bunched)?;
    Ok(0.5 * prob_bunched)
}

/// Input pair sent through `bs` at its configured overlap.
pub fn interfere(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    bs: &BeamSplitterSpec,
) -> Result<TwoPhotonFockState> {
    Ok(apply_bs(&two_photon_input(rho_a, rho_b, bs.overlap)?, bs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HomPoint {
    pub overlap: f64,
    /// Both photons in the same output port (either one).
    pub bunched_prob: f64,
    /// One photon in each output port.
    pub cross_coincidence: f64,
}

pub fn hom_scan(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    bs: &BeamSplitterSpec,
    overlaps: &[f64],
) -> Result<Vec<HomPoint>> {
    overlaps
        .iter()
        .map(|&v| {
            let out = interfere(rho_a, rho_b, &bs.with_overlap(v)?)?;
            Ok(HomPoint {
                overlap: v,
                bunched_prob: out.both_in(Port::K1) + out.both_in(Port::K2),
                cross_coincidence: out.split(),
            })
        })
        .collect()
}

/// Single-photon ket in the 8-mode space.
pub fn single_photon(port: Port, polarization: &DVector<Complex64>, temporal: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(MODES);
    for p in 0..2 {
        v[ModeBasis::index(port, p, temporal)] = polarization[p];
    }
    v
}
