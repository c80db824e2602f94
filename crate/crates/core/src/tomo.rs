//! Single-qubit Stokes tomography from finite detector counts.
//!
//! Each of the three settings projects onto the eigenbasis of one Pauli
//! operator, with both outcomes recorded (the polarizing beam splitter
//! provides both ports). The Stokes vector is estimated as
//! `s_k = (n₊ − n₋)/N` and the state as `½(I + s·σ)`, which is then projected
//! to the nearest density matrix by clipping negative eigenvalues.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{c, eig_hermitian, ComplexMatrix, DensityMatrix};
use crate::qubit::{bloch_vector, from_bloch, PureQubit};
use crate::streams::Streams;

/// Measured Pauli basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    /// σ_x: diagonal / antidiagonal
    X,
    /// σ_y: circular
    Y,
    /// σ_z: horizontal / vertical
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn index(self) -> usize {
        match self {
            Basis::X => 0,
            Basis::Y => 1,
            Basis::Z => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Basis::X => "X",
            Basis::Y => "Y",
            Basis::Z => "Z",
        }
    }

    /// Eigenvectors for the `+1` and `−1` outcomes.
    pub fn projectors(self) -> (PureQubit, PureQubit) {
        let s = FRAC_1_SQRT_2;
        let (plus, minus) = match self {
            Basis::X => ((c(s, 0.0), c(s, 0.0)), (c(s, 0.0), c(-s, 0.0))),
            Basis::Y => ((c(s, 0.0), c(0.0, s)), (c(s, 0.0), c(0.0, -s))),
            Basis::Z => ((c(1.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0))),
        };
        (
            PureQubit::new(plus.0, plus.1).expect("unit vector"),
            PureQubit::new(minus.0, minus.1).expect("unit vector"),
        )
    }

    /// `Tr[ρ P₊]`
    pub fn plus_probability(self, rho: &DensityMatrix) -> Result<f64> {
        let (plus, _) = self.projectors();
        Ok(rho.as_complex().expectation(&plus.ket())?.re.clamp(0.0, 1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountRecord {
    pub setting: Basis,
    pub n_plus: u64,
    pub n_minus: u64,
}

impl CountRecord {
    pub fn new(setting: Basis, n_plus: u64, n_minus: u64) -> Result<Self> {
        if n_plus + n_minus == 0 {
            return Err(Error::ZeroCounts);
        }
        Ok(Self {
            setting,
            n_plus,
            n_minus,
        })
    }

    pub fn total(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    pub fn stokes(&self) -> f64 {
        (self.n_plus as f64 - self.n_minus as f64) / self.total() as f64
    }

    /// Binomial standard error of [`Self::stokes`], using the add-one
    /// estimate `(n₊ + 1)/(N + 2)` so that saturated settings keep a
    /// non-zero error bar.
    pub fn std_error(&self) -> f64 {
        let n = self.total() as f64;
        let q = (self.n_plus as f64 + 1.0) / (n + 2.0);
        2.0 * (q * (1.0 - q) / n).sqrt()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TomographyResult {
    /// Stokes vector of `rho_hat` (after projection).
    pub stokes: [f64; 3],
    /// Linear-inversion estimate before projection.
    pub raw_stokes: [f64; 3],
    #[serde(skip)]
    pub rho_hat: DensityMatrix,
    pub std_errors: [f64; 3],
}

pub fn simulate_counts<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    setting: Basis,
    n: u64,
    rng: &mut R,
) -> Result<CountRecord> {
    if n == 0 {
        return Err(Error::ZeroCounts);
    }
    let p = setting.plus_probability(rho)?;
    let n_plus = Binomial::new(n, p)
        .map_err(|_| Error::OutOfRange {
            name: "outcome probability",
            value: p,
            range: "[0, 1]",
        })?
        .sample(rng);
    CountRecord::new(setting, n_plus, n - n_plus)
}

/// Counts for all three settings, each from its own substream.
pub fn measure_all(rho: &DensityMatrix, n: u64, streams: &Streams) -> Result<[CountRecord; 3]> {
    let mut out = Vec::with_capacity(3);
    for basis in Basis::ALL {
        let mut rng = streams.item(basis.index() as u64);
        out.push(simulate_counts(rho, basis, n, &mut rng)?);
    }
    Ok([out[0], out[1], out[2]])
}

/// Nearest density matrix to a trace-one Hermitian matrix, by clipping
/// negative eigenvalues and renormalizing.
pub fn psd_project(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let eig = eig_hermitian(m)?;
    let clipped: Vec<f64> = eig.values.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.values.last().copied().unwrap_or(0.0),
        });
    }
    let projected = eig.map_values(|x| x.max(0.0) / total);
    Ok(DensityMatrix::assume_valid(projected))
}

pub fn reconstruct(records: &[CountRecord]) -> Result<TomographyResult> {
    let mut raw = [0.0; 3];
    let mut errs = [0.0; 3];
    for basis in Basis::ALL {
        let rec = records
            .iter()
            .find(|r| r.setting == basis)
            .ok_or(Error::MissingSetting(basis.name()))?;
        raw[basis.index()] = rec.stokes();
        errs[basis.index()] = rec.std_error();
    }
    reconstruct_from_stokes(raw, errs)
}

/// Reconstruction from a given (possibly unphysical) Stokes vector.
pub fn reconstruct_from_stokes(raw: [f64; 3], std_errors: [f64; 3]) -> Result<TomographyResult> {
    let [x, y, z] = raw;
    let linear = ComplexMatrix::from_rows(
        2,
        &[
            c((1.0 + z) / 2.0, 0.0),
            c(x / 2.0, -y / 2.0),
            c(x / 2.0, y / 2.0),
            c((1.0 - z) / 2.0, 0.0),
        ],
    )?;
    let rho_hat = psd_project(&linear)?;
    Ok(TomographyResult {
        stokes: bloch_vector(&rho_hat)?,
        raw_stokes: raw,
        rho_hat,
        std_errors,
    })
}

/// Stokes vector of `rho`, i.e. the infinite-count limit of the estimate.
pub fn expected_stokes(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let mut s = [0.0; 3];
    for basis in Basis::ALL {
        s[basis.index()] = 2.0 * basis.plus_probability(rho)? - 1.0;
    }
    Ok(s)
}

/// Bloch component of the estimate along the preparation axis of `phi`,
/// with its propagated standard error.
pub fn xi_estimate(result: &TomographyResult, phi: &PureQubit) -> (f64, f64) {
    let n = phi.bloch();
    let xi_hat = (0..3).map(|k| result.stokes[k] * n[k]).sum();
    let var: f64 = (0..3)
        .map(|k| (n[k] * result.std_errors[k]).powi(2))
        .sum();
    (xi_hat, var.sqrt())
}

/// Density matrix of a Stokes vector inside the unit ball.
pub fn state_from_stokes(s: [f64; 3]) -> Result<DensityMatrix> {
    from_bloch(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{validate_density, TOL_DENSITY};
    use crate::qubit::{resolve, to_density, MixedQubit, NamedState};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigenstates_give_deterministic_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = PureQubit::H.density();
        let rec = simulate_counts(&h, Basis::Z, 1000, &mut rng).unwrap();
        assert_eq!((rec.n_plus, rec.n_minus), (1000, 0));

        let l = resolve(&NamedState::L).unwrap().density();
        let rec = simulate_counts(&l, Basis::X, 1000, &mut rng).unwrap();
        assert_eq!(rec.n_plus, 1000);

        assert!(matches!(simulate_counts(&h, Basis::Z, 0, &mut rng), Err(Error::ZeroCounts)));
    }

    #[test]
    fn mixed_state_counts_are_binomial() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let n = 100_000u64;
        let sigma = (n as f64 * 0.25).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for basis in Basis::ALL {
            let rec = simulate_counts(&mixed, basis, n, &mut rng).unwrap();
            assert!((rec.n_plus as f64 - 50_000.0).abs() < 3.0 * sigma, "{rec:?}");
        }
    }

    #[test]
    fn exact_reconstruction_of_h_and_mixture() {
        let h = PureQubit::H.density();
        let r = reconstruct_from_stokes(expected_stokes(&h).unwrap(), [0.0; 3]).unwrap();
        assert_eq!(r.stokes, [0.0, 0.0, 1.0]);
        assert!(r.rho_hat.as_complex().max_abs_diff(h.as_complex()) < 1e-15);

        let rho = to_density(&MixedQubit { phi: PureQubit::H, xi: 0.6 }).unwrap();
        let r = reconstruct_from_stokes(expected_stokes(&rho).unwrap(), [0.0; 3]).unwrap();
        assert_abs_diff_eq!(r.stokes[2], 0.6, epsilon = 1e-15);
        let expected = ComplexMatrix::from_real_diagonal(&[0.8, 0.2]);
        assert!(r.rho_hat.as_complex().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn overlong_stokes_vector_is_projected_to_the_sphere() {
        let raw = [0.0, 0.6, 0.84];
        let len = (0.36f64 + 0.84 * 0.84).sqrt();
        assert!(len > 1.0);
        let r = reconstruct_from_stokes(raw, [0.0; 3]).unwrap();
        let out_len = r.stokes.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(out_len, 1.0, epsilon = 1e-12);
        for (s, x) in r.stokes.iter().zip(raw) {
            assert_abs_diff_eq!(*s, x / len, epsilon = 1e-12);
        }
        validate_density(r.rho_hat.as_complex(), TOL_DENSITY).unwrap();
    }

    #[test]
    fn missing_setting_is_an_error() {
        let recs = [
            CountRecord::new(Basis::X, 5, 5).unwrap(),
            CountRecord::new(Basis::Z, 5, 5).unwrap(),
        ];
        assert!(matches!(reconstruct(&recs), Err(Error::MissingSetting("Y"))));
        assert!(CountRecord::new(Basis::X, 0, 0).is_err());
    }

    #[test]
    fn xi_estimate_examples() {
        let e = resolve(&NamedState::E_DEFAULT).unwrap();
        let rho = to_density(&MixedQubit { phi: e, xi: 0.6 }).unwrap();
        let r = reconstruct_from_stokes(expected_stokes(&rho).unwrap(), [0.0; 3]).unwrap();
        assert_abs_diff_eq!(xi_estimate(&r, &e).0, 0.6, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2);
        let r = reconstruct_from_stokes(expected_stokes(&mixed).unwrap(), [0.0; 3]).unwrap();
        assert_abs_diff_eq!(xi_estimate(&r, &e).0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn std_error_stays_positive_when_saturated() {
        let rec = CountRecord::new(Basis::Z, 10_000, 0).unwrap();
        assert!(rec.std_error() > 0.0);
        assert!(rec.std_error() < 1e-3);
        let half = CountRecord::new(Basis::Z, 5_000, 5_000).unwrap();
        assert_abs_diff_eq!(half.std_error(), 0.01, epsilon = 1e-6);
    }

    #[test]
    fn measure_all_is_seeded() {
        let rho = DensityMatrix::maximally_mixed(2);
        let s = Streams::new(5);
        assert_eq!(measure_all(&rho, 1000, &s).unwrap(), measure_all(&rho, 1000, &s).unwrap());
    }
}
