//! Purification by projection onto the symmetric subspace of two qubits.
//!
//! Inputs of the form `ρ_a = ζ|φ⟩⟨φ| + (1−ζ)I/2`, `ρ_b = κ|φ⟩⟨φ| + (1−κ)I/2`
//! are projected with `Π = I − |Ψ⁻⟩⟨Ψ⁻|`. On success, with probability
//! `p = (3 + ζκ)/4`, both qubits end up in the isotropic mixture with Bloch
//! length `ξ_P = 2(ζ + κ)/(3 + ζκ)`. The gain `η = ξ_P/ξ` over the average
//! input `ξ = (ζ + κ)/2` is `4/(3 + ζκ) = 1/p`.
//!
//! [`purify_pair`] evaluates the projection numerically; [`closed_form`]
//! holds the analytic expressions.

use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::qmath::{
    partial_trace, relative_entropy, DensityMatrix, Keep,
};
use crate::qubit::{
    bloch_vector, product_ket, singlet, symmetric_projector, to_density, MixedQubit, PureQubit,
};

/// Projections with success probability below this are rejected.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-12;

/// Analytic expressions for the isotropic-mixture family.
pub mod closed_form {
    /// `(3 + ζκ)/4`
    pub fn success_probability(zeta: f64, kappa: f64) -> f64 {
        (3.0 + zeta * kappa) / 4.0
    }

    /// `4/(3 + ζκ)`
    pub fn gain(zeta: f64, kappa: f64) -> f64 {
        4.0 / (3.0 + zeta * kappa)
    }

    /// `2(ζ + κ)/(3 + ζκ)`
    pub fn purified_xi(zeta: f64, kappa: f64) -> f64 {
        2.0 * (zeta + kappa) / (3.0 + zeta * kappa)
    }

    /// `log₂ η`, bits.
    pub fn information_gain(zeta: f64, kappa: f64) -> f64 {
        gain(zeta, kappa).log2()
    }
}

#[derive(Clone, Debug)]
pub struct PurificationOutcome {
    pub rho_out: DensityMatrix,
    pub rho_single: DensityMatrix,
    /// Success probability `Tr[Π ρ Π]`.
    pub p: f64,
    /// Average input Bloch length `(ζ + κ)/2`.
    pub xi: f64,
    /// Bloch component of `rho_single` along `φ`.
    pub xi_p: f64,
    /// `ξ_P / ξ`, or the `ξ → 0` limit `1/p` when both inputs are fully mixed.
    pub eta: f64,
}

/// `ΠρΠ / Tr[ΠρΠ]` together with `Tr[ΠρΠ]`.
pub fn project_symmetric(rho_ab: &DensityMatrix) -> Result<(f64, DensityMatrix)> {
    if rho_ab.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho_ab.dim(),
        });
    }
    let pi = symmetric_projector();
    let projected = rho_ab.as_complex().conjugate_by(&pi);
    let p = projected.trace().re;
    if p < MIN_SUCCESS_PROBABILITY {
        return Err(Error::NoSymmetricComponent { p });
    }
    Ok((p, DensityMatrix::assume_valid(projected.scale(1.0 / p))))
}

/// `ρ_a ⊗ ρ_b` for the isotropic mixtures around `phi`.
pub fn input_pair(phi: &PureQubit, zeta: f64, kappa: f64) -> Result<DensityMatrix> {
    let rho_a = to_density(&MixedQubit::new(*phi, zeta)?)?;
    let rho_b = to_density(&MixedQubit::new(*phi, kappa)?)?;
    Ok(rho_a.tensor(&rho_b))
}

/// Bloch component of a single-qubit state along the axis of `phi`.
pub fn bloch_along(rho: &DensityMatrix, phi: &PureQubit) -> Result<f64> {
    let r = bloch_vector(rho)?;
    let n = phi.bloch();
    Ok(r[0] * n[0] + r[1] * n[1] + r[2] * n[2])
}

pub fn purify_pair(phi: &PureQubit, zeta: f64, kappa: f64) -> Result<PurificationOutcome> {
    check_unit_interval("zeta", zeta)?;
    check_unit_interval("kappa", kappa)?;
    let (p, rho_out) = project_symmetric(&input_pair(phi, zeta, kappa)?)?;
    let rho_single =
        DensityMatrix::assume_valid(partial_trace(rho_out.as_complex(), Keep::First)?);
    let xi = 0.5 * (zeta + kappa);
    let xi_p = bloch_along(&rho_single, phi)?;
    let eta = if xi > 1e-9 { xi_p / xi } else { 1.0 / p };
    Ok(PurificationOutcome {
        rho_out,
        rho_single,
        p,
        xi,
        xi_p,
        eta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GainPoint {
    pub xi: f64,
    pub xi_p: f64,
    pub eta: f64,
    pub p: f64,
}

/// Closed-form `(ξ, ξ_P, η, p)` for equal inputs `ζ = κ = ξ`.
pub fn gain_curve(xi_grid: &[f64]) -> Result<Vec<GainPoint>> {
    xi_grid
        .iter()
        .map(|&xi| {
            check_unit_interval("xi", xi)?;
            Ok(GainPoint {
                xi,
                xi_p: closed_form::purified_xi(xi, xi),
                eta: closed_form::gain(xi, xi),
                p: closed_form::success_probability(xi, xi),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InformationGain {
    /// `S(|φφ⟩ ‖ ρ_in)`, bits.
    pub s_in: f64,
    /// `S(|φφ⟩ ‖ ρ_out)`, bits.
    pub s_out: f64,
    pub delta_s: f64,
}

/// Relative entropies of the ideal pair `|φφ⟩` to the noisy and to the
/// purified two-qubit states.
pub fn info_gain(phi: &PureQubit, zeta: f64, kappa: f64) -> Result<InformationGain> {
    let target = DensityMatrix::pure(&product_ket(phi, phi))?;
    let rho_in = input_pair(phi, zeta, kappa)?;
    let (_, rho_out) = project_symmetric(&rho_in)?;
    let s_in = relative_entropy(&target, &rho_in)?;
    let s_out = relative_entropy(&target, &rho_out)?;
    let delta_s = if s_in.is_infinite() && s_out.is_infinite() {
        f64::NAN
    } else {
        s_in - s_out
    };
    Ok(InformationGain {
        s_in,
        s_out,
        delta_s,
    })
}

/// `⟨Ψ⁻|ρ|Ψ⁻⟩`
pub fn singlet_weight(rho_ab: &DensityMatrix) -> Result<f64> {
    Ok(rho_ab.as_complex().expectation(&singlet())?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{fidelity_pure, ComplexMatrix};
    use approx::assert_abs_diff_eq;

    /// Projected output in the `{φφ, φφ⊥, φ⊥φ, φ⊥φ⊥}` basis.
    fn projected_matrix(xi: f64) -> ComplexMatrix {
        let n = 1.0 / (3.0 + xi * xi);
        let m = (1.0 - xi * xi) / 2.0;
        ComplexMatrix::from_real_rows(
            4,
            &[
                (1.0 + xi).powi(2) * n, 0.0, 0.0, 0.0, //
                0.0, m * n, m * n, 0.0, //
                0.0, m * n, m * n, 0.0, //
                0.0, 0.0, 0.0, (1.0 - xi).powi(2) * n,
            ],
        )
        .unwrap()
    }

    #[test]
    fn project_already_symmetric_state() {
        let hh = DensityMatrix::pure(&product_ket(&PureQubit::H, &PureQubit::H)).unwrap();
        let (p, out) = project_symmetric(&hh).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
        assert!(out.as_complex().max_abs_diff(hh.as_complex()) < 1e-15);
    }

    #[test]
    fn project_singlet_fails() {
        let s = DensityMatrix::pure(&singlet()).unwrap();
        assert!(matches!(project_symmetric(&s), Err(Error::NoSymmetricComponent { .. })));
        assert!(project_symmetric(&DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn project_half_depolarized_pair() {
        let rho = input_pair(&PureQubit::H, 0.5, 0.5).unwrap();
        let (p, out) = project_symmetric(&rho).unwrap();
        assert_abs_diff_eq!(p, 13.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p, closed_form::success_probability(0.5, 0.5), epsilon = 1e-15);
        assert!(out.as_complex().max_abs_diff(&projected_matrix(0.5)) < 1e-15);
        let single = partial_trace(out.as_complex(), Keep::First).unwrap();
        let xp = 8.0 / 13.0;
        let expected = ComplexMatrix::from_real_diagonal(&[(1.0 + xp) / 2.0, (1.0 - xp) / 2.0]);
        assert!(single.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn purify_pair_examples() {
        let pure = purify_pair(&PureQubit::H, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(pure.xi_p, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pure.p, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pure.eta, 1.0, epsilon = 1e-15);

        let cloning = purify_pair(&PureQubit::H, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(cloning.eta, 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cloning.p, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(cloning.xi_p, 2.0 / 3.0, epsilon = 1e-15);
        let f = fidelity_pure(&PureQubit::H.ket(), &cloning.rho_single).unwrap();
        assert_abs_diff_eq!(f, 5.0 / 6.0, epsilon = 1e-15);

        let half = purify_pair(&PureQubit::H, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(half.xi_p, 8.0 / 13.0, epsilon = 1e-12);
        assert_abs_diff_eq!(half.p, 13.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(half.eta, 16.0 / 13.0, epsilon = 1e-12);

        let mixed = purify_pair(&PureQubit::H, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(mixed.xi_p, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mixed.eta, 4.0 / 3.0, epsilon = 1e-15);

        assert!(purify_pair(&PureQubit::H, 1.5, 0.0).is_err());
        assert!(purify_pair(&PureQubit::H, 0.5, -0.1).is_err());
    }

    #[test]
    fn gain_curve_examples() {
        let pts = gain_curve(&[0.0, 1.0, 0.5]).unwrap();
        assert_eq!(pts[0], GainPoint { xi: 0.0, xi_p: 0.0, eta: 4.0 / 3.0, p: 0.75 });
        assert_eq!(pts[1], GainPoint { xi: 1.0, xi_p: 1.0, eta: 1.0, p: 1.0 });
        assert_abs_diff_eq!(pts[2].xi_p, 8.0 / 13.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pts[2].eta, 16.0 / 13.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pts[2].p, 13.0 / 16.0, epsilon = 1e-15);
        assert!(gain_curve(&[0.5, 1.01]).is_err());
    }

    #[test]
    fn gain_curve_is_monotone() {
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let pts = gain_curve(&grid).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].eta < w[0].eta);
            assert!(w[1].p > w[0].p);
        }
    }

    #[test]
    fn info_gain_examples() {
        let none = info_gain(&PureQubit::H, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(none.delta_s, 0.0, epsilon = 1e-12);

        let cloning = info_gain(&PureQubit::H, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(cloning.s_in, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cloning.s_out, 1.0 - (4.0f64 / 3.0).log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(cloning.delta_s, (4.0f64 / 3.0).log2(), epsilon = 1e-10);
        assert_abs_diff_eq!(cloning.delta_s, -(0.75f64).log2(), epsilon = 1e-10);

        let half = info_gain(&PureQubit::H, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(half.delta_s, (16.0f64 / 13.0).log2(), epsilon = 1e-10);
    }

    #[test]
    fn outputs_live_in_symmetric_subspace() {
        let out = purify_pair(&PureQubit::H, 0.3, 0.8).unwrap();
        assert!(singlet_weight(&out.rho_out).unwrap().abs() < 1e-12);
    }
}
