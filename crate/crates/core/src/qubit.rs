//! Polarization qubits in the `(|H⟩, |V⟩)` basis, Pauli operators, the
//! singlet and the symmetric-subspace projector.
//!
//! `|H⟩` is index 0 and `|V⟩` index 1, so σ_z is diagonal and the H/V
//! analyzer measures Z.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::qmath::{c, tensor, ComplexMatrix, DensityMatrix};

/// Ellipticity angle of the `E` input state.
pub const E_THETA: f64 = 3.0 * PI / 8.0;

/// `α|H⟩ + β|V⟩` with `|α|² + |β|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureQubit {
    alpha: Complex64,
    beta: Complex64,
}

impl PureQubit {
    pub const H: PureQubit = PureQubit {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
    };
    pub const V: PureQubit = PureQubit {
        alpha: Complex64::new(0.0, 0.0),
        beta: Complex64::new(1.0, 0.0),
    };

    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    /// Normalizes `(alpha, beta)` first.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    /// Haar-random state from two normalized complex Gaussian amplitudes.
    pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let a = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let b = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
            if let Ok(q) = Self::normalized(a, b) {
                return q;
            }
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn ket(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&[self.alpha, self.beta])
    }

    pub fn inner(&self, other: &PureQubit) -> Complex64 {
        self.alpha.conj() * other.alpha + self.beta.conj() * other.beta
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::assume_valid(ComplexMatrix::outer(&self.ket()))
    }

    /// Unit Bloch vector `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)`.
    pub fn bloch(&self) -> [f64; 3] {
        let cross = self.alpha.conj() * self.beta;
        [
            2.0 * cross.re,
            2.0 * cross.im,
            self.alpha.norm_sqr() - self.beta.norm_sqr(),
        ]
    }
}

/// State with the `(−β*, α*)` phase convention, orthogonal to `phi`.
pub fn orthogonal(phi: &PureQubit) -> PureQubit {
    PureQubit {
        alpha: -phi.beta.conj(),
        beta: phi.alpha.conj(),
    }
}

/// Input states named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NamedState {
    H,
    V,
    /// `(|H⟩ + |V⟩)/√2`
    L,
    /// `cos(θ/2)|H⟩ + i sin(θ/2)|V⟩`
    E(f64),
    Custom {
        alpha: Complex64,
        beta: Complex64,
    },
}

impl NamedState {
    pub const E_DEFAULT: NamedState = NamedState::E(E_THETA);

    pub fn label(&self) -> String {
        match self {
            NamedState::H => "H".into(),
            NamedState::V => "V".into(),
            NamedState::L => "L".into(),
            NamedState::E(theta) if *theta == E_THETA => "E".into(),
            NamedState::E(theta) => format!("E:{theta}"),
            NamedState::Custom { alpha, beta } => {
                format!("{},{},{},{}", alpha.re, alpha.im, beta.re, beta.im)
            }
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    /// Accepts `H`, `V`, `L`, `E`, `E:<theta>` and
    /// `alpha_re,alpha_im,beta_re,beta_im`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "H" | "h" => return Ok(NamedState::H),
            "V" | "v" => return Ok(NamedState::V),
            "L" | "l" => return Ok(NamedState::L),
            "E" | "e" => return Ok(NamedState::E_DEFAULT),
            _ => {}
        }
        if let Some(theta) = s.strip_prefix("E:").or_else(|| s.strip_prefix("e:")) {
            let theta: f64 = theta.parse().map_err(|_| Error::ParseState(s.into()))?;
            return Ok(NamedState::E(theta));
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::ParseState(s.into()))?;
        match parts.as_slice() {
            &[ar, ai, br, bi] => Ok(NamedState::Custom {
                alpha: c(ar, ai),
                beta: c(br, bi),
            }),
            _ => Err(Error::ParseState(s.into())),
        }
    }
}

pub fn resolve(state: &NamedState) -> Result<PureQubit> {
    match *state {
        NamedState::H => Ok(PureQubit::H),
        NamedState::V => Ok(PureQubit::V),
        NamedState::L => Ok(PureQubit {
            alpha: c(FRAC_1_SQRT_2, 0.0),
            beta: c(FRAC_1_SQRT_2, 0.0),
        }),
        NamedState::E(theta) => Ok(PureQubit {
            alpha: c((theta / 2.0).cos(), 0.0),
            beta: c(0.0, (theta / 2.0).sin()),
        }),
        NamedState::Custom { alpha, beta } => PureQubit::new(alpha, beta),
    }
}

/// `ξ|φ⟩⟨φ| + (1−ξ)I/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedQubit {
    pub phi: PureQubit,
    pub xi: f64,
}

impl MixedQubit {
    pub fn new(phi: PureQubit, xi: f64) -> Result<Self> {
        check_unit_interval("xi", xi)?;
        Ok(Self { phi, xi })
    }
}

pub fn to_density(m: &MixedQubit) -> Result<DensityMatrix> {
    check_unit_interval("xi", m.xi)?;
    let perp = orthogonal(&m.phi);
    let along = ComplexMatrix::outer(&m.phi.ket()).scale((1.0 + m.xi) / 2.0);
    let across = ComplexMatrix::outer(&perp.ket()).scale((1.0 - m.xi) / 2.0);
    Ok(DensityMatrix::assume_valid(&along + &across))
}

/// `½(I + r·σ)` for a Bloch vector with `|r| ≤ 1`.
pub fn from_bloch(r: [f64; 3]) -> Result<DensityMatrix> {
    let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len > 1.0 + 1e-12 {
        return Err(Error::OutOfRange {
            name: "Bloch length",
            value: len,
            range: "[0, 1]",
        });
    }
    let m = ComplexMatrix::from_rows(
        2,
        &[
            c((1.0 + r[2]) / 2.0, 0.0),
            c(r[0] / 2.0, -r[1] / 2.0),
            c(r[0] / 2.0, r[1] / 2.0),
            c((1.0 - r[2]) / 2.0, 0.0),
        ],
    )?;
    Ok(DensityMatrix::assume_valid(m))
}

/// `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)`.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    let off = rho.get(1, 0);
    Ok([
        2.0 * off.re,
        2.0 * off.im,
        (rho.get(0, 0) - rho.get(1, 1)).re,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

pub fn pauli(label: PauliLabel) -> ComplexMatrix {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match label {
        PauliLabel::I => [one, o, o, one],
        PauliLabel::X => [o, one, one, o],
        PauliLabel::Y => [o, -i, i, o],
        PauliLabel::Z => [one, o, o, -one],
    };
    ComplexMatrix::from_rows(2, &entries).expect("constant Pauli matrix")
}

/// `σ|φ⟩`
pub fn apply_pauli(label: PauliLabel, phi: &PureQubit) -> PureQubit {
    let (a, b) = (phi.alpha, phi.beta);
    let (alpha, beta) = match label {
        PauliLabel::I => (a, b),
        PauliLabel::X => (b, a),
        PauliLabel::Y => (c(0.0, -1.0) * b, c(0.0, 1.0) * a),
        PauliLabel::Z => (a, -b),
    };
    PureQubit { alpha, beta }
}

/// `(|HV⟩ − |VH⟩)/√2`
pub fn singlet() -> DVector<Complex64> {
    DVector::from_column_slice(&[
        c(0.0, 0.0),
        c(FRAC_1_SQRT_2, 0.0),
        c(-FRAC_1_SQRT_2, 0.0),
        c(0.0, 0.0),
    ])
}

/// `Π = I − |Ψ⁻⟩⟨Ψ⁻|` on two qubits.
pub fn symmetric_projector() -> ComplexMatrix {
    &ComplexMatrix::identity(4) - &ComplexMatrix::outer(&singlet())
}

/// `|a⟩ ⊗ |b⟩`
pub fn product_ket(a: &PureQubit, b: &PureQubit) -> DVector<Complex64> {
    a.ket().kronecker(&b.ket())
}

/// `U ⊗ U` for a single-qubit `U`.
pub fn local_pair(u: &ComplexMatrix) -> ComplexMatrix {
    tensor(u, u)
}

/// Haar-random single-qubit unitary built from a Haar-random first column
/// and a uniform global phase.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let col = PureQubit::haar_random(rng);
    let perp = orthogonal(&col);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    ComplexMatrix::from_rows(
        2,
        &[
            col.alpha * phase,
            perp.alpha * phase,
            col.beta * phase,
            perp.beta * phase,
        ],
    )
    .expect("finite unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{validate_density, TOL_DENSITY};
    use approx::assert_abs_diff_eq;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn resolve_named_states() {
        assert_eq!(resolve(&NamedState::H).unwrap(), PureQubit::H);
        let l = resolve(&NamedState::L).unwrap();
        assert_abs_diff_eq!(l.alpha().re, FRAC_1_SQRT_2);
        assert_abs_diff_eq!(l.beta().re, FRAC_1_SQRT_2);
        let e = resolve(&NamedState::E_DEFAULT).unwrap();
        assert!(close(e.alpha(), c((3.0 * PI / 16.0).cos(), 0.0)));
        assert!(close(e.beta(), c(0.0, (3.0 * PI / 16.0).sin())));
    }

    #[test]
    fn resolve_rejects_unnormalized_custom() {
        let s = NamedState::Custom {
            alpha: c(1.0, 0.0),
            beta: c(1.0, 0.0),
        };
        assert!(matches!(resolve(&s), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn parse_state_strings() {
        assert_eq!("H".parse::<NamedState>().unwrap(), NamedState::H);
        assert_eq!("E".parse::<NamedState>().unwrap(), NamedState::E_DEFAULT);
        assert_eq!("E:0.5".parse::<NamedState>().unwrap(), NamedState::E(0.5));
        let custom: NamedState = "0.6,0,0,0.8".parse().unwrap();
        let q = resolve(&custom).unwrap();
        assert!(close(q.beta(), c(0.0, 0.8)));
        assert!("Q".parse::<NamedState>().is_err());
        assert!("1,2,3".parse::<NamedState>().is_err());
        assert_eq!(NamedState::E_DEFAULT.label(), "E");
    }

    #[test]
    fn orthogonal_convention() {
        assert_eq!(orthogonal(&PureQubit::H), PureQubit::V);
        let l = resolve(&NamedState::L).unwrap();
        let lp = orthogonal(&l);
        assert!(close(lp.alpha(), c(-FRAC_1_SQRT_2, 0.0)));
        assert!(close(lp.beta(), c(FRAC_1_SQRT_2, 0.0)));
        let e = resolve(&NamedState::E_DEFAULT).unwrap();
        assert!(e.inner(&orthogonal(&e)).norm() < 1e-12);
    }

    #[test]
    fn to_density_examples() {
        let pure = to_density(&MixedQubit::new(PureQubit::H, 1.0).unwrap()).unwrap();
        assert!(pure.as_complex().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);

        let e = resolve(&NamedState::E_DEFAULT).unwrap();
        let mixed = to_density(&MixedQubit { phi: e, xi: 0.0 }).unwrap();
        assert!(mixed.as_complex().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);

        let part = to_density(&MixedQubit { phi: PureQubit::H, xi: 0.6 }).unwrap();
        assert!(part.as_complex().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.8, 0.2])) < 1e-15);

        assert!(MixedQubit::new(PureQubit::H, 1.2).is_err());
        assert!(to_density(&MixedQubit { phi: PureQubit::H, xi: -0.1 }).is_err());
    }

    #[test]
    fn pauli_action_and_algebra() {
        let h = PureQubit::H.ket();
        assert_eq!(pauli(PauliLabel::Z).apply(&h), h);
        assert_eq!(pauli(PauliLabel::X).apply(&h), PureQubit::V.ket());
        let xz = &pauli(PauliLabel::X) * &pauli(PauliLabel::Z);
        let minus_i_y = ComplexMatrix::from_rows(
            2,
            &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(xz, minus_i_y);
        for label in PauliLabel::ALL {
            let p = pauli(label);
            assert_eq!(p.adjoint(), p);
            assert!((&p * &p).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn apply_pauli_matches_matrix() {
        let e = resolve(&NamedState::E_DEFAULT).unwrap();
        for label in PauliLabel::ALL {
            let direct = apply_pauli(label, &e).ket();
            let via_matrix = pauli(label).apply(&e.ket());
            assert!((direct - via_matrix).norm() < 1e-15);
        }
    }

    #[test]
    fn symmetric_projector_examples() {
        let pi = symmetric_projector();
        assert!((&pi * &pi).max_abs_diff(&pi) < 1e-15);
        assert_eq!(pi.adjoint(), pi);
        assert_abs_diff_eq!(pi.trace().re, 3.0, epsilon = 1e-15);

        let hh = product_ket(&PureQubit::H, &PureQubit::H);
        assert!((pi.apply(&hh) - &hh).norm() < 1e-15);
        assert!(pi.apply(&singlet()).norm() < 1e-15);

        let hv = product_ket(&PureQubit::H, &PureQubit::V);
        let vh = product_ket(&PureQubit::V, &PureQubit::H);
        let expected = (hv.clone() + vh) * c(0.5, 0.0);
        assert!((pi.apply(&hv) - expected).norm() < 1e-15);
    }

    #[test]
    fn bloch_round_trip() {
        let e = resolve(&NamedState::E_DEFAULT).unwrap();
        let r = e.bloch();
        assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], E_THETA.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(r[2], E_THETA.cos(), epsilon = 1e-15);
        let rho = e.density();
        let back = bloch_vector(&rho).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(back[k], r[k], epsilon = 1e-15);
        }
        let again = from_bloch(back).unwrap();
        assert!(again.as_complex().max_abs_diff(rho.as_complex()) < 1e-15);
        assert!(validate_density(again.as_complex(), TOL_DENSITY).is_ok());
        assert!(from_bloch([1.0, 1.0, 0.0]).is_err());
    }
}
