//! Seeded sweeps over the input mixedness and machine-readable output.
//!
//! A sweep is a list of [`GridPoint`]s `(ζ, κ)`. [`run_ideal`] evaluates the
//! closed forms only. [`run_endtoend`] simulates the full optical chain per
//! point:
//!
//! 1. Pauli labels for both photons from the Pockels-cell pair with duty
//!    cycles `ν = (1 − ζ)/2` and `(1 − κ)/2`;
//! 2. the empirical two-photon polarization state
//!    `Σ f(i, j) σ_i|φ⟩⟨φ|σ_i ⊗ σ_j|φ⟩⟨φ|σ_j` built from the joint label
//!    frequencies;
//! 3. beam-splitter interference at the configured overlap (the
//!    purification arm) and at zero overlap (the reference arm);
//! 4. post-selection of both photons in `k_1` and Stokes tomography of one
//!    photon in each arm, which gives `ξ̂` (reference) and `ξ̂_P`
//!    (purification);
//! 5. coincidence counts behind the 50:50 splitter on `k_1` in each arm,
//!    one photon pair per trial.
//!
//! The success probability is inferred from the coincidence rates as
//! `p̂ = ½ · C(V=1) / C(V=0)`. For a polarization-independent splitter with
//! transmittance `T`, both photons leave through `k_1` with probability
//! `T(1 − T)` when distinguishable and `2T(1 − T)·p` after ideal
//! interference, so the ratio is `2p`.
//!
//! Every grid point draws from its own substream of (master seed, state,
//! grid index), so the output does not depend on the number of worker
//! threads.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    sample_joint_labels_with, ChannelPair, JointHistogram, DEFAULT_FREQUENCY,
    DEFAULT_FREQUENCY_RATIO,
};
use crate::error::{check_unit_interval, Error, Result};
use crate::optics::{
    apply_bs, bs1_coincidence, postselect_bunched, single_photon_state, two_photon_input_joint,
    BeamSplitterSpec, Port,
};
use crate::purify::closed_form;
use crate::qmath::{ComplexMatrix, DensityMatrix};
use crate::qubit::{apply_pauli, product_ket, resolve, NamedState, PauliLabel, PureQubit};
use crate::streams::Streams;
use crate::tomo::{measure_all, reconstruct, xi_estimate};

/// Gains are not reported when the reference-arm estimate `ξ̂` is below this.
pub const MIN_XI_FOR_GAIN: f64 = 0.02;

pub const DEFAULT_SEED: u64 = 20_040_501;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_COUNTS: u64 = 10_000;

/// Environment variable consulted for the seed when no flag is given.
pub const SEED_ENV: &str = "QPURIFY_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ideal,
    #[serde(rename = "endtoend")]
    EndToEnd,
}

/// Input Bloch lengths of the two photons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub zeta: f64,
    pub kappa: f64,
}

impl GridPoint {
    pub fn symmetric(xi: f64) -> Self {
        Self { zeta: xi, kappa: xi }
    }

    /// Point reached with Pockels duty cycles `nu_a`, `nu_b`.
    pub fn from_duty_cycles(nu_a: f64, nu_b: f64) -> Self {
        Self {
            zeta: 1.0 - 2.0 * nu_a,
            kappa: 1.0 - 2.0 * nu_b,
        }
    }

    pub fn xi(&self) -> f64 {
        0.5 * (self.zeta + self.kappa)
    }

    pub fn duty_cycles(&self) -> (f64, f64) {
        ((1.0 - self.zeta) / 2.0, (1.0 - self.kappa) / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub state: NamedState,
    pub grid: Vec<GridPoint>,
    pub mode: Mode,
    pub trials: usize,
    pub counts_per_setting: u64,
    pub t_h: f64,
    pub t_v: f64,
    pub overlap: f64,
    pub frequency: f64,
    pub frequency_ratio: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(state: NamedState, grid: Vec<GridPoint>, mode: Mode) -> Self {
        Self {
            state,
            grid,
            mode,
            trials: DEFAULT_TRIALS,
            counts_per_setting: DEFAULT_COUNTS,
            t_h: 0.5,
            t_v: 0.5,
            overlap: 1.0,
            frequency: DEFAULT_FREQUENCY,
            frequency_ratio: DEFAULT_FREQUENCY_RATIO,
            seed: DEFAULT_SEED,
        }
    }

    /// ξ ∈ {0.2, …, 1.0}, i.e. ν ∈ {0, 0.05, …, 0.4}.
    pub fn default_grid() -> Vec<GridPoint> {
        (2..=10).map(|k| GridPoint::symmetric(k as f64 / 10.0)).collect()
    }

    pub fn beam_splitter(&self) -> Result<BeamSplitterSpec> {
        BeamSplitterSpec::new(self.t_h, self.t_v, self.overlap)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidConfig("empty grid".into()));
        }
        for pt in &self.grid {
            check_unit_interval("zeta", pt.zeta)?;
            check_unit_interval("kappa", pt.kappa)?;
        }
        resolve(&self.state)?;
        if self.mode == Mode::EndToEnd {
            if self.trials == 0 {
                return Err(Error::InvalidConfig("trials must be at least 1".into()));
            }
            if self.counts_per_setting == 0 {
                return Err(Error::ZeroCounts);
            }
            self.beam_splitter()?;
            if !(self.frequency > 0.0) || !(self.frequency_ratio > 0.0) || self.frequency_ratio == 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "drive frequencies {} Hz and ratio {} must be positive and distinct",
                    self.frequency, self.frequency_ratio
                )));
            }
        }
        Ok(())
    }
}

/// One output row. Simulated columns are `None` for ideal runs and `eta_hat`
/// is `None` when `xi_hat` is below [`MIN_XI_FOR_GAIN`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub state: String,
    pub xi: f64,
    pub zeta: f64,
    pub kappa: f64,
    pub xi_p: f64,
    pub eta: f64,
    pub p: f64,
    pub delta_s: f64,
    pub xi_hat: Option<f64>,
    pub xi_p_hat: Option<f64>,
    pub eta_hat: Option<f64>,
    pub p_hat: Option<f64>,
    pub xi_hat_err: Option<f64>,
    pub xi_p_hat_err: Option<f64>,
    pub eta_hat_err: Option<f64>,
    pub p_hat_err: Option<f64>,
    pub seed: u64,
}

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 17] = [
    "state",
    "xi",
    "zeta",
    "kappa",
    "xi_p",
    "eta",
    "p",
    "delta_s",
    "xi_hat",
    "xi_p_hat",
    "eta_hat",
    "p_hat",
    "xi_hat_err",
    "xi_p_hat_err",
    "eta_hat_err",
    "p_hat_err",
    "seed",
];

fn ideal_record(state: &NamedState, pt: &GridPoint, seed: u64) -> RunRecord {
    let eta = closed_form::gain(pt.zeta, pt.kappa);
    RunRecord {
        state: state.label(),
        xi: pt.xi(),
        zeta: pt.zeta,
        kappa: pt.kappa,
        xi_p: closed_form::purified_xi(pt.zeta, pt.kappa),
        eta,
        p: closed_form::success_probability(pt.zeta, pt.kappa),
        delta_s: eta.log2(),
        xi_hat: None,
        xi_p_hat: None,
        eta_hat: None,
        p_hat: None,
        xi_hat_err: None,
        xi_p_hat_err: None,
        eta_hat_err: None,
        p_hat_err: None,
        seed,
    }
}

pub fn run_ideal(config: &RunConfig) -> Result<Vec<RunRecord>> {
    if config.mode != Mode::Ideal {
        return Err(Error::InvalidConfig("run_ideal needs mode = ideal".into()));
    }
    config.validate()?;
    Ok(config
        .grid
        .iter()
        .map(|pt| ideal_record(&config.state, pt, config.seed))
        .collect())
}

pub fn run_endtoend(config: &RunConfig) -> Result<Vec<RunRecord>> {
    if config.mode != Mode::EndToEnd {
        return Err(Error::InvalidConfig("run_endtoend needs mode = endtoend".into()));
    }
    config.validate()?;
    let phi = resolve(&config.state)?;
    // Keyed by state too, so sweeps over different inputs have independent noise.
    let root = Streams::new(config.seed).child(&config.state.label());
    config
        .grid
        .par_iter()
        .enumerate()
        .map(|(i, pt)| simulate_point(config, &phi, pt, &root.child_index(i as u64)))
        .collect()
}

/// Per-arm simulation output.
#[derive(Clone, Debug)]
pub struct ArmOutcome {
    pub bunched_prob: f64,
    pub single: DensityMatrix,
    pub xi_hat: f64,
    pub xi_hat_err: f64,
    pub coincidences: u64,
}

/// Empirical two-photon polarization state after the depolarizers.
pub fn empirical_input(phi: &PureQubit, hist: &JointHistogram) -> Result<DensityMatrix> {
    let mut acc = ComplexMatrix::zeros(4);
    for a in PauliLabel::ALL {
        for b in PauliLabel::ALL {
            let w = hist.joint(a, b);
            if w == 0.0 {
                continue;
            }
            let ket: DVector<Complex64> = product_ket(&apply_pauli(a, phi), &apply_pauli(b, phi));
            acc = &acc + &ComplexMatrix::outer(&ket).scale(w);
        }
    }
    crate::qmath::validate_density(&acc, crate::qmath::TOL_DENSITY)
}

fn run_arm(
    rho_ab: &DensityMatrix,
    phi: &PureQubit,
    bs: &BeamSplitterSpec,
    config: &RunConfig,
    streams: &Streams,
) -> Result<ArmOutcome> {
    let out = apply_bs(&two_photon_input_joint(rho_ab, bs.overlap)?, bs);
    let (bunched_prob, rho_sym) = postselect_bunched(&out, Port::K1)?;
    let single = single_photon_state(&rho_sym)?;
    let records = measure_all(&single, config.counts_per_setting, &streams.child("tomography"))?;
    let tomo = reconstruct(&records)?;
    let (xi_hat, xi_hat_err) = xi_estimate(&tomo, phi);
    let q = bs1_coincidence(bunched_prob.clamp(0.0, 1.0))?;
    let coincidences = Binomial::new(config.trials as u64, q)
        .map_err(|_| Error::OutOfRange {
            name: "coincidence probability",
            value: q,
            range: "[0, 1]",
        })?
        .sample(&mut streams.child("coincidences").rng());
    Ok(ArmOutcome {
        bunched_prob,
        single,
        xi_hat,
        xi_hat_err,
        coincidences,
    })
}

fn simulate_point(
    config: &RunConfig,
    phi: &PureQubit,
    pt: &GridPoint,
    streams: &Streams,
) -> Result<RunRecord> {
    let (nu_a, nu_b) = pt.duty_cycles();
    let pair = ChannelPair::from_duty_cycles(nu_a, nu_b, config.frequency, config.frequency_ratio)?;
    let labels = sample_joint_labels_with(&pair, config.trials, &streams.child("channels"))?;
    let rho_ab = empirical_input(phi, &JointHistogram::from_labels(&labels))?;

    let bs = config.beam_splitter()?;
    let purified = run_arm(&rho_ab, phi, &bs, config, &streams.child("interference"))?;
    let reference = run_arm(&rho_ab, phi, &bs.with_overlap(0.0)?, config, &streams.child("reference"))?;

    let mut rec = ideal_record(&config.state, pt, config.seed);
    rec.xi_hat = Some(reference.xi_hat);
    rec.xi_hat_err = Some(reference.xi_hat_err);
    rec.xi_p_hat = Some(purified.xi_hat);
    rec.xi_p_hat_err = Some(purified.xi_hat_err);
    if reference.xi_hat >= MIN_XI_FOR_GAIN {
        let eta_hat = purified.xi_hat / reference.xi_hat;
        let rel = ((purified.xi_hat_err / purified.xi_hat).powi(2)
            + (reference.xi_hat_err / reference.xi_hat).powi(2))
        .sqrt();
        rec.eta_hat = Some(eta_hat);
        rec.eta_hat_err = Some(eta_hat.abs() * rel);
    }
    if reference.coincidences > 0 {
        let (c1, c0) = (purified.coincidences as f64, reference.coincidences as f64);
        let p_hat = 0.5 * c1 / c0;
        rec.p_hat = Some(p_hat);
        rec.p_hat_err = Some(p_hat * (1.0 / c1.max(1.0) + 1.0 / c0).sqrt());
    }
    Ok(rec)
}

/// Parses `lo:hi:step` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("bad grid {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [lo, hi, step] => {
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            let step: f64 = step.trim().parse().map_err(|_| bad())?;
            if !(step > 0.0) || hi < lo {
                return Err(bad());
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            (0..=n)
                .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [list] => list
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidConfig(format!("unknown format {s:?}"))),
        }
    }
}

/// CSV with a header row; `None` is an empty field. LF line endings.
pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[RunRecord], out: W) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, records)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub format: Format,
    pub data_file: String,
    pub records: usize,
    pub config: RunConfig,
}

/// Sidecar manifest path: `<path>.manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `records` to `path` and the run manifest next to it.
pub fn emit(records: &[RunRecord], format: Format, path: &Path, config: &RunConfig) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| Error::Io { path: p, source }
    };
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(records, &mut out).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?,
        Format::Json => {
            write_json(records, &mut out).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
            out.write_all(b"\n").map_err(io_err(path))?;
        }
    }
    out.flush().map_err(io_err(path))?;

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        format,
        data_file: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        records: records.len(),
        config: config.clone(),
    };
    let mpath = manifest_path(path);
    let file = File::create(&mpath).map_err(io_err(&mpath))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, &manifest).map_err(|source| Error::Json {
        path: mpath.clone(),
        source,
    })?;
    out.write_all(b"\n").map_err(io_err(&mpath))?;
    out.flush().map_err(io_err(&mpath))?;
    Ok(())
}

/// Reruns the configuration stored in a manifest.
pub fn rerun(manifest: &Manifest) -> Result<Vec<RunRecord>> {
    match manifest.config.mode {
        Mode::Ideal => run_ideal(&manifest.config),
        Mode::EndToEnd => run_endtoend(&manifest.config),
    }
}
