//! JSON model files accepted by the matrix-valued subcommands.

use num_complex::Complex64;
use serde::Deserialize;
use statmech::linalg::CMat;

/// Dense complex matrix as nested `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn to_cmat(m: &JsonMatrix) -> Result<CMat, String> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err("matrix must be square and non-empty".into());
    }
    let mut out = CMat::zeros(n, n);
    for (i, row) in m.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathModel {
    pub kind: String,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub cutoff: Option<f64>,
}

impl BathModel {
    pub fn build(&self) -> Result<statmech::master::BathSpectrum, String> {
        use statmech::master::BathSpectrum;
        match self.kind.as_str() {
            "white" => Ok(BathSpectrum::WhiteNoise {
                nu: self.nu.ok_or("white bath needs nu")?,
            }),
            "ohmic" => Ok(BathSpectrum::OhmicHarmonic {
                eta: self.eta.ok_or("ohmic bath needs eta")?,
                t: self.t.ok_or("ohmic bath needs t")?,
                cutoff: self.cutoff.unwrap_or(1e3),
            }),
            "spin" => Ok(BathSpectrum::OhmicSpin {
                nu: self.nu.ok_or("spin bath needs nu")?,
                t: self.t.ok_or("spin bath needs t")?,
                cutoff: self.cutoff.unwrap_or(1e3),
            }),
            other => Err(format!("unknown bath kind {other}")),
        }
    }
}

/// `master` subcommand model: Hamiltonian, coupling/jump operators, bath.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasterModel {
    pub h: JsonMatrix,
    /// generator: "lindblad" (w = jump list), "white", "qfp", "secular"
    pub generator: String,
    #[serde(default)]
    pub w: Vec<JsonMatrix>,
    #[serde(default)]
    pub bath: Option<BathModel>,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    /// initial state; defaults to the ground state of `h`
    #[serde(default)]
    pub rho0: Option<JsonMatrix>,
}

/// `response` subcommand model.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseModel {
    pub h: JsonMatrix,
    pub a: JsonMatrix,
    #[serde(default)]
    pub b: Option<JsonMatrix>,
    pub preparation: PreparationModel,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub include_diagonal: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreparationModel {
    pub kind: String,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub e: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
}

impl PreparationModel {
    pub fn build(&self) -> Result<statmech::response::Preparation, String> {
        use statmech::response::Preparation;
        match self.kind.as_str() {
            "canonical" => Ok(Preparation::Canonical {
                beta: self.beta.ok_or("canonical preparation needs beta")?,
            }),
            "microcanonical" => Ok(Preparation::Microcanonical {
                e: self.e.ok_or("microcanonical preparation needs e")?,
                width: self.width.ok_or("microcanonical preparation needs width")?,
            }),
            other => Err(format!("unknown preparation {other}")),
        }
    }
}

/// `transport` S-matrix file.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SMatrixModel {
    pub s: JsonMatrix,
    /// lead name -> channel list
    pub leads: std::collections::BTreeMap<String, Vec<usize>>,
}

/// `transport --cycle` parametric pumping cycle.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleModel {
    /// "phase-winding": unit transmission, phase X in [0, 2 pi)
    /// "modulated": g(X) = g0 + g1 sin X with phase phi1 cos X
    pub model: String,
    #[serde(default)]
    pub g0: Option<f64>,
    #[serde(default)]
    pub g1: Option<f64>,
    #[serde(default)]
    pub phi1: Option<f64>,
    pub samples: usize,
    /// lead whose charge is counted, default "A"
    #[serde(default)]
    pub lead: Option<String>,
}

/// `noneq` protocol file.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolModel {
    pub h_a: JsonMatrix,
    pub h_b: JsonMatrix,
    /// only "linear" endpoint interpolation is defined
    #[serde(default)]
    pub interpolation: Option<String>,
    /// "cosine" (default) or "uniform" ramp
    #[serde(default)]
    pub schedule: Option<String>,
    /// also run the reversed protocol (default true, needed for Crooks)
    #[serde(default)]
    pub reverse: Option<bool>,
    pub t_final: f64,
    #[serde(default)]
    pub steps: Option<usize>,
}

/// `noneq --heat-ft` two-bath conductor model.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatFtModel {
    pub energies: Vec<f64>,
    pub t_hot: f64,
    pub t_cold: f64,
    #[serde(default)]
    pub coupling: Option<f64>,
    pub t_end: f64,
    pub n_traj: usize,
}
