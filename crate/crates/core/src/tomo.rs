//! Pauli-basis state tomography by linear inversion, and fidelity.
//!
//! Settings are enumerated lexicographically over {X, Y, Z}: for m = 4,
//! g = 1 is XXXX and g = 81 is ZZZZ. Outcome bit `k` of a setting belongs to
//! the k-th tomography qubit, most significant first; bit 0 ↔ eigenvalue +1.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::{decompose_gate, Circuit, Gate, C64};
use crate::density::{rebuild, DensityMatrix};
use crate::error::{Error, Result};
use crate::sim::{OutcomeDistribution, StateVector};

const NORM_TOL: f64 = 1e-6;
const HERMITIAN_TOL: f64 = 1e-6;
const PURITY_TOL: f64 = 1e-9;
const NEGATIVE_EIG_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn symbol(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    fn from_symbol(c: char) -> Option<Basis> {
        match c {
            'X' => Some(Basis::X),
            'Y' => Some(Basis::Y),
            'Z' => Some(Basis::Z),
            _ => None,
        }
    }

    /// Pauli index 1, 2, 3.
    pub fn pauli_index(self) -> usize {
        self as usize + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementSetting {
    bases: Vec<Basis>,
    index: usize,
}

impl MeasurementSetting {
    /// The g-th setting (1-based) on `m` qubits.
    pub fn from_index(m: usize, g: usize) -> Result<Self> {
        let total = 3usize.pow(m as u32);
        if m == 0 || g == 0 || g > total {
            return Err(Error::InvalidArgument(format!("setting {g} out of 1..={total}")));
        }
        let mut rest = g - 1;
        let mut bases = vec![Basis::X; m];
        for k in (0..m).rev() {
            bases[k] = Basis::ALL[rest % 3];
            rest /= 3;
        }
        Ok(MeasurementSetting { bases, index: g })
    }

    pub fn parse(label: &str) -> Result<Self> {
        let bases = label
            .chars()
            .map(Basis::from_symbol)
            .collect::<Option<Vec<_>>>()
            .filter(|b| !b.is_empty())
            .ok_or_else(|| Error::InvalidArgument(format!("bad setting label `{label}`")))?;
        let index = 1 + bases.iter().fold(0, |acc, &b| acc * 3 + b as usize);
        Ok(MeasurementSetting { bases, index })
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn num_qubits(&self) -> usize {
        self.bases.len()
    }

    pub fn label(&self) -> String {
        self.bases.iter().map(|b| b.symbol()).collect()
    }
}

pub fn all_settings(m: usize) -> Vec<MeasurementSetting> {
    (1..=3usize.pow(m as u32))
        .map(|g| MeasurementSetting::from_index(m, g).expect("index in range"))
        .collect()
}

/// Basis-change gates (already in basis form) mapping each qubit's
/// measurement basis onto Z: X → H, Y → S† then H.
pub fn basis_change_gates(setting: &MeasurementSetting, qubits: &[usize]) -> Vec<Gate> {
    let mut out = Vec::new();
    for (&b, &q) in setting.bases().iter().zip(qubits) {
        match b {
            Basis::X => out.extend(decompose_gate(&Gate::h(q))),
            Basis::Y => {
                out.push(Gate::rz(q, -FRAC_PI_2));
                out.extend(decompose_gate(&Gate::h(q)));
            }
            Basis::Z => {}
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomographyCircuit {
    pub setting: MeasurementSetting,
    pub circuit: Circuit,
    pub measured: Vec<usize>,
}

/// All 3^m tomography circuits for `base` over `qubits`.
pub fn tomography_circuits(base: &Circuit, qubits: &[usize]) -> Result<Vec<TomographyCircuit>> {
    if qubits.is_empty() {
        return Err(Error::InvalidArgument("no tomography qubits".into()));
    }
    all_settings(qubits.len())
        .into_iter()
        .map(|setting| {
            let mut circuit = base.clone();
            circuit.extend(basis_change_gates(&setting, qubits))?;
            circuit.set_label(format!("{} | tomo {}", base.label(), setting.label()));
            Ok(TomographyCircuit {
                setting,
                circuit,
                measured: qubits.to_vec(),
            })
        })
        .collect()
}

/// Eigenvalue of outcome `x` for the full m-qubit product observable.
pub fn eigenvalue_sign(x: usize) -> f64 {
    if x.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Σ_x P_x a_x without any normalization check.
pub fn parity_sum(probs: &[f64]) -> f64 {
    probs.iter().enumerate().map(|(x, p)| p * eigenvalue_sign(x)).sum()
}

pub fn expectation_from_probs(probs: &[f64], setting: &MeasurementSetting) -> Result<f64> {
    if probs.len() != 1 << setting.num_qubits() {
        return Err(Error::InvalidArgument(format!(
            "{} outcomes for setting {}",
            probs.len(),
            setting.label()
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized { sum });
    }
    Ok(parity_sum(probs))
}

pub fn expectation_value(dist: &OutcomeDistribution, setting: &MeasurementSetting) -> Result<f64> {
    expectation_from_probs(&dist.probabilities(), setting)
}

/// How a Pauli expectation S_l is sourced when several settings carry it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SParamMode {
    /// Average over every setting that agrees on the non-identity positions.
    #[default]
    Average,
    /// Use only the setting that measures Z on the identity positions.
    Single,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub rho: DensityMatrix,
    /// S_{l_1..l_m} indexed by base-4 digits, l_1 most significant.
    pub s_params: Vec<f64>,
}

impl Reconstruction {
    pub fn s_param_labels(&self) -> Vec<(String, f64)> {
        let m = self.rho.num_qubits();
        self.s_params
            .iter()
            .enumerate()
            .map(|(l, &v)| (pauli_label(l, m), v))
            .collect()
    }
}

pub fn pauli_label(l: usize, m: usize) -> String {
    (0..m)
        .map(|k| ['I', 'X', 'Y', 'Z'][(l >> (2 * (m - 1 - k))) & 3])
        .collect()
}

fn digit(l: usize, k: usize, m: usize) -> usize {
    (l >> (2 * (m - 1 - k))) & 3
}

/// Linear-inversion reconstruction from per-setting probabilities ordered
/// by setting index.
pub fn reconstruct(results: &[Vec<f64>], m: usize, mode: SParamMode) -> Result<Reconstruction> {
    let total = 3usize.pow(m as u32);
    if m == 0 || results.len() != total {
        return Err(Error::InvalidArgument(format!(
            "{} settings given for {m} qubits (need {total})",
            results.len()
        )));
    }
    for (g, p) in results.iter().enumerate() {
        if p.len() != 1 << m {
            return Err(Error::InvalidArgument(format!(
                "setting {} has {} outcomes, expected {}",
                g + 1,
                p.len(),
                1 << m
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { sum });
        }
    }
    let settings = all_settings(m);

    let mut s_params = vec![0.0; 1 << (2 * m)];
    for (l, s) in s_params.iter_mut().enumerate() {
        let pattern: Vec<usize> = (0..m).map(|k| digit(l, k, m)).collect();
        if pattern.iter().all(|&d| d == 0) {
            *s = 1.0;
            continue;
        }
        let mut acc = 0.0;
        let mut used = 0usize;
        for (setting, probs) in settings.iter().zip(results) {
            let consistent = pattern.iter().zip(setting.bases()).all(|(&d, b)| {
                if d == 0 {
                    mode == SParamMode::Average || *b == Basis::Z
                } else {
                    d == b.pauli_index()
                }
            });
            if !consistent {
                continue;
            }
            let mask: usize = (0..m)
                .filter(|&k| pattern[k] != 0)
                .map(|k| 1 << (m - 1 - k))
                .sum();
            acc += probs
                .iter()
                .enumerate()
                .map(|(x, p)| p * eigenvalue_sign(x & mask))
                .sum::<f64>();
            used += 1;
        }
        *s = acc / used as f64;
    }

    let dim = 1usize << m;
    let scale = 1.0 / dim as f64;
    let i = C64::new(0.0, 1.0);
    let mut rho = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for r in 0..dim {
        for c in 0..dim {
            // Only two Paulis per position have a nonzero (r_k, c_k) entry.
            let mut entry = C64::new(0.0, 0.0);
            for choice in 0..dim {
                let mut l = 0usize;
                let mut coeff = C64::new(1.0, 0.0);
                for k in 0..m {
                    let rb = (r >> (m - 1 - k)) & 1;
                    let cb = (c >> (m - 1 - k)) & 1;
                    let pick = (choice >> (m - 1 - k)) & 1;
                    let d = match (rb == cb, pick) {
                        (true, 0) => 0,
                        (true, _) => {
                            if rb == 1 {
                                coeff = -coeff;
                            }
                            3
                        }
                        (false, 0) => 1,
                        (false, _) => {
                            coeff *= if rb == 0 { -i } else { i };
                            2
                        }
                    };
                    l = (l << 2) | d;
                }
                entry += coeff * s_params[l];
            }
            rho[(r, c)] = entry * scale;
        }
    }
    Ok(Reconstruction {
        rho: DensityMatrix::from_matrix(rho)?,
        s_params,
    })
}

/// [`reconstruct`] from a map keyed by basis label ("ZXYZ").
pub fn reconstruct_map(
    results: &BTreeMap<String, Vec<f64>>,
    m: usize,
    mode: SParamMode,
) -> Result<Reconstruction> {
    let ordered = all_settings(m)
        .iter()
        .map(|s| {
            results
                .get(&s.label())
                .cloned()
                .ok_or_else(|| Error::MissingSetting(s.label()))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(k) = results.keys().find(|k| k.len() != m) {
        return Err(Error::InvalidArgument(format!(
            "setting `{k}` does not have {m} qubits"
        )));
    }
    reconstruct(&ordered, m, mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    /// Fidelity evaluated on the PSD-projected ρ′ when projection was needed.
    pub fidelity: f64,
    /// ⟨Φ|ρ′|Φ⟩ on the raw reconstruction, when the reference is pure.
    pub raw_overlap: Option<f64>,
    /// Whether ρ′ had negative eigenvalues and was projected.
    pub projected: bool,
}

fn psd_if_needed(rho_prime: &DensityMatrix) -> (DensityMatrix, bool) {
    let (vals, _) = rho_prime.eigen();
    if vals[0] < -NEGATIVE_EIG_TOL {
        let (p, _) = rho_prime.psd_projection();
        (p, true)
    } else {
        (rho_prime.clone(), false)
    }
}

fn overlap(phi: &[C64], rho: &DensityMatrix) -> f64 {
    let d = phi.len();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            acc += phi[r].conj() * rho.get(r, c) * phi[c];
        }
    }
    acc.re
}

/// Fidelity against a pure reference |Φ⟩: ⟨Φ|ρ′|Φ⟩.
pub fn fidelity_to_pure(phi: &StateVector, rho_prime: &DensityMatrix) -> Result<FidelityReport> {
    if phi.amplitudes().len() != rho_prime.dim() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    rho_prime.check_hermitian(HERMITIAN_TOL)?;
    let (psd, projected) = psd_if_needed(rho_prime);
    Ok(FidelityReport {
        fidelity: overlap(phi.amplitudes(), &psd),
        raw_overlap: Some(overlap(phi.amplitudes(), rho_prime)),
        projected,
    })
}

/// (Tr √(√ρ ρ′ √ρ))² through Hermitian eigendecompositions.
pub fn fidelity_general(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<f64> {
    if rho.dim() != rho_prime.dim() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let (vals, vecs) = rho.eigen();
    let roots: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    let sqrt_rho = rebuild(&vecs, &roots);
    let inner = &sqrt_rho * rho_prime.matrix() * &sqrt_rho;
    let (mu, _) = DensityMatrix::from_matrix(inner)?.eigen();
    let tr: f64 = mu.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}

/// Fidelity of ρ′ against the reference ρ. Uses the rank-1 shortcut when ρ
/// is pure; a ρ′ with negative eigenvalues is PSD-projected first.
pub fn fidelity(rho: &DensityMatrix, rho_prime: &DensityMatrix) -> Result<FidelityReport> {
    rho.check_hermitian(HERMITIAN_TOL)?;
    rho_prime.check_hermitian(HERMITIAN_TOL)?;
    if rho.dim() != rho_prime.dim() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    if (rho.purity() - 1.0).abs() < PURITY_TOL {
        let (_, vecs) = rho.eigen();
        let top = vecs.column(rho.dim() - 1);
        let phi: Vec<C64> = top.iter().copied().collect();
        let phi = StateVector::from_amplitudes(phi)?;
        return fidelity_to_pure(&phi, rho_prime);
    }
    let (psd, projected) = psd_if_needed(rho_prime);
    Ok(FidelityReport {
        fidelity: fidelity_general(rho, &psd)?,
        raw_overlap: None,
        projected,
    })
}
