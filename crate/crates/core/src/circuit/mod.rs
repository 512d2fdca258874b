//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered gate list over a fixed register; order is
//! execution order. Qubit 0 is the most significant bit of a basis-state
//! index everywhere in this crate, and a gate's local matrix treats its first
//! target as the most significant bit.

mod decompose;
mod fold;

pub use decompose::{decompose_gate, decompose_to_basis, zsx_angles};
pub use fold::{achieved_lambda, fold_global, fold_local, local_fold_count, FoldMode, FoldSpec};

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const PREP_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    /// √X.
    Sx,
    /// √X†, needed so the adjoint of `Sx` is still a single basis gate.
    SxDg,
    /// Rotation about Z by the angle in radians.
    Rz(f64),
    SDg,
    Cx,
    Ccx,
    Cswap,
    /// Unitary with first column (α, β): prepares α|0⟩ + β|1⟩ from |0⟩.
    Prep1q { alpha: C64, beta: C64 },
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Sx => "sx",
            GateKind::SxDg => "sxdg",
            GateKind::Rz(_) => "rz",
            GateKind::SDg => "sdg",
            GateKind::Cx => "cx",
            GateKind::Ccx => "ccx",
            GateKind::Cswap => "cswap",
            GateKind::Prep1q { .. } => "prep1q",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cx => 2,
            GateKind::Ccx | GateKind::Cswap => 3,
            _ => 1,
        }
    }

    pub fn is_basis(&self) -> bool {
        matches!(
            self,
            GateKind::X | GateKind::Sx | GateKind::SxDg | GateKind::Rz(_) | GateKind::Cx
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} takes {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::InvalidGate(format!(
                    "{} has repeated target {t}",
                    kind.name()
                )));
            }
        }
        match kind {
            GateKind::Rz(theta) if !theta.is_finite() => {
                return Err(Error::InvalidGate("rz angle is not finite".into()))
            }
            GateKind::Prep1q { alpha, beta } => {
                let norm = alpha.norm_sqr() + beta.norm_sqr();
                if (norm - 1.0).abs() > PREP_NORM_TOL {
                    return Err(Error::InvalidGate(format!(
                        "prep1q amplitudes have norm {norm}"
                    )));
                }
            }
            _ => {}
        }
        Ok(Gate { kind, targets })
    }

    fn fixed(kind: GateKind, targets: Vec<usize>) -> Self {
        Self::new(kind, targets).expect("static gate arity")
    }

    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, vec![q])
    }
    pub fn sx(q: usize) -> Self {
        Self::fixed(GateKind::Sx, vec![q])
    }
    pub fn sxdg(q: usize) -> Self {
        Self::fixed(GateKind::SxDg, vec![q])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::fixed(GateKind::Rz(theta), vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::fixed(GateKind::SDg, vec![q])
    }
    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::Cx, vec![control, target])
    }
    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Self::fixed(GateKind::Ccx, vec![c0, c1, target])
    }
    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self::fixed(GateKind::Cswap, vec![control, a, b])
    }
    pub fn prep(q: usize, alpha: C64, beta: C64) -> Result<Self> {
        Self::new(GateKind::Prep1q { alpha, beta }, vec![q])
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_basis(&self) -> bool {
        self.kind.is_basis()
    }

    /// Inverse gate, staying inside the basis alphabet.
    pub fn adjoint(&self) -> Result<Gate> {
        let kind = match self.kind {
            GateKind::X => GateKind::X,
            GateKind::Sx => GateKind::SxDg,
            GateKind::SxDg => GateKind::Sx,
            GateKind::Rz(theta) => GateKind::Rz(-theta),
            GateKind::Cx => GateKind::Cx,
            _ => {
                return Err(Error::NotInBasis {
                    gate: self.kind.name().into(),
                })
            }
        };
        Ok(Gate {
            kind,
            targets: self.targets.clone(),
        })
    }

    /// Dense row-major unitary on the gate's own targets (first target = MSB).
    pub fn matrix(&self) -> Vec<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self.kind {
            GateKind::H => {
                let s = C64::new(FRAC_1_SQRT_2, 0.0);
                vec![s, s, s, -s]
            }
            GateKind::X => vec![o, l, l, o],
            GateKind::Sx => {
                let a = C64::new(0.5, 0.5);
                let b = C64::new(0.5, -0.5);
                vec![a, b, b, a]
            }
            GateKind::SxDg => {
                let a = C64::new(0.5, -0.5);
                let b = C64::new(0.5, 0.5);
                vec![a, b, b, a]
            }
            GateKind::Rz(theta) => vec![
                C64::from_polar(1.0, -theta / 2.0),
                o,
                o,
                C64::from_polar(1.0, theta / 2.0),
            ],
            GateKind::SDg => vec![l, o, o, -i],
            GateKind::Prep1q { alpha, beta } => vec![alpha, -beta.conj(), beta, alpha.conj()],
            GateKind::Cx | GateKind::Ccx | GateKind::Cswap => {
                let dim = 1usize << self.kind.arity();
                let mut m = vec![o; dim * dim];
                for col in 0..dim {
                    m[permute_basis(&self.kind, col) * dim + col] = l;
                }
                m
            }
        }
    }
}

/// Image of a local basis index under a permutation gate.
fn permute_basis(kind: &GateKind, idx: usize) -> usize {
    match kind {
        GateKind::Cx => {
            if idx & 0b10 != 0 {
                idx ^ 0b01
            } else {
                idx
            }
        }
        GateKind::Ccx => {
            if idx & 0b110 == 0b110 {
                idx ^ 0b001
            } else {
                idx
            }
        }
        GateKind::Cswap => {
            if idx & 0b100 != 0 {
                let a = (idx >> 1) & 1;
                let b = idx & 1;
                0b100 | (b << 1) | a
            } else {
                idx
            }
        }
        _ => idx,
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        match self.kind {
            GateKind::Rz(theta) => write!(f, "({theta})")?,
            GateKind::Prep1q { alpha, beta } => write!(f, "({alpha}, {beta})")?,
            _ => {}
        }
        let t: Vec<String> = self.targets.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", t.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    label: String,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, label: impl Into<String>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidCircuit("circuit needs at least one qubit".into()));
        }
        Ok(Circuit {
            num_qubits,
            label: label.into(),
            gates: Vec::new(),
        })
    }

    pub fn from_gates(
        num_qubits: usize,
        label: impl Into<String>,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self> {
        let mut c = Circuit::new(num_qubits, label)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.targets().iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::InvalidCircuit(format!(
                "gate {gate} targets q{q} on a {}-qubit circuit",
                self.num_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn is_basis(&self) -> bool {
        self.gates.iter().all(Gate::is_basis)
    }

    /// Reverse-order adjoint (U†). Basis circuits only.
    pub fn inverse(&self) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(Gate::adjoint)
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            num_qubits: self.num_qubits,
            label: format!("{}†", self.label),
            gates,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CircuitDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDoc = serde_json::from_str(text)?;
        Circuit::try_from(doc)
    }
}

/// Gate parameter in the serialized form: a real angle or an `[re, im]` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamDoc {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDoc {
    pub kind: String,
    pub targets: Vec<usize>,
    #[serde(default)]
    pub params: Vec<ParamDoc>,
}

/// Serialized circuit; field order is fixed so output is byte-stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDoc {
    pub num_qubits: usize,
    pub label: String,
    pub gates: Vec<GateDoc>,
}

impl From<&Gate> for GateDoc {
    fn from(g: &Gate) -> Self {
        let params = match g.kind {
            GateKind::Rz(theta) => vec![ParamDoc::Real(theta)],
            GateKind::Prep1q { alpha, beta } => vec![
                ParamDoc::Complex([alpha.re, alpha.im]),
                ParamDoc::Complex([beta.re, beta.im]),
            ],
            _ => Vec::new(),
        };
        GateDoc {
            kind: g.kind.name().to_string(),
            targets: g.targets.clone(),
            params,
        }
    }
}

impl TryFrom<GateDoc> for Gate {
    type Error = Error;

    fn try_from(doc: GateDoc) -> Result<Gate> {
        let bad = |what: &str| Error::InvalidGate(format!("{}: {what}", doc.kind));
        let kind = match (doc.kind.as_str(), doc.params.as_slice()) {
            ("h", []) => GateKind::H,
            ("x", []) => GateKind::X,
            ("sx", []) => GateKind::Sx,
            ("sxdg", []) => GateKind::SxDg,
            ("rz", [ParamDoc::Real(t)]) => GateKind::Rz(*t),
            ("sdg", []) => GateKind::SDg,
            ("cx", []) => GateKind::Cx,
            ("ccx", []) => GateKind::Ccx,
            ("cswap", []) => GateKind::Cswap,
            ("prep1q", [ParamDoc::Complex(a), ParamDoc::Complex(b)]) => GateKind::Prep1q {
                alpha: C64::new(a[0], a[1]),
                beta: C64::new(b[0], b[1]),
            },
            ("h" | "x" | "sx" | "sxdg" | "rz" | "sdg" | "cx" | "ccx" | "cswap" | "prep1q", _) => {
                return Err(bad("wrong parameters"))
            }
            _ => return Err(Error::Decomposition(doc.kind.clone())),
        };
        Gate::new(kind, doc.targets)
    }
}

impl From<&Circuit> for CircuitDoc {
    fn from(c: &Circuit) -> Self {
        CircuitDoc {
            num_qubits: c.num_qubits,
            label: c.label.clone(),
            gates: c.gates.iter().map(GateDoc::from).collect(),
        }
    }
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = Error;

    fn try_from(doc: CircuitDoc) -> Result<Circuit> {
        let gates = doc
            .gates
            .into_iter()
            .map(Gate::try_from)
            .collect::<Result<Vec<_>>>()?;
        Circuit::from_gates(doc.num_qubits, doc.label, gates)
    }
}
