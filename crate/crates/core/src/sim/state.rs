use crate::circuit::{Gate, GateKind, C64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }
}

#[inline]
fn stride(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Apply a 2×2 matrix to qubit `q` of an `n`-qubit amplitude vector.
pub(crate) fn apply_1q(amps: &mut [C64], n: usize, q: usize, m: &[C64; 4]) {
    let s = stride(n, q);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + s {
            let a0 = amps[i];
            let a1 = amps[i + s];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[i + s] = m[2] * a0 + m[3] * a1;
        }
        base += 2 * s;
    }
}

fn apply_x(amps: &mut [C64], n: usize, q: usize) {
    let s = stride(n, q);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + s {
            amps.swap(i, i + s);
        }
        base += 2 * s;
    }
}

fn apply_diag(amps: &mut [C64], n: usize, q: usize, d0: C64, d1: C64) {
    let s = stride(n, q);
    for (i, a) in amps.iter_mut().enumerate() {
        *a *= if i & s == 0 { d0 } else { d1 };
    }
}

fn apply_cx(amps: &mut [C64], n: usize, c: usize, t: usize) {
    let sc = stride(n, c);
    let st = stride(n, t);
    for i in 0..amps.len() {
        if i & sc != 0 && i & st == 0 {
            amps.swap(i, i | st);
        }
    }
}

fn apply_ccx(amps: &mut [C64], n: usize, c0: usize, c1: usize, t: usize) {
    let mask = stride(n, c0) | stride(n, c1);
    let st = stride(n, t);
    for i in 0..amps.len() {
        if i & mask == mask && i & st == 0 {
            amps.swap(i, i | st);
        }
    }
}

fn apply_cswap(amps: &mut [C64], n: usize, c: usize, a: usize, b: usize) {
    let sc = stride(n, c);
    let sa = stride(n, a);
    let sb = stride(n, b);
    for i in 0..amps.len() {
        // |..1_a..0_b..> <-> |..0_a..1_b..>
        if i & sc != 0 && i & sa != 0 && i & sb == 0 {
            amps.swap(i, (i & !sa) | sb);
        }
    }
}

/// Apply a gate; with `conj` the complex conjugate of its matrix is used,
/// which is what the column index of a vectorized density matrix needs.
pub(crate) fn apply_gate_raw(amps: &mut [C64], n: usize, gate: &Gate, conj: bool) {
    let t = gate.targets();
    match *gate.kind() {
        GateKind::X => apply_x(amps, n, t[0]),
        GateKind::Cx => apply_cx(amps, n, t[0], t[1]),
        GateKind::Ccx => apply_ccx(amps, n, t[0], t[1], t[2]),
        GateKind::Cswap => apply_cswap(amps, n, t[0], t[1], t[2]),
        GateKind::Rz(theta) => {
            let theta = if conj { -theta } else { theta };
            apply_diag(
                amps,
                n,
                t[0],
                C64::from_polar(1.0, -theta / 2.0),
                C64::from_polar(1.0, theta / 2.0),
            )
        }
        _ => {
            let m = gate.matrix();
            let mut m = [m[0], m[1], m[2], m[3]];
            if conj {
                m.iter_mut().for_each(|z| *z = z.conj());
            }
            apply_1q(amps, n, t[0], &m);
        }
    }
}

pub(crate) fn apply_pauli_raw(amps: &mut [C64], n: usize, q: usize, p: Pauli, conj: bool) {
    match p {
        Pauli::I => {}
        Pauli::X => apply_x(amps, n, q),
        Pauli::Z => apply_diag(amps, n, q, C64::new(1.0, 0.0), C64::new(-1.0, 0.0)),
        Pauli::Y => {
            let i = if conj { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
            let o = C64::new(0.0, 0.0);
            apply_1q(amps, n, q, &[o, -i, i, o]);
        }
    }
}

/// Marginal Z-basis probabilities; the first listed qubit is the MSB.
pub(crate) fn marginal(probs_of_basis: impl Fn(usize) -> f64, dim: usize, n: usize, measured: &[usize]) -> Vec<f64> {
    let m = measured.len();
    let mut out = vec![0.0; 1 << m];
    for i in 0..dim {
        let mut x = 0usize;
        for &q in measured {
            x = (x << 1) | ((i >> (n - 1 - q)) & 1);
        }
        out[x] += probs_of_basis(i);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = C64::new(1.0, 0.0);
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "state dimension {dim} is not a power of two"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Unnormalized { sum: norm });
        }
        Ok(StateVector {
            num_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate) {
        apply_gate_raw(&mut self.amplitudes, self.num_qubits, gate, false);
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        apply_pauli_raw(&mut self.amplitudes, self.num_qubits, q, p, false);
    }

    pub fn marginal_probabilities(&self, measured: &[usize]) -> Vec<f64> {
        marginal(
            |i| self.amplitudes[i].norm_sqr(),
            self.amplitudes.len(),
            self.num_qubits,
            measured,
        )
    }

    /// |⟨self|other⟩|, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cswap_swaps_only_when_controlled() {
        // |1,1,0> -> |1,0,1>
        let mut s = StateVector::zero(3);
        s.apply(&Gate::x(0));
        s.apply(&Gate::x(1));
        s.apply(&Gate::cswap(0, 1, 2));
        assert_eq!(s.amplitudes()[0b101], C64::new(1.0, 0.0));
        let mut s = StateVector::zero(3);
        s.apply(&Gate::x(1));
        s.apply(&Gate::cswap(0, 1, 2));
        assert_eq!(s.amplitudes()[0b010], C64::new(1.0, 0.0));
    }

    #[test]
    fn qubit_zero_is_msb() {
        let mut s = StateVector::zero(3);
        s.apply(&Gate::x(0));
        assert_eq!(s.amplitudes()[0b100], C64::new(1.0, 0.0));
        assert_eq!(s.marginal_probabilities(&[2, 0]), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn pauli_y_matches_matrix() {
        let mut s = StateVector::zero(1);
        s.apply_pauli(0, Pauli::Y);
        assert_eq!(s.amplitudes()[1], C64::new(0.0, 1.0));
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(StateVector::from_amplitudes(vec![C64::new(1.0, 0.0); 3]).is_err());
        assert!(StateVector::from_amplitudes(vec![C64::new(1.0, 0.0); 2]).is_err());
    }
}
