//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls the simulator kernels: gates are rebuilt as explicit
//! matrices and embedded into the full register by brute force.
#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::Rng;
use szne_core::circuit::{Circuit, Gate, GateKind};
use szne_core::tomo::{Basis, MeasurementSetting};

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn mat(rows: &[&[C]]) -> DMatrix<C> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |r, k| rows[r][k])
}

fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> DMatrix<C> {
    let mut m = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for j in 0..dim {
        m[(f(j), j)] = c(1.0, 0.0);
    }
    m
}

/// Textbook matrix of a gate on its own targets (first target most significant).
pub fn local_matrix(kind: &GateKind) -> DMatrix<C> {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let h = c(FRAC_1_SQRT_2, 0.0);
    match *kind {
        GateKind::H => mat(&[&[h, h], &[h, -h]]),
        GateKind::X => mat(&[&[o, l], &[l, o]]),
        GateKind::Sx => mat(&[&[c(0.5, 0.5), c(0.5, -0.5)], &[c(0.5, -0.5), c(0.5, 0.5)]]),
        GateKind::SxDg => mat(&[&[c(0.5, -0.5), c(0.5, 0.5)], &[c(0.5, 0.5), c(0.5, -0.5)]]),
        GateKind::Rz(t) => mat(&[&[C::from_polar(1.0, -t / 2.0), o], &[o, C::from_polar(1.0, t / 2.0)]]),
        GateKind::SDg => mat(&[&[l, o], &[o, c(0.0, -1.0)]]),
        GateKind::Cx => permutation(4, |j| if j >> 1 == 1 { j ^ 1 } else { j }),
        GateKind::Ccx => permutation(8, |j| if j >> 1 == 3 { j ^ 1 } else { j }),
        GateKind::Cswap => permutation(8, |j| match j {
            0b101 => 0b110,
            0b110 => 0b101,
            other => other,
        }),
        GateKind::Prep1q { alpha, beta } => mat(&[&[alpha, -beta.conj()], &[beta, alpha.conj()]]),
    }
}

/// Full 2^n operator of one gate; qubit 0 is the most significant bit.
pub fn embed(gate: &Gate, n: usize) -> DMatrix<C> {
    let local = local_matrix(gate.kind());
    let t = gate.targets();
    let k = t.len();
    let dim = 1usize << n;
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let mut m = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for col in 0..dim {
        let lc = (0..k).fold(0, |acc, j| (acc << 1) | bit(col, t[j]));
        for lr in 0..1usize << k {
            let amp = local[(lr, lc)];
            if amp == c(0.0, 0.0) {
                continue;
            }
            let mut row = col;
            for (j, &q) in t.iter().enumerate() {
                let b = (lr >> (k - 1 - j)) & 1;
                let mask = 1 << (n - 1 - q);
                row = if b == 1 { row | mask } else { row & !mask };
            }
            m[(row, col)] += amp;
        }
    }
    m
}

pub fn dense_unitary(circ: &Circuit) -> DMatrix<C> {
    let dim = 1usize << circ.num_qubits();
    circ.gates()
        .iter()
        .fold(DMatrix::identity(dim, dim), |u, g| embed(g, circ.num_qubits()) * u)
}

/// min over global phases of max |a - e^{iφ} b|.
pub fn phase_distance(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    let (mut pr, mut pc) = (0, 0);
    for r in 0..a.nrows() {
        for k in 0..a.ncols() {
            if b[(r, k)].norm() > b[(pr, pc)].norm() {
                pr = r;
                pc = k;
            }
        }
    }
    let phase = a[(pr, pc)] / b[(pr, pc)];
    let phase = phase / phase.norm();
    (a - b.map(|z| z * phase)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn zero_state(n: usize) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    v
}

pub fn apply(u: &DMatrix<C>, v: &[C]) -> Vec<C> {
    (0..v.len())
        .map(|r| (0..v.len()).map(|k| u[(r, k)] * v[k]).sum())
        .collect()
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> Vec<C> {
    let v: Vec<C> = (0..1 << n)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Single-qubit eigenvector of `basis` for eigenvalue (-1)^bit.
fn eigvec(basis: Basis, bit: usize) -> [C; 2] {
    let h = FRAC_1_SQRT_2;
    let s = if bit == 0 { 1.0 } else { -1.0 };
    match basis {
        Basis::Z => {
            if bit == 0 {
                [c(1.0, 0.0), c(0.0, 0.0)]
            } else {
                [c(0.0, 0.0), c(1.0, 0.0)]
            }
        }
        Basis::X => [c(h, 0.0), c(s * h, 0.0)],
        Basis::Y => [c(h, 0.0), c(0.0, s * h)],
    }
}

/// Born-rule outcome probabilities of measuring `qubits` of `psi` in the
/// product basis of `setting`.
pub fn pauli_basis_probs(psi: &[C], n: usize, qubits: &[usize], setting: &MeasurementSetting) -> Vec<f64> {
    let m = qubits.len();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let mut probs = vec![0.0; 1 << m];
    let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
    for (outcome, p) in probs.iter_mut().enumerate() {
        let vecs: Vec<[C; 2]> = (0..m)
            .map(|k| eigvec(setting.bases()[k], (outcome >> (m - 1 - k)) & 1))
            .collect();
        for r in 0..1usize << rest.len() {
            // Amplitude of ⟨outcome-basis, r| ψ⟩.
            let mut amp = c(0.0, 0.0);
            for (x, a) in psi.iter().enumerate() {
                let rest_bits = rest.iter().fold(0, |acc, &q| (acc << 1) | bit(x, q));
                if rest_bits != r {
                    continue;
                }
                let mut w = c(1.0, 0.0);
                for (k, &q) in qubits.iter().enumerate() {
                    w *= vecs[k][bit(x, q)].conj();
                }
                amp += w * a;
            }
            *p += amp.norm_sqr();
        }
    }
    probs
}

/// |ψ⟩⟨ψ| as a dense matrix.
pub fn projector(psi: &[C]) -> DMatrix<C> {
    let d = psi.len();
    DMatrix::from_fn(d, d, |r, k| psi[r] * psi[k].conj())
}

/// Random circuit over the basis alphabet.
pub fn random_basis_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Circuit {
    let mut circ = Circuit::new(n, "random").unwrap();
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let g = match rng.random_range(0..if n > 1 { 5 } else { 4 }) {
            0 => Gate::x(q),
            1 => Gate::sx(q),
            2 => Gate::sxdg(q),
            3 => Gate::rz(q, rng.random_range(-3.2..3.2)),
            _ => {
                let mut t = rng.random_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                Gate::cx(q, t)
            }
        };
        circ.push(g).unwrap();
    }
    circ
}

/// Random circuit that also uses the composite gates.
pub fn random_mixed_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Circuit {
    assert!(n >= 3);
    let mut circ = Circuit::new(n, "mixed").unwrap();
    for _ in 0..len {
        let mut qs: Vec<usize> = (0..n).collect();
        for i in 0..3 {
            let j = rng.random_range(i..n);
            qs.swap(i, j);
        }
        let g = match rng.random_range(0..9) {
            0 => Gate::h(qs[0]),
            1 => Gate::x(qs[0]),
            2 => Gate::sx(qs[0]),
            3 => Gate::sdg(qs[0]),
            4 => Gate::rz(qs[0], rng.random_range(-3.2..3.2)),
            5 => Gate::cx(qs[0], qs[1]),
            6 => Gate::ccx(qs[0], qs[1], qs[2]),
            7 => Gate::cswap(qs[0], qs[1], qs[2]),
            _ => {
                let v = random_state(rng, 1);
                Gate::prep(qs[0], v[0], v[1]).unwrap()
            }
        };
        circ.push(g).unwrap();
    }
    circ
}

pub const DEFAULT_GRID: [f64; 5] = [1.0, 1.4, 1.7, 2.1, 2.5];

/// Random normalized distribution over 2^m outcomes.
pub fn random_distribution<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..1 << m).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Random noise-scaled results covering every setting on `m` qubits.
pub fn random_results<R: Rng>(rng: &mut R, m: usize, lambdas: &[f64]) -> szne_core::NoiseScaledResults {
    let settings = szne_core::tomo::all_settings(m)
        .iter()
        .map(|s| szne_core::SettingSeries {
            setting: s.label(),
            lambdas: lambdas.to_vec(),
            distributions: lambdas.iter().map(|_| random_distribution(rng, m)).collect(),
        })
        .collect();
    szne_core::NoiseScaledResults::new(m, 0, settings).unwrap()
}
