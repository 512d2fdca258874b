//! Dense density matrices on a few qubits.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::circuit::C64;
use crate::error::{Error, Result};
use crate::sim::StateVector;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wrap a square 2^m matrix. No positivity or trace check.
    pub fn from_matrix(data: DMatrix<C64>) -> Result<Self> {
        let dim = data.nrows();
        if dim != data.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be 2^m square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(DensityMatrix {
            num_qubits: dim.trailing_zeros() as usize,
            data,
        })
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let dim = amplitudes.len();
        let data = DMatrix::from_fn(dim, dim, |i, j| amplitudes[i] * amplitudes[j].conj());
        Self::from_matrix(data)
    }

    pub fn from_state(state: &StateVector) -> Self {
        Self::pure(state.amplitudes()).expect("state vectors have 2^n amplitudes")
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        let data = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(1.0 / dim as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        DensityMatrix { num_qubits, data }
    }

    /// Reduced state of a pure `n`-qubit state on `keep` (in the given
    /// order, first kept qubit most significant).
    pub fn partial_trace_pure(state: &StateVector, keep: &[usize]) -> Result<Self> {
        let n = state.num_qubits();
        if keep.is_empty() || keep.iter().any(|&q| q >= n) {
            return Err(Error::InvalidArgument(format!("cannot keep {keep:?} of {n} qubits")));
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let dim = 1 << k;
        let bit = |q: usize| 1usize << (n - 1 - q);
        let spread = |local: usize, qubits: &[usize]| -> usize {
            let w = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> (w - 1 - j) & 1 == 1)
                .map(|(_, &q)| bit(q))
                .sum()
        };
        let keep_idx: Vec<usize> = (0..dim).map(|x| spread(x, keep)).collect();
        let amps = state.amplitudes();
        let mut data = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for r in 0..1usize << traced.len() {
            let rest = spread(r, &traced);
            for i in 0..dim {
                let ai = amps[keep_idx[i] | rest];
                if ai.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    data[(i, j)] += ai * amps[keep_idx[j] | rest].conj();
                }
            }
        }
        Self::from_matrix(data)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// max |ρ - ρ†| elementwise.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let err = self.hermiticity_error();
        if err > tol {
            return Err(Error::NotHermitian(err));
        }
        Ok(())
    }

    /// Ascending eigenvalues and matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let herm = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(self.dim(), self.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        (vals, vecs)
    }

    /// Clip negative eigenvalues to zero and renormalize the trace. Returns
    /// the projected matrix and whether anything was clipped.
    pub fn psd_projection(&self) -> (DensityMatrix, bool) {
        let (vals, vecs) = self.eigen();
        let clipped = vals.iter().any(|&v| v < 0.0);
        let kept: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = kept.iter().sum();
        let d = self.dim();
        let data = if total > 0.0 {
            rebuild(&vecs, &kept.iter().map(|v| v / total).collect::<Vec<_>>())
        } else {
            DensityMatrix::maximally_mixed(self.num_qubits).data
        };
        debug_assert_eq!(data.nrows(), d);
        (
            DensityMatrix {
                num_qubits: self.num_qubits,
                data,
            },
            clipped,
        )
    }

    pub fn to_doc(&self) -> DensityDoc {
        let d = self.dim();
        DensityDoc {
            num_qubits: self.num_qubits,
            real: (0..d).map(|i| (0..d).map(|j| self.data[(i, j)].re).collect()).collect(),
            imag: (0..d).map(|i| (0..d).map(|j| self.data[(i, j)].im).collect()).collect(),
        }
    }
}

/// V diag(vals) V†.
pub(crate) fn rebuild(vecs: &DMatrix<C64>, vals: &[f64]) -> DMatrix<C64> {
    let d = vecs.nrows();
    let mut scaled = vecs.clone();
    for (c, &v) in vals.iter().enumerate() {
        for r in 0..d {
            scaled[(r, c)] *= v;
        }
    }
    scaled * vecs.adjoint()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityDoc {
    pub num_qubits: usize,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}
