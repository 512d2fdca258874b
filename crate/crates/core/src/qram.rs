//! Bucket-brigade QRAM circuits.
//!
//! Register layout for `n_a` address bits and `N = 2^n_a` cells:
//!
//! ```text
//! [ address (n_a) | tree (N) | memory (N) | output (1) ]
//! ```
//!
//! Tree qubits hold a one-hot encoding of the routed path. Tree qubit 1 is
//! prepared in |1⟩; the first address bit splits it into the pair
//! (tree[1] = prefix 0, tree[0] = prefix 1). Every later address bit `a_l`
//! splits each active node `q` into `q` (child 0) and the next unused tree
//! qubit `f` (child 1) with `CCX(q, a_l, f); CX(f, q)`. After the last bit
//! there are N leaves, one per address; the node map is returned by
//! [`QramLayout::leaves`]. The address qubit 0 is the most significant
//! address bit.
//!
//! Cell transfer to the output qubit is conditioned on the leaf: classical
//! cells (|0⟩ or |1⟩) are copied with a CCX, quantum cells are swapped in
//! with a CSWAP.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, C64};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::sim::{run_noiseless, StateVector};

const CELL_NORM_TOL: f64 = 1e-9;
const CLASSICAL_TOL: f64 = 1e-12;

const TABLE1_MEMORY: &str = include_str!("../fixtures/table1_memory.json");

#[derive(Clone, Debug, PartialEq)]
pub struct MemorySpec {
    cells: Vec<(C64, C64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Zero,
    One,
    Quantum,
}

impl MemorySpec {
    pub fn new(cells: Vec<(C64, C64)>) -> Result<Self> {
        let n = cells.len();
        if !matches!(n, 2 | 4 | 8) {
            return Err(Error::InvalidMemory(format!(
                "need 2, 4 or 8 cells (1 to 3 address bits), got {n}"
            )));
        }
        for (d, (a, b)) in cells.iter().enumerate() {
            let norm = a.norm_sqr() + b.norm_sqr();
            if (norm - 1.0).abs() > CELL_NORM_TOL {
                return Err(Error::InvalidMemory(format!("cell {d} has norm {norm}")));
            }
        }
        Ok(MemorySpec { cells })
    }

    /// Cells from `[re α, im α, re β, im β]` rows, checked as given.
    pub fn from_rows(rows: &[[f64; 4]]) -> Result<Self> {
        Self::new(rows.iter().map(row_to_cell).collect())
    }

    /// Like [`from_rows`](Self::from_rows) but rescales each row to unit
    /// norm first, for data quoted to a few decimals.
    pub fn from_rows_normalized(rows: &[[f64; 4]]) -> Result<Self> {
        let cells = rows
            .iter()
            .map(|r| {
                let (a, b) = row_to_cell(r);
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if norm == 0.0 {
                    return Err(Error::InvalidMemory("cell with zero amplitudes".into()));
                }
                Ok((a / norm, b / norm))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cells)
    }

    pub fn from_json(text: &str, normalize: bool) -> Result<Self> {
        let rows: Vec<[f64; 4]> = serde_json::from_str(text)?;
        if normalize {
            Self::from_rows_normalized(&rows)
        } else {
            Self::from_rows(&rows)
        }
    }

    pub fn to_rows(&self) -> Vec<[f64; 4]> {
        self.cells.iter().map(|(a, b)| [a.re, a.im, b.re, b.im]).collect()
    }

    /// Built-in memories:
    /// - `table1`: the eight-cell allocation η1, 1, 0, η2, η3, 0, η4, 1
    /// - `classical2`: cells |0⟩, |1⟩
    /// - `quantum2`: cells η1, |1⟩
    pub fn fixture(name: &str) -> Result<Self> {
        match name {
            "table1" => Self::from_json(TABLE1_MEMORY, true),
            "classical2" => Self::from_rows(&[[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]),
            "quantum2" => {
                let t = Self::fixture("table1")?;
                Self::new(vec![t.cells[0], t.cells[1]])
            }
            other => Err(Error::InvalidMemory(format!("unknown memory fixture `{other}`"))),
        }
    }

    pub fn cells(&self) -> &[(C64, C64)] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn address_bits(&self) -> usize {
        self.cells.len().trailing_zeros() as usize
    }

    pub fn cell_kind(&self, d: usize) -> CellKind {
        let (a, b) = self.cells[d];
        let one = C64::new(1.0, 0.0);
        if (a - one).norm() < CLASSICAL_TOL && b.norm() < CLASSICAL_TOL {
            CellKind::Zero
        } else if a.norm() < CLASSICAL_TOL && (b - one).norm() < CLASSICAL_TOL {
            CellKind::One
        } else {
            CellKind::Quantum
        }
    }

    pub fn is_classical(&self) -> bool {
        (0..self.num_cells()).all(|d| self.cell_kind(d) != CellKind::Quantum)
    }
}

fn row_to_cell(r: &[f64; 4]) -> (C64, C64) {
    (C64::new(r[0], r[1]), C64::new(r[2], r[3]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QramLayout {
    pub address_qubits: Vec<usize>,
    pub tree_qubits: Vec<usize>,
    pub memory_qubits: Vec<usize>,
    pub output_qubit: usize,
    pub uncompute: bool,
    /// Tree qubit that is active for each address after routing.
    pub leaves: Vec<usize>,
}

impl QramLayout {
    pub fn new(address_bits: usize, uncompute: bool) -> Self {
        let n_a = address_bits;
        let n = 1 << n_a;
        let address_qubits: Vec<usize> = (0..n_a).collect();
        let tree_qubits: Vec<usize> = (n_a..n_a + n).collect();
        let memory_qubits: Vec<usize> = (n_a + n..n_a + 2 * n).collect();
        let output_qubit = n_a + 2 * n;
        let leaves = routing(&address_qubits, &tree_qubits).1;
        QramLayout {
            address_qubits,
            tree_qubits,
            memory_qubits,
            output_qubit,
            uncompute,
            leaves,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.output_qubit + 1
    }

    /// Address qubits followed by the output qubit.
    pub fn tomography_qubits(&self) -> Vec<usize> {
        let mut q = self.address_qubits.clone();
        q.push(self.output_qubit);
        q
    }
}

/// Routing gates and the final address → leaf map.
fn routing(address: &[usize], tree: &[usize]) -> (Vec<Gate>, Vec<usize>) {
    let mut gates = vec![Gate::cx(address[0], tree[0]), Gate::cx(address[0], tree[1])];
    let mut nodes = vec![tree[1], tree[0]];
    let mut next = 2;
    for &a in &address[1..] {
        let mut children = Vec::with_capacity(2 * nodes.len());
        for &q in &nodes {
            let f = tree[next];
            next += 1;
            gates.push(Gate::ccx(q, a, f));
            gates.push(Gate::cx(f, q));
            children.push(q);
            children.push(f);
        }
        nodes = children;
    }
    (gates, nodes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddressPrep {
    /// Uniform superposition via H on every address qubit.
    Superposition,
    /// Computational basis address `d`.
    Basis(usize),
}

pub fn build_qram(mem: &MemorySpec, uncompute: bool) -> Result<Circuit> {
    build_qram_with(mem, uncompute, AddressPrep::Superposition)
}

pub fn build_qram_with(mem: &MemorySpec, uncompute: bool, address: AddressPrep) -> Result<Circuit> {
    let n_a = mem.address_bits();
    let layout = QramLayout::new(n_a, uncompute);
    let label = format!(
        "bucket-brigade qram n_a={n_a}{}",
        if uncompute { " uncompute" } else { "" }
    );
    let mut c = Circuit::new(layout.num_qubits(), label)?;

    match address {
        AddressPrep::Superposition => {
            c.extend(layout.address_qubits.iter().map(|&q| Gate::h(q)))?;
        }
        AddressPrep::Basis(d) => {
            if d >= mem.num_cells() {
                return Err(Error::InvalidArgument(format!("address {d} out of range")));
            }
            for (j, &q) in layout.address_qubits.iter().enumerate() {
                if d >> (n_a - 1 - j) & 1 == 1 {
                    c.push(Gate::x(q))?;
                }
            }
        }
    }
    c.push(Gate::x(layout.tree_qubits[1]))?;
    for (d, &q) in layout.memory_qubits.iter().enumerate() {
        match mem.cell_kind(d) {
            CellKind::Zero => {}
            CellKind::One => c.push(Gate::x(q))?,
            CellKind::Quantum => {
                let (a, b) = mem.cells()[d];
                c.push(Gate::prep(q, a, b)?)?;
            }
        }
    }

    let (route, leaves) = routing(&layout.address_qubits, &layout.tree_qubits);
    c.extend(route.iter().cloned())?;
    for (d, (&leaf, &cell)) in leaves.iter().zip(&layout.memory_qubits).enumerate() {
        let transfer = match mem.cell_kind(d) {
            CellKind::Quantum => Gate::cswap(leaf, cell, layout.output_qubit),
            _ => Gate::ccx(leaf, cell, layout.output_qubit),
        };
        c.push(transfer)?;
    }
    if uncompute {
        c.extend(route.iter().rev().cloned())?;
    }
    Ok(c)
}

/// Σ_d |d⟩|D_d⟩ / √N on the address and output qubits, built directly.
pub fn ideal_output(mem: &MemorySpec) -> StateVector {
    let scale = 1.0 / (mem.num_cells() as f64).sqrt();
    let amps = mem
        .cells()
        .iter()
        .flat_map(|&(a, b)| [a * scale, b * scale])
        .collect();
    StateVector::from_amplitudes(amps).expect("normalized memory gives a normalized state")
}

/// Exact noiseless reduced state of the tomography qubits.
pub fn ideal_reduced_state(mem: &MemorySpec, uncompute: bool) -> Result<DensityMatrix> {
    let c = build_qram(mem, uncompute)?;
    let layout = QramLayout::new(mem.address_bits(), uncompute);
    let state = run_noiseless(&c)?;
    DensityMatrix::partial_trace_pure(&state, &layout.tomography_qubits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn layout_sizes() {
        let l = QramLayout::new(3, true);
        assert_eq!(l.num_qubits(), 20);
        assert_eq!(l.tomography_qubits(), vec![0, 1, 2, 19]);
        let l = QramLayout::new(1, true);
        assert_eq!(l.num_qubits(), 6);
        assert_eq!(l.leaves, vec![2, 1]);
    }

    #[test]
    fn leaves_are_a_permutation_of_tree() {
        for n_a in 1..=3 {
            let l = QramLayout::new(n_a, false);
            let mut leaves = l.leaves.clone();
            leaves.sort();
            assert_eq!(leaves, l.tree_qubits);
        }
    }

    #[test]
    fn memory_validation() {
        assert!(MemorySpec::from_rows(&[[1.0, 0.0, 0.0, 0.0]]).is_err());
        assert!(MemorySpec::from_rows(&[[1.0, 0.0, 0.1, 0.0], [1.0, 0.0, 0.0, 0.0]]).is_err());
        assert!(MemorySpec::fixture("nope").is_err());
        let t = MemorySpec::fixture("table1").unwrap();
        assert_eq!(t.address_bits(), 3);
        assert_eq!(t.cell_kind(1), CellKind::One);
        assert_eq!(t.cell_kind(2), CellKind::Zero);
        assert_eq!(t.cell_kind(0), CellKind::Quantum);
    }

    #[test]
    fn separable_ideal_output() {
        let mem = MemorySpec::from_rows(&[[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 1.0, 0.0]]).unwrap();
        let a = ideal_output(&mem);
        let want = [0.0, FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        for (z, w) in a.amplitudes().iter().zip(want) {
            assert!((z - C64::new(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn unnormalized_rows_are_rescaled() {
        let mem = MemorySpec::from_rows_normalized(&[[0.82, 0.26, 0.43, -0.28], [1.0, 0.0, 0.0, 0.0]])
            .unwrap();
        let (a, b) = mem.cells()[0];
        assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-14);
    }
}
