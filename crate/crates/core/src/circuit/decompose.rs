//! Lowering to the hardware basis {X, SX, RZ, CX}.
//!
//! Every rewrite is exact up to a global phase.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{Circuit, Gate, GateKind, C64};
use crate::error::Result;

const ANGLE_EPS: f64 = 1e-12;

/// Wrap into (-π, π].
fn wrap(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

fn push_rz(out: &mut Vec<Gate>, q: usize, theta: f64) {
    let t = wrap(theta);
    if t.abs() > ANGLE_EPS {
        out.push(Gate::rz(q, t));
    }
}

fn push_h(out: &mut Vec<Gate>, q: usize) {
    out.push(Gate::rz(q, FRAC_PI_2));
    out.push(Gate::sx(q));
    out.push(Gate::rz(q, FRAC_PI_2));
}

/// Angles (θ, φ, λ) with `u ∝ U3(θ, φ, λ)` for a 2×2 row-major unitary.
pub fn zsx_angles(u: &[C64]) -> (f64, f64, f64) {
    let (u00, u01, u10, u11) = (u[0], u[1], u[2], u[3]);
    let theta = 2.0 * u10.norm().atan2(u00.norm());
    if u10.norm() < 1e-14 {
        (0.0, 0.0, u11.arg() - u00.arg())
    } else if u00.norm() < 1e-14 {
        let gamma = (-u01).arg();
        (PI, u10.arg() - gamma, 0.0)
    } else {
        let gamma = u00.arg();
        (theta, u10.arg() - gamma, (-u01).arg() - gamma)
    }
}

/// ZSX Euler form: U3(θ,φ,λ) ∝ RZ(φ+π)·SX·RZ(θ+π)·SX·RZ(λ).
fn push_u3(out: &mut Vec<Gate>, q: usize, (theta, phi, lambda): (f64, f64, f64)) {
    if wrap(theta).abs() < ANGLE_EPS {
        push_rz(out, q, phi + lambda);
        return;
    }
    push_rz(out, q, lambda);
    out.push(Gate::sx(q));
    push_rz(out, q, theta + PI);
    out.push(Gate::sx(q));
    push_rz(out, q, phi + PI);
}

fn push_ccx(out: &mut Vec<Gate>, a: usize, b: usize, t: usize) {
    push_h(out, t);
    out.push(Gate::cx(b, t));
    out.push(Gate::rz(t, -FRAC_PI_4));
    out.push(Gate::cx(a, t));
    out.push(Gate::rz(t, FRAC_PI_4));
    out.push(Gate::cx(b, t));
    out.push(Gate::rz(t, -FRAC_PI_4));
    out.push(Gate::cx(a, t));
    out.push(Gate::rz(b, FRAC_PI_4));
    out.push(Gate::rz(t, FRAC_PI_4));
    push_h(out, t);
    out.push(Gate::cx(a, b));
    out.push(Gate::rz(a, FRAC_PI_4));
    out.push(Gate::rz(b, -FRAC_PI_4));
    out.push(Gate::cx(a, b));
}

/// Basis-gate sequence implementing `gate` up to global phase.
pub fn decompose_gate(gate: &Gate) -> Vec<Gate> {
    let t = gate.targets();
    let mut out = Vec::new();
    match *gate.kind() {
        GateKind::X | GateKind::Sx | GateKind::SxDg | GateKind::Rz(_) | GateKind::Cx => {
            out.push(gate.clone())
        }
        GateKind::H => push_h(&mut out, t[0]),
        GateKind::SDg => out.push(Gate::rz(t[0], -FRAC_PI_2)),
        GateKind::Prep1q { .. } => push_u3(&mut out, t[0], zsx_angles(&gate.matrix())),
        GateKind::Ccx => push_ccx(&mut out, t[0], t[1], t[2]),
        GateKind::Cswap => {
            let (c, a, b) = (t[0], t[1], t[2]);
            out.push(Gate::cx(b, a));
            push_ccx(&mut out, c, a, b);
            out.push(Gate::cx(b, a));
        }
    }
    out
}

pub fn decompose_to_basis(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.num_qubits(), c.label())?;
    for g in c.gates() {
        out.extend(decompose_gate(g))?;
    }
    Ok(out)
}
