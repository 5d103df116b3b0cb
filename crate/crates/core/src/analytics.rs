//! Closed-form coupling estimates.
//!
//! `phi_star` below is the transition element `<0|phi|1>`, the half flux jump
//! between the two persistent-current states. Charging energies follow the
//! convention `EC = e^2 / 2C = 1 / C`.

use crate::circuit_model::{conductance_quantum, CapacitanceNetwork};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticPrediction<T: Real = f64> {
    pub g1_qq: Option<T>,
    pub g1_qr: Option<T>,
    pub g2_qq: Option<T>,
    pub delta: T,
    pub phi_star: T,
    pub cbar_q: T,
    /// Infinite when the nodes are uncoupled.
    pub cbar_od: T,
    pub ec_q: T,
    pub z: Option<T>,
    pub omega_q: Option<T>,
    pub delta_e: Option<T>,
}

/// `Delta (Cq/Cod) phi*^2 Delta / (8 EC_q)` with `Cq`, `EC_q` taken at node 1.
pub fn g1_qq<T: Real>(delta: T, phi_star: T, net: &CapacitanceNetwork<T>, ec_q: T) -> Result<T> {
    if !(ec_q > T::zero()) {
        return Err(Error::InvalidSpec(format!("EC_q must be positive, got {ec_q}")));
    }
    let ratio = net.inv_od * net.cbar1();
    Ok(delta * ratio * phi_star * phi_star * delta / (T::lit(8.0) * ec_q))
}

/// `Delta (Cq/Cod) (phi*/2) sqrt(1 / (2 pi G0 Z))` with `Cq` at node 1.
pub fn g1_qr<T: Real>(delta: T, phi_star: T, net: &CapacitanceNetwork<T>, z: T) -> Result<T> {
    if !(z > T::zero()) {
        return Err(Error::InvalidSpec(format!("impedance must be positive, got {z}")));
    }
    let g0 = conductance_quantum::<T>();
    let ratio = net.inv_od * net.cbar1();
    Ok(delta * ratio * phi_star / T::lit(2.0) * (T::one() / (T::TAU() * g0 * z)).sqrt())
}

/// `(gamma^2 / 8 omega_q) ((Delta_e - Delta) / (1 + 2 alpha + 2 beta))^2`.
pub fn g2_qq_gamma_form<T: Real>(delta: T, delta_e: T, omega_q: T, gamma: T, alpha: T, beta: T) -> Result<T> {
    if !(omega_q > T::zero()) {
        return Err(Error::ZeroFrequency);
    }
    let two = T::lit(2.0);
    let r = (delta_e - delta) / (T::one() + two * alpha + two * beta);
    Ok(gamma * gamma / (T::lit(8.0) * omega_q) * r * r)
}

/// Impedance of a resonator seen through charging energy `ec`.
pub fn impedance<T: Real>(ejr: T, ec: T) -> T {
    (ec / (T::lit(8.0) * ejr)).sqrt()
}

/// Normal-mode frequencies `(w-, w+)` of two linear oscillators with
/// inductive energies `ej1`, `ej2` joined by `net`.
pub fn two_oscillator_modes<T: Real>(net: &CapacitanceNetwork<T>, ej1: T, ej2: T) -> (T, T) {
    // eigenvalues of 8 C^-1 diag(EJ)
    let eight = T::lit(8.0);
    let a = eight * net.inv11 * ej1;
    let d = eight * net.inv22 * ej2;
    let b = eight * net.inv_od * ej2;
    let cc = eight * net.inv_od * ej1;
    let tr = a + d;
    let disc = ((a - d) * (a - d) + T::lit(4.0) * b * cc).sqrt();
    let two = T::lit(2.0);
    (((tr - disc) / two).sqrt(), ((tr + disc) / two).sqrt())
}

/// First-order splitting `2 g1_qr` for an oscillator standing in for the
/// qubit, compared against the exact normal-mode splitting. Returns
/// `(predicted, exact)`.
pub fn two_oscillator_oracle<T: Real>(net: &CapacitanceNetwork<T>, ej1: T, ej2: T) -> Result<(T, T)> {
    let omega1 = (T::lit(8.0) * ej1 * net.inv11).sqrt();
    let phi_zpf = (T::lit(2.0) * net.inv11 / ej1).sqrt().sqrt();
    let z2 = impedance(ej2, net.inv22);
    let g = g1_qr(omega1, phi_zpf, net, z2)?;
    let (lo, hi) = two_oscillator_modes(net, ej1, ej2);
    Ok((T::lit(2.0) * g, hi - lo))
}
