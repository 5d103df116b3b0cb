//! Circuit elements, the coupling capacitor and the single-mode flux qubit.
//!
//! Units: hbar = 1 and e^2/2 = 1, so a capacitance `C` has charging energy
//! `e^2/2C = 1/C`. In a typical run energies are measured in the large-junction
//! charging energy of the qubit.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Three-junction flux qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxQubitSpec<T: Real = f64> {
    pub ej: T,
    pub ec: T,
    pub alpha: T,
    pub beta: T,
    pub frustration: T,
}

impl<T: Real> FluxQubitSpec<T> {
    pub fn new(ej: T, ec: T, alpha: T, beta: T, frustration: T) -> Result<Self> {
        let s = FluxQubitSpec { ej, ec, alpha, beta, frustration };
        s.validate()?;
        Ok(s)
    }

    /// Qubit at full frustration with `EC = 1`.
    pub fn symmetric(ej_over_ec: T, alpha: T, beta: T) -> Result<Self> {
        Self::new(ej_over_ec, T::one(), alpha, beta, T::lit(0.5))
    }

    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        if !(self.ej > z && self.ej.is_finite()) {
            return Err(Error::InvalidSpec(format!("EJ must be positive, got {}", self.ej)));
        }
        if !(self.ec > z && self.ec.is_finite()) {
            return Err(Error::InvalidSpec(format!("EC must be positive, got {}", self.ec)));
        }
        if !(self.alpha > z && self.alpha < T::one()) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.beta >= z && self.beta.is_finite()) {
            return Err(Error::InvalidSpec(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !self.frustration.is_finite() {
            return Err(Error::InvalidSpec("frustration must be finite".into()));
        }
        Ok(())
    }

    /// `C_q / C = 1 + 2 alpha + 2 beta`.
    pub fn capacitance_ratio(&self) -> T {
        T::one() + T::lit(2.0) * (self.alpha + self.beta)
    }

    /// Mode capacitance `C_q = (1 + 2 alpha + 2 beta) / EC`.
    pub fn capacitance(&self) -> T {
        self.capacitance_ratio() / self.ec
    }

    pub fn ec_eff(&self) -> T {
        self.ec / self.capacitance_ratio()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.frustration - T::lit(0.5)).abs() < T::lit(1e-14)
    }
}

/// LC resonator given by its inductive and charging energies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonatorSpec<T: Real = f64> {
    pub ejr: T,
    pub ecr: T,
}

impl<T: Real> ResonatorSpec<T> {
    pub fn new(ejr: T, ecr: T) -> Result<Self> {
        if !(ejr > T::zero() && ejr.is_finite()) || !(ecr > T::zero() && ecr.is_finite()) {
            return Err(Error::InvalidSpec(format!("resonator energies must be positive, got EJr={ejr}, ECr={ecr}")));
        }
        Ok(ResonatorSpec { ejr, ecr })
    }

    /// Resonator built from the design ratios `r_qr = EJ/EJr` and `r_r = EJr/ECr`.
    pub fn from_ratios(qubit_ej: T, r_qr: T, r_r: T) -> Result<Self> {
        let ejr = qubit_ej / r_qr;
        Self::new(ejr, ejr / r_r)
    }

    pub fn capacitance(&self) -> T {
        T::one() / self.ecr
    }

    /// `L = (hbar/2e)^2 / EJr`.
    pub fn inductance(&self) -> T {
        T::lit(0.125) / self.ejr
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircuitElement<T: Real = f64> {
    Qubit(FluxQubitSpec<T>),
    Resonator(ResonatorSpec<T>),
}

impl<T: Real> CircuitElement<T> {
    pub fn capacitance(&self) -> T {
        match self {
            CircuitElement::Qubit(q) => q.capacitance(),
            CircuitElement::Resonator(r) => r.capacitance(),
        }
    }
}

/// Two nodes joined by a coupling capacitor `Cg`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacitanceNetwork<T: Real = f64> {
    pub c1: T,
    pub c2: T,
    pub cg: T,
    pub inv11: T,
    pub inv22: T,
    pub inv_od: T,
    pub epsilon: T,
}

pub fn build_capacitance_network<T: Real>(c1: T, c2: T, cg: T) -> Result<CapacitanceNetwork<T>> {
    if !(c1 > T::zero() && c1.is_finite()) || !(c2 > T::zero() && c2.is_finite()) {
        return Err(Error::InvalidSpec(format!("node capacitances must be positive, got {c1}, {c2}")));
    }
    if !(cg >= T::zero() && cg.is_finite()) {
        return Err(Error::InvalidSpec(format!("coupling capacitance must be >= 0, got {cg}")));
    }
    let a = c1 + cg;
    let b = c2 + cg;
    let det = c1 * c2 + cg * (c1 + c2);
    let rel = det / (a * b);
    if rel < T::lit(1e3) * T::unit_roundoff() {
        return Err(Error::Singular(rel.to_f64_lossy()));
    }
    let inv_od = cg / det;
    Ok(CapacitanceNetwork {
        c1,
        c2,
        cg,
        inv11: b / det,
        inv22: a / det,
        inv_od,
        epsilon: (c1 * c2).sqrt() * inv_od,
    })
}

impl<T: Real> CapacitanceNetwork<T> {
    /// Network for two elements joined by `Cg = gamma * C`, `C = 1/EC` of the qubit.
    pub fn between(e1: &CircuitElement<T>, e2: &CircuitElement<T>, cg: T) -> Result<Self> {
        build_capacitance_network(e1.capacitance(), e2.capacitance(), cg)
    }

    pub fn matrix(&self) -> [[T; 2]; 2] {
        [[self.c1 + self.cg, -self.cg], [-self.cg, self.c2 + self.cg]]
    }

    pub fn inverse(&self) -> [[T; 2]; 2] {
        [[self.inv11, self.inv_od], [self.inv_od, self.inv22]]
    }

    /// Renormalized node capacitances `C̄_i = 1/inv_ii`.
    pub fn cbar1(&self) -> T {
        T::one() / self.inv11
    }

    pub fn cbar2(&self) -> T {
        T::one() / self.inv22
    }

    pub fn cbar_od(&self) -> T {
        T::one() / self.inv_od
    }

    /// Largest entry of `|C C^-1 - I|` relative to the matrix scale.
    pub fn round_trip_error(&self) -> T {
        let m = self.matrix();
        let v = self.inverse();
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = T::zero();
                for k in 0..2 {
                    s += m[i][k] * v[k][j];
                }
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// `epsilon = gamma / (1 + 2(alpha + gamma + beta))` for two identical qubits.
pub fn epsilon_closed_form<T: Real>(gamma: T, alpha: T, beta: T) -> T {
    gamma / (T::one() + T::lit(2.0) * (alpha + gamma + beta))
}

/// `U(phi) = EJ [2 + alpha - 2 cos phi - alpha cos(2 pi f + 2 phi)]`.
pub fn qubit_potential<T: Real>(phi: T, spec: &FluxQubitSpec<T>) -> T {
    let two = T::lit(2.0);
    let shift = two * T::PI() * spec.frustration;
    spec.ej * (two + spec.alpha - two * phi.cos() - spec.alpha * (shift + two * phi).cos())
}

/// Single-mode reduction of the flux qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleModeQubit<T: Real = f64> {
    pub spec: FluxQubitSpec<T>,
    pub capacitance_ratio: T,
    pub phi_star: T,
    pub omega_q_harmonic: T,
}

impl<T: Real> SingleModeQubit<T> {
    pub fn new(spec: FluxQubitSpec<T>) -> Result<Self> {
        let (phi_star, omega_q_harmonic) = locate_minimum(&spec)?;
        Ok(SingleModeQubit { spec, capacitance_ratio: spec.capacitance_ratio(), phi_star, omega_q_harmonic })
    }

    pub fn potential(&self, phi: T) -> T {
        qubit_potential(phi, &self.spec)
    }
}

/// Well position `phi*` and harmonic intrawell frequency at full frustration.
pub fn locate_minimum<T: Real>(spec: &FluxQubitSpec<T>) -> Result<(T, T)> {
    if !spec.is_symmetric() {
        return Err(Error::InvalidSpec("minimum search requires f = 0.5".into()));
    }
    let two = T::lit(2.0);
    if spec.alpha <= T::lit(0.5) {
        return Err(Error::SingleWell(spec.alpha.to_f64_lossy()));
    }
    let phi = (T::one() / (two * spec.alpha)).acos();
    // u'' = 2 cos phi - 4 alpha cos 2 phi
    let curv = two * phi.cos() - T::lit(4.0) * spec.alpha * (two * phi).cos();
    let omega = (T::lit(8.0) * spec.ec_eff() * spec.ej * curv).sqrt();
    Ok((phi, omega))
}

/// `hbar omega_r = sqrt(8 EJr ECr)` and `Z = sqrt(L/C)` in natural units.
pub fn resonator_derived<T: Real>(spec: &ResonatorSpec<T>) -> (T, T) {
    resonator_derived_with(spec.ejr, spec.ecr)
}

/// Same as [`resonator_derived`] with an arbitrary effective charging energy.
pub fn resonator_derived_with<T: Real>(ejr: T, ec: T) -> (T, T) {
    let omega = (T::lit(8.0) * ejr * ec).sqrt();
    let z = (ec / (T::lit(8.0) * ejr)).sqrt();
    (omega, z)
}

/// `h / e^2` in the natural units of this crate.
pub fn resistance_quantum<T: Real>() -> T {
    T::PI()
}

/// `G0 = 2 e^2 / h`.
pub fn conductance_quantum<T: Real>() -> T {
    T::lit(2.0) / resistance_quantum::<T>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn decoupled_network() {
        let n = build_capacitance_network(1.0, 1.0, 0.0).unwrap();
        assert_eq!(n.inv_od, 0.0);
        assert_eq!(n.epsilon, 0.0);
        assert_eq!(n.cbar1(), 1.0);
    }

    #[test]
    fn symmetric_network_values() {
        let n = build_capacitance_network(1.0, 1.0, 0.1).unwrap();
        assert!(close(n.cbar_od(), 12.0, 1e-13));
        assert!(close(n.cbar1(), 12.0 / 11.0, 1e-13));
        assert!(close(n.epsilon, 1.0 / 12.0, 1e-13));
    }

    #[test]
    fn epsilon_of_qubit_pair() {
        let cq = 1.0 + 2.0 * 0.65;
        let n = build_capacitance_network(cq, cq, 0.1).unwrap();
        assert!(close(n.epsilon, 0.04, 1e-13));
        assert!(close(epsilon_closed_form(0.1, 0.65, 0.0), 0.04, 1e-15));
    }

    #[test]
    fn rejects_bad_capacitances() {
        assert!(build_capacitance_network(0.0, 1.0, 0.1).is_err());
        assert!(build_capacitance_network(1.0, -1.0, 0.1).is_err());
        assert!(build_capacitance_network(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn potential_values() {
        let q = FluxQubitSpec::symmetric(50.0, 0.65, 0.0).unwrap();
        assert!(close(qubit_potential(0.0, &q), 1.3 * 50.0, 1e-14));
        for k in 0..200 {
            let phi = -7.0 + 0.07 * k as f64;
            let u = qubit_potential(phi, &q);
            assert!((qubit_potential(-phi, &q) - u).abs() < 1e-12 * 50.0);
            assert!((qubit_potential(phi + 2.0 * std::f64::consts::PI, &q) - u).abs() < 1e-12 * 50.0);
        }
    }

    #[test]
    fn minimum_location() {
        let q = FluxQubitSpec::symmetric(50.0, 0.65, 0.0).unwrap();
        let (phi, _) = locate_minimum(&q).unwrap();
        assert!((phi - 0.6932f64).abs() < 1e-4);
        assert!((1.0 - 1.3 * phi.cos()).abs() < 1e-12);
        let q1 = FluxQubitSpec::symmetric(50.0, 0.999_999_999, 0.0).unwrap();
        let (phi1, _) = locate_minimum(&q1).unwrap();
        assert!((phi1 - std::f64::consts::FRAC_PI_3).abs() < 1e-8);
        let q05 = FluxQubitSpec::symmetric(50.0, 0.5, 0.0).unwrap();
        assert!(matches!(locate_minimum(&q05), Err(Error::SingleWell(_))));
    }

    #[test]
    fn minimum_matches_newton_root() {
        for &alpha in &[0.55, 0.65, 0.8, 0.95] {
            let q = FluxQubitSpec::symmetric(30.0, alpha, 0.0).unwrap();
            let (phi, _) = locate_minimum(&q).unwrap();
            let mut x = 1.0;
            for _ in 0..60 {
                let f = 1.0 - 2.0 * alpha * f64::cos(x);
                let df = 2.0 * alpha * f64::sin(x);
                x -= f / df;
            }
            assert!((phi - x).abs() < 1e-9);
        }
    }

    #[test]
    fn resonator_identities() {
        let r = ResonatorSpec::new(3.0, 3.0).unwrap();
        let (w, _) = resonator_derived(&r);
        assert!(close(w, 8f64.sqrt() * 3.0, 1e-15));
        let half = ResonatorSpec::new(1.5, 3.0).unwrap();
        let (w2, z2) = resonator_derived(&half);
        let (_, z) = resonator_derived(&r);
        assert!(close(z2 / z, 2f64.sqrt(), 1e-14));
        assert!(close(w2 / w, 1.0 / 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn resonator_round_trip_through_lc() {
        let r = ResonatorSpec::new(2.5, 0.4).unwrap();
        let (w, z) = resonator_derived(&r);
        let (l, cap) = (r.inductance(), r.capacitance());
        assert!(close(w, 1.0 / (l * cap).sqrt(), 1e-14));
        assert!(close(z, (l / cap).sqrt(), 1e-14));
    }

    #[test]
    fn f32_network() {
        let n = build_capacitance_network(1.0f32, 1.0, 0.1).unwrap();
        assert!((n.epsilon - 1.0 / 12.0).abs() < 1e-6);
    }
}
