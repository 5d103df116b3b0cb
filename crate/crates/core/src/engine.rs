//! Single-point evaluation: build the coupled circuit, reduce it with the
//! exact SW map and read off couplings, spectra and closed-form baselines.

use crate::analytics::{g1_qq, g1_qr, g2_qq_gamma_form, impedance, AnalyticPrediction};
use crate::circuit_model::{locate_minimum, CapacitanceNetwork, CircuitElement, FluxQubitSpec, ResonatorSpec};
use crate::couplings::{
    excitation_labels, fix_gauge, pauli_decompose, qubit_resonator_decompose_with, GaugeFixedQubitBasis,
    PauliReport, ResonatorFit, RABI_FAMILY,
};
use crate::error::{Error, Result};
use nalgebra::DVector;

use crate::linalg::{c, hermitian_part, kron, Eigen};
use crate::operators::{
    coupled_hamiltonian_in, frame_ec, local_model, BasisSpec, CoupledHamiltonian, Reference, DEFAULT_DIM_CAP,
};
use crate::scalar::{CMat, Real};
use crate::spectra::{anharmonicity, canonical_lowest, summarize_qubit, SpectralSummary};
use crate::swt::{exact_sw_from, integrity, EffectiveHamiltonian, Integrity, Selection};

/// Coupled levels reported per point.
pub const REPORTED_LEVELS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    /// Charge states `-n_max..=n_max` per qubit.
    pub n_max: usize,
    /// Fock states kept for a resonator.
    pub n_ph: usize,
    /// Multiplies both truncations.
    pub truncation_scale: f64,
    pub reference: Reference,
    /// Level index `k` in `alpha_r = (E_k - E_0 - Delta) / Delta`.
    pub alpha_r_level: usize,
    /// Largest excitation number in the qubit-resonator block.
    pub max_excitation: usize,
    pub convergence: bool,
    /// Truncation factor used by the convergence check.
    pub convergence_factor: f64,
    /// Relative tolerance on the lowest coupled levels.
    pub convergence_tol: f64,
    /// Flag when the smallest principal cosine falls below this.
    pub overlap_tol: f64,
    /// Flag when the block is closer than `gap_tol * Delta` to the rest of the spectrum.
    pub gap_tol: f64,
    /// Parity-forbidden Pauli terms must stay below `parity_tol * Delta`.
    pub parity_tol: f64,
    /// Relative fit residual above which a qubit-resonator row is flagged.
    pub residual_tol: f64,
    /// Bounds on `||U^dagger U - I||`, `||U P - P0 U||` and the relative spectrum error.
    pub integrity_tol: [f64; 3],
    pub dim_cap: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            n_max: 15,
            n_ph: 30,
            truncation_scale: 1.0,
            reference: Reference::Renormalized,
            alpha_r_level: 3,
            max_excitation: 6,
            convergence: true,
            convergence_factor: 1.5,
            convergence_tol: 1e-8,
            overlap_tol: 0.5,
            gap_tol: 1e-3,
            parity_tol: 1e-6,
            residual_tol: 0.2,
            integrity_tol: [1e-12, 1e-10, 1e-10],
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl Settings {
    pub fn charge_basis(&self) -> BasisSpec {
        BasisSpec::ChargeGrid(self.n_max).scaled(self.truncation_scale)
    }

    pub fn fock_basis(&self) -> BasisSpec {
        BasisSpec::Fock(self.n_ph).scaled(self.truncation_scale)
    }

    fn enlarged(&self) -> Settings {
        Settings { truncation_scale: self.truncation_scale * self.convergence_factor, convergence: false, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    QubitQubit,
    QubitResonator,
}

impl System {
    pub fn name(&self) -> &'static str {
        match self {
            System::QubitQubit => "qubit_qubit",
            System::QubitResonator => "qubit_resonator",
        }
    }
}

/// Everything measured at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingReport<T: Real = f64> {
    pub system: System,
    pub gamma: T,
    pub epsilon: T,
    /// Renormalized gap of qubit 1 read from `H_eff`.
    pub delta: T,
    pub omega_q: T,
    pub delta_e: T,
    pub alpha_r: T,
    /// Same ratio on the renormalized single-qubit spectrum.
    pub alpha_r_single: T,
    pub pauli: Option<PauliReport<T>>,
    pub fit: Option<ResonatorFit<T>>,
    pub analytics: AnalyticPrediction<T>,
    /// `<0|phi|1>` of qubit 1 in its frame.
    pub phi01: T,
    /// Well position `arccos(1/2 alpha)` when the potential has two wells.
    pub phi_star: Option<T>,
    pub min_singular: T,
    pub gap: T,
    pub integrity: Integrity<T>,
    pub energies: Vec<T>,
    pub flags: Vec<String>,
}

impl<T: Real> CouplingReport<T> {
    pub fn g_qr(&self) -> Option<T> {
        self.fit.as_ref().map(|f| f.g)
    }

    pub fn residual(&self) -> Option<T> {
        self.fit.as_ref().map(|f| f.relative_residual)
    }

    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Report plus the intermediate objects, for diagnostics and tests.
#[derive(Clone, Debug)]
pub struct Evaluation<T: Real = f64> {
    pub report: CouplingReport<T>,
    pub coupled: CoupledHamiltonian<T>,
    pub eigen: Eigen<T>,
    pub effective: EffectiveHamiltonian<T>,
    pub labels: Vec<(usize, usize)>,
}

struct LocalQubit<T: Real> {
    gauge: GaugeFixedQubitBasis<T>,
    summary: SpectralSummary<T>,
}

fn local_qubit<T: Real>(ch: &CoupledHamiltonian<T>, node: usize, alpha_r_level: usize) -> Result<LocalQubit<T>> {
    let l = &ch.local[node];
    let e = Eigen::of(&l.h0)?;
    let levels = (alpha_r_level + 1).max(4);
    let pairs = canonical_lowest(&e, levels, Some(l.basis.anchor()));
    let gauge = fix_gauge(&pairs.vectors.columns(0, 2).into_owned(), &l.phi, Some(l.basis.anchor()))?;
    let mut summary = summarize_qubit(&pairs.values)?;
    summary.alpha_r = anharmonicity(&pairs.values, alpha_r_level, summary.delta);
    Ok(LocalQubit { gauge, summary })
}

fn product_basis<T: Real>(a: &CMat<T>, b: &CMat<T>, labels: &[(usize, usize)]) -> CMat<T> {
    let n = a.nrows() * b.nrows();
    let mut out = CMat::zeros(n, labels.len());
    for (k, &(i, j)) in labels.iter().enumerate() {
        let col = kron(&a.columns(i, 1).into_owned(), &b.columns(j, 1).into_owned());
        out.set_column(k, &col.column(0));
    }
    out
}

fn lowest_energies<T: Real>(eig: &Eigen<T>) -> Vec<T> {
    eig.values.iter().copied().take(REPORTED_LEVELS).collect()
}

fn converged<T: Real>(a: &[T], b: &[T], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (*x - *y).abs() <= T::lit(tol) * T::one().max(x.abs()))
}

/// Lowest coupled levels with every truncation multiplied by the
/// convergence factor. Each enlarged qubit is kept to as many of its own
/// eigenstates as the working charge grid has states.
fn enlarged_levels<T: Real>(net: &CapacitanceNetwork<T>, elements: [&CircuitElement<T>; 2], s: &Settings) -> Result<Vec<T>> {
    let big = s.enlarged();
    let mut parts = Vec::with_capacity(2);
    for (node, e) in elements.into_iter().enumerate() {
        let frame = frame_ec(s.reference, net, node);
        let inv = if node == 0 { net.inv11 } else { net.inv22 };
        let shift = c(T::lit(4.0) * (inv - frame));
        let part = match e {
            CircuitElement::Qubit(_) => {
                let l = local_model(e, big.charge_basis(), frame)?;
                let eig = Eigen::of(&l.h0)?;
                let u = eig.lowest(s.charge_basis().dim());
                let h = CMat::from_diagonal(&DVector::from_iterator(u.ncols(), eig.values.iter().take(u.ncols()).map(|&v| c(v))));
                let n = u.adjoint() * &l.n * &u;
                let n_sq = u.adjoint() * (&l.n * &l.n) * &u;
                (h + n_sq * shift, n)
            }
            CircuitElement::Resonator(_) => {
                let l = local_model(e, big.fock_basis(), frame)?;
                let n_sq = &l.n * &l.n;
                (l.h0 + n_sq * shift, l.n)
            }
        };
        parts.push(part);
    }
    let (d1, d2) = (parts[0].0.nrows(), parts[1].0.nrows());
    let dim = d1 * d2;
    if dim > s.dim_cap {
        return Err(Error::DimensionCap { dim, cap: s.dim_cap });
    }
    let h = kron(&parts[0].0, &CMat::identity(d2, d2))
        + kron(&CMat::identity(d1, d1), &parts[1].0)
        + kron(&parts[0].1, &parts[1].1) * c(T::lit(8.0) * net.inv_od);
    let mut v = T::eigvalsh(&hermitian_part(&h))?;
    v.truncate(REPORTED_LEVELS);
    Ok(v)
}

/// Two qubits joined by `Cg = gamma C`, `C = 1/EC` of the first qubit.
pub fn qubit_qubit<T: Real>(q1: &FluxQubitSpec<T>, q2: &FluxQubitSpec<T>, gamma: T, s: &Settings) -> Result<CouplingReport<T>> {
    evaluate_qubit_qubit(q1, q2, gamma, s).map(|e| e.report)
}

pub fn evaluate_qubit_qubit<T: Real>(
    q1: &FluxQubitSpec<T>,
    q2: &FluxQubitSpec<T>,
    gamma: T,
    s: &Settings,
) -> Result<Evaluation<T>> {
    let (e1, e2) = (CircuitElement::Qubit(*q1), CircuitElement::Qubit(*q2));
    let net = CapacitanceNetwork::between(&e1, &e2, gamma / q1.ec)?;
    let b = s.charge_basis();
    let ch = coupled_hamiltonian_in(&net, &e1, &e2, b, b, s.reference, s.dim_cap)?;
    let l1 = local_qubit(&ch, 0, s.alpha_r_level)?;
    let l2 = local_qubit(&ch, 1, s.alpha_r_level)?;
    let labels = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
    let bare = product_basis(&l1.gauge.states, &l2.gauge.states, &labels);
    let eigen = Eigen::of(&ch.h.matrix)?;
    let effective = exact_sw_from(&eigen, &bare, Selection::Lowest)?;
    let integ = integrity(&effective, &eigen)?;
    let pauli = pauli_decompose(&effective.matrix)?;
    let delta = pauli.delta[0];

    let mut flags = Vec::new();
    let energies = lowest_energies(&eigen);
    let alpha_r = if eigen.len() > s.alpha_r_level {
        anharmonicity(&eigen.values, s.alpha_r_level, delta)
    } else {
        T::lit(f64::NAN)
    };
    let forbidden = [(1, 0), (2, 0), (0, 1), (0, 2), (1, 3), (3, 1), (2, 3), (3, 2), (1, 2), (2, 1)];
    let worst = forbidden.iter().fold(T::zero(), |m, &(a, b)| m.max(pauli.coeffs[a][b].abs()));
    if worst > T::lit(s.parity_tol) * delta.abs() {
        flags.push("parity".to_string());
    }
    common_flags(&effective, delta, s, &mut flags);
    integrity_flag(&integ, s, &mut flags);

    let phi_star = locate_minimum(q1).ok().map(|p| p.0);
    let sq = &l1.summary;
    let analytics = AnalyticPrediction {
        g1_qq: g1_qq(delta, l1.gauge.phi01, &net, net.inv11).ok(),
        g1_qr: None,
        g2_qq: g2_qq_gamma_form(delta, sq.delta_e, sq.omega_q, gamma, q1.alpha, q1.beta).ok(),
        delta,
        phi_star: l1.gauge.phi01,
        cbar_q: net.cbar1(),
        cbar_od: net.cbar_od(),
        ec_q: net.inv11,
        z: None,
        omega_q: Some(sq.omega_q),
        delta_e: Some(sq.delta_e),
    };

    if s.convergence {
        let wide = enlarged_levels(&net, [&e1, &e2], s)?;
        if !converged(&energies, &wide, s.convergence_tol) {
            flags.push("convergence".to_string());
        }
    }

    let report = CouplingReport {
        system: System::QubitQubit,
        gamma,
        epsilon: net.epsilon,
        delta,
        omega_q: sq.omega_q,
        delta_e: sq.delta_e,
        alpha_r,
        alpha_r_single: sq.alpha_r,
        pauli: Some(pauli),
        fit: None,
        analytics,
        phi01: l1.gauge.phi01,
        phi_star,
        min_singular: effective.diagnostics.min_singular,
        gap: effective.diagnostics.gap,
        integrity: integ,
        energies,
        flags,
    };
    Ok(Evaluation { report, coupled: ch, eigen, effective, labels })
}

fn common_flags<T: Real>(eff: &EffectiveHamiltonian<T>, delta: T, s: &Settings, flags: &mut Vec<String>) {
    if eff.diagnostics.min_singular < T::lit(s.overlap_tol) {
        flags.push("subspace".to_string());
    }
    if eff.diagnostics.gap < T::lit(s.gap_tol) * delta.abs() {
        flags.push("gap".to_string());
    }
}

fn integrity_flag<T: Real>(i: &Integrity<T>, s: &Settings, flags: &mut Vec<String>) {
    let [u, p, e] = s.integrity_tol;
    if !(i.unitarity <= T::lit(u) && i.intertwining <= T::lit(p) && i.spectrum <= T::lit(e)) {
        flags.push("integrity".to_string());
    }
}

/// Largest excitation number `K` whose manifolds stay below the second
/// qubit level by half the smaller of `omega` and `E_2 - E_1`.
pub fn excitation_cutoff<T: Real>(qubit_levels: &[T], omega: T, k_max: usize, n_ph: usize) -> usize {
    let (e0, e1, e2) = (qubit_levels[0], qubit_levels[1], qubit_levels[2]);
    let thr = (e2 - e0) - T::lit(0.5) * omega.min(e2 - e1);
    let mut k = 0;
    while k < k_max && k + 1 < n_ph {
        let next = k + 1;
        let top = (e1 - e0 + omega * T::lit((next - 1) as f64)).max(omega * T::lit(next as f64));
        if top > thr {
            break;
        }
        k = next;
    }
    k
}

/// A qubit and a resonator joined by `Cg = gamma C`.
pub fn qubit_resonator<T: Real>(q: &FluxQubitSpec<T>, r: &ResonatorSpec<T>, gamma: T, s: &Settings) -> Result<CouplingReport<T>> {
    evaluate_qubit_resonator(q, r, gamma, s).map(|e| e.report)
}

pub fn evaluate_qubit_resonator<T: Real>(
    q: &FluxQubitSpec<T>,
    r: &ResonatorSpec<T>,
    gamma: T,
    s: &Settings,
) -> Result<Evaluation<T>> {
    let (e1, e2) = (CircuitElement::Qubit(*q), CircuitElement::Resonator(*r));
    let net = CapacitanceNetwork::between(&e1, &e2, gamma / q.ec)?;
    let (bq, bf) = (s.charge_basis(), s.fock_basis());
    let ch = coupled_hamiltonian_in(&net, &e1, &e2, bq, bf, s.reference, s.dim_cap)?;
    let lq = local_qubit(&ch, 0, s.alpha_r_level)?;
    let ec_r = ch.local[1].ec_frame;
    let omega = (T::lit(8.0) * r.ejr * ec_r).sqrt();
    let k = excitation_cutoff(&lq.summary.energies, omega, s.max_excitation, bf.dim());
    if k == 0 {
        return Err(Error::Intruder { low: 1, high: 2 });
    }
    let labels = excitation_labels(k);
    let fock = CMat::<T>::identity(bf.dim(), bf.dim());
    let bare = product_basis(&lq.gauge.states, &fock, &labels);
    let eigen = Eigen::of(&ch.h.matrix)?;
    let effective = exact_sw_from(&eigen, &bare, Selection::MaxOverlap)?;
    let integ = integrity(&effective, &eigen)?;
    // one excitation cannot tell the dispersive shift from omega_r
    let family: Vec<&'static str> = RABI_FAMILY.iter().copied().filter(|n| k >= 2 || *n != "zn").collect();
    let fit = qubit_resonator_decompose_with(&effective.matrix, &labels, &family)?;
    let delta = fit.delta;

    let mut flags = Vec::new();
    if !fit.identifiable {
        flags.push("fit_rank".to_string());
    }
    if fit.relative_residual > T::lit(s.residual_tol) {
        flags.push("residual".to_string());
    }
    if effective.diagnostics.min_singular < T::lit(s.overlap_tol) {
        flags.push("subspace".to_string());
    }
    integrity_flag(&integ, s, &mut flags);
    let energies = lowest_energies(&eigen);
    let sq = &lq.summary;

    if s.convergence {
        let wide = enlarged_levels(&net, [&e1, &e2], s)?;
        if !converged(&energies, &wide, s.convergence_tol) {
            flags.push("convergence".to_string());
        }
    }

    let z = impedance(r.ejr, ec_r);
    let analytics = AnalyticPrediction {
        g1_qq: None,
        g1_qr: g1_qr(delta, lq.gauge.phi01, &net, z).ok(),
        g2_qq: None,
        delta,
        phi_star: lq.gauge.phi01,
        cbar_q: net.cbar1(),
        cbar_od: net.cbar_od(),
        ec_q: net.inv11,
        z: Some(z),
        omega_q: Some(sq.omega_q),
        delta_e: Some(sq.delta_e),
    };
    let report = CouplingReport {
        system: System::QubitResonator,
        gamma,
        epsilon: net.epsilon,
        delta,
        omega_q: sq.omega_q,
        delta_e: sq.delta_e,
        alpha_r: sq.alpha_r,
        alpha_r_single: sq.alpha_r,
        pauli: None,
        fit: Some(fit),
        analytics,
        phi01: lq.gauge.phi01,
        phi_star: locate_minimum(q).ok().map(|p| p.0),
        min_singular: effective.diagnostics.min_singular,
        gap: effective.diagnostics.gap,
        integrity: integ,
        energies,
        flags,
    };
    Ok(Evaluation { report, coupled: ch, eigen, effective, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> Settings {
        Settings { n_max: 10, n_ph: 12, convergence: false, ..Settings::default() }
    }

    #[test]
    fn cutoff_counts_manifolds() {
        // qubit levels 0, 1, 10: thr = 10 - 0.5 * 2 = 9
        assert_eq!(excitation_cutoff(&[0.0, 1.0, 10.0], 2.0, 6, 30), 4);
        assert_eq!(excitation_cutoff(&[0.0, 1.0, 10.0], 2.0, 2, 30), 2);
        assert_eq!(excitation_cutoff(&[0.0, 1.0, 2.0], 5.0, 6, 30), 0);
    }

    #[test]
    fn qubit_qubit_decoupled() {
        let q = FluxQubitSpec::<f64>::symmetric(50.0, 0.65, 0.0).unwrap();
        let r = qubit_qubit(&q, &q, 0.0, &fast()).unwrap();
        let p = r.pauli.as_ref().unwrap();
        for a in 1..4 {
            for b in 1..4 {
                assert!(p.coeffs[a][b].abs() < 1e-10, "{a}{b}: {}", p.coeffs[a][b]);
            }
        }
        assert_eq!(r.analytics.g1_qq, Some(0.0));
        assert!(r.flags.is_empty(), "{:?}", r.flags);
    }

    #[test]
    fn qubit_qubit_small_coupling() {
        let q = FluxQubitSpec::<f64>::symmetric(50.0, 0.65, 0.0).unwrap();
        let r = qubit_qubit(&q, &q, 0.01, &fast()).unwrap();
        let p = r.pauli.as_ref().unwrap();
        assert!(p.g_yy() > 0.0);
        assert!(p.g_yy() > 10.0 * p.g_zz().abs());
        for a in 0..4 {
            for b in 0..4 {
                assert!((p.coeffs[a][b] - p.coeffs[b][a]).abs() < 1e-8);
            }
        }
        let g1 = r.analytics.g1_qq.unwrap();
        assert!((p.g_yy() / g1 - 1.0).abs() < 0.1, "{} vs {g1}", p.g_yy());
    }

    #[test]
    fn qubit_resonator_decoupled() {
        let q = FluxQubitSpec::<f64>::symmetric(20.0, 0.65, 0.0).unwrap();
        let r = ResonatorSpec::<f64>::from_ratios(20.0, 8.0, 2.0).unwrap();
        let rep = qubit_resonator(&q, &r, 0.0, &fast()).unwrap();
        let f = rep.fit.as_ref().unwrap();
        assert!(f.g.abs() < 1e-10 && f.residual < 1e-10);
    }
}
