//! Matrix representations of circuit Hamiltonians and their charge, flux and
//! ladder operators.
//!
//! Charges are Cooper-pair numbers `n = q/2e`, so a charging term `q^2/2C`
//! reads `4 n^2 / C` and a cross term `q1 q2 / C̄_od` reads `8 n1 n2 / C̄_od`.

use num_complex::Complex;

use crate::circuit_model::{resonator_derived_with, CapacitanceNetwork, CircuitElement};
use crate::error::{Error, Result};
use crate::linalg::{c, ensure_hermitian, identity, kron};
use crate::scalar::{CMat, Real};

pub const DEFAULT_DIM_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisSpec {
    /// Charge states `-n_max ..= n_max`.
    ChargeGrid(usize),
    /// Fock states `0 .. n_ph`.
    Fock(usize),
}

impl BasisSpec {
    pub fn dim(&self) -> usize {
        match *self {
            BasisSpec::ChargeGrid(n) => 2 * n + 1,
            BasisSpec::Fock(n) => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisSpec::ChargeGrid(n) if n < 1 => Err(Error::InvalidSpec("n_max must be >= 1".into())),
            BasisSpec::Fock(n) if n < 2 => Err(Error::InvalidSpec("N_ph must be >= 2".into())),
            _ => Ok(()),
        }
    }

    /// Index of the `n = 0` charge state, or the vacuum.
    pub fn anchor(&self) -> usize {
        match *self {
            BasisSpec::ChargeGrid(n) => n,
            BasisSpec::Fock(_) => 0,
        }
    }

    /// Same kind, truncation multiplied by `factor` and rounded up.
    pub fn scaled(&self, factor: f64) -> BasisSpec {
        let up = |n: usize| ((n as f64) * factor).ceil().max(1.0) as usize;
        match *self {
            BasisSpec::ChargeGrid(n) => BasisSpec::ChargeGrid(up(n)),
            BasisSpec::Fock(n) => BasisSpec::Fock(up(n).max(2)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    Single(BasisSpec),
    Product(BasisSpec, BasisSpec),
    Abstract(usize),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Single(b) => b.dim(),
            Basis::Product(a, b) => a.dim() * b.dim(),
            Basis::Abstract(n) => *n,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Real = f64> {
    pub matrix: CMat<T>,
    pub basis: Basis,
}

pub(crate) fn hermitian_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::lit(64.0) * T::unit_roundoff())
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(matrix: CMat<T>, basis: Basis) -> Result<Self> {
        if matrix.nrows() != basis.dim() || !matrix.is_square() {
            return Err(Error::BasisMismatch(format!(
                "matrix is {}x{}, basis has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dim()
            )));
        }
        ensure_hermitian(&matrix, hermitian_tol())?;
        Ok(HermitianOperator { matrix, basis })
    }

    pub fn abstract_from(matrix: CMat<T>) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, Basis::Abstract(n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Operators of the periodic charge basis. `e^{i phi}` raises `n` by one.
#[derive(Clone, Debug)]
pub struct ChargeOps<T: Real = f64> {
    pub n_max: usize,
    pub n: CMat<T>,
    pub cos_phi: CMat<T>,
    pub sin_phi: CMat<T>,
    pub cos_2phi: CMat<T>,
    pub sin_2phi: CMat<T>,
    /// Phase on `(-pi, pi)`, `<n|phi|m> = -i (-1)^k / k` with `k = m - n`.
    pub phi: CMat<T>,
}

/// Shift operator `sum_n |n+k><n|`.
fn shift<T: Real>(dim: usize, k: usize) -> CMat<T> {
    let mut m = CMat::zeros(dim, dim);
    for j in 0..dim.saturating_sub(k) {
        m[(j + k, j)] = c(T::one());
    }
    m
}

fn cos_sin<T: Real>(dim: usize, k: usize) -> (CMat<T>, CMat<T>) {
    let up = shift::<T>(dim, k);
    let down = up.adjoint();
    let half = c(T::lit(0.5));
    let cos = (&up + &down) * half;
    // (e^{ik phi} - e^{-ik phi}) / 2i
    let sin = (&up - &down) * Complex::new(T::zero(), -T::lit(0.5));
    (cos, sin)
}

pub fn charge_ops<T: Real>(n_max: usize) -> Result<ChargeOps<T>> {
    BasisSpec::ChargeGrid(n_max).validate()?;
    let dim = 2 * n_max + 1;
    let n = CMat::from_fn(dim, dim, |i, j| if i == j { c(T::lit(i as f64 - n_max as f64)) } else { c(T::zero()) });
    let (cos_phi, sin_phi) = cos_sin::<T>(dim, 1);
    let (cos_2phi, sin_2phi) = cos_sin::<T>(dim, 2);
    let phi = CMat::from_fn(dim, dim, |i, j| {
        if i == j {
            return c(T::zero());
        }
        let k = j as i64 - i as i64;
        let sign = if k.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        Complex::new(T::zero(), -sign / T::lit(k as f64))
    });
    Ok(ChargeOps { n_max, n, cos_phi, sin_phi, cos_2phi, sin_2phi, phi })
}

/// `(n, cos phi, sin phi)` on the charge grid.
pub fn charge_basis_ops<T: Real>(
    n_max: usize,
) -> Result<(HermitianOperator<T>, HermitianOperator<T>, HermitianOperator<T>)> {
    let ops = charge_ops::<T>(n_max)?;
    let b = Basis::Single(BasisSpec::ChargeGrid(n_max));
    Ok((
        HermitianOperator::new(ops.n, b.clone())?,
        HermitianOperator::new(ops.cos_phi, b.clone())?,
        HermitianOperator::new(ops.sin_phi, b)?,
    ))
}

/// Truncated ladder operators plus physical charge and flux.
#[derive(Clone, Debug)]
pub struct FockOps<T: Real = f64> {
    pub a: CMat<T>,
    pub num: CMat<T>,
    /// `a + a^dagger`
    pub x: CMat<T>,
    /// `i (a^dagger - a)`
    pub p: CMat<T>,
    pub q: CMat<T>,
    pub phi: CMat<T>,
}

pub fn annihilation<T: Real>(n_ph: usize) -> CMat<T> {
    let mut a = CMat::zeros(n_ph, n_ph);
    for m in 1..n_ph {
        a[(m - 1, m)] = c(T::lit(m as f64).sqrt());
    }
    a
}

/// `q = sqrt(hbar/2Z) (a + a^dagger)` and `phi = sqrt(hbar Z/2) i (a - a^dagger)`,
/// so that `[phi, q] = i hbar` away from the truncation edge.
pub fn fock_ops<T: Real>(n_ph: usize, _omega_r: T, z: T) -> Result<FockOps<T>> {
    BasisSpec::Fock(n_ph).validate()?;
    if !(z > T::zero()) {
        return Err(Error::InvalidSpec("impedance must be positive".into()));
    }
    let a = annihilation::<T>(n_ph);
    let ad = a.adjoint();
    let num = &ad * &a;
    let x = &a + &ad;
    let p = (&ad - &a) * Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    let q = &x * c((half / z).sqrt());
    let phi = &p * c(-(z * half).sqrt());
    Ok(FockOps { a, num, x, p, q, phi })
}

/// One element written in a chosen frame.
///
/// `h0` uses the charging energy `ec_frame`; for a resonator the Fock basis is
/// the eigenbasis of that frame.
#[derive(Clone, Debug)]
pub struct LocalModel<T: Real = f64> {
    pub basis: BasisSpec,
    pub ec_frame: T,
    pub h0: CMat<T>,
    /// Cooper-pair number.
    pub n: CMat<T>,
    /// Superconducting phase.
    pub phi: CMat<T>,
}

pub fn local_model<T: Real>(element: &CircuitElement<T>, basis: BasisSpec, ec_frame: T) -> Result<LocalModel<T>> {
    basis.validate()?;
    let four = c(T::lit(4.0));
    match (element, basis) {
        (CircuitElement::Qubit(q), BasisSpec::ChargeGrid(n_max)) => {
            let ops = charge_ops::<T>(n_max)?;
            let two = T::lit(2.0);
            let shift = two * T::PI() * q.frustration;
            let dim = basis.dim();
            let u = identity::<T>(dim) * c(two + q.alpha)
                - &ops.cos_phi * c(two)
                - (&ops.cos_2phi * c(shift.cos()) - &ops.sin_2phi * c(shift.sin())) * c(q.alpha);
            let h0 = &ops.n * &ops.n * (four * c(ec_frame)) + u * c(q.ej);
            Ok(LocalModel { basis, ec_frame, h0, n: ops.n, phi: ops.phi })
        }
        (CircuitElement::Resonator(r), BasisSpec::Fock(n_ph)) => {
            let (omega, _) = resonator_derived_with(r.ejr, ec_frame);
            let a = annihilation::<T>(n_ph);
            let num = a.adjoint() * &a;
            let h0 = (num + identity::<T>(n_ph) * c(T::lit(0.5))) * c(omega);
            let n_zpf = (r.ejr / (T::lit(32.0) * ec_frame)).sqrt().sqrt();
            let phi_zpf = (T::lit(2.0) * ec_frame / r.ejr).sqrt().sqrt();
            let n = (&a + a.adjoint()) * c(n_zpf);
            let phi = (&a - a.adjoint()) * Complex::new(T::zero(), phi_zpf);
            Ok(LocalModel { basis, ec_frame, h0, n, phi })
        }
        _ => Err(Error::BasisMismatch("qubits need a charge grid, resonators a Fock basis".into())),
    }
}

fn own_ec<T: Real>(element: &CircuitElement<T>) -> T {
    T::one() / element.capacitance()
}

/// `q^2/2C + U(phi)` for a qubit, `hbar omega_r (a^dagger a + 1/2)` for a resonator.
pub fn bare_hamiltonian<T: Real>(element: &CircuitElement<T>, basis: BasisSpec) -> Result<HermitianOperator<T>> {
    let m = local_model(element, basis, own_ec(element))?;
    HermitianOperator::new(m.h0, Basis::Single(basis))
}

/// Frame in which the unperturbed Hamiltonian is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Reference {
    /// Each element with its renormalized capacitance `C̄_i`; only the
    /// `q1 q2 / C̄_od` cross term is left over.
    #[default]
    Renormalized,
    /// Each element with its own capacitance `C_i`.
    Bare,
}

impl Reference {
    pub fn name(&self) -> &'static str {
        match self {
            Reference::Renormalized => "renormalized",
            Reference::Bare => "bare",
        }
    }
}

pub fn frame_ec<T: Real>(reference: Reference, net: &CapacitanceNetwork<T>, node: usize) -> T {
    match (reference, node) {
        (Reference::Renormalized, 0) => net.inv11,
        (Reference::Renormalized, _) => net.inv22,
        (Reference::Bare, 0) => T::one() / net.c1,
        (Reference::Bare, _) => T::one() / net.c2,
    }
}

#[derive(Clone, Debug)]
pub struct CoupledHamiltonian<T: Real = f64> {
    pub h: HermitianOperator<T>,
    pub h0: HermitianOperator<T>,
    pub local: [LocalModel<T>; 2],
    pub reference: Reference,
}

impl<T: Real> CoupledHamiltonian<T> {
    /// `H - H0`.
    pub fn perturbation(&self) -> CMat<T> {
        &self.h.matrix - &self.h0.matrix
    }
}

/// Coupled Hamiltonian `H` and the split reference `H0`
/// built from the bare capacitances.
pub fn coupled_hamiltonian<T: Real>(
    net: &CapacitanceNetwork<T>,
    e1: &CircuitElement<T>,
    e2: &CircuitElement<T>,
    b1: BasisSpec,
    b2: BasisSpec,
) -> Result<CoupledHamiltonian<T>> {
    coupled_hamiltonian_in(net, e1, e2, b1, b2, Reference::Bare, DEFAULT_DIM_CAP)
}

pub fn coupled_hamiltonian_in<T: Real>(
    net: &CapacitanceNetwork<T>,
    e1: &CircuitElement<T>,
    e2: &CircuitElement<T>,
    b1: BasisSpec,
    b2: BasisSpec,
    reference: Reference,
    dim_cap: usize,
) -> Result<CoupledHamiltonian<T>> {
    let dim = b1.dim() * b2.dim();
    if dim > dim_cap {
        return Err(Error::DimensionCap { dim, cap: dim_cap });
    }
    check_consistent(net, e1, e2)?;
    let f1 = frame_ec(reference, net, 0);
    let f2 = frame_ec(reference, net, 1);
    let l1 = local_model(e1, b1, f1)?;
    let l2 = local_model(e2, b2, f2)?;
    let i1 = identity::<T>(b1.dim());
    let i2 = identity::<T>(b2.dim());
    let h0 = kron(&l1.h0, &i2) + kron(&i1, &l2.h0);
    let four = T::lit(4.0);
    let v = kron(&(&l1.n * &l1.n), &i2) * c(four * (net.inv11 - f1))
        + kron(&i1, &(&l2.n * &l2.n)) * c(four * (net.inv22 - f2))
        + kron(&l1.n, &l2.n) * c(T::lit(8.0) * net.inv_od);
    let basis = Basis::Product(b1, b2);
    let h = HermitianOperator::new(&h0 + v, basis.clone())?;
    let h0 = HermitianOperator::new(h0, basis)?;
    Ok(CoupledHamiltonian { h, h0, local: [l1, l2], reference })
}

fn check_consistent<T: Real>(net: &CapacitanceNetwork<T>, e1: &CircuitElement<T>, e2: &CircuitElement<T>) -> Result<()> {
    let tol = T::lit(1e-12).max(T::lit(16.0) * T::unit_roundoff());
    for (node, e) in [(net.c1, e1), (net.c2, e2)] {
        let ce = e.capacitance();
        if (node - ce).abs() > tol * ce {
            return Err(Error::InvalidSpec(format!("network node capacitance {node} does not match element capacitance {ce}")));
        }
    }
    Ok(())
}

/// Perturbation `V` of the bare split, `H - H0 = epsilon V` with
/// `V = 8 n1 n2 / sqrt(C1 C2) - 4 sqrt(C2/C1) n1^2 / C1 - 4 sqrt(C1/C2) n2^2 / C2`.
pub fn split_perturbation<T: Real>(net: &CapacitanceNetwork<T>, n1: &CMat<T>, n2: &CMat<T>) -> CMat<T> {
    let i1 = identity::<T>(n1.nrows());
    let i2 = identity::<T>(n2.nrows());
    let (c1, c2) = (net.c1, net.c2);
    let r = (c1 * c2).sqrt();
    let four = T::lit(4.0);
    kron(n1, n2) * c(T::lit(8.0) / r) - kron(&(n1 * n1), &i2) * c(four * (c2 / c1).sqrt() / c1)
        - kron(&i1, &(n2 * n2)) * c(four * (c1 / c2).sqrt() / c2)
}
