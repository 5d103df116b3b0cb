//! Gauge fixing of the bare qubit pair and decomposition of effective
//! Hamiltonians into Pauli and Pauli-Fock coefficients.
//!
//! Qubit basis order is `(|0>, |1>)` with
//! `sz = diag(-1, 1)`, `sx = [[0, 1], [1, 0]]`, `sy = [[0, i], [-i, 0]]`,
//! so that `H_qubit = Delta sz / 2`.

use nalgebra::DMatrix;
use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{c, ensure_hermitian, frobenius, kron};
use crate::scalar::{CMat, CVec, Real};
use crate::spectra::canonical_phase;

pub const PAULI_LABELS: [char; 4] = ['I', 'x', 'y', 'z'];

pub fn pauli<T: Real>(a: usize) -> CMat<T> {
    let (z, o) = (T::zero(), T::one());
    let m = |v: [Complex<T>; 4]| CMat::from_row_slice(2, 2, &v);
    match a {
        0 => m([c(o), c(z), c(z), c(o)]),
        1 => m([c(z), c(o), c(o), c(z)]),
        2 => m([c(z), Complex::new(z, o), Complex::new(z, -o), c(z)]),
        3 => m([c(-o), c(z), c(z), c(o)]),
        _ => panic!("pauli index {a} out of range"),
    }
}

/// Bare qubit pair with `<0|phi|1>` real and positive.
#[derive(Clone, Debug)]
pub struct GaugeFixedQubitBasis<T: Real = f64> {
    /// `n x 2`, columns `|0>` and `|1>`.
    pub states: CMat<T>,
    /// `<0|phi|1>` after fixing.
    pub phi01: T,
}

impl<T: Real> GaugeFixedQubitBasis<T> {
    pub fn state(&self, k: usize) -> CVec<T> {
        self.states.column(k).into_owned()
    }

    /// `<0|op|1>`.
    pub fn element01(&self, op: &CMat<T>) -> Complex<T> {
        self.state(0).dotc(&(op * self.state(1)))
    }
}

/// Fixes `|0>` real and positive on `anchor` and rotates `|1>` so that
/// `<0|phi|1>` is real and positive. The result does not depend on the
/// input phases.
pub fn fix_gauge<T: Real>(pair: &CMat<T>, phi_op: &CMat<T>, anchor: Option<usize>) -> Result<GaugeFixedQubitBasis<T>> {
    if pair.ncols() != 2 {
        return Err(Error::TooFewLevels { need: 2, got: pair.ncols() });
    }
    let mut s0 = pair.column(0).into_owned();
    canonical_phase(&mut s0, anchor);
    let mut s1 = pair.column(1).into_owned();
    let p = s0.dotc(&(phi_op * &s1));
    let r = p.modulus();
    if r < T::lit(1e-10) {
        return Err(Error::GaugeUndefined(r.to_f64_lossy()));
    }
    s1 *= Complex::new(p.re / r, -p.im / r);
    let mut states = CMat::zeros(pair.nrows(), 2);
    states.set_column(0, &s0);
    states.set_column(1, &s1);
    Ok(GaugeFixedQubitBasis { states, phi01: r })
}

/// Two-qubit Pauli coefficients, `coeffs[a][b]` for `sa (x) sb`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliReport<T: Real = f64> {
    pub coeffs: [[T; 4]; 4],
    /// Renormalized gap of each qubit, twice the length of its Bloch vector.
    pub delta: [T; 2],
    /// Largest imaginary part met while taking traces.
    pub imag_defect: T,
}

impl<T: Real> PauliReport<T> {
    pub fn offset(&self) -> T {
        self.coeffs[0][0]
    }

    pub fn get(&self, a: char, b: char) -> T {
        let i = |ch: char| PAULI_LABELS.iter().position(|&p| p == ch).expect("pauli label");
        self.coeffs[i(a)][i(b)]
    }

    pub fn g_yy(&self) -> T {
        self.coeffs[2][2]
    }

    pub fn g_zz(&self) -> T {
        self.coeffs[3][3]
    }

    pub fn g_xx(&self) -> T {
        self.coeffs[1][1]
    }

    pub fn mean_delta(&self) -> T {
        (self.delta[0] + self.delta[1]) / T::lit(2.0)
    }

    pub fn reassemble(&self) -> CMat<T> {
        let mut h = CMat::zeros(4, 4);
        for a in 0..4 {
            for b in 0..4 {
                h += kron(&pauli::<T>(a), &pauli::<T>(b)) * c(self.coeffs[a][b]);
            }
        }
        h
    }
}

/// `g_ab = Tr[(sa (x) sb) H] / 4`, basis index `2 q1 + q2`.
pub fn pauli_decompose<T: Real>(h: &CMat<T>) -> Result<PauliReport<T>> {
    if h.nrows() != 4 || h.ncols() != 4 {
        return Err(Error::BasisMismatch(format!("expected 4x4, got {}x{}", h.nrows(), h.ncols())));
    }
    ensure_hermitian(h, T::lit(1e-10))?;
    let mut coeffs = [[T::zero(); 4]; 4];
    let mut imag_defect = T::zero();
    let quarter = T::lit(0.25);
    for a in 0..4 {
        for b in 0..4 {
            let s = kron(&pauli::<T>(a), &pauli::<T>(b));
            let tr = (s * h).trace();
            coeffs[a][b] = tr.re * quarter;
            imag_defect = imag_defect.max(tr.im.abs() * quarter);
        }
    }
    let bloch = |v: [T; 3]| T::lit(2.0) * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let delta = [
        bloch([coeffs[1][0], coeffs[2][0], coeffs[3][0]]),
        bloch([coeffs[0][1], coeffs[0][2], coeffs[0][3]]),
    ];
    Ok(PauliReport { coeffs, delta, imag_defect })
}

/// Operators fitted to a qubit-resonator block.
pub const RABI_FAMILY: [&str; 13] = ["II", "zI", "In", "yX", "xP", "zX", "xX", "yP", "zP", "zn", "IS", "xI", "yI"];

#[derive(Clone, Debug, PartialEq)]
pub struct ResonatorFit<T: Real = f64> {
    pub coeffs: Vec<(&'static str, T)>,
    pub delta: T,
    pub omega_r: T,
    /// Magnitude of the excitation-conserving exchange `g (s- a^dagger + h.c.)`;
    /// equals `|g|` for a Rabi term `g sy (a + a^dagger)`.
    pub g: T,
    /// Magnitude of the counter-rotating exchange.
    pub g_counter: T,
    /// Frobenius norm of the part of `H_eff` outside the fitted family.
    pub residual: T,
    /// `residual / ||H_eff - tr(H_eff)/d||`.
    pub relative_residual: T,
    pub rank: usize,
    pub family_size: usize,
    /// `delta`, `omega_r` and `g` are fixed by the data.
    pub identifiable: bool,
    /// `g_counter` is fixed by the data.
    pub counter_identifiable: bool,
}

impl<T: Real> ResonatorFit<T> {
    pub fn coeff(&self, name: &str) -> T {
        self.coeffs.iter().find(|c| c.0 == name).map(|c| c.1).unwrap_or(T::zero())
    }

    pub fn full_rank(&self) -> bool {
        self.rank == self.family_size
    }
}

fn fock_matrix<T: Real>(name: char, size: usize) -> DMatrix<Complex<T>> {
    let a = crate::operators::annihilation::<T>(size);
    let ad = a.adjoint();
    match name {
        'I' => DMatrix::identity(size, size),
        'X' => &a + &ad,
        'P' => (&ad - &a) * Complex::new(T::zero(), T::one()),
        'n' => &ad * &a,
        'S' => &a * &a + &ad * &ad,
        _ => panic!("unknown Fock operator {name}"),
    }
}

/// Least-squares fit of `h` (rows and columns labelled by `(qubit, photons)`)
/// onto [`RABI_FAMILY`]. The pseudo-inverse picks the minimum-norm solution
/// when the labels do not resolve every operator.
pub fn qubit_resonator_decompose<T: Real>(h: &CMat<T>, labels: &[(usize, usize)]) -> Result<ResonatorFit<T>> {
    qubit_resonator_decompose_with(h, labels, &RABI_FAMILY)
}

/// Same fit over a subset of [`RABI_FAMILY`].
pub fn qubit_resonator_decompose_with<T: Real>(
    h: &CMat<T>,
    labels: &[(usize, usize)],
    names: &[&'static str],
) -> Result<ResonatorFit<T>> {
    if let Some(bad) = names.iter().find(|n| !RABI_FAMILY.contains(n)) {
        return Err(Error::InvalidSpec(format!("unknown operator {bad}")));
    }
    let d = labels.len();
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::BasisMismatch(format!("{} labels for a {}x{} block", d, h.nrows(), h.ncols())));
    }
    if labels.iter().any(|l| l.0 > 1) {
        return Err(Error::BasisMismatch("qubit labels must be 0 or 1".into()));
    }
    ensure_hermitian(h, T::lit(1e-10))?;
    let size = labels.iter().map(|l| l.1).max().unwrap_or(0) + 3;
    let sig = |ch: char| pauli::<T>(PAULI_LABELS.iter().position(|&p| p == ch).expect("pauli label"));
    let family: Vec<CMat<T>> = names
        .iter()
        .map(|name| {
            let mut ch = name.chars();
            let (s, f) = (ch.next().unwrap(), ch.next().unwrap());
            let (s, f) = (sig(s), fock_matrix::<T>(f, size));
            CMat::from_fn(d, d, |i, j| {
                let ((qi, mi), (qj, mj)) = (labels[i], labels[j]);
                s[(qi, qj)] * f[(mi, mj)]
            })
        })
        .collect();
    let rows = 2 * d * d;
    let cols = family.len();
    let mut a = DMatrix::<T>::zeros(rows, cols);
    let mut b = nalgebra::DVector::<T>::zeros(rows);
    for (k, op) in family.iter().enumerate() {
        for (r, z) in op.iter().enumerate() {
            a[(r, k)] = z.re;
            a[(d * d + r, k)] = z.im;
        }
    }
    for (r, z) in h.iter().enumerate() {
        b[r] = z.re;
        b[d * d + r] = z.im;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(T::zero(), |x, y| x.max(y));
    let cut = smax * T::lit(1e-10);
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    let x = svd.solve(&b, cut).map_err(|_| Error::Eigen)?;
    let fitted = &a * &x;
    let residual = (&b - fitted).norm();

    // a functional c.x is fixed by the data iff c lies in the row space of A
    let vt = svd.v_t.as_ref().ok_or(Error::Eigen)?;
    let fixed = |terms: &[(&str, f64)]| {
        let mut v = nalgebra::DVector::<T>::zeros(cols);
        for &(n, w) in terms {
            if let Some(k) = names.iter().position(|m| *m == n) {
                v[k] = T::lit(w);
            }
        }
        let norm = v.norm();
        if norm == T::zero() {
            return true;
        }
        let mut proj = nalgebra::DVector::<T>::zeros(cols);
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s > cut {
                let row = vt.row(i).transpose();
                proj += &row * row.dot(&v);
            }
        }
        (v - proj).norm() <= T::lit(1e-8) * norm
    };
    let identifiable = [
        &[("xI", 1.0)][..],
        &[("yI", 1.0)],
        &[("zI", 1.0)],
        &[("In", 1.0)],
        &[("yX", 1.0), ("xP", 1.0)],
        &[("xX", 1.0), ("yP", -1.0)],
    ]
    .iter()
    .all(|t| fixed(t));
    let counter_identifiable = fixed(&[("yX", 1.0), ("xP", -1.0)]) && fixed(&[("xX", 1.0), ("yP", 1.0)]);

    let coeffs: Vec<(&'static str, T)> = names.iter().copied().zip(x.iter().copied()).collect();
    let get = |n: &str| coeffs.iter().find(|p| p.0 == n).map(|p| p.1).unwrap_or(T::zero());
    let hypot = |p: T, q: T| (p * p + q * q).sqrt();
    let g = hypot(get("yX") + get("xP"), get("xX") - get("yP"));
    let g_counter = hypot(get("yX") - get("xP"), get("xX") + get("yP"));
    let (zx, zy, zz) = (get("xI"), get("yI"), get("zI"));
    let delta = T::lit(2.0) * (zx * zx + zy * zy + zz * zz).sqrt();
    let mean = h.trace() / c(T::lit(d as f64));
    let traceless = h - CMat::identity(d, d) * mean;
    let scale = frobenius(&traceless);
    let relative_residual = if scale > T::zero() { residual / scale } else { T::zero() };
    Ok(ResonatorFit {
        omega_r: get("In"),
        coeffs,
        delta,
        g,
        g_counter,
        residual,
        relative_residual,
        rank,
        family_size: cols,
        identifiable,
        counter_identifiable,
    })
}

/// Labels of the bare states with at most `k` excitations (qubit plus photons),
/// `(0,0), (0,1), (1,0), (0,2), (1,1), ...`.
pub fn excitation_labels(k: usize) -> Vec<(usize, usize)> {
    let mut v = vec![(0, 0)];
    for e in 1..=k {
        v.push((0, e));
        v.push((1, e - 1));
    }
    v
}
