//! Eigenpairs and spectral summaries.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{c, ensure_hermitian, Eigen};
use crate::operators::{hermitian_tol, Basis, HermitianOperator};
use crate::scalar::{CMat, CVec, Real};

/// `k` lowest eigenpairs, each vector with a canonical phase.
#[derive(Clone, Debug)]
pub struct Eigenpairs<T: Real = f64> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

fn anchor_of(basis: &Basis) -> Option<usize> {
    match basis {
        Basis::Single(b) => Some(b.anchor()),
        _ => None,
    }
}

/// Rotates `v` so that its component at `anchor` is real and positive,
/// falling back to the largest component when that one vanishes.
pub fn canonical_phase<T: Real>(v: &mut CVec<T>, anchor: Option<usize>) {
    let tiny = T::lit(1e-10);
    let idx = match anchor {
        Some(i) if i < v.len() && v[i].modulus() > tiny => i,
        _ => largest_component(v),
    };
    let z = v[idx];
    let r = z.modulus();
    if r > T::zero() {
        let ph = Complex::new(z.re / r, -z.im / r);
        v.iter_mut().for_each(|x| *x *= ph);
    }
}

fn largest_component<T: Real>(v: &CVec<T>) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].modulus() > v[best].modulus() * (T::one() + T::lit(1e-12)) {
            best = i;
        }
    }
    best
}

pub fn lowest_eigenpairs<T: Real>(op: &HermitianOperator<T>, k: usize) -> Result<Eigenpairs<T>> {
    ensure_hermitian(&op.matrix, hermitian_tol())?;
    if k > op.dim() {
        return Err(Error::TooFewLevels { need: k, got: op.dim() });
    }
    let e = Eigen::of(&op.matrix)?;
    Ok(canonical_lowest(&e, k, anchor_of(&op.basis)))
}

/// Lowest `k` pairs of an existing decomposition with phases fixed and
/// degenerate partners ordered by descending weight on the anchor state.
pub fn canonical_lowest<T: Real>(e: &Eigen<T>, k: usize, anchor: Option<usize>) -> Eigenpairs<T> {
    let take = (k + 4).min(e.len());
    let mut order: Vec<usize> = (0..take).collect();
    let a = anchor.unwrap_or(0);
    let weight = |j: usize| e.vectors[(a, j)].modulus();
    let tol = T::lit(1e-12);
    order.sort_by(|&i, &j| {
        let (ei, ej) = (e.values[i], e.values[j]);
        let scale = T::one().max(ei.abs()).max(ej.abs());
        if (ei - ej).abs() <= tol * scale {
            weight(j).partial_cmp(&weight(i)).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j))
        } else {
            ei.partial_cmp(&ej).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    order.truncate(k);
    let values = order.iter().map(|&i| e.values[i]).collect();
    let mut vectors = e.vectors.select_columns(&order);
    for j in 0..k {
        let mut v = vectors.column(j).into_owned();
        canonical_phase(&mut v, anchor);
        vectors.set_column(j, &v);
    }
    Eigenpairs { values, vectors }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary<T: Real = f64> {
    pub energies: Vec<T>,
    pub delta: T,
    pub omega_q: T,
    pub delta_e: T,
    pub alpha_r: T,
}

impl<T: Real> SpectralSummary<T> {
    pub fn is_qubit_like(&self, band: (T, T)) -> bool {
        self.alpha_r >= band.0 && self.alpha_r <= band.1
    }
}

/// Summary with `alpha_r = (E_3 - E_0 - Delta) / Delta`.
pub fn summarize_qubit<T: Real>(energies: &[T]) -> Result<SpectralSummary<T>> {
    summarize_qubit_at(energies, 3)
}

/// Summary with the anharmonicity read from level `level`.
pub fn summarize_qubit_at<T: Real>(energies: &[T], level: usize) -> Result<SpectralSummary<T>> {
    let need = 4.max(level + 1);
    if energies.len() < need {
        return Err(Error::TooFewLevels { need, got: energies.len() });
    }
    let e = energies;
    let two = T::lit(2.0);
    let delta = e[1] - e[0];
    let omega_q = (e[2] + e[3]) / two - (e[0] + e[1]) / two;
    let delta_e = e[3] - e[2];
    Ok(SpectralSummary {
        energies: e.to_vec(),
        delta,
        omega_q,
        delta_e,
        alpha_r: anharmonicity(e, level, delta),
    })
}

/// `(E_level - E_0 - Delta) / Delta`.
pub fn anharmonicity<T: Real>(energies: &[T], level: usize, delta: T) -> T {
    (energies[level] - energies[0] - delta) / delta
}

/// Persistent-current states `(|0> -/+ |1>)/sqrt 2`, ordered so that
/// `<L|phi|L> < 0 < <R|phi|R>`.
pub fn current_basis<T: Real>(ground_pair: &CMat<T>, phi_op: &CMat<T>) -> Result<(CVec<T>, CVec<T>)> {
    if ground_pair.ncols() != 2 {
        return Err(Error::TooFewLevels { need: 2, got: ground_pair.ncols() });
    }
    let s0 = ground_pair.column(0).into_owned();
    let mut s1 = ground_pair.column(1).into_owned();
    let p01 = s0.dotc(&(phi_op * &s1));
    // align the relative phase so <0|phi|1> is real
    let r = p01.modulus();
    if r > T::zero() {
        s1 *= Complex::new(p01.re / r, -p01.im / r);
    }
    let k = c(T::lit(0.5).sqrt());
    let a = (&s0 - &s1) * k;
    let b = (&s0 + &s1) * k;
    let ev = |v: &CVec<T>| v.dotc(&(phi_op * v)).re;
    let (pa, pb) = (ev(&a), ev(&b));
    let tol = T::lit(1e-8);
    if pa.abs() < tol && pb.abs() < tol {
        return Err(Error::NotFluxQubit(pa.abs().max(pb.abs()).to_f64_lossy()));
    }
    if pa < pb {
        Ok((a, b))
    } else {
        Ok((b, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit_model::{CircuitElement, FluxQubitSpec, ResonatorSpec};
    use crate::operators::{bare_hamiltonian, charge_ops, BasisSpec};

    #[test]
    fn two_by_two() {
        let m = CMat::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]));
        let op = HermitianOperator::abstract_from(m).unwrap();
        let p = lowest_eigenpairs(&op, 2).unwrap();
        assert_eq!(p.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn harmonic_ladder() {
        let r = CircuitElement::Resonator(ResonatorSpec::new(1.0, 2.0).unwrap());
        let h = bare_hamiltonian(&r, BasisSpec::Fock(10)).unwrap();
        let p = lowest_eigenpairs(&h, 3).unwrap();
        let w = 4.0;
        for (k, e) in p.values.iter().enumerate() {
            assert!((e - w * (k as f64 + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn residuals_small() {
        let q = CircuitElement::Qubit(FluxQubitSpec::symmetric(50.0, 0.65, 0.0).unwrap());
        let h = bare_hamiltonian(&q, BasisSpec::ChargeGrid(15)).unwrap();
        let p = lowest_eigenpairs(&h, 6).unwrap();
        let norm = crate::linalg::frobenius(&h.matrix);
        for j in 0..6 {
            let v = p.vectors.column(j).into_owned();
            let r = &h.matrix * &v - &v * c(p.values[j]);
            assert!(r.norm() < 1e-10 * norm);
        }
    }

    #[test]
    fn summary_by_construction() {
        let s = summarize_qubit(&[0.0, 0.3, 5.0, 5.7]).unwrap();
        assert!((s.delta - 0.3).abs() < 1e-15);
        assert!((s.omega_q - 5.2).abs() < 1e-15);
        assert!((s.delta_e - 0.7).abs() < 1e-15);
        let h = summarize_qubit(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(h.alpha_r, 2.0);
        assert!(!h.is_qubit_like((3.0, f64::INFINITY)));
        assert!(summarize_qubit(&[0.0, 1.0, 2.0]).is_err());
    }

    // Oracle: numpy eigvalsh at n_max = 20 for alpha = 0.65, EJ/EC = 50.
    #[test]
    fn reference_qubit_levels() {
        let q = CircuitElement::Qubit(FluxQubitSpec::symmetric(50.0, 0.65, 0.0).unwrap());
        let h = bare_hamiltonian(&q, BasisSpec::ChargeGrid(20)).unwrap();
        let p = lowest_eigenpairs(&h, 4).unwrap();
        let s = summarize_qubit(&p.values).unwrap();
        assert!((s.delta - 5.279_705_758_699_2).abs() < 1e-9, "{}", s.delta);
        assert!((s.omega_q - 18.416_851_927_017).abs() < 1e-9, "{}", s.omega_q);
        assert!((s.delta_e - 11.249_258_189_725).abs() < 1e-9, "{}", s.delta_e);
        // shallow wells: the splitting is not small against omega_q
        assert!(s.delta / s.omega_q > 0.28);
    }

    #[test]
    fn current_states() {
        let spec = FluxQubitSpec::symmetric(50.0, 0.65, 0.0).unwrap();
        let q = CircuitElement::Qubit(spec);
        let h = bare_hamiltonian(&q, BasisSpec::ChargeGrid(15)).unwrap();
        let p = lowest_eigenpairs(&h, 2).unwrap();
        let phi = charge_ops::<f64>(15).unwrap().phi;
        let (l, r) = current_basis(&p.vectors, &phi).unwrap();
        let ev = |v: &CVec<f64>| v.dotc(&(&phi * v)).re;
        assert!((ev(&l) + ev(&r)).abs() < 1e-8);
        assert!(ev(&l) < 0.0);
        assert!(l.dotc(&r).norm() < 1e-14);
        // numpy oracle; the wells are shallow so this sits ~20% below arccos(1/2 alpha)
        assert!((ev(&r) - 0.557_168_534_477_33).abs() < 1e-9, "{}", ev(&r));
        let (phi_star, _) = crate::circuit_model::locate_minimum(&spec).unwrap();
        assert!((ev(&r) / phi_star - 0.804).abs() < 1e-3);
    }

    #[test]
    fn parity_of_ground_pair() {
        let q = CircuitElement::Qubit(FluxQubitSpec::symmetric(50.0, 0.65, 0.0).unwrap());
        let h = bare_hamiltonian(&q, BasisSpec::ChargeGrid(15)).unwrap();
        let p = lowest_eigenpairs(&h, 2).unwrap();
        let phi = charge_ops::<f64>(15).unwrap().phi;
        for j in 0..2 {
            let v = p.vectors.column(j).into_owned();
            assert!(v.dotc(&(&phi * &v)).norm() < 1e-8);
        }
    }
}
