//! Schrieffer-Wolff block diagonalization: the exact direct rotation and
//! the perturbative series to third order.

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, hermitian_fn, hermitian_part, identity, orthonormal_span, polar, Eigen};
use crate::operators::HermitianOperator;
use crate::scalar::{CMat, Real};
use crate::spectra::{canonical_lowest, SpectralSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactSw,
    Perturbative(u8),
}

/// How exact eigenstates are matched to the bare low subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    /// The `d` lowest eigenstates.
    #[default]
    Lowest,
    /// The `d` eigenstates with the largest weight in the bare subspace.
    MaxOverlap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwDiagnostics<T: Real = f64> {
    /// Smallest singular value of `A^dagger B`, the cosine of the largest principal angle.
    pub min_singular: T,
    /// `||P - P0||`, the sine of the largest principal angle.
    pub projector_distance: T,
    /// Energy gap between the selected block and the nearest unselected level.
    pub gap: T,
    pub selected: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian<T: Real = f64> {
    pub matrix: CMat<T>,
    /// Columns are the bare low states the matrix is expressed in.
    pub bare_basis: CMat<T>,
    pub method: Method,
    /// Exact energies of the selected block, ascending.
    pub energies: Vec<T>,
    pub exact_states: CMat<T>,
    pub diagnostics: SwDiagnostics<T>,
}

impl<T: Real> EffectiveHamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

const CROSSING_TOL: f64 = 1e-8;

/// Exact SW map onto the `d` lowest states of `h0`.
pub fn exact_sw<T: Real>(h: &HermitianOperator<T>, h0: &HermitianOperator<T>, d: usize) -> Result<EffectiveHamiltonian<T>> {
    if h.dim() != h0.dim() {
        return Err(Error::BasisMismatch("H and H0 differ in dimension".into()));
    }
    if d == 0 || d >= h.dim() {
        return Err(Error::InvalidSpec(format!("block size {d} must lie in 1..{}", h.dim())));
    }
    let e0 = Eigen::of(&h0.matrix)?;
    let bare = canonical_lowest(&e0, d, None).vectors;
    let e = Eigen::of(&h.matrix)?;
    exact_sw_from(&e, &bare, Selection::Lowest)
}

/// Exact SW map onto the span of the orthonormal columns of `bare`.
///
/// With `W` the unitary polar factor of `A^dagger B` (A bare, B exact),
/// `H_eff = W diag(E) W^dagger`. This equals `A^dagger U H U^dagger A` for
/// the direct rotation `U`.
pub fn exact_sw_from<T: Real>(eig: &Eigen<T>, bare: &CMat<T>, selection: Selection) -> Result<EffectiveHamiltonian<T>> {
    let d = bare.ncols();
    let n = eig.len();
    if d == 0 || d > n || bare.nrows() != n {
        return Err(Error::BasisMismatch(format!("bare basis is {}x{d}, space has dimension {n}", bare.nrows())));
    }
    let selected: Vec<usize> = match selection {
        Selection::Lowest => (0..d).collect(),
        Selection::MaxOverlap => {
            let proj = bare.adjoint() * &eig.vectors;
            let mut w: Vec<(usize, T)> =
                (0..n).map(|j| (j, proj.column(j).iter().fold(T::zero(), |s, z| s + z.norm_sqr()))).collect();
            w.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
            let mut s: Vec<usize> = w[..d].iter().map(|p| p.0).collect();
            s.sort_unstable();
            s
        }
    };
    let exact = eig.columns(&selected);
    let m = bare.adjoint() * &exact;
    let (w, sv) = polar(&m)?;
    let min_singular = sv.iter().copied().fold(T::one(), |a, b| a.min(b));
    let projector_distance = (T::one() - min_singular * min_singular).max(T::zero()).sqrt();
    if min_singular < T::lit(CROSSING_TOL) {
        return Err(Error::SubspaceCrossing { norm: projector_distance.to_f64_lossy(), overlap: min_singular.to_f64_lossy() });
    }
    let energies: Vec<T> = selected.iter().map(|&j| eig.values[j]).collect();
    let mut scaled = w.clone();
    for j in 0..d {
        let ej = c(energies[j]);
        for i in 0..d {
            scaled[(i, j)] *= ej;
        }
    }
    let matrix = hermitian_part(&(scaled * w.adjoint()));
    let gap = block_gap(&eig.values, &selected);
    Ok(EffectiveHamiltonian {
        matrix,
        bare_basis: bare.clone(),
        method: Method::ExactSw,
        energies,
        exact_states: exact,
        diagnostics: SwDiagnostics { min_singular, projector_distance, gap, selected },
    })
}

fn block_gap<T: Real>(values: &[T], selected: &[usize]) -> T {
    let mut gap = T::max_value().unwrap_or(T::lit(f64::MAX));
    for (j, &e) in values.iter().enumerate() {
        if selected.contains(&j) {
            continue;
        }
        for &s in selected {
            gap = gap.min((e - values[s]).abs());
        }
    }
    gap
}

/// Direct rotation restricted to `K = span(bare, exact)`; `U` is the
/// identity on the orthogonal complement.
#[derive(Clone, Debug)]
pub struct CompactRotation<T: Real = f64> {
    /// Orthonormal basis of `K`, `n x r`.
    pub span: CMat<T>,
    /// `U` in the coordinates of `span`, `r x r`.
    pub u: CMat<T>,
    pub p0: CMat<T>,
    pub p: CMat<T>,
}

impl<T: Real> CompactRotation<T> {
    pub fn full(&self) -> CMat<T> {
        let n = self.span.nrows();
        let r = self.span.ncols();
        identity::<T>(n) + &self.span * (&self.u - identity::<T>(r)) * self.span.adjoint()
    }
}

/// `U = (P0 P + Q0 Q) (I - (P0 - P)^2)^(-1/2)` in compact form.
pub fn compact_rotation<T: Real>(bare: &CMat<T>, exact: &CMat<T>) -> Result<CompactRotation<T>> {
    let mut both = CMat::zeros(bare.nrows(), bare.ncols() + exact.ncols());
    both.columns_mut(0, bare.ncols()).copy_from(bare);
    both.columns_mut(bare.ncols(), exact.ncols()).copy_from(exact);
    let k = orthonormal_span(&both, T::lit(1e-10));
    let r = k.ncols();
    let a = k.adjoint() * bare;
    let b = k.adjoint() * exact;
    let p0 = &a * a.adjoint();
    let p = &b * b.adjoint();
    let id = identity::<T>(r);
    let two = c(T::lit(2.0));
    let reflect = &id - &p0 - &p + &p0 * &p * two;
    let diff = &p0 - &p;
    let x = hermitian_part(&(&id - &diff * &diff));
    let inv_sqrt = hermitian_fn(&x, |v| {
        if v <= T::zero() {
            T::max_value().unwrap_or(T::lit(f64::MAX))
        } else {
            T::one() / v.sqrt()
        }
    })?;
    Ok(CompactRotation { span: k, u: reflect * inv_sqrt, p0, p })
}

/// Direct rotation mapping the span of `exact` onto the span of `bare`.
pub fn direct_rotation<T: Real>(bare: &CMat<T>, exact: &CMat<T>) -> Result<CMat<T>> {
    Ok(compact_rotation(bare, exact)?.full())
}

/// Integrity metrics of an exact SW result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrity<T: Real = f64> {
    /// `||U^dagger U - I||`
    pub unitarity: T,
    /// `||U P - P0 U||`
    pub intertwining: T,
    /// Largest `|eig(H_eff) - E_exact| / max(1, |E|)`.
    pub spectrum: T,
    /// `||A^dagger U H U^dagger A - H_eff|| / ||H_eff||` against the full rotation.
    pub route: T,
}

pub fn integrity<T: Real>(eff: &EffectiveHamiltonian<T>, eig: &Eigen<T>) -> Result<Integrity<T>> {
    let a = &eff.bare_basis;
    let rot = compact_rotation(a, &eff.exact_states)?;
    let r = rot.u.ncols();
    // both metrics vanish identically on the complement of K
    let unitarity = frobenius(&(rot.u.adjoint() * &rot.u - identity::<T>(r)));
    let intertwining = frobenius(&(&rot.u * &rot.p - &rot.p0 * &rot.u));

    let local = Eigen::of(&eff.matrix)?;
    let mut exact = eff.energies.clone();
    exact.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let spectrum = local
        .values
        .iter()
        .zip(&exact)
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).abs() / T::one().max(y.abs())));

    // A^dagger U H U^dagger A through the spectral decomposition of H
    let ua = &rot.span * (rot.u.adjoint() * (rot.span.adjoint() * a));
    let y = eig.vectors.adjoint() * ua;
    let mut ey = y.clone();
    for i in 0..ey.nrows() {
        let e = c(eig.values[i]);
        for j in 0..ey.ncols() {
            ey[(i, j)] *= e;
        }
    }
    let full = y.adjoint() * ey;
    let route = frobenius(&(full - &eff.matrix)) / T::one().max(frobenius(&eff.matrix));
    Ok(Integrity { unitarity, intertwining, spectrum, route })
}

/// Raw perturbative terms in the bare low basis; the series is
/// `P0 H0 P0 + eps M1 + eps^2/2 M2 + eps^3/2 M3`.
#[derive(Clone, Debug)]
pub struct PerturbativeTerms<T: Real = f64> {
    pub h0: CMat<T>,
    pub m1: CMat<T>,
    pub m2: CMat<T>,
    pub m3: CMat<T>,
    pub epsilon: T,
    /// Number of excited bare states kept in the sums.
    pub kept: usize,
}

impl<T: Real> PerturbativeTerms<T> {
    /// Partial sum through `order` (0 to 3) at coupling `eps`.
    pub fn partial_sum(&self, order: u8, eps: T) -> CMat<T> {
        let half = T::lit(0.5);
        let mut s = self.h0.clone();
        if order >= 1 {
            s += &self.m1 * c(eps);
        }
        if order >= 2 {
            s += &self.m2 * c(eps * eps * half);
        }
        if order >= 3 {
            s += &self.m3 * c(eps * eps * eps * half);
        }
        s
    }

    pub fn weighted(&self, order: u8) -> CMat<T> {
        self.partial_sum(order, self.epsilon) - self.partial_sum(order.saturating_sub(1), self.epsilon)
    }
}

/// Second and third order SW terms from the bare eigenbasis.
///
/// `bare` holds the full eigendecomposition of `H0`, whose `d` lowest states
/// span the low block. Excited states above `E_0 + cutoff` are dropped when a
/// cutoff is given.
pub fn perturbative_sw<T: Real>(bare: &Eigen<T>, v: &CMat<T>, d: usize, epsilon: T, cutoff: Option<T>) -> Result<PerturbativeTerms<T>> {
    let n = bare.len();
    if d == 0 || d >= n {
        return Err(Error::InvalidSpec(format!("block size {d} must lie in 1..{n}")));
    }
    let e0 = bare.values[0];
    let high: Vec<usize> = (d..n).filter(|&j| cutoff.map_or(true, |cut| bare.values[j] <= e0 + cut)).collect();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.extend(&high);
    let basis = bare.columns(&idx);
    let vb = basis.adjoint() * v * &basis;
    let nh = high.len();
    let el: Vec<T> = (0..d).map(|i| bare.values[i]).collect();
    let eh: Vec<T> = high.iter().map(|&j| bare.values[j]).collect();

    let scale = T::one().max(el.iter().chain(&eh).fold(T::zero(), |a, e| a.max(e.abs())));
    let tiny = T::lit(1e-12) * scale;
    let mut inv = nalgebra::DMatrix::<T>::zeros(d, nh);
    for m in 0..d {
        for l in 0..nh {
            let den = el[m] - eh[l];
            if den.abs() < tiny {
                return Err(Error::Intruder { low: m, high: high[l] });
            }
            inv[(m, l)] = T::one() / den;
        }
    }

    let vll = vb.view((0, 0), (d, d)).into_owned();
    let vlh = vb.view((0, d), (d, nh)).into_owned();
    let vhl = vb.view((d, 0), (nh, d)).into_owned();
    let vhh = vb.view((d, d), (nh, nh)).into_owned();
    let half = c(T::lit(0.5));

    // H2_mm' = 1/2 sum_l V_ml V_lm' (1/(E_m - E_l) + 1/(E_m' - E_l))
    let mut h2 = CMat::zeros(d, d);
    for m in 0..d {
        for mp in 0..d {
            let mut s = c(T::zero());
            for l in 0..nh {
                s += vlh[(m, l)] * vhl[(l, mp)] * c(inv[(m, l)] + inv[(mp, l)]);
            }
            h2[(m, mp)] = s * half;
        }
    }

    // x^m_l = V_ml / (E_m - E_l)
    let mut x = CMat::zeros(d, nh);
    for m in 0..d {
        for l in 0..nh {
            x[(m, l)] = vlh[(m, l)] * c(inv[(m, l)]);
        }
    }
    // y^m_{l'm'} = V_l'm' / (E_m - E_l'), folded into z^m = V_hh y^m
    let mut h3 = CMat::zeros(d, d);
    let mut zs: Vec<CMat<T>> = Vec::with_capacity(d);
    for m in 0..d {
        let mut y = vhl.clone();
        for l in 0..nh {
            let f = c(inv[(m, l)]);
            for mp in 0..d {
                y[(l, mp)] *= f;
            }
        }
        zs.push(&vhh * y);
    }
    // 1/2 sum_{l,l'} V_ml V_ll' V_l'm' [1/((E_m-E_l)(E_m-E_l')) + 1/((E_m'-E_l)(E_m'-E_l'))]
    for m in 0..d {
        for mp in 0..d {
            let mut s = c(T::zero());
            for l in 0..nh {
                s += x[(m, l)] * zs[m][(l, mp)];
                // second bracket with E_m' in both denominators
                s += vlh[(m, l)] * c(inv[(mp, l)]) * zs[mp][(l, mp)];
            }
            h3[(m, mp)] += s * half;
        }
    }
    // -1/2 sum_{l,m''} [V_ml V_lm'' V_m''m' / ((E_m'-E_l)(E_m''-E_l)) + V_mm'' V_m''l V_lm' / ((E_m-E_l)(E_m''-E_l))]
    for m in 0..d {
        for mp in 0..d {
            let mut s = c(T::zero());
            for mpp in 0..d {
                for l in 0..nh {
                    let a = vlh[(m, l)] * vhl[(l, mpp)] * vll[(mpp, mp)] * c(inv[(mp, l)] * inv[(mpp, l)]);
                    let b = vll[(m, mpp)] * vlh[(mpp, l)] * vhl[(l, mp)] * c(inv[(m, l)] * inv[(mpp, l)]);
                    s += a + b;
                }
            }
            h3[(m, mp)] -= s * half;
        }
    }

    let two = c(T::lit(2.0));
    let h0 = CMat::from_diagonal(&nalgebra::DVector::from_iterator(d, el.iter().map(|&e| c(e))));
    Ok(PerturbativeTerms {
        h0,
        m1: hermitian_part(&vll),
        m2: hermitian_part(&h2) * two,
        m3: hermitian_part(&h3) * two,
        epsilon,
        kept: nh,
    })
}

/// Four-level estimate `g2 = (eps^2/2) (Delta_e - Delta)^2 / omega_q`.
pub fn four_level_model<T: Real>(summary: &SpectralSummary<T>, epsilon: T) -> Result<T> {
    if summary.omega_q == T::zero() {
        return Err(Error::ZeroFrequency);
    }
    let d = summary.delta_e - summary.delta;
    Ok(epsilon * epsilon / T::lit(2.0) * d * d / summary.omega_q)
}
