//! Small dense helpers on complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{CMat, Real};

pub fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn complexify<T: Real>(m: &DMatrix<T>) -> CMat<T> {
    m.map(c)
}

pub fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `||M - M^dagger|| / ||M||`, zero for the zero matrix.
pub fn hermiticity_defect<T: Real>(m: &CMat<T>) -> T {
    let norm = frobenius(m);
    if norm == T::zero() {
        return T::zero();
    }
    frobenius(&(m - m.adjoint())) / norm
}

pub fn ensure_hermitian<T: Real>(m: &CMat<T>, tol: T) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotHermitian(f64::INFINITY));
    }
    let d = hermiticity_defect(m);
    if d > tol {
        return Err(Error::NotHermitian(d.to_f64_lossy()));
    }
    Ok(())
}

pub fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * c(T::lit(0.5))
}

pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

/// Eigendecomposition with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigen<T: Real = f64> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

impl<T: Real> Eigen<T> {
    pub fn of(m: &CMat<T>) -> Result<Self> {
        let (values, vectors) = T::eigh(m)?;
        Ok(Eigen { values, vectors })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn columns(&self, idx: &[usize]) -> CMat<T> {
        self.vectors.select_columns(idx)
    }

    pub fn lowest(&self, k: usize) -> CMat<T> {
        self.vectors.columns(0, k).into_owned()
    }
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn<T: Real>(m: &CMat<T>, f: impl Fn(T) -> T) -> Result<CMat<T>> {
    let e = Eigen::of(m)?;
    let n = m.nrows();
    let mut scaled = e.vectors.clone();
    for j in 0..n {
        let fj = c(f(e.values[j]));
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    Ok(&scaled * e.vectors.adjoint())
}

/// Unitary polar factor `W` of a square matrix and its singular values.
pub fn polar<T: Real>(m: &CMat<T>) -> Result<(CMat<T>, Vec<T>)> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.ok_or(Error::Eigen)?;
    let vt = svd.v_t.ok_or(Error::Eigen)?;
    Ok((u * vt, svd.singular_values.iter().copied().collect()))
}

/// Orthonormal basis of the column span, columns with weight below `tol` dropped.
pub fn orthonormal_span<T: Real>(m: &CMat<T>, tol: T) -> CMat<T> {
    let n = m.nrows();
    let mut basis: Vec<nalgebra::DVector<Complex<T>>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        // two passes of Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let p = b.dotc(&v);
                v -= b * p;
            }
        }
        let nv = v.norm();
        if nv > tol {
            basis.push(v / c(nv));
        }
    }
    CMat::from_fn(n, basis.len(), |i, j| basis[j][i])
}
