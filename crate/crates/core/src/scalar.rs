//! Scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display, LowerExp};
use std::sync::Once;

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

pub type Cplx<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

/// Floating point type the engine can run on.
///
/// Dense Hermitian eigenproblems are delegated to `faer`; everything else
/// goes through `nalgebra`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + FloatConst + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Unit roundoff.
    fn unit_roundoff() -> Self;

    /// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
    fn eigh(m: &CMat<Self>) -> Result<(Vec<Self>, CMat<Self>)>;

    /// Eigenvalues only, ascending.
    fn eigvalsh(m: &CMat<Self>) -> Result<Vec<Self>>;
}

static SERIAL: Once = Once::new();

fn serial() {
    // points are parallelized one level up
    SERIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn unit_roundoff() -> Self {
                <$t>::EPSILON
            }

            fn eigh(m: &CMat<$t>) -> Result<(Vec<$t>, CMat<$t>)> {
                serial();
                let n = m.nrows();
                if m.iter().all(|z| z.im == 0.0) {
                    let f = faer::Mat::<$t>::from_fn(n, n, |i, j| m[(i, j)].re);
                    let e = f.self_adjoint_eigen(faer::Side::Lower).map_err(|_| Error::Eigen)?;
                    let (s, u) = (e.S(), e.U());
                    let vals = (0..n).map(|i| s[i]).collect();
                    let vecs = CMat::<$t>::from_fn(n, n, |i, j| Complex::new(u[(i, j)], 0.0));
                    Ok((vals, vecs))
                } else {
                    let f = faer::Mat::<Complex<$t>>::from_fn(n, n, |i, j| m[(i, j)]);
                    let e = f.self_adjoint_eigen(faer::Side::Lower).map_err(|_| Error::Eigen)?;
                    let (s, u) = (e.S(), e.U());
                    let vals = (0..n).map(|i| s[i].re).collect();
                    let vecs = CMat::<$t>::from_fn(n, n, |i, j| u[(i, j)]);
                    Ok((vals, vecs))
                }
            }

            fn eigvalsh(m: &CMat<$t>) -> Result<Vec<$t>> {
                serial();
                let n = m.nrows();
                if m.iter().all(|z| z.im == 0.0) {
                    let f = faer::Mat::<$t>::from_fn(n, n, |i, j| m[(i, j)].re);
                    f.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|_| Error::Eigen)
                } else {
                    let f = faer::Mat::<Complex<$t>>::from_fn(n, n, |i, j| m[(i, j)]);
                    f.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|_| Error::Eigen)
                }
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
