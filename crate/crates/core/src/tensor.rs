//! Minkowski index algebra and small dense complex linear algebra.
//!
//! Matrices and vectors here are fixed-capacity value types (order at most
//! [`MAX_ORDER`]) so lattice fields can hold them inline without heap traffic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported internal dimension N.
pub const MAX_ORDER: usize = 4;

/// Largest supported space-time dimension D.
pub const MAX_DIM: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Diagonal Minkowski metric with signature (+, -, -, -) truncated to D axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metric {
    dim: usize,
}

impl Metric {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Dimension(format!(
                "metric dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        Ok(Metric { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The diagonal entry g_{μμ} (equal to g^{μμ}).
    #[inline]
    pub fn sign(&self, mu: usize) -> f64 {
        if mu == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn lower<T>(&self, v: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Neg<Output = T>,
    {
        self.check_len(v.len())?;
        Ok(v.iter()
            .enumerate()
            .map(|(mu, &x)| if mu == 0 { x } else { -x })
            .collect())
    }

    /// Raising and lowering coincide for a diagonal metric of ±1 entries.
    pub fn raise<T>(&self, v: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Neg<Output = T>,
    {
        self.lower(v)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::Dimension(format!(
                "vector has {len} components, metric has dimension {}",
                self.dim
            )));
        }
        Ok(())
    }
}

/// Complex N-component vector (N ≤ 4), e.g. the matter multiplet φ_J at one site.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexVector {
    n: usize,
    data: [Complex64; MAX_ORDER],
}

impl ComplexVector {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_ORDER).contains(&n), "vector order {n} unsupported");
        ComplexVector {
            n,
            data: [ZERO; MAX_ORDER],
        }
    }

    pub fn from_slice(values: &[Complex64]) -> Self {
        let mut v = Self::zeros(values.len());
        v.data[..values.len()].copy_from_slice(values);
        v
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data[..self.n]
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data[..self.n]
    }

    /// Hermitian inner product Σ conj(self_J) other_J.
    pub fn dot(&self, other: &ComplexVector) -> Complex64 {
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|z| *z = z.conj());
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Outer product a ⊗ conj(b), entry (J,K) = a_J conj(b_K).
    pub fn outer_conj(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
        let n = a.n;
        let mut m = ComplexMatrix::zeros(n);
        for j in 0..n {
            for k in 0..n {
                m[(j, k)] = a.data[j] * b.data[k].conj();
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.as_slice()[i]
    }
}

impl std::ops::IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.as_mut_slice()[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

/// Dense complex N×N matrix (N ≤ 4), row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: [Complex64; MAX_ORDER * MAX_ORDER],
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_ORDER).contains(&n), "matrix order {n} unsupported");
        ComplexMatrix {
            n,
            data: [ZERO; MAX_ORDER * MAX_ORDER],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from row-major entries; `values.len()` must be a perfect square.
    pub fn from_row_major(values: &[Complex64]) -> Self {
        let n = (values.len() as f64).sqrt().round() as usize;
        assert_eq!(n * n, values.len(), "entry count is not a square");
        Self::from_fn(n, |i, j| values[i * n + j])
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn scalar(n: usize, s: Complex64) -> Self {
        Self::identity(n).scale(s)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Iterates entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.n;
        (0..n * n).map(move |idx| self.data[(idx / n) * MAX_ORDER + idx % n])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        *self * *other - *other * *self
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = ZERO;
            for j in 0..self.n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Row vector times matrix: (v^T M)_K = Σ_I v_I M_{IK}.
    pub fn vec_mul(v: &ComplexVector, m: &ComplexMatrix) -> ComplexVector {
        let n = m.n;
        let mut out = ComplexVector::zeros(n);
        for k in 0..n {
            let mut acc = ZERO;
            for i in 0..n {
                acc += v[i] * m[(i, k)];
            }
            out[k] = acc;
        }
        out
    }

    /// Bilinear form conj(x)^T M y.
    pub fn sandwich(&self, x: &ComplexVector, y: &ComplexVector) -> Complex64 {
        x.dot(&self.mul_vec(y))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn anti_hermitian_part(&self) -> Self {
        (*self - self.adjoint()).scale_re(0.5)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self - Self::identity(self.n)).max_abs() <= tol
    }

    pub fn is_traceless(&self, tol: f64) -> bool {
        self.trace().norm() <= tol
    }

    pub fn determinant(&self) -> Complex64 {
        self.to_nalgebra().determinant()
    }

    /// Frobenius inner product tr(A† B).
    pub fn frobenius_dot(&self, other: &ComplexMatrix) -> Complex64 {
        (self.adjoint() * *other).trace()
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)])
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.n && j < self.n);
        &self.data[i * MAX_ORDER + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.n && j < self.n);
        &mut self.data[i * MAX_ORDER + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<Complex64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)]).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                for j in 0..n {
                    out.data[i * MAX_ORDER + j] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

macro_rules! impl_linear {
    ($ty:ty) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(mut self, rhs: $ty) -> $ty {
                self += rhs;
                self
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(mut self, rhs: $ty) -> $ty {
                self -= rhs;
                self
            }
        }
        impl AddAssign for $ty {
            fn add_assign(&mut self, rhs: $ty) {
                debug_assert_eq!(self.n, rhs.n);
                self.data
                    .iter_mut()
                    .zip(rhs.data.iter())
                    .for_each(|(a, b)| *a += b);
            }
        }
        impl SubAssign for $ty {
            fn sub_assign(&mut self, rhs: $ty) {
                debug_assert_eq!(self.n, rhs.n);
                self.data
                    .iter_mut()
                    .zip(rhs.data.iter())
                    .for_each(|(a, b)| *a -= b);
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(mut self) -> $ty {
                self.data.iter_mut().for_each(|z| *z = -*z);
                self
            }
        }
    };
}

impl_linear!(ComplexVector);
impl_linear!(ComplexMatrix);

fn check_hermitian_input(h: &ComplexMatrix) -> Result<()> {
    let defect = h.hermiticity_defect();
    let scale = h.max_abs().max(1.0);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix: (eigenvalues, eigenvector columns).
fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = nalgebra::SymmetricEigen::new(h.hermitian_part().to_nalgebra());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// U = exp(i s h) for Hermitian h, via Hermitian eigendecomposition.
pub fn mat_exp_i(h: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    check_hermitian_input(h)?;
    let (lambda, v) = hermitian_eigen(h);
    let n = h.order();
    let phases = DMatrix::from_fn(n, n, |i, j| if i == j { (I * s * lambda[i]).exp() } else { ZERO });
    Ok(ComplexMatrix::from_nalgebra(&(&v * phases * v.adjoint())))
}

/// Directional derivative of exp(i h) along the Hermitian direction `dh`.
///
/// Uses the Daleckii-Krein divided-difference form in the eigenbasis of h,
/// so the result is exact up to rounding.
pub fn mat_exp_i_derivative(h: &ComplexMatrix, dh: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian_input(h)?;
    let (lambda, v) = hermitian_eigen(h);
    let n = h.order();
    let dh_eig = v.adjoint() * dh.to_nalgebra() * &v;
    let kernel = DMatrix::from_fn(n, n, |i, j| {
        let (li, lj) = (lambda[i], lambda[j]);
        let gap = li - lj;
        if gap.abs() < 1e-9 * (1.0 + li.abs()) {
            // f'(λ) with a second-order correction for near-degenerate pairs.
            let mid = 0.5 * (li + lj);
            I * (I * mid).exp() * (1.0 - gap * gap / 24.0)
        } else {
            ((I * li).exp() - (I * lj).exp()) / gap
        }
    });
    let inner = dh_eig.component_mul(&kernel);
    Ok(ComplexMatrix::from_nalgebra(&(&v * inner * v.adjoint())))
}

/// Orthonormal Hermitian generator basis with tr(T_a T_b) = δ_ab / 2.
///
/// The traceless generalized Gell-Mann matrices span su(N); with
/// `include_identity` the basis is extended by 1/√(2N) to span u(N).
pub fn generator_basis(n: usize, include_identity: bool) -> Vec<ComplexMatrix> {
    let mut basis = Vec::new();
    let half = Complex64::new(0.5, 0.0);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = ComplexMatrix::zeros(n);
            sym[(j, k)] = half;
            sym[(k, j)] = half;
            basis.push(sym);
            let mut asym = ComplexMatrix::zeros(n);
            asym[(j, k)] = Complex64::new(0.0, -0.5);
            asym[(k, j)] = Complex64::new(0.0, 0.5);
            basis.push(asym);
        }
    }
    for l in 1..n {
        let norm = 1.0 / ((2 * l * (l + 1)) as f64).sqrt();
        let mut d = ComplexMatrix::zeros(n);
        for i in 0..l {
            d[(i, i)] = Complex64::new(norm, 0.0);
        }
        d[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        basis.push(d);
    }
    if include_identity {
        basis.push(ComplexMatrix::scalar(
            n,
            Complex64::new(1.0 / (2.0 * n as f64).sqrt(), 0.0),
        ));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let m = ComplexMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        m.hermitian_part()
    }

    /// Scaling-and-squaring Taylor exponential, independent of the eigen route.
    fn exp_taylor(a: &ComplexMatrix) -> ComplexMatrix {
        let norm = a.max_abs() * a.order() as f64;
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let scaled = a.scale_re(0.5f64.powi(squarings));
        let n = a.order();
        let mut term = ComplexMatrix::identity(n);
        let mut sum = ComplexMatrix::identity(n);
        for k in 1..30 {
            term = (term * scaled).scale_re(1.0 / k as f64);
            sum += term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn lower_index_examples() {
        let g = Metric::new(4).unwrap();
        assert_eq!(g.lower(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, -2.0, -3.0, -4.0]);
        assert_eq!(g.lower(&[0.0; 4]).unwrap(), vec![0.0; 4]);
        let v = [0.5, -1.25, 7.0, 0.0];
        assert_eq!(g.raise(&g.lower(&v).unwrap()).unwrap(), v.to_vec());
        assert!(g.lower(&[1.0, 2.0]).is_err());
        assert!(Metric::new(5).is_err());
    }

    #[test]
    fn metric_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let d = rng.gen_range(1..=4);
            let g = Metric::new(d).unwrap();
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1e3..1e3)).collect();
            assert_eq!(g.raise(&g.lower(&v).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        let u = mat_exp_i(&ComplexMatrix::zeros(3), 1.0).unwrap();
        assert!((u - ComplexMatrix::identity(3)).max_abs() < 1e-15);
        let theta = 0.7;
        let h = ComplexMatrix::diag(&[c(theta, 0.0), c(-theta, 0.0)]);
        let u = mat_exp_i(&h, 1.0).unwrap();
        let expected = ComplexMatrix::diag(&[c(0.0, theta).exp(), c(0.0, -theta).exp()]);
        assert!((u - expected).max_abs() < 1e-14);
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(mat_exp_i(&m, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn exp_matches_taylor_oracle_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(3, &mut rng);
        let s = 0.3;
        let u = mat_exp_i(&h, s).unwrap();
        assert!(u.is_unitary(1e-10));
        let oracle = exp_taylor(&h.scale(c(0.0, s)));
        assert!((u - oracle).max_abs() < 1e-12);
        let det_expected = (c(0.0, s) * h.trace()).exp();
        assert!((u.determinant() - det_expected).norm() < 1e-10);
    }

    #[test]
    fn exp_unitarity_over_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..100 {
            let n = 1 + k % 4;
            let h = random_hermitian(n, &mut rng).scale_re(3.0);
            let u = mat_exp_i(&h, 1.0).unwrap();
            assert!(u.is_unitary(1e-10), "unitarity lost at n={n}");
        }
    }

    #[test]
    fn exp_first_order_constant_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(3, &mut rng);
        let hn = h.max_abs();
        let consts: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&s| {
                let u = mat_exp_i(&h, s).unwrap();
                let lin = ComplexMatrix::identity(3) + h.scale(c(0.0, s));
                (u - lin).max_abs() / (s * s * hn * hn)
            })
            .collect();
        assert!(consts[0] < 10.0);
        assert!((consts[0] / consts[1] - 1.0).abs() < 0.05, "{consts:?}");
    }

    #[test]
    fn exp_derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let h = random_hermitian(n, &mut rng);
            let dh = random_hermitian(n, &mut rng);
            let analytic = mat_exp_i_derivative(&h, &dh).unwrap();
            let eps = 1e-5;
            let plus = mat_exp_i(&(h + dh.scale_re(eps)), 1.0).unwrap();
            let minus = mat_exp_i(&(h - dh.scale_re(eps)), 1.0).unwrap();
            let fd = (plus - minus).scale_re(0.5 / eps);
            assert!((analytic - fd).max_abs() < 1e-8, "n={n}");
        }
        // degenerate spectrum: h = 0 gives d exp(ih) = i dh
        let dh = random_hermitian(2, &mut rng);
        let d0 = mat_exp_i_derivative(&ComplexMatrix::zeros(2), &dh).unwrap();
        assert!((d0 - dh.scale(c(0.0, 1.0))).max_abs() < 1e-14);
    }

    #[test]
    fn generator_basis_is_orthonormal() {
        for n in 1..=4 {
            for with_id in [false, true] {
                let basis = generator_basis(n, with_id);
                let expected = n * n - 1 + usize::from(with_id);
                assert_eq!(basis.len(), expected);
                for (a, ta) in basis.iter().enumerate() {
                    assert!(ta.is_hermitian(1e-15));
                    if !with_id || a + 1 < basis.len() {
                        assert!(ta.is_traceless(1e-15));
                    }
                    for (b, tb) in basis.iter().enumerate() {
                        let want = if a == b { 0.5 } else { 0.0 };
                        assert!(((*ta * *tb).trace() - c(want, 0.0)).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_of_product_reverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = ComplexMatrix::from_fn(3, |_, _| c(rng.gen(), rng.gen()));
        let b = ComplexMatrix::from_fn(3, |_, _| c(rng.gen(), rng.gen()));
        assert!(((a * b).adjoint() - b.adjoint() * a.adjoint()).max_abs() < 1e-15);
    }
}
