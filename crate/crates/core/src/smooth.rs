//! Smooth periodic test functions built from a few low Fourier modes.
//!
//! A series is defined in physical coordinates, so sampling it on a coarse
//! and a refined lattice of the same periods gives the same continuum
//! function. That is what makes refinement studies meaningful.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::lattice::LatticeSpec;
use crate::tensor::MAX_DIM;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    /// (mode numbers per axis, coefficient).
    terms: Vec<([i64; MAX_DIM], Complex64)>,
    dim: usize,
}

impl FourierSeries {
    pub fn zero(dim: usize) -> Self {
        FourierSeries { terms: Vec::new(), dim }
    }

    pub fn new(dim: usize, terms: Vec<([i64; MAX_DIM], Complex64)>) -> Self {
        FourierSeries { terms, dim }
    }

    /// Random series over mode numbers 0..modes_per_axis on every axis
    /// (the constant term included) with coefficient moduli at most `amplitude`.
    ///
    /// `axes` restricts which axes may carry a nonzero mode number; the rest
    /// stay constant along those directions.
    pub fn random(dim: usize, modes_per_axis: usize, amplitude: f64, axes: &[bool], rng: &mut impl Rng) -> Self {
        let mut terms = Vec::new();
        let total = modes_per_axis.pow(dim as u32);
        for idx in 0..total {
            let mut n = [0i64; MAX_DIM];
            let mut rest = idx;
            let mut allowed = true;
            for (axis, slot) in n.iter_mut().enumerate().take(dim) {
                *slot = (rest % modes_per_axis) as i64;
                rest /= modes_per_axis;
                if *slot != 0 && !axes.get(axis).copied().unwrap_or(true) {
                    allowed = false;
                }
            }
            if !allowed {
                continue;
            }
            let modulus = amplitude * rng.gen_range(0.0..1.0);
            let phase = rng.gen_range(0.0..2.0 * PI);
            terms.push((n, Complex64::from_polar(modulus, phase)));
        }
        FourierSeries { terms, dim }
    }

    fn wavevector(n: &[i64; MAX_DIM], lengths: &[f64]) -> [f64; MAX_DIM] {
        let mut k = [0.0; MAX_DIM];
        for (axis, l) in lengths.iter().enumerate() {
            k[axis] = 2.0 * PI * n[axis] as f64 / l;
        }
        k
    }

    pub fn value(&self, x: &[f64], lengths: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(n, c)| {
                let k = Self::wavevector(n, lengths);
                let phase: f64 = (0..self.dim).map(|a| k[a] * x[a]).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Exact partial derivative along `mu`.
    pub fn derivative(&self, x: &[f64], lengths: &[f64], mu: usize) -> Complex64 {
        self.terms
            .iter()
            .map(|(n, c)| {
                let k = Self::wavevector(n, lengths);
                let phase: f64 = (0..self.dim).map(|a| k[a] * x[a]).sum();
                c * Complex64::new(0.0, k[mu]) * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Periods of the lattice, used as the series' fundamental lengths.
    ///
    /// A time slice has no temporal period; the value there is irrelevant
    /// because slices sit at x⁰ = 0.
    pub fn lengths(spec: &LatticeSpec) -> Vec<f64> {
        (0..spec.dim()).map(|a| spec.length(a)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = FourierSeries::random(2, 3, 0.5, &[true, true], &mut rng);
        let lengths = [4.0, 6.0];
        let x = [0.3, 1.7];
        for mu in 0..2 {
            let h = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[mu] += h;
            xm[mu] -= h;
            let fd = (s.value(&xp, &lengths) - s.value(&xm, &lengths)) / (2.0 * h);
            assert!((fd - s.derivative(&x, &lengths, mu)).norm() < 1e-8);
        }
    }

    #[test]
    fn periodic_in_every_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = FourierSeries::random(3, 3, 0.5, &[true; 3], &mut rng);
        let lengths = [2.0, 3.0, 5.0];
        let x = [0.1, 0.2, 0.3];
        let shifted = [2.1, 3.2, 5.3];
        assert!((s.value(&x, &lengths) - s.value(&shifted, &lengths)).norm() < 1e-12);
    }

    #[test]
    fn masked_axes_stay_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = FourierSeries::random(2, 3, 0.5, &[false, true], &mut rng);
        let lengths = [4.0, 4.0];
        assert!(s.derivative(&[0.7, 0.2], &lengths, 0).norm() < 1e-15);
    }
}
