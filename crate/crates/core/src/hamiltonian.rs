//! De Donder-Weyl Hamiltonian densities, their Wirtinger partials and the
//! Legendre reconstruction of the Lagrangian density.
//!
//! Complex fields and their conjugates are independent differentiation
//! variables. All contractions use the diagonal metric (+, −, −, −).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{LatticeField, LatticeSpec, RealField, VectorLatticeField};
use crate::state::GaugeFieldState;
use crate::tensor::{ComplexMatrix, ComplexVector};

/// Real density sampled per site.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub values: RealField,
    /// Largest |Im ℋ| / max(1, |ℋ|) met while evaluating.
    pub max_imag_residue: f64,
}

impl DensityField {
    fn from_complex(spec: &LatticeSpec, values: Vec<Complex64>) -> Self {
        let max_imag_residue = values
            .iter()
            .map(|z| z.im.abs() / z.norm().max(1.0))
            .fold(0.0, f64::max);
        let re = values.iter().map(|z| z.re).collect();
        DensityField {
            values: LatticeField::from_values(spec, re).expect("one value per site"),
            max_imag_residue,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.max_abs()
    }

    /// Σ density × spatial cell volume over time slice `t`.
    pub fn integrate_slice(&self, t: usize) -> Result<f64> {
        let spec = self.values.spec();
        if t >= spec.extent(0) {
            return Err(Error::Slice {
                slice: t,
                extent: spec.extent(0),
            });
        }
        let sum: f64 = self.values.values()[spec.slice_sites(t)].iter().sum();
        Ok(sum * spec.spatial_cell_volume())
    }
}

/// Which density a gradient or Legendre evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// π̄_{Jα}π_J^α + m²φ̄_Jφ_J with no gauge fields.
    Free,
    /// Full Yang-Mills density (covers the Abelian density at N = 1).
    YangMills,
}

#[inline]
fn g(mu: usize) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

fn free_site(state: &GaugeFieldState, site: usize) -> Complex64 {
    let m2 = state.params().m.powi(2);
    let kinetic: f64 = (0..state.dim()).map(|mu| g(mu) * state.pi[mu][site].norm_sqr()).sum();
    Complex64::new(kinetic + m2 * state.phi[site].norm_sqr(), 0.0)
}

/// Yang-Mills density at one site, as a complex number (imaginary part is residue).
pub(crate) fn ym_site(state: &GaugeFieldState, site: usize) -> Complex64 {
    let iq = state.params().iq();
    let spec = state.spec();
    let phi = state.phi[site];
    let mut h = free_site(state, site);
    for mu in 0..state.dim() {
        let a = state.a[mu][site];
        let pi = state.pi[mu][site];
        h += iq * (a.sandwich(&pi, &phi) - a.sandwich(&phi, &pi));
    }
    for (alpha, beta) in spec.pairs() {
        let p = state.p_at(site, alpha, beta);
        let aa = state.a[alpha][site].commutator(&state.a[beta][site]);
        h += -0.5 * g(alpha) * g(beta) * (p * p).trace();
        h -= iq * (p * aa).trace();
    }
    h
}

fn kgm_site(state: &GaugeFieldState, site: usize) -> Complex64 {
    let q = state.params().q;
    let iq = Complex64::new(0.0, q);
    let m2 = state.params().m.powi(2);
    let phi = state.phi[site][0];
    let mut h = Complex64::new(m2 * phi.norm_sqr(), 0.0);
    for mu in 0..state.dim() {
        let pi = state.pi[mu][site][0];
        let a = state.a[mu][site][(0, 0)];
        h += g(mu) * pi.norm_sqr();
        h += iq * a * (pi.conj() * phi - phi.conj() * pi);
    }
    for (alpha, beta) in state.spec().pairs() {
        let p = state.p_at(site, alpha, beta)[(0, 0)];
        h += -0.5 * g(alpha) * g(beta) * p * p;
    }
    h
}

fn eval_with(state: &GaugeFieldState, f: impl Fn(&GaugeFieldState, usize) -> Complex64) -> DensityField {
    let spec = state.spec();
    let values = (0..spec.sites()).map(|s| f(state, s)).collect();
    DensityField::from_complex(spec, values)
}

/// Σ_J (π̄_{Jα}π_J^α + m²φ̄_Jφ_J) per site; gauge fields are ignored.
pub fn eval_free(state: &GaugeFieldState) -> DensityField {
    eval_with(state, free_site)
}

/// Abelian Klein-Gordon-Maxwell density, evaluated with scalar arithmetic.
pub fn eval_kgm(state: &GaugeFieldState) -> Result<DensityField> {
    if state.n() != 1 {
        return Err(Error::RequiresAbelian(state.n()));
    }
    Ok(eval_with(state, kgm_site))
}

/// Yang-Mills density with the momentum square in trace ordering p_{JK}p_{KJ}.
pub fn eval_ym(state: &GaugeFieldState) -> DensityField {
    eval_with(state, ym_site)
}

/// Wirtinger partials of a Hamiltonian density with respect to the matter fields.
#[derive(Debug, Clone, PartialEq)]
pub struct MatterGradient {
    /// ∂ℋ/∂φ_J
    pub d_phi: VectorLatticeField,
    /// ∂ℋ/∂φ̄_J
    pub d_phibar: VectorLatticeField,
    /// ∂ℋ/∂π_J^μ per μ
    pub d_pi: Vec<VectorLatticeField>,
    /// ∂ℋ/∂π̄_J^μ per μ
    pub d_pibar: Vec<VectorLatticeField>,
}

pub fn grad_matter(state: &GaugeFieldState, kind: HamiltonianKind) -> MatterGradient {
    let spec = state.spec();
    let d = state.dim();
    let m2 = state.params().m.powi(2);
    let iq = match kind {
        HamiltonianKind::Free => Complex64::new(0.0, 0.0),
        HamiltonianKind::YangMills => state.params().iq(),
    };
    let d_phi = LatticeField::from_fn(spec, |s| {
        let mut out = state.phi[s].conj().scale(m2.into());
        for mu in 0..d {
            out += ComplexMatrix::vec_mul(&state.pi[mu][s].conj(), &state.a[mu][s]).scale(iq);
        }
        out
    });
    let d_phibar = LatticeField::from_fn(spec, |s| {
        let mut out = state.phi[s].scale(m2.into());
        for mu in 0..d {
            out -= state.a[mu][s].mul_vec(&state.pi[mu][s]).scale(iq);
        }
        out
    });
    let d_pi = (0..d)
        .map(|mu| {
            LatticeField::from_fn(spec, |s| {
                state.pi[mu][s].conj().scale(g(mu).into())
                    - ComplexMatrix::vec_mul(&state.phi[s].conj(), &state.a[mu][s]).scale(iq)
            })
        })
        .collect();
    let d_pibar = (0..d)
        .map(|mu| {
            LatticeField::from_fn(spec, |s| {
                state.pi[mu][s].scale(g(mu).into()) + state.a[mu][s].mul_vec(&state.phi[s]).scale(iq)
            })
        })
        .collect();
    MatterGradient {
        d_phi,
        d_phibar,
        d_pi,
        d_pibar,
    }
}

fn dot_plain(x: &ComplexVector, y: &ComplexVector) -> Complex64 {
    x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a * b).sum()
}

/// ℒ = π̄·(∂ℋ/∂π̄) + (∂ℋ/∂π)·π + Σ_{α<β} tr(p^{αβ} ∂ℋ/∂p^{αβ}) − ℋ per site.
///
/// Velocities are taken from the first canonical equation rather than from
/// lattice derivatives, so the result is defined off-shell too; it agrees with
/// the textbook Lagrangian only where that equation holds.
pub fn legendre_lagrangian(state: &GaugeFieldState, kind: HamiltonianKind) -> DensityField {
    let spec = state.spec();
    let grad = grad_matter(state, kind);
    let iq = match kind {
        HamiltonianKind::Free => Complex64::new(0.0, 0.0),
        HamiltonianKind::YangMills => state.params().iq(),
    };
    let values = (0..spec.sites())
        .map(|s| {
            let mut l = Complex64::new(0.0, 0.0);
            for mu in 0..state.dim() {
                l += dot_plain(&state.pi[mu][s].conj(), &grad.d_pibar[mu][s]);
                l += dot_plain(&grad.d_pi[mu][s], &state.pi[mu][s]);
            }
            let h = match kind {
                HamiltonianKind::Free => free_site(state, s),
                HamiltonianKind::YangMills => {
                    for (alpha, beta) in spec.pairs() {
                        let p = state.p_at(s, alpha, beta);
                        let aa = state.a[alpha][s].commutator(&state.a[beta][s]);
                        let dh_dp = -p.scale_re(g(alpha) * g(beta)) - aa.scale(iq);
                        l += (p * dh_dp).trace();
                    }
                    ym_site(state, s)
                }
            };
            l - h
        })
        .collect();
    DensityField::from_complex(spec, values)
}
