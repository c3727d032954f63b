//! Noether currents of the local U(1) and SU(N) symmetries, their discrete
//! divergences, the inhomogeneous field equations and the on-shell
//! decomposition of the gauge-current divergence.
//!
//! Divergences need a stencil along every axis, so they are evaluated on
//! space-time lattices (a full lattice or a stack of at least three slices).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauge::{SUNGaugeFunction, U1GaugeFunction};
use crate::lattice::{central_diff, FieldValue, LatticeField, LatticeSpec, MatrixLatticeField, RealField};
use crate::state::GaugeFieldState;
use crate::tensor::{ComplexMatrix, ComplexVector};

/// A D-vector of fields, component μ in `components[μ]` (contravariant).
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentField<T> {
    pub components: Vec<LatticeField<T>>,
}

pub type ScalarCurrent = CurrentField<Complex64>;
pub type MatrixCurrent = CurrentField<ComplexMatrix>;

impl<T: FieldValue> CurrentField<T> {
    pub fn spec(&self) -> &LatticeSpec {
        self.components[0].spec()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &CurrentField<T>) -> CurrentField<T> {
        CurrentField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }
}

impl ScalarCurrent {
    /// Largest imaginary part relative to max(1, |j|).
    pub fn max_imag_residue(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.values().iter())
            .map(|z| z.im.abs() / z.norm().max(1.0))
            .fold(0.0, f64::max)
    }
}

impl MatrixCurrent {
    pub fn max_hermiticity_defect(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.values().iter())
            .map(|m| m.hermiticity_defect())
            .fold(0.0, f64::max)
    }

    /// Site-wise trace pairing tr(u j^μ) with a matrix field.
    pub fn paired_with(&self, u: &MatrixLatticeField) -> ScalarCurrent {
        CurrentField {
            components: self
                .components
                .iter()
                .map(|c| u.zip_map(c, |u, j| (*u * *j).trace()))
                .collect(),
        }
    }
}

fn per_component<T: Copy>(state: &GaugeFieldState, f: impl Fn(usize, usize) -> T) -> Vec<LatticeField<T>> {
    let spec = state.spec();
    (0..spec.dim())
        .map(|mu| LatticeField::from_fn(spec, |s| f(mu, s)))
        .collect()
}

fn require_abelian(state: &GaugeFieldState) -> Result<()> {
    if state.n() != 1 {
        return Err(Error::RequiresAbelian(state.n()));
    }
    Ok(())
}

/// j₁^μ = iq(π̄^μφ − φ̄π^μ).
pub fn u1_matter_current(state: &GaugeFieldState) -> Result<ScalarCurrent> {
    require_abelian(state)?;
    let iq = state.params().iq();
    Ok(CurrentField {
        components: per_component(state, |mu, s| {
            let (phi, pi) = (state.phi[s][0], state.pi[mu][s][0]);
            iq * (pi.conj() * phi - phi.conj() * pi)
        }),
    })
}

/// j^μ = iq(π̄^μφ − φ̄π^μ)Λ + p^{βμ}∂_βΛ.
pub fn u1_current(state: &GaugeFieldState, gf: &U1GaugeFunction) -> Result<ScalarCurrent> {
    let j1 = u1_matter_current(state)?;
    let d = state.dim();
    let grads = (0..d).map(|b| gf.gradient(b)).collect::<Result<Vec<_>>>()?;
    let lambda = gf.values();
    Ok(CurrentField {
        components: per_component(state, |mu, s| {
            let mut j = j1.components[mu][s] * lambda[s];
            for (beta, g) in grads.iter().enumerate() {
                j += state.p_at(s, beta, mu)[(0, 0)] * g[s];
            }
            j
        }),
    })
}

/// j^μ_{JK} = iq(φ_Jπ̄^μ_K − π^μ_Jφ̄_K + a_{JIα}p^{αμ}_{IK} − p^{αμ}_{JI}a_{IKα}).
///
/// Hermitian for Hermitian a and p: the bracket is anti-Hermitian.
pub fn sun_gauge_current(state: &GaugeFieldState) -> MatrixCurrent {
    let iq = state.params().iq();
    let d = state.dim();
    CurrentField {
        components: per_component(state, |mu, s| {
            let (phi, pi) = (&state.phi[s], &state.pi[mu][s]);
            let mut bracket = ComplexVector::outer_conj(phi, pi) - ComplexVector::outer_conj(pi, phi);
            for alpha in 0..d {
                bracket += state.a[alpha][s].commutator(&state.p_at(s, alpha, mu));
            }
            bracket.scale(iq)
        }),
    }
}

/// j^μ = iq[π̄uφ − φ̄uπ + tr(p^{αμ}(u a_α − a_α u))] + tr(p^{αμ}∂_αu) for the
/// Hermitian generator u(x) of the gauge function.
pub fn sun_current(state: &GaugeFieldState, gf: &SUNGaugeFunction) -> Result<ScalarCurrent> {
    let u = gf
        .generator()
        .ok_or_else(|| Error::Mismatch("gauge function has no generator field".into()))?;
    if u.spec() != state.spec() {
        return Err(Error::Mismatch(
            "gauge function and state live on different lattices".into(),
        ));
    }
    let d = state.dim();
    let du = (0..d).map(|a| gf.generator_gradient(a)).collect::<Result<Vec<_>>>()?;
    let iq = state.params().iq();
    Ok(CurrentField {
        components: per_component(state, |mu, s| {
            let us = u[s];
            let (phi, pi) = (&state.phi[s], &state.pi[mu][s]);
            let mut inner = us.sandwich(pi, phi) - us.sandwich(phi, pi);
            let mut grad = Complex64::new(0.0, 0.0);
            for alpha in 0..d {
                let p = state.p_at(s, alpha, mu);
                inner += (p * us.commutator(&state.a[alpha][s])).trace();
                grad += (p * du[alpha][s]).trace();
            }
            iq * inner + grad
        }),
    })
}

/// ∂_μ j^μ with central differences.
pub fn divergence<T: FieldValue>(j: &CurrentField<T>) -> Result<LatticeField<T>> {
    let mut out: Option<LatticeField<T>> = None;
    for (mu, c) in j.components.iter().enumerate() {
        let d = central_diff(c, mu)?;
        out = Some(match out {
            None => d,
            Some(acc) => acc.add(&d),
        });
    }
    out.ok_or_else(|| Error::Dimension("empty current".into()))
}

/// ∂_α p^{αμ} for every μ.
pub fn momentum_divergence(state: &GaugeFieldState) -> Result<MatrixCurrent> {
    let d = state.dim();
    let components = (0..d)
        .map(|mu| {
            let field = CurrentField {
                components: (0..d).map(|alpha| state.p_field(alpha, mu)).collect(),
            };
            divergence(&field)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurrentField { components })
}

/// R^μ = ∂_α p^{αμ} − j^μ with the gauge current as source (j₁ when N = 1).
pub fn maxwell_residual(state: &GaugeFieldState) -> Result<MatrixCurrent> {
    Ok(momentum_divergence(state)?.sub(&sun_gauge_current(state)))
}

/// ∂_β∂_α p^{αβ} assembled with the stencil; zero to rounding by antisymmetry.
pub fn double_divergence(state: &GaugeFieldState) -> Result<MatrixLatticeField> {
    let d = state.dim();
    let mut acc = LatticeField::filled(state.spec(), ComplexMatrix::zeros(state.n()));
    for beta in 0..d {
        for alpha in 0..d {
            let inner = central_diff(&state.p_field(alpha, beta), alpha)?;
            acc = acc.add(&central_diff(&inner, beta)?);
        }
    }
    Ok(acc)
}

/// Both sides of the divergence identity for the gauge current.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// (1/iq)∂_β j^β_{JK} by differencing the bracket directly.
    pub direct: MatrixLatticeField,
    /// Amended-equation residual bilinears plus ½[F_{βα}, p^{αβ}] terms,
    /// minus Σ_α[a_α, R^α] so that the identity holds off-shell as well.
    pub decomposed: MatrixLatticeField,
}

impl Decomposition {
    pub fn max_difference(&self) -> f64 {
        self.direct.sub(&self.decomposed).max_abs()
    }

    /// Per-site max-entry |direct − decomposed|.
    pub fn residual(&self) -> RealField {
        self.direct.zip_map(&self.decomposed, |a, b| (*a - *b).max_abs())
    }
}

/// Evaluates the divergence of the gauge current two ways.
///
/// On-shell every matter bracket and the Maxwell residual vanish, so both
/// sides are O(Δ²). Off-shell the two still agree to O(Δ²), since the only
/// step besides the product rule is the substitution ∂_β p^{βα} = j^α + R^α.
pub fn onshell_decomposition(state: &GaugeFieldState) -> Result<Decomposition> {
    let spec = state.spec();
    let d = state.dim();
    let n = state.n();
    let iq = state.params().iq();
    let zero = ComplexMatrix::zeros(n);

    let bracket = CurrentField {
        components: per_component(state, |mu, s| {
            let (phi, pi) = (&state.phi[s], &state.pi[mu][s]);
            let mut b = ComplexVector::outer_conj(phi, pi) - ComplexVector::outer_conj(pi, phi);
            for alpha in 0..d {
                b += state.a[alpha][s].commutator(&state.p_at(s, alpha, mu));
            }
            b
        }),
    };
    let direct = divergence(&bracket)?;

    let dphi = (0..d)
        .map(|a| central_diff(&state.phi, a))
        .collect::<Result<Vec<_>>>()?;
    let dpi = (0..d)
        .map(|a| central_diff(&state.pi[a], a))
        .collect::<Result<Vec<_>>>()?;
    let da: Vec<Vec<MatrixLatticeField>> = (0..d)
        .map(|b| (0..d).map(|a| central_diff(&state.a[a], b)).collect())
        .collect::<Result<_>>()?;
    let residual = maxwell_residual(state)?;

    let decomposed = LatticeField::from_fn(spec, |s| {
        let phi = &state.phi[s];
        let mut out = zero;
        // Σ_α ∂_απ^α − iq a_απ^α, the divergence residual of the momenta.
        let mut div_pi = ComplexVector::zeros(n);
        for alpha in 0..d {
            let a = &state.a[alpha][s];
            let pi = &state.pi[alpha][s];
            let cov_phi = dphi[alpha][s] - a.mul_vec(phi).scale(iq);
            out += ComplexVector::outer_conj(&cov_phi, pi) - ComplexVector::outer_conj(pi, &cov_phi);
            div_pi += dpi[alpha][s] - a.mul_vec(pi).scale(iq);
        }
        out += ComplexVector::outer_conj(phi, &div_pi) - ComplexVector::outer_conj(&div_pi, phi);
        for alpha in 0..d {
            for beta in (alpha + 1)..d {
                // F_{βα} = ∂_β a_α − ∂_α a_β + iq[a_α, a_β]
                let f =
                    da[beta][alpha][s] - da[alpha][beta][s] + state.a[alpha][s].commutator(&state.a[beta][s]).scale(iq);
                out += f.commutator(&state.p_at(s, alpha, beta));
            }
            out -= state.a[alpha][s].commutator(&residual.components[alpha][s]);
        }
        out
    });
    Ok(Decomposition { direct, decomposed })
}

/// Σ over the spatial sites of slice `t` of j⁰, times the spatial cell volume.
pub fn total_charge<T: FieldValue>(j: &CurrentField<T>, t: usize) -> Result<T> {
    let j0 = &j.components[0];
    let spec = j0.spec();
    if t >= spec.extent(0) {
        return Err(Error::Slice {
            slice: t,
            extent: spec.extent(0),
        });
    }
    let mut sites = spec.slice_sites(t);
    let first = j0[sites.next().expect("slices are non-empty")];
    let sum = sites.fold(first, |acc, s| acc + j0[s]);
    Ok(sum.scaled(spec.spatial_cell_volume()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::FourierSeries;
    use crate::state::{ModelParams, SeedTarget};
    use crate::tensor::generator_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(n: usize, extent: usize, seed: u64) -> GaugeFieldState {
        let spec = LatticeSpec::uniform(2, extent, 0.25).unwrap();
        GaugeFieldState::random(
            &spec,
            &ModelParams::new(n, 0.9, 1.0).unwrap(),
            1.0,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap()
    }

    fn smooth_state(n: usize, extent: usize, seed: u64) -> GaugeFieldState {
        let spec = LatticeSpec::uniform(2, extent, 8.0 / extent as f64).unwrap();
        GaugeFieldState::smooth_random(
            &spec,
            &ModelParams::new(n, 0.9, 1.0).unwrap(),
            0.4,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap()
    }

    #[test]
    fn u1_current_examples() {
        let s = random_state(1, 8, 1);
        let zero = U1GaugeFunction::constant(s.spec(), 0.0);
        assert_eq!(u1_current(&s, &zero).unwrap().max_abs(), 0.0);
        let one = U1GaugeFunction::constant(s.spec(), 1.0);
        assert_eq!(u1_current(&s, &one).unwrap(), u1_matter_current(&s).unwrap());

        let spec = LatticeSpec::uniform(2, 4, 1.0).unwrap();
        let mut h = GaugeFieldState::new(&spec, &ModelParams::new(1, 1.0, 0.0).unwrap()).unwrap();
        h.phi[0][0] = c(1.0, 0.0);
        h.pi[0][0][0] = c(0.0, 1.0);
        let j = u1_current(&h, &U1GaugeFunction::constant(&spec, 1.0)).unwrap();
        assert!((j.components[0][0] - c(2.0, 0.0)).norm() < 1e-15);
    }

    /// Λ = 1, x¹ and (x¹)² pick out the Λ, ∂Λ and ∂²Λ coefficients of the current.
    #[test]
    fn polynomial_gauge_functions_separate_terms() {
        let s = random_state(1, 8, 2);
        let spec = s.spec().clone();
        let j1 = u1_matter_current(&s).unwrap();
        let x1 = |site: usize| spec.position(site)[1];
        let zero = LatticeField::filled(&spec, 0.0);

        let linear = U1GaugeFunction::with_gradient(
            LatticeField::from_fn(&spec, x1),
            vec![zero.clone(), LatticeField::filled(&spec, 1.0)],
        )
        .unwrap();
        let quadratic = U1GaugeFunction::with_gradient(
            LatticeField::from_fn(&spec, |site| x1(site).powi(2)),
            vec![zero, LatticeField::from_fn(&spec, |site| 2.0 * x1(site))],
        )
        .unwrap();
        let jl = u1_current(&s, &linear).unwrap();
        let jq = u1_current(&s, &quadratic).unwrap();
        for mu in 0..2 {
            for site in 0..spec.sites() {
                let p = s.p_at(site, 1, mu)[(0, 0)];
                let expect_l = j1.components[mu][site] * x1(site) + p;
                let expect_q = j1.components[mu][site] * x1(site).powi(2) + p * 2.0 * x1(site);
                assert!((jl.components[mu][site] - expect_l).norm() < 1e-13);
                assert!((jq.components[mu][site] - expect_q).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matter_current_reality_and_zeros() {
        let mut s = random_state(1, 8, 3);
        assert!(u1_matter_current(&s).unwrap().max_imag_residue() < 1e-14);
        for site in 0..s.spec().sites() {
            s.phi[site][0] = c(s.phi[site][0].re, 0.0);
            for mu in 0..2 {
                s.pi[mu][site][0] = c(s.pi[mu][site][0].re, 0.0);
            }
        }
        assert_eq!(u1_matter_current(&s).unwrap().max_abs(), 0.0);
        let z = GaugeFieldState::new(s.spec(), s.params()).unwrap();
        assert_eq!(u1_matter_current(&z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn plane_wave_charge_density_is_uniform() {
        let spec = LatticeSpec::uniform(2, 16, 0.25).unwrap();
        let (q, m, amp) = (0.5, 1.2, 0.3);
        let mut s = GaugeFieldState::new(&spec, &ModelParams::new(1, q, m).unwrap()).unwrap();
        s.seed_plane_wave(&[2], amp, SeedTarget::Matter { component: 0 })
            .unwrap();
        let k = 2.0 * std::f64::consts::PI * 2.0 / 4.0;
        let omega = (k * k + m * m).sqrt();
        // iq(π̄⁰φ − φ̄π⁰) with π⁰ = −iωφ gives −2qω|A|².
        let j = u1_matter_current(&s).unwrap();
        for site in 0..spec.sites() {
            assert!((j.components[0][site] - c(-2.0 * q * omega * amp * amp, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn gauge_current_is_hermitian_and_reduces_at_n1() {
        for n in 1..=3 {
            let s = random_state(n, 8, 4 + n as u64);
            assert!(sun_gauge_current(&s).max_hermiticity_defect() < 1e-10);
        }
        let s = random_state(1, 8, 9);
        let j = sun_gauge_current(&s);
        let j1 = u1_matter_current(&s).unwrap();
        for mu in 0..2 {
            for site in 0..s.spec().sites() {
                assert!((j.components[mu][site][(0, 0)] - j1.components[mu][site]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn self_coupling_needs_gauge_fields() {
        let mut s = random_state(2, 8, 10);
        let matter_only = |s: &GaugeFieldState| {
            let mut t = s.clone();
            for f in t.a.iter_mut() {
                *f = f.map(|m| m.scale_re(0.0));
            }
            sun_gauge_current(&t)
        };
        assert!(sun_gauge_current(&s).sub(&matter_only(&s)).max_abs() > 1e-3);
        for f in s.a.iter_mut() {
            *f = f.map(|m| m.scale_re(0.0));
        }
        assert_eq!(sun_gauge_current(&s).sub(&matter_only(&s)).max_abs(), 0.0);
    }

    #[test]
    fn sun_current_contracts_the_gauge_current() {
        let s = random_state(2, 8, 11);
        let spec = s.spec();
        let zero = SUNGaugeFunction::constant(spec, &ComplexMatrix::zeros(2)).unwrap();
        assert_eq!(sun_current(&s, &zero).unwrap().max_abs(), 0.0);

        let id = SUNGaugeFunction::constant(spec, &ComplexMatrix::identity(2)).unwrap();
        let j = sun_current(&s, &id).unwrap();
        for mu in 0..2 {
            for site in [0, 17, 40] {
                let (phi, pi) = (&s.phi[site], &s.pi[mu][site]);
                let expected = s.params().iq() * (pi.dot(phi) - phi.dot(pi));
                assert!((j.components[mu][site] - expected).norm() < 1e-14);
            }
        }

        let h = generator_basis(2, false)[0].scale_re(0.6) + generator_basis(2, false)[1].scale_re(-0.2);
        let gf = SUNGaugeFunction::constant(spec, &h).unwrap();
        let paired = sun_gauge_current(&s).paired_with(gf.generator().unwrap());
        assert!(sun_current(&s, &gf).unwrap().sub(&paired).max_abs() < 1e-13);
    }

    /// Naive nested-index loops, written independently of the matrix helpers.
    fn gauge_current_oracle(s: &GaugeFieldState, mu: usize, site: usize) -> Vec<Complex64> {
        let n = s.n();
        let iq = s.params().iq();
        let mut out = vec![c(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                let mut acc = s.phi[site][j] * s.pi[mu][site][k].conj() - s.pi[mu][site][j] * s.phi[site][k].conj();
                for alpha in 0..s.dim() {
                    let p = s.p_at(site, alpha, mu);
                    let a = s.a[alpha][site];
                    for i in 0..n {
                        acc += a[(j, i)] * p[(i, k)] - p[(j, i)] * a[(i, k)];
                    }
                }
                out[j * n + k] = iq * acc;
            }
        }
        out
    }

    #[test]
    fn gauge_current_matches_loop_oracle() {
        for n in 1..=3 {
            let s = random_state(n, 8, 12 + n as u64);
            let j = sun_gauge_current(&s);
            for mu in 0..2 {
                for site in 0..s.spec().sites() {
                    let oracle = gauge_current_oracle(&s, mu, site);
                    let got: Vec<_> = j.components[mu][site].entries().collect();
                    for (x, y) in got.iter().zip(&oracle) {
                        assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_examples() {
        let spec = LatticeSpec::uniform(2, 16, 0.25).unwrap();
        let constant = CurrentField {
            components: vec![LatticeField::filled(&spec, c(1.5, 0.0)); 2],
        };
        assert_eq!(divergence(&constant).unwrap().max_abs(), 0.0);
        let k = 2.0 * std::f64::consts::PI / spec.length(1);
        let j = CurrentField {
            components: vec![
                LatticeField::from_fn(&spec, |s| c((k * spec.position(s)[1]).sin(), 0.0)),
                LatticeField::filled(&spec, c(0.0, 0.0)),
            ],
        };
        assert_eq!(divergence(&j).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn double_divergence_vanishes_to_rounding() {
        for n in 1..=3 {
            let s = random_state(n, 8, 20 + n as u64);
            let scale = s.max_abs() / (0.25f64 * 0.25);
            assert!(double_divergence(&s).unwrap().max_abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn maxwell_residual_examples() {
        let z = random_state(2, 8, 30);
        let zero = GaugeFieldState::new(z.spec(), z.params()).unwrap();
        assert_eq!(maxwell_residual(&zero).unwrap().max_abs(), 0.0);

        let mut s = random_state(1, 8, 31);
        let p = ComplexMatrix::scalar(1, c(0.4, 0.0));
        s.p[0] = LatticeField::filled(s.spec(), p);
        let r = maxwell_residual(&s).unwrap();
        let j1 = u1_matter_current(&s).unwrap();
        for site in 0..s.spec().sites() {
            assert!((r.components[0][site][(0, 0)] + j1.components[0][site]).norm() < 1e-14);
        }
    }

    #[test]
    fn decomposition_of_zero_state_is_zero() {
        let s = random_state(2, 8, 40);
        let zero = GaugeFieldState::new(s.spec(), s.params()).unwrap();
        let d = onshell_decomposition(&zero).unwrap();
        assert_eq!(d.direct.max_abs() + d.decomposed.max_abs(), 0.0);
    }

    /// Off-shell the identity holds to O(Δ²) while neither side is small.
    #[test]
    fn decomposition_identity_holds_off_shell() {
        for n in [1, 2, 3] {
            let mut diffs = Vec::new();
            for extent in [32, 64] {
                let s = smooth_state(n, extent, 50 + n as u64);
                let d = onshell_decomposition(&s).unwrap();
                assert!(d.direct.max_abs() > 1e-2);
                diffs.push(d.max_difference());
            }
            let order = (diffs[0] / diffs[1]).log2();
            assert!(order > 1.8, "N = {n}: order {order}, diffs {diffs:?}");
        }
    }

    #[test]
    fn u1_full_current_divergence_splits_into_known_terms() {
        // ∂_μ j^μ(Λ) = Λ ∂_μ j₁^μ − ∂_βΛ R^β up to stencil error.
        let mut errs = Vec::new();
        for extent in [32, 64] {
            let s = smooth_state(1, extent, 60);
            let series = FourierSeries::new(2, vec![([1, 1, 0, 0], c(0.5, 0.2))]);
            let gf = U1GaugeFunction::from_series(s.spec(), &series);
            let lhs = divergence(&u1_current(&s, &gf).unwrap()).unwrap();
            let dj1 = divergence(&u1_matter_current(&s).unwrap()).unwrap();
            let r = maxwell_residual(&s).unwrap();
            let rhs = LatticeField::from_fn(s.spec(), |site| {
                let mut v = gf.values()[site] * dj1[site];
                for beta in 0..2 {
                    v -= gf.gradient(beta).unwrap()[site] * r.components[beta][site][(0, 0)];
                }
                v
            });
            errs.push(lhs.sub(&rhs).max_abs());
        }
        assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
    }

    #[test]
    fn total_charge_examples() {
        let spec = LatticeSpec::new(&[4, 10], &[1.0, 1.0]).unwrap();
        let zero = CurrentField {
            components: vec![LatticeField::filled(&spec, c(0.0, 0.0)); 2],
        };
        assert_eq!(total_charge(&zero, 0).unwrap(), c(0.0, 0.0));
        let uniform = CurrentField {
            components: vec![LatticeField::filled(&spec, c(0.3, 0.0)); 2],
        };
        assert!((total_charge(&uniform, 2).unwrap() - c(3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(total_charge(&uniform, 4), Err(Error::Slice { .. })));
    }
}
