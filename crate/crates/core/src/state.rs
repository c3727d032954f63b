//! Canonical state of Klein-Gordon matter coupled to a U(N) gauge field.
//!
//! Index placement: matter momenta π_J^μ are contravariant, gauge potentials
//! a_μ covariant, field-strength momenta p^{αβ} contravariant. Only the α < β
//! triangle of p is stored, so antisymmetry holds structurally.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{LatticeField, LatticeSpec, MatrixLatticeField, VectorLatticeField};
use crate::smooth::FourierSeries;
use crate::tensor::{generator_basis, ComplexMatrix, ComplexVector, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Internal dimension N; 1 is the Abelian path.
    pub n: usize,
    /// Coupling constant q.
    pub q: f64,
    /// Mass m.
    pub m: f64,
}

impl ModelParams {
    pub fn new(n: usize, q: f64, m: f64) -> Result<Self> {
        let p = ModelParams { n, q, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ORDER).contains(&self.n) {
            return Err(Error::Params(format!("N = {} outside 1..={MAX_ORDER}", self.n)));
        }
        if !(self.m.is_finite() && self.m >= 0.0) {
            return Err(Error::Params(format!("mass {} must be finite and >= 0", self.m)));
        }
        if !self.q.is_finite() {
            return Err(Error::Params(format!("coupling {} is not finite", self.q)));
        }
        Ok(())
    }

    /// The complex coupling iq.
    pub fn iq(&self) -> Complex64 {
        Complex64::new(0.0, self.q)
    }
}

/// Which field a plane wave is written into.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedTarget {
    /// Matter component φ_J (π^μ is set consistently).
    Matter { component: usize },
    /// Gauge potential a_μ along the Hermitian direction `direction`.
    Gauge { mu: usize, direction: ComplexMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFieldState {
    spec: LatticeSpec,
    params: ModelParams,
    pub phi: VectorLatticeField,
    /// π^μ, one field per μ.
    pub pi: Vec<VectorLatticeField>,
    /// a_μ, one Hermitian matrix field per μ.
    pub a: Vec<MatrixLatticeField>,
    /// p^{αβ} for α < β in [`LatticeSpec::pairs`] order.
    pub p: Vec<MatrixLatticeField>,
}

impl GaugeFieldState {
    /// All-zero state.
    pub fn new(spec: &LatticeSpec, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        let d = spec.dim();
        Ok(GaugeFieldState {
            spec: spec.clone(),
            params: *params,
            phi: LatticeField::filled(spec, ComplexVector::zeros(n)),
            pi: vec![LatticeField::filled(spec, ComplexVector::zeros(n)); d],
            a: vec![LatticeField::filled(spec, ComplexMatrix::zeros(n)); d],
            p: vec![LatticeField::filled(spec, ComplexMatrix::zeros(n)); spec.pair_count()],
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Replaces the model parameters, keeping N fixed.
    pub fn set_params(&mut self, params: ModelParams) -> Result<()> {
        params.validate()?;
        if params.n != self.params.n {
            return Err(Error::ParamMismatch(format!(
                "state has N = {}, new parameters N = {}",
                self.params.n, params.n
            )));
        }
        self.params = params;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// p^{αβ} at a site for any ordered pair; p^{αα} = 0 and p^{βα} = −p^{αβ}.
    #[inline]
    pub fn p_at(&self, site: usize, alpha: usize, beta: usize) -> ComplexMatrix {
        use std::cmp::Ordering;
        match alpha.cmp(&beta) {
            Ordering::Equal => ComplexMatrix::zeros(self.params.n),
            Ordering::Less => self.p[self.spec.pair_index(alpha, beta)][site],
            Ordering::Greater => -self.p[self.spec.pair_index(beta, alpha)][site],
        }
    }

    /// Mutable access to the stored p^{αβ} field, α < β.
    pub fn p_field_mut(&mut self, alpha: usize, beta: usize) -> &mut MatrixLatticeField {
        assert!(alpha < beta, "only the α < β triangle is stored");
        let idx = self.spec.pair_index(alpha, beta);
        &mut self.p[idx]
    }

    /// The full p^{αβ} field for any ordered pair.
    pub fn p_field(&self, alpha: usize, beta: usize) -> MatrixLatticeField {
        let zero = ComplexMatrix::zeros(self.params.n);
        match alpha.cmp(&beta) {
            std::cmp::Ordering::Equal => LatticeField::filled(&self.spec, zero),
            std::cmp::Ordering::Less => self.p[self.spec.pair_index(alpha, beta)].clone(),
            std::cmp::Ordering::Greater => self.p[self.spec.pair_index(beta, alpha)].map(|m| -*m),
        }
    }

    /// Largest deviation from Hermiticity over all a_μ and p^{αβ}.
    pub fn max_hermiticity_defect(&self) -> f64 {
        self.a
            .iter()
            .chain(&self.p)
            .flat_map(|f| f.values().iter().map(|m| m.hermiticity_defect()))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        let vec_ok = |f: &VectorLatticeField| {
            f.values()
                .iter()
                .all(|v| v.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        };
        let mat_ok = |f: &MatrixLatticeField| {
            f.values()
                .iter()
                .all(|m| m.entries().all(|z| z.re.is_finite() && z.im.is_finite()))
        };
        vec_ok(&self.phi) && self.pi.iter().all(vec_ok) && self.a.iter().all(mat_ok) && self.p.iter().all(mat_ok)
    }

    /// Max absolute difference over every stored component.
    pub fn max_deviation(&self, other: &GaugeFieldState) -> f64 {
        fn dev<T: crate::lattice::FieldValue>(a: &LatticeField<T>, b: &LatticeField<T>) -> f64 {
            a.sub(b).max_abs()
        }
        let mut worst = dev(&self.phi, &other.phi);
        for (x, y) in self.pi.iter().zip(&other.pi) {
            worst = worst.max(dev(x, y));
        }
        for (x, y) in self.a.iter().zip(&other.a).chain(self.p.iter().zip(&other.p)) {
            worst = worst.max(dev(x, y));
        }
        worst
    }

    /// Largest magnitude of any stored component.
    pub fn max_abs(&self) -> f64 {
        let mut m = self.phi.max_abs();
        for f in &self.pi {
            m = m.max(f.max_abs());
        }
        for f in self.a.iter().chain(&self.p) {
            m = m.max(f.max_abs());
        }
        m
    }

    /// Writes a plane wave of integer spatial mode numbers `mode`.
    ///
    /// Matter: φ_J = A e^{i(k·x − ωt)} with ω = +√(k² + m²), π^0 = −iωφ_J and
    /// π^k = −i k_k φ_J (the free on-shell momenta). Gauge: a_μ += A·Herm(e^{ik·x} T).
    pub fn seed_plane_wave(&mut self, mode: &[i64], amplitude: f64, target: SeedTarget) -> Result<()> {
        let d = self.dim();
        if mode.len() != d - 1 {
            return Err(Error::Dimension(format!(
                "mode has {} components, lattice has {} spatial axes",
                mode.len(),
                d - 1
            )));
        }
        for (i, &n) in mode.iter().enumerate() {
            if n.unsigned_abs() as usize > self.spec.extent(i + 1) / 2 {
                return Err(Error::Mode(mode.to_vec()));
            }
        }
        let k: Vec<f64> = mode
            .iter()
            .enumerate()
            .map(|(i, &n)| 2.0 * std::f64::consts::PI * n as f64 / self.spec.length(i + 1))
            .collect();
        let k2: f64 = k.iter().map(|x| x * x).sum();
        let omega = (k2 + self.params.m * self.params.m).sqrt();
        let spec = self.spec.clone();
        match target {
            SeedTarget::Matter { component } => {
                if component >= self.n() {
                    return Err(Error::Dimension(format!(
                        "matter component {component} out of range for N = {}",
                        self.n()
                    )));
                }
                for site in 0..spec.sites() {
                    let x = spec.position(site);
                    let phase: f64 = k.iter().enumerate().map(|(i, ki)| ki * x[i + 1]).sum::<f64>() - omega * x[0];
                    let value = Complex64::from_polar(amplitude, phase);
                    self.phi[site][component] = value;
                    self.pi[0][site][component] = Complex64::new(0.0, -omega) * value;
                    for (i, ki) in k.iter().enumerate() {
                        // π^k = g^{kk} ∂_k φ = −i k_k φ
                        self.pi[i + 1][site][component] = Complex64::new(0.0, -ki) * value;
                    }
                }
            }
            SeedTarget::Gauge { mu, direction } => {
                spec.check_direction(mu)?;
                if direction.order() != self.n() {
                    return Err(Error::Dimension("gauge direction has wrong order".into()));
                }
                for site in 0..spec.sites() {
                    let x = spec.position(site);
                    let phase: f64 = k.iter().enumerate().map(|(i, ki)| ki * x[i + 1]).sum();
                    let value = direction
                        .scale(Complex64::from_polar(amplitude, phase))
                        .hermitian_part();
                    self.a[mu][site] += value;
                }
            }
        }
        Ok(())
    }

    /// Site-wise independent random state; a and p Hermitian.
    pub fn random<R: Rng>(spec: &LatticeSpec, params: &ModelParams, scale: f64, rng: &mut R) -> Result<Self> {
        let mut s = Self::new(spec, params)?;
        let n = params.n;
        let cvec = |rng: &mut R| {
            let vals: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
                .collect();
            ComplexVector::from_slice(&vals)
        };
        for site in 0..spec.sites() {
            s.phi[site] = cvec(rng);
            for f in s.pi.iter_mut() {
                f[site] = cvec(rng);
            }
        }
        let herm = |rng: &mut R| {
            ComplexMatrix::from_fn(n, |_, _| {
                Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
            })
            .hermitian_part()
        };
        for f in s.a.iter_mut().chain(s.p.iter_mut()) {
            for site in 0..spec.sites() {
                f[site] = herm(rng);
            }
        }
        Ok(s)
    }

    /// Smooth random state sampled from low Fourier modes.
    ///
    /// The draw depends only on the rng, not on the resolution, so the same
    /// seed gives the same continuum configuration on refined lattices.
    pub fn smooth_random<R: Rng>(
        spec: &LatticeSpec,
        params: &ModelParams,
        amplitude: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut s = Self::new(spec, params)?;
        let d = spec.dim();
        let n = params.n;
        let lengths = FourierSeries::lengths(spec);
        // Time slices get no temporal dependence.
        let axes: Vec<bool> = (0..d).map(|a| spec.extent(a) > 1).collect();
        let draw = |rng: &mut R| FourierSeries::random(d, 3, amplitude, &axes, rng);
        let phi_series: Vec<FourierSeries> = (0..n).map(|_| draw(rng)).collect();
        let pi_series: Vec<Vec<FourierSeries>> = (0..d).map(|_| (0..n).map(|_| draw(rng)).collect()).collect();
        let basis = generator_basis(n, true);
        let a_series: Vec<Vec<FourierSeries>> = (0..d).map(|_| basis.iter().map(|_| draw(rng)).collect()).collect();
        let p_series: Vec<Vec<FourierSeries>> = (0..spec.pair_count())
            .map(|_| basis.iter().map(|_| draw(rng)).collect())
            .collect();
        let herm_at = |coeffs: &[FourierSeries], x: &[f64]| {
            coeffs.iter().zip(&basis).fold(ComplexMatrix::zeros(n), |acc, (c, t)| {
                acc + t.scale_re(c.value(x, &lengths).re)
            })
        };
        for site in 0..spec.sites() {
            let x = spec.position(site);
            for j in 0..n {
                s.phi[site][j] = phi_series[j].value(&x, &lengths);
                for mu in 0..d {
                    s.pi[mu][site][j] = pi_series[mu][j].value(&x, &lengths);
                }
            }
            for mu in 0..d {
                s.a[mu][site] = herm_at(&a_series[mu], &x);
            }
            for (k, coeffs) in p_series.iter().enumerate() {
                s.p[k][site] = herm_at(coeffs, &x);
            }
        }
        Ok(s)
    }

    /// Restriction to one time slice.
    pub fn slice(&self, t: usize) -> Result<GaugeFieldState> {
        Ok(GaugeFieldState {
            spec: self.spec.with_time_extent(1)?,
            params: self.params,
            phi: self.phi.slice(t)?,
            pi: self.pi.iter().map(|f| f.slice(t)).collect::<Result<_>>()?,
            a: self.a.iter().map(|f| f.slice(t)).collect::<Result<_>>()?,
            p: self.p.iter().map(|f| f.slice(t)).collect::<Result<_>>()?,
        })
    }

    /// Stacks single time slices into a space-time lattice with time step `dt`.
    pub fn stack(slices: &[&GaugeFieldState], dt: f64) -> Result<GaugeFieldState> {
        let first = slices
            .first()
            .ok_or_else(|| Error::Lattice("empty slice stack".into()))?;
        if slices.iter().any(|s| s.params != first.params) {
            return Err(Error::Mismatch("slices have different parameters".into()));
        }
        let phi = LatticeField::stack(&slices.iter().map(|s| &s.phi).collect::<Vec<_>>(), dt)?;
        let spec = phi.spec().clone();
        let pi = (0..first.dim())
            .map(|mu| LatticeField::stack(&slices.iter().map(|s| &s.pi[mu]).collect::<Vec<_>>(), dt))
            .collect::<Result<_>>()?;
        let a = (0..first.dim())
            .map(|mu| LatticeField::stack(&slices.iter().map(|s| &s.a[mu]).collect::<Vec<_>>(), dt))
            .collect::<Result<_>>()?;
        let p = (0..first.p.len())
            .map(|k| LatticeField::stack(&slices.iter().map(|s| &s.p[k]).collect::<Vec<_>>(), dt))
            .collect::<Result<_>>()?;
        Ok(GaugeFieldState {
            spec,
            params: first.params,
            phi,
            pi,
            a,
            p,
        })
    }

    pub(crate) fn from_parts(
        spec: LatticeSpec,
        params: ModelParams,
        phi: VectorLatticeField,
        pi: Vec<VectorLatticeField>,
        a: Vec<MatrixLatticeField>,
        p: Vec<MatrixLatticeField>,
    ) -> Self {
        GaugeFieldState {
            spec,
            params,
            phi,
            pi,
            a,
            p,
        }
    }
}
