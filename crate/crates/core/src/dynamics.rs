//! Time evolution of the coupled system in temporal gauge (a₀ = 0), D = 2.
//!
//! Positions are φ and a₁, momenta π⁰ and p^{01}. The spatial momentum π¹ is
//! rebuilt from the first amended canonical equation after every update:
//!
//! ```text
//! π¹     = −(∂₁φ − iq a₁φ)
//! ∂₀φ    = π⁰                        ∂₀a₁   = −p^{01}
//! ∂₀π⁰   = −m²φ + iq a₁π¹ − ∂₁π¹      ∂₀p^{01} = j¹ = iq(φπ̄¹ − π¹φ̄)
//! ```
//!
//! The forces depend on positions only, so kick-drift-kick leapfrog is
//! exactly time-reversible. The conserved quantity of this scheme is the
//! canonical energy Σ(|π⁰|² + |π¹|² + m²|φ|² + ½tr p^{01}p^{01})Δx; the
//! De Donder-Weyl density summed over a slice is reported alongside it but is
//! not a constant of motion.

use num_complex::Complex64;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::hamiltonian::eval_ym;
use crate::lattice::{central_diff, LatticeField, LatticeSpec, MatrixLatticeField, VectorLatticeField};
use crate::noether::{divergence, maxwell_residual, sun_gauge_current, total_charge};
use crate::smooth::FourierSeries;
use crate::state::{GaugeFieldState, ModelParams, SeedTarget};
use crate::tensor::{generator_basis, ComplexMatrix, ComplexVector};

const GAUSS_MAX_ITER: usize = 200;
const GAUSS_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Diagnostics are recorded every `cadence` steps and at the last step.
    pub cadence: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, n_steps: usize, cadence: usize) -> Self {
        EvolutionConfig { dt, n_steps, cadence }
    }

    pub fn validate(&self, spec: &LatticeSpec) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Params(format!("time step {} must be positive", self.dt)));
        }
        if self.cadence == 0 {
            return Err(Error::Params("diagnostics cadence must be at least 1".into()));
        }
        check_cfl(spec, self.dt)
    }
}

/// dt ≤ 0.5 · min spatial Δ.
pub fn cfl_bound(spec: &LatticeSpec) -> f64 {
    0.5 * spec.spacings()[1..].iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_cfl(spec: &LatticeSpec, dt: f64) -> Result<()> {
    let bound = cfl_bound(spec);
    if dt.abs() > bound {
        return Err(Error::Cfl { dt, bound });
    }
    Ok(())
}

fn check_dynamical(state: &GaugeFieldState) -> Result<()> {
    let spec = state.spec();
    if spec.dim() != 2 {
        return Err(Error::UnsupportedDynamics(format!("lattice has D = {}", spec.dim())));
    }
    if spec.extent(0) != 1 {
        return Err(Error::UnsupportedDynamics(format!(
            "expected a single time slice, got time extent {}",
            spec.extent(0)
        )));
    }
    if state.a[0].max_abs() != 0.0 {
        return Err(Error::UnsupportedDynamics("a₀ must vanish in temporal gauge".into()));
    }
    Ok(())
}

/// π^μ = g^{μμ}(∂_μφ − iq a_μφ) along one axis.
pub fn covariant_momentum(state: &GaugeFieldState, mu: usize) -> Result<VectorLatticeField> {
    let dphi = central_diff(&state.phi, mu)?;
    let iq = state.params().iq();
    let sign = state.spec().metric().sign(mu);
    Ok(LatticeField::from_fn(state.spec(), |s| {
        (dphi[s] - state.a[mu][s].mul_vec(&state.phi[s]).scale(iq)).scale(sign.into())
    }))
}

/// All π^μ from the first amended canonical equation; needs a stencil on every axis.
pub fn covariant_momenta(state: &GaugeFieldState) -> Result<Vec<VectorLatticeField>> {
    (0..state.dim()).map(|mu| covariant_momentum(state, mu)).collect()
}

/// p^{αβ} (α < β, contravariant) split into its derivative and commutator parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStrength {
    /// g^{αα}g^{ββ}(∂_αa_β − ∂_βa_α)
    pub derivative: Vec<MatrixLatticeField>,
    /// g^{αα}g^{ββ} iq(a_βa_α − a_αa_β)
    pub commutator: Vec<MatrixLatticeField>,
}

impl FieldStrength {
    pub fn total(&self) -> Vec<MatrixLatticeField> {
        self.derivative
            .iter()
            .zip(&self.commutator)
            .map(|(d, c)| d.add(c))
            .collect()
    }
}

/// Field strength from the potentials, p_{βα} = ∂_βa_α − ∂_αa_β + iq[a_α, a_β], raised.
pub fn field_strength_parts(state: &GaugeFieldState) -> Result<FieldStrength> {
    let spec = state.spec();
    let metric = spec.metric();
    let iq = state.params().iq();
    let mut derivative = Vec::new();
    let mut commutator = Vec::new();
    for (alpha, beta) in spec.pairs() {
        let raise = metric.sign(alpha) * metric.sign(beta);
        let db_aa = central_diff(&state.a[alpha], beta)?;
        let da_ab = central_diff(&state.a[beta], alpha)?;
        derivative.push(da_ab.sub(&db_aa).scaled(raise));
        commutator.push(LatticeField::from_fn(spec, |s| {
            state.a[beta][s]
                .commutator(&state.a[alpha][s])
                .scale(iq)
                .scale_re(raise)
        }));
    }
    Ok(FieldStrength { derivative, commutator })
}

pub fn field_strength(state: &GaugeFieldState) -> Result<Vec<MatrixLatticeField>> {
    Ok(field_strength_parts(state)?.total())
}

fn spatial_pi(state: &GaugeFieldState) -> Result<VectorLatticeField> {
    covariant_momentum(state, 1)
}

/// j⁰ on a slice with the current p^{10}.
fn charge_density(state: &GaugeFieldState, p10: &MatrixLatticeField) -> MatrixLatticeField {
    let iq = state.params().iq();
    LatticeField::from_fn(state.spec(), |s| {
        let (phi, pi) = (&state.phi[s], &state.pi[0][s]);
        (ComplexVector::outer_conj(phi, pi) - ComplexVector::outer_conj(pi, phi) + state.a[1][s].commutator(&p10[s]))
            .scale(iq)
    })
}

/// max |∂₁p^{10} − j⁰| on a slice.
pub fn gauss_residual(state: &GaugeFieldState) -> Result<f64> {
    let p10 = state.p[0].scaled(-1.0);
    let rho = charge_density(state, &p10);
    Ok(central_diff(&p10, 1)?.sub(&rho).max_abs())
}

/// Solves ∂₁p^{10} = j⁰ on one slice for p^{10} with the central stencil.
///
/// The stencil couples x±1 only, so each parity cycle is an independent
/// recurrence p(x+1) = p(x−1) + 2Δρ(x) whose source must sum to zero; each
/// cycle is fixed to zero mean. For N > 1 the source contains [a₁, p^{10}],
/// handled by fixed-point iteration.
pub fn solve_gauss(state: &GaugeFieldState) -> Result<GaugeFieldState> {
    check_dynamical(state)?;
    let spec = state.spec().clone();
    let n = state.n();
    let length = spec.extent(1);
    let dx = spec.spacing(1);
    let cycles = parity_cycles(length);
    let mut p10 = state.p[0].scaled(-1.0);
    let abelian = n == 1;
    for iter in 0..GAUSS_MAX_ITER {
        let rho = charge_density(state, &p10);
        let mut next = LatticeField::filled(&spec, ComplexMatrix::zeros(n));
        for cycle in &cycles {
            let sources: Vec<ComplexMatrix> = cycle.iter().map(|&y| rho[(y + 1) % length]).collect();
            let net = sources.iter().fold(ComplexMatrix::zeros(n), |acc, m| acc + *m);
            let scale: f64 = sources.iter().map(|m| m.max_abs()).sum();
            if net.max_abs() > 1e-10 * scale.max(1e-300) && net.max_abs() > 1e-14 {
                return Err(Error::NetCharge(format!(
                    "source sums to {:.3e} over a stencil cycle of {} sites",
                    net.max_abs(),
                    cycle.len()
                )));
            }
            let mean = net.scale_re(1.0 / cycle.len() as f64);
            let mut values = Vec::with_capacity(cycle.len());
            let mut acc = ComplexMatrix::zeros(n);
            for src in &sources {
                values.push(acc);
                acc += (*src - mean).scale_re(2.0 * dx);
            }
            let offset = values
                .iter()
                .fold(ComplexMatrix::zeros(n), |a, m| a + *m)
                .scale_re(1.0 / cycle.len() as f64);
            for (&y, v) in cycle.iter().zip(&values) {
                next[y] = (*v - offset).hermitian_part();
            }
        }
        let change = next.sub(&p10).max_abs();
        p10 = next;
        if abelian || change <= GAUSS_TOL * p10.max_abs().max(1.0) {
            let mut out = state.clone();
            out.p[0] = p10.scaled(-1.0);
            return Ok(out);
        }
        if !change.is_finite() || iter + 1 == GAUSS_MAX_ITER {
            break;
        }
    }
    Err(Error::GaussDivergence(GAUSS_MAX_ITER))
}

/// Site cycles y → y+2 (mod L) of the central stencil.
fn parity_cycles(length: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; length];
    let mut cycles = Vec::new();
    for start in 0..length {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut y = start;
        while !seen[y] {
            seen[y] = true;
            cycle.push(y);
            y = (y + 2) % length;
        }
        cycles.push(cycle);
    }
    cycles
}

/// Σ(|π⁰|² + |π¹|² + m²|φ|² + ½tr p^{01}p^{01}) Δx over a slice.
pub fn canonical_energy(state: &GaugeFieldState) -> f64 {
    let m2 = state.params().m.powi(2);
    let sum: f64 = (0..state.spec().sites())
        .map(|s| {
            let p = state.p[0][s];
            state.pi[0][s].norm_sqr()
                + state.pi[1][s].norm_sqr()
                + m2 * state.phi[s].norm_sqr()
                + 0.5 * (p * p).trace().re
        })
        .sum();
    sum * state.spec().spatial_cell_volume()
}

struct Forces {
    pi0: VectorLatticeField,
    p01: MatrixLatticeField,
}

fn forces(state: &GaugeFieldState, pi1: &VectorLatticeField) -> Result<Forces> {
    let m2 = state.params().m.powi(2);
    let iq = state.params().iq();
    let dpi1 = central_diff(pi1, 1)?;
    let spec = state.spec();
    let pi0 = LatticeField::from_fn(spec, |s| {
        state.a[1][s].mul_vec(&pi1[s]).scale(iq) - state.phi[s].scale(m2.into()) - dpi1[s]
    });
    let p01 = LatticeField::from_fn(spec, |s| {
        (ComplexVector::outer_conj(&state.phi[s], &pi1[s]) - ComplexVector::outer_conj(&pi1[s], &state.phi[s]))
            .scale(iq)
    });
    Ok(Forces { pi0, p01 })
}

fn kick(state: &mut GaugeFieldState, f: &Forces, h: f64) {
    for s in 0..state.spec().sites() {
        state.pi[0][s] += f.pi0[s].scale(h.into());
        state.p[0][s] += f.p01[s].scale_re(h);
    }
}

/// One kick-drift-kick step of the matrix-valued equations; π¹ is rebuilt.
pub fn step(state: &GaugeFieldState, dt: f64) -> Result<GaugeFieldState> {
    check_dynamical(state)?;
    check_cfl(state.spec(), dt)?;
    let mut s = state.clone();
    let pi1 = spatial_pi(&s)?;
    let f = forces(&s, &pi1)?;
    kick(&mut s, &f, 0.5 * dt);
    for site in 0..s.spec().sites() {
        let v = s.pi[0][site].scale(dt.into());
        s.phi[site] += v;
        let e = s.p[0][site].scale_re(dt);
        s.a[1][site] -= e;
    }
    let pi1 = spatial_pi(&s)?;
    let f = forces(&s, &pi1)?;
    kick(&mut s, &f, 0.5 * dt);
    s.pi[1] = pi1;
    Ok(s)
}

/// The same step for N = 1 with plain complex and real scalars.
pub fn step_u1(state: &GaugeFieldState, dt: f64) -> Result<GaugeFieldState> {
    check_dynamical(state)?;
    check_cfl(state.spec(), dt)?;
    if state.n() != 1 {
        return Err(Error::RequiresAbelian(state.n()));
    }
    let spec = state.spec();
    let len = spec.sites();
    let dx = spec.spacing(1);
    let q = state.params().q;
    let m2 = state.params().m.powi(2);
    let iq = Complex64::new(0.0, q);
    let mut phi: Vec<Complex64> = state.phi.values().iter().map(|v| v[0]).collect();
    let mut pi0: Vec<Complex64> = state.pi[0].values().iter().map(|v| v[0]).collect();
    let mut a1: Vec<f64> = state.a[1].values().iter().map(|m| m[(0, 0)].re).collect();
    let mut p01: Vec<f64> = state.p[0].values().iter().map(|m| m[(0, 0)].re).collect();
    let up = |x: usize| (x + 1) % len;
    let down = |x: usize| (x + len - 1) % len;

    let rebuild = |phi: &[Complex64], a1: &[f64]| -> Vec<Complex64> {
        (0..len)
            .map(|x| -((phi[up(x)] - phi[down(x)]) / (2.0 * dx) - iq * a1[x] * phi[x]))
            .collect()
    };
    let kick = |phi: &[Complex64], a1: &[f64], pi1: &[Complex64], pi0: &mut [Complex64], p01: &mut [f64], h: f64| {
        for x in 0..len {
            let flux = (pi1[up(x)] - pi1[down(x)]) / (2.0 * dx);
            pi0[x] += h * (iq * a1[x] * pi1[x] - m2 * phi[x] - flux);
            p01[x] += h * (iq * (phi[x] * pi1[x].conj() - pi1[x] * phi[x].conj())).re;
        }
    };

    let pi1 = rebuild(&phi, &a1);
    kick(&phi, &a1, &pi1, &mut pi0, &mut p01, 0.5 * dt);
    for x in 0..len {
        phi[x] += dt * pi0[x];
        a1[x] -= dt * p01[x];
    }
    let pi1 = rebuild(&phi, &a1);
    kick(&phi, &a1, &pi1, &mut pi0, &mut p01, 0.5 * dt);

    let mut out = state.clone();
    let scalar = |z: Complex64| ComplexVector::from_slice(&[z]);
    let real = |r: f64| ComplexMatrix::scalar(1, r.into());
    for x in 0..len {
        out.phi[x] = scalar(phi[x]);
        out.pi[0][x] = scalar(pi0[x]);
        out.pi[1][x] = scalar(pi1[x]);
        out.a[1][x] = real(a1[x]);
        out.p[0][x] = real(p01[x]);
    }
    Ok(out)
}

/// Which implementation of the equations of motion to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepPath {
    Matrix,
    Abelian,
}

fn step_with(state: &GaugeFieldState, dt: f64, path: StepPath) -> Result<GaugeFieldState> {
    match path {
        StepPath::Matrix => step(state, dt),
        StepPath::Abelian => step_u1(state, dt),
    }
}

fn ensure_finite(state: &GaugeFieldState, step: usize) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            step,
            what: "field values after leapfrog update".into(),
        })
    }
}

/// Diagnostics for the middle of three consecutive slices.
fn diagnose(
    prev: &GaugeFieldState,
    cur: &GaugeFieldState,
    next: &GaugeFieldState,
    dt: f64,
    step: usize,
    charge0: &ComplexMatrix,
    charge_scale: f64,
) -> Result<DiagnosticsRecord> {
    let stack = GaugeFieldState::stack(&[prev, cur, next], dt)?;
    let middle = stack.spec().slice_sites(1);
    let div = divergence(&sun_gauge_current(&stack))?;
    let noether = div.values()[middle.clone()]
        .iter()
        .map(|m| m.max_abs())
        .fold(0.0, f64::max);
    let residual = maxwell_residual(&stack)?;
    let maxwell = residual
        .components
        .iter()
        .flat_map(|c| c.values()[middle.clone()].iter())
        .map(|m| m.max_abs())
        .fold(0.0, f64::max);
    let charge = total_charge(&sun_gauge_current(cur), 0)?;
    let drift = (charge - *charge0).max_abs();
    Ok(DiagnosticsRecord {
        step,
        time: step as f64 * dt,
        energy: canonical_energy(cur),
        ddw_hamiltonian: eval_ym(cur).integrate_slice(0)?,
        charge_trace: charge.trace().re,
        charge_drift: if charge_scale > 0.0 {
            drift / charge_scale
        } else {
            drift
        },
        gauss_residual: gauss_residual(cur)?,
        maxwell_residual: maxwell,
        noether_divergence: noether,
    })
}

/// Charge scale for relative drift: max(|Q(0)|, Σ|j⁰|Δx).
fn charge_reference(state: &GaugeFieldState) -> Result<(ComplexMatrix, f64)> {
    let j = sun_gauge_current(state);
    let q0 = total_charge(&j, 0)?;
    let absolute: f64 =
        j.components[0].values().iter().map(|m| m.max_abs()).sum::<f64>() * state.spec().spatial_cell_volume();
    Ok((q0, q0.max_abs().max(absolute)))
}

pub fn evolve(state: &GaugeFieldState, cfg: &EvolutionConfig) -> Result<(GaugeFieldState, Vec<DiagnosticsRecord>)> {
    evolve_with(state, cfg, StepPath::Matrix)
}

/// Runs `cfg.n_steps` steps and records diagnostics at the cadence.
///
/// Time derivatives in the diagnostics use the neighbouring slices, so one
/// step before the start (backwards) and one after the end are taken too.
pub fn evolve_with(
    state: &GaugeFieldState,
    cfg: &EvolutionConfig,
    path: StepPath,
) -> Result<(GaugeFieldState, Vec<DiagnosticsRecord>)> {
    check_dynamical(state)?;
    cfg.validate(state.spec())?;
    let mut cur = state.clone();
    cur.pi[1] = spatial_pi(&cur)?;
    let (charge0, scale) = charge_reference(&cur)?;
    let mut prev = step_with(&cur, -cfg.dt, path)?;
    ensure_finite(&prev, 0)?;
    let mut records = Vec::new();
    for n in 0..=cfg.n_steps {
        let next = step_with(&cur, cfg.dt, path)?;
        ensure_finite(&next, n + 1)?;
        if n % cfg.cadence == 0 || n == cfg.n_steps {
            let rec = diagnose(&prev, &cur, &next, cfg.dt, n, &charge0, scale)?;
            if !rec.is_finite() {
                return Err(Error::NonFinite {
                    step: n,
                    what: "diagnostics".into(),
                });
            }
            records.push(rec);
        }
        if n == cfg.n_steps {
            break;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok((cur, records))
}

/// Outcome of running the matrix and scalar paths side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionReport {
    pub steps: usize,
    pub max_deviation: f64,
}

/// Evolves an N = 1 state with both implementations and tracks their largest difference.
pub fn reduce_to_u1(state: &GaugeFieldState, cfg: &EvolutionConfig) -> Result<ReductionReport> {
    if state.n() != 1 {
        return Err(Error::Mismatch(format!(
            "reduction needs N = 1, state has N = {}",
            state.n()
        )));
    }
    cfg.validate(state.spec())?;
    let mut matrix = state.clone();
    let mut scalar = state.clone();
    let mut worst: f64 = 0.0;
    for n in 0..cfg.n_steps {
        matrix = step(&matrix, cfg.dt)?;
        scalar = step_u1(&scalar, cfg.dt)?;
        ensure_finite(&matrix, n + 1)?;
        worst = worst.max(matrix.max_deviation(&scalar));
    }
    Ok(ReductionReport {
        steps: cfg.n_steps,
        max_deviation: worst,
    })
}

/// Measured and predicted angular frequency of a free plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionReport {
    pub k: f64,
    pub measured: f64,
    /// Leapfrog in time on the central spatial stencil:
    /// sin(ω dt/2) = (dt/2)√(m² + sin²(kΔ)/Δ²).
    pub discrete: f64,
    /// √(k² + m²).
    pub continuum: f64,
}

impl DispersionReport {
    /// |ω² − (k² + m²)| / Δ², stable under refinement if the error is O(Δ²).
    pub fn continuum_constant(&self, spacing: f64) -> f64 {
        (self.measured.powi(2) - self.continuum.powi(2)).abs() / spacing.powi(2)
    }
}

pub fn discrete_frequency(k: f64, m: f64, spacing: f64, dt: f64) -> f64 {
    let semi = (m * m + (k * spacing).sin().powi(2) / spacing.powi(2)).sqrt();
    2.0 / dt * (0.5 * dt * semi).asin()
}

/// Evolves a q = 0 plane wave and reads off ω from cos(ω dt) = ⟨φ_n, φ_{n+1} + φ_{n−1}⟩ / 2⟨φ_n, φ_n⟩.
pub fn measure_dispersion(
    extent: usize,
    spacing: f64,
    dt: f64,
    m: f64,
    mode: i64,
    n_steps: usize,
) -> Result<DispersionReport> {
    let spec = LatticeSpec::time_slice(&[extent], &[spacing], dt)?;
    let mut state = GaugeFieldState::new(&spec, &ModelParams::new(1, 0.0, m)?)?;
    state.seed_plane_wave(&[mode], 1.0, SeedTarget::Matter { component: 0 })?;
    let mut history = vec![state.phi.clone()];
    for n in 0..n_steps.max(2) {
        state = step(&state, dt)?;
        ensure_finite(&state, n + 1)?;
        history.push(state.phi.clone());
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for w in history.windows(3) {
        for s in 0..spec.sites() {
            let sum = w[0][s] + w[2][s];
            num += w[1][s].dot(&sum).re;
            den += 2.0 * w[1][s].norm_sqr();
        }
    }
    let measured = (num / den).clamp(-1.0, 1.0).acos() / dt;
    let k = 2.0 * std::f64::consts::PI * mode as f64 / spec.length(1);
    Ok(DispersionReport {
        k,
        measured,
        discrete: discrete_frequency(k, m, spacing, dt),
        continuum: (k * k + m * m).sqrt(),
    })
}

/// Coupled U(1) initial slice: a particle wave in mode `modes.0` plus an
/// antiparticle wave in mode `modes.1`, amplitudes chosen for zero net
/// charge, a smooth a₁ background, and p^{01} from the Gauss constraint.
pub fn u1_pair_initial(
    extent: usize,
    spacing: f64,
    dt: f64,
    params: &ModelParams,
    amplitude: f64,
    modes: (i64, i64),
    background: f64,
) -> Result<GaugeFieldState> {
    if params.n != 1 {
        return Err(Error::RequiresAbelian(params.n));
    }
    if modes.0 == modes.1 {
        return Err(Error::Mismatch("particle and antiparticle modes must differ".into()));
    }
    let spec = LatticeSpec::time_slice(&[extent], &[spacing], dt)?;
    let mut state = GaugeFieldState::new(&spec, params)?;
    let length = spec.length(1);
    let k = |n: i64| 2.0 * std::f64::consts::PI * n as f64 / length;
    let omega = |n: i64| (k(n).powi(2) + params.m.powi(2)).sqrt();
    let (w1, w2) = (omega(modes.0), omega(modes.1));
    let b = amplitude * (w1 / w2).sqrt();
    for s in 0..spec.sites() {
        let x = spec.position(s)[1];
        let particle = Complex64::from_polar(amplitude, k(modes.0) * x);
        let anti = Complex64::from_polar(b, k(modes.1) * x);
        state.phi[s][0] = particle + anti;
        state.pi[0][s][0] = Complex64::new(0.0, -w1) * particle + Complex64::new(0.0, w2) * anti;
        let bg = background * ((k(1) * x).cos() + 0.5 * (k(2) * x).sin());
        state.a[1][s] = ComplexMatrix::scalar(1, bg.into());
    }
    state.pi[1] = spatial_pi(&state)?;
    solve_gauss(&state)
}

/// SU(N) initial slice: smooth matter at rest (π⁰ = 0), p = 0 and a smooth
/// non-commuting a₁; the Gauss constraint then holds with p^{01} = 0.
pub fn sun_background_initial(
    extent: usize,
    spacing: f64,
    dt: f64,
    params: &ModelParams,
    amplitude: f64,
    seed_series: &[FourierSeries],
) -> Result<GaugeFieldState> {
    let spec = LatticeSpec::time_slice(&[extent], &[spacing], dt)?;
    let n = params.n;
    let mut state = GaugeFieldState::new(&spec, params)?;
    let basis = generator_basis(n, false);
    let lengths = FourierSeries::lengths(&spec);
    let length = spec.length(1);
    for s in 0..spec.sites() {
        let x = spec.position(s);
        for j in 0..n {
            let kx = 2.0 * std::f64::consts::PI * (j + 1) as f64 * x[1] / length;
            state.phi[s][j] = Complex64::from_polar(amplitude, kx);
        }
        let mut a = ComplexMatrix::zeros(n);
        for (t, f) in basis.iter().zip(seed_series.iter().cycle()) {
            a += t.scale_re(f.value(&x, &lengths).re);
        }
        state.a[1][s] = a;
    }
    state.pi[1] = spatial_pi(&state)?;
    solve_gauss(&state)
}

/// Deterministic smooth a₁ profiles for [`sun_background_initial`]: one low
/// mode per generator, with amplitude `amplitude`.
pub fn default_background_series(n: usize, amplitude: f64) -> Vec<FourierSeries> {
    (0..generator_basis(n, false).len().max(1))
        .map(|g| {
            let mode = 1 + (g % 2) as i64;
            let phase = Complex64::from_polar(amplitude, 0.7 * g as f64);
            FourierSeries::new(2, vec![([0, mode, 0, 0], phase)])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{apply_u1, U1GaugeFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn full(extent: usize, spacing: f64, params: &ModelParams) -> GaugeFieldState {
        GaugeFieldState::new(&LatticeSpec::uniform(2, extent, spacing).unwrap(), params).unwrap()
    }

    #[test]
    fn covariant_momentum_examples() {
        let params = ModelParams::new(1, 0.7, 1.0).unwrap();
        let mut s = full(16, 0.25, &params);
        for site in 0..s.spec().sites() {
            s.phi[site][0] = c(0.3, -0.2);
        }
        assert_eq!(covariant_momenta(&s).unwrap()[1].max_abs(), 0.0);

        let free = ModelParams::new(1, 0.0, 1.0).unwrap();
        let mut w = full(16, 0.25, &free);
        w.seed_plane_wave(&[1], 0.5, SeedTarget::Matter { component: 0 })
            .unwrap();
        let pi = covariant_momenta(&w).unwrap();
        let dphi = central_diff(&w.phi, 1).unwrap();
        assert_eq!(pi[1].add(&dphi).max_abs(), 0.0);

        let mut errs = Vec::new();
        for extent in [32, 64] {
            let spacing = 8.0 / extent as f64;
            let spec = LatticeSpec::uniform(2, extent, spacing).unwrap();
            let mut s = GaugeFieldState::new(&spec, &params).unwrap();
            let k = 2.0 * std::f64::consts::PI / spec.length(1);
            let cst = 0.4;
            for site in 0..spec.sites() {
                s.phi[site][0] = Complex64::from_polar(1.0, k * spec.position(site)[1]);
                s.a[1][site] = ComplexMatrix::scalar(1, c(cst, 0.0));
            }
            let pi = covariant_momentum(&s, 1).unwrap();
            // π₁ = (ik − iqc)φ, raised with g¹¹ = −1.
            let err = (0..spec.sites())
                .map(|site| (pi[site][0] + c(0.0, k - 0.7 * cst) * s.phi[site][0]).norm())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!((errs[0] / errs[1]).log2() > 1.8);
    }

    #[test]
    fn field_strength_examples() {
        let params = ModelParams::new(1, 1.0, 1.0).unwrap();
        let mut s = full(8, 0.25, &params);
        for f in s.a.iter_mut() {
            *f = LatticeField::filled(f.spec(), ComplexMatrix::scalar(1, c(0.8, 0.0)));
        }
        let fs = field_strength_parts(&s).unwrap();
        assert_eq!(fs.total()[0].max_abs(), 0.0);
        assert_eq!(fs.commutator[0].max_abs(), 0.0);

        let q = 0.6;
        let mut s = full(8, 0.25, &ModelParams::new(2, q, 1.0).unwrap());
        let a0 = ComplexMatrix::from_row_major(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let a1 = ComplexMatrix::from_row_major(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        s.a[0] = LatticeField::filled(s.spec(), a0);
        s.a[1] = LatticeField::filled(s.spec(), a1);
        let p = field_strength(&s).unwrap();
        // [a₀, a₁] = [[0,−2],[2,0]] by hand; p_{01} = −iq[a₀, a₁] and p^{01} = −p_{01}.
        let comm = ComplexMatrix::from_row_major(&[c(0.0, 0.0), c(-2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        let expected_upper = comm.scale(c(0.0, q));
        assert!((p[0][5] - expected_upper).max_abs() < 1e-15);
        assert!(p[0][5].max_abs() > 0.0);

        let mut lin = full(8, 0.25, &params);
        let cst = 0.3;
        for site in 0..lin.spec().sites() {
            lin.a[1][site] = ComplexMatrix::scalar(1, c(cst * lin.spec().position(site)[0], 0.0));
        }
        let p = field_strength(&lin).unwrap();
        for t in 1..7 {
            let site = lin.spec().site(&[t, 3]);
            // p_{01} = ∂₀a₁ = c, so p^{01} = −c.
            assert!((p[0][site][(0, 0)] + c(cst, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn gauss_solver_examples() {
        let params = ModelParams::new(1, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::time_slice(&[16], &[0.25], 0.1).unwrap();
        let zero = GaugeFieldState::new(&spec, &params).unwrap();
        let solved = solve_gauss(&zero).unwrap();
        assert_eq!(solved.p[0].max_abs(), 0.0);

        // π⁰ = iφ gives j⁰ = iq(π̄⁰φ − φ̄π⁰) = 2q|φ|², so a uniform φ is a uniform charge.
        let mut uniform = zero.clone();
        for site in 0..spec.sites() {
            uniform.phi[site][0] = c(1.0, 0.0);
            uniform.pi[0][site][0] = c(0.0, 1.0);
        }
        let err = solve_gauss(&uniform).unwrap_err();
        assert!(err.to_string().contains("net charge on periodic lattice"));
    }

    #[test]
    fn gauss_solver_matches_cumulative_sum_for_dipole() {
        let params = ModelParams::new(1, 0.5, 1.0).unwrap();
        let spec = LatticeSpec::time_slice(&[16], &[0.25], 0.1).unwrap();
        let mut s = GaugeFieldState::new(&spec, &params).unwrap();
        // +ρ at x = 3 and −ρ at x = 9 (same parity cycle of the stencil's sources).
        for (x, sign) in [(3usize, 1.0), (9, -1.0)] {
            s.phi[x][0] = c(1.0, 0.0);
            s.pi[0][x][0] = c(0.0, sign);
        }
        let solved = solve_gauss(&s).unwrap();
        assert!(gauss_residual(&solved).unwrap() < 1e-10);
        let p10: Vec<f64> = (0..16).map(|x| -solved.p[0][x][(0, 0)].re).collect();
        // Cumulative-sum oracle on the even sublattice: p(x+1) − p(x−1) = 2Δρ(x).
        let rho = 2.0 * 0.5;
        let jump = 2.0 * 0.25 * rho;
        let mut profile = [0.0; 8];
        for (i, v) in profile.iter_mut().enumerate() {
            let y = 2 * i;
            *v = if (4..10).contains(&y) { jump } else { 0.0 };
        }
        let mean = profile.iter().sum::<f64>() / 8.0;
        for i in 0..8 {
            assert!((p10[2 * i] - (profile[i] - mean)).abs() < 1e-14);
            assert!(p10[2 * i + 1].abs() < 1e-14);
        }
    }

    #[test]
    fn sun_gauss_solver_converges_with_self_term() {
        let params = ModelParams::new(2, 0.5, 1.0).unwrap();
        let spec = LatticeSpec::time_slice(&[32], &[0.25], 0.1).unwrap();
        let mut s = GaugeFieldState::new(&spec, &params).unwrap();
        let basis = generator_basis(2, false);
        for site in 0..spec.sites() {
            let x = spec.position(site)[1];
            let k = 2.0 * std::f64::consts::PI / spec.length(1);
            s.phi[site] = ComplexVector::from_slice(&[Complex64::from_polar(0.1, k * x), c(0.05, 0.0)]);
            s.pi[0][site] = ComplexVector::from_slice(&[Complex64::from_polar(0.1, 3.0 * k * x), c(0.0, 0.0)]);
            s.a[1][site] = basis[0].scale_re(0.2 * (k * x).cos()) + basis[2].scale_re(0.1);
        }
        let solved = solve_gauss(&s).unwrap();
        assert!(gauss_residual(&solved).unwrap() < 1e-10);
        assert!(solved.max_hermiticity_defect() < 1e-14);
        let fs = (0..spec.sites())
            .map(|x| s.a[1][x].commutator(&solved.p[0][x]).max_abs())
            .fold(0.0, f64::max);
        assert!(fs > 0.0, "self-term should be exercised");
    }

    #[test]
    fn cfl_and_gauge_preconditions() {
        let params = ModelParams::new(1, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::time_slice(&[16], &[0.25], 0.1).unwrap();
        let s = GaugeFieldState::new(&spec, &params).unwrap();
        let err = step(&s, 0.2).unwrap_err();
        assert!(matches!(err, Error::Cfl { bound, .. } if (bound - 0.125).abs() < 1e-15));
        let mut bad = s.clone();
        bad.a[0][0] = ComplexMatrix::scalar(1, c(0.1, 0.0));
        assert!(matches!(step(&bad, 0.1), Err(Error::UnsupportedDynamics(_))));
        assert!(matches!(
            step(&full(8, 0.25, &params), 0.1),
            Err(Error::UnsupportedDynamics(_))
        ));
        assert!(EvolutionConfig::new(0.1, 10, 0).validate(&spec).is_err());
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let spec = LatticeSpec::time_slice(&[16], &[0.25], 0.1).unwrap();
        let s = GaugeFieldState::new(&spec, &ModelParams::new(2, 1.0, 1.0).unwrap()).unwrap();
        let (end, records) = evolve(&s, &EvolutionConfig::new(0.1, 100, 10)).unwrap();
        assert_eq!(end.max_abs(), 0.0);
        assert_eq!(records.len(), 11);
        for r in &records {
            assert_eq!(r.energy, 0.0);
            assert_eq!(
                r.noether_divergence + r.gauss_residual + r.maxwell_residual + r.charge_drift,
                0.0
            );
        }
    }

    #[test]
    fn leapfrog_is_reversible() {
        let spec = LatticeSpec::time_slice(&[32], &[0.25], 0.1).unwrap();
        let params = ModelParams::new(2, 0.5, 1.0).unwrap();
        let mut s = GaugeFieldState::smooth_random(&spec, &params, 0.2, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        s.a[0] = s.a[0].map(|m| m.scale_re(0.0));
        s.pi[1] = spatial_pi(&s).unwrap();
        let mut t = s.clone();
        for _ in 0..100 {
            t = step(&t, 0.1).unwrap();
        }
        for _ in 0..100 {
            t = step(&t, -0.1).unwrap();
        }
        assert!(t.max_deviation(&s) < 1e-8 * s.max_abs().max(1.0));
        assert!(t.max_hermiticity_defect() < 1e-10);
    }

    #[test]
    fn free_wave_energy_drift_is_second_order() {
        let mut drifts = Vec::new();
        for (extent, spacing) in [(64, 0.25), (128, 0.125)] {
            let dt = 0.4 * spacing;
            let spec = LatticeSpec::time_slice(&[extent], &[spacing], dt).unwrap();
            let mut s = GaugeFieldState::new(&spec, &ModelParams::new(1, 0.0, 1.0).unwrap()).unwrap();
            s.seed_plane_wave(&[3], 0.5, SeedTarget::Matter { component: 0 })
                .unwrap();
            s.seed_plane_wave(&[0], 0.0, SeedTarget::Matter { component: 0 })
                .unwrap();
            let mut standing = s.clone();
            standing
                .seed_plane_wave(&[-3], 0.5, SeedTarget::Matter { component: 0 })
                .unwrap();
            for site in 0..spec.sites() {
                standing.phi[site] += s.phi[site];
                standing.pi[0][site] += s.pi[0][site];
            }
            let omega = (1.0f64 + (2.0 * std::f64::consts::PI * 3.0 / 16.0).powi(2)).sqrt();
            let steps = (10.0 * 2.0 * std::f64::consts::PI / omega / dt).round() as usize;
            let (_, rec) = evolve(&standing, &EvolutionConfig::new(dt, steps, 1)).unwrap();
            let e0 = rec[0].energy;
            let drift = rec.iter().map(|r| (r.energy - e0).abs() / e0).fold(0.0, f64::max);
            drifts.push(drift);
        }
        assert!(drifts[0] < 1e-3, "{drifts:?}");
        assert!(drifts[0] / drifts[1] > 3.4, "{drifts:?}");
    }

    #[test]
    fn dispersion_matches_discrete_relation() {
        let coarse = measure_dispersion(64, 0.25, 0.1, 1.0, 4, 200).unwrap();
        assert!((coarse.measured - coarse.discrete).abs() < 1e-6 * coarse.discrete);
        let fine = measure_dispersion(128, 0.125, 0.05, 1.0, 4, 400).unwrap();
        let (c1, c2) = (coarse.continuum_constant(0.25), fine.continuum_constant(0.125));
        assert!((c1 - c2).abs() / c1 < 0.1, "{c1} vs {c2}");
    }

    #[test]
    fn paths_agree_for_abelian_runs() {
        let params = ModelParams::new(1, 0.5, 1.0).unwrap();
        let spec = LatticeSpec::time_slice(&[32], &[0.25], 0.1).unwrap();
        let zero = GaugeFieldState::new(&spec, &params).unwrap();
        let cfg = EvolutionConfig::new(0.1, 100, 1);
        assert_eq!(reduce_to_u1(&zero, &cfg).unwrap().max_deviation, 0.0);

        let mut wave = GaugeFieldState::new(&spec, &params).unwrap();
        wave.seed_plane_wave(&[2], 0.1, SeedTarget::Matter { component: 0 })
            .unwrap();
        assert!(reduce_to_u1(&wave, &cfg).unwrap().max_deviation < 1e-12);

        let coupled = u1_pair_initial(32, 0.25, 0.1, &params, 0.1, (2, -3), 0.2).unwrap();
        assert!(reduce_to_u1(&coupled, &cfg).unwrap().max_deviation < 1e-10);
    }

    #[test]
    fn pair_initial_data_is_neutral_and_gauss_consistent() {
        let params = ModelParams::new(1, 0.5, 1.0).unwrap();
        let s = u1_pair_initial(64, 0.25, 0.1, &params, 0.1, (2, -3), 0.2).unwrap();
        assert!(gauss_residual(&s).unwrap() < 1e-10);
        let q = total_charge(&sun_gauge_current(&s), 0).unwrap();
        assert!(q.max_abs() < 1e-14);
    }

    #[test]
    fn time_independent_gauge_transformations_commute_with_evolution() {
        let params = ModelParams::new(1, 0.5, 1.0).unwrap();
        let mut devs = Vec::new();
        for (extent, spacing) in [(64, 0.25), (128, 0.125)] {
            let dt = 0.4 * spacing;
            let s = u1_pair_initial(extent, spacing, dt, &params, 0.1, (2, -3), 0.2).unwrap();
            let series = FourierSeries::new(2, vec![([0, 1, 0, 0], c(0.4, 0.3))]);
            let gf = U1GaugeFunction::from_series(s.spec(), &series).discretized();
            let steps = (2.0 / dt).round() as usize;
            let cfg = EvolutionConfig::new(dt, steps, steps);
            let (direct, _) = evolve(&s, &cfg).unwrap();
            let (moved, _) = evolve(&apply_u1(&s, &gf).unwrap(), &cfg).unwrap();
            let back = apply_u1(&moved, &gf.scaled(-1.0)).unwrap();
            devs.push(back.max_deviation(&direct));
        }
        assert!((devs[0] / devs[1]).log2() > 1.8, "{devs:?}");
    }
}
