//! Command-line front end for the gauge-noether engine.
//!
//! Every command returns a [`Report`]; [`Outcome::exit_code`] maps it onto
//! the exit-code contract (0 pass, 1 usage or config error, 2 numerical failure).

pub mod config;

use std::fs;
use std::path::Path;

use gauge_noether::diagnostics::{max_of, write_csv, DiagnosticsRecord};
use gauge_noether::dynamics::{
    evolve, measure_dispersion, reduce_to_u1, step, sun_background_initial, u1_pair_initial, EvolutionConfig,
};
use gauge_noether::gauge::{
    apply, check_form_invariance, delta_h_explicit, GaugeFunction, SUNGaugeFunction, U1GaugeFunction,
};
use gauge_noether::hamiltonian::{eval_kgm, eval_ym};
use gauge_noether::noether::onshell_decomposition;
use gauge_noether::smooth::FourierSeries;
use gauge_noether::tensor::generator_basis;
use gauge_noether::{snapshot, Error, GaugeFieldState, LatticeSpec, ModelParams, SeedTarget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use config::{ConfigError, GaugeKind, InitialKind, Model, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const ORDER_MIN: f64 = 1.8;
/// Residuals this small at both resolutions are rounding, not discretization error.
const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub pass: bool,
}

#[derive(Debug)]
pub enum Outcome {
    Done(Report),
    Usage(String),
    Numerical(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Done(r) if r.pass => EXIT_PASS,
            Outcome::Done(_) | Outcome::Numerical(_) => EXIT_NUMERICAL,
            Outcome::Usage(_) => EXIT_USAGE,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::GaussDivergence(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<Report, Failure>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    CheckInvariance,
    CheckNoether,
    ReduceU1,
    Dispersion,
}

/// Validates the configuration and runs one command.
pub fn run(command: Command, cfg: &RunConfig) -> Outcome {
    let result = cfg.validate().map_err(Failure::from).and_then(|()| match command {
        Command::Simulate => simulate(cfg),
        Command::CheckInvariance => check_invariance(cfg),
        Command::CheckNoether => check_noether(cfg),
        Command::ReduceU1 => reduce_u1(cfg),
        Command::Dispersion => dispersion(cfg),
    });
    match result {
        Ok(mut report) => {
            let mut lines: Vec<String> = cfg.echo().lines().map(|l| format!("# {l}")).collect();
            lines.append(&mut report.lines);
            report.lines = lines;
            Outcome::Done(report)
        }
        Err(Failure::Usage(m)) => Outcome::Usage(m),
        Err(Failure::Numerical(m)) => Outcome::Numerical(m),
    }
}

fn params(cfg: &RunConfig) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(cfg.n, cfg.q, cfg.m)?)
}

fn order(coarse: f64, fine: f64, refine: usize) -> f64 {
    (coarse / fine).ln() / (refine as f64).ln()
}

/// Converges at the required order, or is rounding at both resolutions.
fn converges(coarse: f64, fine: f64, refine: usize) -> bool {
    (coarse <= ROUNDING && fine <= ROUNDING) || order(coarse, fine, refine) >= ORDER_MIN
}

fn fmt_order(coarse: f64, fine: f64, refine: usize) -> String {
    if coarse <= ROUNDING && fine <= ROUNDING {
        "rounding".into()
    } else {
        format!("{:.3}", order(coarse, fine, refine))
    }
}

/// Resolution `level` (1 or the refine factor): sites, spacing and dt scaled together.
struct Resolution {
    sites: usize,
    spacing: f64,
    dt: f64,
    steps: usize,
    cadence: usize,
}

fn resolution(cfg: &RunConfig, level: usize) -> Resolution {
    Resolution {
        sites: cfg.lattice.sites * level,
        spacing: cfg.lattice.spacing / level as f64,
        dt: cfg.evolution.dt / level as f64,
        steps: cfg.evolution.steps * level,
        cadence: cfg.evolution.cadence * level,
    }
}

fn initial_slice(cfg: &RunConfig, r: &Resolution) -> Result<GaugeFieldState, Failure> {
    let params = params(cfg)?;
    let init = &cfg.initial;
    let state = match init.kind {
        InitialKind::Zero => GaugeFieldState::new(&LatticeSpec::time_slice(&[r.sites], &[r.spacing], r.dt)?, &params)?,
        InitialKind::FreeWave => {
            let spec = LatticeSpec::time_slice(&[r.sites], &[r.spacing], r.dt)?;
            let mut s = GaugeFieldState::new(&spec, &params)?;
            s.seed_plane_wave(&[init.modes[0]], init.amplitude, SeedTarget::Matter { component: 0 })?;
            s
        }
        InitialKind::Pair => u1_pair_initial(
            r.sites,
            r.spacing,
            r.dt,
            &params,
            init.amplitude,
            (init.modes[0], init.modes[1]),
            init.background,
        )?,
        InitialKind::Background => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let count = generator_basis(cfg.n, false).len().max(1);
            let series: Vec<FourierSeries> = (0..count)
                .map(|_| FourierSeries::random(2, 2, init.background, &[false, true, false, false], &mut rng))
                .collect();
            sun_background_initial(r.sites, r.spacing, r.dt, &params, init.amplitude, &series)?
        }
    };
    Ok(state)
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

fn simulate(cfg: &RunConfig) -> CmdResult {
    let r = resolution(cfg, 1);
    let initial = initial_slice(cfg, &r)?;
    let (last, records) = evolve(&initial, &EvolutionConfig::new(r.dt, r.steps, r.cadence))?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let csv_path = dir.join(&cfg.output.csv);
    let file = fs::File::create(&csv_path).map_err(|e| io_failure(&csv_path, e))?;
    write_csv(std::io::BufWriter::new(file), &records).map_err(|e| io_failure(&csv_path, e))?;
    let mut lines = vec![format!("wrote {} rows to {}", records.len(), csv_path.display())];
    if let Some(name) = &cfg.output.snapshot {
        let path = dir.join(name);
        snapshot::write(&last, &path)?;
        lines.push(format!("wrote final snapshot to {}", path.display()));
    }
    let e0 = records[0].energy;
    let drift = max_of(&records, |x| (x.energy - e0).abs()) / if e0 != 0.0 { e0.abs() } else { 1.0 };
    lines.push(format!("energy drift (relative) {drift:.3e}"));
    lines.push(format!(
        "max gauss residual {:.3e}",
        max_of(&records, |x| x.gauss_residual)
    ));
    lines.push(format!(
        "max noether divergence {:.3e}",
        max_of(&records, |x| x.noether_divergence)
    ));
    Ok(Report { lines, pass: true })
}

fn gauge_function(cfg: &RunConfig, spec: &LatticeSpec, index: usize) -> Result<GaugeFunction, Failure> {
    let amp = cfg.checks.gauge_amplitude;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1_000_003).wrapping_add(index as u64 + 1));
    Ok(match (cfg.model, cfg.checks.gauge) {
        (Model::U1, GaugeKind::Smooth) => GaugeFunction::U1(U1GaugeFunction::smooth_random(spec, amp, &mut rng)),
        (Model::U1, GaugeKind::Constant) => {
            GaugeFunction::U1(U1GaugeFunction::constant(spec, amp * (index + 1) as f64))
        }
        (Model::Sun, GaugeKind::Smooth) => {
            GaugeFunction::SUN(SUNGaugeFunction::smooth_random(spec, cfg.n, false, amp, &mut rng)?)
        }
        (Model::Sun, GaugeKind::Constant) => {
            let basis = generator_basis(cfg.n, false);
            let h = if basis.is_empty() {
                gauge_noether::ComplexMatrix::zeros(cfg.n)
            } else {
                basis[index % basis.len()].scale_re(amp)
            };
            GaugeFunction::SUN(SUNGaugeFunction::constant(spec, &h)?)
        }
    })
}

/// Form-invariance defect; with the sign hook the transformation uses −q.
fn invariance_defect(state: &GaugeFieldState, gf: &GaugeFunction, flip: bool) -> Result<f64, Failure> {
    if !flip {
        return Ok(check_form_invariance(state, gf)?.defect);
    }
    let mut flipped = state.clone();
    let p = *state.params();
    flipped.set_params(ModelParams::new(p.n, -p.q, p.m)?)?;
    let mut transformed = apply(&flipped, &gf.discretized())?;
    transformed.set_params(p)?;
    let density = |s: &GaugeFieldState| -> Result<Vec<f64>, Failure> {
        Ok(match gf {
            GaugeFunction::U1(_) => eval_kgm(s)?.values.values().to_vec(),
            GaugeFunction::SUN(_) => eval_ym(s).values.values().to_vec(),
        })
    };
    let (h0, h1) = (density(state)?, density(&transformed)?);
    let dh = delta_h_explicit(state, gf)?;
    Ok((0..h0.len())
        .map(|s| (h1[s] - h0[s] - dh.values[s]).abs())
        .fold(0.0, f64::max))
}

fn check_invariance(cfg: &RunConfig) -> CmdResult {
    let k = cfg.checks.refine;
    let params = params(cfg)?;
    let mut states = Vec::new();
    for level in [1, k] {
        let r = resolution(cfg, level);
        let spec = LatticeSpec::uniform(2, r.sites, r.spacing)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        states.push(GaugeFieldState::smooth_random(&spec, &params, 0.3, &mut rng)?);
    }
    let mut lines = vec![format!(
        "{:>4} {:>14} {:>14} {:>8}",
        "gf", "defect_coarse", "defect_fine", "order"
    )];
    let constant = cfg.checks.gauge == GaugeKind::Constant;
    let mut pass = true;
    let mut worst_fine: f64 = 0.0;
    let mut worst_order = f64::INFINITY;
    for i in 0..cfg.checks.gauge_functions {
        let mut d = [0.0; 2];
        for (slot, s) in d.iter_mut().zip(&states) {
            *slot = invariance_defect(s, &gauge_function(cfg, s.spec(), i)?, cfg.checks.flip_coupling_sign)?;
        }
        if !d.iter().all(|v| v.is_finite()) {
            return Err(Failure::Numerical(format!("non-finite defect for gauge function {i}")));
        }
        let ord = order(d[0], d[1], k);
        worst_fine = worst_fine.max(d[1]);
        if constant {
            pass &= d[0] < 1e-10 && d[1] < 1e-10;
        } else {
            worst_order = worst_order.min(ord);
            pass &= ord >= ORDER_MIN && d[1] <= cfg.checks.defect_budget;
        }
        lines.push(format!(
            "{i:>4} {:>14.6e} {:>14.6e} {:>8}",
            d[0],
            d[1],
            fmt_order(d[0], d[1], k)
        ));
    }
    if constant {
        lines.push(format!(
            "constant gauge functions: max defect {worst_fine:.3e} (limit 1e-10)"
        ));
    } else {
        lines.push(format!(
            "min order {worst_order:.3} (limit {ORDER_MIN}), max fine defect {worst_fine:.3e} (budget {:.1e})",
            cfg.checks.defect_budget
        ));
    }
    lines.push(verdict(pass));
    Ok(Report { lines, pass })
}

fn verdict(pass: bool) -> String {
    if pass { "PASS" } else { "FAIL" }.to_string()
}

type Metric = fn(&DiagnosticsRecord) -> f64;

struct NoetherRun {
    records: Vec<DiagnosticsRecord>,
    decomposition: f64,
}

/// Evolves in eight segments and evaluates the decomposition identity on-shell after each.
fn noether_run(cfg: &RunConfig, level: usize) -> Result<NoetherRun, Failure> {
    let r = resolution(cfg, level);
    let mut state = initial_slice(cfg, &r)?;
    let segments = 8.min(r.steps.max(1));
    let per = (r.steps / segments).max(1);
    let mut records = Vec::new();
    let mut decomposition: f64 = 0.0;
    for _ in 0..segments {
        let (next, rec) = evolve(&state, &EvolutionConfig::new(r.dt, per, r.cadence))?;
        records.extend(rec);
        state = next;
        let prev = step(&state, -r.dt)?;
        let after = step(&state, r.dt)?;
        let stack = GaugeFieldState::stack(&[&prev, &state, &after], r.dt)?;
        let d = onshell_decomposition(&stack)?;
        for s in stack.spec().slice_sites(1) {
            decomposition = decomposition.max((d.direct[s] - d.decomposed[s]).max_abs());
        }
    }
    Ok(NoetherRun { records, decomposition })
}

fn check_noether(cfg: &RunConfig) -> CmdResult {
    let k = cfg.checks.refine;
    let mut lines = vec![format!(
        "{:<26} {:>14} {:>14} {:>9}",
        "quantity", "coarse", "fine", "order"
    )];
    let mut pass = true;
    let mut row = |name: &str, c: f64, f: f64, lines: &mut Vec<String>| {
        pass &= converges(c, f, k);
        lines.push(format!("{name:<26} {c:>14.6e} {f:>14.6e} {:>9}", fmt_order(c, f, k)));
    };
    if cfg.checks.algebraic_only {
        let params = params(cfg)?;
        let mut d = Vec::new();
        for level in [1, k] {
            let r = resolution(cfg, level);
            let spec = LatticeSpec::uniform(2, r.sites, r.spacing)?;
            let s = GaugeFieldState::smooth_random(&spec, &params, 0.3, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
            d.push(onshell_decomposition(&s)?.max_difference());
        }
        row("decomposition (off-shell)", d[0], d[1], &mut lines);
        lines.push("dynamical residuals skipped (--algebraic-only)".into());
    } else {
        let runs = [noether_run(cfg, 1)?, noether_run(cfg, k)?];
        let max = |i: usize, f: Metric| max_of(&runs[i].records, f);
        let quantities: [(&str, Metric); 3] = [
            ("current divergence", |x| x.noether_divergence),
            ("gauss residual", |x| x.gauss_residual),
            ("maxwell residual", |x| x.maxwell_residual),
        ];
        for (name, f) in quantities {
            row(name, max(0, f), max(1, f), &mut lines);
        }
        row(
            "decomposition (on-shell)",
            runs[0].decomposition,
            runs[1].decomposition,
            &mut lines,
        );
    }
    lines.push(verdict(pass));
    Ok(Report { lines, pass })
}

fn reduce_u1(cfg: &RunConfig) -> CmdResult {
    if cfg.n != 1 {
        return Err(Failure::Usage(format!("reduce-u1 needs n = 1, got n = {}", cfg.n)));
    }
    let r = resolution(cfg, 1);
    let state = initial_slice(cfg, &r)?;
    let report = reduce_to_u1(&state, &EvolutionConfig::new(r.dt, r.steps, r.cadence))?;
    let pass = report.max_deviation < 1e-10;
    Ok(Report {
        lines: vec![
            format!("steps {}", report.steps),
            format!(
                "max deviation matrix vs scalar path {:.3e} (limit 1e-10)",
                report.max_deviation
            ),
            verdict(pass),
        ],
        pass,
    })
}

fn dispersion(cfg: &RunConfig) -> CmdResult {
    let k = cfg.checks.refine;
    let mode = cfg.initial.modes.first().copied().unwrap_or(1);
    let mut lines = vec![
        "free field (q = 0); discrete relation sin(w dt/2) = (dt/2) sqrt(m^2 + sin^2(k dx)/dx^2)".to_string(),
        format!(
            "{:>8} {:>10} {:>18} {:>18} {:>18} {:>12}",
            "sites", "k", "w_measured", "w_discrete", "w_continuum", "C"
        ),
    ];
    let mut constants = Vec::new();
    let mut pass = true;
    for level in [1, k] {
        let r = resolution(cfg, level);
        let d = measure_dispersion(r.sites, r.spacing, r.dt, cfg.m, mode, r.steps)?;
        let c = d.continuum_constant(r.spacing);
        pass &= (d.measured - d.discrete).abs() <= 1e-6 * d.discrete;
        constants.push(c);
        lines.push(format!(
            "{:>8} {:>10.6} {:>18.12} {:>18.12} {:>18.12} {:>12.6}",
            r.sites, d.k, d.measured, d.discrete, d.continuum, c
        ));
    }
    let spread = (constants[0] - constants[1]).abs() / constants[0];
    pass &= spread < 0.1;
    lines.push(format!(
        "|w^2 - k^2 - m^2| / dx^2 changes by {:.2}% under refinement (limit 10%)",
        100.0 * spread
    ));
    lines.push(verdict(pass));
    Ok(Report { lines, pass })
}
