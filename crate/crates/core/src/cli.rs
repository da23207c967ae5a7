//! Command-line front end: flat TOML configs, the four experiments, CSV output.
//!
//! Exit codes: `0` success, `1` configuration or I/O error, `2` physics
//! precondition error surfaced from the library.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::model::{Boundary, DissipatorSpec, HamiltonianSpec};
use crate::quench::{critical_times, HighSymmetry, QuenchPlan, TransitionReport};
use crate::realspace::{
    evolve_delta, many_body_levels, spes_trace, zero_mode_diagnostics, CorrelationMatrix, Generator, SpesTrace,
};
use crate::steady::{
    phase_diagram, steady_from_generator, steady_point, Axis, CellPhase, PhaseDiagram, PhaseGrid, PhaseMethod,
    UndampedPolicy,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PHYSICS: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Steady,
    PhaseDiagram,
    Quench,
    Spectrum,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Steady => "steady",
            Experiment::PhaseDiagram => "phase-diagram",
            Experiment::Quench => "quench",
            Experiment::Spectrum => "spectrum",
        }
    }

    /// Keys required by the experiment, as shown in usage text.
    pub fn usage(self) -> &'static str {
        match self {
            Experiment::Steady => "steady: u1, u2, v1, v2 [J, delta, mu]",
            Experiment::PhaseDiagram => {
                "phase-diagram: [u1_min, u1_max, u2_min, u2_max, grid_n, v2_over_v1, J, delta, mu, method]"
            }
            Experiment::Quench => "quench: initial_u1..initial_v2, final_u1..final_v2 [t_max, dt, J, delta, mu]",
            Experiment::Spectrum => {
                "spectrum: initial_u1..initial_v2, final_u1..final_v2 [n_sites, boundary, t_max, dt, record_dt, \
                 J, delta, mu, undamped, subsystem, levels]"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryArg {
    Pbc,
    Obc,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Pbc => Boundary::Periodic,
            BoundaryArg::Obc => Boundary::Open,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMethodKey {
    #[default]
    ClosedForm,
    Direct,
}

/// Flat configuration file; one experiment per file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub n_sites: Option<usize>,
    pub boundary: Option<Boundary>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub delta: Option<f64>,
    pub mu: Option<f64>,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    pub v1: Option<f64>,
    pub v2: Option<f64>,
    pub initial_u1: Option<f64>,
    pub initial_u2: Option<f64>,
    pub initial_v1: Option<f64>,
    pub initial_v2: Option<f64>,
    pub final_u1: Option<f64>,
    pub final_u2: Option<f64>,
    pub final_v1: Option<f64>,
    pub final_v2: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub record_dt: Option<f64>,
    pub u1_min: Option<f64>,
    pub u1_max: Option<f64>,
    pub u2_min: Option<f64>,
    pub u2_max: Option<f64>,
    pub grid_n: Option<usize>,
    pub v2_over_v1: Option<f64>,
    pub method: Option<PhaseMethodKey>,
    pub undamped: Option<UndampedPolicy>,
    /// Site interval `[start, end)` for a reduced-state spectrum.
    pub subsystem: Option<[usize; 2]>,
    /// Number of many-body levels per snapshot.
    pub levels: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Flags shared by every subcommand; they override file keys.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long = "n-sites")]
    pub n_sites: Option<usize>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Steady-state Pfaffians and signs at k = 0 and k = pi.
    Steady(RunArgs),
    /// Phase diagram over (u1/v1, u2/v1) at fixed v2/v1.
    PhaseDiagram(RunArgs),
    /// Pfaffian trajectories and critical times of a dissipative quench.
    Quench(RunArgs),
    /// Real-space evolution and single-particle entanglement spectra.
    Spectrum(RunArgs),
}

impl Command {
    pub fn experiment(&self) -> Experiment {
        match self {
            Command::Steady(_) => Experiment::Steady,
            Command::PhaseDiagram(_) => Experiment::PhaseDiagram,
            Command::Quench(_) => Experiment::Quench,
            Command::Spectrum(_) => Experiment::Spectrum,
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Steady(a) | Command::PhaseDiagram(a) | Command::Quench(a) | Command::Spectrum(a) => a,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lindblad-z2", version, about = "Gaussian-fermion Lindblad dynamics and Pfaffian Z2 invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Physics(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Physics(_) => EXIT_PHYSICS,
            _ => EXIT_CONFIG,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn usage_text(exp: Experiment) -> String {
    format!(
        "usage: lindblad-z2 {} --config <file.toml> [--out <dir>] [--threads <n>] [--dt <dt>] [--t-max <t>] \
         [--n-sites <n>] [--boundary pbc|obc]\nconfig keys for {}",
        exp.name(),
        exp.usage()
    )
}

/// Parses a config file's text; unknown keys and wrong types name the key.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {}", e.message())))
}

/// Config after merging the file (if any) with command-line overrides.
pub fn resolve_config(cmd: &Command) -> Result<(RunConfig, Vec<u8>), CliError> {
    let exp = cmd.experiment();
    let args = cmd.args();
    let Some(path) = &args.config else {
        return Err(CliError::Usage(usage_text(exp)));
    };
    let raw = fs::read(path).map_err(io_err(path))?;
    let text = String::from_utf8(raw.clone()).map_err(|_| CliError::Config(format!("{} is not UTF-8", path.display())))?;
    if text.trim().is_empty() {
        return Err(CliError::Usage(usage_text(exp)));
    }
    let mut cfg = parse_config(&text)?;
    if let Some(e) = cfg.experiment {
        if e != exp {
            return Err(CliError::Config(format!(
                "key `experiment` is \"{}\" but the subcommand is \"{}\"",
                e.name(),
                exp.name()
            )));
        }
    }
    cfg.experiment = Some(exp);
    if let Some(v) = &args.out {
        cfg.out_dir = Some(v.clone());
    }
    if args.dt.is_some() {
        cfg.dt = args.dt;
    }
    if args.t_max.is_some() {
        cfg.t_max = args.t_max;
    }
    if args.n_sites.is_some() {
        cfg.n_sites = args.n_sites;
    }
    if let Some(b) = args.boundary {
        cfg.boundary = Some(b.into());
    }
    Ok((cfg, raw))
}

fn require(v: Option<f64>, key: &str, exp: Experiment) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing key `{key}` for experiment {}", exp.name())))
}

fn positive(v: f64, key: &str) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("key `{key}` must be positive, got {v}")))
    }
}

impl RunConfig {
    fn experiment_or_err(&self) -> Result<Experiment, CliError> {
        self.experiment.ok_or_else(|| CliError::Config("missing key `experiment`".into()))
    }

    fn hamiltonian(&self, n_sites: usize, boundary: Boundary) -> HamiltonianSpec {
        HamiltonianSpec::new(self.j.unwrap_or(0.0), self.delta.unwrap_or(0.0), self.mu.unwrap_or(0.0), n_sites, boundary)
    }

    fn dissipator(&self, prefix: &str, n_sites: usize, boundary: Boundary) -> Result<DissipatorSpec, CliError> {
        let exp = self.experiment_or_err()?;
        let (u1, u2, v1, v2) = match prefix {
            "" => (self.u1, self.u2, self.v1, self.v2),
            "initial_" => (self.initial_u1, self.initial_u2, self.initial_v1, self.initial_v2),
            _ => (self.final_u1, self.final_u2, self.final_v1, self.final_v2),
        };
        Ok(DissipatorSpec::real(
            require(u1, &format!("{prefix}u1"), exp)?,
            require(u2, &format!("{prefix}u2"), exp)?,
            require(v1, &format!("{prefix}v1"), exp)?,
            require(v2, &format!("{prefix}v2"), exp)?,
            n_sites,
            boundary,
        ))
    }

    fn quench_plan(&self, n_sites: usize, boundary: Boundary, t_max_default: f64) -> Result<QuenchPlan, CliError> {
        let initial = self.dissipator("initial_", n_sites, boundary)?;
        let fin = self.dissipator("final_", n_sites, boundary)?;
        let t_max = positive(self.t_max.unwrap_or(t_max_default), "t_max")?;
        let dt = positive(self.dt.unwrap_or(1e-3), "dt")?;
        Ok(QuenchPlan::new(initial, fin, t_max, dt).with_hamiltonian(self.hamiltonian(n_sites, boundary)))
    }
}

/// Float with 17 significant digits; NaN as `nan`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, content).map_err(io_err(&path))?;
    info!("wrote {}", path.display());
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: Experiment,
    pub library_version: &'static str,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub resolved_config: RunConfig,
    pub outputs: Vec<String>,
}

/// Result of one run: files written and a short text report.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub outputs: Vec<PathBuf>,
    pub report: String,
}

pub fn steady_csv(h: &HamiltonianSpec, d: &DissipatorSpec) -> Result<(String, String), CliError> {
    let mut csv = String::from("ks,y,h0,pf,M\n");
    let mut report = String::new();
    let mut signs = Vec::new();
    for ks in HighSymmetry::BOTH {
        let p = steady_point(h, d, ks)?;
        writeln!(csv, "{},{},{},{},{}", ks, fmt_float(p.y), fmt_float(p.h0), fmt_float(p.pf), p.m).unwrap();
        writeln!(report, "k = {ks}: y = {:.6}, h0 = {:.6}, Pf = {:.6}, M = {}", p.y, p.h0, p.pf, p.m).unwrap();
        signs.push(p.m);
    }
    writeln!(report, "nu = {}", signs[0] * signs[1]).unwrap();
    Ok((csv, report))
}

pub fn phase_diagram_csv(diagram: &PhaseDiagram) -> String {
    let mut csv = String::from("u1_over_v1,u2_over_v1,v2_over_v1,M0,Mpi,nu\n");
    let v2 = fmt_float(diagram.grid.v2_over_v1);
    for c in &diagram.cells {
        let (m0, mpi, nu) = match c.phase {
            CellPhase::Phase(p) => (p.m0.value(), p.mpi.value(), p.nu.value()),
            CellPhase::Boundary { .. } => (0, 0, 0),
        };
        writeln!(csv, "{},{},{},{},{},{}", fmt_float(c.u1_over_v1), fmt_float(c.u2_over_v1), v2, m0, mpi, nu).unwrap();
    }
    csv
}

pub fn quench_csv(report: &TransitionReport) -> String {
    let tr = &report.nu_trace;
    let mut csv = String::from("t,pf_k0,pf_kpi,nu\n");
    for i in 0..tr.times.len() {
        writeln!(csv, "{},{},{},{}", fmt_float(tr.times[i]), fmt_float(tr.pf_k0[i]), fmt_float(tr.pf_kpi[i]), tr.nu[i])
            .unwrap();
    }
    csv
}

pub fn transitions_csv(report: &TransitionReport) -> String {
    let mut csv = String::from("ks,t_p,exists\n");
    for t in [&report.zero, &report.pi] {
        writeln!(csv, "{},{},{}", t.ks, fmt_float(t.t_p.unwrap_or(f64::NAN)), t.exists).unwrap();
    }
    csv
}

pub fn spes_csv(trace: &SpesTrace) -> String {
    let mut csv = String::from("t,index,epsilon\n");
    for (t, spectrum) in trace.times.iter().zip(&trace.spectra) {
        let t = fmt_float(*t);
        for (i, e) in spectrum.iter().enumerate() {
            writeln!(csv, "{t},{i},{}", fmt_float(*e)).unwrap();
        }
    }
    csv
}

pub fn zero_modes_csv(trace: &SpesTrace) -> String {
    let mut csv = String::from("t,min_abs,second_abs,ratio\n");
    for d in zero_mode_diagnostics(trace) {
        writeln!(csv, "{},{},{},{}", fmt_float(d.t), fmt_float(d.min_abs), fmt_float(d.second_abs), fmt_float(d.ratio))
            .unwrap();
    }
    csv
}

fn transition_report_text(rep: &TransitionReport) -> String {
    let mut s = String::new();
    for t in [&rep.zero, &rep.pi] {
        match t.t_p {
            Some(tp) => writeln!(s, "t_p(k = {}) = {:.6}  (M: {} -> {})", t.ks, tp, t.initial_sign, t.final_sign),
            None => writeln!(s, "t_p(k = {}) = none  (M: {} -> {})", t.ks, t.initial_sign, t.final_sign),
        }
        .unwrap();
    }
    writeln!(s, "transitions: {}, nu flips on grid: {}", rep.count, rep.nu_trace.flips().len()).unwrap();
    s
}

/// Runs one experiment and writes its outputs; returns the list of files.
pub fn run_config(cfg: &RunConfig, raw_config: &[u8]) -> Result<RunSummary, CliError> {
    let exp = cfg.experiment_or_err()?;
    let out_dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
    let mut outputs = Vec::new();
    let report;

    match exp {
        Experiment::Steady => {
            let h = cfg.hamiltonian(4, Boundary::Periodic);
            let d = cfg.dissipator("", 4, Boundary::Periodic)?;
            h.validate()?;
            d.validate()?;
            let (csv, text) = steady_csv(&h, &d)?;
            outputs.push(write_file(&out_dir, "steady.csv", &csv)?);
            report = text;
        }
        Experiment::PhaseDiagram => {
            let n = cfg.grid_n.unwrap_or(201);
            if n < 2 {
                return Err(CliError::Config(format!("key `grid_n` must be at least 2, got {n}")));
            }
            let grid = PhaseGrid {
                u1_over_v1: Axis::new(cfg.u1_min.unwrap_or(-5.0), cfg.u1_max.unwrap_or(5.0), n),
                u2_over_v1: Axis::new(cfg.u2_min.unwrap_or(-5.0), cfg.u2_max.unwrap_or(5.0), n),
                v2_over_v1: cfg.v2_over_v1.unwrap_or(-2.0),
            };
            let method = match cfg.method.unwrap_or_default() {
                PhaseMethodKey::ClosedForm => PhaseMethod::ClosedForm,
                PhaseMethodKey::Direct => PhaseMethod::DirectSolve(cfg.hamiltonian(4, Boundary::Periodic)),
            };
            let diagram = phase_diagram(&grid, method)?;
            outputs.push(write_file(&out_dir, "phase_diagram.csv", &phase_diagram_csv(&diagram))?);
            let topo = diagram.cells.iter().filter(|c| matches!(c.phase, CellPhase::Phase(p) if p.is_topological())).count();
            report = format!("{} cells, {} with nu = -1\n", diagram.cells.len(), topo);
        }
        Experiment::Quench => {
            let plan = cfg.quench_plan(4, Boundary::Periodic, 0.5)?;
            let rep = critical_times(&plan)?;
            outputs.push(write_file(&out_dir, "quench.csv", &quench_csv(&rep))?);
            outputs.push(write_file(&out_dir, "transitions.csv", &transitions_csv(&rep))?);
            report = transition_report_text(&rep);
        }
        Experiment::Spectrum => {
            let n_sites = cfg.n_sites.unwrap_or(200);
            let boundary = cfg.boundary.unwrap_or(Boundary::Open);
            let plan = cfg.quench_plan(n_sites, boundary, 0.3)?;
            plan.validate()?;
            let record_dt = positive(cfg.record_dt.unwrap_or(0.01), "record_dt")?;
            let record_every = ((record_dt / plan.dt).round() as usize).max(1);
            let policy = cfg.undamped.unwrap_or_default();
            let init = Generator::new(&crate::model::RealSpaceSystem::new(&plan.hamiltonian_initial, &plan.initial)?)?;
            let fin = Generator::new(&crate::model::RealSpaceSystem::new(&plan.hamiltonian_final, &plan.final_dissipator)?)?;
            let delta0 = steady_from_generator(&init, policy)?;
            info!("initial steady state ready ({} sites, {})", n_sites, boundary);
            let traj = evolve_delta(&delta0, &fin, plan.t_max, plan.dt, record_every)?;
            let traj = match cfg.subsystem {
                Some([a, b]) => crate::realspace::Trajectory {
                    times: traj.times,
                    states: traj.states.iter().map(|s| s.restrict(a..b)).collect::<crate::Result<Vec<CorrelationMatrix>>>()?,
                },
                None => traj,
            };
            let trace = spes_trace(&traj);
            outputs.push(write_file(&out_dir, "spes.csv", &spes_csv(&trace))?);
            outputs.push(write_file(&out_dir, "zero_modes.csv", &zero_modes_csv(&trace))?);
            if let Some(m) = cfg.levels {
                let mut csv = String::from("t,rank,xi\n");
                for (t, spectrum) in trace.times.iter().zip(&trace.spectra) {
                    for (r, l) in many_body_levels(spectrum, m)?.levels.iter().enumerate() {
                        writeln!(csv, "{},{},{}", fmt_float(*t), r, fmt_float(l.xi)).unwrap();
                    }
                }
                outputs.push(write_file(&out_dir, "many_body.csv", &csv)?);
            }
            let diag = zero_mode_diagnostics(&trace);
            let min = diag.iter().map(|d| d.min_abs).fold(f64::INFINITY, f64::min);
            report = format!("{} snapshots, 2N = {}, smallest |epsilon| over run = {:.3e}\n", diag.len(), 2 * n_sites, min);
        }
    }

    let manifest = Manifest {
        experiment: exp,
        library_version: env!("CARGO_PKG_VERSION"),
        config_sha256: Sha256::digest(raw_config).iter().map(|b| format!("{b:02x}")).collect(),
        seed: cfg.seed,
        resolved_config: cfg.clone(),
        outputs: outputs.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    outputs.push(write_file(&out_dir, "run_manifest.json", &json)?);
    Ok(RunSummary { out_dir, outputs, report })
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs a parsed command.
pub fn execute(cmd: &Command) -> Result<RunSummary, CliError> {
    configure_threads(cmd.args().threads)?;
    let (cfg, raw) = resolve_config(cmd)?;
    run_config(&cfg, &raw)
}

/// Full entry point: parses `args`, runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            print!("{}", summary.report);
            EXIT_OK
        }
        Err(e) => {
            match &e {
                CliError::Physics(p) => eprintln!("error: physics precondition failed: {p}"),
                other => eprintln!("error: {other}"),
            }
            e.exit_code()
        }
    }
}
