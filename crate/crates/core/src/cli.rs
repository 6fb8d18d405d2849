//! Config-driven experiment runner and the command-line front end.
//!
//! Every run writes into the output directory:
//! * `INCOMPLETE` while running, removed on success;
//! * the experiment CSV(s), floats as `{:.16e}`;
//! * `manifest.toml`, the resolved config (loadable as a config);
//! * `summary.txt`, headline numbers as `key = value` lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::acceptance;
use crate::config::{load_config, Experiment, RunConfig};
use crate::error::{Error, Result};
use crate::fock;
use crate::pulse::TimeGrid;
use crate::snr::{self, Axis, SnrMethod, SnrResult, StochasticSettings, SweepSpec};
use crate::variants::four_level::{compare_four_level, FourLevelParams};
use crate::variants::transmission::{group_velocity, transmission, window_width, CascadeParams};
use crate::variants::{ensemble_rescaled_params, ratio_sweep, snr_cascade, SqueezeParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";
pub const MANIFEST: &str = "manifest.toml";
pub const SUMMARY: &str = "summary.txt";

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// CSV table with a header row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    text: String,
}

pub enum Cell<'a> {
    F(f64),
    I(u64),
    S(&'a str),
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let parts: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::F(x) => format!("{x:.16e}"),
                Cell::I(n) => n.to_string(),
                Cell::S(s) => s.to_string(),
            })
            .collect();
        self.text.push_str(&parts.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Output of one experiment before it touches the disk.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub summary: Vec<(String, String)>,
}

impl RunOutput {
    fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn sweep_spec(cfg: &RunConfig, axes: Vec<(Axis, Vec<f64>)>, method: SnrMethod) -> SweepSpec {
    let mut s = SweepSpec::new(cfg.params, axes);
    s.pulse = cfg.pulse.kind;
    s.dt = cfg.grid.dt;
    s.method = method;
    s.stochastic = stochastic_settings(cfg);
    s
}

fn stochastic_settings(cfg: &RunConfig) -> StochasticSettings {
    StochasticSettings { n_traj: cfg.n_traj, base_seed: cfg.base_seed, scheme: cfg.stochastic.scheme }
}

fn snr_row(t: &mut Table, x: &[f64], r: &std::result::Result<SnrResult, String>, method: SnrMethod) {
    let mut cells: Vec<Cell> = x.iter().map(|&v| Cell::F(v)).collect();
    match r {
        Ok(r) => cells.extend([Cell::F(r.mean_s1), Cell::F(r.sigma_s), Cell::F(r.snr)]),
        Err(_) => cells.extend([Cell::F(f64::NAN), Cell::F(f64::NAN), Cell::F(f64::NAN)]),
    }
    let m = method.to_string();
    cells.push(Cell::S(&m));
    t.row(&cells);
}

/// Run the configured experiment without writing files.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let mut out = RunOutput::default();
    let p = cfg.params;
    match cfg.experiment {
        Experiment::Polarisation => {
            let pulse = cfg.pulse_shape()?;
            let grid = cfg.time_grid()?;
            let ev = fock::evolve_hierarchy(&p, &pulse, &grid)?;
            let mut t = Table::new("polarisation.csv", &["t", "f_abs2", "y_expect"]);
            for (&time, &y) in ev.times.iter().zip(&ev.polarisation) {
                t.row(&[Cell::F(time), Cell::F(pulse.value(time).powi(2)), Cell::F(y)]);
            }
            let peak = ev.polarisation.iter().fold(0.0f64, |a, y| a.max(y.abs()));
            out.note("expected_signal", crate::pulse::trapezoid(&ev.polarisation, grid.dt));
            out.note("peak_abs_y", peak);
            out.note("bound_sqrt_gamma_c", p.gamma_c.sqrt());
            out.tables.push(t);
        }
        Experiment::SnrBetaSweep => {
            let method = cfg.beta_sweep.method;
            let spec = sweep_spec(cfg, vec![(Axis::Beta, cfg.beta_sweep.beta.values())], method);
            let mut t = Table::new("snr_beta.csv", &["beta", "mean_s1", "sigma_s", "snr", "method"]);
            let (table, refined) = if method == SnrMethod::RegressionAnalytic && cfg.beta_sweep.optimize {
                let o = snr::optimize(&spec)?;
                let refined = (o.params.beta, o.result.snr, o.iterations);
                (o.table, Some(refined))
            } else {
                (snr::sweep(&spec)?, None)
            };
            let mut max = f64::NEG_INFINITY;
            for pt in &table {
                let r = pt.outcome.as_ref().map(Clone::clone).map_err(|e| e.to_string());
                if let Ok(r) = &r {
                    max = max.max(r.snr);
                }
                snr_row(&mut t, &pt.values, &r, method);
            }
            if let Some(best) = snr::best_point(&table) {
                out.note("grid_beta_opt", best.values[0]);
                out.note("grid_snr_opt", best.outcome.as_ref().unwrap().snr);
            }
            if let Some((b, s, it)) = refined {
                out.note("beta_opt", b);
                out.note("snr_opt", s);
                out.note("simplex_iterations", it);
                max = max.max(s);
            }
            out.note("all_below_unity", max < 1.0);
            out.tables.push(t);
        }
        Experiment::SnrHistogram => {
            let grid = cfg.time_grid()?;
            let (s1, s0) = snr::simulate_signal_pair(&p, None, &grid, &stochastic_settings(cfg))?;
            let st = snr::estimate_snr_stochastic(&s1, &s0)?;
            let det = snr::estimate_snr_deterministic(&p, &cfg.pulse_shape()?, &grid)?;
            let h = snr::Histogram::freedman_diaconis(&s0.values, &s1.values)?;
            let mut t = Table::new("histogram.csv", &["bin_lo", "bin_hi", "count_n0", "count_n1"]);
            for k in 0..h.counts_n0.len() {
                t.row(&[
                    Cell::F(h.bin_edges[k]),
                    Cell::F(h.bin_edges[k + 1]),
                    Cell::I(h.counts_n0[k] as u64),
                    Cell::I(h.counts_n1[k] as u64),
                ]);
            }
            let se = st.stderr_snr.unwrap_or(f64::NAN);
            out.note("snr_stochastic", st.snr);
            out.note("stderr_snr", se);
            out.note("snr_deterministic", det.snr);
            out.note("agree_within_3se", (st.snr - det.snr).abs() <= 3.0 * se);
            out.note("mean_s0", st.mean_s0);
            out.note("sd_s0", st.sd_s0);
            out.note("sd_s1", st.sd_s1);
            out.note("n_traj", cfg.n_traj);
            out.note("max_abs_record_mean", s1.max_abs_record_mean.max(s0.max_abs_record_mean));
            out.tables.push(t);
        }
        Experiment::DetuningMap => {
            let axes = vec![(Axis::DeltaB, cfg.detuning.delta_b.values()), (Axis::DeltaC, cfg.detuning.delta_c.values())];
            let spec = sweep_spec(cfg, axes, SnrMethod::RegressionAnalytic);
            let table = snr::sweep(&spec)?;
            let mut t = Table::new("detuning_map.csv", &["delta_b", "delta_c", "snr"]);
            for pt in &table {
                let s = pt.outcome.as_ref().map_or(f64::NAN, |r| r.snr);
                t.row(&[Cell::F(pt.values[0]), Cell::F(pt.values[1]), Cell::F(s)]);
            }
            if let Some(best) = snr::best_point(&table) {
                out.note("argmax_delta_b", best.values[0]);
                out.note("argmax_delta_c", best.values[1]);
                out.note("snr_max", best.outcome.as_ref().unwrap().snr);
            }
            out.tables.push(t);
        }
        Experiment::SqueezeSweep => {
            let pulse = cfg.pulse_shape()?;
            let grid = cfg.time_grid()?;
            let mut t = Table::new("squeeze.csv", &["r_db", "snr"]);
            let mut snr0 = f64::NAN;
            let mut best = (f64::NEG_INFINITY, 0.0);
            for r in cfg.squeeze.r.values() {
                let sq = SqueezeParams::noise_reducing(r)?;
                let s = snr::estimate_snr_deterministic_squeezed(&p, Some(&sq), &pulse, &grid)?.snr;
                if r == 0.0 {
                    snr0 = s;
                }
                if s > best.0 {
                    best = (s, sq.db());
                }
                t.row(&[Cell::F(sq.db()), Cell::F(s)]);
            }
            out.note("snr_unsqueezed", snr0);
            out.note("snr_max", best.0);
            out.note("r_db_at_max", best.1);
            out.note("relative_gain", best.0 / snr0 - 1.0);
            out.tables.push(t);
        }
        Experiment::EnsembleRescale => {
            let base = cfg.time_grid()?;
            let r1 = snr::estimate_snr_deterministic(&p, &cfg.pulse_shape()?, &base)?;
            let mut t = Table::new("ensemble.csv", &["n", "snr"]);
            let mut dev = 0.0f64;
            for &n in &cfg.ensemble.sizes {
                let s = ensemble_rescaled_params(&p, n)?;
                let pulse = crate::pulse::PulseShape::for_bandwidth(cfg.pulse.kind, s.params.gamma_con)?;
                let r = snr::estimate_snr_deterministic(&s.params, &pulse, &s.grid(&base)?)?;
                dev = dev.max((r.snr - r1.snr).abs());
                t.row(&[Cell::I(n as u64), Cell::F(r.snr)]);
            }
            out.note("snr_single", r1.snr);
            out.note("max_abs_deviation", dev);
            out.tables.push(t);
        }
        Experiment::TransmissionSpectrum => {
            let tc = &cfg.transmission;
            let vg = group_velocity(tc.eps_eff)?;
            let mut t = Table::new("transmission.csv", &["delta", "t_re", "t_im", "t_abs2"]);
            for d in tc.delta.values() {
                let z = transmission(d, d, tc.alpha, &p, vg, tc.variant)?;
                t.row(&[Cell::F(d), Cell::F(z.re), Cell::F(z.im), Cell::F(z.norm_sqr())]);
            }
            let span = tc.delta.hi.abs().max(tc.delta.lo.abs());
            out.note("t_abs2_resonance", transmission(0.0, 0.0, tc.alpha, &p, vg, tc.variant)?.norm_sqr());
            out.note("window_width", window_width(tc.alpha, &p, vg, tc.variant, span, 1e-3)?);
            out.note("twice_coupling", 2.0 * p.gamma_c.sqrt() * tc.alpha);
            out.tables.push(t);
        }
        Experiment::CascadeSnr => {
            let spec = sweep_spec(cfg, vec![(Axis::Beta, cfg.beta_sweep.beta.values())], SnrMethod::RegressionAnalytic);
            let o = snr::optimize(&spec)?;
            let cc = &cfg.cascade;
            let alpha = cc.alpha.unwrap_or(o.params.beta);
            let node = CascadeParams::on_resonance(cc.n_max, alpha, &p, group_velocity(cc.eps_eff)?, cc.variant)?;
            let mut t = Table::new("cascade.csv", &["n", "snr_n"]);
            let mut max = f64::NEG_INFINITY;
            for n in 1..=cc.n_max {
                let s = snr_cascade(n, o.result.snr, node.t_trans)?;
                max = max.max(s);
                t.row(&[Cell::I(n as u64), Cell::F(s)]);
            }
            out.note("snr_1", o.result.snr);
            out.note("alpha", alpha);
            out.note("t_trans", node.t_trans);
            out.note("snr_n_max", max);
            out.note("all_below_unity", max < 1.0);
            out.tables.push(t);
        }
        Experiment::FourLevelCompare => {
            let f = &cfg.four_level;
            let p4 = FourLevelParams::resonant(f.omega_drive, f.delta_12, f.gamma, f.alpha, f.beta_sig);
            let c = compare_four_level(&p4, &TimeGrid::new(f.t_end, f.dt)?)?;
            let mut t = Table::new("fourlevel.csv", &["t", "pop4", "pop3", "diff"]);
            for k in 0..c.times.len() {
                t.row(&[Cell::F(c.times[k]), Cell::F(c.pop4[k]), Cell::F(c.pop3[k]), Cell::F(c.pop4[k] - c.pop3[k])]);
            }
            out.note("sup_norm", c.sup_norm());
            out.note("trace_drift", c.trace_drift);
            out.tables.push(t);
        }
        Experiment::RatioSweep => {
            let pts = ratio_sweep(&cfg.ratio.ratios, &p, &cfg.beta_sweep.beta.values(), cfg.grid.dt)?;
            let mut t = Table::new("ratio.csv", &["ratio", "beta_opt", "snr_opt"]);
            for r in &pts {
                t.row(&[Cell::F(r.ratio), Cell::F(r.beta_opt), Cell::F(r.snr_opt)]);
            }
            out.note("max_snr_opt", pts.iter().map(|r| r.snr_opt).fold(f64::NEG_INFINITY, f64::max));
            out.note("all_optima_below_unity", pts.iter().all(|r| r.snr_opt < 1.0));
            out.tables.push(t);
        }
    }
    Ok(out)
}

fn manifest_text(cfg: &RunConfig) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, "# {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# seeds: trajectory k of the one-photon ensemble uses base_seed + k, the zero-photon ensemble base_seed + n_traj + k; sweep point i adds 2 n_traj i"
    );
    s.push_str(&cfg.to_manifest()?);
    Ok(s)
}

/// Execute and write all artifacts to `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let marker = dir.join(INCOMPLETE_MARKER);
    fs::write(&marker, format!("{} started\n", cfg.experiment))?;
    fs::write(dir.join(MANIFEST), manifest_text(cfg)?)?;
    info!("running {} into {}", cfg.experiment, dir.display());
    let out = execute(cfg)?;
    for t in &out.tables {
        fs::write(dir.join(&t.name), t.as_str())?;
    }
    let mut s = format!("experiment = {}\n", cfg.experiment);
    for (k, v) in &out.summary {
        let _ = writeln!(s, "{k} = {v}");
    }
    fs::write(dir.join(SUMMARY), s)?;
    fs::remove_file(&marker)?;
    Ok(out)
}

#[derive(Debug, Parser)]
#[command(name = "transmon-kerr", version, about = "Single-photon cross-Kerr SNR experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Config file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 = all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub ntraj: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Polarisation,
    SnrBetaSweep,
    SnrHistogram,
    DetuningMap,
    SqueezeSweep,
    EnsembleRescale,
    TransmissionSpectrum,
    CascadeSnr,
    FourLevelCompare,
    RatioSweep,
    /// Run the acceptance criteria; exit 4 on failure.
    Check,
}

impl Command {
    pub fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::Polarisation => Experiment::Polarisation,
            Command::SnrBetaSweep => Experiment::SnrBetaSweep,
            Command::SnrHistogram => Experiment::SnrHistogram,
            Command::DetuningMap => Experiment::DetuningMap,
            Command::SqueezeSweep => Experiment::SqueezeSweep,
            Command::EnsembleRescale => Experiment::EnsembleRescale,
            Command::TransmissionSpectrum => Experiment::TransmissionSpectrum,
            Command::CascadeSnr => Experiment::CascadeSnr,
            Command::FourLevelCompare => Experiment::FourLevelCompare,
            Command::RatioSweep => Experiment::RatioSweep,
            Command::Check => return None,
        })
    }
}

/// Config for a subcommand: the file if given (its experiment must match),
/// otherwise defaults with seed 0, then the command-line overrides.
pub fn resolve_config(experiment: Experiment, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(path) => {
            let c = load_config(path)?;
            if c.experiment != experiment {
                return Err(Error::Config(format!(
                    "config is for `{}` but the command is `{experiment}`",
                    c.experiment
                )));
            }
            c
        }
        None => RunConfig::new(experiment, 0),
    };
    if let Some(s) = o.seed {
        cfg.base_seed = s;
    }
    if let Some(d) = &o.out {
        cfg.output_dir = d.clone();
    }
    if let Some(dt) = o.dt {
        cfg.grid.dt = dt;
    }
    if let Some(n) = o.ntraj {
        cfg.n_traj = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_check() -> i32 {
    let report = acceptance::run_all();
    for c in &report {
        println!("{c}");
    }
    if report.iter().all(|c| c.passed || !c.primary) {
        EXIT_OK
    } else {
        EXIT_CHECK
    }
}

/// Entry point of the binary; returns the process exit code.
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
    if cli.overrides.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.overrides.threads).build_global() {
            warn!("thread pool already initialised: {e}");
        }
    }
    let Some(experiment) = cli.command.experiment() else {
        return run_check();
    };
    let result = resolve_config(experiment, &cli.overrides).and_then(|cfg| {
        let out = run(&cfg)?;
        Ok((cfg, out))
    });
    match result {
        Ok((cfg, out)) => {
            for (k, v) in &out.summary {
                println!("{k} = {v}");
            }
            println!("wrote {}", cfg.output_dir.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Whether a run left its incomplete marker behind.
pub fn is_incomplete(dir: &Path) -> bool {
    dir.join(INCOMPLETE_MARKER).exists()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(e: Experiment, dir: &Path) -> RunConfig {
        let mut c = RunConfig::new(e, 5);
        c.output_dir = dir.to_path_buf();
        c.grid.dt = 1e-2;
        c.n_traj = 20;
        c.beta_sweep.beta = crate::config::Range::new(0.2, 0.8, 4);
        c.detuning.delta_b = crate::config::Range::new(-1.0, 1.0, 3);
        c.detuning.delta_c = crate::config::Range::new(-1.0, 1.0, 3);
        c.squeeze.r = crate::config::Range::new(0.0, 0.5, 3);
        c.transmission.delta = crate::config::Range::new(-5.0, 5.0, 11);
        c.ratio.ratios = vec![2.0, 5.0];
        c.four_level.t_end = 2.0;
        c.four_level.dt = 1e-2;
        c
    }

    #[test]
    fn every_experiment_writes_its_artifacts() {
        let names = [
            "polarisation.csv",
            "snr_beta.csv",
            "histogram.csv",
            "detuning_map.csv",
            "squeeze.csv",
            "ensemble.csv",
            "transmission.csv",
            "cascade.csv",
            "fourlevel.csv",
            "ratio.csv",
        ];
        for (e, name) in Experiment::ALL.into_iter().zip(names) {
            let dir = tempfile::tempdir().unwrap();
            let out = run(&quick(e, dir.path())).unwrap();
            assert!(dir.path().join(name).exists(), "{e}");
            assert!(dir.path().join(MANIFEST).exists() && dir.path().join(SUMMARY).exists());
            assert!(!is_incomplete(dir.path()));
            let t = out.table(name).unwrap();
            let mut lines = t.as_str().lines();
            let cols = lines.next().unwrap().split(',').count();
            assert!(lines.all(|l| l.split(',').count() == cols));
        }
    }

    #[test]
    fn failed_run_leaves_marker() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = quick(Experiment::Polarisation, dir.path());
        // Far outside the RK4 stability region: the hierarchy overflows.
        c.grid.dt = 3.0;
        c.grid.t_end = Some(3000.0);
        let e = run(&c).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_NUMERICAL, "{e}");
        assert!(is_incomplete(dir.path()));
    }

    #[test]
    fn float_format_round_trips() {
        let mut t = Table::new("x.csv", &["a"]);
        let v = 0.1 + 0.2;
        t.row(&[Cell::F(v)]);
        let back: f64 = t.as_str().lines().nth(1).unwrap().parse().unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn exit_codes_for_bad_input() {
        assert_eq!(main_with_args(["transmon-kerr", "no-such-command"]), EXIT_CONFIG);
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        fs::write(&cfg, "experiment = \"polarisation\"\nbase_seed = 1\nparams.gamma_b = -1\n").unwrap();
        let code = main_with_args(["transmon-kerr", "polarisation", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, EXIT_CONFIG);
        let code = main_with_args(["transmon-kerr", "detuning-map", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, EXIT_CONFIG);
    }
}
