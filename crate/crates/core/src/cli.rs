//! The `skyrmion-string` command-line tool.
//!
//! [`run`] parses arguments, merges them over an optional JSON config file
//! and the built-in defaults, runs one command and reports failures as a JSON
//! record on the error stream. It never exits the process itself, so it can
//! be driven in-process.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charges::{
    charge_report, hopf_charge, hopf_density, topo_charge_axisym, PolarQuadrature,
};
use crate::energy::{energy_per_length, energy_report};
use crate::error::{Error, Result};
use crate::field::Coupling;
use crate::profile::{
    exact_sigma_profile, read_profile, shoot_with, write_profile_with, GridScheme, Profile,
    ProfileSidecar, RadialGrid, ShootOptions, Tolerances, DEFAULT_NODES, DEFAULT_R0, DEFAULT_RMAX,
    DEFAULT_TOL_BC, DEFAULT_TOL_RES,
};

/// Upper bound on the number of sweep rows.
pub const MAX_SWEEP_ROWS: usize = 10_000;

const DEFAULT_Q: [f64; 7] = [0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 2.0];

#[derive(Debug, Parser)]
#[command(
    name = "skyrmion-string",
    version,
    about = "Vortex and twisted Skyrmion strings of the O(3) sigma model"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON config file; command-line flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Innermost grid radius (series start).
    #[arg(long, global = true)]
    pub r0: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub grid: Option<GridArg>,
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    #[arg(long = "tol-bc", global = true)]
    pub tol_bc: Option<f64>,
    #[arg(long = "tol-res", global = true)]
    pub tol_res: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a profile (closed form or shooting) and write CSV + sidecar.
    Profile(ProfileArgs),
    /// Topological and Hopf charges of a profile.
    Charge(ChargeArgs),
    /// Energy per unit length and Derrick scaling.
    Energy(EnergyArgs),
    /// Parameter sweep over n, Kfam, kappa and mk.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Log,
    Uniform,
}

impl From<GridArg> for GridScheme {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Log => GridScheme::Log,
            GridArg::Uniform => GridScheme::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form sigma-model vortex with family constant `Kfam`.
    Exact,
    /// Shooting solution of the string equation.
    Shoot,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CouplingArgs {
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub chi: Option<f64>,
    /// Lower end of the bracket on f'(0) (twisted shooting).
    #[arg(long = "a-lo", allow_hyphen_values = true)]
    pub a_lo: Option<f64>,
    #[arg(long = "a-hi", allow_hyphen_values = true)]
    pub a_hi: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Read the profile from this CSV (with its JSON sidecar) instead of building one.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Family constant of the closed-form vortex (also the shooting scale anchor).
    #[arg(long = "Kfam", visible_alias = "kfam")]
    pub kfam: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub mk: Option<f64>,
    #[command(flatten)]
    pub coupling: CouplingArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChargeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Slab height for the Hopf charge.
    #[arg(long = "delta-z", allow_hyphen_values = true)]
    pub delta_z: Option<f64>,
    /// Also evaluate T by 2-D quadrature of the full field.
    #[arg(long)]
    pub general: bool,
    #[arg(long = "quad-nr")]
    pub quad_nr: Option<usize>,
    #[arg(long = "quad-ntheta")]
    pub quad_ntheta: Option<usize>,
    /// Write the Hopf density scan as CSV `r,density`.
    #[arg(long = "plot-data")]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Include the Derrick scan and slope.
    #[arg(long)]
    pub derrick: bool,
    /// Scale factors for the Derrick scan, e.g. `0.5,1,2` or `0.5:2:7`.
    #[arg(long)]
    pub q: Option<String>,
    /// Write the energy density scan as CSV `r,sigma`.
    #[arg(long = "plot-data")]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Winding numbers, `1,2,3` or `start:stop:count`.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long = "Kfam", visible_alias = "kfam")]
    pub kfam: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub mk: Option<String>,
    #[arg(long = "delta-z", allow_hyphen_values = true)]
    pub delta_z: Option<f64>,
    #[command(flatten)]
    pub coupling: CouplingArgs,
}

/// A sweep axis in a config file: an explicit list or the command-line syntax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    List(Vec<f64>),
    Text(String),
}

/// Config file contents. Every key is optional and uses the flag name in
/// snake case.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub rmax: Option<f64>,
    pub r0: Option<f64>,
    pub grid: Option<GridScheme>,
    pub nodes: Option<usize>,
    pub tol_bc: Option<f64>,
    pub tol_res: Option<f64>,
    pub profile: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub n: Option<u32>,
    #[serde(alias = "Kfam")]
    pub kfam: Option<f64>,
    pub kappa: Option<f64>,
    pub mk: Option<f64>,
    pub lambda: Option<f64>,
    pub chi: Option<f64>,
    pub a_lo: Option<f64>,
    pub a_hi: Option<f64>,
    pub delta_z: Option<f64>,
    pub general: Option<bool>,
    pub quad_nr: Option<usize>,
    pub quad_ntheta: Option<usize>,
    pub derrick: Option<bool>,
    pub q: Option<RangeSpec>,
    pub plot_data: Option<PathBuf>,
    pub sweep_n: Option<RangeSpec>,
    pub sweep_kfam: Option<RangeSpec>,
    pub sweep_kappa: Option<RangeSpec>,
    pub sweep_mk: Option<RangeSpec>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg = serde_json::from_str(&text)?;
        Ok(cfg)
    }
}

/// Sweep axes after merging.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRanges {
    pub n: Vec<u32>,
    pub kfam: Vec<f64>,
    pub kappa: Vec<f64>,
    pub mk: Vec<f64>,
}

impl SweepRanges {
    pub fn len(&self) -> usize {
        self.n.len() * self.kfam.len() * self.kappa.len() * self.mk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows in `n`-major order.
    pub fn tuples(&self) -> Vec<(u32, f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &n in &self.n {
            for &k in &self.kfam {
                for &kappa in &self.kappa {
                    for &mk in &self.mk {
                        out.push((n, k, kappa, mk));
                    }
                }
            }
        }
        out
    }
}

/// Effective configuration of one run; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
    pub n: u32,
    pub kfam: f64,
    pub kappa: f64,
    pub mk: f64,
    pub lambda: f64,
    pub chi: f64,
    pub grid: GridScheme,
    pub r0: f64,
    pub rmax: f64,
    pub nodes: usize,
    pub tol_bc: f64,
    pub tol_res: f64,
    pub a_lo: f64,
    pub a_hi: f64,
    pub delta_z: f64,
    pub general: bool,
    pub quad_nr: usize,
    pub quad_ntheta: usize,
    pub derrick: bool,
    pub q: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepRanges>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let quad = PolarQuadrature::default();
        Self {
            command: String::new(),
            mode: Mode::Exact,
            profile: None,
            n: 1,
            kfam: 1.0,
            kappa: 0.0,
            mk: 0.0,
            lambda: 1.0,
            chi: 0.0,
            grid: GridScheme::Log,
            r0: DEFAULT_R0,
            rmax: DEFAULT_RMAX,
            nodes: DEFAULT_NODES,
            tol_bc: DEFAULT_TOL_BC,
            tol_res: DEFAULT_TOL_RES,
            a_lo: ShootOptions::DEFAULT_BRACKET.0,
            a_hi: ShootOptions::DEFAULT_BRACKET.1,
            delta_z: 1.0,
            general: false,
            quad_nr: quad.n_r,
            quad_ntheta: quad.n_theta,
            derrick: false,
            q: DEFAULT_Q.to_vec(),
            sweep: None,
            out: None,
            format: Format::Json,
            plot_data: None,
        }
    }
}

impl RunConfig {
    pub fn coupling(&self) -> Result<Coupling> {
        Coupling::new(self.n, self.mk, self.chi, self.lambda, self.kappa)
    }

    pub fn radial_grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.grid, self.r0, self.rmax, self.nodes)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            tol_bc: self.tol_bc,
            tol_res: self.tol_res,
        }
    }

    pub fn quadrature(&self) -> PolarQuadrature {
        PolarQuadrature {
            n_r: self.quad_nr,
            n_theta: self.quad_ntheta,
            ..PolarQuadrature::default()
        }
    }

    /// Check every field that a computation would otherwise reject midway.
    pub fn validate(&self) -> Result<()> {
        self.coupling()?;
        self.radial_grid()?;
        positive("Kfam", self.kfam)?;
        positive("tol_bc", self.tol_bc)?;
        positive("tol_res", self.tol_res)?;
        positive("delta_z", self.delta_z)?;
        if !(self.a_lo.is_finite() && self.a_hi.is_finite()) {
            return Err(Error::InvalidArgument("bracket ends must be finite".into()));
        }
        if let Some(q) = self.q.iter().find(|q| !(**q > 0.0 && q.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "scan factors must be > 0, got {q}"
            )));
        }
        if let Some(s) = &self.sweep {
            if s.len() > MAX_SWEEP_ROWS {
                return Err(Error::InvalidArgument(format!(
                    "sweep has {} rows, the limit is {MAX_SWEEP_ROWS}",
                    s.len()
                )));
            }
            for &n in &s.n {
                Coupling::sigma(n)?;
            }
            for &k in &s.kfam {
                positive("Kfam", k)?;
            }
            for &kappa in &s.kappa {
                Coupling::sigma(1)?.with_kappa(kappa)?;
            }
            for &mk in &s.mk {
                Coupling::sigma(1)?.with_mk(mk)?;
            }
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Parse `a,b,c`, `start:stop:count` (inclusive, `count` points) or an empty
/// string (no points).
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::InvalidArgument(format!("bad number {s:?} in range {text:?}: {e}")))
    };
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "range {text:?} must be start:stop:count"
            )));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad count in range {text:?}: {e}")))?;
        if count > MAX_SWEEP_ROWS {
            return Err(Error::InvalidArgument(format!(
                "range {text:?} has {count} points, the limit is {MAX_SWEEP_ROWS}"
            )));
        }
        return Ok(match count {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..count)
                .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
                .collect(),
        });
    }
    t.split(',').map(num).collect()
}

fn range_values(spec: &RangeSpec) -> Result<Vec<f64>> {
    match spec {
        RangeSpec::List(v) => Ok(v.clone()),
        RangeSpec::Text(s) => parse_range(s),
    }
}

fn windings(values: Vec<f64>) -> Result<Vec<u32>> {
    values
        .into_iter()
        .map(|v| {
            if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(Error::InvalidArgument(format!(
                    "winding number must be an integer, got {v}"
                )))
            }
        })
        .collect()
}

/// Merge command-line flags over the config file over the defaults.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let g = &cli.global;
    let d = RunConfig::default();
    let mut c = RunConfig {
        out: g.out.clone().or(file.out.clone()),
        format: g.format.or(file.format).unwrap_or(d.format),
        rmax: g.rmax.or(file.rmax).unwrap_or(d.rmax),
        r0: g.r0.or(file.r0).unwrap_or(d.r0),
        grid: g.grid.map(GridScheme::from).or(file.grid).unwrap_or(d.grid),
        nodes: g.nodes.or(file.nodes).unwrap_or(d.nodes),
        tol_bc: g.tol_bc.or(file.tol_bc).unwrap_or(d.tol_bc),
        tol_res: g.tol_res.or(file.tol_res).unwrap_or(d.tol_res),
        general: file.general.unwrap_or(d.general),
        quad_nr: file.quad_nr.unwrap_or(d.quad_nr),
        quad_ntheta: file.quad_ntheta.unwrap_or(d.quad_ntheta),
        derrick: file.derrick.unwrap_or(d.derrick),
        q: match &file.q {
            Some(q) => range_values(q)?,
            None => d.q.clone(),
        },
        plot_data: file.plot_data.clone(),
        delta_z: file.delta_z.unwrap_or(d.delta_z),
        ..d
    };

    let (source, coupling) = match &cli.command {
        Command::Profile(a) => {
            c.command = "profile".into();
            (Some(&a.source), &a.source.coupling)
        }
        Command::Charge(a) => {
            c.command = "charge".into();
            c.general |= a.general;
            c.quad_nr = a.quad_nr.unwrap_or(c.quad_nr);
            c.quad_ntheta = a.quad_ntheta.unwrap_or(c.quad_ntheta);
            c.plot_data = a.plot_data.clone().or(c.plot_data);
            c.delta_z = a.delta_z.unwrap_or(c.delta_z);
            (Some(&a.source), &a.source.coupling)
        }
        Command::Energy(a) => {
            c.command = "energy".into();
            c.derrick |= a.derrick;
            if let Some(q) = &a.q {
                c.q = parse_range(q)?;
            }
            c.plot_data = a.plot_data.clone().or(c.plot_data);
            (Some(&a.source), &a.source.coupling)
        }
        Command::Sweep(a) => {
            c.command = "sweep".into();
            c.delta_z = a.delta_z.unwrap_or(c.delta_z);
            if g.format.is_none() && file.format.is_none() {
                c.format = Format::Csv;
            }
            (None, &a.coupling)
        }
    };

    // a profile file supplies its own coupling below the config file
    let mut base = Coupling::sigma(1)?;
    let mut profile_kfam = None;
    c.profile = source
        .and_then(|s| s.profile.clone())
        .or(file.profile.clone());
    if matches!(cli.command, Command::Sweep(_)) {
        c.profile = None;
    }
    if let Some(p) = &c.profile {
        let meta: ProfileSidecar =
            serde_json::from_str(&std::fs::read_to_string(crate::profile::sidecar_path(p))?)?;
        base = meta.coupling;
        profile_kfam = meta.family_constant;
    }
    c.n = source.and_then(|s| s.n).or(file.n).unwrap_or(base.n);
    c.kappa = source
        .and_then(|s| s.kappa)
        .or(file.kappa)
        .unwrap_or(base.kappa);
    c.mk = source.and_then(|s| s.mk).or(file.mk).unwrap_or(base.mk);
    c.lambda = coupling.lambda.or(file.lambda).unwrap_or(base.lambda);
    c.chi = coupling.chi.or(file.chi).unwrap_or(base.chi);
    c.kfam = source
        .and_then(|s| s.kfam)
        .or(file.kfam)
        .or(profile_kfam)
        .unwrap_or(d.kfam);
    c.mode = coupling.mode.or(file.mode).unwrap_or(d.mode);
    c.a_lo = coupling.a_lo.or(file.a_lo).unwrap_or(d.a_lo);
    c.a_hi = coupling.a_hi.or(file.a_hi).unwrap_or(d.a_hi);

    if let Command::Sweep(a) = &cli.command {
        let axis =
            |flag: &Option<String>, key: &Option<RangeSpec>, scalar: f64| -> Result<Vec<f64>> {
                match (flag, key) {
                    (Some(s), _) => parse_range(s),
                    (None, Some(spec)) => range_values(spec),
                    (None, None) => Ok(vec![scalar]),
                }
            };
        c.sweep = Some(SweepRanges {
            n: windings(axis(&a.n, &file.sweep_n, c.n as f64)?)?,
            kfam: axis(&a.kfam, &file.sweep_kfam, c.kfam)?,
            kappa: axis(&a.kappa, &file.sweep_kappa, c.kappa)?,
            mk: axis(&a.mk, &file.sweep_mk, c.mk)?,
        });
    }
    c.validate()?;
    Ok(c)
}

/// Build the profile a command works on: read from file, closed form, or shot.
pub fn build_profile(cfg: &RunConfig, coupling: &Coupling) -> Result<Profile> {
    if let Some(p) = &cfg.profile {
        return read_profile(p);
    }
    let grid = cfg.radial_grid()?;
    match cfg.mode {
        Mode::Exact => exact_sigma_profile(cfg.kfam, coupling.n, &grid),
        Mode::Shoot => {
            let mut opts = ShootOptions::new(grid).with_family_constant(cfg.kfam, coupling.n);
            opts.bracket = (cfg.a_lo, cfg.a_hi);
            opts.tol_bc = cfg.tol_bc;
            opts.tol_res = cfg.tol_res;
            shoot_with(coupling, &opts)
        }
    }
}

/// Output sink: the `--out` file or the given stdout.
fn sink<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Flatten a JSON object of scalars into a one-row CSV.
fn write_scalar_csv(w: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("report is not a JSON object".into()))?;
    let mut keys = Vec::new();
    let mut vals = Vec::new();
    for (k, v) in obj {
        match v {
            serde_json::Value::Number(_) | serde_json::Value::Bool(_) => {
                keys.push(k.clone());
                vals.push(v.to_string());
            }
            serde_json::Value::Null => {
                keys.push(k.clone());
                vals.push(String::new());
            }
            _ => {}
        }
    }
    let mut csv = csv::Writer::from_writer(&mut *w);
    csv.write_record(&keys)?;
    csv.write_record(&vals)?;
    csv.flush()?;
    Ok(())
}

fn write_xy(path: &Path, header: [&str; 2], rows: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for (x, y) in rows {
        w.write_record([format!("{x:.16e}"), format!("{y:.16e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct WithConfig<'a, T: Serialize> {
    #[serde(flatten)]
    report: &'a T,
    config: &'a RunConfig,
}

fn emit_report<T: Serialize>(cfg: &RunConfig, report: &T, stdout: &mut dyn Write) -> Result<()> {
    let doc = serde_json::to_value(WithConfig {
        report,
        config: cfg,
    })?;
    let mut w = sink(&cfg.out, stdout)?;
    match cfg.format {
        Format::Json => write_json(&mut *w, &doc),
        Format::Csv => write_scalar_csv(&mut *w, &doc),
    }
}

#[derive(Serialize)]
struct ProfileSummary<'a> {
    provenance: crate::profile::Provenance,
    n: u32,
    family_constant: Option<f64>,
    a: f64,
    iterations: usize,
    residual: f64,
    f_rmax: f64,
    warnings: &'a [String],
}

pub fn cmd_profile(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let coupling = cfg.coupling()?;
    let profile = build_profile(cfg, &coupling)?;
    let residual = match profile.solve_info() {
        Some(s) => s.residual,
        None => profile.residual()?,
    };
    let fr = *profile.f().last().expect("grid is non-empty");
    let summary = ProfileSummary {
        provenance: profile.provenance(),
        n: profile.n(),
        family_constant: profile.family_constant(),
        a: profile.series_coeffs().a,
        iterations: profile.solve_info().map_or(0, |s| s.iterations),
        residual,
        f_rmax: fr,
        warnings: profile.solve_info().map_or(&[], |s| &s.warnings),
    };
    writeln!(stderr, "{}", serde_json::to_string(&summary)?)?;

    let mut meta = ProfileSidecar::of(&profile, cfg.tolerances());
    meta.config = Some(serde_json::to_value(cfg)?);
    if let Some(out) = &cfg.out {
        write_profile_with(&profile, out, meta.clone())?;
        if cfg.format == Format::Json {
            write_json(stdout, &meta)?;
        }
        return Ok(());
    }
    match cfg.format {
        Format::Json => write_json(stdout, &meta),
        Format::Csv => {
            writeln!(stdout, "r,f,fprime")?;
            for ((r, f), d) in profile.r().iter().zip(profile.f()).zip(profile.fprime()) {
                writeln!(stdout, "{r:.16e},{f:.16e},{d:.16e}")?;
            }
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn cmd_charge(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let coupling = cfg.coupling()?;
    let profile = build_profile(cfg, &coupling)?;
    let quad = cfg.quadrature();
    let report = charge_report(
        &profile,
        &coupling,
        cfg.delta_z,
        cfg.general.then_some(&quad),
    )?;
    if let Some(p) = &cfg.plot_data {
        let rows = profile
            .r()
            .iter()
            .map(|&r| Ok((r, hopf_density(&profile, &coupling, r)?)))
            .collect::<Result<Vec<_>>>()?;
        write_xy(p, ["r", "density"], &rows)?;
    }
    emit_report(cfg, &report, stdout)
}

pub fn cmd_energy(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let coupling = cfg.coupling()?;
    let profile = build_profile(cfg, &coupling)?;
    let report = energy_report(&profile, &coupling, cfg.derrick.then_some(cfg.q.as_slice()))?;
    if let Some(p) = &cfg.plot_data {
        write_xy(p, ["r", "sigma"], &report.density)?;
    }
    emit_report(cfg, &report, stdout)
}

/// One sweep row. Failures are recorded in `error`, never raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub kfam: f64,
    pub kappa: f64,
    pub mk: f64,
    pub converged: bool,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub hopf_per_length: Option<f64>,
    pub mu: Option<f64>,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: [&str; 9] = [
    "n",
    "kfam",
    "kappa",
    "mk",
    "converged",
    "T",
    "hopf_per_length",
    "mu",
    "error",
];

fn sweep_row(cfg: &RunConfig, (n, kfam, kappa, mk): (u32, f64, f64, f64)) -> SweepRow {
    let mut row = SweepRow {
        n,
        kfam,
        kappa,
        mk,
        converged: false,
        t: None,
        hopf_per_length: None,
        mu: None,
        error: None,
    };
    let run = |row: &mut SweepRow| -> Result<()> {
        let c = Coupling::new(n, mk, cfg.chi, cfg.lambda, kappa)?;
        let local = RunConfig {
            kfam,
            n,
            kappa,
            mk,
            ..cfg.clone()
        };
        let profile = build_profile(&local, &c)?;
        row.converged = true;
        row.t = Some(topo_charge_axisym(&profile, n)?.t);
        row.hopf_per_length = Some(hopf_charge(&profile, &c, cfg.delta_z)?.per_length);
        row.mu = match energy_per_length(&profile, &c) {
            Ok(mu) => Some(mu),
            Err(Error::Divergent(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(())
    };
    if let Err(e) = run(&mut row) {
        row.error = Some(e.to_string());
    }
    row
}

/// All rows of the sweep in deterministic (`n`-major) order.
pub fn sweep_rows(cfg: &RunConfig) -> Vec<SweepRow> {
    let tuples = cfg
        .sweep
        .as_ref()
        .map(SweepRanges::tuples)
        .unwrap_or_default();
    tuples.into_par_iter().map(|t| sweep_row(cfg, t)).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv(w: &mut dyn Write, rows: &[SweepRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(SWEEP_HEADER)?;
    for r in rows {
        csv.write_record([
            r.n.to_string(),
            r.kfam.to_string(),
            r.kappa.to_string(),
            r.mk.to_string(),
            r.converged.to_string(),
            opt(r.t),
            opt(r.hopf_per_length),
            opt(r.mu),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let rows = sweep_rows(cfg);
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    writeln!(
        stderr,
        "{}",
        serde_json::json!({ "rows": rows.len(), "failed": failed, "config": cfg })
    )?;
    let mut w = sink(&cfg.out, stdout)?;
    match cfg.format {
        Format::Csv => {
            write_sweep_csv(&mut *w, &rows)?;
            if let Some(out) = &cfg.out {
                let side = crate::profile::sidecar_path(out);
                std::fs::write(side, serde_json::to_string_pretty(cfg)? + "\n")?;
            }
            Ok(())
        }
        Format::Json => write_json(&mut *w, &serde_json::json!({ "rows": rows, "config": cfg })),
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    kind: &'a str,
    code: i32,
    message: String,
}

fn report_error(stderr: &mut dyn Write, err: &Error) -> i32 {
    let kind = err.kind();
    let rec = ErrorRecord {
        kind: kind.as_str(),
        code: kind.exit_code(),
        message: err.to_string(),
    };
    let _ = writeln!(
        stderr,
        "{}",
        serde_json::json!({ "error": serde_json::to_value(&rec).unwrap_or_default() })
    );
    kind.exit_code()
}

/// Run the tool on `args` (including the program name) and return the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(
                e.kind(),
                K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = write!(stdout, "{}", e.render());
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand {
                    2
                } else {
                    0
                };
            }
            return report_error(
                stderr,
                &Error::InvalidArgument(e.render().to_string().trim().to_string()),
            );
        }
    };
    let result = resolve(&cli).and_then(|cfg| match &cli.command {
        Command::Profile(_) => cmd_profile(&cfg, stdout, stderr),
        Command::Charge(_) => cmd_charge(&cfg, stdout),
        Command::Energy(_) => cmd_energy(&cfg, stdout),
        Command::Sweep(_) => cmd_sweep(&cfg, stdout, stderr),
    });
    match result {
        Ok(()) => 0,
        Err(e) => report_error(stderr, &e),
    }
}

/// [`run`] on the process arguments and standard streams.
pub fn main_with_std() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("skyrmion-string").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_range("").unwrap().is_empty());
        assert!(parse_range("0:1:0").unwrap().is_empty());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("a,b").is_err());
        assert!(parse_range("0:1:20000").is_err());
    }

    #[test]
    fn validation_errors_exit_2() {
        let (code, _, err) = run_cli(&["profile", "--n", "0"]);
        assert_eq!(code, 2, "{err}");
        assert!(err.contains("\"validation\""));
        let (code, _, _) = run_cli(&["charge", "--delta-z", "0"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_cli(&["charge", "--bogus"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_cli(&["sweep", "--n", "1:100:101", "--kappa", "0:1:101"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn charge_report_examples() {
        let (code, out, err) = run_cli(&["charge", "--n", "1"]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["T"].as_f64().unwrap() + 1.0).abs() < 1e-8);
        assert_eq!(v["config"]["command"], "charge");

        let (code, out, _) = run_cli(&["charge", "--mk", "1", "--delta-z", "1", "--n", "1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["C"].as_f64().unwrap() + 2.0 / std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn energy_twisted_divergence_exits_4() {
        let (code, _, err) = run_cli(&["energy", "--mk", "0.5"]);
        assert_eq!(code, 4);
        assert!(err.contains("divergent"));
    }
}
