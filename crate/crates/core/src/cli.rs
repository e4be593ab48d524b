//! Command-line front end.
//!
//! Values come from defaults, then an optional flat JSON file (`--config`),
//! then flags. Exit codes: 0 success, 2 configuration error, 3 solver failure,
//! 1 for I/O errors.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band::{
    energy_report, extrude_generalized, s_inf_limits, sigma, BandConfig, BandSolver, EnergyReport,
    GeneralizedEigenfunction, SigmaConfig, TauGrid,
};
use crate::bounds::{bound_row, sigma_lower_bound, small_angle_upper_bound, z_tau0_bound, BoundRow, QuasimodeBound};
use crate::error::{Error, Result};
use crate::fem2d::{boundary_ratio, decay_rate, write_eigenvector, Order};
use crate::format::fmt_num;
use crate::geometry::{canonicalize, face_angles, GeometryClass, MagneticField};
use crate::report::{band_csv, bound_csv, report_csv, sigma_csv, Plot, ReportRow, Series};
use crate::spec1d::{constants, DEFAULT_NODES};

pub const THREADS_ENV: &str = "WEDGE_SPECTRA_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "wedge-spectra", version, about = "Ground energy of the magnetic Laplacian on infinite wedges")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Theta0, xi0, Xi0, tau0 and sqrt(4 - pi).
    Constants,
    /// Band function of the sector operator on a tau grid.
    Band,
    /// Fiber ground states exported node by node.
    Eigenfunctions,
    /// Ground energy against the opening angle.
    SweepAlpha,
    /// Ground energy, comparison energies and quasimode bounds for one wedge.
    Compare,
    /// The half-space curve sigma(theta) and its lower bound.
    SigmaTable,
}

/// Flags shared by every subcommand. Angles accept a `pi` suffix: `0.8pi`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Opts {
    /// Flat JSON file with the same keys as the flags (underscored).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Field components `b1,b2,b3`; normalized.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub field: Option<Vec<f64>>,
    /// Polar angle of the field from the edge.
    #[arg(long, global = true, value_parser = parse_angle)]
    pub gamma: Option<f64>,
    /// Angle of the in-plane projection from the x2 axis.
    #[arg(long, global = true, value_parser = parse_angle)]
    pub theta: Option<f64>,
    /// Opening angle.
    #[arg(long, global = true, value_parser = parse_angle)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_angle)]
    pub alpha_list: Option<Vec<f64>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau_max: Option<f64>,
    #[arg(long, global = true)]
    pub tau_step: Option<f64>,
    /// Fourier parameters of the exported eigenfunctions.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub tau_list: Option<Vec<f64>>,
    /// Side of the truncated square before mapping to the rhombus.
    #[arg(long = "L", global = true)]
    pub length: Option<f64>,
    /// Cells per side.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Polynomial degree, 1 or 2.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of angles in the sigma table.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
}

/// `1.2`, `0.8pi`, `pi/2`, `4pi/5`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b.trim().parse::<f64>().map_err(|e| format!("bad angle '{s}': {e}"))?),
        None => (t, 1.0),
    };
    let num = num.trim();
    let value = if let Some(head) = num.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*');
        let k = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|e| format!("bad angle '{s}': {e}"))? };
        k * PI
    } else {
        num.parse::<f64>().map_err(|e| format!("bad angle '{s}': {e}"))?
    };
    Ok(value / den)
}

/// File form of the options; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: Option<[f64; 3]>,
    pub gamma: Option<f64>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_list: Option<Vec<f64>>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_step: Option<f64>,
    pub tau_list: Option<Vec<f64>>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub n: Option<usize>,
    pub order: Option<u32>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())))
    }

    /// Flags win over file values.
    pub fn merge(mut self, o: &Opts) -> Result<Self> {
        if let Some(f) = &o.field {
            if f.len() != 3 {
                return Err(Error::InvalidArgument(format!("--field needs three components, got {}", f.len())));
            }
            self.field = Some([f[0], f[1], f[2]]);
            self.gamma = None;
            self.theta = None;
        }
        if o.gamma.is_some() || o.theta.is_some() {
            if o.field.is_some() {
                return Err(Error::InvalidArgument("give either --field or --gamma/--theta".into()));
            }
            self.field = None;
            self.gamma = o.gamma.or(self.gamma);
            self.theta = o.theta.or(self.theta);
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if o.$f.is_some() { self.$f = o.$f.clone(); } )* };
        }
        take!(alpha, alpha_list, tau_min, tau_max, tau_step, tau_list, length, n, order, tol, points, out, format);
        Ok(self)
    }
}

/// Validated configuration of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub field: MagneticField,
    pub alpha: f64,
    pub alpha_list: Vec<f64>,
    pub band: BandConfig,
    pub tau_list: Vec<f64>,
    pub points: usize,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved> {
        let field = match (self.field, self.gamma, self.theta) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(Error::InvalidArgument("give either field or gamma/theta".into()))
            }
            (Some(b), None, None) => MagneticField::new(b[0], b[1], b[2])?,
            (None, Some(g), Some(t)) => MagneticField::from_spherical(g, t)?,
            (None, None, None) => MagneticField::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0)?,
            _ => return Err(Error::InvalidArgument("gamma and theta must be given together".into())),
        };
        let defaults = BandConfig::default();
        let order = match self.order {
            Some(d) => Order::from_degree(d)?,
            None => defaults.order,
        };
        let taus = TauGrid {
            min: self.tau_min.unwrap_or(defaults.taus.min),
            max: self.tau_max.unwrap_or(defaults.taus.max),
            step: self.tau_step.unwrap_or(defaults.taus.step),
        };
        let band = BandConfig {
            length: self.length.unwrap_or(defaults.length),
            n: self.n.unwrap_or(defaults.n),
            order,
            tol: self.tol.unwrap_or(defaults.tol),
            taus,
            ..defaults
        };
        band.validate()?;
        let alpha = self.alpha.unwrap_or(0.8 * PI);
        let alpha_list = self.alpha_list.clone().unwrap_or_else(|| (1..=9).map(|k| k as f64 * 0.1 * PI).collect());
        let tau_list = self.tau_list.clone().unwrap_or_else(|| (-3..=4).map(f64::from).collect());
        if tau_list.is_empty() || tau_list.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("tau list must be a non-empty list of numbers".into()));
        }
        let points = self.points.unwrap_or(10);
        if points < 2 {
            return Err(Error::InvalidArgument("the sigma table needs at least 2 points".into()));
        }
        let mut formats = self.format.clone().unwrap_or_else(|| vec![Format::Csv]);
        formats.sort_by_key(|f| *f as u8);
        formats.dedup();
        Ok(Resolved {
            field,
            alpha,
            alpha_list,
            band,
            tau_list,
            points,
            out: self.out.clone().unwrap_or_else(|| PathBuf::from("wedge-spectra-out")),
            formats,
        })
    }
}

impl Resolved {
    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        fs::write(self.out.join(name), contents)?;
        Ok(())
    }

    fn plot(&self, plot: &Plot, stem: &str) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        plot.write(&self.out, stem)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.02 * PI && alpha < 0.98 * PI) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {} pi outside (0.02 pi, 0.98 pi); small openings are covered by the bounds",
            alpha / PI
        )));
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Maps an error to the documented exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_solver_failure() {
        EXIT_SOLVER
    } else if matches!(e, Error::Io(_)) {
        EXIT_IO
    } else {
        EXIT_CONFIG
    }
}

/// Builds the global worker pool, capped by `WEDGE_SPECTRA_THREADS`.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    let n = n.min(std::thread::available_parallelism().map(|p| p.get()).unwrap_or(n));
    // a pool that already exists (tests, embedding) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args`, runs the command and returns the exit code.
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
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    init_threads()?;
    let file = match &cli.opts.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cfg = file.merge(&cli.opts)?.resolve()?;
    match cli.command {
        Command::Constants => cmd_constants(&cfg),
        Command::Band => cmd_band(&cfg),
        Command::Eigenfunctions => cmd_eigenfunctions(&cfg),
        Command::SweepAlpha => cmd_sweep_alpha(&cfg),
        Command::Compare => cmd_compare(&cfg),
        Command::SigmaTable => cmd_sigma_table(&cfg),
    }
}

#[derive(Debug, Clone, Serialize)]
struct ConstantsReport {
    #[serde(rename = "Theta0")]
    theta0: f64,
    xi0: f64,
    #[serde(rename = "Xi0")]
    big_xi0: f64,
    tau0: f64,
    sqrt_4_minus_pi: f64,
    chain_holds: bool,
    grid_nodes: usize,
    minimizer_tol: f64,
}

pub fn cmd_constants(cfg: &Resolved) -> Result<i32> {
    let c = constants();
    let bound = (4.0 - PI).sqrt();
    let r = ConstantsReport {
        theta0: c.theta0_value(),
        xi0: c.theta0.arg,
        big_xi0: c.xi0_value(),
        tau0: c.xi0.arg,
        sqrt_4_minus_pi: bound,
        chain_holds: c.theta0_value() < c.xi0_value() && c.xi0_value() <= bound,
        grid_nodes: DEFAULT_NODES,
        minimizer_tol: 1e-7,
    };
    let rows = [
        ("Theta0", r.theta0),
        ("xi0", r.xi0),
        ("Xi0", r.big_xi0),
        ("tau0", r.tau0),
        ("sqrt(4-pi)", r.sqrt_4_minus_pi),
    ];
    for (name, v) in rows {
        println!("{name:<11} {}", fmt_num(v));
    }
    println!("Theta0 < Xi0 <= sqrt(4-pi): {}", r.chain_holds);
    println!("grid nodes {}, minimizer tol {}", r.grid_nodes, fmt_num(r.minimizer_tol));
    if cfg.wants(Format::Csv) {
        let mut s = String::from("name,value\n");
        for (name, v) in rows {
            s.push_str(&format!("{name},{}\n", fmt_num(v)));
        }
        cfg.write("constants.csv", &s)?;
    }
    if cfg.wants(Format::Json) {
        cfg.write("constants.json", &json(&r)?)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
struct BandOutput<'a> {
    field: MagneticField,
    alpha: f64,
    theta_plus: f64,
    theta_minus: f64,
    klass: GeometryClass,
    /// Predicted limits at `tau -> -inf` and `tau -> +inf`.
    s_inf_limits: (f64, f64),
    band: &'a crate::band::BandFunction,
}

pub fn cmd_band(cfg: &Resolved) -> Result<i32> {
    let geom = face_angles(&cfg.field, cfg.alpha)?;
    let taus = cfg.band.taus.points()?;
    let solver = BandSolver::new(&cfg.field, cfg.alpha, &cfg.band)?;
    let band = solver.scan(&taus)?;
    let limits = s_inf_limits(&geom, &cfg.band.sigma)?;
    println!("argmin tau {} min {}", fmt_num(band.argmin_tau), fmt_num(band.min_value));
    if cfg.wants(Format::Csv) {
        cfg.write("band.csv", &band_csv(&band))?;
    }
    if cfg.wants(Format::Json) {
        let out = BandOutput {
            field: cfg.field,
            alpha: cfg.alpha,
            theta_plus: geom.theta_plus,
            theta_minus: geom.theta_minus,
            klass: geom.klass,
            s_inf_limits: limits,
            band: &band,
        };
        cfg.write("band.json", &json(&out)?)?;
    }
    if cfg.wants(Format::Svg) {
        let (t0, t1) = (band.taus[0], band.taus[band.taus.len() - 1]);
        let curve: Vec<(f64, f64)> = band.taus.iter().copied().zip(band.values.iter().copied()).collect();
        let plot = Plot {
            title: format!("band function, alpha = {} pi", fmt_num(cfg.alpha / PI)),
            xlabel: "tau".into(),
            ylabel: "s(tau)".into(),
            series: vec![
                Series::line("s(tau)", curve, "black"),
                Series::level("sigma(theta+)", sigma(geom.theta_plus, &cfg.band.sigma)?, t0, t1, "#c0392b"),
                Series::level("sigma(theta-)", sigma(geom.theta_minus, &cfg.band.sigma)?, t0, t1, "#2471a3"),
            ],
        };
        cfg.plot(&plot, "band")?;
    }
    Ok(EXIT_OK)
}

/// Summary of one exported fiber ground state.
#[derive(Debug, Clone, Serialize)]
pub struct EigenSummary {
    pub tau: f64,
    pub s_value: f64,
    pub residual: f64,
    /// Distance from the `|v|^2`-weighted centroid to the zero line of the potential.
    pub centroid_distance: f64,
    pub decay_rate: f64,
    pub boundary_ratio: f64,
    pub max_abs_imag: f64,
    pub file: String,
    pub generalized: GeneralizedEigenfunction,
}

fn tau_label(tau: f64) -> String {
    fmt_num(tau).replace('-', "m")
}

pub fn cmd_eigenfunctions(cfg: &Resolved) -> Result<i32> {
    let solver = BandSolver::new(&cfg.field, cfg.alpha, &cfg.band)?;
    let mesh = solver.mesh();
    let pairs: Vec<Result<_>> = cfg.tau_list.par_iter().map(|&t| solver.pair(t, None)).collect();
    fs::create_dir_all(&cfg.out)?;
    let [b1, b2, _] = cfg.field.components();
    let in_plane = b1.hypot(b2);
    let mut rows = Vec::with_capacity(pairs.len());
    for (&tau, pair) in cfg.tau_list.iter().zip(pairs) {
        let pair = pair?;
        let name = format!("eigvec_tau_{}.txt", tau_label(tau));
        let mut text = Vec::new();
        write_eigenvector(&mut text, mesh, &pair)?;
        fs::write(cfg.out.join(&name), text)?;
        let (mut w, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for (p, v) in mesh.nodes.iter().zip(&pair.vector) {
            let m = v.norm_sqr();
            w += m;
            cx += m * p[0];
            cy += m * p[1];
        }
        let centroid_distance =
            if in_plane > 0.0 { ((cx / w) * b2 - (cy / w) * b1 - tau).abs() / in_plane } else { f64::NAN };
        rows.push(EigenSummary {
            tau,
            s_value: pair.value,
            residual: pair.residual,
            centroid_distance,
            decay_rate: decay_rate(&pair, mesh)?.value(),
            boundary_ratio: boundary_ratio(&pair, mesh),
            max_abs_imag: pair.vector.iter().fold(0.0, |m, v| m.max(v.im.abs())),
            generalized: extrude_generalized(&pair, tau, Some(name.clone())),
            file: name,
        });
    }
    for r in &rows {
        println!("tau {} s {} -> {}", fmt_num(r.tau), fmt_num(r.s_value), r.file);
    }
    if cfg.wants(Format::Csv) {
        let mut s = String::from("tau,s_value,residual,centroid_distance,decay_rate,boundary_ratio,max_abs_imag,file\n");
        for r in &rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_num(r.tau),
                fmt_num(r.s_value),
                fmt_num(r.residual),
                fmt_num(r.centroid_distance),
                fmt_num(r.decay_rate),
                fmt_num(r.boundary_ratio),
                fmt_num(r.max_abs_imag),
                r.file
            ));
        }
        cfg.write("eigenfunctions.csv", &s)?;
    }
    if cfg.wants(Format::Json) {
        cfg.write("eigenfunctions.json", &json(&rows)?)?;
    }
    Ok(EXIT_OK)
}

fn bounds_for(field: &MagneticField, alpha: f64, e_fem: Option<f64>) -> Result<Option<(BoundRow, f64)>> {
    if field.b2 <= 0.0 || alpha >= PI {
        return Ok(None);
    }
    Ok(Some((bound_row(field, alpha, e_fem)?, small_angle_upper_bound(field, alpha)?)))
}

pub fn cmd_sweep_alpha(cfg: &Resolved) -> Result<i32> {
    for &a in &cfg.alpha_list {
        check_alpha(a)?;
    }
    if cfg.alpha_list.is_empty() {
        return Err(Error::InvalidArgument("empty alpha list".into()));
    }
    let (field, _) = canonicalize(cfg.field.components())?;
    let taus = cfg.band.taus.points()?;
    let mut rows = Vec::new();
    let mut bound_rows = Vec::new();
    let mut solver_failed = false;
    for &alpha in &cfg.alpha_list {
        let geom = face_angles(&field, alpha)?;
        let outcome = BandSolver::new(&field, alpha, &cfg.band)
            .and_then(|s| s.scan(&taus))
            .and_then(|band| energy_report(&geom, &band, &cfg.band));
        match outcome {
            Ok(report) => {
                let bounds = bounds_for(&field, alpha, Some(report.energy))?;
                let row = ReportRow::from_report(&report, bounds.map(|b| b.1));
                if row.anomalous {
                    log::warn!("alpha = {} pi: E = {} above E* = {}", alpha / PI, report.energy, report.e_star);
                }
                println!("alpha {} pi E {} E* {}", fmt_num(alpha / PI), fmt_num(report.energy), fmt_num(report.e_star));
                rows.push(row);
                if let Some((b, _)) = bounds {
                    bound_rows.push(b);
                }
            }
            Err(e) => {
                if !e.is_solver_failure() {
                    return Err(e);
                }
                log::error!("alpha = {} pi failed: {e}", alpha / PI);
                solver_failed = true;
                rows.push(ReportRow::failed(alpha, geom.klass, e.to_string()));
            }
        }
    }
    if cfg.wants(Format::Csv) {
        cfg.write("sweep.csv", &report_csv(&rows))?;
        cfg.write("bounds.csv", &bound_csv(&bound_rows))?;
    }
    if cfg.wants(Format::Json) {
        cfg.write("sweep.json", &json(&rows)?)?;
        cfg.write("bounds.json", &json(&bound_rows)?)?;
    }
    if cfg.wants(Format::Svg) {
        let x = |r: &ReportRow| r.alpha / PI;
        let (x0, x1) = (x(&rows[0]), x(&rows[rows.len() - 1]));
        let c = constants();
        let plot = Plot {
            title: "ground energy against the opening".into(),
            xlabel: "alpha / pi".into(),
            ylabel: "energy".into(),
            series: vec![
                Series::line("E", rows.iter().map(|r| (x(r), r.energy)).collect(), "black"),
                Series::line("E*", rows.iter().map(|r| (x(r), r.e_star)).collect(), "#c0392b"),
                Series::level("b2 Xi0", field.b2 * c.xi0_value(), x0, x1, "#2471a3"),
                Series::level("Theta0", c.theta0_value(), x0, x1, "#7d3c98"),
            ],
        };
        cfg.plot(&plot, "sweep")?;
    }
    Ok(if solver_failed { EXIT_SOLVER } else { EXIT_OK })
}

/// Output of `compare`.
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub report: EnergyReport,
    pub bounds: Option<BoundRow>,
    pub bound_small_angle: Option<f64>,
    pub quasimode_z: Option<QuasimodeBound>,
}

pub fn cmd_compare(cfg: &Resolved) -> Result<i32> {
    let (field, _) = canonicalize(cfg.field.components())?;
    let geom = face_angles(&field, cfg.alpha)?;
    let solver = BandSolver::new(&field, cfg.alpha, &cfg.band)?;
    let band = solver.scan(&cfg.band.taus.points()?)?;
    let report = energy_report(&geom, &band, &cfg.band)?;
    let bounds = bounds_for(&field, cfg.alpha, Some(report.energy))?;
    let quasimode_z = if bounds.is_some() { Some(z_tau0_bound(&field, cfg.alpha)?) } else { None };
    let out = CompareReport {
        bounds: bounds.map(|b| b.0),
        bound_small_angle: bounds.map(|b| b.1),
        quasimode_z,
        report,
    };
    let text = json(&out)?;
    print!("{text}");
    cfg.write("compare.json", &text)?;
    if cfg.wants(Format::Csv) {
        cfg.write("compare.csv", &report_csv(&[ReportRow::from_report(&out.report, out.bound_small_angle)]))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_sigma_table(cfg: &Resolved) -> Result<i32> {
    let sc = SigmaConfig::default();
    let thetas: Vec<f64> = (0..cfg.points).map(|k| FRAC_PI_2 * k as f64 / (cfg.points - 1) as f64).collect();
    let values: Vec<Result<f64>> = thetas.par_iter().map(|&t| sigma(t, &sc)).collect();
    let mut rows = Vec::with_capacity(thetas.len());
    for (&t, v) in thetas.iter().zip(values) {
        rows.push((t, v?, sigma_lower_bound(t)));
    }
    for (t, v, l) in &rows {
        println!("theta {} sigma {} lower {}", fmt_num(*t), fmt_num(*v), fmt_num(*l));
    }
    if cfg.wants(Format::Csv) {
        cfg.write("sigma.csv", &sigma_csv(&rows))?;
    }
    if cfg.wants(Format::Json) {
        #[derive(Serialize)]
        struct Row {
            theta: f64,
            sigma: f64,
            sigma_lower: f64,
        }
        let r: Vec<Row> = rows.iter().map(|&(theta, sigma, sigma_lower)| Row { theta, sigma, sigma_lower }).collect();
        cfg.write("sigma.json", &json(&r)?)?;
    }
    if cfg.wants(Format::Svg) {
        let plot = Plot {
            title: "half-space ground energy".into(),
            xlabel: "theta".into(),
            ylabel: "sigma".into(),
            series: vec![
                Series::line("sigma", rows.iter().map(|r| (r.0, r.1)).collect(), "black"),
                Series::line("lower bound", rows.iter().map(|r| (r.0, r.2)).collect(), "#c0392b"),
            ],
        };
        cfg.plot(&plot, "sigma")?;
    }
    Ok(EXIT_OK)
}
