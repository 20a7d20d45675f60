//! Batch driver behind the `kincoerce` binary: configuration resolution, the
//! five campaigns (`gap`, `verify`, `decay`, `longrange`, `dyadic`), CSV rows
//! with provenance and two-column plot data.
//!
//! Every campaign is a pure function of a [`RunConfig`] and returns a
//! [`Report`]; the binary only parses arguments and writes files.

use crate::basis::GalerkinBasis;
use crate::boltzmann::{dirichlet_form_b, dyadic_matrices_b, post_collision, split_check_b, tail_gain_matrix_b, DyadicMatrices};
use crate::error::{Error, Result};
use crate::geometry::{bracket, random_in_ball, random_unit, Point};
use crate::kernels::{collision_frequency, CollisionKernel};
use crate::landau::{
    dirichlet_form_l, dyadic_matrices_l, poincare_check, tail_gain_matrix_l, weight_identity_check, BakryEmeryPotential,
    DiffusionMatrixField, PoincareMeasure,
};
use crate::longrange::{
    cancellation_constant, carleman_kernel, jacobian_constant, local_sobolev_curve, localized_maxwellian_profile, long_range_constants,
    long_range_matrices, psi_sigma, quadratic, radial_hessian_sup, sphere_average_estimate, C2Function, CarlemanOrders, GagliardoNorm,
    MollifiedIndicator,
};
use crate::maxwellian::{null_space_basis, MaxwellianParams};
use crate::quadrature::QuadratureRule;
use crate::spectral::{
    assemble_form, coercivity_constant, leading, operator_norm_estimate, rescaling_check, FormKind, GalerkinSetup, MatrixOperator, Model,
};
use crate::test_function::TestFunction;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Boltzmann,
    Landau,
    Longrange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PhiChoice {
    Power,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AngularChoice {
    Cutoff,
    Singular,
}

#[derive(Debug, Parser)]
#[command(name = "kincoerce", version, about = "Coercivity estimates for linearized collision operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Spectral gap and weighted coercivity constants over basis degrees.
    Gap(Flags),
    /// Named property checks with a summary exit status.
    Verify(Flags),
    /// Norms of the tail gain operators as the cut radius grows.
    Decay(Flags),
    /// Localized non-cutoff decomposition over angular truncations and radii.
    Longrange(Flags),
    /// Dyadic shell tables for both models.
    Dyadic(Flags),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Gap(_) => CommandKind::Gap,
            Command::Verify(_) => CommandKind::Verify,
            Command::Decay(_) => CommandKind::Decay,
            Command::Longrange(_) => CommandKind::Longrange,
            Command::Dyadic(_) => CommandKind::Dyadic,
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Gap(f) | Command::Verify(f) | Command::Decay(f) | Command::Longrange(f) | Command::Dyadic(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Gap,
    Verify,
    Decay,
    Longrange,
    Dyadic,
}

/// Command-line flags; the same keys are accepted in a config file, where
/// TOML section headers are allowed and ignored. Flags win over the file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub phi: Option<PhiChoice>,
    #[arg(long = "b", value_enum)]
    pub b: Option<AngularChoice>,
    #[arg(long = "theta-min")]
    #[serde(alias = "theta-min")]
    pub theta_min: Option<f64>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long = "quad-hermite")]
    #[serde(alias = "quad-hermite")]
    pub quad_hermite: Option<usize>,
    #[arg(long = "quad-sphere")]
    #[serde(alias = "quad-sphere")]
    pub quad_sphere: Option<usize>,
    #[arg(long = "dyadic-R")]
    #[serde(alias = "dyadic-R", alias = "dyadic_R")]
    pub dyadic_ratio: Option<f64>,
    #[arg(long = "dyadic-nmax")]
    #[serde(alias = "dyadic-nmax")]
    pub dyadic_nmax: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Option<Vec<f64>>,
    #[arg(long = "T")]
    #[serde(alias = "T")]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! merge_flags {
    ($a:expr, $b:expr, $($f:ident),*) => {
        Flags { $($f: $a.$f.clone().or_else(|| $b.$f.clone()),)* }
    };
}

impl Flags {
    /// Field-wise `self` over `other`.
    pub fn or(&self, other: &Flags) -> Flags {
        merge_flags!(
            self,
            other,
            model,
            dim,
            gamma,
            alpha,
            phi,
            b,
            theta_min,
            degree,
            quad_hermite,
            quad_sphere,
            dyadic_ratio,
            dyadic_nmax,
            rho,
            u,
            temperature,
            seed,
            out,
            config
        )
    }

    /// Parse a config file. Keys may sit at the top level or under any section header.
    pub fn from_config_text(text: &str) -> Result<Flags> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut flat = toml::Table::new();
        flatten_into(&table, &mut flat)?;
        toml::Value::Table(flat).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn from_config_file(path: &Path) -> Result<Flags> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Flags::from_config_text(&text)
    }
}

fn flatten_into(table: &toml::Table, out: &mut toml::Table) -> Result<()> {
    for (k, v) in table {
        match v {
            toml::Value::Table(t) => flatten_into(t, out)?,
            other => {
                if out.insert(k.clone(), other.clone()).is_some() {
                    return Err(Error::Config(format!("key `{k}` appears twice")));
                }
            }
        }
    }
    Ok(())
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub dim: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub phi: PhiChoice,
    pub b: AngularChoice,
    pub theta_min: f64,
    pub degree: usize,
    pub quad_hermite: usize,
    pub quad_sphere: usize,
    pub dyadic_ratio: f64,
    pub dyadic_nmax: usize,
    pub rho: f64,
    pub u: Vec<f64>,
    pub temperature: f64,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Fill defaults for the command and validate parameter ranges.
    pub fn resolve(kind: CommandKind, flags: &Flags) -> Result<RunConfig> {
        let model = match kind {
            CommandKind::Longrange => ModelChoice::Longrange,
            _ => flags.model.unwrap_or(ModelChoice::Boltzmann),
        };
        if kind == CommandKind::Gap && model == ModelChoice::Longrange {
            return Err(Error::Config("gap runs the boltzmann or landau model".into()));
        }
        let dim = flags.dim.unwrap_or(if model == ModelChoice::Longrange { 2 } else { 3 });
        if dim != 2 && dim != 3 {
            return Err(Error::Config(format!("dim must be 2 or 3, got {dim}")));
        }
        let gamma = flags.gamma.unwrap_or(match kind {
            CommandKind::Longrange => 0.5,
            CommandKind::Dyadic => -1.0,
            _ => 0.0,
        });
        let n = dim as f64;
        let gamma_ok = match model {
            ModelChoice::Landau => (-n..=1.0).contains(&gamma),
            _ => gamma > -n && gamma <= 1.0,
        };
        if !gamma_ok {
            return Err(Error::Config(format!("gamma = {gamma} outside the admissible range for {model:?} in dimension {dim}")));
        }
        let b = flags.b.unwrap_or(if model == ModelChoice::Longrange { AngularChoice::Singular } else { AngularChoice::Cutoff });
        if model == ModelChoice::Longrange && b != AngularChoice::Singular {
            return Err(Error::Config("longrange needs --b singular".into()));
        }
        let alpha = flags.alpha.unwrap_or(if b == AngularChoice::Singular { 1.0 } else { 0.0 });
        if !(0.0..2.0).contains(&alpha) {
            return Err(Error::Config(format!("alpha = {alpha} outside [0, 2)")));
        }
        if model == ModelChoice::Longrange && alpha == 0.0 {
            return Err(Error::Config("the Gagliardo seminorm needs alpha in (0, 2)".into()));
        }
        let phi = flags.phi.unwrap_or(if gamma < 0.0 { PhiChoice::Truncated } else { PhiChoice::Power });
        if kind == CommandKind::Dyadic && (gamma >= 0.0 || phi != PhiChoice::Truncated) {
            return Err(Error::Config("dyadic needs gamma < 0 and --phi truncated".into()));
        }
        let theta_min = flags.theta_min.unwrap_or(1e-2);
        if !(theta_min > 0.0 && theta_min < PI / 2.0) {
            return Err(Error::Config(format!("theta_min = {theta_min} outside (0, pi/2)")));
        }
        let degree = flags.degree.unwrap_or(if dim == 2 { 8 } else { 6 });
        if !(2..=14).contains(&degree) {
            return Err(Error::Config(format!("degree {degree} outside [2, 14]")));
        }
        let defaults = QuadratureRule::new(dim);
        let quad_hermite = flags.quad_hermite.unwrap_or(defaults.hermite_order);
        let quad_sphere = flags.quad_sphere.unwrap_or(defaults.sphere.degree);
        if quad_hermite == 0 || quad_sphere == 0 {
            return Err(Error::Config("quadrature orders must be positive".into()));
        }
        let dyadic_ratio = flags.dyadic_ratio.unwrap_or(2.0);
        if !(dyadic_ratio > 1.0) {
            return Err(Error::Config(format!("dyadic ratio {dyadic_ratio} must exceed 1")));
        }
        let dyadic_nmax = flags.dyadic_nmax.unwrap_or(6);
        let rho = flags.rho.unwrap_or(PI.powf(n / 2.0));
        let temperature = flags.temperature.unwrap_or(0.5);
        let u = flags.u.clone().unwrap_or_else(|| vec![0.0; dim]);
        if u.len() != dim {
            return Err(Error::Config(format!("--u has {} components, expected {dim}", u.len())));
        }
        if !(rho > 0.0 && temperature > 0.0) || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("rho and T must be positive, u finite".into()));
        }
        Ok(RunConfig {
            model,
            dim,
            gamma,
            alpha,
            phi,
            b,
            theta_min,
            degree,
            quad_hermite,
            quad_sphere,
            dyadic_ratio,
            dyadic_nmax,
            rho,
            u,
            temperature,
            seed: flags.seed.unwrap_or(1),
            out: flags.out.clone(),
        })
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn kernel(&self) -> Result<CollisionKernel> {
        let k = match self.phi {
            PhiChoice::Power => CollisionKernel::power(self.dim, self.gamma)?,
            PhiChoice::Truncated => CollisionKernel::truncated(self.dim, self.gamma)?,
        };
        match self.b {
            AngularChoice::Cutoff => Ok(k),
            AngularChoice::Singular => k.with_singular(self.alpha, self.theta_min, true),
        }
    }

    pub fn quadrature(&self) -> QuadratureRule {
        QuadratureRule::with_orders(self.dim, self.quad_hermite, self.quad_sphere, 8)
    }

    pub fn params(&self) -> Result<MaxwellianParams> {
        let mut u = Point::zeros();
        for (i, x) in self.u.iter().enumerate() {
            u[i] = *x;
        }
        MaxwellianParams::new(self.dim, self.rho, u, self.temperature)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn model_label(&self) -> &'static str {
        match self.model {
            ModelChoice::Boltzmann => "boltzmann",
            ModelChoice::Landau => "landau",
            ModelChoice::Longrange => "longrange",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Logged measurement without a threshold.
    Info,
}

impl Status {
    fn from_pass(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

/// Columns that make a row reproducible on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config_hash: String,
    pub model: &'static str,
    pub dim: usize,
    pub gamma: f64,
    pub alpha: Option<f64>,
    pub degree: usize,
    pub quad_hermite: usize,
    pub quad_sphere: usize,
    pub theta_min: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub quantity: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub provenance: Provenance,
}

impl ResultRow {
    pub fn degree(mut self, d: usize) -> ResultRow {
        self.provenance.degree = d;
        self
    }

    pub fn theta(mut self, t: f64) -> ResultRow {
        self.provenance.theta_min = Some(t);
        self
    }

    pub fn model(mut self, m: &'static str) -> ResultRow {
        self.provenance.model = m;
        self
    }
}

pub const CSV_HEADER: &str = "quantity,value,tolerance,status,model,dim,gamma,alpha,degree,quad_hermite,quad_sphere,theta_min,seed,config_hash";

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Named curve written as `x y` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotCurve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub rows: Vec<ResultRow>,
    pub plots: Vec<PlotCurve>,
    /// Module errors raised by a campaign or one of its checks.
    pub errors: Vec<(String, Error)>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let p = &r.provenance;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.quantity,
                sci(r.value),
                opt(r.tolerance),
                r.status.label(),
                p.model,
                p.dim,
                sci(p.gamma),
                opt(p.alpha),
                p.degree,
                p.quad_hermite,
                p.quad_sphere,
                opt(p.theta_min),
                p.seed,
                p.config_hash
            );
        }
        s
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }

    /// 0 all pass, 1 check failure, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        if !self.errors.is_empty() {
            3
        } else if self.failures() > 0 {
            1
        } else {
            0
        }
    }

    /// Write the CSV and, next to it, one `<stem>.<curve>.dat` file per curve.
    pub fn write(&self, out: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", out.display()));
        std::fs::write(out, self.to_csv()).map_err(io)?;
        let stem = out.with_extension("");
        for c in &self.plots {
            let mut text = String::new();
            for (x, y) in &c.points {
                let _ = writeln!(text, "{} {}", sci(*x), sci(*y));
            }
            let path = PathBuf::from(format!("{}.{}.dat", stem.display(), c.name));
            std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

/// Row factory carrying the run's provenance.
struct Ctx {
    cfg: RunConfig,
    base: Provenance,
    report: Report,
}

impl Ctx {
    fn new(cfg: RunConfig) -> Ctx {
        let base = Provenance {
            config_hash: cfg.hash(),
            model: cfg.model_label(),
            dim: cfg.dim,
            gamma: cfg.gamma,
            alpha: (cfg.b == AngularChoice::Singular).then_some(cfg.alpha),
            degree: cfg.degree,
            quad_hermite: cfg.quad_hermite,
            quad_sphere: cfg.quad_sphere,
            theta_min: (cfg.b == AngularChoice::Singular).then_some(cfg.theta_min),
            seed: cfg.seed,
        };
        Ctx { cfg, base, report: Report::default() }
    }

    fn row(&self, quantity: impl Into<String>, value: f64, tolerance: Option<f64>, status: Status) -> ResultRow {
        ResultRow { quantity: quantity.into(), value, tolerance, status, provenance: self.base.clone() }
    }

    fn info(&self, quantity: impl Into<String>, value: f64) -> ResultRow {
        self.row(quantity, value, None, Status::Info)
    }

    /// `value ≤ tolerance`.
    fn at_most(&self, quantity: impl Into<String>, value: f64, tolerance: f64) -> ResultRow {
        self.row(quantity, value, Some(tolerance), Status::from_pass(value <= tolerance))
    }

    fn check(&self, quantity: impl Into<String>, value: f64, tolerance: Option<f64>, ok: bool) -> ResultRow {
        self.row(quantity, value, tolerance, Status::from_pass(ok))
    }

    fn push(&mut self, r: ResultRow) {
        self.report.rows.push(r);
    }

    fn plot(&mut self, name: impl Into<String>, points: Vec<(f64, f64)>) {
        self.report.plots.push(PlotCurve { name: name.into(), points });
    }

    /// Run one named step; an error becomes a failing row plus a report error.
    fn step(&mut self, name: &str, f: impl FnOnce(&mut Ctx) -> Result<()>) {
        if let Err(e) = f(self) {
            let r = self.row(format!("{name}.error.{}", e.name()), f64::NAN, None, Status::Fail);
            self.push(r);
            self.report.errors.push((name.to_string(), e));
        }
    }
}

fn random_coefficients(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random coefficients with the null-space component removed.
fn random_non_null(rng: &mut ChaCha8Rng, proj: &DMatrix<f64>) -> DVector<f64> {
    let c = random_coefficients(rng, proj.nrows());
    &c - proj * &c
}

fn rel_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Relative change of a vector of sampled values.
fn rel_change_vec(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Parse arguments, run, write output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let kind = cli.command.kind();
    let flags = cli.command.flags();
    let merged = match &flags.config {
        Some(path) => match Flags::from_config_file(path) {
            Ok(file) => flags.or(&file),
            Err(e) => {
                eprintln!("error: {}: {e}", e.name());
                return 2;
            }
        },
        None => flags.clone(),
    };
    let cfg = match RunConfig::resolve(kind, &merged) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            return 2;
        }
    };
    let out = cfg.out.clone();
    let report = run(kind, cfg);
    for (step, e) in &report.errors {
        eprintln!("error in {step}: {}: {e}", e.name());
    }
    match out {
        Some(path) => {
            if let Err(e) = report.write(&path) {
                eprintln!("error: {}: {e}", e.name());
                return 3;
            }
        }
        None => print!("{}", report.to_csv()),
    }
    report.exit_code()
}

pub fn run(kind: CommandKind, cfg: RunConfig) -> Report {
    let mut ctx = Ctx::new(cfg);
    match kind {
        CommandKind::Gap => ctx.step("gap", cmd_gap),
        CommandKind::Verify => cmd_verify(&mut ctx),
        CommandKind::Decay => ctx.step("decay", cmd_decay),
        CommandKind::Longrange => ctx.step("longrange", cmd_longrange),
        CommandKind::Dyadic => ctx.step("dyadic", cmd_dyadic),
    }
    ctx.report
}

fn cmd_gap(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg.clone();
    let k = cfg.kernel()?;
    let setup = GalerkinSetup::new(cfg.dim, cfg.degree, cfg.quadrature());
    let (form, weighted) = match cfg.model {
        ModelChoice::Landau => (FormKind::LandauDirichlet, FormKind::LandauRhs { gamma: cfg.gamma }),
        _ => (FormKind::BoltzmannDirichlet, FormKind::Mass { s: cfg.gamma }),
    };
    let d = assemble_form(form, &setup, &k)?;
    let mass = assemble_form(FormKind::Mass { s: 0.0 }, &setup, &k)?.matrix;
    let w = assemble_form(weighted, &setup, &k)?.matrix;
    let proj = setup.basis.null_projector();
    ctx.push(ctx.at_most("gap.form_asymmetry", d.asymmetry, 1e-7));
    let mut gaps = vec![];
    let mut consts = vec![];
    for deg in 2..=cfg.degree {
        let m = setup.basis.len_up_to(deg);
        let gap = coercivity_constant(&leading(&d.matrix, m), &leading(&mass, m), &leading(&proj, m))?;
        let wc = coercivity_constant(&leading(&d.matrix, m), &leading(&w, m), &leading(&proj, m))?;
        ctx.push(ctx.info(format!("gap.spectral_gap[d={deg}]"), gap.constant_estimate).degree(deg));
        ctx.push(ctx.info(format!("gap.weighted_constant[d={deg}]"), wc.constant_estimate).degree(deg));
        if deg == cfg.degree {
            let leak = (&proj * &gap.extremal).norm() / gap.extremal.norm();
            ctx.push(ctx.at_most("gap.extremal_null_component", leak, 1e-8));
            ctx.push(ctx.info("gap.extremal_cluster_size", gap.cluster.len() as f64));
        }
        gaps.push((deg as f64, gap.constant_estimate));
        consts.push((deg as f64, wc.constant_estimate));
    }
    let monotone = |v: &[(f64, f64)]| v.windows(2).all(|p| p[1].1 <= p[0].1 * (1.0 + 1e-10) + 1e-12);
    ctx.push(ctx.check("gap.spectral_gap_nonincreasing_in_degree", 0.0, None, monotone(&gaps)));
    ctx.push(ctx.check("gap.weighted_constant_nonincreasing_in_degree", 0.0, None, monotone(&consts)));
    let last = gaps.last().unwrap().1;
    let last_w = consts.last().unwrap().1;
    ctx.push(ctx.check("gap.weighted_constant_positive", last_w, None, last_w > 0.0));
    if cfg.gamma >= 0.0 {
        ctx.push(ctx.check("gap.spectral_gap_positive", last, None, last > 0.0));
    }
    if cfg.degree >= 4 {
        let at = |v: &[(f64, f64)], d: usize| v[d - 2].1;
        let prev = at(&gaps, cfg.degree - 2);
        ctx.push(ctx.info(format!("gap.spectral_gap_relative_change[d={}->{}]", cfg.degree - 2, cfg.degree), rel_change(last, prev)));
        ctx.push(ctx.info(format!("gap.spectral_gap_relative_decrease[d=4->{}]", cfg.degree), (at(&gaps, 4) - last) / at(&gaps, 4)));
        ctx.push(ctx.info(format!("gap.weighted_constant_relative_change[d=4->{}]", cfg.degree), rel_change(last_w, at(&consts, 4))));
    }
    ctx.plot("spectral_gap", gaps);
    ctx.plot("weighted_constant", consts);
    Ok(())
}

fn cmd_verify(ctx: &mut Ctx) {
    let cfg = ctx.cfg.clone();
    ctx.step("conservation", |c| {
        let mut rng = cfg.rng();
        let (mut mom, mut en) = (0.0f64, 0.0f64);
        for _ in 0..10_000 {
            let v = random_in_ball(&mut rng, cfg.dim, 5.0);
            let vs = random_in_ball(&mut rng, cfg.dim, 5.0);
            let s = random_unit(&mut rng, cfg.dim);
            let st = post_collision(&v, &vs, &s);
            let scale = v.norm() + vs.norm() + st.v_prime.norm() + st.v_star_prime.norm();
            mom = mom.max(st.momentum_defect().norm() / (f64::EPSILON * scale.max(f64::MIN_POSITIVE)));
            en = en.max(st.energy_defect());
        }
        c.push(c.at_most("conservation.momentum_defect_ulps", mom, 4.0));
        c.push(c.at_most("conservation.energy_relative_defect", en, 1e-12));
        Ok(())
    });
    ctx.step("null_space", |c| {
        let p = cfg.params()?;
        let q = cfg.quadrature();
        let k = cfg.kernel()?;
        let ns = null_space_basis(&p, &q)?;
        let (mut wb, mut wl) = (0.0f64, 0.0f64);
        for h in &ns.elements {
            let norm = crate::maxwellian::integrate_against_maxwellian(&p, &q, |v| h.eval(v).powi(2))?;
            wb = wb.max(dirichlet_form_b(h, &k, &p, &q)?.abs() / norm);
            wl = wl.max(dirichlet_form_l(h, &k, &p, &q)?.abs() / norm);
        }
        c.push(c.at_most("null_space.boltzmann_relative_form", wb, 1e-8).model("boltzmann"));
        c.push(c.at_most("null_space.landau_relative_form", wl, 1e-8).model("landau"));
        Ok(())
    });
    ctx.step("rescaling", |c| {
        let q = cfg.quadrature();
        // Rescaling in T is an identity only for homogeneous Φ.
        let k = match cfg.b {
            AngularChoice::Cutoff => CollisionKernel::power(cfg.dim, cfg.gamma)?,
            AngularChoice::Singular => CollisionKernel::power(cfg.dim, cfg.gamma)?.with_singular(cfg.alpha, cfg.theta_min, true)?,
        };
        let n = cfg.dim as f64;
        let mass = PI.powf(n / 2.0);
        let e1 = Point::new(1.0, 0.0, 0.0);
        let cases = [
            MaxwellianParams::new(cfg.dim, mass, Point::zeros(), 0.5)?,
            MaxwellianParams::new(cfg.dim, 2.0 * mass, Point::zeros(), 0.5)?,
            MaxwellianParams::new(cfg.dim, mass, e1, 0.5)?,
            MaxwellianParams::new(cfg.dim, mass, Point::zeros(), 1.0)?,
            cfg.params()?,
        ];
        let h = if cfg.dim == 3 { TestFunction::monomial(3, [2, 1, 1]) } else { TestFunction::monomial(2, [3, 1, 0]) };
        for (model, label) in [(Model::Boltzmann, "boltzmann"), (Model::Landau, "landau")] {
            let mut worst = 0.0f64;
            for p in &cases {
                worst = worst.max(rescaling_check(p, &h, model, &k, &q)?.residual());
            }
            c.push(c.at_most(format!("rescaling.{label}_max_relative_residual"), worst, 1e-7).model(label));
        }
        Ok(())
    });
    ctx.step("poincare", |c| {
        let q = cfg.quadrature();
        let p = MaxwellianParams::normalized(cfg.dim);
        let r = poincare_check(PoincareMeasure::Maxwellian, &TestFunction::coordinate(cfg.dim, 0), &p, &q)?;
        c.push(c.at_most("poincare.maxwellian_extremal_ratio_error", (r.ratio - 2.0).abs(), 1e-9));
        let h = TestFunction::monomial(cfg.dim, [1, 2, 0]);
        let w = poincare_check(PoincareMeasure::Weighted(cfg.gamma), &h, &p, &q)?;
        c.push(c.check("poincare.weighted_ratio", w.ratio, Some(w.constant), w.holds));
        Ok(())
    });
    ctx.step("hessian", |c| {
        let pot = BakryEmeryPotential::new(cfg.gamma, cfg.dim);
        let mut rng = cfg.rng();
        let mut min = f64::INFINITY;
        for _ in 0..10_000 {
            let v = random_in_ball(&mut rng, cfg.dim, 10.0);
            min = min.min(pot.min_hessian_eigenvalue(&v));
        }
        let target = 2.0 - cfg.gamma - 1e-10;
        c.push(c.check("hessian.min_eigenvalue", min, Some(target), min >= target));
        c.push(c.info("hessian.exact_infimum", pot.convexity_bound()));
        Ok(())
    });
    ctx.step("weight_identity", |c| {
        let q = cfg.quadrature();
        let p = cfg.params()?;
        let h = TestFunction::monomial(cfg.dim, [2, 1, 0]);
        let w = weight_identity_check(&h, cfg.gamma, &p, &q)?;
        c.push(c.at_most("weight_identity.relative_residual", w.residual.abs() / w.lhs.abs().max(1e-300), 1e-8));
        Ok(())
    });
    ctx.step("split", |c| {
        let k = cfg.kernel()?;
        if !k.is_cutoff() {
            c.push(c.info("split.skipped_non_cutoff", 0.0));
            return Ok(());
        }
        let q = cfg.quadrature();
        let p = MaxwellianParams::normalized(cfg.dim);
        let basis = std::sync::Arc::new(GalerkinBasis::new(cfg.dim, 3));
        let mut rng = cfg.rng();
        let mut worst = 0.0f64;
        for i in 0..10 {
            let h = TestFunction::galerkin(basis.clone(), random_coefficients(&mut rng, basis.len()), format!("h{i}"));
            let s = split_check_b(&h, &k, &p, &q)?;
            worst = worst.max(s.residual().abs() / (1.0 + s.dirichlet.abs()));
        }
        c.push(c.at_most("split.max_scaled_residual", worst, 1e-7));
        Ok(())
    });
    ctx.step("galerkin", |c| {
        let k = cfg.kernel()?;
        let setup = GalerkinSetup::new(cfg.dim, cfg.degree, cfg.quadrature());
        let proj = setup.basis.null_projector();
        let mass = assemble_form(FormKind::Mass { s: 0.0 }, &setup, &k)?.matrix;
        let n = mass.nrows();
        c.push(c.at_most("galerkin.mass_identity_error", (&mass - DMatrix::<f64>::identity(n, n)).amax(), 1e-10));
        for (form, label) in [(FormKind::BoltzmannDirichlet, "boltzmann"), (FormKind::LandauDirichlet, "landau")] {
            let d = assemble_form(form, &setup, &k)?;
            c.push(c.at_most(format!("galerkin.{label}_asymmetry"), d.asymmetry, 1e-7).model(label));
            let null_rows = (&d.matrix * &proj).amax() / d.matrix.amax();
            c.push(c.at_most(format!("galerkin.{label}_null_rows"), null_rows, 1e-8).model(label));
            let lo = nalgebra::SymmetricEigen::new(d.matrix.clone()).eigenvalues.min() / d.matrix.amax();
            c.push(c.check(format!("galerkin.{label}_min_eigenvalue_scaled"), lo, Some(-1e-8), lo >= -1e-8).model(label));
            let w = match form {
                FormKind::LandauDirichlet => assemble_form(FormKind::LandauRhs { gamma: cfg.gamma }, &setup, &k)?.matrix,
                _ => assemble_form(FormKind::Mass { s: cfg.gamma }, &setup, &k)?.matrix,
            };
            let mut prev = f64::INFINITY;
            let mut monotone = true;
            let mut leak = 0.0;
            for deg in [cfg.degree.saturating_sub(4).max(2), cfg.degree.saturating_sub(2).max(2), cfg.degree] {
                let m = setup.basis.len_up_to(deg);
                let r = coercivity_constant(&leading(&d.matrix, m), &leading(&w, m), &leading(&proj, m))?;
                monotone &= r.constant_estimate <= prev * (1.0 + 1e-10) + 1e-12;
                prev = r.constant_estimate;
                leak = (leading(&proj, m) * &r.extremal).norm() / r.extremal.norm();
            }
            c.push(c.check(format!("galerkin.{label}_constant_nonincreasing"), prev, None, monotone).model(label));
            c.push(c.at_most(format!("galerkin.{label}_extremal_null_component"), leak, 1e-8).model(label));
            if form == FormKind::BoltzmannDirichlet && k.is_cutoff() {
                let nu = assemble_form(FormKind::NuMass, &setup, &k)?.matrix;
                let c_w = coercivity_constant(&d.matrix, &w, &proj)?.constant_estimate;
                let c_nu = coercivity_constant(&d.matrix, &nu, &proj)?.constant_estimate;
                let p = MaxwellianParams::normalized(cfg.dim);
                let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
                for x in &setup.quadrature.nodes {
                    let r = collision_frequency(&k, &p, x)? / bracket(x).powf(cfg.gamma);
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
                let ratio = c_w / c_nu;
                let ok = ratio >= lo * (1.0 - 1e-9) && ratio <= hi * (1.0 + 1e-9);
                c.push(c.check("galerkin.weight_vs_frequency_constant_ratio", ratio, None, ok).model(label));
            }
        }
        Ok(())
    });
    ctx.step("diffusion_matrix", |c| {
        let k = cfg.kernel()?;
        let field = DiffusionMatrixField::sample(&k, &MaxwellianParams::normalized(cfg.dim), 8.0, 0.25, &cfg.quadrature())?;
        c.push(c.check("diffusion_matrix.c_lower", field.c_lower, None, field.c_lower > 0.0).model("landau"));
        c.push(c.info("diffusion_matrix.c_fit", field.c_fit).model("landau"));
        c.push(c.at_most("diffusion_matrix.rms_log_residual", field.rms_log_deviation, 0.1).model("landau"));
        Ok(())
    });
    ctx.step("longrange_geometry", |c| {
        let mut rng = cfg.rng();
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let v = random_in_ball(&mut rng, cfg.dim, 2.0);
            let vs = random_in_ball(&mut rng, cfg.dim, 2.0);
            let s = random_unit(&mut rng, cfg.dim);
            let psi = psi_sigma(&v, &vs, &s);
            let scale = (psi - v).norm() * (vs - v).norm();
            worst = worst.max((psi - v).dot(&(vs - v)).abs() / scale.max(f64::MIN_POSITIVE));
        }
        c.push(c.at_most("psi_sigma.orthogonality_defect", worst, 1e-10));
        let radius = 2.0;
        let p = MaxwellianParams::normalized(cfg.dim);
        let f = localized_maxwellian_profile(&p, radius);
        let bound = radial_hessian_sup(&f, radius + 1.0, 1e-2);
        let phi_fn = |w: &Point| f(w.norm());
        let phi = C2Function { value: &phi_fn, hessian_bound: bound };
        let mut violations = 0usize;
        let mut worst_ratio = 0.0f64;
        for _ in 0..1000 {
            let v = random_in_ball(&mut rng, cfg.dim, radius);
            let vs = random_in_ball(&mut rng, cfg.dim, radius);
            let rho = rng.gen_range(1e-3..1.0);
            let r = sphere_average_estimate(&phi, &v, &vs, rho, cfg.dim)?;
            violations += usize::from(!r.holds);
            worst_ratio = worst_ratio.max(r.value.abs() / r.bound);
        }
        c.push(c.check("taylor_bound.violations", violations as f64, Some(0.0), violations == 0));
        c.push(c.info("taylor_bound.max_value_over_bound", worst_ratio));
        let g = GagliardoNorm::new(cfg.dim, if cfg.alpha > 0.0 { cfg.alpha } else { 1.0 }, radius, 12, 4)?;
        let h = TestFunction::monomial(cfg.dim, [1, 2, 0]);
        let shifted = {
            let h = h.clone();
            TestFunction::from_fn(cfg.dim, "h+3", move |v| h.eval(v) + 3.0)
        };
        let base = g.seminorm_sq(&h);
        c.push(c.at_most("gagliardo.constant_shift_change", rel_change(g.seminorm_sq(&shifted), base), 1e-12));
        c.push(c.at_most("gagliardo.constant_value", g.seminorm_sq(&TestFunction::constant(cfg.dim, 2.0)), 0.0));
        Ok(())
    });
}

const DECAY_RADII: [f64; 7] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];

fn cmd_decay(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg.clone();
    let setup = GalerkinSetup::new(cfg.dim, cfg.degree, cfg.quadrature());
    let maxwell = CollisionKernel::maxwell(cfg.dim);
    let deg = setup.pair_degree();
    let half = (0..=cfg.degree).rev().find(|&d| 2 * setup.basis.len_up_to(d) <= setup.basis.len()).unwrap_or(0);
    let m_half = setup.basis.len_up_to(half);
    for (label, full) in [("boltzmann", FormKind::BoltzmannGain), ("landau", FormKind::LandauGain)] {
        let mut curve = vec![];
        let mut variational = true;
        for r in DECAY_RADII {
            let m = match full {
                FormKind::BoltzmannGain => tail_gain_matrix_b(&setup.basis, r, &setup.rotations, deg)?,
                _ => tail_gain_matrix_l(&setup.basis, r, &setup.rotations, deg)?,
            };
            let norm = operator_norm_estimate(&MatrixOperator(m.clone()), setup.basis.len())?;
            let small = operator_norm_estimate(&MatrixOperator(leading(&m, m_half)), m_half)?;
            variational &= small <= norm * (1.0 + 1e-10);
            ctx.push(ctx.info(format!("decay.{label}.norm[R={r}]"), norm).model(label));
            if r == 0.0 {
                let k_full = assemble_form(full, &setup, &maxwell)?.matrix;
                let full_norm = operator_norm_estimate(&MatrixOperator(k_full), setup.basis.len())?;
                ctx.push(ctx.at_most(format!("decay.{label}.zero_radius_vs_full"), rel_change(norm, full_norm), 1e-10).model(label));
            }
            curve.push((r, norm));
        }
        let at = |r: f64| curve.iter().find(|p| p.0 == r).unwrap().1;
        let window: Vec<f64> = curve.iter().filter(|p| p.0 >= 1.0 && p.0 <= 8.0).map(|p| p.1).collect();
        let strict = window.windows(2).all(|w| w[1] < w[0]);
        ctx.push(ctx.check(format!("decay.{label}.strictly_decreasing[R=1..8]"), 0.0, None, strict).model(label));
        let ratio = at(8.0) / at(1.0);
        ctx.push(ctx.row(format!("decay.{label}.ratio[R=8/R=1]"), ratio, Some(0.1), Status::from_pass(ratio < 0.1)).model(label));
        ctx.push(ctx.check(format!("decay.{label}.half_basis_never_larger"), m_half as f64, None, variational).model(label));
        ctx.plot(format!("decay_{label}"), curve);
    }
    Ok(())
}

/// Angular truncations of the long-range campaign; the last pair is the stability check.
pub const THETA_MINS: [f64; 3] = [4e-2, 2e-2, 1e-2];
pub const LONGRANGE_RADII: [f64; 2] = [1.0, 2.0];
const LONGRANGE_SAMPLES: usize = 50;

fn cmd_longrange(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg.clone();
    let setup = GalerkinSetup::new(cfg.dim, cfg.degree, cfg.quadrature());
    let proj = setup.basis.null_projector();
    let base = match cfg.phi {
        PhiChoice::Power => CollisionKernel::power(cfg.dim, cfg.gamma)?,
        PhiChoice::Truncated => CollisionKernel::truncated(cfg.dim, cfg.gamma)?,
    };
    let weighted = assemble_form(FormKind::Mass { s: cfg.gamma }, &setup, &base)?.matrix;
    let mut rng = cfg.rng();
    let samples: Vec<DVector<f64>> = (0..LONGRANGE_SAMPLES).map(|_| random_non_null(&mut rng, &proj)).collect();
    for radius in LONGRANGE_RADII {
        let g = GagliardoNorm::new(cfg.dim, cfg.alpha, radius, 24, cfg.degree)?.matrix(&setup.basis);
        let gag: Vec<f64> = samples.iter().map(|c| quadratic(&g, c)).collect();
        let mut per_theta = vec![];
        for theta in THETA_MINS {
            let k = base.with_singular(cfg.alpha, theta, true)?;
            let m = long_range_matrices(&setup.basis, &k, radius, &setup.rotations, 24)?;
            let consts = long_range_constants(&m, &g, &weighted, &proj)?;
            let i1: Vec<f64> = samples.iter().map(|c| quadratic(&m.i1, c)).collect();
            let i2: Vec<f64> = samples.iter().map(|c| quadratic(&m.i2, c)).collect();
            let c1_sample = i1.iter().zip(&gag).map(|(a, b)| a / b).fold(f64::INFINITY, f64::min);
            let i1_min = i1.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut i2_ok = true;
            for (c, v) in samples.iter().zip(&i2) {
                i2_ok &= v.abs() <= consts.c4 * quadratic(&weighted, c) * (1.0 + 1e-9) + 1e-12;
            }
            let tag = format!("R={radius},theta_min={theta:e}");
            ctx.push(ctx.check(format!("longrange.i1_min[{tag}]"), i1_min, Some(0.0), i1_min >= 0.0).theta(theta));
            ctx.push(ctx.check(format!("longrange.c1_sampled[{tag}]"), c1_sample, None, c1_sample > 0.0).theta(theta));
            ctx.push(ctx.info(format!("longrange.c1_galerkin[{tag}]"), consts.c1).theta(theta));
            ctx.push(ctx.info(format!("longrange.c4_galerkin[{tag}]"), consts.c4).theta(theta));
            ctx.push(ctx.check(format!("longrange.i2_bounded_by_c4[{tag}]"), consts.c4, None, i2_ok).theta(theta));
            ctx.push(ctx.info(format!("longrange.i1_sample_mean[{tag}]"), i1.iter().sum::<f64>() / i1.len() as f64).theta(theta));
            ctx.push(ctx.info(format!("longrange.i2_sample_mean[{tag}]"), i2.iter().sum::<f64>() / i2.len() as f64).theta(theta));
            ctx.push(ctx.info(format!("longrange.gagliardo_sample_mean[R={radius}]"), gag.iter().sum::<f64>() / gag.len() as f64).theta(theta));
            ctx.push(ctx.info(format!("longrange.i2_bilinear_asymmetry[{tag}]"), m.i2_asymmetry).theta(theta));
            if theta == cfg.theta_min && cfg.gamma > 0.0 {
                let d = assemble_form(FormKind::BoltzmannDirichlet, &setup, &k)?.matrix;
                let mut worst = f64::NEG_INFINITY;
                for ((c, gv), i2v) in samples.iter().zip(&gag).zip(&i2) {
                    worst = worst.max(gv - (quadratic(&d, c) + i2v.abs()) / c1_sample);
                }
                ctx.push(ctx.check(format!("longrange.local_sobolev_chain_excess[R={radius}]"), worst, Some(0.0), worst <= 1e-10).theta(theta));
            }
            per_theta.push((theta, i1, i2, c1_sample, consts));
        }
        let (a, b) = (&per_theta[1], &per_theta[2]);
        let tag = format!("R={radius},theta_min={:e}->{:e}", a.0, b.0);
        for (name, change) in [
            ("i1", rel_change_vec(&a.1, &b.1)),
            ("i2", rel_change_vec(&a.2, &b.2)),
            ("c1_sampled", rel_change(a.3, b.3)),
            ("c1_galerkin", rel_change(a.4.c1, b.4.c1)),
            ("c4_galerkin", rel_change(a.4.c4, b.4.c4)),
        ] {
            ctx.push(ctx.at_most(format!("longrange.theta_stability.{name}[{tag}]"), change, 0.05));
        }
    }
    let k = base.with_singular(cfg.alpha, cfg.theta_min, true)?;
    let p = MaxwellianParams::normalized(cfg.dim);
    for radius in LONGRANGE_RADII {
        let mut pairs = vec![];
        for _ in 0..200 {
            pairs.push((random_in_ball(&mut rng, cfg.dim, radius), random_in_ball(&mut rng, cfg.dim, radius)));
        }
        ctx.push(ctx.info(format!("longrange.cancellation_constant[R={radius}]"), cancellation_constant(&k, &p, radius, &pairs)?));
        let f = localized_maxwellian_profile(&p, radius);
        let bound = radial_hessian_sup(&f, radius + 1.0, 1e-2);
        ctx.push(ctx.info(format!("longrange.hessian_sup[R={radius}]"), bound));
        let phi_fn = |w: &Point| f(w.norm());
        let phi = C2Function { value: &phi_fn, hessian_bound: bound };
        let mut violations = 0usize;
        for _ in 0..1000 {
            let v = random_in_ball(&mut rng, cfg.dim, radius);
            let vs = random_in_ball(&mut rng, cfg.dim, radius);
            let rho = rng.gen_range(1e-3..1.0);
            violations += usize::from(!sphere_average_estimate(&phi, &v, &vs, rho, cfg.dim)?.holds);
        }
        ctx.push(ctx.check(format!("longrange.taylor_bound_violations[R={radius}]"), violations as f64, Some(0.0), violations == 0));
    }
    ctx.push(ctx.info("longrange.jacobian_constant", jacobian_constant(&k)?));
    let grid = carleman_grid(cfg.dim);
    let mut s_min = f64::INFINITY;
    for v in &grid {
        for w in &grid {
            if (v - w).norm() >= 0.2 {
                s_min = s_min.min(carleman_kernel(v, w, &k, &p, 2.0, CarlemanOrders::default())?);
            }
        }
    }
    ctx.push(ctx.check("longrange.carleman_min[B1xB1,R=2]", s_min, None, s_min > 0.0));
    let h = setup.test_function(samples[0].clone(), "sample0");
    let curve = local_sobolev_curve(&h, cfg.alpha, &[0.5, 1.0, 1.5, 2.0, 3.0, 4.0], 24)?;
    for (r, v) in &curve {
        ctx.push(ctx.info(format!("longrange.local_sobolev_norm[R={r}]"), *v));
    }
    ctx.plot("local_sobolev", curve);
    let ind = MollifiedIndicator { radius: 1.0 };
    ctx.push(ctx.info("longrange.indicator_at_origin", ind.eval(&Point::zeros(), &Point::zeros())));
    Ok(())
}

/// Ten points of `B_1` on a spiral, in the plane for dimension 2.
pub fn carleman_grid(dim: usize) -> Vec<Point> {
    (0..10)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 10.0;
            let r = 0.2 + 0.06 * i as f64;
            if dim == 2 {
                Point::new(r * a.cos(), r * a.sin(), 0.0)
            } else {
                Point::new(a.cos(), 0.6 * a.sin(), 0.8 * a.sin()) * r
            }
        })
        .collect()
}

const DYADIC_SAMPLES: usize = 20;

fn cmd_dyadic(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg.clone();
    let k = cfg.kernel()?;
    let setup = GalerkinSetup::new(cfg.dim, cfg.degree, cfg.quadrature());
    let mut rng = cfg.rng();
    let samples: Vec<DVector<f64>> = (0..DYADIC_SAMPLES).map(|_| random_coefficients(&mut rng, setup.basis.len())).collect();
    for (label, form) in [("boltzmann", FormKind::BoltzmannDirichlet), ("landau", FormKind::LandauDirichlet)] {
        let mats: DyadicMatrices = match form {
            FormKind::BoltzmannDirichlet => dyadic_matrices_b(&setup.basis, cfg.dyadic_ratio, cfg.dyadic_nmax, &k, &setup.rotations)?,
            _ => dyadic_matrices_l(&setup.basis, cfg.dyadic_ratio, cfg.dyadic_nmax, &k, &setup.rotations)?,
        };
        let d = assemble_form(form, &setup, &k)?.matrix;
        let first = mats.decompose(&samples[0])?;
        for (n, t) in first.terms_tilde.iter().enumerate() {
            ctx.push(ctx.info(format!("dyadic.{label}.shell_term[n={n}]"), *t).model(label));
            ctx.push(ctx.info(format!("dyadic.{label}.ball_term[k={n}]"), first.terms_cumulative[n]).model(label));
            ctx.push(ctx.info(format!("dyadic.{label}.shell_nodes[n={n}]"), mats.shell_nodes[n] as f64).model(label));
            ctx.push(ctx.info(format!("dyadic.{label}.shell_mass[n={n}]"), mats.shell_mass[n]).model(label));
        }
        ctx.plot(format!("dyadic_{label}"), first.terms_tilde.iter().enumerate().map(|(n, t)| (n as f64, *t)).collect());
        let (mut tele, mut exch, mut excess) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
        for c in &samples {
            let dec = mats.decompose(c)?;
            tele = tele.max(dec.telescoping_residual());
            let (l, r) = dec.exchange_sides();
            exch = exch.max(rel_change(l, r));
            let form_value = quadratic(&d, c);
            excess = excess.max((k.constants.c_phi * dec.weighted_sum() - form_value) / form_value.abs().max(f64::MIN_POSITIVE));
        }
        ctx.push(ctx.at_most(format!("dyadic.{label}.telescoping_residual"), tele, 1e-9).model(label));
        ctx.push(ctx.at_most(format!("dyadic.{label}.exchange_residual"), exch, 1e-10).model(label));
        ctx.push(ctx.check(format!("dyadic.{label}.weighted_lower_bound_excess"), excess, Some(0.0), excess <= 1e-12).model(label));
        ctx.push(ctx.at_most(format!("dyadic.{label}.geometric_sum_error"), rel_change(first.s, first.s_closed_form()), 1e-12).model(label));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("kincoerce").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_parse_and_resolve() {
        let cli = parse(&["gap", "--model", "landau", "--gamma", "-1", "--dim", "2", "--u", "1,0", "--T", "1", "--dyadic-R", "3"]);
        let cfg = RunConfig::resolve(cli.command.kind(), cli.command.flags()).unwrap();
        assert_eq!(cfg.model, ModelChoice::Landau);
        assert_eq!(cfg.gamma, -1.0);
        assert_eq!(cfg.phi, PhiChoice::Truncated);
        assert_eq!(cfg.degree, 8);
        assert_eq!(cfg.u, vec![1.0, 0.0]);
        assert_eq!(cfg.temperature, 1.0);
        assert_eq!(cfg.dyadic_ratio, 3.0);
    }

    #[test]
    fn config_file_sections_and_precedence() {
        let file = Flags::from_config_text("[kernel]\ngamma = 0.5\nphi = \"power\"\n[run]\nseed = 7\ndegree = 4\n").unwrap();
        let cli = parse(&["verify", "--degree", "5"]);
        let merged = cli.command.flags().or(&file);
        let cfg = RunConfig::resolve(CommandKind::Verify, &merged).unwrap();
        assert_eq!((cfg.gamma, cfg.seed, cfg.degree), (0.5, 7, 5));
        assert!(matches!(Flags::from_config_text("bogus = 1"), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_ranges_are_config_errors() {
        for args in [
            vec!["gap", "--gamma", "-3"],
            vec!["gap", "--dim", "4"],
            vec!["gap", "--model", "longrange"],
            vec!["longrange", "--alpha", "2.5"],
            vec!["dyadic", "--gamma", "0.5"],
        ] {
            let cli = parse(&args);
            assert!(matches!(RunConfig::resolve(cli.command.kind(), cli.command.flags()), Err(Error::Config(_))), "{args:?}");
        }
        let cli = parse(&["gap", "--model", "landau", "--gamma", "-3"]);
        assert!(RunConfig::resolve(cli.command.kind(), cli.command.flags()).is_ok());
    }

    #[test]
    fn hash_tracks_the_config() {
        let a = RunConfig::resolve(CommandKind::Gap, &Flags::default()).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn csv_rows_carry_provenance() {
        let cfg = RunConfig::resolve(CommandKind::Verify, &Flags { dim: Some(2), ..Flags::default() }).unwrap();
        let ctx = Ctx::new(cfg);
        let mut report = Report::default();
        report.rows.push(ctx.at_most("x", 0.1, 0.2));
        report.rows.push(ctx.at_most("y", 0.3, 0.2));
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), CSV_HEADER.split(',').count());
        assert!(lines[1].starts_with("x,1.0000000000000001e-1,2.0000000000000001e-1,PASS,boltzmann,2,"));
        assert!(lines[2].contains(",FAIL,"));
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn corrupted_quadrature_surfaces_exactness_violation() {
        let flags = Flags { dim: Some(2), degree: Some(3), quad_hermite: Some(2), ..Flags::default() };
        let cfg = RunConfig::resolve(CommandKind::Verify, &flags).unwrap();
        let report = run(CommandKind::Verify, cfg);
        assert!(report.errors.iter().any(|(_, e)| matches!(e, Error::ExactnessViolation(_))));
        assert_eq!(report.exit_code(), 3);
        assert!(report.to_csv().contains("error.ExactnessViolation"));
    }
}
