//! Command-line driver: argument parsing, dispatch and report emission.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bvp::RadialMap;
use crate::energy::{
    distortion_integral_check, f_minimality_status, minimal_energy_with, planar_nitsche_energy, power_stretching_dilatations,
    qc_bounds, radial_energy, DistortionCheck, Functional, PlanarNitscheMap, PlanarNitscheParams,
};
use crate::error::Error;
use crate::geometry::{Annulus, Dimension, Modulus};
use crate::lagrangian::{nonradial_witness_with, verify_free_lagrangians, LagrangianReport};
use crate::nitsche::{classify, constants, lower_nitsche, upper_nitsche};
use crate::principal::{characteristic, principal_sample, PrincipalKind};
use crate::profile::{PowerStretching, StrainProfile};
use crate::quad::QuadOptions;
use crate::ser::{self, ext_f64};

pub const SCHEMA_VERSION: u32 = 1;

/// Result of one invocation: what the binary prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Parser)]
#[command(name = "nharmonic", version, about = "Energy-minimal n-harmonic maps between spherical annuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Common {
    /// Dimension of the ambient space.
    #[arg(short = 'n', long = "dim")]
    n: u32,
    /// Relative tolerance for adaptive quadrature.
    #[arg(long)]
    rtol: Option<f64>,
    /// Absolute tolerance for adaptive quadrature.
    #[arg(long)]
    atol: Option<f64>,
    /// Output format; `profile` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct Pair {
    /// Source annulus as `inner,outer`.
    #[arg(long, value_parser = parse_radii)]
    source: (f64, f64),
    /// Target annulus as `inner,outer`.
    #[arg(long, value_parser = parse_radii)]
    target: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(alias = "identity-like")]
    Identity,
    #[value(alias = "inversion-like")]
    Inversion,
    Plus,
    Minus,
}

impl From<KindArg> for PrincipalKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Identity => PrincipalKind::IdentityLike,
            KindArg::Inversion => PrincipalKind::InversionLike,
            KindArg::Plus => PrincipalKind::Plus,
            KindArg::Minus => PrincipalKind::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileKind {
    Identity,
    Inversion,
    Plus,
    Minus,
    Minimizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FunctionalArg {
    #[value(alias = "conformal")]
    E,
    #[value(alias = "weighted")]
    F,
    #[value(alias = "operator")]
    OperatorNorm,
}

impl From<FunctionalArg> for Functional {
    fn from(f: FunctionalArg) -> Self {
        match f {
            FunctionalArg::E => Functional::ConformalE,
            FunctionalArg::F => Functional::WeightedF,
            FunctionalArg::OperatorNorm => Functional::OperatorNormF,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapArg {
    Identity,
    Power,
    Radial,
    Nitsche,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMap {
    Minimizer,
    Power,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a pair of annuli against the Nitsche bounds.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
    },
    /// Construct the radial minimizer of the conformal energy.
    Minimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
    },
    /// Evaluate an energy functional on a named map.
    Energy {
        #[command(flatten)]
        common: Common,
        /// Source annulus as `inner,outer`.
        #[arg(long, value_parser = parse_radii)]
        source: (f64, f64),
        /// Required for `--map power` unless `--alpha` is given.
        #[arg(long, value_parser = parse_radii)]
        target: Option<(f64, f64)>,
        #[arg(long, value_enum)]
        map: MapArg,
        #[arg(long, value_enum, default_value = "e")]
        functional: FunctionalArg,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Amplitude of the radial map.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        /// Radial scale of the radial map.
        #[arg(long)]
        k: Option<f64>,
        /// Exponent of the power stretching.
        #[arg(long)]
        alpha: Option<f64>,
        /// Outer radius of a hammered inner zone.
        #[arg(long)]
        hammer_rho: Option<f64>,
        /// Radius the hammered zone collapses onto.
        #[arg(long)]
        hammer_to: Option<f64>,
        /// Parameter of the planar Nitsche map.
        #[arg(long, allow_negative_numbers = true)]
        omega: Option<f64>,
        /// Source rescaling applied before the planar Nitsche map.
        #[arg(long)]
        rescale: Option<f64>,
    },
    /// Emit strain rows (t, H, Hdot, eta, characteristic residual) on a grid.
    Profile {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: ProfileKind,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Geometric instead of uniform spacing.
        #[arg(long)]
        log: bool,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_parser = parse_radii)]
        source: Option<(f64, f64)>,
        #[arg(long, value_parser = parse_radii)]
        target: Option<(f64, f64)>,
    },
    /// Tabulate the Nitsche constants and bounds.
    NitscheTable {
        #[command(flatten)]
        common: Common,
        /// Last dimension of the table (defaults to `-n`).
        #[arg(long)]
        up_to: Option<u32>,
        /// Source log-ratios `log(R/r)` at which to evaluate the bounds.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        log_ratios: Vec<f64>,
    },
    /// Check the free-Lagrangian identities on a radial map.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "minimizer")]
        map: VerifyMap,
    },
    /// Search for a non-radial map beating the radial infimum (n >= 4).
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "e")]
        functional: FunctionalArg,
    },
    /// Check the quasiconformal modulus bounds.
    Qc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        k_outer: Option<f64>,
        #[arg(long)]
        k_inner: Option<f64>,
    },
}

fn parse_radii(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `inner,outer`, got `{s}`"));
    }
    let a = parts[0].parse::<f64>().map_err(|e| format!("`{}`: {e}", parts[0]))?;
    let b = parts[1].parse::<f64>().map_err(|e| format!("`{}`: {e}", parts[1]))?;
    Ok((a, b))
}

#[derive(Debug)]
enum Failure {
    Argument(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn arg_error(msg: impl Into<String>) -> Failure {
    Failure::Argument(msg.into())
}

fn required<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| arg_error(format!("missing required argument {flag}")))
}

impl Common {
    fn dim(&self) -> CliResult<Dimension> {
        Ok(Dimension::new(self.n)?)
    }

    fn quad(&self) -> CliResult<QuadOptions> {
        let d = QuadOptions::default();
        let opts = QuadOptions::with_tolerances(self.atol.unwrap_or(d.atol), self.rtol.unwrap_or(d.rtol));
        if !(opts.atol >= 0.0 && opts.rtol >= 0.0 && opts.atol + opts.rtol > 0.0) {
            return Err(arg_error("tolerances must be non-negative and not both zero"));
        }
        Ok(opts)
    }
}

fn annulus((a, b): (f64, f64)) -> CliResult<Annulus> {
    Ok(Annulus::new(a, b)?)
}

impl Pair {
    fn annuli(&self) -> CliResult<(Annulus, Annulus)> {
        Ok((annulus(self.source)?, annulus(self.target)?))
    }
}

#[derive(Serialize)]
struct ProfileRow {
    t: f64,
    #[serde(rename = "H", serialize_with = "ext_f64")]
    h: f64,
    #[serde(rename = "Hdot", serialize_with = "ext_f64")]
    hdot: f64,
    #[serde(serialize_with = "ext_f64")]
    eta: f64,
    #[serde(serialize_with = "ext_f64")]
    characteristic_residual: f64,
}

#[derive(Serialize)]
struct NitscheRow {
    n: u32,
    #[serde(serialize_with = "ext_f64")]
    alpha_n: f64,
    gamma_n: f64,
    delta_n: Option<f64>,
    source_log_ratio: f64,
    mod_source: Modulus,
    lower_bound: Modulus,
    upper_bound: Modulus,
}

#[derive(Serialize)]
struct VerifyReport {
    map: &'static str,
    lagrangian: LagrangianReport,
    max_residual: f64,
    distortion: Option<DistortionCheck>,
}

#[derive(Serialize)]
struct QcReport {
    k_outer: f64,
    k_inner: f64,
    dilatations_from: &'static str,
    #[serde(flatten)]
    check: crate::energy::QcCheck,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialization")
}

fn grid(from: f64, to: f64, steps: usize, log: bool) -> CliResult<Vec<f64>> {
    if steps < 2 {
        return Err(arg_error("--steps must be at least 2"));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(arg_error(format!("need --from < --to, got {from} and {to}")));
    }
    if log && from <= 0.0 {
        return Err(arg_error("--log needs a positive --from"));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let f = i as f64 / last;
            if i == steps - 1 {
                to
            } else if log {
                from * (to / from).powf(f)
            } else {
                from + (to - from) * f
            }
        })
        .collect())
}

fn profile_rows<P: StrainProfile + ?Sized>(p: &P, ts: &[f64], c: f64, n: Dimension) -> CliResult<Vec<ProfileRow>> {
    ts.iter()
        .map(|&t| {
            let s = p.sample_full(t, n)?;
            Ok(ProfileRow { t, h: s.h, hdot: s.hdot, eta: s.eta, characteristic_residual: characteristic(&s, n) - c })
        })
        .collect()
}

/// A principal solution rescaled as `lambda * H(k t)` on the whole half-line.
struct Principal {
    map: RadialMap,
}

impl StrainProfile for Principal {
    fn domain(&self) -> Annulus {
        self.map.domain
    }

    fn sample(&self, t: f64, n: Dimension) -> crate::Result<crate::principal::StrainSample> {
        let mut s = principal_sample(self.map.kind, self.map.k * t, n)?.rescaled(self.map.lambda, self.map.k);
        s.t = t;
        Ok(s)
    }
}

fn run_profile(cmd: Command) -> CliResult<Value> {
    let Command::Profile { common, kind, from, to, steps, log, lambda, k, source, target } = cmd else {
        unreachable!()
    };
    let n = common.dim()?;
    let opts = common.quad()?;
    if kind == ProfileKind::Minimizer {
        let s = annulus(required(source, "--source")?)?;
        let t = annulus(required(target, "--target")?)?;
        let plan = minimal_energy_with(&s, &t, n, opts)?;
        let c = match plan.map.hammer_to {
            Some(radius) => radius.powf(n.as_f64()),
            None => plan.map.characteristic_constant(n),
        };
        let ts = grid(from.unwrap_or(s.inner), to.unwrap_or(s.outer), steps, log)?;
        if ts[0] < s.inner * (1.0 - 1e-12) || ts[ts.len() - 1] > s.outer * (1.0 + 1e-12) {
            return Err(Error::domain("minimizer grid must lie inside the source annulus").into());
        }
        return Ok(to_value(&profile_rows(&plan.map, &ts, c, n)?));
    }
    let kind = PrincipalKind::from(match kind {
        ProfileKind::Identity => KindArg::Identity,
        ProfileKind::Inversion => KindArg::Inversion,
        ProfileKind::Plus => KindArg::Plus,
        ProfileKind::Minus => KindArg::Minus,
        ProfileKind::Minimizer => unreachable!(),
    });
    let ts = grid(required(from, "--from")?, required(to, "--to")?, steps, log)?;
    if ts[0] <= 0.0 {
        return Err(Error::domain("profile grid must be in t > 0").into());
    }
    let map = RadialMap::new(kind, lambda, k, Annulus { inner: ts[0], outer: ts[ts.len() - 1] })?;
    let c = map.characteristic_constant(n);
    Ok(to_value(&profile_rows(&Principal { map }, &ts, c, n)?))
}

fn run_energy(cmd: Command) -> CliResult<Value> {
    let Command::Energy {
        common,
        source,
        target,
        map,
        functional,
        kind,
        lambda,
        k,
        alpha,
        hammer_rho,
        hammer_to,
        omega,
        rescale,
    } = cmd
    else {
        unreachable!()
    };
    let n = common.dim()?;
    let opts = common.quad()?;
    let source = annulus(source)?;
    let functional = Functional::from(functional);
    let report = match map {
        MapArg::Identity => {
            let m = RadialMap::new(PrincipalKind::IdentityLike, lambda.unwrap_or(1.0), 1.0, source)?;
            radial_energy(&m, n, functional, opts)?
        }
        MapArg::Power => {
            let p = match (alpha, target) {
                (Some(a), _) => PowerStretching::new(lambda.unwrap_or(1.0), a, source)?,
                (None, Some(t)) => PowerStretching::between(&source, &annulus(t)?)?,
                (None, None) => return Err(arg_error("--map power needs --alpha or --target")),
            };
            radial_energy(&p, n, functional, opts)?
        }
        MapArg::Radial => {
            let kind = PrincipalKind::from(required(kind, "--kind")?);
            let (lambda, k) = (required(lambda, "--lambda")?, required(k, "--k")?);
            let m = match (hammer_rho, hammer_to) {
                (Some(rho), Some(radius)) => {
                    let smooth = Annulus::new(rho, source.outer)?;
                    let zone = Annulus::new(source.inner, rho)?;
                    RadialMap::new(kind, lambda, k, smooth)?.with_hammer(zone, radius, n)?
                }
                (None, None) => RadialMap::new(kind, lambda, k, source)?,
                _ => return Err(arg_error("--hammer-rho and --hammer-to go together")),
            };
            radial_energy(&m, n, functional, opts)?
        }
        MapArg::Nitsche => {
            if n.get() != 2 {
                return Err(Error::domain("the planar Nitsche map needs n = 2").into());
            }
            let spec = PlanarNitscheParams { omega: required(omega, "--omega")?, rescale: required(rescale, "--rescale")? };
            if !(spec.rescale > 0.0 && spec.omega.is_finite()) {
                return Err(Error::domain("--rescale must be positive and --omega finite").into());
            }
            let m = PlanarNitscheMap { spec, source };
            if functional == Functional::ConformalE {
                planar_nitsche_energy(&m)?
            } else {
                radial_energy(&m, n, functional, opts)?
            }
        }
    };
    Ok(to_value(&report))
}

fn run_table(common: Common, up_to: Option<u32>, log_ratios: Vec<f64>) -> CliResult<Value> {
    let first = common.dim()?;
    let last = up_to.unwrap_or(first.get());
    if last < first.get() {
        return Err(arg_error("--up-to must not be below -n"));
    }
    let mut rows = Vec::new();
    for m in first.get()..=last {
        let n = Dimension::new(m)?;
        let c = constants(n)?;
        for &lr in &log_ratios {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(Error::domain(format!("log-ratios must be positive, got {lr}")).into());
            }
            let ms = Modulus::from_log_ratio(lr, n);
            rows.push(NitscheRow {
                n: m,
                alpha_n: c.alpha_n,
                gamma_n: c.gamma_n,
                delta_n: c.delta_n,
                source_log_ratio: lr,
                mod_source: ms,
                lower_bound: lower_nitsche(ms, n)?,
                upper_bound: upper_nitsche(ms, n)?,
            });
        }
    }
    Ok(to_value(&rows))
}

fn run_verify(common: Common, pair: Pair, map: VerifyMap) -> CliResult<Value> {
    let n = common.dim()?;
    let opts = common.quad()?;
    let (s, t) = pair.annuli()?;
    let report = match map {
        VerifyMap::Minimizer => {
            let plan = minimal_energy_with(&s, &t, n, opts)?;
            let lagrangian = verify_free_lagrangians(&plan.map, &s, &t, n, opts)?;
            let distortion = match plan.map.hammer() {
                None if plan.map.is_increasing(n)? => Some(distortion_integral_check(&plan.map, n, opts)?),
                _ => None,
            };
            VerifyReport { map: "minimizer", max_residual: lagrangian.max_residual(), lagrangian, distortion }
        }
        VerifyMap::Power => {
            let p = PowerStretching::between(&s, &t)?;
            let lagrangian = verify_free_lagrangians(&p, &s, &t, n, opts)?;
            let distortion = Some(distortion_integral_check(&p, n, opts)?);
            VerifyReport { map: "power", max_residual: lagrangian.max_residual(), lagrangian, distortion }
        }
    };
    Ok(to_value(&report))
}

fn run_counterexample(common: Common, pair: Pair, functional: FunctionalArg) -> CliResult<Value> {
    let n = common.dim()?;
    let opts = common.quad()?;
    let (s, t) = pair.annuli()?;
    let cls = classify(&s, &t, n)?;
    Ok(match functional {
        FunctionalArg::E => {
            let w = nonradial_witness_with(&s, &t, n, Functional::ConformalE, opts)?;
            json!({ "regime": to_value(&cls.regime), "witness": to_value(&w) })
        }
        FunctionalArg::F => {
            let status = f_minimality_status(&s, &t, n)?;
            json!({ "regime": to_value(&cls.regime), "weighted": to_value(&status) })
        }
        FunctionalArg::OperatorNorm => {
            return Err(arg_error("counterexample supports --functional e or f"));
        }
    })
}

fn run_qc(common: Common, pair: Pair, k_outer: Option<f64>, k_inner: Option<f64>) -> CliResult<Value> {
    let n = common.dim()?;
    let (s, t) = pair.annuli()?;
    let (ko, ki, from) = match (k_outer, k_inner) {
        (Some(o), Some(i)) => (o, i, "arguments"),
        (None, None) => {
            let alpha = t.log_ratio() / s.log_ratio();
            let (o, i) = power_stretching_dilatations(alpha, n);
            (o, i, "power-stretching")
        }
        _ => return Err(arg_error("--k-outer and --k-inner go together")),
    };
    let check = qc_bounds(&s, &t, n, ko, ki)?;
    Ok(to_value(&QcReport { k_outer: ko, k_inner: ki, dilatations_from: from, check }))
}

fn verb(cmd: &Command) -> &'static str {
    match cmd {
        Command::Classify { .. } => "classify",
        Command::Minimize { .. } => "minimize",
        Command::Energy { .. } => "energy",
        Command::Profile { .. } => "profile",
        Command::NitscheTable { .. } => "nitsche-table",
        Command::Verify { .. } => "verify",
        Command::Counterexample { .. } => "counterexample",
        Command::Qc { .. } => "qc",
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Classify { common, .. }
        | Command::Minimize { common, .. }
        | Command::Energy { common, .. }
        | Command::Profile { common, .. }
        | Command::NitscheTable { common, .. }
        | Command::Verify { common, .. }
        | Command::Counterexample { common, .. }
        | Command::Qc { common, .. } => common,
    }
}

fn dispatch(cmd: Command) -> CliResult<Value> {
    match cmd {
        Command::Classify { common, pair } => {
            let (s, t) = pair.annuli()?;
            Ok(to_value(&classify(&s, &t, common.dim()?)?))
        }
        Command::Minimize { common, pair } => {
            let (s, t) = pair.annuli()?;
            Ok(to_value(&minimal_energy_with(&s, &t, common.dim()?, common.quad()?)?))
        }
        cmd @ Command::Energy { .. } => run_energy(cmd),
        cmd @ Command::Profile { .. } => run_profile(cmd),
        Command::NitscheTable { common, up_to, log_ratios } => run_table(common, up_to, log_ratios),
        Command::Verify { common, pair, map } => run_verify(common, pair, map),
        Command::Counterexample { common, pair, functional } => run_counterexample(common, pair, functional),
        Command::Qc { common, pair, k_outer, k_inner } => run_qc(common, pair, k_outer, k_inner),
    }
}

fn error_outcome(code: i32, kind: &str, message: &str) -> Outcome {
    let v = json!({ "schema": SCHEMA_VERSION, "error": { "kind": kind, "exit_code": code, "message": message } });
    Outcome { code, stdout: String::new(), stderr: ser::to_json(&v) + "\n" }
}

/// Parses `argv` (including the program name), runs the verb and renders its report.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: e.to_string(), stderr: String::new() }
                }
                _ => error_outcome(2, "argument", e.to_string().trim_end()),
            };
        }
    };
    let name = verb(&cli.command);
    let (n, format) = {
        let c = common(&cli.command);
        let default = if name == "profile" { Format::Csv } else { Format::Json };
        (c.n, c.format.unwrap_or(default))
    };
    match dispatch(cli.command) {
        Ok(result) => {
            let stdout = match format {
                Format::Json => {
                    let v = json!({ "schema": SCHEMA_VERSION, "command": name, "n": n, "result": result });
                    ser::to_json(&v) + "\n"
                }
                Format::Csv => match ser::to_csv(&result) {
                    Ok(text) => text,
                    Err(e) => return error_outcome(4, "io", &e.to_string()),
                },
            };
            Outcome { code: 0, stdout, stderr: String::new() }
        }
        Err(Failure::Argument(msg)) => error_outcome(2, "argument", &msg),
        Err(Failure::Lib(e)) => {
            let code = match e {
                Error::Numerical { .. } => 4,
                _ => 3,
            };
            error_outcome(code, e.kind(), &e.to_string())
        }
    }
}

