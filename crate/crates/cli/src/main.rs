//! `skyframe`: celestial transforms, sky images, causal queries and
//! verification suites from the command line.
//!
//! Exit codes: 0 success, 1 domain or verification failure, 2 usage or
//! configuration error.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use skyframe::causality::{Causality, CausalityError};
use skyframe::frame::{sky_image, ConformalFrame, FrameError, Target};
use skyframe::verify::{
    check_contact_annihilation, check_flow_of_time, check_tau_incidence, check_theorem1, VerificationReport,
    VerifyError,
};
use skyframe::{
    factor_null, minkowski_norm, pauli_transform, sky_image_minkowski, CoSpinor, ConjCoSpinor, FourVector, C,
};

use config::{parse_vec4, Common, FrameChoice, Format, MetricChoice, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Domain(String, String),
    #[error("verification failed: {0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            _ => 1,
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::Unsupported(msg) => Self::Config(msg),
            e => Self::Domain(e.name().into(), e.to_string()),
        }
    }
}

impl From<CausalityError> for CliError {
    fn from(e: CausalityError) -> Self {
        Self::Domain(e.name().into(), e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Frame(f) => f.into(),
            VerifyError::AllSamplesDegenerate => Self::Domain("AllSamplesDegenerate".into(), e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "skyframe", version, about = "Sky bundles, celestial transforms and conformal frames")]
struct Cli {
    /// TOML file with defaults for the shared flags (same keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hermitian matrix, norm and null factorization of a four-vector.
    Pauli {
        #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true)]
        vec: FourVector<f64>,
        /// Require the null factorization (fails on non-null input).
        #[arg(long)]
        factor: bool,
    },
    /// Sky image of an event in a frame.
    SkyImage {
        #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true)]
        event: FourVector<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Causal relation between two events, or between each pair in a file.
    Causal {
        #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true, required_unless_present = "pairs", requires = "y")]
        x: Option<FourVector<f64>>,
        #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true, requires = "x")]
        y: Option<FourVector<f64>>,
        /// File with one `x0,x1,x2,x3 y0,y1,y2,y3` pair per line.
        #[arg(long, conflicts_with_all = ["x", "y"])]
        pairs: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite over seeded random probes.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Contact,
    Theorem1,
    Flow,
    Twistor,
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() && !e.to_string().contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::load_file(path)?,
        None => Common::default(),
    };
    match cli.command {
        Command::Pauli { vec, factor } => cmd_pauli(&vec, factor),
        Command::SkyImage { event, common } => cmd_sky_image(&event, RunConfig::resolve(common.over(file))?),
        Command::Causal { x, y, pairs, common } => {
            let cfg = RunConfig::resolve(graph_default(common.over(file)))?;
            match (x, y, pairs) {
                (Some(x), Some(y), _) => cmd_causal(&x, &y, cfg),
                (_, _, Some(path)) => cmd_causal_batch(&path, cfg),
                _ => Err(CliError::Config("causal needs --x and --y, or --pairs".into())),
            }
        }
        Command::Verify { suite, common } => cmd_verify(suite, RunConfig::resolve(graph_default(common.over(file)))?),
    }
}

/// Minkowski queries use the graph frame unless a frame is named.
fn graph_default(mut c: Common) -> Common {
    if c.frame.is_none() && c.metric.unwrap_or(MetricChoice::Minkowski) == MetricChoice::Minkowski && c.target.is_none() {
        c.frame = Some(FrameChoice::Graph);
    }
    c
}

fn fmt_real(x: f64) -> String {
    format!("{}", x + 0.0)
}

fn fmt_complex(z: C<f64>) -> String {
    if z.im == 0.0 {
        fmt_real(z.re)
    } else if z.re == 0.0 {
        format!("{}i", fmt_real(z.im))
    } else {
        format!("{}{:+}i", fmt_real(z.re), z.im)
    }
}

fn cmd_pauli(v: &FourVector<f64>, factor: bool) -> Result<(), CliError> {
    let h = pauli_transform(v);
    let e = h.entries();
    println!(
        "matrix: [[{}, {}], [{}, {}]]",
        fmt_complex(e[0][0]),
        fmt_complex(e[0][1]),
        fmt_complex(e[1][0]),
        fmt_complex(e[1][1])
    );
    println!("norm: {}", fmt_real(minkowski_norm(v)));
    match factor_null(v) {
        Ok(psi) => println!("psi: ({}, {})", fmt_complex(psi.0[0]), fmt_complex(psi.0[1])),
        Err(e) if factor => {
            let name = match e {
                skyframe::SpinorError::NotNull { .. } => "NotNull",
                skyframe::SpinorError::NotFutureDirected => "NotFutureDirected",
                _ => "SpinorError",
            };
            return Err(CliError::Domain(name.into(), e.to_string()));
        }
        Err(_) => {}
    }
    Ok(())
}

fn emit(cfg: &RunConfig, body: &str) -> Result<bool, CliError> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(true)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(false)
        }
    }
}

fn to_json<S: Serialize>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable record");
    s.push('\n');
    s
}

/// Summary lines go to stdout when the record went to a file.
fn summary(to_file: bool, lines: &[String]) {
    for l in lines {
        if to_file {
            println!("{l}");
        } else {
            eprintln!("{l}");
        }
    }
}

fn bbox(points: impl Iterator<Item = [f64; 3]>) -> Option<([f64; 3], [f64; 3])> {
    points.fold(None, |acc, p| {
        let (lo, hi) = acc.unwrap_or((p, p));
        Some((std::array::from_fn(|k| lo[k].min(p[k])), std::array::from_fn(|k| hi[k].max(p[k]))))
    })
}

fn cmd_sky_image(event: &FourVector<f64>, cfg: RunConfig) -> Result<(), CliError> {
    let sample = cfg.sample(200)?;
    let n = sample.len();
    if cfg.frame == FrameChoice::Graph {
        let img = sky_image_minkowski(event, &sample);
        let body = match cfg.format {
            Format::Json => to_json(&img.to_record()),
            Format::Csv => {
                let mut s = String::from("xi_re0,xi_im0,xi_re1,xi_im1,height\n");
                for r in img.to_record().samples {
                    s.push_str(&format!("{},{},{},{},{}\n", r.xi[0], r.xi[1], r.xi[2], r.xi[3], r.height));
                }
                s
            }
        };
        let to_file = emit(&cfg, &body)?;
        let lo = img.heights.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = img.heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        summary(to_file, &[format!("samples: {n}"), "regular fraction: 1".into(), format!("height range: [{lo}, {hi}]")]);
        return Ok(());
    }
    let frame = cfg.build_frame()?;
    let img = sky_image(frame.as_ref(), event, &sample)?;
    let body = match cfg.format {
        Format::Json => to_json(&img.to_record()),
        Format::Csv => img.to_csv(),
    };
    let to_file = emit(&cfg, &body)?;
    let mut lines = vec![
        format!("samples: {n} ({} projected)", img.success_count()),
        format!("regular fraction: {}", img.regular_fraction()),
    ];
    if let Some((lo, hi)) = bbox(img.points().into_iter().map(|(_, p)| p)) {
        lines.push(format!("bbox: [{}, {}, {}] .. [{}, {}, {}]", lo[0], lo[1], lo[2], hi[0], hi[1], hi[2]));
    }
    summary(to_file, &lines);
    Ok(())
}

fn cmd_causal(x: &FourVector<f64>, y: &FourVector<f64>, cfg: RunConfig) -> Result<(), CliError> {
    let frame = cfg.build_frame()?;
    let sample = cfg.sample(200)?;
    let cls = Causality::new(frame.as_ref(), sample).classify(x, y)?;
    let opt = |r: Option<f64>| r.map_or("n/a".to_string(), |v| v.to_string());
    let lines = [
        format!("relation: {}", cls.relation.as_str()),
        format!("margin_y_in_x: {}", cls.margin_y_in_x),
        format!("margin_x_in_y: {}", cls.margin_x_in_y),
        format!("radius_x: {}", opt(cls.radius_x)),
        format!("radius_y: {}", opt(cls.radius_y)),
    ];
    if let Some(path) = &cfg.out {
        std::fs::write(path, to_json(&cls)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    for l in lines {
        println!("{l}");
    }
    Ok(())
}

type EventPair = (FourVector<f64>, FourVector<f64>);

fn parse_pairs(text: &str) -> Result<Vec<EventPair>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| {
            let bad = |msg: String| CliError::Config(format!("pairs line {}: {msg}", k + 1));
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(bad("expected two events separated by whitespace".into()));
            }
            Ok((parse_vec4(parts[0]).map_err(bad)?, parse_vec4(parts[1]).map_err(bad)?))
        })
        .collect()
}

fn cmd_causal_batch(path: &std::path::Path, cfg: RunConfig) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let pairs = parse_pairs(&text)?;
    let frame = cfg.build_frame()?;
    let q = Causality::new(frame.as_ref(), cfg.sample(200)?);
    let mut out = Vec::with_capacity(pairs.len());
    for (x, y) in &pairs {
        let cls = q.classify(x, y)?;
        println!("{}", cls.relation.as_str());
        out.push(cls);
    }
    if let Some(path) = &cfg.out {
        std::fs::write(path, to_json(&out)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Random probe event: anywhere for the graph frame, otherwise between one
/// and two time units past the target surface.
fn probe_event(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> FourVector<f64> {
    let d = cfg.metric.domain();
    if cfg.frame == FrameChoice::Graph {
        return FourVector(std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
    }
    let surface = match cfg.default_target() {
        Target::Cauchy(t0) => t0,
        Target::Singularity => d.t_min,
    };
    let t_lo = surface.max(d.t_min) + 1.0;
    let t_hi = (t_lo + 1.0).min(d.t_max);
    let t = if t_hi > t_lo { rng.random_range(t_lo..t_hi) } else { 0.5 * (surface + d.t_max) };
    let w = d.half_width.map_or(0.5, |h| (h / 8.0).min(0.5));
    FourVector([t, rng.random_range(-w..w), rng.random_range(-w..w), rng.random_range(-w..w)])
}

fn probe_xi(rng: &mut ChaCha8Rng) -> CoSpinor<f64> {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let xi = CoSpinor::new(C::new(v[0], v[1]), C::new(v[2], v[3]));
        if xi.norm_sqr() > 1e-2 {
            return xi.normalized();
        }
    }
}

fn concat(name: &str, parts: Vec<VerificationReport>, tol: f64) -> VerificationReport {
    let residuals = parts.iter().flat_map(|p| p.residuals.iter().copied()).collect();
    let profile = parts.iter().flat_map(|p| p.profile.iter().copied()).collect();
    VerificationReport::new(name, residuals, tol).with_profile(profile)
}

#[derive(Serialize)]
struct VerifyOutput {
    seed: u64,
    frame: String,
    pass: bool,
    suites: Vec<VerificationReport>,
}

fn run_suite(suite: Suite, cfg: &RunConfig, frame: &dyn ConformalFrame<f64>, rng: &mut ChaCha8Rng) -> Result<VerificationReport, CliError> {
    let graph = cfg.frame == FrameChoice::Graph;
    let n = cfg.n.unwrap_or(if suite == Suite::Twistor { 1000 } else { 20 });
    match suite {
        Suite::Twistor => {
            let tol = cfg.tol.unwrap_or(1e-12);
            let parts = (0..n)
                .map(|_| {
                    let x = FourVector(std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
                    let xi = probe_xi(rng);
                    check_tau_incidence(&x, &[ConjCoSpinor::from_sky_point(&xi)], tol)
                })
                .collect();
            Ok(concat("twistor", parts, tol))
        }
        Suite::Contact => {
            let tol = cfg.tol.unwrap_or(1e-8);
            let (span, step) = if graph { (0.0, 0.1) } else { (0.2, 1e-3) };
            let mut parts = Vec::with_capacity(n);
            for _ in 0..n {
                let x = probe_event(cfg, rng);
                let xi = probe_xi(rng);
                parts.push(check_contact_annihilation(frame, &x, &xi, span, step, tol)?);
            }
            Ok(concat("contact", parts, tol))
        }
        Suite::Theorem1 => {
            let (h, tol) = if graph { (1.0 / 8192.0, 1e-9) } else { (1e-2, 1e-3) };
            let tol = cfg.tol.unwrap_or(tol);
            let mut parts = Vec::with_capacity(n);
            for _ in 0..n {
                let x = probe_event(cfg, rng);
                let xi = probe_xi(rng);
                parts.push(check_theorem1(frame, &x, &xi, h, tol)?);
            }
            Ok(concat("theorem1", parts, tol))
        }
        Suite::Flow => {
            let (h, tol, expected) = match (graph, cfg.metric_choice) {
                (true, _) => (1.0 / 8192.0, 1e-9, Some(1.0)),
                (false, MetricChoice::Minkowski) => (1e-4, 1e-3, Some(2.0)),
                (false, _) => (1e-4, 1e-3, None),
            };
            let tol = cfg.tol.unwrap_or(tol);
            let sample = skyframe::sample_sky::<f64>(30, skyframe::SkyScheme::Random { seed: rng.random() })
                .map_err(|e| CliError::Config(e.to_string()))?;
            let mut parts = Vec::with_capacity(n);
            for _ in 0..n {
                let x = probe_event(cfg, rng);
                let null = frame
                    .metric()
                    .null_direction(&x, &probe_xi(rng))
                    .map_err(|e| CliError::Domain("IntegratorFailure".into(), e.to_string()))?;
                let dirs = [
                    FourVector([1.0, 0.0, 0.0, 0.0]),
                    FourVector([1.0, 0.3, -0.2, 0.1]),
                    null,
                    FourVector([0.0, 0.3, -0.4, 1.0]),
                ];
                parts.push(check_flow_of_time(frame, &x, &dirs, &sample, h, expected, tol)?);
            }
            Ok(concat("flow", parts, tol))
        }
        Suite::All => unreachable!("expanded by the caller"),
    }
}

fn cmd_verify(suite: Suite, cfg: RunConfig) -> Result<(), CliError> {
    let frame = cfg.build_frame()?;
    let seed = cfg.seed.unwrap_or(0);
    let suites = match suite {
        Suite::All => vec![Suite::Twistor, Suite::Contact, Suite::Theorem1, Suite::Flow],
        s => vec![s],
    };
    let mut reports = Vec::new();
    for (k, s) in suites.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        reports.push(run_suite(s, &cfg, frame.as_ref(), &mut rng)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let out = VerifyOutput { seed, frame: frame.target_label(), pass, suites: reports };
    let to_file = emit(&cfg, &to_json(&out))?;
    let lines: Vec<String> = out
        .suites
        .iter()
        .map(|r| format!("{}: {} (max residual {:e}, tolerance {:e}, {} probes)", r.name, if r.pass { "pass" } else { "FAIL" }, r.max_residual, r.tolerance, r.probes))
        .collect();
    summary(to_file, &lines);
    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> = out.suites.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
        Err(CliError::Failed(failed.join(", ")))
    }
}
