//! Run configuration: command-line flags merged over an optional TOML file
//! with the same keys.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use skyframe::frame::{ConformalFrame, FrameError, FrameSpec, GeodesicFrame, GraphFrame, Target, Tracer, DEFAULT_STEP};
use skyframe::sky::{sample_sky, SkyScheme};
use skyframe::{Domain, Expr, FourVector, MetricKind, MetricSpec, ScaleFactor, SkySample};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricChoice {
    Minkowski,
    Flrw,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameChoice {
    Geodesic,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TracerChoice {
    ClosedForm,
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Common {
    /// Space-time metric.
    #[arg(long, value_enum)]
    pub metric: Option<MetricChoice>,
    /// FLRW exponent in a(t) = t^p.
    #[arg(long)]
    pub p: Option<f64>,
    /// FLRW scale factor as an expression in t (overrides --p).
    #[arg(long, allow_hyphen_values = true)]
    pub a_expr: Option<String>,
    /// Diagonal of a custom metric: four expressions in t,x,y,z separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    pub g_diag: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Spatial half-width of a custom metric's chart.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Target surface: `cauchy:<t0>` or `singularity`.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameChoice>,
    #[arg(long, value_enum)]
    pub tracer: Option<TracerChoice>,
    /// Number of sky samples or probes.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Affine step of the numerical tracer (selects it unless --tracer is given).
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Common {
    /// `self` where set, otherwise `file`.
    pub fn over(self, file: Common) -> Common {
        Common {
            metric: self.metric.or(file.metric),
            p: self.p.or(file.p),
            a_expr: self.a_expr.or(file.a_expr),
            g_diag: self.g_diag.or(file.g_diag),
            t_min: self.t_min.or(file.t_min),
            t_max: self.t_max.or(file.t_max),
            half_width: self.half_width.or(file.half_width),
            target: self.target.or(file.target),
            frame: self.frame.or(file.frame),
            tracer: self.tracer.or(file.tracer),
            n: self.n.or(file.n),
            seed: self.seed.or(file.seed),
            tol: self.tol.or(file.tol),
            step: self.step.or(file.step),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
        }
    }
}

pub fn load_file(path: &Path) -> Result<Common, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub metric: MetricSpec<f64>,
    pub metric_choice: MetricChoice,
    pub frame: FrameChoice,
    pub target: Option<Target<f64>>,
    pub tracer: Tracer<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn parse_target(s: &str) -> Result<Target<f64>, CliError> {
    if s == "singularity" {
        return Ok(Target::Singularity);
    }
    match s.strip_prefix("cauchy:").map(str::parse::<f64>) {
        Some(Ok(t0)) if t0.is_finite() => Ok(Target::Cauchy(t0)),
        _ => Err(CliError::Config(format!("bad target '{s}': expected cauchy:<t0> or singularity"))),
    }
}

fn parse_expr(s: &str) -> Result<Expr, CliError> {
    Expr::parse(s).map_err(|e| CliError::Config(format!("expression '{s}': {e}")))
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Config(format!("--{name} must be positive"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn resolve(c: Common) -> Result<Self, CliError> {
        positive("tol", c.tol)?;
        positive("step", c.step)?;
        let metric_choice = c.metric.unwrap_or(MetricChoice::Minkowski);
        let config = |e: skyframe::MetricError| CliError::Config(format!("metric: {e}"));
        let metric = match metric_choice {
            MetricChoice::Minkowski => match (c.t_min, c.t_max) {
                (None, None) => MetricSpec::minkowski(),
                (lo, hi) => MetricSpec::new(
                    MetricKind::Minkowski,
                    Domain::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY), None),
                )
                .map_err(config)?,
            },
            MetricChoice::Flrw => {
                let sf = match &c.a_expr {
                    Some(s) => ScaleFactor::Expr(parse_expr(s)?),
                    None => ScaleFactor::PowerLaw(c.p.unwrap_or(2.0 / 3.0)),
                };
                let domain = Domain::new(c.t_min.unwrap_or(0.1), c.t_max.unwrap_or(100.0), None);
                MetricSpec::new(MetricKind::FlrwFlat(sf), domain).map_err(config)?
            }
            MetricChoice::Custom => {
                let src = c.g_diag.as_deref().ok_or_else(|| CliError::Config("--metric custom needs --g-diag".into()))?;
                let parts: Vec<&str> = src.split(';').collect();
                if parts.len() != 4 {
                    return Err(CliError::Config("--g-diag needs four ';'-separated expressions".into()));
                }
                let exprs = [parse_expr(parts[0])?, parse_expr(parts[1])?, parse_expr(parts[2])?, parse_expr(parts[3])?];
                let domain = Domain::new(c.t_min.unwrap_or(0.0), c.t_max.unwrap_or(100.0), c.half_width);
                MetricSpec::new(MetricKind::CustomDiagonal(Box::new(exprs)), domain).map_err(config)?
            }
        };
        let frame = c.frame.unwrap_or(FrameChoice::Geodesic);
        if frame == FrameChoice::Graph && metric_choice != MetricChoice::Minkowski {
            return Err(CliError::Config("--frame graph needs --metric minkowski".into()));
        }
        let target = c.target.as_deref().map(parse_target).transpose()?;
        let tracer_choice = c.tracer.unwrap_or(if c.step.is_some() || metric_choice == MetricChoice::Custom {
            TracerChoice::Numerical
        } else {
            TracerChoice::ClosedForm
        });
        let tracer = match tracer_choice {
            TracerChoice::ClosedForm => Tracer::ClosedForm,
            TracerChoice::Numerical => Tracer::Numerical { step: c.step.unwrap_or(DEFAULT_STEP) },
        };
        Ok(Self {
            metric,
            metric_choice,
            frame,
            target,
            tracer,
            n: c.n,
            seed: c.seed,
            tol: c.tol,
            out: c.out,
            format: c.format.unwrap_or_default(),
        })
    }

    pub fn default_target(&self) -> Target<f64> {
        self.target.unwrap_or(match self.metric_choice {
            MetricChoice::Flrw => Target::Singularity,
            MetricChoice::Minkowski => Target::Cauchy(0.0),
            MetricChoice::Custom => Target::Cauchy(self.metric.domain().t_min),
        })
    }

    pub fn build_frame(&self) -> Result<Box<dyn ConformalFrame<f64>>, CliError> {
        match self.frame {
            FrameChoice::Graph => Ok(Box::new(GraphFrame::new())),
            FrameChoice::Geodesic => {
                let spec = FrameSpec { metric: self.metric.clone(), target: self.default_target(), tracer: self.tracer };
                match GeodesicFrame::new(spec) {
                    Ok(f) => Ok(Box::new(f)),
                    Err(FrameError::Unsupported(msg)) => Err(CliError::Config(msg)),
                    Err(e) => Err(CliError::Domain(e.name().into(), e.to_string())),
                }
            }
        }
    }

    /// Fibonacci sample, or a seeded random one when a seed is set.
    pub fn sample(&self, default_n: usize) -> Result<SkySample<f64>, CliError> {
        let n = self.n.unwrap_or(default_n);
        let scheme = match self.seed {
            Some(seed) => SkyScheme::Random { seed },
            None => SkyScheme::Fibonacci,
        };
        sample_sky(n, scheme).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Parses `a,b,c,d` into a four-vector.
pub fn parse_vec4(s: &str) -> Result<FourVector<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated components, got {}", parts.len()));
    }
    let mut v = [0.0; 4];
    for (k, p) in parts.iter().enumerate() {
        v[k] = p.parse::<f64>().map_err(|e| format!("component {}: {e}", k + 1))?;
        if !v[k].is_finite() {
            return Err(format!("component {} is not finite", k + 1));
        }
    }
    Ok(FourVector(v))
}
