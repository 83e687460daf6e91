//! The `hem` command line.
//!
//! Every invocation is normalized into a [`RunConfig`]: a `--config` file
//! supplies the base, subcommand flags override it, and the merged config is
//! dispatched. Without a subcommand the config's own `command` runs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::closedform::{fzz_conic, fzz_solve_mu_r, hem_constant, HemLabel};
use crate::coef::Coef;
use crate::config::{Command, RunConfig};
use crate::error::{HemError, Result};
use crate::fock::{singular_certificate, singular_vector_level2, Sector};
use crate::gmc::{scaling_fit, FieldDomain, FieldSampler};
use crate::params::{KacLabel, Params};
use crate::quadrature::{BoundaryIntegral, ProbeIntegral};
use crate::report::{canonical_json, constant_json, constants_csv, io_err, CheckStatus, VerificationReport};
use crate::suite::{self, SuiteName, SuiteOptions, GMC_MIN_SAMPLES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hem", version, about = "Verify higher equations of motion of bulk and boundary Liouville CFT")]
pub struct Cli {
    /// TOML run configuration; flags given on the command line override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON result here (and CSV next to it).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print JSON instead of a text summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Option<Cmd>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "mu-l")]
    pub mu_l: Option<f64>,
    #[arg(long = "mu-r")]
    pub mu_r: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Stated and chained values of the four HEM constants.
    Constants(ParamArgs),
    /// Exact level-2 singular vector certificate.
    SingularVector {
        #[arg(long, default_value = "bulk")]
        sector: String,
        /// Substitute a Kac momentum `r,s[,±]`.
        #[arg(long = "at-kac")]
        at_kac: Option<String>,
    },
    /// Selberg, Dotsenko–Fateev and Neretin closed forms against quadrature and Monte Carlo.
    VerifySelberg {
        #[arg(long = "mc-samples")]
        mc_samples: Option<u64>,
    },
    /// Residue at the (2,1) pole, fitted against the closed form.
    Residue {
        /// J1, I2, I11-op or I11-same.
        #[arg(long)]
        integral: String,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Regularity probe of `(α − α_{2,1})·J(α)` near the pole.
    ProbeRegularity {
        /// J1, J2, J3, J2+J3 or phase-free.
        #[arg(long)]
        integral: String,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// GMC scaling exponent of a `γ` insertion near an `α` insertion.
    GmcFusion {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run a verification suite: algebra, selberg, residues, chains, gmc or all.
    Suite {
        name: String,
        /// Restrict the residue checks to one coupling.
        #[arg(long)]
        gamma: Option<f64>,
        /// GMC field samples.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "mc-samples")]
        mc_samples: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
    },
}

/// Result of one command, before rendering.
#[derive(Debug)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub status: CheckStatus,
    /// Extra CSV written next to `--out`.
    pub csv: Option<String>,
}

impl Outcome {
    fn from_report(r: VerificationReport) -> Result<Self> {
        let status = match r.status() {
            "fail" => CheckStatus::Fail,
            "inconclusive" => CheckStatus::Inconclusive,
            _ => CheckStatus::Pass,
        };
        let text = render_report(&r);
        Ok(Self { json: r.to_json_value(), text, status, csv: Some(r.to_csv()?) })
    }

    pub fn exit_code(&self) -> i32 {
        if self.status == CheckStatus::Fail {
            EXIT_FAIL
        } else {
            EXIT_OK
        }
    }
}

pub fn render_report(r: &VerificationReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        s += &format!("{:<13} {}  {}\n", c.status.as_str().to_uppercase(), c.id, c.detail);
    }
    s += &format!("suite {}: {} ({} checks)\n", r.suite, r.status(), r.checks.len());
    s
}

pub fn error_exit_code(e: &HemError) -> i32 {
    match e {
        HemError::Usage(_)
        | HemError::InvalidParams(_)
        | HemError::Phase { .. }
        | HemError::Domain(_)
        | HemError::Resolution(_)
        | HemError::Io(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn default_params() -> Params {
    Params { gamma: 1.0, mu: 1.0, mu_l: 0.0, mu_r: 0.0 }
}

fn apply_params(p: &mut Params, a: &ParamArgs) {
    if let Some(g) = a.gamma {
        p.gamma = g;
    }
    if let Some(m) = a.mu {
        p.mu = m;
    }
    if let Some(m) = a.mu_l {
        p.mu_l = m;
    }
    if let Some(m) = a.mu_r {
        p.mu_r = m;
    }
}

/// Merges the optional config file with the command-line flags.
pub fn effective_config(cli: &Cli) -> Result<(RunConfig, SuiteOptions)> {
    let base = match &cli.config {
        Some(path) => Some(RunConfig::load(path)?),
        None => None,
    };
    let mut cfg = match (&base, &cli.command) {
        (Some(b), _) => b.clone(),
        (None, Some(_)) => RunConfig::new(Command::Constants, default_params()),
        (None, None) => return Err(HemError::Usage("a subcommand or --config is required".into())),
    };
    let mut opts = SuiteOptions::from(&cfg);
    let gamma_only = |p: &mut Params, g: Option<f64>| apply_params(p, &ParamArgs { gamma: g, ..Default::default() });
    if let Some(cmd) = &cli.command {
        match cmd {
            Cmd::Constants(a) => {
                cfg.command = Command::Constants;
                apply_params(&mut cfg.params, a);
            }
            Cmd::SingularVector { sector, at_kac } => {
                cfg.command = Command::SingularVector;
                cfg.sector = Some(sector.clone());
                cfg.at_kac = at_kac.clone().or(cfg.at_kac);
            }
            Cmd::VerifySelberg { mc_samples } => {
                cfg.command = Command::VerifySelberg;
                if let Some(n) = mc_samples {
                    cfg.quadrature.mc_samples = *n;
                }
            }
            Cmd::Residue { integral, gamma } => {
                cfg.command = Command::Residue;
                cfg.integral = Some(integral.clone());
                gamma_only(&mut cfg.params, *gamma);
            }
            Cmd::ProbeRegularity { integral, gamma } => {
                cfg.command = Command::ProbeRegularity;
                cfg.integral = Some(integral.clone());
                gamma_only(&mut cfg.params, *gamma);
            }
            Cmd::GmcFusion { gamma, alpha, radii, samples, grid } => {
                cfg.command = Command::GmcFusion;
                cfg.alpha = Some(*alpha);
                gamma_only(&mut cfg.params, *gamma);
                if let Some(r) = radii {
                    cfg.gmc.radii = r.clone();
                }
                if let Some(n) = samples {
                    cfg.gmc.samples = *n;
                }
                if let Some(n) = grid {
                    cfg.gmc.grid_points = *n;
                }
            }
            Cmd::Suite { name, gamma, samples, mc_samples, grid } => {
                cfg.command = Command::Suite;
                cfg.suite = Some(name.clone());
                if let Some(n) = samples {
                    cfg.gmc.samples = *n;
                }
                if let Some(n) = mc_samples {
                    cfg.quadrature.mc_samples = *n;
                }
                if let Some(n) = grid {
                    cfg.gmc.grid_points = *n;
                }
                opts.gamma = *gamma;
            }
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.validate()?;
    let gamma = opts.gamma;
    opts = SuiteOptions::from(&cfg);
    opts.gamma = gamma;
    Ok((cfg, opts))
}

fn parse_sector(s: &str) -> Result<Sector> {
    match s {
        "bulk" => Ok(Sector::Bulk),
        "boundary" => Ok(Sector::Boundary),
        other => Err(HemError::Usage(format!("unknown sector {other:?} (bulk, boundary)"))),
    }
}

pub fn run_config(cfg: &RunConfig, opts: &SuiteOptions) -> Result<Outcome> {
    match cfg.command {
        Command::Constants => constants(&cfg.params),
        Command::SingularVector => {
            let sector = parse_sector(cfg.sector.as_deref().unwrap_or("bulk"))?;
            let kac = cfg.at_kac.as_deref().map(str::parse::<KacLabel>).transpose()?;
            singular_vector(sector, kac)
        }
        Command::VerifySelberg => Outcome::from_report(suite::run_suite(SuiteName::Selberg, opts)),
        Command::Residue => {
            let name = cfg.integral.as_deref().unwrap_or_default();
            let g = cfg.params.gamma;
            let check = if name.eq_ignore_ascii_case("J1") {
                suite::j1_residue_check(g, opts)
            } else {
                suite::boundary_residue_check(name.parse::<BoundaryIntegral>()?, g, opts)
            };
            let mut r = VerificationReport::new("residue", cfg.seed);
            r.checks.push(check);
            Outcome::from_report(r)
        }
        Command::ProbeRegularity => {
            let which: ProbeIntegral = cfg.integral.as_deref().unwrap_or_default().parse()?;
            let mut r = VerificationReport::new("probe-regularity", cfg.seed);
            r.checks.push(suite::regularity_check(which, cfg.params.gamma, opts));
            Outcome::from_report(r)
        }
        Command::GmcFusion => gmc_fusion(cfg),
        Command::Suite => {
            let name: SuiteName = cfg.suite.as_deref().unwrap_or_default().parse()?;
            Outcome::from_report(suite::run_suite(name, opts))
        }
    }
}

pub fn constants(p: &Params) -> Result<Outcome> {
    p.validate()?;
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut text = format!("gamma={} mu={} mu_L={} mu_R={} ({} phase)\n", p.gamma, p.mu, p.mu_l, p.mu_r, p.phase());
    for label in HemLabel::ALL {
        match hem_constant(label, p) {
            Ok(c) => {
                text += &format!("{:<11} stated {:>22.15e}  chained {:>22.15e}\n", label.as_str(), c.stated, c.chained);
                entries.push(constant_json(&c, p, suite::citation_of(label)));
                rows.push((*p, c));
            }
            Err(HemError::Phase { .. }) => {
                text += &format!("{:<11} critical γ unsupported\n", label.as_str());
                entries.push(json!({
                    "label": label.as_str(),
                    "params": p,
                    "error": "critical γ unsupported",
                }));
            }
            Err(e) => return Err(e),
        }
    }
    let conic = fzz_conic(p);
    let roots = fzz_solve_mu_r(p.gamma, p.mu_l, p.mu);
    text += &format!("FZZ bracket {:.6e} (on conic: {}), mu_R roots at fixed (gamma, mu, mu_L): {roots:?}\n", conic.value, conic.on_conic);
    Ok(Outcome {
        json: json!({
            "constants": entries,
            "phase": p.phase().to_string(),
            "fzz": { "bracket": conic.value, "on_conic": conic.on_conic, "mu_r_roots": roots },
        }),
        text,
        status: CheckStatus::Report,
        csv: Some(constants_csv(&rows)?),
    })
}

pub fn singular_vector(sector: Sector, kac: Option<KacLabel>) -> Result<Outcome> {
    let cert = singular_certificate(sector)?;
    let ok = cert.orders_agree && cert.matches_factored;
    let mut json = serde_json::to_value(&cert).map_err(io_err)?;
    let mut text = format!("expanded: {}\nfactored: {}\nverified: {ok}\n", cert.expanded, cert.factored);
    if let Some(label) = kac {
        let at = singular_vector_level2(sector)?.subs_alpha(&Coef::kac(label))?;
        let zero = at.is_zero();
        text += &format!("at alpha_{{{label}}}: {at} (zero: {zero})\n");
        json["at_kac"] = json!({ "label": label.to_string(), "value": at.to_string(), "zero": zero });
    }
    Ok(Outcome { json, text, status: CheckStatus::from_bool(ok), csv: None })
}

pub fn gmc_fusion(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = cfg.alpha.ok_or_else(|| HemError::Usage("gmc-fusion needs --alpha".into()))?;
    let sampler = FieldSampler::log_polar(FieldDomain::Disc, cfg.gmc.grid_points)?;
    let fit = scaling_fit(&sampler, &cfg.params, alpha, &cfg.gmc.radii, cfg.gmc.samples, cfg.seed)?;
    let status = if fit.samples < GMC_MIN_SAMPLES { CheckStatus::Inconclusive } else { CheckStatus::from_bool(fit.pass) };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["radius", "log_mean", "std_error"]).map_err(io_err)?;
    let mut text = String::new();
    for pt in &fit.points {
        w.write_record([pt.radius.to_string(), pt.log_mean.to_string(), pt.std_error.to_string()]).map_err(io_err)?;
        text += &format!("r={:<8} log mean {:>12.6} ± {:.2e}\n", pt.radius, pt.log_mean, pt.std_error);
    }
    let csv = String::from_utf8(w.into_inner().map_err(io_err)?).map_err(io_err)?;
    text += &format!(
        "slope {:.4} ± {:.4}, target {:.4}: {}\n",
        fit.slope,
        fit.slope_std_error,
        fit.target,
        status.as_str()
    );
    let mut json = serde_json::to_value(&fit).map_err(io_err)?;
    json["status"] = json!(status.as_str());
    Ok(Outcome { json, text, status, csv: Some(csv) })
}

fn write_outputs(path: &Path, o: &Outcome) -> Result<()> {
    std::fs::write(path, canonical_json(&o.json)).map_err(io_err)?;
    if let Some(csv) = &o.csv {
        std::fs::write(path.with_extension("csv"), csv).map_err(io_err)?;
    }
    Ok(())
}

/// Sizes the global thread pool from `HEM_THREADS`, if set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HEM_THREADS") {
        let n: usize = v.parse().map_err(|_| HemError::Usage(format!("HEM_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(io_err)?;
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let run = || -> Result<(Outcome, Option<PathBuf>)> {
        init_threads()?;
        let (cfg, opts) = effective_config(&cli)?;
        Ok((run_config(&cfg, &opts)?, cfg.out.clone()))
    };
    match run() {
        Ok((outcome, out)) => {
            if cli.json {
                print!("{}", canonical_json(&outcome.json));
            } else {
                print!("{}", outcome.text);
            }
            if let Some(path) = out {
                if let Err(e) = write_outputs(&path, &outcome) {
                    eprintln!("hem: {e}");
                    return error_exit_code(&e);
                }
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("hem: {e}");
            error_exit_code(&e)
        }
    }
}
