//! Command-line front end.
//!
//! Exit codes: 0 when every assertion passes (warnings allowed), 1 when an
//! audit reports a FAIL, 2 on usage, config or runtime errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cayley::{self, estimate_delta, CayleyBall, DeltaParams, HyperbolicityEstimate};
use crate::error::{Error, Result};
use crate::experiments::{
    audit_asdim_boundary, audit_claim, audit_free_shift, audit_hyperfiniteness_witness,
    audit_lemma_bound, audit_substitution, audit_tubular, BoundaryMetricSample, DeltaInfo,
    ExperimentReport, GroupContext, RunConfig, Status,
};
use crate::group::{GroupOracle, Presentation, Preset};
use crate::rational::Rational;
use crate::rays::{make_periodic_ray, phi_hat, RayRecord};
use crate::shift_space::{
    asdim_cover, audit_cover, CarrierFile, CoverAudit, CARRIER_SCHEMA_VERSION,
};

/// Overrides the vertex cap of every ball.
pub const MAX_VERTICES_ENV: &str = "HYPERBOUND_MAX_VERTICES";

const AUDIT_HELP: &str = "\
Reports are JSON with a schema_version. --csv writes the per-item table:
  lemma-bound   eta,point,witness,multiplicity,sigma,model,tail_class,t0,t1,travel_bound
  claim         eta,p,q,rho,rho_s,searched,exact
  free-shift    sample,eta,g,sigma_g_eta,first,second,truncated_ok
  asdim         eta,point,witness,model,class
  hyperfinite   eta,n,classes
  tubular       base_distance,y0,target,t0,t1,max_gap,bound
  substitution  (no table)";

#[derive(Parser, Debug)]
#[command(
    name = "hyperbound",
    version,
    about = "Finite-scale audits of boundary actions of hyperbolic groups"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    /// Built-in group: f2, f3, z2z3, genus2.
    #[arg(long, conflicts_with = "presentation")]
    preset: Option<Preset>,
    /// Presentation config file.
    #[arg(long)]
    presentation: Option<PathBuf>,
    /// δ override as a rational `p/q`; only raises the measured value.
    #[arg(long)]
    delta: Option<Rational>,
    /// Ball radius.
    #[arg(long)]
    radius: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct RayArgs {
    /// Periodic base word of η; repeat for several rays.
    #[arg(long)]
    eta: Vec<String>,
    /// Truncation length N.
    #[arg(long)]
    depth: Option<usize>,
    /// Lex-least search horizon M.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    margin: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct AuditArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    ray: RayArgs,
    /// Second point `g·η` for the claim audit, given by `g`.
    #[arg(long)]
    zeta: Option<String>,
    /// Boundary-ball radius.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rays sampled by the free-shift audit.
    #[arg(long)]
    sample: Option<usize>,
    /// Minimum overlap for truncated ρ_s.
    #[arg(long)]
    min_window: Option<usize>,
    /// Report path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-item CSV table path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Builds a Cayley ball and writes it as JSON.
    BuildBall {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimates δ on a ball.
    EstimateDelta {
        /// Ball file written by build-ball.
        #[arg(long, conflicts_with_all = ["preset", "presentation"])]
        ball: Option<PathBuf>,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 4)]
        side_bound: usize,
        #[arg(long, default_value_t = 30_000)]
        sample: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lex-least type prefix of a periodic ray.
    Phi {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        ray: RayArgs,
        /// Slack of the target set (default ⌈2δ⌉).
        #[arg(long)]
        slack: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary points within ρ-distance r of η, with their σ̂.
    BoundaryBall {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        ray: RayArgs,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shift-forest cover of a carrier at a scale.
    AsdimCover {
        #[arg(long)]
        carrier: PathBuf,
        #[arg(long)]
        scale: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs an audit and writes its report.
    Audit {
        #[command(subcommand)]
        kind: AuditKind,
    },
}

#[derive(Subcommand, Debug)]
enum AuditKind {
    /// Tail classes of σ̂ on a boundary ball and their ρ_s-diameters.
    #[command(after_help = AUDIT_HELP)]
    LemmaBound(AuditArgs),
    /// ρ ≤ ρ_s on boundary-ball pairs.
    #[command(after_help = AUDIT_HELP)]
    Claim(AuditArgs),
    /// Shift disjunction for generators acting on free-group rays.
    #[command(after_help = AUDIT_HELP)]
    FreeShift(AuditArgs),
    /// Pulled-back shift-space cover on boundary balls.
    #[command(after_help = AUDIT_HELP)]
    Asdim(AuditArgs),
    /// Tail relation and its finite filtration on boundary balls.
    #[command(after_help = AUDIT_HELP)]
    Hyperfinite(AuditArgs),
    /// Fellow-travel of geodesics within a radius.
    #[command(after_help = AUDIT_HELP)]
    Tubular {
        #[command(flatten)]
        args: AuditArgs,
        /// Radius of the geodesics examined (default: ball radius).
        #[arg(long)]
        within: Option<usize>,
    },
    /// Geodesic segment substitutions within a radius.
    #[command(after_help = AUDIT_HELP)]
    Substitution {
        #[command(flatten)]
        args: AuditArgs,
        #[arg(long)]
        within: Option<usize>,
        #[arg(long)]
        max_segment: Option<usize>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return 2;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn vertex_cap() -> Result<Option<usize>> {
    match std::env::var(MAX_VERTICES_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{MAX_VERTICES_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Resolves the group and the config it starts from.
fn load(group: &GroupArgs) -> Result<(Arc<GroupOracle>, RunConfig)> {
    let (oracle, mut cfg) = match (&group.preset, &group.presentation) {
        (Some(p), _) => (p.oracle(), RunConfig::for_preset(*p)),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let pres = Presentation::parse(&text)?;
            let mut cfg = RunConfig::for_preset(Preset::F2);
            cfg.group = path.display().to_string();
            cfg.letter_order = pres.oracle.alphabet().symbols().iter().collect();
            cfg.eta.clear();
            cfg.delta_override = pres.delta_override;
            (pres.oracle, cfg)
        }
        (None, None) => {
            return Err(Error::Config(
                "one of --preset or --presentation is required".into(),
            ))
        }
    };
    if let Some(d) = group.delta {
        cfg.delta_override = Some(d);
    }
    if let Some(r) = group.radius {
        cfg.ball_radius = r;
        cfg.delta_params.side_bound = cfg.delta_params.side_bound.min(r);
    }
    if let Some(cap) = vertex_cap()? {
        cfg.vertex_cap = cap;
    }
    Ok((Arc::new(oracle), cfg))
}

fn apply_ray(cfg: &mut RunConfig, ray: &RayArgs) {
    if !ray.eta.is_empty() {
        cfg.eta = ray.eta.clone();
    }
    cfg.depth = ray.depth.unwrap_or(cfg.depth);
    cfg.horizon = ray.horizon.unwrap_or(cfg.horizon);
    cfg.margin = ray.margin.unwrap_or(cfg.margin);
}

fn context(group: &GroupArgs, ray: &RayArgs) -> Result<GroupContext> {
    let (oracle, mut cfg) = load(group)?;
    apply_ray(&mut cfg, ray);
    GroupContext::new(oracle, cfg)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(format!("{}: {e}", path.display()))
    })
}

fn emit(out: &Option<PathBuf>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct PhiOutput {
    eta: RayRecord,
    sigma: String,
    depth: usize,
    horizon: usize,
    slack: usize,
    delta: DeltaInfo,
}

#[derive(Serialize)]
struct PointOutput {
    witness: String,
    multiplicity: usize,
    sigma: String,
    model: String,
}

#[derive(Serialize)]
struct BoundaryOutput {
    eta: RayRecord,
    r: usize,
    delta: DeltaInfo,
    exact: bool,
    points: Vec<PointOutput>,
    unresolved: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct CoverOutput {
    schema_version: u32,
    num_classes: usize,
    class_of: Vec<usize>,
    audit: CoverAudit,
}

#[derive(Serialize)]
struct DeltaOutput {
    radius: usize,
    estimate: HyperbolicityEstimate,
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::BuildBall { group, out } => {
            let (oracle, cfg) = load(&group)?;
            let ball = CayleyBall::build(oracle, cfg.ball_radius, cfg.vertex_cap)?;
            let text = cayley::io::to_json(&ball)? + "\n";
            match out {
                Some(p) => write_atomic(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::EstimateDelta {
            ball,
            group,
            side_bound,
            sample,
            seed,
            out,
        } => {
            let ball = match ball {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    cayley::io::from_json(&text)?
                }
                None => {
                    let (oracle, cfg) = load(&group)?;
                    CayleyBall::build(oracle, cfg.ball_radius, cfg.vertex_cap)?
                }
            };
            let estimate = estimate_delta(&ball, DeltaParams::new(side_bound, sample, seed))?;
            emit(
                &out,
                &DeltaOutput {
                    radius: ball.radius(),
                    estimate,
                },
            )?;
        }
        Command::Phi {
            group,
            ray,
            slack,
            out,
        } => {
            let ctx = context(&group, &ray)?;
            let cfg = &ctx.config;
            let base = cfg
                .eta
                .first()
                .ok_or_else(|| Error::Config("--eta is required".into()))?;
            let eta = make_periodic_ray(
                &ctx.ball,
                &ctx.oracle().word(base)?,
                cfg.horizon,
                cfg.margin,
            )?;
            let slack = slack.unwrap_or_else(|| ctx.delta.slack());
            let sigma = phi_hat(&ctx.ball, &eta, cfg.depth, cfg.horizon, slack)?;
            emit(
                &out,
                &PhiOutput {
                    eta: eta.to_record(ctx.oracle()),
                    sigma: ctx.oracle().render(&sigma.letters),
                    depth: cfg.depth,
                    horizon: cfg.horizon,
                    slack,
                    delta: ctx.delta.clone(),
                },
            )?;
        }
        Command::BoundaryBall { group, ray, r, out } => {
            let ctx = context(&group, &ray)?;
            let base = ctx
                .config
                .eta
                .first()
                .ok_or_else(|| Error::Config("--eta is required".into()))?;
            let s = BoundaryMetricSample::build(&ctx, &ctx.oracle().word(base)?, r)?;
            let o = ctx.oracle();
            let points = s
                .ball
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| PointOutput {
                    witness: o.render(&p.witness),
                    multiplicity: p.multiplicity,
                    sigma: o.render(&s.sigma[i].letters),
                    model: s.models[i].render(),
                })
                .collect();
            emit(
                &out,
                &BoundaryOutput {
                    eta: s.eta.to_record(o),
                    r,
                    delta: ctx.delta.clone(),
                    exact: s.exact,
                    points,
                    unresolved: s.ball.unresolved.clone(),
                },
            )?;
        }
        Command::AsdimCover {
            carrier,
            scale,
            out,
        } => {
            let text = fs::read_to_string(&carrier)
                .map_err(|e| Error::Io(format!("{}: {e}", carrier.display())))?;
            let items = CarrierFile::from_json(&text)?.models()?;
            let partition = asdim_cover(&items, scale)?;
            let audit = audit_cover(&partition, scale, &items)?;
            emit(
                &out,
                &CoverOutput {
                    schema_version: CARRIER_SCHEMA_VERSION,
                    num_classes: partition.num_classes,
                    class_of: partition.class_of,
                    audit,
                },
            )?;
        }
        Command::Audit { kind } => return run_audit(kind),
    }
    Ok(0)
}

type AuditJob = Box<dyn Fn(&GroupContext) -> Result<ExperimentReport>>;

fn run_audit(kind: AuditKind) -> Result<i32> {
    let (args, job): (AuditArgs, AuditJob) = match kind {
        AuditKind::LemmaBound(a) => (a, Box::new(audit_lemma_bound)),
        AuditKind::Claim(a) => (a, Box::new(audit_claim)),
        AuditKind::FreeShift(a) => (a, Box::new(audit_free_shift)),
        AuditKind::Asdim(a) => (a, Box::new(audit_asdim_boundary)),
        AuditKind::Hyperfinite(a) => (a, Box::new(audit_hyperfiniteness_witness)),
        AuditKind::Tubular { args, within } => (
            args,
            Box::new(move |c: &GroupContext| {
                audit_tubular(c, within.unwrap_or(c.config.ball_radius))
            }),
        ),
        AuditKind::Substitution {
            args,
            within,
            max_segment,
        } => (
            args,
            Box::new(move |c: &GroupContext| {
                audit_substitution(
                    c,
                    within.unwrap_or(c.config.ball_radius),
                    max_segment.unwrap_or(c.config.max_segment),
                )
            }),
        ),
    };
    let (oracle, mut cfg) = load(&args.group)?;
    apply_ray(&mut cfg, &args.ray);
    cfg.zeta = args.zeta.clone().or(cfg.zeta);
    cfg.r = args.r.unwrap_or(cfg.r);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.sample = args.sample.unwrap_or(cfg.sample);
    cfg.min_window = args.min_window.unwrap_or(cfg.min_window);
    let ctx = GroupContext::new(oracle, cfg)?;
    let mut report = job(&ctx)?;
    report.stamp();
    if let Some(p) = &args.csv {
        write_atomic(p, &report.table.to_csv()?)?;
    }
    let text = report.to_json()? + "\n";
    match &args.out {
        Some(p) => write_atomic(p, &text)?,
        None => print!("{text}"),
    }
    let status = report.status();
    eprintln!("{status} {}", report.experiment);
    for a in report
        .assertions
        .iter()
        .filter(|a| a.status != Status::Pass)
    {
        eprintln!("  {} {}: {}", a.status, a.name, a.detail);
    }
    Ok(if status == Status::Fail { 1 } else { 0 })
}
