//! `perc3` — percolation travel-time simulator.
//!
//! Subcommands sample site configurations on the box `Λ(n) = [-n,n]³`,
//! estimate cluster statistics, check the box/ball reachability events,
//! replay the constructive walks, and scan travel-time scaling. Every run
//! is reproducible from its seed; reports embed their full parameter set
//! and outputs are byte-identical for any `--threads` value.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 a check or walk reported
//! a violation (the report is still written), 4 filesystem failure.

mod cfg;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use perc3::events::{check_event_e, check_event_f, EventReport, Mode};
use perc3::geometry::coverage_check;
use perc3::lattice::{admissible_radii, save_perc};
use perc3::montecarlo::{
    estimate_theta, scaling_scan, tail_exit, tail_square, ExperimentReport, THETA_SLACK,
};
use perc3::walks::{cube_walk, sphere_walk, theorem_path, WalkBudget, WalkError, WalkOutcome};
use perc3::{BoxSpec, Configuration, Site};

use cfg::{check_half_side, check_probability, need, CliError, ConfigFile, IntListArg, SiteArg};
use render::{coverage_report, emit, event_report, walk_report, Format};

#[derive(Parser)]
#[command(name = "perc3", version, about = "Travel times in 3D site percolation")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores); outputs
    /// are identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value file supplying any omitted flag; `# `-prefixed CSV report
    /// headers are accepted, so a report reproduces its own run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckMode {
    /// Every center and sub-shape (small boxes only).
    Exhaustive,
    /// Uniformly drawn centers with a one-sided confidence bound.
    Sampled,
}

impl FromStr for CheckMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(CheckMode::Exhaustive),
            "sampled" => Ok(CheckMode::Sampled),
            other => Err(format!("unknown mode {other:?} (expected exhaustive or sampled)")),
        }
    }
}

/// Walk cost and shape limits; unset fields fall back to the box defaults.
#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Per-leg cost ceiling (default 4·⌈ln(2n+1)⌉).
    #[arg(long)]
    leg_budget: Option<u32>,
    /// Thickness of sphere-walk triangle targets (default 3).
    #[arg(long)]
    thickness: Option<f64>,
    /// Contraction factor, must lie in (0.96, 1) (default 0.97).
    #[arg(long)]
    lambda: Option<f64>,
    /// Radius below which the sphere walk closes directly (default
    /// min(600, n/8)).
    #[arg(long)]
    stop_radius: Option<f64>,
    /// Hard cap on legs per walk (default 64·⌈ln(2n+1)⌉).
    #[arg(long)]
    max_steps: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a configuration and save it to --out as a .perc file.
    Sample {
        #[arg(long)]
        n: Option<i32>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimate the origin-to-boundary connection probability per box size.
    Theta {
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated box half-sides, e.g. 10,20,40.
        #[arg(long)]
        radii: Option<IntListArg>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exit-time tail of T(0, ∂Λ(m)) against the (1-(1-δ)θ̂)^k bound.
    TailExit {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        m: Option<i32>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Box half-side for the density estimate (default 2m).
        #[arg(long)]
        theta_r: Option<i32>,
        /// Slack applied to the density estimate (default 0.1).
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Tail factorization over the 24 quarter squares and 48 triangles.
    TailSquare {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        m: Option<i32>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the box event: every center reaches all its quarter squares
    /// within k closed sites.
    CheckE {
        #[command(flatten)]
        args: CheckArgs,
    },
    /// Check the ball event: every center reaches all its thickened
    /// triangles within k closed sites.
    CheckF {
        #[command(flatten)]
        args: CheckArgs,
    },
    /// Run the outward-doubling cube walk from x to the central box.
    WalkCube {
        #[arg(long)]
        n: Option<i32>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Start site as x,y,z.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<SiteArg>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the shrinking-sphere walk between two central sites.
    WalkSphere {
        #[arg(long)]
        n: Option<i32>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Start site as x,y,z; must lie in Λ(n/4).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<SiteArg>,
        /// Goal site as x,y,z; must lie in Λ(n/4).
        #[arg(long, allow_hyphen_values = true)]
        y: Option<SiteArg>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compose cube walks and the sphere walk into an x→y route.
    TheoremPath {
        #[arg(long)]
        n: Option<i32>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<SiteArg>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<SiteArg>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Scan max travel time over box sizes against the (ln n)² envelope.
    Scaling {
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated ascending box half-sides, e.g. 16,32,64.
        #[arg(long)]
        sizes: Option<IntListArg>,
        #[arg(long)]
        configs: Option<u32>,
        #[arg(long)]
        pairs: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify that thickened triangles cover every sphere boundary.
    Coverage {
        /// Thickness of the triangle targets (default 3).
        #[arg(long)]
        t: Option<f64>,
        /// Check all expressible squared radii up to this value.
        #[arg(long)]
        rmax_squared: Option<i64>,
    },
}

#[derive(Args, Clone, Copy)]
struct CheckArgs {
    #[arg(long)]
    n: Option<i32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cost threshold the event is checked against.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum)]
    mode: Option<CheckMode>,
    /// Centers drawn in sampled mode.
    #[arg(long)]
    samples: Option<u64>,
    /// Seed of the sampled-mode center draws.
    #[arg(long)]
    sample_seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn default_leg_budget(n: i32) -> u32 {
    4 * ((2 * n + 1) as f64).ln().ceil() as u32
}

struct Sampled {
    config: Configuration,
    n: i32,
    p: f64,
    seed: u64,
}

fn sample_config(
    file: &ConfigFile,
    n: Option<i32>,
    p: Option<f64>,
    seed: Option<u64>,
) -> Result<Sampled, CliError> {
    let n = check_half_side(need(file.resolve(n, &["n"])?, "n")?)?;
    let p = check_probability(need(file.resolve(p, &["p"])?, "p")?)?;
    let seed = file.resolve(seed, &["seed", "base_seed"])?.unwrap_or(0);
    Ok(Sampled { config: Configuration::sample(n, p, seed), n, p, seed })
}

fn resolve_budget(file: &ConfigFile, args: BudgetArgs, n: i32) -> Result<WalkBudget, CliError> {
    let leg_budget = file
        .resolve(args.leg_budget, &["leg_budget", "leg-budget"])?
        .unwrap_or_else(|| default_leg_budget(n));
    let mut budget = WalkBudget::for_box(n, leg_budget);
    if let Some(t) = file.resolve(args.thickness, &["thickness"])? {
        if t < 0.0 {
            return Err(CliError::validation(format!("thickness must be ≥ 0, got {t}")));
        }
        budget.thickness = t;
    }
    if let Some(l) = file.resolve(args.lambda, &["lambda"])? {
        if !(0.96..1.0).contains(&l) || l == 0.96 {
            return Err(CliError::validation(format!(
                "lambda must lie strictly between 0.96 and 1, got {l}"
            )));
        }
        budget.lambda = l;
    }
    if let Some(s) = file.resolve(args.stop_radius, &["stop_radius", "stop-radius"])? {
        if s < 1.0 {
            return Err(CliError::validation(format!("stop_radius must be ≥ 1, got {s}")));
        }
        budget.stop_radius = s;
    }
    if let Some(m) = file.resolve(args.max_steps, &["max_steps", "max-steps"])? {
        budget.max_steps = m;
    }
    Ok(budget)
}

fn set_sample_params(report: &mut ExperimentReport, s: &Sampled) {
    report.set_param("n", s.n);
    report.set_param("p", s.p);
    report.set_param("seed", s.seed);
}

fn set_budget_params(report: &mut ExperimentReport, b: &WalkBudget) {
    report.set_param("leg_budget", b.leg_budget);
    report.set_param("thickness", b.thickness);
    report.set_param("lambda", b.lambda);
    report.set_param("stop_radius", b.stop_radius);
    report.set_param("max_steps", b.max_steps);
}

fn check_inside(site: Site, n: i32, what: &str) -> Result<Site, CliError> {
    if site.chebyshev() <= n {
        Ok(site)
    } else {
        Err(CliError::validation(format!(
            "{what} ({},{},{}) lies outside the half-side {n} box",
            site.x, site.y, site.z
        )))
    }
}

/// Walk results map to exit codes: reaching the goal is success, anything
/// else is a reported violation.
fn finish_walk(
    mut report: ExperimentReport,
    s: &Sampled,
    budget: &WalkBudget,
    outcome: WalkOutcome,
    format: Format,
    out: Option<&PathBuf>,
) -> Result<u8, CliError> {
    set_sample_params(&mut report, s);
    set_budget_params(&mut report, budget);
    emit(&report, format, out.map(PathBuf::as_path))?;
    Ok(if outcome == WalkOutcome::Reached { 0 } else { 3 })
}

fn walk_failure(
    experiment: &str,
    err: WalkError,
    s: &Sampled,
    budget: &WalkBudget,
    format: Format,
    out: Option<&PathBuf>,
) -> Result<u8, CliError> {
    match err {
        WalkError::ContractionViolated { step, radius, next_radius, waypoint } => {
            let mut report = ExperimentReport::new(experiment, "exact");
            report.set_param("outcome", "contraction_violated");
            report.set_param("step", step);
            report.set_param("radius", radius);
            report.set_param("next_radius", next_radius);
            report.set_param("waypoint", SiteArg(waypoint));
            set_sample_params(&mut report, s);
            set_budget_params(&mut report, budget);
            emit(&report, format, out.map(PathBuf::as_path))?;
            eprintln!("contraction violated at step {step}: {radius} -> {next_radius}");
            Ok(3)
        }
        other => Err(CliError::validation(other.to_string())),
    }
}

fn run_check(
    file: &ConfigFile,
    args: CheckArgs,
    check: impl Fn(&Configuration, u32, Mode) -> EventReport,
    experiment: &str,
    format: Format,
    out: Option<&PathBuf>,
) -> Result<u8, CliError> {
    let s = sample_config(file, args.n, args.p, args.seed)?;
    let k = need(file.resolve(args.k, &["k"])?, "k")?;
    let mode = match file.resolve(args.mode, &["mode"])?.unwrap_or(CheckMode::Exhaustive) {
        CheckMode::Exhaustive => {
            let sites = s.config.box_spec().site_count();
            if sites > perc3::events::EXHAUSTIVE_SITE_LIMIT {
                return Err(CliError::validation(format!(
                    "exhaustive mode covers at most {} sites, the box has {sites}; \
                     use --mode sampled",
                    perc3::events::EXHAUSTIVE_SITE_LIMIT
                )));
            }
            Mode::Exhaustive
        }
        CheckMode::Sampled => Mode::Sampled {
            count: file.resolve(args.samples, &["samples"])?.unwrap_or(1000),
            seed: file.resolve(args.sample_seed, &["sample_seed", "sample-seed"])?.unwrap_or(0),
        },
    };
    let result = check(&s.config, k, mode);
    let mut report = event_report(experiment, &result);
    set_sample_params(&mut report, &s);
    if let Mode::Sampled { count, seed } = &result.mode {
        report.set_param("samples", count);
        report.set_param("sample_seed", seed);
    }
    emit(&report, format, out.map(PathBuf::as_path))?;
    Ok(if result.holds { 0 } else { 3 })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let format = cli.format;
    let out = cli.out.as_ref();

    match cli.command {
        Command::Sample { n, p, seed } => {
            let s = sample_config(&file, n, p, seed)?;
            let path = out.ok_or_else(|| {
                CliError::validation("sample requires --out for the .perc file")
            })?;
            save_perc(&s.config, path)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(0)
        }
        Command::Theta { p, radii, trials, seed } => {
            let p = check_probability(need(file.resolve(p, &["p"])?, "p")?)?;
            let radii = need(file.resolve(radii, &["radii"])?, "radii")?.0;
            if radii.iter().any(|&r| r < 1) {
                return Err(CliError::validation("radii must be at least 1"));
            }
            let trials = need_trials(&file, trials)?;
            let seed = resolve_seed(&file, seed)?;
            let report = estimate_theta(p, &radii, trials, seed);
            emit(&report, format, out.map(PathBuf::as_path))?;
            Ok(0)
        }
        Command::TailExit { p, m, trials, seed, theta_r, delta } => {
            let p = check_probability(need(file.resolve(p, &["p"])?, "p")?)?;
            let m = check_half_side(need(file.resolve(m, &["m"])?, "m")?)?;
            let trials = need_trials(&file, trials)?;
            let seed = resolve_seed(&file, seed)?;
            let theta_r = file.resolve(theta_r, &["theta_r", "theta-r"])?.unwrap_or(2 * m);
            if theta_r < 1 {
                return Err(CliError::validation("theta_r must be at least 1"));
            }
            let delta = file.resolve(delta, &["delta"])?.unwrap_or(THETA_SLACK);
            if !(0.0..1.0).contains(&delta) {
                return Err(CliError::validation(format!("delta must lie in [0,1), got {delta}")));
            }
            let report = tail_exit(p, m, trials, seed, theta_r, delta);
            emit(&report, format, out.map(PathBuf::as_path))?;
            Ok(0)
        }
        Command::TailSquare { p, m, trials, seed } => {
            let p = check_probability(need(file.resolve(p, &["p"])?, "p")?)?;
            let m = check_half_side(need(file.resolve(m, &["m"])?, "m")?)?;
            let trials = need_trials(&file, trials)?;
            let seed = resolve_seed(&file, seed)?;
            let report = tail_square(p, m, trials, seed);
            emit(&report, format, out.map(PathBuf::as_path))?;
            Ok(0)
        }
        Command::CheckE { args } => run_check(&file, args, check_event_e, "check_e", format, out),
        Command::CheckF { args } => run_check(&file, args, check_event_f, "check_f", format, out),
        Command::WalkCube { n, p, seed, x, budget } => {
            let s = sample_config(&file, n, p, seed)?;
            let x = check_inside(need(file.resolve(x, &["x"])?, "x")?.0, s.n, "x")?;
            let budget = resolve_budget(&file, budget, s.n)?;
            match cube_walk(&s.config, x, budget) {
                Ok(trace) => {
                    let mut report = walk_report("walk_cube", &trace);
                    report.set_param("x", SiteArg(x));
                    finish_walk(report, &s, &budget, trace.outcome, format, out)
                }
                Err(e) => walk_failure("walk_cube", e, &s, &budget, format, out),
            }
        }
        Command::WalkSphere { n, p, seed, x, y, budget } => {
            let s = sample_config(&file, n, p, seed)?;
            let x = check_inside(need(file.resolve(x, &["x"])?, "x")?.0, s.n / 4, "x")?;
            let y = check_inside(need(file.resolve(y, &["y"])?, "y")?.0, s.n / 4, "y")?;
            let budget = resolve_budget(&file, budget, s.n)?;
            match sphere_walk(&s.config, x, y, budget) {
                Ok(trace) => {
                    let mut report = walk_report("walk_sphere", &trace);
                    report.set_param("x", SiteArg(x));
                    report.set_param("y", SiteArg(y));
                    finish_walk(report, &s, &budget, trace.outcome, format, out)
                }
                Err(e) => walk_failure("walk_sphere", e, &s, &budget, format, out),
            }
        }
        Command::TheoremPath { n, p, seed, x, y, budget } => {
            let s = sample_config(&file, n, p, seed)?;
            let x = check_inside(need(file.resolve(x, &["x"])?, "x")?.0, s.n, "x")?;
            let y = check_inside(need(file.resolve(y, &["y"])?, "y")?.0, s.n, "y")?;
            let budget = resolve_budget(&file, budget, s.n)?;
            match theorem_path(&s.config, x, y, budget) {
                Ok(trace) => {
                    let mut report = walk_report("theorem_path", &trace);
                    report.set_param("x", SiteArg(x));
                    report.set_param("y", SiteArg(y));
                    finish_walk(report, &s, &budget, trace.outcome, format, out)
                }
                Err(e) => walk_failure("theorem_path", e, &s, &budget, format, out),
            }
        }
        Command::Scaling { p, sizes, configs, pairs, seed } => {
            let p = check_probability(need(file.resolve(p, &["p"])?, "p")?)?;
            let sizes = need(file.resolve(sizes, &["sizes"])?, "sizes")?.0;
            if sizes.is_empty() || sizes[0] < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::validation(
                    "sizes must be strictly ascending half-sides of at least 2",
                ));
            }
            let configs = file.resolve(configs, &["configs", "configs_per_n"])?.unwrap_or(10);
            if configs < 1 {
                return Err(CliError::validation("configs must be at least 1"));
            }
            let pairs = file.resolve(pairs, &["pairs", "pairs_per_config"])?.unwrap_or(10);
            let seed = resolve_seed(&file, seed)?;
            let report = scaling_scan(p, &sizes, configs, pairs, seed);
            emit(&report, format, out.map(PathBuf::as_path))?;
            Ok(0)
        }
        Command::Coverage { t, rmax_squared } => {
            let t = file.resolve(t, &["t", "thickness"])?.unwrap_or(3.0);
            if t < 0.0 {
                return Err(CliError::validation(format!("t must be ≥ 0, got {t}")));
            }
            let rmax = need(file.resolve(rmax_squared, &["rmax_squared", "rmax-squared"])?,
                "rmax-squared")?;
            if rmax < 1 {
                return Err(CliError::validation("rmax-squared must be at least 1"));
            }
            let mut half_side = 1i64;
            while half_side * half_side < rmax {
                half_side += 1;
            }
            let radii: Vec<i64> =
                admissible_radii(Site::ORIGIN, &BoxSpec::lambda(half_side as i32))
                    .into_iter()
                    .filter(|&r2| r2 <= rmax)
                    .collect();
            let results: Vec<_> = radii.iter().map(|&r2| coverage_check(r2, t)).collect();
            let report = coverage_report(&results, t, rmax);
            let all_hold = results.iter().all(|r| r.holds);
            emit(&report, format, out.map(PathBuf::as_path))?;
            Ok(if all_hold { 0 } else { 3 })
        }
    }
}

fn need_trials(file: &ConfigFile, trials: Option<u64>) -> Result<u64, CliError> {
    let trials = file.resolve(trials, &["trials"])?.unwrap_or(1000);
    if trials < 1 {
        return Err(CliError::validation("trials must be at least 1"));
    }
    Ok(trials)
}

fn resolve_seed(file: &ConfigFile, seed: Option<u64>) -> Result<u64, CliError> {
    Ok(file.resolve(seed, &["seed", "base_seed"])?.unwrap_or(0))
}
