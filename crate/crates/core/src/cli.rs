//! Command-line front end: JSON run configurations in, JSON or CSV reports out.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::control::{ergodic_cost, solve_control, ThresholdPair};
use crate::error::Error;
use crate::hjb::{check_window, solve_fbp, verify_hjb, VerificationReport, DEFAULT_SLACK_TOL, DEFAULT_STEPS};
use crate::mfg::{find_equilibria, stationary_mean, trace_curves, Classification, EquilibriumPoint};
use crate::models::{CostModel, DiffusionModel, Problem};
use crate::numerics::{Tolerance, Window};
use crate::sim::{estimate_ergodic_cost, nplayer_experiment, perturbation_grid, SimConfig, SimResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_BRACKET: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HjbSpec {
    pub steps: usize,
    /// Distance checked beyond each barrier.
    pub margin: f64,
    pub grid_n: usize,
    pub slack_tol: f64,
}

impl Default for HjbSpec {
    fn default() -> Self {
        HjbSpec {
            steps: DEFAULT_STEPS,
            margin: 2.0,
            grid_n: 801,
            slack_tol: DEFAULT_SLACK_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NPlayerSpec {
    pub n: Option<usize>,
    /// Symmetric profile; the unique equilibrium on the scan when absent.
    pub equilibrium: Option<ThresholdPair>,
    /// Explicit deviation grid; otherwise the 3 x 3 grid of `delta` shifts.
    pub grid: Option<Vec<ThresholdPair>>,
    pub delta: f64,
}

impl Default for NPlayerSpec {
    fn default() -> Self {
        NPlayerSpec {
            n: None,
            equilibrium: None,
            grid: None,
            delta: 0.3,
        }
    }
}

fn default_scan() -> Window {
    Window {
        lo: -3.0,
        hi: 3.0,
        grid_n: 121,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub label: Option<String>,
    /// Free-text caveat carried into nothing but the config itself.
    #[serde(default)]
    pub unverified: Option<String>,
    pub model: DiffusionModel,
    pub cost: CostModel,
    #[serde(default = "default_scan")]
    pub scan: Window,
    #[serde(default)]
    pub quadrature: Tolerance,
    /// Frozen market statistic for `solve-control` and `verify-hjb`.
    #[serde(default)]
    pub y: Option<f64>,
    #[serde(default)]
    pub interval: Option<ThresholdPair>,
    #[serde(default)]
    pub market: Option<ThresholdPair>,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub nplayer: Option<NPlayerSpec>,
    #[serde(default)]
    pub hjb: Option<HjbSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Failure of a command, with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(Error::NoBracket(_)) => EXIT_NO_BRACKET,
            CliError::Solver(Error::InvalidParameter { .. } | Error::UnknownFamily(_)) => EXIT_CONFIG,
            CliError::Solver(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Solver(e)
    }
}

fn config_err(field: &str, reason: &str) -> CliError {
    CliError::Config(format!("`{field}`: {reason}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let wrap = |e: Error| CliError::Config(e.to_string());
        self.model.validate().map_err(wrap)?;
        self.cost.validate().map_err(wrap)?;
        self.scan.validate().map_err(wrap)?;
        self.quadrature.validate().map_err(wrap)?;
        if let Some(sim) = &self.sim {
            sim.validate().map_err(wrap)?;
        }
        for (name, pair) in [("interval", self.interval), ("market", self.market)] {
            if let Some(p) = pair {
                if !(p.a < p.b) {
                    return Err(config_err(name, "need a < b"));
                }
            }
        }
        if self.y.is_some_and(|y| !y.is_finite()) {
            return Err(config_err("y", "must be finite"));
        }
        if let Some(h) = &self.hjb {
            if h.steps < 16 || h.grid_n < 2 || !(h.margin >= 0.0) {
                return Err(config_err("hjb", "need steps >= 16, grid_n >= 2 and margin >= 0"));
            }
        }
        if let Some(np) = &self.nplayer {
            if np.n.is_some_and(|n| n < 2) {
                return Err(config_err("nplayer.n", "need at least 2 players"));
            }
            if !(np.delta > 0.0) {
                return Err(config_err("nplayer.delta", "must be positive"));
            }
        }
        Ok(())
    }

    fn problem(&self) -> Problem {
        Problem::new(self.model.clone(), self.cost.clone()).with_tolerance(self.quadrature)
    }
}

#[derive(Debug, Parser)]
#[command(name = "ergomfg", version, about = "Reflecting-barrier control and stationary mean-field equilibria for 1-D diffusions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Overrides `sim.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scan window as `lo,hi,n`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_scan)]
    pub scan: Option<Window>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal reflecting barriers against a frozen market statistic.
    SolveControl {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<f64>,
    },
    /// All equilibrium pairs on the scan window.
    SolveMfg {
        #[command(flatten)]
        common: Common,
    },
    /// Zero sets of the two equilibrium conditions as `curve,a,b` rows.
    TraceCurves {
        #[command(flatten)]
        common: Common,
    },
    /// Free-boundary solution and verification report at a pair.
    VerifyHjb {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        interval: Option<ThresholdPair>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<f64>,
    },
    /// Monte Carlo ergodic cost of a player pair against a market pair.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        interval: Option<ThresholdPair>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        market: Option<ThresholdPair>,
    },
    /// Deviation gains in the N-player game at a symmetric profile.
    Nplayer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        interval: Option<ThresholdPair>,
    },
}

fn parse_numbers(s: &str, count: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    if parts.len() != count {
        return Err(format!("expected {count} comma-separated numbers, got {}", parts.len()));
    }
    Ok(parts)
}

fn parse_scan(s: &str) -> Result<Window, String> {
    let v = parse_numbers(s, 3)?;
    if v[2].fract() != 0.0 || v[2] < 2.0 {
        return Err("grid size must be an integer >= 2".into());
    }
    Window::new(v[0], v[1], v[2] as usize).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<ThresholdPair, String> {
    let v = parse_numbers(s, 2)?;
    ThresholdPair::new(v[0], v[1]).map_err(|e| e.to_string())
}

/// A rendered report and where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjbReport {
    pub y: f64,
    pub thresholds: ThresholdPair,
    pub lambda: f64,
    /// Quadrature ergodic cost at the same pair, for comparison with `lambda`.
    pub ergodic_cost: f64,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub player: ThresholdPair,
    pub market: ThresholdPair,
    #[serde(rename = "R_value")]
    pub r_value: f64,
    pub quadrature_value: f64,
    pub result: SimResult,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn json_only(format: Format, command: &str) -> Result<(), CliError> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Config(format!("`{command}` only writes json"))),
    }
}

fn equilibria_csv(points: &[EquilibriumPoint]) -> String {
    let mut s = String::from("a,b,R_value,value,residual_i,residual_ii,classification\n");
    for p in points {
        let class = match p.classification {
            Classification::Interior => "interior",
            Classification::BoundaryOfScan => "boundary_of_scan",
        };
        let _ = writeln!(s, "{},{},{},{},{},{},{class}", p.thresholds.a, p.thresholds.b, p.r_value, p.value, p.residual_i, p.residual_ii);
    }
    s
}

fn pick_equilibrium(problem: &Problem, scan: &Window) -> Result<ThresholdPair, CliError> {
    let points = find_equilibria(problem, scan);
    match points.as_slice() {
        [one] => Ok(one.thresholds),
        [] => Err(CliError::Solver(Error::NoBracket("no equilibrium on the scan window".into()))),
        _ => Err(config_err("nplayer.equilibrium", "several equilibria on the scan; name one")),
    }
}

fn sim_config(cfg: &RunConfig, seed: Option<u64>) -> SimConfig {
    let mut sim = cfg.sim.unwrap_or_default();
    if let Some(s) = seed {
        sim.seed = s;
    }
    sim
}

/// Runs one subcommand and renders its report without writing it.
pub fn execute(command: &Command) -> Result<Rendered, CliError> {
    let common = match command {
        Command::SolveControl { common, .. }
        | Command::SolveMfg { common }
        | Command::TraceCurves { common }
        | Command::VerifyHjb { common, .. }
        | Command::Simulate { common, .. }
        | Command::Nplayer { common, .. } => common,
    };
    let cfg = RunConfig::load(&common.config)?;
    let problem = cfg.problem();
    let scan = common.scan.unwrap_or(cfg.scan);
    let out = common.out.clone().or_else(|| cfg.output.path.clone());
    let format = |fallback: Format| common.format.or(cfg.output.format).unwrap_or(fallback);

    let body = match command {
        Command::SolveControl { y, .. } => {
            json_only(format(Format::Json), "solve-control")?;
            let y = y.or(cfg.y).ok_or_else(|| config_err("y", "solve-control needs a frozen market statistic"))?;
            to_json(&solve_control(&problem, y, &scan)?)?
        }
        Command::SolveMfg { .. } => {
            let points = find_equilibria(&problem, &scan);
            match format(Format::Json) {
                Format::Json => to_json(&points)?,
                Format::Csv => equilibria_csv(&points),
            }
        }
        Command::TraceCurves { .. } => {
            let curves = trace_curves(&problem, &scan);
            match format(Format::Csv) {
                Format::Json => to_json(&curves)?,
                Format::Csv => {
                    let mut s = String::from("curve,a,b\n");
                    for (name, pts) in [("cond_i", &curves.cond_i), ("cond_ii", &curves.cond_ii)] {
                        for (a, b) in pts {
                            let _ = writeln!(s, "{name},{a},{b}");
                        }
                    }
                    s
                }
            }
        }
        Command::VerifyHjb { interval, y, .. } => {
            json_only(format(Format::Json), "verify-hjb")?;
            let pair = interval.or(cfg.interval).ok_or_else(|| config_err("interval", "verify-hjb needs a pair"))?;
            let y = match y.or(cfg.y) {
                Some(y) => y,
                None => stationary_mean(&problem, pair)?,
            };
            let spec = cfg.hjb.unwrap_or_default();
            let sol = solve_fbp(&problem, pair, y, spec.steps)?;
            let window = check_window(pair, spec.margin, spec.grid_n)?;
            let report = verify_hjb(&problem, &sol, &window, spec.slack_tol);
            to_json(&HjbReport {
                y,
                thresholds: pair,
                lambda: sol.lambda,
                ergodic_cost: ergodic_cost(&problem, pair, y)?,
                report,
            })?
        }
        Command::Simulate { interval, market, .. } => {
            json_only(format(Format::Json), "simulate")?;
            let player = interval.or(cfg.interval).ok_or_else(|| config_err("interval", "simulate needs a player pair"))?;
            let market = market.or(cfg.market).unwrap_or(player);
            let sim = sim_config(&cfg, common.seed);
            for pair in [player, market] {
                if !sim.step_is_fine(&problem.model, pair) {
                    eprintln!("warning: dt = {} is coarse for the pair ({}, {})", sim.dt, pair.a, pair.b);
                }
            }
            let r_value = stationary_mean(&problem, market)?;
            to_json(&SimulationReport {
                seed: sim.seed,
                player,
                market,
                r_value,
                quadrature_value: ergodic_cost(&problem, player, r_value)?,
                result: estimate_ergodic_cost(&problem, player, market, &sim)?,
            })?
        }
        Command::Nplayer { n, interval, .. } => {
            json_only(format(Format::Json), "nplayer")?;
            let spec = cfg.nplayer.clone().unwrap_or_default();
            let n = n.or(spec.n).ok_or_else(|| config_err("nplayer.n", "number of players required"))?;
            let eq = match interval.or(spec.equilibrium) {
                Some(p) => p,
                None => pick_equilibrium(&problem, &scan)?,
            };
            let grid = spec.grid.clone().unwrap_or_else(|| perturbation_grid(eq, spec.delta));
            let sim = sim_config(&cfg, common.seed);
            to_json(&nplayer_experiment(&problem, eq, n, &grid, &sim)?)?
        }
    };
    Ok(Rendered { body, out })
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let rendered = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &rendered.out {
        Some(path) => std::fs::write(path, &rendered.body).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(rendered.body.as_bytes()).map_err(|e| e.to_string())
        }
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(m) => {
            eprintln!("error: {}", CliError::Io(m));
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{
        "model": {"family": "ou", "params": {"theta": 0.4, "sigma": 2.0}, "reference_point": 0.0},
        "cost": {"family": "mult_maxlin", "params": {"lambda": 1.0, "beta": 1.0}, "q_u": 0.1, "q_d": 0.1},
        "y": 0.0
    }"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::from_json(FIG1).unwrap();
        assert_eq!(cfg.scan, default_scan());
        assert_eq!(cfg.y, Some(0.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = FIG1.replace("\"y\": 0.0", "\"y\": 0.0, \"extra\": 1");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        assert!(err.to_string().contains("extra"));
    }

    #[test]
    fn bad_push_cost_names_the_field() {
        let text = FIG1.replace("\"q_u\": 0.1", "\"q_u\": -0.1");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        assert!(err.to_string().contains("q_u"), "{err}");
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(parse_scan("-2,2,41").unwrap(), Window::new(-2.0, 2.0, 41).unwrap());
        assert!(parse_scan("-2,2,1").is_err());
        assert!(parse_scan("-2,2").is_err());
        assert_eq!(parse_pair("-0.5,0.5").unwrap(), ThresholdPair::new(-0.5, 0.5).unwrap());
        assert!(parse_pair("0.5,-0.5").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Solver(Error::NoBracket("x".into())).exit_code(), EXIT_NO_BRACKET);
        assert_eq!(CliError::Solver(Error::EmptyRho { a: 0.0 }).exit_code(), EXIT_FAILURE);
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_CONFIG);
    }
}
