//! Command-line front end: argument parsing, presets, config files and the
//! `generate`, `stats` and `growth` drivers. The `gasket` binary is a thin
//! wrapper around [`run`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::enumerate::{counts_at, enumerate_with, growth_slope, CenterSet, EnumerateOptions, DEFAULT_CAPACITY};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::geometry::{solve_root_quadruple, DescartesQuadruple, GasketSpec};
use crate::stats::{
    self, empirical_derivative, joint_indicator_moment, joint_power_moment, mixed_moment_nn, mixed_moment_pair,
    nn_spacing, pair_correlation, xi_grid, CountIndex, Curve, MixedOptions, MomentOptions, PowerIndex, Region, Window,
    WindowCounter,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gasket", version, about = "Apollonian gasket enumeration and center statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate circles with radius above e^-t and write them as CSV.
    #[command(args_override_self = true)]
    Generate(GenerateArgs),
    /// Compute a statistic of the center set and write it as CSV.
    #[command(args_override_self = true)]
    Stats(StatsArgs),
    /// Circle counts N(t) over a grid of thresholds and the fitted exponent.
    #[command(args_override_self = true)]
    Growth(GrowthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GasketArgs {
    /// Root curvatures `b0,b1,b2,b3` with b0 < 0 the bounding circle.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["theta1", "theta2"])]
    pub quadruple: Option<String>,
    /// Second tangency angle on the unit circle (radians).
    #[arg(long, requires = "theta2")]
    pub theta1: Option<f64>,
    /// Third tangency angle on the unit circle (radians).
    #[arg(long, requires = "theta1")]
    pub theta2: Option<f64>,
    /// Named preset: fig3, fig4, fig5, fig6, fig7, fig7a, fig7b.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat `key = value` file; flags on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long, env = "GASKET_STATS_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CAPACITY)]
    pub capacity: usize,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub gasket: GasketArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Threshold exponent: keep circles of radius > e^-t.
    #[arg(long)]
    pub t: f64,
    /// Output file (default: <output-dir>/circles.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Pair,
    Nn,
    Deriv,
    Moments,
    Mixed,
}

impl Statistic {
    fn name(self) -> &'static str {
        match self {
            Statistic::Pair => "pair",
            Statistic::Nn => "nn",
            Statistic::Deriv => "deriv",
            Statistic::Moments => "moments",
            Statistic::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(value_enum)]
    pub which: Statistic,
    #[command(flatten)]
    pub gasket: GasketArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, conflicts_with = "t_list")]
    pub t: Option<f64>,
    /// Comma-separated thresholds.
    #[arg(long)]
    pub t_list: Option<String>,
    /// Region E: plane, halfplane:re>0, disk:cx,cy,r, rect:x0,y0,x1,y1,
    /// quadrant:cx,cy. Defaults to the preset's regions, else the plane.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub xi_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub xi_step: f64,
    /// Derivative step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Mixed-moment window radius ε.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Comma-separated ξ values for mixed moments.
    #[arg(long, default_value = "3,5,8")]
    pub xi: String,
    /// Moment window(s): disk:r or rect:x0,y0,x1,y1. Repeatable.
    #[arg(long)]
    pub window: Vec<String>,
    /// Count targets for indicator moments, comma-separated.
    #[arg(long, conflicts_with = "beta")]
    pub r: Option<String>,
    /// Exponents for power moments, comma-separated.
    #[arg(long)]
    pub beta: Option<String>,
    /// Quadrature spacing (default e^-t/4 for moments, ε e^-t/8 for mixed).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Read centers from a circles CSV generated at a threshold ≥ t.
    #[arg(long)]
    pub circles: Option<PathBuf>,
    /// Second preset to compare against (pair and nn); reports the sup distance.
    #[arg(long)]
    pub compare: Option<String>,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub gasket: GasketArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated thresholds; overrides the uniform grid.
    #[arg(long)]
    pub t_list: Option<String>,
    #[arg(long, default_value_t = 100f64.ln())]
    pub t_min: f64,
    #[arg(long, default_value_t = 100_000f64.ln())]
    pub t_max: f64,
    #[arg(long, default_value_t = 31)]
    pub t_count: usize,
    /// Fit window (default: the whole grid).
    #[arg(long)]
    pub fit_min: Option<f64>,
    #[arg(long)]
    pub fit_max: Option<f64>,
}

/// Gasket and default thresholds bundled under a name.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub theta1: f64,
    pub theta2: f64,
    pub t_list: Vec<f64>,
    pub regions: Vec<&'static str>,
    pub step: Option<f64>,
}

const PI: f64 = std::f64::consts::PI;

pub fn preset(name: &str) -> Option<Preset> {
    let main = (1.8 * PI / 3.0, 3.7 * PI / 3.0);
    let ts = vec![8.0, 9.0, 10.0, 11.0, 12.0];
    let p = |name, (theta1, theta2): (f64, f64), t_list: Vec<f64>, regions: Vec<&'static str>, step| Preset {
        name,
        theta1,
        theta2,
        t_list,
        regions,
        step,
    };
    Some(match name {
        "fig3" => p("fig3", main, ts, vec!["plane"], None),
        "fig4" => p("fig4", main, vec![10.0], vec!["plane", "halfplane:re>0", "quadrant:0,0"], None),
        "fig5" => p("fig5", main, ts, vec!["plane"], Some(0.1)),
        "fig6" | "fig7a" => p("fig7a", main, vec![10.0], vec!["plane"], None),
        "fig7" => p("fig7", main, ts, vec!["plane"], None),
        // Tangency points 1, i, −1: the (−1, 2, 2, 3) gasket.
        "fig7b" => p("fig7b", (PI / 2.0, PI), vec![10.0], vec!["plane"], None),
        _ => return None,
    })
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    if items.is_empty() {
        return Err(Error::Parse(format!("{what}: empty list")));
    }
    items.into_iter().map(|x| x.parse::<T>().map_err(|e| Error::Parse(format!("{what}: {x:?}: {e}")))).collect()
}

/// Root quadruple from explicit curvatures, angles, a preset, or the
/// `(−1, 2, 2, 3)` default.
pub fn resolve_root(g: &GasketArgs) -> Result<DescartesQuadruple> {
    if let Some(q) = &g.quadruple {
        let b: Vec<f64> = parse_list(q, "quadruple")?;
        let b: [f64; 4] = b.try_into().map_err(|_| Error::Parse("quadruple needs exactly four curvatures".into()))?;
        return DescartesQuadruple::from_curvatures(b);
    }
    if let (Some(t1), Some(t2)) = (g.theta1, g.theta2) {
        return solve_root_quadruple(&GasketSpec::new(t1, t2)?);
    }
    if let Some(name) = &g.preset {
        let p = preset(name).ok_or_else(|| Error::Parse(format!("unknown preset {name:?}")))?;
        return solve_root_quadruple(&GasketSpec::new(p.theta1, p.theta2)?);
    }
    DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0])
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn label(t: f64) -> String {
    format!("{t}")
}

fn write_file(path: &Path, body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    body(&mut buf)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, buf)?;
    Ok(())
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(0) => Err(Error::InvalidArgument("threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let root = resolve_root(&args.gasket)?;
    let opts = EnumerateOptions { capacity: args.common.capacity, check_residuals: false };
    let e = enumerate_with(&root, args.t, opts)?;
    let path = args.out.clone().unwrap_or_else(|| args.common.output_dir.join("circles.csv"));
    write_file(&path, |b| e.centers.write_csv(b))?;
    writeln!(
        out,
        "circles_emitted={} max_tree_depth={} wall_time={:.6}",
        e.stats.circles_emitted, e.stats.max_tree_depth, e.stats.wall_time
    )?;
    Ok(())
}

fn t_values(args: &StatsArgs) -> Result<Vec<f64>> {
    if let Some(t) = args.t {
        return Ok(vec![t]);
    }
    if let Some(list) = &args.t_list {
        return parse_list(list, "t-list");
    }
    if let Some(p) = args.gasket.preset.as_deref().and_then(preset) {
        return Ok(p.t_list);
    }
    Err(Error::Parse("one of --t, --t-list or --preset is required".into()))
}

fn load_centers(args: &StatsArgs, root: &DescartesQuadruple, t_max: f64) -> Result<CenterSet> {
    match &args.circles {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            CenterSet::read_csv(&text, t_max, *root)
        }
        None => {
            let opts = EnumerateOptions { capacity: args.common.capacity, check_residuals: false };
            Ok(enumerate_with(root, t_max, opts)?.centers)
        }
    }
}

fn stats_cmd(args: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    let root = resolve_root(&args.gasket)?;
    let ts = t_values(args)?;
    if ts.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidArgument("thresholds must be ≥ 0".into()));
    }
    let t_max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let region_specs: Vec<String> = match (&args.region, args.gasket.preset.as_deref().and_then(preset)) {
        (Some(r), _) => vec![r.clone()],
        (None, Some(p)) => p.regions.iter().map(|r| r.to_string()).collect(),
        (None, None) => vec!["plane".to_string()],
    };
    let regions: Vec<(String, Region)> =
        region_specs.iter().map(|r| Ok((slug(r), r.parse::<Region>()?))).collect::<Result<_>>()?;
    let region = &regions[0].1;
    let grid = xi_grid(args.xi_min, args.xi_max, args.xi_step)?;
    let full = load_centers(args, &root, t_max)?;
    let dir = &args.common.output_dir;
    let name = args.which.name();

    let compare_root = match &args.compare {
        Some(p) => {
            Some(resolve_root(&GasketArgs { quadruple: None, theta1: None, theta2: None, preset: Some(p.clone()) })?)
        }
        None => None,
    };
    let compare_full = match &compare_root {
        Some(r) => {
            let opts = EnumerateOptions { capacity: args.common.capacity, check_residuals: false };
            Some(enumerate_with(r, t_max, opts)?.centers)
        }
        None => None,
    };

    let mut moment_rows = Vec::new();
    for &t in &ts {
        let cs = full.truncate(t);
        let tl = label(t);
        match args.which {
            Statistic::Pair | Statistic::Nn => {
                for (rl, region) in &regions {
                    let compute = |cs: &CenterSet| match args.which {
                        Statistic::Pair => pair_correlation(cs, region, &grid),
                        _ => nn_spacing(cs, region, &grid),
                    };
                    let stem = if regions.len() > 1 { format!("{name}_{rl}") } else { name.to_string() };
                    let curve = compute(&cs)?;
                    write_file(&dir.join(format!("{stem}_t{tl}.csv")), |b| curve.write_csv(b))?;
                    if let Some(other) = &compare_full {
                        let other_curve = compute(&other.truncate(t))?;
                        write_file(&dir.join(format!("{stem}_compare_t{tl}.csv")), |b| other_curve.write_csv(b))?;
                        let lo = if args.which == Statistic::Pair { 2.0 } else { args.xi_min };
                        let sup = curve.sup_distance(&other_curve, lo, args.xi_max)?;
                        writeln!(out, "t={tl} region={rl} sup_distance={}", fmt_f64(sup))?;
                    }
                }
            }
            Statistic::Deriv => {
                let step = args
                    .step
                    .or_else(|| args.gasket.preset.as_deref().and_then(preset).and_then(|p| p.step))
                    .unwrap_or(0.1);
                let curve = pair_correlation(&cs, region, &grid)?;
                let d = empirical_derivative(&curve, step)?;
                write_file(&dir.join(format!("deriv_t{tl}.csv")), |b| d.write_csv(b))?;
            }
            Statistic::Moments => {
                let windows: Vec<Window> = if args.window.is_empty() {
                    vec![Window::disk(2.0)?]
                } else {
                    args.window.iter().map(|w| w.parse()).collect::<Result<_>>()?
                };
                let counter = WindowCounter::new(&cs)?;
                let opts = MomentOptions { spacing: args.spacing, ..MomentOptions::default() };
                let est = match &args.beta {
                    Some(b) => {
                        let beta = PowerIndex::new(parse_list(b, "beta")?)?;
                        joint_power_moment(&counter, &windows, &beta, region, &opts)?
                    }
                    None => {
                        let r = match &args.r {
                            Some(r) => CountIndex(parse_list(r, "r")?),
                            None => CountIndex(vec![1; windows.len()]),
                        };
                        joint_indicator_moment(&counter, &windows, &r, region, &opts)?
                    }
                };
                moment_rows.push(est);
            }
            Statistic::Mixed => {
                let xis: Vec<f64> = parse_list(&args.xi, "xi")?;
                let counter = WindowCounter::new(&cs)?;
                let opts = MixedOptions { spacing: args.spacing };
                let mut p_vals = Vec::new();
                let mut q_vals = Vec::new();
                for &xi in &xis {
                    p_vals.push(mixed_moment_pair(&counter, region, xi, args.eps, &opts)?);
                    q_vals.push(mixed_moment_nn(&counter, region, xi, args.eps, &opts)?);
                }
                let pc = Curve::new(xis.clone(), p_vals)?;
                let qc = Curve::new(xis, q_vals)?;
                write_file(&dir.join(format!("mixed_pair_t{tl}.csv")), |b| pc.write_csv(b))?;
                write_file(&dir.join(format!("mixed_nn_t{tl}.csv")), |b| qc.write_csv(b))?;
            }
        }
    }
    if args.which == Statistic::Moments {
        write_file(&dir.join("moments.csv"), |b| {
            writeln!(b, "t,estimate,scaled_estimate")?;
            for m in &moment_rows {
                writeln!(b, "{},{},{}", fmt_f64(m.t), fmt_f64(m.estimate), fmt_f64(m.scaled_estimate))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn growth_cmd(args: &GrowthArgs, out: &mut dyn Write) -> Result<()> {
    let root = resolve_root(&args.gasket)?;
    let ts: Vec<f64> = match &args.t_list {
        Some(list) => parse_list(list, "t-list")?,
        None => {
            if args.t_count == 0 {
                return Err(Error::Parse("t-count must be positive".into()));
            }
            if args.t_count == 1 {
                vec![args.t_min]
            } else {
                let step = (args.t_max - args.t_min) / (args.t_count - 1) as f64;
                (0..args.t_count).map(|k| args.t_min + k as f64 * step).collect()
            }
        }
    };
    if ts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parse("t-list must be strictly increasing".into()));
    }
    let t_max = *ts.last().expect("nonempty");
    let opts = EnumerateOptions { capacity: args.common.capacity, check_residuals: false };
    let set = enumerate_with(&root, t_max, opts)?.centers;
    let rows = counts_at(&set, &ts);
    write_file(&args.common.output_dir.join("growth.csv"), |b| {
        writeln!(b, "t,n,log_n")?;
        for &(t, n) in &rows {
            writeln!(b, "{},{},{}", fmt_f64(t), n, fmt_f64((n as f64).ln()))?;
        }
        Ok(())
    })?;
    let lo = args.fit_min.unwrap_or(ts[0]);
    let hi = args.fit_max.unwrap_or(t_max);
    if let Some(slope) = growth_slope(&rows, lo, hi) {
        writeln!(out, "slope={} fit_window=[{lo}, {hi}] delta_reference={}", fmt_f64(slope), stats::DELTA)?;
    }
    Ok(())
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapacityExceeded { .. } => EXIT_CAPACITY,
        Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_INPUT,
    }
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
        pairs.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Splices `--key value` pairs from a `--config` file in front of the
/// command-line flags, so explicit flags override the file.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config_path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            config_path = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            config_path = Some(p.to_string());
        }
    }
    let Some(path) = config_path else { return Ok(args) };
    let pairs = read_config(Path::new(&path))?;
    // Insert after the subcommand (and the statistic for `stats`).
    let mut at = 1;
    if let Some(cmd) = strs.get(1) {
        at = 2;
        if cmd == "stats" && strs.get(2).is_some_and(|s| !s.starts_with('-')) {
            at = 3;
        }
    }
    let mut out: Vec<OsString> = args[..at.min(args.len())].to_vec();
    for (k, v) in pairs {
        out.push(format!("--{k}").into());
        out.push(v.into());
    }
    out.extend_from_slice(&args[at.min(args.len())..]);
    Ok(out)
}

/// Parses arguments and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let threads = match &cli.command {
        Command::Generate(a) => a.common.threads,
        Command::Stats(a) => a.common.threads,
        Command::Growth(a) => a.common.threads,
    };
    let result = with_threads(threads, || {
        let mut buf = Vec::new();
        let r = match &cli.command {
            Command::Generate(a) => generate(a, &mut buf),
            Command::Stats(a) => stats_cmd(a, &mut buf),
            Command::Growth(a) => growth_cmd(a, &mut buf),
        };
        (r, buf)
    });
    let (result, buf) = result.unwrap_or_else(|e| (Err(e), Vec::new()));
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for name in ["fig3", "fig4", "fig5", "fig6", "fig7", "fig7a", "fig7b"] {
            let p = preset(name).unwrap();
            let g = GasketArgs { quadruple: None, theta1: None, theta2: None, preset: Some(name.into()) };
            resolve_root(&g).unwrap();
            assert!(!p.t_list.is_empty());
        }
        assert!(preset("fig9").is_none());
        let b = resolve_root(&GasketArgs { quadruple: None, theta1: None, theta2: None, preset: Some("fig7b".into()) })
            .unwrap();
        let mut curv = b.curvatures();
        curv.sort_by(f64::total_cmp);
        for (x, y) in curv.iter().zip([-1.0, 2.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<f64>("1, 2,3", "x").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_list::<f64>("", "x").is_err());
        assert!(parse_list::<u32>("1,a", "x").is_err());
    }
}
