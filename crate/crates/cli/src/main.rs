use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nugap_core::mtdc::{
    build_coefficients, find_boundary, load_config, loop_oracle, parse_assignment, path_partition,
    stability_index, sweep_parameter, theorem2_verdict, BlockModel, BoundaryOutcome, MtdcSystem, ParamPath,
    PathSet, StabilityReport, DEFAULT_DELTA,
};
use nugap_core::sim::{classify, eigen_stability, step_response, StateSpace};
use nugap_core::vgap::{stability_margin, v_gap};
use nugap_core::{Error, Frequency, RationalFunction, Result, SweepSpec};

#[derive(Parser)]
#[command(name = "nugap", version, about = "Nu-gap metrics and MTDC stability analysis")]
struct Cli {
    #[command(flatten)]
    freq: FreqArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FreqArgs {
    /// Grid points per decade of the frequency sweep.
    #[arg(long, global = true, env = "NUGAP_SWEEP_POINTS", default_value_t = 50)]
    sweep_points: usize,
    #[arg(long, global = true, default_value_t = 1e-4)]
    omega_min: f64,
    #[arg(long, global = true, default_value_t = 1e6)]
    omega_max: f64,
}

impl FreqArgs {
    fn spec(&self) -> Result<SweepSpec> {
        let s = SweepSpec {
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            points_per_decade: self.sweep_points,
            ..SweepSpec::default()
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
struct SystemArgs {
    /// System description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Focus VSC name; defaults to the one in the config.
    #[arg(long)]
    focus: Option<String>,
    /// Uncertain paths, e.g. 4,6; defaults to the config's J1.
    #[arg(long)]
    j1: Option<String>,
    /// Nominal gain override, e.g. vscB.kp1=0.3. Repeatable.
    #[arg(long = "set", value_name = "vscID.gain=VALUE")]
    sets: Vec<String>,
    /// Built-in block construction: droop-feedback or pll-phase.
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long)]
    flow_factor: Option<f64>,
    /// Replace a VSC's G_in, e.g. A=gin.tf. Repeatable.
    #[arg(long = "g-in", value_name = "VSC=FILE")]
    g_in: Vec<String>,
    /// Replace a VSC's G_dc, e.g. A=gdc.tf. Repeatable.
    #[arg(long = "g-dc", value_name = "VSC=FILE")]
    g_dc: Vec<String>,
    /// Replace a VSC's K_P0, e.g. A=2.2. Repeatable.
    #[arg(long = "k-p0", value_name = "VSC=VALUE")]
    k_p0: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Nu-gap between two transfer functions.
    Vgap {
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Robust stability margin of a plant and controller.
    Margin {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        controller: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Stability index of the nominal system.
    Index {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Certificate for perturbed gains inside J1.
    Verdict {
        #[command(flatten)]
        sys: SystemArgs,
        /// Perturbed gain, e.g. vscB.kp1=0.1. Repeatable.
        #[arg(long, required = true)]
        perturb: Vec<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Radius and verdict over values of one gain.
    Sweep {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, conflicts_with = "range", required_unless_present = "range")]
        values: Option<String>,
        /// Evenly spaced values lo:hi:n.
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Gain at which the radius meets the index.
    Boundary {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        param: String,
        /// lo:hi
        #[arg(long)]
        bracket: String,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Step response of the closed interaction loop.
    Simulate {
        #[command(flatten)]
        sys: SystemArgs,
        /// Gain to apply before simulating, e.g. vscA.kd=15. Repeatable.
        #[arg(long)]
        perturb: Vec<String>,
        /// Seconds; defaults to eight slowest time constants.
        #[arg(long)]
        duration: Option<f64>,
        /// Seconds; defaults to half the accuracy limit.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        magnitude: f64,
        /// Trace output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Writes F_S, F_E1..F_E6 and the partitioned loop as .tf files.
    Coeffs {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Loaded {
    system: MtdcSystem,
    j1: PathSet,
}

fn split_pair<'a>(s: &'a str, flag: &str) -> Result<(&'a str, &'a str)> {
    s.split_once('=')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| Error::Config(format!("--{flag} '{s}' must look like VSC=VALUE")))
}

fn load_tf(path: &Path) -> Result<RationalFunction> {
    if !path.exists() {
        return Err(Error::Config(format!("{}: no such file", path.display())));
    }
    RationalFunction::load(path)
}

fn parse_assignments(items: &[String]) -> Result<Vec<(ParamPath, f64)>> {
    items.iter().map(|s| parse_assignment(s)).collect()
}

impl SystemArgs {
    fn load(&self) -> Result<Loaded> {
        let cfg = load_config(&self.config)?;
        let mut system = cfg.system;
        if let Some(f) = &self.focus {
            system = system.with_focus(f)?;
        }
        if let Some(b) = &self.blocks {
            system.options.blocks = match b.as_str() {
                "droop-feedback" => BlockModel::DroopFeedback,
                "pll-phase" => BlockModel::PllPhase,
                other => {
                    return Err(Error::Config(format!(
                        "--blocks '{other}': expected droop-feedback or pll-phase"
                    )))
                }
            };
        }
        if let Some(k) = self.flow_factor {
            system.options.flow_factor = k;
        }
        for s in &self.g_in {
            let (v, f) = split_pair(s, "g-in")?;
            let i = system.vsc_index(v)?;
            system.overrides[i].g_in = Some(load_tf(Path::new(f))?);
        }
        for s in &self.g_dc {
            let (v, f) = split_pair(s, "g-dc")?;
            let i = system.vsc_index(v)?;
            system.overrides[i].g_dc = Some(load_tf(Path::new(f))?);
        }
        for s in &self.k_p0 {
            let (v, x) = split_pair(s, "k-p0")?;
            let i = system.vsc_index(v)?;
            let k: f64 = x
                .parse()
                .map_err(|_| Error::Config(format!("--k-p0 '{s}': '{x}' is not a number")))?;
            system.overrides[i].k_p0 = Some(k);
        }
        system = system.with_gains(&parse_assignments(&self.sets)?)?;
        let j1 = match &self.j1 {
            Some(s) => s.parse()?,
            None => cfg.j1,
        };
        Ok(Loaded { system, j1 })
    }
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn freq(w: Frequency) -> String {
    match w {
        Frequency::Zero => num(0.0),
        Frequency::Finite(w) => num(w),
        Frequency::Infinity => "inf".into(),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Two-column human table.
fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k:<width$}  {v}");
        s
    })
}

fn write_csv(path: &Option<PathBuf>, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let Some(p) = path else { return Ok(()) };
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_path(p).map_err(csv_err)?;
    w.write_record(header.split(',')).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Full-precision CSV fields.
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

const REPORT_HEADER: &str =
    "c,zeta,r,slack,stable,omega_zeta,omega_r,oracle_stable,oracle_abscissa,oracle_agrees,error";

fn report_csv(c: f64, r: &StabilityReport) -> Vec<String> {
    row![
        c,
        r.zeta,
        r.r,
        r.slack,
        r.stable,
        r.omega_star_zeta.as_f64(),
        r.omega_star_r.as_f64(),
        r.oracle.stable,
        r.oracle.abscissa,
        r.oracle_agrees,
        "",
    ]
}

fn run(cli: Cli) -> Result<String> {
    let spec = cli.freq.spec()?;
    match cli.command {
        Command::Vgap { g1, g2, csv } => {
            let r = v_gap(&load_tf(&g1)?, &load_tf(&g2)?, &spec)?;
            if r.indeterminate {
                warn(&["imaginary-axis pole or zero: comparability indeterminate".into()]);
            }
            write_csv(
                &csv,
                "v_gap,comparable,omega",
                &[row![r.value, r.comparable, r.omega_star.as_f64()]],
            )?;
            Ok(table(&[
                ("v_gap", num(r.value)),
                ("comparable", yes_no(r.comparable).into()),
                ("omega*", freq(r.omega_star)),
            ]))
        }
        Command::Margin { plant, controller, csv } => {
            let m = stability_margin(&load_tf(&plant)?, &load_tf(&controller)?, &spec)?;
            write_csv(
                &csv,
                "margin,closed_loop_stable,abscissa,omega",
                &[row![m.value, m.closed_loop_stable, m.abscissa, m.omega_star.as_f64()]],
            )?;
            Ok(table(&[
                ("margin", num(m.value)),
                ("closed-loop stable", yes_no(m.closed_loop_stable).into()),
                ("abscissa", num(m.abscissa)),
                ("omega*", freq(m.omega_star)),
            ]))
        }
        Command::Index { sys, csv } => {
            let l = sys.load()?;
            let ix = stability_index(&build_coefficients(&l.system)?, &l.j1, &spec)?;
            if !ix.routes_agree() {
                warn(&[format!("index routes differ: margin form {}, direct {}", ix.zeta, ix.direct)]);
            }
            write_csv(
                &csv,
                "j1,zeta,omega,direct,closed_loop_stable,abscissa,oracle_stable",
                &[row![
                    l.j1.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
                    ix.zeta,
                    ix.omega_star.as_f64(),
                    ix.direct,
                    ix.closed_loop_stable,
                    ix.abscissa,
                    ix.oracle.stable,
                ]],
            )?;
            Ok(table(&[
                ("J1", l.j1.to_string()),
                ("zeta", num(ix.zeta)),
                ("omega*", freq(ix.omega_star)),
                ("zeta (direct)", num(ix.direct)),
                ("closed-loop stable", yes_no(ix.closed_loop_stable).into()),
                ("abscissa", num(ix.abscissa)),
                ("eigenvalue check", yes_no(ix.oracle.stable).into()),
            ]))
        }
        Command::Verdict { sys, perturb, csv } => {
            let l = sys.load()?;
            let moves = parse_assignments(&perturb)?;
            let r = theorem2_verdict(&l.system, &l.j1, &moves, &spec)?;
            warn(&r.warnings);
            let first = moves.first().map_or(0.0, |m| m.1);
            write_csv(&csv, REPORT_HEADER, &[report_csv(first, &r)])?;
            Ok(table(&[
                ("J1", l.j1.to_string()),
                ("zeta", num(r.zeta)),
                ("r", num(r.r)),
                ("slack", num(r.slack)),
                ("verdict", if r.stable { "stable" } else { "not certified" }.into()),
                ("eigenvalue check", yes_no(r.oracle.stable).into()),
                ("oracle abscissa", num(r.oracle.abscissa)),
            ]))
        }
        Command::Sweep { sys, param, values, range, csv } => {
            let l = sys.load()?;
            let p: ParamPath = param.parse()?;
            let values = match (values, range) {
                (Some(v), _) => parse_values(&v)?,
                (None, Some(r)) => parse_range(&r)?,
                (None, None) => unreachable!("clap requires one of --values, --range"),
            };
            let t = sweep_parameter(&l.system, &l.j1, &p, &values, &spec)?;
            let mut out = format!("{} over J1 = {}, zeta = {}\n", t.param, t.j1, num(t.index.zeta));
            let _ = writeln!(out, "{:>14} {:>10} {:>10} {:>14} {:>6}", "c", "r", "slack", "verdict", "eigen");
            let mut rows = Vec::new();
            for row in &t.rows {
                match &row.outcome {
                    Ok(r) => {
                        let _ = writeln!(
                            out,
                            "{:>14} {:>10} {:>10} {:>14} {:>6}",
                            num(row.c),
                            num(r.r),
                            num(r.slack),
                            if r.stable { "stable" } else { "not certified" },
                            if r.oracle.stable { "stable" } else { "unstable" }
                        );
                        rows.push(report_csv(row.c, r));
                    }
                    Err(e) => {
                        let _ = writeln!(out, "{:>14} error: {e}", num(row.c));
                        rows.push(row![row.c, "", "", "", "", "", "", "", "", "", e]);
                    }
                }
            }
            let _ = writeln!(out, "sensitivity {}", num(t.sensitivity));
            write_csv(&csv, REPORT_HEADER, &rows)?;
            Ok(out)
        }
        Command::Boundary { sys, param, bracket, delta, csv } => {
            let l = sys.load()?;
            let p: ParamPath = param.parse()?;
            let (lo, hi) = parse_bracket(&bracket)?;
            match find_boundary(&l.system, &l.j1, &p, (lo, hi), delta, &spec)? {
                BoundaryOutcome::Crossing(b) => {
                    write_csv(
                        &csv,
                        "c0,r_at_c0,zeta,stable_side,certified,iterations",
                        &[row![
                            b.c0,
                            b.r_at_c0,
                            b.zeta,
                            format!("{:?}", b.stable_side).to_lowercase(),
                            b.certified,
                            b.iterations,
                        ]],
                    )?;
                    Ok(table(&[
                        ("c0", num(b.c0)),
                        ("r at c0", num(b.r_at_c0)),
                        ("zeta", num(b.zeta)),
                        ("stable side", format!("{:?}", b.stable_side).to_lowercase()),
                        ("certified", yes_no(b.certified).into()),
                        ("iterations", b.iterations.to_string()),
                    ]))
                }
                BoundaryOutcome::NoCrossing { zeta, min_slack, max_slack } => {
                    write_csv(
                        &csv,
                        "zeta,min_slack,max_slack",
                        &[row![zeta, min_slack, max_slack]],
                    )?;
                    Ok(table(&[
                        ("crossing", "none in bracket".into()),
                        ("zeta", num(zeta)),
                        ("min slack", num(min_slack)),
                        ("max slack", num(max_slack)),
                    ]))
                }
            }
        }
        Command::Simulate { sys, perturb, duration, dt, magnitude, csv } => {
            let l = sys.load()?;
            let s = l.system.with_gains(&parse_assignments(&perturb)?)?;
            let cs = build_coefficients(&s)?;
            let (g, c) = path_partition(&cs, &l.j1);
            let ss = StateSpace::realize_closed_loop(&g, &-&c)?;
            let v = eigen_stability(&ss)?;
            let limit = ss.max_step()?;
            let dt = dt.unwrap_or(0.5 * limit);
            let duration = duration.unwrap_or_else(|| (8.0 / v.abscissa.abs().max(0.05)).min(200.0));
            let ts = step_response(&ss, duration, dt, magnitude)?;
            if let Some(p) = &csv {
                ts.write_csv(p)?;
            }
            let class = classify(&ts);
            Ok(table(&[
                ("order", ss.order().to_string()),
                ("abscissa", num(v.abscissa)),
                ("eigenvalue check", yes_no(v.stable).into()),
                ("duration", num(duration)),
                ("dt", num(dt)),
                ("final value", num(*ts.y.last().unwrap_or(&0.0))),
                ("trace", format!("{class:?}").to_lowercase()),
            ]))
        }
        Command::Coeffs { sys, out } => {
            let l = sys.load()?;
            let cs = build_coefficients(&l.system)?;
            std::fs::create_dir_all(&out)?;
            let (g, c) = path_partition(&cs, &l.j1);
            let mut files: Vec<(String, RationalFunction)> = vec![("f_s".into(), cs.f_s.clone())];
            files.extend(cs.f_e.iter().enumerate().map(|(k, f)| (format!("f_e{}", k + 1), f.clone())));
            files.push(("plant".into(), g.inv()?));
            files.push(("controller".into(), -&c));
            let mut s = format!("J1 = {}, C U_dc0 = {}\n", l.j1, num(cs.cu));
            for (name, f) in &files {
                let path = out.join(format!("{name}.tf"));
                std::fs::write(&path, f.to_tf_string())?;
                let _ = writeln!(
                    s,
                    "{:<12} num deg {:>2}  den deg {:>2}  {}",
                    name,
                    f.num().degree(),
                    f.den().degree(),
                    path.display()
                );
            }
            let oracle = loop_oracle(&cs, &l.j1)?;
            let _ = writeln!(s, "closed loop abscissa {}", num(oracle.abscissa));
            Ok(s)
        }
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{what}: '{s}' is not a number")))
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| parse_f64(v, "--values")).collect()
}

fn parse_bracket(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("--bracket '{s}' must look like lo:hi")))?;
    Ok((parse_f64(a, "--bracket")?, parse_f64(b, "--bracket")?))
}

fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(Error::Config(format!("--range '{s}' must look like lo:hi:n")));
    };
    let (lo, hi) = (parse_f64(lo, "--range")?, parse_f64(hi, "--range")?);
    let n: usize = n
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Config(format!("--range '{s}': n must be a positive integer")))?;
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

fn hint(e: &Error) -> &'static str {
    match e {
        Error::PartitionViolation { .. } => "; add the listed paths to --j1 or perturb a gain that stays inside J1",
        Error::Incomparable => "; the perturbation changes the half-plane pole/zero census",
        _ => "",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}{}", hint(&e));
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
