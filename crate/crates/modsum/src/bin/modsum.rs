//! Command-line front end: evaluate sum-rate lower bounds, run the
//! bound-comparison sweep, and search/verify zero-error schemes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use modsum::bounds::{self, SolverSettings};
use modsum::model::{probdist_source, BinaryMarkovSource};
use modsum::schemes::{self, Budget, Scheme, Support};

#[derive(Parser)]
#[command(name = "modsum", version, about = "Sum modulo two with a common observation: bounds and scheme search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound for one source and print a JSON report.
    Eval {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit the bound-comparison CSV over a grid of p values.
    Sweep {
        /// Number of interior grid points i/(points+1), i = 1..=points.
        #[arg(long, default_value_t = 99)]
        points: usize,
        /// Also evaluate the slow general bound per row.
        #[arg(long)]
        with_theorem2: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Minimize H(M1) + H(M2) over all zero-error schemes at blocklength n.
    Search {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=2))]
        n: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check Lemmas 1-3 on every enumerated zero-error scheme.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=2))]
        n: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Test hook: additionally grade the all-merged index assignment,
        /// which is not zero-error for generic sources.
        #[arg(long, hide = true)]
        inject_broken: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// The running-example family: P(Z=0)=p, X|Z=0 and Y|Z=1 uniform,
    /// X=1 when Z=1, Y=1 when Z=0.
    #[arg(long, value_name = "P")]
    probdist: Option<f64>,
    /// Explicit source: p=<v> x0=<v> x1=<v> y0=<v> y1=<v>, where x0 is
    /// P(X=0|Z=0), x1 is P(X=0|Z=1), and likewise y0, y1 for Y.
    #[arg(long, num_args = 5, value_name = "K=V")]
    source: Option<Vec<String>>,
}

#[derive(Args)]
struct SolverArgs {
    /// Dense-scan cells for 1-D minimizations.
    #[arg(long)]
    grid_1d: Option<usize>,
    /// Outer d-grid for the general bound.
    #[arg(long)]
    theorem2_d_grid: Option<usize>,
    /// w-grid for the general bound's inner scan.
    #[arg(long)]
    w_grid: Option<usize>,
    /// Per-axis grid for the inner 2-D maximization.
    #[arg(long)]
    inner_grid: Option<usize>,
    /// Simplex grid denominator for the envelope LP.
    #[arg(long)]
    envelope_resolution: Option<usize>,
    /// Value tolerance for reported bounds.
    #[arg(long)]
    tol: Option<f64>,
}

impl SolverArgs {
    fn settings(&self) -> Result<SolverSettings, String> {
        let mut s = SolverSettings::default();
        if let Some(v) = self.grid_1d {
            s.grid_1d = v;
        }
        if let Some(v) = self.theorem2_d_grid {
            s.theorem2_d_grid = v;
        }
        if let Some(v) = self.w_grid {
            s.w_grid = v;
        }
        if let Some(v) = self.inner_grid {
            s.inner_grid = v;
        }
        if let Some(v) = self.envelope_resolution {
            s.envelope_resolution = v;
        }
        if let Some(v) = self.tol {
            if !(v > 0.0) {
                return Err(format!("tol must be positive, got {v}"));
            }
            s.tol = v;
        }
        for (name, v) in [
            ("grid-1d", s.grid_1d),
            ("theorem2-d-grid", s.theorem2_d_grid),
            ("w-grid", s.w_grid),
            ("inner-grid", s.inner_grid),
        ] {
            if v < 2 {
                return Err(format!("{name} must be at least 2, got {v}"));
            }
        }
        Ok(s)
    }
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 10_000_000)]
    max_nodes: u64,
    #[arg(long, default_value_t = 300)]
    max_seconds: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget { max_nodes: self.max_nodes, max_millis: self.max_seconds * 1000 }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this path instead of standard output.
    #[arg(long, short = 'o')]
    output: Option<std::path::PathBuf>,
}

impl OutputArgs {
    fn write(&self, content: &str) -> Result<(), String> {
        match &self.output {
            Some(path) => fs::write(path, content)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| format!("cannot write to stdout: {e}"))
            }
        }
    }
}

fn parse_source(args: &SourceArgs) -> Result<(BinaryMarkovSource, Option<f64>), String> {
    if let Some(p) = args.probdist {
        let src = probdist_source(p).map_err(|e| format!("--probdist: {e}"))?;
        return Ok((src, Some(p)));
    }
    let tokens = args.source.as_ref().expect("clap enforces exactly one source option");
    let mut vals = [f64::NAN; 5];
    let keys = ["p", "x0", "x1", "y0", "y1"];
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("--source token `{tok}` is not of the form key=value"))?;
        let i = keys
            .iter()
            .position(|&key| key == k)
            .ok_or_else(|| format!("--source key `{k}` is not one of p, x0, x1, y0, y1"))?;
        if !vals[i].is_nan() {
            return Err(format!("--source key `{k}` given twice"));
        }
        vals[i] = v
            .parse::<f64>()
            .map_err(|_| format!("--source value for `{k}` is not a number: `{v}`"))?;
    }
    if let Some(i) = vals.iter().position(|v| v.is_nan()) {
        return Err(format!("--source is missing key `{}`", keys[i]));
    }
    let src = BinaryMarkovSource::new(vals[0], (vals[1], vals[2]), (vals[3], vals[4]))
        .map_err(|e| format!("--source: {e}"))?;
    Ok((src, None))
}

fn source_json(src: &BinaryMarkovSource) -> serde_json::Value {
    json!({
        "p": src.p,
        "x0": src.x_given_z.0,
        "x1": src.x_given_z.1,
        "y0": src.y_given_z.0,
        "y1": src.y_given_z.1,
    })
}

fn scheme_json(scheme: &Scheme, support: &Support) -> serde_json::Value {
    let blocks = |enc: &[usize], pts: &[(u16, u16)]| -> Vec<Vec<[u16; 2]>> {
        let nb = enc.iter().copied().max().map_or(0, |b| b + 1);
        let mut blocks = vec![vec![]; nb];
        for (i, &b) in enc.iter().enumerate() {
            blocks[b].push([pts[i].0, pts[i].1]);
        }
        blocks
    };
    json!({
        "n": scheme.n,
        "enc1_blocks": blocks(&scheme.enc1, &support.s1),
        "enc2_blocks": blocks(&scheme.enc2, &support.s2),
    })
}

fn check_threads_env() -> Result<usize, String> {
    match std::env::var("MODSUM_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(1),
        Err(e) => Err(format!("MODSUM_THREADS: {e}")),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("MODSUM_THREADS must be a positive integer, got `{v}`")),
        },
    }
}

fn cmd_eval(source: &SourceArgs, solver: &SolverArgs, out: &OutputArgs) -> Result<u8, String> {
    let (src, probdist_p) = parse_source(source)?;
    let settings = solver.settings()?;
    let err = |e: modsum::Error| e.to_string();
    let cut = bounds::cut_set(&src).map_err(err)?;
    let nw = bounds::nw_extension(&src, &settings).map_err(err)?;
    let th2 = bounds::theorem2(&src, &settings).map_err(err)?;
    let th1 = match probdist_p {
        Some(p) => Some(bounds::theorem1(p, &settings).map_err(err)?),
        None => None,
    };
    let report = json!({
        "source": source_json(&src),
        "cut_set": cut.value,
        "nw_extension": nw.value,
        "theorem1": th1.as_ref().map(|b| b.value),
        "theorem2": th2.value,
        "witnesses": {
            "cut_set": cut.witness,
            "nw_extension": nw.witness,
            "theorem1": th1.map(|b| b.witness),
            "theorem2": th2.witness,
        },
        "tolerances": { "value": settings.tol },
        "solver_settings": settings,
    });
    out.write(&format!("{:#}\n", report))?;
    Ok(0)
}

fn cmd_sweep(
    points: usize,
    with_theorem2: bool,
    solver: &SolverArgs,
    out: &OutputArgs,
) -> Result<u8, String> {
    if points == 0 || points > 9999 {
        return Err(format!("--points must be in 1..=9999, got {points}"));
    }
    let grid: Vec<f64> = (1..=points).map(|i| i as f64 / (points + 1) as f64).collect();
    let settings = solver.settings()?;
    let rows = bounds::sweep(&grid, with_theorem2, &settings).map_err(|e| e.to_string())?;
    let mut csv = String::from("p,cut_set,nw_extension,theorem1");
    if with_theorem2 {
        csv.push_str(",theorem2");
    }
    csv.push('\n');
    for row in &rows {
        csv.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6}",
            row.p, row.cut_set, row.nw_extension, row.theorem1
        ));
        if let Some(t2) = row.theorem2 {
            csv.push_str(&format!(",{:.6}", t2));
        }
        csv.push('\n');
    }
    out.write(&csv)?;
    Ok(0)
}

fn cmd_search(
    source: &SourceArgs,
    n: usize,
    budget: Budget,
    solver: &SolverArgs,
    out: &OutputArgs,
) -> Result<u8, String> {
    let (src, _) = parse_source(source)?;
    let settings = solver.settings()?;
    let result = schemes::min_sum_message_entropy(&src, n, budget).map_err(|e| e.to_string())?;
    let support = Support::build(&src, n).map_err(|e| e.to_string())?;
    let th2 = bounds::theorem2(&src, &settings).map_err(|e| e.to_string())?;
    let report = json!({
        "n": result.n,
        "min_entropy_sum": result.min_entropy_sum,
        "argmin_scheme": result.argmin.as_ref().map(|s| scheme_json(s, &support)),
        "schemes_enumerated": result.schemes_enumerated,
        "nodes": result.nodes,
        "exhaustive": result.exhaustive,
        "theorem2": th2.value,
        "comparison": result.min_entropy_sum - th2.value,
    });
    out.write(&format!("{:#}\n", report))?;
    Ok(0)
}

fn cmd_verify(
    source: &SourceArgs,
    n: usize,
    budget: Budget,
    inject_broken: bool,
    out: &OutputArgs,
) -> Result<u8, String> {
    let (src, _) = parse_source(source)?;
    let support = Support::build(&src, n).map_err(|e| e.to_string())?;

    const LEMMA1_TOL: f64 = 1e-9;
    let mut checked: u64 = 0;
    let mut pass1: u64 = 0;
    let mut pass2: u64 = 0;
    let mut pass3: u64 = 0;
    let mut counterexamples: Vec<serde_json::Value> = vec![];
    let mut grade = |scheme: &Scheme, report: &schemes::CouplingReport| {
        checked += 1;
        let ok1 = (report.lemma1_lhs - report.lemma1_rhs).abs() <= LEMMA1_TOL;
        let ok2 = report.lemma2_holds;
        let ok3 = report.lemma3_holds;
        pass1 += ok1 as u64;
        pass2 += ok2 as u64;
        pass3 += ok3 as u64;
        if !(ok1 && ok2 && ok3) {
            counterexamples.push(json!({
                "scheme": scheme_json(scheme, &support),
                "report": report,
                "lemma1_pass": ok1,
                "lemma2_pass": ok2,
                "lemma3_pass": ok3,
            }));
        }
    };

    let mut inner_err: Option<modsum::Error> = None;
    let stats = schemes::enumerate_schemes(&src, n, budget, |scheme| {
        if inner_err.is_some() {
            return;
        }
        match schemes::coupling_report(scheme, &src) {
            Ok(report) => grade(scheme, &report),
            Err(e) => inner_err = Some(e),
        }
    })
    .map_err(|e| e.to_string())?;
    if let Some(e) = inner_err {
        return Err(e.to_string());
    }
    if inject_broken {
        let broken = Scheme::constant(&support);
        let report =
            schemes::coupling_report_unchecked(&broken, &src).map_err(|e| e.to_string())?;
        grade(&broken, &report);
    }

    let violations = counterexamples.len() as u64;
    let report = json!({
        "source": source_json(&src),
        "n": n,
        "schemes_checked": checked,
        "exhaustive": stats.exhaustive,
        "lemma1_pass": pass1,
        "lemma2_pass": pass2,
        "lemma3_pass": pass3,
        "violations": violations,
        "counterexamples": counterexamples,
    });
    out.write(&format!("{:#}\n", report))?;
    Ok(if violations == 0 { 0 } else { 1 })
}

fn run() -> Result<u8, String> {
    check_threads_env()?;
    let cli = Cli::parse();
    match &cli.command {
        Command::Eval { source, solver, out } => cmd_eval(source, solver, out),
        Command::Sweep { points, with_theorem2, solver, out } => {
            cmd_sweep(*points, *with_theorem2, solver, out)
        }
        Command::Search { source, n, budget, solver, out } => {
            cmd_search(source, *n as usize, budget.budget(), solver, out)
        }
        Command::Verify { source, n, budget, inject_broken, out } => {
            cmd_verify(source, *n as usize, budget.budget(), *inject_broken, out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
