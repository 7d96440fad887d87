use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use qbrst::bar::{verify_chain_map, verify_subcomplex, verify_w_identity};
use qbrst::braid::{compute_height, verify_braid_suite, Height};
use qbrst::brst::{
    build_brst_explicit, build_brst_recursive, verify_closed_action, verify_constructions, verify_q_squared,
    BrstCoefficients, BuildMode, GhostAlgebra,
};
use qbrst::format;
use qbrst::graded::{verify_grading_suite, GradingMatrix};
use qbrst::linop::digits;
use qbrst::qlie::{ScalarField, StructureConstants};
use qbrst::report::{CheckItem, VerificationReport};

/// Strands searched when computing the height.
const HEIGHT_SEARCH: usize = 5;

#[derive(Parser)]
#[command(name = "qbrst", version, about = "Verify BRST constructions for quantum Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report as JSON to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Include wall-clock time per check in the output.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure constraints and the extended Yang–Baxter equation.
    Validate { file: PathBuf },
    /// Smallest n with A_{1→n+1} = 0.
    Height {
        file: PathBuf,
        #[arg(long, default_value_t = HEIGHT_SEARCH)]
        max_n: usize,
    },
    /// Build the BRST coefficients.
    Brst {
        file: PathBuf,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        /// Write the coefficients as JSON to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run verification suites.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        max_degree: Option<usize>,
        /// Specialize q to this rational value (laurent-field files only).
        #[arg(long)]
        q: Option<String>,
    },
    /// Print a bundled algebra file.
    Export {
        #[arg(value_parser = format::BUNDLED)]
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Recursive,
    Explicit,
    Both,
}

impl From<Mode> for BuildMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Recursive => BuildMode::Recursive,
            Mode::Explicit => BuildMode::Explicit,
            Mode::Both => BuildMode::Both,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Braid,
    Brst,
    Bar,
    Grading,
    All,
}

/// Input or configuration problem; exit code 2.
struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

type Outcome = Result<Vec<VerificationReport>, ConfigError>;

fn load(path: &Path) -> Result<StructureConstants, ConfigError> {
    let src = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    format::parse(&src).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn height(sc: &StructureConstants, n_max: usize) -> Height {
    compute_height(&sc.sigma_rep(), n_max)
}

fn max_degree(sc: &StructureConstants, requested: Option<usize>) -> Result<usize, ConfigError> {
    match requested {
        Some(0) => Err(ConfigError("--max-degree must be at least 1".into())),
        Some(d) => Ok(d),
        None => Ok(match height(sc, HEIGHT_SEARCH) {
            Height::Exact(h) => h.clamp(1, 3),
            Height::AtLeast(_) => 3,
        }),
    }
}

fn cmd_validate(path: &Path) -> Outcome {
    let sc = load(path)?;
    let mut rep = sc.validate_structure();
    rep.extend(sc.check_yang_baxter());
    Ok(vec![rep])
}

fn cmd_height(path: &Path, n_max: usize) -> Outcome {
    let sc = load(path)?;
    let h = height(&sc, n_max);
    let mut rep = VerificationReport::new(format!("height ({})", sc.name));
    let item = match h {
        Height::Exact(h) => CheckItem::pass("height", format!("A_{{1→{}}} = 0", h + 1)).with_note(format!("height = {h}")),
        Height::AtLeast(h) => CheckItem::skipped("height", format!("n ≤ {n_max}"), format!("height ≥ {h}")),
    };
    rep.push(item);
    Ok(vec![rep])
}

fn coefficients_json(sc: &StructureConstants, mode: &str, c: &BrstCoefficients) -> Value {
    let n = sc.n();
    let pieces: Vec<Value> = c
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let entries: Vec<Value> = p
                .nonzeros()
                .map(|(r, col, v)| {
                    let mut e: Vec<Value> = digits(r, p.out_legs(), n)
                        .into_iter()
                        .chain(digits(col, p.in_legs(), n))
                        .map(|x| json!(x + 1))
                        .collect();
                    e.push(json!(v.to_string()));
                    Value::Array(e)
                })
                .collect();
            json!({ "r": i + 1, "in_legs": p.in_legs(), "out_legs": p.out_legs(), "entries": entries })
        })
        .collect();
    json!({ "algebra": sc.name, "mode": mode, "height": c.height.to_string(), "pieces": pieces })
}

fn cmd_brst(path: &Path, requested: Option<usize>, mode: Mode, dump: Option<&Path>) -> Outcome {
    let sc = load(path)?;
    let r_max = max_degree(&sc, requested)?;
    let mut rep = VerificationReport::new(format!("BRST construction ({})", sc.name));
    let built = match BuildMode::from(mode) {
        BuildMode::Recursive => {
            let t = sc.solve_t_lift()?.t;
            ("recursive", build_brst_recursive(&sc, &t, r_max)?)
        }
        BuildMode::Explicit => ("explicit", build_brst_explicit(&sc, r_max)?),
        BuildMode::Both => {
            rep = verify_constructions(&sc, r_max);
            let t = sc.solve_t_lift()?.t;
            ("recursive", build_brst_recursive(&sc, &t, r_max)?)
        }
    };
    let (label, coeffs) = built;
    for (i, p) in coeffs.pieces().iter().enumerate() {
        let note = format!("{} nonzero entries", p.nonzeros().count());
        rep.push(CheckItem::pass("brst_piece", format!("{label} r={}", i + 1)).with_note(note));
    }
    if let Some(out) = dump {
        let text = serde_json::to_string_pretty(&coefficients_json(&sc, label, &coeffs))?;
        fs::write(out, text + "\n").map_err(|e| ConfigError(format!("{}: {e}", out.display())))?;
    }
    Ok(vec![rep])
}

fn parse_q(text: &str) -> Result<BigRational, ConfigError> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|e| ConfigError(format!("--q `{text}`: {e}")))
}

fn cmd_verify(path: &Path, suite: Suite, requested: Option<usize>, q: Option<&str>) -> Outcome {
    let mut sc = load(path)?;
    if let Some(q) = q {
        if sc.field != ScalarField::Laurent {
            return Err(ConfigError("--q applies only to laurent-field files".into()));
        }
        sc = sc.specialize(&parse_q(q)?)?;
    }
    let deg = max_degree(&sc, requested)?;
    let mut out = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;

    if wants(Suite::Braid) {
        let strands = (deg + 1).max(2);
        out.push(verify_braid_suite(&sc.sigma_rep(), strands, "σ"));
        out.push(verify_braid_suite(&sc.extended_rep(), strands, "R"));
    }
    let needs_q = wants(Suite::Brst) || wants(Suite::Bar);
    let prepared = if needs_q {
        let t = sc.solve_t_lift()?.t;
        let coeffs = build_brst_recursive(&sc, &t, deg.saturating_sub(1).max(1))?;
        let alg = GhostAlgebra::new(&sc, deg)?;
        Some((coeffs, alg))
    } else {
        None
    };
    if let Some((coeffs, alg)) = &prepared {
        if wants(Suite::Brst) {
            out.push(verify_constructions(&sc, deg));
            out.push(verify_closed_action(alg, coeffs, deg));
            out.push(verify_q_squared(alg, coeffs, deg));
        }
        if wants(Suite::Bar) {
            out.push(verify_w_identity(&sc, deg));
            out.push(verify_subcomplex(&sc, deg + 1));
            out.push(verify_chain_map(alg, coeffs, deg));
        }
    }
    if wants(Suite::Grading) {
        match GradingMatrix::of(&sc)? {
            Some(d) => out.push(verify_grading_suite(&sc, &d, deg)?),
            None => {
                let mut rep = VerificationReport::new(format!("grading ({})", sc.name));
                rep.push(CheckItem::skipped("grading", "", "the file has no grading matrix"));
                out.push(rep);
            }
        }
    }
    Ok(out)
}

fn report_json(command: &str, reports: &[VerificationReport], timings: bool) -> Value {
    let (mut pass, mut fail, mut skipped) = (0, 0, 0);
    let mut list = Vec::new();
    for r in reports {
        let s = r.summary();
        pass += s.pass;
        fail += s.fail;
        skipped += s.skipped;
        let mut v = serde_json::to_value(r).expect("serializable");
        if timings {
            for (item, c) in v["checks"].as_array_mut().expect("array").iter_mut().zip(&r.checks) {
                item["elapsed_seconds"] = json!(c.elapsed.as_secs_f64());
            }
        }
        v["summary"] = serde_json::to_value(s).expect("serializable");
        list.push(v);
    }
    json!({
        "command": command,
        "reports": list,
        "summary": { "pass": pass, "fail": fail, "skipped": skipped },
    })
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("QBRST_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("QBRST_THREADS=`{v}` is not a number")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, ConfigError> {
    configure_threads()?;
    let (name, reports) = match &cli.command {
        Command::Validate { file } => ("validate", cmd_validate(file)?),
        Command::Height { file, max_n } => ("height", cmd_height(file, *max_n)?),
        Command::Brst {
            file,
            max_degree,
            mode,
            dump,
        } => ("brst", cmd_brst(file, *max_degree, *mode, dump.as_deref())?),
        Command::Verify {
            file,
            suite,
            max_degree,
            q,
        } => ("verify", cmd_verify(file, *suite, *max_degree, q.as_deref())?),
        Command::Export { name } => {
            let src = format::bundled_source(name).expect("validated by clap");
            print!("{src}");
            return Ok(true);
        }
    };
    for r in &reports {
        print!("{}", r.render(cli.timings));
    }
    let ok = reports.iter().all(VerificationReport::all_passed);
    if let Some(path) = &cli.report {
        let text = serde_json::to_string_pretty(&report_json(name, &reports, cli.timings))?;
        fs::write(path, text + "\n").map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
