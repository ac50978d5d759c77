use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use haar_groupoid::constructions::random::{random_cospan_with, random_haar_groupoid, Bounds, Strategy};
use haar_groupoid::constructions::{
    canonical_iso_cech, canonical_iso_transformation, is_isomorphism, CechParams, TransformationParams,
};
use haar_groupoid::haar::modular_function;
use haar_groupoid::io::{
    cospan_to_string, haar_groupoid_to_string, parse_document, to_canonical_string, weak_pullback_to_string,
    Document, ExampleDocument, WeakPullbackDocument,
};
use haar_groupoid::pullback::{build_weak_pullback, run_all_checks, Cospan};
use haar_groupoid::{Error, HaarGroupoid, ValidationReport};

/// Finite Haar groupoids and weak pullbacks, verified exactly.
#[derive(Parser)]
#[command(name = "haargroupoid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every validator that applies to a document.
    Validate { file: PathBuf },
    /// Build the weak pullback of a cospan.
    Pullback {
        cospan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify every claim about the weak pullback of a cospan.
    Check {
        cospan: PathBuf,
        /// Count modular-formula instances off the support as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Build one of the two worked examples.
    Example {
        which: ExampleKind,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the modular function over the support of the induced measure.
    Modular { file: PathBuf },
    /// Generate a random instance.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `elements,units`
        #[arg(long, default_value = "24,4")]
        bounds: String,
        #[arg(long, value_enum, default_value_t = RandomKind::Cospan)]
        kind: RandomKind,
        #[arg(long, value_enum, default_value_t = StrategyArg::Default)]
        strategy: StrategyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleKind {
    Cech,
    Transformation,
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomKind {
    Cospan,
    Groupoid,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Default,
    NullUnits,
    CotrivialBase,
}

/// Failure classes, one exit code each.
enum Failure {
    Parse(String),
    Validation(String),
    Theorem(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Theorem(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Validation(m) | Failure::Theorem(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ParseError { .. } | Error::UnsupportedVersion(_) | Error::DanglingReference { .. } => {
                Failure::Parse(e.to_string())
            }
            other => Failure::Validation(other.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

// 0 prints failures only, 1 (default) every line, 2 adds sizes and details
fn verbosity() -> u8 {
    std::env::var("HAARGROUPOID_VERBOSE")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(1)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_document(path: &Path) -> Result<Document, Failure> {
    Ok(parse_document(&read(path)?)?)
}

fn emit(text: &str, out: Option<&Path>) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Validation(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ensure_valid(report: ValidationReport, what: &str) -> CliResult {
    if report.is_empty() {
        if verbosity() >= 1 {
            println!("valid {what}");
        }
        Ok(())
    } else {
        Err(Failure::Validation(format!("invalid {what}\n{report}")))
    }
}

fn load_cospan(path: &Path) -> Result<Cospan, Failure> {
    match read_document(path)? {
        Document::Cospan(d) => {
            let c = d.to_cospan()?;
            let report = c.validate()?;
            if !report.is_empty() {
                return Err(Failure::Validation(format!("invalid cospan\n{report}")));
            }
            Ok(c)
        }
        other => Err(Failure::Parse(format!("expected a cospan document, found `{}`", other.kind()))),
    }
}

fn validate(file: &Path) -> CliResult {
    match read_document(file)? {
        Document::Groupoid(d) => {
            if d.groupoid.haar.is_some() || d.groupoid.unit_measure.is_some() {
                ensure_valid(d.groupoid.to_haar("groupoid")?.validate(), "Haar groupoid")
            } else {
                ensure_valid(d.groupoid.to_groupoid("groupoid")?.validate(), "groupoid")
            }
        }
        Document::Cospan(d) => ensure_valid(d.to_cospan()?.validate()?, "cospan"),
        Document::WeakPullback(d) => {
            let c = d.cospan.to_cospan("cospan.")?;
            let mut report = c.validate()?;
            if report.is_empty() {
                report.extend(d.pullback.to_haar("pullback")?.validate().scoped("P"));
                let rebuilt = WeakPullbackDocument::from_result(&build_weak_pullback(&c)?);
                if rebuilt != d {
                    report.push("pullback.recomputed", vec![], "document differs from the recomputed weak pullback");
                }
            }
            ensure_valid(report, "weak pullback")
        }
        Document::Example(d) => {
            let p = d.pullback.to_groupoid("pullback")?;
            let target = d.target.to_groupoid("target")?;
            let mut report = p.validate().scoped("pullback");
            report.extend(target.validate().scoped("target"));
            let iso = haar_groupoid::GroupoidHom::from_ids(&p, &target, &d.iso)?;
            if is_isomorphism(&p, &target, &iso) != d.is_isomorphism {
                report.push("example.verdict", vec![], "recorded isomorphism verdict is wrong");
            }
            ensure_valid(report, "example")
        }
    }
}

fn pullback(cospan: &Path, out: Option<&Path>) -> CliResult {
    let c = load_cospan(cospan)?;
    let w = build_weak_pullback(&c)?;
    if verbosity() >= 2 {
        eprintln!("|P| = {}, |P⁽⁰⁾| = {}", w.groupoid().len(), w.groupoid().units().len());
    }
    emit(&weak_pullback_to_string(&w), out)
}

fn check(cospan: &Path, strict: bool) -> CliResult {
    let c = load_cospan(cospan)?;
    let w = build_weak_pullback(&c)?;
    let report = run_all_checks(&w, strict)?;
    let v = verbosity();
    if v >= 2 {
        println!("|P| = {}, |P⁽⁰⁾| = {}", w.groupoid().len(), w.groupoid().units().len());
    }
    for line in report.to_string().lines() {
        if v >= 1 || line.starts_with("FAIL") {
            println!("{line}");
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.failures().map(|c| c.claim.as_str()).collect();
        Err(Failure::Theorem(format!("failed: {}", failed.join(", "))))
    }
}

fn params<T: for<'de> serde::Deserialize<'de>>(path: Option<&Path>, default: T) -> Result<T, Failure> {
    match path {
        None => Ok(default),
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| {
            Failure::Parse(format!("{} line {} column {}: {e}", p.display(), e.line(), e.column()))
        }),
    }
}

fn example(which: ExampleKind, params_file: Option<&Path>, out: Option<&Path>) -> CliResult {
    let doc = match which {
        ExampleKind::Cech => ExampleDocument::from_cech(&canonical_iso_cech(&params(params_file, CechParams::worked())?)?),
        ExampleKind::Transformation => ExampleDocument::from_transformation(&canonical_iso_transformation(&params(
            params_file,
            TransformationParams::worked(),
        )?)?),
    };
    emit(&to_canonical_string(&doc), out)?;
    if verbosity() >= 1 {
        eprintln!(
            "{} canonical map: {} ({} → {} elements)",
            doc.example,
            if doc.is_isomorphism { "isomorphism" } else { "not an isomorphism" },
            doc.pullback.elements.len(),
            doc.target.elements.len()
        );
    }
    if doc.is_isomorphism {
        Ok(())
    } else {
        Err(Failure::Theorem("canonical map is not an isomorphism".into()))
    }
}

fn print_modular(h: &HaarGroupoid) -> CliResult {
    let delta = modular_function(h)?;
    println!("element\tdelta");
    for (x, d) in delta.iter() {
        println!("{}\t{d}", h.groupoid().id(x));
    }
    Ok(())
}

fn modular(file: &Path) -> CliResult {
    match read_document(file)? {
        Document::Groupoid(d) => {
            let h = d.groupoid.to_haar("groupoid")?;
            ensure_quiet(h.validate(), "Haar groupoid")?;
            print_modular(&h)
        }
        Document::Cospan(d) => {
            let c = d.to_cospan()?;
            ensure_quiet(c.validate()?, "cospan")?;
            print_modular(build_weak_pullback(&c)?.haar())
        }
        Document::WeakPullback(d) => print_modular(&d.pullback.to_haar("pullback")?),
        Document::Example(_) => Err(Failure::Parse("an example document carries no Haar data".into())),
    }
}

fn ensure_quiet(report: ValidationReport, what: &str) -> CliResult {
    if report.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("invalid {what}\n{report}")))
    }
}

fn random(seed: u64, bounds: &str, kind: RandomKind, strategy: StrategyArg, out: Option<&Path>) -> CliResult {
    let bounds: Bounds = bounds.parse()?;
    let text = match kind {
        RandomKind::Groupoid => haar_groupoid_to_string(&random_haar_groupoid(seed, bounds)?),
        RandomKind::Cospan => {
            let strategy = match strategy {
                StrategyArg::Default => Strategy::Default,
                StrategyArg::NullUnits => Strategy::NullUnits,
                StrategyArg::CotrivialBase => Strategy::CotrivialBase,
            };
            cospan_to_string(&random_cospan_with(seed, bounds, strategy)?)
        }
    };
    emit(&text, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Pullback { cospan, out } => pullback(cospan, out.as_deref()),
        Command::Check { cospan, strict } => check(cospan, *strict),
        Command::Example { which, params, out } => example(*which, params.as_deref(), out.as_deref()),
        Command::Modular { file } => modular(file),
        Command::Random {
            seed,
            bounds,
            kind,
            strategy,
            out,
        } => random(*seed, bounds, *kind, *strategy, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
