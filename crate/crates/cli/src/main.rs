use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyperclass::apex::{algebraicity_report, derive_interlacing, reduce};
use hyperclass::classify::{classify_family, compare_with_reference, reference_table, ClassifyConfig, SolutionSet};
use hyperclass::exact::{fmt_rational, parse_rational, IntVector, Rational};
use hyperclass::families::{family_system, Family};
use hyperclass::gkz::build_system;
use hyperclass::schwarz::{lambda_mu_nu, orbit_pair_size, type2_representatives};
use hyperclass::verify::{run_all, run_criterion, CRITERIA};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "hyperclass", version, about = "Algebraic hypergeometric functions via apexpoint signatures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Non-resonance, per-conjugate signatures and algebraicity of one tuple.
    Check {
        #[command(flatten)]
        family: FamilyArg,
        /// Comma-separated rationals, e.g. 1/4,3/4,1/2,1/3.
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// Evaluate every conjugate instead of stopping at the first failure.
        #[arg(long)]
        full_k_report: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Floor vectors of the regions with maximal signature.
    Interlace {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// All non-resonant algebraic parameter tuples of a family.
    Classify {
        #[command(flatten)]
        family: FamilyArg,
        /// Compare the result with the embedded reference table.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Denominator bound for sampling one-parameter families.
        #[arg(long, default_value_t = 24)]
        max_family_denominator: u64,
    },
    /// Configuration, facets, alpha map and non-resonance forms of a family
    /// (or the list of families when none is given).
    Families {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// The irreducible algebraic Gauss triples: families and orbit-pair
    /// representatives.
    Schwarz {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Normalized volume of a family's configuration or of explicit columns.
    Volume {
        #[arg(long, conflicts_with = "generators", required_unless_present = "generators")]
        family: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Columns separated by ';', entries by ',', e.g. "1,0;1,1;1,2".
        #[arg(long, allow_hyphen_values = true)]
        generators: Option<String>,
    },
    /// Runs the acceptance criteria.
    VerifyAll {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct FamilyArg {
    /// Family name: Gauss, F1..F4, FA, FB, FC, FD, G1..G3, H1..H7.
    #[arg(long)]
    family: String,
    /// Number of variables for the Lauricella families.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Failure of a command: usage errors exit with 2, everything else with 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Error { kind: &'static str, message: String, detail: Option<Value> },
}

impl Failure {
    fn error(kind: &'static str, message: impl ToString) -> Self {
        Failure::Error { kind, message: message.to_string(), detail: None }
    }
}

/// Parses a comma-separated rational list, reporting the 1-based position
/// and character offset of the first malformed entry.
fn parse_params(text: &str) -> Result<Vec<Rational>, String> {
    let mut out = Vec::new();
    let mut offset = 0;
    for (i, item) in text.split(',').enumerate() {
        let value = parse_rational(item).map_err(|e| format!("parameter {} at column {}: {e}", i + 1, offset + 1))?;
        out.push(value);
        offset += item.len() + 1;
    }
    Ok(out)
}

fn parse_generators(text: &str) -> Result<Vec<IntVector>, String> {
    let cols: Vec<IntVector> = text
        .split(';')
        .enumerate()
        .map(|(i, col)| {
            col.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| format!("generator {}: {x:?} is not an integer", i + 1)))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if cols.iter().any(|c| c.len() != cols[0].len()) {
        return Err("generators have different lengths".into());
    }
    Ok(cols)
}

fn parse_family(name: &str, n: Option<usize>) -> Result<Family, Failure> {
    Family::parse(name, n).map_err(|e| Failure::Usage(e.to_string()))
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn render(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn csv_line(cells: &[String]) -> String {
    cells.iter().map(|c| if c.contains(',') { format!("\"{c}\"") } else { c.clone() }).collect::<Vec<_>>().join(",") + "\n"
}

/// Output document plus whether every requested check passed.
struct Outcome {
    stdout: String,
    pass: bool,
    mismatch: Option<Value>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, pass: true, mismatch: None }
    }
}

fn execute(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Check { family, params, full_k_report, format } => check(&family, &params, full_k_report, format),
        Command::Interlace { family, format } => interlace(&family, format),
        Command::Classify { family, verify, format, max_family_denominator } => {
            classify(&family, verify, format, max_family_denominator)
        }
        Command::Families { family, n } => families(family.as_deref(), n),
        Command::Schwarz { format } => Ok(Outcome::ok(schwarz(format))),
        Command::Volume { family, n, generators } => volume(family.as_deref(), n, generators.as_deref()),
        Command::VerifyAll { only, format } => verify_all(only, format),
    }
}

fn check(arg: &FamilyArg, params: &str, full: bool, format: Format) -> Result<Outcome, Failure> {
    let family = parse_family(&arg.family, arg.n)?;
    let params = parse_params(params).map_err(Failure::Usage)?;
    let alpha = family.alpha(&params).map_err(|e| Failure::Usage(e.to_string()))?;
    let sys = family_system(family).map_err(|e| Failure::error("family", e))?;
    let nonresonant = sys.is_nonresonant(&alpha);
    let names = family.param_names();
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "family": family.to_string(),
        "parameters": names.iter().zip(rationals(&params)).map(|(n, v)| json!({"name": n, "value": v})).collect::<Vec<_>>(),
        "alpha": rationals(&reduce(&alpha)),
        "nonresonant": nonresonant,
        "volume": sys.volume,
        "algebraic": false,
    });
    if nonresonant {
        let report = algebraicity_report(&sys, &alpha, full).map_err(|e| Failure::error("apex", e))?;
        doc["algebraic"] = json!(report.algebraic);
        doc["denominator"] = json!(report.denominator);
        doc["first_failure"] = json!(report.first_failure);
        doc["signatures"] = report.signatures.iter().map(|(k, s)| json!({"k": k, "signature": s})).collect();
    }
    let out = match format {
        Format::Json => render(&doc),
        Format::Csv => {
            let mut s = csv_line(&["k".into(), "signature".into()]);
            for entry in doc["signatures"].as_array().into_iter().flatten() {
                s.push_str(&csv_line(&[entry["k"].to_string(), entry["signature"].to_string()]));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{family} at ({})\n", rationals(&params).join(", "));
            s.push_str(&format!("non-resonant: {nonresonant}\n"));
            for entry in doc["signatures"].as_array().into_iter().flatten() {
                s.push_str(&format!("  k = {:>3}  signature {} / {}\n", entry["k"], entry["signature"], sys.volume));
            }
            s.push_str(&format!("algebraic: {}\n", doc["algebraic"]));
            s
        }
    };
    Ok(Outcome::ok(out))
}

fn interlace(arg: &FamilyArg, format: Format) -> Result<Outcome, Failure> {
    let family = parse_family(&arg.family, arg.n)?;
    let sys = family_system(family).map_err(|e| Failure::error("family", e))?;
    let table = derive_interlacing(&sys);
    // Facets whose floor is the same on every maximal region carry no condition.
    let constant = table.constant_columns();
    let varying: Vec<IntVector> =
        table.facets.iter().enumerate().filter(|(j, _)| !constant.contains(j)).map(|(_, m)| m.clone()).collect();
    let projected = table.project(&varying).unwrap_or_default();
    let out = match format {
        Format::Json => {
            let mut doc = to_json(&table);
            doc["schema_version"] = json!(SCHEMA_VERSION);
            doc["family"] = json!(family.to_string());
            doc["varying_facets"] = json!(varying);
            doc["floor_vectors"] = json!(projected);
            render(&doc)
        }
        Format::Csv => {
            let mut header: Vec<String> = (1..=table.facets.len()).map(|j| format!("m{j}")).collect();
            header.push("signature".into());
            let mut s = csv_line(&header);
            for r in &table.maximal {
                let mut row: Vec<String> = r.floors.iter().map(|x| x.to_string()).collect();
                row.push(r.signature.to_string());
                s.push_str(&csv_line(&row));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{family}: volume {}, maximal signature {}\n", table.volume, table.max_signature);
            s.push_str("facets:\n");
            for m in &table.facets {
                s.push_str(&format!("  {m:?}\n"));
            }
            s.push_str(&format!("floor vectors on {varying:?}:\n"));
            for v in &projected {
                s.push_str(&format!("  {v:?}\n"));
            }
            s
        }
    };
    Ok(Outcome::ok(out))
}

fn classify(arg: &FamilyArg, verify: bool, format: Format, max_den: u64) -> Result<Outcome, Failure> {
    let family = parse_family(&arg.family, arg.n)?;
    if max_den == 0 {
        return Err(Failure::Usage("--max-family-denominator must be positive".into()));
    }
    let config = ClassifyConfig { max_family_denominator: max_den };
    let set = classify_family(family, &config).map_err(|e| Failure::error("classify", e))?;
    let verification = if verify { Some(verification(family, &set)?) } else { None };
    let pass = verification.as_ref().is_none_or(|v| v["pass"] == json!(true));
    let out = match format {
        Format::Json => render(&json!({
            "schema_version": SCHEMA_VERSION,
            "solutions": to_json(&*set),
            "verification": verification,
        })),
        Format::Csv => classify_csv(&set),
        Format::Text => classify_text(&set, verification.as_ref()),
    };
    let mismatch = (!pass).then(|| verification.clone().unwrap_or(Value::Null));
    Ok(Outcome { stdout: out, pass, mismatch })
}

fn verification(family: Family, set: &SolutionSet) -> Result<Value, Failure> {
    match reference_table(family) {
        Some(id) => {
            let report = compare_with_reference(set, id).map_err(|e| Failure::error("reference", e))?;
            Ok(to_json(&report))
        }
        // Families without a table have no solutions at all.
        None => {
            let empty = set.orbits.is_empty() && set.families.is_empty();
            Ok(json!({"table": "none", "family": family.to_string(), "expected": "no solutions", "pass": empty}))
        }
    }
}

fn classify_csv(set: &SolutionSet) -> String {
    let mut header = vec!["kind".to_string()];
    header.extend(set.parameters.iter().cloned());
    header.push("orbit_size".into());
    let mut s = csv_line(&header);
    for f in &set.families {
        let mut row = vec!["family".to_string()];
        row.extend(f.tuple.iter().cloned());
        row.push(String::new());
        s.push_str(&csv_line(&row));
    }
    for o in &set.orbits {
        let mut row = vec!["sporadic".to_string()];
        row.extend(rationals(&o.representative));
        row.push(o.members.len().to_string());
        s.push_str(&csv_line(&row));
    }
    s
}

fn classify_text(set: &SolutionSet, verification: Option<&Value>) -> String {
    let mut s = format!("{} ({})\n", set.family, set.parameters.join(", "));
    s.push_str(&format!("{} candidates tested\n", set.candidates_tested));
    for f in &set.families {
        s.push_str(&format!("family ({}), {} members checked\n", f.tuple.join(", "), f.members_checked));
    }
    s.push_str(&format!("{} sporadic tuples in {} orbits\n", set.sporadic_count, set.orbits.len()));
    for o in &set.orbits {
        s.push_str(&format!("  ({})  x{}\n", rationals(&o.representative).join(", "), o.members.len()));
    }
    if let Some(v) = verification {
        s.push_str(&format!("verification: {}\n", if v["pass"] == json!(true) { "pass" } else { "FAIL" }));
    }
    s
}

fn families(name: Option<&str>, n: Option<usize>) -> Result<Outcome, Failure> {
    let Some(name) = name else {
        let list: Vec<Value> = Family::catalogue(4)
            .into_iter()
            .map(|f| json!({"family": f.to_string(), "parameters": f.param_names(), "volume": f.expected_volume()}))
            .collect();
        return Ok(Outcome::ok(render(&json!({"schema_version": SCHEMA_VERSION, "families": list}))));
    };
    let family = parse_family(name, n)?;
    let sys = family_system(family).map_err(|e| Failure::error("family", e))?;
    let (matrix, shift) = family.alpha_map();
    let forms = family.nonresonance_forms().map_err(|e| Failure::error("family", e))?;
    let predicate = family.nonresonance_predicate().map_err(|e| Failure::error("family", e))?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "family": family.to_string(),
        "parameters": family.param_names(),
        "generators": sys.generators,
        "facets": sys.facets,
        "h": sys.grading,
        "lattice_basis": sys.lattice,
        "volume": sys.volume,
        "alpha_map": {"matrix": matrix, "shift": shift},
        "nonresonance": {"forms": forms, "non_integral": predicate},
        "symmetry": family.symmetry_group(),
        "transported_from": family.isomorphism().map(|iso| json!({"source": iso.source.to_string(), "map": iso.map})),
    });
    Ok(Outcome::ok(render(&doc)))
}

fn schwarz(format: Format) -> String {
    let (families, _) = lambda_mu_nu();
    // Families in (a, b, c) coordinates, as in the Gauss table.
    let table = hyperclass::reference::table(hyperclass::reference::TableId::Table2);
    let reps = type2_representatives();
    match format {
        Format::Csv | Format::Text => {
            let mut s = csv_line(&["kind".into(), "a".into(), "b".into(), "c".into(), "orbit_size".into(), "constraint".into()]);
            for f in &table.families {
                let mut row = vec!["family".to_string()];
                row.extend(f.tokens());
                row.push(String::new());
                row.push("0 < r < 1, r != 1/2".into());
                s.push_str(&csv_line(&row));
            }
            for t in &reps {
                let mut row = vec!["sporadic".to_string()];
                row.extend(rationals(t));
                row.push(orbit_pair_size(t).to_string());
                row.push(String::new());
                s.push_str(&csv_line(&row));
            }
            s
        }
        Format::Json => render(&json!({
            "schema_version": SCHEMA_VERSION,
            "lambda_mu_nu_families": families.iter().map(|f| f.tokens()).collect::<Vec<_>>(),
            "families": table.families.iter().map(|f| json!({"tuple": f.tokens(), "constraint": "0 < r < 1, r != 1/2"})).collect::<Vec<_>>(),
            "sporadic": reps.iter().map(|t| json!({"tuple": rationals(t), "orbit_size": orbit_pair_size(t)})).collect::<Vec<_>>(),
            "total_type2": reps.iter().map(|t| orbit_pair_size(t)).sum::<usize>(),
        })),
    }
}

fn volume(family: Option<&str>, n: Option<usize>, generators: Option<&str>) -> Result<Outcome, Failure> {
    let (label, sys) = match (family, generators) {
        (Some(name), _) => {
            let f = parse_family(name, n)?;
            (f.to_string(), family_system(f).map_err(|e| Failure::error("family", e))?.as_ref().clone())
        }
        (None, Some(text)) => {
            let cols = parse_generators(text).map_err(Failure::Usage)?;
            ("custom".to_string(), build_system(cols).map_err(|e| Failure::error("gkz", e))?)
        }
        (None, None) => return Err(Failure::Usage("give --family or --generators".into())),
    };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "family": label,
        "dim": sys.dim,
        "generators": sys.generators.len(),
        "facets": sys.facets.len(),
        "volume": sys.volume,
        "cells": sys.cells.len(),
    });
    Ok(Outcome::ok(render(&doc)))
}

fn verify_all(only: Option<u8>, format: Format) -> Result<Outcome, Failure> {
    let reports = match only {
        Some(id) => vec![run_criterion(id).ok_or_else(|| {
            Failure::Usage(format!("unknown criterion {id}; expected one of {:?}", CRITERIA.iter().map(|c| c.0).collect::<Vec<_>>()))
        })?],
        None => run_all(),
    };
    let pass = reports.iter().all(|r| r.pass);
    let out = match format {
        Format::Json => render(&json!({"schema_version": SCHEMA_VERSION, "pass": pass, "criteria": to_json(&reports)})),
        Format::Csv => {
            let mut s = csv_line(&["criterion".into(), "check".into(), "pass".into(), "detail".into()]);
            for r in &reports {
                for c in &r.checks {
                    s.push_str(&csv_line(&[r.id.to_string(), c.name.clone(), c.pass.to_string(), c.detail.replace('"', "'")]));
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&r.line());
                s.push('\n');
                for c in r.checks.iter().filter(|c| !c.pass) {
                    s.push_str(&format!("    failed: {}: {}\n", c.name, c.detail));
                }
            }
            s
        }
    };
    let mismatch = (!pass).then(|| json!(reports.iter().filter(|r| !r.pass).map(|r| r.id).collect::<Vec<_>>()));
    Ok(Outcome { stdout: out, pass, mismatch })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("HYPERCLASS_THREADS") else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("HYPERCLASS_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::error("threads", e))
}

fn report_failure(f: &Failure) -> ExitCode {
    let (code, doc) = match f {
        Failure::Usage(message) => (2, json!({"error": {"kind": "usage", "message": message}})),
        Failure::Error { kind, message, detail } => (1, json!({"error": {"kind": kind, "message": message, "detail": detail}})),
    };
    eprintln!("{}", serde_json::to_string(&doc).expect("serializable"));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = configure_threads() {
        return report_failure(&f);
    }
    match execute(cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            let _ = stdout.flush();
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                report_failure(&Failure::Error {
                    kind: "mismatch",
                    message: "requested checks failed".into(),
                    detail: outcome.mismatch,
                })
            }
        }
        Err(f) => report_failure(&f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("hyperclass").chain(args.iter().copied()))
    }

    #[test]
    fn check_command_parses() {
        let cli = parse(&["check", "--family", "F4", "--params", "1/4,3/4,1/2,1/3"]).unwrap();
        let Command::Check { family, params, .. } = cli.command else { panic!("not check") };
        assert_eq!(parse_family(&family.family, family.n).unwrap(), Family::FC(2));
        assert_eq!(parse_params(&params).unwrap().len(), 4);
    }

    #[test]
    fn classify_verify_flag() {
        let cli = parse(&["classify", "--family", "H4", "--verify"]).unwrap();
        assert!(matches!(cli.command, Command::Classify { verify: true, .. }));
    }

    #[test]
    fn malformed_rational_reports_position() {
        let err = parse_params("1/4,x").unwrap_err();
        assert!(err.contains("parameter 2"), "{err}");
        assert!(err.contains("column 5"), "{err}");
        assert!(parse_params("1/0").is_err());
        assert_eq!(parse_params("-1/2").unwrap()[0], hyperclass::exact::rat(-1, 2));
    }

    #[test]
    fn generators_parse() {
        assert_eq!(parse_generators("1,0;1,1").unwrap(), vec![vec![1, 0], vec![1, 1]]);
        assert!(parse_generators("1,0;1").is_err());
        assert!(parse_generators("1,a").is_err());
    }

    #[test]
    fn unknown_family_is_usage_error() {
        assert!(matches!(parse_family("F9", None), Err(Failure::Usage(_))));
    }
}
