//! Command-line front end. `run` is the whole program: parse, dispatch,
//! print a deterministic report, return the exit code.

use crate::algebra::torus_name;
use crate::astruct::{box_a_dd, box_ad, box_da_d, check_ainfty};
use crate::az::{cfar_az, cfdd_identity, cfdr_az, cfdr_azbar, small_model};
use crate::dstruct::{mor_to_d, TypeDStructure};
use crate::error::{HfrError, Result};
use crate::io::{load_path, save_path, Document};
use crate::pmc::{antipodal_pmc, realify, split_pmc, PointedMatchedCircle};
use crate::reproduce::{check_names, run_all, run_check};
use crate::satellites::{
    fixture, fixture_names, hfr_satellite_dim, oracle_hfr_cable, oracle_hfr_whitehead,
    AlternatingKnotData, Fixture, Pattern,
};
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "hfr",
    version,
    about = "Strands-algebra toolbox: symmetric circle modules, box tensor \
             products, morphism complexes, satellite dimensions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    /// Tilde-side type D structure over the full algebra.
    Az,
    /// Star-side type D structure over the full algebra.
    Azbar,
    /// Reduced multiplicity-one type D model.
    Small,
    /// Multiplicity-one action module.
    Cfar,
    /// Identity DD bimodule of the multiplicity-one algebra.
    Cfdd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a symmetric-circle module and report its size.
    Az {
        /// Circle, written split:K or antipodal:K.
        #[arg(long)]
        pmc: String,
        /// Which construction to run.
        #[arg(long, value_enum, default_value_t = Side::Az)]
        side: Side,
        /// Write the structure as an interchange document.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Validate a document and verify the law its kind must satisfy.
    Check {
        /// Interchange file, or fixture:NAME.
        #[arg(long)]
        input: String,
        /// Largest algebra-input count exercised by the A-infinity check.
        #[arg(long, default_value_t = 4)]
        arity: usize,
    },
    /// Cancel invertible arrows in a type D structure.
    Simplify {
        /// Interchange file, or fixture:NAME (must be type_d).
        #[arg(long)]
        input: String,
        /// Write the simplified structure as an interchange document.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Box tensor product: type_a ⊠ type_d, da_bimodule ⊠ type_d, or
    /// type_a ⊠ dd_bimodule.
    Tensor {
        /// Left factor: interchange file or fixture:NAME.
        #[arg(long)]
        module: String,
        /// Right factor: interchange file or fixture:NAME.
        #[arg(long)]
        structure: String,
        /// Write the product as an interchange document.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Morphism complex between two type D structures over one algebra.
    Mor {
        /// Source structure: interchange file or fixture:NAME.
        #[arg(long)]
        from: String,
        /// Target structure: interchange file or fixture:NAME.
        #[arg(long)]
        to: String,
    },
    /// Satellite homology dimension from the companion's (det, tau).
    Satellite {
        /// Pattern name: whitehead or cable21.
        #[arg(long)]
        pattern: String,
        /// Companion determinant (positive odd).
        #[arg(long)]
        det: u64,
        /// Companion concordance parameter.
        #[arg(long, allow_negative_numbers = true)]
        tau: i64,
        /// Also evaluate the closed form and compare.
        #[arg(long)]
        compare_oracle: bool,
    },
    /// List or inspect the built-in fixtures.
    Fixtures {
        /// Print every fixture name.
        #[arg(long)]
        list: bool,
        /// Report one fixture.
        #[arg(long)]
        name: Option<String>,
        /// Write the named fixture as an interchange document.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run the acceptance checks and print a pass/fail table.
    Reproduce {
        /// Run every check.
        #[arg(long)]
        all: bool,
        /// Run a single check by name.
        #[arg(long)]
        check: Option<String>,
        /// Print the check names and exit.
        #[arg(long)]
        list: bool,
    },
}

/// Parses argv, executes one command, writes the report, and returns the
/// process exit code (0 success, 1 failed computation or failing checks,
/// 2 usage error).
pub fn run<W: Write>(argv: &[String], out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.exit_code() == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.cmd) {
        Ok((report, code)) => {
            let _ = write!(out, "{report}");
            code
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            match e {
                HfrError::UsageError(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<(String, i32)> {
    match cmd {
        Cmd::Az { pmc, side, dump } => cmd_az(&pmc, side, dump),
        Cmd::Check { input, arity } => cmd_check(&input, arity),
        Cmd::Simplify { input, dump } => cmd_simplify(&input, dump),
        Cmd::Tensor { module, structure, dump } => cmd_tensor(&module, &structure, dump),
        Cmd::Mor { from, to } => cmd_mor(&from, &to),
        Cmd::Satellite { pattern, det, tau, compare_oracle } => {
            cmd_satellite(&pattern, det, tau, compare_oracle)
        }
        Cmd::Fixtures { list, name, dump } => cmd_fixtures(list, name, dump),
        Cmd::Reproduce { all, check, list } => cmd_reproduce(all, check, list),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers.

fn parse_circle(text: &str) -> Result<PointedMatchedCircle> {
    let usage = || {
        HfrError::UsageError(format!(
            "circle `{text}` not recognized; use split:K or antipodal:K"
        ))
    };
    let (family, k) = text.split_once(':').ok_or_else(usage)?;
    let k: usize = k.parse().map_err(|_| usage())?;
    if k == 0 {
        return Err(usage());
    }
    match family {
        "split" => Ok(split_pmc(k)),
        "antipodal" => Ok(antipodal_pmc(k)),
        _ => Err(usage()),
    }
}

fn load_ref(source: &str) -> Result<Document> {
    if let Some(name) = source.strip_prefix("fixture:") {
        match fixture(name) {
            Some(Fixture::TypeD(d)) => Ok(Document::TypeD(d)),
            Some(Fixture::TypeA(m)) => Ok(Document::TypeA(m)),
            None => Err(HfrError::UsageError(format!(
                "unknown fixture `{name}`; see `hfr fixtures --list`"
            ))),
        }
    } else {
        load_path(source)
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("{n} {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn dump_doc(report: &mut String, doc: &Document, dump: Option<PathBuf>) -> Result<()> {
    if let Some(path) = dump {
        save_path(doc, &path)?;
        let _ = writeln!(report, "wrote {}", path.display());
    }
    Ok(())
}

fn subscript(digits: &str) -> String {
    digits
        .chars()
        .map(|c| match c {
            '0' => '₀',
            '1' => '₁',
            '2' => '₂',
            '3' => '₃',
            '4' => '₄',
            _ => c,
        })
        .collect()
}

/// ι/ρ display name for a genus-1 basis element.
fn pretty_coeff(name: &str) -> String {
    if let Some(rest) = name.strip_prefix('ι') {
        format!("ι{}", subscript(rest))
    } else if let Some(rest) = name.strip_prefix('ρ') {
        format!("ρ{}", subscript(rest))
    } else {
        name.to_string()
    }
}

/// Pretty form of a genus-1 generator label such as `{[2,3]}~`.
fn pretty_gen(label: &str) -> Option<String> {
    let (inner, decoration) = if let Some(p) = label.strip_suffix('~') {
        (p, '~')
    } else if let Some(p) = label.strip_suffix('*') {
        (p, '*')
    } else {
        return None;
    };
    let inner = inner.strip_prefix("{[")?.strip_suffix("]}")?;
    let (a, b) = inner.split_once(',')?;
    let interval = match (a.trim().parse::<u8>().ok()?, b.trim().parse::<u8>().ok()?) {
        (1, 2) => "1",
        (2, 3) => "2",
        (3, 4) => "3",
        (1, 3) => "12",
        (2, 4) => "23",
        (1, 4) => "123",
        _ => return None,
    };
    Some(match decoration {
        '~' => format!("ρ\u{0303}{}", subscript(interval)),
        _ => format!("ρ{}*", subscript(interval)),
    })
}

/// One-line size report; at genus 1 the arrows are listed with ι/ρ names.
fn type_d_report(d: &TypeDStructure) -> String {
    let head = format!("{}, {}", plural(d.len(), "generator"), plural(d.arrows.len(), "arrow"));
    if d.algebra.pmc.points() != 4 {
        return head;
    }
    let mut parts = Vec::new();
    for a in &d.arrows {
        let (Some(src), Some(tgt)) =
            (pretty_gen(&d.labels[a.source]), pretty_gen(&d.labels[a.target]))
        else {
            return head;
        };
        let Some(coeff) = torus_name(&a.coeff).map(pretty_coeff) else {
            return head;
        };
        parts.push(format!("{src} —{coeff}→ {tgt}"));
    }
    if parts.is_empty() {
        head
    } else {
        format!("{head}: {}", parts.join(", "))
    }
}

// ---------------------------------------------------------------------------
// Subcommands.

fn cmd_az(pmc: &str, side: Side, dump: Option<PathBuf>) -> Result<(String, i32)> {
    let z = parse_circle(pmc)?;
    let rp = realify(&z)?;
    let mut report = String::new();
    let doc = match side {
        Side::Az | Side::Azbar | Side::Small => {
            let d = match side {
                Side::Az => cfdr_az(&rp)?,
                Side::Azbar => cfdr_azbar(&rp)?,
                _ => small_model(&rp)?,
            };
            let _ = writeln!(report, "{}", type_d_report(&d));
            Document::TypeD(d)
        }
        Side::Cfar => {
            let m = cfar_az(&rp)?;
            let _ = writeln!(
                report,
                "{}, {}",
                plural(m.len(), "generator"),
                plural(m.ops.len(), "stored operation")
            );
            Document::TypeA(m)
        }
        Side::Cfdd => {
            let dd = cfdd_identity(rp.circle())?;
            let _ = writeln!(
                report,
                "{}, {}",
                plural(dd.labels.len(), "generator"),
                plural(dd.arrows.len(), "arrow")
            );
            Document::BimoduleDD(dd)
        }
    };
    dump_doc(&mut report, &doc, dump)?;
    Ok((report, 0))
}

fn cmd_check(input: &str, arity: usize) -> Result<(String, i32)> {
    let doc = load_ref(input)?;
    let line = match &doc {
        Document::Pmc(z) => {
            let symmetric = match realify(z) {
                Ok(_) => "yes".to_string(),
                Err(e) => format!("no ({e})"),
            };
            format!("pmc: {} points, genus {}; symmetric: {symmetric}",
                z.points(), z.points() / 4)
        }
        Document::AlgebraElement { element, .. } => {
            format!("algebra_element: {}; all diagrams validated", plural(element.len(), "term"))
        }
        Document::TypeD(d) => {
            d.check_structure_relation()?;
            let bounded = match d.is_bounded(crate::bound_cap()) {
                Ok(true) => "yes".to_string(),
                Ok(false) => "no".to_string(),
                Err(e) => format!("not determined ({e})"),
            };
            format!(
                "type_d: {}, {}; structure relation holds; bounded: {bounded}",
                plural(d.len(), "generator"),
                plural(d.arrows.len(), "arrow")
            )
        }
        Document::TypeA(m) => {
            check_ainfty(m, arity)?;
            format!(
                "type_a: {}, {}; A∞ relation holds through {} inputs",
                plural(m.len(), "generator"),
                plural(m.ops.len(), "stored operation"),
                arity
            )
        }
        Document::BimoduleDA(b) => {
            b.validate()?;
            format!(
                "da_bimodule: {}, {}; validated",
                plural(b.labels.len(), "generator"),
                plural(b.entries.len(), "entry")
            )
        }
        Document::BimoduleDD(dd) => {
            dd.check_dd_relation()?;
            format!(
                "dd_bimodule: {}, {}; structure relation holds",
                plural(dd.labels.len(), "generator"),
                plural(dd.arrows.len(), "arrow")
            )
        }
        Document::Complex(c) => {
            c.verify_d_squared()?;
            format!(
                "chain_complex: dimension {}; d²=0; homology dimension {}",
                c.len(),
                c.homology_dim()
            )
        }
    };
    Ok((format!("{line}\n"), 0))
}

fn cmd_simplify(input: &str, dump: Option<PathBuf>) -> Result<(String, i32)> {
    let d = load_ref(input)?.into_type_d()?;
    let s = d.simplify()?;
    let mut report = String::new();
    let _ = writeln!(
        report,
        "before: {}, {}",
        plural(d.len(), "generator"),
        plural(d.arrows.len(), "arrow")
    );
    let _ = writeln!(
        report,
        "after: {}, {}",
        plural(s.len(), "generator"),
        plural(s.arrows.len(), "arrow")
    );
    let _ = writeln!(
        report,
        "provincial homology dimension: {}",
        s.provincial_complex().homology_dim()
    );
    dump_doc(&mut report, &Document::TypeD(s), dump)?;
    Ok((report, 0))
}

fn cmd_tensor(module: &str, structure: &str, dump: Option<PathBuf>) -> Result<(String, i32)> {
    let left = load_ref(module)?;
    let right = load_ref(structure)?;
    let mut report = String::new();
    let doc = match (left, right) {
        (Document::TypeA(m), Document::TypeD(d)) => {
            let c = box_ad(&m, &d)?;
            let _ = writeln!(
                report,
                "complex: dimension {}; homology dimension {}",
                c.len(),
                c.homology_dim()
            );
            Document::Complex(c)
        }
        (Document::BimoduleDA(b), Document::TypeD(d)) => {
            let p = box_da_d(&b, &d)?;
            let _ = writeln!(report, "{}", type_d_report(&p));
            Document::TypeD(p)
        }
        (Document::TypeA(m), Document::BimoduleDD(dd)) => {
            let p = box_a_dd(&m, &dd)?;
            let _ = writeln!(report, "{}", type_d_report(&p));
            Document::TypeD(p)
        }
        (l, r) => {
            return Err(HfrError::UsageError(format!(
                "no box product pairs {} with {}; supported: type_a ⊠ type_d, \
                 da_bimodule ⊠ type_d, type_a ⊠ dd_bimodule",
                l.kind(),
                r.kind()
            )))
        }
    };
    dump_doc(&mut report, &doc, dump)?;
    Ok((report, 0))
}

fn cmd_mor(from: &str, to: &str) -> Result<(String, i32)> {
    let d1 = load_ref(from)?.into_type_d()?;
    let d2 = load_ref(to)?.into_type_d()?;
    let c = mor_to_d(&d1, &d2)?;
    Ok((
        format!(
            "mor complex: dimension {}; homology dimension {}\n",
            c.len(),
            c.homology_dim()
        ),
        0,
    ))
}

fn cmd_satellite(
    pattern: &str,
    det: u64,
    tau: i64,
    compare_oracle: bool,
) -> Result<(String, i32)> {
    let pattern: Pattern = pattern.parse()?;
    let knot = AlternatingKnotData::new(det, tau)?;
    let dim = hfr_satellite_dim(pattern, &knot)?;
    let mut report = format!("dim HFR = {dim}\n");
    let mut code = 0;
    if compare_oracle {
        let oracle = match pattern {
            Pattern::Whitehead => oracle_hfr_whitehead(&knot),
            Pattern::Cable21 => oracle_hfr_cable(&knot),
        };
        if oracle == dim {
            let _ = writeln!(report, "oracle: {oracle} (agree)");
        } else {
            let _ = writeln!(report, "oracle: {oracle} (MISMATCH)");
            code = 1;
        }
    }
    Ok((report, code))
}

fn cmd_fixtures(
    list: bool,
    name: Option<String>,
    dump: Option<PathBuf>,
) -> Result<(String, i32)> {
    let mut report = String::new();
    if list {
        for n in fixture_names() {
            let _ = writeln!(report, "{n}");
        }
        return Ok((report, 0));
    }
    let Some(name) = name else {
        return Err(HfrError::UsageError(
            "pass --list, or --name NAME to inspect one fixture".into(),
        ));
    };
    let found = fixture(&name).ok_or_else(|| {
        HfrError::UsageError(format!(
            "unknown fixture `{name}`; for staircases substitute an integer, \
             e.g. staircase_d:-2"
        ))
    })?;
    let doc = match found {
        Fixture::TypeD(d) => {
            let _ = writeln!(report, "type_d fixture {name}: {}", type_d_report(&d));
            Document::TypeD(d)
        }
        Fixture::TypeA(m) => {
            let _ = writeln!(
                report,
                "type_a fixture {name}: {}, {}",
                plural(m.len(), "generator"),
                plural(m.ops.len(), "stored operation")
            );
            Document::TypeA(m)
        }
    };
    dump_doc(&mut report, &doc, dump)?;
    Ok((report, 0))
}

fn cmd_reproduce(all: bool, check: Option<String>, list: bool) -> Result<(String, i32)> {
    let mut report = String::new();
    if list {
        for n in check_names() {
            let _ = writeln!(report, "{n}");
        }
        return Ok((report, 0));
    }
    let outcomes = if all {
        run_all()
    } else if let Some(name) = check {
        vec![run_check(&name).ok_or_else(|| {
            HfrError::UsageError(format!(
                "unknown check `{name}`; see `hfr reproduce --list`"
            ))
        })?]
    } else {
        return Err(HfrError::UsageError(
            "pass --all, --check NAME, or --list".into(),
        ));
    };
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut failed = 0usize;
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        let _ = writeln!(report, "{verdict}  {:<width$}  {}", o.name, o.detail);
    }
    let _ = writeln!(
        report,
        "{}: {} passed, {failed} failed",
        plural(outcomes.len(), "check"),
        outcomes.len() - failed
    );
    Ok((report, if failed == 0 { 0 } else { 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_to_string(args: &[&str]) -> (String, i32) {
        let argv: Vec<String> =
            std::iter::once("hfr").chain(args.iter().copied()).map(String::from).collect();
        let mut out = Vec::new();
        let code = run(&argv, &mut out);
        (String::from_utf8(out).unwrap(), code)
    }

    #[test]
    fn az_genus_one_report_is_the_worked_line() {
        let (report, code) = run_to_string(&["az", "--pmc", "split:1", "--side", "az"]);
        assert_eq!(code, 0);
        assert_eq!(report, "2 generators, 1 arrow: ρ̃₂ —ρ₁→ ρ̃₁₂₃\n");
    }

    #[test]
    fn azbar_genus_one_report_names_the_star_generators() {
        let (report, code) = run_to_string(&["az", "--pmc", "split:1", "--side", "azbar"]);
        assert_eq!(code, 0);
        assert_eq!(report, "2 generators, 1 arrow: ρ₁₂₃* —ρ₃→ ρ₂*\n");
    }

    #[test]
    fn satellite_whitehead_small_case() {
        let (report, code) =
            run_to_string(&["satellite", "--pattern", "whitehead", "--det", "3", "--tau", "1"]);
        assert_eq!(code, 0);
        assert_eq!(report, "dim HFR = 7\n");
    }

    #[test]
    fn satellite_oracle_comparison_agrees() {
        let (report, code) = run_to_string(&[
            "satellite",
            "--pattern",
            "cable21",
            "--det",
            "7",
            "--tau",
            "-1",
            "--compare-oracle",
        ]);
        assert_eq!(code, 0);
        assert!(report.ends_with("(agree)\n"), "{report}");
    }

    #[test]
    fn satellite_rejects_invalid_invariants() {
        let (report, code) =
            run_to_string(&["satellite", "--pattern", "whitehead", "--det", "4", "--tau", "0"]);
        assert_eq!(code, 1);
        assert!(report.starts_with("error: InvariantViolation"), "{report}");
    }

    #[test]
    fn fixtures_list_contains_every_name() {
        let (report, code) = run_to_string(&["fixtures", "--list"]);
        assert_eq!(code, 0);
        for name in fixture_names() {
            assert!(report.lines().any(|l| l == name), "missing {name}");
        }
    }

    #[test]
    fn check_accepts_fixture_references() {
        let (report, code) = run_to_string(&["check", "--input", "fixture:thick_torus"]);
        assert_eq!(code, 0, "{report}");
        assert!(report.contains("structure relation holds"), "{report}");
    }

    #[test]
    fn tensor_pairs_fixture_module_with_fixture_structure() {
        let (report, code) = run_to_string(&[
            "tensor",
            "--module",
            "fixture:staircase_a:1",
            "--structure",
            "fixture:whitehead_framed",
            "--dump",
            "/tmp/hfr-cli-test-tensor.hfr.json",
        ]);
        assert_eq!(code, 0, "{report}");
        assert!(report.contains("homology dimension 7"), "{report}");
        std::fs::remove_file("/tmp/hfr-cli-test-tensor.hfr.json").ok();
    }

    #[test]
    fn dump_then_check_round_trip() {
        let path = "/tmp/hfr-cli-test-az.hfr.json";
        let (_, code) =
            run_to_string(&["az", "--pmc", "split:2", "--side", "small", "--dump", path]);
        assert_eq!(code, 0);
        let (report, code) = run_to_string(&["check", "--input", path]);
        assert_eq!(code, 0, "{report}");
        assert!(report.contains("8 generators"), "{report}");
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn identical_invocations_are_byte_identical() {
        let (a, _) = run_to_string(&["az", "--pmc", "split:2", "--side", "az"]);
        let (b, _) = run_to_string(&["az", "--pmc", "split:2", "--side", "az"]);
        assert_eq!(a, b);
        let (la, _) = run_to_string(&["fixtures", "--list"]);
        let (lb, _) = run_to_string(&["fixtures", "--list"]);
        assert_eq!(la, lb);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        let (_, code) = run_to_string(&["az", "--pmc", "hexagonal:1"]);
        assert_eq!(code, 2);
        let (_, code) = run_to_string(&["reproduce"]);
        assert_eq!(code, 2);
        let (_, code) = run_to_string(&["no-such-command"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn reproduce_single_check_prints_one_row() {
        let (report, code) = run_to_string(&["reproduce", "--check", "thick-torus-splitting"]);
        assert_eq!(code, 0, "{report}");
        assert!(report.starts_with("PASS  thick-torus-splitting"), "{report}");
        assert!(report.ends_with("1 check: 1 passed, 0 failed\n"), "{report}");
    }

    #[test]
    fn mor_of_a_fixture_with_itself_reports_dimensions() {
        let (report, code) = run_to_string(&[
            "mor",
            "--from",
            "fixture:thick_torus",
            "--to",
            "fixture:thick_torus",
        ]);
        assert_eq!(code, 0, "{report}");
        assert!(report.starts_with("mor complex: dimension"), "{report}");
    }

    #[test]
    fn help_exits_cleanly() {
        let (report, code) = run_to_string(&["--help"]);
        assert_eq!(code, 0);
        assert!(report.contains("reproduce"));
    }
}
