//! The `ribbon` command line. Commands return their output and exit code so
//! they can be driven from tests without a process.
//!
//! Exit codes: 0 success, 1 negative verdict or failed checks, 2 unreadable
//! input, 3 failed precondition, 4 group too large for exhaustive search.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use crate::cocycle::{extend_to_circle, verify_cochain, CocycleError};
use crate::eta::{eta_knot, BoundingData, Character, EtaError};
use crate::format::{parse_document, to_json, Document, FormatError, Payload};
use crate::groups::{GroupError, GroupHom, DEFAULT_AUT_BOUND};
use crate::laurent::{module_isomorphic, AlexanderError, FiniteLaurentModule, LaurentPoly, TorsionPath};
use crate::moves::{check_exactness, random_move_corpus, verify_move_invariance, CorpusBounds, MoveError, MoveTriple};
use crate::pairing::{fl_equivalent, FarberLevineStructure, TorsionPairing};
use crate::seifert::{farber_levine, KnotName, SeifertError};

#[derive(Parser, Debug)]
#[command(name = "ribbon", version, about = "Ribbon-move invariants of 2-knots from Seifert data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Alexander torsion, the action of t, and the linking pairing.
    Invariants {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_AUT_BOUND)]
        max_aut: u64,
    },
    /// Compare two bundles, modules or pairing structures.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_AUT_BOUND)]
        max_aut: u64,
    },
    /// Defect invariant for every nontrivial eigenvalue index.
    Eta {
        file: PathBuf,
        /// `d:v1,v2,...`, values on the generators of H1(V).
        #[arg(long)]
        character: String,
        #[arg(long)]
        bounding: Option<PathBuf>,
        #[arg(long)]
        obstruction: bool,
    },
    /// Check one move triple.
    MoveCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long, default_value_t = DEFAULT_AUT_BOUND)]
        max_aut: u64,
    },
    /// Extend a circle-valued map over a complex.
    Cocycle {
        file: PathBuf,
        /// Comma-separated degrees on the distinguished cycles.
        #[arg(long, allow_hyphen_values = true)]
        degrees: Option<String>,
    },
    /// Run the random move corpus through every check.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Where counterexamples are written.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_AUT_BOUND)]
        max_aut: u64,
    },
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn verdict(pass: bool, stdout: String) -> Self {
        Outcome { code: if pass { 0 } else { 1 }, stdout, stderr: String::new() }
    }
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    Precondition(String),
    TooLarge(String),
}

impl CliError {
    fn into_outcome(self) -> Outcome {
        let (code, msg) = match self {
            CliError::Parse(m) => (2, m),
            CliError::Precondition(m) => (3, m),
            CliError::TooLarge(m) => (4, m),
        };
        Outcome { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::TooLarge { .. } => CliError::TooLarge(e.to_string()),
            e => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<AlexanderError> for CliError {
    fn from(e: AlexanderError) -> Self {
        match e {
            AlexanderError::Group(g) => g.into(),
            e => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<SeifertError> for CliError {
    fn from(e: SeifertError) -> Self {
        match e {
            SeifertError::Group(g) => g.into(),
            SeifertError::Alexander(a) => a.into(),
            e => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<MoveError> for CliError {
    fn from(e: MoveError) -> Self {
        match e {
            MoveError::Group(g) => g.into(),
            MoveError::Alexander(a) => a.into(),
            MoveError::Seifert(s) => s.into(),
            e => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<EtaError> for CliError {
    fn from(e: EtaError) -> Self {
        match e {
            EtaError::Seifert(s) => s.into(),
            e => CliError::Precondition(e.to_string()),
        }
    }
}

/// Parse arguments (including the program name) and run.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.command {
        Command::Invariants { file, max_aut } => cmd_invariants(&file, max_aut),
        Command::Compare { a, b, max_aut } => cmd_compare(&a, &b, max_aut),
        Command::Eta { file, character, bounding, obstruction } => {
            cmd_eta(&file, &character, bounding.as_deref(), obstruction)
        }
        Command::MoveCheck { file, window, max_aut } => cmd_move_check(&file, window, max_aut),
        Command::Cocycle { file, degrees } => cmd_cocycle(&file, degrees.as_deref()),
        Command::Selftest { seed, count, out, max_aut } => cmd_selftest(seed, count, &out, max_aut),
    };
    result.unwrap_or_else(CliError::into_outcome)
}

fn load(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn tau_text(m: &FiniteLaurentModule) -> String {
    let g = m.group();
    if g.ngens() == 1 {
        let d = g.modulus(0);
        let v = m.tau().matrix().get(0, 0).clone();
        let v = if &v * 2 > d { v - d } else { v };
        v.to_string()
    } else {
        m.tau().matrix().to_string()
    }
}

fn pairing_text(p: &TorsionPairing) -> String {
    if p.table().iter().flatten().all(|q| q.is_zero()) {
        return "pairing trivial".into();
    }
    if p.group().ngens() == 1 {
        return format!("λ(g,g) = {}", p.table()[0][0]);
    }
    let rows: Vec<String> = p
        .table()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("λ = [{}]", rows.join(", "))
}

fn describe_module(out: &mut String, m: &FiniteLaurentModule) {
    let inv = m.invariants();
    writeln!(out, "τ order: {}", inv.tau_order).unwrap();
    for (p, coeffs) in &inv.charpolys {
        let poly = LaurentPoly::from_terms(coeffs.iter().enumerate().map(|(k, c)| (k as i64, BigInt::from(*c))));
        writeln!(out, "charpoly(τ) mod {p}: {poly}").unwrap();
    }
}

fn describe_structure(out: &mut String, s: &FarberLevineStructure) {
    let m = s.module();
    if m.group().is_trivial() {
        writeln!(out, "Tor = 0; pairing trivial").unwrap();
        return;
    }
    writeln!(out, "Tor = {}; τ = {}; {}", m.group(), tau_text(m), pairing_text(s.pairing())).unwrap();
    describe_module(out, m);
    writeln!(out, "pairing table: {}", table_text(s.pairing())).unwrap();
    let inv = if s.is_tau_invariant() { "yes" } else { "no" };
    writeln!(out, "λ τ-invariant: {inv}").unwrap();
}

fn table_text(p: &TorsionPairing) -> String {
    let rows: Vec<String> = p
        .table()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn path_text(p: TorsionPath) -> String {
    match p {
        TorsionPath::Exact => "exact".into(),
        TorsionPath::Window(n) => format!("window N={n}"),
    }
}

fn header(out: &mut String, name: &KnotName) {
    if name.description.is_empty() {
        writeln!(out, "{}", name.id).unwrap();
    } else {
        writeln!(out, "{}: {}", name.id, name.description).unwrap();
    }
}

fn cmd_invariants(file: &Path, _max_aut: u64) -> Result<Outcome, CliError> {
    let doc = load(file)?;
    let mut out = String::new();
    header(&mut out, &doc.name);
    match &doc.payload {
        Payload::SeifertBundle(b) => {
            let fl = farber_levine(b)?;
            writeln!(out, "path: {}", path_text(fl.path)).unwrap();
            describe_structure(&mut out, &fl.structure);
        }
        Payload::FlStructure(s) => describe_structure(&mut out, s),
        Payload::LaurentModule(m) => {
            if m.group().is_trivial() {
                writeln!(out, "Tor = 0").unwrap();
            } else {
                writeln!(out, "Tor = {}; τ = {}", m.group(), tau_text(m)).unwrap();
                describe_module(&mut out, m);
            }
        }
        _ => return Err(CliError::Parse("invariants needs a seifert_bundle, laurent_module or fl_structure".into())),
    }
    Ok(Outcome::ok(out))
}

enum Comparable {
    Module(FiniteLaurentModule),
    Structure(FarberLevineStructure),
}

fn comparable(doc: &Document) -> Result<Comparable, CliError> {
    match &doc.payload {
        Payload::SeifertBundle(b) => Ok(Comparable::Structure(farber_levine(b)?.structure)),
        Payload::FlStructure(s) => Ok(Comparable::Structure(s.clone())),
        Payload::LaurentModule(m) => Ok(Comparable::Module(m.clone())),
        _ => Err(CliError::Parse("compare needs seifert_bundle, laurent_module or fl_structure files".into())),
    }
}

fn witness_line(out: &mut String, f: &GroupHom) {
    writeln!(out, "witness = {}", f.matrix()).unwrap();
}

fn cmd_compare(a: &Path, b: &Path, max_aut: u64) -> Result<Outcome, CliError> {
    let x = comparable(&load(a)?)?;
    let y = comparable(&load(b)?)?;
    let mut out = String::new();
    let found = match (x, y) {
        (Comparable::Structure(s), Comparable::Structure(t)) => {
            let w = fl_equivalent(&s, &t, max_aut)?;
            writeln!(out, "{}", if w.is_some() { "EQUIVALENT" } else { "NOT EQUIVALENT" }).unwrap();
            w
        }
        (x, y) => {
            let module = |c: Comparable| match c {
                Comparable::Module(m) => m,
                Comparable::Structure(s) => s.module().clone(),
            };
            let (m, n) = (module(x), module(y));
            let w = module_isomorphic(&m, &n, max_aut)?;
            writeln!(out, "{}", if w.is_some() { "ISOMORPHIC" } else { "NOT ISOMORPHIC" }).unwrap();
            w
        }
    };
    if let Some(f) = &found {
        witness_line(&mut out, f);
    }
    Ok(Outcome::verdict(found.is_some(), out))
}

/// `d:v1,v2,...`
pub fn parse_character_arg(text: &str) -> Result<(u64, Vec<i64>), String> {
    let (d, vals) = text.split_once(':').unwrap_or((text, ""));
    let d: u64 = d.trim().parse().map_err(|_| format!("bad character modulus in {text:?}"))?;
    let vals = vals
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|_| format!("bad character value {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((d, vals))
}

fn cmd_eta(file: &Path, character: &str, bounding: Option<&Path>, obstruction: bool) -> Result<Outcome, CliError> {
    let doc = load(file)?;
    let Payload::SeifertBundle(bundle) = &doc.payload else {
        return Err(CliError::Parse("eta needs a seifert_bundle".into()));
    };
    let (d, vals) = parse_character_arg(character).map_err(CliError::Parse)?;
    let nu = Character::new(bundle.h1_v.clone(), d, &vals)?;
    let bd = match bounding {
        Some(p) => match load(p)?.payload {
            Payload::BoundingData(b) => b,
            _ => return Err(CliError::Parse(format!("{}: expected bounding_data", p.display()))),
        },
        None if bundle.h1_v.is_trivial() && bundle.h1_y.is_trivial() => BoundingData::trivial(d as usize),
        None => return Err(CliError::Precondition("bounding data required (--bounding)".into())),
    };
    let mut out = String::new();
    header(&mut out, &doc.name);
    writeln!(out, "character: Z/{d}, values {:?}", nu.values()).unwrap();
    let mut all_zero = true;
    for k in 1..d as usize {
        let v = eta_knot(bundle, &nu, &bd, k)?;
        all_zero &= v.is_zero();
        writeln!(out, "k={k}: eta = {v}").unwrap();
    }
    if !obstruction {
        return Ok(Outcome::ok(out));
    }
    if all_zero {
        writeln!(out, "obstruction: PASS (all values vanish)").unwrap();
    } else {
        writeln!(out, "obstruction: FAIL").unwrap();
        writeln!(out, "not ribbon-move equivalent to trivial").unwrap();
    }
    Ok(Outcome::verdict(all_zero, out))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Default)]
struct TripleChecks {
    module: bool,
    pairing: bool,
    exact: bool,
}

impl TripleChecks {
    fn passed(&self) -> bool {
        self.module && self.pairing && self.exact
    }
}

/// Check one triple, appending a report.
fn check_triple(out: &mut String, t: &MoveTriple, window: usize, max_aut: u64) -> Result<TripleChecks, CliError> {
    let r = verify_move_invariance(t, max_aut)?;
    let w = |f: &Option<GroupHom>| f.as_ref().map_or("NONE (counterexample)".to_string(), |f| f.matrix().to_string());
    writeln!(out, "Tor(<) = {}; Tor(>) = {}", r.lt.structure.module().group(), r.gt.structure.module().group()).unwrap();
    writeln!(out, "module witness: {}", w(&r.module_witness)).unwrap();
    writeln!(out, "pairing witness: {}", w(&r.fl_witness)).unwrap();
    let mut checks = TripleChecks { module: r.module_witness.is_some(), pairing: r.fl_witness.is_some(), exact: true };
    for (label, child) in [("<", &t.child_lt), (">", &t.child_gt)] {
        let c = check_exactness(child, window)?;
        writeln!(
            out,
            "exactness ({label}, N={window}): surjective {}, image in kernel {}, rationally injective {}",
            yes(c.surjective),
            yes(c.image_in_kernel),
            yes(c.rationally_injective)
        )
        .unwrap();
        checks.exact &= c.passed();
    }
    Ok(checks)
}

fn cmd_move_check(file: &Path, window: usize, max_aut: u64) -> Result<Outcome, CliError> {
    let doc = load(file)?;
    let Payload::MoveTriple(t) = &doc.payload else {
        return Err(CliError::Parse("move-check needs a move_triple".into()));
    };
    let mut out = String::new();
    header(&mut out, &doc.name);
    let pass = check_triple(&mut out, t, window, max_aut)?.passed();
    writeln!(out, "{}", if pass { "PASS" } else { "FAIL" }).unwrap();
    Ok(Outcome::verdict(pass, out))
}

fn int_list(v: &[BigInt]) -> String {
    format!("[{}]", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn cmd_cocycle(file: &Path, degrees: Option<&str>) -> Result<Outcome, CliError> {
    let doc = load(file)?;
    let Payload::CellComplex { complex, degrees: stored } = &doc.payload else {
        return Err(CliError::Parse("cocycle needs a cell_complex".into()));
    };
    let degrees: Vec<BigInt> = match degrees {
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<BigInt>().map_err(|_| CliError::Parse(format!("bad degree {x:?}"))))
            .collect::<Result<_, _>>()?,
        None => stored.clone().ok_or_else(|| CliError::Parse("no degrees in file or on the command line".into()))?,
    };
    let mut out = String::new();
    header(&mut out, &doc.name);
    match extend_to_circle(complex, &degrees) {
        Ok(phi) => {
            let rep = verify_cochain(complex, &phi).map_err(|e| CliError::Precondition(e.to_string()))?;
            writeln!(out, "phi = {}", int_list(&phi)).unwrap();
            writeln!(out, "verify: {}; periods {}", if rep.passed() { "pass" } else { "fail" }, int_list(&rep.periods))
                .unwrap();
            Ok(Outcome::verdict(rep.passed(), out))
        }
        Err(CocycleError::NoExtension) => {
            writeln!(out, "NO EXTENSION for degrees {}", int_list(&degrees)).unwrap();
            Ok(Outcome::verdict(false, out))
        }
        Err(e) => Err(CliError::Precondition(e.to_string())),
    }
}

fn cmd_selftest(seed: u64, count: usize, out_dir: &Path, max_aut: u64) -> Result<Outcome, CliError> {
    let corpus = random_move_corpus(seed, count, &CorpusBounds::default());
    let mut out = String::new();
    writeln!(out, "selftest seed={seed} count={count}").unwrap();
    let (mut modules, mut pairings, mut exact) = (0, 0, 0);
    let mut failed = vec![];
    for (i, t) in corpus.iter().enumerate() {
        let mut detail = String::new();
        let checks = match check_triple(&mut detail, t, 4, max_aut) {
            Ok(c) => c,
            Err(e) => {
                writeln!(detail, "error: {}", e.into_outcome().stderr.trim_start_matches("error: ").trim_end()).unwrap();
                TripleChecks::default()
            }
        };
        modules += usize::from(checks.module);
        pairings += usize::from(checks.pairing);
        exact += usize::from(checks.exact);
        if checks.passed() {
            continue;
        }
        failed.push(i);
        let doc = Document {
            name: KnotName::new(format!("selftest-{seed}-{i}"), detail.trim_end().replace('\n', "; ")),
            payload: Payload::MoveTriple(t.clone()),
        };
        let path = out_dir.join(format!("counterexample_seed{seed}_{i}.json"));
        let written = to_json(&doc)
            .map_err(|e| e.to_string())
            .and_then(|s| std::fs::write(&path, s).map_err(|e| e.to_string()));
        match written {
            Ok(()) => writeln!(out, "triple {i}: FAIL, written to {}", path.display()).unwrap(),
            Err(e) => writeln!(out, "triple {i}: FAIL, could not write counterexample: {e}").unwrap(),
        }
    }
    writeln!(out, "module witnesses: {modules}/{count}").unwrap();
    writeln!(out, "pairing witnesses: {pairings}/{count}").unwrap();
    writeln!(out, "exactness: {exact}/{count}").unwrap();
    writeln!(out, "{}", if failed.is_empty() { "PASS" } else { "FAIL" }).unwrap();
    Ok(Outcome::verdict(failed.is_empty(), out))
}
