//! The `uicrit` command-line front end.
//!
//! Exit codes: 0 success or passing verdicts, 1 failing verdict or
//! evaluation error, 2 usage or model-loading error, 3 inconclusive.

pub mod grid;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::family::{diagnose, sandwich_bounds, Criterion, DiagnoseConfig, FamilyOfRVs, Horizons, MeasureContext, Profile};
use crate::fmt::shortest;
use crate::modelspec::{load_model, plugin_model, ModelFile};
use crate::poussin::{check_sufficiency_witness, find_thresholds, verify_phi, DEFAULT_K, DEFAULT_SEARCH_CAP};
use crate::prob::EvalResult;
use crate::sublinear::axioms::axiom_report;
use crate::sublinear::SublinearExpectation;

pub use grid::{integer_levels, parse_grid, GridError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const DEFAULT_SEED: u64 = 20_240_601;
const DEFAULT_LEVELS: &str = "1:1024:11:log";

#[derive(Debug, Parser)]
#[command(name = "uicrit", version, about = "Uniform-integrability profiles and diagnostics for discrete models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate one criterion's profile over a level grid.
    Profile {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        #[arg(long, default_value = DEFAULT_LEVELS)]
        levels: String,
    },
    /// All profiles, cross-checks and per-criterion verdicts.
    Diagnose {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = DEFAULT_LEVELS)]
        levels: String,
        #[arg(long, default_value_t = 1e-6)]
        eps_stop: f64,
    },
    /// Search thresholds for φ and verify it.
    Phi {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        search_cap: u64,
        /// Levels for the sufficiency witness.
        #[arg(long, default_value = DEFAULT_LEVELS)]
        levels: String,
    },
    /// Randomized checks of the sublinear expectation axioms.
    Axioms {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// excess(m) <= tail series(m) <= excess(m - 1) for every member.
    Sandwich {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Integer start indices m >= 1.
        #[arg(long, default_value = "1:10:10:lin")]
        levels: String,
    },
}

#[derive(Debug, Args)]
struct Source {
    /// Model file (JSON); `.json` may be omitted.
    #[arg(long, conflicts_with = "plugin", required_unless_present = "plugin")]
    model: Option<PathBuf>,
    /// Built-in model, e.g. `remark-counterexample`.
    #[arg(long)]
    plugin: Option<String>,
    /// Family within the model; defaults to the first by name.
    #[arg(long)]
    family: Option<String>,
    /// Per-index measures materialized by a plugin for brute-force checks.
    #[arg(long, default_value_t = 1000)]
    n_max: u64,
}

#[derive(Debug, Args)]
struct Common {
    /// Last atom summed for countable measures.
    #[arg(long, default_value_t = Horizons::default().atoms)]
    horizon: u64,
    /// Last index of tail series.
    #[arg(long, default_value_t = Horizons::default().series)]
    series_horizon: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the model's seed, then a fixed constant.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn horizons(&self) -> Horizons {
        Horizons {
            atoms: self.horizon,
            series: self.series_horizon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CriterionArg {
    Ui,
    Wui,
    Wsui,
    Uni,
    Wuni,
    Wsuni,
    Sui,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Ui => Criterion::Ui,
            CriterionArg::Wui => Criterion::WUi,
            CriterionArg::Wsui => Criterion::WStarUi,
            CriterionArg::Uni => Criterion::Uni,
            CriterionArg::Wuni => Criterion::WUni,
            CriterionArg::Wsuni => Criterion::WStarUni,
            CriterionArg::Sui => Criterion::SUi,
        }
    }
}

/// A failed command: exit code plus diagnostic.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn eval(e: Error) -> Self {
        Self {
            code: EXIT_FAIL,
            message: e.to_string(),
        }
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        Failure::usage(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::eval(e)
    }
}

struct Output {
    text: String,
    code: i32,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    let out_path = match &cli.command {
        Command::Profile { common, .. }
        | Command::Diagnose { common, .. }
        | Command::Phi { common, .. }
        | Command::Axioms { common, .. }
        | Command::Sandwich { common, .. } => common.out.clone(),
    };
    match execute(cli.command) {
        Ok(out) => {
            let written = match out_path {
                Some(p) => std::fs::write(&p, out.text.as_bytes())
                    .map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => stdout.write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => out.code,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_FAIL
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn load(source: &Source) -> Result<ModelFile, Failure> {
    match (&source.model, &source.plugin) {
        (Some(path), None) => load_model(path).map_err(Failure::usage),
        (None, Some(name)) => plugin_model(name, source.n_max).map_err(Failure::usage),
        _ => Err(Failure::usage("give exactly one of --model, --plugin")),
    }
}

fn family<'m>(model: &'m ModelFile, source: &Source) -> Result<&'m FamilyOfRVs, Failure> {
    model.family(source.family.as_deref()).map_err(Failure::usage)
}

fn execute(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Profile {
            source,
            common,
            criterion,
            levels,
        } => {
            let levels = parse_grid(&levels)?;
            let criterion = Criterion::from(criterion);
            if criterion.integer_levels() {
                integer_levels(&levels)?;
            }
            let model = load(&source)?;
            let f = family(&model, &source)?;
            let p = f.profile(criterion, &levels, &common.horizons())?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => profile_csv(&p),
                Format::Text => profile_text(&p),
            };
            Ok(Output { text, code: EXIT_OK })
        }
        Command::Diagnose {
            source,
            common,
            levels,
            eps_stop,
        } => {
            let levels = parse_grid(&levels)?;
            if !(eps_stop > 0.0) {
                return Err(Failure::usage(format!("--eps-stop {eps_stop} must be positive")));
            }
            let model = load(&source)?;
            let f = family(&model, &source)?;
            let cfg = DiagnoseConfig {
                levels,
                horizons: common.horizons(),
                eps_stop,
            };
            let report = diagnose(f, &cfg)?;
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Csv => diagnose_csv(&report),
                Format::Text => diagnose_text(&model, f, &report),
            };
            Ok(Output {
                text,
                code: report.exit_code(),
            })
        }
        Command::Phi {
            source,
            common,
            k,
            search_cap,
            levels,
        } => {
            if k == 0 {
                return Err(Failure::usage("--k must be at least 1"));
            }
            let levels = parse_grid(&levels)?;
            let model = load(&source)?;
            let f = family(&model, &source)?;
            let h = common.horizons();
            let phi = find_thresholds(f, k, search_cap, &h)?;
            let report = verify_phi(f, &phi, &h)?;
            let witness = check_sufficiency_witness(f, &phi, &levels, &h)?;
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Csv => phi_csv(phi.thresholds(), &report, &witness),
                Format::Text => phi_text(phi.thresholds(), &report, &witness),
            };
            let code = if report.minimal == Some(false) || !report.growth_monotone {
                EXIT_FAIL
            } else {
                EXIT_OK
            };
            Ok(Output { text, code })
        }
        Command::Axioms {
            source,
            common,
            trials,
            tol,
        } => {
            if trials == 0 {
                return Err(Failure::usage("--trials must be at least 1"));
            }
            let model = load(&source)?;
            let f = family(&model, &source)?;
            let e = match f.context() {
                MeasureContext::Classical(p) => SublinearExpectation::singleton(p.clone()),
                MeasureContext::Sublinear(e) => e.clone(),
            };
            let seed = common.seed.or(model.meta.seed).unwrap_or(DEFAULT_SEED);
            let report = axiom_report(&e, trials, seed, tol)?;
            let mut text = String::new();
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    text.push_str("axiom,trials,max_violation,violations\n");
                    for s in &report.stats {
                        let _ = writeln!(text, "{},{},{},{}", s.axiom, s.trials, shortest(s.max_violation), s.violations);
                    }
                }
                Format::Text => {
                    let _ = writeln!(text, "seed {seed}, tolerance {}, {} atoms", shortest(tol), report.atoms);
                    for s in &report.stats {
                        let _ = writeln!(
                            text,
                            "{:<22} trials {:>6}  max violation {:<12} violations {}",
                            s.axiom,
                            s.trials,
                            shortest(s.max_violation),
                            s.violations
                        );
                        if let Some(w) = &s.witness {
                            let _ = writeln!(text, "  witness: {w}");
                        }
                    }
                }
            }
            let code = if report.total_violations() == 0 { EXIT_OK } else { EXIT_FAIL };
            Ok(Output { text, code })
        }
        Command::Sandwich { source, common, levels } => {
            let ms = integer_levels(&parse_grid(&levels)?)?;
            if ms.first() == Some(&0) {
                return Err(Failure::usage("sandwich levels start at m = 1"));
            }
            let model = load(&source)?;
            let f = family(&model, &source)?;
            let h = common.horizons();
            let format = common.format.unwrap_or(Format::Csv);
            let mut text = String::new();
            match format {
                Format::Csv => text.push_str("member,m,excess_m,tail_sum_m,excess_m_minus_1\n"),
                Format::Text => {
                    let _ = writeln!(text, "{:<7} {:>6}  {:<24} {:<24} {:<24}", "member", "m", "excess(m)", "tail sum(m)", "excess(m-1)");
                }
            }
            for (i, x) in f.members().iter().enumerate() {
                for &m in &ms {
                    let s = sandwich_bounds(x, f.context(), m, &h)?;
                    match format {
                        Format::Csv => {
                            let _ = writeln!(text, "{i},{m},{},{},{}", shortest(s.lo.value), shortest(s.mid.value), shortest(s.hi.value));
                        }
                        Format::Text => {
                            let _ = writeln!(
                                text,
                                "{i:<7} {m:>6}  {:<24} {:<24} {:<24}",
                                shortest(s.lo.value),
                                shortest(s.mid.value),
                                shortest(s.hi.value)
                            );
                        }
                    }
                }
            }
            Ok(Output { text, code: EXIT_OK })
        }
    }
}

fn horizon_field(r: &EvalResult) -> String {
    r.horizon_used.map(|h| h.to_string()).unwrap_or_default()
}

fn profile_csv(p: &Profile) -> String {
    let mut s = String::from("level,value,certificate,horizon\n");
    for pt in &p.points {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            shortest(pt.level),
            shortest(pt.result.value),
            pt.result.certificate,
            horizon_field(&pt.result)
        );
    }
    s
}

fn profile_text(p: &Profile) -> String {
    let mut s = format!("{} profile ({:?} over the family)\n", p.criterion, p.direction);
    let _ = writeln!(s, "{:<14} {:<24} {:<16} horizon", "level", "value", "certificate");
    for pt in &p.points {
        let _ = writeln!(
            s,
            "{:<14} {:<24} {:<16} {}",
            shortest(pt.level),
            shortest(pt.result.value),
            pt.result.certificate.to_string(),
            horizon_field(&pt.result)
        );
    }
    s
}

fn diagnose_csv(r: &crate::family::DiagnosticsReport) -> String {
    let mut s = String::from("criterion,verdict,level,value,certificate,horizon\n");
    for p in &r.profiles {
        let verdict = r.verdict(p.criterion).map(|v| v.as_str()).unwrap_or("");
        for pt in &p.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                p.criterion,
                verdict,
                shortest(pt.level),
                shortest(pt.result.value),
                pt.result.certificate,
                horizon_field(&pt.result)
            );
        }
    }
    s
}

fn diagnose_text(model: &ModelFile, f: &FamilyOfRVs, r: &crate::family::DiagnosticsReport) -> String {
    let mut s = String::new();
    if let Some(t) = &model.meta.title {
        let _ = writeln!(s, "model: {t}");
    }
    let context = if f.context().is_sublinear() { "upper expectation" } else { "single measure" };
    let _ = writeln!(s, "members: {}, {context} on {}", f.members().len(), f.space());
    let levels: Vec<String> = r.config.levels.iter().map(|&v| shortest(v)).collect();
    let _ = writeln!(s, "levels: {}", levels.join(" "));
    let _ = writeln!(
        s,
        "eps_stop: {}, atom horizon: {}, series horizon: {}",
        shortest(r.config.eps_stop),
        r.config.horizons.atoms,
        r.config.horizons.series
    );
    s.push_str("\nverdicts\n");
    for (c, v) in &r.verdicts {
        let _ = writeln!(s, "  {:<6} {v}", c.as_str());
    }
    for p in &r.profiles {
        let _ = writeln!(s, "\n{} ({:?})", p.criterion, p.direction);
        for pt in &p.points {
            let _ = writeln!(
                s,
                "  {:<12} {:<24} {}",
                shortest(pt.level),
                shortest(pt.result.value),
                pt.result.certificate
            );
        }
    }
    if !r.sandwich.is_empty() {
        s.push_str("\nsandwich: wui(m) <= series(m) <= wui(m-1)\n");
        for c in &r.sandwich {
            let _ = writeln!(
                s,
                "  m = {:<8} {:<24} {:<24} {}",
                c.m,
                shortest(c.wui_m.value),
                shortest(c.series_m.value),
                shortest(c.wui_m_minus_1.value)
            );
        }
    }
    s
}

fn thresholds_list(t: &[u64]) -> String {
    let items: Vec<String> = t.iter().map(u64::to_string).collect();
    format!("[{}]", items.join(","))
}

fn phi_csv(t: &[u64], r: &crate::poussin::PhiReport, w: &[crate::poussin::WitnessRow]) -> String {
    let mut s = String::from("table,key,value\n");
    for (k, n) in t.iter().enumerate() {
        let _ = writeln!(s, "threshold,{},{n}", k + 1);
    }
    for (k, term) in r.terms.iter().enumerate() {
        let _ = writeln!(s, "excess,{},{}", k + 1, shortest(term.value));
    }
    if let Some(b) = r.budget {
        let _ = writeln!(s, "budget,,{}", shortest(b));
    }
    let _ = writeln!(s, "sup_phi,,{}", shortest(r.sup_value.value));
    for (n, ratio) in &r.growth {
        let _ = writeln!(s, "growth,{n},{}", shortest(*ratio));
    }
    for row in w {
        let _ = writeln!(s, "witness_ui,{},{}", shortest(row.level), shortest(row.ui.value));
        if let Some(b) = row.bound {
            let _ = writeln!(s, "witness_bound,{},{}", shortest(row.level), shortest(b));
        }
    }
    s
}

fn phi_text(t: &[u64], r: &crate::poussin::PhiReport, w: &[crate::poussin::WitnessRow]) -> String {
    let mut s = format!("thresholds: {}\n", thresholds_list(t));
    if let Some(b) = r.budget {
        let _ = writeln!(s, "budget: {}", shortest(b));
    }
    let _ = writeln!(s, "sup E[phi(|X|)]: {} ({})", shortest(r.sup_value.value), r.sup_value.certificate);
    if let Some(m) = r.minimal {
        let _ = writeln!(s, "minimal: {m}");
    }
    let _ = writeln!(s, "\ngrowth phi(n)/n (nondecreasing: {})", r.growth_monotone);
    for (n, ratio) in &r.growth {
        let _ = writeln!(s, "  {n:<10} {}", shortest(*ratio));
    }
    s.push_str("\nsufficiency witness: ui(a) <= bound\n");
    for row in w {
        let bound = row.bound.map(shortest).unwrap_or_else(|| "skipped".into());
        let _ = writeln!(s, "  {:<12} {:<24} {bound}", shortest(row.level), shortest(row.ui.value));
    }
    s
}
