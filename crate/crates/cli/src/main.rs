use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fitzgerald::corpus::{self, CorpusSpec};
use fitzgerald::hom::endomorphisms_with_limit;
use fitzgerald::karoubi::{is_idempotent_completion, karoubi_audit, karoubi_envelope};
use fitzgerald::presentation::{parse_presentation, realize_with_budget, PresentationError};
use fitzgerald::props::{bridge_audit, full_report_with, PropsConfig};
use fitzgerald::search::{
    find_counterexamples, find_ri_gap_witness, GapBudget, GapOutcome, Predicate, SearchConfig,
    SearchEvent,
};
use fitzgerald::{FiniteAlgebra, FiniteMonoid};

const EXIT_INPUT: u8 = 1;
const EXIT_COUNTEREXAMPLE: u8 = 2;
const EXIT_BOUND: u8 = 3;
const EXIT_TRANSFER: u8 = 4;

/// Decide FitzGerald's retract properties for finite algebras and monoids.
#[derive(Parser)]
#[command(name = "fitzgerald", version)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Carrier-size limit for endomorphism enumeration.
    #[arg(long, global = true, default_value_t = fitzgerald::hom::DEFAULT_ENDO_LIMIT)]
    limit_endo: usize,
    /// Seed for the randomized ri-gap search.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Property report for an algebra. Exits 2 on a FitzGerald counterexample.
    Report { algebra: String },
    /// Endomorphism monoid of an algebra.
    Endo { algebra: String },
    /// Reports for A and for the canonical right set of End(A), side by side.
    Bridge { algebra: String },
    /// Realize a monoid presentation (`gens | u = v ; ...`, or `@FILE`).
    Presentation {
        presentation: String,
        #[arg(long, default_value_t = 64)]
        max_elements: usize,
        #[arg(long, default_value_t = 8)]
        max_word_length: usize,
        /// Rewrite rules completion may produce.
        #[arg(long, default_value_t = fitzgerald::presentation::DEFAULT_REWRITE_BUDGET)]
        rewrite_budget: usize,
    },
    /// Karoubi envelope of End(A) against the category of retracts of A.
    Karoubi { algebra: String },
    /// Enumerate small monoids and filter for counterexamples, or hunt for
    /// (RI) non-transfer witnesses.
    Search {
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = PredicateArg::Counterexample)]
        predicate: PredicateArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Per-order statistics on stderr.
        #[arg(long)]
        progress: bool,
        /// Permit order 7.
        #[arg(long)]
        long_running: bool,
        /// Candidate budget for the ri-gap search.
        #[arg(long, default_value_t = 200_000)]
        max_candidates: usize,
    },
    /// Print a corpus algebra as JSON, or list the small corpus.
    Corpus {
        spec: Option<String>,
        /// List every corpus algebra up to this size.
        #[arg(long)]
        list: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PredicateArg {
    Counterexample,
    RiGap,
}

macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*)?
    };
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

/// Loads `builtin:NAME`, `corpus:SPEC`, or a JSON file holding an algebra
/// or a monoid (taken as its canonical right set). The flag marks canonical
/// right sets, whose endomorphism search is cheap at any size.
fn load(source: &str) -> Result<(FiniteAlgebra, bool)> {
    if source.starts_with("builtin:") || source.starts_with("corpus:") {
        let spec = CorpusSpec::parse(source)?;
        let canonical = matches!(spec, CorpusSpec::CanonicalMset(_));
        return Ok((spec.generate()?, canonical));
    }
    let text = std::fs::read_to_string(Path::new(source))
        .with_context(|| format!("reading {source}"))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {source}"))?;
    if value.get("order").is_some() {
        let m = FiniteMonoid::from_json(&text)?;
        return Ok((corpus::gen_canonical_mset(&m), true));
    }
    Ok((FiniteAlgebra::from_json(&text)?, false))
}

fn endo_limit(cli: &Cli, a: &FiniteAlgebra, canonical: bool) -> usize {
    if canonical {
        cli.limit_endo.max(a.size())
    } else {
        cli.limit_endo
    }
}

fn config(limit: usize) -> PropsConfig {
    PropsConfig {
        endo_limit: limit,
        ..PropsConfig::default()
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    out!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Report { algebra } => {
            let (a, canonical) = load(algebra)?;
            let report = full_report_with(&a, &config(endo_limit(cli, &a, canonical)))?;
            if cli.json {
                out!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            Ok(if report.is_counterexample() {
                EXIT_COUNTEREXAMPLE
            } else {
                0
            })
        }
        Command::Endo { algebra } => {
            let (a, canonical) = load(algebra)?;
            let end = endomorphisms_with_limit(&a, endo_limit(cli, &a, canonical))?;
            if cli.json {
                out!("{}", end.monoid.to_json());
                return Ok(0);
            }
            out!("{} endomorphisms", end.len());
            for (i, f) in end.maps.iter().enumerate() {
                let mark = if f.is_idempotent() { "  idempotent" } else { "" };
                out!("  {:>3}  {}{}", i, f.render(&a), mark);
            }
            let m = &end.monoid;
            out!("composition table (row ∘ column):");
            for x in 0..m.order() {
                let row: Vec<String> = (0..m.order()).map(|y| m.mul(x, y).to_string()).collect();
                out!("  {}", row.join(" "));
            }
            Ok(0)
        }
        Command::Bridge { algebra } => {
            let (a, canonical) = load(algebra)?;
            let audit = bridge_audit(&a, &config(endo_limit(cli, &a, canonical)))?;
            if cli.json {
                print_json(&audit)?;
            } else {
                out!("End(A) has order {}", audit.monoid_order);
                out!("{:<8}{:<10}S-set", "", "A");
                let yn = |b: bool| if b { "yes" } else { "no" };
                for (p, x, y) in audit.matrix() {
                    out!("{:<8}{:<10}{}", p.to_string(), yn(x), yn(y));
                }
                out!(
                    "{:<8}{:<10}{}",
                    "commute",
                    yn(audit.algebra.idempotents_commute),
                    yn(audit.monoid_set.idempotents_commute)
                );
                for v in &audit.violations {
                    out!("violation: {} {:?}", v.property, v.direction);
                }
            }
            Ok(if audit.violations.is_empty() { 0 } else { EXIT_TRANSFER })
        }
        Command::Presentation {
            presentation,
            max_elements,
            max_word_length,
            rewrite_budget,
        } => {
            let text = match presentation.strip_prefix('@') {
                Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
                None => presentation.clone(),
            };
            let p = parse_presentation(&text)?;
            match realize_with_budget(&p, *max_elements, *max_word_length, *rewrite_budget) {
                Ok(r) => {
                    out!("{}", r.monoid.to_json());
                    Ok(0)
                }
                Err(PresentationError::BoundExceeded(d)) => {
                    if cli.json {
                        print_json(&d)?;
                    } else {
                        out!(
                            "not closed within bounds: {} elements, max word length {}",
                            d.elements_found, d.max_word_length
                        );
                        out!("growth by length: {:?}", d.growth);
                        out!("normal forms: {}", d.normal_forms.join(" "));
                    }
                    Ok(EXIT_BOUND)
                }
                Err(e @ PresentationError::RewriteBudgetExceeded { .. }) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_BOUND)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Karoubi { algebra } => {
            let (a, canonical) = load(algebra)?;
            let limit = endo_limit(cli, &a, canonical);
            let end = endomorphisms_with_limit(&a, limit)?;
            let env = karoubi_envelope(&end.monoid);
            let verdict = is_idempotent_completion(&env, &[0]);
            let audit = karoubi_audit(&a, limit)?;
            if cli.json {
                #[derive(Serialize)]
                struct Out<'a> {
                    objects: &'a [String],
                    completion: &'a fitzgerald::karoubi::CompletionVerdict,
                    audit: &'a fitzgerald::karoubi::KaroubiAudit,
                }
                print_json(&Out {
                    objects: env.objects(),
                    completion: &verdict,
                    audit: &audit,
                })?;
            } else {
                out!("envelope objects: {}", env.objects().join(" "));
                out!("idempotent completion of {{1}}: {}", verdict.holds());
                out!("retract objects: {}", audit.retract_objects);
                out!("{:<8}{:<8}{:>9}{:>9}", "from", "to", "envelope", "retracts");
                for r in &audit.rows {
                    out!("{:<8}{:<8}{:>9}{:>9}", r.source, r.target, r.envelope, r.retracts);
                }
                out!("consistent: {}", audit.consistent());
            }
            Ok(if audit.consistent() && verdict.holds() { 0 } else { EXIT_TRANSFER })
        }
        Command::Search {
            max_order,
            predicate,
            workers,
            progress,
            long_running,
            max_candidates,
        } => match predicate {
            PredicateArg::Counterexample => {
                let cfg = SearchConfig {
                    max_order: *max_order,
                    predicate: Predicate::Counterexample,
                    workers: *workers,
                    long_running: *long_running,
                };
                let stdout = std::io::stdout();
                let mut out = stdout.lock();
                let mut write_err = None;
                let (found, stats) = find_counterexamples(&cfg, |event| match event {
                    SearchEvent::Found(m) => {
                        if let Err(e) = writeln!(out, "{}", m.to_json()) {
                            write_err.get_or_insert(e);
                        }
                    }
                    SearchEvent::OrderDone(s) if *progress => eprintln!(
                        "order {}: {} monoids, {} counterexamples, {} ms",
                        s.order, s.monoids, s.counterexamples, s.elapsed_ms
                    ),
                    SearchEvent::OrderDone(_) => {}
                })?;
                if let Some(e) = write_err {
                    return Err(e.into());
                }
                writeln!(out, "{}", serde_json::to_string(&stats)?)?;
                Ok(if found.is_empty() { 0 } else { EXIT_COUNTEREXAMPLE })
            }
            PredicateArg::RiGap => {
                if *max_order > fitzgerald::search::MAX_ORDER {
                    bail!("ri-gap search is limited to algebras of size {}", fitzgerald::search::MAX_ORDER);
                }
                let budget = GapBudget {
                    max_size: *max_order,
                    max_candidates: *max_candidates,
                    seed: cli.seed,
                    ..GapBudget::default()
                };
                match find_ri_gap_witness(&budget) {
                    Ok(GapOutcome::Found(w)) => {
                        out!("{}", w.algebra.to_json());
                        print_json(&w.audit)?;
                        Ok(EXIT_COUNTEREXAMPLE)
                    }
                    Ok(GapOutcome::NoneFound { tried, exhaustive }) => {
                        out!(
                            "{}",
                            serde_json::json!({"found": false, "tried": tried, "exhaustive": exhaustive})
                        );
                        Ok(0)
                    }
                    Err(e @ fitzgerald::search::SearchError::BudgetExceeded { .. }) => {
                        eprintln!("error: {e}");
                        Ok(EXIT_BOUND)
                    }
                    Err(e) => Err(e.into()),
                }
            }
        },
        Command::Corpus { spec, list } => {
            if let Some(max) = list {
                for (label, a) in corpus::small_corpus(*max) {
                    out!("{label}\t{}", a.size());
                }
                return Ok(0);
            }
            let Some(spec) = spec else {
                bail!("give a corpus spec or --list N");
            };
            let a = CorpusSpec::parse(spec)?.generate()?;
            out!("{}", a.to_json());
            Ok(0)
        }
    }
}
