//! `setlab`: check, classify and explore finite membership universes.

mod report;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use setlab::audit::{check_axiom, trace_chain, verify_lemma_suite, Axiom, ChainDirection};
use setlab::classifier::{classify, russell_witness};
use setlab::dsl::{parse_document, parse_universe};
use setlab::enumerate::{enumerate_par, max_n_from_env, EnumSpec, UniverseFilter};
use setlab::interp::{
    default_demo_model, quine_demo, upper_chain_interp, verify_forster_counterexample, BaseModel,
    ForsterRoles,
};
use setlab::{ElementId, Universe};

use report::{Report, UpperChainReport};

#[derive(Debug, Parser)]
#[command(
    name = "setlab",
    version,
    about = "Finite-model workbench for successor and predecessor axioms"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Exit with status 1 unless the inspected universe satisfies this axiom.
    #[arg(long, global = true, value_enum)]
    require: Option<Require>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Require {
    Successor,
    Predecessor,
    Both,
}

impl Require {
    fn axioms(self) -> &'static [Axiom] {
        match self {
            Require::Successor => &[Axiom::Successor],
            Require::Predecessor => &[Axiom::Predecessor],
            Require::Both => &[Axiom::Successor, Axiom::Predecessor],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Demo {
    Forster,
    Quine,
    Upperchain,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report successor and predecessor lookups for every element.
    Check { file: PathBuf },
    /// Classify every element as lower, upper or neither.
    Classify { file: PathBuf },
    /// Run the lemma suite.
    Verify { file: PathBuf },
    /// Follow successors or predecessors.
    Chains {
        file: PathBuf,
        /// Start element; every element in turn when omitted.
        #[arg(long)]
        from: Option<String>,
        #[arg(long, value_parser = parse_direction, default_value = "asc")]
        dir: ChainDirection,
        /// Maximum number of nodes per chain.
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Count all universes of a given size.
    Enumerate {
        #[arg(long)]
        size: usize,
        #[arg(long, value_parser = parse_filter)]
        filter: Option<UniverseFilter>,
        /// Count one universe per isomorphism class.
        #[arg(long)]
        dedupe: bool,
    },
    /// Run an urelement-interpretation demo.
    Interp {
        #[arg(long, value_enum)]
        demo: Demo,
        /// Chain length for the upperchain demo.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Model file; the built-in demo model when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "U")]
        universal: String,
        #[arg(long, default_value = "M")]
        m: String,
        #[arg(long, default_value = "N")]
        n: String,
    },
}

fn parse_direction(s: &str) -> Result<ChainDirection, String> {
    s.parse()
}

fn parse_filter(s: &str) -> Result<UniverseFilter, String> {
    s.parse()
}

/// Failure that maps to exit status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn read_input(path: &PathBuf) -> Result<Vec<u8>, UsageError> {
    let mut bytes = Vec::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_end(&mut bytes)?;
    } else {
        bytes = std::fs::read(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    }
    Ok(bytes)
}

fn load_universe(path: &PathBuf) -> Result<Universe, UsageError> {
    let bytes = read_input(path)?;
    let doc = parse_universe(&bytes).map_err(|e| UsageError(format!("{}:{e}", path.display())))?;
    Ok(doc.universe())
}

fn load_model(path: &Option<PathBuf>) -> Result<BaseModel, UsageError> {
    match path {
        None => Ok(default_demo_model()?),
        Some(p) => {
            let bytes = read_input(p)?;
            let doc =
                parse_document(&bytes).map_err(|e| UsageError(format!("{}:{e}", p.display())))?;
            Ok(BaseModel::from_doc(&doc)?)
        }
    }
}

fn run(cli: &Cli, report: &mut Report) -> Result<(), UsageError> {
    let inspected = match &cli.command {
        Command::Check { file } => {
            let u = load_universe(file)?;
            report.elements = Some(u.len());
            report.axioms = Some(vec![
                check_axiom(&u, Axiom::Successor),
                check_axiom(&u, Axiom::Predecessor),
            ]);
            Some(u)
        }
        Command::Classify { file } => {
            let u = load_universe(file)?;
            report.elements = Some(u.len());
            report.classifications = Some(classify(&u));
            report.russell_witness = Some(russell_witness(&u));
            Some(u)
        }
        Command::Verify { file } => {
            let u = load_universe(file)?;
            report.elements = Some(u.len());
            let lemmas = verify_lemma_suite(&u);
            if lemmas.has_violation() {
                report.fail();
            }
            report.lemmas = Some(lemmas);
            Some(u)
        }
        Command::Chains {
            file,
            from,
            dir,
            cap,
        } => {
            let u = load_universe(file)?;
            report.elements = Some(u.len());
            let starts: Vec<ElementId> = match from {
                Some(name) => vec![ElementId::new(name.clone())],
                None => u.ids().to_vec(),
            };
            let chains = starts
                .iter()
                .map(|s| trace_chain(&u, s, *dir, *cap))
                .collect::<Result<Vec<_>, _>>()?;
            report.chains = Some(chains);
            Some(u)
        }
        Command::Enumerate {
            size,
            filter,
            dedupe,
        } => {
            if cli.require.is_some() {
                return Err(UsageError(
                    "--require does not apply to enumerate; use --filter instead".into(),
                ));
            }
            let mut spec = EnumSpec::new(*size).dedupe(*dedupe).max_n(max_n_from_env());
            if let Some(f) = filter {
                spec = spec.filter(*f);
            }
            report.enumeration = Some(enumerate_par(&spec, |_| {})?);
            None
        }
        Command::Interp {
            demo,
            k,
            model,
            universal,
            m,
            n,
        } => {
            let roles = ForsterRoles {
                universal: ElementId::new(universal.clone()),
                m: ElementId::new(m.clone()),
                n: ElementId::new(n.clone()),
            };
            match demo {
                Demo::Forster => {
                    let base = load_model(model)?;
                    let swapped = base.upsilon_swap(&roles.m, &roles.n)?;
                    let forster = verify_forster_counterexample(&swapped, &roles)?;
                    if !forster.passed {
                        report.fail();
                    }
                    report.forster = Some(forster);
                    Some(swapped.materialize())
                }
                Demo::Upperchain => {
                    let base = load_model(model)?;
                    let chain = upper_chain_interp(&base, &roles.universal, *k)?;
                    let checks = chain.verify();
                    let passed = checks.iter().all(|c| c.holds());
                    if !passed {
                        report.fail();
                    }
                    let world = chain.model.materialize();
                    report.upper_chain = Some(UpperChainReport {
                        chain: chain.as_chain(),
                        links: checks,
                        passed,
                    });
                    Some(world)
                }
                Demo::Quine => {
                    let q = quine_demo();
                    if !q.passed {
                        report.fail();
                    }
                    let world = parse_universe(q.universe.as_bytes())?.universe();
                    report.quine = Some(q);
                    Some(world)
                }
            }
        }
    };

    if let (Some(req), Some(u)) = (cli.require, inspected) {
        let axioms = report.axioms.get_or_insert_with(Vec::new);
        for &ax in req.axioms() {
            if !axioms.iter().any(|r| r.axiom == ax) {
                axioms.push(check_axiom(&u, ax));
            }
        }
        let unmet = axioms
            .iter()
            .any(|r| req.axioms().contains(&r.axiom) && !r.satisfied);
        if unmet {
            report.fail();
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::new(std::env::args().skip(1).collect());
    if let Err(UsageError(msg)) = run(&cli, &mut report) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }

    let out = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    let mut stdout = io::stdout().lock();
    if stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_status)
}
