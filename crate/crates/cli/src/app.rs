//! Argument handling and the subcommands of the `islkit` executable.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use islkit_core::canon;
use islkit_core::entail::{entails, EntailVerdict};
use islkit_core::par::ExecMode;
use islkit_core::parse::{parse_assertion, parse_command, parse_triple, parse_wpo_query};
use islkit_core::print::disjunct_lines;
use islkit_core::proof::{check, parse_derivation, print_derivation, DerivationNode};
use islkit_core::semantics::brute_wpo_over;
use islkit_core::triple::{auto_domain, check_triple, DomainOverride, TripleVerdict};
use islkit_core::wpo::{synthesize, wpo, WpoConfig, WpoError};
use islkit_core::*;

use crate::corpus::Shape;
use crate::suites::{run_case, run_suite, Params, Suite};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "islkit", version, about = "Incorrectness separation logic toolkit")]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Machine,
}

#[derive(Args, Debug, Clone, Copy)]
struct DomainArgs {
    /// Number of heap locations.
    #[arg(long)]
    locs: Option<u8>,
    /// Largest heap domain enumerated for preconditions.
    #[arg(long)]
    max_cells: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a triple, wpo query, command or assertion and print it back.
    Parse {
        /// File, `-` for stdin, or inline text.
        input: String,
    },
    /// Run `C` concretely from every model of `P` (input `P ; C ; ε`).
    Exec {
        input: String,
        #[command(flatten)]
        dom: DomainArgs,
        #[arg(long, default_value_t = 4)]
        loop_bound: usize,
    },
    /// Split an assertion into canonical symbolic heaps, one per line.
    Canonicalize {
        assertion: String,
        /// Also decide aliasing for the variables of this command.
        #[arg(long)]
        cmd: Option<String>,
    },
    /// Weakest postcondition of `P ; C ; ε`.
    Wpo {
        input: String,
        #[arg(long, default_value_t = 4)]
        loop_bound: usize,
        #[arg(long)]
        no_prune: bool,
        /// Always unroll loops to the bound.
        #[arg(long)]
        no_fixpoint: bool,
    },
    /// Decide `P ⊨ Q`. Exit 0 holds, 1 fails, 2 unknown.
    Entails {
        p: String,
        q: String,
        /// Print the refuting state.
        #[arg(long)]
        explain: bool,
    },
    /// Decide validity of `[P] C [ε: Q]`. Exit 0 valid, 1 invalid, 2 unknown.
    Check {
        input: String,
        /// Print the witness of an invalid triple.
        #[arg(long)]
        witness: bool,
        #[command(flatten)]
        dom: DomainArgs,
        #[arg(long, default_value_t = 4)]
        loop_bound: usize,
    },
    /// Check a derivation. Exit 0 accepted, 1 rejected.
    ProveCheck { input: String },
    /// Build a derivation of a triple from its weakest postcondition.
    ProveSynth {
        input: String,
        #[arg(long, default_value_t = 4)]
        loop_bound: usize,
    },
    /// Run the differential suites against the concrete semantics.
    DiffTest(DiffArgs),
}

#[derive(Args, Debug)]
struct DiffArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[arg(long, default_value_t = 3)]
    locs: u8,
    #[arg(long, default_value_t = 2)]
    max_cells: usize,
    #[arg(long, default_value_t = 3)]
    loop_bound: usize,
    /// Rerun a single case and print what it checked.
    #[arg(long)]
    case: Option<u64>,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

enum Failure {
    Usage(String),
    Internal(String),
}

type CmdResult = Result<i32, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

/// Parses `args` (program name first) and runs the subcommand, returning
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Internal(m)) => {
            let _ = writeln!(err, "internal error: {m}");
            EXIT_INTERNAL
        }
    }
}

/// A file, `-` for stdin, or the argument itself.
fn source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(usage)?;
        return Ok(s);
    }
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| usage(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn parsed<T>(arg: &str, f: impl Fn(&str) -> Result<T, ParseError>) -> Result<T, Failure> {
    let src = source(arg)?;
    f(&src).map_err(|e| usage(format!("{arg}: {e}")))
}

fn wpo_failure(e: WpoError) -> Failure {
    match e {
        WpoError::Canon(c) => usage(c),
        other => internal(other),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let machine = cli.format == Format::Machine;
    let mut emit = |s: String| {
        let _ = write!(out, "{s}");
    };
    match &cli.cmd {
        Cmd::Parse { input } => {
            let src = source(input)?;
            let (kind, text) = if let Ok(t) = parse_triple(&src) {
                ("triple", t.to_string())
            } else if let Ok((p, c, e)) = parse_wpo_query(&src) {
                ("query", format!("{p} ; {c} ; {e}"))
            } else if let Ok(c) = parse_command(&src) {
                let d = c.desugar();
                let text = if d == c {
                    c.to_string()
                } else {
                    format!("{c}\ndesugared: {d}")
                };
                ("command", text)
            } else if let Ok(d) = parse_derivation(&src) {
                ("derivation", print_derivation(&d))
            } else {
                let a = parse_assertion(&src).map_err(|e| usage(format!("{input}: {e}")))?;
                ("assertion", a.to_string())
            };
            if machine {
                emit(format!("kind={kind}\ntext={}\n", text.replace('\n', " ")));
            } else {
                emit(format!("{}\n", text.trim_end()));
            }
            Ok(0)
        }
        Cmd::Exec { input, dom, loop_bound } => {
            let (p, c, e) = parsed(input, parse_wpo_query)?;
            let c = c.desugar();
            let t = Triple::new(p.clone(), c.clone(), e, Assertion::false_());
            let d = auto_domain(
                &t,
                DomainOverride {
                    locations: dom.locs,
                    max_cells: dom.max_cells,
                },
            );
            let mut vars = p.fv();
            vars.extend(c.fv());
            let states = brute_wpo_over(&d, &p, &c, e, *loop_bound, &vars, ExecMode::default()).map_err(usage)?;
            if machine {
                emit(format!("locations={}\nstates={}\n", d.locations, states.len()));
            }
            for s in &states {
                emit(format!("{}\n", s.display_over(&vars)));
            }
            Ok(0)
        }
        Cmd::Canonicalize { assertion, cmd } => {
            let p = parsed(assertion, parse_assertion)?;
            let c = match cmd {
                Some(c) => parsed(c, parse_command)?.desugar(),
                None => Command::Skip,
            };
            let cp = canon::cano(&p, &c).map_err(usage)?;
            if machine {
                emit(format!("disjuncts={}\n", cp.disjuncts.len()));
            }
            emit(disjunct_lines(&cp));
            Ok(0)
        }
        Cmd::Wpo {
            input,
            loop_bound,
            no_prune,
            no_fixpoint,
        } => {
            let (p, c, e) = parsed(input, parse_wpo_query)?;
            let cfg = WpoConfig {
                loop_bound: *loop_bound,
                prune: !no_prune,
                fixpoint: !no_fixpoint,
                ..WpoConfig::default()
            };
            let w = wpo(&p, &c, e, &cfg).map_err(wpo_failure)?;
            if machine {
                emit(format!("post={}\ntruncated={}\n", w.post, w.truncated));
            } else {
                emit(format!("{}\n", w.post));
                if w.truncated {
                    let _ = writeln!(
                        err,
                        "note: loops unrolled to {loop_bound} iterations without a fixpoint"
                    );
                }
            }
            Ok(0)
        }
        Cmd::Entails { p, q, explain } => {
            let pa = parsed(p, parse_assertion)?;
            let qa = parsed(q, parse_assertion)?;
            let v = entails(&pa, &qa);
            let (word, code) = match &v {
                EntailVerdict::Holds => ("holds", 0),
                EntailVerdict::Fails { .. } => ("fails", 1),
                EntailVerdict::Unknown(_) => ("unknown", 2),
            };
            if machine {
                emit(format!("verdict={word}\n"));
            } else {
                emit(format!("{word}\n"));
            }
            match &v {
                EntailVerdict::Fails { counterexample, domain } if *explain => {
                    let mut vars = pa.fv();
                    vars.extend(qa.fv());
                    let st = counterexample.display_over(&vars);
                    if machine {
                        emit(format!("counterexample={st}\nlocations={}\n", domain.locations));
                    } else {
                        emit(format!("counterexample over {} locations: {st}\n", domain.locations));
                    }
                }
                EntailVerdict::Unknown(r) if *explain => emit(format!("reason: {r}\n")),
                _ => {}
            }
            Ok(code)
        }
        Cmd::Check {
            input,
            witness,
            dom,
            loop_bound,
        } => {
            let t = parsed(input, parse_triple)?;
            let cfg = WpoConfig::default().with_loop_bound(*loop_bound);
            let ov = DomainOverride {
                locations: dom.locs,
                max_cells: dom.max_cells,
            };
            let v = check_triple(&t, &cfg, ov);
            let word = match &v {
                TripleVerdict::Valid(_) => "valid",
                TripleVerdict::Invalid { .. } => "invalid",
                TripleVerdict::Unknown(_) => "unknown",
            };
            if machine {
                emit(format!("verdict={word}\ndetail={v}\n"));
            } else {
                emit(format!("{v}\n"));
            }
            if let (TripleVerdict::Invalid { witness: w, domain, .. }, true) = (&v, *witness) {
                let vars = islkit_core::semantics::triple_vars(&t);
                let st = w.display_over(&vars);
                if machine {
                    emit(format!("witness={st}\nlocations={}\n", domain.locations));
                } else {
                    emit(format!("witness: {st}\n"));
                }
            }
            Ok(v.exit_code())
        }
        Cmd::ProveCheck { input } => {
            let d = parsed(input, parse_derivation)?;
            match check(&d) {
                Ok(()) => {
                    emit(if machine {
                        format!("verdict=accepted\nnodes={}\n", d.size())
                    } else {
                        format!("accepted ({} nodes)\n", d.size())
                    });
                    Ok(0)
                }
                Err(e) => {
                    emit(if machine {
                        format!("verdict=rejected\nreason={e}\n")
                    } else {
                        format!("rejected: {e}\n")
                    });
                    Ok(1)
                }
            }
        }
        Cmd::ProveSynth { input, loop_bound } => {
            let t = parsed(input, parse_triple)?;
            let cfg = WpoConfig::default().with_loop_bound(*loop_bound);
            let (w, d) = synthesize(&t.pre, &t.cmd, t.exit, &cfg).map_err(wpo_failure)?;
            let proof = match entails(&t.post, &w.post) {
                EntailVerdict::Holds => DerivationNode::cons(t.pre.clone(), t.post.clone(), d),
                EntailVerdict::Fails { .. } => {
                    let _ = writeln!(err, "no derivation: postcondition does not entail {}", w.post);
                    return Ok(1);
                }
                EntailVerdict::Unknown(r) => {
                    let _ = writeln!(err, "no derivation: {r}");
                    return Ok(2);
                }
            };
            check(&proof).map_err(|e| internal(format!("synthesized derivation rejected: {e}")))?;
            emit(format!("{}\n", print_derivation(&proof)));
            Ok(0)
        }
        Cmd::DiffTest(a) => diff_test(a, machine, &mut emit, err),
    }
}

fn diff_test(a: &DiffArgs, machine: bool, emit: &mut dyn FnMut(String), err: &mut dyn Write) -> CmdResult {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_name(&a.suite).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            usage(format!(
                "unknown suite `{}`; expected all or one of {}",
                a.suite,
                names.join(", ")
            ))
        })?]
    };
    if a.locs == 0 {
        return Err(usage("--locs must be at least 1"));
    }
    let params = Params {
        seed: a.seed,
        cases: a.cases,
        locs: a.locs,
        max_cells: a.max_cells,
        loop_bound: a.loop_bound,
        mode: if a.sequential {
            ExecMode::Sequential
        } else {
            ExecMode::default()
        },
        shape: Shape::default(),
    };
    if let Some(case) = a.case {
        let mut code = 0;
        for s in suites {
            let r = run_case(s, &params, case);
            let outcome = match &r.outcome {
                Some(o) => format!("{o:?}"),
                None => "nothing checked".to_string(),
            };
            emit(format!("{} case {case}: {outcome}\n  input: {}\n", s.name(), r.input));
            for (k, v) in &r.counts {
                emit(format!("  {k}={v}\n"));
            }
            if matches!(r.outcome, Some(crate::report::CaseOutcome::Fail(_))) {
                code = 1;
            }
        }
        return Ok(code);
    }
    let mut code = 0;
    for s in suites {
        let report = run_suite(s, &params);
        emit(if machine {
            report.machine()
        } else {
            format!("{}\n", report.plain())
        });
        let _ = writeln!(err, "{}: {:.2}s", s.name(), report.wall.as_secs_f64());
        if !report.ok() {
            code = 1;
        }
    }
    Ok(code)
}
