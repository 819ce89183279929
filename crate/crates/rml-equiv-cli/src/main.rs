//! `rml-equiv`: command-line front end.
//!
//! Exit codes: 0 success or equivalent, 1 inequivalent, 2 unknown within the
//! budget, 3 outside the decidable fragments, 64 bad usage or input, 70
//! internal failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rml_equiv::arena::prearena_of_sequent;
use rml_equiv::canonical::canonicalize;
use rml_equiv::coverability::{find_witness, DEFAULT_BUDGET};
use rml_equiv::equiv::{choose_encoding, compile, decide, DecideOptions, EquivError, Judgement, Verdict};
use rml_equiv::family::{check_invariants, CompileError, Encoding};
use rml_equiv::ndcma::{for_each_word, WordVisit, Wndcma};
use rml_equiv::rml_lang::{classify, parse_context, parse_type, TypeSequent};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EX_USAGE: u8 = 64;
const EX_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "rml-equiv", version, about = "Observational equivalence for finitary RML")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and type check a term.
    Check {
        term: PathBuf,
        #[command(flatten)]
        env: EnvArgs,
        /// Print the typed syntax tree as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Report which fragment a sequent falls in.
    Classify {
        /// Term whose sequent is classified.
        term: Option<PathBuf>,
        /// Classify `ctx ⊢ TYPE` instead of a term.
        #[arg(long = "type", value_name = "TYPE", conflicts_with = "term")]
        ty: Option<String>,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Print the let-normal form of a term.
    Canon {
        term: PathBuf,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Compile a term to an automaton in the text format.
    Compile {
        term: PathBuf,
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_enum)]
        fragment: Option<Fragment>,
        /// Write the automaton here instead of standard output.
        #[arg(long, value_name = "PATH")]
        emit_automaton: Option<PathBuf>,
        /// Print the prearena of the sequent first.
        #[arg(long)]
        dump_arena: bool,
    },
    /// Decide whether two terms are observationally equivalent.
    Decide {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_enum)]
        fragment: Option<Fragment>,
        /// Node budget of each emptiness check.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Longest separating word searched for.
        #[arg(long, default_value_t = 40)]
        witness_len: usize,
    },
    /// List the accepted canonical words up to a length.
    Enumerate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Print a shortest accepted word.
    Witness {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
    },
}

#[derive(Args)]
struct EnvArgs {
    /// File holding the typing context, e.g. `f: unit -> unit, x: intref`.
    #[arg(long, value_name = "PATH")]
    ctx: Option<PathBuf>,
    /// Integers range over 0..k.
    #[arg(long, default_value_t = 2)]
    int_size: u32,
}

/// A term, or with a `.ndcma` extension an automaton in the text format.
#[derive(Args)]
struct InputArgs {
    input: PathBuf,
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, value_enum)]
    fragment: Option<Fragment>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fragment {
    Pstrict,
    Rforml,
}

impl From<Fragment> for Encoding {
    fn from(f: Fragment) -> Encoding {
        match f {
            Fragment::Pstrict => Encoding::PStrict,
            Fragment::Rforml => Encoding::RForml,
        }
    }
}

/// A failure with the exit code it maps to.
struct Failure(u8, String);

impl From<EquivError> for Failure {
    fn from(e: EquivError) -> Failure {
        let code = match &e {
            EquivError::NotDecidableFragment { .. } => 3,
            EquivError::Lang(_) | EquivError::SequentMismatch(..) => EX_USAGE,
            EquivError::Compile(CompileError::FragmentViolation(_)) => 3,
            _ => EX_SOFTWARE,
        };
        Failure(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EX_USAGE, format!("{}: {}", path.display(), e)))
}

fn context_text(env: &EnvArgs) -> Result<String, Failure> {
    env.ctx.as_deref().map(read).transpose().map(Option::unwrap_or_default)
}

fn judgement(path: &Path, env: &EnvArgs) -> Result<Judgement, Failure> {
    Ok(Judgement::parse(&read(path)?, &context_text(env)?, env.int_size)?)
}

fn automaton(input: &InputArgs) -> Result<Wndcma, Failure> {
    let is_automaton = input.input.extension().is_some_and(|e| e == "ndcma");
    if is_automaton {
        return read(&input.input)?.parse().map_err(|e| Failure(EX_USAGE, format!("{}: {}", input.input.display(), e)));
    }
    let j = judgement(&input.input, &input.env)?;
    let enc = choose_encoding(&j.sequent, input.fragment.map(Into::into))?;
    Ok(compile(&j, enc)?)
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Check { term, env, json } => {
            let j = judgement(&term, &env)?;
            if json {
                let text = serde_json::to_string_pretty(&j.term).map_err(|e| Failure(EX_SOFTWARE, e.to_string()))?;
                println!("{}", text);
            } else {
                println!("{}", j.sequent);
            }
        }
        Cmd::Classify { term, ty, env } => {
            let seq = match (term, ty) {
                (Some(t), _) => judgement(&t, &env)?.sequent,
                (None, Some(ty)) => {
                    let ctx = parse_context(&context_text(&env)?).map_err(|e| Failure(EX_USAGE, e.to_string()))?;
                    let subject = parse_type(&ty).map_err(|e| Failure(EX_USAGE, e.to_string()))?;
                    TypeSequent::new(ctx, subject)
                }
                (None, None) => return Err(Failure(EX_USAGE, "give a term file or --type".into())),
            };
            println!("{}", classify(&seq));
        }
        Cmd::Canon { term, env } => {
            let j = judgement(&term, &env)?;
            println!("{}", canonicalize(&j.term).map_err(EquivError::from)?);
        }
        Cmd::Compile { term, env, fragment, emit_automaton, dump_arena } => {
            let j = judgement(&term, &env)?;
            if dump_arena {
                print!("{}", prearena_of_sequent(&j.sequent, j.k).dump());
            }
            let enc = choose_encoding(&j.sequent, fragment.map(Into::into))?;
            let a = compile(&j, enc)?;
            let report = check_invariants(&a);
            if !report.deterministic || !report.level_discipline {
                return Err(Failure(EX_SOFTWARE, format!("compiled automaton fails its invariants: {:?}", report)));
            }
            let text = a.to_string();
            match emit_automaton {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| Failure(EX_USAGE, format!("{}: {}", path.display(), e)))?
                }
                None => print!("{}", text),
            }
        }
        Cmd::Decide { left, right, env, fragment, budget, witness_len } => {
            let m = judgement(&left, &env)?;
            let n = judgement(&right, &env)?;
            let opts = DecideOptions { budget, fragment: fragment.map(Into::into), witness_len };
            let enc = choose_encoding(&m.sequent, opts.fragment)?;
            return Ok(match decide(&m, &n, &opts)? {
                Verdict::Equivalent => {
                    println!("equivalent ({})", enc);
                    0
                }
                Verdict::Inequivalent { witness, play, left_accepts } => {
                    let side = if left_accepts { "left" } else { "right" };
                    println!("inequivalent ({}): only the {} term has this complete play", enc, side);
                    println!("witness: {}", witness);
                    print!("{}", play);
                    1
                }
                Verdict::Unknown { budget } => {
                    println!("unknown: budget of {} exhausted", budget);
                    2
                }
            });
        }
        Cmd::Enumerate { input, max_len } => {
            let a = automaton(&input)?;
            let mut words = Vec::new();
            for_each_word(&a.alphabet, a.level, max_len, &[&a], |w, m| {
                if m[0] {
                    words.push(w.to_string());
                }
                WordVisit::Continue
            });
            words.sort();
            for w in words {
                println!("{}", w);
            }
        }
        Cmd::Witness { input, max_len } => {
            let a = automaton(&input)?;
            match find_witness(&a, max_len) {
                Some(w) => println!("{}", w),
                None => println!("none up to length {}", max_len),
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("rml-equiv: {}", msg);
            ExitCode::from(code)
        }
    }
}
