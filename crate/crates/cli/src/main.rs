//! `cutpoints`: simulate PFAs and measure-once QFAs with exact arithmetic,
//! decide cutpoint membership with certified comparisons, and produce
//! separation witness certificates.

mod numbers;
mod report;
mod spec;
mod verify;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cutpoints::automata::{Automaton, AutomataError, CutpointAcceptor};
use cutpoints::constructions::{
    bin_reverse, closed_form_prob, fixed_rotation_prob_oracle, primed_closed_form_prob,
    ConstructionError,
};
use cutpoints::scalar::KernelError;
use cutpoints::separation::{
    qfa_quadrant_witness, scaled_pair_separation, unary_pfa_witness, SeparationError, WitnessMode,
};

use numbers::{parse_exact, rational_string, scalar_string};
use report::Report;
use spec::{build_automaton, parse_spec};

#[derive(Parser)]
#[command(
    name = "cutpoints",
    about = "Exact simulation and certified cutpoint-language tools for small PFAs and QFAs",
    version
)]
struct Cli {
    /// Bits of precision for reported enclosures.
    #[arg(long, global = true, default_value_t = 256)]
    precision_bits: u32,
    /// Top of the precision ladder for certified comparisons.
    #[arg(long, global = true, default_value_t = 4096)]
    max_bits: u32,
    /// Cap on witness length scans.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    scan_cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Acceptance probability of a word.
    Prob {
        /// Automaton spec text, or @path to read it from a file.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        word: Option<String>,
        /// Unary input length (alternative to --word for unary automata).
        #[arg(long)]
        length: Option<u64>,
    },
    /// Strict cutpoint membership; boundary collisions exit with an error.
    Member {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        cutpoint: String,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        length: Option<u64>,
    },
    /// Closed-form oracles, independent of matrix simulation.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Separation witness finders.
    Separate {
        #[command(subcommand)]
        which: SeparateCommand,
    },
    /// Run the built-in claims suite; one pass/fail line per check.
    Verify,
    /// Tabulate acceptance probabilities over inputs.
    Table {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 10)]
        max_len: u64,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// bin(word reversed) as an exact rational.
    BinReverse {
        #[arg(long)]
        word: String,
    },
    /// cos^2 of j rotations for the fixed 3-4-5 rotation, exactly.
    Cos2 {
        #[arg(long)]
        j: u64,
    },
    /// Closed-form acceptance probability of the three-state unary PFA.
    Eigenform {
        #[arg(long)]
        x: String,
        #[arg(long)]
        m: u64,
    },
    /// Closed-form probability of the fixed-cutpoint (cube) automaton.
    Primed {
        #[arg(long)]
        x: String,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Subcommand)]
enum SeparateCommand {
    /// Two scaled Rabin automata separated at a shared cutpoint.
    PfaBinary {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        alpha1: String,
        #[arg(long)]
        alpha2: String,
    },
    /// Two rotation QFAs separated at cutpoint 1/2 via the quadrant table.
    Qfa {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Two three-state unary PFAs at their variable cutpoints.
    PfaUnary {
        #[arg(long)]
        x1: String,
        #[arg(long)]
        x2: String,
    },
    /// Two stochastic-cube automata at the fixed cutpoint 1/2.
    PfaUnaryFixed {
        #[arg(long)]
        x1: String,
        #[arg(long)]
        x2: String,
    },
}

/// Error classification for the exit-code contract: certification failures
/// exit 1, usage and validation failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Certification(String),
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::ParameterOutOfRange(_) => CliError::Usage(e.to_string()),
            _ => CliError::Certification(e.to_string()),
        }
    }
}

impl From<AutomataError> for CliError {
    fn from(e: AutomataError) -> Self {
        match e {
            AutomataError::Kernel(k) => k.into(),
            AutomataError::Linalg(cutpoints::linalg::LinalgError::Kernel(k)) => k.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::Kernel(k) => k.into(),
            ConstructionError::Automata(a) => a.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SeparationError> for CliError {
    fn from(e: SeparationError) -> Self {
        match e {
            SeparationError::Kernel(k) => k.into(),
            SeparationError::Automata(a) => a.into(),
            SeparationError::Construction(c) => c.into(),
            SeparationError::ParameterOutOfRange(m) => CliError::Usage(m),
            other => CliError::Certification(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok((mut report, failed_checks)) => {
            report.timing_ms = started.elapsed().as_millis();
            match cli.format {
                Format::Text => print!("{}", report.render_text()),
                Format::Json => println!("{}", report.render_json()),
            }
            if failed_checks {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Certification(msg)) => {
            eprintln!("certification error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(Report, bool), CliError> {
    match &cli.command {
        Command::Prob { spec, word, length } => cmd_prob(cli, spec, word, *length),
        Command::Member {
            spec,
            cutpoint,
            word,
            length,
        } => cmd_member(cli, spec, cutpoint, word, *length),
        Command::Oracle { which } => cmd_oracle(cli, which),
        Command::Separate { which } => cmd_separate(cli, which),
        Command::Verify => cmd_verify(cli),
        Command::Table { spec, max_len } => cmd_table(cli, spec, *max_len),
    }
}

fn load_spec_text(raw: &str) -> Result<String, CliError> {
    if let Some(path) = raw.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read spec file {path:?}: {e}")))
    } else {
        Ok(raw.to_string())
    }
}

fn parse_and_build(raw: &str, max_bits: u32) -> Result<(Automaton, String), CliError> {
    let text = load_spec_text(raw)?;
    let parsed = parse_spec(&text).map_err(|e| CliError::Usage(format!("bad spec: {e}")))?;
    let automaton = build_automaton(&parsed, max_bits)?;
    Ok((automaton, parsed.source))
}

enum WordArg {
    Text(String),
    UnaryLen(u64),
}

impl WordArg {
    fn describe(&self) -> String {
        match self {
            WordArg::Text(w) => {
                if w.is_empty() {
                    "(empty)".into()
                } else {
                    w.clone()
                }
            }
            WordArg::UnaryLen(n) => format!("0^{n}"),
        }
    }
}

fn resolve_word(
    automaton: &Automaton,
    word: &Option<String>,
    length: Option<u64>,
) -> Result<WordArg, CliError> {
    match (word, length) {
        (Some(w), None) => Ok(WordArg::Text(w.clone())),
        (None, Some(n)) => {
            if !automaton.is_unary() {
                return Err(CliError::Usage(
                    "--length applies only to unary automata".into(),
                ));
            }
            Ok(WordArg::UnaryLen(n))
        }
        _ => Err(CliError::Usage(
            "exactly one of --word or --length is required".into(),
        )),
    }
}

fn cmd_prob(
    cli: &Cli,
    spec_raw: &str,
    word: &Option<String>,
    length: Option<u64>,
) -> Result<(Report, bool), CliError> {
    let (automaton, source) = parse_and_build(spec_raw, cli.max_bits)?;
    let input = resolve_word(&automaton, word, length)?;
    let prob = match &input {
        WordArg::Text(w) => automaton.accept_prob(w)?,
        WordArg::UnaryLen(n) => automaton.accept_prob_unary(*n)?,
    };
    let mut report = Report::new("prob");
    report.input("spec", source).input("word", input.describe());
    report.output("probability", scalar_string(&prob, cli.precision_bits)?);
    Ok((report, false))
}

fn cmd_member(
    cli: &Cli,
    spec_raw: &str,
    cutpoint_raw: &str,
    word: &Option<String>,
    length: Option<u64>,
) -> Result<(Report, bool), CliError> {
    let (automaton, source) = parse_and_build(spec_raw, cli.max_bits)?;
    let cutpoint =
        parse_exact(cutpoint_raw).map_err(|e| CliError::Usage(format!("bad cutpoint: {e}")))?;
    let acceptor = CutpointAcceptor::new(automaton, cutpoint.to_scalar(), cli.max_bits)?;
    let input = resolve_word(acceptor.automaton(), word, length)?;
    let verdict = match &input {
        WordArg::Text(w) => acceptor.member(w, cli.max_bits),
        WordArg::UnaryLen(n) => acceptor.member_unary(*n, cli.max_bits),
    };
    let verdict = match verdict {
        Ok(v) => v,
        Err(AutomataError::Kernel(k)) if k.is_exact_tie() => {
            return Err(CliError::Certification(
                "probability equals cutpoint".into(),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let prob = match &input {
        WordArg::Text(w) => acceptor.automaton().accept_prob(w)?,
        WordArg::UnaryLen(n) => acceptor.automaton().accept_prob_unary(*n)?,
    };
    let mut report = Report::new("member");
    report
        .input("spec", source)
        .input("cutpoint", cutpoint_raw.to_string())
        .input("word", input.describe());
    report
        .output("probability", scalar_string(&prob, cli.precision_bits)?)
        .output("member", if verdict { "true" } else { "false" });
    Ok((report, false))
}

fn cmd_oracle(cli: &Cli, which: &OracleCommand) -> Result<(Report, bool), CliError> {
    let mut report = Report::new("oracle");
    match which {
        OracleCommand::BinReverse { word } => {
            let value = bin_reverse(word)?;
            report
                .input("oracle", "bin-reverse")
                .input("word", if word.is_empty() { "(empty)" } else { word });
            report.output("value", rational_string(&value));
        }
        OracleCommand::Cos2 { j } => {
            report.input("oracle", "cos2").input("j", j.to_string());
            report.output("value", rational_string(&fixed_rotation_prob_oracle(*j)));
        }
        OracleCommand::Eigenform { x, m } => {
            let x = parse_exact(x).map_err(|e| CliError::Usage(format!("bad x: {e}")))?;
            let value = closed_form_prob(&x.to_scalar(), *m, cli.max_bits)?;
            report
                .input("oracle", "eigenform")
                .input("x", rational_string(&x.rational))
                .input("m", m.to_string());
            report.output("value", scalar_string(&value, cli.precision_bits)?);
        }
        OracleCommand::Primed { x, m } => {
            let x = parse_exact(x).map_err(|e| CliError::Usage(format!("bad x: {e}")))?;
            let value = primed_closed_form_prob(&x.to_scalar(), *m, cli.max_bits)?;
            report
                .input("oracle", "primed")
                .input("x", rational_string(&x.rational))
                .input("m", m.to_string());
            report.output("value", scalar_string(&value, cli.precision_bits)?);
        }
    }
    Ok((report, false))
}

fn cmd_separate(cli: &Cli, which: &SeparateCommand) -> Result<(Report, bool), CliError> {
    let parse =
        |name: &str, raw: &str| parse_exact(raw).map_err(|e| CliError::Usage(format!("bad {name}: {e}")));
    let mut report = Report::new("separate");
    let cert = match which {
        SeparateCommand::PfaBinary {
            lambda,
            alpha1,
            alpha2,
        } => {
            report
                .input("finder", "pfa-binary")
                .input("lambda", lambda.clone())
                .input("alpha1", alpha1.clone())
                .input("alpha2", alpha2.clone());
            scaled_pair_separation(
                &parse("lambda", lambda)?.to_scalar(),
                &parse("alpha1", alpha1)?.to_scalar(),
                &parse("alpha2", alpha2)?.to_scalar(),
                cli.max_bits,
            )?
        }
        SeparateCommand::Qfa { alpha, beta } => {
            report
                .input("finder", "qfa")
                .input("alpha", alpha.clone())
                .input("beta", beta.clone());
            qfa_quadrant_witness(
                &parse("alpha", alpha)?.to_param(),
                &parse("beta", beta)?.to_param(),
                cli.max_bits,
            )?
        }
        SeparateCommand::PfaUnary { x1, x2 } => {
            report
                .input("finder", "pfa-unary")
                .input("x1", x1.clone())
                .input("x2", x2.clone());
            unary_pfa_witness(
                &parse("x1", x1)?.to_scalar(),
                &parse("x2", x2)?.to_scalar(),
                WitnessMode::VariableCutpoint,
                cli.scan_cap,
                cli.max_bits,
            )?
        }
        SeparateCommand::PfaUnaryFixed { x1, x2 } => {
            report
                .input("finder", "pfa-unary-fixed")
                .input("x1", x1.clone())
                .input("x2", x2.clone());
            unary_pfa_witness(
                &parse("x1", x1)?.to_scalar(),
                &parse("x2", x2)?.to_scalar(),
                WitnessMode::FixedCutpoint,
                cli.scan_cap,
                cli.max_bits,
            )?
        }
    };
    report.witness_certificate(&cert, cli.precision_bits)?;
    Ok((report, false))
}

fn cmd_verify(cli: &Cli) -> Result<(Report, bool), CliError> {
    let outcomes = verify::run_all(cli.max_bits, cli.scan_cap);
    let mut report = Report::new("verify");
    let mut any_failed = false;
    for outcome in &outcomes {
        match &outcome.result {
            Ok(()) => {
                report.output(outcome.name, "pass");
            }
            Err(reason) => {
                any_failed = true;
                report.output(outcome.name, format!("FAIL: {reason}"));
            }
        }
    }
    report.output(
        "verdict",
        if any_failed { "FAIL" } else { "all checks passed" },
    );
    Ok((report, any_failed))
}

fn cmd_table(cli: &Cli, spec_raw: &str, max_len: u64) -> Result<(Report, bool), CliError> {
    let (automaton, source) = parse_and_build(spec_raw, cli.max_bits)?;
    let mut report = Report::new("table");
    report
        .input("spec", source)
        .input("max-len", max_len.to_string());
    if automaton.is_unary() {
        for len in 0..=max_len {
            let prob = automaton.accept_prob_unary(len)?;
            report.output(format!("0^{len}"), scalar_string(&prob, cli.precision_bits)?);
        }
    } else {
        if max_len > 12 {
            return Err(CliError::Usage(
                "binary tables are capped at --max-len 12".into(),
            ));
        }
        for len in 0..=max_len {
            for bits in 0..(1u64 << len) {
                let w: String = (0..len)
                    .map(|i| {
                        if bits >> (len - 1 - i) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect();
                let prob = automaton.accept_prob(&w)?;
                let key = if w.is_empty() { "(empty)".to_string() } else { w };
                report.output(key, scalar_string(&prob, cli.precision_bits)?);
            }
        }
    }
    Ok((report, false))
}
