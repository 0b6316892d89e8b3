use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ddp_core::{init_context, resolve, run_survey_suite};

use crate::dto::{Discourse, Failure, Report, Utterance};
use crate::{io, report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ddp", version, about = "Resolve pronouns in discourse files and run the survey suite")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve every utterance of an ILF discourse file.
    Resolve {
        input: PathBuf,
        /// Knowledge base; the bundled one when absent.
        #[arg(long, env = "DDP_KB")]
        kb: Option<PathBuf>,
        /// Print per-source trace lines and the context after each utterance.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reproduce the survey tables over the bundled corpus.
    Survey {
        #[arg(long, env = "DDP_KB")]
        kb: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

const FAILURE: u8 = 1;
const USAGE: u8 = 2;

pub fn run_resolve(input: &std::path::Path, kb: ddp_core::KnowledgeBase, trace: bool) -> Result<Discourse, io::LoadError> {
    let ilfs = io::load_discourse(input)?;
    let mut ctx = init_context(kb, Default::default());
    let mut d = Discourse { file: input.display().to_string(), utterances: Vec::new(), failure: None };
    for (i, ilf) in ilfs.iter().enumerate() {
        match resolve(&ctx, ilf) {
            Ok((v, next)) => {
                d.utterances.push(Utterance::new(i + 1, ilf, &v, &next, trace));
                ctx = next;
            }
            Err(e) => {
                d.failure = Some(Failure::new(i + 1, &e));
                break;
            }
        }
    }
    Ok(d)
}

fn emit<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("records serialize")),
        Format::Text => print!("{}", text()),
    }
}

pub fn main<I: IntoIterator<Item = T>, T: Into<OsString> + Clone>(args: I) -> ExitCode {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let (kb_path, format) = match &cli.command {
        Command::Resolve { kb, format, .. } | Command::Survey { kb, format } => (kb.as_deref(), *format),
    };
    let kb = match io::load_kb(kb_path) {
        Ok(kb) => kb,
        Err(e) => {
            eprintln!("ddp: {e}");
            return ExitCode::from(USAGE);
        }
    };
    match &cli.command {
        Command::Resolve { input, trace, .. } => match run_resolve(input, kb, *trace) {
            Ok(d) => {
                emit(format, &d, || report::discourse(&d));
                if let Some(f) = &d.failure {
                    eprintln!("ddp: utterance {}: {}", f.utterance, f.error);
                    return ExitCode::from(FAILURE);
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("ddp: {e}");
                ExitCode::from(USAGE)
            }
        },
        Command::Survey { .. } => {
            let r = Report::from(&run_survey_suite(kb));
            emit(format, &r, || report::survey(&r));
            if r.passed == r.total {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(FAILURE)
            }
        }
    }
}
