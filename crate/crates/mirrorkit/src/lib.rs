//! Command-line front end of `mirrorkit-core`: input formats, reports and
//! the verification suites.

pub mod cli;
pub mod commands;
pub mod formats;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use cli::Cli;
use commands::CommandError;

/// `mirrorkit` followed by the arguments, as echoed in reports.
fn command_echo(args: &[OsString]) -> String {
    let mut parts = vec!["mirrorkit".to_string()];
    parts.extend(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()));
    parts.join(" ")
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code: 0 when every check passes, 1 on a failed check, 2 on a usage
/// or parse error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut report = report::Report::new(command_echo(&args), cli.global.seed);
    if let Err(e) = commands::execute(&cli.command, &cli.global, &mut report) {
        eprintln!("mirrorkit: {e}");
        return e.exit_code();
    }
    let passed = report.passed();
    let failed: Vec<String> = report.failed_checks().map(str::to_string).collect();
    let text = report.render(cli.global.format);
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("mirrorkit: {}", CommandError::Usage(e));
        return 2;
    }
    for name in &failed {
        eprintln!("mirrorkit: check failed: {name}");
    }
    if passed {
        0
    } else {
        1
    }
}
