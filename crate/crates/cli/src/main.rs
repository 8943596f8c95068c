use std::process::ExitCode;

use clap::Parser;
use ffbt_cli::{parse_config, run, Cli, CliError, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ffbt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let mut flags = cli.flags.clone();
    // the verification suite fixes its own fields
    if matches!(cli.command, Command::Verify { .. })
        && flags.q.is_none()
        && flags.p.is_none()
        && flags.config.is_none()
    {
        flags.q = Some(2);
    }
    let cfg = parse_config(&flags)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let report = run(&cli.command, &cfg)?;
    let text = report.render();
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}
