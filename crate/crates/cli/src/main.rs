use std::io;
use std::process::ExitCode;

use clap::Parser;
use hyperseries_cli::commands::{run, Cli};
use hyperseries_cli::memory;

fn main() -> ExitCode {
    memory::install();
    let cli = Cli::parse();
    let code = run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
