mod args;

use std::collections::BTreeMap;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use scholarlens::pipeline::{self, PipelineError, RunConfig, RunOutcome, Stage};

use args::{Cli, Command};

const EXIT_STAGE_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INPUT: u8 = 3;

fn init_logging(cli: &Cli) {
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        }
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .init();
}

fn stages_for(command: &Command, config: &RunConfig) -> Vec<Stage> {
    let topical: &[Stage] = if config.topics.is_empty() {
        &[]
    } else {
        &[Stage::Trends, Stage::Relevance]
    };
    match command {
        Command::Clean(_) | Command::Config(_) => vec![Stage::Clean],
        Command::Analyze(_) => [&[Stage::Graphs][..], topical].concat(),
        Command::Report(_) => [&[Stage::Report][..], topical].concat(),
        Command::Run { stages, .. } if stages.is_empty() => Stage::ALL.to_vec(),
        Command::Run { stages, .. } => stages.clone(),
    }
}

fn print_summary(outcome: &RunOutcome, dry_run: bool) {
    eprintln!(
        "{} records read, {} kept, {} outside the query levels",
        outcome.parsed, outcome.papers, outcome.excluded_by_query
    );
    let mut by_kind: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for d in &outcome.diagnostics {
        let entry = by_kind.entry(format!("{:?}", d.kind)).or_default();
        entry.0 += 1;
        if d.rejected {
            entry.1 += 1;
        }
    }
    for (kind, (count, rejected)) in by_kind {
        eprintln!("  {kind}: {count} ({rejected} rejected)");
    }
    if dry_run {
        eprintln!("dry run: nothing written");
        return;
    }
    for artifact in &outcome.bundle.artifacts {
        println!("{}", artifact.path.display());
    }
}

fn real_main(cli: &Cli) -> Result<ExitCode> {
    let run_args = match &cli.command {
        Command::Clean(a) | Command::Analyze(a) | Command::Report(a) | Command::Config(a) => a,
        Command::Run { args, .. } => args,
    };
    let config = match run_args.to_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
    };
    if let Command::Config(_) = cli.command {
        print!("{}", config.to_toml_string());
        return Ok(ExitCode::SUCCESS);
    }
    let stages = stages_for(&cli.command, &config);
    match pipeline::run(&config, &stages) {
        Ok(outcome) => {
            if !cli.quiet {
                print_summary(&outcome, config.dry_run);
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(PipelineError::Config(e)) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(EXIT_CONFIG))
        }
        Err(PipelineError::Input(e)) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(EXIT_INPUT))
        }
        Err(PipelineError::Stages { failures, bundle }) => {
            for f in &failures {
                eprintln!("error: {f}");
            }
            for artifact in &bundle.artifacts {
                println!("{}", artifact.path.display());
            }
            Ok(ExitCode::from(EXIT_STAGE_FAILED))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(&cli);
    match real_main(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
