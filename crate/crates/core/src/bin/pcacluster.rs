use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pcacluster::config::{KeyValues, PipelineConfig};
use pcacluster::pipeline::run_pipeline;
use pcacluster::report::ArtifactWriter;
use pcacluster::synthetic::{generate_synthetic, SyntheticSpec};
use pcacluster::Error;

/// Correlation PCA and complete-linkage clustering of regional indicators.
#[derive(Parser)]
#[command(name = "pcacluster", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a synthetic table and its planted partition.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn synth(spec_path: &Path, out: &Path) -> Result<(), Error> {
    let text = std::fs::read_to_string(spec_path).map_err(|e| Error::Io {
        path: spec_path.to_path_buf(),
        source: e,
    })?;
    let spec = SyntheticSpec::from_key_values(&KeyValues::parse(&text)?, "")?;
    let (table, truth) = generate_synthetic(&spec)?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    let mut writer = ArtifactWriter::new(out)?;
    writer.write("synthetic_table.csv", &String::from_utf8_lossy(&buf))?;
    writer.write("truth.csv", &truth.to_csv("region", table.region_labels()))?;
    writer.finish()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PCACLUSTER_LOG", "warn"))
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run { config } => PipelineConfig::from_file(config)
            .map_err(|e| (e.exit_code(), format!("config stage failed: {e}")))
            .and_then(|cfg| {
                run_pipeline(&cfg)
                    .map(|summary| {
                        println!(
                            "wrote {} artifacts to {} ({} components retained)",
                            summary.manifest.entries.len(),
                            cfg.output.display(),
                            summary.retained
                        );
                    })
                    .map_err(|e| (e.exit_code(), e.to_string()))
            }),
        Command::Synth { spec, out } => {
            synth(spec, out).map_err(|e| (e.exit_code(), format!("synth failed: {e}")))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("pcacluster: {message}");
            ExitCode::from(code as u8)
        }
    }
}
