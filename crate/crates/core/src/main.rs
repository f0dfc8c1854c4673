use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uncertain_priors::codec::{decode_max_q, encode_error_free, encode_positive_error, Codeword};
use uncertain_priors::harness::files::write_json;
use uncertain_priors::harness::{run_experiment, sweep, ExperimentConfig, PriorFile, Role};
use uncertain_priors::instance::{hard_instance, random_close_pair, InstanceFile, InstanceMetadata};
use uncertain_priors::{Error, Result, StreamSeed};

#[derive(Parser)]
#[command(author, version, about = "Uncertain-priors source coding: codecs, instances, experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hard,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ef,
    Pe,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a prior pair and write it as an instance file
    GenInstance {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "hard")]
        kind: Kind,
        /// Message count for random pairs
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        seed: StreamSeed,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode one message under the sender's prior; prints the codeword JSON
    Encode {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Distribution or instance file (the sender prior is used)
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        message: usize,
        #[arg(long)]
        seed: StreamSeed,
        /// Write the codeword here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a codeword under the receiver's prior; prints the message index
    Decode {
        /// Distribution or instance file (the receiver prior is used)
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        codeword: PathBuf,
        #[arg(long)]
        seed: StreamSeed,
    },
    /// Run one Monte Carlo experiment from a JSON config
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the config at every (alpha, epsilon) grid point
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated alphas; may be empty
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        alphas: Vec<f64>,
        /// Comma-separated epsilons (positive_error only)
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
    },
}

fn gen_instance(alpha: f64, kind: Kind, size: Option<usize>, seed: StreamSeed, out: &Path) -> Result<()> {
    let mut rng = ChaCha8Rng::from_seed(*seed.as_bytes());
    let file = match kind {
        Kind::Hard => InstanceFile::from_hard(&hard_instance(alpha, &mut rng)?, Some(seed.to_hex())),
        Kind::Random => {
            let size = size.ok_or_else(|| Error::InvalidConfig("--size is required for random instances".into()))?;
            let (p, q) = random_close_pair(alpha, size, &mut rng)?;
            InstanceFile::from_pair(
                &p,
                &q,
                Some(InstanceMetadata {
                    kind: "random".into(),
                    alpha,
                    k: None,
                    m: None,
                    s: None,
                    generator_seed: Some(seed.to_hex()),
                }),
            )
        }
    };
    write_json(out, &file)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenInstance {
            alpha,
            kind,
            size,
            seed,
            out,
        } => gen_instance(alpha, kind, size, seed, &out),
        Command::Encode {
            scheme,
            dist,
            alpha,
            epsilon,
            message,
            seed,
            out,
        } => {
            let p = PriorFile::load(&dist)?.prior(Role::Sender)?;
            let codeword = match (scheme, epsilon) {
                (SchemeArg::Ef, None) => encode_error_free(message, &p, alpha, &seed)?.codeword,
                (SchemeArg::Pe, Some(e)) => encode_positive_error(message, &p, alpha, e, &seed)?,
                (SchemeArg::Ef, Some(_)) => {
                    return Err(Error::InvalidConfig("--epsilon applies only to --scheme pe".into()))
                }
                (SchemeArg::Pe, None) => {
                    return Err(Error::InvalidConfig("--scheme pe requires --epsilon".into()))
                }
            };
            let json = serde_json::to_string(&codeword)?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Decode { dist, codeword, seed } => {
            let q = PriorFile::load(&dist)?.prior(Role::Receiver)?;
            let text = std::fs::read_to_string(&codeword)?;
            let c: Codeword =
                serde_json::from_str(&text).map_err(|e| Error::InvalidCodeword(e.to_string()))?;
            let m = decode_max_q(&c, &q, &seed)?;
            match q.message_set().label(m) {
                Some(label) => println!("{m}\t{label}"),
                None => println!("{m}"),
            }
            Ok(())
        }
        Command::Experiment { config } => {
            let config = ExperimentConfig::load(&config)?;
            let experiment = run_experiment(&config)?;
            let report = experiment.report();
            if let Some(dir) = &config.output_path {
                experiment.write_outputs(dir)?;
            }
            print!("{}", report.render());
            if report.failed() {
                return Err(Error::ContractViolation("measured results violate the scheme's bounds".into()));
            }
            Ok(())
        }
        Command::Sweep {
            config,
            alphas,
            epsilons,
        } => {
            let config = ExperimentConfig::load(&config)?;
            let table = sweep(&config, &alphas, epsilons.as_deref())?;
            match &config.output_path {
                Some(dir) => table.write_outputs(dir)?,
                None => table.write_csv(std::io::stdout().lock())?,
            }
            if let Some(failure) = table.failures().next() {
                eprintln!("error: {}", failure.message);
                std::process::exit(failure.exit_code);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
