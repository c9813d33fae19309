//! Command-line surface: key ceremonies, file encryption/decryption,
//! integrity inspection and benchmark CSV emission.
//!
//! Exit codes: 0 ok, 2 usage, 3 policy parse, 4 att_check refusal,
//! 5 integrity refusal, 6 decryption refusal, 7 I/O or file-format error.
//!
//! Note the trust model the scheme itself imposes: encryption needs the
//! master key, because the exponent q appears in every ciphertext (E_i and
//! ΔC_i). Data owners therefore receive MK from the authority, and `encrypt`
//! takes both `--pk` and `--mk`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;

use crate::abe::{self, SecurityLevel};
use crate::container;
use crate::error::{Error, RefusalStage};
use crate::pipeline::{self, ChannelModel, SweepConfig, SweepDimension};
use crate::policy;
use crate::Result;

#[derive(Parser)]
#[command(
    name = "blockabe",
    version,
    about = "Block-partitioned pipelined CP-ABE: encrypt files under threshold attribute policies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate public parameters and the master key.
    Setup {
        /// Output path for the public parameters.
        #[arg(long)]
        pk: PathBuf,
        /// Output path for the master key.
        #[arg(long)]
        mk: PathBuf,
    },
    /// Issue an attribute key for a comma-separated attribute list.
    Keygen {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        mk: PathBuf,
        /// Comma-separated attributes, e.g. "role:operator,site:plant7".
        #[arg(long)]
        attrs: String,
        /// Output path for the attribute key.
        #[arg(long)]
        sk: PathBuf,
    },
    /// Encrypt a file under a textual threshold policy. Needs the master
    /// key: the scheme embeds q-derived elements (E_i, ΔC_i) in every
    /// ciphertext, so encryptors are trusted with MK.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        mk: PathBuf,
        /// Policy text, e.g. "(A and B) or 2 of (C, D, E)".
        #[arg(long)]
        policy: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a container with an attribute key.
    Decrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a benchmark dimension and emit CSV rows for both schemes.
    Bench {
        /// Dimension to sweep.
        #[arg(long, value_enum)]
        sweep: SweepArg,
        /// Message sizes in MiB for --sweep size, e.g. "1,2,4,8,16".
        #[arg(long)]
        sizes: Option<String>,
        /// Leaf counts for --sweep leaves.
        #[arg(long)]
        leaves: Option<String>,
        /// Block counts for --sweep blocks.
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Simulated link bandwidth in MiB/s.
        #[arg(long = "channel-bandwidth", default_value_t = 10.0)]
        channel_bandwidth: f64,
        /// Simulated link latency in milliseconds.
        #[arg(long = "channel-latency", default_value_t = 20.0)]
        channel_latency: f64,
        /// sim: deterministic cost model; real: measure the actual crypto.
        #[arg(long, value_enum, default_value_t = ClockArg::Sim)]
        clock: ClockArg,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepArg {
    Size,
    Leaves,
    Blocks,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClockArg {
    Sim,
    Real,
}

/// Map every failure class to its fixed exit code.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::PolicySyntax { .. } => 3,
        Error::Refused(r) => match r.stage {
            RefusalStage::AttCheck => 4,
            RefusalStage::Integrity => 5,
            RefusalStage::Block(_) | RefusalStage::Reassembly => 6,
        },
        Error::Io(_) | Error::Decode(_) => 7,
        _ => 2,
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn load_params(path: &std::path::Path) -> Result<abe::PublicParams> {
    container::decode_public_params(&container::read_file(path)?)
}

fn dispatch(command: Command) -> Result<()> {
    let mut rng = rand::rngs::StdRng::from_entropy();
    match command {
        Command::Setup { pk, mk } => {
            let (params, master) = abe::setup(SecurityLevel::Standard128, &mut rng);
            let digest = params.digest();
            container::write_atomic(&pk, &container::encode_public_params(&params))?;
            container::write_atomic(&mk, &container::encode_master_key(&master, &digest))?;
            println!("parameter digest: {}", hex(&digest));
            Ok(())
        }
        Command::Keygen { pk, mk, attrs, sk } => {
            let params = load_params(&pk)?;
            let (master, digest) = container::decode_master_key(&container::read_file(&mk)?)?;
            if digest != params.digest() {
                return Err(Error::ParamsMismatch);
            }
            let attrs: BTreeSet<String> = attrs
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            let key = abe::keygen(&params, &master, &attrs, &mut rng)?;
            container::write_atomic(&sk, &container::encode_attribute_key(&key, &digest))?;
            println!("issued key for {} attribute(s)", key.attrs.len());
            Ok(())
        }
        Command::Encrypt { pk, mk, policy: text, input, out } => {
            let params = load_params(&pk)?;
            let (master, digest) = container::decode_master_key(&container::read_file(&mk)?)?;
            if digest != params.digest() {
                return Err(Error::ParamsMismatch);
            }
            let tree = policy::parse_policy(text.as_bytes())?;
            let message = container::read_file(&input)?;
            let (manifest, blocks) = abe::encrypt(&params, &master, &message, &tree, &mut rng)?;
            container::write_atomic(&out, &container::encode_container(&manifest, &blocks))?;
            let root = tree.node(tree.root());
            println!(
                "blocks: {}  t: {}  k: {}",
                manifest.n,
                root.children.len(),
                root.threshold().expect("policy roots are gates"),
            );
            for (i, span) in manifest.block_spans.iter().enumerate() {
                println!("block {}: {} bytes", i + 1, span.len);
            }
            Ok(())
        }
        Command::Decrypt { pk, sk, input, out } => {
            let params = load_params(&pk)?;
            let (key, digest) = container::decode_attribute_key(&container::read_file(&sk)?)?;
            if digest != params.digest() {
                return Err(Error::ParamsMismatch);
            }
            let (manifest, blocks) = container::decode_container(&container::read_file(&input)?)?;
            if manifest.params_digest != params.digest() {
                return Err(Error::ParamsMismatch);
            }
            match abe::decrypt(&manifest, blocks, &key) {
                Ok(message) => {
                    container::write_atomic(&out, &message)?;
                    println!("recovered {} bytes", message.len());
                    Ok(())
                }
                Err(Error::Refused(r)) => {
                    eprintln!("refused at stage: {}", r.stage);
                    Err(Error::Refused(r))
                }
                Err(e) => Err(e),
            }
        }
        Command::Bench {
            sweep,
            sizes,
            leaves,
            blocks,
            seed,
            channel_bandwidth,
            channel_latency,
            clock,
            out,
        } => {
            if channel_bandwidth <= 0.0
                || channel_latency < 0.0
                || !channel_bandwidth.is_finite()
                || !channel_latency.is_finite()
            {
                return Err(Error::InvalidInput(
                    "bandwidth must be positive and latency non-negative".into(),
                ));
            }
            let mut config = SweepConfig {
                dimension: match sweep {
                    SweepArg::Size => SweepDimension::Size,
                    SweepArg::Leaves => SweepDimension::Leaves,
                    SweepArg::Blocks => SweepDimension::Blocks,
                },
                channel: ChannelModel::new(
                    channel_bandwidth * 1024.0 * 1024.0,
                    channel_latency / 1000.0,
                ),
                measured: matches!(clock, ClockArg::Real),
                seed,
                ..SweepConfig::default()
            };
            if let Some(list) = sizes {
                config.sizes_mib = parse_list(&list)?;
            }
            if let Some(list) = leaves {
                config.leaf_counts = parse_u32_list(&list)?;
            }
            if let Some(list) = blocks {
                config.block_counts = parse_u32_list(&list)?;
            }
            let rows = pipeline::benchmark_sweep(&config)?;
            let csv = pipeline::rows_to_csv(&rows);
            match out {
                Some(path) => container::write_atomic(&path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("bad sweep value {s:?}")))
        })
        .collect()
}

fn parse_u32_list(text: &str) -> Result<Vec<u32>> {
    parse_list(text)?
        .into_iter()
        .map(|v| {
            u32::try_from(v).map_err(|_| Error::InvalidInput(format!("sweep value {v} too large")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct_per_stage() {
        let att = Error::refused(RefusalStage::AttCheck, "x");
        let int = Error::refused(RefusalStage::Integrity, "x");
        let blk = Error::refused(RefusalStage::Block(3), "x");
        assert_eq!(exit_code_for(&att), 4);
        assert_eq!(exit_code_for(&int), 5);
        assert_eq!(exit_code_for(&blk), 6);
        assert_eq!(
            exit_code_for(&Error::PolicySyntax { position: 0, message: "x".into() }),
            3
        );
        assert_eq!(exit_code_for(&Error::Decode("x".into())), 7);
        assert_eq!(exit_code_for(&Error::EmptyAttributeSet), 2);
        assert_eq!(exit_code_for(&Error::ParamsMismatch), 2);
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("1, 2,4").unwrap(), vec![1, 2, 4]);
        assert!(parse_list("1,x").is_err());
    }
}
