use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod demo;
mod io;

use io::Failure;

#[derive(Parser)]
#[command(name = "grunits", version, about = "Group-ring unit encryption toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a unit key pair and write `<out>.pub` and `<out>.key`.
    Keygen(KeygenArgs),
    /// Encrypt a plaintext file with a public key.
    Encrypt(EncryptArgs),
    /// Decrypt a message file with a private key.
    Decrypt(DecryptArgs),
    /// Sign a plaintext with a right-sided private key.
    Sign(SignArgs),
    /// Check a signature against a public key and the claimed plaintext.
    Verify(VerifyArgs),
    /// Build an RSA key pair, optionally bundled with a unit key pair.
    RsaKeygen(RsaKeygenArgs),
    /// RSA combined with a unit key, in a chosen layer order.
    HybridEncrypt(HybridEncryptArgs),
    HybridDecrypt(HybridDecryptArgs),
    /// Hamming-encode a message's coefficients or a raw bitstream.
    CodeWrap(CodeWrapArgs),
    /// Decode a coded file, correcting one error per codeword.
    CodeUnwrap(CodeUnwrapArgs),
    /// Recover the private inverse of a cyclic public key by extended Euclid.
    Attack(AttackArgs),
    /// Time the Euclid attack on random units; prints CSV.
    AttackBench(AttackBenchArgs),
    /// Reproduce a worked example (1 to 6); all of them when omitted.
    Demo {
        example: Option<u8>,
    },
}

#[derive(Args)]
pub struct KeygenArgs {
    #[arg(long, default_value = "cyclic 16")]
    pub group: String,
    #[arg(long, default_value = "Z")]
    pub ring: String,
    /// bass, bicyclic, trial, random, binomial or product
    #[arg(long, default_value = "bass")]
    pub kind: String,
    /// Bass parameter.
    #[arg(long)]
    pub i: Option<u64>,
    /// Bicyclic `a` as an element descriptor such as `p:1,0,2`.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Coefficients for `--kind trial`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Support size for `--kind random`.
    #[arg(long)]
    pub support: Option<usize>,
    /// Binomial factor count for `--kind binomial`.
    #[arg(long, default_value_t = 4)]
    pub factors: usize,
    /// Key base names for `--kind product`, comma separated.
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub power: Option<u64>,
    /// Pad the public key to this formal length.
    #[arg(long)]
    pub disguise: Option<usize>,
    /// right, left or two-sided
    #[arg(long, default_value = "right")]
    pub side: String,
    /// Key base name supplying the left unit of a two-sided key.
    #[arg(long)]
    pub left_from: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "key")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EncryptArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Read the plaintext as one integer written in this base.
    #[arg(long)]
    pub base: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DecryptArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SignArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub sig: PathBuf,
    /// Claimed plaintext.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Args)]
pub struct RsaKeygenArgs {
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, default_value = "65537")]
    pub e: String,
    /// Prime size when `--p`/`--q` are not given.
    #[arg(long, default_value_t = 64)]
    pub bits: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Unit key base name to bundle into hybrid key files.
    #[arg(long)]
    pub with: Option<PathBuf>,
    #[arg(long, default_value = "rsa")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct HybridEncryptArgs {
    /// Hybrid public key file (RSA section followed by a GRKEY section).
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub base: u64,
    /// rsa-then-unit, unit-then-rsa or both
    #[arg(long, default_value = "rsa-then-unit")]
    pub order: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct HybridDecryptArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CodeWrapArgs {
    /// Message file whose coefficients are encoded.
    #[arg(long = "in", conflicts_with = "bits")]
    pub input: Option<PathBuf>,
    /// Raw bitstream such as `11101011001`.
    #[arg(long)]
    pub bits: Option<String>,
    /// Hamming parameter: codewords of length 2^r - 1.
    #[arg(long, default_value_t = 3)]
    pub r: u32,
    /// Flip one random bit in every codeword, seeded.
    #[arg(long)]
    pub inject: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CodeUnwrapArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct AttackArgs {
    #[arg(long = "pub")]
    pub public: PathBuf,
    /// Write the recovered inverse here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AttackBenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value = "Zmod 97")]
    pub ring: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Keygen(a) => commands::keygen(&a),
        Command::Encrypt(a) => commands::encrypt(&a),
        Command::Decrypt(a) => commands::decrypt(&a),
        Command::Sign(a) => commands::sign(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::RsaKeygen(a) => commands::rsa_keygen(&a),
        Command::HybridEncrypt(a) => commands::hybrid_encrypt(&a),
        Command::HybridDecrypt(a) => commands::hybrid_decrypt(&a),
        Command::CodeWrap(a) => commands::code_wrap(&a),
        Command::CodeUnwrap(a) => commands::code_unwrap(&a),
        Command::Attack(a) => commands::attack(&a),
        Command::AttackBench(a) => commands::attack_bench(&a),
        Command::Demo { example } => demo::run(example),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
