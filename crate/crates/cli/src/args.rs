use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Fixed points of modalized formulas in wGL_n.
#[derive(Debug, Parser)]
#[command(name = "wglfp", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a fixed point F of A(p), with F <-> A(F) provable in wGL_n.
    Fixpoint(FixpointArgs),
    /// Check a proposed fixed point by certificate, bounded model search, or both.
    Verify(VerifyArgs),
    /// Check a JSON proof certificate with the kernel.
    CheckCert(CheckCertArgs),
    /// Modal depths of a variable, optionally with residues.
    Depths(DepthsArgs),
    /// Bounded search for a falsifying model over wGL_n frames.
    Countermodel(CountermodelArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Formula text, `@path` to read a file, or `-` for stdin.
    #[arg(long, value_name = "FORMULA")]
    pub formula: String,
    /// Emit a single JSON object.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FixpointArgs {
    #[command(flatten)]
    pub common: Common,
    /// Logic index n >= 1.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "p")]
    pub var: String,
    /// Print the fixed point simplified (certificates stay unsimplified).
    #[arg(long)]
    pub simplify: bool,
    /// Always run the general loop instead of the closed-form shortcuts.
    #[arg(long)]
    pub general: bool,
    #[arg(long, value_name = "PATH")]
    pub certificate_out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub trace_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cert,
    Kripke,
    Both,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "p")]
    pub var: String,
    /// The proposed fixed point, same syntax as --formula.
    #[arg(long, value_name = "FORMULA")]
    pub candidate: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 3)]
    pub max_worlds: usize,
    /// Write the certificate of candidate <-> A(candidate), when one is found.
    #[arg(long, value_name = "PATH")]
    pub certificate_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckCertArgs {
    /// Certificate file, or `-` for stdin.
    pub certificate: String,
    /// Require the certificate to be for this logic index.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DepthsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "p")]
    pub var: String,
    /// Also report residues modulo this n.
    #[arg(long = "mod", value_name = "N")]
    pub modulus: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CountermodelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub max_worlds: usize,
}
