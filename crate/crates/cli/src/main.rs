//! `weilrep`: Weil representations of lattices from the command line.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weilrep_cli::{error_response, load_lattice, parse_matrix, pretty, run, Command, Format, Request, DEFAULT_PRECISION};

#[derive(Parser)]
#[command(name = "weilrep", version, about = "Exact Weil representations of Mp₂(ℤ) attached to lattices")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discriminant form: invariants and every element with its norm.
    Discform(Common),
    /// Jordan decompositions and local Weil indices.
    Jordan(Common),
    /// Milgram's sum against ζ₈^sgn √Δ.
    Milgram(Common),
    /// The matrix ρ(A, ε) in the basis of discriminant-form elements.
    Rho(Common),
    /// Closed and brute-force Gauss sums.
    Gauss(Common),
    /// Predicted kernel of the representation.
    Kernel(Common),
    /// Run every property suite on the lattice.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Gram matrix as inline JSON (`[[2]]` or `{"gram": [[2]]}`) or a file holding it.
    #[arg(long)]
    lattice: String,
    /// Matrix entries "a,b,c,d" or `[[a,b],[c,d]]`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Sign ε of the square-root branch.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_eps)]
    eps: Option<i8>,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<i64>,
    /// Working precision of numeric output, in bits.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[arg(long, value_enum, default_value_t = FormatArg::Exact)]
    format: FormatArg,
    /// Human-readable text instead of JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Exact,
    Numeric,
    Both,
}

fn parse_eps(s: &str) -> Result<i8, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("ε must be 1 or -1, got {s}")),
    }
}

fn request(command: Command, args: &Common) -> weilrep::Result<Request> {
    let mut req = Request::new(command, load_lattice(&args.lattice)?);
    req.matrix = args.matrix.as_deref().map(parse_matrix).transpose()?;
    req.eps = args.eps;
    req.prime = args.prime;
    req.a = args.a;
    req.c = args.c;
    req.precision = Some(args.precision);
    req.format = match args.format {
        FormatArg::Exact => Format::Exact,
        FormatArg::Numeric => Format::Numeric,
        FormatArg::Both => Format::Both,
    };
    Ok(req)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Discform(a) => (Command::Discform, a),
        Cmd::Jordan(a) => (Command::Jordan, a),
        Cmd::Milgram(a) => (Command::Milgram, a),
        Cmd::Rho(a) => (Command::Rho, a),
        Cmd::Gauss(a) => (Command::Gauss, a),
        Cmd::Kernel(a) => (Command::Kernel, a),
        Cmd::Verify(a) => (Command::Verify, a),
    };
    let response = match request(command, args) {
        Ok(req) => run(&req),
        Err(e) => error_response(&e),
    };
    let text = if args.pretty {
        pretty::render(&response.doc)
    } else {
        format!("{}\n", response.doc)
    };
    // a closed pipe is not an error worth reporting
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::from(response.code as u8)
}
