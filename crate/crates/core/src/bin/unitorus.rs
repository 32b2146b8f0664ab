use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use unitorus::groupfile::GroupFile;
use unitorus::report::{self, DecomposeOptions, GrowthOptions, Report};
use unitorus::Error;

#[derive(Parser)]
#[command(name = "unitorus", version, about = "Unipotent automorphism groups of complex tori, in exact arithmetic")]
struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unipotence, quasi-unipotent orders, nilpotency class and derived length.
    AnalyzeGroup { file: PathBuf },
    /// Growth exponents on every H^{p,q} for generators and positive words.
    Growth {
        file: PathBuf,
        /// `all` or `p,q`.
        #[arg(long, default_value = "all")]
        pq: String,
        /// Random Kähler classes used for the generic top index.
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        max_word_len: usize,
        /// Also write the exponent table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Invariant chain, filtration, s-sequence and h-level for one generator.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        generator: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random Kähler tuples per level in the semidefiniteness checks.
        #[arg(long, default_value_t = 2)]
        tuples: usize,
        /// Reference Kähler class as JSON rows of rationals, e.g. `[["2","1"],["1","2"]]`.
        #[arg(long)]
        omega: Option<String>,
        /// Skip the joint chain for all generators.
        #[arg(long)]
        no_group_chain: bool,
    },
    /// Build a gallery case (`u_n N`, `affine N KAPPA`, `eisenstein N`), write it and run the suite.
    Gallery {
        name: String,
        params: Vec<usize>,
        /// Where to write the group file; defaults to `<case>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every invariant suite on seeded random unipotent groups.
    Fuzz {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gallery suites, fuzz runs for n = 2..4 and the standalone checks.
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fuzz cases per dimension.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Invariant { .. }
        | Error::BadComplexStructure(_)
        | Error::BadParameters(_)
        | Error::BadDegree { .. }
        | Error::NotKahler
        | Error::DimensionMismatch(_) => 2,
        Error::LChainNotFound { .. } | Error::NotUnipotent(_) | Error::NotQuasiUnipotent => 4,
        _ => 3,
    }
}

fn load(path: &Path) -> unitorus::Result<GroupFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    GroupFile::parse(&text)
}

fn write(path: &Path, text: &str) -> unitorus::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::BadParameters(format!("{}: {e}", path.display())))
}

fn parse_pq(s: &str) -> unitorus::Result<Option<(usize, usize)>> {
    if s == "all" {
        return Ok(None);
    }
    let bad = || Error::Parse(format!("--pq expects `all` or `p,q`, got {s:?}"));
    let (p, q) = s.split_once(',').ok_or_else(bad)?;
    Ok(Some((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)))
}

fn run(cmd: Command) -> unitorus::Result<Report> {
    match cmd {
        Command::AnalyzeGroup { file } => report::analyze_group(&load(&file)?),
        Command::Growth { file, pq, samples, max_word_len, csv, seed } => {
            let f = load(&file)?;
            let opts = GrowthOptions { pq: parse_pq(&pq)?, samples, max_word_len, seed };
            let out = report::growth(&f, &opts)?;
            if let Some(path) = csv {
                write(&path, &out.csv)?;
            }
            Ok(out.report)
        }
        Command::Decompose { file, generator, seed, tuples, omega, no_group_chain } => {
            let f = load(&file)?;
            let omega = omega.map(|s| report::parse_omega(&s, f.n())).transpose()?;
            report::decompose(&f, generator, &DecomposeOptions { seed, tuples, omega, group_chain: !no_group_chain })
        }
        Command::Gallery { name, params, out, seed } => {
            let case = report::gallery_case(&name, &params)?;
            let file = GroupFile::from_case(&case);
            let text = file.to_canonical();
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{}.json", case.name)));
            write(&path, &text)?;
            let reread = load(&path)?;
            let mut r = report::suite(&reread, seed)?.body;
            r["command"] = json!("gallery");
            r["case"] = json!(case.name);
            r["round_trip"] = json!({ "name": "group file round trip", "pass": reread.to_canonical() == text });
            Ok(Report::new(r))
        }
        Command::Fuzz { n, count, seed } => report::fuzz(n, count, seed),
        Command::VerifyAll { seed, count } => report::verify_all(seed, count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(r) => {
            print!("{}", r.to_json());
            ExitCode::from(r.outcome.exit_code() as u8)
        }
        Err(e) => {
            let code = exit_code_for(&e);
            let body = json!({ "error": e.to_string(), "kind": format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("") });
            eprintln!("{}", serde_json::to_string_pretty(&body).expect("error serializes"));
            ExitCode::from(code)
        }
    }
}
