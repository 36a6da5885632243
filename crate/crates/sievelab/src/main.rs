//! Thin CLI over the harness: `sievelab <mode> [flags]`.
//!
//! Exit codes: 0 when every check passes, 1 when an inequality check
//! fails, 2 on usage, configuration, or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::Parser;

use sievelab::harness::{self, ExperimentSpec, Mode, SequenceKind};

#[derive(Parser, Debug)]
#[command(
    name = "sievelab",
    about = "Verification campaigns for large-sieve sums over power moduli",
    after_help = "Modes: verify-thm1, verify-thm2, verify-thm3, verify-lemma1, \
                  verify-lemma8, delta-oracle, regime-table, farey-stats.\n\
                  Flags override config-file values; config values override mode defaults."
)]
struct Cli {
    /// Experiment mode (see list below).
    mode: String,

    /// Flat key=value config file (# comments); CLI flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Sequence lengths N (comma separated).
    #[arg(long = "N", value_delimiter = ',', allow_hyphen_values = false)]
    n: Vec<u64>,

    /// Q (or Q0 / modulus cap, mode dependent; comma separated).
    #[arg(long = "Q", value_delimiter = ',')]
    q: Vec<f64>,

    /// Powers k (comma separated).
    #[arg(long = "k", value_delimiter = ',')]
    k: Vec<u32>,

    /// Epsilon exponent parameter.
    #[arg(long)]
    eps: Option<f64>,

    /// Campaign seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Sequence generator: all-ones, single-spike, random-unit, random-complex.
    #[arg(long = "gen")]
    generator: Option<String>,

    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec, String> {
    let mode = Mode::from_str(&cli.mode)?;
    let mut spec = ExperimentSpec::defaults(mode);

    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {}", path.display(), e))?;
        let map = harness::parse_config(&text)?;
        if let Some(m) = map.get("mode") {
            if Mode::from_str(m)? != mode {
                return Err(format!(
                    "config mode '{}' conflicts with CLI mode '{}'",
                    m, cli.mode
                ));
            }
        }
        if let Some(v) = map.get("N") {
            spec.n_list = harness::parse_list(v)?;
        }
        if let Some(v) = map.get("Q") {
            spec.q_list = harness::parse_list(v)?;
        }
        if let Some(v) = map.get("k") {
            spec.k_list = harness::parse_list(v)?;
        }
        if let Some(v) = map.get("eps") {
            spec.epsilon = v.parse().map_err(|e| format!("bad eps: {}", e))?;
        }
        if let Some(v) = map.get("seed") {
            spec.seed = v.parse().map_err(|e| format!("bad seed: {}", e))?;
        }
        if let Some(v) = map.get("gen") {
            spec.generator = SequenceKind::from_str(v)?;
        }
        if let Some(v) = map.get("out") {
            spec.out = Some(PathBuf::from(v));
        }
    }

    if !cli.n.is_empty() {
        spec.n_list = cli.n.clone();
    }
    if !cli.q.is_empty() {
        spec.q_list = cli.q.clone();
    }
    if !cli.k.is_empty() {
        spec.k_list = cli.k.clone();
    }
    if let Some(eps) = cli.eps {
        spec.epsilon = eps;
    }
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(g) = &cli.generator {
        spec.generator = SequenceKind::from_str(g)?;
    }
    if let Some(out) = &cli.out {
        spec.out = Some(out.clone());
    }
    Ok(spec)
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SIEVELAB_THREADS") {
        if let Ok(count) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(count).build_global();
        }
    }

    let cli = Cli::parse();
    let spec = match build_spec(&cli) {
        Ok(spec) => spec,
        Err(msg) => {
            eprintln!("sievelab: {}", msg);
            return ExitCode::from(2);
        }
    };

    let output = harness::run(&spec);
    for line in &output.summary {
        println!("{}", line);
    }

    if let Some(path) = &spec.out {
        let csv = harness::render_csv(&output.rows);
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("sievelab: cannot write {}: {}", path.display(), e);
            return ExitCode::from(2);
        }
        println!("wrote {} rows to {}", output.rows.len(), path.display());
    }

    if output.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
