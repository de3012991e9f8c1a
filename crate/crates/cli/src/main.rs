use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use g2glue_cli::config::Format;
use g2glue_cli::{run, CliError, RunConfig, Suite};

/// Numerical verification suites for torsion-free G2 structures glued from
/// Eguchi-Hanson spaces.
#[derive(Parser, Debug)]
#[command(name = "g2glue", version)]
struct Cli {
    /// `key = value` configuration file with [eh], [cone], [rates], [kummer], [torus], [output] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files; the JSON report always goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eguchi-Hanson geometry.
    Eh {
        #[command(subcommand)]
        cmd: EhCmd,
    },
    /// Critical rates of the cone over S^3/SO(3).
    Cone {
        #[command(subcommand)]
        cmd: ConeCmd,
    },
    /// Torsion rate calculator.
    Rates {
        #[command(subcommand)]
        cmd: RatesCmd,
    },
    /// The orbifold T^7/Gamma and its resolution.
    Kummer {
        #[command(subcommand)]
        cmd: KummerCmd,
    },
    /// Fixed-point iteration on the flat torus.
    Torus {
        #[command(subcommand)]
        cmd: TorusCmd,
    },
    /// Every suite with the configured parameters.
    All,
}

#[derive(Subcommand, Debug)]
enum EhCmd {
    /// Closedness, duality and rescaling identities.
    Verify {
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        seed: Option<String>,
    },
    /// ALE decay table of tau_1 and the decay rate of nu.
    Decay {
        /// Comma separated list.
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        r_min: Option<String>,
        #[arg(long)]
        r_max: Option<String>,
        #[arg(long)]
        points: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ConeCmd {
    /// Critical rates with order in [from, to).
    Rates {
        #[arg(long)]
        degree: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
    },
    /// Log terms and index jump at the critical rate -2.
    Index,
    /// Sphere spectrum and harmonic 2-forms on R^4.
    Oracle,
}

#[derive(Subcommand, Debug)]
enum RatesCmd {
    /// Weighted torsion exponent and kappa feasibility.
    Jk {
        /// naive or refined.
        #[arg(long)]
        table: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long = "B", allow_hyphen_values = true)]
        big_b: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum KummerCmd {
    /// Fixed tori and singular components.
    FixedPoints {
        #[arg(long)]
        b2: Option<String>,
    },
    /// Torsion of the glued structure as t shrinks.
    Torsion {
        /// Comma separated list.
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        samples: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum TorusCmd {
    /// Runs the iteration and reports residuals.
    Solve {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        /// flat or cg.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        max_iter: Option<String>,
        /// Binary dump of the corrected 3-form.
        #[arg(long)]
        dump: Option<String>,
    },
}

type Overrides = Vec<(&'static str, &'static str, Option<String>)>;

fn suite_and_overrides(command: Command) -> (Suite, Overrides) {
    match command {
        Command::Eh { cmd: EhCmd::Verify { samples, seed } } => {
            (Suite::EhVerify, vec![("eh", "samples", samples), ("eh", "seed", seed)])
        }
        Command::Eh { cmd: EhCmd::Decay { k, r_min, r_max, points } } => (
            Suite::EhDecay,
            vec![("eh", "k", k), ("eh", "r_min", r_min), ("eh", "r_max", r_max), ("eh", "points", points)],
        ),
        Command::Cone { cmd: ConeCmd::Rates { degree, from, to } } => {
            (Suite::ConeRates, vec![("cone", "degree", degree), ("cone", "from", from), ("cone", "to", to)])
        }
        Command::Cone { cmd: ConeCmd::Index } => (Suite::ConeIndex, vec![]),
        Command::Cone { cmd: ConeCmd::Oracle } => (Suite::ConeOracle, vec![]),
        Command::Rates { cmd: RatesCmd::Jk { table, beta, big_b } } => {
            (Suite::RatesJk, vec![("rates", "table", table), ("rates", "beta", beta), ("rates", "B", big_b)])
        }
        Command::Kummer { cmd: KummerCmd::FixedPoints { b2 } } => (Suite::KummerFixedPoints, vec![("kummer", "b2", b2)]),
        Command::Kummer { cmd: KummerCmd::Torsion { t, samples, beta } } => (
            Suite::KummerTorsion,
            vec![("kummer", "t", t), ("kummer", "samples", samples), ("kummer", "beta", beta)],
        ),
        Command::Torus { cmd: TorusCmd::Solve { n, eps, seed, tol, mode, max_iter, dump } } => (
            Suite::TorusSolve,
            vec![
                ("torus", "n", n),
                ("torus", "eps", eps),
                ("torus", "seed", seed),
                ("torus", "tol", tol),
                ("torus", "mode", mode),
                ("torus", "max_iter", max_iter),
                ("torus", "dump", dump),
            ],
        ),
        Command::All => (Suite::All, vec![]),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("G2GLUE_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("G2GLUE_THREADS: expected a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("G2GLUE_THREADS: {e}")))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (suite, overrides) = suite_and_overrides(cli.command);
    for (section, key, value) in overrides {
        if let Some(v) = value {
            cfg.set(section, key, &v)?;
        }
    }
    if let Some(dir) = cli.out {
        cfg.output.dir = Some(dir);
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    let start = Instant::now();
    let mut report = run(suite, &cfg)?;
    report.timing.seconds = start.elapsed().as_secs_f64();
    print!("{}", report.to_json());
    if let Some(dir) = &cfg.output.dir {
        report.write(dir, cfg.output.format)?;
    }
    for c in report.failures() {
        eprintln!("FAIL {}: {}", c.name, c.law);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
