use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use cytube::archive::{write_atomic, JetArchive};
use cytube::pipeline::{solve, Solution};
use cytube::scenario::{Overrides, ScenarioConfig};
use cytube::verify::{certificate_report, fd_slope, Bound, Certificate};
use cytube::{ArchiveError, Coeff, ConfigError, ExactComplex, Mode, SolveError};

const EXIT_CERTIFICATE_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cytube",
    version,
    about = "Calabi-Yau structures on tubes as truncated power series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write phi.jet, h.jet, z.jet and J.jet.
    Solve(RunArgs),
    /// Solve, check every identity and write certificate.txt.
    Verify(RunArgs),
    /// Print a residual table; write report.txt and ma_residual_vs_r.dat.
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Override one tolerance; repeatable.
    #[arg(long = "tolerance", value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
    /// Sampling radius of the plurisubharmonicity check.
    #[arg(long)]
    radius: Option<f64>,
    /// Number of sample points of the plurisubharmonicity check.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("bad tolerance value `{value}`"))?;
    Ok((name.trim().to_string(), value))
}

enum Failure {
    Config(ConfigError),
    Numerical(SolveError),
    Io(ArchiveError),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        Failure::Numerical(e)
    }
}

impl From<ArchiveError> for Failure {
    fn from(e: ArchiveError) -> Self {
        Failure::Io(e)
    }
}

#[derive(Clone, Copy)]
enum Action {
    Solve,
    Verify,
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (action, args) = match cli.command {
        Command::Solve(a) => (Action::Solve, a),
        Command::Verify(a) => (Action::Verify, a),
        Command::Report(a) => (Action::Report, a),
    };
    match run(action, &args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CERTIFICATE_FAIL),
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn run(action: Action, args: &RunArgs) -> Result<bool, Failure> {
    let mut cfg = ScenarioConfig::load(&args.scenario)?;
    cfg.apply(&Overrides {
        order: args.order,
        mode: args.mode,
        tolerances: args.tolerances.clone(),
        radius: args.radius,
        samples: args.samples,
        output: args.output.clone(),
    })?;
    match cfg.mode {
        Mode::Exact => run_mode::<ExactComplex>(action, &cfg),
        Mode::Binary64 => run_mode::<Complex64>(action, &cfg),
    }
}

/// Everything is computed before anything is written, and each file is
/// written atomically, so a failed run leaves no partial artifacts.
fn run_mode<C: Coeff>(action: Action, cfg: &ScenarioConfig) -> Result<bool, Failure> {
    let metric = cfg.metric_jet::<C>()?;
    let field = cfg.vector_field_jet::<C>()?;
    let s = solve(&metric, &field)?;
    let out = cfg.output_dir();
    let files: Vec<(&str, String)> = match action {
        Action::Solve => archives(&s),
        Action::Verify => {
            let cert = certificate_report(&cfg.name, &s, &cfg.verify_options())?;
            print!("{cert}");
            let pass = cert.passed();
            write_all(&out, &[("certificate.txt", cert.to_string())])?;
            return Ok(pass);
        }
        Action::Report => {
            let cert = certificate_report(&cfg.name, &s, &cfg.verify_options())?;
            let slope = fd_slope(&s, &cfg.slope_radii)?;
            let table = report_table(&cert);
            print!("{table}");
            let mut dat = String::from("# r ma_residual\n");
            for (r, v) in slope.radii.iter().zip(&slope.residuals) {
                writeln!(dat, "{r:.6e} {v:.6e}").unwrap();
            }
            vec![("report.txt", table), ("ma_residual_vs_r.dat", dat)]
        }
    };
    write_all(&out, &files)?;
    for (name, _) in &files {
        println!("wrote {}", out.join(name).display());
    }
    Ok(true)
}

fn archives<C: Coeff>(s: &Solution<C>) -> Vec<(&'static str, String)> {
    let space = s.chart.chart_space.clone();
    let mut phi = JetArchive::new(&space);
    phi.push("phi", &s.phi.phi);
    let mut h = JetArchive::new(&space);
    h.push("h", &s.h.h);
    let mut z = JetArchive::new(&space);
    for (k, zk) in s.structure.z.iter().enumerate() {
        z.push(&format!("z[{k}]"), zk);
    }
    let mut j = JetArchive::new(&space);
    let jm = &s.structure.jmat;
    for r in 0..jm.rows() {
        for c in 0..jm.cols() {
            j.push(&format!("J[{r}][{c}]"), jm.get(r, c));
        }
    }
    vec![
        ("phi.jet", phi.to_text()),
        ("h.jet", h.to_text()),
        ("z.jet", z.to_text()),
        ("J.jet", j.to_text()),
    ]
}

fn write_all(dir: &Path, files: &[(&str, String)]) -> Result<(), ArchiveError> {
    for (name, text) in files {
        write_atomic(&dir.join(name), text.as_bytes())?;
    }
    Ok(())
}

fn report_table(cert: &Certificate) -> String {
    let mut t = String::new();
    writeln!(
        t,
        "scenario {}  order {}  mode {}",
        cert.scenario, cert.order, cert.mode
    )
    .unwrap();
    writeln!(
        t,
        "{:<30} {:>14} {:>4} {:>14} {:>6}",
        "check", "value", "", "tolerance", "status"
    )
    .unwrap();
    for c in &cert.checks {
        let op = match c.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        let status = if c.pass { "PASS" } else { "FAIL" };
        writeln!(
            t,
            "{:<30} {:>14.6e} {op:>4} {:>14.6e} {status:>6}",
            c.name, c.value, c.tolerance
        )
        .unwrap();
    }
    writeln!(t, "result {}", if cert.passed() { "PASS" } else { "FAIL" }).unwrap();
    t
}
