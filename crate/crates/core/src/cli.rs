//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on a usage
//! error. Output is written in a fixed order and depends only on the flags.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diffring::CoeffExpr;
use crate::dynamics::{self, Integrator, SimConfig, SimSummary, State};
use crate::error::Error;
use crate::integrals::{
    build_formulaccia, build_geodesic, build_h, build_h0, build_h1, build_h2, build_h3, build_h4,
    build_hg, build_i, build_xl_power, check_lambda, FMode, ModelParams,
};
use crate::phasepoly::{Dims, MomentumIndex, PhasePoly};
use crate::verify::{self, BrokenCondition};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "calogero",
    version,
    about = "Exact first integrals of sin^-2 angular potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the degree-lambda integral.
    Build {
        #[arg(long, allow_negative_numbers = true)]
        lambda: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Append how s and c relate to psi and psi0.
        #[arg(long)]
        psi0_note: bool,
    },
    /// Check that brackets with the Hamiltonian vanish.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        lambda_max: Option<i64>,
        /// The four quadratic integrals with F left arbitrary.
        #[arg(long)]
        generic_f: bool,
        /// The quadratic integrals and I in three dimensions.
        #[arg(long)]
        three_d: bool,
        /// Corrupt the first built integral (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Compare the double-sum formula with the ladder integral of frequency 2n+1.
    Compare {
        #[arg(long)]
        n: u32,
    },
    /// Exact Jacobian ranks at seeded rational points.
    Rank {
        #[arg(long, allow_negative_numbers = true)]
        lambda: i64,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Residuals of the ladder construction when one condition is broken.
    Onlyif {
        #[arg(long, allow_negative_numbers = true)]
        lambda: i64,
    },
    /// Parity of the integral under the shift psi -> psi + pi/lambda.
    Symmetry {
        #[arg(long, allow_negative_numbers = true)]
        lambda: i64,
    },
    /// Integrate the flow and report drift of the integrals.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: i64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub psi0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Initial state; drawn from the seed when omitted.
    #[arg(long, allow_negative_numbers = true, requires_all = ["y", "px", "py"])]
    pub x: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "x")]
    pub y: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "x")]
    pub z: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "x")]
    pub px: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "x")]
    pub py: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "x")]
    pub pz: Option<f64>,
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub dt: f64,
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    #[arg(long, default_value = "composition4", value_parser = parse_integrator)]
    pub integrator: Integrator,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub sample_every: usize,
    #[arg(long)]
    pub three_d: bool,
    /// CSV destination; the JSON summary goes to stdout.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_integrator(s: &str) -> Result<Integrator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidLambda(_) | Error::InvalidConfig(_) | Error::InvalidPoint(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = std::result::Result<bool, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAIL
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Build {
            lambda,
            format,
            psi0_note,
        } => cmd_build(lambda, format, psi0_note, out),
        Command::Verify {
            lambda_max,
            generic_f,
            three_d,
            inject_fault,
        } => cmd_verify(lambda_max, generic_f, three_d, inject_fault, out),
        Command::Compare { n } => cmd_compare(n, out),
        Command::Rank {
            lambda,
            points,
            seed,
            format,
        } => cmd_rank(lambda, points, seed, format, out),
        Command::Onlyif { lambda } => cmd_onlyif(lambda, out),
        Command::Symmetry { lambda } => cmd_symmetry(lambda, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
    }
}

fn cmd_build(lambda: i64, format: Format, psi0_note: bool, out: &mut dyn Write) -> Outcome {
    let p = ModelParams::new(lambda)?;
    let i = build_i(&p);
    match format {
        Format::Text => {
            writeln!(out, "{i}")?;
            if psi0_note {
                writeln!(
                    out,
                    "# s = sin({lambda}*psi + psi0), c = cos({lambda}*psi + psi0)"
                )?;
            }
        }
        Format::Json => writeln!(out, "{}", i.to_json())?,
    }
    Ok(true)
}

/// One bracket of the verification table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketCheck {
    pub label: String,
    pub vanishes: bool,
}

fn bracket(label: String, h: &PhasePoly, q: &PhasePoly, dims: Dims, lambda: u32) -> BracketCheck {
    BracketCheck {
        label,
        vanishes: verify::is_conserved(h, q, dims, lambda),
    }
}

/// The bracket list run by `verify`. `lambda_max = None` skips the
/// frequency-dependent families.
pub fn verification_plan(
    lambda_max: Option<u32>,
    generic_f: bool,
    three_d: bool,
    inject_fault: bool,
) -> Result<Vec<BracketCheck>, Error> {
    let mut checks = Vec::new();
    let mut faulty = inject_fault;
    let mut corrupt = |q: PhasePoly| {
        if std::mem::take(&mut faulty) {
            &q + &PhasePoly::monomial(MomentumIndex::new(1, 0, 0), CoeffExpr::one(), q.dims())
        } else {
            q
        }
    };
    if generic_f {
        let p = ModelParams::new(1)?.with_mode(FMode::Jet);
        let h0 = build_h0(&p);
        let quads = [
            ("H1", build_h1()),
            ("H2", build_h2(&p)),
            ("H3", build_h3(&p)),
            ("H4", build_h4(&p)),
        ];
        for (name, q) in quads {
            checks.push(bracket(
                format!("{{H0, {name}}} generic F"),
                &h0,
                &corrupt(q),
                Dims::Three,
                1,
            ));
        }
    }
    if three_d {
        let p = ModelParams::new(lambda_max.unwrap_or(1) as i64)?;
        let h0 = build_h0(&p);
        let quads = [
            ("H1", build_h1()),
            ("H2", build_h2(&p)),
            ("H3", build_h3(&p)),
            ("H4", build_h4(&p)),
        ];
        for (name, q) in quads {
            checks.push(bracket(
                format!("{{H0, {name}}}"),
                &h0,
                &corrupt(q),
                Dims::Three,
                p.lambda,
            ));
        }
    }
    if let Some(n) = lambda_max {
        for lambda in 1..=n {
            let p = ModelParams::new(lambda as i64)?;
            let h = build_h(&p);
            let i = corrupt(build_i(&p));
            checks.push(bracket(
                format!("{{H, I_{lambda}}}"),
                &h,
                &i,
                Dims::Two,
                lambda,
            ));
            if three_d {
                let h0 = build_h0(&p);
                let i3 = i.clone().with_dims(Dims::Three);
                checks.push(bracket(
                    format!("{{H0, I_{lambda}}} 3D"),
                    &h0,
                    &i3,
                    Dims::Three,
                    lambda,
                ));
            }
            for nu in 1..=2 {
                let q = build_xl_power(&p, nu);
                checks.push(bracket(
                    format!("{{H, X_L^{nu} I_{lambda}}}"),
                    &h,
                    &q,
                    Dims::Two,
                    lambda,
                ));
            }
            let g = build_geodesic(lambda);
            checks.push(bracket(
                format!("{{Hg, G_{lambda}}}"),
                &build_hg(),
                &g,
                Dims::Two,
                lambda,
            ));
        }
    }
    Ok(checks)
}

fn cmd_verify(
    lambda_max: Option<i64>,
    generic_f: bool,
    three_d: bool,
    inject_fault: bool,
    out: &mut dyn Write,
) -> Outcome {
    if lambda_max.is_none() && !generic_f && !three_d {
        return Err(Failure::Usage(
            "nothing to verify: pass --lambda-max, --generic-f or --three-d".into(),
        ));
    }
    let lambda_max = lambda_max.map(check_lambda).transpose()?;
    let checks = verification_plan(lambda_max, generic_f, three_d, inject_fault)?;
    for c in &checks {
        writeln!(
            out,
            "{} {}",
            if c.vanishes { "PASS" } else { "FAIL" },
            c.label
        )?;
    }
    match checks.iter().find(|c| !c.vanishes) {
        Some(c) => {
            writeln!(out, "first failing bracket: {}", c.label)?;
            Ok(false)
        }
        None => {
            writeln!(out, "all {} brackets vanish", checks.len())?;
            Ok(true)
        }
    }
}

fn cmd_compare(n: u32, out: &mut dyn Write) -> Outcome {
    let lambda = 2 * n + 1;
    let old = build_formulaccia(n);
    let i = build_i(&ModelParams::new(lambda as i64)?);
    match verify::proportionality(&old, &i) {
        Some(rho) => {
            writeln!(out, "rho = {rho}")?;
            Ok(true)
        }
        None => {
            writeln!(out, "NOT PROPORTIONAL")?;
            Ok(false)
        }
    }
}

fn cmd_rank(lambda: i64, points: usize, seed: u64, format: Format, out: &mut dyn Write) -> Outcome {
    let lambda = check_lambda(lambda)?;
    if points == 0 {
        return Err(Failure::Usage("--points must be positive".into()));
    }
    let pts = verify::sample_points(seed, points);
    let checks = verify::rank_suite(lambda, &pts)?;
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&checks)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            writeln!(out, "{text}")?;
        }
        Format::Text => {
            for c in &checks {
                let ranks: Vec<String> = c.reports.iter().map(|r| r.rank.to_string()).collect();
                let verdict = if c.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "{verdict} rank({}) = {} expected {}",
                    c.label,
                    ranks.join(","),
                    c.expected
                )?;
            }
        }
    }
    Ok(checks.iter().all(|c| c.passed()))
}

fn cmd_onlyif(lambda: i64, out: &mut dyn Write) -> Outcome {
    let lambda = check_lambda(lambda)?;
    if lambda < 2 {
        return Err(Failure::Usage("onlyif needs lambda >= 2".into()));
    }
    let cases = verify::only_if_suite(lambda)?;
    for c in &cases {
        let name = match c.broken {
            BrokenCondition::None => "control",
            BrokenCondition::Frequency => "frequency mu = 1",
            BrokenCondition::GEquation => "seed G = s*c",
            BrokenCondition::FEquation => "potential F = k/s",
        };
        let status = if c.residual_is_zero {
            "zero"
        } else {
            "nonzero"
        };
        let verdict = if c.consistent() { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict} {name}: residual {status}")?;
    }
    Ok(cases.iter().all(|c| c.consistent()))
}

fn cmd_symmetry(lambda: i64, out: &mut dyn Write) -> Outcome {
    let lambda = check_lambda(lambda)?;
    let mut ok = verify::hamiltonian_is_shift_invariant(lambda)?;
    writeln!(out, "H, L invariant: {}", if ok { "yes" } else { "no" })?;
    for (h, sign) in verify::shift_parities(lambda, 2 * lambda)? {
        let expected = if h % 2 == 0 { 1 } else { -1 };
        ok &= sign == Some(expected);
        match sign {
            Some(s) => writeln!(out, "h = {h}: parity {s:+}")?,
            None => writeln!(out, "h = {h}: parity none")?,
        }
    }
    Ok(ok)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Outcome {
    let lambda = check_lambda(a.lambda)?;
    let params = dynamics::ForceParams {
        lambda,
        psi0: a.psi0,
        k: a.k,
    };
    let tracked = dynamics::tracked_integrals(lambda, a.three_d)?;
    let initial = match a.x {
        Some(x) => State {
            x,
            y: a.y.unwrap_or(0.0),
            z: a.z.unwrap_or(0.0),
            px: a.px.unwrap_or(0.0),
            py: a.py.unwrap_or(0.0),
            pz: a.pz.unwrap_or(0.0),
        },
        None => {
            let polys: Vec<PhasePoly> = tracked.iter().map(|q| q.1.clone()).collect();
            dynamics::safe_initial_states(a.seed, 1, &params, a.three_d, &polys)?[0]
        }
    };
    let cfg = SimConfig {
        dt: a.dt,
        steps: a.steps,
        integrator: a.integrator,
        seed: a.seed,
        sample_every: a.sample_every,
        three_d: a.three_d,
        ..SimConfig::new(lambda, a.psi0, a.k, initial)
    };
    let traj = dynamics::integrate(&cfg)?;
    let report = dynamics::conserve_report(&traj, &tracked, &params)?;
    std::fs::write(&a.out, dynamics::to_csv(&traj, &report))?;
    let summary = SimSummary::new(&cfg, &traj, &report);
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(true)
}
