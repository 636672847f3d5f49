//! Command-line verification surface: load JSON artifacts, run the library
//! checks, and print a machine-readable report.
//!
//! Exit codes: 0 when every gating verdict passes, 1 on verification failure,
//! 2 on input errors (missing files, malformed JSON, unknown builtin names).
//! Reports go to standard output; generated artifacts go to `--out`, or to
//! standard output for `builtin` when `--out` is omitted.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use catqi::bimod2cat::{check_bimodule, check_coequalizer, compose_bimodules, Bimod2Error, DaggerBimodule};
use catqi::cpstar::{is_completely_positive, CPMap};
use catqi::frobenius::{check_frobenius, classical_structure, matrix_algebra, FrobeniusAlgebra};
use catqi::groupoid::{
    algebra_to_groupoid, are_isomorphic, groupoid_to_algebra, validate_groupoid, FiniteGroupoid,
};
use catqi::linalg::{deviation, split_projection, Check, ComplexMatrix, LinalgError};
use catqi::protocols::{
    check_security, check_teleportation, is_measurement, one_time_pad,
    standard_qubit_teleportation, ProtocolError, TeleportationData,
};
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "catqi", version, about = "Verify serialized algebras, CP maps, bimodules, groupoids, and protocol instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance on max-absolute-entry deviations.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Path for generated JSON artifacts (composites, isometries, builtins).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit the report as JSON on standard output. Always on; accepted for
    /// script compatibility.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the five algebra laws of a serialized Frobenius algebra.
    VerifyFrobenius { path: PathBuf },
    /// Check complete positivity of a serialized map candidate.
    VerifyCp { path: PathBuf },
    /// Compose two serialized bimodules by splitting the middle idempotent.
    Compose { path_m: PathBuf, path_n: PathBuf },
    /// Split a serialized dagger idempotent into an isometry.
    Split { path: PathBuf },
    /// Round-trip a serialized groupoid through its convolution algebra.
    GroupoidRoundtrip { path: PathBuf },
    /// Evaluate the teleportation equation on a serialized instance.
    TeleportCheck { path: PathBuf },
    /// Evaluate the security equation on a serialized instance.
    SecurityCheck { path: PathBuf },
    /// Emit a named built-in instance as JSON.
    Builtin { name: String },
}

#[derive(Serialize)]
struct Verdict {
    name: String,
    pass: bool,
    deviation: f64,
}

impl Verdict {
    fn from_check(name: &str, check: &Check) -> Self {
        Verdict {
            name: name.into(),
            pass: check.pass,
            deviation: finite(check.deviation),
        }
    }

    fn flag(name: &str, pass: bool) -> Self {
        Verdict {
            name: name.into(),
            pass,
            deviation: 0.0,
        }
    }

    fn failure(name: &str, deviation: f64) -> Self {
        Verdict {
            name: name.into(),
            pass: false,
            deviation: finite(deviation),
        }
    }

    /// Informational: never gates the exit code.
    fn info(name: &str, deviation: f64) -> Self {
        Verdict {
            name: name.into(),
            pass: true,
            deviation: finite(deviation),
        }
    }
}

#[derive(Serialize)]
struct Report {
    command: String,
    verdicts: Vec<Verdict>,
    elapsed_ms: f64,
}

/// Input problems exit with code 2; everything else is reported as verdicts.
struct InputError(String);

/// Prints without panicking when the consumer closes the pipe early.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn finite(deviation: f64) -> f64 {
    if deviation.is_finite() {
        deviation.max(0.0)
    } else {
        f64::MAX
    }
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write_artifact(out: &Path, value: &impl Serialize) -> Result<(), InputError> {
    let text = serde_json::to_string_pretty(value).expect("artifacts serialize");
    fs::write(out, text).map_err(|e| InputError(format!("{}: {e}", out.display())))
}

/// The worst residual across the three bimodule laws.
fn bimodule_verdict(name: &str, b: &DaggerBimodule, tol: f64) -> Verdict {
    let report = check_bimodule(b, tol);
    let worst = report
        .associative
        .deviation
        .max(report.unital.deviation)
        .max(report.dagger.deviation);
    Verdict {
        name: name.into(),
        pass: report.pass(),
        deviation: finite(worst),
    }
}

fn cmd_verify_frobenius(path: &Path, tol: f64) -> Result<(Vec<Verdict>, bool), InputError> {
    let algebra: FrobeniusAlgebra = load(path)?;
    let report = check_frobenius(&algebra, tol);
    let verdicts = vec![
        Verdict::from_check("associative", &report.associative),
        Verdict::from_check("unital", &report.unital),
        Verdict::from_check("frobenius", &report.frobenius),
        Verdict::from_check("special", &report.special),
        Verdict::from_check("commutative", &report.commutative),
    ];
    Ok((verdicts, report.structural_ok()))
}

fn cmd_verify_cp(path: &Path, tol: f64) -> Result<(Vec<Verdict>, bool), InputError> {
    let map: CPMap = load(path)?;
    let report = is_completely_positive(&map, tol);
    let negativity = if report.min_eigenvalue.is_finite() {
        (-report.min_eigenvalue).max(0.0)
    } else {
        0.0
    };
    let verdicts = vec![
        Verdict {
            name: "completely-positive".into(),
            pass: report.pass,
            deviation: finite(negativity),
        },
        Verdict {
            name: "choi-hermitian".into(),
            pass: report.hermiticity <= tol,
            deviation: finite(report.hermiticity),
        },
    ];
    Ok((verdicts, report.pass))
}

fn cmd_compose(
    path_m: &Path,
    path_n: &Path,
    tol: f64,
    out: Option<&Path>,
) -> Result<(Vec<Verdict>, bool), InputError> {
    let mb: DaggerBimodule = load(path_m)?;
    let nb: DaggerBimodule = load(path_n)?;
    let mut verdicts = vec![
        bimodule_verdict("left-factor-certified", &mb, tol),
        bimodule_verdict("right-factor-certified", &nb, tol),
    ];
    match compose_bimodules(&mb, &nb, tol) {
        Ok((composed, iso)) => {
            verdicts.push(bimodule_verdict("composite-certified", &composed, tol));
            let coequalizer = check_coequalizer(&mb, &nb, &iso, tol)
                .expect("composition already checked the endpoints");
            verdicts.push(Verdict::from_check("coequalizer", &coequalizer));
            if let Some(out) = out {
                write_artifact(out, &composed)?;
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let verdict = match e {
                Bimod2Error::MiddleAlgebraMismatch { .. } => {
                    Verdict::failure("middle-algebra-mismatch", 0.0)
                }
                Bimod2Error::NotDaggerIdempotent { deviation } => {
                    Verdict::failure("not-dagger-idempotent", deviation)
                }
                _ => Verdict::failure("compose-failed", 0.0),
            };
            verdicts.push(verdict);
        }
    }
    let pass = verdicts.iter().all(|v| v.pass);
    Ok((verdicts, pass))
}

fn cmd_split(path: &Path, tol: f64, out: Option<&Path>) -> Result<(Vec<Verdict>, bool), InputError> {
    let p: ComplexMatrix = load(path)?;
    let verdicts = match split_projection(&p, tol) {
        Ok(iso) => {
            if let Some(out) = out {
                write_artifact(out, &iso)?;
            }
            let idempotency = deviation(&(&p * &p), &p).max(deviation(&p.dagger(), &p));
            let reconstruction = deviation(&(iso.matrix() * &iso.matrix().dagger()), &p);
            vec![
                Verdict::from_check("dagger-idempotent", &Check::from_deviation(idempotency, tol)),
                Verdict::from_check(
                    "splits-the-projection",
                    &Check::from_deviation(reconstruction, tol),
                ),
            ]
        }
        Err(e) => {
            eprintln!("error: {e}");
            let verdict = match e {
                LinalgError::NotIdempotent { deviation } => {
                    Verdict::failure("not-dagger-idempotent", deviation)
                }
                LinalgError::NotSquare { .. } => Verdict::failure("not-square", 0.0),
                _ => Verdict::failure("split-failed", 0.0),
            };
            vec![verdict]
        }
    };
    let pass = verdicts.iter().all(|v| v.pass);
    Ok((verdicts, pass))
}

fn cmd_groupoid_roundtrip(path: &Path, tol: f64) -> Result<(Vec<Verdict>, bool), InputError> {
    let g: FiniteGroupoid = load(path)?;
    let validation = validate_groupoid(&g);
    let mut verdicts = vec![Verdict {
        name: "valid-groupoid".into(),
        pass: validation.valid(),
        deviation: validation.violations.len() as f64,
    }];
    if !validation.valid() {
        for violation in &validation.violations {
            eprintln!("error: {violation}");
        }
        return Ok((verdicts, false));
    }
    let algebra = groupoid_to_algebra(&g).expect("groupoid was just validated");

    let boolean = algebra
        .mult()
        .entries()
        .iter()
        .chain(algebra.unit().entries())
        .map(|z| z.norm().min((z.re - 1.0).hypot(z.im)))
        .fold(0.0f64, f64::max);
    verdicts.push(Verdict::from_check(
        "boolean-entries",
        &Check::from_deviation(boolean, tol),
    ));

    let report = check_frobenius(&algebra, tol);
    let structural = report
        .associative
        .deviation
        .max(report.unital.deviation)
        .max(report.frobenius.deviation);
    verdicts.push(Verdict::from_check(
        "frobenius-laws",
        &Check::from_deviation(structural, tol),
    ));
    verdicts.push(Verdict::info(
        "specialness-reported",
        report.special.deviation,
    ));

    match algebra_to_groupoid(&algebra, tol) {
        Ok(back) => verdicts.push(Verdict::flag(
            "roundtrip-isomorphic",
            are_isomorphic(&g, &back),
        )),
        Err(e) => {
            eprintln!("error: {e}");
            verdicts.push(Verdict::failure("roundtrip-failed", 0.0));
        }
    }
    let pass = verdicts.iter().all(|v| v.pass);
    Ok((verdicts, pass))
}

fn protocol_verdicts(
    t: &TeleportationData,
    tol: f64,
    equation: &str,
    check: impl Fn(&TeleportationData, f64) -> Result<Check, ProtocolError>,
) -> Vec<Verdict> {
    let mut verdicts = vec![Verdict::from_check(
        "measurement-counit-preserving",
        &is_measurement(t.measurement(), tol),
    )];
    match check(t, tol) {
        Ok(result) => verdicts.push(Verdict::from_check(equation, &result)),
        Err(e) => {
            eprintln!("error: {e}");
            verdicts.push(Verdict::failure("not-certified", 0.0));
        }
    }
    verdicts
}

fn cmd_teleport_check(path: &Path, tol: f64) -> Result<(Vec<Verdict>, bool), InputError> {
    let t: TeleportationData = load(path)?;
    let verdicts = protocol_verdicts(&t, tol, "teleportation-equation", check_teleportation);
    let pass = verdicts.iter().all(|v| v.pass);
    Ok((verdicts, pass))
}

fn cmd_security_check(path: &Path, tol: f64) -> Result<(Vec<Verdict>, bool), InputError> {
    let t: TeleportationData = load(path)?;
    let verdicts = protocol_verdicts(&t, tol, "security-equation", check_security);
    let pass = verdicts.iter().all(|v| v.pass);
    Ok((verdicts, pass))
}

fn builtin_json(name: &str) -> Result<String, InputError> {
    fn parse_size(name: &str, rest: &str) -> Result<usize, InputError> {
        let n: usize = rest
            .parse()
            .map_err(|_| InputError(format!("unknown builtin name {name:?}")))?;
        if n == 0 {
            return Err(InputError(format!("builtin {name:?} needs a size of at least 1")));
        }
        Ok(n)
    }
    fn pretty(value: &impl Serialize) -> String {
        serde_json::to_string_pretty(value).expect("builtins serialize")
    }

    if let Some(rest) = name.strip_prefix("classical-") {
        return Ok(pretty(&classical_structure(parse_size(name, rest)?)));
    }
    if let Some(rest) = name.strip_prefix("matrix-") {
        return Ok(pretty(&matrix_algebra(parse_size(name, rest)?)));
    }
    if let Some(rest) = name.strip_prefix("groupoid-z") {
        return Ok(pretty(&FiniteGroupoid::cyclic_group(parse_size(name, rest)?)));
    }
    if let Some(rest) = name.strip_prefix("groupoid-discrete-") {
        return Ok(pretty(&FiniteGroupoid::discrete(parse_size(name, rest)?)));
    }
    match name {
        "teleport-qubit" => Ok(pretty(&standard_qubit_teleportation())),
        "otp-z2" => Ok(pretty(
            &one_time_pad(&FiniteGroupoid::cyclic_group(2)).expect("Z2 is a group"),
        )),
        "otp-z3" => Ok(pretty(
            &one_time_pad(&FiniteGroupoid::cyclic_group(3)).expect("Z3 is a group"),
        )),
        _ => Err(InputError(format!("unknown builtin name {name:?}"))),
    }
}

fn cmd_builtin(
    name: &str,
    out: Option<&Path>,
) -> Result<Option<(Vec<Verdict>, bool)>, InputError> {
    let artifact = builtin_json(name)?;
    match out {
        Some(out) => {
            fs::write(out, artifact).map_err(|e| InputError(format!("{}: {e}", out.display())))?;
            Ok(Some((vec![Verdict::flag("artifact-written", true)], true)))
        }
        None => {
            emit(&artifact);
            Ok(None)
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::VerifyFrobenius { .. } => "verify-frobenius",
        Command::VerifyCp { .. } => "verify-cp",
        Command::Compose { .. } => "compose",
        Command::Split { .. } => "split",
        Command::GroupoidRoundtrip { .. } => "groupoid-roundtrip",
        Command::TeleportCheck { .. } => "teleport-check",
        Command::SecurityCheck { .. } => "security-check",
        Command::Builtin { .. } => "builtin",
    }
}

fn run(cli: &Cli) -> Result<Option<(Vec<Verdict>, bool)>, InputError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::VerifyFrobenius { path } => cmd_verify_frobenius(path, cli.tol).map(Some),
        Command::VerifyCp { path } => cmd_verify_cp(path, cli.tol).map(Some),
        Command::Compose { path_m, path_n } => cmd_compose(path_m, path_n, cli.tol, out).map(Some),
        Command::Split { path } => cmd_split(path, cli.tol, out).map(Some),
        Command::GroupoidRoundtrip { path } => cmd_groupoid_roundtrip(path, cli.tol).map(Some),
        Command::TeleportCheck { path } => cmd_teleport_check(path, cli.tol).map(Some),
        Command::SecurityCheck { path } => cmd_security_check(path, cli.tol).map(Some),
        Command::Builtin { name } => cmd_builtin(name, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.json;
    let started = Instant::now();
    match run(&cli) {
        Ok(Some((verdicts, pass))) => {
            let report = Report {
                command: command_name(&cli.command).into(),
                verdicts,
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            emit(&serde_json::to_string_pretty(&report).expect("reports serialize"));
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
