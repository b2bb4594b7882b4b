use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, ValueEnum};
use serde_json::{json, Value};

use super::grid::{FrequencyGrid, Span, Units};
use super::presets::{self, BasisChoice};
use super::serialize::{self, AxisNorm, Format};
use crate::dynamics::{build_bare, build_supermode, check_stability, Basis, DriftSystem};
use crate::error::Error;
use crate::params::{format_complex, GlMode, PhysicalConfig};
use crate::spectra::{sweep, InputSpectra, SweepOptions};
use crate::verify;

/// Environment variable naming the directory that receives output files.
pub const OUTPUT_DIR_ENV: &str = "OMNR_OUTPUT_DIR";

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const UNSTABLE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Bare,
    Supermode,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Port {
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "L", alias = "l")]
    L,
}

#[derive(Debug, Parser)]
#[command(name = "omnr", version, about = "Transmission and noise spectra of an optomechanical circulator")]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
struct Args {
    /// fig2_one, fig2_two, fig3, fig4_one, fig4_two, fig5_resolved or fig5_unresolved.
    #[arg(long)]
    preset: Option<String>,
    /// key = value parameter file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Output file; stdout when omitted and no output directory is set.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
    /// Also run the covariance and consistency checks.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    allow_unstable: bool,
    /// Single frequency: a number, omega_m, omega_m+J_m, omega_m-J_m or omega_m±J_m.
    #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
    point: Option<String>,
    /// lo:hi:points[:kappa0|gamma_m], offsets from omega_m.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    dump_matrices: bool,
    /// Inject a flat unit input spectrum at this port.
    #[arg(long, value_enum)]
    signal: Option<Port>,
}

/// Failure carrying its exit code and a structured description.
#[derive(Debug)]
struct Failure {
    code: i32,
    body: Value,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: exit::CONFIG,
            body: json!({"error": "usage", "message": msg.into()}),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure {
            code: exit::IO,
            body: json!({"error": "io", "path": path.display().to_string(), "message": err.to_string()}),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidParameter { .. }
            | Error::UnknownKey { .. }
            | Error::Parse { .. }
            | Error::MissingKey(_)
            | Error::Precondition(_) => exit::CONFIG,
            Error::Unstable { .. } => exit::UNSTABLE,
            Error::ResonantSingularity { .. }
            | Error::EigenNonConvergence
            | Error::LyapunovSingular
            | Error::InsufficientCoverage { .. } => exit::NUMERICAL,
            Error::Io(_) => exit::IO,
        };
        let mut body = json!({"error": e.kind(), "message": e.to_string()});
        match &e {
            Error::UnknownKey { key, line } => {
                body["key"] = json!(key);
                body["line"] = json!(line);
            }
            Error::Parse { line, .. } => body["line"] = json!(line),
            Error::MissingKey(key) => body["key"] = json!(key),
            Error::InvalidParameter { name, .. } => body["key"] = json!(name),
            Error::ResonantSingularity { omega, .. } => body["omega"] = json!(omega),
            Error::Unstable { min_real_part } => body["min_real_part"] = json!(min_real_part),
            _ => {}
        }
        Failure { code, body }
    }
}

/// Resolved config and JSON description for the sidecar file.
pub fn config_json(cfg: &PhysicalConfig) -> Value {
    let g_l_mode = match cfg.g_l_mode {
        GlMode::Derived => "derived".to_string(),
        GlMode::Explicit(z) => format!("explicit:{}", format_complex(z)),
    };
    let g_l = cfg.g_l();
    json!({
        "omega_m": cfg.omega_m,
        "kappa_0": cfg.kappa_0,
        "kappa_ex": cfg.kappa_ex,
        "delta_0": cfg.delta_0,
        "j_s": cfg.j_s,
        "j_m": cfg.j_m,
        "gamma_0": cfg.gamma_0,
        "gamma_in": cfg.gamma_in,
        "g_r": [cfg.g_r.re, cfg.g_r.im],
        "g_l_mode": g_l_mode,
        "g_l": [g_l.re, g_l.im],
        "n_th": cfg.n_th,
        "two_resonators": cfg.two_resonators,
    })
}

/// Frequencies named by a `--point` expression.
fn parse_point(expr: &str, cfg: &PhysicalConfig) -> Result<Vec<f64>, Failure> {
    let e: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let e = e.strip_prefix("omega=").unwrap_or(&e);
    let (wm, jm) = (cfg.omega_m, cfg.j_m);
    let points = match e {
        "omega_m" => vec![wm],
        "omega_m+J_m" => vec![wm + jm],
        "omega_m-J_m" => vec![wm - jm],
        "omega_m±J_m" | "omega_m+-J_m" => vec![wm - jm, wm + jm],
        other => match other.parse::<f64>() {
            Ok(x) if x.is_finite() => vec![x],
            _ => return Err(Failure::usage(format!("cannot parse --point `{expr}`"))),
        },
    };
    Ok(points)
}

struct Plan {
    stem: String,
    cfg: PhysicalConfig,
    grid: FrequencyGrid,
    omegas: Vec<f64>,
    basis: BasisChoice,
}

fn plan(args: &Args) -> Result<Plan, Failure> {
    let (stem, cfg, default_grid, default_basis) = if let Some(name) = &args.preset {
        let p = presets::by_name(name).ok_or_else(|| {
            let known: Vec<&str> = presets::PresetName::ALL.iter().map(|p| p.name()).collect();
            Failure {
                code: exit::CONFIG,
                body: json!({"error": "unknown_preset", "message": format!("unknown preset `{name}`"), "known": known}),
            }
        })?;
        (name.clone(), p.config, p.grid, p.basis)
    } else {
        let path = args.config.as_ref().expect("clap enforces a source");
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let cfg = PhysicalConfig::parse(&text)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "omnr".into());
        let grid = FrequencyGrid::new(vec![Span::linear(-60.0, 60.0, 2001)], Units::GammaM);
        (stem, cfg, grid, BasisChoice::Bare)
    };
    cfg.validate()?;

    let grid = match &args.grid {
        Some(spec) => FrequencyGrid::parse(spec, default_grid.units)?,
        None => default_grid,
    };
    let omegas = match &args.point {
        Some(expr) => parse_point(expr, &cfg)?,
        None => grid.omegas(&cfg),
    };
    let basis = match args.basis {
        Some(BasisArg::Bare) => BasisChoice::Bare,
        Some(BasisArg::Supermode) => BasisChoice::Supermode,
        Some(BasisArg::Both) => BasisChoice::Both,
        None => default_basis,
    };
    if basis != BasisChoice::Bare && !cfg.two_resonators {
        return Err(Error::Precondition("the supermode basis needs two mechanical resonators".into()).into());
    }
    Ok(Plan {
        stem,
        cfg,
        grid,
        omegas,
        basis,
    })
}

fn build(cfg: &PhysicalConfig, basis: Basis) -> Result<DriftSystem, Error> {
    match basis {
        Basis::Bare => build_bare(cfg),
        Basis::Supermode => build_supermode(cfg),
    }
}

/// Oracle report for one system. The returned flag is false if a check that
/// carries a pass/fail bound did not meet it.
fn verify_report(sys: &DriftSystem, cfg: &PhysicalConfig) -> (Value, bool) {
    let mut ok = true;
    let mut report = json!({"basis": sys.basis.name()});
    let diffusion = verify::DiffusionMatrix::new(sys);
    report["diffusion_psd"] = json!(diffusion.is_psd());
    ok &= diffusion.is_psd();
    match verify::lyapunov_covariance(sys) {
        Ok(cov) => {
            ok &= cov.relative_residual() < 1e-9;
            report["lyapunov"] = cov.to_json();
        }
        Err(e) => {
            ok = false;
            report["lyapunov"] = json!({"error": e.kind(), "message": e.to_string()});
        }
    }
    match verify::parseval_default(sys) {
        Ok(p) => {
            ok &= p.max_mismatch < 1e-3;
            report["parseval"] = p.to_json();
        }
        Err(e) => {
            ok = false;
            report["parseval"] = json!({"error": e.kind(), "message": e.to_string()});
        }
    }
    if sys.basis == Basis::Bare {
        if cfg.two_resonators {
            // diagnostic: the supermode form drops a counter-rotating term
            if let Ok(b) = verify::basis_consistency(cfg) {
                report["basis_consistency"] = b.to_json();
            }
        } else {
            match verify::limit_check_single_mode(cfg) {
                Ok(l) => {
                    ok &= l.passed;
                    report["single_mode_limit"] = l.to_json();
                }
                Err(e) => {
                    ok = false;
                    report["single_mode_limit"] = json!({"error": e.kind(), "message": e.to_string()});
                }
            }
        }
    }
    (report, ok)
}

/// One produced artifact: a suffix appended to the stem, and its content.
struct Artifact {
    suffix: String,
    content: String,
}

struct Outcome {
    stem: String,
    extension: &'static str,
    artifacts: Vec<Artifact>,
    verify_ok: bool,
}

fn execute(args: &Args) -> Result<Outcome, Failure> {
    let plan = plan(args)?;
    let cfg = &plan.cfg;
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let inputs = match args.signal {
        Some(Port::R) => InputSpectra {
            s_r_in: 1.0,
            s_l_in: 0.0,
        },
        Some(Port::L) => InputSpectra {
            s_r_in: 0.0,
            s_l_in: 1.0,
        },
        None => InputSpectra::default(),
    };
    let axis = AxisNorm {
        center: cfg.omega_m,
        scale: plan.grid.units.scale(cfg),
    };
    let bases = plan.basis.bases();
    let tagged = bases.len() > 1;
    let mut artifacts = Vec::new();
    let mut verify_blocks = Vec::new();
    let mut verify_ok = true;
    for basis in bases {
        let sys = build(cfg, basis)?;
        if args.dump_matrices {
            let mut dump = sys.to_json();
            dump["stability"] = check_stability(&sys)?.to_json();
            artifacts.push(Artifact {
                suffix: format!("{}.matrices.json", tag(tagged, basis)),
                content: pretty(&dump),
            });
        }
        let bundle = sweep(
            &sys,
            cfg,
            &plan.omegas,
            SweepOptions {
                allow_unstable: args.allow_unstable,
                inputs,
            },
        )?;
        artifacts.push(Artifact {
            suffix: format!("{}.{}", tag(tagged, basis), format.extension()),
            content: serialize::serialize(&bundle, &axis, format),
        });
        if args.verify {
            let (block, ok) = verify_report(&sys, cfg);
            verify_ok &= ok;
            verify_blocks.push(block);
        }
    }
    if args.verify {
        artifacts.push(Artifact {
            suffix: ".verify.json".into(),
            content: pretty(&json!({"passed": verify_ok, "reports": verify_blocks})),
        });
    }
    let mut sidecar = json!({
        "config": config_json(cfg),
        "units": plan.grid.units.name(),
        "points": plan.omegas.len(),
        "basis": match plan.basis {
            BasisChoice::Bare => "bare",
            BasisChoice::Supermode => "supermode",
            BasisChoice::Both => "both",
        },
    });
    if let Some(p) = &args.preset {
        sidecar["preset"] = json!(p);
    }
    artifacts.push(Artifact {
        suffix: ".config.json".into(),
        content: pretty(&sidecar),
    });
    Ok(Outcome {
        stem: plan.stem,
        extension: format.extension(),
        artifacts,
        verify_ok,
    })
}

fn tag(tagged: bool, basis: Basis) -> String {
    if tagged {
        format!("_{}", basis.name())
    } else {
        String::new()
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain JSON");
    s.push('\n');
    s
}

/// Destination of the primary output: a file, or stdout.
fn destination(args: &Args, stem: &str, ext: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    match (&args.output, dir) {
        (Some(out), Some(dir)) if out.is_relative() => Some(dir.join(out)),
        (Some(out), _) => Some(out.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{stem}.{ext}"))),
        (None, None) => None,
    }
}

/// Places `suffix` next to the primary output `base` (`dir/stem.ext`).
fn sibling(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    base.with_file_name(format!("{stem}{suffix}"))
}

fn deliver(args: &Args, out: &Outcome, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (artifacts, format) = (&out.artifacts, out.extension);
    match destination(args, &out.stem, format) {
        Some(base) => {
            if let Some(parent) = base.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Failure::io(parent, e))?;
            }
            let primary = format!(".{format}");
            for a in artifacts {
                let path = if a.suffix == primary { base.clone() } else { sibling(&base, &a.suffix) };
                std::fs::write(&path, &a.content).map_err(|e| Failure::io(&path, e))?;
            }
        }
        None => {
            // stdout carries data, matrices and verification; the sidecar
            // only accompanies file output
            let stdout_path = Path::new("<stdout>");
            for a in artifacts.iter().filter(|a| a.suffix != ".config.json") {
                stdout
                    .write_all(a.content.as_bytes())
                    .map_err(|e| Failure::io(stdout_path, e))?;
            }
        }
    }
    Ok(())
}

/// Runs the command line `argv` (including the program name) and returns the
/// process exit code. Errors are written to `stderr` as one JSON object.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return exit::OK;
            }
            let f = Failure::usage(e.to_string().trim_end());
            let _ = writeln!(stderr, "{}", f.body);
            return f.code;
        }
    };
    let result = execute(&args).and_then(|out| {
        deliver(&args, &out, stdout)?;
        if out.verify_ok {
            Ok(())
        } else {
            Err(Failure {
                code: exit::NUMERICAL,
                body: json!({"error": "verification_failed", "message": "an oracle check exceeded its bound"}),
            })
        }
    });
    match result {
        Ok(()) => exit::OK,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.body);
            f.code
        }
    }
}
