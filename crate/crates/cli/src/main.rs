//! `frontal-lab`: analysis, meshing and verification of frontals from the
//! command line.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use frontal_lab::classify::Thresholds;
use frontal_lab::derived::{SurfaceTag, TraceOptions};
use frontal_lab::frontal::{Frontal, FrontalError, Settings};
use frontal_lab::mesh::{surface_mesh, to_obj, MeshOptions};
use frontal_lab::registry::{self, EXAMPLES};
use frontal_lab::surface::SurfaceDef;
use frontal_lab::verify;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Invariants and classifications at axis points.
    Analyze,
    /// OBJ meshes of f, NR, C1, C2.
    Mesh,
    /// Run the verification checks.
    Verify,
    /// List the built-in surfaces.
    Examples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfaceArg {
    F,
    Nr,
    C1,
    C2,
}

impl SurfaceArg {
    fn tag(self) -> SurfaceTag {
        match self {
            SurfaceArg::F => SurfaceTag::F,
            SurfaceArg::Nr => SurfaceTag::Nr,
            SurfaceArg::C1 => SurfaceTag::C1,
            SurfaceArg::C2 => SurfaceTag::C2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "frontal-lab", version, about = "Frontals with pure-frontal singular points: invariants, focal surfaces, normal ruled surfaces")]
struct Cli {
    command: Command,
    /// Built-in example, surface file, or (for verify) a target or `all`.
    input: Option<String>,
    /// Axis point in the internal chart, `u=<val>`; repeatable.
    #[arg(long, value_name = "u=<val>", value_parser = parse_at)]
    at: Vec<f64>,
    /// Surfaces to mesh; repeatable, default all four.
    #[arg(long, value_enum)]
    surface: Vec<SurfaceArg>,
    #[arg(long, value_parser = parse_resolution)]
    nu: Option<usize>,
    #[arg(long, value_parser = parse_resolution)]
    nv: Option<usize>,
    /// Jet order of f.
    #[arg(long, value_parser = clap::value_parser!(u32).range(5..=20))]
    order: Option<u32>,
    /// Vanishing threshold of the classifiers (the nonvanishing one is 100x).
    #[arg(long, value_parser = parse_tol)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Verification suite, overriding the target.
    #[arg(long)]
    suite: Option<String>,
}

fn parse_at(s: &str) -> Result<f64, String> {
    let value = s.strip_prefix("u=").or_else(|| s.strip_prefix("s=")).unwrap_or(s);
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected u=<number>, got `{s}`")),
    }
}

fn parse_resolution(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err("grid resolution must be an integer >= 2".into()),
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err("tolerance must be a positive number".into()),
    }
}

/// Resolved configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    command: Command,
    input: Option<String>,
    at: Vec<f64>,
    surfaces: Vec<SurfaceTag>,
    nu: usize,
    nv: usize,
    w_range: (f64, f64),
    settings: Settings,
    thresholds: Thresholds,
    trace: TraceOptions,
    format: Format,
    out: Option<String>,
    suite: Option<String>,
}

enum Failure {
    Usage(String),
    Input(String),
    Numerical(FrontalError),
    Verification(usize),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Usage(m) => {
                eprintln!("error: {m}");
                ExitCode::from(1)
            }
            Failure::Input(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            Failure::Numerical(e) => {
                eprintln!("error: {e}");
                eprintln!("hint: {}", report::hint(e));
                ExitCode::from(3)
            }
            Failure::Verification(n) => {
                eprintln!("verification failed: {n} criteria");
                ExitCode::from(4)
            }
        }
    }
}

impl From<FrontalError> for Failure {
    fn from(e: FrontalError) -> Self {
        Failure::Numerical(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Err(f) = configure_threads() {
        return f.report();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("FRONTAL_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("FRONTAL_LAB_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn resolve(cli: &Cli) -> RunConfig {
    let mesh = MeshOptions::default();
    let mut settings = Settings::default();
    if let Some(k) = cli.order {
        settings.order = k as usize;
    }
    let thresholds = match cli.tol {
        Some(t) => Thresholds {
            vanish: t,
            nonvanish: 100.0 * t,
        },
        None => Thresholds::default(),
    };
    let surfaces = if cli.surface.is_empty() {
        vec![SurfaceTag::F, SurfaceTag::Nr, SurfaceTag::C1, SurfaceTag::C2]
    } else {
        cli.surface.iter().map(|s| s.tag()).collect()
    };
    RunConfig {
        command: cli.command,
        input: cli.input.clone(),
        at: cli.at.clone(),
        surfaces,
        nu: cli.nu.unwrap_or(mesh.nu),
        nv: cli.nv.unwrap_or(mesh.nv),
        w_range: mesh.w_range,
        settings,
        thresholds,
        trace: mesh.trace,
        format: cli.format.unwrap_or(Format::Json),
        out: cli.out.as_ref().map(|p| p.display().to_string()),
        suite: cli.suite.clone(),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut config = resolve(&cli);
    let output = match cli.command {
        Command::Examples => examples(&config)?,
        Command::Analyze => {
            let fr = load(&config)?;
            if config.at.is_empty() {
                let (lo, hi) = fr.def.s_range();
                config.at.push(0.5 * (lo + hi));
            }
            let rep = report::analyze(&fr, &config, timestamp())?;
            match config.format {
                Format::Json => to_json(&rep),
                Format::Csv => report::profile_csv(&rep.profile, &config),
            }
        }
        Command::Mesh => {
            let fr = load(&config)?;
            let opts = MeshOptions {
                nu: config.nu,
                nv: config.nv,
                w_range: config.w_range,
                trace: config.trace,
            };
            let mut meshes = Vec::new();
            for &tag in &config.surfaces {
                let m = surface_mesh(&fr, tag, &opts)?;
                eprintln!(
                    "{}: {} vertices, {} faces, {} polylines, {} holes",
                    m.name,
                    m.vertices.len(),
                    m.faces.len(),
                    m.lines.len(),
                    m.holes
                );
                meshes.push(m);
            }
            to_obj(&meshes)
        }
        Command::Verify => {
            let target = config.suite.clone().or(config.input.clone()).unwrap_or_else(|| "all".into());
            let numbers = verify::select(&target).ok_or_else(|| {
                Failure::Input(format!(
                    "unknown verification target `{target}`; expected one of {}",
                    verify::suite_names().join(", ")
                ))
            })?;
            let criteria: Vec<_> = numbers.into_iter().map(verify::run).collect();
            for c in &criteria {
                eprintln!("{}", c.summary());
            }
            let failed = criteria.iter().filter(|c| !c.pass).count();
            let text = match cli.format {
                None => report::verify_table(&criteria),
                Some(Format::Json) => to_json(&report::VerifyReport::new(&config, timestamp(), &criteria)),
                Some(Format::Csv) => report::verify_csv(&criteria, &config),
            };
            emit(&config, &text)?;
            return if failed == 0 { Ok(()) } else { Err(Failure::Verification(failed)) };
        }
    };
    emit(&config, &output)
}

fn emit(config: &RunConfig, text: &str) -> Result<(), Failure> {
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(config: &RunConfig) -> Result<Frontal, Failure> {
    let name = config
        .input
        .as_deref()
        .ok_or_else(|| Failure::Usage("this command needs an input: a built-in example or a surface file".into()))?;
    let def = match registry::find(name) {
        Some(e) => e.surface(),
        None if Path::new(name).is_file() => SurfaceDef::from_file(name).map_err(|e| Failure::Input(e.to_string()))?,
        None => {
            return Err(Failure::Input(format!(
                "`{name}` is neither a built-in example nor a readable file (try `frontal-lab examples`)"
            )))
        }
    };
    let fr = Frontal::with_settings(def, config.settings);
    fr.validate_chart(11)?;
    Ok(fr)
}

fn examples(config: &RunConfig) -> Result<String, Failure> {
    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        description: &'static str,
        x: &'static str,
        y: &'static str,
        z: &'static str,
    }
    let rows: Vec<Row> = EXAMPLES
        .iter()
        .map(|e| Row {
            name: e.name,
            description: e.description,
            x: e.components[0],
            y: e.components[1],
            z: e.components[2],
        })
        .collect();
    Ok(match config.format {
        Format::Json => to_json(&rows),
        Format::Csv => report::csv_string(&rows),
    })
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
