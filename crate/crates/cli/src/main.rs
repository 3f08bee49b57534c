//! `frenet`: command-line driver for twistor projections, tangent and
//! envelope constructions, energies and surface export.
//!
//! Exit codes: 0 pass, 2 tolerance failure, 3 precondition failure, 4 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frenet::constructions::{
    backlund_project, choose_hyperplane, envelope, make_willmore_form, osculate, splitting, tangent_curve,
};
use frenet::field::{twistor_project, CurveField};
use frenet::frenet::canonical_residuals;
use frenet::grid::{Chart, ChartGrid};
use frenet::metrics::{
    classical_oracle, conformality_residual, harmonicity, harmonicity_order, richardson, willmore_energy,
};
use frenet::pipeline::{check_table, run_pipeline, PipelineConfig};
use frenet::quaternion::{HVector, Quaternion};
use frenet::rational::RationalCurve;
use frenet::surface::{export_mesh, planar_end_check, resolve_pole, stereographic, MeshOptions, Pole, Projection};
use frenet::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "frenet", version, about = "Frenet curves in quaternionic projective space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Twistor projection of a rational curve in CP^{2n+1}.
    Twistor(Common),
    /// Tangent curve relative to a random admissible hyperplane.
    Tangent(Common),
    /// k-fold tangent curve.
    Osculate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Envelope along the Willmore form with a random b0.
    Envelope(Common),
    /// Direct-sum decomposition by iterated tangents.
    Split(Common),
    /// Willmore energy, with a half-resolution estimate for curve input.
    Energy(Common),
    /// Harmonicity residual of the complex structure.
    Harmonicity(Common),
    /// Affine Bäcklund projection of a tangent-type field to R⁴, exported as a mesh.
    Backlund {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Stereographic projection of an HP¹ field, planar-end report and mesh.
    Mesh {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Run a JSON pipeline config.
    Pipeline {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Common {
    /// Curve file (JSON); the field is its twistor projection.
    #[arg(long, conflicts_with = "field")]
    curve: Option<PathBuf>,
    /// Field dump written by an earlier command.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Limit for algebraic Frenet residuals of produced fields.
    #[arg(long, default_value_t = 1e-8)]
    tol_alg: f64,
    /// Limit for differential Frenet residuals of produced fields.
    #[arg(long, default_value_t = 1e-6)]
    tol_diff: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct MeshArgs {
    /// `auto` or a chart A sample index.
    #[arg(long, default_value = "auto")]
    pole: Pole,
    #[arg(long, value_enum, default_value_t = View::Orthogonal)]
    view: View,
    /// Append the fourth coordinate to vertex lines.
    #[arg(long)]
    bake_w: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum View {
    Orthogonal,
    Stereographic,
}

impl From<View> for Projection {
    fn from(v: View) -> Self {
        match v {
            View::Orthogonal => Projection::Orthogonal,
            View::Stereographic => Projection::Stereographic,
        }
    }
}

/// Outcome of a command: a report plus pass/fail of its asserted limits.
struct Outcome {
    report: Value,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<bool, Error> {
    let (outcome, format) = match command {
        Command::Pipeline { config, format } => {
            let cfg = PipelineConfig::load(&config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            return match run_pipeline(&cfg, base) {
                Ok(summary) => {
                    match format {
                        Format::Text => print!("{}", check_table(&summary.checks)),
                        Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
                    }
                    Ok(summary.passed)
                }
                Err(e) => {
                    eprint!("{e}");
                    std::process::exit(e.exit_code());
                }
            };
        }
        Command::Twistor(c) => (produce(&c, "twistor", |f| Ok(f.clone()))?, c.format),
        Command::Tangent(c) => {
            let seed = c.seed;
            (produce(&c, "tangent", |f| tangent_curve(f, &choose_hyperplane(f, 64, seed)?))?, c.format)
        }
        Command::Osculate { common: c, k } => {
            let seed = c.seed;
            (produce(&c, "osculate", |f| osculate(f, k, &[], seed))?, c.format)
        }
        Command::Envelope(c) => {
            let seed = c.seed;
            (
                produce(&c, "envelope", |f| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let form = make_willmore_form(f, &HVector::random(&mut rng, f.m()))?;
                    let value = HVector::random(&mut rng, f.m());
                    envelope(f, &form, &base_point(f), &value, frenet::constructions::DEFAULT_CLOSED_TOL)
                })?,
                c.format,
            )
        }
        Command::Split(c) => {
            let f = input(&c)?;
            let s = splitting(&f, c.seed)?;
            let report = json!({ "lines": s.lines.len(), "certificate": s.certificate });
            (Outcome { report, passed: true }, c.format)
        }
        Command::Energy(c) => {
            let f = input(&c)?;
            let mut e = willmore_energy(&f);
            if let Some(curve) = &c.curve {
                let coarse = twistor_project(&RationalCurve::read(curve)?, ChartGrid::new(c.grid / 2))?;
                richardson(&mut e, &willmore_energy(&coarse), 4.0);
            }
            (Outcome { report: serde_json::to_value(e)?, passed: true }, c.format)
        }
        Command::Harmonicity(c) => {
            let f = input(&c)?;
            let mut h = harmonicity(&f);
            if let Some(curve) = &c.curve {
                let coarse = twistor_project(&RationalCurve::read(curve)?, ChartGrid::new(c.grid / 2))?;
                harmonicity_order(&mut h, &harmonicity(&coarse));
            }
            (Outcome { report: serde_json::to_value(h)?, passed: true }, c.format)
        }
        Command::Backlund { common: c, mesh } => {
            let f = input(&c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let form = make_willmore_form(&f, &HVector::random(&mut rng, f.m()))?;
            let hp = choose_hyperplane(&f, 64, c.seed)?;
            let (map, integration) = backlund_project(&f, &form, &hp, &base_point(&f), Quaternion::new(0.0, 0.0, 0.0, 0.0))?;
            let stats = write_mesh_file(&c, &map, &mesh)?;
            let conformality = conformality_residual(&map);
            let passed = integration.closedness < frenet::constructions::DEFAULT_CLOSED_TOL;
            let report = json!({ "integration": integration, "conformality": conformality, "mesh": stats });
            (Outcome { report, passed }, c.format)
        }
        Command::Mesh { common: c, mesh } => {
            let f = input(&c)?;
            let choice = resolve_pole(&f, &mesh.pole)?;
            let map = stereographic(&f, &HVector::from_real(&choice.line))?;
            let stats = write_mesh_file(&c, &map, &mesh)?;
            let conformality = conformality_residual(&map);
            let ends = if map.punctures.is_empty() { Vec::new() } else { planar_end_check(&map) };
            let oracle = classical_oracle(&map).ok();
            let passed = conformality < c.tol_diff.max(1e-5) && ends.iter().all(|e| e.planar && e.minimal);
            let report = json!({ "pole": choice, "punctures": map.punctures, "conformality": conformality, "ends": ends, "oracle": oracle, "mesh": stats });
            (Outcome { report, passed }, c.format)
        }
    };
    emit(&outcome.report, format)?;
    Ok(outcome.passed)
}

/// The field named by `--field`, or the twistor projection of `--curve`.
fn input(c: &Common) -> Result<CurveField, Error> {
    match (&c.field, &c.curve) {
        (Some(path), _) => CurveField::load(path),
        (None, Some(curve)) => twistor_project(&RationalCurve::read(curve)?, ChartGrid::new(c.grid)),
        (None, None) => Err(Error::Config("need --curve or --field".into())),
    }
}

fn base_point(f: &CurveField) -> frenet::grid::ChartPoint {
    f.grid.point(Chart::A, f.grid.nearest(num_complex::Complex64::new(0.0, 0.0)))
}

/// Build a field from the input, save it and check its Frenet residuals.
fn produce(c: &Common, name: &str, build: impl FnOnce(&CurveField) -> Result<CurveField, Error>) -> Result<Outcome, Error> {
    let f = build(&input(c)?)?;
    std::fs::create_dir_all(&c.out)?;
    let path = c.out.join(format!("{name}.field"));
    f.save(&path)?;
    let r = canonical_residuals(&f);
    let differential = r.flag_derivative.max(r.delta()).max(r.canonical());
    let passed = r.algebraic() < c.tol_alg && differential < c.tol_diff;
    let report = json!({
        "field": path.display().to_string(),
        "dimension": f.n,
        "provenance": f.provenance,
        "meta": f.meta,
        "residuals": r,
        "algebraic": r.algebraic(),
        "differential": differential,
    });
    Ok(Outcome { report, passed })
}

fn write_mesh_file(c: &Common, map: &frenet::surface::SurfaceMap, m: &MeshArgs) -> Result<frenet::surface::MeshStats, Error> {
    std::fs::create_dir_all(&c.out)?;
    let opts = MeshOptions { projection: m.view.into(), bake_w: m.bake_w, ..Default::default() };
    export_mesh(map, opts, &c.out.join("surface.obj"))
}

fn emit(report: &Value, format: Format) -> Result<(), Error> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
        Format::Text => print_text("", report),
    }
    Ok(())
}

/// Flattened `path = value` lines.
fn print_text(prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                print_text(&p, v);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                print_text(&format!("{prefix}[{i}]"), v);
            }
        }
        _ => println!("{prefix} = {v}"),
    }
}
