//! `sheetproc`: recognise sheet-metal features in a STEP or B-Rep JSON model
//! and compute punching process parameters.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 parse failure,
//! 3 validation or recognition failure, 4 unknown material or tool,
//! 5 features found but none could be computed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sheetproc::params::{build_report, Settings, DEFAULT_H1_FRACTION, DEFAULT_HOLDING_FRACTION};
use sheetproc::pipeline::{analyze, load_model, AnalysisError, InputFormat, LoadedModel};
use sheetproc::report::{features_listing, inspect_listing, ReportDocument, SCHEMA_VERSION};
use sheetproc::resources::{load_materials, load_tools, MaterialDb, MaterialSpec, ToolDb, ToolSpec};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_NO_RESULTS: u8 = 5;

#[derive(Parser)]
#[command(name = "sheetproc", version, about = "Sheet-metal feature recognition and process parameters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entity counts, face table, thickness, reference face and manifold report.
    Inspect(InputArgs),
    /// Recognised features with their classified reference-face edges.
    Features(InputArgs),
    /// Process parameters for every feature.
    Params(ParamsArgs),
    /// Process every model in a directory; writes one report per file and index.json.
    Batch(BatchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Step,
    BrepJson,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct InputArgs {
    input: PathBuf,
    /// Defaults to detection by extension (.step/.stp or .json).
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    input_format: FormatArg,
}

#[derive(Args)]
struct ResourceArgs {
    #[arg(long, default_value = "low_carbon_steel")]
    material: String,
    #[arg(long, default_value = "punching_press")]
    tool: String,
    /// Merged over the built-in materials.
    #[arg(long)]
    materials_db: Option<PathBuf>,
    /// Merged over the built-in tools.
    #[arg(long)]
    tools_db: Option<PathBuf>,
    /// Directory holding materials.json and tools.json, used when the explicit paths are absent.
    #[arg(long, env = "SHEETPROC_DB_DIR")]
    db_dir: Option<PathBuf>,
    /// Deformation coefficient; overrides the tool's.
    #[arg(long, value_parser = positive)]
    kd: Option<f64>,
    #[arg(long, value_parser = positive, default_value_t = DEFAULT_H1_FRACTION)]
    h1_fraction: f64,
    #[arg(long, value_parser = positive, default_value_t = DEFAULT_HOLDING_FRACTION)]
    holding_fraction: f64,
    /// Height used for cut features instead of the thickness, mm.
    #[arg(long, value_parser = positive)]
    cut_height: Option<f64>,
}

#[derive(Args)]
struct ParamsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    resources: ResourceArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    input_format: FormatArg,
    #[command(flatten)]
    resources: ResourceArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive number")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_IO } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Inspect(a) => inspect(&a),
        Command::Features(a) => features(&a),
        Command::Params(a) => params(&a),
        Command::Batch(a) => batch(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn resolve_format(path: &Path, arg: FormatArg) -> Result<InputFormat, Failure> {
    match arg {
        FormatArg::Step => Ok(InputFormat::Step),
        FormatArg::BrepJson => Ok(InputFormat::BrepJson),
        FormatArg::Auto => InputFormat::from_path(path).ok_or_else(|| {
            Failure::new(EXIT_IO, format!("{}: cannot tell the format from the extension; use --input-format", path.display()))
        }),
    }
}

fn load(path: &Path, arg: FormatArg) -> Result<LoadedModel, Failure> {
    let format = resolve_format(path, arg)?;
    let text = read(path)?;
    load_model(&text, format).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn print(text: &str) -> Result<(), Failure> {
    std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}

fn inspect(a: &InputArgs) -> Result<u8, Failure> {
    let model = load(&a.input, a.input_format)?;
    let analysis = analyze(&model.solid);
    print(&inspect_listing(&model, &analysis))?;
    Ok(if matches!(analysis, Err(AnalysisError::Invalid(_))) { EXIT_INVALID } else { 0 })
}

fn features(a: &InputArgs) -> Result<u8, Failure> {
    let model = load(&a.input, a.input_format)?;
    let analysis = analyze(&model.solid).map_err(|e| invalid(&e))?;
    print(&features_listing(&analysis))?;
    Ok(0)
}

fn invalid(e: &AnalysisError) -> Failure {
    match e {
        AnalysisError::Invalid(v) => {
            let lines: Vec<String> = v.iter().map(|x| format!("\n  {x}")).collect();
            Failure::new(EXIT_INVALID, format!("{e}:{}", lines.concat()))
        }
        _ => Failure::new(EXIT_INVALID, e.to_string()),
    }
}

struct Resources {
    material: MaterialSpec,
    tool: ToolSpec,
    settings: Settings,
}

fn resources(r: &ResourceArgs) -> Result<Resources, Failure> {
    let pick = |explicit: &Option<PathBuf>, file: &str| {
        explicit.clone().or_else(|| r.db_dir.as_ref().map(|d| d.join(file)).filter(|p| p.is_file()))
    };
    let mut materials = MaterialDb::builtin();
    if let Some(p) = pick(&r.materials_db, "materials.json") {
        let db = load_materials(&read(&p)?).map_err(|e| Failure::new(EXIT_RESOURCE, format!("{}: {e}", p.display())))?;
        materials.merge(&db);
    }
    let mut tools = ToolDb::builtin();
    if let Some(p) = pick(&r.tools_db, "tools.json") {
        let db = load_tools(&read(&p)?).map_err(|e| Failure::new(EXIT_RESOURCE, format!("{}: {e}", p.display())))?;
        tools.merge(&db);
    }
    let material = materials.get(&r.material).map_err(|e| Failure::new(EXIT_RESOURCE, e.to_string()))?.clone();
    let tool = tools.get(&r.tool).map_err(|e| Failure::new(EXIT_RESOURCE, e.to_string()))?.clone();
    let settings = Settings {
        kd: r.kd,
        h1_fraction: r.h1_fraction,
        holding_fraction: r.holding_fraction,
        cut_height: r.cut_height,
    };
    Ok(Resources { material, tool, settings })
}

/// The report and the exit code it implies.
fn run_params(path: &Path, arg: FormatArg, res: &Resources) -> Result<(ReportDocument, u8), Failure> {
    let model = load(path, arg)?;
    let analysis = analyze(&model.solid).map_err(|e| invalid(&e))?;
    let reports = build_report(&analysis.feature_inputs(), &analysis.metrics, &res.material, &res.tool, &res.settings);
    let doc = ReportDocument::new(
        model.solid.name(),
        &analysis,
        &reports,
        &res.material,
        &res.tool,
        &res.settings,
        model.warnings,
    );
    let none_ok = !doc.features.is_empty() && doc.features.iter().all(|f| !f.is_ok());
    Ok((doc, if none_ok { EXIT_NO_RESULTS } else { 0 }))
}

fn render(doc: &ReportDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => doc.to_json(),
        OutputFormat::Csv => doc.to_csv(),
        OutputFormat::Table => doc.to_table(),
    }
}

/// Write-temp-then-rename in the destination directory.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::new(EXIT_IO, format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn params(a: &ParamsArgs) -> Result<u8, Failure> {
    let res = resources(&a.resources)?;
    let (doc, code) = run_params(&a.input.input, a.input.input_format, &res)?;
    let text = render(&doc, a.format);
    match &a.out {
        Some(p) => write_atomic(p, &text)?,
        None => print(&text)?,
    }
    for f in doc.features.iter().filter(|f| !f.is_ok()) {
        eprintln!("feature {}: {}", f.feature, f.error.as_deref().unwrap_or("failed"));
    }
    Ok(code)
}

#[derive(Serialize)]
struct BatchIndex {
    schema_version: u32,
    entries: Vec<BatchEntry>,
}

#[derive(Serialize)]
struct BatchEntry {
    file: String,
    /// "ok" or "error".
    status: &'static str,
    exit_code: u8,
    report: Option<String>,
    features: Option<usize>,
    error: Option<String>,
}

fn batch(a: &BatchArgs) -> Result<u8, Failure> {
    let res = resources(&a.resources)?;
    let listing = fs::read_dir(&a.dir).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", a.dir.display())))?;
    let mut files: Vec<PathBuf> = listing
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| !matches!(a.input_format, FormatArg::Auto) || InputFormat::from_path(p).is_some())
        .collect();
    files.sort_by(|x, y| x.file_name().cmp(&y.file_name()));
    fs::create_dir_all(&a.out).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", a.out.display())))?;

    let ext = match a.format {
        OutputFormat::Json => "json",
        OutputFormat::Csv => "csv",
        OutputFormat::Table => "txt",
    };
    let mut entries = Vec::new();
    for path in &files {
        let file = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let entry = match run_params(path, a.input_format, &res) {
            Ok((doc, code)) => {
                let name = format!("{file}.report.{ext}");
                write_atomic(&a.out.join(&name), &render(&doc, a.format))?;
                let errors: Vec<String> = doc
                    .features
                    .iter()
                    .filter_map(|f| f.error.as_ref().map(|e| format!("feature {}: {e}", f.feature)))
                    .collect();
                BatchEntry {
                    status: if code == 0 { "ok" } else { "error" },
                    exit_code: code,
                    report: Some(name),
                    features: Some(doc.features.len()),
                    error: (!errors.is_empty()).then(|| errors.join("; ")),
                    file,
                }
            }
            Err(f) => {
                eprintln!("{file}: {}", f.message);
                BatchEntry { file, status: "error", exit_code: f.code, report: None, features: None, error: Some(f.message) }
            }
        };
        entries.push(entry);
    }
    let failed = entries.iter().any(|e| e.exit_code != 0);
    let index = BatchIndex { schema_version: SCHEMA_VERSION, entries };
    let mut text = serde_json::to_string_pretty(&index).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    text.push('\n');
    write_atomic(&a.out.join("index.json"), &text)?;
    Ok(if failed { EXIT_IO } else { 0 })
}
