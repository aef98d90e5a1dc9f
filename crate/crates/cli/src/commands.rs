use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use sedmap_core::dynamics::simulate;
use sedmap_core::format::{
    baseline_state, dense_schedule, export_trajectory, ingest_indicators, load_map, load_registry,
    parse_document, parse_indicator_series, render_document, write_atomic, ExportFormat, FormatError,
    IngestOptions, ScenarioFile, FORMAT_VERSION,
};
use sedmap_core::knowledge::{indicators_for_type, resolve_type, MunicipalityType};
use sedmap_core::{CognitiveMap, FactorKind};
use sedmap_service::api::{self, AnalyzeRequest, CompareRequest, InvertRequest, RunRequest, StabilizeRequest};
use sedmap_service::ServiceConfig;

use crate::{Cli, Command, Format, OutputArgs, ScenarioAction, ScenarioArgs, SimulateArgs};

/// Exit code 2 for `Usage`, 1 for `Rejected`.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Rejected(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Invalid(report) => Failure::Rejected(violation_lines(&report)),
            other => Failure::Rejected(other.to_string()),
        }
    }
}

impl From<api::Failure> for Failure {
    fn from(e: api::Failure) -> Self {
        match e {
            api::Failure::BadRequest(msg) => Failure::Rejected(msg),
            api::Failure::Invalid(report) => Failure::Rejected(violation_lines(&report)),
            api::Failure::Engine(e) => Failure::Rejected(e.to_string()),
        }
    }
}

impl From<sedmap_core::Error> for Failure {
    fn from(e: sedmap_core::Error) -> Self {
        api::Failure::from(e).into()
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn violation_lines(report: &sedmap_core::ValidationReport) -> String {
    let mut out = String::from("invalid map:");
    for v in &report.violations {
        let _ = write!(out, "\n  [{}] {v}", v.code());
    }
    out
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { map } => validate(&map),
        Command::Simulate(args) => simulate_cmd(args),
        Command::Analyze { map, tol, output } => {
            let map = read_map(&map)?;
            let doc = api::run_analyze(&map, &AnalyzeRequest { format_version: None, tol: Some(tol) })?;
            emit(output, &doc, || doc.to_table())
        }
        Command::Stabilize { map, locked, tol, output } => {
            let map = read_map(&map)?;
            for key in &locked {
                api::parse_edge(key).map_err(|_| Failure::Usage(format!("--lock expects source->target, got `{key}`")))?;
            }
            let req = StabilizeRequest { format_version: None, tol: Some(tol), locked };
            let doc = api::run_stabilize(&map, &req)?;
            emit(output, &doc, || doc.to_table())
        }
        Command::Scenario { action } => scenario(action),
        Command::Template { registry, climate, population, specialization, output } => {
            let kb = load_registry(&read(&registry)?)?;
            let t = resolve_type(&kb.registry, &climate, population, &specialization)
                .map_err(|e| Failure::Rejected(e.to_string()))?;
            let doc = TemplateDocument {
                format_version: FORMAT_VERSION.into(),
                indicators: indicators_for_type(&kb.template, &t).into_iter().collect(),
                municipality_type: t,
            };
            emit(output, &doc, || doc.to_table())
        }
        Command::Serve { port, data, cors } => {
            let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Rejected(e.to_string()))?;
            let config = ServiceConfig { port, data_dir: data, cors_origins: cors };
            runtime.block_on(sedmap_service::serve(config)).map_err(|e| Failure::Rejected(e.to_string()))
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_map(path: &Path) -> Result<CognitiveMap> {
    let bytes = read(path)?;
    load_map(&bytes).map_err(|e| match Failure::from(e) {
        Failure::Rejected(msg) => Failure::Rejected(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn emit<T: Serialize>(output: OutputArgs, doc: &T, table: impl FnOnce() -> String) -> Result<()> {
    match output.format {
        Format::Json => print!("{}", String::from_utf8_lossy(&render_document(doc))),
        Format::Table => print!("{}", table()),
    }
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let map = read_map(path)?;
    let target = map.target().map(|f| f.id.to_string()).unwrap_or_else(|| "none".into());
    println!(
        "valid: {} factors, {} edges, target {target}, {} controls",
        map.len(),
        map.edges().len(),
        map.factors_of_kind(FactorKind::Control).count()
    );
    Ok(())
}

/// `factor=value` or `factor@step=value`.
fn parse_assignment(spec: &str, flag: &str, allow_step: bool) -> Result<(String, usize, f64)> {
    let usage = || Failure::Usage(format!("{flag} expects factor{}=value, got `{spec}`", if allow_step { "[@step]" } else { "" }));
    let (lhs, value) = spec.split_once('=').ok_or_else(usage)?;
    let value: f64 = value.trim().parse().map_err(|_| usage())?;
    let (factor, step) = match lhs.split_once('@') {
        Some((f, s)) if allow_step => (f, s.trim().parse().map_err(|_| usage())?),
        Some(_) => return Err(usage()),
        None => (lhs, 0),
    };
    if factor.trim().is_empty() {
        return Err(usage());
    }
    Ok((factor.trim().to_string(), step, value))
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let map = read_map(&args.map)?;
    let mut sparse: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for spec in &args.impulses {
        let (factor, step, value) = parse_assignment(spec, "--impulse", true)?;
        *sparse.entry(step.to_string()).or_default().entry(factor).or_default() += value;
    }
    let schedule = dense_schedule(&map, &sparse)?;

    let base = if let Some(path) = &args.indicators {
        let rows = parse_indicator_series(&read(path)?)?;
        let options = IngestOptions { municipality: args.municipality.clone(), ..IngestOptions::default() };
        let period = args.period.as_deref().unwrap_or_default();
        let ingestion = ingest_indicators(&rows, &map, period, &options)?;
        for w in &ingestion.warnings {
            eprintln!("warning: {w}");
        }
        ingestion.state
    } else {
        let mut levels = BTreeMap::new();
        for spec in &args.baseline {
            let (factor, _, value) = parse_assignment(spec, "--baseline", false)?;
            levels.insert(factor, value);
        }
        baseline_state(&map, &levels)?
    };

    let trajectory = simulate(&map, &base, &schedule, args.horizon, args.clamp)?;
    let format = match args.output.format {
        Format::Table => ExportFormat::Tabular,
        Format::Json => ExportFormat::Document,
    };
    let bytes = export_trajectory(&map, &trajectory, format);
    match &args.out {
        Some(path) => write_atomic(path, &bytes).map_err(|e| Failure::Rejected(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

fn scenario(action: ScenarioAction) -> Result<()> {
    let (kind, args): (&str, ScenarioArgs) = match action {
        ScenarioAction::Run(a) => ("run", a),
        ScenarioAction::Compare(a) => ("compare", a),
        ScenarioAction::Invert(a) => ("invert", a),
    };
    let map = read_map(&args.map)?;
    let file: ScenarioFile = parse_document(&read(&args.file)?)?;
    let no_target = || Failure::Rejected(format!("{}: scenario file has no target", args.file.display()));
    match kind {
        "run" => {
            let mut docs = Vec::new();
            for s in &file.scenarios {
                let req = RunRequest { format_version: None, scenario: s.clone(), baseline: file.baseline.clone() };
                docs.push(api::run_run(&map, &req)?);
            }
            emit(args.output, &docs, || docs.iter().map(|d| d.to_table()).collect::<Vec<_>>().join("\n"))
        }
        "compare" => {
            let req = CompareRequest {
                format_version: None,
                scenarios: file.scenarios.clone(),
                target: file.target.clone().ok_or_else(no_target)?,
                baseline: file.baseline.clone(),
            };
            let doc = api::run_compare(&map, &req)?;
            emit(args.output, &doc, || doc.to_table())
        }
        _ => {
            let controls = if file.controls.is_empty() {
                map.factors_of_kind(FactorKind::Control).map(|f| f.id.to_string()).collect()
            } else {
                file.controls.clone()
            };
            let req = InvertRequest {
                format_version: None,
                controls,
                target: file.target.clone().ok_or_else(no_target)?,
                ridge: file.ridge.unwrap_or(0.0),
                baseline: file.baseline.clone(),
            };
            let doc = api::run_invert(&map, &req)?;
            emit(args.output, &doc, || doc.to_table())
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct TemplateDocument {
    format_version: String,
    municipality_type: MunicipalityType,
    indicators: Vec<String>,
}

impl TemplateDocument {
    fn to_table(&self) -> String {
        let t = &self.municipality_type;
        let mut out = format!("type {} / {} / {}\n", t.climate, t.population_class, t.specialization);
        for i in &self.indicators {
            let _ = writeln!(out, "  {i}");
        }
        out
    }
}
