//! Command-line front end for the spiking content-addressable memory.
//!
//! Every subcommand runs one deterministic simulation, prints a verdict to
//! stdout and writes the full record (spike raster, and in JSON mode the
//! decoded operation results and report) to a file. The exit code is 0
//! exactly when all checks pass.

mod script;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use ca3_cam::gridmap::{parse_scenario, render_map, run_scenario, GridConfig, STATE_LABELS};
use ca3_cam::testbench::{run_memtest, run_operation_demo};
use ca3_cam::{
    compile, decode, CamConfig, CamNetwork, CamParams, OpError, OperationResult, Outcome, Raster,
    TimingContract,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

/// Deterministic spiking content-addressable memory: built-in exercises
/// and custom operation scripts.
#[derive(Parser)]
#[command(name = "camsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; defaults to camsim-<subcommand>.<format>
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of the output file
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Override a neuron or plasticity parameter, e.g. --param a_plus=0.3
    #[arg(long = "param", global = true, value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Recorded in output metadata; every built-in run is deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the fixed nine-operation demonstration and diff its raster
    /// against the frozen reference trace
    OpsDemo,
    /// Store-and-verify sweeps over every cue line, three times over
    Memtest {
        /// Number of cue lines
        #[arg(long, default_value_t = 5)]
        cues: usize,
        /// Number of content bits
        #[arg(long, default_value_t = 10)]
        cont: usize,
    },
    /// Run an occupancy-map scenario file
    Gridmap {
        /// Scenario file: `obs <cell> <state>` and `query <state,...>` lines
        scenario: PathBuf,
        /// Grid size as WxH
        #[arg(long, default_value = "4x4")]
        grid: String,
    },
    /// Compile and run an operation script
    Run {
        /// Script file: `learn <cue> <bits>`, `rcue <cue>`, `rcont <bits>`
        script: PathBuf,
        /// Number of cue lines
        #[arg(long, default_value_t = 5)]
        cues: usize,
        /// Number of content bits
        #[arg(long, default_value_t = 10)]
        cont: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::OpsDemo => "ops-demo",
            Command::Memtest { .. } => "memtest",
            Command::Gridmap { .. } => "gridmap",
            Command::Run { .. } => "run",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let overrides = parse_params(&cli.params)?;
    let mut params = CamParams::default();
    for (key, value) in &overrides {
        params.set(key, *value)?;
    }
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("camsim-{}.{}", cli.command.name(), cli.format.ext())));
    let emit = Emitter {
        command: cli.command.name(),
        path: out,
        format: cli.format,
        seed: cli.seed,
        overrides,
    };
    match cli.command {
        Command::OpsDemo => cmd_ops_demo(params, &emit),
        Command::Memtest { cues, cont } => cmd_memtest(cues, cont, params, &emit),
        Command::Gridmap { ref scenario, ref grid } => {
            cmd_gridmap(scenario, grid, params, &emit)
        }
        Command::Run { ref script, cues, cont } => cmd_run(script, cues, cont, params, &emit),
    }
}

fn parse_params(raw: &[String]) -> anyhow::Result<Vec<(String, f64)>> {
    raw.iter()
        .map(|spec| {
            let (key, value) = spec
                .split_once('=')
                .with_context(|| format!("--param {spec}: expected KEY=VALUE"))?;
            let value: f64 = value
                .parse()
                .with_context(|| format!("--param {spec}: `{value}` is not a number"))?;
            Ok((key.to_string(), value))
        })
        .collect()
}

#[derive(Serialize)]
struct Metadata {
    command: &'static str,
    cue_count: usize,
    cont_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    param_overrides: BTreeMap<String, f64>,
    generated_at_unix: u64,
}

/// Where and how one invocation's record gets written.
struct Emitter {
    command: &'static str,
    path: PathBuf,
    format: Format,
    seed: Option<u64>,
    overrides: Vec<(String, f64)>,
}

impl Emitter {
    fn metadata(&self, config: &CamConfig) -> Metadata {
        Metadata {
            command: self.command,
            cue_count: config.cue_count,
            cont_size: config.cont_size,
            seed: self.seed,
            param_overrides: self.overrides.iter().cloned().collect(),
            generated_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default()
                .as_secs(),
        }
    }

    /// Writes the raster as CSV, or the given document as JSON, and says
    /// so on stdout.
    fn write(
        &self,
        config: &CamConfig,
        raster: &Raster,
        fill: impl FnOnce(&mut serde_json::Map<String, serde_json::Value>),
    ) -> anyhow::Result<()> {
        let text = match self.format {
            Format::Csv => {
                let mut text = String::from("step,population,neuron\n");
                for (step, population, neuron) in raster.iter_named() {
                    text.push_str(&format!("{step},{population},{neuron}\n"));
                }
                text
            }
            Format::Json => {
                let mut doc = serde_json::Map::new();
                doc.insert("metadata".into(), json!(self.metadata(config)));
                fill(&mut doc);
                let events: Vec<(usize, &str, usize)> = raster.iter_named().collect();
                doc.insert("events".into(), json!(events));
                let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))?;
                text.push('\n');
                text
            }
        };
        fs::write(&self.path, text).with_context(|| format!("writing {}", self.path.display()))?;
        println!("wrote {}", self.path.display());
        Ok(())
    }
}

#[derive(Serialize)]
struct OpRecord {
    start: usize,
    op: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cue: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    content: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    forgotten: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fragment: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cues: Option<Vec<usize>>,
    valid: bool,
}

fn op_records(results: &[OperationResult]) -> Vec<OpRecord> {
    results
        .iter()
        .map(|res| {
            let mut rec = OpRecord {
                start: res.start,
                op: "",
                cue: None,
                content: None,
                forgotten: None,
                fragment: None,
                cues: None,
                valid: res.valid,
            };
            match &res.outcome {
                Outcome::Learned { pattern, forgotten } => {
                    rec.op = "learn";
                    rec.cue = Some(pattern.cue);
                    rec.content = Some(pattern.content.iter().copied().collect());
                    rec.forgotten = Some(forgotten.iter().copied().collect());
                }
                Outcome::RecalledByCue { cue, content } => {
                    rec.op = "rcue";
                    rec.cue = Some(*cue);
                    rec.content = Some(content.iter().copied().collect());
                }
                Outcome::RecalledByContent { fragment, cues } => {
                    rec.op = "rcont";
                    rec.fragment = Some(fragment.iter().copied().collect());
                    rec.cues = Some(cues.iter().copied().collect());
                }
            }
            rec
        })
        .collect()
}

fn fmt_set(set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn describe(res: &OperationResult) -> String {
    let mut line = match &res.outcome {
        Outcome::Learned { pattern, forgotten } => {
            let mut line = format!(
                "step {:>4}  learn  cue {} := {}",
                res.start,
                pattern.cue,
                fmt_set(&pattern.content)
            );
            if !forgotten.is_empty() {
                line.push_str(&format!(", forgot {}", fmt_set(forgotten)));
            }
            line
        }
        Outcome::RecalledByCue { cue, content } => format!(
            "step {:>4}  rcue   cue {} -> {}",
            res.start,
            cue,
            fmt_set(content)
        ),
        Outcome::RecalledByContent { fragment, cues } => format!(
            "step {:>4}  rcont  {} -> cues {}",
            res.start,
            fmt_set(fragment),
            fmt_set(cues)
        ),
    };
    if !res.valid {
        line.push_str("  [garbled]");
    }
    line
}

fn cmd_ops_demo(params: CamParams, emit: &Emitter) -> anyhow::Result<bool> {
    let report = run_operation_demo(params)?;
    for res in &report.results {
        println!("{}", describe(res));
    }
    let passed = report.passed();
    if passed {
        println!(
            "ops-demo: PASS ({} spikes match the reference trace)",
            report.raster.len()
        );
    } else {
        for line in &report.mismatches {
            println!("  {line}");
        }
        println!("ops-demo: FAIL ({} deviations)", report.mismatches.len());
    }
    emit.write(&CamConfig::new(5, 10), &report.raster, |doc| {
        doc.insert("verdict".into(), json!(if passed { "pass" } else { "fail" }));
        doc.insert("mismatches".into(), json!(report.mismatches));
        doc.insert("operations".into(), json!(op_records(&report.results)));
    })?;
    Ok(passed)
}

fn cmd_memtest(
    cues: usize,
    cont: usize,
    params: CamParams,
    emit: &Emitter,
) -> anyhow::Result<bool> {
    let mut config = CamConfig::new(cues, cont);
    config.params = params;
    let report = run_memtest(&config)?;
    let passed = report.passed();
    if !passed {
        for line in &report.mismatches {
            println!("  {line}");
        }
    }
    println!(
        "memtest: {} ({} learns, {} forgetting; {} recalls by cue, {} by content; {} steps)",
        if passed { "PASS" } else { "FAIL" },
        report.learns,
        report.forgetting_learns,
        report.recalls_by_cue,
        report.recalls_by_content,
        report.total_steps
    );
    emit.write(&config, &report.raster, |doc| {
        doc.insert("verdict".into(), json!(if passed { "pass" } else { "fail" }));
        doc.insert("learns".into(), json!(report.learns));
        doc.insert("forgetting_learns".into(), json!(report.forgetting_learns));
        doc.insert("recalls_by_cue".into(), json!(report.recalls_by_cue));
        doc.insert("recalls_by_content".into(), json!(report.recalls_by_content));
        doc.insert("total_steps".into(), json!(report.total_steps));
        let sweeps: Vec<serde_json::Value> = report
            .sweeps
            .iter()
            .map(|s| {
                json!({
                    "forgotten": s.forgotten,
                    "by_cue": s.by_cue,
                    "by_content": s.by_content,
                })
            })
            .collect();
        doc.insert("sweeps".into(), json!(sweeps));
        doc.insert("mismatches".into(), json!(report.mismatches));
    })?;
    Ok(passed)
}

fn parse_grid(spec: &str, params: CamParams) -> anyhow::Result<GridConfig> {
    let parsed = spec
        .split_once('x')
        .and_then(|(w, h)| Some((w.parse().ok()?, h.parse().ok()?)));
    match parsed {
        Some((width, height)) if width > 0 && height > 0 => Ok(GridConfig {
            width,
            height,
            params,
        }),
        _ => bail!("--grid {spec}: expected WxH, e.g. 4x4"),
    }
}

fn fmt_states(states: &BTreeSet<usize>) -> String {
    let labels: Vec<&str> = states.iter().map(|&s| STATE_LABELS[s]).collect();
    format!("{{{}}}", labels.join(","))
}

fn cmd_gridmap(
    scenario_path: &Path,
    grid_spec: &str,
    params: CamParams,
    emit: &Emitter,
) -> anyhow::Result<bool> {
    let grid = parse_grid(grid_spec, params)?;
    let text = fs::read_to_string(scenario_path)
        .with_context(|| format!("reading {}", scenario_path.display()))?;
    let scenario = parse_scenario(&text)?;
    let outcome = run_scenario(grid, &scenario)?;
    print!("{}", render_map(&outcome.state_map, grid));
    for (states, answer) in scenario.queries.iter().zip(&outcome.answers) {
        println!("query {} -> cells {}", fmt_states(states), fmt_set(answer));
    }
    println!(
        "gridmap: PASS ({} observations settled by step {}, last answer at step {})",
        scenario.observations.len(),
        outcome.observation_end,
        outcome.final_step
    );
    emit.write(&grid.cam_config(), &outcome.raster, |doc| {
        let map: Vec<String> = render_map(&outcome.state_map, grid)
            .lines()
            .map(str::to_string)
            .collect();
        doc.insert("map".into(), json!(map));
        doc.insert("answers".into(), json!(outcome.answers));
        doc.insert("observation_end".into(), json!(outcome.observation_end));
        doc.insert("final_step".into(), json!(outcome.final_step));
        doc.insert("operations".into(), json!(op_records(&outcome.results)));
    })?;
    Ok(true)
}

fn line_mapped(err: OpError, lines: &[usize]) -> anyhow::Error {
    match lines.get(err.index()) {
        Some(line) => anyhow::anyhow!("line {line}: {err}"),
        None => err.into(),
    }
}

fn cmd_run(
    script_path: &Path,
    cues: usize,
    cont: usize,
    params: CamParams,
    emit: &Emitter,
) -> anyhow::Result<bool> {
    let text = fs::read_to_string(script_path)
        .with_context(|| format!("reading {}", script_path.display()))?;
    let script = script::parse_script(&text)?;
    let mut config = CamConfig::new(cues, cont);
    config.params = params;
    let plan = compile(&config, 0, &script.requests, &TimingContract::default())
        .map_err(|err| line_mapped(err, &script.lines))?;
    let mut cam = CamNetwork::new(config.clone())?;
    cam.schedule(&plan.schedule)
        .expect("compiled plans schedule cleanly");
    cam.run_to(plan.until);
    let raster = cam.raster();
    let results = decode(&raster, &config, &plan.planned);
    for res in &results {
        println!("{}", describe(res));
    }
    let garbled = results.iter().filter(|r| !r.valid).count();
    if garbled == 0 {
        println!("run: PASS ({} operations, all responses clean)", results.len());
    } else {
        println!("run: FAIL ({garbled} of {} responses garbled)", results.len());
    }
    emit.write(&config, &raster, |doc| {
        doc.insert(
            "verdict".into(),
            json!(if garbled == 0 { "pass" } else { "fail" }),
        );
        doc.insert("operations".into(), json!(op_records(&results)));
    })?;
    Ok(garbled == 0)
}
