//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use crate::constraints::{ConstraintSet, FailPolicy};
use crate::generation::toy::ToyLmSpec;
use crate::generation::toytask::{build_toy_task, build_toy_task_with, ToyTaskOptions};
use crate::generation::StepGenerator;
use crate::harness::config_file::load_config;
use crate::harness::{
    decode_prompt, export_tree, load_dataset, run_experiment, run_sweep, write_dataset,
    ExperimentSpec, Mode, TaskInstance, TreeFormat,
};
use crate::http::ENDPOINT_ENV;
use crate::registry::{self, BuildOptions};
use crate::selection::{extract_answer, Scorer, SelectionContext, TaskKind};
use crate::types::{DecodeConfig, TokenSamplingParams};

/// Config-file keys that are plain switches.
const SWITCHES: [&str; 3] = ["fail-closed", "greedy", "timing"];

#[derive(Parser, Debug)]
#[command(
    name = "stepdecode",
    version,
    about = "Step-level tree search decoding for chain-of-thought reasoning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode one prompt and print the selected chain.
    Decode(DecodeCmd),
    /// Run a JSONL dataset and write a report.
    Run(RunCmd),
    /// Run a branching-factor x buffer-size grid, one report per cell.
    Sweep(SweepCmd),
    /// Write a seeded toy arithmetic dataset and its grammar.
    Toygen(ToygenCmd),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Flat key = value file of flag values; flags on the command line win.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "tree|end2end")]
    mode: Option<Mode>,
    /// Step temperature at depth 0.
    #[arg(long)]
    tau: Option<f64>,
    /// Per-depth annealing factor.
    #[arg(long)]
    alpha: Option<f64>,
    /// Length penalty exponent of the step score.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    max_step_tokens: Option<usize>,
    #[arg(long)]
    max_end2end_tokens: Option<usize>,
    #[arg(long)]
    max_regeneration_attempts: Option<usize>,
    #[arg(long)]
    repetition_threshold: Option<f64>,
    /// Token sampling temperature.
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    top_p: Option<f64>,
    /// Decode tokens greedily (overrides temperature, top-k and top-p).
    #[arg(long)]
    greedy: bool,
    /// Chains per instance in end2end mode.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_name = "ngram|selfcons|cosine|verifier")]
    scorer: Option<String>,
    #[arg(long)]
    ngram_n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "toy|remote")]
    model: Option<String>,
    /// Completion server URL for --model remote.
    #[arg(long, value_name = "URL")]
    endpoint: Option<String>,
    /// Grammar file for --model toy.
    #[arg(long, value_name = "PATH")]
    toy_grammar: Option<PathBuf>,
    #[arg(long, value_name = "lexical|http")]
    similarity: Option<String>,
    #[arg(long, value_name = "rule|neutral|http")]
    entailment: Option<String>,
    #[arg(long, value_name = "URL")]
    embedding_endpoint: Option<String>,
    #[arg(long, value_name = "URL")]
    nli_endpoint: Option<String>,
    #[arg(long, value_name = "URL")]
    verifier_endpoint: Option<String>,
    /// Treat a failing constraint provider as a violation instead of a pass.
    #[arg(long)]
    fail_closed: bool,
    #[arg(long)]
    retry_budget: Option<usize>,
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[arg(long, value_name = "numeric|yes_no|multiple_choice")]
    task_kind: Option<TaskKind>,
    #[arg(long, value_name = "json|dot")]
    tree_format: Option<TreeFormat>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct DecodeCmd {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    branching_factor: Option<usize>,
    #[arg(long)]
    buffer_size: Option<usize>,
    /// Prompt text; with --model toy and no prompt, a seeded toy problem is used.
    #[arg(long)]
    prompt: Option<String>,
    /// Question the constraints compare against (defaults to the prompt).
    #[arg(long)]
    question: Option<String>,
    /// Write the search tree here.
    #[arg(long, value_name = "PATH")]
    emit_tree: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct RunCmd {
    #[command(flatten)]
    common: CommonArgs,
    /// JSONL dataset.
    dataset: PathBuf,
    #[arg(long)]
    branching_factor: Option<usize>,
    #[arg(long)]
    buffer_size: Option<usize>,
    /// Prompt template for question-only lines.
    #[arg(long, value_name = "gsm8k|strategyqa|csqa")]
    template: Option<String>,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Directory for one tree file per instance.
    #[arg(long, value_name = "DIR")]
    emit_tree: Option<PathBuf>,
    /// Record per-instance wall time (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct SweepCmd {
    #[command(flatten)]
    common: CommonArgs,
    dataset: PathBuf,
    /// Comma-separated branching factors.
    #[arg(long, default_value = "2,4,8")]
    branching_factor: String,
    /// Comma-separated buffer sizes.
    #[arg(long, default_value = "8")]
    buffer_size: String,
    #[arg(long, value_name = "gsm8k|strategyqa|csqa")]
    template: Option<String>,
    #[arg(long, value_name = "DIR", default_value = "sweep-reports")]
    out_dir: PathBuf,
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ToygenCmd {
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = ToyTaskOptions::default().trap_fraction)]
    trap_fraction: f64,
    /// Dataset path; the grammar goes next to it as <stem>.grammar.json.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Grammar file paired with a toy dataset: `dir/x.jsonl` -> `dir/x.grammar.json`.
pub fn grammar_path_for(dataset: &Path) -> PathBuf {
    let stem = dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "toy".to_string());
    dataset.with_file_name(format!("{stem}.grammar.json"))
}

/// Splices `--config` file values in front of the user's flags so the latter override.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    if argv.len() < 2 || argv[1].starts_with('-') {
        return Ok(argv);
    }
    let mut path = None;
    for (i, a) in argv.iter().enumerate().skip(2) {
        if a == "--config" {
            path = Some(
                argv.get(i + 1)
                    .cloned()
                    .ok_or_else(|| usage("--config needs a path"))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let values = load_config(Path::new(&path)).map_err(|e| usage(e.to_string()))?;
    let mut injected = Vec::new();
    for (key, value) in values {
        if key == "config" {
            return Err(usage("config files cannot include other config files"));
        }
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => injected.push(format!("--{key}")),
                "false" => {}
                other => {
                    return Err(usage(format!(
                        "config key {key}: expected true or false, got {other:?}"
                    )))
                }
            }
        } else {
            injected.push(format!("--{key}"));
            injected.push(value);
        }
    }
    let mut out = argv[..2].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<usize>, CliError> {
    let items: Result<Vec<usize>, _> = s.split(',').map(|x| x.trim().parse::<usize>()).collect();
    match items {
        Ok(v) if !v.is_empty() && v.iter().all(|x| *x > 0) => Ok(v),
        _ => Err(usage(format!(
            "--{flag} expects comma-separated positive integers, got {s:?}"
        ))),
    }
}

fn decode_config(
    c: &CommonArgs,
    branching: Option<usize>,
    buffer: Option<usize>,
) -> Result<DecodeConfig, CliError> {
    let d = DecodeConfig::default();
    let dp = TokenSamplingParams::default();
    let params = if c.greedy {
        TokenSamplingParams::greedy()
    } else {
        TokenSamplingParams {
            temperature: c.temperature.unwrap_or(dp.temperature),
            top_k: c.top_k.or(dp.top_k),
            top_p: c.top_p.or(dp.top_p),
        }
    };
    let config = DecodeConfig {
        branching_factor: branching.unwrap_or(d.branching_factor),
        buffer_size: buffer.unwrap_or(d.buffer_size),
        length_penalty: c.lambda.unwrap_or(d.length_penalty),
        step_temperature: c.tau.unwrap_or(d.step_temperature),
        annealing_factor: c.alpha.unwrap_or(d.annealing_factor),
        max_regeneration_attempts: c
            .max_regeneration_attempts
            .unwrap_or(d.max_regeneration_attempts),
        max_depth: c.max_depth.unwrap_or(d.max_depth),
        max_step_tokens: c.max_step_tokens.unwrap_or(d.max_step_tokens),
        max_end2end_tokens: c.max_end2end_tokens.unwrap_or(d.max_end2end_tokens),
        repetition_threshold: c.repetition_threshold.unwrap_or(d.repetition_threshold),
        token_sampling_schedule: vec![params],
        rng_seed: c.seed.unwrap_or(d.rng_seed),
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn build_options(c: &CommonArgs, toy_spec: Option<ToyLmSpec>) -> BuildOptions {
    let d = BuildOptions::default();
    BuildOptions {
        endpoint: c
            .endpoint
            .clone()
            .or_else(|| std::env::var(ENDPOINT_ENV).ok()),
        embedding_endpoint: c.embedding_endpoint.clone(),
        nli_endpoint: c.nli_endpoint.clone(),
        verifier_endpoint: c.verifier_endpoint.clone(),
        timeout: c.timeout_secs.map(Duration::from_secs).unwrap_or(d.timeout),
        retry_budget: c.retry_budget.unwrap_or(d.retry_budget),
        ngram_n: c.ngram_n.unwrap_or(d.ngram_n),
        toy_spec,
        similarity: c.similarity.clone().unwrap_or(d.similarity),
    }
}

struct Components {
    generator: Box<dyn StepGenerator>,
    scorer: Box<dyn Scorer>,
    constraints: ConstraintSet,
}

fn load_grammar(path: &Path) -> Result<ToyLmSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read toy grammar {}", path.display()))?;
    Ok(serde_json::from_str(&text)
        .with_context(|| format!("invalid toy grammar {}", path.display()))?)
}

fn components(
    c: &CommonArgs,
    config: &DecodeConfig,
    toy_spec: Option<ToyLmSpec>,
) -> Result<Components, CliError> {
    let opts = build_options(c, toy_spec);
    let model = c.model.as_deref().unwrap_or("toy");
    let generators = registry::generators();
    if !generators.contains(model) {
        return Err(usage(format!(
            "unknown --model {model:?} (available: {})",
            generators.names().join(", ")
        )));
    }
    let generator = generators.build(model, &opts).map_err(|e| match e {
        registry::RegistryError::Build(m) => CliError::Runtime(anyhow!(m)),
        other => usage(other.to_string()),
    })?;
    let scorer = registry::scorers()
        .build(c.scorer.as_deref().unwrap_or("ngram"), &opts)
        .map_err(|e| usage(e.to_string()))?;
    let similarity = registry::similarity_providers()
        .build(&opts.similarity, &opts)
        .map_err(|e| usage(e.to_string()))?;
    let entailment = registry::entailment_providers()
        .build(c.entailment.as_deref().unwrap_or("rule"), &opts)
        .map_err(|e| usage(e.to_string()))?;
    let policy = if c.fail_closed {
        FailPolicy::Closed
    } else {
        FailPolicy::Open
    };
    let constraints = ConstraintSet::new(similarity, entailment)
        .with_threshold(config.repetition_threshold)
        .with_fail_policy(policy);
    Ok(Components {
        generator,
        scorer,
        constraints,
    })
}

/// Toy grammar for a dataset run: the explicit flag, else the file next to the dataset.
fn dataset_grammar(c: &CommonArgs, dataset: &Path) -> Result<Option<ToyLmSpec>, CliError> {
    if c.model.as_deref().unwrap_or("toy") != "toy" {
        return Ok(None);
    }
    let path = c
        .toy_grammar
        .clone()
        .unwrap_or_else(|| grammar_path_for(dataset));
    load_grammar(&path).map(Some)
}

fn spec_for(
    c: &CommonArgs,
    config: DecodeConfig,
    timing: bool,
) -> Result<ExperimentSpec, CliError> {
    let mut spec = ExperimentSpec::new(c.mode.unwrap_or(Mode::Tree), config);
    if let Some(k) = c.samples {
        if k == 0 {
            return Err(usage("--samples must be >= 1"));
        }
        spec.samples = k;
    }
    spec.timing = timing;
    Ok(spec)
}

fn load_instances(
    path: &Path,
    template: Option<&str>,
    kind: Option<TaskKind>,
) -> Result<Vec<TaskInstance>, CliError> {
    let mut data = load_dataset(path, template).map_err(|e| CliError::Runtime(e.into()))?;
    if let Some(k) = kind {
        for inst in &mut data {
            inst.task_kind = k;
        }
    }
    Ok(data)
}

fn safe_file_name(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn cmd_decode(cmd: DecodeCmd, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &cmd.common;
    let config = decode_config(c, cmd.branching_factor, cmd.buffer_size)?;
    let mode = c.mode.unwrap_or(Mode::Tree);
    if cmd.emit_tree.is_some() && mode == Mode::EndToEnd {
        return Err(usage("--emit-tree needs --mode tree"));
    }
    let model = c.model.as_deref().unwrap_or("toy");
    let (prompt, toy_spec, gold, kind) = match (&cmd.prompt, model) {
        (Some(p), "toy") => {
            let spec = match &c.toy_grammar {
                Some(path) => load_grammar(path)?,
                None => return Err(usage("--prompt with --model toy needs --toy-grammar")),
            };
            (p.clone(), Some(spec), None, c.task_kind.unwrap_or_default())
        }
        (None, "toy") => {
            let set = match &c.toy_grammar {
                Some(_) => return Err(usage("--toy-grammar needs --prompt")),
                None => build_toy_task(config.rng_seed, 1),
            };
            let p = &set.problems[0];
            (
                p.question.clone(),
                Some(set.spec.clone()),
                Some(p.gold_answer.clone()),
                TaskKind::Numeric,
            )
        }
        (Some(p), _) => (p.clone(), None, None, c.task_kind.unwrap_or_default()),
        (None, _) => return Err(usage(format!("--model {model} needs --prompt"))),
    };
    let question = cmd.question.clone().unwrap_or_else(|| prompt.clone());
    let parts = components(c, &config, toy_spec)?;
    let samples = c.samples.unwrap_or(16);
    if samples == 0 {
        return Err(usage("--samples must be >= 1"));
    }
    let decoded = decode_prompt(
        &prompt,
        &question,
        mode,
        &config,
        samples,
        parts.generator.as_ref(),
        &parts.constraints,
    )
    .context("decoding failed")?;
    writeln!(out, "prompt: {}", prompt.lines().last().unwrap_or_default()).ok();
    writeln!(
        out,
        "pool: {} candidates, {} tokens generated",
        decoded.pool.len(),
        decoded.tokens
    )
    .ok();
    if decoded.pool.is_empty() {
        writeln!(out, "no candidate chain survived").ok();
    } else {
        let sel = parts
            .scorer
            .select(&decoded.pool, &SelectionContext::new(&question, kind))
            .context("selection failed")?;
        writeln!(
            out,
            "selected: candidate {} by {}",
            sel.chosen_index, sel.scorer_name
        )
        .ok();
        for (i, step) in sel.chosen_chain.steps.iter().enumerate() {
            writeln!(out, "  {}. {}  [score {:.4}]", i + 1, step.text, step.score).ok();
        }
        let answer = extract_answer(&sel.chosen_chain, kind);
        writeln!(out, "answer: {}", answer.as_deref().unwrap_or("(none)")).ok();
        if let Some(g) = gold {
            writeln!(out, "gold: {g}").ok();
        }
    }
    if let (Some(path), Some(tree)) = (&cmd.emit_tree, &decoded.tree) {
        write_file(
            path,
            &export_tree(tree, c.tree_format.unwrap_or(TreeFormat::Json)),
        )?;
    }
    Ok(())
}

fn cmd_run(cmd: RunCmd, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &cmd.common;
    let config = decode_config(c, cmd.branching_factor, cmd.buffer_size)?;
    let mut spec = spec_for(c, config.clone(), cmd.timing)?;
    if cmd.emit_tree.is_some() {
        if spec.mode == Mode::EndToEnd {
            return Err(usage("--emit-tree needs --mode tree"));
        }
        spec.keep_trees = true;
    }
    let data = load_instances(&cmd.dataset, cmd.template.as_deref(), c.task_kind)?;
    let parts = components(c, &config, dataset_grammar(c, &cmd.dataset)?)?;
    let result = run_experiment(
        &data,
        &spec,
        parts.scorer.as_ref(),
        parts.generator.as_ref(),
        &parts.constraints,
    )
    .map_err(|e| CliError::Runtime(e.into()))?;
    let json = result.report.to_json();
    match &cmd.out {
        Some(path) => {
            write_file(path, &json)?;
            let r = &result.report;
            writeln!(
                out,
                "{} instances, accuracy {:.4}, upper bound {:.4}, {} failed, {} tokens",
                r.instances, r.accuracy, r.upper_bound_accuracy, r.failed, r.total_tokens
            )
            .ok();
        }
        None => {
            out.write_all(json.as_bytes())
                .context("cannot write report")?;
        }
    }
    if let Some(dir) = &cmd.emit_tree {
        let format = c.tree_format.unwrap_or(TreeFormat::Json);
        for (id, tree) in &result.trees {
            let path = dir.join(format!("{}.{}", safe_file_name(id), format.extension()));
            write_file(&path, &export_tree(tree, format))?;
        }
    }
    Ok(())
}

fn cmd_sweep(cmd: SweepCmd, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &cmd.common;
    let branching = parse_list("branching-factor", &cmd.branching_factor)?;
    let buffers = parse_list("buffer-size", &cmd.buffer_size)?;
    let config = decode_config(c, Some(branching[0]), Some(buffers[0]))?;
    let spec = spec_for(c, config.clone(), cmd.timing)?;
    let data = load_instances(&cmd.dataset, cmd.template.as_deref(), c.task_kind)?;
    let parts = components(c, &config, dataset_grammar(c, &cmd.dataset)?)?;
    let cells = run_sweep(
        &data,
        &spec,
        &branching,
        &buffers,
        parts.scorer.as_ref(),
        parts.generator.as_ref(),
        &parts.constraints,
    )
    .map_err(|e| CliError::Runtime(e.into()))?;
    for cell in &cells {
        let path = cmd.out_dir.join(format!(
            "report-b{}-buf{}.json",
            cell.branching_factor, cell.buffer_size
        ));
        write_file(&path, &cell.report.to_json())?;
        writeln!(
            out,
            "branching {:>3}  buffer {:>4}  accuracy {:.4}  upper bound {:.4}  tokens {}",
            cell.branching_factor,
            cell.buffer_size,
            cell.report.accuracy,
            cell.report.upper_bound_accuracy,
            cell.report.total_tokens
        )
        .ok();
    }
    Ok(())
}

fn cmd_toygen(cmd: ToygenCmd, out: &mut dyn Write) -> Result<(), CliError> {
    if cmd.count == 0 {
        return Err(usage("--count must be >= 1"));
    }
    if !(0.0..=1.0).contains(&cmd.trap_fraction) {
        return Err(usage("--trap-fraction must be in [0, 1]"));
    }
    let set = build_toy_task_with(
        cmd.seed,
        cmd.count,
        ToyTaskOptions {
            trap_fraction: cmd.trap_fraction,
        },
    );
    let instances: Vec<TaskInstance> = set
        .problems
        .iter()
        .map(|p| TaskInstance {
            id: p.id.clone(),
            question: p.question.clone(),
            prompt: p.question.clone(),
            gold_answer: p.gold_answer.clone(),
            task_kind: TaskKind::Numeric,
        })
        .collect();
    if let Some(dir) = cmd.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    write_dataset(&cmd.out, &instances)
        .with_context(|| format!("cannot write {}", cmd.out.display()))?;
    let grammar = grammar_path_for(&cmd.out);
    let mut json = serde_json::to_string_pretty(&set.spec).context("cannot serialize grammar")?;
    json.push('\n');
    write_file(&grammar, &json)?;
    let traps = set.problems.iter().filter(|p| !p.greedy_correct).count();
    writeln!(
        out,
        "wrote {} problems to {} ({} where greedy decoding is wrong) and grammar to {}",
        cmd.count,
        cmd.out.display(),
        traps,
        grammar.display()
    )
    .ok();
    Ok(())
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run_cli(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = expand_config(argv).and_then(|argv| {
        let cli = match Cli::try_parse_from(argv) {
            Ok(cli) => cli,
            Err(e) => {
                use clap::error::ErrorKind;
                return match e.kind() {
                    ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                        write!(out, "{e}").ok();
                        Ok(())
                    }
                    _ => Err(usage(e.render().to_string())),
                };
            }
        };
        match cli.command {
            Command::Decode(c) => cmd_decode(c, out),
            Command::Run(c) => cmd_run(c, out),
            Command::Sweep(c) => cmd_sweep(c, out),
            Command::Toygen(c) => cmd_toygen(c, out),
        }
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let msg = msg.trim_end();
            if msg.starts_with("error:") {
                writeln!(err, "{msg}").ok();
            } else {
                writeln!(err, "error: {msg}\n\nFor more information, try '--help'.").ok();
            }
            1
        }
        Err(CliError::Runtime(e)) => {
            writeln!(err, "error: {e:#}").ok();
            2
        }
    }
}

pub fn cli_main() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(argv, &mut stdout.lock(), &mut stderr.lock())
}
