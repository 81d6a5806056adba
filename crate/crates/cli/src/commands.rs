//! Subcommand implementations.

use std::path::{Path, PathBuf};

use dnfrule::colgen::{train as train_rules, HumanInput, Mode, Model, Params, TrainStatus};
use dnfrule::dataset::{binarize, generate_tictactoe, load_csv_inferred, save_csv, RawTable, DEFAULT_BINS};
use dnfrule::experiments::{
    aggregates_csv, results_csv, run_grid_with, tictactoe_rules, ExperimentGrid,
};
use dnfrule::metrics::{accuracy, ruleset_similarity, EvalReport};
use dnfrule::par::{with_jobs, Execution};
use dnfrule::ruledsl::{
    bind, bind_templates, parse_rules, parse_templates, print_rules, unbind, Provenance, RuleSet, Template,
};
use serde::Serialize;

use crate::config::{load_config, Settings};
use crate::error::{fail, CliResult, Exit, Tag};
use crate::output::{check_targets, write_atomic, Manifest};
use crate::{EvalArgs, ExperimentArgs, GenDataArgs, ParamArgs, TrainArgs};

fn resolve(params: &ParamArgs, extra: Settings) -> CliResult<Settings> {
    let file = match &params.config {
        Some(p) => Settings::from_map(&load_config(p).tag(Exit::Config)?).tag(Exit::Config)?,
        None => Settings::default(),
    };
    Ok(file.overlay(params.settings()).overlay(extra))
}

fn execution(jobs: usize) -> Execution {
    if jobs == 1 {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn require_file(path: &Path, exit: Exit) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(fail(exit, format!("{} does not exist", path.display())))
    }
}

fn read_text(path: &Path, exit: Exit) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| fail(exit, format!("reading {}: {e}", path.display())))
}

fn read_rules(path: &Path) -> CliResult<RuleSet> {
    Ok(parse_rules(&read_text(path, Exit::Config)?)?)
}

fn read_templates(path: &Path) -> CliResult<Vec<Template>> {
    Ok(parse_templates(&read_text(path, Exit::Config)?)?)
}

fn load_data(path: &Path, label: &str) -> CliResult<RawTable> {
    require_file(path, Exit::Data)?;
    Ok(load_csv_inferred(path, label)?)
}

fn params_from(s: &Settings, mode: Mode) -> Params {
    let d = Params::default();
    Params {
        complexity: s.complexity.unwrap_or(d.complexity),
        c_u: s.cu.unwrap_or(d.c_u),
        c_p: s.cp.unwrap_or(d.c_p),
        max_degree: s.max_degree.unwrap_or(d.max_degree),
        max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
        mode,
        execution: execution(s.jobs.unwrap_or(0)),
        ..d
    }
}

pub fn gen_data(args: &GenDataArgs) -> CliResult<()> {
    let table = match args.name.to_ascii_lowercase().as_str() {
        "tictactoe" | "tic-tac-toe" => generate_tictactoe(),
        other => return Err(fail(Exit::Config, format!("unknown generator `{other}` (known: tictactoe)"))),
    };
    check_targets(std::slice::from_ref(&args.out), args.force).tag(Exit::Config)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).tag(Exit::Data)?;
    }
    save_csv(&table, &args.out)?;
    println!("wrote {} rows to {}", table.n_rows(), args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct TrainConfig<'a> {
    data: &'a Path,
    label: &'a str,
    rules: Option<&'a Path>,
    templates: Option<&'a Path>,
    bins: usize,
    jobs: usize,
    params: &'a Params,
}

fn train_mode(requested: Option<Mode>, rules: bool, templates: bool) -> CliResult<Mode> {
    let mode = requested.unwrap_or(if templates {
        Mode::Templates
    } else if rules {
        Mode::Soft
    } else {
        Mode::Machine
    });
    match mode {
        Mode::Templates if !templates => Err(fail(Exit::Config, "templates mode needs --templates")),
        Mode::Templates if rules => Err(fail(Exit::Config, "templates mode does not take --rules")),
        Mode::Soft | Mode::Hard if !rules => Err(fail(Exit::Config, format!("{mode} mode needs --rules"))),
        Mode::Soft | Mode::Hard if templates => {
            Err(fail(Exit::Config, format!("{mode} mode does not take --templates")))
        }
        _ => Ok(mode),
    }
}

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let settings = resolve(&args.params, Settings::default())?;
    let mode = train_mode(settings.mode, args.rules.is_some(), args.templates.is_some())?;
    let params = params_from(&settings, mode);
    params.validate()?;
    let bins = settings.bins.unwrap_or(DEFAULT_BINS);
    let jobs = settings.jobs.unwrap_or(0);

    require_file(&args.data, Exit::Data)?;
    for p in args.rules.iter().chain(&args.templates) {
        require_file(p, Exit::Config)?;
    }
    let targets: Vec<PathBuf> =
        ["model.json", "report.json", "rules.txt", "manifest.json"].iter().map(|f| args.out.join(f)).collect();
    check_targets(&targets, args.force).tag(Exit::Config)?;

    let raw = load_data(&args.data, &args.label)?;
    let mut ds = binarize(&raw, bins, true)?;
    let human = if let Some(p) = &args.rules {
        HumanInput::rules(bind(&read_rules(p)?, &mut ds)?.conjunctions)
    } else if let Some(p) = &args.templates {
        HumanInput::templates(bind_templates(&read_templates(p)?, &mut ds)?)
    } else {
        HumanInput::default()
    };

    let outcome = with_jobs(jobs, || train_rules(&ds, &human, &params))?;
    let report = &outcome.report;
    let model = Model::new(&outcome, &ds, &args.label, &params);
    let printed = print_rules(&outcome.rule_set);
    write_atomic(&targets[0], model.to_json().as_bytes()).tag(Exit::Internal)?;
    let report_json = serde_json::to_string_pretty(report).tag(Exit::Internal)?;
    write_atomic(&targets[1], report_json.as_bytes()).tag(Exit::Internal)?;
    write_atomic(&targets[2], format!("{printed}\n").as_bytes()).tag(Exit::Internal)?;
    let config = TrainConfig {
        data: &args.data,
        label: &args.label,
        rules: args.rules.as_deref(),
        templates: args.templates.as_deref(),
        bins,
        jobs,
        params: &params,
    };
    Manifest::new("train", 0, &config, &targets).write(&targets[3]).tag(Exit::Internal)?;

    println!("{printed}");
    println!();
    println!("mode: {mode}");
    println!("training accuracy: {:.4}", accuracy(&outcome.rules, &ds)?);
    println!(
        "objective: {} (hamming loss {}, human penalty {}, template penalty {})",
        report.objective, report.hamming_loss, report.human_penalty, report.template_penalty
    );
    println!("complexity: {} / {}", report.complexity, params.complexity);
    println!("iterations: {}, proven optimal: {}", report.iterations.len(), report.proven_optimal);
    for h in &report.human_rules {
        let conj = unbind(&h.columns, ds.columns(), Provenance::Human);
        let text: Vec<String> = conj.literals().iter().map(ToString::to_string).collect();
        let state = if h.selected { "kept" } else { "dropped" };
        println!("human rule {state}: {}", text.join(" AND "));
        log::info!("human rule {:?} {state}", h.columns);
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    match report.status {
        TrainStatus::Converged => Ok(()),
        status => Err(fail(Exit::IterationLimit, format!("training stopped early ({status:?}); outputs written"))),
    }
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    require_file(&args.model, Exit::Data)?;
    require_file(&args.data, Exit::Data)?;
    if let Some(p) = &args.reference {
        require_file(p, Exit::Config)?;
    }
    check_targets(std::slice::from_ref(&args.out), args.force).tag(Exit::Config)?;
    let model = Model::from_json(&read_text(&args.model, Exit::Data)?)?;
    let reference = args.reference.as_deref().map(read_rules).transpose()?;
    let raw = load_data(&args.data, &model.label)?;
    let ds = model.binarize(&raw)?;
    let mut report = EvalReport::evaluate(0, &model.conjunctions, &ds)?;
    report.similarity = reference.as_ref().map(|r| ruleset_similarity(&model.rules, r));
    let csv = format!("fold,metric,value\n{}", report.csv_rows());
    write_atomic(&args.out, csv.as_bytes()).tag(Exit::Internal)?;
    println!("samples: {}", ds.n_samples());
    println!("accuracy: {:.4}", report.accuracy);
    println!("hamming loss: {}", report.hamming_loss);
    println!("complexity: {}", report.complexity);
    if let Some(s) = report.similarity {
        println!("similarity: {s:.4}");
    }
    Ok(())
}

#[derive(Serialize)]
struct ExperimentConfig<'a> {
    data: Option<&'a Path>,
    label: &'a str,
    rules: Option<&'a Path>,
    reference: Option<&'a Path>,
    jobs: usize,
    grid: &'a ExperimentGrid,
}

pub fn experiment(args: &ExperimentArgs) -> CliResult<()> {
    let extra = Settings {
        fractions: args.fractions.clone(),
        rule_counts: args.rule_counts.clone(),
        folds: args.folds,
        timing: args.timing.then_some(true),
        ..Settings::default()
    };
    let s = resolve(&args.params, extra)?;
    for p in args.rules.iter().chain(&args.reference) {
        require_file(p, Exit::Config)?;
    }
    if let Some(p) = &args.data {
        require_file(p, Exit::Data)?;
    }
    let pool = match &args.rules {
        Some(p) => read_rules(p)?,
        None if args.data.is_none() => tictactoe_rules(),
        None => RuleSet::default(),
    };
    let reference = match &args.reference {
        Some(p) => Some(read_rules(p)?),
        None => (!pool.is_empty()).then(|| pool.clone()),
    };

    let d = ExperimentGrid::default();
    let jobs = s.jobs.unwrap_or(0);
    let human_mode = s.mode.unwrap_or(d.human_mode);
    let grid = ExperimentGrid {
        fractions: s.fractions.clone().unwrap_or(d.fractions),
        rule_counts: s.rule_counts.clone().unwrap_or(if pool.is_empty() { vec![0] } else { d.rule_counts }),
        folds: s.folds.unwrap_or(d.folds),
        params: Params {
            complexity: s.complexity.unwrap_or(d.params.complexity),
            c_u: s.cu.unwrap_or(d.params.c_u),
            c_p: s.cp.unwrap_or(d.params.c_p),
            max_degree: s.max_degree.unwrap_or(d.params.max_degree),
            max_iterations: s.max_iterations.unwrap_or(d.params.max_iterations),
            ..d.params
        },
        human_mode,
        bins: s.bins.unwrap_or(d.bins),
        seed: s.seed.unwrap_or(d.seed),
        timing: s.timing.unwrap_or(false),
        execution: execution(jobs),
    };
    grid.validate(pool.len())?;

    let targets: Vec<PathBuf> =
        ["results.csv", "aggregates.csv", "manifest.json"].iter().map(|f| args.out.join(f)).collect();
    check_targets(&targets, args.force).tag(Exit::Config)?;

    let raw = match &args.data {
        Some(p) => load_data(p, &args.label)?,
        None => generate_tictactoe(),
    };
    let results = with_jobs(jobs, || run_grid_with(&raw, &grid, &pool, reference.as_ref()))?;
    write_atomic(&targets[0], results_csv(&results.rows).as_bytes()).tag(Exit::Internal)?;
    write_atomic(&targets[1], aggregates_csv(&results.aggregates).as_bytes()).tag(Exit::Internal)?;
    let config = ExperimentConfig {
        data: args.data.as_deref(),
        label: &args.label,
        rules: args.rules.as_deref(),
        reference: args.reference.as_deref(),
        jobs,
        grid: &grid,
    };
    Manifest::new("experiment", grid.seed, &config, &targets).write(&targets[2]).tag(Exit::Internal)?;

    println!("fraction  human_rules  median_accuracy  p25     p75");
    for a in results.aggregates.iter().filter(|a| a.metric == "accuracy") {
        println!("{:<9} {:<12} {:<16.4} {:<7.4} {:.4}", a.fraction, a.human_rules, a.median, a.p25, a.p75);
    }
    for r in results.rows.iter().filter(|r| r.note.is_some()) {
        log::warn!("fraction {} rules {} fold {}: {}", r.fraction, r.human_rules, r.fold, r.note.as_deref().unwrap_or(""));
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
