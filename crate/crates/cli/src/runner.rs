//! Executes experiments and writes their CSV outputs.
//!
//! Runs are independent: each owns its problem, budget and random stream
//! (seeded `seed + r`), so they can be spread over a thread pool. Results
//! are collected in task order, which keeps every output file identical
//! regardless of `jobs`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ceda2_core::benchmarks::problem_by_id;
use ceda2_core::dsts::{cluster, ClusteringInput, ClusteringResult};
use ceda2_core::eda2::truncation_select;
use ceda2_core::niching::{fev_of_value, run_ceda2_traced};
use ceda2_core::{
    fev, peak_ratio, run_eda2, seeded_rng, Ceda2Config, Eda2Params, EvalBudget, Individual, Problem,
    TerminationPolicy,
};
use rayon::prelude::*;

use crate::config::{Algorithm, ExperimentConfig};
use crate::records::{timestamp_line, write_runs, write_wall_times, Metric, RunRecord};
use crate::summary::{split_settings, summarize, Stats};

/// Standalone EDA² defaults when the config leaves `p` or `l` open.
pub const EDA2_DEFAULT_POPULATION: usize = 80;
pub const EDA2_DEFAULT_ARCHIVE: usize = 10;

/// One finished run and the contents of its trace file, if any.
pub struct RunOutcome {
    pub record: RunRecord,
    pub trace: Option<String>,
}

fn slug(problem: &str) -> String {
    problem.replace('/', "-")
}

fn eda2_params(config: &ExperimentConfig, problem: &Problem) -> Eda2Params {
    Eda2Params::new(
        config.population.unwrap_or(EDA2_DEFAULT_POPULATION),
        config.selection_ratio,
        config.archive_length.unwrap_or(EDA2_DEFAULT_ARCHIVE),
        problem.sense(),
    )
}

pub fn ceda2_config(config: &ExperimentConfig, problem: &Problem) -> Ceda2Config {
    let mut c = Ceda2Config::for_dimension(problem.dimension());
    c.selection_ratio = config.selection_ratio;
    c.alpha = config.alpha;
    c.accuracy = config.accuracy;
    c.max_fes = config.max_fes;
    if let Some(n) = config.init_count {
        c.init_count = n;
    }
    if let Some(p) = config.population {
        c.cluster_population = p;
    }
    if let Some(l) = config.archive_length {
        c.cluster_archive_length = l;
    }
    c
}

/// Parameter tag stored with every record; equal tags mean comparable runs.
pub fn params_tag(config: &ExperimentConfig) -> String {
    let mut parts = vec![format!("tau={}", config.selection_ratio)];
    match config.algorithm {
        Algorithm::Eda2 => {
            parts.push(format!("p={}", config.population.unwrap_or(EDA2_DEFAULT_POPULATION)));
            parts.push(format!("l={}", config.archive_length.unwrap_or(EDA2_DEFAULT_ARCHIVE)));
        }
        Algorithm::Ceda2 | Algorithm::DstsDemo => {
            parts.push(format!("alpha={}", config.alpha));
            parts.push(format!("acc={:e}", config.accuracy));
            if let Some(n) = config.init_count {
                parts.push(format!("N={n}"));
            }
            if let Some(p) = config.population {
                parts.push(format!("p={p}"));
            }
            if let Some(l) = config.archive_length {
                parts.push(format!("l={l}"));
            }
        }
    }
    if let Some(m) = config.max_fes {
        parts.push(format!("maxfes={m}"));
    }
    parts.join(";")
}

/// A single seeded run of `config.algorithm` on `problem_id`.
pub fn run_one(config: &ExperimentConfig, problem_id: &str, seed: u64) -> Result<RunOutcome> {
    let problem = problem_by_id(problem_id)?;
    let started = Instant::now();
    let mut rng = seeded_rng(seed);
    let trace_path = config.traces.then(|| {
        let mut name = format!("traces/{}-{}-s{seed}", slug(problem_id), config.algorithm.as_str());
        if config.algorithm == Algorithm::Eda2 {
            name += &format!("-p{}-l{}", eda2_params(config, &problem).population_size, eda2_params(config, &problem).archive_length);
        }
        name + ".csv"
    });

    let (fes_used, metric, trace) = match config.algorithm {
        Algorithm::Eda2 => {
            let max_fes = config.max_fes.unwrap_or(problem.max_fes());
            let mut budget = EvalBudget::new(max_fes);
            let result = run_eda2(
                &problem,
                problem.bounds(),
                eda2_params(config, &problem),
                TerminationPolicy::budget_only(max_fes),
                None,
                &mut budget,
                &mut rng,
            )?;
            let best = result.best.as_ref().context("the run evaluated nothing")?;
            let trace = trace_path.as_ref().map(|_| {
                let mut s = timestamp_line() + "generation,fes_used,best_fitness,fev,median_fitness\n";
                for h in &result.history {
                    s += &format!(
                        "{},{},{},{},{}\n",
                        h.generation,
                        h.fes_used,
                        h.best_fitness,
                        fev_of_value(h.best_fitness, problem.global_optimum_value()),
                        h.median_fitness
                    );
                }
                s
            });
            (result.fes_used, Metric::Fev(fev(best, &problem)), trace)
        }
        Algorithm::Ceda2 => {
            let out = run_ceda2_traced(&problem, &ceda2_config(config, &problem), &mut rng)?;
            let levels = config
                .accuracy_levels
                .iter()
                .map(|&e| (e, peak_ratio(&out.archive, &problem, e).peak_ratio))
                .collect();
            let trace = trace_path.as_ref().map(|_| {
                let mut s = timestamp_line() + "restart,clusters,clusters_evolved,fes_used,archive_size\n";
                for r in &out.restarts {
                    s += &format!("{},{},{},{},{}\n", r.restart, r.clusters, r.clusters_evolved, r.fes_used, r.archive_size);
                }
                s
            });
            (out.fes_used, Metric::PeakRatio(levels), trace)
        }
        Algorithm::DstsDemo => bail!("dsts-demo produces clustering data, not run records; use demo-cluster"),
    };

    Ok(RunOutcome {
        record: RunRecord {
            problem: problem_id.to_string(),
            algorithm: config.algorithm.as_str().to_string(),
            params: params_tag(config),
            seed,
            fes_used,
            metric,
            trace: trace_path,
            wall_seconds: started.elapsed().as_secs_f64(),
        },
        trace,
    })
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let probe = dir.join(".write-test");
    File::create(&probe).with_context(|| format!("{} is not writable", dir.display()))?;
    fs::remove_file(probe)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// Runs every task on a pool of `jobs` threads, returning results in task order.
fn execute(
    config: &ExperimentConfig,
    tasks: &[(ExperimentConfig, String, u64)],
) -> Result<Vec<Result<RunOutcome>>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build()?;
    Ok(pool.install(|| tasks.par_iter().map(|(c, p, s)| run_one(c, p, s.to_owned())).collect()))
}

fn write_run_outputs(out: &Path, outcomes: &[RunOutcome]) -> Result<Vec<RunRecord>> {
    let records: Vec<RunRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
    for o in outcomes {
        if let (Some(path), Some(text)) = (&o.record.trace, &o.trace) {
            create(&out.join(path))?.write_all(text.as_bytes())?;
        }
    }
    write_runs(create(&out.join("runs.csv"))?, &records)?;
    write_wall_times(create(&out.join("walltime.txt"))?, &records)?;
    Ok(records)
}

fn split_errors(results: Vec<Result<RunOutcome>>, tasks: &[(ExperimentConfig, String, u64)]) -> (Vec<RunOutcome>, Vec<String>) {
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for (r, (_, p, s)) in results.into_iter().zip(tasks) {
        match r {
            Ok(o) => ok.push(o),
            Err(e) => errors.push(format!("{p} seed {s}: {e:#}")),
        }
    }
    (ok, errors)
}

/// Runs the configured experiment and writes `runs.csv`, `summary.csv`,
/// `stats.csv`, `walltime.txt` and optional traces under `config.out`.
/// Fails, after writing what did succeed, if any run failed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    if config.algorithm == Algorithm::DstsDemo {
        prepare_out_dir(&config.out)?;
        for problem in &config.problem {
            for seed in config.seeds() {
                let dir = config.out.join(format!("{}-s{seed}", slug(problem)));
                demo_cluster(problem, seed, config.init_count.unwrap_or(1000), config.selection_ratio, config.alpha, &dir)?;
            }
        }
        return Ok(Vec::new());
    }
    prepare_out_dir(&config.out)?;
    let tasks: Vec<(ExperimentConfig, String, u64)> = config
        .problem
        .iter()
        .flat_map(|p| config.seeds().map(move |s| (config.clone(), p.clone(), s)))
        .collect();
    let (outcomes, errors) = split_errors(execute(config, &tasks)?, &tasks);
    let records = write_run_outputs(&config.out, &outcomes)?;
    if !records.is_empty() {
        let table = summarize(&records)?;
        table.write_table(create(&config.out.join("summary.csv"))?)?;
        table.write_stats(create(&config.out.join("stats.csv"))?)?;
    }
    if !errors.is_empty() {
        bail!("{} run(s) failed:\n{}", errors.len(), errors.join("\n"));
    }
    Ok(records)
}

/// Cartesian `p × l` grid of standalone EDA² runs. Writes `runs.csv` and a
/// `sweep.csv` with FEV statistics per (problem, p, l).
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    if config.algorithm != Algorithm::Eda2 {
        bail!("sweep runs standalone eda2; set algorithm = \"eda2\"");
    }
    if config.sweep_population.is_empty() || config.sweep_archive_length.is_empty() {
        bail!("sweep grid is empty");
    }
    prepare_out_dir(&config.out)?;
    let mut tasks = Vec::new();
    for problem in &config.problem {
        for &p in &config.sweep_population {
            for &l in &config.sweep_archive_length {
                let cell = ExperimentConfig { population: Some(p), archive_length: Some(l), ..config.clone() };
                cell.validate()?;
                eda2_params(&cell, &problem_by_id(problem)?).validate()?;
                for seed in config.seeds() {
                    tasks.push((cell.clone(), problem.clone(), seed));
                }
            }
        }
    }
    let (outcomes, errors) = split_errors(execute(config, &tasks)?, &tasks);
    let records = write_run_outputs(&config.out, &outcomes)?;

    let mut out = create(&config.out.join("sweep.csv"))?;
    out.write_all(timestamp_line().as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "p", "l", "runs", "mean_fev", "median_fev", "min_fev", "max_fev"])?;
    for group in split_settings(&records) {
        let table = summarize(&group)?;
        let tag = &table.params;
        let field = |key: &str| {
            tag.split(';').find_map(|kv| kv.strip_prefix(key)).unwrap_or("").to_string()
        };
        for row in &table.rows {
            let s: Stats = row.columns[0];
            w.write_record([
                row.problem.clone(),
                field("p="),
                field("l="),
                s.runs.to_string(),
                s.mean.to_string(),
                s.median.to_string(),
                s.min.to_string(),
                s.max.to_string(),
            ])?;
        }
    }
    w.flush()?;
    if !errors.is_empty() {
        bail!("{} run(s) failed:\n{}", errors.len(), errors.join("\n"));
    }
    Ok(records)
}

/// Clustering of the best `ratio` share of `count` uniform samples.
pub struct ClusterDemo {
    pub points: Vec<Individual>,
    pub result: ClusteringResult,
}

pub fn cluster_demo(problem_id: &str, seed: u64, count: usize, ratio: f64, alpha: f64) -> Result<ClusterDemo> {
    let problem = problem_by_id(problem_id)?;
    let mut rng = seeded_rng(seed);
    let sampled: Vec<Individual> = (0..count)
        .map(|i| {
            let x = problem.bounds().sample_uniform(&mut rng);
            let f = problem.value(&x);
            Individual::new(x, f, i as u64)
        })
        .collect();
    let selected = truncation_select(&sampled, ratio, problem.sense(), 0)?;
    let points = selected.members().to_vec();
    let input = ClusteringInput::new(
        points.iter().map(|p| p.genome.clone()).collect(),
        points.iter().map(|p| p.fitness).collect(),
        problem.sense(),
        alpha,
    )?;
    let result = cluster(&input)?;
    Ok(ClusterDemo { points, result })
}

/// Writes `decision.csv` (fitness against relative distance) and
/// `members.csv` (coordinates, cluster label, center flag) under `dir`.
pub fn demo_cluster(problem_id: &str, seed: u64, count: usize, ratio: f64, alpha: f64, dir: &Path) -> Result<ClusterDemo> {
    let demo = cluster_demo(problem_id, seed, count, ratio, alpha)?;
    prepare_out_dir(dir)?;
    let is_center = |i: usize| demo.result.centers.contains(&i);

    let mut out = create(&dir.join("decision.csv"))?;
    out.write_all(timestamp_line().as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "fitness", "delta", "is_center"])?;
    for (i, p) in demo.points.iter().enumerate() {
        w.write_record([i.to_string(), p.fitness.to_string(), demo.result.deltas[i].to_string(), is_center(i).to_string()])?;
    }
    w.flush()?;

    let mut out = create(&dir.join("members.csv"))?;
    out.write_all(timestamp_line().as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    let dim = demo.points.first().map_or(0, |p| p.genome.len());
    let mut header = vec!["index".to_string()];
    header.extend((1..=dim).map(|k| format!("x{k}")));
    header.extend(["fitness", "label", "is_center"].map(String::from));
    w.write_record(&header)?;
    for (i, p) in demo.points.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.genome.iter().map(|v| v.to_string()));
        row.extend([p.fitness.to_string(), demo.result.labels[i].to_string(), is_center(i).to_string()]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(demo)
}

/// Summaries of existing `runs.csv` files, one table per algorithm setting.
pub fn report(paths: &[PathBuf], out: Option<&Path>) -> Result<String> {
    let mut records = Vec::new();
    for p in paths {
        let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
        records.extend(crate::records::read_runs(f).with_context(|| format!("reading {}", p.display()))?);
    }
    if records.is_empty() {
        bail!("no records found");
    }
    let mut text = String::new();
    for (k, group) in split_settings(&records).iter().enumerate() {
        let table = summarize(group)?;
        text += &table.render();
        if let Some(dir) = out {
            prepare_out_dir(dir)?;
            let suffix = if k == 0 { String::new() } else { format!("-{k}") };
            table.write_table(create(&dir.join(format!("summary{suffix}.csv")))?)?;
            table.write_stats(create(&dir.join(format!("stats{suffix}.csv")))?)?;
        }
    }
    Ok(text)
}
