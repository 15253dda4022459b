//! The `mtrnn` command-line experiment runner.
//!
//! Every command resolves an [`ExperimentConfig`] (defaults, `--config`,
//! `--set`), writes its files into `--out`, and stamps every CSV with the
//! config hash. Exit codes: 0 success, 2 configuration error, 3 training
//! divergence, 1 anything else.

pub mod checkpoint;
pub mod config;
pub mod cosine;
pub mod output;
pub mod pool;
pub mod run;
pub mod sweep;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub use checkpoint::Checkpoint;
pub use config::{CosineConfig, ExperimentConfig, SweepConfig};
use output::{num, RunDir, Table};

use crate::assembly::{describe_scenes, evaluate, Evaluation, MultiModalModel, SceneOutcome};
use crate::encoders::{Lexicon, SceneDataset};
use crate::metrics::pca_project;
use crate::net::CscStore;
use crate::{Error, Matrix, Result};

#[derive(Debug, Parser)]
#[command(name = "mtrnn", version, about = "Train and analyse multiple-timescale recurrent networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config file layered over the defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for cosine and sweep.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    pub jobs: usize,
    /// Config override, e.g. `--set model.visual.hyper.psi=1e-4` or `--set psi_s=5e-4`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Split {
    Train,
    Test,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cosine self-organisation experiment over the psi grid.
    Cosine,
    /// Generate the synthetic scene dataset as JSON.
    Dataset,
    /// Train the multi-modal model on the training split.
    Train,
    /// Describe scenes with a trained model.
    Generate {
        /// Defaults to `<out>/checkpoint.bin`.
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
        /// Scene ids; overrides `--split`.
        #[arg(long, value_delimiter = ',')]
        scenes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Split::All)]
        split: Split,
    },
    /// Scores, cluster distances and PCA projections of a trained model.
    Eval {
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
    },
    /// Sweep one parameter over a grid of values, seeds and folds.
    Sweep {
        /// Alias (psi_s, psi_v, alpha, tau_cs) or dotted config key.
        #[arg(long)]
        param: Option<String>,
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
    },
    /// Dump weights, biases, Csc stores and associator as CSV matrices.
    Export {
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::Divergence { .. } => 3,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let mut sets = cli.set.clone();
    if let Some(seed) = cli.seed {
        sets.push(format!("seed={seed}"));
    }
    ExperimentConfig::resolve(text.as_deref(), &sets)
}

pub fn execute(cli: &Cli) -> Result<()> {
    if cli.jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    match &cli.command {
        Command::Generate { checkpoint, scenes, split } => {
            cmd_generate(&load_checkpoint(cli, checkpoint)?, &cli.out, scenes, *split)
        }
        Command::Eval { checkpoint } => cmd_eval(&load_checkpoint(cli, checkpoint)?, &cli.out),
        Command::Export { checkpoint } => cmd_export(&load_checkpoint(cli, checkpoint)?, &cli.out),
        command => {
            let mut cfg = resolve_config(cli)?;
            if let Command::Sweep { param, grid } = command {
                if let Some(p) = param {
                    cfg.sweep.parameter = p.clone();
                }
                if !grid.is_empty() {
                    cfg.sweep.grid = grid.clone();
                }
                cfg.validate()?;
            }
            let dir = RunDir::create(&cli.out, &cfg.hash()?)?;
            dir.write_text("config.snapshot", &cfg.snapshot()?)?;
            match command {
                Command::Cosine => cmd_cosine(&cfg, &dir, cli.jobs),
                Command::Dataset => cmd_dataset(&cfg, &dir),
                Command::Train => cmd_train(&cfg, &dir),
                Command::Sweep { .. } => {
                    let o = sweep::run_sweep(&cfg, &dir, cli.jobs)?;
                    println!("sweep: {} cells computed, {} reused", o.computed, o.reused);
                    Ok(())
                }
                _ => unreachable!("handled above"),
            }
        }
    }
}

fn load_checkpoint(cli: &Cli, path: &Option<PathBuf>) -> Result<Checkpoint> {
    let path = path.clone().unwrap_or_else(|| cli.out.join("checkpoint.bin"));
    Checkpoint::load(&path)
}

fn cmd_cosine(cfg: &ExperimentConfig, dir: &RunDir, jobs: usize) -> Result<()> {
    let runs = cosine::run_grid(&cfg.cosine, cfg.seed, jobs)?;
    let mut t = Table::new(&["psi", "seed_index", "epochs", "converged", "final_error", "d_avg", "d_rel"]);
    let dim = runs.first().map_or(0, |r| r.patterns[0].len());
    let mut header = vec!["psi".to_string(), "seed_index".into(), "sequence".into()];
    header.extend((0..dim).map(|k| format!("c{k}")));
    let mut pats = Table::new(&header);
    for r in &runs {
        t.push(vec![
            num(r.psi),
            r.seed_index.to_string(),
            r.epochs.to_string(),
            r.converged.to_string(),
            num(r.final_error),
            num(r.d_avg),
            num(r.d_rel),
        ]);
        for (k, p) in r.patterns.iter().enumerate() {
            let mut row = vec![num(r.psi), r.seed_index.to_string(), k.to_string()];
            row.extend(p.iter().map(|v| num(*v)));
            pats.push(row);
        }
    }
    dir.write_csv("cosine_runs.csv", &t)?;
    dir.write_csv("csc_patterns.csv", &pats)?;
    let mut s = Table::new(&[
        "psi",
        "runs",
        "converged",
        "d_avg_mean",
        "d_avg_se",
        "d_rel_mean",
        "d_rel_se",
        "epochs_mean",
        "epochs_se",
    ]);
    for c in cosine::summarise(&cfg.cosine.psi, &runs) {
        println!(
            "psi {:e}: d_avg {:.4} ± {:.4}, d_rel {:.4} ± {:.4}",
            c.psi, c.d_avg.0, c.d_avg.1, c.d_rel.0, c.d_rel.1
        );
        s.push(vec![
            num(c.psi),
            c.runs.to_string(),
            c.converged.to_string(),
            num(c.d_avg.0),
            num(c.d_avg.1),
            num(c.d_rel.0),
            num(c.d_rel.1),
            num(c.epochs.0),
            num(c.epochs.1),
        ]);
    }
    dir.write_csv("cosine_summary.csv", &s)
}

fn cmd_dataset(cfg: &ExperimentConfig, dir: &RunDir) -> Result<()> {
    let ds = run::scenario_dataset(cfg, cfg.seed, 0)?;
    dir.write_text("dataset.json", &ds.to_json()?)?;
    let mut t = Table::new(&["scene_id", "split", "action", "colour", "object", "variant", "sentence", "steps"]);
    for s in &ds.scenes {
        let split = if ds.train.contains(&s.id) { "train" } else { "test" };
        t.push(vec![
            s.id.to_string(),
            split.into(),
            s.triple.action.to_string(),
            s.triple.colour.to_string(),
            s.triple.object.to_string(),
            s.variant.to_string(),
            s.sentence.clone(),
            s.proprio.len().to_string(),
        ]);
    }
    dir.write_csv("scenes.csv", &t)?;
    println!("dataset: {} scenes ({} train, {} test)", ds.scenes.len(), ds.train.len(), ds.test.len());
    Ok(())
}

fn cmd_train(cfg: &ExperimentConfig, dir: &RunDir) -> Result<()> {
    let mut epochs =
        Table::new(&["stage", "epoch", "error", "normalised_error", "mean_rate", "min_rate", "max_rate", "mean_zeta"]);
    let run = run::train_and_evaluate(cfg, cfg.seed, 0, &mut |stage, r| {
        if r.epoch % 1000 == 0 {
            eprintln!("train: {} epoch {} error {:.4e}", stage.as_str(), r.epoch, r.normalised_error);
        }
        epochs.push(vec![
            stage.as_str().into(),
            r.epoch.to_string(),
            num(r.error),
            num(r.normalised_error),
            num(r.mean_rate),
            num(r.min_rate),
            num(r.max_rate),
            num(r.mean_zeta),
        ]);
    })?;
    dir.write_csv("epochs.csv", &epochs)?;
    let r = &run.report;
    let mut m = metrics_table(&run.evaluation);
    for (name, rep) in [
        ("auditory", &r.auditory),
        ("somatosensory", &r.somatosensory),
        ("visual", &r.visual),
        ("associator", &r.associator),
    ] {
        m.push(vec![format!("epochs_{name}"), rep.epochs().to_string()]);
        m.push(vec![format!("converged_{name}"), u8::from(rep.converged).to_string()]);
    }
    dir.write_csv("final_metrics.csv", &m)?;
    dir.write_csv("csc_patterns.csv", &csc_table(&run.model, &run.dataset)?)?;
    let optimizers = r.optimizers.clone().ok_or_else(|| Error::Data("training kept no optimiser state".into()))?;
    let ck = Checkpoint {
        config: cfg.snapshot()?,
        seed: cfg.seed,
        model: run.model,
        optimizers,
        epochs: [r.auditory.epochs(), r.somatosensory.epochs(), r.visual.epochs(), r.associator.epochs()],
    };
    let bytes = ck.to_bytes()?;
    output::write_atomic(&dir.file("checkpoint.bin"), &bytes)?;
    let e = &run.evaluation;
    println!(
        "train: train F1 {:.3} ({}/{} exact), test F1 {}, mixed F1 {:.3}",
        e.train.f1,
        e.train.exact,
        e.train.scenes,
        e.test.map_or("n/a".into(), |t| format!("{:.3}", t.f1)),
        e.mixed_f1()
    );
    Ok(())
}

fn metrics_table(e: &Evaluation) -> Table {
    let mut m = Table::new(&["metric", "value"]);
    let mut put = |k: &str, v: f64| m.push(vec![k.into(), num(v)]);
    put("train_f1", e.train.f1);
    put("train_edit_distance", e.train.edit_distance);
    put("train_exact", e.train.exact as f64);
    put("train_scenes", e.train.scenes as f64);
    if let Some(t) = e.test {
        put("test_f1", t.f1);
        put("test_edit_distance", t.edit_distance);
        put("test_exact", t.exact as f64);
        put("test_scenes", t.scenes as f64);
    }
    put("mixed_f1", e.mixed_f1());
    put("mixed_edit_distance", e.mixed_edit_distance());
    for (name, g) in [("somatosensory", &e.somatosensory), ("visual", &e.visual)] {
        put(&format!("{name}_d_avg"), g.d_avg);
        put(&format!("{name}_d_rel"), g.d_rel);
        put(&format!("{name}_d_inter"), g.d_inter);
        put(&format!("{name}_d_intra"), g.d_intra);
    }
    m
}

type LabelledRows<'a> = Vec<(String, String, &'a [f64])>;

/// One labelled row per stored Csc pattern of every network.
fn csc_entries<'a>(
    model: &'a MultiModalModel,
    dataset: &SceneDataset,
) -> Result<Vec<(&'static str, LabelledRows<'a>)>> {
    let scene_label = |id: usize| dataset.scene(id).map(|s| s.sentence.clone());
    let mut out = Vec::new();
    let aud: Vec<_> = model
        .utterances
        .iter()
        .zip(&model.auditory_csc.values)
        .map(|(u, v)| (String::new(), u.clone(), v.as_slice()))
        .collect();
    out.push(("auditory", aud));
    for (name, store) in [("somatosensory", &model.somatosensory_csc), ("visual", &model.visual_csc)] {
        let rows = model
            .scene_ids
            .iter()
            .zip(&store.values)
            .map(|(&id, v)| Ok((id.to_string(), scene_label(id)?, v.as_slice())))
            .collect::<Result<Vec<_>>>()?;
        out.push((name, rows));
    }
    Ok(out)
}

fn csc_table(model: &MultiModalModel, dataset: &SceneDataset) -> Result<Table> {
    let entries = csc_entries(model, dataset)?;
    let dim = entries.iter().flat_map(|(_, r)| r.iter().map(|e| e.2.len())).max().unwrap_or(0);
    let mut header = vec!["net".to_string(), "entry".into(), "scene_id".into(), "label".into()];
    header.extend((0..dim).map(|k| format!("c{k}")));
    let mut t = Table::new(&header);
    for (net, rows) in entries {
        for (k, (id, label, v)) in rows.into_iter().enumerate() {
            let mut row = vec![net.to_string(), k.to_string(), id, label];
            row.extend((0..dim).map(|j| v.get(j).map_or(String::new(), |x| num(*x))));
            t.push(row);
        }
    }
    Ok(t)
}

/// Config and dataset a checkpoint was trained with.
fn checkpoint_context(ck: &Checkpoint) -> Result<(ExperimentConfig, SceneDataset)> {
    let cfg = ExperimentConfig::resolve(Some(&ck.config), &[])?;
    let ds = run::scenario_dataset(&cfg, ck.seed, 0)?;
    Ok((cfg, ds))
}

fn outcome_rows(t: &mut Table, outcomes: &[SceneOutcome], ds: &SceneDataset) {
    for o in outcomes {
        let split = if ds.train.contains(&o.scene_id) { "train" } else { "test" };
        t.push(vec![
            o.scene_id.to_string(),
            split.into(),
            o.target.clone(),
            o.produced.text.clone(),
            o.produced.phoneme_string(),
            num(o.f1),
            num(o.edit_distance),
            o.produced.truncated.to_string(),
        ]);
    }
}

const OUTCOME_HEADER: &[&str] =
    &["scene_id", "split", "target", "produced", "phonemes", "f1", "edit_distance", "truncated"];

fn cmd_generate(ck: &Checkpoint, out: &Path, scenes: &[usize], split: Split) -> Result<()> {
    let (cfg, ds) = checkpoint_context(ck)?;
    let dir = RunDir::create(out, &cfg.hash()?)?;
    let ids: Vec<usize> = if !scenes.is_empty() {
        scenes.to_vec()
    } else {
        match split {
            Split::Train => ds.train.clone(),
            Split::Test => ds.test.clone(),
            Split::All => (0..ds.scenes.len()).collect(),
        }
    };
    let outcomes = describe_scenes(&ck.model, &ds, &ids, &cfg.encoding, &Lexicon::default())?;
    let mut t = Table::new(OUTCOME_HEADER);
    outcome_rows(&mut t, &outcomes, &ds);
    for o in &outcomes {
        println!("{:>4}  {}  ->  {}", o.scene_id, o.target, o.produced.text);
    }
    dir.write_csv("generated.csv", &t)
}

fn cmd_eval(ck: &Checkpoint, out: &Path) -> Result<()> {
    let (cfg, ds) = checkpoint_context(ck)?;
    let dir = RunDir::create(out, &cfg.hash()?)?;
    let lex = Lexicon::default();
    let e = evaluate(&ck.model, &ds, &ds.test, &cfg.encoding, &lex)?;
    dir.write_csv("eval_metrics.csv", &metrics_table(&e))?;
    let all: Vec<usize> = (0..ds.scenes.len()).collect();
    let mut t = Table::new(OUTCOME_HEADER);
    outcome_rows(&mut t, &describe_scenes(&ck.model, &ds, &all, &cfg.encoding, &lex)?, &ds);
    dir.write_csv("eval_scenes.csv", &t)?;

    let mut coords = Table::new(&["net", "entry", "scene_id", "label", "pc1", "pc2"]);
    let mut explained = Table::new(&["net", "component", "explained"]);
    for (net, rows) in csc_entries(&ck.model, &ds)? {
        let patterns: Vec<Vec<f64>> = rows.iter().map(|r| r.2.to_vec()).collect();
        if patterns.len() < 2 {
            continue;
        }
        let k = patterns[0].len().min(2);
        let p = pca_project(&patterns, k)?;
        for (i, ((id, label, _), c)) in rows.iter().zip(&p.coords).enumerate() {
            let pc2 = c.get(1).map_or(String::new(), |v| num(*v));
            coords.push(vec![net.into(), i.to_string(), id.clone(), label.clone(), num(c[0]), pc2]);
        }
        for (i, v) in p.explained.iter().enumerate() {
            explained.push(vec![net.into(), (i + 1).to_string(), num(*v)]);
        }
    }
    dir.write_csv("pca.csv", &coords)?;
    dir.write_csv("pca_explained.csv", &explained)?;
    println!(
        "eval: train F1 {:.3}, test F1 {}, mixed F1 {:.3}, mixed edit distance {:.4}",
        e.train.f1,
        e.test.map_or("n/a".into(), |t| format!("{:.3}", t.f1)),
        e.mixed_f1(),
        e.mixed_edit_distance()
    );
    Ok(())
}

fn matrix_table(m: &Matrix, prefix: &str) -> Table {
    let header: Vec<String> = (0..m.cols()).map(|j| format!("{prefix}{j}")).collect();
    let mut t = Table::new(&header);
    for r in m.iter_rows() {
        t.push(r.iter().map(|v| num(*v)).collect());
    }
    t
}

fn store_matrix(store: &CscStore) -> Result<Matrix> {
    Matrix::from_rows(&store.values)
}

fn cmd_export(ck: &Checkpoint, out: &Path) -> Result<()> {
    let cfg = ExperimentConfig::resolve(Some(&ck.config), &[])?;
    let dir = RunDir::create(out, &cfg.hash()?)?;
    let m = &ck.model;
    for (name, net, store) in [
        ("auditory", &m.auditory, &m.auditory_csc),
        ("somatosensory", &m.somatosensory, &m.somatosensory_csc),
        ("visual", &m.visual, &m.visual_csc),
    ] {
        let n = net.topology.neuron_count();
        let w = Matrix::from_vec(n, n, net.params.weights().to_vec())?;
        dir.write_csv(&format!("{name}_weights.csv"), &matrix_table(&w, "from"))?;
        let b = Matrix::from_vec(1, n, net.params.biases().to_vec())?;
        dir.write_csv(&format!("{name}_biases.csv"), &matrix_table(&b, "n"))?;
        dir.write_csv(&format!("{name}_csc.csv"), &matrix_table(&store_matrix(store)?, "c"))?;
    }
    dir.write_csv("associator_weights.csv", &matrix_table(&m.associator.weights, "in"))?;
    let b = Matrix::from_vec(1, m.associator.biases.len(), m.associator.biases.clone())?;
    dir.write_csv("associator_biases.csv", &matrix_table(&b, "c"))?;
    Ok(())
}
