//! End-to-end runs of the command-line runner on a tiny scenario.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mtrnn::cli::output::RunDir;
use mtrnn::cli::sweep::{cells, run_sweep};
use mtrnn::cli::{main_with, Checkpoint, ExperimentConfig};
use mtrnn::Error;

const TINY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/tiny.toml");

const SMALL_COSINE: [&str; 6] =
    ["--set", "cosine.seeds=2", "--set", "cosine.psi=[0.0, 5e-5]", "--set", "cosine.net.hyper.max_epochs=60"];

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut all = vec!["mtrnn", "--config", TINY, "--out", out.to_str().unwrap()];
    all.extend_from_slice(args);
    main_with(all)
}

/// Relative path -> contents for every file below `dir`.
fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn run_everything(out: &Path) {
    for args in [
        vec!["dataset"],
        vec!["train"],
        vec!["generate"],
        vec!["eval"],
        vec!["export"],
        vec!["sweep", "--param", "psi_s", "--grid", "0,5e-4", "--set", "sweep.seeds=2"],
    ] {
        assert_eq!(run(out, &args), 0, "{args:?}");
    }
    let mut cosine = vec!["cosine", "--jobs", "2"];
    cosine.extend_from_slice(&SMALL_COSINE);
    assert_eq!(run(out, &cosine), 0);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_everything(a.path());
    run_everything(b.path());
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    for name in [
        "dataset.json",
        "epochs.csv",
        "checkpoint.bin",
        "generated.csv",
        "eval_metrics.csv",
        "pca.csv",
        "sweep.csv",
        "cosine_runs.csv",
    ] {
        assert!(sa.contains_key(Path::new(name)), "{name} not written");
    }
    assert_eq!(sa.keys().collect::<Vec<_>>(), sb.keys().collect::<Vec<_>>());
    for (name, bytes) in &sa {
        assert!(bytes == &sb[name], "{} differs between reruns", name.display());
    }
}

#[test]
fn jobs_do_not_change_cosine_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut one = vec!["cosine", "--jobs", "1"];
    one.extend_from_slice(&SMALL_COSINE);
    let mut three = vec!["cosine", "--jobs", "3"];
    three.extend_from_slice(&SMALL_COSINE);
    assert_eq!(run(a.path(), &one), 0);
    assert_eq!(run(b.path(), &three), 0);
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(run(out, &["dataset", "--set", "model.no_such_key=1"]), 2);
    assert_eq!(run(out, &["dataset", "--set", "missing_equals_sign"]), 2);
    assert_eq!(run(out, &["train", "--set", "model.visual.hyper.psi=1.5"]), 2);
    assert_eq!(run(out, &["sweep", "--param", "no_such_param", "--grid", "1"]), 2);
    assert_eq!(run(out, &["no-such-command"]), 2);
    let bad_file = out.join("bad.toml");
    std::fs::write(&bad_file, "[model]\nunknown = 3\n").unwrap();
    assert_eq!(main_with(["mtrnn", "--config", bad_file.to_str().unwrap(), "dataset"]), 2);
    assert_eq!(main_with(["mtrnn", "--config", "/no/such/file.toml", "dataset"]), 2);
    // Weights this large overflow the first forward pass.
    assert_eq!(run(out, &["train", "--set", "model.weight_range=1e300"]), 3);
    // A missing checkpoint is neither a config error nor a divergence.
    assert_eq!(run(out, &["eval", "--checkpoint", out.join("none.bin").to_str().unwrap()]), 1);
}

#[test]
fn interrupted_sweep_recomputes_only_missing_cells() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(TINY).unwrap();
    let sets = ["sweep.parameter=\"psi_s\"".to_string(), "sweep.grid=[0.0, 5e-4]".into(), "sweep.seeds=2".into()];
    let cfg = ExperimentConfig::resolve(Some(&text), &sets).unwrap();
    let out = RunDir::create(dir.path(), &cfg.hash().unwrap()).unwrap();

    let first = run_sweep(&cfg, &out, 2).unwrap();
    assert_eq!((first.computed, first.reused), (4, 0));
    let before = snapshot(dir.path());

    // Simulate a crash that lost one cell and left a stale cell from another config.
    let all = cells(&cfg);
    let lost = out.file("cells").join(all[1].file_name());
    std::fs::remove_file(&lost).unwrap();
    let stale = out.file("cells").join(all[2].file_name());
    let stale_text = String::from_utf8(before[&PathBuf::from("cells").join(all[2].file_name())].clone()).unwrap();
    std::fs::write(&stale, stale_text.replacen("config_hash=", "config_hash=0", 1)).unwrap();

    let second = run_sweep(&cfg, &out, 1).unwrap();
    assert_eq!((second.computed, second.reused), (2, 2));
    assert_eq!(snapshot(dir.path()), before);
    assert_eq!(second.summary, first.summary);
}

#[test]
fn checkpoint_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["train"]), 0);
    let bytes = std::fs::read(dir.path().join("checkpoint.bin")).unwrap();
    let ck = Checkpoint::from_bytes(&bytes).unwrap();
    assert_eq!(ck.to_bytes().unwrap(), bytes);
    assert_eq!(Checkpoint::from_bytes(&ck.to_bytes().unwrap()).unwrap(), ck);

    let offset_of = |buf: &[u8]| match Checkpoint::from_bytes(buf) {
        Err(Error::Checkpoint { offset, .. }) => offset,
        other => panic!("expected a checkpoint error, got {other:?}"),
    };
    let mut bad_magic = bytes.clone();
    bad_magic[0] ^= 0xff;
    assert_eq!(offset_of(&bad_magic), 0);
    let mut bad_version = bytes.clone();
    bad_version[8] = 99;
    assert_eq!(offset_of(&bad_version), 8);
    for cut in [3, 11, 40, bytes.len() / 2, bytes.len() - 1] {
        let at = offset_of(&bytes[..cut]);
        assert!(at <= cut, "truncated at {cut}, error at {at}");
    }
    let mut trailing = bytes.clone();
    trailing.push(0);
    assert_eq!(offset_of(&trailing), bytes.len());
    // A corrupted length prefix must not allocate its way into an abort.
    let mut huge = bytes.clone();
    huge[12..20].copy_from_slice(&u64::MAX.to_le_bytes());
    offset_of(&huge);
}
