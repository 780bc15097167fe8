use std::path::PathBuf;

use qmarginal::lattice::{Boundary, CompassParams};
use qmarginal::report::{
    compare_golden, golden_document, run, GoldenTolerances, ModelSpec, RunConfig, Task, EXIT_FAIL, EXIT_PASS,
};
use serde_json::Value;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/compass_n3.json")
}

fn compass3() -> ModelSpec {
    ModelSpec::Compass(CompassParams::bacon_shor_3x3())
}

#[test]
fn fresh_run_matches_committed_golden() {
    let golden: Value = serde_json::from_str(&std::fs::read_to_string(golden_path()).unwrap()).unwrap();
    let doc = golden_document(&RunConfig::new(compass3(), Task::Golden { compare: None })).unwrap();
    let tol = GoldenTolerances::from_golden(&golden, 1e-9).unwrap();
    assert!(compare_golden(&doc, &golden, &tol).unwrap());

    let mut off = golden.clone();
    let e0 = off["values"]["e0"].as_f64().unwrap();
    off["values"]["e0"] = Value::from(e0 + 1e-6);
    assert!(!compare_golden(&doc, &off, &tol).unwrap());
}

#[test]
fn golden_task_exit_codes() {
    let ok = run(&RunConfig::new(compass3(), Task::Golden { compare: Some(golden_path()) }));
    assert_eq!(ok.exit_code, EXIT_PASS, "{}", ok.summary);

    let dir = tempdir();
    let mut golden: Value = serde_json::from_str(&std::fs::read_to_string(golden_path()).unwrap()).unwrap();
    golden["values"]["gap"] = Value::from(0.5);
    let bad = dir.join("shifted.json");
    std::fs::write(&bad, serde_json::to_string(&golden).unwrap()).unwrap();
    let out = run(&RunConfig::new(compass3(), Task::Golden { compare: Some(bad) }));
    assert_eq!(out.exit_code, EXIT_FAIL);

    golden["values"]["a"] = Value::from(vec![1.0]);
    let broken = dir.join("broken.json");
    std::fs::write(&broken, serde_json::to_string(&golden).unwrap()).unwrap();
    let out = run(&RunConfig::new(compass3(), Task::Golden { compare: Some(broken) }));
    assert_eq!(out.exit_code, 1);
    assert!(out.report["error"].as_str().unwrap().contains("schema"));
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qmarginal-reports-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let tasks = [
        Task::Counterexample,
        Task::Blindness { m: 3 },
        Task::Kl,
        Task::Spectrum {
            dump_spectrum: true,
            dump_ground: true,
        },
    ];
    for task in tasks {
        let mut texts = Vec::new();
        for threads in [1, 4, 1] {
            let mut cfg = RunConfig::new(compass3(), task.clone());
            cfg.threads = Some(threads);
            texts.push(run(&cfg).report_text());
        }
        assert_eq!(texts[0], texts[1], "{task:?}");
        assert_eq!(texts[0], texts[2], "{task:?}");
    }
    let mut stab = Vec::new();
    for threads in [1, 3] {
        let mut cfg = RunConfig::new(ModelSpec::Toric { l: 3 }, Task::Stabilizer { m: 3 });
        cfg.threads = Some(threads);
        stab.push(run(&cfg).report_text());
    }
    assert_eq!(stab[0], stab[1]);
}

#[test]
fn counterexample_pipeline() {
    let out = run(&RunConfig::new(compass3(), Task::Counterexample));
    assert_eq!(out.exit_code, EXIT_PASS, "{}", out.summary);
    assert_eq!(out.report["conclusion"], "extreme-multiple-preimages");
    assert_eq!(out.report["fermion"]["rdm_dim"], 153);
    assert!(out.report["fermion"]["assembled_distance"].as_f64().unwrap() < 1e-9);
}

#[test]
fn weak_coupling_still_two_blind() {
    let model = ModelSpec::Compass(CompassParams::new(3, 0.3, 1.0, Boundary::Cyclic));
    let out = run(&RunConfig::new(model, Task::Blindness { m: 2 }));
    assert_eq!(out.exit_code, EXIT_PASS, "{}", out.summary);
}

#[test]
fn custom_model_round_trip() {
    // −Z₀Z₁ written as a custom descriptor: degenerate, not 1-blind.
    let doc = serde_json::json!({
        "n_sites": 2,
        "two_body": [{
            "sites": [0, 1],
            "matrix": [
                [-1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                [0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                [0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0],
                [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]
            ]
        }]
    });
    let path = tempdir().join("zz.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = run(&RunConfig::new(ModelSpec::Custom(path), Task::Blindness { m: 1 }));
    assert_eq!(out.exit_code, EXIT_FAIL, "{}", out.summary);
    assert_eq!(out.report["degeneracy"], 2);
    assert_eq!(out.report["witness"]["sites"], serde_json::json!([0]));
}
