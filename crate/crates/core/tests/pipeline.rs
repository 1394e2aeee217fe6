mod common;

use std::fs;

use common::{tree, Workspace};
use kg_typer::pipeline::{
    self, run_grid, run_pipeline, run_stage, stage_dir, ExperimentConfig, PipelineError,
    RunOptions, Stage,
};

const RUN: RunOptions = RunOptions { force: false };
const FORCE: RunOptions = RunOptions { force: true };

fn quick(ws: &Workspace) -> ExperimentConfig {
    ws.config(&[("train.epochs", "2")])
}

#[test]
fn full_run_reports_its_settings() {
    let ws = Workspace::new();
    let cfg = quick(&ws);
    let (outcomes, row) = run_pipeline(&cfg, RUN).unwrap();
    assert_eq!(outcomes.len(), 6);
    assert!(outcomes.iter().all(|o| !o.skipped && o.dir.is_dir()));
    assert_eq!(row.dataset, "planted200");
    assert_eq!(row.step_category, "both");
    assert_eq!(row.length, 2);
    assert_eq!(row.n, 25);
    assert_eq!(row.network, "final6[256-128-64-32]");
    assert_eq!(row.encoding, "superposed");
    assert!(row.examples > 0);
    assert!(row.metrics.f1 > 0.0 && row.metrics.f1 <= 1.0);
    assert_eq!(pipeline::read_report(&cfg).unwrap(), row);
}

#[test]
fn stages_need_their_upstream() {
    let ws = Workspace::new();
    let cfg = quick(&ws);
    for stage in [Stage::Prep, Stage::Walk, Stage::Eval] {
        match run_stage(stage, &cfg, RUN) {
            Err(PipelineError::MissingUpstream {
                stage: s, upstream, ..
            }) => {
                assert_eq!(s, stage);
                assert_eq!(Some(upstream), stage.upstream());
            }
            other => panic!("{stage}: {other:?}"),
        }
    }
    assert!(!cfg.output_dir.join(format!(".{}.partial", "walk")).exists());
}

#[test]
fn finished_stages_are_skipped_unless_forced() {
    let ws = Workspace::new();
    let cfg = quick(&ws);
    run_pipeline(&cfg, RUN).unwrap();
    let before = tree(&cfg.output_dir);
    let (again, _) = run_pipeline(&cfg, RUN).unwrap();
    assert!(again.iter().all(|o| o.skipped));
    let (forced, _) = run_pipeline(&cfg, FORCE).unwrap();
    assert!(forced.iter().all(|o| !o.skipped));
    assert_eq!(
        tree(&cfg.output_dir),
        before,
        "a forced re-run must reproduce every byte"
    );
}

#[test]
fn runs_in_separate_directories_are_byte_identical() {
    let ws = Workspace::new();
    let a = ws.config(&[("train.epochs", "2"), ("output_dir", "run-a")]);
    let b = ws.config(&[("train.epochs", "2"), ("output_dir", "run-b")]);
    run_pipeline(&a, RUN).unwrap();
    run_pipeline(&b, RUN).unwrap();
    let (ta, tb) = (tree(&a.output_dir), tree(&b.output_dir));
    assert_eq!(ta.len(), 15, "{:?}", ta.keys().collect::<Vec<_>>());
    assert_eq!(ta, tb);
}

#[test]
fn changing_a_stage_setting_moves_only_that_stage_and_below() {
    let ws = Workspace::new();
    let base = quick(&ws);
    let changed = ws.config(&[("train.epochs", "2"), ("walk.n_walks", "50")]);
    for stage in Stage::ALL {
        let same = stage_dir(&base, stage) == stage_dir(&changed, stage);
        assert_eq!(
            same,
            matches!(stage, Stage::Ingest | Stage::Prep),
            "{stage}"
        );
    }
    let retrained = ws.config(&[("train.epochs", "3")]);
    for stage in Stage::ALL {
        let same = stage_dir(&base, stage) == stage_dir(&retrained, stage);
        assert_eq!(
            same,
            !matches!(stage, Stage::Train | Stage::Eval),
            "{stage}"
        );
    }
}

#[test]
fn stale_upstream_artifacts_are_refused() {
    let ws = Workspace::new();
    let cfg = quick(&ws);
    for stage in [Stage::Ingest, Stage::Prep] {
        run_stage(stage, &cfg, RUN).unwrap();
    }
    let labeled = stage_dir(&cfg, Stage::Prep).join("labeled.tsv");
    let text = fs::read_to_string(&labeled).unwrap();
    let (_, body) = text.split_once('\n').unwrap();
    fs::write(
        &labeled,
        format!("# kg-typer prep config=0000000000000000\n{body}"),
    )
    .unwrap();
    assert!(matches!(
        run_stage(Stage::Walk, &cfg, RUN),
        Err(PipelineError::Artifact { .. })
    ));
}

#[test]
fn malformed_input_is_counted_or_fatal() {
    let ws = Workspace::new();
    let mut graph = fs::read_to_string(ws.path("graph.nt")).unwrap();
    graph.push_str(
        "<http://example.org/resource/x> <broken\n\"not a subject\" <http://x/p> <http://x/o> .\n",
    );
    fs::write(ws.path("graph.nt"), graph).unwrap();
    let lenient = quick(&ws);
    let out = run_stage(Stage::Ingest, &lenient, RUN).unwrap();
    let malformed = fs::read_to_string(out.dir.join("malformed.tsv")).unwrap();
    assert_eq!(malformed.lines().filter(|l| !l.starts_with('#')).count(), 2);
    let strict = ws.config(&[("train.epochs", "2"), ("input.strict", "true")]);
    assert!(matches!(
        run_stage(Stage::Ingest, &strict, RUN),
        Err(PipelineError::Ingest(_))
    ));
}

#[test]
fn single_cell_grid_matches_the_pipeline() {
    let ws = Workspace::new();
    let cfg = quick(&ws);
    let axes = vec![("walk.n_walks".to_string(), vec!["25".to_string()])];
    let grid = run_grid(&cfg, &axes, RUN).unwrap();
    assert_eq!(grid.cells.len(), 1);
    let (_, row) = run_pipeline(&cfg, RUN).unwrap();
    assert_eq!(grid.cells[0].result.as_ref().unwrap(), &row);
    let written = fs::read_to_string(&grid.path).unwrap();
    assert!(written.starts_with("# kg-typer grid config="));
    assert!(written.contains(&row.kv()));
}

#[test]
fn a_failing_cell_does_not_sink_the_grid() {
    let ws = Workspace::new();
    let cfg = ws.config(&[("train.epochs", "1")]);
    let mut axes = cfg.axes.clone();
    // a fourth max_length that cannot parse: 3 x 2 x 3 extra cells fail
    let i = axes
        .iter()
        .position(|(k, _)| k == "walk.max_length")
        .unwrap();
    axes[i].1.push("many".into());
    let grid = run_grid(&cfg, &axes, RUN).unwrap();
    assert_eq!(grid.cells.len(), 54);
    assert_eq!(grid.failures(), 18);
    for c in &grid.cells {
        let bad = c.overrides.iter().any(|(_, v)| v == "many");
        assert_eq!(c.result.is_err(), bad);
    }
    let rendered = grid.render();
    assert_eq!(
        rendered
            .lines()
            .filter(|l| l.starts_with("status=error"))
            .count(),
        18
    );

    // a stage failure at run time only fails the cells that share the stage
    let axes = vec![(
        "input.type_predicate".to_string(),
        vec![
            kg_typer::rdf::RDF_TYPE.to_string(),
            "http://x/never-used".to_string(),
        ],
    )];
    let grid = run_grid(&cfg, &axes, RUN).unwrap();
    assert!(grid.cells[0].result.is_ok());
    let err = grid.cells[1].result.as_ref().unwrap_err();
    assert!(err.starts_with("prep:"), "{err}");
}

#[test]
fn grids_reject_unknown_axes() {
    let ws = Workspace::new();
    let cfg = quick(&ws);
    let axes = vec![("walk.colour".to_string(), vec!["red".to_string()])];
    let err = run_grid(&cfg, &axes, RUN).unwrap_err();
    assert!(err.is_config());
}
