use idla_core::harness::output::{render, Format};
use idla_core::harness::{run_experiment, Execution, ExperimentConfig, ExperimentKind};
use idla_core::increments::LawSpec;

fn doc_text(c: &ExperimentConfig) -> String {
    render(&run_experiment(c).unwrap(), Format::Json).unwrap()
}

fn small_idla() -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::Idla, LawSpec::stable(1.5));
    c.m = Some(200);
    c.replicas = 8;
    c.seed = 99;
    c.record_wall_time = false;
    c
}

#[test]
fn same_seed_gives_byte_identical_documents() {
    for c in [
        small_idla(),
        {
            let mut c = ExperimentConfig::new(ExperimentKind::Hitprob, LawSpec::two_step());
            c.n = Some(100);
            c.replicas = 300;
            c.record_wall_time = false;
            c
        },
        {
            let mut c = ExperimentConfig::new(ExperimentKind::Ladder, LawSpec::two_step());
            c.m = Some(200);
            c.replicas = 500;
            c.record_wall_time = false;
            c
        },
    ] {
        assert_eq!(doc_text(&c), doc_text(&c));
    }
}

#[test]
fn different_seeds_differ() {
    let a = small_idla();
    let mut b = small_idla();
    b.seed = 100;
    assert_ne!(run_experiment(&a).unwrap().estimates, run_experiment(&b).unwrap().estimates);
}

#[test]
fn execution_order_does_not_change_the_document() {
    let base = small_idla();
    let mut texts = Vec::new();
    for exec in [Execution::Parallel, Execution::Sequential, Execution::Reversed] {
        let mut c = base.clone();
        c.execution = exec;
        let mut d = run_experiment(&c).unwrap();
        d.config.execution = Execution::Parallel;
        texts.push(render(&d, Format::Json).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn wall_time_is_embedded_when_asked() {
    let mut c = ExperimentConfig::new(ExperimentKind::Theory, LawSpec::Simple);
    let d = run_experiment(&c).unwrap();
    assert!(d.wall_time_seconds.is_some());
    assert_eq!(d.version, env!("CARGO_PKG_VERSION"));
    assert_eq!(d.config, c);
    c.record_wall_time = false;
    assert!(run_experiment(&c).unwrap().wall_time_seconds.is_none());
}

#[test]
fn gambler_simple_walk_two_thirds() {
    // P(exit right of [-1000, 500]) → 2/3
    let mut c = ExperimentConfig::new(ExperimentKind::Gambler, LawSpec::Simple);
    c.n = Some(500);
    c.c = Some(2.0);
    c.replicas = 100_000;
    c.seed = 5;
    let d = run_experiment(&c).unwrap();
    let e = &d.estimates["exit_right"];
    assert!(d.pass, "{:?}", d.verdicts);
    assert!((e.estimate - 2.0 / 3.0).abs() <= 3.0 * e.se.unwrap());
}

#[test]
fn idla_document_has_tables_and_bounds() {
    let mut c = small_idla();
    c.x = Some(10);
    c.a = Some(2.0);
    c.b = Some(1.0);
    let d = run_experiment(&c).unwrap();
    assert_eq!(d.tables["checkpoints"].rows.len(), 3);
    for name in ["r_m <= m/2 at every checkpoint", "sigma_x >= 2x for every logged x", "inversion r_m >= x <=> sigma_x <= m"] {
        assert!(d.verdicts.iter().any(|v| v.name == name && v.pass), "{name}");
    }
    assert!(d.estimates.contains_key("sigma_over_x@10"));
    assert!(d.estimates.contains_key("lost_particles"));
    assert!(d.estimates["lost_below_b"].successes.is_some());
}

#[test]
fn csv_has_one_row_per_checkpoint() {
    let d = run_experiment(&small_idla()).unwrap();
    let csv = render(&d, Format::Csv).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("checkpoints,")).count(), 3);
}
