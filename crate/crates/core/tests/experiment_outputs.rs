use std::fs;

use staopt::harness::{run_experiment, BudgetRule, ExperimentConfig, FunctionCell};
use staopt::{BenchmarkId, Variant, VariantConfig};

fn config() -> ExperimentConfig {
    ExperimentConfig {
        functions: vec![
            FunctionCell { function: BenchmarkId::F7, dim: 2 },
            FunctionCell { function: BenchmarkId::F11, dim: 3 },
        ],
        variants: vec![
            VariantConfig::new(Variant::POSTA, 0),
            VariantConfig::new(Variant::NMQI_POSTA, 0),
        ],
        repetitions: 4,
        budget: BudgetRule::Fixed(3000),
        base_seed: 11,
        reference: Some(Variant::NMQI_POSTA),
        workers: Some(2),
        ..ExperimentConfig::default()
    }
}

#[test]
fn writes_summary_curves_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&config(), Some(dir.path())).unwrap();

    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), "function,D,variant,mean,std,ave_fes,success,runs,significance");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert_eq!(row.len(), 9);
        assert_eq!(row[7], "4");
        let fes: f64 = row[5].parse().unwrap();
        assert!(fes <= 3000.0);
        match row[2] {
            "NMQI_POSTA" => assert_eq!(row[8], ""),
            _ => assert!(["+", "-", "≈"].contains(&row[8])),
        }
    }

    for cell in &report.cells {
        let text = fs::read_to_string(dir.path().join("curves").join(format!("{}.csv", cell.id()))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "run,fe,best_fitness");
        let rows: Vec<(usize, u64, f64)> = lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
            })
            .collect();
        assert!(rows.windows(2).all(|w| (w[0].0, w[0].1) <= (w[1].0, w[1].1)));
        for (run, rec) in cell.records.iter().enumerate() {
            let last = rows.iter().filter(|r| r.0 == run).last().unwrap();
            assert_eq!((last.1, last.2), (rec.total_fes, rec.final_best.fitness));
        }
    }

    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["seeds"], serde_json::json!([11, 12, 13, 14]));
    assert!(meta["std_convention"].as_str().unwrap().contains("n - 1"));
    assert!(meta["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(meta["config"]["repetitions"], 4);
}

#[test]
fn failing_cell_does_not_abort_matrix() {
    let mut cfg = config();
    let mut bad = VariantConfig::new(Variant::POSTA, 0);
    bad.start = Some(vec![0.0, 0.0]);
    cfg.variants = vec![bad, VariantConfig::new(Variant::NMQI_POSTA, 0)];
    let report = run_experiment(&cfg, None).unwrap();
    let broken = report.cell(BenchmarkId::F11, 3, Variant::POSTA).unwrap();
    assert!(broken.error.as_deref().unwrap().contains("dimension mismatch"));
    assert!(broken.stats.is_none());
    assert!(report.cell(BenchmarkId::F7, 2, Variant::POSTA).unwrap().stats.is_some());
    assert!(report.cell(BenchmarkId::F11, 3, Variant::NMQI_POSTA).unwrap().stats.is_some());
}

#[test]
fn significance_flags_a_clearly_worse_variant() {
    let cfg = ExperimentConfig {
        functions: vec![FunctionCell { function: BenchmarkId::F3, dim: 10 }],
        variants: vec![
            VariantConfig::new(Variant::POSTA, 0),
            VariantConfig::new(Variant::NMQI_POSTA, 0),
        ],
        repetitions: 8,
        budget: BudgetRule::Fixed(60_000),
        reference: Some(Variant::NMQI_POSTA),
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&cfg, None).unwrap();
    let sig = report.cell(BenchmarkId::F3, 10, Variant::POSTA).unwrap().significance;
    assert_eq!(sig.map(|s| s.symbol()), Some("-"));
}
