//! Benchmark runner: trains a grid of (policy, alpha) configs, optionally
//! over several trial seeds, and renders CSV plus an aligned text table
//! with the best alpha per policy marked.

use std::collections::BTreeMap;

use crate::error::{DeskError, Result};
use crate::train::{train, RunReport, TrainConfig};

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub policy: String,
    pub alpha: f64,
    pub seed: u64,
    pub outcome: std::result::Result<RunReport, String>,
}

#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub policy: String,
    pub alpha: f64,
    pub trials: usize,
    pub mean_test_acc: f64,
    pub mean_train_acc: f64,
    pub mean_ece: f64,
    pub mean_wall_seconds: f64,
    /// Best alpha for this policy by mean reported accuracy.
    pub best_alpha: bool,
}

#[derive(Debug, Clone)]
pub struct BenchTable {
    /// One row per run, in input order.
    pub rows: Vec<BenchRow>,
    /// One row per (policy, alpha), sorted by policy then alpha.
    pub aggregates: Vec<AggregateRow>,
}

/// Runs every config `trials` times (seeds `seed, seed+1, ...`), recording
/// failures per row rather than aborting the sweep.
pub fn bench(cfgs: &[TrainConfig], trials: usize) -> Result<BenchTable> {
    if cfgs.is_empty() {
        return Err(DeskError::Config("bench needs at least one config".into()));
    }
    let trials = trials.max(1);
    let mut rows = Vec::with_capacity(cfgs.len() * trials);
    for cfg in cfgs {
        for t in 0..trials {
            let mut run = cfg.clone();
            run.seed = cfg.seed + t as u64;
            let outcome = train(&run).map_err(|e| e.to_string());
            rows.push(BenchRow {
                policy: cfg.policy.kind.name().to_string(),
                alpha: cfg.policy.alpha,
                seed: run.seed,
                outcome,
            });
        }
    }

    // Aggregate successful trials by (policy, alpha).
    let mut groups: BTreeMap<(String, String), Vec<&RunReport>> = BTreeMap::new();
    for row in &rows {
        if let Ok(report) = &row.outcome {
            groups
                .entry((row.policy.clone(), format!("{:.6}", row.alpha)))
                .or_default()
                .push(report);
        }
    }
    let mut aggregates: Vec<AggregateRow> = groups
        .into_iter()
        .map(|((policy, alpha_key), reports)| {
            let n = reports.len() as f64;
            AggregateRow {
                policy,
                alpha: alpha_key.parse().expect("formatted above"),
                trials: reports.len(),
                mean_test_acc: reports.iter().map(|r| r.reported_test_acc).sum::<f64>() / n,
                mean_train_acc: reports.iter().map(|r| r.final_train_acc).sum::<f64>() / n,
                mean_ece: reports.iter().map(|r| r.final_ece).sum::<f64>() / n,
                mean_wall_seconds: reports.iter().map(|r| r.wall_seconds).sum::<f64>() / n,
                best_alpha: false,
            }
        })
        .collect();

    // Mark the best alpha within each policy.
    let mut best: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (idx, agg) in aggregates.iter().enumerate() {
        let entry = best.entry(agg.policy.clone()).or_insert((f64::NEG_INFINITY, idx));
        if agg.mean_test_acc > entry.0 {
            *entry = (agg.mean_test_acc, idx);
        }
    }
    for (_, (_, idx)) in best {
        aggregates[idx].best_alpha = true;
    }
    Ok(BenchTable { rows, aggregates })
}

impl BenchTable {
    /// Per-run CSV in input order. Wall-clock times are only included on
    /// request so identical invocations emit identical bytes.
    pub fn to_csv(&self, include_timings: bool) -> String {
        let mut out = String::from("policy,alpha,seed,test_acc,train_acc,ece");
        if include_timings {
            out.push_str(",wall_seconds");
        }
        out.push_str(",status\n");
        for row in &self.rows {
            match &row.outcome {
                Ok(r) => {
                    out.push_str(&format!(
                        "{},{},{},{:.6},{:.6},{:.6}",
                        row.policy, row.alpha, row.seed, r.reported_test_acc, r.final_train_acc,
                        r.final_ece
                    ));
                    if include_timings {
                        out.push_str(&format!(",{:.3}", r.wall_seconds));
                    }
                    out.push_str(",ok\n");
                }
                Err(message) => {
                    out.push_str(&format!("{},{},{},,,", row.policy, row.alpha, row.seed));
                    if include_timings {
                        out.push(',');
                    }
                    out.push_str(&format!(",error: {}\n", message.replace(',', ";")));
                }
            }
        }
        out
    }

    /// Aligned text table of the aggregates, `*` marking each policy's best
    /// alpha.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<14} {:>7} {:>7} {:>10} {:>10} {:>8}  best\n",
            "policy", "alpha", "trials", "test_acc", "train_acc", "ece"
        ));
        for agg in &self.aggregates {
            out.push_str(&format!(
                "{:<14} {:>7} {:>7} {:>10.4} {:>10.4} {:>8.4}  {}\n",
                agg.policy,
                agg.alpha,
                agg.trials,
                agg.mean_test_acc,
                agg.mean_train_acc,
                agg.mean_ece,
                if agg.best_alpha { "*" } else { "" }
            ));
        }
        let failures = self.rows.iter().filter(|r| r.outcome.is_err()).count();
        if failures > 0 {
            out.push_str(&format!("({failures} failed runs recorded in the CSV)\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SynthSpec;
    use crate::train::DatasetRef;
    use mixforge_core::{PolicyConfig, PolicyKind};

    fn cfg(kind: PolicyKind, alpha: f64, seed: u64) -> TrainConfig {
        TrainConfig {
            dataset: DatasetRef::Synth(SynthSpec {
                n: 64,
                h: 4,
                w: 4,
                c: 1,
                k: 2,
                label_noise: 0.0,
            }),
            policy: PolicyConfig::new(kind, alpha).unwrap(),
            epochs: 2,
            batch_size: 16,
            learning_rate: 0.1,
            seed,
            eval_every: 0,
            hidden_dim: 8,
            flip_augment: false,
            median_last_k: 0,
        }
    }

    #[test]
    fn two_seeds_make_two_rows_plus_aggregate() {
        let table = bench(&[cfg(PolicyKind::Mixup, 1.0, 3)], 2).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].seed, 3);
        assert_eq!(table.rows[1].seed, 4);
        assert_eq!(table.aggregates.len(), 1);
        assert_eq!(table.aggregates[0].trials, 2);
        assert!(table.aggregates[0].best_alpha);
    }

    #[test]
    fn alpha_sweep_marks_one_best_per_policy() {
        let alphas = [0.1, 0.2, 0.5, 1.0, 2.0, 4.0];
        let cfgs: Vec<TrainConfig> =
            alphas.iter().map(|&a| cfg(PolicyKind::Mixup, a, 1)).collect();
        let table = bench(&cfgs, 1).unwrap();
        assert_eq!(table.rows.len(), 6);
        assert_eq!(table.aggregates.len(), 6);
        assert_eq!(table.aggregates.iter().filter(|a| a.best_alpha).count(), 1);
    }

    #[test]
    fn empty_sweep_is_a_usage_error() {
        assert!(bench(&[], 1).is_err());
    }

    #[test]
    fn failed_runs_are_recorded_not_fatal() {
        let mut bad = cfg(PolicyKind::Guidedcut, 1.0, 1);
        bad.policy = PolicyConfig::new(PolicyKind::Guidedcut, 1.0).unwrap();
        let good = cfg(PolicyKind::Vanilla, 1.0, 1);
        let table = bench(&[bad, good], 1).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows[0].outcome.is_err());
        assert!(table.rows[1].outcome.is_ok());
        let csv = table.to_csv(false);
        assert!(csv.contains("error:"));
        assert!(csv.lines().count() == 3);
    }
}
