//! Bundled reference data.

/// Published benchmark result for one binary classification task:
/// F1, AUPRC, and the minority-to-majority ratio of its dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkTask {
    pub name: &'static str,
    pub f1: f64,
    pub auprc: f64,
    pub ratio: f64,
}

/// Ten peptide-classification benchmark results spanning imbalance ratios
/// from 0.045 to 0.40. Used to validate the correlation and ratio-law fit
/// pipeline on real published numbers.
pub const BENCHMARK_TASKS: [BenchmarkTask; 10] = [
    BenchmarkTask { name: "Antimicrobial", f1: 0.8681, auprc: 0.9494, ratio: 0.3979 },
    BenchmarkTask { name: "Antibacterial", f1: 0.7814, auprc: 0.8547, ratio: 0.2411 },
    BenchmarkTask { name: "Toxic", f1: 0.7859, auprc: 0.8797, ratio: 0.2209 },
    BenchmarkTask { name: "Anti_gram_pos", f1: 0.7426, auprc: 0.8208, ratio: 0.1862 },
    BenchmarkTask { name: "Anti_gram_neg", f1: 0.7152, auprc: 0.7814, ratio: 0.1547 },
    BenchmarkTask { name: "Metabolic", f1: 0.6513, auprc: 0.7608, ratio: 0.1225 },
    BenchmarkTask { name: "Anti_mammalian_cell", f1: 0.6287, auprc: 0.6892, ratio: 0.0934 },
    BenchmarkTask { name: "Neuropeptide", f1: 0.6109, auprc: 0.6753, ratio: 0.0617 },
    BenchmarkTask { name: "Immunological", f1: 0.5565, auprc: 0.5771, ratio: 0.0518 },
    BenchmarkTask { name: "Anti_inflammatory", f1: 0.5268, auprc: 0.5946, ratio: 0.0451 },
];

/// `(ratio, f1)` pairs of the benchmark table.
pub fn benchmark_f1_points() -> Vec<(f64, f64)> {
    BENCHMARK_TASKS.iter().map(|t| (t.ratio, t.f1)).collect()
}

/// `(ratio, auprc)` pairs of the benchmark table.
pub fn benchmark_auprc_points() -> Vec<(f64, f64)> {
    BENCHMARK_TASKS.iter().map(|t| (t.ratio, t.auprc)).collect()
}
