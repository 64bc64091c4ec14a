//! Dataset balancing: undersampling, oversampling, SMOTE, and balanced
//! majority-subset plans for bagging ensembles.
//!
//! Every transform leaves the output with exactly equal class counts
//! (r = 1) and never mutates its input.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::data::{class_counts, draw_index, shuffled_indices, ClassCounts, Dataset};
use crate::error::{Error, Result};
use crate::exec::indexed_map;
use crate::rng::rng_from_seed;

fn checked_counts(dataset: &Dataset) -> Result<ClassCounts> {
    let counts = class_counts(dataset);
    if counts.n_majority == 0 || counts.n_minority == 0 {
        return Err(Error::DegenerateClasses {
            n_minority: counts.n_minority,
            n_majority: counts.n_majority,
        });
    }
    if counts.n_minority > counts.n_majority {
        return Err(Error::MinorityConvention {
            n_minority: counts.n_minority,
            n_majority: counts.n_majority,
        });
    }
    Ok(counts)
}

/// Keeps every minority row and a seeded random subset of N1 majority rows.
/// Output rows stay in the original dataset order.
pub fn undersample(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    let counts = checked_counts(dataset)?;
    let majority = dataset.indices_of(0);
    let mut rng = rng_from_seed(seed);
    let mut order = shuffled_indices(majority.len(), &mut rng);
    order.truncate(counts.n_minority);
    let mut keep = vec![false; dataset.n_samples()];
    for &pos in &order {
        keep[majority[pos]] = true;
    }
    let selected: Vec<usize> = (0..dataset.n_samples())
        .filter(|&i| dataset.label(i) == 1 || keep[i])
        .collect();
    dataset.select(&selected)
}

/// Keeps every original row and appends exact copies of minority rows
/// until both classes hold N0 samples.
///
/// Duplicates cycle through the minority rows in a seeded shuffled order,
/// so every original gains its second copy before any gains a third.
pub fn oversample(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    let counts = checked_counts(dataset)?;
    let minority = dataset.indices_of(1);
    let mut rng = rng_from_seed(seed);
    let order = shuffled_indices(minority.len(), &mut rng);
    let deficit = counts.n_majority - counts.n_minority;
    let mut selected: Vec<usize> = (0..dataset.n_samples()).collect();
    for t in 0..deficit {
        selected.push(minority[order[t % minority.len()]]);
    }
    dataset.select(&selected)
}

/// SMOTE configuration. `k_neighbors` is clamped to N1 - 1 when the
/// minority class is smaller than requested; see [`SmoteOutput::effective_k`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig { k_neighbors: 5, seed: 0 }
    }
}

/// Parent record for one synthetic row: the synthetic output row index,
/// the two parent rows in the input dataset, and the interpolation factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoteRecord {
    pub synthetic_row: usize,
    pub parent_i: usize,
    pub parent_k: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutput {
    pub dataset: Dataset,
    pub provenance: Vec<SmoteRecord>,
    /// Neighbor count actually used (k after clamping to N1 - 1).
    pub effective_k: usize,
}

impl SmoteOutput {
    /// Provenance CSV: `synthetic_row,parent_i,parent_k,lambda`.
    pub fn provenance_csv(&self) -> String {
        let mut out = String::from("synthetic_row,parent_i,parent_k,lambda\n");
        for rec in &self.provenance {
            out.push_str(&format!(
                "{},{},{},{}\n",
                rec.synthetic_row, rec.parent_i, rec.parent_k, rec.lambda
            ));
        }
        out
    }
}

/// Balances by interpolating synthetic minority rows: each new row is
/// `x_i + lambda * (x_k - x_i)` for a random minority row `x_i`, a random
/// `x_k` among its k nearest minority neighbors (Euclidean, ties broken by
/// lower row index), and `lambda ~ Uniform[0,1)`.
pub fn smote(dataset: &Dataset, config: &SmoteConfig) -> Result<SmoteOutput> {
    if config.k_neighbors == 0 {
        return Err(Error::param("k_neighbors", "must be >= 1"));
    }
    let counts = checked_counts(dataset)?;
    if counts.n_minority < 2 {
        return Err(Error::SmoteTooFewMinority(counts.n_minority));
    }
    let minority = dataset.indices_of(1);
    let k = config.k_neighbors.min(counts.n_minority - 1);

    // k nearest minority neighbors of each minority row, self excluded
    let neighbors: Vec<Vec<usize>> = indexed_map(minority.len(), |a| {
        let row_a = dataset.row(minority[a]);
        let mut dists: Vec<(f64, usize)> = (0..minority.len())
            .filter(|&b| b != a)
            .map(|b| {
                let row_b = dataset.row(minority[b]);
                let d2: f64 = row_a
                    .iter()
                    .zip(row_b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                (d2, b)
            })
            .collect();
        dists.sort_by(|l, r| l.0.partial_cmp(&r.0).unwrap().then(l.1.cmp(&r.1)));
        dists.truncate(k);
        dists.into_iter().map(|(_, b)| b).collect()
    });

    let n_synthetic = counts.n_majority - counts.n_minority;
    let mut rng = rng_from_seed(config.seed);
    let p = dataset.n_features();
    let mut features: Vec<f64> = dataset.features().to_vec();
    let mut labels: Vec<u8> = dataset.labels().to_vec();
    let mut provenance = Vec::with_capacity(n_synthetic);
    for t in 0..n_synthetic {
        let a = draw_index(minority.len(), &mut rng);
        let b = neighbors[a][draw_index(k, &mut rng)];
        let lambda: f64 = rng.random();
        let (i, j) = (minority[a], minority[b]);
        let row_i = dataset.row(i);
        let row_j = dataset.row(j);
        for c in 0..p {
            features.push(row_i[c] + lambda * (row_j[c] - row_i[c]));
        }
        labels.push(1);
        provenance.push(SmoteRecord {
            synthetic_row: dataset.n_samples() + t,
            parent_i: i,
            parent_k: j,
            lambda,
        });
    }
    Ok(SmoteOutput {
        dataset: Dataset::new(features, p, labels)?,
        provenance,
        effective_k: k,
    })
}

/// How majority rows are drawn into balanced subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    WithoutReplacement,
    WithReplacement,
}

/// Number of base classifiers for a bagging ensemble.
///
/// Without replacement: `K = ceil(N0 / N1)`, the count needed for the
/// disjoint subsets to cover every majority row. With replacement: the
/// smallest K such that `(1 - N1/N0)^K < theta`, the bound on the
/// probability that a given majority row is never selected. Equal counts
/// give K = 1 in both modes (the omission probability is already zero).
pub fn num_base_classifiers(counts: ClassCounts, mode: SamplingMode, theta: f64) -> Result<usize> {
    if counts.n_majority == 0 || counts.n_minority == 0 {
        return Err(Error::DegenerateClasses {
            n_minority: counts.n_minority,
            n_majority: counts.n_majority,
        });
    }
    if counts.n_minority > counts.n_majority {
        return Err(Error::MinorityConvention {
            n_minority: counts.n_minority,
            n_majority: counts.n_majority,
        });
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param("theta", "must lie in (0, 1)"));
    }
    match mode {
        SamplingMode::WithoutReplacement => {
            Ok((counts.n_majority + counts.n_minority - 1) / counts.n_minority)
        }
        SamplingMode::WithReplacement => {
            if counts.n_minority == counts.n_majority {
                return Ok(1);
            }
            let p = 1.0 - counts.n_minority as f64 / counts.n_majority as f64;
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::param("counts", "omission probability out of range"));
            }
            // log-space estimate, then settle the boundary exactly
            let mut k = (theta.ln() / p.ln()).floor().max(1.0) as u32;
            while p.powi(k as i32) >= theta {
                k += 1;
            }
            while k > 1 && p.powi(k as i32 - 1) < theta {
                k -= 1;
            }
            Ok(k as usize)
        }
    }
}

/// K balanced majority-index subsets for ensemble training.
///
/// Each subset holds exactly N1 majority row indices; the training set for
/// base k is all minority rows plus `subsets[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetPlan {
    pub subsets: Vec<Vec<usize>>,
    pub mode: SamplingMode,
    pub theta: f64,
}

impl SubsetPlan {
    pub fn n_subsets(&self) -> usize {
        self.subsets.len()
    }

    /// Plan CSV: `subset_id,majority_row_index`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset_id,majority_row_index\n");
        for (k, subset) in self.subsets.iter().enumerate() {
            for &idx in subset {
                out.push_str(&format!("{k},{idx}\n"));
            }
        }
        out
    }
}

/// Builds the balanced subset plan for the given sampling mode.
///
/// Without replacement, the shuffled majority indices are dealt into
/// disjoint chunks of size N1. When N1 does not divide N0, the final
/// subset takes all remaining fresh indices and tops up to N1 by drawing
/// without replacement from the already-used indices; this keeps every
/// subset balanced while every majority row still appears at least once.
pub fn plan_balanced_subsets(
    dataset: &Dataset,
    mode: SamplingMode,
    theta: f64,
    seed: u64,
) -> Result<SubsetPlan> {
    let counts = checked_counts(dataset)?;
    let k_subsets = num_base_classifiers(counts, mode, theta)?;
    let majority = dataset.indices_of(0);
    let n1 = counts.n_minority;
    let mut rng = rng_from_seed(seed);

    let subsets = match mode {
        SamplingMode::WithoutReplacement => {
            let order = shuffled_indices(majority.len(), &mut rng);
            let mut subsets = Vec::with_capacity(k_subsets);
            for k in 0..k_subsets {
                let start = k * n1;
                let end = ((k + 1) * n1).min(majority.len());
                let mut subset: Vec<usize> = order[start..end].iter().map(|&p| majority[p]).collect();
                if subset.len() < n1 {
                    let mut used: Vec<usize> = order[..start].to_vec();
                    used.shuffle(&mut rng);
                    subset.extend(used[..n1 - subset.len()].iter().map(|&p| majority[p]));
                }
                subsets.push(subset);
            }
            subsets
        }
        SamplingMode::WithReplacement => {
            if counts.n_minority == counts.n_majority {
                vec![majority.clone()]
            } else {
                (0..k_subsets)
                    .map(|_| {
                        (0..n1)
                            .map(|_| majority[draw_index(majority.len(), &mut rng)])
                            .collect()
                    })
                    .collect()
            }
        }
    };
    Ok(SubsetPlan { subsets, mode, theta })
}
