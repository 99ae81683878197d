//! Exact 1-NN search over SPD matrices under `d_q`, pruned with the
//! eigenvalue-only lower bound `(sum |log lambda_i(Q) - log lambda_i(X)|^q)^(1/q)`.
//!
//! Candidates are visited in ascending bound order and the scan stops as soon
//! as the bound exceeds the best exact distance found so far. The bound never
//! exceeds the true distance, so the result equals brute force.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::spd_geometry::distance_power;

/// Slack added to the best distance before pruning, absorbing eigensolver roundoff.
pub const PRUNE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SpdDataset {
    items: Vec<SpdMatrix>,
    ids: Vec<u64>,
}

impl SpdDataset {
    pub fn new(items: Vec<SpdMatrix>, ids: Vec<u64>) -> Result<Self> {
        if items.len() != ids.len() {
            return Err(Error::InvalidInput(format!("{} items but {} ids", items.len(), ids.len())));
        }
        if let Some(first) = items.first() {
            if let Some(bad) = items.iter().position(|m| m.dim() != first.dim()) {
                return Err(Error::InvalidInput(format!(
                    "item {bad} has dimension {}, expected {}",
                    items[bad].dim(),
                    first.dim()
                )));
            }
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("duplicate id {}", w[0])));
        }
        Ok(SpdDataset { items, ids })
    }

    /// Ids `0..len`.
    pub fn from_items(items: Vec<SpdMatrix>) -> Result<Self> {
        let ids = (0..items.len() as u64).collect();
        Self::new(items, ids)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.items.first().map(SpdMatrix::dim)
    }

    pub fn items(&self) -> &[SpdMatrix] {
        &self.items
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }
}

/// Sorted log-eigenvalues per dataset item.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectraCache {
    pub log_spectra: Vec<Vec<f64>>,
}

pub fn build_cache(ds: &SpdDataset) -> Result<SpectraCache> {
    let mut log_spectra = Vec::with_capacity(ds.len());
    for m in ds.items() {
        if !m.is_definite() {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: *m.eigenvalues().last().unwrap() });
        }
        log_spectra.push(m.log_eigenvalues());
    }
    Ok(SpectraCache { log_spectra })
}

fn lower_bound_power(a: &[f64], b: &[f64], q: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(q)).sum()
}

/// Lower bound on `d_q` from two non-increasing log-spectra.
pub fn lower_bound_distance(query_spectrum: &[f64], item_spectrum: &[f64], q: f64) -> f64 {
    lower_bound_power(query_spectrum, item_spectrum, q).powf(1.0 / q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryStats {
    pub exact_evaluations: usize,
    pub pruned: usize,
    pub best_id: u64,
    pub best_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Neighbor {
    pub id: u64,
    pub distance: f64,
    pub stats: QueryStats,
}

fn check_query(query: &SpdMatrix, ds: &SpdDataset, q: f64) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    if ds.dim() != Some(query.dim()) {
        return Err(Error::InvalidInput(format!(
            "query dimension {} does not match dataset dimension {}",
            query.dim(),
            ds.dim().unwrap()
        )));
    }
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q must be >= 1, got {q}")));
    }
    Ok(())
}

fn better(cand: (f64, u64), best: Option<(f64, u64)>) -> bool {
    match best {
        None => true,
        Some((d, id)) => cand.0 < d || (cand.0 == d && cand.1 < id),
    }
}

fn finish(best: (f64, u64), q: f64, exact_evaluations: usize, total: usize) -> Neighbor {
    let distance = best.0.powf(1.0 / q);
    Neighbor {
        id: best.1,
        distance,
        stats: QueryStats {
            exact_evaluations,
            pruned: total - exact_evaluations,
            best_id: best.1,
            best_distance: distance,
        },
    }
}

/// Pruned exact search; ties go to the smallest id.
pub fn nearest_neighbor(query: &SpdMatrix, ds: &SpdDataset, cache: &SpectraCache, q: f64) -> Result<Neighbor> {
    check_query(query, ds, q)?;
    if cache.log_spectra.len() != ds.len() {
        return Err(Error::InvalidInput("cache does not match dataset".into()));
    }
    let qs = query.log_eigenvalues();
    // Work with q-th powers; the ordering is the same.
    let mut order: Vec<(f64, u64, usize)> = cache
        .log_spectra
        .iter()
        .enumerate()
        .map(|(i, s)| (lower_bound_power(&qs, s, q), ds.ids()[i], i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut best: Option<(f64, u64)> = None;
    let mut evaluated = 0;
    for (bound, id, idx) in order {
        if let Some((d, _)) = best {
            if bound > d + PRUNE_SLACK * (1.0 + d) {
                break;
            }
        }
        let d = distance_power(query, &ds.items()[idx], q)?;
        evaluated += 1;
        if better((d, id), best) {
            best = Some((d, id));
        }
    }
    Ok(finish(best.expect("non-empty dataset"), q, evaluated, ds.len()))
}

/// Reference scan evaluating every item.
pub fn brute_force_neighbor(query: &SpdMatrix, ds: &SpdDataset, q: f64) -> Result<Neighbor> {
    check_query(query, ds, q)?;
    let mut best: Option<(f64, u64)> = None;
    for (m, &id) in ds.items().iter().zip(ds.ids()) {
        let d = distance_power(query, m, q)?;
        if better((d, id), best) {
            best = Some((d, id));
        }
    }
    Ok(finish(best.expect("non-empty dataset"), q, ds.len(), ds.len()))
}

/// Order statistics of a sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        if values.is_empty() {
            return Summary { count: 0, min: f64::NAN, median: f64::NAN, mean: f64::NAN, max: f64::NAN };
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Summary { count: n, min: v[0], median, mean: v.iter().sum::<f64>() / n as f64, max: v[n - 1] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PruningBenchReport {
    pub queries: usize,
    pub dataset_size: usize,
    pub q: f64,
    pub mean_pruning_fraction: f64,
    pub pruning_fraction: Summary,
    pub pruned_seconds: f64,
    pub brute_force_seconds: f64,
    /// Queries whose pruned answer differs from brute force (id or distance).
    pub mismatches: usize,
    /// `d_q - lower bound` over every (query, item) pair.
    pub bound_gap: Summary,
}

/// Runs pruned and brute-force search on every query (in a seeded order) and
/// compares them.
pub fn bench_pruning(ds: &SpdDataset, queries: &[SpdMatrix], q: f64, seed: u64) -> Result<PruningBenchReport> {
    let cache = build_cache(ds)?;
    let mut order: Vec<usize> = (0..queries.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let start = Instant::now();
    let mut pruned_results = vec![None; queries.len()];
    for &i in &order {
        pruned_results[i] = Some(nearest_neighbor(&queries[i], ds, &cache, q)?);
    }
    let pruned_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let mut brute_results = Vec::with_capacity(queries.len());
    for &i in &order {
        brute_results.push((i, brute_force_neighbor(&queries[i], ds, q)?));
    }
    let brute_force_seconds = start.elapsed().as_secs_f64();

    let mut mismatches = 0;
    let mut fractions = Vec::with_capacity(queries.len());
    for (i, brute) in &brute_results {
        let pruned = pruned_results[*i].as_ref().unwrap();
        if pruned.id != brute.id || pruned.distance != brute.distance {
            mismatches += 1;
        }
        fractions.push(pruned.stats.pruned as f64 / ds.len() as f64);
    }

    let mut gaps = Vec::with_capacity(queries.len() * ds.len());
    for query in queries {
        let qs = query.log_eigenvalues();
        for (m, s) in ds.items().iter().zip(&cache.log_spectra) {
            let exact = distance_power(query, m, q)?.powf(1.0 / q);
            gaps.push(exact - lower_bound_distance(&qs, s, q));
        }
    }

    let pruning_fraction = Summary::of(&fractions);
    Ok(PruningBenchReport {
        queries: queries.len(),
        dataset_size: ds.len(),
        q,
        mean_pruning_fraction: pruning_fraction.mean,
        pruning_fraction,
        pruned_seconds,
        brute_force_seconds,
        mismatches,
        bound_gap: Summary::of(&gaps),
    })
}
