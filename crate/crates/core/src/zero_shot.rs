//! Zero-shot classifiers over a semantic prior: deterministic ranking (DR),
//! probabilistic ranking (PR), and direct similarity (DS), plus aggregation
//! of similarity sources.
//!
//! DR ranks the training classes from the test sample's scores and picks the
//! test class whose consensus ranking is nearest in top-K Kendall distance.
//! PR picks the test class whose consensus list the score-based ranker finds
//! most probable. DS skips rankings entirely and scores each test class by a
//! similarity-weighted product of calibrated class-probability ratios.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::priors::SemanticPrior;
use crate::rankers::{bs_ranker_log_score, pl_ranker_log_prob};
use crate::ranking::{kendall_topk_distance, ranking_from_scores, PairwiseScores, Ranking, ScoreVector};

/// A test-class x train-class similarity matrix from one semantic source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySource {
    pub name: String,
    pub test_classes: Vec<String>,
    pub train_classes: Vec<String>,
    /// Row per test class, column per training class.
    pub matrix: Vec<Vec<f64>>,
}

impl SimilaritySource {
    pub fn new(
        name: String,
        test_classes: Vec<String>,
        train_classes: Vec<String>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if matrix.len() != test_classes.len() {
            return Err(Error::Dimension(format!(
                "similarity '{name}' has {} rows for {} test classes",
                matrix.len(),
                test_classes.len()
            )));
        }
        for (z, row) in matrix.iter().enumerate() {
            if row.len() != train_classes.len() {
                return Err(Error::Dimension(format!(
                    "similarity '{name}' row {z} has {} entries for {} training classes",
                    row.len(),
                    train_classes.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Argument(format!(
                    "similarity '{name}' row {z} contains a non-finite entry"
                )));
            }
        }
        Ok(Self {
            name,
            test_classes,
            train_classes,
            matrix,
        })
    }

    pub fn row(&self, test_class: &str) -> Result<&[f64]> {
        let idx = self
            .test_classes
            .iter()
            .position(|z| z == test_class)
            .ok_or_else(|| Error::Argument(format!("unknown test class '{test_class}'")))?;
        Ok(&self.matrix[idx])
    }

    /// Reorders both axes to the given name sequences; the class sets must
    /// match exactly.
    pub fn align_to(&self, test_classes: &[String], train_classes: &[String]) -> Result<Self> {
        let test_map = index_map(test_classes, &self.test_classes)
            .map_err(|e| Error::Argument(format!("test axis of '{}': {e}", self.name)))?;
        let train_map = index_map(train_classes, &self.train_classes)
            .map_err(|e| Error::Argument(format!("train axis of '{}': {e}", self.name)))?;
        let matrix = test_map
            .iter()
            .map(|&zi| train_map.iter().map(|&yi| self.matrix[zi][yi]).collect())
            .collect();
        Self::new(
            self.name.clone(),
            test_classes.to_vec(),
            train_classes.to_vec(),
            matrix,
        )
    }
}

/// For each name in `wanted`, its position in `available`.
pub fn index_map(wanted: &[String], available: &[String]) -> Result<Vec<usize>> {
    if wanted.len() != available.len() {
        return Err(Error::Argument(format!(
            "class sets differ in size: {} vs {}",
            wanted.len(),
            available.len()
        )));
    }
    wanted
        .iter()
        .map(|name| {
            available
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| Error::Argument(format!("class '{name}' not found")))
        })
        .collect()
}

/// How multiple similarity sources are combined entrywise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggMethod {
    Arithmetic,
    Geometric,
}

/// Min-max normalizes each source to [0, 1] and combines them entrywise.
///
/// A constant source normalizes to 0.5 everywhere. The geometric mean of any
/// zero entry is zero. Sources must already share axis order.
pub fn aggregate_similarities(
    sources: &[SimilaritySource],
    method: AggMethod,
) -> Result<SimilaritySource> {
    let first = sources
        .first()
        .ok_or_else(|| Error::Argument("at least one similarity source is required".into()))?;
    for s in sources {
        if s.test_classes != first.test_classes || s.train_classes != first.train_classes {
            return Err(Error::Argument(format!(
                "source '{}' axes are not aligned with '{}'",
                s.name, first.name
            )));
        }
    }
    let normalized: Vec<Vec<Vec<f64>>> = sources
        .iter()
        .map(|s| {
            let lo = s
                .matrix
                .iter()
                .flatten()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let hi = s
                .matrix
                .iter()
                .flatten()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            s.matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| if range > 0.0 { (v - lo) / range } else { 0.5 })
                        .collect()
                })
                .collect()
        })
        .collect();
    let n = sources.len() as f64;
    let rows = first.test_classes.len();
    let cols = first.train_classes.len();
    let mut matrix = vec![vec![0.0; cols]; rows];
    for z in 0..rows {
        for y in 0..cols {
            let values = normalized.iter().map(|m| m[z][y]);
            matrix[z][y] = match method {
                AggMethod::Arithmetic => values.sum::<f64>() / n,
                AggMethod::Geometric => {
                    if normalized.iter().any(|m| m[z][y] == 0.0) {
                        0.0
                    } else {
                        (values.map(f64::ln).sum::<f64>() / n).exp()
                    }
                }
            };
        }
    }
    let tag = match method {
        AggMethod::Arithmetic => "arithmetic",
        AggMethod::Geometric => "geometric",
    };
    SimilaritySource::new(
        format!("{tag}({})", sources.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(",")),
        first.test_classes.clone(),
        first.train_classes.clone(),
        matrix,
    )
}

/// Training classes of `test_class`, most similar first; ties go to the
/// lower class index.
pub fn similarity_to_ranking(src: &SimilaritySource, test_class: &str) -> Result<Ranking> {
    let row = src.row(test_class)?;
    Ok(ranking_from_scores(&ScoreVector::new(row.to_vec())?))
}

/// Scores a probabilistic ranker consumes: one per training class for
/// one-vs-rest and multiclass suites, one per pair for one-vs-one.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierScores {
    PerClass(ScoreVector),
    Pairwise(PairwiseScores),
}

impl ClassifierScores {
    pub fn universe_size(&self) -> usize {
        match self {
            ClassifierScores::PerClass(s) => s.len(),
            ClassifierScores::Pairwise(p) => p.universe_size(),
        }
    }

    /// The deterministic ranking the scores induce: score sort for per-class
    /// scores, Copeland counting for pairwise scores.
    pub fn to_ranking(&self) -> Ranking {
        match self {
            ClassifierScores::PerClass(s) => ranking_from_scores(s),
            ClassifierScores::Pairwise(p) => crate::rankers::deterministic_rank_ovo(p),
        }
    }
}

fn check_prior_universe(priors: &SemanticPrior, c: usize, k: usize) -> Result<()> {
    if priors.entries.is_empty() {
        return Err(Error::Argument("prior has no test classes".into()));
    }
    if priors.train_classes.len() != c {
        return Err(Error::Dimension(format!(
            "prior is over {} training classes, input has {c}",
            priors.train_classes.len()
        )));
    }
    if k == 0 || k > c {
        return Err(Error::Argument(format!("K = {k} must satisfy 1 <= K <= C = {c}")));
    }
    Ok(())
}

/// Deterministic ranking classifier: the test class whose consensus ranking
/// is nearest to the sample's ranking in top-K Kendall distance. Returns the
/// winning class index and all per-class distances; ties go to the lower
/// class index.
pub fn dr_classify(
    x_ranking: &Ranking,
    priors: &SemanticPrior,
    k: usize,
) -> Result<(usize, Vec<usize>)> {
    check_prior_universe(priors, x_ranking.len(), k)?;
    let x_top = x_ranking.top_k(k)?;
    let mut distances = Vec::with_capacity(priors.entries.len());
    for entry in &priors.entries {
        distances.push(kendall_topk_distance(&x_top, &entry.consensus.top_k(k)?)?);
    }
    let best = distances
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("non-empty prior")
        .0;
    Ok((best, distances))
}

/// Probabilistic ranking classifier: the test class whose consensus top-K
/// list the score-based ranker finds most probable. Per-class scores use the
/// Plackett-Luce ranker, pairwise scores the Babington-Smith ranker. Returns
/// the winning class index and per-class log-scores; ties go to the lower
/// class index.
pub fn pr_classify(
    scores: &ClassifierScores,
    priors: &SemanticPrior,
    k: usize,
) -> Result<(usize, Vec<f64>)> {
    check_prior_universe(priors, scores.universe_size(), k)?;
    let mut log_scores = Vec::with_capacity(priors.entries.len());
    for entry in &priors.entries {
        let list = entry.consensus.top_k(k)?;
        let value = match scores {
            ClassifierScores::PerClass(s) => pl_ranker_log_prob(s, &list)?,
            ClassifierScores::Pairwise(p) => bs_ranker_log_score(p, &list)?,
        };
        log_scores.push(value);
    }
    Ok((argmax(&log_scores), log_scores))
}

/// Index of the strictly largest entry; ties go to the first.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Direct-similarity configuration: how many of the most similar training
/// classes participate, and the training-class prior (uniform when absent).
#[derive(Debug, Clone, PartialEq)]
pub struct DsConfig {
    pub top_m: usize,
    pub train_prior: Option<Vec<f64>>,
}

impl Default for DsConfig {
    fn default() -> Self {
        Self {
            top_m: 5,
            train_prior: None,
        }
    }
}

/// Direct-similarity classifier: each test class is scored by the
/// similarity-weighted sum of log probability ratios of its `top_m` most
/// similar training classes. Returns the winning class index and per-class
/// log-scores; ties go to the lower class index.
///
/// Similarities must be non-negative (normalize first); a test class whose
/// selected similarities sum to zero scores negative infinity.
pub fn ds_classify(
    class_probs: &[f64],
    sim: &SimilaritySource,
    cfg: &DsConfig,
) -> Result<(usize, Vec<f64>)> {
    let c = sim.train_classes.len();
    if class_probs.len() != c {
        return Err(Error::Dimension(format!(
            "{} class probabilities for {} training classes",
            class_probs.len(),
            c
        )));
    }
    if class_probs.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(Error::Argument(
            "class probabilities must lie strictly inside (0, 1)".into(),
        ));
    }
    if cfg.top_m == 0 || cfg.top_m > c {
        return Err(Error::Argument(format!(
            "top_m = {} must satisfy 1 <= top_m <= C = {c}",
            cfg.top_m
        )));
    }
    let uniform = vec![1.0 / c as f64; c];
    let prior = match &cfg.train_prior {
        Some(p) => {
            if p.len() != c {
                return Err(Error::Dimension(format!(
                    "train prior has {} entries for {c} classes",
                    p.len()
                )));
            }
            if p.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Argument("train prior entries must be positive".into()));
            }
            p.as_slice()
        }
        None => uniform.as_slice(),
    };

    let mut log_scores = Vec::with_capacity(sim.test_classes.len());
    for (z, row) in sim.matrix.iter().enumerate() {
        if row.iter().any(|w| *w < 0.0) {
            return Err(Error::Argument(format!(
                "similarities for '{}' must be non-negative; normalize the source first",
                sim.test_classes[z]
            )));
        }
        let mut idx: Vec<usize> = (0..c).collect();
        idx.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).expect("finite").then(a.cmp(&b)));
        let selected = &idx[..cfg.top_m];
        let weight_sum: f64 = selected.iter().map(|&y| row[y]).sum();
        if weight_sum == 0.0 {
            warn!(
                "test class '{}' has zero similarity to its top-{} training classes",
                sim.test_classes[z], cfg.top_m
            );
            log_scores.push(f64::NEG_INFINITY);
            continue;
        }
        let mut score = 0.0;
        for &y in selected {
            let exponent = row[y] / weight_sum;
            score += exponent * (class_probs[y].ln() - prior[y].ln());
        }
        log_scores.push(score);
    }
    Ok((argmax(&log_scores), log_scores))
}
