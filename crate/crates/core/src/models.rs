//! Probabilistic models over rankings and top-K lists.
//!
//! Three classic families, all evaluated exactly in the log domain:
//!
//! - Plackett-Luce: stagewise choice proportional to positive item weights
//!   `v_i = exp(theta_i)`; top-K probability is the product of stagewise
//!   softmax factors over the remaining items.
//! - Mallows: probability decays exponentially with displacement from a mode
//!   ranking at rate `lambda`; the top-K normalizer has a closed form.
//! - Babington-Smith: built from independent pairwise preference odds
//!   `v_ij`; its normalizer has no known closed form, so only unnormalized
//!   log scores are exposed.
//!
//! Samplers take an explicit RNG so callers control determinism.

use rand::Rng;

use crate::error::{Error, Result};
use crate::opt::log_sum_exp;
use crate::ranking::{PairwiseScores, Ranking, TopKList};

/// Plackett-Luce model with weights stored as logs, so positivity is
/// implicit and probabilities are invariant under a constant shift.
#[derive(Debug, Clone, PartialEq)]
pub struct PlackettLuceModel {
    log_weights: Vec<f64>,
}

impl PlackettLuceModel {
    pub fn new(log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::Argument("model needs at least one item".into()));
        }
        if log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Argument("log weights must be finite".into()));
        }
        Ok(Self { log_weights })
    }

    pub fn universe_size(&self) -> usize {
        self.log_weights.len()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Log-probability of observing the top-K list.
    pub fn log_prob(&self, t: &TopKList) -> Result<f64> {
        pl_log_prob_from_theta(&self.log_weights, t)
    }

    /// Draws a top-K list by sequential sampling without replacement
    /// proportional to the weights.
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<TopKList> {
        let c = self.universe_size();
        if k == 0 || k > c {
            return Err(Error::Argument(format!("K = {k} must satisfy 1 <= K <= C = {c}")));
        }
        let max = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = self.log_weights.iter().map(|w| (w - max).exp()).collect();
        let mut prefix = Vec::with_capacity(k);
        for _ in 0..k {
            let total: f64 = weights.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = None;
            for (item, &w) in weights.iter().enumerate() {
                if w > 0.0 {
                    u -= w;
                    if u <= 0.0 {
                        chosen = Some(item);
                        break;
                    }
                }
            }
            // Guard against running off the end through rounding.
            let item = chosen.unwrap_or_else(|| {
                weights.iter().rposition(|&w| w > 0.0).expect("positive weight remains")
            });
            prefix.push(item);
            weights[item] = 0.0;
        }
        TopKList::new(prefix, c)
    }
}

/// Stagewise top-K Plackett-Luce log-probability for the given log weights.
pub(crate) fn pl_log_prob_from_theta(theta: &[f64], t: &TopKList) -> Result<f64> {
    let c = theta.len();
    if c != t.universe_size() {
        return Err(Error::Dimension(format!(
            "model has {c} items but list is over {}",
            t.universe_size()
        )));
    }
    let mut placed = vec![false; c];
    let mut remaining: Vec<f64> = theta.to_vec();
    let mut log_prob = 0.0;
    for &item in t.prefix() {
        remaining.clear();
        remaining.extend((0..c).filter(|&u| !placed[u]).map(|u| theta[u]));
        log_prob += theta[item] - log_sum_exp(&remaining);
        placed[item] = true;
    }
    Ok(log_prob)
}

/// Mallows model over top-K lists: probability proportional to
/// `exp(-lambda * displacement from the mode)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MallowsModel {
    mode: Ranking,
    spread: f64,
    k: usize,
}

impl MallowsModel {
    pub fn new(mode: Ranking, spread: f64, k: usize) -> Result<Self> {
        if spread < 0.0 || !spread.is_finite() {
            return Err(Error::Domain(format!("spread must be finite and >= 0, got {spread}")));
        }
        if k == 0 || k > mode.len() {
            return Err(Error::Argument(format!(
                "K = {k} must satisfy 1 <= K <= C = {}",
                mode.len()
            )));
        }
        Ok(Self { mode, spread, k })
    }

    pub fn mode(&self) -> &Ranking {
        &self.mode
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn universe_size(&self) -> usize {
        self.mode.len()
    }

    pub fn log_prob(&self, t: &TopKList) -> Result<f64> {
        if t.universe_size() != self.universe_size() {
            return Err(Error::Dimension(format!(
                "model is over {} items but list is over {}",
                self.universe_size(),
                t.universe_size()
            )));
        }
        if t.k() != self.k {
            return Err(Error::Dimension(format!(
                "model K = {} but list K = {}",
                self.k,
                t.k()
            )));
        }
        let stat = mallows_statistic(t, &self.mode)? as f64;
        Ok(-self.spread * stat - mallows_log_phi(self.spread, self.universe_size(), self.k)?)
    }

    /// Draws a full ranking exactly, via the stagewise displacement
    /// factorization: each stage's displacement is an independent truncated
    /// geometric, and the ranking is rebuilt by choosing the displacement-th
    /// smallest remaining mode position at each stage.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Ranking {
        let c = self.universe_size();
        let q = (-self.spread).exp();
        // Remaining mode positions, 0-based, kept sorted ascending.
        let mut remaining: Vec<usize> = (0..c).collect();
        let mut order = Vec::with_capacity(c);
        for stage in 0..c {
            let m = c - stage;
            let displacement = sample_truncated_geometric(q, m, rng);
            let label = remaining.remove(displacement);
            order.push(self.mode.item_at(label + 1));
        }
        Ranking::from_order(order).expect("sampled order is a permutation")
    }
}

/// Draws r in {0..m-1} with probability proportional to q^r.
fn sample_truncated_geometric<R: Rng + ?Sized>(q: f64, m: usize, rng: &mut R) -> usize {
    let mut weights = Vec::with_capacity(m);
    let mut w = 1.0;
    let mut total = 0.0;
    for _ in 0..m {
        weights.push(w);
        total += w;
        w *= q;
    }
    let mut u = rng.gen::<f64>() * total;
    for (r, &w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return r;
        }
    }
    m - 1
}

/// Sum of the first K stagewise displacements of `t` relative to `mode`.
///
/// Stage j's displacement counts the items ranked after position j by `t`
/// (including all items outside the prefix) that the mode places above the
/// item `t` puts at position j. For K = C this equals the Kendall distance
/// between the list and the mode.
pub fn mallows_statistic(t: &TopKList, mode: &Ranking) -> Result<usize> {
    if t.universe_size() != mode.len() {
        return Err(Error::Dimension(format!(
            "list is over {} items but mode is over {}",
            t.universe_size(),
            mode.len()
        )));
    }
    let mut placed_labels: Vec<usize> = Vec::with_capacity(t.k());
    let mut total = 0;
    for &item in t.prefix() {
        let label = mode.position(item); // 1-based
        let smaller_placed = placed_labels.iter().filter(|&&l| l < label).count();
        total += (label - 1) - smaller_placed;
        placed_labels.push(label);
    }
    Ok(total)
}

/// Log of the closed-form Mallows top-K normalizer
/// `prod_{j=1..K} (1 - exp(-(C-j+1) lambda)) / (1 - exp(-lambda))`,
/// evaluated as its limit `log(C!/(C-K)!)` at lambda = 0.
pub fn mallows_log_phi(lambda: f64, c: usize, k: usize) -> Result<f64> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if k == 0 || k > c {
        return Err(Error::Argument(format!("K = {k} must satisfy 1 <= K <= C = {c}")));
    }
    if lambda == 0.0 {
        return Ok((0..k).map(|j| ((c - j) as f64).ln()).sum());
    }
    let log_denom = (-(-lambda).exp_m1()).ln();
    let mut total = 0.0;
    for j in 1..=k {
        let m = (c - j + 1) as f64;
        total += (-(-m * lambda).exp_m1()).ln() - log_denom;
    }
    Ok(total)
}

/// Babington-Smith model parameterized by log pairwise preference odds
/// with the reciprocal convention `log v_ji = -log v_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct BabingtonSmithModel {
    log_pair_weights: PairwiseScores,
}

impl BabingtonSmithModel {
    pub fn new(log_pair_weights: PairwiseScores) -> Self {
        Self { log_pair_weights }
    }

    pub fn universe_size(&self) -> usize {
        self.log_pair_weights.universe_size()
    }

    pub fn log_pair_weights(&self) -> &PairwiseScores {
        &self.log_pair_weights
    }

    /// Unnormalized log-probability of a top-K list. The normalizer has no
    /// known closed form, so only differences between lists are meaningful.
    pub fn log_score(&self, t: &TopKList) -> Result<f64> {
        bs_log_score_from_pairs(&self.log_pair_weights, t)
    }
}

pub(crate) fn bs_log_score_from_pairs(pairs: &PairwiseScores, t: &TopKList) -> Result<f64> {
    let c = pairs.universe_size();
    if c != t.universe_size() {
        return Err(Error::Dimension(format!(
            "model has {c} items but list is over {}",
            t.universe_size()
        )));
    }
    let mut placed = vec![false; c];
    let mut total = 0.0;
    for &item in t.prefix() {
        placed[item] = true;
        for later in (0..c).filter(|&u| !placed[u]) {
            total += pairs.get(item, later);
        }
    }
    Ok(total)
}
