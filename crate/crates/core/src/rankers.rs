//! Rankers built from pre-trained classifier scores, with no retraining.
//!
//! Per-class scores plug into the Plackett-Luce model (weight `exp(f_i)`),
//! pairwise scores into the Babington-Smith model (odds `exp(f_ij)`), so a
//! classifier's real-valued confidences give a probability for any top-K
//! list. A deterministic companion turns pairwise scores into a single
//! ranking by Copeland counting, which coincides with the induced total
//! order whenever the pairwise comparisons are transitive.

use crate::error::Result;
use crate::models::{bs_log_score_from_pairs, pl_log_prob_from_theta};
use crate::ranking::{PairwiseScores, Ranking, ScoreVector, TopKList};

/// Log-probability of a top-K list under the Plackett-Luce ranker with
/// weights `exp(f_i)`. For K = 1 this is exactly the log-softmax of the
/// scores.
pub fn pl_ranker_log_prob(scores: &ScoreVector, t: &TopKList) -> Result<f64> {
    pl_log_prob_from_theta(scores.scores(), t)
}

/// Unnormalized log-score of a top-K list under the Babington-Smith ranker
/// with pairwise odds `exp(f_ij)`. Only differences between lists evaluated
/// at the same input are meaningful.
pub fn bs_ranker_log_score(scores: &PairwiseScores, t: &TopKList) -> Result<f64> {
    bs_log_score_from_pairs(scores, t)
}

/// Deterministic ranking from one-vs-one scores by Copeland counting.
///
/// Items sort by descending number of pairwise wins (`f_ij > 0` is a win for
/// `i`), then by descending total score, then by ascending index. When the
/// pairwise relation is transitive this reproduces the unique compatible
/// total order; cycles fall through to the documented tie path.
pub fn deterministic_rank_ovo(scores: &PairwiseScores) -> Ranking {
    let c = scores.universe_size();
    let mut wins = vec![0usize; c];
    let mut totals = vec![0.0f64; c];
    for i in 0..c {
        for j in 0..c {
            if i != j {
                let s = scores.get(i, j);
                if s > 0.0 {
                    wins[i] += 1;
                }
                totals[i] += s;
            }
        }
    }
    let mut idx: Vec<usize> = (0..c).collect();
    idx.sort_by(|&i, &j| {
        wins[j]
            .cmp(&wins[i])
            .then(totals[j].partial_cmp(&totals[i]).expect("finite scores"))
            .then(i.cmp(&j))
    });
    Ranking::from_order(idx).expect("sorted indices form a ranking")
}
