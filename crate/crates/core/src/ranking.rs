//! Rankings, top-K lists, and distances between them.
//!
//! Items are 0-indexed; positions are 1-indexed, so `position(i)` of the
//! top-ranked item is 1. A [`TopKList`] keeps only the first K positions of a
//! ranking over a universe of `C` items; the order of the remaining `C - K`
//! items is unspecified.
//!
//! Two top-K distances are provided: [`hausdorff_topk_oracle`], the reference
//! semantics computed by brute force over all full-ranking completions, and
//! [`kendall_topk_distance`], a closed form that agrees with the oracle (this
//! is checked exhaustively in tests for every list pair up to C = 6).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on how many lists an exhaustive enumeration may yield.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Largest universe for which factorial completion enumeration is allowed.
const ORACLE_UNIVERSE_CAP: usize = 8;

/// A total order of `C` items, stored highest-ranked first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ranking {
    order: Vec<usize>,
    // positions[i] = 0-based position of item i; kept so position lookups are O(1)
    positions: Vec<usize>,
}

impl Ranking {
    /// Builds a ranking from the items listed highest-ranked first.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let c = order.len();
        if c == 0 {
            return Err(Error::Argument("ranking must contain at least one item".into()));
        }
        let mut positions = vec![usize::MAX; c];
        for (pos, &item) in order.iter().enumerate() {
            if item >= c {
                return Err(Error::Argument(format!(
                    "item {item} out of range for universe of {c}"
                )));
            }
            if positions[item] != usize::MAX {
                return Err(Error::Argument(format!("item {item} appears more than once")));
            }
            positions[item] = pos;
        }
        Ok(Self { order, positions })
    }

    /// The identity ranking `0, 1, ..., c-1`.
    pub fn identity(c: usize) -> Self {
        Self {
            order: (0..c).collect(),
            positions: (0..c).collect(),
        }
    }

    /// Universe size C.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Items in rank order (highest first).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// 1-based position of `item`.
    pub fn position(&self, item: usize) -> usize {
        self.positions[item] + 1
    }

    /// Item at 1-based `position`.
    pub fn item_at(&self, position: usize) -> usize {
        self.order[position - 1]
    }

    /// The first `k` positions as a top-K list.
    pub fn top_k(&self, k: usize) -> Result<TopKList> {
        TopKList::new(self.order[..k.min(self.order.len())].to_vec(), self.len())
    }
}

impl TryFrom<Vec<usize>> for Ranking {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Self::from_order(order)
    }
}

impl From<Ranking> for Vec<usize> {
    fn from(r: Ranking) -> Self {
        r.order
    }
}

/// The first K positions of a ranking over `universe_size` items.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TopKList {
    prefix: Vec<usize>,
    universe_size: usize,
}

impl TopKList {
    pub fn new(prefix: Vec<usize>, universe_size: usize) -> Result<Self> {
        let k = prefix.len();
        if k == 0 || k > universe_size {
            return Err(Error::Argument(format!(
                "top-K length {k} must satisfy 1 <= K <= C = {universe_size}"
            )));
        }
        let mut seen = vec![false; universe_size];
        for &item in &prefix {
            if item >= universe_size {
                return Err(Error::Argument(format!(
                    "item {item} out of range for universe of {universe_size}"
                )));
            }
            if seen[item] {
                return Err(Error::Argument(format!("item {item} appears more than once")));
            }
            seen[item] = true;
        }
        Ok(Self { prefix, universe_size })
    }

    pub fn k(&self) -> usize {
        self.prefix.len()
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    /// Items in rank order (highest first).
    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    /// Truncates to the first `k` positions (no-op if already shorter).
    pub fn truncate(&self, k: usize) -> Result<Self> {
        Self::new(self.prefix[..k.min(self.k())].to_vec(), self.universe_size)
    }

    /// Converts back to a full ranking; requires K = C.
    pub fn to_ranking(&self) -> Result<Ranking> {
        if self.k() != self.universe_size {
            return Err(Error::Dimension(format!(
                "only a complete list converts to a ranking (K = {}, C = {})",
                self.k(),
                self.universe_size
            )));
        }
        Ranking::from_order(self.prefix.clone())
    }

    /// 1-based positions of prefix items; `None` for items outside the prefix.
    fn position_map(&self) -> Vec<Option<usize>> {
        let mut map = vec![None; self.universe_size];
        for (pos, &item) in self.prefix.iter().enumerate() {
            map[item] = Some(pos + 1);
        }
        map
    }
}

/// Real-valued per-item classifier confidences.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
}

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Argument("score vector must be non-empty".into()));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::Argument("score vector entries must be finite".into()));
        }
        Ok(Self { scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}

/// Antisymmetric pairwise scores: `get(i, j) = -get(j, i)`.
///
/// Only the upper triangle (i < j) is stored; the reciprocal convention holds
/// by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseScores {
    upper: Vec<f64>,
    universe_size: usize,
}

impl PairwiseScores {
    /// Builds from the upper triangle in row-major order:
    /// `(0,1), (0,2), ..., (0,C-1), (1,2), ...`.
    pub fn new(universe_size: usize, upper: Vec<f64>) -> Result<Self> {
        let expected = universe_size * universe_size.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} upper-triangular scores for C = {universe_size}, got {}",
                upper.len()
            )));
        }
        if upper.iter().any(|s| !s.is_finite()) {
            return Err(Error::Argument("pairwise scores must be finite".into()));
        }
        Ok(Self { upper, universe_size })
    }

    /// Builds by evaluating `f(i, j)` for every i < j.
    pub fn from_fn(universe_size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut upper = Vec::with_capacity(universe_size * universe_size.saturating_sub(1) / 2);
        for i in 0..universe_size {
            for j in i + 1..universe_size {
                upper.push(f(i, j));
            }
        }
        Self::new(universe_size, upper)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    fn tri_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.universe_size);
        i * self.universe_size - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Score favoring `i` over `j`; antisymmetric, zero is indifference.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < j {
            self.upper[self.tri_index(i, j)]
        } else {
            -self.upper[self.tri_index(j, i)]
        }
    }
}

fn check_same_universe(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("universe sizes differ: {a} vs {b}")));
    }
    Ok(())
}

/// Number of item pairs the two rankings order oppositely.
///
/// Symmetric, satisfies the metric axioms, and is at most C(C-1)/2.
pub fn kendall_distance(a: &Ranking, b: &Ranking) -> Result<usize> {
    check_same_universe(a.len(), b.len())?;
    let c = a.len();
    let mut discordant = 0;
    for i in 0..c {
        for j in i + 1..c {
            if (a.position(i) < a.position(j)) != (b.position(i) < b.position(j)) {
                discordant += 1;
            }
        }
    }
    Ok(discordant)
}

/// All full rankings whose first K positions equal the given list,
/// in lexicographic order of the appended tail.
fn completions(t: &TopKList) -> Vec<Ranking> {
    let c = t.universe_size();
    let in_prefix = t.position_map();
    let rest: Vec<usize> = (0..c).filter(|&i| in_prefix[i].is_none()).collect();
    let mut out = Vec::new();
    let mut tail = Vec::with_capacity(rest.len());
    let mut used = vec![false; rest.len()];
    fn recurse(
        prefix: &[usize],
        rest: &[usize],
        used: &mut [bool],
        tail: &mut Vec<usize>,
        out: &mut Vec<Ranking>,
    ) {
        if tail.len() == rest.len() {
            let mut order = prefix.to_vec();
            order.extend_from_slice(tail);
            out.push(Ranking::from_order(order).expect("completion is a valid ranking"));
            return;
        }
        for idx in 0..rest.len() {
            if !used[idx] {
                used[idx] = true;
                tail.push(rest[idx]);
                recurse(prefix, rest, used, tail, out);
                tail.pop();
                used[idx] = false;
            }
        }
    }
    recurse(t.prefix(), &rest, &mut used, &mut tail, &mut out);
    out
}

/// Hausdorff Kendall distance between two top-K lists, by brute force.
///
/// Enumerates every full-ranking completion of each list and takes the
/// max-min Kendall distance in both directions. This is the reference
/// semantics for top-K comparison; it is limited to small universes.
pub fn hausdorff_topk_oracle(a: &TopKList, b: &TopKList) -> Result<usize> {
    check_same_universe(a.universe_size(), b.universe_size())?;
    if a.k() != b.k() {
        return Err(Error::Dimension(format!("K differs: {} vs {}", a.k(), b.k())));
    }
    let c = a.universe_size();
    if c > ORACLE_UNIVERSE_CAP {
        return Err(Error::Capacity(format!(
            "completion enumeration limited to C <= {ORACLE_UNIVERSE_CAP}, got {c}"
        )));
    }
    let comps_a = completions(a);
    let comps_b = completions(b);
    let directed = |from: &[Ranking], to: &[Ranking]| -> Result<usize> {
        let mut worst = 0;
        for fa in from {
            let mut best = usize::MAX;
            for fb in to {
                best = best.min(kendall_distance(fa, fb)?);
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    Ok(directed(&comps_a, &comps_b)?.max(directed(&comps_b, &comps_a)?))
}

/// Hausdorff Kendall distance between two top-K lists, in closed form.
///
/// Splits the universe into items ranked by both lists (counted as ordinary
/// discordant pairs), items each list ranks that the other does not (a
/// position-sum correction), and items ranked by neither (which contribute
/// through the correction term only). Agrees with [`hausdorff_topk_oracle`]
/// on all pairs, and with [`kendall_distance`] when K = C.
pub fn kendall_topk_distance(a: &TopKList, b: &TopKList) -> Result<usize> {
    check_same_universe(a.universe_size(), b.universe_size())?;
    if a.k() != b.k() {
        return Err(Error::Dimension(format!("K differs: {} vs {}", a.k(), b.k())));
    }
    let c = a.universe_size();
    let k = a.k();
    let pos_a = a.position_map();
    let pos_b = b.position_map();

    // Discordant pairs among items in both prefixes.
    let both: Vec<usize> = (0..c)
        .filter(|&i| pos_a[i].is_some() && pos_b[i].is_some())
        .collect();
    let mut discordant: u64 = 0;
    for (n, &i) in both.iter().enumerate() {
        for &j in &both[n + 1..] {
            if (pos_a[i] < pos_a[j]) != (pos_b[i] < pos_b[j]) {
                discordant += 1;
            }
        }
    }

    // Items only one list ranks: each contributes through its known position.
    let only_a_pos_sum: u64 = (0..c)
        .filter(|&i| pos_b[i].is_none())
        .filter_map(|i| pos_a[i])
        .map(|p| p as u64)
        .sum();
    let only_b_pos_sum: u64 = (0..c)
        .filter(|&i| pos_a[i].is_none())
        .filter_map(|i| pos_b[i])
        .map(|p| p as u64)
        .sum();
    let exclusive = (k - both.len()) as u64;

    let total = discordant + exclusive * (c as u64 + k as u64)
        - exclusive * exclusive.saturating_sub(1) / 2
        - only_a_pos_sum
        - only_b_pos_sum;
    Ok(total as usize)
}

/// Ranks items by descending score; ties go to the lower item index.
pub fn ranking_from_scores(s: &ScoreVector) -> Ranking {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&i, &j| {
        s.scores()[j]
            .partial_cmp(&s.scores()[i])
            .expect("scores are finite")
            .then(i.cmp(&j))
    });
    Ranking::from_order(idx).expect("sorted indices form a ranking")
}

/// Ranks items by ascending mean position over the given rankings;
/// ties go to the lower item index.
pub fn borda_mean_ranking(rankings: &[Ranking]) -> Result<Ranking> {
    let first = rankings
        .first()
        .ok_or_else(|| Error::Argument("borda aggregation needs at least one ranking".into()))?;
    let c = first.len();
    let mut mean = vec![0.0f64; c];
    for r in rankings {
        check_same_universe(c, r.len())?;
        for item in 0..c {
            mean[item] += r.position(item) as f64;
        }
    }
    for m in &mut mean {
        *m /= rankings.len() as f64;
    }
    let mut idx: Vec<usize> = (0..c).collect();
    idx.sort_by(|&i, &j| mean[i].partial_cmp(&mean[j]).expect("finite means").then(i.cmp(&j)));
    Ranking::from_order(idx)
}

/// Number of distinct top-K lists over C items: C! / (C-K)!.
pub fn num_topk_lists(c: usize, k: usize) -> u128 {
    ((c - k + 1)..=c).map(|v| v as u128).product()
}

/// Iterator over every top-K list, in lexicographic prefix order.
pub struct TopKEnumerator {
    c: usize,
    k: usize,
    prefix: Vec<usize>,
    exhausted: bool,
    started: bool,
}

impl Iterator for TopKEnumerator {
    type Item = TopKList;

    fn next(&mut self) -> Option<TopKList> {
        if self.exhausted {
            return None;
        }
        if !self.started {
            self.started = true;
            self.prefix = (0..self.k).collect();
            return Some(TopKList::new(self.prefix.clone(), self.c).expect("valid prefix"));
        }
        // Bump the rightmost slot that still has an unused larger item, then
        // refill everything to its right with the smallest unused items.
        let mut used = vec![false; self.c];
        for &item in &self.prefix {
            used[item] = true;
        }
        let mut slot = self.k;
        loop {
            if slot == 0 {
                self.exhausted = true;
                return None;
            }
            slot -= 1;
            let current = self.prefix[slot];
            used[current] = false;
            if let Some(next_item) = (current + 1..self.c).find(|&v| !used[v]) {
                used[next_item] = true;
                self.prefix[slot] = next_item;
                let mut fill = slot + 1;
                let mut candidate = 0;
                while fill < self.k {
                    while used[candidate] {
                        candidate += 1;
                    }
                    used[candidate] = true;
                    self.prefix[fill] = candidate;
                    fill += 1;
                }
                return Some(TopKList::new(self.prefix.clone(), self.c).expect("valid prefix"));
            }
        }
    }
}

/// Enumerates all C!/(C-K)! top-K lists under the default cap.
pub fn enumerate_topk(c: usize, k: usize) -> Result<TopKEnumerator> {
    enumerate_topk_capped(c, k, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates all top-K lists, failing if the count exceeds `cap`.
pub fn enumerate_topk_capped(c: usize, k: usize, cap: u128) -> Result<TopKEnumerator> {
    if k == 0 || k > c {
        return Err(Error::Argument(format!("K = {k} must satisfy 1 <= K <= C = {c}")));
    }
    let count = num_topk_lists(c, k);
    if count > cap {
        return Err(Error::Capacity(format!(
            "enumeration of {count} top-{k} lists over {c} items exceeds cap {cap}"
        )));
    }
    Ok(TopKEnumerator {
        c,
        k,
        prefix: Vec::new(),
        exhausted: false,
        started: false,
    })
}
