//! Fitness machinery: dissimilarities, motif representatives, clustering
//! validity indices, and the goodness function the search minimizes.
//!
//! Invalid candidates (overlapping segments, duplicate representatives)
//! score `+inf`, the absorbing worst value, so every candidate is scoreable.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::solution::{some_overlap, Solution};
use crate::timeseries::{Segment, TimeSeries};

/// Pairwise segment dissimilarity. Implementations must be symmetric,
/// zero on identical inputs, and finite on finite inputs; the triangle
/// inequality is not required.
pub trait Dissimilarity: Send + Sync {
    fn evaluate(&self, a: &Segment, b: &Segment) -> f64;
    fn name(&self) -> &str;
}

/// Sum of squared differences over all samples and dimensions.
#[derive(Clone, Copy, Debug, Default)]
pub struct SquaredEuclidean;

impl Dissimilarity for SquaredEuclidean {
    fn evaluate(&self, a: &Segment, b: &Segment) -> f64 {
        sq_euclidean(a, b)
    }

    fn name(&self) -> &str {
        "squared_euclidean"
    }
}

/// Squared Euclidean distance between two segments of identical shape.
pub fn sq_euclidean(a: &Segment, b: &Segment) -> f64 {
    assert_eq!(a.len(), b.len(), "segment lengths differ");
    assert_eq!(a.dims(), b.dims(), "segment dimensions differ");
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Mean dissimilarity from `y` to every member of `group`.
pub fn mean_dissim(y: &Segment, group: &[Segment], dissim: &dyn Dissimilarity) -> f64 {
    assert!(!group.is_empty(), "mean dissimilarity over an empty group");
    group.iter().map(|x| dissim.evaluate(y, x)).sum::<f64>() / group.len() as f64
}

/// Sample-wise, dimension-wise mean of a group of equal-length segments.
pub fn motif_mean(group: &[Segment]) -> Segment {
    assert!(!group.is_empty(), "mean of an empty group");
    let len = group[0].len();
    let dims = group[0].dims();
    for seg in group {
        assert_eq!(seg.len(), len, "group segments must share a length");
        assert_eq!(seg.dims(), dims, "group segments must share dimensions");
    }
    let mut values = vec![0.0; len * dims];
    for seg in group {
        for (acc, v) in values.iter_mut().zip(seg.values()) {
            *acc += v;
        }
    }
    let scale = 1.0 / group.len() as f64;
    for v in &mut values {
        *v *= scale;
    }
    Segment::from_values(values, dims)
}

/// Index of the group member minimizing the dissimilarity sum to all
/// members (self-distance contributes zero). Ties go to the lowest index.
pub fn motif_medoid_index(group: &[Segment], dissim: &dyn Dissimilarity) -> usize {
    assert!(!group.is_empty(), "medoid of an empty group");
    let mut best = 0;
    let mut best_sum = f64::INFINITY;
    for (i, candidate) in group.iter().enumerate() {
        let sum: f64 = group.iter().map(|x| dissim.evaluate(x, candidate)).sum();
        if sum < best_sum {
            best_sum = sum;
            best = i;
        }
    }
    best
}

/// The medoid member itself.
pub fn motif_medoid<'a>(group: &'a [Segment], dissim: &dyn Dissimilarity) -> &'a Segment {
    &group[motif_medoid_index(group, dissim)]
}

/// `k` disjoint groups of `s` preprocessed segments of identical length.
#[derive(Clone, Debug)]
pub struct SegmentGroupSet {
    groups: Vec<Vec<Segment>>,
}

impl SegmentGroupSet {
    /// Validates group shape: equal support everywhere, one shared segment
    /// length and dimensionality.
    pub fn new(groups: Vec<Vec<Segment>>) -> Result<Self> {
        use crate::error::Error;
        if groups.is_empty() || groups[0].is_empty() {
            return Err(Error::InvalidParameter(
                "group set needs at least one non-empty group".into(),
            ));
        }
        let support = groups[0].len();
        let len = groups[0][0].len();
        let dims = groups[0][0].dims();
        for group in &groups {
            if group.len() != support {
                return Err(Error::InvalidParameter(
                    "groups must share the same support".into(),
                ));
            }
            for seg in group {
                if seg.len() != len || seg.dims() != dims {
                    return Err(Error::InvalidParameter(
                        "group segments must share length and dimensions".into(),
                    ));
                }
            }
        }
        Ok(SegmentGroupSet { groups })
    }

    pub fn motif_count(&self) -> usize {
        self.groups.len()
    }

    pub fn support(&self) -> usize {
        self.groups[0].len()
    }

    pub fn group(&self, i: usize) -> &[Segment] {
        &self.groups[i]
    }

    pub fn groups(&self) -> &[Vec<Segment>] {
        &self.groups
    }
}

/// Which clustering validity index scores a grouping. Both are minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityIndex {
    DaviesBouldin,
    Silhouette,
}

impl fmt::Display for ValidityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityIndex::DaviesBouldin => write!(f, "davies_bouldin"),
            ValidityIndex::Silhouette => write!(f, "silhouette"),
        }
    }
}

/// How a group of segments is reduced to one representative series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representative {
    Mean,
    Medoid,
}

impl fmt::Display for Representative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representative::Mean => write!(f, "mean"),
            Representative::Medoid => write!(f, "medoid"),
        }
    }
}

/// Representative of one group under the configured central tendency.
pub fn representative(
    group: &[Segment],
    rep: Representative,
    dissim: &dyn Dissimilarity,
) -> Segment {
    match rep {
        Representative::Mean => motif_mean(group),
        Representative::Medoid => motif_medoid(group, dissim).clone(),
    }
}

/// Davies-Bouldin index of a grouping: mean over groups of the worst
/// (spread_i + spread_j) / distance(rep_i, rep_j) ratio. Lower is better.
/// Coinciding representatives make the grouping degenerate and score `+inf`.
pub fn davies_bouldin(
    groups: &SegmentGroupSet,
    dissim: &dyn Dissimilarity,
    rep: Representative,
) -> f64 {
    let k = groups.motif_count();
    assert!(k >= 2, "davies_bouldin needs at least two groups");
    let reps: Vec<Segment> = (0..k)
        .map(|i| representative(groups.group(i), rep, dissim))
        .collect();
    let spreads: Vec<f64> = (0..k)
        .map(|i| mean_dissim(&reps[i], groups.group(i), dissim))
        .collect();

    let mut separations = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let d = dissim.evaluate(&reps[i], &reps[j]);
            if d == 0.0 {
                return f64::INFINITY;
            }
            separations[i][j] = d;
            separations[j][i] = d;
        }
    }

    let mut total = 0.0;
    for i in 0..k {
        let worst = (0..k)
            .filter(|&j| j != i)
            .map(|j| (spreads[i] + spreads[j]) / separations[i][j])
            .fold(f64::NEG_INFINITY, f64::max);
        total += worst;
    }
    total / k as f64
}

/// Silhouette-style index of a grouping, folded so that lower is better
/// (range `[0, 2]`).
///
/// For each segment, `a` is the mean dissimilarity to its own group
/// (including its zero self-distance) and `b` is the mean dissimilarity to
/// the pool of all segments outside its group. Summands with
/// `max(a, b) = 0` contribute zero.
pub fn silhouette_index(groups: &SegmentGroupSet, dissim: &dyn Dissimilarity) -> f64 {
    let k = groups.motif_count();
    let s = groups.support();
    assert!(k >= 2, "silhouette_index needs at least two groups");

    let mut acc = 0.0;
    for gi in 0..k {
        for u in 0..s {
            let x = &groups.group(gi)[u];
            let own = mean_dissim(x, groups.group(gi), dissim);
            let mut other_sum = 0.0;
            let mut other_count = 0usize;
            for gj in 0..k {
                if gj == gi {
                    continue;
                }
                for y in groups.group(gj) {
                    other_sum += dissim.evaluate(x, y);
                    other_count += 1;
                }
            }
            let other = other_sum / other_count as f64;
            let denom = own.max(other);
            if denom > 0.0 {
                acc += (other - own) / denom;
            }
        }
    }
    1.0 - acc / (k * s) as f64
}

/// Full fitness configuration: index, representative, dissimilarity,
/// preprocessing, and the overlap rule.
#[derive(Clone)]
pub struct FitnessConfig {
    pub index: ValidityIndex,
    pub representative: Representative,
    pub dissimilarity: Arc<dyn Dissimilarity>,
    pub znorm: bool,
    pub overlap_tolerance: f64,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        FitnessConfig {
            index: ValidityIndex::DaviesBouldin,
            representative: Representative::Mean,
            dissimilarity: Arc::new(SquaredEuclidean),
            znorm: true,
            overlap_tolerance: 0.0,
        }
    }
}

impl fmt::Debug for FitnessConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FitnessConfig")
            .field("index", &self.index)
            .field("representative", &self.representative)
            .field("dissimilarity", &self.dissimilarity.name())
            .field("znorm", &self.znorm)
            .field("overlap_tolerance", &self.overlap_tolerance)
            .finish()
    }
}

/// Gene indices grouped into motifs: stable sort by grouping indicator
/// (ties keep gene order), then chunks of `s` consecutive sorted positions.
pub fn group_genes(solution: &Solution, s: usize) -> Vec<Vec<usize>> {
    assert!(s >= 1 && solution.len() % s == 0, "gene count must be k*s");
    let mut order: Vec<usize> = (0..solution.len()).collect();
    order.sort_by(|&a, &b| {
        solution.genes[a]
            .indicator
            .total_cmp(&solution.genes[b].indicator)
    });
    order.chunks(s).map(|chunk| chunk.to_vec()).collect()
}

/// Extracts every gene's segment, upsamples to `l_max`, and optionally
/// z-normalizes. Fails if a gene falls outside the series.
pub fn preprocess_segments(
    series: &TimeSeries,
    solution: &Solution,
    l_max: usize,
    znorm: bool,
) -> Result<Vec<Segment>> {
    solution
        .genes
        .iter()
        .map(|gene| {
            let seg = series.segment(gene.start, gene.length)?.upsample(l_max)?;
            Ok(if znorm { seg.znormalize() } else { seg })
        })
        .collect()
}

/// Goodness of a solution (lower is better): the overlap gate, segment
/// preprocessing, indicator-sorted grouping, and the configured index.
/// Overlapping solutions score `+inf` without touching the series.
pub fn goodness(
    series: &TimeSeries,
    solution: &Solution,
    config: &FitnessConfig,
    l_max: usize,
    s: usize,
) -> f64 {
    assert!(
        s >= 1 && solution.len() % s == 0,
        "solution must hold k*s genes"
    );
    if some_overlap(solution, config.overlap_tolerance) {
        return f64::INFINITY;
    }
    let segments = preprocess_segments(series, solution, l_max, config.znorm)
        .expect("solution contains out-of-bounds genes");
    let grouping = group_genes(solution, s);

    let mut slots: Vec<Option<Segment>> = segments.into_iter().map(Some).collect();
    let groups: Vec<Vec<Segment>> = grouping
        .iter()
        .map(|idx| {
            idx.iter()
                .map(|&i| slots[i].take().expect("gene grouped twice"))
                .collect()
        })
        .collect();
    let group_set = SegmentGroupSet::new(groups).expect("grouping produced a malformed group set");

    match config.index {
        ValidityIndex::DaviesBouldin => {
            davies_bouldin(&group_set, config.dissimilarity.as_ref(), config.representative)
        }
        ValidityIndex::Silhouette => silhouette_index(&group_set, config.dissimilarity.as_ref()),
    }
}

/// log10 of the number of candidate solutions: C(n*r, k*s) with
/// r = l_max + 1 - l_min, evaluated through log-gamma so huge counts stay
/// representable.
pub fn search_space_log10(n: usize, l_min: usize, l_max: usize, k: usize, s: usize) -> f64 {
    assert!(l_min >= 1 && l_min <= l_max, "invalid length range");
    let r = l_max + 1 - l_min;
    let m = (n * r) as f64;
    let t = (k * s) as f64;
    assert!(m >= t, "fewer candidate segments than k*s");
    (libm::lgamma(m + 1.0) - libm::lgamma(t + 1.0) - libm::lgamma(m - t + 1.0)) / std::f64::consts::LN_10
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::Gene;
    use approx::assert_abs_diff_eq;

    fn seg(values: &[f64]) -> Segment {
        Segment::univariate(values.to_vec())
    }

    #[test]
    fn sq_euclidean_examples() {
        let x = seg(&[1.0, 2.0, 3.0]);
        assert_eq!(sq_euclidean(&x, &x), 0.0);
        assert_eq!(sq_euclidean(&seg(&[0.0, 0.0]), &seg(&[1.0, 1.0])), 2.0);
        let a = Segment::from_values(vec![0.0, 0.0, 0.0, 0.0], 2);
        let b = Segment::from_values(vec![1.0, 3.0, 2.0, 4.0], 2);
        assert_eq!(sq_euclidean(&a, &b), 30.0);
    }

    #[test]
    #[should_panic(expected = "lengths differ")]
    fn sq_euclidean_rejects_shape_mismatch() {
        sq_euclidean(&seg(&[1.0]), &seg(&[1.0, 2.0]));
    }

    #[test]
    fn mean_dissim_examples() {
        let y = seg(&[0.0]);
        assert_eq!(mean_dissim(&y, &[y.clone()], &SquaredEuclidean), 0.0);
        let group = vec![seg(&[1.0]), seg(&[3.0])];
        assert_eq!(mean_dissim(&y, &group, &SquaredEuclidean), 5.0);

        struct Constant;
        impl Dissimilarity for Constant {
            fn evaluate(&self, _: &Segment, _: &Segment) -> f64 {
                3.0
            }
            fn name(&self) -> &str {
                "constant"
            }
        }
        assert_eq!(mean_dissim(&y, &group, &Constant), 3.0);
    }

    #[test]
    fn motif_mean_examples() {
        let single = vec![seg(&[4.0, 2.0])];
        assert_eq!(motif_mean(&single), single[0]);
        let pair = vec![seg(&[0.0, 0.0]), seg(&[2.0, 4.0])];
        assert_eq!(motif_mean(&pair).dim_values(0), &[1.0, 2.0]);
        let same = vec![seg(&[7.0, 1.0]); 3];
        assert_eq!(motif_mean(&same).dim_values(0), &[7.0, 1.0]);
    }

    #[test]
    fn medoid_minimizes_distance_sum() {
        // Distance sums: [0] -> 101, [1] -> 82, [10] -> 181.
        let group = vec![seg(&[0.0]), seg(&[1.0]), seg(&[10.0])];
        assert_eq!(motif_medoid_index(&group, &SquaredEuclidean), 1);
        let single = vec![seg(&[5.0])];
        assert_eq!(motif_medoid_index(&single, &SquaredEuclidean), 0);
        let tied = vec![seg(&[2.0]); 4];
        assert_eq!(motif_medoid_index(&tied, &SquaredEuclidean), 0);
    }

    fn group_set(groups: Vec<Vec<Segment>>) -> SegmentGroupSet {
        SegmentGroupSet::new(groups).unwrap()
    }

    #[test]
    fn davies_bouldin_zero_spread() {
        let g = group_set(vec![
            vec![seg(&[0.0]), seg(&[0.0])],
            vec![seg(&[10.0]), seg(&[10.0])],
        ]);
        assert_eq!(
            davies_bouldin(&g, &SquaredEuclidean, Representative::Mean),
            0.0
        );
    }

    #[test]
    fn davies_bouldin_hand_computed() {
        // Representatives [1] and [11]; spreads 1 and 1; separation 100.
        let g = group_set(vec![
            vec![seg(&[0.0]), seg(&[2.0])],
            vec![seg(&[10.0]), seg(&[12.0])],
        ]);
        let idb = davies_bouldin(&g, &SquaredEuclidean, Representative::Mean);
        assert_abs_diff_eq!(idb, 0.02, epsilon = 1e-12);
    }

    #[test]
    fn davies_bouldin_identical_groups_are_degenerate() {
        let g = group_set(vec![
            vec![seg(&[1.0]), seg(&[3.0])],
            vec![seg(&[1.0]), seg(&[3.0])],
        ]);
        assert_eq!(
            davies_bouldin(&g, &SquaredEuclidean, Representative::Mean),
            f64::INFINITY
        );
    }

    #[test]
    fn silhouette_hand_computed() {
        // Every summand is 120/122.
        let g = group_set(vec![
            vec![seg(&[0.0]), seg(&[2.0])],
            vec![seg(&[10.0]), seg(&[12.0])],
        ]);
        let is = silhouette_index(&g, &SquaredEuclidean);
        assert_abs_diff_eq!(is, 1.0 - 120.0 / 122.0, epsilon = 1e-12);
    }

    #[test]
    fn silhouette_tight_far_groups_approach_zero() {
        let g = group_set(vec![
            vec![seg(&[0.0]), seg(&[2.0])],
            vec![seg(&[1e6]), seg(&[1e6 + 2.0])],
        ]);
        assert!(silhouette_index(&g, &SquaredEuclidean) < 1e-6);
    }

    #[test]
    fn silhouette_interleaved_identical_groups_near_one() {
        let g = group_set(vec![
            vec![seg(&[0.0]), seg(&[10.0])],
            vec![seg(&[0.0]), seg(&[10.0])],
        ]);
        assert_abs_diff_eq!(silhouette_index(&g, &SquaredEuclidean), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn group_genes_sorts_by_indicator_with_stable_ties() {
        let sol = Solution::new(vec![
            Gene::new(1, 2, 0.9),
            Gene::new(10, 2, 0.1),
            Gene::new(20, 2, 0.9),
            Gene::new(30, 2, 0.4),
        ]);
        let groups = group_genes(&sol, 2);
        assert_eq!(groups, vec![vec![1, 3], vec![0, 2]]);
    }

    #[test]
    fn goodness_overlap_scores_infinity() {
        let z = TimeSeries::univariate((0..100).map(f64::from).collect()).unwrap();
        let sol = Solution::new(vec![
            Gene::new(1, 10, 0.1),
            Gene::new(5, 10, 0.2),
            Gene::new(40, 10, 0.6),
            Gene::new(60, 10, 0.9),
        ]);
        let cfg = FitnessConfig::default();
        assert_eq!(goodness(&z, &sol, &cfg, 10, 2), f64::INFINITY);
    }

    #[test]
    fn goodness_is_permutation_invariant() {
        let z = TimeSeries::univariate((0..200).map(|i| (i as f64 * 0.7).sin()).collect()).unwrap();
        let genes = vec![
            Gene::new(1, 8, 0.3),
            Gene::new(20, 9, 0.8),
            Gene::new(40, 10, 0.05),
            Gene::new(60, 8, 0.55),
        ];
        let cfg = FitnessConfig::default();
        let a = goodness(&z, &Solution::new(genes.clone()), &cfg, 10, 2);
        let mut reversed = genes;
        reversed.reverse();
        let b = goodness(&z, &Solution::new(reversed), &cfg, 10, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn goodness_rewards_planted_pairs() {
        // Two identical triangle pairs far apart in an otherwise flat series.
        let mut values = vec![0.0; 60];
        let triangle = [0.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.0, -1.0];
        let ramp = [0.0, -2.0, -4.0, -6.0, -4.0, -2.0, 0.0, 2.0];
        for (offset, pattern) in [(0, &triangle), (15, &triangle), (30, &ramp), (45, &ramp)] {
            values[offset..offset + 8].copy_from_slice(&pattern[..]);
        }
        let z = TimeSeries::univariate(values).unwrap();
        let sol = Solution::new(vec![
            Gene::new(1, 8, 0.1),
            Gene::new(16, 8, 0.2),
            Gene::new(31, 8, 0.7),
            Gene::new(46, 8, 0.8),
        ]);
        let cfg = FitnessConfig::default();
        let g = goodness(&z, &sol, &cfg, 8, 2);
        assert!(g < 0.1, "expected a tight grouping, got {g}");
    }

    #[test]
    fn search_space_matches_reported_magnitude() {
        let log = search_space_log10(10_000, 1, 100, 2, 5);
        assert!((53.3..=53.6).contains(&log), "log10 = {log}");
    }

    #[test]
    fn search_space_small_cases() {
        assert_abs_diff_eq!(search_space_log10(100, 1, 1, 1, 1), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(search_space_log10(5, 1, 2, 2, 5), 0.0, epsilon = 1e-9);
    }
}
