//! Commuting-zone delineation from district-level commuting flows.
//!
//! Districts are merged along dominant flows: region `i` links to region
//! `j` when `j` receives the largest out-flow of `i` and that flow clears a
//! share threshold `tau`. Weakly connected components of the link graph
//! form zones, and the threshold is selected by maximizing directed
//! weighted modularity over a grid.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Square matrix of commuters: `flows[i][j]` lives in region `i` and works
/// in region `j`; the diagonal holds non-commuters.
#[derive(Debug, Clone)]
pub struct FlowMatrix {
    regions: Vec<String>,
    flows: Vec<Vec<f64>>,
    row_sums: Vec<f64>,
}

impl FlowMatrix {
    pub fn new(regions: Vec<String>, flows: Vec<Vec<f64>>) -> Result<Self> {
        let n = regions.len();
        if n == 0 {
            return Err(Error::domain("flow matrix must have at least one region"));
        }
        if flows.len() != n || flows.iter().any(|r| r.len() != n) {
            return Err(Error::domain(format!(
                "flow matrix must be {n}x{n} to match the region list"
            )));
        }
        {
            let mut seen = std::collections::BTreeSet::new();
            for r in &regions {
                if !seen.insert(r) {
                    return Err(Error::domain(format!("duplicate region `{r}`")));
                }
            }
        }
        let mut row_sums = Vec::with_capacity(n);
        for (i, row) in flows.iter().enumerate() {
            let mut sum = 0.0;
            for (j, &f) in row.iter().enumerate() {
                if !f.is_finite() || f < 0.0 {
                    return Err(Error::domain(format!(
                        "flow [{i}][{j}] = {f} is not a non-negative number"
                    )));
                }
                sum += f;
            }
            if sum <= 0.0 {
                return Err(Error::domain(format!(
                    "region `{}` has no resident workers (row sum 0)",
                    regions[i]
                )));
            }
            row_sums.push(sum);
        }
        Ok(FlowMatrix {
            regions,
            flows,
            row_sums,
        })
    }

    /// Build from `(origin, destination, commuters)` edges. Regions are the
    /// sorted union of all codes, missing pairs are zero, and duplicate
    /// edges accumulate.
    pub fn from_edges(edges: &[(String, String, f64)]) -> Result<Self> {
        let mut codes = std::collections::BTreeSet::new();
        for (o, d, _) in edges {
            codes.insert(o.clone());
            codes.insert(d.clone());
        }
        let regions: Vec<String> = codes.into_iter().collect();
        let index: BTreeMap<&str, usize> = regions
            .iter()
            .enumerate()
            .map(|(i, r)| (r.as_str(), i))
            .collect();
        let n = regions.len();
        let mut flows = vec![vec![0.0; n]; n];
        for (o, d, c) in edges {
            flows[index[o.as_str()]][index[d.as_str()]] += c;
        }
        FlowMatrix::new(regions, flows)
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn regions(&self) -> &[String] {
        &self.regions
    }

    pub fn flow(&self, i: usize, j: usize) -> f64 {
        self.flows[i][j]
    }

    pub fn total_flow(&self) -> f64 {
        self.row_sums.iter().sum()
    }
}

/// Assignment of every region to a zone, with zone ids dense in
/// `0..zone_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    zone_count: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let zone_count = assignment.iter().copied().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; zone_count];
        for &z in &assignment {
            seen[z] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::domain("zone ids must be dense 0..zone_count"));
        }
        Ok(Partition {
            assignment,
            zone_count,
        })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            zone_count: n,
        }
    }

    pub fn all_in_one(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            zone_count: n.min(1),
        }
    }

    pub fn zone_of(&self, region_idx: usize) -> usize {
        self.assignment[region_idx]
    }

    pub fn zone_count(&self) -> usize {
        self.zone_count
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

/// A dominant-flow link from one region to another (indices into the
/// region list of the matrix that produced it).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
}

/// Links `i -> j` where `j` is the largest out-flow destination of `i`
/// (ties resolved to the lowest region index) and the flow share
/// `flows[i][j] / rowsum(i)` reaches `tau`. Every region emits at most one
/// link.
pub fn dominant_flow_links(fm: &FlowMatrix, tau: f64) -> Result<Vec<Link>> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("tau {tau} must lie in (0, 1)")));
    }
    let n = fm.len();
    let mut links = Vec::new();
    for i in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == i {
                continue;
            }
            let f = fm.flow(i, j);
            if best.map_or(true, |(_, bf)| f > bf) {
                best = Some((j, f));
            }
        }
        if let Some((j, f)) = best {
            if f / fm.row_sums[i] >= tau {
                links.push(Link { from: i, to: j });
            }
        }
    }
    Ok(links)
}

/// Zones are the weakly connected components of the link graph; unlinked
/// regions become singleton zones. Zone ids are assigned densely in order
/// of each component's smallest region index.
pub fn merge_zones(n_regions: usize, links: &[Link]) -> Partition {
    let mut parent: Vec<usize> = (0..n_regions).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for link in links {
        let a = find(&mut parent, link.from);
        let b = find(&mut parent, link.to);
        if a != b {
            // union by smaller root keeps component representatives stable
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }

    let mut zone_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut assignment = vec![0usize; n_regions];
    for i in 0..n_regions {
        let root = find(&mut parent, i);
        let next = zone_of_root.len();
        let zone = *zone_of_root.entry(root).or_insert(next);
        assignment[i] = zone;
    }
    let zone_count = zone_of_root.len();
    Partition {
        assignment,
        zone_count,
    }
}

/// Directed weighted modularity
/// `Q = (1/m) sum_ij [A_ij - k_i^out k_j^in / m] delta(c_i, c_j)` with `m`
/// the total flow including diagonals. Computed zone-by-zone so that the
/// all-in-one partition scores exactly zero.
pub fn modularity(fm: &FlowMatrix, p: &Partition) -> Result<f64> {
    if p.len() != fm.len() {
        return Err(Error::domain(format!(
            "partition covers {} regions, matrix has {}",
            p.len(),
            fm.len()
        )));
    }
    let n = fm.len();
    let mut within = vec![0.0; p.zone_count()];
    let mut out_strength = vec![0.0; p.zone_count()];
    let mut in_strength = vec![0.0; p.zone_count()];
    for i in 0..n {
        let zi = p.zone_of(i);
        for j in 0..n {
            let f = fm.flow(i, j);
            out_strength[zi] += f;
            in_strength[p.zone_of(j)] += f;
            if zi == p.zone_of(j) {
                within[zi] += f;
            }
        }
    }
    // total flow from the same accumulation as the zone sums, so the
    // all-in-one partition cancels exactly
    let m: f64 = out_strength.iter().sum();
    if m <= 0.0 {
        return Err(Error::domain("total flow is zero"));
    }
    let mut q = 0.0;
    for z in 0..p.zone_count() {
        q += within[z] / m - (out_strength[z] / m) * (in_strength[z] / m);
    }
    Ok(q)
}

/// Share of commuting flow (off-diagonal) that crosses zone boundaries.
pub fn cross_zone_share(fm: &FlowMatrix, p: &Partition) -> f64 {
    let n = fm.len();
    let mut cross = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let f = fm.flow(i, j);
            total += f;
            if p.zone_of(i) != p.zone_of(j) {
                cross += f;
            }
        }
    }
    if total > 0.0 {
        cross / total
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct SweepEvaluation {
    pub tau: f64,
    pub modularity: f64,
    pub zone_count: usize,
    pub cross_zone_share: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub tau_star: f64,
    pub partition: Partition,
    pub q_star: f64,
    pub cross_zone_share: f64,
    pub evaluations: Vec<SweepEvaluation>,
}

/// Evaluate `dominant_flow_links -> merge_zones -> modularity` over a grid
/// of thresholds and return the modularity maximizer. Ties go to the larger
/// threshold (fewer merges).
pub fn sweep_thresholds(fm: &FlowMatrix, grid: &[f64]) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::domain("threshold grid must be non-empty"));
    }
    let mut evaluations = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64, Partition, f64)> = None;
    let mut taus: Vec<f64> = grid.to_vec();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for tau in taus {
        let links = dominant_flow_links(fm, tau)?;
        let partition = merge_zones(fm.len(), &links);
        let q = modularity(fm, &partition)?;
        let cross = cross_zone_share(fm, &partition);
        evaluations.push(SweepEvaluation {
            tau,
            modularity: q,
            zone_count: partition.zone_count(),
            cross_zone_share: cross,
        });
        let replace = match &best {
            None => true,
            Some((best_q, _, _, _)) => q >= *best_q,
        };
        if replace {
            best = Some((q, tau, partition, cross));
        }
    }
    let (q_star, tau_star, partition, cross) = best.unwrap();
    Ok(SweepResult {
        tau_star,
        partition,
        q_star,
        cross_zone_share: cross,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three regions where B and C each send their largest out-flow to A.
    fn three_region_matrix() -> FlowMatrix {
        // row sums 100 each; B->A share 0.10, C->A share 0.08
        FlowMatrix::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                vec![95.0, 3.0, 2.0],
                vec![10.0, 86.0, 4.0],
                vec![8.0, 5.0, 87.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn dominant_links_respect_threshold() {
        let fm = three_region_matrix();
        let links = dominant_flow_links(&fm, 0.07).unwrap();
        assert_eq!(
            links,
            vec![Link { from: 1, to: 0 }, Link { from: 2, to: 0 }]
        );
        let links = dominant_flow_links(&fm, 0.09).unwrap();
        assert_eq!(links, vec![Link { from: 1, to: 0 }]);
        let links = dominant_flow_links(&fm, 0.5).unwrap();
        assert!(links.is_empty());
        assert!(dominant_flow_links(&fm, 0.0).is_err());
        assert!(dominant_flow_links(&fm, 1.0).is_err());
    }

    #[test]
    fn only_largest_outflow_can_link() {
        // C's largest out-flow goes to B (6 > 5), so no C->A link even
        // though the C->A share would clear the threshold.
        let fm = FlowMatrix::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                vec![95.0, 3.0, 2.0],
                vec![10.0, 86.0, 4.0],
                vec![5.0, 6.0, 89.0],
            ],
        )
        .unwrap();
        let links = dominant_flow_links(&fm, 0.05).unwrap();
        assert_eq!(
            links,
            vec![Link { from: 1, to: 0 }, Link { from: 2, to: 1 }]
        );
    }

    #[test]
    fn merge_zones_components() {
        let p = merge_zones(3, &[Link { from: 1, to: 0 }, Link { from: 2, to: 0 }]);
        assert_eq!(p.zone_count(), 1);

        let p = merge_zones(4, &[]);
        assert_eq!(p.zone_count(), 4);
        assert_eq!((0..4).map(|i| p.zone_of(i)).collect::<Vec<_>>(), vec![0, 1, 2, 3]);

        // chain A->B, B->C collapses to one zone
        let p = merge_zones(3, &[Link { from: 0, to: 1 }, Link { from: 1, to: 2 }]);
        assert_eq!(p.zone_count(), 1);
    }

    #[test]
    fn components_ignore_orientation() {
        let fwd = merge_zones(4, &[Link { from: 0, to: 1 }, Link { from: 2, to: 3 }]);
        let rev = merge_zones(4, &[Link { from: 1, to: 0 }, Link { from: 3, to: 2 }]);
        assert_eq!(fwd, rev);
    }

    #[test]
    fn modularity_all_in_one_is_exactly_zero() {
        let fm = three_region_matrix();
        let q = modularity(&fm, &Partition::all_in_one(3)).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn modularity_two_equal_blocks() {
        // two blocks of two regions, zero cross flow, equal block weights
        let fm = FlowMatrix::new(
            vec!["A".into(), "B".into(), "C".into(), "D".into()],
            vec![
                vec![40.0, 10.0, 0.0, 0.0],
                vec![10.0, 40.0, 0.0, 0.0],
                vec![0.0, 0.0, 40.0, 10.0],
                vec![0.0, 0.0, 10.0, 40.0],
            ],
        )
        .unwrap();
        let planted = Partition::new(vec![0, 0, 1, 1]).unwrap();
        let q = modularity(&fm, &planted).unwrap();
        assert!((q - 0.5).abs() < 1e-15);

        // the planted split beats the merge of both blocks
        let merged = modularity(&fm, &Partition::all_in_one(4)).unwrap();
        assert!(q > merged);
    }

    #[test]
    fn sweep_selects_planted_partition() {
        // diagonals small enough that merged blocks beat singletons, and
        // dominant shares below 0.5 so the high threshold forms no links
        let fm = FlowMatrix::new(
            vec!["A".into(), "B".into(), "C".into(), "D".into()],
            vec![
                vec![15.0, 10.0, 0.5, 0.0],
                vec![10.0, 15.0, 0.0, 0.5],
                vec![0.5, 0.0, 15.0, 10.0],
                vec![0.0, 0.5, 10.0, 15.0],
            ],
        )
        .unwrap();
        let sweep = sweep_thresholds(&fm, &[0.05, 0.5]).unwrap();
        assert_eq!(sweep.tau_star, 0.05);
        assert_eq!(sweep.partition.zone_count(), 2);
        assert_eq!(sweep.partition.zone_of(0), sweep.partition.zone_of(1));
        assert_eq!(sweep.partition.zone_of(2), sweep.partition.zone_of(3));
        assert!(sweep.cross_zone_share < 0.1);
    }

    #[test]
    fn sweep_single_element_grid() {
        let fm = three_region_matrix();
        let sweep = sweep_thresholds(&fm, &[0.09]).unwrap();
        assert_eq!(sweep.tau_star, 0.09);
        assert_eq!(sweep.partition.zone_count(), 2);
        assert!(sweep_thresholds(&fm, &[]).is_err());
    }

    #[test]
    fn sweep_ties_prefer_larger_tau() {
        // thresholds above all shares give identical singleton partitions;
        // the largest tau must win
        let fm = three_region_matrix();
        let sweep = sweep_thresholds(&fm, &[0.2, 0.3, 0.4]).unwrap();
        assert_eq!(sweep.tau_star, 0.4);
    }

    #[test]
    fn raising_tau_never_adds_links() {
        let fm = three_region_matrix();
        let mut prev = usize::MAX;
        for tau in [0.01, 0.05, 0.08, 0.09, 0.2, 0.9] {
            let links = dominant_flow_links(&fm, tau).unwrap();
            assert!(links.len() <= prev);
            prev = links.len();
        }
    }

    #[test]
    fn from_edges_accumulates() {
        let fm = FlowMatrix::from_edges(&[
            ("A".into(), "A".into(), 50.0),
            ("A".into(), "B".into(), 5.0),
            ("A".into(), "B".into(), 5.0),
            ("B".into(), "B".into(), 60.0),
        ])
        .unwrap();
        assert_eq!(fm.flow(0, 1), 10.0);
        assert_eq!(fm.total_flow(), 120.0);
    }

    #[test]
    fn matrix_validation() {
        assert!(FlowMatrix::new(vec![], vec![]).is_err());
        assert!(FlowMatrix::new(vec!["A".into()], vec![vec![0.0]]).is_err()); // zero row sum
        assert!(FlowMatrix::new(vec!["A".into(), "A".into()], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(FlowMatrix::new(vec!["A".into()], vec![vec![-1.0]]).is_err());
        assert!(modularity(
            &three_region_matrix(),
            &Partition::singletons(2)
        )
        .is_err());
    }
}
