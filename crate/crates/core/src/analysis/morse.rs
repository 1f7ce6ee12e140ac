//! Morse-gauge excursions and the geodesic image theorem as empirical
//! checks against a target set.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::analysis::contraction::{kappa, Rho, SublinearEstimate};
use crate::analysis::paths::quasi_geodesic_family;
use crate::error::AnalysisError;
use crate::graph::{Graph, VertexId};
use crate::rng::SeedStream;

const ENDPOINT_PAIR_CAP: usize = 48;

/// One measured entry of a Morse gauge: the worst excursion of generated
/// certified (L, A)-quasi-geodesics with endpoints on the target set. A
/// lower bound on the true gauge value N(L, A).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorseExcursion {
    pub l: String,
    pub a: String,
    pub excursion: u32,
    pub paths_tested: usize,
    pub pairs_tested: usize,
    pub family_exhausted: bool,
}

/// Measure the (L, A) excursion from `z`: generate certified families
/// between endpoint pairs on `z` and take the maximal distance from a path
/// vertex back to `z`. Endpoint pairs beyond a cap are subsampled by a
/// seeded nested rule.
pub fn morse_excursion(
    g: &Graph,
    z: &[VertexId],
    l: Rational64,
    a: Rational64,
    budget: usize,
    seed: u64,
) -> Result<MorseExcursion, AnalysisError> {
    if z.is_empty() {
        return Err(AnalysisError::Graph(crate::error::GraphError::EmptyTarget));
    }
    let dz = g.distances_multi(z);
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    for (i, &u) in z.iter().enumerate() {
        for &v in z.iter().skip(i + 1) {
            pairs.push((u, v));
        }
    }
    if pairs.len() > ENDPOINT_PAIR_CAP {
        let mut keyed: Vec<(u64, (VertexId, VertexId))> = pairs
            .into_iter()
            .map(|p| (SeedStream::pair_key(seed, p.0 .0, p.1 .0), p))
            .collect();
        keyed.sort_unstable();
        keyed.truncate(ENDPOINT_PAIR_CAP);
        pairs = keyed.into_iter().map(|(_, p)| p).collect();
    }

    let mut excursion = 0u32;
    let mut paths_tested = 0usize;
    let mut family_exhausted = true;
    let pairs_tested = pairs.len();
    for (u, v) in pairs {
        let family = match quasi_geodesic_family(g, u, v, l, a, budget, seed, None) {
            Ok(f) => f,
            Err(AnalysisError::NoPathsGenerated) => continue,
            Err(e) => return Err(e),
        };
        family_exhausted &= family.exhausted;
        for p in &family.paths {
            paths_tested += 1;
            for vert in &p.vertices {
                if let Some(d) = dz[vert.idx()] {
                    excursion = excursion.max(d);
                }
            }
        }
    }
    if paths_tested == 0 {
        return Err(AnalysisError::NoPathsGenerated);
    }
    Ok(MorseExcursion {
        l: l.to_string(),
        a: a.to_string(),
        excursion,
        paths_tested,
        pairs_tested,
        family_exhausted,
    })
}

/// Result of scanning sampled geodesics against the image-theorem bound:
/// a geodesic staying at distance >= kappa_rho from `z` should project to a
/// set of diameter at most rho(max endpoint distance), up to a slack factor
/// absorbing the estimate-versus-true gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GitReport {
    pub kappa_rho: String,
    /// Set when the table was not sublinear in range; the scan then uses the
    /// minimal admissible threshold max{3A, 3L^2, 1}.
    pub kappa_fallback: bool,
    pub samples_requested: usize,
    pub eligible: usize,
    pub violations: usize,
    pub out_of_range: usize,
    pub worst_ratio: Option<f64>,
    pub slack: f64,
}

/// Scan seeded random geodesics; count violations of
/// diam(pi_Z(gamma)) <= slack * rho(max{d(x,Z), d(y,Z)}) among geodesics
/// with d(gamma, Z) >= kappa_rho. Geodesics closer than the threshold are
/// vacuous and skipped; endpoint radii beyond the table are skipped and
/// counted separately.
pub fn git_check(
    g: &Graph,
    z: &[VertexId],
    rho: &SublinearEstimate,
    samples: usize,
    slack: f64,
    seed: u64,
) -> Result<GitReport, AnalysisError> {
    if z.is_empty() {
        return Err(AnalysisError::Graph(crate::error::GraphError::EmptyTarget));
    }
    let one = Rational64::from_integer(1);
    let zero = Rational64::from_integer(0);
    let (kappa_rho, kappa_fallback) = match kappa(&Rho::Table(rho.clone()), one, zero) {
        Ok(k) => (k, false),
        Err(AnalysisError::NotSublinearWithinRange(_)) => (Rational64::from_integer(3), true),
        Err(e) => return Err(e),
    };

    let mut z_sorted = z.to_vec();
    z_sorted.sort();
    z_sorted.dedup();
    let z = &z_sorted;
    let dz = g.distances_multi(z);
    let z_dist: Vec<Vec<Option<u32>>> = z.iter().map(|&v| g.distances_from(v)).collect();
    let project = |v: VertexId| -> Vec<usize> {
        let best = z_dist.iter().filter_map(|row| row[v.idx()]).min().unwrap();
        z.iter()
            .enumerate()
            .filter(|(i, _)| z_dist[*i][v.idx()] == Some(best))
            .map(|(i, _)| i)
            .collect()
    };

    use rand::Rng;
    let mut rng = SeedStream::task_rng(seed, 0x617);
    let n = g.vertex_count() as u32;
    let mut eligible = 0usize;
    let mut violations = 0usize;
    let mut out_of_range = 0usize;
    let mut worst_ratio: Option<f64> = None;

    for _ in 0..samples {
        let x = VertexId(rng.gen_range(0..n));
        let y = VertexId(rng.gen_range(0..n));
        if x == y {
            continue;
        }
        let Ok(geo) = g.first_geodesic(x, y) else { continue };
        let gap = geo
            .vertices
            .iter()
            .filter_map(|v| dz[v.idx()])
            .min()
            .unwrap_or(u32::MAX);
        if Rational64::from_integer(gap as i64) < kappa_rho {
            continue; // vacuous: the premise d(gamma, Z) >= kappa fails
        }
        let (Some(dx), Some(dy)) = (dz[x.idx()], dz[y.idx()]) else {
            continue;
        };
        let m = dx.max(dy);
        let Some(bound) = rho.value(m) else {
            out_of_range += 1;
            continue;
        };
        eligible += 1;
        let mut union: Vec<usize> = Vec::new();
        for v in &geo.vertices {
            union.extend(project(*v));
        }
        union.sort_unstable();
        union.dedup();
        let mut diam = 0u32;
        for (i, &zi) in union.iter().enumerate() {
            for &zj in union.iter().skip(i + 1) {
                if let Some(d) = z_dist[zi][z[zj].idx()] {
                    diam = diam.max(d);
                }
            }
        }
        if bound > 0 {
            let ratio = diam as f64 / bound as f64;
            worst_ratio = Some(worst_ratio.map_or(ratio, |w: f64| w.max(ratio)));
            if ratio > slack {
                violations += 1;
            }
        } else if diam > 0 {
            violations += 1;
        }
    }

    Ok(GitReport {
        kappa_rho: kappa_rho.to_string(),
        kappa_fallback,
        samples_requested: samples,
        eligible,
        violations,
        out_of_range,
        worst_ratio,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::contraction::estimate_contraction;
    use crate::graph::VertexTag;

    fn path_graph(n: u32) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_vertex(VertexTag::SpacePoint(format!("r:{i}")));
        }
        for i in 0..n - 1 {
            g.add_edge(VertexId(i), VertexId(i + 1));
        }
        g
    }

    fn grid(n: u32) -> (Graph, impl Fn(u32, u32) -> VertexId) {
        let mut g = Graph::new();
        for x in 0..=n {
            for y in 0..=n {
                g.add_vertex(VertexTag::SpacePoint(format!("e0:{x},{y}")));
            }
        }
        let id = move |x: u32, y: u32| VertexId(x * (n + 1) + y);
        for x in 0..=n {
            for y in 0..=n {
                if x < n {
                    g.add_edge(id(x, y), id(x + 1, y));
                }
                if y < n {
                    g.add_edge(id(x, y), id(x, y + 1));
                }
            }
        }
        (g, id)
    }

    #[test]
    fn tree_geodesic_has_zero_unit_excursion() {
        let g = path_graph(8);
        let z: Vec<VertexId> = (2..6).map(VertexId).collect();
        let m = morse_excursion(&g, &z, 1.into(), 0.into(), 100, 1).unwrap();
        assert_eq!(m.excursion, 0);
    }

    #[test]
    fn grid_axis_has_large_excursion_at_l3() {
        // the tent detour through (4,4) witnesses excursion >= 4
        let (g, id) = grid(8);
        let z: Vec<VertexId> = (0..=8).map(|x| id(x, 0)).collect();
        let m = morse_excursion(&g, &z, 3.into(), 0.into(), 3_000, 2).unwrap();
        assert!(m.excursion >= 4, "excursion {} too small", m.excursion);
    }

    #[test]
    fn git_on_grid_axis_reports_violations() {
        let (g, id) = grid(12);
        let z: Vec<VertexId> = (0..=12).map(|x| id(x, 0)).collect();
        let rho = estimate_contraction(&g, &z, 5, 100_000, 3).unwrap();
        let report = git_check(&g, &z, &rho, 400, 2.0, 3).unwrap();
        assert!(report.kappa_fallback, "the axis table is not sublinear");
        assert!(report.violations > 0, "expected image-theorem violations");
    }

    #[test]
    fn git_on_tree_geodesic_is_clean() {
        let g = path_graph(16);
        let z: Vec<VertexId> = (4..9).map(VertexId).collect();
        let rho = estimate_contraction(&g, &z, 4, 100_000, 3).unwrap();
        let report = git_check(&g, &z, &rho, 300, 2.0, 4).unwrap();
        assert_eq!(report.violations, 0);
    }
}
