//! Contraction functions and the constants derived from them.
//!
//! A set Z is rho-contracting when every ball disjoint from Z projects,
//! under closest-point projection, to a set of diameter at most rho(radius)
//! for a sublinear rho. The estimator below measures the best such table on
//! a finite truncation; the constants kappa and kappa' turn a contraction
//! function into fellow-travelling bounds:
//!
//!   kappa(rho, L, A)  = max{ 3A, 3L^2, 1 + inf{ R > 0 | 3L^2 rho(r) <= r for all r >= R } }
//!   kappa'(rho, L, A) = (L^2 + 2) (2 kappa + A)

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::graph::{Graph, VertexId};
use crate::rng::SeedStream;

/// Default decay factor between the first and last window of rho(r)/r
/// below which the table counts as decaying.
pub const DEFAULT_DECAY_FACTOR: f64 = 0.75;
/// Default bound on rho(r_max)/r_max for a contracting-consistent verdict.
pub const DEFAULT_TAIL_BOUND: f64 = 0.25;

/// A contraction function: closed forms for exact constant computations,
/// or an empirical table.
#[derive(Debug, Clone)]
pub enum Rho {
    /// rho(r) = 0.
    Zero,
    /// rho(r) = sqrt(r).
    Sqrt,
    /// Sampled table, defined for 1 <= r <= r_max.
    Table(SublinearEstimate),
}

/// Empirical contraction table: rho_hat(r) is the largest projection
/// diameter seen among tested pairs qualifying at radius r. Values are
/// cumulative-maxed so the table is non-decreasing; it is a lower bound on
/// the true supremum, with `exhausted` set when every qualifying pair was
/// enumerated.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SublinearEstimate {
    pub r_max: u32,
    /// rho_hat(r) at index r - 1.
    pub rho: Vec<u32>,
    /// Pairs evaluated per radius.
    pub samples: Vec<u32>,
    pub budget_per_r: usize,
    pub exhausted: bool,
}

impl SublinearEstimate {
    pub fn value(&self, r: u32) -> Option<u32> {
        if r == 0 || r > self.r_max {
            None
        } else {
            Some(self.rho[(r - 1) as usize])
        }
    }

    /// Build directly from a table (used by tests and closed-form checks).
    pub fn from_values(rho: Vec<u32>) -> SublinearEstimate {
        let mut rho = rho;
        let mut running = 0;
        for v in rho.iter_mut() {
            running = running.max(*v);
            *v = running;
        }
        SublinearEstimate {
            r_max: rho.len() as u32,
            samples: vec![0; rho.len()],
            rho,
            budget_per_r: 0,
            exhausted: false,
        }
    }
}

/// kappa(rho, L, A), exact over the rationals.
///
/// The infimum term is the supremum of radii violating 3L^2 rho(r) <= r
/// (zero when nothing violates). For a table the condition is required up
/// to r_max; if it still fails at r_max there is no admissible R in range
/// and the computation errors out.
pub fn kappa(rho: &Rho, l: Rational64, a: Rational64) -> Result<Rational64, AnalysisError> {
    assert!(l >= 1.into() && a >= 0.into(), "need L >= 1 and A >= 0");
    let three = Rational64::from_integer(3);
    let coeff = three * l * l;
    let inf = match rho {
        Rho::Zero => Rational64::from_integer(0),
        // 3L^2 sqrt(r) <= r iff r >= (3L^2)^2
        Rho::Sqrt => coeff * coeff,
        Rho::Table(t) => {
            let mut worst = 0u32;
            for r in 1..=t.r_max {
                let val = Rational64::from_integer(t.value(r).unwrap() as i64);
                if coeff * val > Rational64::from_integer(r as i64) {
                    worst = r;
                }
            }
            if worst == t.r_max && t.r_max > 0 {
                return Err(AnalysisError::NotSublinearWithinRange(t.r_max));
            }
            Rational64::from_integer(worst as i64)
        }
    };
    let candidates = [three * a, coeff, Rational64::from_integer(1) + inf];
    Ok(candidates.into_iter().max().unwrap())
}

/// kappa'(rho, L, A) = (L^2 + 2)(2 kappa + A).
pub fn kappa_prime(rho: &Rho, l: Rational64, a: Rational64) -> Result<Rational64, AnalysisError> {
    let k = kappa(rho, l, a)?;
    Ok((l * l + Rational64::from_integer(2)) * (Rational64::from_integer(2) * k + a))
}

/// Estimate the contraction table of `z` inside `g`.
///
/// For every radius r in 1..=r_max, qualifying pairs are (x, y) with
/// d(x, y) <= d(x, Z) = r; the entry is the largest diameter of
/// pi_Z(x) union pi_Z(y) among tested pairs, measured in the ambient
/// metric. `budget` bounds pairs per radius; when the qualifying pool at a
/// radius is larger, a seeded nested subsample is used so larger budgets
/// extend smaller ones.
pub fn estimate_contraction(
    g: &Graph,
    z: &[VertexId],
    r_max: u32,
    budget: usize,
    seed: u64,
) -> Result<SublinearEstimate, AnalysisError> {
    if z.is_empty() {
        return Err(AnalysisError::Graph(crate::error::GraphError::EmptyTarget));
    }
    let mut z_sorted: Vec<VertexId> = z.to_vec();
    z_sorted.sort();
    z_sorted.dedup();
    let z = &z_sorted;

    let dz = g.distances_multi(z);
    // pairwise distances inside Z for diameter computations
    let z_dist: Vec<Vec<Option<u32>>> = z.iter().map(|&v| g.distances_from(v)).collect();

    // lazy closest-point projections, as indices into z
    let mut projections: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut project = |v: VertexId| -> Vec<usize> {
        if let Some(p) = projections.get(&v.0) {
            return p.clone();
        }
        let best = z_dist
            .iter()
            .filter_map(|row| row[v.idx()])
            .min()
            .expect("projection target reachable");
        let proj: Vec<usize> = z
            .iter()
            .enumerate()
            .filter(|(i, _)| z_dist[*i][v.idx()] == Some(best))
            .map(|(i, _)| i)
            .collect();
        projections.insert(v.0, proj.clone());
        proj
    };

    let mut rho = vec![0u32; r_max as usize];
    let mut samples = vec![0u32; r_max as usize];
    let mut exhausted = true;

    for r in 1..=r_max {
        // pairs anchored at x with d(x, Z) exactly r
        let anchors: Vec<VertexId> = g
            .vertices()
            .filter(|v| dz[v.idx()] == Some(r))
            .collect();
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        for &x in &anchors {
            let dx = g.distances_from(x);
            for y in g.vertices() {
                if matches!(dx[y.idx()], Some(d) if d <= r) {
                    pairs.push((x, y));
                }
            }
        }
        let chosen: Vec<(VertexId, VertexId)> = if pairs.len() <= budget {
            pairs
        } else {
            exhausted = false;
            let mut keyed: Vec<(u64, (VertexId, VertexId))> = pairs
                .into_iter()
                .map(|p| (SeedStream::pair_key(seed, p.0 .0, p.1 .0), p))
                .collect();
            keyed.sort();
            keyed.into_iter().take(budget).map(|(_, p)| p).collect()
        };

        let slot = (r - 1) as usize;
        samples[slot] = chosen.len() as u32;
        for (x, y) in chosen {
            let mut union = project(x);
            union.extend(project(y));
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
            rho[slot] = rho[slot].max(diam);
        }
    }

    // cumulative max: the qualifying pairs at radius r include those at
    // smaller radii, so the table must be non-decreasing
    let mut running = 0;
    for v in rho.iter_mut() {
        running = running.max(*v);
        *v = running;
    }

    Ok(SublinearEstimate {
        r_max,
        rho,
        samples,
        budget_per_r: budget,
        exhausted,
    })
}

/// Decision over a contraction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ContractingConsistent,
    NonContracting,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::ContractingConsistent => "contracting-consistent",
            Verdict::NonContracting => "non-contracting",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Compare the mean of rho(r)/r over the last `window` radii against the
/// first `window` radii. No decay below `DEFAULT_DECAY_FACTOR` means
/// non-contracting; decay plus a small tail means contracting-consistent.
pub fn sublinearity_verdict(
    e: &SublinearEstimate,
    window: u32,
) -> Result<Verdict, AnalysisError> {
    if window == 0 || e.r_max < 2 * window {
        return Err(AnalysisError::WindowTooLarge(window, e.r_max));
    }
    let mean = |lo: u32, hi: u32| -> f64 {
        let mut total = 0.0;
        for r in lo..=hi {
            total += e.value(r).unwrap() as f64 / r as f64;
        }
        total / (hi - lo + 1) as f64
    };
    let first = mean(1, window);
    let last = mean(e.r_max - window + 1, e.r_max);
    let tail_ok = (e.value(e.r_max).unwrap() as f64 / e.r_max as f64) <= DEFAULT_TAIL_BOUND;

    if last == 0.0 {
        return Ok(Verdict::ContractingConsistent);
    }
    if first == 0.0 || last >= DEFAULT_DECAY_FACTOR * first {
        return Ok(Verdict::NonContracting);
    }
    if tail_ok {
        Ok(Verdict::ContractingConsistent)
    } else {
        Ok(Verdict::Inconclusive)
    }
}
