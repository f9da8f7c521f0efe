//! Lieb-Mattis scan: lowest energy per total-spin sector for irreducible
//! bipartite spin-1/2 Heisenberg models, with the two ordering verdicts
//! `E(S+1) > E(S)` for `S ≥ 𝒮` and `E(S) > E(𝒮)` for `S < 𝒮`,
//! where `𝒮 = |S_A − S_B|`.

use serde::Serialize;

use crate::error::{FoelError, Result};
use crate::hilbert::{SparseOperator, FULL_SPACE_MAX_L};
use crate::quantum_group::spin_resolved_energies;
use crate::scalar::{real, Scalar};

/// Spin-1/2 Heisenberg model `H = Σ J_{xy} S_x·S_y` with an (A, B)
/// bipartition: `J ≥ 0` across A-B and `J ≤ 0` within each part, with a
/// connected coupling graph.
#[derive(Debug, Clone)]
pub struct LiebMattisModel<T: Scalar> {
    site_count: usize,
    couplings: Vec<(usize, usize, T)>,
    in_a: Vec<bool>,
}

impl<T: Scalar> LiebMattisModel<T> {
    pub fn new(
        site_count: usize,
        couplings: Vec<(usize, usize, T)>,
        a_sites: &[usize],
    ) -> Result<LiebMattisModel<T>> {
        if site_count < 2 || site_count > FULL_SPACE_MAX_L.min(12) {
            return Err(FoelError::SizeLimit {
                what: "Lieb-Mattis model",
                size: site_count,
                max: FULL_SPACE_MAX_L.min(12),
            });
        }
        let mut in_a = vec![false; site_count];
        for &a in a_sites {
            if a >= site_count {
                return Err(FoelError::VertexOutOfRange {
                    vertex: a,
                    count: site_count,
                });
            }
            in_a[a] = true;
        }
        let mut adjacency = vec![Vec::new(); site_count];
        for &(x, y, j) in &couplings {
            if x == y {
                return Err(FoelError::SelfLoop(x));
            }
            for w in [x, y] {
                if w >= site_count {
                    return Err(FoelError::VertexOutOfRange {
                        vertex: w,
                        count: site_count,
                    });
                }
            }
            let across = in_a[x] != in_a[y];
            if (across && j < T::zero()) || (!across && j > T::zero()) {
                return Err(FoelError::SignPattern { x, y });
            }
            if j != T::zero() {
                adjacency[x].push(y);
                adjacency[y].push(x);
            }
        }
        // Irreducibility: the nonzero-coupling graph is connected.
        let mut seen = vec![false; site_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count < site_count {
            return Err(FoelError::ReducibleModel);
        }
        Ok(LiebMattisModel {
            site_count,
            couplings,
            in_a,
        })
    }

    /// Antiferromagnetic chain: `J = +1` between neighbors, parts by parity.
    pub fn af_chain(l: usize) -> Result<LiebMattisModel<T>> {
        let couplings = (0..l - 1).map(|i| (i, i + 1, T::one())).collect();
        let a_sites: Vec<usize> = (0..l).step_by(2).collect();
        LiebMattisModel::new(l, couplings, &a_sites)
    }

    /// Ferromagnetic chain: `J = −1` between neighbors, everything in A.
    pub fn fm_chain(l: usize) -> Result<LiebMattisModel<T>> {
        let couplings = (0..l - 1).map(|i| (i, i + 1, -T::one())).collect();
        let a_sites: Vec<usize> = (0..l).collect();
        LiebMattisModel::new(l, couplings, &a_sites)
    }

    /// Solvable cross model: `J = +1` for every A-B pair, nothing within.
    pub fn cross_bipartite(a_count: usize, b_count: usize) -> Result<LiebMattisModel<T>> {
        let mut couplings = Vec::new();
        for x in 0..a_count {
            for y in a_count..a_count + b_count {
                couplings.push((x, y, T::one()));
            }
        }
        let a_sites: Vec<usize> = (0..a_count).collect();
        LiebMattisModel::new(a_count + b_count, couplings, &a_sites)
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    /// `2𝒮 = |2S_A − 2S_B| = ||A| − |B||` for spin-1/2 sites.
    pub fn two_script_s(&self) -> i64 {
        let a = self.in_a.iter().filter(|&&x| x).count() as i64;
        let b = self.site_count as i64 - a;
        (a - b).abs()
    }

    /// `H = Σ J_{xy} S_x·S_y` on the full 2^L space.
    pub fn hamiltonian(&self) -> SparseOperator<T> {
        let l = self.site_count;
        let quarter: T = real(0.25);
        let half: T = real(0.5);
        let mut triplets = Vec::new();
        for mask in 0usize..1 << l {
            for &(x, y, j) in &self.couplings {
                let bx = l - 1 - x;
                let by = l - 1 - y;
                if mask >> bx & 1 == mask >> by & 1 {
                    triplets.push((mask, mask, j * quarter));
                } else {
                    triplets.push((mask, mask, -j * quarter));
                    triplets.push((mask ^ (1 << bx) ^ (1 << by), mask, j * half));
                }
            }
        }
        SparseOperator::from_triplets(1 << l, triplets, true)
    }
}

/// Lowest energy per total spin plus the two ordering verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct LiebMattisReport<T: Scalar> {
    pub two_script_s: i64,
    /// `(2S, E(S))` for ascending `2S`.
    pub levels: Vec<(i64, T)>,
    /// `2S` of the global minimum.
    pub ground_two_s: i64,
    /// `E(S+1) > E(S)` for all `S ≥ 𝒮`.
    pub high_ordering_ok: bool,
    /// `E(S) > E(𝒮)` for all `S < 𝒮`.
    pub floor_ok: bool,
    /// `(2M, 2S)` of the minimum-energy state per magnetization `M ≥ 0`.
    pub sector_minimizers: Vec<(i64, i64)>,
}

/// Full scan: exact diagonalization, Casimir labeling, lowest energy per
/// total spin, and both Lieb-Mattis inequalities at tolerance `1e-8`.
pub fn lieb_mattis_scan<T: Scalar>(model: &LiebMattisModel<T>) -> Result<LiebMattisReport<T>> {
    let l = model.site_count();
    let hamiltonian = model.hamiltonian();
    let tolerance: T = real(1e-8);

    let parity = (l % 2) as i64;
    let mut levels: Vec<(i64, T)> = Vec::new();
    let mut sector_minimizers = Vec::new();
    let mut two_m = parity;
    while two_m <= l as i64 {
        let resolved = spin_resolved_energies(&hamiltonian, l, two_m)?;
        // E(S) for S = M comes from the highest-weight slice of this sector.
        if let Some((_, energies)) = resolved.iter().find(|(two_s, _)| *two_s == two_m) {
            levels.push((two_m, energies[0]));
        }
        let minimizer = resolved
            .iter()
            .min_by(|a, b| a.1[0].partial_cmp(&b.1[0]).expect("real energies"))
            .map(|(two_s, _)| *two_s)
            .expect("sector is nonempty");
        sector_minimizers.push((two_m, minimizer));
        two_m += 2;
    }

    let two_script_s = model.two_script_s();
    let floor = levels
        .iter()
        .find(|(two_s, _)| *two_s == two_script_s)
        .map(|&(_, e)| e)
        .expect("the 𝒮 level exists");
    let mut high_ordering_ok = true;
    for pair in levels.windows(2) {
        let ((two_s0, e0), (_, e1)) = (pair[0], pair[1]);
        if two_s0 >= two_script_s && e1 <= e0 + tolerance {
            high_ordering_ok = false;
        }
    }
    let mut floor_ok = true;
    for &(two_s, e) in &levels {
        if two_s < two_script_s && e <= floor + tolerance {
            floor_ok = false;
        }
    }
    let ground_two_s = levels
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("real energies"))
        .map(|&(two_s, _)| two_s)
        .expect("at least one level");

    Ok(LiebMattisReport {
        two_script_s,
        levels,
        ground_two_s,
        high_ordering_ok,
        floor_ok,
        sector_minimizers,
    })
}
