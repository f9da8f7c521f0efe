//! Deformed SU_q(2) generators on the chain, highest-weight subspace
//! extraction, total-spin sector multiplicities, and the orthodox
//! (compression) route to the sector energies.
//!
//! The chain Hamiltonian commutes with the deformed total raising and
//! lowering operators
//!
//! ```text
//! S+_q = Σ_x q^{+2 Σ_{y<x} S³_y} S+_x ,   S-_q = Σ_x q^{-2 Σ_{y>x} S³_y} S-_x .
//! ```
//!
//! The exponent signs are fixed by requiring `[H, S±_q] = 0` for the kink
//! field of [`crate::hilbert::interaction_matrix`]; the commutators are
//! verified numerically in the test suite rather than assumed.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{FoelError, Result};
use crate::hilbert::{
    build_xxz_chain_hamiltonian, sector_basis_by_deviations, sector_block, Anisotropy,
    SparseOperator, SpinConfiguration, FULL_SPACE_MAX_L,
};
use crate::scalar::{as_f64, real, Scalar};

/// Singular values below this are treated as kernel directions; the count
/// is validated against [`sector_multiplicity`] rather than trusted.
pub const KERNEL_SVD_THRESHOLD: f64 = 1e-9;

/// Anisotropy from Δ ≥ 1 (q = Δ − sqrt(Δ²−1) ∈ (0,1]).
pub fn q_from_delta<T: Scalar>(delta: T) -> Result<Anisotropy<T>> {
    Anisotropy::from_delta(delta)
}

fn check_size(l: usize) -> Result<()> {
    if l == 0 || l > FULL_SPACE_MAX_L {
        return Err(FoelError::SizeLimit {
            what: "full product space",
            size: l,
            max: FULL_SPACE_MAX_L,
        });
    }
    Ok(())
}

/// Deformed total raising operator on the full 2^L space.
pub fn build_raising<T: Scalar>(l: usize, aniso: &Anisotropy<T>) -> Result<SparseOperator<T>> {
    check_size(l)?;
    let q = aniso.q();
    let mut triplets = Vec::new();
    for mask in 0usize..1 << l {
        for x in 0..l {
            let bit = l - 1 - x;
            if mask >> bit & 1 == 1 {
                let raised = mask & !(1 << bit);
                // sites y < x live on the bits above `bit`
                let down = (mask >> (bit + 1)).count_ones() as i32;
                let up = x as i32 - down;
                triplets.push((raised, mask, q.powi(up - down)));
            }
        }
    }
    Ok(SparseOperator::from_triplets(1 << l, triplets, false))
}

/// Deformed total lowering operator on the full 2^L space.
pub fn build_lowering<T: Scalar>(l: usize, aniso: &Anisotropy<T>) -> Result<SparseOperator<T>> {
    check_size(l)?;
    let q = aniso.q();
    let mut triplets = Vec::new();
    for mask in 0usize..1 << l {
        for x in 0..l {
            let bit = l - 1 - x;
            if mask >> bit & 1 == 0 {
                let lowered = mask | 1 << bit;
                // sites y > x live on the bits below `bit`
                let down = (mask & ((1 << bit) - 1)).count_ones() as i32;
                let up = (l - 1 - x) as i32 - down;
                triplets.push((lowered, mask, q.powi(down - up)));
            }
        }
    }
    Ok(SparseOperator::from_triplets(1 << l, triplets, false))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) as u128 / (i + 1) as u128;
    }
    result
}

/// Number of spin-(L/2 − n) irreducible components in the chain, equal to
/// the number of noncrossing pairings of 2n of the L sites with no arc
/// spanning an unpaired site: `C(L,n) − C(L,n−1)`.
pub fn sector_multiplicity(l: usize, n: usize) -> Result<usize> {
    if n > l / 2 {
        return Err(FoelError::InvalidDeviation { l, n });
    }
    let m = binomial(l, n) - if n == 0 { 0 } else { binomial(l, n - 1) };
    Ok(m as usize)
}

/// Orthonormal basis of `ker(S+_q)` inside the magnetization sector
/// `2M = L − 2n` (the highest-weight vectors of total spin L/2 − n).
#[derive(Debug, Clone)]
pub struct HighestWeightBasis<T: Scalar> {
    l: usize,
    n: usize,
    sector: Vec<SpinConfiguration>,
    vectors: DMatrix<T>,
}

impl<T: Scalar> HighestWeightBasis<T> {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Multiplicity of the sector, i.e. the number of basis vectors.
    pub fn multiplicity(&self) -> usize {
        self.vectors.ncols()
    }

    /// The magnetization-sector configurations indexing the coordinates.
    pub fn sector(&self) -> &[SpinConfiguration] {
        &self.sector
    }

    /// Orthonormal columns, in sector coordinates.
    pub fn vectors(&self) -> &DMatrix<T> {
        &self.vectors
    }

    /// The `k`-th vector expanded in the full 2^L space.
    pub fn full_vector(&self, k: usize) -> nalgebra::DVector<T> {
        let mut out = nalgebra::DVector::zeros(1 << self.l);
        for (i, config) in self.sector.iter().enumerate() {
            out[config.mask() as usize] = self.vectors[(i, k)];
        }
        out
    }
}

/// Highest-weight basis by singular-value thresholding of the raising
/// operator's sector block at [`KERNEL_SVD_THRESHOLD`]; the kernel
/// dimension must equal [`sector_multiplicity`] or the call fails.
pub fn highest_weight_basis<T: Scalar>(
    l: usize,
    n: usize,
    aniso: &Anisotropy<T>,
) -> Result<HighestWeightBasis<T>> {
    check_size(l)?;
    let expected = sector_multiplicity(l, n)?;
    let sector = sector_basis_by_deviations(l, n)?;
    if n == 0 {
        // S+_q annihilates the whole one-dimensional all-up sector.
        return Ok(HighestWeightBasis {
            l,
            n,
            sector,
            vectors: DMatrix::identity(1, 1),
        });
    }
    let raising = build_raising(l, aniso)?;
    let rows = sector_basis_by_deviations(l, n - 1)?;
    let block = sector_block(&raising, &rows, &sector)?;

    // Pad with zero rows to a square matrix so the SVD exposes the full set
    // of right singular vectors (the block is wide: C(L,n-1) < C(L,n)).
    let dim = sector.len();
    let mut padded = DMatrix::<T>::zeros(dim, dim);
    padded.view_mut((0, 0), (block.nrows(), dim)).copy_from(&block);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let threshold: T = real(KERNEL_SVD_THRESHOLD);
    let kernel: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|&(_, s)| *s < threshold)
        .map(|(i, _)| i)
        .collect();
    if kernel.len() != expected {
        return Err(FoelError::MultiplicityMismatch {
            l,
            n,
            expected,
            found: kernel.len(),
        });
    }
    let mut vectors = DMatrix::zeros(dim, expected);
    for (k, &i) in kernel.iter().enumerate() {
        vectors.column_mut(k).copy_from(&v_t.row(i).transpose());
    }
    Ok(HighestWeightBasis {
        l,
        n,
        sector,
        vectors,
    })
}

/// Sorted spectrum of `op` compressed onto a highest-weight basis.
///
/// The compression of a symmetric operator onto orthonormal columns is
/// symmetric, so this is an ordinary symmetric eigenvalue problem.
pub fn sector_spectrum_with<T: Scalar>(
    op: &SparseOperator<T>,
    basis: &HighestWeightBasis<T>,
) -> Result<Vec<T>> {
    let block = sector_block(op, basis.sector(), basis.sector())?;
    let compressed = basis.vectors().transpose() * block * basis.vectors();
    let symmetrized = (&compressed + compressed.transpose()) * real::<T>(0.5);
    let mut values: Vec<T> = SymmetricEigen::new(symmetrized)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("real energies"));
    Ok(values)
}

/// Smallest eigenvalue of `op` compressed onto a highest-weight basis.
pub fn sector_energy_with<T: Scalar>(
    op: &SparseOperator<T>,
    basis: &HighestWeightBasis<T>,
) -> Result<T> {
    Ok(sector_spectrum_with(op, basis)?[0])
}

/// Reference sector energy: min spectrum of the chain Hamiltonian over the
/// spin-(L/2 − n) component, computed through the raising-kernel compression.
pub fn sector_energy_oracle<T: Scalar>(l: usize, n: usize, aniso: &Anisotropy<T>) -> Result<T> {
    let h = build_xxz_chain_hamiltonian(l, aniso)?;
    let basis = highest_weight_basis(l, n, aniso)?;
    sector_energy_with(&h, &basis)
}

/// Total-spin Casimir `S_tot²` on the full 2^L space (classical, q = 1).
pub fn build_casimir<T: Scalar>(l: usize) -> Result<SparseOperator<T>> {
    check_size(l)?;
    let half: T = real(0.5);
    let mut triplets = Vec::new();
    let constant: T = real(0.75 * l as f64);
    for mask in 0usize..1 << l {
        triplets.push((mask, mask, constant));
        for x in 0..l {
            for y in x + 1..l {
                let bx = l - 1 - x;
                let by = l - 1 - y;
                let sx = mask >> bx & 1;
                let sy = mask >> by & 1;
                if sx == sy {
                    triplets.push((mask, mask, half));
                } else {
                    triplets.push((mask, mask, -half));
                    triplets.push((mask ^ (1 << bx) ^ (1 << by), mask, T::one()));
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(1 << l, triplets, true))
}

/// Energies of `op` in one magnetization sector, resolved by total spin via
/// simultaneous diagonalization with the classical Casimir operator.
///
/// Returns `(2S, sorted energies)` pairs in ascending `2S` order. Valid for
/// any operator commuting with the total spin (q = 1 labeling only).
pub fn spin_resolved_energies<T: Scalar>(
    op: &SparseOperator<T>,
    l: usize,
    two_m: i64,
) -> Result<Vec<(i64, Vec<T>)>> {
    let basis = crate::hilbert::sector_basis(l, two_m)?;
    let op_block = sector_block(op, &basis, &basis)?;
    let casimir = build_casimir::<T>(l)?;
    let casimir_block = sector_block(&casimir, &basis, &basis)?;

    let eigen = SymmetricEigen::new(casimir_block);
    let mut groups: std::collections::BTreeMap<i64, Vec<usize>> = std::collections::BTreeMap::new();
    for (i, &value) in eigen.eigenvalues.iter().enumerate() {
        let v = as_f64(value);
        let s = 0.5 * ((1.0 + 4.0 * v).max(0.0).sqrt() - 1.0);
        let two_s = (2.0 * s).round() as i64;
        let expected = (two_s as f64 / 2.0) * (two_s as f64 / 2.0 + 1.0);
        if (v - expected).abs() > 1e-6 || (two_s - l as i64) % 2 != 0 || two_s < two_m.abs() {
            return Err(FoelError::SpinLabel { value: v });
        }
        groups.entry(two_s).or_default().push(i);
    }

    let mut result = Vec::with_capacity(groups.len());
    for (two_s, indices) in groups {
        let mut projector = DMatrix::zeros(basis.len(), indices.len());
        for (k, &i) in indices.iter().enumerate() {
            projector
                .column_mut(k)
                .copy_from(&eigen.eigenvectors.column(i));
        }
        let compressed = projector.transpose() * &op_block * &projector;
        let symmetrized = (&compressed + compressed.transpose()) * real::<T>(0.5);
        let mut energies: Vec<T> = SymmetricEigen::new(symmetrized)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        energies.sort_by(|a, b| a.partial_cmp(b).expect("real energies"));
        result.push((two_s, energies));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn aniso(d: f64) -> Anisotropy<f64> {
        Anisotropy::from_delta(d).unwrap()
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_from_delta(1.0f64).unwrap().q(), 1.0);
        assert_relative_eq!(q_from_delta(1.25f64).unwrap().q(), 0.5, max_relative = 1e-15);
        assert!(q_from_delta(0.5f64).is_err());
    }

    #[test]
    fn raising_on_one_site_is_plain() {
        let op = build_raising(1, &aniso(3.0)).unwrap();
        assert_eq!(op.entries(), &[(0usize, 1usize, 1.0f64)]);
    }

    #[test]
    fn classical_limit_is_the_unweighted_sum() {
        for op in [
            build_raising(3, &aniso(1.0)).unwrap(),
            build_lowering(3, &aniso(1.0)).unwrap(),
        ] {
            for &(_, _, v) in op.entries() {
                assert_eq!(v, 1.0);
            }
            // one entry per flippable spin over all masks: L 2^{L-1}
            assert_eq!(op.entries().len(), 3 * 4);
        }
    }

    #[test]
    fn generators_commute_with_the_hamiltonian() {
        for d in [1.0, 1.5, 3.0, 5.0] {
            let a = aniso(d);
            for l in 2..=6usize {
                let h = build_xxz_chain_hamiltonian(l, &a).unwrap().to_dense();
                for op in [
                    build_raising(l, &a).unwrap().to_dense(),
                    build_lowering(l, &a).unwrap().to_dense(),
                ] {
                    let comm = &h * &op - &op * &h;
                    assert!(
                        comm.abs().max() < 1e-10,
                        "L = {l}, Δ = {d}: commutator {}",
                        comm.abs().max()
                    );
                }
            }
        }
    }

    #[test]
    fn lowering_is_the_transpose_of_raising_up_to_sector_scale() {
        // Both shift M by -1; on each fixed-M sector they agree up to a
        // global power of q, so their kernels and commutants coincide.
        let a = aniso(2.0);
        let l = 4;
        let low = build_lowering(l, &a).unwrap().to_dense();
        let raise_t = build_raising(l, &a).unwrap().to_dense().transpose();
        for down in 0..l {
            let cols = crate::hilbert::sector_basis(l, l as i64 - 2 * down as i64).unwrap();
            let mut scale_entries: Vec<(f64, f64)> = Vec::new();
            for c in &cols {
                for r in 0..1 << l {
                    let x = low[(r, c.mask() as usize)];
                    let y = raise_t[(r, c.mask() as usize)];
                    if x != 0.0 || y != 0.0 {
                        scale_entries.push((x, y));
                    }
                }
            }
            if let Some(&(x0, y0)) = scale_entries.first() {
                let ratio = x0 / y0;
                for (x, y) in scale_entries {
                    assert_relative_eq!(x / y, ratio, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn multiplicity_formula_and_brute_force_agree() {
        assert_eq!(sector_multiplicity(7, 0).unwrap(), 1);
        assert_eq!(sector_multiplicity(4, 1).unwrap(), 3);
        assert_eq!(sector_multiplicity(6, 2).unwrap(), 9);
        assert_eq!(sector_multiplicity(6, 3).unwrap(), 5);
        assert!(sector_multiplicity(4, 3).is_err());

        // Independent brute force: choose 2n sites, try all pairings,
        // keep noncrossing ones with no arc over an unpaired site.
        type Pairings = Vec<Vec<(usize, usize)>>;
        fn brute(l: usize, n: usize) -> usize {
            fn pairings(sites: &[usize]) -> Pairings {
                if sites.is_empty() {
                    return vec![Vec::new()];
                }
                let first = sites[0];
                let mut out = Vec::new();
                for k in 1..sites.len() {
                    let mate = sites[k];
                    let rest: Vec<usize> = sites[1..]
                        .iter()
                        .copied()
                        .filter(|&s| s != mate)
                        .collect();
                    for mut tail in pairings(&rest) {
                        tail.push((first, mate));
                        out.push(tail);
                    }
                }
                out
            }
            let mut count = 0;
            let mut chosen = Vec::new();
            fn subsets(
                start: usize,
                l: usize,
                need: usize,
                chosen: &mut Vec<usize>,
                count: &mut usize,
                pair_fn: &dyn Fn(&[usize]) -> Pairings,
            ) {
                if need == 0 {
                    for arcs in pair_fn(chosen) {
                        let paired: std::collections::HashSet<usize> =
                            arcs.iter().flat_map(|&(a, b)| [a, b]).collect();
                        let noncrossing = arcs.iter().all(|&(i, j)| {
                            let (i, j) = (i.min(j), i.max(j));
                            arcs.iter().all(|&(k, m)| {
                                let (k, m) = (k.min(m), k.max(m));
                                !(i < k && k < j && j < m)
                            })
                        });
                        let no_span = arcs.iter().all(|&(i, j)| {
                            let (i, j) = (i.min(j), i.max(j));
                            (i + 1..j).all(|s| paired.contains(&s))
                        });
                        if noncrossing && no_span {
                            *count += 1;
                        }
                    }
                    return;
                }
                for s in start..l {
                    chosen.push(s);
                    subsets(s + 1, l, need - 1, chosen, count, pair_fn);
                    chosen.pop();
                }
            }
            subsets(0, l, 2 * n, &mut chosen, &mut count, &pairings);
            count
        }
        for (l, n) in [(4, 1), (6, 2), (6, 3), (5, 2), (7, 3)] {
            assert_eq!(brute(l, n), sector_multiplicity(l, n).unwrap(), "({l},{n})");
        }
    }

    #[test]
    fn descendant_completeness() {
        for l in 1..=20usize {
            let total: u128 = (0..=l / 2)
                .map(|n| {
                    sector_multiplicity(l, n).unwrap() as u128 * (l as u128 - 2 * n as u128 + 1)
                })
                .sum();
            assert_eq!(total, 1u128 << l, "L = {l}");
        }
    }

    #[test]
    fn highest_weight_dimensions() {
        for d in [1.0, 1.5, 3.0] {
            let a = aniso(d);
            for l in 2..=8usize {
                for n in 0..=l / 2 {
                    let basis = highest_weight_basis(l, n, &a).unwrap();
                    assert_eq!(basis.multiplicity(), sector_multiplicity(l, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn highest_weight_vectors_are_annihilated_and_orthonormal() {
        for d in [1.0, 1.5, 3.0] {
            let a = aniso(d);
            for l in 2..=6usize {
                let raising = build_raising(l, &a).unwrap();
                for n in 0..=l / 2 {
                    let basis = highest_weight_basis(l, n, &a).unwrap();
                    let gram = basis.vectors().transpose() * basis.vectors();
                    assert!(
                        (gram - DMatrix::<f64>::identity(basis.multiplicity(), basis.multiplicity()))
                            .abs()
                            .max()
                            < 1e-12
                    );
                    for k in 0..basis.multiplicity() {
                        let v = basis.full_vector(k);
                        assert!(raising.apply(&v).norm() < 1e-10, "L={l} n={n} Δ={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_deviation_basis_is_the_all_up_state() {
        let basis = highest_weight_basis(5, 0, &aniso(2.0)).unwrap();
        assert_eq!(basis.multiplicity(), 1);
        let v = basis.full_vector(0);
        assert_eq!(v[0], 1.0);
        assert_eq!(v.norm(), 1.0);
    }

    #[test]
    fn oracle_examples() {
        for d in [1.0, 1.5, 3.0] {
            assert!(sector_energy_oracle(5, 0, &aniso(d)).unwrap().abs() < 1e-12);
        }
        let e41 = sector_energy_oracle(4, 1, &aniso(1.0)).unwrap();
        assert_relative_eq!(e41, 1.0 - (PI / 4.0).cos(), epsilon = 1e-12);
        let e42 = sector_energy_oracle(4, 2, &aniso(1.0)).unwrap();
        assert_relative_eq!(e42, (3.0 - 3.0f64.sqrt()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn oracle_is_basis_independent() {
        // Rotating the kernel basis by any orthogonal matrix leaves the
        // compression spectrum unchanged.
        let a = aniso(1.5);
        let (l, n) = (6, 2);
        let h = build_xxz_chain_hamiltonian(l, &a).unwrap();
        let basis = highest_weight_basis(l, n, &a).unwrap();
        let reference = sector_energy_with(&h, &basis).unwrap();

        let m = basis.multiplicity();
        let seed = DMatrix::from_fn(m, m, |i, j| ((i * 31 + j * 17 + 7) % 13) as f64 - 6.0);
        let rotation = seed.qr().q();
        let rotated = HighestWeightBasis {
            l,
            n,
            sector: basis.sector().to_vec(),
            vectors: basis.vectors() * rotation,
        };
        let shuffled = sector_energy_with(&h, &rotated).unwrap();
        assert_relative_eq!(reference, shuffled, epsilon = 1e-10);
    }

    #[test]
    fn casimir_labeling_matches_the_kernel_route_at_q_one() {
        let a = aniso(1.0);
        for l in 2..=8usize {
            let h = build_xxz_chain_hamiltonian(l, &a).unwrap();
            for n in 0..=l / 2 {
                let basis = highest_weight_basis(l, n, &a).unwrap();
                let kernel_energy = sector_energy_with(&h, &basis).unwrap();
                let two_m = l as i64 - 2 * n as i64;
                let levels = spin_resolved_energies(&h, l, two_m).unwrap();
                let casimir_energy = levels
                    .iter()
                    .find(|(two_s, _)| *two_s == two_m)
                    .map(|(_, es)| es[0])
                    .unwrap();
                assert_relative_eq!(kernel_energy, casimir_energy, epsilon = 1e-9);
            }
        }
    }
}
