//! Full Hilbert-space machinery for spin-1/2 models: basis enumeration,
//! magnetization sectors, the XXZ chain Hamiltonian with kink boundary
//! fields, and the XXX ferromagnet on trees.
//!
//! Conventions: sites are 0-indexed left to right; site 0 occupies the most
//! significant bit of the basis mask and a set bit means spin down. The
//! two-site basis order is `(++, +-, -+, --)`, i.e. masks 0..3.

use nalgebra::{DMatrix, Matrix4};

use crate::error::{FoelError, Result};
use crate::lattice::TreeGraph;
use crate::scalar::{as_f64, real, Scalar};

/// Largest chain built on the full 2^L product space.
pub const FULL_SPACE_MAX_L: usize = 14;
/// Largest chain for sector-restricted (combinatorial) work.
pub const SECTOR_MAX_L: usize = 20;
/// Largest dense block extracted from a sector restriction.
pub const SECTOR_DENSE_MAX: usize = 4096;

/// One basis vector of the 2^L product space: an L-bit word, set bit = down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration {
    mask: u32,
    l: u8,
}

impl SpinConfiguration {
    pub fn new(mask: u32, l: usize) -> SpinConfiguration {
        debug_assert!(l <= 32 && u64::from(mask) < 1u64 << l);
        SpinConfiguration { mask, l: l as u8 }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.l as usize
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    /// Is the spin at `site` (0-indexed from the left) down?
    pub fn is_down(&self, site: usize) -> bool {
        debug_assert!(site < self.len());
        self.mask >> (self.len() - 1 - site) & 1 == 1
    }

    /// Number of down spins (the deviation count n).
    pub fn down_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Twice the magnetization: 2M = L - 2 * (down spins).
    pub fn two_m(&self) -> i64 {
        self.len() as i64 - 2 * self.down_count() as i64
    }
}

/// Anisotropy Δ ≥ 1 together with the deformation q ∈ (0, 1],
/// Δ = (q + 1/q)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anisotropy<T: Scalar> {
    delta: T,
    q: T,
}

impl<T: Scalar> Anisotropy<T> {
    /// From Δ ≥ 1; q is the root of Δ = (q + 1/q)/2 in (0, 1],
    /// evaluated as 1/(Δ + sqrt(Δ² − 1)) = Δ − sqrt(Δ² − 1).
    pub fn from_delta(delta: T) -> Result<Anisotropy<T>> {
        if !(delta >= T::one() && delta.is_finite()) {
            return Err(FoelError::InvalidAnisotropy(as_f64(delta)));
        }
        let q = T::one() / (delta + (delta * delta - T::one()).sqrt());
        Ok(Anisotropy { delta, q })
    }

    /// From q ∈ (0, 1].
    pub fn from_q(q: T) -> Result<Anisotropy<T>> {
        if !(q > T::zero() && q <= T::one()) {
            return Err(FoelError::InvalidAnisotropy(as_f64(q)));
        }
        let delta = (q + T::one() / q) / real(2.0);
        Ok(Anisotropy { delta, q })
    }

    /// The isotropic point Δ = 1, q = 1.
    pub fn isotropic() -> Anisotropy<T> {
        Anisotropy {
            delta: T::one(),
            q: T::one(),
        }
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// The kink-field coefficient sqrt(1 − Δ⁻²) = (q⁻¹ − q)/(q⁻¹ + q).
    pub fn kink(&self) -> T {
        let inv = T::one() / self.delta;
        (T::one() - inv * inv).max(T::zero()).sqrt()
    }
}

/// Real sparse operator on the full or sector-restricted space, in
/// assembled triplet form (row-major sorted, one entry per position).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<T: Scalar> {
    dimension: usize,
    entries: Vec<(usize, usize, T)>,
    symmetric: bool,
}

impl<T: Scalar> SparseOperator<T> {
    /// Assemble from raw triplets: duplicates are summed, exact zeros dropped.
    pub fn from_triplets(
        dimension: usize,
        mut triplets: Vec<(usize, usize, T)>,
        symmetric: bool,
    ) -> SparseOperator<T> {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(usize, usize, T)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < dimension && c < dimension);
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|&(_, _, v)| v != T::zero());
        SparseOperator {
            dimension,
            entries,
            symmetric,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn is_symmetric_flagged(&self) -> bool {
        self.symmetric
    }

    /// Dense form; intended for small dimensions only.
    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &nalgebra::DVector<T>) -> nalgebra::DVector<T> {
        debug_assert_eq!(v.len(), self.dimension);
        let mut out = nalgebra::DVector::zeros(self.dimension);
        for &(r, c, a) in &self.entries {
            out[r] += a * v[c];
        }
        out
    }

    /// Triplet text dump, one `row col value` line per entry; values use
    /// the shortest round-trip float format.
    pub fn to_triplet_text(&self) -> String {
        let mut s = String::new();
        for &(r, c, v) in &self.entries {
            s.push_str(&format!("{} {} {}\n", r, c, as_f64(v)));
        }
        s
    }
}

/// Matrix of the two-site interaction
/// `h = j² − S³S³ − Δ⁻¹(S¹S¹ + S²S²) + j sqrt(1−Δ⁻²)(S³⊗1 − 1⊗S³)`,
/// j = 1/2, in the ordered basis `(++, +-, -+, --)`.
///
/// This is the rank-one projector onto the bracket
/// `q^{-1/2}|+-> − q^{1/2}|-+>` (normalized).
pub fn interaction_matrix<T: Scalar>(aniso: &Anisotropy<T>) -> Matrix4<T> {
    let half: T = real(0.5);
    let a = aniso.kink();
    let hop = -T::one() / (real::<T>(2.0) * aniso.delta());
    let mut h = Matrix4::zeros();
    h[(1, 1)] = half + half * a;
    h[(2, 2)] = half - half * a;
    h[(1, 2)] = hop;
    h[(2, 1)] = hop;
    h
}

fn check_full_space(l: usize) -> Result<()> {
    if l > FULL_SPACE_MAX_L {
        return Err(FoelError::SizeLimit {
            what: "full product space",
            size: l,
            max: FULL_SPACE_MAX_L,
        });
    }
    Ok(())
}

/// Apply a two-site 4x4 term on sites `(x, y)` of every basis mask,
/// collecting triplets. Only the `(++,+-,-+,--)` pattern of
/// [`interaction_matrix`] (diagonal plus middle-block swap) is supported.
fn accumulate_two_site<T: Scalar>(
    triplets: &mut Vec<(usize, usize, T)>,
    l: usize,
    x: usize,
    y: usize,
    h: &Matrix4<T>,
) {
    let bx = l - 1 - x;
    let by = l - 1 - y;
    for mask in 0usize..1 << l {
        let local = ((mask >> bx & 1) << 1) | (mask >> by & 1);
        let diag = h[(local, local)];
        if diag != T::zero() {
            triplets.push((mask, mask, diag));
        }
        if local == 1 || local == 2 {
            let flipped = mask ^ (1 << bx) ^ (1 << by);
            let v = h[(3 - local, local)];
            if v != T::zero() {
                triplets.push((flipped, mask, v));
            }
        }
    }
}

/// XXZ chain Hamiltonian `H = Σ_{x} h_{x,x+1}` on the full 2^L space.
pub fn build_xxz_chain_hamiltonian<T: Scalar>(
    l: usize,
    aniso: &Anisotropy<T>,
) -> Result<SparseOperator<T>> {
    if l < 2 {
        return Err(FoelError::ChainTooShort(l));
    }
    check_full_space(l)?;
    let h = interaction_matrix(aniso);
    let mut triplets = Vec::new();
    for x in 0..l - 1 {
        accumulate_two_site(&mut triplets, l, x, x + 1, &h);
    }
    Ok(SparseOperator::from_triplets(1 << l, triplets, true))
}

/// XXX ferromagnet `H = Σ_{x~y} [1/4 − S_x·S_y]` on a tree; equals the
/// Δ = 1 chain Hamiltonian when the tree is a path.
pub fn build_xxx_graph_hamiltonian<T: Scalar>(tree: &TreeGraph) -> Result<SparseOperator<T>> {
    let l = tree.vertex_count();
    if l < 2 {
        return Err(FoelError::ChainTooShort(l));
    }
    check_full_space(l)?;
    let h = interaction_matrix(&Anisotropy::isotropic());
    let mut triplets = Vec::new();
    for &(u, v) in tree.edges() {
        accumulate_two_site(&mut triplets, l, u, v, &h);
    }
    Ok(SparseOperator::from_triplets(1 << l, triplets, true))
}

/// All configurations with magnetization `2M = two_m`, ascending by mask.
pub fn sector_basis(l: usize, two_m: i64) -> Result<Vec<SpinConfiguration>> {
    if l == 0 || l > SECTOR_MAX_L {
        return Err(FoelError::SizeLimit {
            what: "sector enumeration",
            size: l,
            max: SECTOR_MAX_L,
        });
    }
    let li = l as i64;
    if two_m.abs() > li || (li - two_m) % 2 != 0 {
        return Err(FoelError::InvalidSector { l, two_m });
    }
    let down = ((li - two_m) / 2) as u32;
    Ok((0u32..1 << l)
        .filter(|m| m.count_ones() == down)
        .map(|m| SpinConfiguration::new(m, l))
        .collect())
}

/// Sector basis addressed by the deviation count `n` (2M = L − 2n).
pub fn sector_basis_by_deviations(l: usize, n: usize) -> Result<Vec<SpinConfiguration>> {
    if n > l / 2 {
        return Err(FoelError::InvalidDeviation { l, n });
    }
    sector_basis(l, l as i64 - 2 * n as i64)
}

/// Rectangular block of `op` from the `cols` sector into the `rows` sector.
///
/// Every stored entry whose column lies in `cols` must have its row in
/// `rows`; a violation above `1e-12` is a sector leak.
pub(crate) fn sector_block<T: Scalar>(
    op: &SparseOperator<T>,
    rows: &[SpinConfiguration],
    cols: &[SpinConfiguration],
) -> Result<DMatrix<T>> {
    let row_index: std::collections::HashMap<u32, usize> = rows
        .iter()
        .enumerate()
        .map(|(i, c)| (c.mask(), i))
        .collect();
    let col_index: std::collections::HashMap<u32, usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| (c.mask(), i))
        .collect();
    let tolerance: T = real(1e-12);
    let mut block = DMatrix::zeros(rows.len(), cols.len());
    for &(r, c, v) in op.entries() {
        let Some(&j) = col_index.get(&(c as u32)) else {
            continue;
        };
        match row_index.get(&(r as u32)) {
            Some(&i) => block[(i, j)] += v,
            None => {
                if v.abs() > tolerance {
                    return Err(FoelError::SectorLeak {
                        row: r,
                        col: c,
                        magnitude: as_f64(v.abs()),
                    });
                }
            }
        }
    }
    Ok(block)
}

/// Matrix of `op` on `sector_basis(l, two_m)`; exact block extraction.
///
/// Errors if `op` maps the sector outside itself (entries above `1e-12`).
pub fn restrict_to_sector<T: Scalar>(
    op: &SparseOperator<T>,
    l: usize,
    two_m: i64,
) -> Result<DMatrix<T>> {
    let basis = sector_basis(l, two_m)?;
    if basis.len() > SECTOR_DENSE_MAX {
        return Err(FoelError::SizeLimit {
            what: "dense sector block",
            size: basis.len(),
            max: SECTOR_DENSE_MAX,
        });
    }
    sector_block(op, &basis, &basis)
}
