//! Generalized Hulthén bracket basis: noncrossing arc diagrams, the
//! Temperley-Lieb graphical action of the bond interaction, the sector
//! matrices `A_{L,n}`, their embedding structure, and the realization of
//! diagram vectors in the product space.
//!
//! The module works at the level of the bond interaction `h` itself, with
//! graphical rule coefficients `{0, -1/(2Δ), +1}`. Writing `U := -2Δ·h`
//! recovers a Temperley-Lieb generator family with `U² = -2Δ·U`, but only
//! the `h`-level rules are used; they are pinned against the product-space
//! representation by the consistency tests.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{FoelError, Result};
use crate::hilbert::{
    sector_basis_by_deviations, Anisotropy, SpinConfiguration, FULL_SPACE_MAX_L, SECTOR_MAX_L,
};
use crate::quantum_group::sector_multiplicity;
use crate::scalar::{as_f64, real, Scalar};

/// A noncrossing pairing of `n` arcs over `L` linearly ordered sites with
/// no arc spanning an unpaired site. Sites are 0-indexed internally; the
/// text dump format is 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArcDiagram {
    l: usize,
    partner: Vec<Option<usize>>,
    arc_count: usize,
}

impl ArcDiagram {
    /// Validated construction from an arc list.
    pub fn new(l: usize, arcs: &[(usize, usize)]) -> Result<ArcDiagram> {
        let mut partner = vec![None; l];
        for &(i, j) in arcs {
            for s in [i, j] {
                if s >= l {
                    return Err(FoelError::VertexOutOfRange {
                        vertex: s,
                        count: l,
                    });
                }
            }
            if i == j {
                return Err(FoelError::SelfLoop(i));
            }
            if partner[i].is_some() || partner[j].is_some() {
                return Err(FoelError::DuplicateEdge(i.min(j), i.max(j)));
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
        }
        let diagram = ArcDiagram {
            l,
            partner,
            arc_count: arcs.len(),
        };
        diagram.check_valid()?;
        Ok(diagram)
    }

    /// The empty diagram (all sites unpaired).
    pub fn empty(l: usize) -> ArcDiagram {
        ArcDiagram {
            l,
            partner: vec![None; l],
            arc_count: 0,
        }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn partner(&self, site: usize) -> Option<usize> {
        self.partner.get(site).copied().flatten()
    }

    pub fn is_paired(&self, site: usize) -> bool {
        self.partner(site).is_some()
    }

    /// Arcs as `(min, max)` pairs in ascending order (the canonical key).
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<(usize, usize)> = self
            .partner
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| p.filter(|&j| i < j).map(|j| (i, j)))
            .collect();
        arcs.sort_unstable();
        arcs
    }

    /// Checks the involution, noncrossing, and no-spanned-unpaired-site
    /// invariants.
    pub fn check_valid(&self) -> Result<()> {
        for (i, &p) in self.partner.iter().enumerate() {
            if let Some(j) = p {
                if j >= self.l || j == i || self.partner[j] != Some(i) {
                    return Err(FoelError::BadIndexMap(i, "partner map is not an involution"));
                }
            }
        }
        let arcs = self.arcs();
        if arcs.len() != self.arc_count {
            return Err(FoelError::BadIndexMap(
                self.arc_count,
                "arc count disagrees with partner map",
            ));
        }
        for &(i, j) in &arcs {
            for &(k, m) in &arcs {
                if i < k && k < j && j < m {
                    return Err(FoelError::BadIndexMap(k, "arcs cross"));
                }
            }
            for s in i + 1..j {
                match self.partner[s] {
                    Some(t) if t > i && t < j => {}
                    _ => {
                        return Err(FoelError::BadIndexMap(
                            s,
                            "arc spans an unpaired or outward-paired site",
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    /// Same arcs on `L+1` sites; the appended site is unpaired and lies
    /// outside every arc, so validity is preserved.
    pub fn embed(&self) -> ArcDiagram {
        let mut partner = self.partner.clone();
        partner.push(None);
        ArcDiagram {
            l: self.l + 1,
            partner,
            arc_count: self.arc_count,
        }
    }

    /// Dump form, 1-indexed: `(1,2)(3,4)`.
    pub fn dump(&self) -> String {
        self.arcs()
            .iter()
            .map(|&(i, j)| format!("({},{})", i + 1, j + 1))
            .collect()
    }
}

impl std::fmt::Display for ArcDiagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.dump())
    }
}

/// Recursive enumeration over the site window `[lo, hi)`: the first site is
/// either unpaired, or arced to a compatible partner with the enclosed
/// block perfectly paired.
fn enumerate_arcs(lo: usize, hi: usize, n: usize, out_prefix: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    let len = hi - lo;
    if 2 * n > len {
        return;
    }
    if n == 0 {
        out.push(out_prefix.clone());
        return;
    }
    // Site `lo` unpaired: later arcs lie beyond it and cannot span it.
    enumerate_arcs(lo + 1, hi, n, out_prefix, out);
    // Site `lo` arced to `t`: the interior (lo, t) must be perfectly paired.
    for t in lo + 1..hi {
        let interior = t - lo - 1;
        if !interior.is_multiple_of(2) {
            continue;
        }
        let inside = interior / 2;
        if inside + 1 > n {
            continue;
        }
        let mut interiors = Vec::new();
        let mut scratch = Vec::new();
        enumerate_arcs(lo + 1, t, inside, &mut scratch, &mut interiors);
        for interior_arcs in interiors {
            out_prefix.push((lo, t));
            out_prefix.extend_from_slice(&interior_arcs);
            enumerate_arcs(t + 1, hi, n - 1 - inside, out_prefix, out);
            out_prefix.truncate(out_prefix.len() - 1 - interior_arcs.len());
        }
    }
}

/// All valid diagrams for `(L, n)` in canonical order (lexicographic on the
/// sorted arc list). The count equals `sector_multiplicity(L, n)`.
pub fn enumerate_diagrams(l: usize, n: usize) -> Result<Vec<ArcDiagram>> {
    if l == 0 || l > SECTOR_MAX_L {
        return Err(FoelError::SizeLimit {
            what: "diagram enumeration",
            size: l,
            max: SECTOR_MAX_L,
        });
    }
    if n > l / 2 {
        return Err(FoelError::InvalidDeviation { l, n });
    }
    let mut raw = Vec::new();
    enumerate_arcs(0, l, n, &mut Vec::new(), &mut raw);
    let mut keyed: Vec<Vec<(usize, usize)>> = raw
        .into_iter()
        .map(|mut arcs| {
            arcs.sort_unstable();
            arcs
        })
        .collect();
    keyed.sort();
    let diagrams: Vec<ArcDiagram> = keyed
        .into_iter()
        .map(|arcs| ArcDiagram::new(l, &arcs).expect("enumerated diagram is valid"))
        .collect();
    debug_assert_eq!(diagrams.len(), sector_multiplicity(l, n)?);
    Ok(diagrams)
}

/// Indices of the `(L, n)` diagrams inside the `(L+1, n)` canonical order
/// under [`ArcDiagram::embed`]; the images are exactly the diagrams that do
/// not touch site `L+1`.
pub fn embedding_indices(l: usize, n: usize) -> Result<Vec<usize>> {
    let small = enumerate_diagrams(l, n)?;
    let large = enumerate_diagrams(l + 1, n)?;
    let index: HashMap<Vec<(usize, usize)>, usize> = large
        .iter()
        .enumerate()
        .map(|(i, d)| (d.arcs(), i))
        .collect();
    small
        .iter()
        .map(|d| {
            index
                .get(&d.embed().arcs())
                .copied()
                .ok_or(FoelError::BadIndexMap(l, "embedded diagram not found"))
        })
        .collect()
}

/// Action of the single-bond interaction `h_{i,i+1}` on the diagram vector
/// `φ_α`, expressed in the diagram basis. `bond` is 0-indexed and couples
/// sites `bond` and `bond + 1`.
///
/// * both sites unpaired → `None` (the interaction kills `|++>`);
/// * arc `(i, i+1)` present → `Some((1, α))` (`h` projects onto the bracket);
/// * otherwise → `Some((-1/(2Δ), β))` where `β` is the Temperley-Lieb
///   composition: the new arc `(i, i+1)` is created and the former partners
///   are joined (or freed, if only one side was paired).
pub fn h_action<T: Scalar>(
    bond: usize,
    diagram: &ArcDiagram,
    delta: T,
) -> Result<Option<(T, ArcDiagram)>> {
    let l = diagram.l();
    if bond + 1 >= l {
        return Err(FoelError::BondOutOfRange { bond, l });
    }
    let i = bond;
    let j = bond + 1;
    let pi = diagram.partner(i);
    let pj = diagram.partner(j);
    match (pi, pj) {
        (None, None) => Ok(None),
        (Some(p), _) if p == j => Ok(Some((T::one(), diagram.clone()))),
        _ => {
            let mut partner = diagram.partner.clone();
            if let Some(p) = pi {
                partner[p] = None;
            }
            if let Some(p) = pj {
                partner[p] = None;
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
            if let (Some(a), Some(b)) = (pi, pj) {
                partner[a] = Some(b);
                partner[b] = Some(a);
            }
            // One or two arcs are consumed and the same number created, so
            // the arc count is unchanged either way.
            let result = ArcDiagram {
                l,
                partner,
                arc_count: diagram.arc_count,
            };
            debug_assert!(result.check_valid().is_ok());
            let coefficient = -T::one() / (real::<T>(2.0) * delta);
            Ok(Some((coefficient, result)))
        }
    }
}

/// The matrix `A_{L,n}` of the Hamiltonian in the generalized Hulthén
/// basis: generally non-symmetric, with non-positive off-diagonal entries
/// and integer diagonal (the number of adjacent arcs).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix<T: Scalar> {
    l: usize,
    n: usize,
    delta: T,
    diagrams: Vec<ArcDiagram>,
    entries: DMatrix<T>,
}

impl<T: Scalar> SectorMatrix<T> {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// The canonical diagram order indexing rows and columns.
    pub fn diagrams(&self) -> &[ArcDiagram] {
        &self.diagrams
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// Dense CSV form; values use the shortest round-trip float format.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|c| format!("{}", as_f64(self.entries[(r, c)])))
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Assemble `A_{L,n}` column by column from the graphical rules:
/// column α collects `h_action(i, α)` over all bonds.
pub fn sector_matrix<T: Scalar>(l: usize, n: usize, delta: T) -> Result<SectorMatrix<T>> {
    if !(delta >= T::one() && delta.is_finite()) {
        return Err(FoelError::InvalidAnisotropy(as_f64(delta)));
    }
    let diagrams = enumerate_diagrams(l, n)?;
    let index: HashMap<Vec<(usize, usize)>, usize> = diagrams
        .iter()
        .enumerate()
        .map(|(i, d)| (d.arcs(), i))
        .collect();
    let dim = diagrams.len();
    let mut entries = DMatrix::zeros(dim, dim);
    for (col, alpha) in diagrams.iter().enumerate() {
        for bond in 0..l - 1 {
            if let Some((coefficient, beta)) = h_action(bond, alpha, delta)? {
                let row = *index
                    .get(&beta.arcs())
                    .expect("graphical action stays inside the diagram family");
                entries[(row, col)] += coefficient;
            }
        }
    }
    Ok(SectorMatrix {
        l,
        n,
        delta,
        diagrams,
        entries,
    })
}

/// The generalized Hulthén bracket `φ_α` in the full 2^L space: a factor
/// `|+>` on each unpaired site and `q^{-1/2}|+>_i|->_j − q^{1/2}|->_i|+>_j`
/// on each arc `(i, j)`.
pub fn hulthen_vector<T: Scalar>(diagram: &ArcDiagram, aniso: &Anisotropy<T>) -> Result<DVector<T>> {
    let l = diagram.l();
    if l > FULL_SPACE_MAX_L {
        return Err(FoelError::SizeLimit {
            what: "full product space",
            size: l,
            max: FULL_SPACE_MAX_L,
        });
    }
    let mut out = DVector::zeros(1 << l);
    expand_bracket(diagram, aniso, |mask, coefficient| {
        out[mask as usize] += coefficient;
    });
    Ok(out)
}

/// Same bracket restricted to its magnetization sector's coordinates.
pub fn hulthen_vector_in_sector<T: Scalar>(
    diagram: &ArcDiagram,
    aniso: &Anisotropy<T>,
    sector: &[SpinConfiguration],
) -> DVector<T> {
    let index: HashMap<u32, usize> = sector
        .iter()
        .enumerate()
        .map(|(i, c)| (c.mask(), i))
        .collect();
    let mut out = DVector::zeros(sector.len());
    expand_bracket(diagram, aniso, |mask, coefficient| {
        out[*index.get(&mask).expect("bracket stays in its sector")] += coefficient;
    });
    out
}

fn expand_bracket<T: Scalar>(
    diagram: &ArcDiagram,
    aniso: &Anisotropy<T>,
    mut emit: impl FnMut(u32, T),
) {
    let l = diagram.l();
    let arcs = diagram.arcs();
    let sqrt_q = aniso.q().sqrt();
    let inv_sqrt_q = T::one() / sqrt_q;
    for choice in 0usize..1 << arcs.len() {
        let mut mask = 0u32;
        let mut coefficient = T::one();
        for (k, &(i, j)) in arcs.iter().enumerate() {
            if choice >> k & 1 == 1 {
                mask |= 1 << (l - 1 - i);
                coefficient *= -sqrt_q;
            } else {
                mask |= 1 << (l - 1 - j);
                coefficient *= inv_sqrt_q;
            }
        }
        emit(mask, coefficient);
    }
}

/// Gram matrix `G[α,β] = <φ_α, φ_β>` of the bracket family; positive
/// definite because the brackets are linearly independent.
pub fn gram_matrix<T: Scalar>(l: usize, n: usize, aniso: &Anisotropy<T>) -> Result<DMatrix<T>> {
    let diagrams = enumerate_diagrams(l, n)?;
    let sector = sector_basis_by_deviations(l, n)?;
    let mut family = DMatrix::zeros(sector.len(), diagrams.len());
    for (k, diagram) in diagrams.iter().enumerate() {
        family
            .column_mut(k)
            .copy_from(&hulthen_vector_in_sector(diagram, aniso, &sector));
    }
    let gram = family.transpose() * family;
    let smallest = nalgebra::SymmetricEigen::new(gram.clone()).eigenvalues.min();
    if smallest <= T::zero() {
        return Err(FoelError::GramNotPositiveDefinite(as_f64(smallest)));
    }
    Ok(gram)
}
