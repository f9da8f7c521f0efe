//! Theorem-level verification suites: the sector energy table over both
//! pipelines, level-ordering and volume-monotonicity checks, the
//! spectral-gap formula, tree theorems, and the Lieb-Mattis scan.

pub mod lieb_mattis;
pub mod trees;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FoelError, Result};
use crate::hilbert::{build_xxz_chain_hamiltonian, Anisotropy};
use crate::quantum_group::{highest_weight_basis, sector_energy_with, sector_multiplicity};
use crate::scalar::{as_f64, real, Scalar};
use crate::spectra::{smallest_eigenvalue_perron, PowerSettings};
use crate::tl_diagrams::sector_matrix;

pub use lieb_mattis::{lieb_mattis_scan, LiebMattisModel, LiebMattisReport};
pub use trees::{tree_foel_level1, tree_gap_monotonicity, tree_sector_energies, TreeFoelReport, TreeGrowthReport};

/// Largest chain for the compression (oracle) pipeline.
pub const ORACLE_MAX_L: usize = 10;
/// Largest chain for the diagram pipeline.
pub const DIAGRAM_MAX_L: usize = 16;
/// Deviation cap for the diagram pipeline beyond the oracle range.
pub const DIAGRAM_DEVIATION_CAP: usize = 4;
/// Strictness tolerance for ordering assertions.
pub const DEFAULT_STRICT_TOLERANCE: f64 = 1e-8;
/// Agreement tolerance between the two pipelines.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-9;
/// Slack tolerance for the inductive inequality.
pub const KN_TOLERANCE: f64 = 1e-10;
/// Default anisotropy grid.
pub const DEFAULT_DELTA_GRID: [f64; 6] = [1.0, 1.25, 1.5, 2.0, 3.0, 5.0];

/// Which pipeline produced a table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DiagramBasis,
    Oracle,
    Both,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::DiagramBasis => "diagram-basis",
            Method::Oracle => "oracle",
            Method::Both => "both",
        }
    }
}

/// One sector energy with its matrix dimension and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyEntry<T: Scalar> {
    pub energy: T,
    pub dimension: usize,
    pub method: Method,
}

/// Map `(L, n) → (energy, dimension, method)` at a fixed anisotropy.
#[derive(Debug, Clone)]
pub struct EnergyTable<T: Scalar> {
    delta: T,
    entries: BTreeMap<(usize, usize), EnergyEntry<T>>,
}

impl<T: Scalar> EnergyTable<T> {
    /// Assemble a table from precomputed entries.
    pub fn from_entries(
        delta: T,
        entries: impl IntoIterator<Item = ((usize, usize), EnergyEntry<T>)>,
    ) -> EnergyTable<T> {
        EnergyTable {
            delta,
            entries: entries.into_iter().collect(),
        }
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn get(&self, l: usize, n: usize) -> Option<&EnergyEntry<T>> {
        self.entries.get(&(l, n))
    }

    pub fn energy(&self, l: usize, n: usize) -> Result<T> {
        self.entries
            .get(&(l, n))
            .map(|e| e.energy)
            .ok_or(FoelError::MissingEntry { l, n })
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), EnergyEntry<T>> {
        &self.entries
    }

    pub fn l_values(&self) -> Vec<usize> {
        let mut ls: Vec<usize> = self.entries.keys().map(|&(l, _)| l).collect();
        ls.dedup();
        ls
    }

    /// Deviation counts present for a given `L`, ascending.
    pub fn n_values(&self, l: usize) -> Vec<usize> {
        self.entries
            .range((l, 0)..(l + 1, 0))
            .map(|(&(_, n), _)| n)
            .collect()
    }

    /// The lower nondecreasing hull `min_{r ≥ n} E(L, r)` of one row.
    pub fn lower_hull(&self, l: usize) -> Vec<T> {
        let ns = self.n_values(l);
        let mut hull: Vec<T> = ns
            .iter()
            .map(|&n| self.entries[&(l, n)].energy)
            .collect();
        for i in (0..hull.len().saturating_sub(1)).rev() {
            hull[i] = hull[i].min(hull[i + 1]);
        }
        hull
    }

    /// CSV with header `L,n,delta,energy,dim,method`; energies carry
    /// 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L,n,delta,energy,dim,method\n");
        for (&(l, n), entry) in &self.entries {
            out.push_str(&format!(
                "{},{},{},{:.11e},{},{}\n",
                l,
                n,
                as_f64(self.delta),
                as_f64(entry.energy),
                entry.dimension,
                entry.method.label()
            ));
        }
        out
    }
}

/// Smallest eigenvalue of `A_{L,n}`: the diagram-pipeline sector energy.
///
/// Within the dense-general range the Perron shift runs first (with its
/// dense fallback). Beyond it the power iteration can stall on clustered
/// low levels at strong anisotropy, so the matrix is mapped to the
/// symmetric `Lᵀ A L⁻ᵀ = L⁻¹(GA)L⁻ᵀ` through the Cholesky factor of the
/// bracket Gram matrix `G = LLᵀ` (same spectrum, `GA` symmetric).
pub fn diagram_energy<T: Scalar>(l: usize, n: usize, aniso: &Anisotropy<T>) -> Result<T> {
    let a = sector_matrix(l, n, aniso.delta())?;
    if a.dimension() <= crate::spectra::DENSE_GENERAL_MAX {
        let settings = PowerSettings {
            max_iterations: 30_000,
            ..PowerSettings::default()
        };
        return Ok(smallest_eigenvalue_perron(a.entries(), &settings)?.smallest_eigenvalue);
    }
    gram_symmetrized_smallest(l, n, aniso, &a)
}

/// Smallest eigenvalue of `A_{L,n}` through the symmetric similar matrix
/// `L⁻¹(GA)L⁻ᵀ`, `G = LLᵀ` the bracket Gram matrix.
fn gram_symmetrized_smallest<T: Scalar>(
    l: usize,
    n: usize,
    aniso: &Anisotropy<T>,
    a: &crate::tl_diagrams::SectorMatrix<T>,
) -> Result<T> {
    let gram = crate::tl_diagrams::gram_matrix(l, n, aniso)?;
    let ga = &gram * a.entries();
    let ga = (&ga + ga.transpose()) * real::<T>(0.5);
    let cholesky = gram
        .cholesky()
        .ok_or(FoelError::GramNotPositiveDefinite(f64::NAN))?;
    let half_solved = cholesky
        .l()
        .solve_lower_triangular(&ga)
        .ok_or(FoelError::GramNotPositiveDefinite(f64::NAN))?;
    let similar = cholesky
        .l()
        .solve_lower_triangular(&half_solved.transpose())
        .ok_or(FoelError::GramNotPositiveDefinite(f64::NAN))?;
    let symmetric = (&similar + similar.transpose()) * real::<T>(0.5);
    Ok(nalgebra::SymmetricEigen::new(symmetric).eigenvalues.min())
}

/// Sector energies for all `2 ≤ L ≤ l_max` and `0 ≤ n ≤ min(⌊L/2⌋, n_max)`.
///
/// Grid limits: the oracle pipeline runs to `L = 10`; the diagram pipeline
/// to `L = 16`, with `n ≤ 4` required beyond the oracle range. `Both` runs
/// the two pipelines and cross-checks them at `1e-9`.
pub fn energy_table<T: Scalar>(
    l_max: usize,
    aniso: &Anisotropy<T>,
    method: Method,
    n_max: Option<usize>,
) -> Result<EnergyTable<T>> {
    if l_max < 2 {
        return Err(FoelError::ChainTooShort(l_max));
    }
    match method {
        Method::Oracle | Method::Both if l_max > ORACLE_MAX_L => {
            return Err(FoelError::SizeLimit {
                what: "oracle energy grid",
                size: l_max,
                max: ORACLE_MAX_L,
            });
        }
        Method::DiagramBasis if l_max > DIAGRAM_MAX_L => {
            return Err(FoelError::SizeLimit {
                what: "diagram energy grid",
                size: l_max,
                max: DIAGRAM_MAX_L,
            });
        }
        Method::DiagramBasis
            if l_max > ORACLE_MAX_L
                && n_max.is_none_or(|n| n > DIAGRAM_DEVIATION_CAP) =>
        {
            return Err(FoelError::SizeLimit {
                what: "diagram deviation grid (set n_max <= 4 beyond L = 10)",
                size: n_max.unwrap_or(l_max / 2),
                max: DIAGRAM_DEVIATION_CAP,
            });
        }
        _ => {}
    }

    type Rows<T> = Vec<((usize, usize), EnergyEntry<T>)>;
    let ls: Vec<usize> = (2..=l_max).collect();
    let per_l: Result<Vec<Rows<T>>> = ls
        .par_iter()
        .map(|&l| {
            let mut rows = Vec::new();
            let hamiltonian = match method {
                Method::Oracle | Method::Both => Some(build_xxz_chain_hamiltonian(l, aniso)?),
                Method::DiagramBasis => None,
            };
            let cap = n_max.unwrap_or(usize::MAX).min(l / 2);
            for n in 0..=cap {
                let dimension = sector_multiplicity(l, n)?;
                let diagram = match method {
                    Method::DiagramBasis | Method::Both => {
                        Some(diagram_energy(l, n, aniso)?)
                    }
                    Method::Oracle => None,
                };
                let oracle = match &hamiltonian {
                    Some(h) => {
                        let basis = highest_weight_basis(l, n, aniso)?;
                        Some(sector_energy_with(h, &basis)?)
                    }
                    None => None,
                };
                let energy = match (oracle, diagram) {
                    (Some(o), Some(d)) => {
                        if (o - d).abs() > real(CROSS_CHECK_TOLERANCE) {
                            return Err(FoelError::PipelineMismatch {
                                l,
                                n,
                                diagram: as_f64(d),
                                oracle: as_f64(o),
                            });
                        }
                        o
                    }
                    (Some(o), None) => o,
                    (None, Some(d)) => d,
                    (None, None) => unreachable!("at least one pipeline runs"),
                };
                rows.push(((l, n), EnergyEntry {
                    energy,
                    dimension,
                    method,
                }));
            }
            Ok(rows)
        })
        .collect();

    let mut entries = BTreeMap::new();
    for rows in per_l? {
        entries.extend(rows);
    }
    Ok(EnergyTable {
        delta: aniso.delta(),
        entries,
    })
}

/// A failed strict comparison at `(L, n)`.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingViolation<T: Scalar> {
    pub l: usize,
    pub n: usize,
    pub margin: T,
}

/// Level-ordering verdict for one chain length.
#[derive(Debug, Clone, Serialize)]
pub struct FoelReport<T: Scalar> {
    pub delta: T,
    pub l: usize,
    pub ordered: bool,
    /// `E(L, n+1) − E(L, n)` for ascending `n`.
    pub margins: Vec<T>,
    pub violations: Vec<OrderingViolation<T>>,
}

/// Strict increase of `E(L, n)` in `n`, one report per chain length.
pub fn check_foel<T: Scalar>(table: &EnergyTable<T>, tolerance: T) -> Vec<FoelReport<T>> {
    let mut reports = Vec::new();
    for l in table.l_values() {
        let ns = table.n_values(l);
        let mut margins = Vec::new();
        let mut violations = Vec::new();
        for window in ns.windows(2) {
            let (n0, n1) = (window[0], window[1]);
            if n1 != n0 + 1 {
                continue;
            }
            let margin =
                table.entries[&(l, n1)].energy - table.entries[&(l, n0)].energy;
            if margin <= tolerance {
                violations.push(OrderingViolation { l, n: n0, margin });
            }
            margins.push(margin);
        }
        reports.push(FoelReport {
            delta: table.delta(),
            l,
            ordered: violations.is_empty(),
            margins,
            violations,
        });
    }
    reports
}

/// Volume-monotonicity verdict: strict decrease of `E(L, n)` in `L` for
/// `n ≥ 1`, plus the vanishing of the `n = 0` column.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport<T: Scalar> {
    pub delta: T,
    pub ordered: bool,
    /// `E(L, n) − E(L+1, n)` for every admissible pair with `n ≥ 1`.
    pub margins: Vec<OrderingViolation<T>>,
    pub violations: Vec<OrderingViolation<T>>,
    pub zero_column_max: T,
    pub zero_column_ok: bool,
}

pub fn check_volume_monotonicity<T: Scalar>(
    table: &EnergyTable<T>,
    tolerance: T,
) -> VolumeReport<T> {
    let mut margins = Vec::new();
    let mut violations = Vec::new();
    let mut zero_column_max = T::zero();
    for (&(l, n), entry) in table.entries() {
        if n == 0 {
            zero_column_max = zero_column_max.max(entry.energy.abs());
            continue;
        }
        if let Some(next) = table.get(l + 1, n) {
            let margin = entry.energy - next.energy;
            if margin <= tolerance {
                violations.push(OrderingViolation { l, n, margin });
            }
            margins.push(OrderingViolation { l, n, margin });
        }
    }
    VolumeReport {
        delta: table.delta(),
        ordered: violations.is_empty(),
        margins,
        violations,
        zero_column_max,
        zero_column_ok: zero_column_max <= real(1e-12),
    }
}

/// Inductive-inequality verdict: `E(L+1, n) ≥ min{E(L, n), E(L, n−1)}`
/// up to [`KN_TOLERANCE`], with undefined terms dropped from the minimum.
#[derive(Debug, Clone, Serialize)]
pub struct KnReport<T: Scalar> {
    pub delta: T,
    pub holds: bool,
    pub min_slack: T,
    pub violations: Vec<OrderingViolation<T>>,
    pub pairs_checked: usize,
}

pub fn check_kn_inequality<T: Scalar>(table: &EnergyTable<T>) -> KnReport<T> {
    let tolerance: T = real(KN_TOLERANCE);
    let mut min_slack = T::max_value().expect("scalar has a max");
    let mut violations = Vec::new();
    let mut pairs_checked = 0usize;
    for (&(l1, n), entry) in table.entries() {
        if l1 < 3 {
            continue;
        }
        let l = l1 - 1;
        let mut bound: Option<T> = None;
        if let Some(e) = table.get(l, n) {
            bound = Some(e.energy);
        }
        if n > 0 {
            if let Some(e) = table.get(l, n - 1) {
                bound = Some(match bound {
                    Some(b) => b.min(e.energy),
                    None => e.energy,
                });
            }
        }
        let Some(bound) = bound else { continue };
        let slack = entry.energy - bound;
        pairs_checked += 1;
        min_slack = min_slack.min(slack);
        if slack < -tolerance {
            violations.push(OrderingViolation {
                l: l1,
                n,
                margin: slack,
            });
        }
    }
    KnReport {
        delta: table.delta(),
        holds: violations.is_empty(),
        min_slack,
        violations,
        pairs_checked,
    }
}

/// One row of the gap-formula comparison.
#[derive(Debug, Clone, Serialize)]
pub struct GapRow<T: Scalar> {
    pub l: usize,
    pub computed: T,
    pub formula: T,
}

/// Comparison of the one-deviation sector energy against
/// `1 − Δ⁻¹ cos(π/L)`, computed from the tridiagonal `A_{L,1}`.
#[derive(Debug, Clone, Serialize)]
pub struct GapFormulaReport<T: Scalar> {
    pub delta: T,
    pub rows: Vec<GapRow<T>>,
    pub max_abs_deviation: T,
}

/// The closed-form one-deviation gap `1 − Δ⁻¹ cos(π/L)`.
pub fn gap_formula<T: Scalar>(l: usize, delta: T) -> T {
    T::one() - real::<T>((std::f64::consts::PI / l as f64).cos()) / delta
}

pub fn check_gap_formula<T: Scalar>(l_max: usize, delta: T) -> Result<GapFormulaReport<T>> {
    if l_max < 2 {
        return Err(FoelError::ChainTooShort(l_max));
    }
    let aniso = Anisotropy::from_delta(delta)?;
    let mut rows = Vec::new();
    let mut max_abs_deviation = T::zero();
    for l in 2..=l_max {
        let computed = diagram_energy(l, 1, &aniso)?;
        let formula = gap_formula(l, delta);
        max_abs_deviation = max_abs_deviation.max((computed - formula).abs());
        rows.push(GapRow {
            l,
            computed,
            formula,
        });
    }
    Ok(GapFormulaReport {
        delta,
        rows,
        max_abs_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn iso() -> Anisotropy<f64> {
        Anisotropy::isotropic()
    }

    #[test]
    fn table_row_examples() {
        let table = energy_table(4, &iso(), Method::Both, None).unwrap();
        assert!(table.energy(4, 0).unwrap().abs() < 1e-12);
        assert_relative_eq!(
            table.energy(4, 1).unwrap(),
            1.0 - (PI / 4.0).cos(),
            epsilon = 1e-10
        );
        assert_relative_eq!(
            table.energy(4, 2).unwrap(),
            (3.0 - 3.0f64.sqrt()) / 2.0,
            epsilon = 1e-10
        );
        assert_relative_eq!(table.energy(3, 1).unwrap(), 0.5, epsilon = 1e-10);
        // dimensions are the sector multiplicities
        assert_eq!(table.get(4, 1).unwrap().dimension, 3);
        assert_eq!(table.get(4, 2).unwrap().dimension, 2);
    }

    #[test]
    fn zero_deviation_column_vanishes() {
        for delta in [1.0, 1.5, 5.0] {
            let aniso = Anisotropy::from_delta(delta).unwrap();
            let table = energy_table(6, &aniso, Method::DiagramBasis, None).unwrap();
            for l in 2..=6 {
                let e0: f64 = table.energy(l, 0).unwrap();
                assert!(e0.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn foel_examples() {
        let table = energy_table(4, &iso(), Method::Oracle, None).unwrap();
        let reports = check_foel(&table, 1e-8);
        assert!(reports.iter().all(|r| r.ordered));
        let l4 = reports.iter().find(|r| r.l == 4).unwrap();
        assert_relative_eq!(l4.margins[0], 1.0 - (PI / 4.0).cos(), epsilon = 1e-9);
        assert_relative_eq!(
            l4.margins[1],
            (3.0 - 3.0f64.sqrt()) / 2.0 - (1.0 - (PI / 4.0).cos()),
            epsilon = 1e-9
        );
        let l2 = reports.iter().find(|r| r.l == 2).unwrap();
        assert_eq!(l2.margins.len(), 1);
        assert_relative_eq!(l2.margins[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn permuted_table_fails_the_ordering_check() {
        let table = energy_table(4, &iso(), Method::Oracle, None).unwrap();
        let mut entries: Vec<_> = table
            .entries()
            .iter()
            .map(|(&k, e)| (k, e.clone()))
            .collect();
        // Swap the L=4 row's n=1 and n=2 energies.
        let e1 = table.energy(4, 1).unwrap();
        let e2 = table.energy(4, 2).unwrap();
        for (k, e) in entries.iter_mut() {
            if *k == (4, 1) {
                e.energy = e2;
            } else if *k == (4, 2) {
                e.energy = e1;
            }
        }
        let corrupted = EnergyTable::from_entries(1.0, entries);
        let reports = check_foel(&corrupted, 1e-8);
        let l4 = reports.iter().find(|r| r.l == 4).unwrap();
        assert!(!l4.ordered);
        assert_eq!(l4.violations.len(), 1);
        assert_eq!((l4.violations[0].l, l4.violations[0].n), (4, 1));
    }

    #[test]
    fn volume_monotonicity_examples() {
        let table = energy_table(5, &iso(), Method::Oracle, None).unwrap();
        let report = check_volume_monotonicity(&table, 1e-8);
        assert!(report.ordered);
        assert!(report.zero_column_ok);
        // n=1 column: 1 > 0.5 > 0.2929 > 0.1910
        for (l, expected) in [(2, 1.0), (3, 0.5), (4, 1.0 - (PI / 4.0).cos())] {
            let e_l = table.energy(l, 1).unwrap();
            assert_relative_eq!(e_l, expected, epsilon = 1e-9);
        }
        assert_relative_eq!(
            table.energy(5, 1).unwrap(),
            1.0 - (PI / 5.0).cos(),
            epsilon = 1e-9
        );
        // E(5,2) < E(4,2)
        assert!(table.energy(5, 2).unwrap() < table.energy(4, 2).unwrap() - 1e-3);
    }

    #[test]
    fn kn_examples() {
        let table = energy_table(5, &iso(), Method::Oracle, None).unwrap();
        let report = check_kn_inequality(&table);
        assert!(report.holds, "violations: {:?}", report.violations);
        assert!(report.min_slack >= -1e-10);
        assert!(report.pairs_checked > 0);
        // Boundary case: E(4,2) >= E(3,1) (the n-1 term only).
        assert!(table.energy(4, 2).unwrap() >= table.energy(3, 1).unwrap() - 1e-10);
    }

    #[test]
    fn gap_formula_examples() {
        let report = check_gap_formula(12, 1.0f64).unwrap();
        assert!(report.max_abs_deviation < 1e-12);
        let report = check_gap_formula(4, 1.5f64).unwrap();
        let row = report.rows.iter().find(|r| r.l == 4).unwrap();
        assert_relative_eq!(row.computed, 0.5285954792089683, epsilon = 1e-10);
        // L = 2 gives 1 at any Δ.
        for delta in [1.0, 2.0, 5.0] {
            let report = check_gap_formula(2, delta).unwrap();
            assert_relative_eq!(report.rows[0].computed, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn lower_hull_equals_the_row_on_every_computed_table() {
        for &delta in &DEFAULT_DELTA_GRID {
            let aniso = Anisotropy::from_delta(delta).unwrap();
            let table = energy_table(6, &aniso, Method::Oracle, None).unwrap();
            for l in 2..=6 {
                let ns = table.n_values(l);
                let hull = table.lower_hull(l);
                for (i, &n) in ns.iter().enumerate() {
                    assert_relative_eq!(hull[i], table.energy(l, n).unwrap(), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn gram_symmetrization_agrees_with_the_dense_route() {
        // Same spectrum by similarity; checked where the dense solver can
        // referee, including strong anisotropy.
        for (l, n, delta) in [(10usize, 5usize, 1.5f64), (12, 4, 5.0), (9, 4, 3.0)] {
            let aniso = Anisotropy::from_delta(delta).unwrap();
            let a = crate::tl_diagrams::sector_matrix(l, n, delta).unwrap();
            let via_gram = gram_symmetrized_smallest(l, n, &aniso, &a).unwrap();
            let via_dense = crate::spectra::dense_spectrum(a.entries(), false).unwrap()[0];
            assert!(
                (via_gram - via_dense).abs() < 1e-9,
                "L={l} n={n} Δ={delta}: {via_gram} vs {via_dense}"
            );
        }
    }

    #[test]
    fn grid_limits_are_enforced() {
        assert!(matches!(
            energy_table(11, &iso(), Method::Oracle, None),
            Err(FoelError::SizeLimit { .. })
        ));
        assert!(matches!(
            energy_table(17, &iso(), Method::DiagramBasis, Some(2)),
            Err(FoelError::SizeLimit { .. })
        ));
        assert!(matches!(
            energy_table(12, &iso(), Method::DiagramBasis, None),
            Err(FoelError::SizeLimit { .. })
        ));
        assert!(energy_table(12, &iso(), Method::DiagramBasis, Some(3)).is_ok());
    }

    #[test]
    fn csv_has_the_contracted_header_and_shape() {
        let table = energy_table(3, &iso(), Method::Both, None).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "L,n,delta,energy,dim,method");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 6);
        assert_eq!(row[0], "2");
        assert_eq!(row[5], "both");
    }
}
