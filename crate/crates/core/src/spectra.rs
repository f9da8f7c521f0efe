//! Eigenvalue computation: dense solvers for the oracles, the Perron-shift
//! power method for smallest eigenvalues of matrices with non-positive
//! off-diagonal entries, embedded-pair spectral comparison, and graph
//! Fiedler values.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{FoelError, Result};
use crate::scalar::{as_f64, real, Scalar};

/// Largest dimension for the dense symmetric eigensolver.
pub const DENSE_SYMMETRIC_MAX: usize = 4096;
/// Largest dimension for the dense general (Schur) eigensolver.
pub const DENSE_GENERAL_MAX: usize = 512;

/// Outcome of a Perron-shift smallest-eigenvalue solve: the matrix is
/// written as `shift·I − M` with `M` entrywise nonnegative and the smallest
/// eigenvalue recovered as `shift − ρ(M)`.
#[derive(Debug, Clone)]
pub struct PerronResult<T: Scalar> {
    pub smallest_eigenvalue: T,
    pub spectral_radius_of_shift: T,
    pub shift: T,
    pub iterations: usize,
    pub residual: T,
    /// True when the power iteration stalled and the value came from the
    /// dense solver instead.
    pub dense_fallback: bool,
}

/// Starting vector for the power iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartVector {
    /// The all-ones vector (default).
    Ones,
    /// Deterministic positive pseudo-random entries from the given seed.
    RandomPositive(u64),
}

/// Termination control for the power iteration.
#[derive(Debug, Clone)]
pub struct PowerSettings<T: Scalar> {
    pub relative_tolerance: T,
    pub residual_tolerance: T,
    pub max_iterations: usize,
    pub start: StartVector,
}

impl<T: Scalar> Default for PowerSettings<T> {
    fn default() -> Self {
        PowerSettings {
            relative_tolerance: real(1e-13),
            residual_tolerance: real(1e-10),
            max_iterations: 200_000,
            start: StartVector::Ones,
        }
    }
}

/// Ascending eigenvalues of a real matrix.
///
/// The non-symmetric path goes through the real Schur form; every matrix in
/// this crate has a real spectrum, so imaginary parts above `1e-8` are an
/// error and are discarded after the check.
pub fn dense_spectrum<T: Scalar>(matrix: &DMatrix<T>, symmetric: bool) -> Result<Vec<T>> {
    let dim = matrix.nrows();
    if matrix.ncols() != dim {
        return Err(FoelError::BadIndexMap(matrix.ncols(), "matrix is not square"));
    }
    let max = if symmetric {
        DENSE_SYMMETRIC_MAX
    } else {
        DENSE_GENERAL_MAX
    };
    if dim > max {
        return Err(FoelError::SizeLimit {
            what: "dense eigensolve",
            size: dim,
            max,
        });
    }
    let mut values: Vec<T> = if symmetric {
        SymmetricEigen::new(matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        let tolerance: T = real(1e-8);
        let mut out = Vec::with_capacity(dim);
        for ev in matrix.clone().complex_eigenvalues().iter() {
            if ev.im.abs() > tolerance {
                return Err(FoelError::ComplexSpectrum {
                    imag: as_f64(ev.im.abs()),
                });
            }
            out.push(ev.re);
        }
        out
    };
    values.sort_by(|a, b| a.partial_cmp(b).expect("real eigenvalues"));
    Ok(values)
}

fn start_vector<T: Scalar>(dim: usize, start: StartVector) -> DVector<T> {
    let mut v = match start {
        StartVector::Ones => DVector::from_element(dim, T::one()),
        StartVector::RandomPositive(seed) => {
            // splitmix64: deterministic, platform-independent positives.
            let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
            let mut next = || {
                state = state.wrapping_add(0x9e3779b97f4a7c15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                z ^ (z >> 31)
            };
            DVector::from_fn(dim, |_, _| {
                real::<T>(0.1 + (next() >> 11) as f64 / (1u64 << 53) as f64)
            })
        }
    };
    v /= v.norm();
    v
}

fn max_diagonal<T: Scalar>(matrix: &DMatrix<T>) -> T {
    let mut c = matrix[(0, 0)];
    for i in 1..matrix.nrows() {
        c = c.max(matrix[(i, i)]);
    }
    c
}

fn check_off_diagonals_nonpositive<T: Scalar>(matrix: &DMatrix<T>) -> Result<()> {
    for c in 0..matrix.ncols() {
        for r in 0..matrix.nrows() {
            if r != c && matrix[(r, c)] > T::zero() {
                return Err(FoelError::PositiveOffDiagonal {
                    row: r,
                    col: c,
                    value: as_f64(matrix[(r, c)]),
                });
            }
        }
    }
    Ok(())
}

/// Smallest eigenvalue of a matrix with non-positive off-diagonal entries,
/// via the Perron shift: with `C` the largest diagonal entry,
/// `C·I − A` is entrywise nonnegative and the smallest eigenvalue of `A`
/// is `C` minus its spectral radius, found by power iteration from the
/// all-ones vector.
///
/// The iteration internally runs on `(C+1)·I − A`, whose positive diagonal
/// rules out periodic stalling, and removes the extra unit at the end; the
/// reported decomposition keeps `shift = C`. If the iteration stalls (e.g.
/// a reducible shift with a non-simple dominant root), the dense solver
/// takes over when the dimension permits.
pub fn smallest_eigenvalue_perron<T: Scalar>(
    matrix: &DMatrix<T>,
    settings: &PowerSettings<T>,
) -> Result<PerronResult<T>> {
    let dim = matrix.nrows();
    if dim == 0 || matrix.ncols() != dim {
        return Err(FoelError::BadIndexMap(matrix.ncols(), "matrix is not square"));
    }
    check_off_diagonals_nonpositive(matrix)?;
    let c = max_diagonal(matrix);

    let mut shifted = -matrix.clone();
    for i in 0..dim {
        shifted[(i, i)] += c + T::one();
    }

    let mut v = start_vector(dim, settings.start);
    let mut rho_prev = T::zero();
    let mut checkpoint_residual = T::max_value().expect("scalar has a max");
    let mut last_residual = T::zero();
    let mut iterations = 0usize;
    while iterations < settings.max_iterations {
        iterations += 1;
        let w = &shifted * &v;
        let norm_w = w.norm();
        if norm_w == T::zero() {
            // Only possible for the 0x0-adjacent degenerate case M' = 0.
            return Ok(PerronResult {
                smallest_eigenvalue: c + T::one(),
                spectral_radius_of_shift: -T::one(),
                shift: c,
                iterations,
                residual: T::zero(),
                dense_fallback: false,
            });
        }
        let rho = norm_w;
        let residual = (&w - &v * rho).norm();
        v = w / norm_w;
        last_residual = residual;
        if (rho - rho_prev).abs() <= settings.relative_tolerance * rho
            && residual <= settings.residual_tolerance
        {
            return Ok(PerronResult {
                smallest_eigenvalue: c + T::one() - rho,
                spectral_radius_of_shift: rho - T::one(),
                shift: c,
                iterations,
                residual,
                dense_fallback: false,
            });
        }
        rho_prev = rho;
        // Residual barely moving over a long window means a non-simple
        // dominant root; give up early instead of burning the budget.
        if iterations.is_multiple_of(1000) {
            if residual > checkpoint_residual * real(0.99999) {
                break;
            }
            checkpoint_residual = residual;
        }
    }

    if dim <= DENSE_GENERAL_MAX {
        // The smallest eigenvalue of a matrix with nonpositive
        // off-diagonals is real even when conjugate pairs exist higher up;
        // it is the minimum real part of the Schur spectrum.
        let mut smallest = T::max_value().expect("scalar has a max");
        for ev in matrix.clone().complex_eigenvalues().iter() {
            smallest = smallest.min(ev.re);
        }
        Ok(PerronResult {
            smallest_eigenvalue: smallest,
            spectral_radius_of_shift: c - smallest,
            shift: c,
            iterations,
            residual: last_residual,
            dense_fallback: true,
        })
    } else {
        Err(FoelError::NonConvergence {
            iterations,
            residual: as_f64(last_residual),
        })
    }
}

/// Strong connectivity of the off-diagonal nonzero pattern
/// (irreducibility in the Perron-Frobenius sense).
pub fn is_irreducible<T: Scalar>(matrix: &DMatrix<T>) -> bool {
    let dim = matrix.nrows();
    if dim == 0 {
        return false;
    }
    if dim == 1 {
        return true;
    }
    let reaches_all = |transpose: bool| {
        let mut seen = vec![false; dim];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..dim {
                let value = if transpose {
                    matrix[(j, i)]
                } else {
                    matrix[(i, j)]
                };
                if i != j && value != T::zero() && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == dim
    };
    reaches_all(false) && reaches_all(true)
}

/// Verdict of the embedded-pair comparison: with non-positive off-diagonals
/// on both matrices and `b ≤ a` entrywise on the mapped indices, the
/// smallest eigenvalue of the larger matrix cannot exceed that of the
/// smaller one.
#[derive(Debug, Clone)]
pub struct LemmaSecondReport<T: Scalar> {
    pub smallest_a: T,
    pub smallest_b: T,
    /// `inf spec B ≤ inf spec A + 1e-12`.
    pub holds: bool,
    /// `smallest_a − smallest_b`.
    pub margin: T,
    /// Margin exceeds the comparison tolerance.
    pub strict: bool,
    /// Sufficient condition for strictness: `B` irreducible with an
    /// off-diagonal entry coupling mapped to unmapped indices.
    pub strictness_condition: bool,
    /// Precondition violations, reported as diagnostics rather than errors.
    pub violations: Vec<String>,
}

/// Compare the smallest eigenvalues of `a` (k×k) and `b` (l×l, l ≥ k),
/// where `index_map` sends the indices of `a` into those of `b`.
pub fn lemma_second_check<T: Scalar>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    index_map: &[usize],
    settings: &PowerSettings<T>,
) -> Result<LemmaSecondReport<T>> {
    let mut violations = Vec::new();
    if index_map.len() != a.nrows() {
        violations.push(format!(
            "index map has {} entries for a {}-dimensional matrix",
            index_map.len(),
            a.nrows()
        ));
    }
    let mut seen = std::collections::HashSet::new();
    for &m in index_map {
        if m >= b.nrows() {
            violations.push(format!("index {m} out of range for B"));
        }
        if !seen.insert(m) {
            violations.push(format!("index {m} repeated in the map"));
        }
    }
    for (name, matrix) in [("A", a), ("B", b)] {
        if let Err(FoelError::PositiveOffDiagonal { row, col, value }) =
            check_off_diagonals_nonpositive(matrix)
        {
            violations.push(format!(
                "{name} has positive off-diagonal {value:.3e} at ({row}, {col})"
            ));
        }
    }
    if violations.is_empty() {
        for (i, &mi) in index_map.iter().enumerate() {
            for (j, &mj) in index_map.iter().enumerate() {
                if b[(mi, mj)] > a[(i, j)] {
                    violations.push(format!(
                        "b[{mi},{mj}] = {} exceeds a[{i},{j}] = {}",
                        as_f64(b[(mi, mj)]),
                        as_f64(a[(i, j)])
                    ));
                }
            }
        }
    }

    let smallest = |m: &DMatrix<T>| -> Result<T> {
        if check_off_diagonals_nonpositive(m).is_ok() {
            Ok(smallest_eigenvalue_perron(m, settings)?.smallest_eigenvalue)
        } else {
            Ok(dense_spectrum(m, false)?[0])
        }
    };
    let smallest_a = smallest(a)?;
    let smallest_b = smallest(b)?;
    let tolerance: T = real(1e-12);
    let margin = smallest_a - smallest_b;
    let mapped: std::collections::HashSet<usize> = index_map.iter().copied().collect();
    let mut boundary_coupling = false;
    'outer: for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            if i != j && b[(i, j)] != T::zero() && (mapped.contains(&i) != mapped.contains(&j)) {
                boundary_coupling = true;
                break 'outer;
            }
        }
    }
    Ok(LemmaSecondReport {
        smallest_a,
        smallest_b,
        holds: smallest_b <= smallest_a + tolerance,
        margin,
        strict: margin > tolerance,
        strictness_condition: is_irreducible(b) && boundary_coupling,
        violations,
    })
}

/// Second-smallest eigenvalue of the combinatorial Laplacian (algebraic
/// connectivity) of a connected graph.
pub fn fiedler_value<T: Scalar>(vertex_count: usize, edges: &[(usize, usize)]) -> Result<T> {
    if vertex_count < 2 {
        return Err(FoelError::ChainTooShort(vertex_count));
    }
    let mut adjacency = vec![Vec::new(); vertex_count];
    for &(u, v) in edges {
        for w in [u, v] {
            if w >= vertex_count {
                return Err(FoelError::VertexOutOfRange {
                    vertex: w,
                    count: vertex_count,
                });
            }
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut seen = vec![false; vertex_count];
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
    if count < vertex_count {
        return Err(FoelError::Disconnected);
    }
    let mut laplacian = DMatrix::<T>::zeros(vertex_count, vertex_count);
    for &(u, v) in edges {
        laplacian[(u, u)] += T::one();
        laplacian[(v, v)] += T::one();
        laplacian[(u, v)] -= T::one();
        laplacian[(v, u)] -= T::one();
    }
    Ok(dense_spectrum(&laplacian, true)?[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_chain, parse_tree};
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    #[test]
    fn dense_examples() {
        let projector = dmatrix![0.5, -0.5; -0.5, 0.5];
        let spectrum = dense_spectrum(&projector, true).unwrap();
        assert_relative_eq!(spectrum[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(spectrum[1], 1.0, epsilon = 1e-14);

        let a = dmatrix![2.0, -1.0; -0.5, 1.0];
        let spectrum = dense_spectrum(&a, false).unwrap();
        let s3 = 3.0f64.sqrt();
        assert_relative_eq!(spectrum[0], (3.0 - s3) / 2.0, epsilon = 1e-12);
        assert_relative_eq!(spectrum[1], (3.0 + s3) / 2.0, epsilon = 1e-12);

        let spectrum = dense_spectrum(&DMatrix::<f64>::identity(5, 5), true).unwrap();
        assert_eq!(spectrum, vec![1.0; 5]);
    }

    #[test]
    fn dense_rejects_truly_complex_spectra() {
        let rotation = dmatrix![0.0, -1.0; 1.0, 0.0];
        assert!(matches!(
            dense_spectrum(&rotation, false),
            Err(FoelError::ComplexSpectrum { .. })
        ));
    }

    #[test]
    fn perron_examples() {
        let settings = PowerSettings::default();
        let a = dmatrix![2.0, -1.0; -0.5, 1.0];
        let result = smallest_eigenvalue_perron(&a, &settings).unwrap();
        assert_relative_eq!(
            result.smallest_eigenvalue,
            (3.0 - 3.0f64.sqrt()) / 2.0,
            epsilon = 1e-9
        );
        assert_eq!(result.shift, 2.0);
        assert_relative_eq!(
            result.shift - result.spectral_radius_of_shift,
            result.smallest_eigenvalue,
            epsilon = 1e-12
        );

        let diagonal = dmatrix![1.0, 0.0; 0.0, 3.0];
        let result = smallest_eigenvalue_perron(&diagonal, &settings).unwrap();
        assert_relative_eq!(result.smallest_eigenvalue, 1.0, epsilon = 1e-9);

        let exchange = dmatrix![0.0, -1.0; -1.0, 0.0];
        let result = smallest_eigenvalue_perron(&exchange, &settings).unwrap();
        assert_relative_eq!(result.smallest_eigenvalue, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn perron_rejects_positive_off_diagonals() {
        let bad = dmatrix![1.0, 0.5; -0.5, 1.0];
        assert!(matches!(
            smallest_eigenvalue_perron(&bad, &PowerSettings::default()),
            Err(FoelError::PositiveOffDiagonal { .. })
        ));
    }

    #[test]
    fn perron_matches_dense_on_sector_matrices() {
        let settings = PowerSettings::default();
        for l in 2..=9usize {
            for n in 0..=l / 2 {
                for delta in [1.0f64, 1.5, 3.0] {
                    let a = crate::tl_diagrams::sector_matrix(l, n, delta).unwrap();
                    let perron = smallest_eigenvalue_perron(a.entries(), &settings).unwrap();
                    let dense = dense_spectrum(a.entries(), false).unwrap()[0];
                    assert!(
                        (perron.smallest_eigenvalue - dense).abs() < 1e-9,
                        "L={l} n={n} Δ={delta}: {} vs {}",
                        perron.smallest_eigenvalue,
                        dense
                    );
                }
            }
        }
    }

    #[test]
    fn perron_is_start_vector_independent_on_irreducible_matrices() {
        // Deterministic sign-corrected random matrices with distinct
        // diagonals are primitive after the shift.
        let mut state = 0x12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (1u64 << 31) as f64
        };
        for dim in [3usize, 8, 17] {
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    m[(r, c)] = if r == c { next() } else { -next() };
                }
            }
            let ones = smallest_eigenvalue_perron(&m, &PowerSettings::default()).unwrap();
            let random = smallest_eigenvalue_perron(
                &m,
                &PowerSettings {
                    start: StartVector::RandomPositive(7),
                    ..PowerSettings::default()
                },
            )
            .unwrap();
            assert!(
                (ones.smallest_eigenvalue - random.smallest_eigenvalue).abs() < 1e-9,
                "dim {dim}"
            );
        }
    }

    #[test]
    fn lemma_second_examples() {
        let settings = PowerSettings::default();
        let b = dmatrix![2.0, -1.0; -0.5, 1.0];

        // 1x1 principal piece [2] inside b.
        let a = dmatrix![2.0];
        let report = lemma_second_check(&a, &b, &[0], &settings).unwrap();
        assert!(report.holds && report.strict);
        assert!(report.violations.is_empty());
        assert!(report.strictness_condition);
        assert_relative_eq!(report.smallest_a, 2.0, epsilon = 1e-9);
        assert_relative_eq!(
            report.smallest_b,
            (3.0 - 3.0f64.sqrt()) / 2.0,
            epsilon = 1e-9
        );

        // Equal matrices under the identity map.
        let report = lemma_second_check(&b, &b, &[0, 1], &settings).unwrap();
        assert!(report.holds && !report.strict);
        assert!(report.margin.abs() < 1e-9);

        // Embedded sector matrices at Δ=1.
        let small = crate::tl_diagrams::sector_matrix(4, 2, 1.0f64).unwrap();
        let large = crate::tl_diagrams::sector_matrix(5, 2, 1.0f64).unwrap();
        let map = crate::tl_diagrams::embedding_indices(4, 2).unwrap();
        let report =
            lemma_second_check(small.entries(), large.entries(), &map, &settings).unwrap();
        assert!(report.holds && report.strict, "margin {}", report.margin);
        assert!(report.strictness_condition);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn lemma_second_reports_violations_as_diagnostics() {
        let settings = PowerSettings::default();
        let a = dmatrix![1.0];
        let b = dmatrix![2.0, 0.5; -0.5, 1.0];
        let report = lemma_second_check(&a, &b, &[0], &settings).unwrap();
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn fiedler_examples() {
        let p3 = build_chain(3).unwrap();
        assert_relative_eq!(
            fiedler_value::<f64>(3, p3.edges()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let star = parse_tree(&[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        assert_relative_eq!(
            fiedler_value::<f64>(4, star.edges()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let p4 = build_chain(4).unwrap();
        assert_relative_eq!(
            fiedler_value::<f64>(4, p4.edges()).unwrap(),
            2.0 - 2.0f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(matches!(
            fiedler_value::<f64>(4, &[(0, 1), (2, 3)]),
            Err(FoelError::Disconnected)
        ));
    }

    #[test]
    fn chain_fiedler_halved_matches_the_gap_formula() {
        for l in 2..=12usize {
            let chain = build_chain(l).unwrap();
            let value = fiedler_value::<f64>(l, chain.edges()).unwrap() / 2.0;
            let formula = 1.0 - (std::f64::consts::PI / l as f64).cos();
            assert!((value - formula).abs() < 1e-12, "L = {l}");
        }
    }
}
