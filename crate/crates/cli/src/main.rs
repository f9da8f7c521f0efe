//! Command-line front end: parse configuration, dispatch the verification
//! suites, emit CSV/JSON, and set CI-friendly exit codes.
//!
//! Exit codes: 0 all verdicts true, 1 an ordering/inequality violation,
//! 2 invalid input, 3 solver non-convergence.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use foel_core::experiments::{
    check_foel, check_gap_formula, check_kn_inequality, check_volume_monotonicity,
    diagram_energy, energy_table, lieb_mattis_scan, tree_foel_level1, EnergyTable,
    LiebMattisModel, Method, DEFAULT_DELTA_GRID, DEFAULT_STRICT_TOLERANCE, KN_TOLERANCE,
};
use foel_core::hilbert::{build_xxz_chain_hamiltonian, Anisotropy};
use foel_core::lattice::TreeGraph;
use foel_core::spectra::{dense_spectrum, smallest_eigenvalue_perron, PowerSettings};
use foel_core::tl_diagrams::{enumerate_diagrams, sector_matrix};
use foel_core::FoelError;

#[derive(Parser)]
#[command(
    name = "foel",
    version,
    about = "Level-ordering verification for spin-1/2 XXZ chains and XXX trees",
    long_about = "Builds XXZ/XXX Hamiltonians, decomposes them over total-spin sectors \
through a quantum-group kernel pipeline and a Temperley-Lieb diagram pipeline, and \
verifies the level-ordering, volume-monotonicity, spectral-gap, tree, and Lieb-Mattis \
statements. Set THREADS to bound the worker pool."
)]
struct Cli {
    /// Print every built-in default as JSON and exit.
    #[arg(long)]
    defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Diagram,
    Oracle,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Diagram => Method::DiagramBasis,
            MethodArg::Oracle => Method::Oracle,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    AfChain,
    FmChain,
    Cross,
}

#[derive(Subcommand)]
enum Command {
    /// Energy table over an anisotropy grid plus the ordering checks.
    Scan {
        #[arg(long = "L-max", default_value_t = 8)]
        l_max: usize,
        /// Anisotropy values (comma separated or repeated).
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = DEFAULT_DELTA_GRID)]
        delta: Vec<f64>,
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Write here instead of standard output (atomic replace).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Strictness tolerance for the ordering margins.
        #[arg(long, default_value_t = DEFAULT_STRICT_TOLERANCE)]
        strict_tol: f64,
    },
    /// One-deviation gap: single value for --L, formula sweep for --L-max.
    Gap {
        #[arg(long = "L", conflicts_with = "l_max")]
        l: Option<usize>,
        #[arg(long = "L-max")]
        l_max: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
    /// One Temperley-Lieb sector matrix: summary and optional dumps.
    Sector {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Dump the sector matrix as dense CSV (values round-trip exactly).
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
        /// Dump the full-space chain Hamiltonian as `row col value` triplets.
        #[arg(long)]
        dump_hamiltonian: Option<PathBuf>,
    },
    /// Level-1 theorem report for a tree given as a JSON file.
    Tree {
        /// JSON file: {"vertices": L, "edges": [[u,v],...], "root": r}.
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Strictness tolerance for the level-1 minimum.
        #[arg(long, default_value_t = DEFAULT_STRICT_TOLERANCE)]
        strict_tol: f64,
    },
    /// Dump the arc diagrams of one sector, one per line.
    Diagrams {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Lieb-Mattis scan of a preset bipartite model.
    #[command(name = "lieb-mattis")]
    LiebMattis {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Chain length for the chain presets.
        #[arg(long, default_value_t = 4)]
        sites: usize,
        /// Part sizes for the cross model.
        #[arg(long, default_value_t = 2)]
        a_sites: usize,
        #[arg(long, default_value_t = 3)]
        b_sites: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn exit_code_for(error: &FoelError) -> u8 {
    match error {
        FoelError::NonConvergence { .. } => 3,
        _ => 2,
    }
}

/// Write atomically via a temporary file in the target directory.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut file = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    file.write_all(contents.as_bytes())?;
    file.persist(path)?;
    Ok(())
}

fn emit(output: Option<&Path>, contents: &str) -> Result<(), String> {
    match output {
        Some(path) => write_atomic(path, contents)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn versions() -> serde_json::Value {
    json!({ "foel": env!("CARGO_PKG_VERSION") })
}

fn defaults_json() -> serde_json::Value {
    json!({
        "scan": {
            "L-max": 8,
            "delta": DEFAULT_DELTA_GRID,
            "method": "both",
            "format": "csv",
            "strict-tol": DEFAULT_STRICT_TOLERANCE,
        },
        "tolerances": {
            "strict": DEFAULT_STRICT_TOLERANCE,
            "kn": KN_TOLERANCE,
            "cross-check": foel_core::experiments::CROSS_CHECK_TOLERANCE,
            "kernel-svd-threshold": foel_core::quantum_group::KERNEL_SVD_THRESHOLD,
        },
        "limits": {
            "full-space-max-L": foel_core::hilbert::FULL_SPACE_MAX_L,
            "sector-max-L": foel_core::hilbert::SECTOR_MAX_L,
            "oracle-max-L": foel_core::experiments::ORACLE_MAX_L,
            "diagram-max-L": foel_core::experiments::DIAGRAM_MAX_L,
            "diagram-deviation-cap": foel_core::experiments::DIAGRAM_DEVIATION_CAP,
            "dense-symmetric-max": foel_core::spectra::DENSE_SYMMETRIC_MAX,
            "dense-general-max": foel_core::spectra::DENSE_GENERAL_MAX,
        },
        "power-iteration": {
            "relative-tolerance": 1e-13,
            "residual-tolerance": 1e-10,
            "max-iterations": 200000,
        },
        "versions": versions(),
    })
}

fn run_scan(
    l_max: usize,
    deltas: &[f64],
    n_max: Option<usize>,
    method: Method,
    format: FormatArg,
    output: Option<&Path>,
    strict_tol: f64,
) -> Result<u8, String> {
    let mut tables: Vec<EnergyTable<f64>> = Vec::new();
    for &delta in deltas {
        let aniso = match Anisotropy::from_delta(delta) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: {e}");
                return Ok(exit_code_for(&e));
            }
        };
        match energy_table(l_max, &aniso, method, n_max) {
            Ok(table) => tables.push(table),
            Err(e) => {
                eprintln!("error: {e}");
                return Ok(exit_code_for(&e));
            }
        }
    }

    let mut all_ok = true;
    let mut foel_reports = Vec::new();
    let mut volume_reports = Vec::new();
    let mut kn_reports = Vec::new();
    for table in &tables {
        let foel = check_foel(table, strict_tol);
        all_ok &= foel.iter().all(|r| r.ordered);
        let volume = check_volume_monotonicity(table, strict_tol);
        all_ok &= volume.ordered && volume.zero_column_ok;
        let kn = check_kn_inequality(table);
        all_ok &= kn.holds;
        foel_reports.push(foel);
        volume_reports.push(volume);
        kn_reports.push(kn);
    }

    let contents = match format {
        FormatArg::Csv => {
            let mut csv = String::from("L,n,delta,energy,dim,method\n");
            for table in &tables {
                for line in table.to_csv().lines().skip(1) {
                    csv.push_str(line);
                    csv.push('\n');
                }
            }
            csv
        }
        FormatArg::Json => {
            let min_of = |values: Vec<f64>| values.into_iter().fold(f64::INFINITY, f64::min);
            let report = json!({
                "verdict": all_ok,
                "tolerances": { "strict": strict_tol, "kn": KN_TOLERANCE },
                "versions": versions(),
                "margins": {
                    "foel-min": min_of(foel_reports.iter().flatten()
                        .flat_map(|r| r.margins.clone()).collect()),
                    "volume-min": min_of(volume_reports.iter()
                        .flat_map(|r| r.margins.iter().map(|m| m.margin)).collect()),
                    "kn-min-slack": min_of(kn_reports.iter().map(|r| r.min_slack).collect()),
                },
                "tables": tables.iter().map(|t| json!({
                    "delta": t.delta(),
                    "rows": t.entries().iter().map(|(&(l, n), e)| json!({
                        "L": l, "n": n, "energy": e.energy,
                        "dim": e.dimension, "method": e.method.label(),
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "foel": foel_reports,
                "volume": volume_reports,
                "kn": kn_reports,
                "violations": {
                    "foel": foel_reports.iter().flatten()
                        .flat_map(|r| r.violations.clone()).collect::<Vec<_>>(),
                    "volume": volume_reports.iter()
                        .flat_map(|r| r.violations.clone()).collect::<Vec<_>>(),
                    "kn": kn_reports.iter()
                        .flat_map(|r| r.violations.clone()).collect::<Vec<_>>(),
                },
            });
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
    };
    emit(output, &contents)?;
    for (i, table) in tables.iter().enumerate() {
        eprintln!(
            "delta {}: foel {}, volume {}, kn {}",
            table.delta(),
            if foel_reports[i].iter().all(|r| r.ordered) { "ok" } else { "VIOLATED" },
            if volume_reports[i].ordered { "ok" } else { "VIOLATED" },
            if kn_reports[i].holds { "ok" } else { "VIOLATED" },
        );
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn run_gap(l: Option<usize>, l_max: Option<usize>, delta: f64) -> Result<u8, String> {
    let aniso = match Anisotropy::from_delta(delta) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit_code_for(&e));
        }
    };
    match (l, l_max) {
        (Some(l), _) => match diagram_energy(l, 1, &aniso) {
            Ok(value) => {
                println!("{value:.12}");
                Ok(0)
            }
            Err(e) => {
                eprintln!("error: {e}");
                Ok(exit_code_for(&e))
            }
        },
        (None, Some(l_max)) => match check_gap_formula(l_max, delta) {
            Ok(report) => {
                for row in &report.rows {
                    println!(
                        "L={} computed={:.12} formula={:.12}",
                        row.l, row.computed, row.formula
                    );
                }
                println!("max-deviation={:.3e}", report.max_abs_deviation);
                Ok(if report.max_abs_deviation < 1e-10 { 0 } else { 1 })
            }
            Err(e) => {
                eprintln!("error: {e}");
                Ok(exit_code_for(&e))
            }
        },
        (None, None) => {
            eprintln!("error: pass --L for a single value or --L-max for a sweep");
            Ok(2)
        }
    }
}

fn run_sector(
    l: usize,
    n: usize,
    delta: f64,
    dump_matrix: Option<&Path>,
    dump_hamiltonian: Option<&Path>,
) -> Result<u8, String> {
    let matrix = match sector_matrix(l, n, delta) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit_code_for(&e));
        }
    };
    let perron = match smallest_eigenvalue_perron(matrix.entries(), &PowerSettings::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit_code_for(&e));
        }
    };
    println!("L={l} n={n} delta={delta}");
    println!("dimension={}", matrix.dimension());
    println!("smallest-eigenvalue={:.12}", perron.smallest_eigenvalue);
    println!(
        "shift={} rho={:.12} iterations={} residual={:.3e} dense-fallback={}",
        perron.shift,
        perron.spectral_radius_of_shift,
        perron.iterations,
        perron.residual,
        perron.dense_fallback
    );
    if matrix.dimension() <= foel_core::spectra::DENSE_GENERAL_MAX {
        let dense = dense_spectrum(matrix.entries(), false).map_err(|e| e.to_string())?;
        println!(
            "dense-agreement={:.3e}",
            (dense[0] - perron.smallest_eigenvalue).abs()
        );
    }
    if let Some(path) = dump_matrix {
        emit(Some(path), &matrix.to_csv())?;
    }
    if let Some(path) = dump_hamiltonian {
        let aniso = match Anisotropy::from_delta(delta) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: {e}");
                return Ok(exit_code_for(&e));
            }
        };
        match build_xxz_chain_hamiltonian(l, &aniso) {
            Ok(h) => emit(Some(path), &h.to_triplet_text())?,
            Err(e) => {
                eprintln!("error: {e}");
                return Ok(exit_code_for(&e));
            }
        }
    }
    Ok(0)
}

fn run_tree(edges: &Path, output: Option<&Path>, strict_tol: f64) -> Result<u8, String> {
    let text = std::fs::read_to_string(edges)
        .map_err(|e| format!("cannot read {}: {e}", edges.display()))?;
    let tree = match TreeGraph::from_json(&text) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit_code_for(&e));
        }
    };
    let report = match tree_foel_level1::<f64>(&tree, strict_tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit_code_for(&e));
        }
    };
    let verdict = report.verdict;
    let wrapped = json!({
        "verdict": verdict,
        "tolerances": { "strict": strict_tol, "fiedler": 1e-10 },
        "versions": versions(),
        "margins": {
            "min-over-higher-sectors": report.min_margin,
            "fiedler-deviation": report.fiedler_deviation,
        },
        "report": report,
    });
    let mut contents = serde_json::to_string_pretty(&wrapped).map_err(|e| e.to_string())?;
    contents.push('\n');
    emit(output, &contents)?;
    Ok(if verdict { 0 } else { 1 })
}

fn run_diagrams(l: usize, n: usize, output: Option<&Path>) -> Result<u8, String> {
    match enumerate_diagrams(l, n) {
        Ok(diagrams) => {
            let mut text = String::new();
            for d in &diagrams {
                text.push_str(&d.dump());
                text.push('\n');
            }
            emit(output, &text)?;
            Ok(0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(exit_code_for(&e))
        }
    }
}

fn run_lieb_mattis(
    model: ModelArg,
    sites: usize,
    a_sites: usize,
    b_sites: usize,
    output: Option<&Path>,
) -> Result<u8, String> {
    let model = match model {
        ModelArg::AfChain => LiebMattisModel::<f64>::af_chain(sites),
        ModelArg::FmChain => LiebMattisModel::<f64>::fm_chain(sites),
        ModelArg::Cross => LiebMattisModel::<f64>::cross_bipartite(a_sites, b_sites),
    };
    let model = match model {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit_code_for(&e));
        }
    };
    let report = match lieb_mattis_scan(&model) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(exit_code_for(&e));
        }
    };
    let verdict = report.high_ordering_ok && report.floor_ok;
    let wrapped = json!({
        "verdict": verdict,
        "versions": versions(),
        "report": report,
    });
    let mut contents = serde_json::to_string_pretty(&wrapped).map_err(|e| e.to_string())?;
    contents.push('\n');
    emit(output, &contents)?;
    Ok(if verdict { 0 } else { 1 })
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("THREADS") {
        if let Ok(count) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build_global()
                .ok();
        }
    }
    let cli = Cli::parse();
    if cli.defaults {
        println!(
            "{}",
            serde_json::to_string_pretty(&defaults_json()).expect("defaults serialize")
        );
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(2);
    };
    let outcome = match command {
        Command::Scan {
            l_max,
            delta,
            n_max,
            method,
            format,
            output,
            strict_tol,
        } => run_scan(
            l_max,
            &delta,
            n_max,
            method.into(),
            format,
            output.as_deref(),
            strict_tol,
        ),
        Command::Gap { l, l_max, delta } => run_gap(l, l_max, delta),
        Command::Sector {
            l,
            n,
            delta,
            dump_matrix,
            dump_hamiltonian,
        } => run_sector(l, n, delta, dump_matrix.as_deref(), dump_hamiltonian.as_deref()),
        Command::Tree {
            edges,
            output,
            strict_tol,
        } => run_tree(&edges, output.as_deref(), strict_tol),
        Command::Diagrams { l, n, output } => run_diagrams(l, n, output.as_deref()),
        Command::LiebMattis {
            model,
            sites,
            a_sites,
            b_sites,
            output,
        } => run_lieb_mattis(model, sites, a_sites, b_sites, output.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
