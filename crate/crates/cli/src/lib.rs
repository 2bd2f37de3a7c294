//! Command implementations behind the `regreg` binary.
//!
//! Each subcommand is an ordinary function so tests can drive the pipeline
//! without spawning processes. Exit-code policy: usage and input problems
//! map to 2, an exhausted regular-grid search maps to 3.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use regreg_core::families::FamilySpec;
use regreg_core::instances::{build_structured, gen_rho_tlog, min_feasible_e0, StructuredInstance};
use regreg_core::ordertype::{class_count_by_formula, enumerate_classes};
use regreg_core::regularity::find_regressively_regular;
use regreg_core::solvers::{solve_dp, solve_mitm, solve_structured, SolveResult, MITM_MAX_VALUES};

/// Environment variable that, when set, overrides any `--seed` flag.
pub const SEED_ENV_VAR: &str = "REGREG_SEED";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or out-of-range parameters; exit code 2.
    Usage(String),
    /// Malformed or infeasible input; exit code 2.
    Input(String),
    /// The bounded search ran out of candidates; exit code 3.
    Exhausted(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Input(_) => 2,
            Self::Exhausted(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) | Self::Input(msg) | Self::Exhausted(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

/// Applies the `REGREG_SEED` override to a flag-supplied seed.
pub fn resolve_seed(flag_seed: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
            CliError::Usage(format!("{SEED_ENV_VAR} must be an integer, got {raw:?}"))
        }),
        Err(_) => Ok(flag_seed),
    }
}

#[derive(Debug, Serialize)]
pub struct ClassesReport {
    pub k: usize,
    pub count: usize,
    pub formula_count: u128,
    pub k_pow_k: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signatures: Option<Vec<String>>,
}

/// `classes -k K [--list]`: enumerate order-type classes, cross-checked
/// against the surjection-count formula.
pub fn classes(k: usize, list: bool) -> Result<ClassesReport, CliError> {
    if !(2..=6).contains(&k) {
        return Err(CliError::Usage(format!(
            "k must be between 2 and 6 for class enumeration, got {k}"
        )));
    }
    let classes = enumerate_classes(k).map_err(|e| CliError::Input(e.to_string()))?;
    let formula_count = class_count_by_formula(k);
    if classes.len() as u128 != formula_count {
        return Err(CliError::Input(format!(
            "class enumeration ({}) disagrees with the surjection formula ({})",
            classes.len(),
            formula_count
        )));
    }
    Ok(ClassesReport {
        k,
        count: classes.len(),
        formula_count,
        k_pow_k: (k as u128).pow(k as u32),
        signatures: list.then(|| classes.iter().map(|s| s.to_string()).collect()),
    })
}

#[derive(Debug, Clone)]
pub struct SequenceParams {
    pub k: usize,
    pub t: u32,
    pub p_max: usize,
    pub family: FamilySpec,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub budget: u64,
}

#[derive(Debug, Serialize)]
pub struct SequenceEntry {
    pub p: usize,
    pub file: String,
    pub values: usize,
    pub negatives: usize,
    pub small_positives: usize,
    pub large_positives: usize,
    pub dropped_zeros: u64,
}

#[derive(Debug, Serialize)]
pub struct SequenceSummary {
    pub k: usize,
    pub t: u32,
    pub p_max: usize,
    pub family: String,
    pub seed: u64,
    pub out_dir: String,
    pub instances: Vec<SequenceEntry>,
}

/// Ground set for the regular-grid search at a given `p`: `{1, .., 4p}`,
/// with the prefix below the rho-feasibility threshold pruned away. Every
/// pruned subset would fail `gen_rho_tlog` outright (feasibility depends on
/// `E` only through `e0 = min(E)`), so the first surviving candidate is the
/// same grid a skip-on-error scan would reach.
fn search_ground(k: usize, p: usize, t: u32) -> BTreeSet<u64> {
    let lo = min_feasible_e0(k, p, t).max(1);
    (lo..=(4 * p) as u64).collect()
}

fn validate_solving_params(k: usize, t: u32, label: &str) -> Result<(), CliError> {
    if !(2..=3).contains(&k) {
        return Err(CliError::Usage(format!(
            "{label} supports k = 2 or 3, got {k}"
        )));
    }
    if t < 1 {
        return Err(CliError::Usage("t must be at least 1".to_string()));
    }
    Ok(())
}

/// `sequence`: for each `p` in `2..=p_max`, find a regressively regular
/// `(f, E)`, generate a t-log-bounded offset map, and write the instance
/// file `h_{p}.json`. Files are written atomically and removed again if a
/// later `p` fails.
pub fn sequence(params: &SequenceParams) -> Result<SequenceSummary, CliError> {
    validate_solving_params(params.k, params.t, "sequence")?;
    if params.p_max < 2 {
        return Err(CliError::Usage(format!(
            "pmax must be at least 2, got {}",
            params.p_max
        )));
    }
    fs::create_dir_all(&params.out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", params.out_dir.display())))?;

    let mut written: Vec<PathBuf> = Vec::new();
    let cleanup = |written: &[PathBuf]| {
        for path in written {
            let _ = fs::remove_file(path);
        }
    };

    let mut instances = Vec::new();
    for p in 2..=params.p_max {
        let step = (|| -> Result<SequenceEntry, CliError> {
            let ground = search_ground(params.k, p, params.t);
            let (f, grid) =
                find_regressively_regular(&params.family, params.k, p, &ground, params.budget)
                    .ok_or_else(|| {
                        CliError::Exhausted(format!(
                            "p={p}: no regressively regular grid for family {} within budget {}",
                            params.family, params.budget
                        ))
                    })?;
            let rho = gen_rho_tlog(&grid, params.t, params.seed ^ p as u64)
                .map_err(|e| CliError::Input(format!("p={p}: {e}")))?;
            let inst = build_structured(&f, &grid, &rho, params.t, false)
                .map_err(|e| CliError::Input(format!("p={p}: {e}")))?;

            let file = format!("h_{p:03}.json");
            let path = params.out_dir.join(&file);
            write_atomic(&path, &format!("{}\n", inst.to_json_string()))
                .map_err(|e| CliError::Input(format!("p={p}: cannot write {file}: {e}")))?;
            Ok(SequenceEntry {
                p,
                file,
                values: inst.value_count(),
                negatives: inst.negatives.len(),
                small_positives: inst.small_positives.len(),
                large_positives: inst.large_positives.len(),
                dropped_zeros: inst.dropped_zeros,
            })
        })();
        match step {
            Ok(entry) => {
                written.push(params.out_dir.join(&entry.file));
                instances.push(entry);
            }
            Err(e) => {
                cleanup(&written);
                return Err(e);
            }
        }
    }

    Ok(SequenceSummary {
        k: params.k,
        t: params.t,
        p_max: params.p_max,
        family: params.family.id().to_string(),
        seed: params.seed,
        out_dir: params.out_dir.display().to_string(),
        instances,
    })
}

fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Structured,
    Mitm,
    Dp,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Structured => "structured",
            Self::Mitm => "mitm",
            Self::Dp => "dp",
        }
    }
}

/// `solve FILE --engine ..`: parse, validate, and solve one instance file.
pub fn solve(path: &Path, engine: Engine) -> Result<SolveResult, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let inst = StructuredInstance::from_json_str(&raw)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let result = match engine {
        Engine::Structured => solve_structured(&inst),
        Engine::Mitm => solve_mitm(&inst.all_values()),
        Engine::Dp => solve_dp(&inst.all_values()),
    };
    result.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub k: usize,
    pub t: u32,
    pub p_min: usize,
    pub p_max: usize,
    pub seed: u64,
    pub out_csv: PathBuf,
    pub budget: u64,
    pub allow_k3: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub p: usize,
    pub size: u64,
    pub comparisons: u64,
    pub bound: u128,
    pub time_struct_ns: u128,
    /// Absent when the instance exceeds the meet-in-the-middle guard.
    pub time_mitm_ns: Option<u128>,
}

#[derive(Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Rows that could not be produced, with reasons.
    pub skipped: Vec<(usize, String)>,
    /// Diagnostics for stderr (guard notes, k=3 warning).
    pub notes: Vec<String>,
}

/// `bench`: per `p`, build a MIN-family instance and time the structured
/// solver against meet-in-the-middle, recording machine-independent
/// comparison counts next to wall time.
pub fn bench(params: &BenchParams) -> Result<BenchReport, CliError> {
    if params.k == 3 && !params.allow_k3 {
        return Err(CliError::Usage(
            "bench requires -k 2; pass --allow-k3 to opt into the 2^27-subset regime".to_string(),
        ));
    }
    validate_solving_params(params.k, params.t, "bench")?;
    if params.p_min < 2 || params.p_min > params.p_max {
        return Err(CliError::Usage(format!(
            "empty or invalid p range {}..={}",
            params.p_min, params.p_max
        )));
    }

    let mut notes = Vec::new();
    if params.k == 3 {
        notes.push("k=3: negative-side enumeration is capped by 2^27 subsets".to_string());
    }

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for p in params.p_min..=params.p_max {
        let ground = search_ground(params.k, p, params.t);
        let found =
            find_regressively_regular(&FamilySpec::Min, params.k, p, &ground, params.budget);
        let Some((f, grid)) = found else {
            skipped.push((p, "no regular grid within budget".to_string()));
            continue;
        };
        let rho = match gen_rho_tlog(&grid, params.t, params.seed ^ p as u64) {
            Ok(rho) => rho,
            Err(e) => {
                skipped.push((p, e.to_string()));
                continue;
            }
        };
        let inst = match build_structured(&f, &grid, &rho, params.t, false) {
            Ok(inst) => inst,
            Err(e) => {
                skipped.push((p, e.to_string()));
                continue;
            }
        };

        let start = Instant::now();
        let structured =
            solve_structured(&inst).map_err(|e| CliError::Input(format!("p={p}: {e}")))?;
        let time_struct_ns = start.elapsed().as_nanos();

        let size = (p as u64).pow(params.k as u32);
        let kk = (params.k as u32).pow(params.k as u32);
        let bound = (1u128 << kk) * (size as u128).pow(params.t);
        if structured.stats.comparisons as u128 > bound {
            return Err(CliError::Input(format!(
                "p={p}: comparisons {} exceed the bound {bound}",
                structured.stats.comparisons
            )));
        }

        let values = inst.all_values();
        let time_mitm_ns = if values.len() <= MITM_MAX_VALUES {
            let start = Instant::now();
            solve_mitm(&values).map_err(|e| CliError::Input(format!("p={p}: {e}")))?;
            Some(start.elapsed().as_nanos())
        } else {
            notes.push(format!(
                "p={p}: mitm skipped ({} values exceed the {MITM_MAX_VALUES}-value guard)",
                values.len()
            ));
            None
        };

        rows.push(BenchRow {
            p,
            size,
            comparisons: structured.stats.comparisons,
            bound,
            time_struct_ns,
            time_mitm_ns,
        });
    }

    write_atomic(&params.out_csv, &render_csv(&rows))
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", params.out_csv.display())))?;
    Ok(BenchReport {
        rows,
        skipped,
        notes,
    })
}

fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("p,size,comparisons,bound,time_struct_ns,time_mitm_ns\n");
    for r in rows {
        let mitm = r.time_mitm_ns.map(|ns| ns.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.p, r.size, r.comparisons, r.bound, r.time_struct_ns, mitm
        ));
    }
    out
}
