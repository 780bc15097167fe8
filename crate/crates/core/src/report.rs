//! Build → solve → certify pipelines behind the command-line tool.
//!
//! Every task produces a JSON report (keys sorted, no timings) so that runs
//! are byte-identical across repetitions and thread counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::blindness::{
    certify_blindness, check_knill_laflamme, errors_up_to_weight, Conclusion, ExtremePointCertificate,
};
use crate::error::{Error, Result};
use crate::fermion::{
    assemble_2rdm, default_penalty_strength, exposing_hamiltonian, fermionic_2rdm, isometry_matrix, map_state,
    verify_diagram,
};
use crate::lattice::{
    build_column_parity, build_compass, build_logical_x, build_logical_z, build_toric, Boundary, CompassParams,
    CustomModel,
};
use crate::linalg::{frobenius, inner, matrix_pairs, phase_distance, random_state, vector_pairs, CMatrix};
use crate::marginals::marginal_vector;
use crate::pauli::OperatorSum;
use crate::spectral::{
    decompose_ground_state, ground_space, ground_space_of_matrix, projector, sector_split, spectrum, GroundSpace,
    DEFAULT_DEGENERACY_TOL,
};
use crate::symplectic::{certify_stabilizer_blindness, toric_generators};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

pub const GOLDEN_SCHEMA: &str = "qmarginal-golden/1";

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Compass(CompassParams),
    Toric { l: usize },
    Custom(PathBuf),
}

impl ModelSpec {
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Compass(p) => format!(
                "compass(n={}, jx={}, jz={}, {})",
                p.n,
                p.jx,
                p.jz,
                match p.boundary {
                    Boundary::Cyclic => "cyclic",
                    Boundary::Open => "open",
                }
            ),
            ModelSpec::Toric { l } => format!("toric(L={l})"),
            ModelSpec::Custom(path) => format!(
                "custom({})",
                path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned())
            ),
        }
    }

    pub fn build(&self) -> Result<OperatorSum> {
        match self {
            ModelSpec::Compass(p) => build_compass(p),
            ModelSpec::Toric { l } => build_toric(*l),
            ModelSpec::Custom(path) => load_custom(path)?.to_operator(),
        }
    }

    fn compass(&self) -> Option<&CompassParams> {
        match self {
            ModelSpec::Compass(p) => Some(p),
            _ => None,
        }
    }
}

fn load_custom(path: &Path) -> Result<CustomModel> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Spectrum { dump_spectrum: bool, dump_ground: bool },
    Blindness { m: usize },
    Kl,
    FermionVerify,
    Stabilizer { m: usize },
    Counterexample,
    /// Computes the golden quantities and, when a file is given, compares.
    Golden { compare: Option<PathBuf> },
}

impl Task {
    fn name(&self) -> &'static str {
        match self {
            Task::Spectrum { .. } => "spectrum",
            Task::Blindness { .. } => "blindness",
            Task::Kl => "kl",
            Task::FermionVerify => "fermion-verify",
            Task::Stabilizer { .. } => "stabilizer",
            Task::Counterexample => "counterexample",
            Task::Golden { .. } => "golden",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Frobenius tolerance for blindness, KL and 2-RDM equality.
    pub certificate: f64,
    /// Relative degeneracy tolerance.
    pub degeneracy: f64,
    /// Elementwise tolerance for the fermionic commutative diagram.
    pub diagram: f64,
    /// Subspace distance for the Fock-space ground-space check.
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            certificate: 1e-9,
            degeneracy: DEFAULT_DEGENERACY_TOL,
            diagram: 1e-10,
            subspace: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub task: Task,
    pub tol: Tolerances,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(model: ModelSpec, task: Task) -> Self {
        Self {
            model,
            task,
            tol: Tolerances::default(),
            threads: None,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tol;
        for (name, v) in [
            ("certificate", t.certificate),
            ("degeneracy", t.degeneracy),
            ("diagram", t.diagram),
            ("subspace", t.subspace),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} tolerance must be positive, got {v}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParams("thread count must be at least 1".into()));
        }
        match &self.model {
            ModelSpec::Compass(p) => p.validate()?,
            ModelSpec::Toric { l } if *l < 2 => {
                return Err(Error::InvalidParams(format!("toric size {l} < 2")));
            }
            _ => {}
        }
        match (&self.task, &self.model) {
            (Task::Blindness { m: 0 } | Task::Stabilizer { m: 0 }, _) => {
                Err(Error::InvalidParams("m must be at least 1".into()))
            }
            (Task::Stabilizer { .. }, ModelSpec::Toric { .. }) => Ok(()),
            (Task::Stabilizer { .. }, _) => Err(Error::InvalidParams(
                "stabilizer enumeration needs a stabilizer code (--code toric)".into(),
            )),
            (Task::Counterexample | Task::Golden { .. }, ModelSpec::Compass(p)) if p.n == 3 => Ok(()),
            (Task::Counterexample | Task::Golden { .. }, _) => Err(Error::InvalidParams(format!(
                "{} runs on the 3×3 compass model",
                self.task.name()
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Value,
    pub summary: String,
}

impl RunOutcome {
    fn error(task: &str, e: &Error) -> Self {
        Self {
            exit_code: EXIT_ERROR,
            report: json!({ "task": task, "error": e.to_string() }),
            summary: format!("error: {e}"),
        }
    }

    /// Pretty-printed report with trailing newline.
    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Runs a task; never panics on bad input. Exit code 0 = certified,
/// 2 = certification failed, 1 = configuration or runtime error.
pub fn run(config: &RunConfig) -> RunOutcome {
    let name = config.task.name();
    let outcome = match config.validate().and_then(|_| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
        pool.install(|| execute(config))
    }) {
        Ok(o) => o,
        Err(e) => RunOutcome::error(name, &e),
    };
    if let Some(path) = &config.out {
        if let Err(e) = std::fs::write(path, outcome.report_text()) {
            return RunOutcome::error(name, &Error::Io(e));
        }
    }
    outcome
}

fn verdict(pass: bool) -> (i32, &'static str) {
    if pass {
        (EXIT_PASS, "PASS")
    } else {
        (EXIT_FAIL, "FAIL")
    }
}

fn execute(cfg: &RunConfig) -> Result<RunOutcome> {
    match &cfg.task {
        Task::Spectrum {
            dump_spectrum,
            dump_ground,
        } => run_spectrum(cfg, *dump_spectrum, *dump_ground),
        Task::Blindness { m } => run_blindness(cfg, *m),
        Task::Kl => run_kl(cfg),
        Task::FermionVerify => run_fermion(cfg),
        Task::Stabilizer { m } => run_stabilizer(cfg, *m),
        Task::Counterexample => run_counterexample(cfg),
        Task::Golden { compare } => run_golden(cfg, compare.as_deref()),
    }
}

/// Ground space, gauge-fixed for the compass model so that `C₀` is the
/// `Z̃₀ = +1` state and `C₁` the `Z̃₀ = −1` one.
fn solve(cfg: &RunConfig, h: &OperatorSum) -> Result<GroundSpace> {
    let gs = ground_space(h, cfg.tol.degeneracy)?;
    match cfg.model.compass() {
        Some(p) if gs.degeneracy() == 2 => gs.gauge_fixed(&build_logical_z(0, p.n)?),
        _ => Ok(gs),
    }
}

#[derive(Debug, Clone, Serialize)]
struct LogicalAction {
    /// `max_j min_θ ‖X̃_j C₀ − e^{iθ} C₁‖`.
    row_flip: f64,
    /// `max_{k,p} ‖Z̃_k C_p − (−1)^p C_p‖`.
    column_phase: f64,
}

fn logical_action(gs: &GroundSpace, n: usize) -> Result<LogicalAction> {
    let (c0, c1) = (&gs.basis[0], &gs.basis[1]);
    let mut row_flip = 0.0f64;
    let mut column_phase = 0.0f64;
    for j in 0..n {
        row_flip = row_flip.max(phase_distance(&build_logical_x(j, n)?.apply(c0), c1));
    }
    for k in 0..n {
        let z = build_logical_z(k, n)?;
        column_phase = column_phase.max(crate::linalg::norm(&(z.apply(c0) - c0)));
        column_phase = column_phase.max(crate::linalg::norm(&(z.apply(c1) + c1)));
    }
    Ok(LogicalAction {
        row_flip,
        column_phase,
    })
}

fn run_spectrum(cfg: &RunConfig, dump_spectrum: bool, dump_ground: bool) -> Result<RunOutcome> {
    let h = cfg.model.build()?;
    let eig = spectrum(&h)?;
    let gs = GroundSpace::from_eigen(&eig, cfg.tol.degeneracy)?;
    let gs = match cfg.model.compass() {
        Some(p) if gs.degeneracy() == 2 => gs.gauge_fixed(&build_logical_z(0, p.n)?)?,
        _ => gs,
    };
    let mut report = json!({
        "task": "spectrum",
        "model": cfg.model.label(),
        "n_sites": h.n_sites(),
        "dim": eig.values.len(),
        "e0": gs.e0,
        "degeneracy": gs.degeneracy(),
        "gap": crate::blindness::finite_or_none(gs.gap),
        "lowest": eig.values.iter().take(8).collect::<Vec<_>>(),
        "ground_residual": gs.max_residual(&h),
    });
    let mut summary = format!(
        "{}: E0 = {:.12}, degeneracy {}, gap {:.6e}\n",
        cfg.model.label(),
        gs.e0,
        gs.degeneracy(),
        gs.gap
    );
    if let Some(p) = cfg.model.compass() {
        let parities = (0..p.n).map(|k| build_column_parity(k, p.n)).collect::<Result<Vec<_>>>()?;
        let sectors = sector_split(&h, &parities)?;
        let ground_tol = gs.degeneracy_tol;
        let ground: Vec<String> = sectors
            .iter()
            .filter(|s| s.min_energy - gs.e0 <= ground_tol)
            .map(|s| s.label_string())
            .collect();
        let mixed_margin = sectors
            .iter()
            .filter(|s| s.label.iter().any(|&b| b != s.label[0]))
            .map(|s| s.min_energy - gs.e0)
            .fold(f64::INFINITY, f64::min);
        report["sectors"] = serde_json::to_value(&sectors)?;
        report["ground_sectors"] = json!(ground);
        report["mixed_sector_margin"] = json!(crate::blindness::finite_or_none(mixed_margin));
        let _ = writeln!(summary, "ground sectors {ground:?}, mixed-sector margin {mixed_margin:.6e}");
        if gs.degeneracy() == 2 {
            let la = logical_action(&gs, p.n)?;
            let _ = writeln!(
                summary,
                "logical action: row flip {:.3e}, column phase {:.3e}",
                la.row_flip, la.column_phase
            );
            report["logical_action"] = serde_json::to_value(la)?;
            if p.n == 3 {
                let d = decompose_ground_state(&gs.basis[0])?;
                let _ = writeln!(
                    summary,
                    "C0 = {:.10} A1 + {:.10} A2 + {:.10} A3 (residual {:.3e})",
                    d.a[0].re, d.a[1].re, d.a[2].re, d.residual
                );
                report["decomposition"] = decomposition_json(&d);
            }
        }
    }
    if dump_spectrum {
        report["spectrum"] = json!(eig.values);
    }
    if dump_ground {
        report["ground_states"] = json!(gs.basis.iter().map(vector_pairs).collect::<Vec<_>>());
    }
    Ok(RunOutcome {
        exit_code: EXIT_PASS,
        report,
        summary,
    })
}

fn decomposition_json(d: &crate::spectral::GroundStateDecomposition) -> Value {
    json!({
        "a": d.a.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "residual": d.residual,
    })
}

fn conclusion_name(c: Conclusion) -> &'static str {
    match c {
        Conclusion::ExtremeMultiplePreimages => "extreme-multiple-preimages",
        Conclusion::ExtremeUniquePreimage => "extreme-unique-preimage",
        Conclusion::NotCertified => "not-certified",
    }
}

fn run_blindness(cfg: &RunConfig, m: usize) -> Result<RunOutcome> {
    let h = cfg.model.build()?;
    let gs = solve(cfg, &h)?;
    let cert = certify_blindness(&gs, m, cfg.tol.certificate)?;
    let extreme = ExtremePointCertificate::from_parts(&gs, cert);
    let (exit_code, word) = verdict(extreme.blindness.passed);
    let mut summary = format!(
        "{}: {m}-blindness {word} (degeneracy {}, conclusion {})\n",
        cfg.model.label(),
        extreme.degeneracy,
        conclusion_name(extreme.conclusion)
    );
    if let Some(w) = &extreme.blindness.witness {
        let _ = writeln!(summary, "witness: {}", serde_json::to_string(w)?);
    }
    let mut report = serde_json::to_value(extreme.to_json(&cfg.model.label()))?;
    report["task"] = json!("blindness");
    report["diagonal_witness"] = serde_json::to_value(&extreme.blindness.diagonal_witness)?;
    report["checked"] = json!(extreme.blindness.checked);
    Ok(RunOutcome {
        exit_code,
        report,
        summary,
    })
}

fn run_kl(cfg: &RunConfig) -> Result<RunOutcome> {
    let h = cfg.model.build()?;
    let gs = solve(cfg, &h)?;
    let n = h.n_sites();
    let kl = check_knill_laflamme(&gs.basis, &errors_up_to_weight(n, 1), cfg.tol.certificate)?;
    let blind = certify_blindness(&gs, 2.min(n), cfg.tol.certificate)?;
    let agrees = kl.passed == blind.passed;
    let (exit_code, word) = verdict(kl.passed && agrees);
    let summary = format!(
        "{}: KL over {} errors {word} (worst violation {:.3e}); 2-blindness {} — {}\n",
        cfg.model.label(),
        kl.errors.len(),
        kl.worst_violation,
        if blind.passed { "passes" } else { "fails" },
        if agrees { "consistent" } else { "INCONSISTENT" }
    );
    let mut report = serde_json::to_value(&kl)?;
    report["task"] = json!("kl");
    report["model"] = json!(cfg.model.label());
    report["degeneracy"] = json!(gs.degeneracy());
    report["blindness_m2_passed"] = json!(blind.passed);
    report["agrees_with_blindness"] = json!(agrees);
    Ok(RunOutcome {
        exit_code,
        report,
        summary,
    })
}

const FERMION_SEED: u64 = 0x5eed;
const RANDOM_DIAGRAM_STATES: usize = 3;

fn run_fermion(cfg: &RunConfig) -> Result<RunOutcome> {
    let h = cfg.model.build()?;
    let n = h.n_sites();
    let gs = solve(cfg, &h)?;

    // V†V = I: on the full space when it fits, otherwise on the ground space.
    let isometry_defect = if 2 * n <= 12 {
        let v = isometry_matrix(n)?;
        let vtv = v.adjoint() * &v;
        frobenius(&(vtv - CMatrix::identity(1 << n, 1 << n)))
    } else {
        let mapped = gs.basis.iter().map(|b| map_state(b, n)).collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        for (p, fp) in mapped.iter().enumerate() {
            for (q, fq) in mapped.iter().enumerate() {
                worst = worst.max((fp.inner(fq) - inner(&gs.basis[p], &gs.basis[q])).norm());
            }
        }
        worst
    };

    let mut rng = ChaCha8Rng::seed_from_u64(FERMION_SEED);
    let mut states: Vec<_> = gs.basis.clone();
    states.extend((0..RANDOM_DIAGRAM_STATES).map(|_| random_state(1 << n, &mut rng)));
    let mut diagram = 0.0f64;
    for s in &states {
        diagram = diagram.max(verify_diagram(s, n)?.max_deviation);
    }

    // The Fock ground space of the penalized Hamiltonian equals V·(lattice
    // ground space) when the penalty dominates.
    let penalty = default_penalty_strength(&h);
    let subspace = if 4usize.pow(n as u32) <= crate::linalg::max_eig_dim() && 2 * n <= 12 {
        let hf = exposing_hamiltonian(&h, None)?.to_dense()?;
        let fock_gs = ground_space_of_matrix(&hf, cfg.tol.degeneracy)?;
        let v = isometry_matrix(n)?;
        let lifted = &v * projector(&gs.basis) * v.adjoint();
        Some(json!({
            "fock_e0": fock_gs.e0,
            "fock_degeneracy": fock_gs.degeneracy(),
            "distance": frobenius(&(fock_gs.projector() - lifted)),
        }))
    } else {
        None
    };
    let subspace_ok = subspace
        .as_ref()
        .is_none_or(|s| s["distance"].as_f64().is_some_and(|d| d < cfg.tol.subspace));

    let pass = isometry_defect < 1e-12 && diagram < cfg.tol.diagram && subspace_ok;
    let (exit_code, word) = verdict(pass);
    let mut summary = format!(
        "{}: fermion bridge {word}\nisometry defect {:.3e}, diagram deviation {:.3e}\n",
        cfg.model.label(),
        isometry_defect,
        diagram
    );
    match &subspace {
        Some(s) => {
            let _ = writeln!(summary, "Fock ground-space distance {:.3e}", s["distance"].as_f64().unwrap_or(f64::NAN));
        }
        None => summary.push_str("Fock ground-space check skipped (dense limit)\n"),
    }
    let report = json!({
        "task": "fermion-verify",
        "model": cfg.model.label(),
        "n_sites": n,
        "n_modes": 2 * n,
        "isometry_defect": isometry_defect,
        "diagram_max_deviation": diagram,
        "diagram_states": states.len(),
        "penalty_strength": penalty,
        "ground_space_check": subspace,
        "passed": pass,
    });
    Ok(RunOutcome {
        exit_code,
        report,
        summary,
    })
}

fn run_stabilizer(cfg: &RunConfig, m: usize) -> Result<RunOutcome> {
    let ModelSpec::Toric { l } = cfg.model else {
        unreachable!("validated")
    };
    let g = toric_generators(l)?;
    let cert = certify_stabilizer_blindness(&g, m)?;
    let (exit_code, word) = verdict(cert.passed);
    let mut summary = format!(
        "{}: {m}-blindness by enumeration {word} ({} Paulis checked)\n",
        cfg.model.label(),
        cert.checked
    );
    if let Some(w) = &cert.witness {
        let _ = writeln!(summary, "witness: {}", serde_json::to_string(w)?);
    }
    let mut report = serde_json::to_value(&cert)?;
    report["task"] = json!("stabilizer");
    report["model"] = json!(cfg.model.label());
    report["n_qubits"] = json!(g.n_qubits());
    report["generators"] = json!(g.generators().len());
    report["logical_qubits"] = json!(g.logical_qubits());
    Ok(RunOutcome {
        exit_code,
        report,
        summary,
    })
}

fn run_counterexample(cfg: &RunConfig) -> Result<RunOutcome> {
    let h = cfg.model.build()?;
    let n = h.n_sites();
    let gs = solve(cfg, &h)?;
    let tol = cfg.tol.certificate;
    let blindness = certify_blindness(&gs, 2, tol)?;
    let decomposition = if gs.degeneracy() == 2 {
        Some(decompose_ground_state(&gs.basis[0])?)
    } else {
        None
    };

    let mut fermion = Value::Null;
    let mut preimages_agree = false;
    if gs.degeneracy() >= 2 {
        let (c0, c1) = (&gs.basis[0], &gs.basis[1]);
        let g0 = assemble_2rdm(&marginal_vector(c0, n)?)?;
        let g1 = assemble_2rdm(&marginal_vector(c1, n)?)?;
        let f0 = map_state(c0, n)?;
        let f1 = map_state(c1, n)?;
        let d0 = fermionic_2rdm(&f0)?;
        let d1 = fermionic_2rdm(&f1)?;
        let assembled = g0.frobenius_distance(&g1);
        let direct = d0.frobenius_distance(&d1);
        let diagram = d0.max_deviation(&g0).max(d1.max_deviation(&g1));
        let overlap = f0.inner(&f1).norm();
        preimages_agree = assembled < tol && direct < tol && diagram < cfg.tol.diagram && overlap < tol;
        fermion = json!({
            "n_modes": 2 * n,
            "particles": n,
            "rdm_dim": g0.matrix.nrows(),
            "assembled_distance": assembled,
            "direct_distance": direct,
            "diagram_max_deviation": diagram,
            "preimage_overlap": overlap,
            "trace": crate::linalg::trace(&g0.matrix).re,
        });
    }

    let extreme = ExtremePointCertificate::from_parts(&gs, blindness);
    let decomposition_ok = decomposition.is_some_and(|d| d.residual < tol);
    let pass = extreme.conclusion == Conclusion::ExtremeMultiplePreimages && preimages_agree && decomposition_ok;
    let (exit_code, word) = verdict(pass);
    let mut summary = format!(
        "{}: counterexample {word}\nE0 = {:.12}, degeneracy {}, gap {:.6e}\n2-blindness: max diag {:.3e}, max offdiag {:.3e}\n",
        cfg.model.label(),
        extreme.e0,
        extreme.degeneracy,
        extreme.gap,
        extreme.blindness.max_diagonal_deviation.unwrap_or(f64::NAN),
        extreme.blindness.max_offdiagonal_norm.unwrap_or(f64::NAN),
    );
    if let Some(d) = &decomposition {
        let _ = writeln!(summary, "A-basis residual {:.3e}", d.residual);
    }
    if let Some(d) = fermion["assembled_distance"].as_f64() {
        let _ = writeln!(summary, "fermionic 2-RDMs of the two pre-images differ by {d:.3e} (Frobenius)");
    }
    let _ = writeln!(summary, "conclusion: {}", conclusion_name(extreme.conclusion));

    let report = json!({
        "task": "counterexample",
        "certificate": extreme.to_json(&cfg.model.label()),
        "decomposition": decomposition.as_ref().map(decomposition_json),
        "fermion": fermion,
        "conclusion": extreme.conclusion,
        "passed": pass,
    });
    Ok(RunOutcome {
        exit_code,
        report,
        summary,
    })
}

/// Per-field tolerances for [`compare_golden`], keyed by the top-level name
/// under `"values"`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenTolerances {
    pub default: f64,
    pub fields: BTreeMap<String, f64>,
}

impl GoldenTolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            default: tol,
            fields: BTreeMap::new(),
        }
    }

    /// Reads the optional `"tolerances"` object of a golden document.
    pub fn from_golden(golden: &Value, default: f64) -> Result<Self> {
        let mut t = Self::uniform(default);
        if let Some(obj) = golden.get("tolerances") {
            let obj = obj.as_object().ok_or_else(|| schema("tolerances", "expected an object"))?;
            for (k, v) in obj {
                let v = v.as_f64().ok_or_else(|| schema(&format!("tolerances.{k}"), "expected a number"))?;
                t.fields.insert(k.clone(), v);
            }
        }
        Ok(t)
    }

    fn get(&self, field: &str) -> f64 {
        self.fields.get(field).copied().unwrap_or(self.default)
    }
}

fn schema(path: &str, reason: &str) -> Error {
    Error::Schema {
        path: path.to_string(),
        reason: reason.to_string(),
    }
}

/// Compares the `"values"` sections elementwise. Structural differences
/// (missing keys, type or length mismatches) are schema errors; numeric
/// differences beyond tolerance give `Ok(false)`.
pub fn compare_golden(report: &Value, golden: &Value, tol: &GoldenTolerances) -> Result<bool> {
    for doc in [report, golden] {
        if doc.get("schema").and_then(Value::as_str) != Some(GOLDEN_SCHEMA) {
            return Err(schema("schema", &format!("expected {GOLDEN_SCHEMA:?}")));
        }
    }
    let (r, g) = match (report.get("values"), golden.get("values")) {
        (Some(Value::Object(r)), Some(Value::Object(g))) => (r, g),
        _ => return Err(schema("values", "expected an object")),
    };
    let mut ok = true;
    for (k, gv) in g {
        let rv = r.get(k).ok_or_else(|| schema(&format!("values.{k}"), "missing from report"))?;
        ok &= compare_value(rv, gv, tol.get(k), &format!("values.{k}"))?;
    }
    if let Some(extra) = r.keys().find(|k| !g.contains_key(*k)) {
        return Err(schema(&format!("values.{extra}"), "missing from golden file"));
    }
    Ok(ok)
}

fn compare_value(r: &Value, g: &Value, tol: f64, path: &str) -> Result<bool> {
    match (r, g) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
            Ok((a - b).abs() <= tol)
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Err(schema(path, &format!("length {} vs {}", a.len(), b.len())));
            }
            let mut ok = true;
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                ok &= compare_value(x, y, tol, &format!("{path}[{i}]"))?;
            }
            Ok(ok)
        }
        (Value::Object(a), Value::Object(b)) => {
            if a.len() != b.len() || a.keys().any(|k| !b.contains_key(k)) {
                return Err(schema(path, "object keys differ"));
            }
            let mut ok = true;
            for (k, x) in a {
                ok &= compare_value(x, &b[k], tol, &format!("{path}.{k}"))?;
            }
            Ok(ok)
        }
        (Value::String(a), Value::String(b)) => Ok(a == b),
        (Value::Bool(a), Value::Bool(b)) => Ok(a == b),
        (Value::Null, Value::Null) => Ok(true),
        _ => Err(schema(path, "type mismatch")),
    }
}

/// Golden quantities of the 3×3 compass model: `E₀`, gap, the `A`-basis
/// coefficients of `C₀` and its reduced density matrix on sites (0, 1).
pub fn golden_document(cfg: &RunConfig) -> Result<Value> {
    let h = cfg.model.build()?;
    let gs = solve(cfg, &h)?;
    if gs.degeneracy() != 2 {
        return Err(Error::InvalidParams(format!(
            "golden quantities need a doubly degenerate ground space, got {}",
            gs.degeneracy()
        )));
    }
    let d = decompose_ground_state(&gs.basis[0])?;
    let mv = marginal_vector(&gs.basis[0], h.n_sites())?;
    let rho01 = mv.get(0, 1).expect("pair (0,1) exists");
    Ok(json!({
        "schema": GOLDEN_SCHEMA,
        "model": cfg.model.label(),
        "note": "C0 is the ground state with column parity +1 on column 0, phase fixed so its first significant amplitude is real positive; a_i = <A_i|C0>; rdm_c0_01 is row-major over |s0 s1>, site 0 most significant.",
        "values": {
            "e0": gs.e0,
            "gap": gs.gap,
            "a": d.a.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "rdm_c0_01": matrix_pairs(rho01),
        },
        "tolerances": {
            "e0": 1e-8,
            "gap": 1e-8,
            "a": 1e-9,
            "rdm_c0_01": 1e-9,
        },
    }))
}

fn run_golden(cfg: &RunConfig, compare: Option<&Path>) -> Result<RunOutcome> {
    let doc = golden_document(cfg)?;
    let Some(path) = compare else {
        return Ok(RunOutcome {
            exit_code: EXIT_PASS,
            summary: format!("{}: golden quantities computed\n", cfg.model.label()),
            report: doc,
        });
    };
    let golden: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let tol = GoldenTolerances::from_golden(&golden, cfg.tol.certificate)?;
    let matches = compare_golden(&doc, &golden, &tol)?;
    let (exit_code, word) = verdict(matches);
    Ok(RunOutcome {
        exit_code,
        summary: format!("{}: golden comparison against {} {word}\n", cfg.model.label(), path.display()),
        report: json!({
            "task": "golden",
            "golden_file": path.file_name().map(|f| f.to_string_lossy().into_owned()),
            "matches": matches,
            "computed": doc,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compass(n: usize, boundary: Boundary) -> ModelSpec {
        ModelSpec::Compass(CompassParams::new(n, 1.0, 1.0, boundary))
    }

    #[test]
    fn validation_catches_incomplete_configs() {
        let bad = [
            RunConfig::new(compass(3, Boundary::Cyclic), Task::Blindness { m: 0 }),
            RunConfig::new(compass(3, Boundary::Cyclic), Task::Stabilizer { m: 2 }),
            RunConfig::new(compass(2, Boundary::Cyclic), Task::Kl),
            RunConfig::new(compass(2, Boundary::Open), Task::Counterexample),
            RunConfig::new(ModelSpec::Toric { l: 1 }, Task::Stabilizer { m: 1 }),
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
            assert_eq!(run(&cfg).exit_code, EXIT_ERROR);
        }
        let mut cfg = RunConfig::new(compass(3, Boundary::Cyclic), Task::Kl);
        cfg.tol.certificate = -1.0;
        assert!(cfg.validate().is_err());
        cfg.tol.certificate = 1e-9;
        cfg.threads = Some(0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn stabilizer_exit_codes() {
        let pass = run(&RunConfig::new(ModelSpec::Toric { l: 2 }, Task::Stabilizer { m: 1 }));
        assert_eq!(pass.exit_code, EXIT_PASS);
        let fail = run(&RunConfig::new(ModelSpec::Toric { l: 2 }, Task::Stabilizer { m: 2 }));
        assert_eq!(fail.exit_code, EXIT_FAIL);
        assert_eq!(fail.report["witness"]["weight"], 2);
    }

    #[test]
    fn dense_limit_is_an_error() {
        let out = run(&RunConfig::new(ModelSpec::Toric { l: 3 }, Task::Kl));
        assert_eq!(out.exit_code, EXIT_ERROR);
        assert!(out.report["error"].as_str().unwrap().contains("dense limit"));
    }

    #[test]
    fn open_2x2_fermion_bridge_passes() {
        let out = run(&RunConfig::new(compass(2, Boundary::Open), Task::FermionVerify));
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.summary);
        assert!(out.report["ground_space_check"]["distance"].as_f64().unwrap() < 1e-8);
    }

    fn golden_doc(values: Value) -> Value {
        json!({ "schema": GOLDEN_SCHEMA, "values": values })
    }

    #[test]
    fn golden_comparison() {
        let a = golden_doc(json!({ "e0": -11.0, "a": [[0.5, 0.0]] }));
        let tol = GoldenTolerances {
            default: 1e-9,
            fields: [("e0".to_string(), 1e-8)].into(),
        };
        assert!(compare_golden(&a, &a, &tol).unwrap());
        let shifted = golden_doc(json!({ "e0": -11.0 + 1e-6, "a": [[0.5, 0.0]] }));
        assert!(!compare_golden(&shifted, &a, &tol).unwrap());
        let short = golden_doc(json!({ "e0": -11.0, "a": [] }));
        assert!(matches!(compare_golden(&short, &a, &tol), Err(Error::Schema { .. })));
        let missing = golden_doc(json!({ "a": [[0.5, 0.0]] }));
        assert!(matches!(compare_golden(&missing, &a, &tol), Err(Error::Schema { .. })));
        assert!(matches!(
            compare_golden(&json!({ "values": {} }), &a, &tol),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn golden_tolerances_read_from_document() {
        let doc = json!({ "tolerances": { "e0": 1e-8 } });
        let t = GoldenTolerances::from_golden(&doc, 1e-9).unwrap();
        assert_eq!(t.get("e0"), 1e-8);
        assert_eq!(t.get("gap"), 1e-9);
        assert!(GoldenTolerances::from_golden(&json!({ "tolerances": 3 }), 1e-9).is_err());
    }
}
