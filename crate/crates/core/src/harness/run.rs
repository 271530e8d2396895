use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::assemble::{assemble, Assembled};
use super::config::{ExperimentConfig, RunMode};
use crate::cmc::stokes_identity_check;
use crate::equivariant::checks::{gradient_consistency, invariance_defect};
use crate::equivariant::{
    analyze_center, build_slice, continue_branch, equivariance_residual, slice_project, winding_degree, Branch,
    BranchStatus, NondegeneracyReport,
};
use crate::error::{Error, Result};

/// One measured quantity against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, passed: value <= threshold }
    }

    fn equals(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self { name: name.into(), value, threshold: expected, passed: value == expected }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSummary {
    pub status: BranchStatus,
    pub samples: usize,
    pub lambda_reached: f64,
    pub max_abs_multiplier: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub seed: u64,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub mode: RunMode,
    pub lambda0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nondegeneracy: Option<NondegeneracyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchSummary>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Diagnostic payload of a solver failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub provenance: Provenance,
}

impl RunReport {
    /// `0` when every check passed, `1` when some check failed, `3` on solver failure.
    pub fn exit_code(&self) -> i32 {
        match (&self.error, self.passed) {
            (Some(_), _) => 3,
            (None, true) => 0,
            (None, false) => 1,
        }
    }
}

/// Whether an error stems from the configuration rather than the numerics.
pub fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::Unknown { .. } | Error::Sizing(_) | Error::Io(_))
}

/// First 16 hex digits of the SHA-256 of the little-endian state bytes.
pub fn state_checksum(state: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in state {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn branch_table(branch: &Branch) -> String {
    let mut out = String::from("lambda,state_checksum,max_abs_multiplier,residual,kernel_dim\n");
    for s in &branch.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.lambda,
            state_checksum(&s.state),
            s.max_abs_multiplier(),
            s.residual,
            s.kernel_dim
        );
    }
    out
}

/// One row per sample: `λ` followed by the full-precision state.
pub fn state_table(branch: &Branch) -> String {
    let mut out = String::new();
    for s in &branch.samples {
        out.push_str(&s.lambda.to_string());
        for v in &s.state {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Assembles and runs the configured pipeline, writing `report.json` and,
/// for continuations, `branch.csv` and `states.csv` into `out`.
///
/// Configuration errors are returned as `Err`; solver failures are folded
/// into the report.
pub fn run(config: &ExperimentConfig, out: Option<&Path>) -> Result<RunReport> {
    let assembled = assemble(config)?;
    let mut report = RunReport {
        problem: assembled.problem.name(),
        mode: config.run.mode,
        lambda0: assembled.lambda0,
        nondegeneracy: None,
        branch: None,
        checks: Vec::new(),
        passed: false,
        error: None,
        provenance: Provenance { version: env!("CARGO_PKG_VERSION"), seed: config.run.seed, config: config.clone() },
    };
    let mut branch = None;
    let outcome = match config.run.mode {
        RunMode::Analyze => analyze(config, &assembled, &mut report),
        RunMode::Continue => continuation(config, &assembled, &mut report).map(|b| branch = Some(b)),
        RunMode::Verify => verify(config, &assembled, &mut report),
        RunMode::Project => project(config, &assembled, &mut report),
    };
    if let Err(e) = outcome {
        if is_config_error(&e) {
            return Err(e);
        }
        report.error = Some(e.to_string());
    }
    report.passed = report.error.is_none() && report.checks.iter().all(|c| c.passed);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        if let Some(b) = &branch {
            std::fs::write(dir.join("branch.csv"), branch_table(b))?;
            std::fs::write(dir.join("states.csv"), state_table(b))?;
        }
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(dir.join("report.json"), json + "\n")?;
    }
    Ok(report)
}

fn center_residual(config: &ExperimentConfig, a: &Assembled, report: &mut RunReport) -> Result<()> {
    let r = a.problem.gradient(&a.x0, a.lambda0)?.amax();
    report.checks.push(Check::at_most("center_residual", r, config.solver.residual_tol));
    Ok(())
}

fn analyze(config: &ExperimentConfig, a: &Assembled, report: &mut RunReport) -> Result<()> {
    center_residual(config, a, report)?;
    let (nd, _, _) = analyze_center(a.problem.as_ref(), &a.x0, a.lambda0, &config.solver)?;
    report.checks.push(Check::equals("kernel_dim_matches_orbit_rank", nd.kernel_dim as f64, nd.orbit_rank as f64));
    report.checks.push(Check::at_most("principal_angle", nd.principal_angle, config.solver.angle_tol));
    report.nondegeneracy = Some(nd);
    Ok(())
}

fn continuation(config: &ExperimentConfig, a: &Assembled, report: &mut RunReport) -> Result<Branch> {
    let target = config.run.lambda_target.ok_or(Error::Config("continue needs run.lambda_target".into()))?;
    let (nd, _, _) = analyze_center(a.problem.as_ref(), &a.x0, a.lambda0, &config.solver)?;
    report.nondegeneracy = Some(nd);
    let branch = continue_branch(a.problem.as_ref(), &a.x0, a.lambda0, target, &config.step, &config.solver)?;
    let worst = branch.samples.iter().map(|s| s.max_abs_multiplier()).fold(0.0, f64::max);
    let residual = branch.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    report.checks.push(Check::equals(
        "branch_completed",
        f64::from(u8::from(branch.status == BranchStatus::Completed)),
        1.0,
    ));
    report.checks.push(Check::at_most("max_abs_multiplier", worst, config.solver.multiplier_tol));
    report.checks.push(Check::at_most("max_residual", residual, config.solver.residual_tol));
    report.branch = Some(BranchSummary {
        status: branch.status,
        samples: branch.samples.len(),
        lambda_reached: branch.last().lambda,
        max_abs_multiplier: worst,
        warnings: branch.warnings.clone(),
    });
    Ok(branch)
}

fn random_group_element(rng: &mut impl Rng, d: usize, radius: f64) -> DVector<f64> {
    let g: DVector<f64> = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    let scale = radius * rng.gen_range(0.0..1.0f64).sqrt() / g.norm().max(1e-300);
    g * scale
}

fn verify(config: &ExperimentConfig, a: &Assembled, report: &mut RunReport) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.run.seed);
    let p = a.problem.as_ref();
    center_residual(config, a, report)?;
    let radius = config.run.group_radius.min(0.9 * p.group().domain_radius());
    let (mut grad, mut equi, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..config.run.samples {
        let x = &a.x0 + a.layout.smooth_field(&mut rng, 0.1);
        // lean on δf so the pairing cannot vanish by orthogonality of modes
        let df = p.gradient(&x, a.lambda0)?;
        let v = a.layout.smooth_field(&mut rng, 1.0) + &df / df.amax().max(1e-12);
        grad = grad.max(gradient_consistency(p, &x, &v, a.lambda0, 1e-5)?);
        equi = equi.max(equivariance_residual(p, &x, a.lambda0)?);
        let g = random_group_element(&mut rng, p.group().dim(), radius);
        inv = inv.max(invariance_defect(p, &x, &g, a.lambda0)?);
    }
    report.checks.push(Check::at_most("gradient_fd_relative", grad, 1e-5));
    report.checks.push(Check::at_most("equivariance_residual", equi, 1e-8));
    report.checks.push(Check::at_most("invariance_defect", inv, 1e-8));
    if let Some(cmc) = &a.cmc {
        let curve = &cmc.geometry().reference;
        let s = stokes_identity_check(curve);
        if let Some(r2) = s.r2 {
            report.checks.push(Check::at_most("stokes_r1", s.r1, 1e-12));
            report.checks.push(Check::at_most("stokes_r2", r2, 1e-12));
        } else {
            // non-contractible loop: the transverse flux integrates to the length
            let flux = s.flux.iter().fold(0.0, |m: f64, f| m.max(f.abs()));
            report.checks.push(Check::at_most("stokes_flux_minus_length", (flux - s.length).abs(), 1e-10));
        }
    }
    Ok(())
}

fn project(config: &ExperimentConfig, a: &Assembled, report: &mut RunReport) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.run.seed);
    let p = a.problem.as_ref();
    let slice = build_slice(p, &a.x0, a.lambda0, &config.solver)?;
    let group = p.group();
    let radius = config.run.group_radius.min(0.9 * group.domain_radius());
    let (mut res, mut inversion) = (0.0f64, 0.0f64);
    for _ in 0..config.run.samples {
        let g = random_group_element(&mut rng, group.dim(), radius);
        let x = group.act(&g, &a.x0)?;
        let proj = slice_project(p, &x, &slice, &config.solver)?;
        res = res.max(proj.residual);
        if group.is_abelian() {
            let err = slice.generators.iter().map(|&i| (proj.g[i] + g[i]).abs()).fold(0.0, f64::max);
            inversion = inversion.max(err);
        }
    }
    report.checks.push(Check::at_most("projection_residual", res, 1e-8));
    if group.is_abelian() {
        report.checks.push(Check::at_most("inversion_error", inversion, 1e-6));
    }
    if matches!(slice.generators.len(), 1 | 2) {
        let deg = winding_degree(p, &a.x0, &slice, 0.5 * radius, 64)?;
        report.checks.push(Check::equals("abs_winding_degree", f64::from(deg.abs()), 1.0));
    }
    report.nondegeneracy = Some(slice.report);
    Ok(())
}
