//! Self-check suite: norm conservation, solver cross-validation, analytic
//! errata demonstrations, observable invariants, and the qualitative bands
//! the observable traces are expected to land in.
//!
//! Hard checks gate the `validate` command's exit status. Band checks are
//! reported but never fail the run: they characterize trajectories, and when
//! one falls outside its band the detail line carries the same statistic
//! recomputed from the uncorrected analytic amplitudes for comparison.

use num_complex::Complex64;

use crate::dynamics::{
    closed_form_amplitudes, initial_amplitudes, linear_grid, ode_evolve, ode_evolve_block,
    total_norm, truncation_cutoff, ClosedFormVariant, ResonancePropagator, WaveFunction,
};
use crate::error::Result;
use crate::nonlinearity::Nonlinearity;
use crate::observables::{observable_record, ObservableRecord};
use crate::spectral::{spectral_coefficients, symmetrized_block_matrix};

/// Settings for one validation run.
#[derive(Debug, Clone)]
pub struct ValidationConfig {
    pub alpha_sq: f64,
    pub lamb_dicke: f64,
    pub t_max: f64,
    pub steps: usize,
    pub tail_epsilon: f64,
    pub ode_tolerance: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            alpha_sq: 10.0,
            lamb_dicke: Nonlinearity::DEFAULT_LAMB_DICKE,
            t_max: 25.0,
            steps: 1000,
            tail_epsilon: 1e-12,
            ode_tolerance: 1e-10,
        }
    }
}

/// Result of a single check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    /// Hard checks gate the exit status; band checks are informational.
    pub hard: bool,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn hard(name: impl Into<String>, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            hard: true,
            passed,
            detail,
        }
    }

    fn band(name: impl Into<String>, in_band: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            hard: false,
            passed: in_band,
            detail,
        }
    }
}

fn deformation_name(f: Nonlinearity) -> &'static str {
    match f {
        Nonlinearity::Constant => "constant",
        Nonlinearity::Harmonious => "harmonious",
        Nonlinearity::TrappedIon { .. } => "trapped-ion",
    }
}

/// Everything computed once per deformation and reused across checks.
struct Trajectory {
    f: Nonlinearity,
    wf0: WaveFunction,
    grid: Vec<f64>,
    eigen: Vec<WaveFunction>,
    ode: Vec<WaveFunction>,
    records: Vec<ObservableRecord>,
    propagator: ResonancePropagator,
}

impl Trajectory {
    fn compute(f: Nonlinearity, cfg: &ValidationConfig) -> Result<Self> {
        let alpha = Complex64::new(cfg.alpha_sq.sqrt(), 0.0);
        let n_max = truncation_cutoff(alpha, cfg.tail_epsilon);
        let wf0 = initial_amplitudes(alpha, n_max);
        let grid = linear_grid(cfg.t_max, cfg.steps);
        let propagator = ResonancePropagator::new(f, n_max)?;
        let eigen = propagator.propagate_grid(&wf0, &grid);
        let ode = ode_evolve(&wf0, f, 0.0, 0.0, &grid, cfg.ode_tolerance)?;
        let records = crate::observables::observable_records(&eigen)?;
        Ok(Trajectory {
            f,
            wf0,
            grid,
            eigen,
            ode,
            records,
            propagator,
        })
    }

    /// Indices spaced so at least 50 sample times enter the cross-checks.
    fn sparse_indices(&self) -> Vec<usize> {
        let stride = (self.grid.len() / 50).max(1);
        (0..self.grid.len()).step_by(stride).collect()
    }
}

fn max_amplitude_difference(a: &WaveFunction, b: &WaveFunction) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        for (x, y) in a.c(i).iter().zip(b.c(i)) {
            worst = worst.max((x - y).norm());
        }
    }
    worst
}

/// Assemble a full state at time `t` from analytic per-block amplitudes.
fn closed_form_state(
    wf0: &WaveFunction,
    f: Nonlinearity,
    t: f64,
    variant: ClosedFormVariant,
) -> Result<WaveFunction> {
    let mut wf = wf0.clone();
    wf.set_t(t);
    for n in 0..=wf0.n_max() {
        let scale = wf0.amp(0, n);
        let unit = closed_form_amplitudes(n as u32, f, t, variant)?;
        let block: [Complex64; 6] = std::array::from_fn(|i| unit[i] * scale);
        wf.set_block(n, &block);
    }
    Ok(wf)
}

/// Run every check and collect the outcomes.
pub fn run_all(cfg: &ValidationConfig) -> Result<Vec<CheckOutcome>> {
    let deformations = [
        Nonlinearity::Constant,
        Nonlinearity::Harmonious,
        Nonlinearity::TrappedIon {
            lamb_dicke: cfg.lamb_dicke,
        },
    ];
    let mut out = Vec::new();

    let mut trajectories = Vec::new();
    for f in deformations {
        trajectories.push(Trajectory::compute(f, cfg)?);
    }

    for traj in &trajectories {
        let name = deformation_name(traj.f);

        // norm conservation on both paths
        let worst_ode = traj
            .ode
            .iter()
            .map(|wf| (total_norm(wf) - 1.0).abs())
            .fold(0.0f64, f64::max);
        out.push(CheckOutcome::hard(
            format!("norm-ode-{name}"),
            worst_ode < 1e-8,
            format!("max |norm-1| = {worst_ode:.3e} (tolerance 1e-8)"),
        ));
        let worst_eigen = traj
            .eigen
            .iter()
            .map(|wf| (total_norm(wf) - 1.0).abs())
            .fold(0.0f64, f64::max);
        out.push(CheckOutcome::hard(
            format!("norm-eigen-{name}"),
            worst_eigen < 1e-12,
            format!("max |norm-1| = {worst_eigen:.3e} (tolerance 1e-12)"),
        ));

        // solver cross-validation at >= 50 sample times
        let mut worst_pair: f64 = 0.0;
        for &k in &traj.sparse_indices() {
            worst_pair = worst_pair.max(max_amplitude_difference(&traj.eigen[k], &traj.ode[k]));
        }
        out.push(CheckOutcome::hard(
            format!("oracle-equivalence-{name}"),
            worst_pair < 1e-6,
            format!("max per-amplitude eigen/ode difference = {worst_pair:.3e} (tolerance 1e-6)"),
        ));

        // corrected analytic amplitudes against the eigen path
        let mut worst_cf: f64 = 0.0;
        for &k in &traj.sparse_indices() {
            let cf = closed_form_state(
                &traj.wf0,
                traj.f,
                traj.grid[k],
                ClosedFormVariant::Corrected,
            )?;
            worst_cf = worst_cf.max(max_amplitude_difference(&cf, &traj.eigen[k]));
        }
        out.push(CheckOutcome::hard(
            format!("closed-form-corrected-{name}"),
            worst_cf < 1e-10,
            format!("max difference vs eigen path = {worst_cf:.3e} (tolerance 1e-10)"),
        ));

        // Taylor coefficients of the ODE path at t = 0
        out.push(taylor_check(traj.f));

        // observable invariants
        out.push(purity_check(traj));
        out.push(range_check(traj));
    }

    // the uncorrected amplitudes must deviate visibly (constant coupling)
    out.push(printed_deviation_check(&trajectories[0])?);
    out.push(printed_taylor_check());
    out.push(x3_trace_check(cfg)?);
    out.push(initial_record_check(cfg)?);
    out.push(periodicity_check(&trajectories[1]));

    // qualitative bands (report-only)
    out.extend(band_checks(&trajectories)?);
    Ok(out)
}

/// Sixth-order-accurate Richardson pair of one-sided difference quotients.
fn richardson(d_full: Complex64, d_half: Complex64) -> Complex64 {
    (4.0 * d_half - d_full) / 3.0
}

/// Finite-difference Taylor coefficients of the ODE path at t = 0, per unit
/// C1(n,0), block n = 0:
/// C1'' = -2V1², C2' = -iV1, C3'' = -V1V2, C4''' = 3iV1V2V3, C5'' = -2V1V2,
/// C6'''' = 6V1V2V3V4.
fn taylor_check(f: Nonlinearity) -> CheckOutcome {
    let name = format!("taylor-ode-{}", deformation_name(f));
    let delta = 0.04;
    let mut u0 = [Complex64::new(0.0, 0.0); 6];
    u0[0] = Complex64::new(1.0, 0.0);
    let grid = [delta / 2.0, delta];
    let sol = match ode_evolve_block(f, 0, 0.0, 0.0, &u0, &grid, 1e-12) {
        Ok(sol) => sol,
        Err(e) => return CheckOutcome::hard(name, false, format!("integration failed: {e}")),
    };
    let v = f.coupling_strengths(0).unwrap().v;
    let (v1, v2, v3, v4) = (v[0], v[1], v[2], v[3]);
    let i = Complex64::new(0.0, 1.0);
    let targets: [(usize, u32, Complex64, &str); 6] = [
        (0, 2, Complex64::new(-2.0 * v1 * v1, 0.0), "C1''"),
        (1, 1, -i * v1, "C2'"),
        (2, 2, Complex64::new(-v1 * v2, 0.0), "C3''"),
        (3, 3, 3.0 * i * v1 * v2 * v3, "C4'''"),
        (4, 2, Complex64::new(-2.0 * v1 * v2, 0.0), "C5''"),
        (5, 4, Complex64::new(6.0 * v1 * v2 * v3 * v4, 0.0), "C6''''"),
    ];
    let factorial = [1.0, 1.0, 2.0, 6.0, 24.0];
    let mut worst: f64 = 0.0;
    let mut worst_name = "";
    for (idx, order, target, label) in targets {
        let base = if idx == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let q = |u: &[Complex64; 6], h: f64| {
            factorial[order as usize] * (u[idx] - base) / h.powi(order as i32)
        };
        let est = richardson(q(&sol[1], delta), q(&sol[0], delta / 2.0));
        let rel = (est - target).norm() / target.norm();
        if rel > worst {
            worst = rel;
            worst_name = label;
        }
    }
    CheckOutcome::hard(
        name,
        worst < 1e-4,
        format!("worst relative error {worst:.3e} at {worst_name} (tolerance 1e-4)"),
    )
}

/// The uncorrected amplitudes must miss the true dynamics by at least 0.01
/// somewhere on the constant-coupling C1 trace.
fn printed_deviation_check(traj: &Trajectory) -> Result<CheckOutcome> {
    let mut worst_c1: f64 = 0.0;
    for &k in &traj.sparse_indices() {
        let printed =
            closed_form_state(&traj.wf0, traj.f, traj.grid[k], ClosedFormVariant::Printed)?;
        for (a, b) in printed.c(0).iter().zip(traj.eigen[k].c(0)) {
            worst_c1 = worst_c1.max((a - b).norm());
        }
    }
    Ok(CheckOutcome::hard(
        "closed-form-printed-deviates",
        worst_c1 >= 0.01,
        format!("max C1 deviation vs eigen path = {worst_c1:.3e} (must be >= 0.01)"),
    ))
}

/// Direct demonstration that the uncorrected C2 and C4 fail their Taylor
/// coefficients: C2'(0) comes out -i independent of V1, and C4''' flips sign.
fn printed_taylor_check() -> CheckOutcome {
    let ti = Nonlinearity::TrappedIon {
        lamb_dicke: Nonlinearity::DEFAULT_LAMB_DICKE,
    };
    let delta = 1e-4;
    let v = ti.coupling_strengths(3).unwrap().v;
    let printed = closed_form_amplitudes(3, ti, delta, ClosedFormVariant::Printed).unwrap();
    let c2_quot = printed[1] / delta;
    let target = Complex64::new(0.0, -v[0]);
    let c2_fails = (c2_quot - target).norm() / target.norm() > 1e-2;
    let c2_is_unit = (c2_quot - Complex64::new(0.0, -1.0)).norm() < 1e-2;

    let constant = Nonlinearity::Constant;
    let vb = constant.coupling_strengths(0).unwrap().v;
    let printed_b = closed_form_amplitudes(0, constant, delta, ClosedFormVariant::Printed).unwrap();
    let c4_quot = 6.0 * printed_b[3] / delta.powi(3);
    let c4_target = Complex64::new(0.0, 3.0 * vb[0] * vb[1] * vb[2]);
    let c4_sign_flipped = (c4_quot + c4_target).norm() / c4_target.norm() < 0.05;

    CheckOutcome::hard(
        "taylor-printed-fails",
        c2_fails && c2_is_unit && c4_sign_flipped,
        format!(
            "printed C2'(0) = {c2_quot:.4} (true -i V1 = {target:.4}); printed C4''' / true = {:.4}",
            (c4_quot / c4_target).re
        ),
    )
}

/// tr(M_s²) = 2 x3 for the trace-consistent invariant and misses the
/// doubled-V3² variant by 6 V3².
fn x3_trace_check(cfg: &ValidationConfig) -> Result<CheckOutcome> {
    let deformations = [
        Nonlinearity::Constant,
        Nonlinearity::Harmonious,
        Nonlinearity::TrappedIon {
            lamb_dicke: cfg.lamb_dicke,
        },
    ];
    let mut worst_rel: f64 = 0.0;
    let mut min_printed_gap = f64::INFINITY;
    for f in deformations {
        for n in 0..=40 {
            let b = f.coupling_strengths(n)?;
            let s = spectral_coefficients(&b)?;
            let m = symmetrized_block_matrix(&b);
            let tr2: f64 = (0..6)
                .map(|i| (0..6).map(|j| m[i][j] * m[j][i]).sum::<f64>())
                .sum();
            let scale = s.x3.abs().max(1.0);
            worst_rel = worst_rel.max((tr2 - 2.0 * s.x3).abs() / scale);
            min_printed_gap = min_printed_gap.min((tr2 - 2.0 * s.x3_printed).abs() / scale);
        }
    }
    Ok(CheckOutcome::hard(
        "x3-trace-identity",
        worst_rel < 1e-9 && min_printed_gap > 0.01,
        format!(
            "max |tr(M²) - 2x3|/x3 = {worst_rel:.3e}; min gap to doubled-V3² variant = {min_printed_gap:.3e}"
        ),
    ))
}

/// All entanglement and nonclassicality signals vanish at t = 0 and the mean
/// photon number equals |α|².
fn initial_record_check(cfg: &ValidationConfig) -> Result<CheckOutcome> {
    let alpha = Complex64::new(cfg.alpha_sq.sqrt(), 0.0);
    let wf0 = initial_amplitudes(alpha, truncation_cutoff(alpha, cfg.tail_epsilon));
    let r = observable_record(&wf0)?;
    let worst = [
        r.s_atoms,
        r.s_atom1,
        r.negativity,
        r.mandel_q,
        r.s_x,
        r.s_y,
        r.mean_n - cfg.alpha_sq,
    ]
    .iter()
    .map(|x| x.abs())
    .fold(0.0f64, f64::max);
    Ok(CheckOutcome::hard(
        "initial-record",
        worst < 1e-8,
        format!("max |field| at t=0 = {worst:.3e} (tolerance 1e-8)"),
    ))
}

fn purity_check(traj: &Trajectory) -> CheckOutcome {
    let name = format!("purity-symmetry-{}", deformation_name(traj.f));
    let stride = (traj.eigen.len() / 100).max(1);
    let mut worst: f64 = 0.0;
    for wf in traj.eigen.iter().step_by(stride) {
        let pa = crate::density::atoms_reduced(wf).purity();
        let pf = crate::density::field_reduced(wf).purity();
        worst = worst.max((pa - pf).abs());
    }
    CheckOutcome::hard(
        name,
        worst < 1e-10,
        format!("max |Tr ρ²_atoms - Tr ρ²_field| = {worst:.3e} (tolerance 1e-10)"),
    )
}

fn range_check(traj: &Trajectory) -> CheckOutcome {
    let name = format!("ranges-{}", deformation_name(traj.f));
    let slack = 1e-9;
    let mut ok = true;
    let mut detail = String::from("all records within range");
    for r in &traj.records {
        let bad = !(r.s_atoms >= -slack
            && r.s_atoms <= 8.0 / 9.0 + slack
            && r.s_atom1 >= -slack
            && r.s_atom1 <= 2.0 / 3.0 + slack
            && r.negativity >= -slack
            && r.negativity <= 1.0 + slack
            && r.mandel_q >= -1.0 - slack
            && r.s_x >= -1.0 - slack
            && r.s_y >= -1.0 - slack
            && (r.s_x + 1.0) * (r.s_y + 1.0) >= 1.0 - 1e-9);
        if bad {
            ok = false;
            detail = format!("range violation at gt = {}", r.t);
            break;
        }
    }
    CheckOutcome::hard(name, ok, detail)
}

/// Every observable of the harmonious trajectory repeats with period π√2.
fn periodicity_check(traj: &Trajectory) -> CheckOutcome {
    debug_assert_eq!(traj.f, Nonlinearity::Harmonious);
    let period = std::f64::consts::PI * std::f64::consts::SQRT_2;
    let mut worst: f64 = 0.0;
    let count = 24;
    for k in 0..count {
        let t = 0.3 + (traj.grid.last().unwrap() - period - 0.6) * k as f64 / count as f64;
        if t <= 0.0 {
            continue;
        }
        let a = observable_record(&traj.propagator.propagate(&traj.wf0, t)).unwrap();
        let b = observable_record(&traj.propagator.propagate(&traj.wf0, t + period)).unwrap();
        for (x, y) in [
            (a.s_atoms, b.s_atoms),
            (a.s_atom1, b.s_atom1),
            (a.negativity, b.negativity),
            (a.mandel_q, b.mandel_q),
            (a.mean_n, b.mean_n),
            (a.s_x, b.s_x),
            (a.s_y, b.s_y),
        ] {
            worst = worst.max((x - y).abs());
        }
    }
    CheckOutcome::hard(
        "periodicity-harmonious",
        worst < 1e-6,
        format!("max observable shift over one period π√2 = {worst:.3e} (tolerance 1e-6)"),
    )
}

/// Peak-to-peak spread of `mean_n` in windows of width 2.
fn windowed_p2p(records: &[ObservableRecord], lo: f64, hi: f64) -> f64 {
    let vals: Vec<f64> = records
        .iter()
        .filter(|r| r.t >= lo && r.t < hi)
        .map(|r| r.mean_n)
        .collect();
    match (
        vals.iter().cloned().reduce(f64::min),
        vals.iter().cloned().reduce(f64::max),
    ) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    }
}

fn band_checks(trajectories: &[Trajectory]) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let constant = &trajectories[0];
    let harmonious = &trajectories[1];
    let trapped = &trajectories[2];
    let t_end = *constant.grid.last().unwrap();

    // time-averaged two-atom entropy, constant coupling
    let late: Vec<&ObservableRecord> = constant.records.iter().filter(|r| r.t >= 5.0).collect();
    let avg = late.iter().map(|r| r.s_atoms).sum::<f64>() / late.len() as f64;
    let in_band = (0.2..=0.45).contains(&avg);
    let mut detail =
        format!("time-averaged S_atoms over gt in [5, {t_end}] = {avg:.4} (band [0.20, 0.45])");
    if !in_band {
        let p = printed_series_average(constant, 5.0)?;
        detail.push_str(&format!("; uncorrected amplitudes give {p:.4}"));
    }
    out.push(CheckOutcome::band(
        "band-constant-entropy-average",
        in_band,
        detail,
    ));

    // harmonious entropy envelope
    let max_s = harmonious
        .records
        .iter()
        .map(|r| r.s_atoms)
        .fold(0.0f64, f64::max);
    out.push(CheckOutcome::band(
        "band-harmonious-entropy-max",
        (0.02..=0.08).contains(&max_s),
        format!("max S_atoms = {max_s:.4} (band [0.02, 0.08])"),
    ));
    let min_s = harmonious
        .records
        .iter()
        .filter(|r| r.t >= 1.0)
        .map(|r| r.s_atoms)
        .fold(f64::INFINITY, f64::min);
    out.push(CheckOutcome::band(
        "band-harmonious-entropy-minima",
        min_s < 1e-3,
        format!("min S_atoms for gt >= 1 is {min_s:.3e} (must dip below 1e-3)"),
    ));

    // trapped-ion late-time entropy stays high
    let late_ti: Vec<f64> = trapped
        .records
        .iter()
        .filter(|r| r.t >= 10.0)
        .map(|r| r.s_atoms)
        .collect();
    if late_ti.is_empty() {
        out.push(CheckOutcome::band(
            "band-trapped-ion-entropy-late",
            false,
            "trajectory too short to evaluate (needs gt >= 10)".into(),
        ));
    } else {
        let (lo, hi) = (
            late_ti.iter().cloned().fold(f64::INFINITY, f64::min),
            late_ti.iter().cloned().fold(0.0f64, f64::max),
        );
        let in_band = lo >= 0.5 && hi <= 0.89;
        let mut detail =
            format!("late-time S_atoms (gt >= 10) in [{lo:.4}, {hi:.4}] (band [0.50, 0.89])");
        if !in_band {
            let p = printed_series_average(trapped, 10.0)?;
            detail.push_str(&format!("; uncorrected amplitudes average {p:.4}"));
        }
        out.push(CheckOutcome::band(
            "band-trapped-ion-entropy-late",
            in_band,
            detail,
        ));
    }

    // harmonious Mandel Q never leaves the negative region
    let max_q = harmonious
        .records
        .iter()
        .map(|r| r.mandel_q)
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(CheckOutcome::band(
        "band-harmonious-mandel-negative",
        max_q <= 1e-3,
        format!("max Mandel Q = {max_q:.3e} (must stay <= 1e-3)"),
    ));

    // harmonious x-quadrature squeezed at all times
    let max_sx = harmonious
        .records
        .iter()
        .map(|r| r.s_x)
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(CheckOutcome::band(
        "band-harmonious-squeezing",
        max_sx <= 1e-3,
        format!("max S_x = {max_sx:.3e} (must stay <= 1e-3)"),
    ));

    // collapse and revival of the constant-coupling mean photon number
    if t_end < 12.0 {
        out.push(CheckOutcome::band(
            "band-constant-collapse-revival",
            false,
            "trajectory too short to evaluate (needs gt >= 12)".into(),
        ));
        return Ok(out);
    }
    let first = windowed_p2p(&constant.records, 0.0, 2.0);
    let mut collapse = f64::INFINITY;
    let mut collapse_at = 0.0;
    let mut w = 4.0;
    while w + 2.0 <= t_end {
        let p = windowed_p2p(&constant.records, w, w + 2.0);
        if p < collapse {
            collapse = p;
            collapse_at = w;
        }
        w += 2.0;
    }
    let mut revival = 0.0f64;
    w = collapse_at + 2.0;
    while w + 2.0 <= t_end {
        revival = revival.max(windowed_p2p(&constant.records, w, w + 2.0));
        w += 2.0;
    }
    let in_band = first >= 10.0 * collapse && revival >= 5.0 * collapse;
    out.push(CheckOutcome::band(
        "band-constant-collapse-revival",
        in_band,
        format!(
            "mean_n spread: initial {first:.3}, collapsed to {collapse:.4} near gt = {collapse_at}, revived to {revival:.3}"
        ),
    ));

    Ok(out)
}

/// Time-averaged two-atom entropy recomputed from the uncorrected analytic
/// amplitudes, for out-of-band comparisons.
fn printed_series_average(traj: &Trajectory, from: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &k in &traj.sparse_indices() {
        if traj.grid[k] < from {
            continue;
        }
        let wf = closed_form_state(&traj.wf0, traj.f, traj.grid[k], ClosedFormVariant::Printed)?;
        sum += crate::observables::linear_entropy(&crate::density::atoms_reduced(&wf));
        count += 1;
    }
    Ok(sum / count.max(1) as f64)
}
