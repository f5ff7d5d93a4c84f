//! `evolve`, `qfi`, `fi`, `sweep`, `optimize` and `iterate`.

use std::f64::consts::PI;

use idm_core::estimation::{cramer_rao_variance, fisher_information, qfi_pure, CramerRao};
use idm_core::gnd::{
    gnd_fock_state, gnd_fock_state_derivative, gnd_osc_qfi, gnd_osc_qsnr, gnd_qubit_bloch, gnd_qubit_qfi,
    gnd_qubit_qsnr, gnd_spin_probabilities, gnd_theta_opt, GndParams,
};
use idm_core::mid::{
    mid_fock_density, mid_osc_qsnr, mid_osc_qsnr_at, mid_qubit_bloch, mid_qubit_qfi, mid_qubit_qsnr,
    mid_spin_probabilities, MidParams, MidQubitQfi,
};
use idm_core::optimizer::{
    fit_g, g_samples, iterate_estimation, maximize_1d, optimal_c_with, try_maximize_1d, IterationSetup, ProtocolModel,
    C_BRACKET, FIT_GRID,
};
use idm_core::state::TRUNCATION_WARNING;
use idm_core::{coherent_amplitudes, CoherentSpec, ProbabilityModel};
use rayon::prelude::*;

use crate::args::OptimizeTarget;
use crate::config::{parse_real, Grid, Model, RunConfig, System};
use crate::error::{CliError, CliResult};
use crate::table::{Output, Table, Value};

pub const MAX_SWEEP_POINTS: usize = 1_000_000;
const QUBIT_X_BRACKET: (f64, f64) = (1e-4, 1.0);
const GND_OSC_X_BRACKET: (f64, f64) = (0.1, 3.0);
const OPT_TOL: f64 = 1e-9;
const C_TOL: f64 = 1e-5;

fn default_times(cfg: &RunConfig) -> Grid {
    Grid {
        lo: 0.0,
        hi: 10.0 / cfg.omega,
        points: 101,
        log: false,
    }
}

fn cr_value(v: CramerRao) -> Value {
    match v {
        CramerRao::Finite(v) => Value::Num(v),
        CramerRao::Unbounded => Value::Text("unbounded".into()),
    }
}

fn join_notes(notes: Vec<String>) -> Value {
    if notes.is_empty() {
        Value::Null
    } else {
        Value::Text(notes.join("; "))
    }
}

fn at_pole(theta: f64) -> bool {
    theta == 0.0 || theta == PI
}

fn gnd_osc_annotation(alpha: &CoherentSpec) -> String {
    let n = alpha.mean_number();
    format!(
        "max over x is 4|alpha|^2 e^-2 = {} at x = 1; the published table states 4|alpha|^2 = {}",
        4.0 * n * (-2.0f64).exp(),
        4.0 * n
    )
}

/// Bloch components (qubit) or Fock populations (oscillator) over time.
pub fn evolve(cfg: &RunConfig) -> CliResult<Output> {
    let model = cfg.require_model()?;
    let lambda = cfg.param(model);
    let times = cfg.times(default_times(cfg));
    match cfg.system {
        System::Qubit => {
            let probe = cfg.probe()?;
            let mut table = Table::new(["t [time]", "r1 [1]", "r2 [1]", "r3 [1]", "purity [1]"]);
            for &t in &times {
                let r = match model {
                    Model::Mid => mid_qubit_bloch(&probe, &MidParams::new(cfg.omega, lambda, t)?),
                    Model::Gnd => gnd_qubit_bloch(&probe, &GndParams::new(cfg.omega, lambda, t)?),
                };
                table.push(vec![t.into(), r.r1.into(), r.r2.into(), r.r3.into(), r.purity().into()]);
            }
            Ok(Output::rows(table))
        }
        System::Oscillator => {
            let dim = cfg.dim_for(&cfg.alpha)?;
            let psi0 = coherent_amplitudes(&cfg.alpha, dim)?;
            // the six most populated levels of the initial state, in level order
            let mut levels: Vec<usize> = (0..dim).collect();
            let p0 = psi0.populations();
            levels.sort_by(|&a, &b| p0[b].total_cmp(&p0[a]).then(a.cmp(&b)));
            levels.truncate(6);
            levels.sort_unstable();
            let mut columns = vec![
                "t [time]".to_string(),
                "mean_n [1]".into(),
                "purity [1]".into(),
                "abs_rho01 [1]".into(),
            ];
            columns.extend(levels.iter().map(|n| format!("p{n} [1]")));
            let mut table = Table::new(columns);
            for &t in &times {
                let (pops, purity, rho01) = match model {
                    Model::Mid => {
                        let rho = mid_fock_density(&cfg.alpha, &MidParams::new(cfg.omega, lambda, t)?, dim)?;
                        let r01 = if dim > 1 { rho.entries()[(0, 1)].norm() } else { 0.0 };
                        (rho.populations(), rho.purity(), r01)
                    }
                    Model::Gnd => {
                        let psi = gnd_fock_state(&psi0, &GndParams::new(cfg.omega, lambda, t)?)?;
                        let c = psi.amplitudes();
                        let r01 = if dim > 1 { (c[0] * c[1].conj()).norm() } else { 0.0 };
                        (psi.populations(), c.norm_squared().powi(2), r01)
                    }
                };
                let mean: f64 = pops.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
                let mut row: Vec<Value> = vec![t.into(), mean.into(), purity.into(), rho01.into()];
                row.extend(levels.iter().map(|&n| Value::Num(pops[n])));
                table.push(row);
            }
            Ok(Output::rows(table))
        }
    }
}

const REPORT_COLUMNS: [&str; 19] = [
    "model",
    "system",
    "parameter",
    "lambda [param]",
    "omega [1/time]",
    "t [time]",
    "x [1]",
    "theta [rad]",
    "phi [rad]",
    "alpha_re [1]",
    "alpha_im [1]",
    "dim",
    "truncation_error [1]",
    "Q [1/param^2]",
    "Q_numeric [1/param^2]",
    "R [1]",
    "M",
    "cr_variance [param^2]",
    "note",
];

/// QFI, QSNR and Cramér–Rao bound at one parameter point.
pub fn qfi(cfg: &RunConfig) -> CliResult<Output> {
    let model = cfg.require_model()?;
    let lambda = cfg.param(model);
    let t = cfg.time(model)?;
    let shots = cfg.shots.unwrap_or(1);
    let w = cfg.omega;
    let mut notes = Vec::new();
    let x = match model {
        Model::Mid => lambda * w * w * t,
        Model::Gnd => lambda * w * t,
    };
    let (mut dim, mut trunc, mut q_numeric) = (Value::Null, Value::Null, Value::Null);
    let (q, r) = match (model, cfg.system) {
        (Model::Mid, System::Qubit) => match mid_qubit_qfi(cfg.theta, &MidParams::new(w, lambda, t)?) {
            MidQubitQfi::Value(q) => (q, lambda * lambda * q),
            MidQubitQfi::ZeroMuLimit { mu_times_q } => {
                notes.push(format!(
                    "mu = 0: Q diverges as (mu Q -> {mu_times_q}) / mu while R -> 0"
                ));
                (f64::INFINITY, 0.0)
            }
        },
        (Model::Gnd, System::Qubit) => {
            let q = gnd_qubit_qfi(cfg.theta, &GndParams::new(w, lambda, t)?);
            (q, lambda * lambda * q)
        }
        (Model::Mid, System::Oscillator) => {
            let d = cfg.dim_for(&cfg.alpha)?;
            let out = mid_osc_qsnr_at(&cfg.alpha, &MidParams::new(w, lambda, t)?, d)?;
            dim = d.into();
            trunc = out.truncation_error.into();
            if out.truncation_warning {
                notes.push(format!(
                    "truncation error {:e} exceeds {TRUNCATION_WARNING:e}",
                    out.truncation_error
                ));
            }
            (out.q, out.r)
        }
        (Model::Gnd, System::Oscillator) => {
            let p = GndParams::new(w, lambda, t)?;
            let d = cfg.dim_for(&cfg.alpha)?;
            let psi0 = coherent_amplitudes(&cfg.alpha, d)?;
            let psi = gnd_fock_state(&psi0, &p)?;
            q_numeric = qfi_pure(&psi, &gnd_fock_state_derivative(&psi0, &p)?)?.into();
            dim = d.into();
            trunc = psi0.truncation_error().into();
            notes.push(gnd_osc_annotation(&cfg.alpha));
            let q = gnd_osc_qfi(&cfg.alpha, &p);
            (q, lambda * lambda * q)
        }
    };
    if cfg.system == System::Qubit && at_pole(cfg.theta) {
        notes.push("probe is an eigenstate of H: the state does not depend on the parameter, Q = 0".into());
    }
    if cfg.system == System::Oscillator && cfg.alpha.abs() == 0.0 {
        notes.push("vacuum probe is an eigenstate of H, Q = 0".into());
    }
    if t == 0.0 {
        notes.push("t = 0: no evolution, Q = 0".into());
    }
    let (are, aim) = match cfg.system {
        System::Qubit => (Value::Null, Value::Null),
        System::Oscillator => (cfg.alpha.alpha.re.into(), cfg.alpha.alpha.im.into()),
    };
    let (theta, phi) = match cfg.system {
        System::Qubit => (cfg.theta.into(), cfg.probe()?.phi.into()),
        System::Oscillator => (Value::Null, Value::Null),
    };
    let mut table = Table::new(REPORT_COLUMNS);
    table.push(vec![
        model.name().into(),
        cfg.system.name().into(),
        model.param_name().into(),
        lambda.into(),
        w.into(),
        t.into(),
        x.into(),
        theta,
        phi,
        are,
        aim,
        dim,
        trunc,
        q.into(),
        q_numeric,
        r.into(),
        shots.into(),
        cr_value(cramer_rao_variance(q, shots)),
        join_notes(notes),
    ]);
    Ok(Output::record(table))
}

/// Fisher information of the spin measurement `|measure-theta, measure-phi>`.
pub fn fi(cfg: &RunConfig) -> CliResult<Output> {
    let model = cfg.require_model()?;
    if cfg.system != System::Qubit {
        return Err(CliError::key("system", "fi is defined for the qubit only"));
    }
    let lambda = cfg.param(model);
    let t = cfg.time(model)?;
    let w = cfg.omega;
    let shots = cfg.shots.unwrap_or(1);
    let (probe, meas) = (cfg.probe()?, cfg.measurement()?);
    let mut notes = Vec::new();
    let (pm, q, x): (ProbabilityModel, f64, f64) = match model {
        Model::Mid => {
            let p = MidParams::new(w, lambda, t)?;
            (
                mid_spin_probabilities(&probe, &meas, &p)?,
                mid_qubit_qfi(cfg.theta, &p).value(),
                p.x(),
            )
        }
        Model::Gnd => {
            let p = GndParams::new(w, lambda, t)?;
            (
                gnd_spin_probabilities(&probe, &meas, &p)?,
                gnd_qubit_qfi(cfg.theta, &p),
                p.x(),
            )
        }
    };
    let f = fisher_information(&pm);
    let ratio = if q > 0.0 && q.is_finite() {
        f / q
    } else if q.is_infinite() {
        notes.push("mu = 0: Q diverges, F/Q = 0".into());
        0.0
    } else {
        notes.push("Q = 0: F/Q undefined".into());
        f64::NAN
    };
    let o = pm.outcomes()[0];
    let mut table = Table::new([
        "model",
        "parameter",
        "lambda [param]",
        "omega [1/time]",
        "t [time]",
        "x [1]",
        "theta [rad]",
        "phi [rad]",
        "measure_theta [rad]",
        "measure_phi [rad]",
        "p [1]",
        "dp [1/param]",
        "F [1/param^2]",
        "Q [1/param^2]",
        "F_over_Q [1]",
        "R_F [1]",
        "M",
        "cr_variance [param^2]",
        "note",
    ]);
    table.push(vec![
        model.name().into(),
        model.param_name().into(),
        lambda.into(),
        w.into(),
        t.into(),
        x.into(),
        probe.theta.into(),
        probe.phi.into(),
        meas.theta.into(),
        meas.phi.into(),
        o.p.into(),
        o.dp.into(),
        f.into(),
        q.into(),
        ratio.into(),
        (lambda * lambda * f).into(),
        shots.into(),
        cr_value(cramer_rao_variance(f, shots)),
        join_notes(notes),
    ]);
    Ok(Output::record(table))
}

fn sweep_variables(model: Model, system: System) -> [&'static str; 2] {
    match (model, system) {
        (_, System::Qubit) => ["x", "theta"],
        (Model::Mid, System::Oscillator) => ["alpha", "c"],
        (Model::Gnd, System::Oscillator) => ["alpha", "x"],
    }
}

fn parse_axis_specs(axes: &[String], values: &[String], allowed: &[&str]) -> CliResult<Vec<(String, Vec<f64>)>> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    let specs = axes.iter().map(|s| (s, true)).chain(values.iter().map(|s| (s, false)));
    for (spec, is_grid) in specs {
        let key = if is_grid { "axis" } else { "values" };
        let (name, body) = spec
            .split_once('=')
            .ok_or_else(|| CliError::key(key, format!("expected name=..., got `{spec}`")))?;
        let name = name.trim();
        if !allowed.contains(&name) {
            return Err(CliError::key(
                key,
                format!("unknown axis `{name}` here; expected one of {allowed:?}"),
            ));
        }
        if out.iter().any(|(n, _)| n == name) {
            return Err(CliError::key(key, format!("axis `{name}` given twice")));
        }
        let vals = if is_grid {
            let g = Grid::parse(key, body)?;
            if g.points < 2 {
                return Err(CliError::key(
                    key,
                    "grid axes need at least 2 points; use --values for one",
                ));
            }
            g.values()
        } else {
            body.split(',')
                .map(|v| parse_real(key, v))
                .collect::<CliResult<Vec<f64>>>()?
        };
        if vals.is_empty() {
            return Err(CliError::key(key, format!("axis `{name}` has no values")));
        }
        out.push((name.to_string(), vals));
    }
    Ok(out)
}

/// R over the Cartesian product of the scaling-variable axes, in
/// lexicographic order of the canonical variable order.
pub fn sweep(cfg: &RunConfig, axes: &[String], values: &[String]) -> CliResult<Output> {
    let model = cfg.require_model()?;
    let vars = sweep_variables(model, cfg.system);
    let given = parse_axis_specs(axes, values, &vars)?;
    let mut grid: Vec<Vec<f64>> = Vec::new();
    for v in vars {
        if let Some((_, vals)) = given.iter().find(|(n, _)| n == v) {
            if v == "theta" && vals.iter().any(|t| !(0.0..=PI).contains(t)) {
                return Err(CliError::key("axis", "theta values must lie in [0, pi]"));
            }
            if v != "theta" && vals.iter().any(|s| *s < 0.0) {
                return Err(CliError::key("axis", format!("`{v}` values must be >= 0")));
            }
            grid.push(vals.clone());
            continue;
        }
        let fixed = match v {
            "theta" => Some(cfg.theta),
            "alpha" => Some(cfg.alpha.abs()),
            _ => cfg.scaling(),
        };
        let fixed = fixed.ok_or_else(|| CliError::key(v, format!("give `{v}` as a flag or as a sweep axis")))?;
        grid.push(vec![fixed]);
    }
    let total = grid
        .iter()
        .try_fold(1usize, |acc, g| acc.checked_mul(g.len()))
        .unwrap_or(usize::MAX);
    if total > MAX_SWEEP_POINTS {
        let per_axis = (MAX_SWEEP_POINTS as f64).powf(1.0 / grid.len() as f64).floor();
        return Err(CliError::key(
            "axis",
            format!(
                "grid has {total} points (limit {MAX_SWEEP_POINTS}); coarsen to at most {per_axis} points per axis"
            ),
        ));
    }
    let oscillator_mid = model == Model::Mid && cfg.system == System::Oscillator;
    let mut columns: Vec<String> = vars
        .iter()
        .map(|v| format!("{v} [{}]", if *v == "theta" { "rad" } else { "1" }))
        .collect();
    columns.push("R [1]".into());
    if oscillator_mid {
        columns.push("dim".into());
        columns.push("truncation_error [1]".into());
    }
    let (n0, n1) = (grid[0].len(), grid[1].len());
    let rows: Vec<Vec<Value>> = (0..n0 * n1)
        .into_par_iter()
        .map(|i| -> CliResult<Vec<Value>> {
            let (a, b) = (grid[0][i / n1], grid[1][i % n1]);
            let mut row: Vec<Value> = vec![a.into(), b.into()];
            match (model, cfg.system) {
                (Model::Mid, System::Qubit) => row.push(mid_qubit_qsnr(a, b).into()),
                (Model::Gnd, System::Qubit) => row.push(gnd_qubit_qsnr(a, b).into()),
                (Model::Gnd, System::Oscillator) => row.push(gnd_osc_qsnr(&CoherentSpec::real(a), b).into()),
                (Model::Mid, System::Oscillator) => {
                    let spec = CoherentSpec::real(a);
                    let dim = cfg.dim_for(&spec)?;
                    let out = mid_osc_qsnr(&spec, b, dim)?;
                    row.extend([out.r.into(), dim.into(), out.truncation_error.into()]);
                }
            }
            Ok(row)
        })
        .collect::<CliResult<_>>()?;
    Ok(Output::rows(Table { columns, rows }))
}

const OPT_COLUMNS: [&str; 11] = [
    "target",
    "variable",
    "argmax",
    "value [1]",
    "evaluations",
    "converged",
    "bracket_lo",
    "bracket_hi",
    "tol",
    "method",
    "note",
];

#[allow(clippy::too_many_arguments)]
fn opt_row(
    target: &str,
    variable: &str,
    argmax: f64,
    value: f64,
    evals: usize,
    converged: bool,
    bracket: (f64, f64),
    tol: f64,
    method: &str,
    note: Option<String>,
) -> Vec<Value> {
    vec![
        target.into(),
        variable.into(),
        argmax.into(),
        value.into(),
        evals.into(),
        converged.into(),
        bracket.0.into(),
        bracket.1.into(),
        tol.into(),
        method.into(),
        note.into(),
    ]
}

fn parse_alphas(s: Option<&str>) -> CliResult<Vec<f64>> {
    match s {
        None => Ok(FIT_GRID.to_vec()),
        Some(s) => s.split(',').map(|v| parse_real("alphas", v)).collect(),
    }
}

/// Optimal conditions for one model/system pair, or the `g(|alpha|)` fit.
pub fn optimize(cfg: &RunConfig, target: OptimizeTarget, alphas: Option<&str>) -> CliResult<Output> {
    let mut table = Table::new(OPT_COLUMNS);
    let t_note = |x: f64, model: Model| -> Option<String> {
        let lambda = match model {
            Model::Mid => cfg.mu,
            Model::Gnd => cfg.gamma,
        }?;
        (lambda > 0.0).then(|| {
            let t = match model {
                Model::Mid => x / (lambda * cfg.omega * cfg.omega),
                Model::Gnd => x / (lambda * cfg.omega),
            };
            format!("t = {t} for {} = {lambda}, omega = {}", model.param_name(), cfg.omega)
        })
    };
    match target {
        OptimizeTarget::MidQubit => {
            let (lo, hi) = QUBIT_X_BRACKET;
            let out = maximize_1d(|x| mid_qubit_qsnr(x, cfg.theta), lo, hi, OPT_TOL)?;
            let note = t_note(out.x(), Model::Mid);
            table.push(opt_row(
                "mid-qubit",
                "x = mu omega^2 t",
                out.x(),
                out.value,
                out.evaluations,
                out.converged,
                (lo, hi),
                OPT_TOL,
                "golden-section",
                note,
            ));
        }
        OptimizeTarget::GndQubit => {
            let x = cfg.x.unwrap_or(1.0);
            let closed = gnd_theta_opt(x)?;
            let tol = 1e-10;
            let scan = try_maximize_1d(|th| Ok(gnd_qubit_qsnr(x, th)), 0.0, PI, tol)?;
            let note = format!(
                "closed form theta_m = 2 atan(e^-2x) = {closed}, R = 4x^2 = {}; R grows without bound in x",
                4.0 * x * x
            );
            table.push(opt_row(
                "gnd-qubit",
                "theta at fixed x",
                scan.x(),
                scan.value,
                scan.evaluations,
                scan.converged,
                (0.0, PI),
                tol,
                "golden-section",
                Some(note),
            ));
        }
        OptimizeTarget::MidOscillator => {
            let dim = cfg.dim_for(&cfg.alpha)?;
            let out = optimal_c_with(&cfg.alpha, dim, C_TOL)?;
            let mut note = format!("|alpha| = {}, dim = {dim}", cfg.alpha.abs());
            if let Some(t) = t_note(out.x(), Model::Mid) {
                note = format!("{note}; {t}");
            }
            table.push(opt_row(
                "mid-oscillator",
                "c = mu omega^2 t",
                out.x(),
                out.value,
                out.evaluations,
                out.converged,
                C_BRACKET,
                C_TOL,
                "grid pre-scan + golden-section",
                Some(note),
            ));
        }
        OptimizeTarget::GndOscillator => {
            let (lo, hi) = GND_OSC_X_BRACKET;
            let out = maximize_1d(|x| gnd_osc_qsnr(&cfg.alpha, x), lo, hi, OPT_TOL)?;
            table.push(opt_row(
                "gnd-oscillator",
                "x = gamma omega t",
                out.x(),
                out.value,
                out.evaluations,
                out.converged,
                (lo, hi),
                OPT_TOL,
                "golden-section",
                Some(gnd_osc_annotation(&cfg.alpha)),
            ));
        }
        OptimizeTarget::FitG => return fit_output(&parse_alphas(alphas)?),
    }
    Ok(Output::record(table))
}

fn fit_output(alphas: &[f64]) -> CliResult<Output> {
    let samples = g_samples(alphas)?;
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.alpha, s.c_m)).collect();
    let fit = fit_g(&pairs)?;
    let mut table = Table::new([
        "alpha [1]",
        "c_m [1]",
        "R_max [1]",
        "dim",
        "g_fit [1]",
        "fit_a [1]",
        "fit_b [1]",
        "fit_k [1]",
        "residual_rms [1]",
    ]);
    for s in &samples {
        table.push(vec![
            s.alpha.into(),
            s.c_m.into(),
            s.r_max.into(),
            s.dim.into(),
            fit.eval(s.alpha).into(),
            fit.a.into(),
            fit.b.into(),
            fit.k.into(),
            fit.residual_rms.into(),
        ]);
    }
    let json = serde_json::json!({
        "target": "fit-g",
        "model": "a + b exp(-k |alpha|)",
        "fit": fit,
        "samples": samples,
        "c_bracket": [C_BRACKET.0, C_BRACKET.1],
        "c_tol": C_TOL,
        "method": "c_m by grid pre-scan + golden-section; (a, b) by linear least squares, k by log-grid + golden-section",
    });
    Ok(Output { table, json })
}

/// Iterative estimation: adaptive design, Born-rule sampling and MLE.
pub fn iterate(cfg: &RunConfig) -> CliResult<Output> {
    let model = cfg.require_model()?;
    if cfg.system != System::Qubit {
        return Err(CliError::key(
            "system",
            "iterate simulates qubit spin measurements only",
        ));
    }
    let (pm, default_true) = match model {
        Model::Mid => (ProtocolModel::MidQubit, 1e-3),
        Model::Gnd => (ProtocolModel::GndQubit, 0.05),
    };
    let truth = match model {
        Model::Mid => cfg.mu,
        Model::Gnd => cfg.gamma,
    }
    .unwrap_or(default_true);
    if !(truth > 0.0) {
        return Err(CliError::key(model.param_name(), "the true parameter must be > 0"));
    }
    let setup = IterationSetup {
        model: pm,
        true_param: truth,
        initial_guess: cfg.guess.unwrap_or(2.0 * truth),
        shots_per_round: cfg.shots.unwrap_or(10_000),
        rounds: cfg.rounds.unwrap_or(8),
        seed: cfg.seed.unwrap_or(42),
        omega: cfg.omega,
        gnd_target_x: cfg.x.unwrap_or(1.0),
    };
    let trace = iterate_estimation(&setup)?;
    let mut table = Table::new([
        "round",
        "guess [param]",
        "t [time]",
        "probe_theta [rad]",
        "probe_phi [rad]",
        "measure_theta [rad]",
        "measure_phi [rad]",
        "M",
        "successes",
        "estimate [param]",
        "fisher [1/param^2]",
        "variance [param^2]",
        "flagged",
        "note",
        "true_param [param]",
        "seed",
    ]);
    for r in &trace.rounds {
        table.push(vec![
            r.round.into(),
            r.guess.into(),
            r.t.into(),
            r.probe_theta.into(),
            r.probe_phi.into(),
            r.measure_theta.into(),
            r.measure_phi.into(),
            r.shots.into(),
            r.successes.into(),
            r.estimate.into(),
            r.fisher.into(),
            r.variance.into(),
            r.flagged.into(),
            r.note.clone().into(),
            trace.true_param.into(),
            trace.rng_seed.into(),
        ]);
    }
    let json = serde_json::json!({
        "setup": setup,
        "trace": trace,
        "initial_relative_error": trace.initial_relative_error(),
        "final_relative_error": trace.final_relative_error(),
    });
    Ok(Output { table, json })
}
