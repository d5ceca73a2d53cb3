//! Time integration of the harmonic Spin(7)-flow `dPhi/dt = Div T <> Phi`
//! with structure-preserving exponential fiber updates, plus the monitored
//! quantities recorded along a run.
//!
//! The update is exactly structure-preserving: each step composes the site
//! rotation with the exponential of an Ω²₇ element, so the evolving form
//! stays an SO(8)-pullback of the standard Cayley form and the admissibility
//! residual does not grow secularly with the step count.

pub mod monitor;

pub use monitor::{
    bochner_residual_field, energy_from_field, entropy_lambda, fit_exponential_decay,
    singular_detector, sup_torsion_from_field, theta, z_growth_constant, z_value, HeatKernelSpec,
};

use crate::error::CoreError;
use crate::lattice::{
    div_torsion_field, exp_omega27, expm_skew, reorthonormalize, torsion_field, write_snapshot,
    DivTorsionField, LatticeGrid, StencilOrder, StructureField, TorsionField,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// explicit exponential (Lie-Euler) update, first order in dt
    LieEuler,
    /// predictor-corrector variant, second order in dt
    Heun,
}

/// Flow driver configuration. The timestep must respect the parabolic bound
/// `dt <= dt_safety * h_min^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub dt: f64,
    pub steps: usize,
    pub stencil: StencilOrder,
    pub integrator: Integrator,
    /// cadence of monitor rows (and |T|^2 history snapshots)
    pub monitor_every: usize,
    /// cadence of fiber-coordinate checkpoints; 0 disables
    pub checkpoint_every: usize,
    /// CFL-like factor in the parabolic timestep bound
    pub dt_safety: f64,
    /// abort threshold on sup|T|
    pub blowup_sup_torsion: f64,
    /// cadence of the orthogonality touch-up on site rotations
    pub renormalize_every: usize,
    /// optional early stop when |E_n - E_{n-w}| <= tol * E(0)
    pub energy_plateau_rel: Option<f64>,
    pub plateau_window: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            dt: 1e-5,
            steps: 100,
            stencil: StencilOrder::Two,
            integrator: Integrator::LieEuler,
            monitor_every: 10,
            checkpoint_every: 0,
            dt_safety: 0.1,
            blowup_sup_torsion: 1e3,
            renormalize_every: 64,
            energy_plateau_rel: None,
            plateau_window: 100,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self, grid: &LatticeGrid) -> Result<(), CoreError> {
        if !(self.dt > 0.0) {
            return Err(CoreError::InvalidFlowConfig("dt must be positive".into()));
        }
        if !(self.dt_safety > 0.0) {
            return Err(CoreError::InvalidFlowConfig("dt_safety must be positive".into()));
        }
        let h = grid.min_spacing();
        let bound = self.dt_safety * h * h;
        if self.dt > bound * (1.0 + 1e-12) {
            return Err(CoreError::InvalidFlowConfig(format!(
                "dt = {} violates the parabolic bound dt_safety * h^2 = {bound}",
                self.dt
            )));
        }
        if self.monitor_every == 0 {
            return Err(CoreError::InvalidFlowConfig("monitor_every must be >= 1".into()));
        }
        if self.renormalize_every == 0 {
            return Err(CoreError::InvalidFlowConfig("renormalize_every must be >= 1".into()));
        }
        if !(self.blowup_sup_torsion > 0.0) {
            return Err(CoreError::InvalidFlowConfig("blowup threshold must be positive".into()));
        }
        Ok(())
    }
}

/// Time, field, and the step counter of a flow.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub step: usize,
    pub field: StructureField,
    steps_since_renormalize: usize,
}

impl FlowState {
    pub fn new(field: StructureField) -> Self {
        FlowState { t: 0.0, step: 0, field, steps_since_renormalize: 0 }
    }
}

/// Everything evaluated on one time slice.
pub struct StepData {
    pub torsion: TorsionField,
    pub energy_field: Vec<f64>,
    pub energy: f64,
    pub sup_torsion: f64,
    pub div: DivTorsionField,
    pub div_l2: f64,
}

/// Torsion, energy density, divergence and norms of the current field.
pub fn evaluate_state(field: &StructureField, stencil: StencilOrder) -> Result<StepData, CoreError> {
    let torsion = torsion_field(field, stencil)?;
    let energy_field = torsion.norm_sq_field();
    let energy = energy_from_field(&energy_field, field.grid());
    let sup_torsion = sup_torsion_from_field(&energy_field);
    let div = div_torsion_field(field, &torsion, stencil)?;
    let div_l2 = div.values.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>()).sum::<f64>()
        * field.grid().cell_volume();
    Ok(StepData { torsion, energy_field, energy, sup_torsion, div, div_l2 })
}

fn advance(state: &mut FlowState, data: &StepData, cfg: &FlowConfig) -> Result<(), CoreError> {
    let dt = cfg.dt;
    let mut moved = false;
    match cfg.integrator {
        Integrator::LieEuler => {
            let rotations = state.field.rotations_mut();
            for (q, v) in rotations.iter_mut().zip(data.div.values.iter()) {
                if v.iter().any(|x| *x != 0.0) {
                    *q = exp_omega27(v, dt) * *q;
                    moved = true;
                }
            }
        }
        Integrator::Heun => {
            // predictor
            let mut predictor = state.field.clone();
            {
                let rotations = predictor.rotations_mut();
                for (q, v) in rotations.iter_mut().zip(data.div.values.iter()) {
                    if v.iter().any(|x| *x != 0.0) {
                        *q = exp_omega27(v, dt) * *q;
                    }
                }
            }
            let predicted = evaluate_state(&predictor, cfg.stencil)?;
            let rotations = state.field.rotations_mut();
            for ((q, v1), v2) in
                rotations.iter_mut().zip(data.div.values.iter()).zip(predicted.div.values.iter())
            {
                let avg = (v1 + v2) * 0.5;
                if avg.iter().any(|x| *x != 0.0) {
                    // averaged generators leave Omega^2_7 of a single fiber,
                    // so use the general skew exponential here
                    *q = expm_skew(&avg, dt) * *q;
                    moved = true;
                }
            }
        }
    }
    state.t += dt;
    state.step += 1;
    if moved {
        state.steps_since_renormalize += 1;
    }
    if state.steps_since_renormalize >= cfg.renormalize_every {
        for q in state.field.rotations_mut() {
            *q = reorthonormalize(q);
        }
        state.steps_since_renormalize = 0;
    }
    Ok(())
}

/// One step of the flow: evaluates the state, checks the blow-up guard, and
/// advances the field with the structure-preserving exponential update.
/// Returns the pre-step evaluation.
pub fn flow_step(state: &mut FlowState, cfg: &FlowConfig) -> Result<StepData, CoreError> {
    cfg.validate(state.field.grid())?;
    let data = evaluate_state(&state.field, cfg.stencil)?;
    if data.sup_torsion > cfg.blowup_sup_torsion {
        return Err(CoreError::Blowup {
            t: state.t,
            sup_torsion: data.sup_torsion,
            threshold: cfg.blowup_sup_torsion,
        });
    }
    advance(state, &data, cfg)?;
    Ok(data)
}

/// Monitor configuration for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonitorConfig {
    /// Theta samples evaluated at every monitor row with t < t0
    pub theta_samples: Vec<HeatKernelSpec>,
    /// entropy scale sigma for lambda(Phi_0, sigma); 0 skips the entropy
    pub entropy_sigma: f64,
    /// entropy time-ladder length (t_i = sigma 2^-i)
    pub entropy_ladder: usize,
    pub kernel_images: usize,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig {
            theta_samples: Vec::new(),
            entropy_sigma: 0.0,
            entropy_ladder: 13,
            kernel_images: 3,
        }
    }
}

/// One monitor row; theta entries are None once t >= t0 for that sample,
/// the Bochner residual is None on the final row (no forward snapshot).
#[derive(Debug, Clone)]
pub struct MonitorRow {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub sup_torsion: f64,
    pub dt_used: f64,
    pub z: f64,
    pub thetas: Vec<Option<f64>>,
    pub bochner_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    Completed,
    EnergyPlateau { at_step: usize },
    /// sup|T| exceeded the configured threshold; the record holds the series
    /// up to and including the offending step
    Blowup { at_step: usize, sup_torsion: f64 },
}

/// Full record of a run: per-step series, monitor rows, |T|^2 snapshots at
/// monitor cadence, and the initial-field entropy when requested.
pub struct FlowRecord {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub sup_torsions: Vec<f64>,
    pub div_l2: Vec<f64>,
    pub projection_residuals: Vec<f64>,
    pub rows: Vec<MonitorRow>,
    pub energy_snapshots: Vec<(f64, Vec<f64>)>,
    pub entropy: Option<f64>,
    pub stop: StopReason,
}

impl FlowRecord {
    /// Largest initial window [0, delta] with sup|T|(t) <= 2 sup|T|(0).
    pub fn doubling_window(&self) -> f64 {
        let bound = 2.0 * self.sup_torsions[0];
        for (i, s) in self.sup_torsions.iter().enumerate() {
            if *s > bound {
                return if i == 0 { 0.0 } else { self.times[i - 1] };
            }
        }
        *self.times.last().unwrap()
    }
}

/// Run the flow for `cfg.steps` steps (or until a configured early stop),
/// recording series every step and monitor rows at the configured cadence.
pub fn run_flow(
    field0: StructureField,
    cfg: &FlowConfig,
    monitors: &MonitorConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<(FlowRecord, FlowState), CoreError> {
    cfg.validate(field0.grid())?;
    let grid = field0.grid().clone();
    let t_max = cfg.steps as f64 * cfg.dt;
    let mut state = FlowState::new(field0);
    let mut record = FlowRecord {
        times: Vec::with_capacity(cfg.steps + 1),
        energies: Vec::with_capacity(cfg.steps + 1),
        sup_torsions: Vec::with_capacity(cfg.steps + 1),
        div_l2: Vec::with_capacity(cfg.steps + 1),
        projection_residuals: Vec::with_capacity(cfg.steps + 1),
        rows: Vec::new(),
        energy_snapshots: Vec::new(),
        entropy: None,
        stop: StopReason::Completed,
    };
    // history for the Bochner residual of the previous monitor row
    let mut prev: Option<(usize, f64, Vec<f64>, TorsionField)> = None;
    let mut prev_prev_e: Option<Vec<f64>> = None;

    for n in 0..=cfg.steps {
        let data = evaluate_state(&state.field, cfg.stencil)?;
        let blowup = data.sup_torsion > cfg.blowup_sup_torsion;
        record.times.push(state.t);
        record.energies.push(data.energy);
        record.sup_torsions.push(data.sup_torsion);
        record.div_l2.push(data.div_l2);
        record.projection_residuals.push(data.div.max_projection_residual);
        if blowup {
            record.stop = StopReason::Blowup { at_step: n, sup_torsion: data.sup_torsion };
            break;
        }

        if n == 0 && monitors.entropy_sigma > 0.0 {
            record.entropy = Some(entropy_lambda(
                &data.energy_field,
                &grid,
                monitors.entropy_sigma,
                monitors.kernel_images,
                monitors.entropy_ladder,
            )?);
        }

        // Bochner residual for the previous monitor row, now that the
        // forward |T|^2 snapshot exists
        if let (Some((pstep, _pt, pe, ptf)), Some(ppe)) = (&prev, &prev_prev_e) {
            if pstep % cfg.monitor_every == 0 {
                let res = bochner_residual_field(
                    ppe,
                    pe,
                    &data.energy_field,
                    ptf,
                    &grid,
                    cfg.dt,
                    cfg.stencil,
                );
                let max = res.into_iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if let Some(row) = record.rows.iter_mut().rev().find(|r| r.step == *pstep) {
                    row.bochner_residual = Some(max);
                }
            }
        }

        let is_row = n % cfg.monitor_every == 0 || n == cfg.steps;
        if is_row {
            let mut thetas = Vec::with_capacity(monitors.theta_samples.len());
            for spec in &monitors.theta_samples {
                if state.t < spec.t0 {
                    thetas.push(Some(theta(&data.energy_field, &grid, spec, state.t)?));
                } else {
                    thetas.push(None);
                }
            }
            record.rows.push(MonitorRow {
                step: n,
                t: state.t,
                energy: data.energy,
                sup_torsion: data.sup_torsion,
                dt_used: cfg.dt,
                z: z_value(&data.energy_field, &grid, state.t, t_max),
                thetas,
                bochner_residual: None,
            });
            record.energy_snapshots.push((state.t, data.energy_field.clone()));
        }

        if let Some(dir) = checkpoint_dir {
            if cfg.checkpoint_every > 0 && n % cfg.checkpoint_every == 0 {
                let fiber = state.field.to_fiber()?;
                write_snapshot(&dir.join(format!("checkpoint_{n:06}.s7f")), &fiber, 0)?;
            }
        }

        if n == cfg.steps {
            break;
        }

        if let Some(tol) = cfg.energy_plateau_rel {
            let w = cfg.plateau_window;
            if n >= w {
                let e0 = record.energies[0].max(f64::MIN_POSITIVE);
                if (record.energies[n] - record.energies[n - w]).abs() <= tol * e0 {
                    record.stop = StopReason::EnergyPlateau { at_step: n };
                    break;
                }
            }
        }

        prev_prev_e = prev.take().map(|(_, _, e, _)| e);
        let t_n = state.t;
        advance(&mut state, &data, cfg)?;
        prev = Some((n, t_n, data.energy_field.clone(), data.torsion));
    }
    Ok((record, state))
}

/// Time-series CSV: columns `t,E,supT,dtUsed,Z,theta0..,bochnerResidual`.
/// Absent values (theta past its t0, Bochner on the last row) are empty
/// fields. Output is bit-reproducible for identical runs.
pub fn write_series_csv(path: &Path, record: &FlowRecord) -> Result<(), CoreError> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n_theta = record.rows.first().map_or(0, |r| r.thetas.len());
    write!(w, "t,E,supT,dtUsed,Z")?;
    for i in 0..n_theta {
        write!(w, ",theta{i}")?;
    }
    writeln!(w, ",bochnerResidual")?;
    for row in &record.rows {
        write!(w, "{},{},{},{},{}", row.t, row.energy, row.sup_torsion, row.dt_used, row.z)?;
        for th in &row.thetas {
            match th {
                Some(v) => write!(w, ",{v}")?,
                None => write!(w, ",")?,
            }
        }
        match row.bochner_residual {
            Some(v) => writeln!(w, ",{v}")?,
            None => writeln!(w, ",")?,
        }
    }
    w.flush()?;
    Ok(())
}
