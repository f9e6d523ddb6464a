//! Newmark time marching, modal analysis and damage events.
//!
//! One Newmark step from `t` to `t + Δt` with the matrices assembled at
//! `t + Δt`:
//!
//! ```text
//! K̄ = K + M / (β Δt²) + α C / (β Δt)
//! f̄ = f + M (u / (β Δt²) + v / (β Δt) + (1/(2β) − 1) a)
//!       + C (α u / (β Δt) + (α/β − 1) v + Δt/2 (α/β − 2) a)
//! a' = (u' − u) / (β Δt²) − v / (β Δt) − (1/(2β) − 1) a
//! v' = v + Δt ((1 − α) a + α a')
//! ```
//!
//! Rotor runs take the same step in coordinates co-rotating with the shaft
//! (see [`crate::spin`]), where the matrices are constant at constant speed
//! and the average-acceleration rule keeps its unconditional stability. The
//! inertial-frame step is kept as an option; with rotating blade matrices it
//! can go unstable on stiff modes at the default step.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::assembly::{RotorModel, SystemMatrices};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::scenario::{ChannelSpec, Probe, Scenario};
use crate::signals::TimeSeries;
use crate::spin::{Spin, SpinFrame};

fn default_dt() -> f64 {
    1e-4
}
fn default_alpha() -> f64 {
    0.5
}
fn default_beta() -> f64 {
    0.25
}

/// Newmark parameters and run length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    /// s
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// s
    pub duration: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub frame: IntegrationFrame,
}

/// Coordinates the Newmark recurrence is applied in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationFrame {
    /// Co-rotating with the shaft.
    #[default]
    Corotating,
    /// Global DOFs directly.
    Inertial,
}

impl SolverSettings {
    pub fn new(dt: f64, duration: f64) -> Self {
        SolverSettings {
            dt,
            duration,
            alpha: 0.5,
            beta: 0.25,
            frame: IntegrationFrame::Corotating,
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        require_positive(&format!("{field}.duration"), self.duration)?;
        require_positive(&format!("{field}.dt"), self.dt)?;
        if self.dt > self.duration {
            return Err(Error::validation(
                format!("{field}.dt"),
                format!("time step {} exceeds the duration {}", self.dt, self.duration),
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::validation(format!("{field}.alpha"), "must lie in [0, 1]"));
        }
        require_positive(&format!("{field}.beta"), self.beta)
    }

    /// Number of steps after the initial sample.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }
}

/// Displacement, velocity and acceleration at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub time: f64,
    pub displacement: DVector<f64>,
    pub velocity: DVector<f64>,
    pub acceleration: DVector<f64>,
}

impl State {
    pub fn at_rest(n: usize) -> Self {
        State {
            time: 0.0,
            displacement: DVector::zeros(n),
            velocity: DVector::zeros(n),
            acceleration: DVector::zeros(n),
        }
    }

    /// `½ vᵀ M v + ½ uᵀ K u`.
    pub fn energy(&self, system: &SystemMatrices) -> f64 {
        0.5 * self.velocity.dot(&(&system.mass * &self.velocity))
            + 0.5 * self.displacement.dot(&(&system.stiffness * &self.displacement))
    }
}

/// Solves `A x = b` by Cholesky, falling back to LU for indefinite `A`.
pub fn solve_linear(a: DMatrix<f64>, b: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    if let Some(ch) = a.clone().cholesky() {
        return finite(ch.solve(b), what);
    }
    solve_general(a, b, what)
}

fn finite(x: DVector<f64>, what: &str) -> Result<DVector<f64>> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::numerical(format!("solution with the {what} is not finite (the response diverged)")))
    }
}

/// Acceleration satisfying `M a = f − C v − K u`.
pub fn equilibrium_acceleration(
    system: &SystemMatrices,
    force: &DVector<f64>,
    displacement: &DVector<f64>,
    velocity: &DVector<f64>,
) -> Result<DVector<f64>> {
    let rhs = force - &system.damping * velocity - &system.stiffness * displacement;
    solve_linear(system.mass.clone(), &rhs, "mass matrix")
}

/// Advances `state` by one step; `system` and `f_next` are evaluated at the
/// end of the step.
pub fn newmark_step(
    system: &SystemMatrices,
    state: &State,
    f_next: &DVector<f64>,
    settings: &SolverSettings,
) -> Result<State> {
    check_dims(system, state, f_next)?;
    let (u, v, a) = newmark_core(
        (&system.mass, &system.damping, &system.stiffness),
        (&state.displacement, &state.velocity, &state.acceleration),
        f_next,
        settings,
        solve_linear,
    )?;
    Ok(State {
        time: state.time + settings.dt,
        displacement: u,
        velocity: v,
        acceleration: a,
    })
}

type Triple = (DVector<f64>, DVector<f64>, DVector<f64>);

/// Solver for the effective-stiffness system.
type LinearSolve = fn(DMatrix<f64>, &DVector<f64>, &str) -> Result<DVector<f64>>;

fn newmark_core(
    (mass, damping, stiffness): (&DMatrix<f64>, &DMatrix<f64>, &DMatrix<f64>),
    (u, v, a): (&DVector<f64>, &DVector<f64>, &DVector<f64>),
    f_next: &DVector<f64>,
    settings: &SolverSettings,
    solve: LinearSolve,
) -> Result<Triple> {
    let SolverSettings { dt, alpha, beta, .. } = *settings;
    if !(dt > 0.0) {
        return Err(Error::numerical("effective stiffness is singular for a zero time step"));
    }
    let c0 = 1.0 / (beta * dt * dt);
    let c1 = 1.0 / (beta * dt);
    let c2 = 1.0 / (2.0 * beta) - 1.0;
    let c3 = alpha / (beta * dt);
    let c4 = alpha / beta - 1.0;
    let c5 = 0.5 * dt * (alpha / beta - 2.0);
    let k_eff = stiffness + mass * c0 + damping * c3;
    let m_part = u * c0 + v * c1 + a * c2;
    let c_part = u * c3 + v * c4 + a * c5;
    let f_eff = f_next + mass * m_part + damping * c_part;
    let u_next = solve(k_eff, &f_eff, "effective stiffness")?;
    let a_next = (&u_next - u) * c0 - v * c1 - a * c2;
    let v_next = v + (a * (1.0 - alpha) + &a_next * alpha) * dt;
    Ok((u_next, v_next, a_next))
}

fn solve_general(a: DMatrix<f64>, b: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let x = a.lu().solve(b).ok_or_else(|| Error::numerical(format!("{what} is singular")))?;
    finite(x, what)
}

/// [`newmark_step`] taken in coordinates co-rotating with the shaft.
///
/// `now` is the spin at the start of the step and `next` at its end, where
/// `system` and `f_next` are evaluated. The system must be symmetric about
/// the spin axis apart from the blade angles, which holds for every
/// assembled rotor. In co-rotating coordinates the step solves
///
/// ```text
/// M̂ q̈ + (2Ω M̂ S + Ĉ) q̇ + (K̂ + Ω² M̂ S² + Ω̇ M̂ S + Ω Ĉ S) q = P̂ᵀ f
/// ```
///
/// with hats denoting matrices turned back by the shaft angle.
pub fn corotating_step(
    system: &SystemMatrices,
    state: &State,
    f_next: &DVector<f64>,
    settings: &SolverSettings,
    frame: &SpinFrame,
    now: Spin,
    next: Spin,
) -> Result<State> {
    check_dims(system, state, f_next)?;
    let q = frame.to_frame((&state.displacement, &state.velocity, &state.acceleration), now);
    let phi = next.angle;
    let m = frame.unrotate_matrix(&system.mass, phi);
    let c = frame.unrotate_matrix(&system.damping, phi);
    let k = frame.unrotate_matrix(&system.stiffness, phi);
    let ms = frame.spin_right(&m);
    let mss = frame.spin_right(&ms);
    let cs = frame.spin_right(&c);
    let w = next.omega;
    let gyro = &ms * (2.0 * w) + &c;
    let stiff = &k + &mss * (w * w) + &ms * next.omega_dot + &cs * w;
    let f = frame.unrotate(f_next, phi);
    let (qu, qv, qa) = newmark_core((&m, &gyro, &stiff), (&q.0, &q.1, &q.2), &f, settings, solve_general)?;
    let (u, v, a) = frame.from_frame((&qu, &qv, &qa), next);
    Ok(State {
        time: state.time + settings.dt,
        displacement: u,
        velocity: v,
        acceleration: a,
    })
}

fn check_dims(system: &SystemMatrices, state: &State, f_next: &DVector<f64>) -> Result<()> {
    let n = system.dim();
    if state.displacement.len() != n || f_next.len() != n {
        return Err(Error::numerical(format!(
            "dimension mismatch: system {n}, state {}, force {}",
            state.displacement.len(),
            f_next.len()
        )));
    }
    Ok(())
}

/// Natural frequencies and mass-normalized mode shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalResult {
    /// Ascending (Hz).
    pub frequencies_hz: Vec<f64>,
    /// One column per mode.
    pub mode_shapes: DMatrix<f64>,
}

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Lowest `count` solutions of `K φ = ω² M φ`.
pub fn modal_analysis(system: &SystemMatrices, count: usize) -> Result<ModalResult> {
    let n = system.dim();
    let chol = system
        .mass
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numerical("mass matrix is not positive definite"))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::numerical("mass factor is singular"))?;
    let mut a = &l_inv * &system.stiffness * l_inv.transpose();
    a = (&a + a.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::try_new(a, f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or_else(|| Error::numerical(format!("eigen-solver did not converge in {EIGEN_MAX_ITERATIONS} iterations")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let m = count.min(n);
    let shapes_reduced = DMatrix::from_fn(n, m, |r, c| eig.eigenvectors[(r, order[c])]);
    let mode_shapes = l_inv.transpose() * shapes_reduced;
    let mut frequencies_hz = Vec::with_capacity(m);
    let scale = system.stiffness.amax().max(f64::MIN_POSITIVE);
    for (c, &k) in order.iter().take(m).enumerate() {
        let lambda = eig.eigenvalues[k];
        let phi = mode_shapes.column(c);
        let residual = (&system.stiffness * phi - &system.mass * phi * lambda).amax();
        if !(residual <= 1e-6 * scale * phi.amax().max(1.0)) {
            return Err(Error::numerical(format!(
                "mode {} did not converge (residual norm {residual:e})",
                c + 1
            )));
        }
        frequencies_hz.push(lambda.max(0.0).sqrt() / (2.0 * PI));
    }
    Ok(ModalResult {
        frequencies_hz,
        mode_shapes,
    })
}

/// Impact of a foreign object on a blade tip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FodEvent {
    /// Impact start (s).
    pub time: f64,
    pub stage: usize,
    pub blade: usize,
    /// kg
    pub mass: f64,
    /// m/s
    pub velocity: f64,
    /// s
    pub contact_time: f64,
    /// Whether the object stays on the blade tip after contact.
    #[serde(default)]
    pub stick: bool,
}

impl FodEvent {
    pub fn validate(&self, field: &str) -> Result<()> {
        require_non_negative(&format!("{field}.mass"), self.mass)?;
        require_non_negative(&format!("{field}.velocity"), self.velocity)?;
        require_positive(&format!("{field}.contact_time"), self.contact_time)
    }
}

/// Contact force magnitude `v m / t_c` (N).
pub fn fod_force(event: &FodEvent) -> Result<f64> {
    require_positive("fod.contact_time", event.contact_time)?;
    Ok(event.velocity * event.mass / event.contact_time)
}

/// Loss of a blade outboard of `break_location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FboEvent {
    /// s
    pub time: f64,
    pub stage: usize,
    pub blade: usize,
    /// Distance from the blade root (m).
    pub break_location: f64,
}

/// Result of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub series: TimeSeries,
    /// Rayleigh coefficients `(a0, a1)` used throughout.
    pub rayleigh: (f64, f64),
    /// Frequencies of the damping anchor modes at `t = 0` (Hz).
    pub anchor_frequencies: (f64, f64),
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Hub radial displacement `√(u_Y² + u_Z²)` of each stage, one sample
    /// per recorded step.
    pub radial: Vec<Vec<f64>>,
}

fn step_index(t: f64, dt: f64) -> usize {
    (t / dt).round() as usize
}

/// Builds the rotor model of a validated scenario, with damping calibrated.
pub fn build_model(scenario: &Scenario) -> Result<RotorModel> {
    let mut model = RotorModel::new(
        &scenario.stages,
        scenario.material,
        scenario.aero,
        scenario.rpm,
        &scenario.cracks,
        scenario.model,
    )?;
    model.calibrate_damping(scenario.damping.zeta, scenario.damping.mode_pair, 0.0)?;
    Ok(model)
}

/// Runs a scenario and records the requested channels at every step.
pub fn simulate(scenario: &Scenario) -> Result<SimulationOutput> {
    let scenario = scenario.resolve()?;
    let settings = scenario.solver;
    let dt = settings.dt;
    let steps = settings.steps();
    let mut model = build_model(&scenario)?;
    let rayleigh = model.rayleigh();
    let anchors = {
        let sys = model.assemble(0.0);
        let (i, j) = scenario.damping.mode_pair;
        let modes = modal_analysis(&sys, i.max(j))?;
        (modes.frequencies_hz[i - 1], modes.frequencies_hz[j - 1])
    };
    let initial_mass = model.total_mass();

    let channels = scenario
        .outputs
        .channels
        .iter()
        .map(|label| ChannelSpec::parse(label))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); channels.len()];
    let mut radial: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); scenario.stages.len()];

    let pulses: Vec<(usize, usize, f64, &FodEvent)> = scenario
        .fod
        .iter()
        .map(|ev| {
            let start = step_index(ev.time, dt);
            let end = step_index(ev.time + ev.contact_time, dt).max(start + 1);
            fod_force(ev).map(|f| (start, end, f, ev))
        })
        .collect::<Result<_>>()?;
    let external = |model: &RotorModel, k: usize| -> Result<DVector<f64>> {
        let mut f = DVector::zeros(model.dofs().n_free());
        for &(start, end, force, ev) in &pulses {
            if (start..end).contains(&k) {
                let tip = model.blade_tip(ev.stage, ev.blade)?;
                if let Some(d) = model.dofs().dof(tip, 0) {
                    f[d] -= force;
                }
            }
        }
        Ok(f)
    };

    let sys = model.assemble(0.0);
    let f0 = &sys.force + external(&model, 0)?;
    let n = model.dofs().n_free();
    let mut state = State::at_rest(n);
    state.acceleration = equilibrium_acceleration(&sys, &f0, &state.displacement, &state.velocity)?;
    record(&model, &state, &channels, &mut records)?;
    record_radial(&model, &state, &mut radial);

    for k in 1..=steps {
        let t = k as f64 * dt;
        let sys = model.assemble(t);
        let f = &sys.force + external(&model, k)?;
        state = match settings.frame {
            IntegrationFrame::Inertial => newmark_step(&sys, &state, &f, &settings)?,
            IntegrationFrame::Corotating => {
                let frame = SpinFrame::new(model.dofs().spin_pairs());
                let spin = |t: f64| Spin {
                    angle: model.rpm().angle_at(t),
                    omega: model.rpm().omega_at(t),
                    omega_dot: model.rpm().acceleration_at(t),
                };
                corotating_step(&sys, &state, &f, &settings, &frame, spin(t - dt), spin(t))?
            }
        };
        state.time = t;
        if state.displacement.iter().any(|x| !x.is_finite()) {
            return Err(Error::numerical(format!("response diverged at t = {t}")));
        }

        let mut changed = false;
        for ev in scenario.fbo.iter().filter(|ev| step_index(ev.time, dt) == k) {
            let transfer = model.sever_blade(ev.stage, ev.blade, ev.break_location, t)?;
            state.displacement = transfer.apply(&state.displacement);
            state.velocity = transfer.apply(&state.velocity);
            changed = true;
        }
        for &(_, end, _, ev) in &pulses {
            if ev.stick && end == k && ev.mass > 0.0 {
                model.attach_tip_mass(ev.stage, ev.blade, ev.mass)?;
                changed = true;
            }
        }
        if changed {
            let sys = model.assemble(t);
            let f = &sys.force + external(&model, k)?;
            state.acceleration = equilibrium_acceleration(&sys, &f, &state.displacement, &state.velocity)?;
        }
        record(&model, &state, &channels, &mut records)?;
        record_radial(&model, &state, &mut radial);
    }

    let mut series = TimeSeries::new(dt, 0.0)?;
    for (label, values) in scenario.outputs.channels.iter().zip(records) {
        series.push_channel(label.clone(), values)?;
    }
    Ok(SimulationOutput {
        series,
        rayleigh,
        anchor_frequencies: anchors,
        initial_mass,
        final_mass: model.total_mass(),
        radial,
    })
}

fn record_radial(model: &RotorModel, state: &State, out: &mut [Vec<f64>]) {
    for (stage, column) in out.iter_mut().enumerate() {
        let hub = model.dofs().hub_node(stage + 1);
        let at = |k: usize| model.dofs().dof(hub, k).map_or(0.0, |d| state.displacement[d]);
        column.push(at(1).hypot(at(2)));
    }
}

fn record(model: &RotorModel, state: &State, channels: &[ChannelSpec], out: &mut [Vec<f64>]) -> Result<()> {
    for (spec, column) in channels.iter().zip(out.iter_mut()) {
        let node = match spec.probe {
            Probe::Hub(s) => model.dofs().hub_node(s),
            Probe::ShaftTip => model.dofs().shaft_tip_node(),
            Probe::BladeTip { stage, blade } => model.blade_tip(stage, blade)?,
        };
        column.push(model.dofs().dof(node, spec.dof).map_or(0.0, |d| state.displacement[d]));
    }
    Ok(())
}
