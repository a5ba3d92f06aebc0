//! Deterministic flows on the cooperator/defector/loner simplex and a
//! fixed-step classical Runge-Kutta integrator.
//!
//! All three vector fields share the selection term `x_i (P_i - Pbar)` with
//! `Pbar = Σ x_j P_j`, so the components of every field sum to zero.

use crate::payoffs::{profile_raw, PggParams, SimplexState};
use thiserror::Error;

/// Components below `-CLAMP_TOL` after a step are treated as a blow-up.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("network density {0} must lie in [0, 1]")]
    Density(f64),
    #[error("time step {0} must be positive and finite")]
    TimeStep(f64),
    #[error("at least one integration step is required")]
    NoSteps,
    #[error("frequency floor {0} must lie in [0, 1/3)")]
    Floor(f64),
    #[error("state left the simplex at step {step}: {state:?}")]
    Blowup { step: usize, state: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DynamicsMode {
    Replicator,
    ReplicatorMutator,
    /// Replicator-mutator with the mutation term scaled by a network density.
    NetworkScaled { density: f64 },
}

impl DynamicsMode {
    pub fn network(density: f64) -> Result<Self, DynamicsError> {
        check_density(density)?;
        Ok(Self::NetworkScaled { density })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Replicator => "replicator",
            Self::ReplicatorMutator => "mutator",
            Self::NetworkScaled { .. } => "network",
        }
    }

    pub fn density(&self) -> f64 {
        match self {
            Self::Replicator => 0.0,
            Self::ReplicatorMutator => 1.0,
            Self::NetworkScaled { density } => *density,
        }
    }
}

fn check_density(d: f64) -> Result<(), DynamicsError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(DynamicsError::Density(d));
    }
    Ok(())
}

/// `μ (1 - x_i) - 2 μ x_i` for each strategy.
pub fn mutation_terms(s: &[f64; 3], mu: f64) -> [f64; 3] {
    s.map(|xi| mu * (1.0 - xi) - 2.0 * mu * xi)
}

fn selection_raw(s: &[f64; 3], params: &PggParams) -> [f64; 3] {
    let prof = profile_raw(s, params);
    let p = prof.as_array();
    [0, 1, 2].map(|i| s[i] * (p[i] - prof.average))
}

fn field_raw(s: &[f64; 3], params: &PggParams, effective_mu: f64) -> [f64; 3] {
    let sel = selection_raw(s, params);
    let mutation = mutation_terms(s, effective_mu);
    [0, 1, 2].map(|i| sel[i] + mutation[i])
}

fn mode_rhs(s: &[f64; 3], params: &PggParams, mode: DynamicsMode) -> [f64; 3] {
    match mode {
        DynamicsMode::Replicator => selection_raw(s, params),
        DynamicsMode::ReplicatorMutator => field_raw(s, params, params.mutation),
        DynamicsMode::NetworkScaled { density } => field_raw(s, params, density * params.mutation),
    }
}

/// Pure selection: `dx_i/dt = x_i (P_i - Pbar)`.
pub fn replicator_rhs(state: &SimplexState, params: &PggParams) -> [f64; 3] {
    selection_raw(&state.as_array(), params)
}

/// Selection plus mutation at rate `μ = params.mutation`.
pub fn mutator_rhs(state: &SimplexState, params: &PggParams) -> [f64; 3] {
    field_raw(&state.as_array(), params, params.mutation)
}

/// Selection plus mutation with `μ` scaled by the network density.
pub fn network_scaled_rhs(
    state: &SimplexState,
    params: &PggParams,
    density: f64,
) -> Result<[f64; 3], DynamicsError> {
    check_density(density)?;
    Ok(field_raw(&state.as_array(), params, density * params.mutation))
}

pub fn rhs(state: &SimplexState, params: &PggParams, mode: DynamicsMode) -> Result<[f64; 3], DynamicsError> {
    if let DynamicsMode::NetworkScaled { density } = mode {
        check_density(density)?;
    }
    Ok(mode_rhs(&state.as_array(), params, mode))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SimplexState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&SimplexState> {
        self.states.last()
    }

    /// Constant trajectory on a uniform grid, mostly useful in tests.
    pub fn constant(state: SimplexState, dt: f64, len: usize) -> Self {
        Self {
            times: (0..len).map(|i| i as f64 * dt).collect(),
            states: vec![state; len],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub steps: usize,
    /// Optional lower bound applied to every component after each step.
    /// `None` leaves the dynamics untouched.
    pub floor: Option<f64>,
}

impl IntegrateOptions {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            floor: None,
        }
    }
}

fn rk4_step(s: &[f64; 3], dt: f64, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> [f64; 3] {
    let add = |a: &[f64; 3], k: &[f64; 3], h: f64| [0, 1, 2].map(|i| a[i] + h * k[i]);
    let k1 = f(s);
    let k2 = f(&add(s, &k1, dt / 2.0));
    let k3 = f(&add(s, &k2, dt / 2.0));
    let k4 = f(&add(s, &k3, dt));
    [0, 1, 2].map(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Project a post-step state back onto the simplex.
fn settle(mut v: [f64; 3], step: usize, floor: Option<f64>) -> Result<[f64; 3], DynamicsError> {
    if v.iter().any(|c| !c.is_finite() || *c < -CLAMP_TOL) {
        return Err(DynamicsError::Blowup { step, state: v });
    }
    for c in v.iter_mut() {
        if *c < 0.0 {
            *c = 0.0;
        }
        if let Some(f) = floor {
            *c = c.max(f);
        }
    }
    let sum: f64 = v.iter().sum();
    if sum <= 0.0 {
        return Err(DynamicsError::Blowup { step, state: v });
    }
    Ok(v.map(|c| c / sum))
}

/// Integrate from `initial` for `opts.steps` steps of size `opts.dt`.
///
/// The result holds `steps + 1` states including the initial one; times are
/// `i * dt`.
pub fn integrate(
    initial: SimplexState,
    params: &PggParams,
    mode: DynamicsMode,
    opts: IntegrateOptions,
) -> Result<Trajectory, DynamicsError> {
    if !(opts.dt.is_finite() && opts.dt > 0.0) {
        return Err(DynamicsError::TimeStep(opts.dt));
    }
    if opts.steps == 0 {
        return Err(DynamicsError::NoSteps);
    }
    if let Some(f) = opts.floor {
        if !(0.0..1.0 / 3.0).contains(&f) {
            return Err(DynamicsError::Floor(f));
        }
    }
    if let DynamicsMode::NetworkScaled { density } = mode {
        check_density(density)?;
    }

    let mut times = Vec::with_capacity(opts.steps + 1);
    let mut states = Vec::with_capacity(opts.steps + 1);
    times.push(0.0);
    states.push(initial);
    let mut s = initial.as_array();
    for step in 1..=opts.steps {
        let next = rk4_step(&s, opts.dt, |v| mode_rhs(v, params, mode));
        s = settle(next, step, opts.floor)?;
        times.push(step as f64 * opts.dt);
        states.push(SimplexState::from_array_unchecked(s));
    }
    Ok(Trajectory { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> PggParams {
        PggParams::default()
    }

    fn st(x: f64, y: f64, z: f64) -> SimplexState {
        SimplexState::new(x, y, z).unwrap()
    }

    #[test]
    fn vertices_are_fixed_under_selection() {
        for i in 0..3 {
            assert_eq!(replicator_rhs(&SimplexState::vertex(i), &defaults()), [0.0; 3]);
        }
    }

    #[test]
    fn interior_value_matches_two_stage_evaluation() {
        // frozen from profile: P_D = (0.9/0.6 - 0.5)(1 - 0.4^4) = 0.9744,
        // P_C = 0.9744 - 0.9744 = 0, Pbar = 0.3 * 0 + 0.3 * 0.9744 = 0.29232
        let p = defaults();
        let d = replicator_rhs(&st(0.3, 0.3, 0.4), &p);
        let want = [0.3 * (0.0 - 0.29232), 0.3 * (0.9744 - 0.29232), 0.4 * (0.0 - 0.29232)];
        for i in 0..3 {
            assert!((d[i] - want[i]).abs() < 1e-14, "{d:?} vs {want:?}");
        }
    }

    #[test]
    fn mutation_at_vertex() {
        let p = PggParams {
            mutation: 0.1,
            ..defaults()
        };
        let d = mutator_rhs(&SimplexState::vertex(0), &p);
        let want = [-0.2, 0.1, 0.1];
        for i in 0..3 {
            assert!((d[i] - want[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_mutation_reduces_to_replicator() {
        let p = PggParams {
            mutation: 0.0,
            ..defaults()
        };
        let s = st(0.2, 0.5, 0.3);
        assert_eq!(mutator_rhs(&s, &p), replicator_rhs(&s, &p));
    }

    #[test]
    fn density_scaling_reductions() {
        let p = PggParams {
            mutation: 0.1,
            ..defaults()
        };
        let s = st(0.2, 0.5, 0.3);
        assert_eq!(network_scaled_rhs(&s, &p, 1.0).unwrap(), mutator_rhs(&s, &p));
        assert_eq!(network_scaled_rhs(&s, &p, 0.0).unwrap(), replicator_rhs(&s, &p));
        let doubled = PggParams { mutation: 0.2, ..p.clone() };
        assert_eq!(
            network_scaled_rhs(&s, &doubled, 0.5).unwrap(),
            network_scaled_rhs(&s, &p, 1.0).unwrap()
        );
        assert_eq!(network_scaled_rhs(&s, &p, 1.5), Err(DynamicsError::Density(1.5)));
        assert!(network_scaled_rhs(&s, &p, -0.1).is_err());
    }

    #[test]
    fn single_step_from_vertex() {
        let t = integrate(
            SimplexState::vertex(1),
            &defaults(),
            DynamicsMode::Replicator,
            IntegrateOptions::new(0.01, 1),
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.states[0], t.states[1]);
        assert_eq!(t.times, vec![0.0, 0.01]);
    }

    #[test]
    fn rejects_bad_options() {
        let s = SimplexState::centroid();
        let p = defaults();
        let run = |o| integrate(s, &p, DynamicsMode::Replicator, o);
        assert_eq!(run(IntegrateOptions::new(0.01, 0)), Err(DynamicsError::NoSteps));
        assert!(matches!(run(IntegrateOptions::new(-1.0, 5)), Err(DynamicsError::TimeStep(_))));
        let mut o = IntegrateOptions::new(0.01, 5);
        o.floor = Some(0.5);
        assert!(matches!(run(o), Err(DynamicsError::Floor(_))));
    }

    #[test]
    fn huge_step_reports_blowup() {
        let p = PggParams {
            mutation: 1.0,
            ..defaults()
        };
        let err = integrate(
            st(0.9, 0.05, 0.05),
            &p,
            DynamicsMode::ReplicatorMutator,
            IntegrateOptions::new(50.0, 10),
        )
        .unwrap_err();
        assert!(matches!(err, DynamicsError::Blowup { step: 1, .. }), "{err:?}");
    }

    #[test]
    fn cooperator_to_defector_ratio_never_rises_under_selection() {
        // d/dt ln(x/y) = P_C - P_D = -c (1 - z^(N-1)) <= 0
        let t = integrate(
            st(0.9, 0.05, 0.05),
            &defaults(),
            DynamicsMode::Replicator,
            IntegrateOptions::new(0.01, 20_000),
        )
        .unwrap();
        let ratios: Vec<f64> = t.states.iter().map(|s| s.x() / s.y()).collect();
        assert!(ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    }

    #[test]
    fn floor_keeps_components_positive() {
        let mut o = IntegrateOptions::new(0.01, 5000);
        o.floor = Some(1e-60);
        let t = integrate(st(0.9, 0.05, 0.05), &defaults(), DynamicsMode::Replicator, o).unwrap();
        assert!(t.states.iter().all(|s| s.as_array().iter().all(|&c| c > 0.0)));
    }
}
