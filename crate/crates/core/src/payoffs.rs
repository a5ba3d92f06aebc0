//! Public goods game payoffs for cooperators, defectors and loners.
//!
//! Two levels are provided. Sample-level payoffs score one drawn group of
//! `N` players. Expected payoffs average over the composition of a group
//! drawn from an infinite population in state `(x, y, z)`:
//!
//! ```text
//! P_D  = (r c x / (1 - z) - g) (1 - z^(N-1))
//! P_C  = P_D - c (1 - z^(N-1))
//! P_L  = 0
//! Pbar = (1 - z^(N-1)) [(r - 1) c x - (1 - z) g]
//! ```
//!
//! `z^(N-1)` is the chance that a participant finds no co-player, in which
//! case no game takes place and every payoff is zero.

use thiserror::Error;

/// Below this participant mass the population is treated as all loners.
pub const NO_GAME_EPS: f64 = 1e-12;

/// Tolerance on `x + y + z = 1` for a valid simplex state.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ParamError {
    ParamError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PayoffError {
    #[error("sample contains no participants; no game is played")]
    NoGame,
    #[error("sample has {got} members, expected {want}")]
    WrongSampleSize { got: usize, want: usize },
}

/// How the multiplied pool is split inside one sampled group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolSharing {
    /// `r c n_c / N`: the pool is divided by the full sample size and the
    /// contributor shares in its own contribution.
    Sample,
    /// Each contribution `r c` is split among the `S - 1` other participants.
    /// Averaged over binomial groups this reproduces `P_D` exactly.
    Coplayers,
}

/// Which groups count as a played game in the finite-population simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameRule {
    /// At least two participants of any kind; a lone participant scores 0.
    AnyTwo,
    /// At least one cooperator and at least one defector must take part.
    CooperatorAndDefector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PggParams {
    /// Population size `M`.
    pub population: usize,
    /// Players drawn per round `N`.
    pub sample: usize,
    /// Contribution `c`.
    pub cost: f64,
    /// Interest rate `r`, `1 < r < N`.
    pub rate: f64,
    /// Participation cost `g`.
    pub participation_cost: f64,
    /// Mutation (exploration) rate `u`.
    pub mutation: f64,
    /// Charge `g` to participants of a sampled game.
    pub charge_participation: bool,
    pub pool: PoolSharing,
    pub rule: GameRule,
}

impl Default for PggParams {
    fn default() -> Self {
        Self {
            population: 100,
            sample: 5,
            cost: 1.0,
            rate: 3.0,
            participation_cost: 0.5,
            mutation: 1e-10,
            charge_participation: true,
            pool: PoolSharing::Coplayers,
            rule: GameRule::AnyTwo,
        }
    }
}

impl PggParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.sample < 2 {
            return Err(invalid("N", format!("sample size {} must be >= 2", self.sample)));
        }
        if self.population < self.sample {
            return Err(invalid(
                "M",
                format!("population {} must be >= sample size {}", self.population, self.sample),
            ));
        }
        if !(self.cost.is_finite() && self.cost > 0.0) {
            return Err(invalid("c", format!("cost {} must be > 0", self.cost)));
        }
        let n = self.sample as f64;
        if !(self.rate.is_finite() && self.rate > 1.0 && self.rate < n) {
            return Err(invalid("r", format!("rate {} must satisfy 1 < r < {n}", self.rate)));
        }
        if !(self.participation_cost.is_finite() && self.participation_cost >= 0.0) {
            return Err(invalid(
                "g",
                format!("participation cost {} must be >= 0", self.participation_cost),
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation) {
            return Err(invalid("u", format!("mutation rate {} must lie in [0, 1]", self.mutation)));
        }
        Ok(())
    }

    /// `z^(N-1)`: probability that none of the `N - 1` co-players participates.
    pub fn no_coplayer_probability(&self, z: f64) -> f64 {
        z.powi(self.sample as i32 - 1)
    }
}

/// Frequencies of cooperators `x`, defectors `y` and loners `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexState {
    x: f64,
    y: f64,
    z: f64,
}

impl SimplexState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, ParamError> {
        for (field, v) in [("x", x), ("y", y), ("z", z)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(field, format!("frequency {v} must be finite and >= 0")));
            }
        }
        let sum = x + y + z;
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(invalid("x+y+z", format!("frequencies sum to {sum}, not 1")));
        }
        Ok(Self { x, y, z })
    }

    /// Scales a nonnegative vector onto the simplex.
    pub fn normalized(v: [f64; 3]) -> Result<Self, ParamError> {
        let sum: f64 = v.iter().sum();
        if !(sum.is_finite() && sum > 0.0) || v.iter().any(|&c| c < 0.0) {
            return Err(invalid("state", format!("cannot normalize {v:?}")));
        }
        Ok(Self {
            x: v[0] / sum,
            y: v[1] / sum,
            z: v[2] / sum,
        })
    }

    pub(crate) fn from_array_unchecked(v: [f64; 3]) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
        }
    }

    pub fn vertex(i: usize) -> Self {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        Self::from_array_unchecked(v)
    }

    pub fn centroid() -> Self {
        Self::from_array_unchecked([1.0 / 3.0; 3])
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Number of cooperators, defectors and loners in one sampled group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleComposition {
    pub cooperators: usize,
    pub defectors: usize,
    pub loners: usize,
}

impl SampleComposition {
    pub fn new(cooperators: usize, defectors: usize, loners: usize) -> Self {
        Self {
            cooperators,
            defectors,
            loners,
        }
    }

    pub fn size(&self) -> usize {
        self.cooperators + self.defectors + self.loners
    }

    pub fn participants(&self) -> usize {
        self.cooperators + self.defectors
    }
}

/// Expected payoff of each strategy and the population mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffProfile {
    pub cooperator: f64,
    pub defector: f64,
    pub loner: f64,
    pub average: f64,
}

impl PayoffProfile {
    pub fn as_array(&self) -> [f64; 3] {
        [self.cooperator, self.defector, self.loner]
    }
}

fn check_size(comp: SampleComposition, params: &PggParams) -> Result<(), PayoffError> {
    if comp.size() != params.sample {
        return Err(PayoffError::WrongSampleSize {
            got: comp.size(),
            want: params.sample,
        });
    }
    Ok(())
}

/// Group payoffs `(P_c, P_d)` with the pool divided by the sample size:
/// `P_c = -c + r c n_c / N`, `P_d = r c n_c / N`. No participation cost.
pub fn sample_payoffs(
    comp: SampleComposition,
    params: &PggParams,
) -> Result<(f64, f64), PayoffError> {
    check_size(comp, params)?;
    if comp.participants() == 0 {
        return Err(PayoffError::NoGame);
    }
    let share = params.rate * params.cost * comp.cooperators as f64 / params.sample as f64;
    Ok((-params.cost + share, share))
}

/// Realized `(cooperator, defector)` payoffs for one group under the
/// configured sharing rule, game rule and participation charge.
///
/// A participant in a group that does not qualify as a game scores 0, the
/// same as a loner. Loners always score 0.
pub fn realized_payoffs(
    comp: SampleComposition,
    params: &PggParams,
) -> Result<(f64, f64), PayoffError> {
    check_size(comp, params)?;
    let played = match params.rule {
        GameRule::AnyTwo => comp.participants() >= 2,
        GameRule::CooperatorAndDefector => comp.cooperators >= 1 && comp.defectors >= 1,
    };
    if !played {
        return Ok((0.0, 0.0));
    }
    let (pc, pd) = match params.pool {
        PoolSharing::Sample => sample_payoffs(comp, params)?,
        PoolSharing::Coplayers => {
            let rc = params.rate * params.cost;
            let others = (comp.participants() - 1) as f64;
            let pd = rc * comp.cooperators as f64 / others;
            let pc = -params.cost + rc * comp.cooperators.saturating_sub(1) as f64 / others;
            (pc, pd)
        }
    };
    let g = if params.charge_participation {
        params.participation_cost
    } else {
        0.0
    };
    Ok((pc - g, pd - g))
}

pub(crate) fn defector_payoff_raw(s: &[f64; 3], params: &PggParams) -> f64 {
    let [x, _, z] = *s;
    if 1.0 - z < NO_GAME_EPS {
        return 0.0;
    }
    let rc = params.rate * params.cost;
    (rc * x / (1.0 - z) - params.participation_cost) * (1.0 - params.no_coplayer_probability(z))
}

pub(crate) fn profile_raw(s: &[f64; 3], params: &PggParams) -> PayoffProfile {
    let [x, y, z] = *s;
    if 1.0 - z < NO_GAME_EPS {
        return PayoffProfile {
            cooperator: 0.0,
            defector: 0.0,
            loner: 0.0,
            average: 0.0,
        };
    }
    let defector = defector_payoff_raw(s, params);
    let cooperator = defector - params.cost * (1.0 - params.no_coplayer_probability(z));
    let loner = 0.0;
    PayoffProfile {
        cooperator,
        defector,
        loner,
        average: x * cooperator + y * defector + z * loner,
    }
}

/// Expected defector payoff `P_D`; zero when no participants remain.
pub fn expected_defector_payoff(state: &SimplexState, params: &PggParams) -> f64 {
    defector_payoff_raw(&state.as_array(), params)
}

/// Expected payoffs of all three strategies. `average` is `Σ x_i P_i`.
pub fn expected_profile(state: &SimplexState, params: &PggParams) -> PayoffProfile {
    profile_raw(&state.as_array(), params)
}

/// `(1 - z^(N-1)) [(r - 1) c x - (1 - z) g]`.
pub fn closed_form_average(state: &SimplexState, params: &PggParams) -> f64 {
    let (x, z) = (state.x(), state.z());
    (1.0 - params.no_coplayer_probability(z))
        * ((params.rate - 1.0) * params.cost * x - (1.0 - z) * params.participation_cost)
}
