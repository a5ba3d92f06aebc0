//! Finite-population imitation and exploration process.
//!
//! A generation is `M` asynchronous update events. In each event a focal
//! agent is picked uniformly and one of three channels is chosen by
//! cumulative-propensity selection:
//!
//! * exploration (propensity `pe`): switch to one of the two other
//!   strategies, uniformly;
//! * imitation (`(1 - pe) pr`): draw a distinct role agent, realize both
//!   payoffs from a freshly sampled group of `N` that contains them both,
//!   and copy the role's strategy with the Fermi probability;
//! * no update (`(1 - pe) (1 - pr)`).

use rand::distr::Open01;
use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::payoffs::{
    expected_profile, realized_payoffs, ParamError, PayoffError, PggParams, SampleComposition,
    SimplexState,
};
use crate::rng::stream_rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("all propensities are zero; no event can fire")]
    NoEvent,
    #[error("propensity {index} is {value}; propensities must be finite and >= 0")]
    Propensity { index: usize, value: f64 },
    #[error("C({n}, {r}) is undefined for r > n")]
    Combination { n: u64, r: u64 },
    #[error("C({n}, {r}) does not fit in 64 bits")]
    Overflow { n: u64, r: u64 },
    #[error("population has {got} members, parameters expect {want}")]
    PopulationSize { got: usize, want: usize },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Cooperator,
    Defector,
    Loner,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Cooperator, Strategy::Defector, Strategy::Loner];

    pub fn index(self) -> usize {
        match self {
            Strategy::Cooperator => 0,
            Strategy::Defector => 1,
            Strategy::Loner => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> char {
        match self {
            Strategy::Cooperator => 'C',
            Strategy::Defector => 'D',
            Strategy::Loner => 'L',
        }
    }

    /// The two strategies other than `self`, in index order.
    pub fn others(self) -> [Strategy; 2] {
        match self {
            Strategy::Cooperator => [Strategy::Defector, Strategy::Loner],
            Strategy::Defector => [Strategy::Cooperator, Strategy::Loner],
            Strategy::Loner => [Strategy::Cooperator, Strategy::Defector],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    members: Vec<Strategy>,
    counts: [usize; 3],
}

impl Population {
    pub fn new(members: Vec<Strategy>) -> Self {
        let mut counts = [0; 3];
        for s in &members {
            counts[s.index()] += 1;
        }
        Self { members, counts }
    }

    pub fn from_counts(cooperators: usize, defectors: usize, loners: usize) -> Self {
        let mut members = Vec::with_capacity(cooperators + defectors + loners);
        members.extend(std::iter::repeat_n(Strategy::Cooperator, cooperators));
        members.extend(std::iter::repeat_n(Strategy::Defector, defectors));
        members.extend(std::iter::repeat_n(Strategy::Loner, loners));
        Self::new(members)
    }

    /// Rounds `state * size` to integer counts by largest remainder.
    pub fn from_state(state: &SimplexState, size: usize) -> Self {
        let exact = state.as_array().map(|f| f * size as f64);
        let mut counts = exact.map(|e| e.floor() as usize);
        let mut left = size.saturating_sub(counts.iter().sum());
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| {
            let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            counts[i] += 1;
            left -= 1;
        }
        Self::from_counts(counts[0], counts[1], counts[2])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Strategy] {
        &self.members
    }

    pub fn get(&self, i: usize) -> Strategy {
        self.members[i]
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn fractions(&self) -> [f64; 3] {
        let m = self.members.len() as f64;
        self.counts.map(|c| c as f64 / m)
    }

    pub fn state(&self) -> SimplexState {
        SimplexState::from_array_unchecked(self.fractions())
    }

    pub fn set(&mut self, i: usize, s: Strategy) {
        let old = self.members[i];
        self.counts[old.index()] -= 1;
        self.counts[s.index()] += 1;
        self.members[i] = s;
    }

    /// Index of a strategy held by every member, if any.
    pub fn fixated(&self) -> Option<Strategy> {
        let m = self.members.len();
        Strategy::ALL.into_iter().find(|s| self.counts[s.index()] == m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffComparison {
    /// Payoffs realized in one sampled round.
    Realized,
    /// Expected payoffs at the current population frequencies.
    Expected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningParams {
    /// Selection intensity `β`.
    pub beta: f64,
    /// Imitation probability `pr`.
    pub imitation: f64,
    /// Exploration probability `pe`.
    pub exploration: f64,
    /// Mean of the normal increment. Stored for configuration completeness;
    /// the discrete simulator does not use it.
    pub increment_mean: f64,
    /// Standard deviation of the normal increment; unused, as above.
    pub increment_sd: f64,
    /// Rounds played per imitation event; payoffs are averaged over them.
    pub rounds: usize,
    pub comparison: PayoffComparison,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            imitation: 1.0,
            exploration: 1e-3,
            increment_mean: 0.0,
            increment_sd: 0.0,
            rounds: 1,
            comparison: PayoffComparison::Realized,
        }
    }
}

impl LearningParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let fail = |field, reason: String| Err(ParamError::Invalid { field, reason });
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return fail("beta", format!("selection intensity {} must be >= 0", self.beta));
        }
        for (field, v) in [
            ("pr", self.imitation),
            ("pe", self.exploration),
            ("mu", self.increment_mean),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(field, format!("{v} must lie in [0, 1]"));
            }
        }
        if !(self.increment_sd.is_finite() && self.increment_sd >= 0.0) {
            return fail("sigma", format!("{} must be >= 0", self.increment_sd));
        }
        if self.rounds == 0 {
            return fail("rounds", "at least one round per generation is required".into());
        }
        Ok(())
    }

    /// Per-generation selection time scale: in the weak-selection limit the
    /// net imitation flow from `j` to `i` is `pr (1 - pe) x_i x_j β (P_i - P_j) / 2`.
    pub fn selection_time_scale(&self) -> f64 {
        self.beta * self.imitation * (1.0 - self.exploration) / 2.0
    }
}

/// Logistic adoption probability `1 / (1 + exp(-β (π_role - π_focal)))`.
pub fn fermi_probability(pi_focal: f64, pi_role: f64, beta: f64) -> f64 {
    let arg = beta * (pi_role - pi_focal);
    if arg >= 0.0 {
        1.0 / (1.0 + (-arg).exp())
    } else {
        let e = arg.exp();
        e / (1.0 + e)
    }
}

/// `x_i Σ_j (P_ij - P_ji) x_j` with `P_ij` the payoff of strategy `i` when
/// compared with `j`; for frequency-dependent payoffs `P_ij = P_i`, which
/// turns the form into `x_i (P_i - Pbar)`.
pub fn pairwise_switch_rate(state: &SimplexState, payoffs: &[f64; 3], i: usize) -> f64 {
    let x = state.as_array();
    x[i] * (0..3).map(|j| (payoffs[i] - payoffs[j]) * x[j]).sum::<f64>()
}

/// Index `r` with `cum[r-1] / a_tot < z1 <= cum[r] / a_tot`.
pub fn gillespie_select(propensities: &[f64], z1: f64) -> Result<usize, SimError> {
    let mut total = 0.0;
    for (index, &value) in propensities.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(SimError::Propensity { index, value });
        }
        total += value;
    }
    if total <= 0.0 {
        return Err(SimError::NoEvent);
    }
    let target = z1 * total;
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (r, &a) in propensities.iter().enumerate() {
        if a > 0.0 {
            cum += a;
            last_positive = r;
            if target <= cum {
                return Ok(r);
            }
        }
    }
    // rounding in the running sum can leave z1 ~ 1 just above cum
    Ok(last_positive)
}

/// Binomial coefficient, computed multiplicatively.
pub fn combinations(n: u64, r: u64) -> Result<u64, SimError> {
    if r > n {
        return Err(SimError::Combination { n, r });
    }
    let k = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc
            .checked_mul(n as u128 - k as u128 + i)
            .ok_or(SimError::Overflow { n, r })?
            / i;
    }
    u64::try_from(acc).map_err(|_| SimError::Overflow { n, r })
}

/// Payoffs realized by the sampled members of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub sampled: Vec<usize>,
    pub payoffs: Vec<f64>,
}

impl RoundOutcome {
    /// Payoff of agent `i`; zero when it was not sampled.
    pub fn delta(&self, i: usize) -> f64 {
        self.sampled
            .iter()
            .position(|&s| s == i)
            .map_or(0.0, |k| self.payoffs[k])
    }

    pub fn dense(&self, population: usize) -> Vec<f64> {
        let mut out = vec![0.0; population];
        for (&i, &p) in self.sampled.iter().zip(&self.payoffs) {
            out[i] = p;
        }
        out
    }
}

fn score_group(pop: &Population, group: &[usize], params: &PggParams) -> Result<Vec<f64>, SimError> {
    let mut counts = [0usize; 3];
    for &i in group {
        counts[pop.get(i).index()] += 1;
    }
    let comp = SampleComposition::new(counts[0], counts[1], counts[2]);
    let (pc, pd) = realized_payoffs(comp, params)?;
    Ok(group
        .iter()
        .map(|&i| match pop.get(i) {
            Strategy::Cooperator => pc,
            Strategy::Defector => pd,
            Strategy::Loner => 0.0,
        })
        .collect())
}

/// One round: `N` members drawn uniformly without replacement play.
pub fn play_round<R: Rng + ?Sized>(
    pop: &Population,
    params: &PggParams,
    rng: &mut R,
) -> Result<RoundOutcome, SimError> {
    check_population(pop, params)?;
    let sampled = index::sample(rng, pop.len(), params.sample).into_vec();
    let payoffs = score_group(pop, &sampled, params)?;
    Ok(RoundOutcome { sampled, payoffs })
}

/// A round whose group contains `a` and `b` plus `N - 2` other members.
fn play_pair_round<R: Rng + ?Sized>(
    pop: &Population,
    a: usize,
    b: usize,
    params: &PggParams,
    rng: &mut R,
) -> Result<Vec<f64>, SimError> {
    let (lo, hi) = (a.min(b), a.max(b));
    let mut group = Vec::with_capacity(params.sample);
    group.push(a);
    group.push(b);
    for mut v in index::sample(rng, pop.len() - 2, params.sample - 2) {
        if v >= lo {
            v += 1;
        }
        if v >= hi {
            v += 1;
        }
        group.push(v);
    }
    score_group(pop, &group, params)
}

fn check_population(pop: &Population, params: &PggParams) -> Result<(), SimError> {
    if pop.len() != params.population {
        return Err(SimError::PopulationSize {
            got: pop.len(),
            want: params.population,
        });
    }
    Ok(())
}

/// What a single update event did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventOutcome {
    Explored,
    Imitation {
        adopted: bool,
        /// Sum and count of every payoff realized in the event's rounds.
        payoff_sum: f64,
        payoff_count: usize,
    },
    Idle,
}

/// One asynchronous update of a uniformly chosen focal agent.
pub fn update_event<R: Rng + ?Sized>(
    pop: &mut Population,
    params: &PggParams,
    lp: &LearningParams,
    rng: &mut R,
) -> Result<EventOutcome, SimError> {
    let m = pop.len();
    let pe = lp.exploration;
    let channels = [pe, (1.0 - pe) * lp.imitation, (1.0 - pe) * (1.0 - lp.imitation)];
    let focal = rng.random_range(0..m);
    let z1: f64 = rng.sample(Open01);
    match gillespie_select(&channels, z1)? {
        0 => {
            let others = pop.get(focal).others();
            pop.set(focal, others[rng.random_range(0..2)]);
            Ok(EventOutcome::Explored)
        }
        1 => {
            let mut role = rng.random_range(0..m - 1);
            if role >= focal {
                role += 1;
            }
            let mut payoff_sum = 0.0;
            let mut payoff_count = 0;
            let (pi_focal, pi_role) = match lp.comparison {
                PayoffComparison::Realized => {
                    let (mut f, mut r) = (0.0, 0.0);
                    for _ in 0..lp.rounds {
                        let pay = play_pair_round(pop, focal, role, params, rng)?;
                        f += pay[0];
                        r += pay[1];
                        payoff_sum += pay.iter().sum::<f64>();
                        payoff_count += pay.len();
                    }
                    (f / lp.rounds as f64, r / lp.rounds as f64)
                }
                PayoffComparison::Expected => {
                    let p = expected_profile(&pop.state(), params).as_array();
                    (p[pop.get(focal).index()], p[pop.get(role).index()])
                }
            };
            let adopted = rng.random::<f64>() < fermi_probability(pi_focal, pi_role, lp.beta);
            if adopted {
                pop.set(focal, pop.get(role));
            }
            Ok(EventOutcome::Imitation {
                adopted,
                payoff_sum,
                payoff_count,
            })
        }
        _ => Ok(EventOutcome::Idle),
    }
}

/// Bookkeeping for one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationSummary {
    /// Mean payoff over every group member of every round played; with
    /// expected-payoff comparison, the population average payoff instead.
    pub mean_payoff: f64,
    pub explorations: usize,
    pub imitations: usize,
}

/// Runs `M` update events in place.
pub fn step_generation<R: Rng + ?Sized>(
    pop: &mut Population,
    params: &PggParams,
    lp: &LearningParams,
    rng: &mut R,
) -> Result<GenerationSummary, SimError> {
    check_population(pop, params)?;
    let mut payoff_sum = 0.0;
    let mut payoff_n = 0usize;
    let mut summary = GenerationSummary {
        mean_payoff: 0.0,
        explorations: 0,
        imitations: 0,
    };
    for _ in 0..pop.len() {
        match update_event(pop, params, lp, rng)? {
            EventOutcome::Explored => summary.explorations += 1,
            EventOutcome::Imitation {
                payoff_sum: s,
                payoff_count: n,
                ..
            } => {
                summary.imitations += 1;
                payoff_sum += s;
                payoff_n += n;
            }
            EventOutcome::Idle => {}
        }
    }
    summary.mean_payoff = match lp.comparison {
        PayoffComparison::Realized if payoff_n > 0 => payoff_sum / payoff_n as f64,
        PayoffComparison::Realized => 0.0,
        PayoffComparison::Expected => expected_profile(&pop.state(), params).average,
    };
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbmRow {
    pub generation: usize,
    pub fractions: [f64; 3],
    pub mean_payoff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbmTrajectory {
    pub population: usize,
    pub rows: Vec<AbmRow>,
}

impl AbmTrajectory {
    /// First generation at which one strategy holds the whole population.
    pub fn first_fixation(&self) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.fractions.contains(&1.0))
            .map(|r| r.generation)
    }
}

/// Iterates [`step_generation`] from `initial`; row 0 is the initial state
/// with mean payoff 0.
pub fn run_abm(
    initial: &Population,
    params: &PggParams,
    lp: &LearningParams,
    generations: usize,
    seed: u64,
) -> Result<AbmTrajectory, SimError> {
    run_abm_stream(initial, params, lp, generations, seed, 0)
}

/// As [`run_abm`], drawing from stream `stream` of `seed`.
pub fn run_abm_stream(
    initial: &Population,
    params: &PggParams,
    lp: &LearningParams,
    generations: usize,
    seed: u64,
    stream: u64,
) -> Result<AbmTrajectory, SimError> {
    params.validate()?;
    lp.validate()?;
    check_population(initial, params)?;
    let mut rng = stream_rng(seed, stream);
    let mut pop = initial.clone();
    let mut rows = Vec::with_capacity(generations + 1);
    rows.push(AbmRow {
        generation: 0,
        fractions: pop.fractions(),
        mean_payoff: 0.0,
    });
    for generation in 1..=generations {
        let summary = step_generation(&mut pop, params, lp, &mut rng)?;
        rows.push(AbmRow {
            generation,
            fractions: pop.fractions(),
            mean_payoff: summary.mean_payoff,
        });
    }
    Ok(AbmTrajectory {
        population: pop.len(),
        rows,
    })
}

/// Replicator-mutator settings that mirror an imitation run: mutation rate
/// `(pe / 2) / s` and horizon `generations * s`, where `s` is
/// [`LearningParams::selection_time_scale`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedOde {
    pub params: PggParams,
    pub horizon: f64,
}

pub fn matched_ode(params: &PggParams, lp: &LearningParams, generations: usize) -> Option<MatchedOde> {
    let scale = lp.selection_time_scale();
    if scale <= 0.0 {
        return None;
    }
    let mutation = (lp.exploration / 2.0 / scale).min(1.0);
    Some(MatchedOde {
        params: PggParams {
            mutation,
            ..params.clone()
        },
        horizon: generations as f64 * scale,
    })
}
