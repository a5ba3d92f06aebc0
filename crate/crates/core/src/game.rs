//! Two-player, two-strategy matrix games.
//!
//! Cell `(i, j)` holds the pair `(a_ij, b_ij)`: the row player's payoff
//! followed by the column player's payoff when row plays `i` and column
//! plays `j`. Strategy index 0 is "Up" for the row player and "Left" for
//! the column player.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("payoff entries must be finite")]
    NonFinitePayoff,
    #[error("mixed strategy probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("equilibrium condition violated: {0}")]
    Condition(&'static str),
}

/// A 2x2 bimatrix of `(row payoff, column payoff)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2x2 {
    cells: [[(f64, f64); 2]; 2],
}

impl Matrix2x2 {
    pub fn new(cells: [[(f64, f64); 2]; 2]) -> Result<Self, GameError> {
        let finite = cells
            .iter()
            .flatten()
            .all(|&(a, b)| a.is_finite() && b.is_finite());
        if !finite {
            return Err(GameError::NonFinitePayoff);
        }
        Ok(Self { cells })
    }

    /// The coordination family with levels `a > b > c`:
    ///
    /// ```text
    ///          Left     Right
    /// Up      (b, a)   (c, c)
    /// Down    (c, c)   (a, b)
    /// ```
    pub fn abc(a: f64, b: f64, c: f64) -> Result<Self, GameError> {
        Self::new([[(b, a), (c, c)], [(c, c), (a, b)]])
    }

    /// Matching pennies with a unit stake; the row player loses on a match.
    pub fn matching_pennies() -> Self {
        Self {
            cells: [[(-1.0, 1.0), (1.0, -1.0)], [(1.0, -1.0), (-1.0, 1.0)]],
        }
    }

    pub fn zero() -> Self {
        Self {
            cells: [[(0.0, 0.0); 2]; 2],
        }
    }

    pub fn cell(&self, row: usize, col: usize) -> (f64, f64) {
        self.cells[row][col]
    }

    pub fn scaled(&self, k: f64) -> Result<Self, GameError> {
        let mut cells = self.cells;
        for (a, b) in cells.iter_mut().flatten() {
            *a *= k;
            *b *= k;
        }
        Self::new(cells)
    }
}

/// Probability `p` on the first pure strategy, `1 - p` on the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedStrategy2 {
    p: f64,
    q: f64,
}

impl MixedStrategy2 {
    pub fn new(p: f64) -> Result<Self, GameError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GameError::InvalidProbability(p));
        }
        Ok(Self { p, q: 1.0 - p })
    }

    /// Mixture proportional to nonnegative weights `(w1, w2)`. Each
    /// probability is a single rounded quotient.
    pub fn from_weights(w1: f64, w2: f64) -> Result<Self, GameError> {
        let total = w1 + w2;
        if !(w1 >= 0.0 && w2 >= 0.0 && total > 0.0 && total.is_finite()) {
            return Err(GameError::InvalidProbability(w1 / total));
        }
        Ok(Self {
            p: w1 / total,
            q: w2 / total,
        })
    }

    pub fn pure(first: bool) -> Self {
        let p = if first { 1.0 } else { 0.0 };
        Self { p, q: 1.0 - p }
    }

    pub fn first(&self) -> f64 {
        self.p
    }

    pub fn second(&self) -> f64 {
        self.q
    }

    pub fn probs(&self) -> [f64; 2] {
        [self.p, self.q]
    }
}

/// Joint probability of each outcome cell under independent mixing.
pub fn outcome_distribution(row: MixedStrategy2, col: MixedStrategy2) -> [[f64; 2]; 2] {
    let (r, c) = (row.probs(), col.probs());
    [[r[0] * c[0], r[0] * c[1]], [r[1] * c[0], r[1] * c[1]]]
}

/// Expected `(row, column)` payoffs when both players mix independently.
pub fn expected_payoffs(m: &Matrix2x2, row: MixedStrategy2, col: MixedStrategy2) -> (f64, f64) {
    let dist = outcome_distribution(row, col);
    let mut u_row = 0.0;
    let mut u_col = 0.0;
    for (i, dist_row) in dist.iter().enumerate() {
        for (j, &w) in dist_row.iter().enumerate() {
            let (a, b) = m.cell(i, j);
            u_row += w * a;
            u_col += w * b;
        }
    }
    (u_row, u_col)
}

/// Equilibrium weight `(b - c) / (a + b - 2c)` of the `a > b > c` family.
///
/// All side conditions are checked together; the error names the first one
/// that fails.
pub fn mixed_equilibrium_abc(a: f64, b: f64, c: f64) -> Result<f64, GameError> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(GameError::NonFinitePayoff);
    }
    let denom = a + b - 2.0 * c;
    if b - c <= 0.0 {
        return Err(GameError::Condition("b - c > 0"));
    }
    if denom <= 0.0 {
        return Err(GameError::Condition("a + b - 2c > 0"));
    }
    if denom <= b - c || a <= c {
        return Err(GameError::Condition("a + b - 2c > b - c (a > c)"));
    }
    if a <= b {
        return Err(GameError::Condition("a > b"));
    }
    Ok((b - c) / denom)
}

/// Both players' equilibrium mixtures and payoffs for the `a > b > c` game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcEquilibrium {
    /// Raw equilibrium weight `σu`.
    pub sigma: f64,
    /// Row player: probability of Up is `σu`.
    pub row: MixedStrategy2,
    /// Column player: probability of Left is `1 - σu`.
    pub col: MixedStrategy2,
    pub outcome: [[f64; 2]; 2],
    pub payoffs: (f64, f64),
}

pub fn solve_abc(a: f64, b: f64, c: f64) -> Result<AbcEquilibrium, GameError> {
    let sigma = mixed_equilibrium_abc(a, b, c)?;
    let m = Matrix2x2::abc(a, b, c)?;
    // unnormalized weights; everything below divides once at the end
    let wr = [b - c, a - c];
    let wc = [a - c, b - c];
    let norm = (wr[0] + wr[1]) * (wc[0] + wc[1]);
    let mut outcome = [[0.0; 2]; 2];
    let (mut u_row, mut u_col) = (0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            let w = wr[i] * wc[j];
            let (pa, pb) = m.cell(i, j);
            outcome[i][j] = w / norm;
            u_row += w * pa;
            u_col += w * pb;
        }
    }
    Ok(AbcEquilibrium {
        sigma,
        row: MixedStrategy2::from_weights(wr[0], wr[1])?,
        col: MixedStrategy2::from_weights(wc[0], wc[1])?,
        outcome,
        payoffs: (u_row / norm, u_col / norm),
    })
}
