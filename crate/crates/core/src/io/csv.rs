//! CSV emission for trajectories and sweep summaries.

use std::fmt::Write as _;

use crate::agent::AbmTrajectory;
use crate::dynamics::Trajectory;

pub const SIG_DIGITS: usize = 12;

/// Formats `v` with `digits` significant digits, `%g` style: fixed notation
/// for decimal exponents in `[-5, digits)`, scientific otherwise, trailing
/// zeros removed.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn sig(v: f64) -> String {
    fmt_sig(v, SIG_DIGITS)
}

/// `t,x,y,z` with one row per state.
pub fn ode_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (traj.len() + 1));
    out.push_str("t,x,y,z\n");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let _ = writeln!(out, "{},{},{},{}", sig(*t), sig(s.x()), sig(s.y()), sig(s.z()));
    }
    out
}

/// `gen,frac_c,frac_d,frac_l,mean_payoff`.
pub fn abm_csv(traj: &AbmTrajectory) -> String {
    let mut out = String::with_capacity(64 * (traj.rows.len() + 1));
    out.push_str("gen,frac_c,frac_d,frac_l,mean_payoff\n");
    for r in &traj.rows {
        let [c, d, l] = r.fractions;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.generation,
            sig(c),
            sig(d),
            sig(l),
            sig(r.mean_payoff)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(-0.0, 12), "0");
        assert_eq!(fmt_sig(1.0, 12), "1");
        assert_eq!(fmt_sig(0.05, 12), "0.05");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(fmt_sig(1e-10, 12), "1e-10");
        assert_eq!(fmt_sig(-2.5e-7, 12), "-2.5e-7");
        assert_eq!(fmt_sig(1000.0, 12), "1000");
        assert_eq!(fmt_sig(0.01 * 3.0, 12), "0.03");
        assert_eq!(fmt_sig(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(fmt_sig(9.9999999999995, 12), "10");
    }
}
