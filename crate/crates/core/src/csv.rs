//! Plot-ready CSV output.
//!
//! Numbers are written in positional notation with 12 significant digits and
//! trailing zeros trimmed. Probabilities below 1e-12 are written as 0.

use std::io::{self, Write};

use crate::analysis::SweepRow;
use crate::outage::OutageBreakdown;

pub const SIGNIFICANT_DIGITS: i32 = 12;
pub const PROBABILITY_FLOOR: f64 = 1e-12;

pub const BREAKDOWN_HEADER: &str = "p_ll,p_ln,p_nl,p_nn,w_ll,w_ln,w_nl,w_nn,total";
pub const SWEEP_HEADER: &str = "x,p_ll,p_ln,p_nl,p_nn,w_ll,w_ln,w_nl,w_nn,total";

/// Formats `v` with 12 significant digits, never in scientific notation.
pub fn format_number(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v == 0.0 {
            "0".into()
        } else {
            format!("{v}")
        };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS - 1 - magnitude).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Formats a probability; values under [`PROBABILITY_FLOOR`] become `0` and
/// set `*clamped`.
pub fn format_probability(p: f64, clamped: &mut bool) -> String {
    if p.abs() < PROBABILITY_FLOOR {
        if p != 0.0 {
            *clamped = true;
        }
        return "0".into();
    }
    format_number(p)
}

/// The nine [`BREAKDOWN_HEADER`] fields of `b`, comma separated.
pub fn breakdown_fields(b: &OutageBreakdown, clamped: &mut bool) -> String {
    [
        b.p_ll, b.p_ln, b.p_nl, b.p_nn, b.w_ll, b.w_ln, b.w_nl, b.w_nn, b.total,
    ]
    .iter()
    .map(|&p| format_probability(p, clamped))
    .collect::<Vec<_>>()
    .join(",")
}

/// Writes sweep rows under [`SWEEP_HEADER`]. Returns whether any probability
/// was clamped to zero.
pub fn write_sweep<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<bool> {
    writeln!(out, "{SWEEP_HEADER}")?;
    let mut clamped = false;
    for row in rows {
        let fields = breakdown_fields(&row.breakdown, &mut clamped);
        writeln!(out, "{},{fields}", format_number(row.x))?;
    }
    Ok(clamped)
}
