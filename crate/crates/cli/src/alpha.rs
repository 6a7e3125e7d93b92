//! `pi`-aware parsing of phases and times.
//!
//! Grammar: `[-+]<float>` or `[-+][<float>]pi[/<int>]`, e.g. `0.25`, `pi/8`,
//! `2pi`, `-3pi/4`, `10pi`.

use std::f64::consts::PI;

use gainwalk::gain_graph::canonical_phase;

use crate::CliError;

/// Parses a pi-aware real expression without reducing it.
pub fn parse_pi_expr(text: &str) -> Result<f64, CliError> {
    let bad = || CliError::AlphaExpr(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| bad())?,
        Some(pos) => {
            let (coef_text, rest) = (&s[..pos], &s[pos + 2..]);
            let coef = match coef_text {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => {
                    // reject things like "1e" or "*"
                    if c.ends_with(['e', 'E']) {
                        return Err(bad());
                    }
                    c.parse::<f64>().map_err(|_| bad())?
                }
            };
            let denom = match rest {
                "" => 1u64,
                r => {
                    let d = r.strip_prefix('/').ok_or_else(bad)?;
                    if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(bad());
                    }
                    let d: u64 = d.parse().map_err(|_| bad())?;
                    if d == 0 {
                        return Err(bad());
                    }
                    d
                }
            };
            coef * PI / denom as f64
        }
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// Parses a phase and reduces it to `[0, 2pi)`.
pub fn parse_alpha_expr(text: &str) -> Result<f64, CliError> {
    parse_pi_expr(text).map(canonical_phase)
}
