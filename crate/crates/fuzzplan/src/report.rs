//! Deterministic report formatting shared by the command-line surface.
//!
//! Probabilities and fractions print fixed-point with four decimals to match
//! the band tables; `raw` switches to the shortest exact representation.

use std::fmt::Write as _;

use crate::bands::FocBandPoint;

/// Version stamp carried by every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

pub fn fmt_real(x: f64, raw: bool) -> String {
    if raw {
        format!("{x}")
    } else {
        format!("{x:.4}")
    }
}

/// CSV for a band sweep: `theta,nu,p_lo,p_hi,pa_lo,pa_hi,with_errors`.
pub fn band_csv(points: &[FocBandPoint], raw: bool) -> String {
    let mut out = String::from("theta,nu,p_lo,p_hi,pa_lo,pa_hi,with_errors\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_real(p.theta, raw),
            fmt_real(p.nu, raw),
            fmt_real(p.p_cut.lo(), raw),
            fmt_real(p.p_cut.hi(), raw),
            fmt_real(p.pa_cut.lo(), raw),
            fmt_real(p.pa_cut.hi(), raw),
            p.with_errors,
        );
    }
    out
}
