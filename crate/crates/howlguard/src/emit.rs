//! Deterministic CSV and text emission.
//!
//! Every float is written with 17 significant digits so the exact f64 bit
//! pattern survives a round trip through the file, and negative zero is
//! folded into positive zero so repeated runs stay byte-identical.

use std::io::Write;

use crate::attenuator::CurveRow;
use crate::diagnostics::FailureDiagnosis;
use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::scenario::SweepRow;

/// Formats one value for CSV output. Infinities become `inf`/`-inf`
/// (`recovery_steps` uses infinity for "never recovered").
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    format!("{:.16e}", x + 0.0)
}

/// Writes the attenuator component table, header `w,exp_term,phi_term,log_term,sum`.
pub fn write_curves<W: Write + ?Sized>(out: &mut W, rows: &[CurveRow]) -> Result<()> {
    writeln!(out, "w,exp_term,phi_term,log_term,sum")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.w),
            fmt_f64(r.exp_term),
            fmt_f64(r.phi_term),
            fmt_f64(r.log_term),
            fmt_f64(r.sum)
        )?;
    }
    Ok(())
}

/// Writes a trajectory, header `step,input,chosen,entropy,beta_max,w_0,...,w_{K-1}`.
pub fn write_trajectory<W: Write + ?Sized>(out: &mut W, traj: &Trajectory) -> Result<()> {
    write!(out, "step,input,chosen,entropy,beta_max")?;
    for i in 0..traj.k {
        write!(out, ",w_{i}")?;
    }
    writeln!(out)?;
    for r in &traj.records {
        write!(
            out,
            "{},{},{},{},{}",
            r.step,
            r.input_channel,
            r.chosen_output,
            fmt_f64(r.entropy),
            fmt_f64(r.beta_max)
        )?;
        for w in &r.weights_after {
            write!(out, ",{}", fmt_f64(*w))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes sweep results, header `param,value,metric,metric_value`.
pub fn write_sweep<W: Write + ?Sized>(out: &mut W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "param,value,metric,metric_value")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.param,
            fmt_f64(r.value),
            r.metric,
            fmt_f64(r.metric_value)
        )?;
    }
    Ok(())
}

/// Writes diagnoses as CSV, header `kind,onset,metric,value`; one row per
/// metric, onset blank when the detector reports no onset step.
pub fn write_diagnoses_csv<W: Write + ?Sized>(
    out: &mut W,
    diagnoses: &[FailureDiagnosis],
) -> Result<()> {
    writeln!(out, "kind,onset,metric,value")?;
    for d in diagnoses {
        let onset = d.onset_step.map(|s| s.to_string()).unwrap_or_default();
        if d.metrics.is_empty() {
            writeln!(out, "{},{},,", d.kind, onset)?;
        }
        for (name, value) in &d.metrics {
            writeln!(out, "{},{},{},{}", d.kind, onset, name, fmt_f64(*value))?;
        }
    }
    Ok(())
}

/// Writes the human-readable diagnosis summary.
pub fn write_diagnoses_text<W: Write + ?Sized>(
    out: &mut W,
    diagnoses: &[FailureDiagnosis],
) -> Result<()> {
    if diagnoses.is_empty() {
        writeln!(out, "no failure modes detected")?;
        return Ok(());
    }
    for d in diagnoses {
        match d.onset_step {
            Some(s) => writeln!(out, "{}: onset at step {}", d.kind, s)?,
            None => writeln!(out, "{}", d.kind)?,
        }
        for (name, value) in &d.metrics {
            writeln!(out, "  {name} = {value}")?;
        }
    }
    Ok(())
}
