//! Compact text forms for catalog functions and sets, used on the command
//! line and in config files. Fields are separated by `:`, vector entries by
//! `,`.
//!
//! Scalar functions: `zero`, `power:P:ALPHA` (P may be written `4/3`),
//! `neg_log:ALPHA`, `log_barrier:OMEGA`, `huber:OMEGA:TAU`.
//!
//! Sets in `ℝ^d`: `whole`, `orthant`, `origin`, `box:LO:HI`, `l1:R`, `l2:R`,
//! `l2:R:C1,..,Cd`, `linf:R`, `halfspace:U1,..,Ud:ETA`.

use dualfb_core::{ConvexSet, ScalarFun};

use crate::error::{usage, CliResult};

pub(crate) fn num(field: &str, what: &str) -> CliResult<f64> {
    let t = field.trim();
    let v = match t.split_once('/') {
        Some((a, b)) => match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(a), Ok(b)) => Ok(a / b),
            _ => Err(()),
        },
        None => t.parse::<f64>().map_err(|_| ()),
    };
    match v {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(usage(format!("{what}: expected a number, found {field:?}"))),
    }
}

fn nums(field: &str, what: &str) -> CliResult<Vec<f64>> {
    field.split(',').map(|f| num(f, what)).collect()
}

fn arity(text: &str, parts: &[&str], n: usize, form: &str) -> CliResult<()> {
    if parts.len() == n + 1 {
        Ok(())
    } else {
        Err(usage(format!("{text:?}: expected {form}")))
    }
}

pub fn parse_scalar(text: &str) -> CliResult<ScalarFun> {
    let parts: Vec<&str> = text.split(':').collect();
    let f = match parts[0].trim() {
        "zero" => {
            arity(text, &parts, 0, "zero")?;
            ScalarFun::Zero
        }
        "power" => {
            arity(text, &parts, 2, "power:P:ALPHA")?;
            ScalarFun::power(
                num(parts[1], "power exponent")?,
                num(parts[2], "power weight")?,
            )?
        }
        "neg_log" => {
            arity(text, &parts, 1, "neg_log:ALPHA")?;
            ScalarFun::neg_log(num(parts[1], "neg_log weight")?)?
        }
        "log_barrier" => {
            arity(text, &parts, 1, "log_barrier:OMEGA")?;
            ScalarFun::log_barrier(num(parts[1], "log_barrier width")?)?
        }
        "huber" => {
            arity(text, &parts, 2, "huber:OMEGA:TAU")?;
            ScalarFun::huber(num(parts[1], "huber omega")?, num(parts[2], "huber tau")?)?
        }
        k => return Err(usage(format!("unknown scalar function {k:?}"))),
    };
    Ok(f)
}

pub fn parse_set(text: &str, dim: usize) -> CliResult<ConvexSet> {
    let parts: Vec<&str> = text.split(':').collect();
    let fixed = |v: Vec<f64>, what: &str| {
        if v.len() == dim {
            Ok(v)
        } else {
            Err(usage(format!(
                "{what} has {} entries, the space has dimension {dim}",
                v.len()
            )))
        }
    };
    let c = match parts[0].trim() {
        "whole" => {
            arity(text, &parts, 0, "whole")?;
            ConvexSet::whole(dim)?
        }
        "orthant" => {
            arity(text, &parts, 0, "orthant")?;
            ConvexSet::nonneg_orthant(dim)?
        }
        "origin" => {
            arity(text, &parts, 0, "origin")?;
            ConvexSet::singleton(vec![0.0; dim])?
        }
        "box" => {
            arity(text, &parts, 2, "box:LO:HI")?;
            let (lo, hi) = (num(parts[1], "box bound")?, num(parts[2], "box bound")?);
            ConvexSet::boxed(vec![lo; dim], vec![hi; dim])?
        }
        "l1" => {
            arity(text, &parts, 1, "l1:R")?;
            ConvexSet::l1_ball(dim, num(parts[1], "radius")?)?
        }
        "linf" => {
            arity(text, &parts, 1, "linf:R")?;
            ConvexSet::linf_ball(dim, num(parts[1], "radius")?)?
        }
        "l2" => {
            let center = match parts.len() {
                2 => vec![0.0; dim],
                3 => fixed(nums(parts[2], "center")?, "center")?,
                _ => return Err(usage(format!("{text:?}: expected l2:R or l2:R:CENTER"))),
            };
            ConvexSet::l2_ball(center, num(parts[1], "radius")?)?
        }
        "halfspace" => {
            arity(text, &parts, 2, "halfspace:U:ETA")?;
            ConvexSet::halfspace(
                fixed(nums(parts[1], "normal")?, "normal")?,
                num(parts[2], "offset")?,
            )?
        }
        k => return Err(usage(format!("unknown set {k:?}"))),
    };
    Ok(c)
}
