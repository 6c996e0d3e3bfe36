//! Lowest-loss regions of prescribed posterior mass.
//!
//! Given a loss `f` with a single minimum at `centre`, the region
//! `{x : f(x) <= λ}` is an interval `[a(λ), b(λ)]`. The level `λ` is chosen so
//! the interval carries posterior mass `p`. The same routine builds HPD
//! intervals by taking `f = -ln(density)`.

use crate::error::{Error, Result};
use crate::numeric::brent_root;

/// Checks on a geometric grid that `f` decreases up to `centre` and
/// increases afterwards.
pub(crate) fn assert_unimodal<F: Fn(f64) -> f64>(f: &F, lo: f64, centre: f64, hi: f64) -> Result<()> {
    const STEPS: usize = 48;
    let f0 = f(centre);
    let slack = 1e-9 * f0.abs().max(1.0);
    let check = |from: f64, to: f64| -> Result<()> {
        let mut prev = f0;
        for i in 1..=STEPS {
            let s = i as f64 / STEPS as f64;
            let x = from + (to - from) * s;
            let v = f(x);
            if v + slack < prev {
                return Err(Error::Numerical(format!(
                    "expected loss is not unimodal: f({x}) = {v} below {prev}"
                )));
            }
            prev = prev.max(v);
        }
        Ok(())
    };
    check(centre, lo)?;
    check(centre, hi)
}

/// Solves for the level set of `f` with `mass(a, b) = p`.
///
/// `lo < centre < hi` bound the search; `mass` must be nondecreasing in the
/// interval width.
pub(crate) fn level_set_interval<F, M>(
    f: F,
    mass: M,
    centre: f64,
    lo: f64,
    hi: f64,
    p: f64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
    M: Fn(f64, f64) -> f64,
{
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let f_min = f(centre);
    let f_lo = f(lo);
    let f_hi = f(hi);
    let xtol = 1e-14 * centre.abs().max(1e-300);

    let endpoints = |level: f64| -> Result<(f64, f64)> {
        let a = if f_lo <= level { lo } else { brent_root(|x| f(x) - level, lo, centre, xtol)? };
        let b = if f_hi <= level { hi } else { brent_root(|x| f(x) - level, centre, hi, xtol)? };
        Ok((a, b))
    };
    let excess = |level: f64| -> f64 {
        match endpoints(level) {
            Ok((a, b)) => mass(a, b) - p,
            Err(_) => f64::NAN,
        }
    };

    let top = f_lo.min(f_hi);
    if excess(top) < 0.0 {
        return Err(Error::Numerical(format!(
            "search bounds [{lo}, {hi}] hold less than the requested mass {p}"
        )));
    }
    let level = brent_root(excess, f_min, top, 1e-15 * top.abs().max(1.0))?;
    endpoints(level)
}
