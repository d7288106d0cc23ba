//! Safeguarded Newton iteration on a bracketed root.
//!
//! Newton steps are taken while they stay inside the current bracket and
//! shrink it fast enough; otherwise the step falls back to bisection. The
//! bracket always contains a sign change, so the iteration cannot escape.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Stop when the bracket is narrower than `xtol * max(1, |x|)`.
    pub xtol: f64,
    pub max_iter: u32,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            xtol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: u32,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootError {
    NoSignChange {
        lo: f64,
        flo: f64,
        hi: f64,
        fhi: f64,
    },
    NotFinite {
        x: f64,
    },
}

impl std::fmt::Display for RootError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootError::NoSignChange { lo, flo, hi, fhi } => write!(
                f,
                "no sign change on [{lo}, {hi}] (f(lo) = {flo}, f(hi) = {fhi})"
            ),
            RootError::NotFinite { x } => write!(f, "function not finite at {x}"),
        }
    }
}

/// Finds a root of `f` in `[lo, hi]`. `f` returns the value and derivative.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<Root, RootError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if !flo.is_finite() {
        return Err(RootError::NotFinite { x: lo });
    }
    if !fhi.is_finite() {
        return Err(RootError::NotFinite { x: hi });
    }
    if flo == 0.0 {
        return Ok(Root {
            x: lo,
            fx: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if fhi == 0.0 {
        return Ok(Root {
            x: hi,
            fx: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, flo, hi, fhi });
    }
    // Orient so that f(neg) < 0 < f(pos).
    let lo_is_neg = flo < 0.0;

    let mut x = 0.5 * (lo + hi);
    let mut step_old = hi - lo;
    let mut step = step_old;
    let (mut fx, mut dfx) = f(x);
    for iter in 1..=opts.max_iter {
        if !fx.is_finite() {
            return Err(RootError::NotFinite { x });
        }
        if fx == 0.0 {
            return Ok(Root {
                x,
                fx,
                iterations: iter,
                converged: true,
            });
        }
        if (fx < 0.0) == lo_is_neg {
            lo = x;
        } else {
            hi = x;
        }

        let newton = x - fx / dfx;
        let inside = dfx != 0.0 && dfx.is_finite() && newton > lo && newton < hi;
        if inside && (fx / dfx).abs() * 2.0 < step_old.abs() {
            step_old = step;
            step = fx / dfx;
            x = newton;
        } else {
            step_old = step;
            step = 0.5 * (hi - lo);
            x = lo + step;
        }

        let width_tol = opts.xtol * x.abs().max(1.0);
        if (hi - lo) <= width_tol || step.abs() <= 0.5 * opts.xtol * x.abs() {
            let (fnew, _) = f(x);
            return Ok(Root {
                x,
                fx: fnew,
                iterations: iter,
                converged: true,
            });
        }
        (fx, dfx) = f(x);
    }
    Ok(Root {
        x,
        fx,
        iterations: opts.max_iter,
        converged: false,
    })
}
