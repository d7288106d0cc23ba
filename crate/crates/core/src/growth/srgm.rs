//! NHPP reliability growth models fitted by maximum likelihood on exact
//! event times.
//!
//! Goel-Okumoto: `m(t) = a (1 - exp(-b t))`, a finite expected defect total.
//!
//! Musa-Okumoto logarithmic Poisson:
//! `m(t) = ln(lambda0 * theta * t + 1) / theta`, unbounded.
//!
//! Both fits profile out one parameter in closed form and solve a 1-D
//! likelihood equation with [`newton_bisect`].

use serde::{Deserialize, Serialize};

use super::root::{newton_bisect, RootOptions};
use crate::error::{OrcasError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SrgmModel {
    GoelOkumoto,
    MusaOkumoto,
}

impl std::str::FromStr for SrgmModel {
    type Err = OrcasError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "go" | "goel-okumoto" => Ok(SrgmModel::GoelOkumoto),
            "mo" | "musa-okumoto" => Ok(SrgmModel::MusaOkumoto),
            _ => Err(OrcasError::UnknownValue {
                kind: "growth model",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum SrgmParams {
    /// `a`: expected total defects; `b`: per-unit detection rate.
    GoelOkumoto { a: f64, b: f64 },
    /// `lambda0`: initial intensity; `theta`: intensity decay.
    MusaOkumoto { lambda0: f64, theta: f64 },
}

impl SrgmParams {
    pub fn model(&self) -> SrgmModel {
        match self {
            SrgmParams::GoelOkumoto { .. } => SrgmModel::GoelOkumoto,
            SrgmParams::MusaOkumoto { .. } => SrgmModel::MusaOkumoto,
        }
    }

    /// Expected cumulative defects by effort `t`.
    pub fn mean_value(&self, t: f64) -> f64 {
        match *self {
            SrgmParams::GoelOkumoto { a, b } => -a * (-b * t).exp_m1(),
            SrgmParams::MusaOkumoto { lambda0, theta } => (lambda0 * theta * t).ln_1p() / theta,
        }
    }

    /// Failure intensity `m'(t)`.
    pub fn intensity(&self, t: f64) -> f64 {
        match *self {
            SrgmParams::GoelOkumoto { a, b } => a * b * (-b * t).exp(),
            SrgmParams::MusaOkumoto { lambda0, theta } => lambda0 / (lambda0 * theta * t + 1.0),
        }
    }

    /// Finite expected total, `None` for infinite-failure models.
    pub fn predicted_total(&self) -> Option<f64> {
        match *self {
            SrgmParams::GoelOkumoto { a, .. } => Some(a),
            SrgmParams::MusaOkumoto { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrgmFit {
    pub params: SrgmParams,
    pub events: usize,
    /// Observation horizon T.
    pub horizon: f64,
    pub predicted_total: Option<f64>,
    /// `m'(T)`.
    pub current_intensity: f64,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl SrgmFit {
    pub fn model(&self) -> SrgmModel {
        self.params.model()
    }

    /// `(t, m(t))` at `samples` evenly spaced points on `[0, until]`.
    pub fn curve(&self, until: f64, samples: usize) -> Vec<(f64, f64)> {
        let samples = samples.max(2);
        (0..samples)
            .map(|i| {
                let t = until * i as f64 / (samples - 1) as f64;
                (t, self.params.mean_value(t))
            })
            .collect()
    }
}

/// Checks event data and resolves the horizon.
pub fn validate_events(events: &[f64], horizon: Option<f64>) -> Result<f64> {
    if events.len() < 2 {
        return Err(OrcasError::InsufficientData(format!(
            "{} event(s); at least 2 are required",
            events.len()
        )));
    }
    for (i, &t) in events.iter().enumerate() {
        if !(t.is_finite() && t > 0.0) {
            return Err(OrcasError::Invalid(format!(
                "event {i} at effort {t}: efforts must be positive and finite"
            )));
        }
        if i > 0 && t < events[i - 1] {
            return Err(OrcasError::Invalid(format!(
                "event {i} at effort {t} precedes event {} at {}; efforts must be nondecreasing",
                i - 1,
                events[i - 1]
            )));
        }
    }
    let last = events[events.len() - 1];
    let horizon = horizon.unwrap_or(last);
    if !(horizon.is_finite() && horizon >= last) {
        return Err(OrcasError::Invalid(format!(
            "observation horizon {horizon} precedes the last event at {last}"
        )));
    }
    Ok(horizon)
}

/// Fits `model` to ordered detection efforts observed over `[0, horizon]`.
/// `horizon` defaults to the last event.
///
/// When the likelihood has no interior maximum the returned fit has
/// `converged == false` and a diagnostic; its parameters sit at the search
/// boundary and must not be used as estimates.
pub fn fit_srgm(events: &[f64], horizon: Option<f64>, model: SrgmModel) -> Result<SrgmFit> {
    let horizon = validate_events(events, horizon)?;
    Ok(match model {
        SrgmModel::GoelOkumoto => fit_goel_okumoto(events, horizon),
        SrgmModel::MusaOkumoto => fit_musa_okumoto(events, horizon),
    })
}

/// Log-likelihood of a homogeneous Poisson process at its MLE rate `n / T`.
pub fn hpp_log_likelihood(n: usize, horizon: f64) -> f64 {
    let n = n as f64;
    n * (n / horizon).ln() - n
}

pub fn go_log_likelihood(events: &[f64], horizon: f64, a: f64, b: f64) -> f64 {
    let n = events.len() as f64;
    let sum: f64 = events.iter().sum();
    n * a.ln() + n * b.ln() - b * sum + a * (-b * horizon).exp_m1()
}

/// Gradient of [`go_log_likelihood`] in `(a, b)`.
pub fn go_gradient(events: &[f64], horizon: f64, a: f64, b: f64) -> [f64; 2] {
    let n = events.len() as f64;
    let sum: f64 = events.iter().sum();
    let tail = (-b * horizon).exp();
    [
        n / a + (-b * horizon).exp_m1(),
        n / b - sum - a * horizon * tail,
    ]
}

pub fn mo_log_likelihood(events: &[f64], horizon: f64, lambda0: f64, theta: f64) -> f64 {
    let n = events.len() as f64;
    let c = lambda0 * theta;
    let s: f64 = events.iter().map(|&t| (c * t).ln_1p()).sum();
    n * lambda0.ln() - s - (c * horizon).ln_1p() / theta
}

/// Gradient of [`mo_log_likelihood`] in `(lambda0, theta)`.
pub fn mo_gradient(events: &[f64], horizon: f64, lambda0: f64, theta: f64) -> [f64; 2] {
    let n = events.len() as f64;
    let c = lambda0 * theta;
    let s1: f64 = events.iter().map(|&t| t / (1.0 + c * t)).sum();
    let tail = horizon / (1.0 + c * horizon);
    [
        n / lambda0 - theta * s1 - tail,
        -lambda0 * s1 + (c * horizon).ln_1p() / (theta * theta) - lambda0 * tail / theta,
    ]
}

/// `1/x - 1/(e^x - 1)`, decreasing from 1/2 at 0 towards 0.
fn go_shape(x: f64) -> f64 {
    if x < 1e-3 {
        0.5 - x / 12.0 + x * x * x / 720.0
    } else {
        1.0 / x - 1.0 / x.exp_m1()
    }
}

fn go_shape_deriv(x: f64) -> f64 {
    if x < 1e-2 {
        -1.0 / 12.0 + x * x / 240.0
    } else {
        let s = (0.5 * x).sinh();
        -1.0 / (x * x) + 1.0 / (4.0 * s * s)
    }
}

/// Boundary used to report an unconverged fit, in units of the scaled rate.
const BOUNDARY_SCALED_RATE: f64 = 1e-6;

fn fit_goel_okumoto(events: &[f64], horizon: f64) -> SrgmFit {
    let n = events.len() as f64;
    let sum: f64 = events.iter().sum();
    // With x = bT the score equation in b reduces to go_shape(x) = mean / T.
    let ratio = sum / (n * horizon);
    let params_at = |x: f64| {
        let b = x / horizon;
        let a = n / -(-x).exp_m1();
        (a, b)
    };
    let finish = |x: f64, converged: bool, iterations: u32, diagnostic: Option<String>| {
        let (a, b) = params_at(x);
        let params = SrgmParams::GoelOkumoto { a, b };
        SrgmFit {
            params,
            events: events.len(),
            horizon,
            predicted_total: params.predicted_total(),
            current_intensity: params.intensity(horizon),
            log_likelihood: go_log_likelihood(events, horizon, a, b),
            converged,
            iterations,
            diagnostic,
        }
    };

    if ratio >= 0.5 {
        return finish(
            BOUNDARY_SCALED_RATE,
            false,
            0,
            Some(format!(
                "no interior likelihood maximum: mean event effort is {:.4} of the horizon (needs < 0.5); \
                 the data show no reliability growth and are consistent with a homogeneous Poisson process",
                ratio
            )),
        );
    }

    let hi = 1.0 / ratio;
    let mut lo = (6.0 * (0.5 - ratio)).min(0.5 * hi);
    let mut guard = 0;
    while go_shape(lo) <= ratio && guard < 80 {
        lo *= 0.5;
        guard += 1;
    }
    match newton_bisect(
        |x| (go_shape(x) - ratio, go_shape_deriv(x)),
        lo,
        hi,
        RootOptions::default(),
    ) {
        Ok(root) if root.converged => finish(root.x, true, root.iterations, None),
        Ok(root) => finish(
            root.x,
            false,
            root.iterations,
            Some(format!(
                "root search hit the iteration limit at bT = {}",
                root.x
            )),
        ),
        Err(e) => finish(
            BOUNDARY_SCALED_RATE,
            false,
            0,
            Some(format!("root search failed: {e}")),
        ),
    }
}

/// Score equation for the Musa-Okumoto profile likelihood in `u = beta1 * T`,
/// divided by `n`. `scaled` holds `t_i / T`.
fn mo_score(scaled: &[f64], u: f64) -> (f64, f64) {
    let n = scaled.len() as f64;
    let (s1, s2) = scaled.iter().fold((0.0, 0.0), |(s1, s2), &s| {
        let d = 1.0 + u * s;
        (s1 + s / d, s2 + s * s / (d * d))
    });
    let l = u.ln_1p();
    // 1/u - 1/((1+u) ln(1+u)), computed without cancellation near 0.
    let head = if u < 1e-3 {
        0.5 - 5.0 * u / 12.0 + 3.0 * u * u / 8.0
    } else {
        1.0 / u - 1.0 / ((1.0 + u) * l)
    };
    let value = head - s1 / n;
    let q = (1.0 + u) * l;
    let deriv = -1.0 / (u * u) + s2 / n + (l + 1.0) / (q * q);
    (value, deriv)
}

fn fit_musa_okumoto(events: &[f64], horizon: f64) -> SrgmFit {
    let n = events.len() as f64;
    let scaled: Vec<f64> = events.iter().map(|t| t / horizon).collect();
    let finish = |u: f64, converged: bool, iterations: u32, diagnostic: Option<String>| {
        // beta0 = n / ln(1 + u), beta1 = u / T; theta = 1 / beta0, lambda0 = beta0 * beta1.
        let beta0 = n / u.ln_1p();
        let beta1 = u / horizon;
        let params = SrgmParams::MusaOkumoto {
            lambda0: beta0 * beta1,
            theta: 1.0 / beta0,
        };
        let (lambda0, theta) = (beta0 * beta1, 1.0 / beta0);
        SrgmFit {
            params,
            events: events.len(),
            horizon,
            predicted_total: None,
            current_intensity: params.intensity(horizon),
            log_likelihood: mo_log_likelihood(events, horizon, lambda0, theta),
            converged,
            iterations,
            diagnostic,
        }
    };

    let ratio = scaled.iter().sum::<f64>() / n;
    if ratio >= 0.5 {
        return finish(
            BOUNDARY_SCALED_RATE,
            false,
            0,
            Some(format!(
                "no interior likelihood maximum: mean event effort is {:.4} of the horizon (needs < 0.5); \
                 the data show no reliability growth",
                ratio
            )),
        );
    }

    // Walk a geometric grid for the first + to - crossing of the score.
    let mut lo = BOUNDARY_SCALED_RATE;
    let mut flo = mo_score(&scaled, lo).0;
    let mut bracket = None;
    while lo < 1e15 {
        let hi = lo * 2.0;
        let fhi = mo_score(&scaled, hi).0;
        if flo > 0.0 && fhi <= 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        flo = fhi;
    }
    let Some((lo, hi)) = bracket else {
        return finish(
            BOUNDARY_SCALED_RATE,
            false,
            0,
            Some("score equation has no sign change on the search grid".into()),
        );
    };
    match newton_bisect(|u| mo_score(&scaled, u), lo, hi, RootOptions::default()) {
        Ok(root) if root.converged => finish(root.x, true, root.iterations, None),
        Ok(root) => finish(
            root.x,
            false,
            root.iterations,
            Some(format!(
                "root search hit the iteration limit at beta1*T = {}",
                root.x
            )),
        ),
        Err(e) => finish(
            BOUNDARY_SCALED_RATE,
            false,
            0,
            Some(format!("root search failed: {e}")),
        ),
    }
}
