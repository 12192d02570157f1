//! Logistic maximum-likelihood fits and exponential-decay least squares.

use serde::{Deserialize, Serialize};

/// `Π(p) = 1 / (1 + exp(-(b0 + b1 p)))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub b0: f64,
    pub b1: f64,
    pub iterations: u32,
    pub deviance: f64,
}

impl LogisticFit {
    pub fn eval(&self, p: f64) -> f64 {
        sigmoid(self.b0 + self.b1 * p)
    }

    /// Location where the curve crosses one half.
    pub fn midpoint(&self) -> f64 {
        -self.b0 / self.b1
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Binomial-likelihood logistic regression by Newton's method on centred,
/// scaled abscissae. `points` are `(x, trials, successes)`.
pub fn fit_logistic(points: &[(f64, u64, u64)]) -> Result<LogisticFit, String> {
    if points.len() < 2 {
        return Err("need at least two points for a logistic fit".into());
    }
    let total: f64 = points.iter().map(|p| p.1 as f64).sum();
    let mean = points.iter().map(|p| p.0 * p.1 as f64).sum::<f64>() / total;
    let var = points.iter().map(|p| (p.0 - mean).powi(2) * p.1 as f64).sum::<f64>() / total;
    let scale = var.sqrt();
    if scale == 0.0 {
        return Err("all points share one abscissa".into());
    }
    let any_mixed = points.iter().any(|p| p.2 > 0 && p.2 < p.1);
    let lo_max = points.iter().filter(|p| p.2 < p.1).map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let hi_min = points.iter().filter(|p| p.2 > 0).map(|p| p.0).fold(f64::INFINITY, f64::min);
    if !any_mixed && lo_max < hi_min {
        return Err("data are perfectly separated; no finite logistic fit".into());
    }
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut it = 0;
    loop {
        it += 1;
        let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, n, k) in points {
            let t = (x - mean) / scale;
            let mu = sigmoid(a + b * t);
            let n = n as f64;
            let r = k as f64 - n * mu;
            let w = n * mu * (1.0 - mu);
            ga += r;
            gb += r * t;
            haa += w;
            hab += w * t;
            hbb += w * t * t;
        }
        let det = haa * hbb - hab * hab;
        if !(det.is_finite() && det > 0.0) {
            return Err("singular information matrix".into());
        }
        let da = (hbb * ga - hab * gb) / det;
        let db = (haa * gb - hab * ga) / det;
        a += da;
        b += db;
        if !(a.is_finite() && b.is_finite()) || b.abs() > 1e4 {
            return Err("logistic fit diverged".into());
        }
        if da.abs() < 1e-12 && db.abs() < 1e-12 {
            break;
        }
        if it >= 200 {
            return Err("logistic fit did not converge in 200 iterations".into());
        }
    }
    let b1 = b / scale;
    let b0 = a - b * mean / scale;
    let mut deviance = 0.0;
    for &(x, n, k) in points {
        let mu = sigmoid(b0 + b1 * x).clamp(1e-300, 1.0 - 1e-16);
        let (n, k) = (n as f64, k as f64);
        if k > 0.0 {
            deviance += 2.0 * k * (k / (n * mu)).ln();
        }
        if k < n {
            deviance += 2.0 * (n - k) * ((n - k) / (n * (1.0 - mu))).ln();
        }
    }
    Ok(LogisticFit { b0, b1, iterations: it, deviance })
}

/// `Π(len) = A exp(-len / λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub amplitude: f64,
    pub decay_length: f64,
    /// Sum of squared residuals.
    pub residual: f64,
}

impl FitResult {
    pub fn eval(&self, len: f64) -> f64 {
        self.amplitude * (-len / self.decay_length).exp()
    }

    /// Length at which the fitted curve reaches `target`.
    pub fn length_at(&self, target: f64) -> f64 {
        self.decay_length * (self.amplitude / target).ln()
    }
}

/// Least-squares exponential fit (Levenberg-Marquardt, started from a
/// log-linear regression). Needs at least three points.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult, String> {
    if points.len() < 3 {
        return Err(format!("need at least 3 points for a decay fit, got {}", points.len()));
    }
    let logs: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(x, y)| (x, y.ln())).collect();
    if logs.len() < 2 {
        return Err("too few positive values to start the decay fit".into());
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err("all lengths are equal".into());
    }
    let slope = sxy / sxx;
    let mut amp = (my - slope * mx).exp();
    let mut rate = -slope;
    let sse = |amp: f64, rate: f64| -> f64 {
        points.iter().map(|&(x, y)| (y - amp * (-rate * x).exp()).powi(2)).sum()
    };
    let mut cost = sse(amp, rate);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let (mut jaa, mut jar, mut jrr, mut ga, mut gr) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in points {
            let e = (-rate * x).exp();
            let r = y - amp * e;
            let da = e;
            let dr = -amp * x * e;
            jaa += da * da;
            jar += da * dr;
            jrr += dr * dr;
            ga += da * r;
            gr += dr * r;
        }
        let mut improved = false;
        for _ in 0..50 {
            let (a11, a22) = (jaa * (1.0 + lambda), jrr * (1.0 + lambda));
            let det = a11 * a22 - jar * jar;
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let step_a = (a22 * ga - jar * gr) / det;
            let step_r = (a11 * gr - jar * ga) / det;
            let (na, nr) = (amp + step_a, rate + step_r);
            let c = sse(na, nr);
            if c.is_finite() && c <= cost {
                let done = (cost - c) <= 1e-15 * cost.max(1e-300)
                    && step_a.abs() <= 1e-12 * amp.abs().max(1e-12)
                    && step_r.abs() <= 1e-12 * rate.abs().max(1e-12);
                amp = na;
                rate = nr;
                cost = c;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if done {
                    return finish(amp, rate, cost);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    finish(amp, rate, cost)
}

fn finish(amp: f64, rate: f64, cost: f64) -> Result<FitResult, String> {
    if !(rate > 0.0 && rate.is_finite() && amp > 0.0 && amp.is_finite()) {
        return Err(format!("decay fit did not give a positive decay length (rate {rate:e})"));
    }
    Ok(FitResult { amplitude: amp, decay_length: 1.0 / rate, residual: cost })
}
