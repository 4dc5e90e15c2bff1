use crate::{Error, Result};

/// Ordinary least-squares line `y = slope · x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope, zero for an exact two-point fit.
    pub slope_se: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

impl LinearFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "linear fit needs two or more paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("linear fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let slope_se = if x.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
        rms: (ssr / n).sqrt(),
    })
}

/// Levenberg-Marquardt minimization of `Σ (model(x_i; p) − y_i)²` with a
/// forward-difference Jacobian. Returns the parameters and the final sum of
/// squares.
pub(crate) fn levenberg_marquardt<const P: usize>(
    x: &[f64],
    y: &[f64],
    start: [f64; P],
    model: impl Fn(f64, &[f64; P]) -> f64,
) -> Result<([f64; P], f64)> {
    let cost = |p: &[f64; P]| -> f64 { x.iter().zip(y).map(|(&a, &b)| (model(a, p) - b).powi(2)).sum() };
    let mut p = start;
    let mut current = cost(&p);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let mut jtj = [[0.0; P]; P];
        let mut jtr = [0.0; P];
        for (&a, &b) in x.iter().zip(y) {
            let f0 = model(a, &p);
            let mut grad = [0.0; P];
            for j in 0..P {
                let h = 1e-7 * p[j].abs().max(1e-9);
                let mut q = p;
                q[j] += h;
                grad[j] = (model(a, &q) - f0) / h;
            }
            for i in 0..P {
                jtr[i] += grad[i] * (f0 - b);
                for j in 0..P {
                    jtj[i][j] += grad[i] * grad[j];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut m = jtj;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-300);
            }
            let Some(step) = solve_small(m, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p;
            for i in 0..P {
                trial[i] -= step[i];
            }
            let c = cost(&trial);
            if c.is_finite() && c < current {
                let rel = (current - c) / current.max(1e-300);
                p = trial;
                current = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-12 {
                    return Ok((p, current));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            return Ok((p, current));
        }
    }
    if current.is_finite() {
        Ok((p, current))
    } else {
        Err(Error::NonConvergence { iterates: p.to_vec() })
    }
}

/// Gaussian elimination with partial pivoting for tiny dense systems.
fn solve_small<const P: usize>(mut a: [[f64; P]; P], mut b: [f64; P]) -> Option<[f64; P]> {
    for col in 0..P {
        let pivot = (col..P).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..P {
            let f = a[row][col] / a[col][col];
            for k in col..P {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut out = [0.0; P];
    for row in (0..P).rev() {
        let s: f64 = (row + 1..P).map(|k| a[row][k] * out[k]).sum();
        out[row] = (b[row] - s) / a[row][row];
    }
    Some(out)
}
