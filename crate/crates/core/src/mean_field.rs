//! Deterministic rate equations for the mean photon and excited-emitter
//! numbers:
//!
//! ```text
//! dn_a/dt = γ_r (2 n_e − n0) n_a + γ_r n_e − κ n_a
//! dn_e/dt = P (n0 − n_e) − γ_r (2 n_e − n0) n_a − γ_r n_e − γ_A n_e
//! ```

use crate::params::LaserParams;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanFieldState {
    pub n_a: f64,
    pub n_e: f64,
}

impl MeanFieldState {
    pub const fn new(n_a: f64, n_e: f64) -> Self {
        Self { n_a, n_e }
    }

    fn axpy(self, h: f64, d: (f64, f64)) -> Self {
        Self::new(self.n_a + h * d.0, self.n_e + h * d.1)
    }
}

/// Right-hand side `(dn_a/dt, dn_e/dt)`.
pub fn rhs(state: MeanFieldState, params: &LaserParams) -> Result<(f64, f64)> {
    let gr = params.gamma_r()?;
    Ok(rhs_with(state, params, gr))
}

#[inline]
fn rhs_with(s: MeanFieldState, p: &LaserParams, gr: f64) -> (f64, f64) {
    let n0 = f64::from(p.n0);
    let net_stim = gr * (2.0 * s.n_e - n0) * s.n_a;
    let spon = gr * s.n_e;
    (
        net_stim + spon - p.kappa * s.n_a,
        p.pump * (n0 - s.n_e) - net_stim - spon - p.gamma_a * s.n_e,
    )
}

/// Fixed-step classical RK4 from `init` to `t_end`. Returns `(t, state)`
/// pairs including both end points; the final step is shortened to land on
/// `t_end` exactly.
pub fn integrate(
    params: &LaserParams,
    init: MeanFieldState,
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, MeanFieldState)>> {
    params.validate()?;
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_end >= 0 (dt = {dt}, t_end = {t_end})"
        )));
    }
    let gr = params.gamma_r()?;
    let n0 = f64::from(params.n0);
    let tol = 1e-9 * n0.max(1.0);
    let f = |s: MeanFieldState| rhs_with(s, params, gr);

    let steps = (t_end / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = init;
    let mut t = 0.0;
    out.push((t, s));
    for i in 0..steps {
        let t_next = ((i + 1) as f64 * dt).min(t_end);
        let h = t_next - t;
        let k1 = f(s);
        let k2 = f(s.axpy(0.5 * h, k1));
        let k3 = f(s.axpy(0.5 * h, k2));
        let k4 = f(s.axpy(h, k3));
        s = MeanFieldState::new(
            s.n_a + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            s.n_e + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        t = t_next;
        let in_bounds = s.n_a.is_finite()
            && s.n_a >= -tol
            && s.n_e >= -tol
            && s.n_e <= n0 + tol;
        if !in_bounds {
            return Err(Error::Unstable {
                time: t,
                n_a: s.n_a,
                n_e: s.n_e,
            });
        }
        out.push((t, s));
    }
    Ok(out)
}

/// Physical stationary point of the rate equations.
///
/// Adding both equations gives `κ n_a = P (n0 − n_e) − γ_A n_e`; substituting
/// into the photon equation leaves a quadratic in `n_e`.
pub fn steady_state(params: &LaserParams) -> Result<MeanFieldState> {
    params.validate()?;
    let gr = params.gamma_r()?;
    let n0 = f64::from(params.n0);
    let (kappa, pump, ga) = (params.kappa, params.pump, params.gamma_a);
    if kappa <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: "a steady state requires cavity loss".into(),
        });
    }

    let photons = |n_e: f64| (pump * (n0 - n_e) - ga * n_e) / kappa;

    let a = pump * n0;
    let b = pump + ga;
    let c = kappa + gr * n0;
    let d = 2.0 * gr;
    let a2 = b * d;
    let a1 = -(a * d + b * c + kappa * gr);
    let a0 = a * c;

    let roots: Vec<f64> = if a2 == 0.0 {
        if a1 == 0.0 {
            // g = 0, P = 0 and γ_A = 0: every n_e is stationary.
            return Err(Error::NoPhysicalRoot { roots: vec![] });
        }
        vec![-a0 / a1]
    } else {
        let disc = a1 * a1 - 4.0 * a2 * a0;
        if disc < 0.0 {
            return Err(Error::NoPhysicalRoot { roots: vec![] });
        }
        let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
        if q == 0.0 {
            vec![0.0]
        } else {
            vec![q / a2, a0 / q]
        }
    };

    let slack = 1e-12 * n0;
    let mut candidates: Vec<MeanFieldState> = roots
        .iter()
        .filter(|&&x| x >= -slack && x <= n0 + slack)
        .map(|&x| {
            let n_e = x.clamp(0.0, n0);
            MeanFieldState::new(photons(n_e).max(0.0), n_e)
        })
        .filter(|s| photons(s.n_e) >= -slack)
        .collect();
    candidates.dedup_by(|x, y| (x.n_e - y.n_e).abs() <= slack);

    let state = match candidates.len() {
        0 => return Err(Error::NoPhysicalRoot { roots }),
        1 => candidates[0],
        _ => {
            log::warn!("two physical stationary points {candidates:?}; taking the brighter one");
            candidates
                .into_iter()
                .max_by(|x, y| x.n_a.total_cmp(&y.n_a))
                .expect("non-empty")
        }
    };

    let (r1, r2) = rhs_with(state, params, gr);
    let scale = kappa * state.n_a + pump * n0;
    let residual = r1.abs().max(r2.abs());
    if residual > 1e-10 * scale {
        return Err(Error::Residual { residual });
    }
    Ok(state)
}

/// Pump at which the unlasing steady state is half inverted,
/// `P = γ_r(P) + γ_A`, solved by fixed-point iteration.
pub fn inversion_pump(params: &LaserParams) -> Result<f64> {
    params.validate()?;
    if params.g == 0.0 {
        return Ok(params.gamma_a);
    }
    let rest = params.kappa + params.gamma_d + params.gamma_a;
    let map = |p: f64| -> Result<f64> { Ok(params.with_pump(p).gamma_r()? + params.gamma_a) };

    let mut iterates = Vec::new();
    let mut p = if rest > 0.0 { map(0.0)? } else { 2.0 * params.g };
    iterates.push(p);
    for _ in 0..10_000 {
        let next = map(p)?;
        iterates.push(next);
        if (next - p).abs() <= 1e-10 * next.max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        if !next.is_finite() {
            break;
        }
        p = next;
    }
    Err(Error::NonConvergence { iterates })
}

/// Jacobian of the rate equations at `s`.
fn jacobian(s: MeanFieldState, p: &LaserParams, gr: f64) -> [[f64; 2]; 2] {
    let gain = gr * (2.0 * s.n_e - f64::from(p.n0));
    [
        [gain - p.kappa, 2.0 * gr * s.n_a + gr],
        [-gain, -p.pump - 2.0 * gr * s.n_a - gr - p.gamma_a],
    ]
}

/// Slowest decay rate of small deviations from the steady state, i.e. the
/// smallest `−Re λ` over the Jacobian eigenvalues.
pub fn relaxation_rate(params: &LaserParams) -> Result<f64> {
    let s = steady_state(params)?;
    let j = jacobian(s, params, params.gamma_r()?);
    let half_trace = 0.5 * (j[0][0] + j[1][1]);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = half_trace * half_trace - det;
    let rate = if disc >= 0.0 {
        -(half_trace + disc.sqrt())
    } else {
        -half_trace
    };
    Ok(rate)
}

/// Burn-in of ten slowest relaxation times.
pub fn default_burn_in(params: &LaserParams) -> Result<f64> {
    let rate = relaxation_rate(params)?;
    if rate > 0.0 {
        Ok(10.0 / rate)
    } else {
        Err(Error::InvalidArgument(format!(
            "steady state is not attracting (slowest rate {rate})"
        )))
    }
}
