use crate::engine::FieldTrajectory;
use crate::params::LaserParams;
use crate::{Complex64, Result};

/// Removes the deterministic frequency shift `α γ_r n̄_e` from a trajectory,
/// leaving the diffusive part of the phase. `mean_excited` is typically the
/// trajectory's own time average.
pub fn subtract_mean_drift(
    traj: &FieldTrajectory,
    params: &LaserParams,
    mean_excited: f64,
) -> Result<FieldTrajectory> {
    let shift = params.alpha * params.gamma_r()? * mean_excited;
    let mut out = traj.clone();
    for (k, e) in out.field.iter_mut().enumerate() {
        *e *= Complex64::from_polar(1.0, -shift * traj.time(k));
    }
    Ok(out)
}
