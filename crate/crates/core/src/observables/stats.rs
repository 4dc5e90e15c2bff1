use crate::engine::FieldTrajectory;
use crate::{Error, Result};

const BATCHES: usize = 20;

/// Photon-number distribution and its low factorial moments.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonStatistics {
    /// `p(n)`, summing to one.
    pub distribution: Vec<f64>,
    pub mean: f64,
    /// `⟨n (n − 1)⟩`.
    pub factorial_moment: f64,
    /// `⟨n (n − 1)⟩ / ⟨n⟩²`; `None` when the mean photon number vanishes.
    pub g2_zero: Option<f64>,
    pub mean_error: Option<f64>,
    pub g2_error: Option<f64>,
}

impl PhotonStatistics {
    /// From (unnormalized) non-negative weights per photon number.
    pub fn from_distribution(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "photon distribution needs non-negative weights with positive sum".into(),
            ));
        }
        let distribution: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let (mean, factorial_moment) = moments(&distribution);
        Ok(Self {
            g2_zero: g2(mean, factorial_moment),
            distribution,
            mean,
            factorial_moment,
            mean_error: None,
            g2_error: None,
        })
    }

    /// Sample-weighted statistics; errors from batch means.
    pub fn from_samples(samples: &[u32]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("no samples".into()));
        }
        let mut stats = Self::from_distribution(&histogram(samples))?;
        stats.attach_batch_errors(samples);
        Ok(stats)
    }

    /// Dwell-time-weighted statistics from the event record, with batch-mean
    /// errors from the sampled grid.
    pub fn from_trajectory(traj: &FieldTrajectory) -> Result<Self> {
        let mut stats = Self::from_distribution(&traj.photon_dwell)?;
        stats.attach_batch_errors(&traj.photons);
        Ok(stats)
    }

    /// Pools the dwell histograms of all trajectories. Errors come from the
    /// spread between trajectories when there are at least two of them.
    pub fn from_ensemble(trajs: &[FieldTrajectory]) -> Result<Self> {
        match trajs {
            [] => Err(Error::InvalidArgument("empty ensemble".into())),
            [single] => Self::from_trajectory(single),
            _ => {
                let len = trajs.iter().map(|t| t.photon_dwell.len()).max().unwrap_or(0);
                let mut pooled = vec![0.0; len];
                for t in trajs {
                    for (acc, w) in pooled.iter_mut().zip(&t.photon_dwell) {
                        *acc += w;
                    }
                }
                let mut stats = Self::from_distribution(&pooled)?;
                let per: Vec<Self> = trajs
                    .iter()
                    .map(|t| Self::from_distribution(&t.photon_dwell))
                    .collect::<Result<_>>()?;
                stats.mean_error = standard_error(per.iter().map(|s| s.mean));
                stats.g2_error = standard_error(per.iter().filter_map(|s| s.g2_zero));
                Ok(stats)
            }
        }
    }

    pub fn variance(&self) -> f64 {
        self.factorial_moment + self.mean - self.mean * self.mean
    }

    fn attach_batch_errors(&mut self, samples: &[u32]) {
        if samples.len() < BATCHES * 2 {
            return;
        }
        let size = samples.len() / BATCHES;
        let batches: Vec<(f64, Option<f64>)> = samples
            .chunks_exact(size)
            .take(BATCHES)
            .map(|chunk| {
                let (m, f) = moments(&normalized(&histogram(chunk)));
                (m, g2(m, f))
            })
            .collect();
        self.mean_error = standard_error(batches.iter().map(|b| b.0));
        self.g2_error = standard_error(batches.iter().filter_map(|b| b.1));
    }
}

/// Dwell-weighted photon statistics of one trajectory.
pub fn photon_statistics(traj: &FieldTrajectory) -> Result<PhotonStatistics> {
    if !(traj.window() > 0.0) {
        return Err(Error::InvalidArgument("empty record".into()));
    }
    PhotonStatistics::from_trajectory(traj)
}

fn histogram(samples: &[u32]) -> Vec<f64> {
    let max = samples.iter().copied().max().unwrap_or(0) as usize;
    let mut h = vec![0.0; max + 1];
    for &n in samples {
        h[n as usize] += 1.0;
    }
    h
}

fn normalized(h: &[f64]) -> Vec<f64> {
    let total: f64 = h.iter().sum();
    h.iter().map(|x| x / total).collect()
}

fn moments(p: &[f64]) -> (f64, f64) {
    p.iter().enumerate().fold((0.0, 0.0), |(m, f), (n, &w)| {
        let n = n as f64;
        (m + n * w, f + n * (n - 1.0) * w)
    })
}

fn g2(mean: f64, factorial: f64) -> Option<f64> {
    (mean > 0.0).then(|| factorial / (mean * mean))
}

fn standard_error(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    if v.len() < 2 {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Geometric, Poisson};
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn fock_state() {
        let s = PhotonStatistics::from_samples(&[5; 1000]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.g2_zero.unwrap() - 0.8).abs() < 1e-15);
        assert!((s.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_flags_g2() {
        let s = PhotonStatistics::from_samples(&[0; 100]).unwrap();
        assert_eq!(s.g2_zero, None);
        assert_eq!(s.mean, 0.0);
    }

    #[test]
    fn poisson_samples_have_unit_g2() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let dist = Poisson::new(7.5).unwrap();
        let samples: Vec<u32> = (0..200_000).map(|_| dist.sample(&mut rng) as u32).collect();
        let s = PhotonStatistics::from_samples(&samples).unwrap();
        let err = s.g2_error.unwrap();
        assert!((s.g2_zero.unwrap() - 1.0).abs() < 4.0 * err, "{s:?}");
        assert!(err < 0.01);
    }

    #[test]
    fn thermal_samples_have_g2_two() {
        // Bose-Einstein with mean m is geometric with success 1/(1+m) on
        // {0, 1, ...}; ⟨n(n−1)⟩ = 2m² so g2 = 2.
        let mean = 3.0;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
        let dist = Geometric::new(1.0 / (1.0 + mean)).unwrap();
        let samples: Vec<u32> = (0..400_000).map(|_| dist.sample(&mut rng) as u32).collect();
        let s = PhotonStatistics::from_samples(&samples).unwrap();
        let err = s.g2_error.unwrap();
        assert!((s.g2_zero.unwrap() - 2.0).abs() < 4.0 * err, "{s:?}");
        assert!((s.mean - mean).abs() < 4.0 * s.mean_error.unwrap());
    }

    #[test]
    fn distribution_input_is_normalized() {
        let s = PhotonStatistics::from_distribution(&[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.distribution, vec![0.25, 0.5, 0.25]);
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.factorial_moment, 0.5);
        assert_eq!(s.variance(), 0.5);
        assert!(PhotonStatistics::from_distribution(&[0.0, 0.0]).is_err());
        assert!(PhotonStatistics::from_distribution(&[1.0, -0.1]).is_err());
    }
}
