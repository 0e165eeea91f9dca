//! Streaming central moments to fourth order.
//!
//! Single-pass update and associative merge (Pébay's formulas), so worker
//! accumulators combine in fixed order to a bit-deterministic result. The
//! fourth moment feeds the standard error of the variance estimate.

/// Running count, mean, and centered power sums `M2`, `M3`, `M4`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CentralMoments {
    count: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl CentralMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    /// Folds `other` into `self`; merge order must be fixed for
    /// bit-determinism across runs.
    pub fn merge(&mut self, other: &CentralMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let delta2 = delta * delta;

        let m2 = self.m2 + other.m2 + delta2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * delta2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;

        self.mean += delta * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count > 1 {
            self.m2 / (self.count as f64 - 1.0)
        } else {
            0.0
        }
    }

    /// Fourth central sample moment `M4 / n`.
    pub fn fourth_central(&self) -> f64 {
        if self.count > 0 {
            self.m4 / self.count as f64
        } else {
            0.0
        }
    }

    /// `sqrt(variance / n)`.
    pub fn se_mean(&self) -> f64 {
        if self.count > 0 {
            (self.variance() / self.count as f64).sqrt()
        } else {
            0.0
        }
    }

    /// `sqrt((m4 - var²) / n)`, the asymptotic standard error of the sample
    /// variance; clamped at zero for degenerate (constant) samples.
    pub fn se_variance(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        let var = self.variance();
        ((self.fourth_central() - var * var).max(0.0) / self.count as f64).sqrt()
    }
}
