use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

/// One-way delay model shared by both directions of every agent link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommLink {
    /// seconds
    pub latency: f64,
    /// Mean of an exponential extra delay; 0 disables jitter.
    pub jitter: f64,
}

impl Default for CommLink {
    fn default() -> Self {
        CommLink {
            latency: 0.1,
            jitter: 0.0,
        }
    }
}

impl CommLink {
    pub fn ideal() -> Self {
        CommLink {
            latency: 0.0,
            jitter: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.latency >= 0.0 && self.latency.is_finite()) {
            return Err(format!("latency must be >= 0, got {}", self.latency));
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return Err(format!("jitter must be >= 0, got {}", self.jitter));
        }
        Ok(())
    }

    pub fn sample_delay<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.jitter > 0.0 {
            let exp = Exp::new(1.0 / self.jitter).expect("positive rate");
            self.latency + exp.sample(rng)
        } else {
            self.latency
        }
    }
}

/// Delivery clock of one directed link; keeps messages in send order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct FifoChannel {
    last_delivery: f64,
}

impl FifoChannel {
    pub fn deliver_at(&mut self, now: f64, delay: f64) -> f64 {
        let t = (now + delay).max(self.last_delivery);
        self.last_delivery = t;
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jitter_never_reorders() {
        let link = CommLink {
            latency: 0.1,
            jitter: 0.5,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ch = FifoChannel::default();
        let mut last = 0.0;
        for k in 0..200 {
            let t = ch.deliver_at(k as f64 * 0.05, link.sample_delay(&mut rng));
            assert!(t >= last && t >= k as f64 * 0.05 + 0.1);
            last = t;
        }
    }

    #[test]
    fn no_jitter_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(CommLink::default().sample_delay(&mut rng), 0.1);
    }
}
