use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lookup::MessagePlan;

/// Per-message latency in virtual milliseconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LatencyModel {
    Fixed(f64),
    UniformRange { lo: f64, hi: f64 },
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel::UniformRange { lo: 10.0, hi: 100.0 }
    }
}

impl LatencyModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LatencyModel::Fixed(ms) => ms >= 0.0 && ms.is_finite(),
            LatencyModel::UniformRange { lo, hi } => lo >= 0.0 && lo <= hi && hi.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid latency model `{self}`")))
        }
    }

    pub fn lo(&self) -> f64 {
        match *self {
            LatencyModel::Fixed(ms) => ms,
            LatencyModel::UniformRange { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            LatencyModel::Fixed(ms) => ms,
            LatencyModel::UniformRange { hi, .. } => hi,
        }
    }
}

impl fmt::Display for LatencyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatencyModel::Fixed(ms) => write!(f, "fixed:{ms}"),
            LatencyModel::UniformRange { lo, hi } => write!(f, "uniform:{lo},{hi}"),
        }
    }
}

/// Parses `fixed:<ms>` or `uniform:<lo>,<hi>`.
impl FromStr for LatencyModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("latency `{s}` is not fixed:<ms> or uniform:<lo>,<hi>"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let model = match s.split_once(':') {
            Some(("fixed", ms)) => LatencyModel::Fixed(num(ms)?),
            Some(("uniform", range)) => {
                let (lo, hi) = range.split_once(',').ok_or_else(bad)?;
                LatencyModel::UniformRange { lo: num(lo)?, hi: num(hi)? }
            }
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

impl serde::Serialize for LatencyModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for LatencyModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Seeded stream of latency samples.
#[derive(Clone, Debug)]
pub struct LatencySampler {
    model: LatencyModel,
    rng: ChaCha8Rng,
}

impl LatencySampler {
    pub fn new(model: LatencyModel, seed: u64) -> Self {
        Self { model, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sample_latency(&mut self) -> f64 {
        match self.model {
            LatencyModel::Fixed(ms) => ms,
            LatencyModel::UniformRange { lo, hi } if lo == hi => lo,
            LatencyModel::UniformRange { lo, hi } => self.rng.random_range(lo..=hi),
        }
    }

    fn serial(&mut self, messages: u32) -> f64 {
        (0..messages).map(|_| self.sample_latency()).sum()
    }

    /// Serial prefix, slowest parallel branch, serial suffix.
    pub fn elapsed(&mut self, plan: &MessagePlan) -> f64 {
        let prefix = self.serial(plan.prefix);
        let slowest = plan.branches.iter().map(|&b| self.serial(b)).fold(0.0, f64::max);
        prefix + slowest + self.serial(plan.suffix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_is_constant() {
        let mut s = LatencySampler::new(LatencyModel::Fixed(50.0), 1);
        assert!((0..100).all(|_| s.sample_latency() == 50.0));
        let mut s = LatencySampler::new(LatencyModel::UniformRange { lo: 7.0, hi: 7.0 }, 1);
        assert!((0..100).all(|_| s.sample_latency() == 7.0));
    }

    #[test]
    fn uniform_mean() {
        let mut s = LatencySampler::new(LatencyModel::default(), 42);
        let samples: Vec<f64> = (0..10_000).map(|_| s.sample_latency()).collect();
        assert!(samples.iter().all(|&v| (10.0..=100.0).contains(&v)));
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        assert!((52.0..=58.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn plan_timing_takes_slowest_branch() {
        let mut s = LatencySampler::new(LatencyModel::Fixed(10.0), 0);
        let plan = MessagePlan { prefix: 1, branches: vec![4, 2, 2], suffix: 1 };
        assert_eq!(s.elapsed(&plan), 60.0);
        assert_eq!(s.elapsed(&MessagePlan::serial(3, 1)), 40.0);
        assert_eq!(s.elapsed(&MessagePlan::default()), 0.0);
    }

    #[test]
    fn parse_round_trip() {
        for text in ["fixed:50", "uniform:10,100", "uniform:2.5,2.5"] {
            let m: LatencyModel = text.parse().unwrap();
            assert_eq!(m.to_string(), text);
        }
        for bad in ["fixed", "fixed:x", "uniform:5", "uniform:9,3", "gauss:1,2", "fixed:-1"] {
            assert!(bad.parse::<LatencyModel>().is_err(), "{bad}");
        }
    }
}
