//! Seeded synthetic samples: Gaussians, axis-aligned Gaussian mixtures, a
//! noisy ring with optional blobs, and a two-Gaussian mixture with a point
//! mass at the origin.

use std::f64::consts::TAU;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Result};

/// Axis-aligned Gaussian component with a mixing weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Per-axis standard deviations.
    pub sd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Gaussian {
        mean: Vec<f64>,
        sd: Vec<f64>,
    },
    Mixture {
        components: Vec<Component>,
    },
    /// Planar ring around `center` with Gaussian radial noise, plus blobs.
    /// `weight` is the ring's share; ring and blob weights sum to one.
    Ring {
        center: [f64; 2],
        radius: f64,
        noise: f64,
        weight: f64,
        #[serde(default)]
        blobs: Vec<Component>,
    },
    /// `1/3 N(-mu, sigma) + 1/3 delta_0 + 1/3 N(mu, sigma)` on the line.
    SingularMixture {
        mu: f64,
        sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub family: Family,
}

fn check_component(c: &Component, d: usize) -> Result<()> {
    if c.mean.len() != d || c.sd.len() != d {
        return Err(invalid("component", format!("mean and sd must both have length {d}")));
    }
    if !(c.weight >= 0.0 && c.weight.is_finite()) {
        return Err(invalid("weight", format!("{} must be non-negative", c.weight)));
    }
    if c.sd.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(invalid("sd", "standard deviations must be positive"));
    }
    if c.mean.iter().any(|m| !m.is_finite()) {
        return Err(invalid("mean", "means must be finite"));
    }
    Ok(())
}

fn check_weights(total: f64) -> Result<()> {
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid("weights", format!("sum to {total}, expected 1")));
    }
    Ok(())
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        match &self.family {
            Family::Gaussian { mean, sd } => check_component(
                &Component {
                    weight: 1.0,
                    mean: mean.clone(),
                    sd: sd.clone(),
                },
                mean.len().max(1),
            ),
            Family::Mixture { components } => {
                let first = components
                    .first()
                    .ok_or_else(|| invalid("components", "need at least one component"))?;
                for c in components {
                    check_component(c, first.mean.len().max(1))?;
                }
                check_weights(components.iter().map(|c| c.weight).sum())
            }
            Family::Ring {
                radius,
                noise,
                weight,
                blobs,
                center,
            } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(invalid("radius", "must be positive"));
                }
                if !(*noise >= 0.0 && noise.is_finite()) {
                    return Err(invalid("noise", "must be non-negative"));
                }
                if !(*weight >= 0.0) || center.iter().any(|c| !c.is_finite()) {
                    return Err(invalid("ring", "weight and center must be valid"));
                }
                for b in blobs {
                    check_component(b, 2)?;
                }
                check_weights(weight + blobs.iter().map(|b| b.weight).sum::<f64>())
            }
            Family::SingularMixture { mu, sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
                    return Err(invalid("sigma", "must be positive with finite mu"));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match &self.family {
            Family::Gaussian { mean, .. } => mean.len(),
            Family::Mixture { components } => components[0].mean.len(),
            Family::Ring { .. } => 2,
            Family::SingularMixture { .. } => 1,
        }
    }
}

fn pick(rng: &mut impl Rng, weights: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn push_gaussian(rng: &mut impl Rng, mean: &[f64], sd: &[f64], out: &mut Vec<f64>) {
    for (m, s) in mean.iter().zip(sd) {
        let z: f64 = rng.sample(StandardNormal);
        out.push(m + s * z);
    }
}

/// Draws `spec.n` points. Each point picks its component by weight, then
/// samples from it.
pub fn generate(spec: &GeneratorSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.dim();
    let mut values = Vec::with_capacity(spec.n * d);
    for _ in 0..spec.n {
        match &spec.family {
            Family::Gaussian { mean, sd } => push_gaussian(&mut rng, mean, sd, &mut values),
            Family::Mixture { components } => {
                let c = &components[pick(&mut rng, components.iter().map(|c| c.weight))];
                push_gaussian(&mut rng, &c.mean, &c.sd, &mut values);
            }
            Family::Ring {
                center,
                radius,
                noise,
                weight,
                blobs,
            } => {
                let i = pick(
                    &mut rng,
                    std::iter::once(*weight).chain(blobs.iter().map(|b| b.weight)),
                );
                if i == 0 {
                    let theta = rng.random::<f64>() * TAU;
                    let z: f64 = rng.sample(StandardNormal);
                    let r = radius + noise * z;
                    values.push(center[0] + r * theta.cos());
                    values.push(center[1] + r * theta.sin());
                } else {
                    let b = &blobs[i - 1];
                    push_gaussian(&mut rng, &b.mean, &b.sd, &mut values);
                }
            }
            Family::SingularMixture { mu, sigma } => {
                match pick(&mut rng, [1.0 / 3.0; 3].into_iter()) {
                    0 => push_gaussian(&mut rng, &[-mu], &[*sigma], &mut values),
                    1 => values.push(0.0),
                    _ => push_gaussian(&mut rng, &[*mu], &[*sigma], &mut values),
                }
            }
        }
    }
    DataMatrix::new(values, d)
}

/// Ready-made specs for the standard examples.
pub mod presets {
    use super::*;

    pub fn standard_normal(n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            n,
            seed,
            family: Family::Gaussian {
                mean: vec![0.0],
                sd: vec![1.0],
            },
        }
    }

    fn equal_mixture_1d(means: &[f64], n: usize, seed: u64) -> GeneratorSpec {
        let w = 1.0 / means.len() as f64;
        GeneratorSpec {
            n,
            seed,
            family: Family::Mixture {
                components: means
                    .iter()
                    .map(|&m| Component {
                        weight: w,
                        mean: vec![m],
                        sd: vec![1.0],
                    })
                    .collect(),
            },
        }
    }

    /// Unit-variance components at -5 and 5.
    pub fn two_gaussians_1d(n: usize, seed: u64) -> GeneratorSpec {
        equal_mixture_1d(&[-5.0, 5.0], n, seed)
    }

    /// Unit-variance components at -6, 0 and 6.
    pub fn three_gaussians_1d(n: usize, seed: u64) -> GeneratorSpec {
        equal_mixture_1d(&[-6.0, 0.0, 6.0], n, seed)
    }

    /// Ten dimensions: `N(-5, I)` and `N(5, diag(1,1,1,1,1,.01,.01,.01,.01,.01))`.
    pub fn two_gaussians_10d(n: usize, seed: u64) -> GeneratorSpec {
        let mut sd2 = vec![1.0; 5];
        sd2.extend([0.1; 5]);
        GeneratorSpec {
            n,
            seed,
            family: Family::Mixture {
                components: vec![
                    Component {
                        weight: 0.5,
                        mean: vec![-5.0; 10],
                        sd: vec![1.0; 10],
                    },
                    Component {
                        weight: 0.5,
                        mean: vec![5.0; 10],
                        sd: sd2,
                    },
                ],
            },
        }
    }

    /// Three round blobs outside a noisy ring of radius 6 at the origin.
    pub fn ring_with_blobs(n: usize, seed: u64) -> GeneratorSpec {
        let blob = |x: f64, y: f64| Component {
            weight: 0.2,
            mean: vec![x, y],
            sd: vec![0.5, 0.5],
        };
        GeneratorSpec {
            n,
            seed,
            family: Family::Ring {
                center: [0.0, 0.0],
                radius: 6.0,
                noise: 0.3,
                weight: 0.4,
                blobs: vec![blob(12.0, 0.0), blob(-6.0, 10.5), blob(-6.0, -10.5)],
            },
        }
    }

    pub fn singular_mixture(mu: f64, sigma: f64, n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            n,
            seed,
            family: Family::SingularMixture { mu, sigma },
        }
    }
}
