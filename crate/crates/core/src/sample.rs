//! Deterministic sampling of chart points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;

/// A reproducible sampling plan: seeded uniform points in the chart box,
/// shrunk by a relative margin so finite-difference stencils and short
/// flows stay inside the domain.
#[derive(Clone, Debug)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
    pub margin: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            count: 200,
            seed: 7,
            margin: 0.02,
        }
    }
}

impl SamplePlan {
    pub fn new(count: usize, seed: u64) -> SamplePlan {
        SamplePlan {
            count,
            seed,
            margin: 0.02,
        }
    }

    pub fn points(&self, chart: &Chart) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dim = chart.dim();
        (0..self.count)
            .map(|_| {
                (0..dim)
                    .map(|i| {
                        let u: f64 = rng.gen_range(0.0..1.0);
                        let lo = chart.lower[i];
                        let hi = chart.upper[i];
                        lo + (hi - lo) * (self.margin + (1.0 - 2.0 * self.margin) * u)
                    })
                    .collect()
            })
            .collect()
    }

    /// Deterministic rectangular grid with `total` points spread across the
    /// chart box (used by commutation comparisons).
    pub fn grid(chart: &Chart, total: usize) -> Vec<Vec<f64>> {
        let dim = chart.dim();
        let per_axis = (total as f64).powf(1.0 / dim as f64).ceil() as usize;
        let per_axis = per_axis.max(2);
        let mut pts = Vec::new();
        let mut idx = vec![0usize; dim];
        loop {
            let p: Vec<f64> = (0..dim)
                .map(|i| {
                    let f = (idx[i] as f64 + 0.5) / per_axis as f64;
                    chart.lower[i] + (chart.upper[i] - chart.lower[i]) * f
                })
                .collect();
            pts.push(p);
            if pts.len() >= total {
                return pts;
            }
            let mut i = 0;
            loop {
                idx[i] += 1;
                if idx[i] < per_axis {
                    break;
                }
                idx[i] = 0;
                i += 1;
                if i == dim {
                    return pts;
                }
            }
        }
    }
}
