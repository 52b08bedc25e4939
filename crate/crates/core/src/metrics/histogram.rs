use serde::Serialize;

use super::{CurvatureField, MetricsError};

pub const DEFAULT_BINS: usize = 64;

/// A peak must reach this fraction of the tallest bin to count as a mode.
const MODE_MIN_FRACTION: f64 = 0.10;
/// Adjacent peaks merge unless the valley between them drops below this
/// fraction of the smaller peak.
const VALLEY_FRACTION: f64 = 0.50;
/// Peaks whose centres differ by less than this relative amount merge.
const MODE_RELATIVE_SEPARATION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub bin: usize,
    pub centre: f64,
    pub count: u64,
}

/// Uniform-width histogram over the sample range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `counts.len() + 1` strictly increasing bin edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub stats: SummaryStats,
}

pub fn curvature_histogram(field: &CurvatureField, bins: usize) -> Result<Histogram, MetricsError> {
    // Vertices no triangle touches carry no curvature information.
    let samples: Vec<f64> = field
        .mean
        .iter()
        .zip(&field.mixed_area)
        .filter(|(_, &a)| a > 0.0)
        .map(|(&h, _)| h)
        .collect();
    histogram(&samples, bins)
}

/// Bins finite samples over [min, max]. A constant sample set is binned over
/// [v − 0.5, v + 0.5].
pub fn histogram(samples: &[f64], bins: usize) -> Result<Histogram, MetricsError> {
    if bins == 0 {
        return Err(MetricsError::ZeroBins);
    }
    let mut sorted: Vec<f64> = samples.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Err(MetricsError::EmptyField);
    }
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let (min, max) = (sorted[0], sorted[n - 1]);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let mean = sorted.iter().sum::<f64>() / n as f64;

    let (lo, hi) = if max - min > f64::EPSILON * min.abs().max(max.abs()) * bins as f64 {
        (min, max)
    } else {
        (min - 0.5, max + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
    edges.push(hi);
    let mut counts = vec![0u64; bins];
    for &v in &sorted {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram {
        edges,
        counts,
        stats: SummaryStats {
            count: n,
            min,
            max,
            mean,
            median,
        },
    })
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_centre(&self, k: usize) -> f64 {
        (self.edges[k] + self.edges[k + 1]) / 2.0
    }

    /// Index of the fullest bin (first on ties).
    pub fn dominant_bin(&self) -> usize {
        let top = *self.counts.iter().max().unwrap_or(&0);
        self.counts.iter().position(|&c| c == top).unwrap_or(0)
    }

    /// Significant peaks, left to right, after merging shallow or close
    /// neighbours.
    pub fn modes(&self) -> Vec<Mode> {
        let counts = &self.counts;
        let top = *counts.iter().max().unwrap_or(&0);
        if top == 0 {
            return Vec::new();
        }
        let floor = MODE_MIN_FRACTION * top as f64;
        let mut peaks: Vec<usize> = Vec::new();
        let mut k = 0;
        while k < counts.len() {
            // a plateau counts once, at its left end
            let mut end = k;
            while end + 1 < counts.len() && counts[end + 1] == counts[k] {
                end += 1;
            }
            let left_lower = k == 0 || counts[k - 1] < counts[k];
            let right_lower = end + 1 == counts.len() || counts[end + 1] < counts[k];
            if left_lower && right_lower && counts[k] as f64 >= floor {
                peaks.push(k);
            }
            k = end + 1;
        }

        let mut merged: Vec<usize> = Vec::new();
        for p in peaks {
            if let Some(&q) = merged.last() {
                let smaller = counts[p].min(counts[q]) as f64;
                let valley = *counts[q..=p].iter().min().unwrap() as f64;
                let (cp, cq) = (self.bin_centre(p), self.bin_centre(q));
                let close = (cp - cq).abs() <= MODE_RELATIVE_SEPARATION * cp.abs().max(cq.abs());
                if valley > VALLEY_FRACTION * smaller || close {
                    if counts[p] > counts[q] {
                        *merged.last_mut().unwrap() = p;
                    }
                    continue;
                }
            }
            merged.push(p);
        }
        merged
            .into_iter()
            .map(|bin| Mode {
                bin,
                centre: self.bin_centre(bin),
                count: counts[bin],
            })
            .collect()
    }

    pub fn is_bimodal(&self) -> bool {
        self.modes().len() >= 2
    }

    /// `bin_low,bin_high,count` rows under a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[k], self.edges[k + 1], c));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mean_curvature;
    use crate::primitives::{gen_benchmark, gen_primitive, BenchmarkSpec, PrimitiveSpec};

    #[test]
    fn counts_sum_and_edges_increase() {
        let samples: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.13 - 4.0).collect();
        let h = histogram(&samples, 17).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 1000);
        assert_eq!(h.edges.len(), 18);
        assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(h.edges[0], h.stats.min);
        assert_eq!(h.edges[17], h.stats.max);
    }

    #[test]
    fn constant_field_single_bin() {
        let h = histogram(&[0.25; 40], 8).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.stats.median, 0.25);
        assert_eq!(h.modes().len(), 1);
    }

    #[test]
    fn summary_stats() {
        let h = histogram(&[4.0, 1.0, 3.0, 2.0], 2).unwrap();
        assert_eq!(h.stats.mean, 2.5);
        assert_eq!(h.stats.median, 2.5);
        assert_eq!(h.counts, vec![2, 2]);
    }

    #[test]
    fn errors() {
        assert_eq!(histogram(&[1.0], 0), Err(MetricsError::ZeroBins));
        assert_eq!(histogram(&[], 4), Err(MetricsError::EmptyField));
        assert_eq!(histogram(&[f64::NAN], 4), Err(MetricsError::EmptyField));
    }

    #[test]
    fn two_separated_clusters_are_bimodal() {
        let mut s = vec![1.0; 50];
        s.extend(vec![3.0; 30]);
        s.push(0.0);
        s.push(4.0);
        let h = histogram(&s, 16).unwrap();
        assert!(h.is_bimodal());
        let unimodal = histogram(&[1.0, 1.1, 1.2, 1.1, 1.0], 4).unwrap();
        assert!(!unimodal.is_bimodal());
    }

    #[test]
    fn sphere_is_unimodal_near_inverse_radius() {
        let g = gen_primitive(&PrimitiveSpec::icosphere(30.0, 4)).unwrap();
        let h = curvature_histogram(&mean_curvature(&g.mesh).unwrap(), DEFAULT_BINS).unwrap();
        let modes = h.modes();
        assert_eq!(modes.len(), 1, "{modes:?}");
        assert!((modes[0].centre - 1.0 / 15.0).abs() < 0.02 / 15.0);
    }

    #[test]
    fn two_domes_are_bimodal() {
        let g = gen_benchmark(&BenchmarkSpec::b3()).unwrap();
        let h = curvature_histogram(&mean_curvature(&g.mesh).unwrap(), DEFAULT_BINS).unwrap();
        let modes = h.modes();
        assert_eq!(modes.len(), 2, "{modes:?}");
        // peaks sit at the inverse radii of the two domes
        assert!((modes[0].centre - 1.0 / 15.0).abs() < 0.01, "{modes:?}");
        assert!((modes[1].centre - 1.0 / 6.0).abs() < 0.01, "{modes:?}");
    }

    #[test]
    fn csv_layout() {
        let csv = histogram(&[0.0, 1.0], 2).unwrap().to_csv();
        assert_eq!(csv, "bin_low,bin_high,count\n0,0.5,1\n0.5,1,1\n");
    }
}
