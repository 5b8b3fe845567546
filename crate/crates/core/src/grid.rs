//! Uniform periodic angular grid on `[-pi, pi)` and the sampled objects living on it.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum rise over both neighbours for a grid point to count as a local maximum.
pub const PEAK_MIN_RISE: f64 = 1e-9;

/// `K` points `phi_k = -pi + 2 pi k / K`, branch cut at `-pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AngularGrid {
    k: usize,
}

impl AngularGrid {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Aliasing { k, span: 0 });
        }
        Ok(Self { k })
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.k as f64
    }

    pub fn angle(&self, idx: usize) -> f64 {
        -PI + self.step() * idx as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.k).map(|i| self.angle(i))
    }

    /// Index of the grid point closest to `phi` (taken mod 2 pi).
    pub fn nearest(&self, phi: f64) -> usize {
        let x = (phi + PI) / self.step();
        (x.round() as i64).rem_euclid(self.k as i64) as usize
    }

    /// Index of `phi` if it falls on the grid (within 1e-9 of a step).
    pub fn index_of(&self, phi: f64) -> Option<usize> {
        let x = (phi + PI) / self.step();
        ((x - x.round()).abs() < 1e-9).then(|| (x.round() as i64).rem_euclid(self.k as i64) as usize)
    }

    /// Index of `-phi_idx`.
    pub fn mirror(&self, idx: usize) -> usize {
        (self.k - idx) % self.k
    }

    /// Riemann sum `(2 pi / K) sum f_k`, exact for trigonometric polynomials of degree `< K`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.step()
    }

    /// Samples `sum_m c_m exp(-i m phi)` where each term's frequency is given doubled,
    /// so half-integer `m` are allowed.
    pub fn eval_series(&self, terms: impl IntoIterator<Item = (i32, C64)>) -> Result<Vec<C64>> {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for (two_m, c) in terms {
            if two_m.rem_euclid(2) == 0 {
                even.push((two_m / 2, c));
            } else {
                odd.push(((two_m - 1) / 2, c));
            }
        }
        let mut out = self.eval_integer_series(&even)?;
        if !odd.is_empty() {
            let half = self.eval_integer_series(&odd)?;
            for (i, (o, h)) in out.iter_mut().zip(half).enumerate() {
                *o += h * C64::from_polar(1.0, -0.5 * self.angle(i));
            }
        }
        Ok(out)
    }

    fn eval_integer_series(&self, terms: &[(i32, C64)]) -> Result<Vec<C64>> {
        let mut buf = vec![C64::default(); self.k];
        if terms.is_empty() {
            return Ok(buf);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let span = (hi - lo) as usize;
        if span >= self.k {
            return Err(Error::Aliasing { k: self.k, span });
        }
        for &(m, c) in terms {
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[m.rem_euclid(self.k as i32) as usize] += c * sign;
        }
        FftPlanner::new().plan_fft_forward(self.k).process(&mut buf);
        Ok(buf)
    }
}

/// Complex wavefunction sampled on an angular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseWavefunction {
    pub grid: AngularGrid,
    pub values: Vec<C64>,
}

impl PhaseWavefunction {
    /// `(1/2 pi) int |psi|^2 dphi`
    pub fn norm_sqr(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        self.grid.integrate(&sq) / (2.0 * PI)
    }

    /// `|psi|^2 / 2 pi`; not renormalized.
    pub fn density(&self) -> AngularPdf {
        AngularPdf { grid: self.grid, values: self.values.iter().map(|v| v.norm_sqr() / (2.0 * PI)).collect() }
    }
}

/// Probability density per radian sampled on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularPdf {
    pub grid: AngularGrid,
    pub values: Vec<f64>,
}

impl AngularPdf {
    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn at(&self, phi: f64) -> f64 {
        self.values[self.grid.nearest(phi)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
            .0
    }

    /// Grid indices that exceed both periodic neighbours by at least [`PEAK_MIN_RISE`].
    pub fn local_maxima(&self) -> Vec<usize> {
        let k = self.values.len();
        if k < 3 {
            return Vec::new();
        }
        (0..k)
            .filter(|&i| {
                let v = self.values[i];
                v - self.values[(i + k - 1) % k] >= PEAK_MIN_RISE && v - self.values[(i + 1) % k] >= PEAK_MIN_RISE
            })
            .collect()
    }

    /// Shift so that `out(phi) = self(phi + shift * step)`.
    pub fn rotated(&self, shift: i64) -> AngularPdf {
        let k = self.values.len() as i64;
        let values = (0..k).map(|i| self.values[(i + shift).rem_euclid(k) as usize]).collect();
        AngularPdf { grid: self.grid, values }
    }

    pub fn max_abs_diff(&self, other: &AngularPdf) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(grid: &AngularGrid, terms: &[(i32, C64)]) -> Vec<C64> {
        grid.angles()
            .map(|phi| terms.iter().map(|&(tm, c)| c * C64::from_polar(1.0, -(tm as f64) * phi / 2.0)).sum())
            .collect()
    }

    #[test]
    fn series_matches_direct_sum() {
        let g = AngularGrid::new(16).unwrap();
        let terms =
            [(-6, C64::new(0.3, -0.1)), (0, C64::new(1.0, 0.0)), (4, C64::new(0.0, 0.5)), (14, C64::new(-0.2, 0.2))];
        let fast = g.eval_series(terms).unwrap();
        for (a, b) in fast.iter().zip(direct(&g, &terms)) {
            assert!((a - b).norm() < 1e-12);
        }
        let half = [(-3, C64::new(0.3, 0.0)), (1, C64::new(0.0, 1.0)), (2, C64::new(0.5, 0.5))];
        for (a, b) in g.eval_series(half).unwrap().iter().zip(direct(&g, &half)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn series_aliasing_rejected() {
        let g = AngularGrid::new(4).unwrap();
        assert!(matches!(
            g.eval_series([(0, C64::new(1.0, 0.0)), (8, C64::new(1.0, 0.0))]),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn grid_indexing() {
        let g = AngularGrid::new(8).unwrap();
        assert_eq!(g.index_of(-PI), Some(0));
        assert_eq!(g.index_of(PI), Some(0));
        assert_eq!(g.index_of(0.0), Some(4));
        assert_eq!(g.index_of(0.1), None);
        assert_eq!(g.mirror(1), 7);
        assert_eq!(g.mirror(0), 0);
    }

    #[test]
    fn peaks_are_periodic() {
        let g = AngularGrid::new(6).unwrap();
        let pdf = AngularPdf { grid: g, values: vec![3.0, 1.0, 0.5, 2.0, 0.5, 1.0] };
        assert_eq!(pdf.local_maxima(), vec![0, 3]);
    }
}
