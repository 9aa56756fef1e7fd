use serde::{Deserialize, Serialize};

/// A dense 3×3 matrix indexed in level order (high, middle, low).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn filled(v: f64) -> Mat3 {
        Mat3([[v; 3]; 3])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.0[row][col] = v;
    }

    pub fn transpose(&self) -> Mat3 {
        let mut out = Mat3::ZERO;
        for r in 0..3 {
            for c in 0..3 {
                out.0[c][r] = self.0[r][c];
            }
        }
        out
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Mat3 {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v = f(*v));
        out
    }

    pub fn zip_with(&self, other: &Mat3, mut f: impl FnMut(f64, f64) -> f64) -> Mat3 {
        let mut out = Mat3::ZERO;
        for r in 0..3 {
            for c in 0..3 {
                out.0[r][c] = f(self.0[r][c], other.0[r][c]);
            }
        }
        out
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().flatten().copied()
    }

    /// Cells in row-major order.
    pub fn cells() -> impl Iterator<Item = (usize, usize)> {
        (0..3).flat_map(|r| (0..3).map(move |c| (r, c)))
    }

    pub fn min_positive(&self) -> Option<f64> {
        self.values().filter(|v| *v > 0.0).reduce(f64::min)
    }

    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        self.values()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn rounded(&self, decimals: u32) -> Mat3 {
        let scale = 10f64.powi(decimals as i32);
        self.map(|v| (v * scale).round() / scale)
    }
}

impl std::ops::Index<(usize, usize)> for Mat3 {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.0[r][c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.0[r][c]
    }
}
