// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Linear models for internal and leaf nodes.

/// Least-squares line from key to rank, anchored at the first key so the
/// regression works on small offsets instead of raw 64-bit codes.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeafModel {
    pub anchor: u64,
    pub slope: f64,
    pub intercept: f64,
}

impl LeafModel {
    /// Fits rank `i` against `keys[i]`. Sorted input expected. All-equal keys
    /// give slope 0 and the middle rank.
    pub fn fit(keys: &[u64]) -> Self {
        let n = keys.len();
        if n == 0 {
            return Self::default();
        }
        let anchor = keys[0];
        let nf = n as f64;
        let xs = keys.iter().map(|&k| (k - anchor) as f64);
        let mean_x = xs.clone().sum::<f64>() / nf;
        let mean_y = (nf - 1.0) / 2.0;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (i, x) in xs.enumerate() {
            let dx = x - mean_x;
            sxy += dx * (i as f64 - mean_y);
            sxx += dx * dx;
        }
        if sxx == 0.0 {
            return Self {
                anchor,
                slope: 0.0,
                intercept: mean_y,
            };
        }
        let slope = sxy / sxx;
        Self {
            anchor,
            slope,
            intercept: mean_y - slope * mean_x,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            anchor: self.anchor,
            slope: self.slope * factor,
            intercept: self.intercept * factor,
        }
    }

    #[inline]
    pub fn predict(&self, key: u64) -> f64 {
        let dx = key as i128 - self.anchor as i128;
        self.slope * dx as f64 + self.intercept
    }

    /// Prediction rounded and clamped to `[0, len)`.
    #[inline]
    pub fn predict_slot(&self, key: u64, len: usize) -> usize {
        let p = self.predict(key).round();
        if p.is_nan() || p <= 0.0 {
            0
        } else {
            (p as usize).min(len.saturating_sub(1))
        }
    }

    /// Largest |predicted rank - rank| over sorted keys.
    pub fn max_error(&self, keys: &[u64]) -> f64 {
        keys.iter()
            .enumerate()
            .map(|(i, &k)| (self.predict(k) - i as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Internal-node model: the linear map `slot = (key - base) / width`,
/// evaluated in integer arithmetic so every prediction is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Router {
    pub base: u64,
    pub width: u128,
    pub fanout: usize,
}

impl Router {
    /// Splits the inclusive key range `[lo, hi]` into at most `fanout`
    /// equal-width partitions.
    pub fn over(lo: u64, hi: u64, fanout: usize) -> Self {
        debug_assert!(lo <= hi && fanout >= 2);
        let span = (hi - lo) as u128 + 1;
        let width = span.div_ceil(fanout as u128).max(1);
        let fanout = span.div_ceil(width) as usize;
        Self {
            base: lo,
            width,
            fanout,
        }
    }

    /// Child slot of `key`, clamped to the array.
    #[inline]
    pub fn predict(&self, key: u64) -> usize {
        if key <= self.base {
            return 0;
        }
        let slot = (key - self.base) as u128 / self.width;
        (slot as usize).min(self.fanout - 1)
    }

    /// Inclusive key range of slot `i`.
    pub fn slot_range(&self, i: usize) -> (u64, u64) {
        let lo = self.base as u128 + i as u128 * self.width;
        let hi = lo + self.width - 1;
        (lo.min(u64::MAX as u128) as u64, hi.min(u64::MAX as u128) as u64)
    }

    pub fn slope(&self) -> f64 {
        1.0 / self.width as f64
    }

    pub fn intercept(&self) -> f64 {
        -(self.base as f64) / self.width as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_exact_line() {
        let keys: Vec<u64> = (0..100).map(|i| 1_000_000_000_000 + i * 7).collect();
        let m = LeafModel::fit(&keys);
        assert!(m.max_error(&keys) < 1e-6);
    }

    #[test]
    fn fit_all_equal_keys() {
        let m = LeafModel::fit(&[42, 42, 42, 42, 42]);
        assert_eq!(m.slope, 0.0);
        assert_eq!(m.intercept, 2.0);
    }

    #[test]
    fn router_partitions_exactly() {
        let r = Router::over(100, 163, 64);
        assert_eq!(r.width, 1);
        assert_eq!(r.predict(100), 0);
        assert_eq!(r.predict(163), 63);
        let r = Router::over(0, 999, 64);
        assert_eq!(r.width, 16);
        assert_eq!(r.fanout, 63);
        for k in 0..1000u64 {
            let s = r.predict(k);
            let (lo, hi) = r.slot_range(s);
            assert!(lo <= k && k <= hi);
        }
        assert_eq!(r.predict(5000), r.fanout - 1);
        let full = Router::over(0, u64::MAX, 64);
        assert_eq!(full.predict(u64::MAX), 63);
        assert_eq!(full.slot_range(63).1, u64::MAX);
    }
}
