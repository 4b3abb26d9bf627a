//! Exactly rounded floating-point summation.
//!
//! Values are kept as a list of non-overlapping partials whose exact sum is
//! the true sum, so merging two accumulators in any order and reading the
//! result yields the same correctly rounded `f64`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        debug_assert!(x.is_finite(), "non-finite summand {x}");
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    pub fn partial_count(&self) -> usize {
        self.partials.len()
    }

    /// Correctly rounded value of the accumulated sum.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Correctly rounded sum of an iterator of floats.
pub fn fsum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<ExactSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_is_exact() {
        assert_eq!(fsum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(fsum([0.1; 10]), 1.0);
    }

    #[test]
    fn merge_order_does_not_matter() {
        let xs: Vec<f64> = (1..200).map(|i| 1.0 / i as f64).collect();
        let a: ExactSum = xs.iter().copied().collect();
        let mut b = ExactSum::new();
        let mut c = ExactSum::new();
        for (i, &x) in xs.iter().rev().enumerate() {
            if i % 2 == 0 {
                b.add(x)
            } else {
                c.add(x)
            }
        }
        c.merge(&b);
        assert_eq!(a.value(), c.value());
    }
}
