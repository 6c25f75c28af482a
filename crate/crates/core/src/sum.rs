//! Compensated (Neumaier) accumulation for real and complex sums.
//!
//! Every series and quadrature reduction in the crate goes through these
//! accumulators, always in a fixed order, so results are bit-reproducible.

use num_complex::Complex64;
use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Componentwise compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, z: Complex64) {
        self.add(z);
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Sum a slice in index order with compensation.
pub fn csum(values: &[Complex64]) -> Complex64 {
    values.iter().copied().collect::<ComplexSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let mut naive = 0.0;
        let mut acc = KahanSum::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            naive += x;
            acc.add(x);
        }
        assert_eq!(naive, 0.0);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn complex_sum_is_componentwise() {
        let z: ComplexSum = [Complex64::new(1.0, 1e-20), Complex64::new(1e20, 1.0), Complex64::new(-1e20, 0.0)]
            .into_iter()
            .collect();
        assert_eq!(z.value(), Complex64::new(1.0, 1.0));
    }
}
