//! Compensated summation and small statistics helpers shared by the engines.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Component-wise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

const LANES: usize = 8;

/// Compensated sum of a slice using eight interleaved accumulators (four per
/// component), merged in a fixed order at the end. Each lane uses the
/// branch-free TwoSum error term, so the loop vectorizes; accuracy is the same
/// class as [`ComplexSum`].
pub(crate) fn lane_sum(data: &[Complex64]) -> ComplexSum {
    let mut sum = [0.0f64; LANES];
    let mut comp = [0.0f64; LANES];
    let chunks = data.chunks_exact(LANES / 2);
    let tail = chunks.remainder();
    for chunk in chunks {
        let mut x = [0.0f64; LANES];
        for (k, a) in chunk.iter().enumerate() {
            x[2 * k] = a.re;
            x[2 * k + 1] = a.im;
        }
        for l in 0..LANES {
            let t = sum[l] + x[l];
            let z = t - sum[l];
            comp[l] += (sum[l] - (t - z)) + (x[l] - z);
            sum[l] = t;
        }
    }
    let mut acc = ComplexSum::new();
    for k in 0..LANES / 2 {
        acc.re.add(sum[2 * k]);
        acc.im.add(sum[2 * k + 1]);
    }
    for k in 0..LANES / 2 {
        acc.re.add(comp[2 * k]);
        acc.im.add(comp[2 * k + 1]);
    }
    for &a in tail {
        acc.add(a);
    }
    acc
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Mean and sample standard deviation, computed on data shifted by its first
/// element. Identical inputs give exactly that value and a zero deviation.
pub fn shifted_mean_std(values: &[f64]) -> (f64, f64) {
    let Some(&reference) = values.first() else {
        return (f64::NAN, f64::NAN);
    };
    let count = values.len() as f64;
    let shifted: CompensatedSum = values.iter().map(|v| v - reference).collect();
    let mean_shift = shifted.value() / count;
    let mean = reference + mean_shift;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let squares: CompensatedSum = values
        .iter()
        .map(|v| {
            let d = (v - reference) - mean_shift;
            d * d
        })
        .collect();
    (mean, (squares.value() / (count - 1.0)).sqrt())
}

/// ∞-norm of the difference of two amplitude vectors.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Clamp a probability that may sit a rounding error outside [0, 1].
#[inline]
pub(crate) fn clamp_unit(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let values = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        let comp: CompensatedSum = values.iter().copied().collect();
        assert_eq!(naive, 0.0);
        assert_eq!(comp.value(), 2.0);
    }

    #[test]
    fn lane_sum_agrees_with_scalar_sum() {
        let data: Vec<Complex64> = (0..4099)
            .map(|i| Complex64::new((i as f64 * 0.37).sin() * 1e8, (i as f64).cos() * 1e-8))
            .chain([Complex64::new(1e16, -1e-16), Complex64::new(-1e16, 1e-16)])
            .collect();
        let scalar: ComplexSum = data.iter().copied().collect();
        let lanes = lane_sum(&data);
        assert!((scalar.value() - lanes.value()).norm() <= 1e-14 * 1e8);
        assert_eq!(
            lane_sum(&data[..3]).value(),
            data[..3].iter().sum::<Complex64>()
        );
    }

    #[test]
    fn shifted_mean_of_constant_data_is_exact() {
        let x = 0.1 + 0.2;
        let values = vec![x; 5000];
        let (mean, std) = shifted_mean_std(&values);
        assert_eq!(mean, x);
        assert_eq!(std, 0.0);
    }

    #[test]
    fn shifted_mean_std_matches_textbook() {
        let (mean, std) = shifted_mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert!((mean - 2.5).abs() < 1e-15);
        assert!((std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
