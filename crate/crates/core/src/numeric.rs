//! Small numeric helpers shared by the analytic modules.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(iter);
    acc.value()
}

/// Binomial pmf for every outcome `0..=trials`, computed by the stable
/// multiplicative recurrence.
pub fn binomial_pmf(trials: usize, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; trials + 1];
    if p <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        out[trials] = 1.0;
        return out;
    }
    // Log-space start avoids underflow of (1-p)^n for large n.
    let q = 1.0 - p;
    let mode = ((trials as f64 + 1.0) * p).floor().min(trials as f64) as usize;
    let ln_mode = ln_choose(trials, mode) + mode as f64 * p.ln() + (trials - mode) as f64 * q.ln();
    out[mode] = ln_mode.exp();
    for k in (mode + 1)..=trials {
        out[k] = out[k - 1] * ((trials - k + 1) as f64 / k as f64) * (p / q);
    }
    for k in (0..mode).rev() {
        out[k] = out[k + 1] * ((k + 1) as f64 / (trials - k) as f64) * (q / p);
    }
    out
}

pub fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: usize) -> f64 {
    // Exact summation is fine at the sizes used here (community sizes).
    if n < 2 {
        return 0.0;
    }
    if n < 256 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    // Stirling series.
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1.0];
        xs.extend(std::iter::repeat(1e-16).take(10_000));
        let naive: f64 = xs.iter().sum();
        let comp = compensated_sum(xs.iter().copied());
        assert_eq!(naive, 1.0);
        assert!((comp - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn binomial_pmf_sums_to_one_and_matches_small_case() {
        let pmf = binomial_pmf(4, 0.3);
        let exact = [0.2401, 0.4116, 0.2646, 0.0756, 0.0081];
        for (a, b) in pmf.iter().zip(exact) {
            assert!((a - b).abs() < 1e-12);
        }
        let big = binomial_pmf(5000, 0.37);
        assert!((compensated_sum(big.iter().copied()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn binomial_pmf_degenerate_probabilities() {
        assert_eq!(binomial_pmf(3, 0.0), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(binomial_pmf(3, 1.0), vec![0.0, 0.0, 0.0, 1.0]);
    }
}
