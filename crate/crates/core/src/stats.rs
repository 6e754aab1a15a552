//! Small statistical helpers shared by the test and reanalysis modules.

use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal, StudentsT};

/// Standard normal upper-tail probability.
pub fn normal_sf(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("unit normal");
    1.0 - n.cdf(z)
}

/// Two-sided p-value for a t statistic with `df` degrees of freedom.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    let d = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    2.0 * (1.0 - d.cdf(t.abs()))
}

/// P(X >= x) for X ~ Binomial(n, p).
pub fn binomial_upper_tail(x: u64, n: u64, p: f64) -> f64 {
    if x == 0 {
        return 1.0;
    }
    let b = Binomial::new(p, n).expect("valid binomial");
    b.sf(x - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_tail_values() {
        assert!((normal_sf(1.6448536269514722) - 0.05).abs() < 1e-9);
        assert!((normal_sf(0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn binomial_tail_values() {
        // P(X >= 19) for X ~ Bin(25, 1/2) = 245506 / 2^25.
        let expect = 245_506.0 / 33_554_432.0;
        assert!((binomial_upper_tail(19, 25, 0.5) - expect).abs() < 1e-12);
        assert_eq!(binomial_upper_tail(0, 25, 0.5), 1.0);
    }
}
