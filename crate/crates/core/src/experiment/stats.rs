use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Arithmetic mean and sample standard deviation (zero for one value).
pub fn mean_std(xs: &[f64]) -> Result<MeanStd> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(MeanStd { mean, std })
}

fn ln_choose(n: u64, k: u64) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
}

/// P(X >= wins) for X ~ Binomial(n, 1/2).
pub fn binomial_upper_tail(wins: u64, n: u64) -> f64 {
    (wins..=n)
        .map(|k| (ln_choose(n, k) - n as f64 * std::f64::consts::LN_2).exp())
        .sum::<f64>()
        .min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTest {
    pub wins: u64,
    pub losses: u64,
    pub ties: u64,
    pub p_value: f64,
}

/// One-sided paired sign test of `a > b`; ties are discarded.
pub fn sign_test(a: &[f64], b: &[f64]) -> SignTest {
    assert_eq!(a.len(), b.len(), "sign test needs paired samples");
    let mut t = SignTest {
        wins: 0,
        losses: 0,
        ties: 0,
        p_value: 1.0,
    };
    for (x, y) in a.iter().zip(b) {
        if x > y {
            t.wins += 1;
        } else if x < y {
            t.losses += 1;
        } else {
            t.ties += 1;
        }
    }
    let n = t.wins + t.losses;
    if n > 0 {
        t.p_value = binomial_upper_tail(t.wins, n);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_examples() {
        assert_eq!(mean_std(&[0.4, 0.6]).unwrap().mean, 0.5);
        assert_eq!(mean_std(&[3.0]).unwrap().std, 0.0);
        let m = mean_std(&[1.0, 2.0, 3.0]).unwrap();
        assert!((m.mean - 2.0).abs() < 1e-15 && (m.std - 1.0).abs() < 1e-15);
        assert!(mean_std(&[]).is_err());
    }

    #[test]
    fn binomial_tail() {
        assert!((binomial_upper_tail(10, 10) - 1.0 / 1024.0).abs() < 1e-15);
        assert!((binomial_upper_tail(9, 10) - 11.0 / 1024.0).abs() < 1e-15);
        assert!((binomial_upper_tail(8, 10) - 56.0 / 1024.0).abs() < 1e-14);
        assert!((binomial_upper_tail(0, 7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_test_counts() {
        let t = sign_test(&[2.0, 3.0, 1.0, 5.0], &[1.0, 1.0, 1.0, 6.0]);
        assert_eq!((t.wins, t.losses, t.ties), (2, 1, 1));
        assert!((t.p_value - 0.5).abs() < 1e-12);
    }
}
