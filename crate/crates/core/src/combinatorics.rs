//! Binomial and multinomial coefficients with the "negative index gives zero"
//! convention used by every summation domain in the decomposition formulas.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `C(n, k)`, zero unless `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `n! / (k_1! ⋯ k_r!)`, zero when any part is negative or the parts do not
/// sum to `n`.
pub fn multinomial(n: i64, parts: &[i64]) -> BigInt {
    if n < 0 || parts.iter().any(|&k| k < 0) || parts.iter().sum::<i64>() != n {
        return BigInt::zero();
    }
    let mut rest = n;
    let mut acc = BigInt::one();
    for &k in parts {
        acc *= binomial(rest, k);
        rest -= k;
    }
    acc
}

/// `(-1)^e` for a possibly negative exponent.
pub fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values_and_out_of_range() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(binomial(3, -1), BigInt::zero());
        assert_eq!(binomial(-2, 0), BigInt::zero());
    }

    #[test]
    fn multinomial_matches_factorials() {
        // 4! / (1! 2! 1!) = 12
        assert_eq!(multinomial(4, &[1, 2, 1]), BigInt::from(12));
        assert_eq!(multinomial(2, &[0, 1, 1]), BigInt::from(2));
        assert_eq!(multinomial(3, &[1, 2, 0]), BigInt::from(3));
        assert_eq!(multinomial(3, &[-1, 2, 2]), BigInt::zero());
        assert_eq!(multinomial(3, &[1, 1, 0]), BigInt::zero());
        let n = 9;
        let direct = factorial(9) / (factorial(2) * factorial(3) * factorial(4));
        assert_eq!(multinomial(n, &[2, 3, 4]), direct);
    }

    #[test]
    fn signs() {
        assert_eq!(sign(0), 1);
        assert_eq!(sign(3), -1);
        assert_eq!(sign(-1), -1);
        assert_eq!(sign(-2), 1);
    }
}
