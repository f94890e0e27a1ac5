//! Independent brute-force oracle: enumerate every chain `m_1 > … > m_k > 0`
//! and expand each summand by explicit convolution with geometric series.
//! Shares no code with the prefix-sum generators under test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qmzv::generators::{
    classical_mzv_partial, delta_zbar_closed, named_qmzv, numeric_nested_sum, weighted_single_sum,
};
use qmzv::{Family, QSeries, WeightedSingle};

type Poly = Vec<i128>;

fn convolve(x: &Poly, y: &Poly) -> Poly {
    let mut out = vec![0; x.len()];
    for (i, a) in x.iter().enumerate() {
        if *a == 0 {
            continue;
        }
        for (j, b) in y.iter().enumerate().take(x.len() - i) {
            out[i + j] += a * b;
        }
    }
    out
}

/// `1 + q^m + q^{2m} + …`
fn geometric(m: usize, order: usize) -> Poly {
    (0..=order).map(|d| i128::from(d % m == 0)).collect()
}

/// `sign · q^{shift} / Π (1-q^m)^n` with the chain `ms`.
fn summand(ns: &[u32], shift: usize, ms: &[usize], sign: i128, order: usize) -> Poly {
    let mut p = vec![0; order + 1];
    if shift > order {
        return p;
    }
    p[shift] = sign;
    for (&n, &m) in ns.iter().zip(ms) {
        for _ in 0..n {
            p = convolve(&p, &geometric(m, order));
        }
    }
    p
}

fn chains(len: usize, below: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for m in len..below {
        for mut rest in chains(len - 1, m) {
            rest.insert(0, m);
            out.push(rest);
        }
    }
    out
}

/// Brute-force series for each family straight from its defining sum.
fn oracle(family: Family, ns: &[u32], order: usize) -> Poly {
    let mut total = vec![0; order + 1];
    for ms in chains(ns.len(), order + 1) {
        let (shift, sign) = match family {
            // q^{m_1} / Π (1-q^{m_i})^{n_i}
            Family::Zbar => (ms[0], 1),
            // Π q^{(n_i-1) m_i} / (1-q^{m_i})^{n_i}
            Family::ZetaBarBradley => (ns.iter().zip(&ms).map(|(&n, &m)| (n as usize - 1) * m).sum(), 1),
            // q^{-m_1} Π 1/(1-q^{-m_i})^{n_i}, using 1/(1-q^{-m}) = -q^m/(1-q^m)
            Family::QinvZbar => {
                let up: usize = ns.iter().zip(&ms).map(|(&n, &m)| n as usize * m).sum();
                let w: u32 = ns.iter().sum();
                (up - ms[0], if w.is_multiple_of(2) { 1 } else { -1 })
            }
        };
        let s = summand(ns, shift, &ms, sign, order);
        for (t, x) in total.iter_mut().zip(s) {
            *t += x;
        }
    }
    total
}

fn to_series(p: &Poly) -> QSeries {
    QSeries::from_coeffs(p.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
}

fn compositions(weight: u32, first_min: u32, rest_min: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for w in 1..=weight {
        collect(&mut Vec::new(), w, first_min, rest_min, &mut out);
    }
    out
}

fn collect(prefix: &mut Vec<u32>, left: u32, first_min: u32, rest_min: u32, out: &mut Vec<Vec<u32>>) {
    if left == 0 {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        return;
    }
    let lo = if prefix.is_empty() { first_min } else { rest_min };
    for x in lo..=left {
        prefix.push(x);
        collect(prefix, left - x, first_min, rest_min, out);
        prefix.pop();
    }
}

#[test]
fn zbar_matches_chain_enumeration() {
    let order = 22;
    for ns in compositions(6, 2, 1) {
        if ns.len() > 4 {
            continue;
        }
        let got = named_qmzv(Family::Zbar, &ns, order).unwrap();
        assert_eq!(got, to_series(&oracle(Family::Zbar, &ns, order)), "zbar {ns:?}");
    }
}

#[test]
fn zbar_with_trailing_zero_matches() {
    let order = 20;
    for ns in [vec![2, 0], vec![3, 0], vec![2, 1, 0]] {
        let got = named_qmzv(Family::Zbar, &ns, order).unwrap();
        assert_eq!(got, to_series(&oracle(Family::Zbar, &ns, order)), "zbar {ns:?}");
    }
}

#[test]
fn bradley_matches_chain_enumeration() {
    let order = 22;
    for ns in compositions(7, 2, 1) {
        if ns.len() > 3 {
            continue;
        }
        let got = named_qmzv(Family::ZetaBarBradley, &ns, order).unwrap();
        assert_eq!(got, to_series(&oracle(Family::ZetaBarBradley, &ns, order)), "bradley {ns:?}");
    }
}

#[test]
fn reflected_matches_chain_enumeration() {
    let order = 22;
    for ns in compositions(7, 2, 1) {
        if ns.len() > 3 {
            continue;
        }
        let got = named_qmzv(Family::QinvZbar, &ns, order).unwrap();
        assert_eq!(got, to_series(&oracle(Family::QinvZbar, &ns, order)), "qinv {ns:?}");
    }
}

#[test]
fn zbar2_is_sigma1() {
    let order = 60;
    let s = named_qmzv(Family::Zbar, &[2], order).unwrap();
    for n in 1..=order {
        let sigma: i64 = (1..=n).filter(|d| n % d == 0).map(|d| d as i64).sum();
        assert_eq!(s.coeff(n).unwrap(), &BigRational::from_integer(sigma.into()), "degree {n}");
    }
}

#[test]
fn weighted_singles_and_delta_closed_form() {
    let order = 25;
    for s in 2..=5u32 {
        for c in 1..=3u32 {
            // Σ (l-1) q^{c l} / (1-q^l)^s
            let mut want = vec![0i128; order + 1];
            for l in 1..=order {
                let p = summand(&[s], c as usize * l, &[l], l as i128 - 1, order);
                for (t, x) in want.iter_mut().zip(p) {
                    *t += x;
                }
            }
            let ws = WeightedSingle::index_minus_one(c, s).unwrap();
            assert_eq!(weighted_single_sum(&ws, order), to_series(&want), "c={c} s={s}");
        }
        let via_delta = named_qmzv(Family::Zbar, &[s], order).unwrap().delta();
        assert_eq!(delta_zbar_closed(s, order).unwrap(), via_delta, "delta zbar({s})");
    }
}

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[test]
fn numeric_sums_match_direct_evaluation() {
    let q = rational(1, 3);
    for ns in [vec![2], vec![3], vec![2, 1], vec![3, 2], vec![2, 1, 1]] {
        let cutoff = 7;
        for family in Family::ALL {
            let mut want = BigRational::zero();
            for ms in chains(ns.len(), cutoff + 1) {
                let qm = |m: usize| num_traits::pow(q.clone(), m);
                let mut term = match family {
                    Family::Zbar => qm(ms[0]),
                    Family::ZetaBarBradley => BigRational::one(),
                    Family::QinvZbar => BigRational::one() / qm(ms[0]),
                };
                for (&n, &m) in ns.iter().zip(&ms) {
                    let base = match family {
                        Family::QinvZbar => BigRational::one() - BigRational::one() / qm(m),
                        _ => BigRational::one() - qm(m),
                    };
                    term /= num_traits::pow(base, n as usize);
                    if family == Family::ZetaBarBradley {
                        term *= num_traits::pow(qm(m), n as usize - 1);
                    }
                }
                want += term;
            }
            let got = numeric_nested_sum(family, &ns, &q, cutoff).unwrap();
            assert_eq!(got, want, "{family:?} {ns:?}");
        }
    }
}

#[test]
fn classical_partial_sums() {
    // ζ_3(2,1) = 1/4 + 1/9 + 1/18
    let got = classical_mzv_partial(&[2, 1], 3).unwrap();
    let want = rational(1, 4) + rational(1, 9) + rational(1, 18);
    assert_eq!(got, want);
    assert_eq!(classical_mzv_partial(&[2], 2).unwrap(), rational(5, 4));
}
