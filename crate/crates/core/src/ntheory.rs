//! Multiplicative arithmetic functions backed by a linear sieve, plus the
//! Riemann zeta function on the real half-line `s > 1`.
//!
//! Every query is checked against the sieve limit. A query above the limit
//! is an [`Error::OutOfRange`]; the cache never re-sieves on demand.

use crate::numerics::CompensatedSum;
use crate::{Error, Result};

/// Largest sieve limit accepted by [`ArithmeticCache::new`].
///
/// The tables cost 9 bytes per integer, so the ceiling is about 450 MB.
pub const MAX_CACHE_LIMIT: u64 = 50_000_000;

/// A finite real exponent (`s`, `alpha`, `eps`, ...).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RealExponent(f64);

impl RealExponent {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(RealExponent(value))
        } else {
            Err(Error::domain(format!("exponent must be finite, got {value}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RealExponent {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        RealExponent::new(value)
    }
}

/// Sieve tables for `2..=limit`: smallest prime factor, Möbius and Euler phi.
///
/// Immutable after construction, so a shared reference can be handed to
/// any number of worker threads.
#[derive(Debug, Clone)]
pub struct ArithmeticCache {
    limit: u64,
    spf: Vec<u32>,
    mobius: Vec<i8>,
    phi: Vec<u32>,
}

impl ArithmeticCache {
    pub fn new(limit: u64) -> Result<Self> {
        if !(2..=MAX_CACHE_LIMIT).contains(&limit) {
            return Err(Error::Config(format!(
                "cache limit must lie in 2..={MAX_CACHE_LIMIT}, got {limit}"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut mobius = vec![0i8; n + 1];
        let mut phi = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        mobius[1] = 1;
        phi[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mobius[i] = -1;
                phi[i] = (i - 1) as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
                if p == si {
                    mobius[m] = 0;
                    phi[m] = phi[i] * p;
                } else {
                    mobius[m] = -mobius[i];
                    phi[m] = phi[i] * (p - 1);
                }
            }
        }
        Ok(ArithmeticCache {
            limit,
            spf,
            mobius,
            phi,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub(crate) fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit {
            Err(Error::OutOfRange {
                n,
                limit: self.limit,
            })
        } else {
            Ok(n as usize)
        }
    }

    /// Smallest prime factor of `n >= 2`.
    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        let i = self.check(n)?;
        if i < 2 {
            return Err(Error::domain("1 has no prime factor"));
        }
        Ok(self.spf[i] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        let i = self.check(n)?;
        Ok(i >= 2 && self.spf[i] as usize == i)
    }

    pub fn mobius(&self, n: u64) -> Result<i8> {
        Ok(self.mobius[self.check(n)?])
    }

    pub fn phi(&self, n: u64) -> Result<u64> {
        Ok(self.phi[self.check(n)?] as u64)
    }

    /// Prime factorisation as `(p, exponent)` pairs in increasing `p`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut m = self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// Divisors of `n` in increasing order.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        let mut divs = vec![1u64];
        for (p, e) in self.factorize(n)? {
            let base = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..base {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        Ok(divs)
    }

    /// Number of divisors `d(n)`.
    pub fn divisor_count(&self, n: u64) -> Result<u64> {
        Ok(self
            .factorize(n)?
            .iter()
            .map(|&(_, e)| e as u64 + 1)
            .product())
    }

    /// `sigma_alpha(n) = sum_{d | n} d^alpha`.
    pub fn sigma_alpha(&self, n: u64, alpha: f64) -> Result<f64> {
        let alpha = RealExponent::new(alpha)?.get();
        let mut acc = CompensatedSum::new();
        for d in self.divisors(n)? {
            acc.add((d as f64).powf(alpha));
        }
        Ok(acc.value())
    }

    /// Generalised Jordan totient `J_eps(n) = sum_{d | n} mu(n/d) d^eps`.
    pub fn jordan_totient(&self, n: u64, eps: f64) -> Result<f64> {
        let eps = RealExponent::new(eps)?.get();
        if eps <= 0.0 {
            return Err(Error::domain(format!(
                "Jordan totient needs eps > 0, got {eps}"
            )));
        }
        let mut acc = CompensatedSum::new();
        for d in self.divisors(n)? {
            let mu = self.mobius[(n / d) as usize];
            if mu != 0 {
                acc.add(mu as f64 * (d as f64).powf(eps));
            }
        }
        Ok(acc.value())
    }

    /// Pillai mean `A(n) = P(n)/n = sum_{k | n} phi(k)/k`.
    pub fn pillai_mean(&self, n: u64) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for k in self.divisors(n)? {
            acc.add(self.phi[k as usize] as f64 / k as f64);
        }
        Ok(acc.value())
    }

    /// Erdős–Hooley `Delta(n)`: the largest number of divisors of `n` in a
    /// window `(x, e*x]`.
    ///
    /// The supremum is attained with `x` just below a divisor `d_i`, which
    /// captures every divisor in `[d_i, e*d_i)`; `e*d_i` is never an integer.
    pub fn erdos_hooley_delta(&self, n: u64) -> Result<u64> {
        let divs = self.divisors(n)?;
        let mut best = 0usize;
        let mut hi = 0usize;
        for lo in 0..divs.len() {
            let cap = std::f64::consts::E * divs[lo] as f64;
            if hi < lo {
                hi = lo;
            }
            while hi < divs.len() && (divs[hi] as f64) < cap {
                hi += 1;
            }
            best = best.max(hi - lo);
        }
        Ok(best as u64)
    }

    /// Primes in `[lo, hi]`.
    pub fn primes_between(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        if hi < lo {
            return Ok(Vec::new());
        }
        self.check(hi)?;
        Ok((lo.max(2)..=hi)
            .filter(|&p| self.spf[p as usize] as u64 == p)
            .collect())
    }
}

/// Partial-sum cut-off used by [`zeta`].
pub const ZETA_CUTOFF: u64 = 10_000;

/// Riemann zeta for real `s > 1`.
///
/// Sums `n^-s` for `n < ZETA_CUTOFF` and closes with the Euler–Maclaurin
/// tail through the `B_4` term. The first omitted term is bounded by
/// `s(s+1)(s+2)(s+3)(s+4) N^(-s-5) / 30240`, below `1e-20` here, so the
/// absolute error is dominated by rounding (well under `1e-12`).
pub fn zeta(s: f64) -> Result<f64> {
    let s = RealExponent::new(s)?.get();
    if s <= 1.0 {
        return Err(Error::domain(format!("zeta needs s > 1, got {s}")));
    }
    let n = ZETA_CUTOFF as f64;
    let mut acc = CompensatedSum::new();
    for k in (1..ZETA_CUTOFF).rev() {
        acc.add((k as f64).powf(-s));
    }
    let ns = n.powf(-s);
    acc.add(n * ns / (s - 1.0));
    acc.add(0.5 * ns);
    acc.add(s * ns / n / 12.0);
    acc.add(-s * (s + 1.0) * (s + 2.0) * ns / (n * n * n) / 720.0);
    Ok(acc.value())
}

/// `d(n) <= exp(DIVISOR_EXP_CONSTANT · ln n / ln ln n)` for `n >= 3`
/// (Nicolas–Robin: `1.5379 ln 2`).
pub const DIVISOR_EXP_CONSTANT: f64 = 1.5379 * std::f64::consts::LN_2;

/// `σ_{-1}(n) < e^γ ln ln n + ROBIN_CORRECTION / ln ln n` for `n >= 3`.
pub const ROBIN_CORRECTION: f64 = 0.6483;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Smallest exponent accepted by [`divisor_bound_constant`]; its sieve
/// runs to `2^(1/eps)`.
pub const MIN_DIVISOR_EXPONENT: f64 = 1.0 / 22.0;

/// `C` with `d(n) <= C n^eps` for every `n >= 1`.
///
/// `d(n)/n^eps` is multiplicative with prime-power factor
/// `(k+1)/p^(k eps)`, which never exceeds 1 once `p^eps >= 2`. So `C` is
/// the product over `p < 2^(1/eps)` of the largest such factor.
pub fn divisor_bound_constant(eps: f64) -> Result<f64> {
    if !(eps.is_finite() && (MIN_DIVISOR_EXPONENT..=1.0).contains(&eps)) {
        return Err(Error::domain(format!(
            "divisor exponent must lie in [1/22, 1], got {eps}"
        )));
    }
    let top = 2f64.powf(1.0 / eps).ceil() as usize;
    let mut composite = vec![false; top + 1];
    let mut log_c = 0.0;
    for p in 2..top {
        if composite[p] {
            continue;
        }
        for m in (p * p..=top).step_by(p) {
            composite[m] = true;
        }
        let pe = (p as f64).powf(eps);
        if pe >= 2.0 {
            continue;
        }
        // (k+1)/pe^k increases while (k+2)/(k+1) > pe
        let mut best: f64 = 1.0;
        let mut k = 1.0;
        loop {
            let v = (k + 1.0) / pe.powf(k);
            if v < best {
                break;
            }
            best = v;
            k += 1.0;
        }
        log_c += best.ln();
    }
    Ok(log_c.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_bound_constant_holds() {
        let c = ArithmeticCache::new(100_000).unwrap();
        for eps in [0.25, 0.5, 1.0 / 3.0] {
            let k = divisor_bound_constant(eps).unwrap();
            for n in 1..=100_000u64 {
                assert!(c.divisor_count(n).unwrap() as f64 <= k * (n as f64).powf(eps) * (1.0 + 1e-12));
            }
        }
        // p = 2 and 3 only: max(2/√2, 3/2) · 2/√3
        let want = 1.5 * 2.0 / 3f64.sqrt();
        assert!((divisor_bound_constant(0.5).unwrap() - want).abs() < 1e-12);
        assert!(divisor_bound_constant(0.01).is_err());
    }

    #[test]
    fn published_bounds_hold_on_window() {
        let c = ArithmeticCache::new(100_000).unwrap();
        for n in 3..=100_000u64 {
            let l = (n as f64).ln();
            let d = c.divisor_count(n).unwrap() as f64;
            assert!(d.ln() <= DIVISOR_EXP_CONSTANT * l / l.ln() + 1e-12, "d({n})");
            let ll = l.ln();
            if ll > 0.0 {
                let bound = EULER_GAMMA.exp() * ll + ROBIN_CORRECTION / ll;
                assert!(c.sigma_alpha(n, -1.0).unwrap() < bound, "sigma_-1({n})");
            }
        }
    }

    fn cache() -> ArithmeticCache {
        ArithmeticCache::new(1000).unwrap()
    }

    #[test]
    fn small_values() {
        let c = ArithmeticCache::new(10).unwrap();
        assert_eq!(c.phi(10).unwrap(), 4);
        assert_eq!(c.mobius(1).unwrap(), 1);
        assert_eq!(c.mobius(4).unwrap(), 0);
        assert_eq!(c.mobius(6).unwrap(), 1);
        assert_eq!(c.mobius(7).unwrap(), -1);
    }

    #[test]
    fn limit_is_enforced() {
        assert!(matches!(ArithmeticCache::new(1), Err(Error::Config(_))));
        assert!(matches!(
            ArithmeticCache::new(MAX_CACHE_LIMIT + 1),
            Err(Error::Config(_))
        ));
        let c = ArithmeticCache::new(10).unwrap();
        assert!(matches!(
            c.divisors(11),
            Err(Error::OutOfRange { n: 11, limit: 10 })
        ));
        assert!(c.phi(0).is_err());
    }

    #[test]
    fn divisor_lists() {
        let c = cache();
        assert_eq!(c.divisors(1).unwrap(), vec![1]);
        assert_eq!(c.divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(c.divisors(7).unwrap(), vec![1, 7]);
        assert_eq!(c.divisor_count(360).unwrap(), 24);
    }

    #[test]
    fn sigma_examples() {
        let c = cache();
        assert_eq!(c.sigma_alpha(6, 1.0).unwrap(), 12.0);
        assert!((c.sigma_alpha(6, -1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(c.sigma_alpha(1, 0.37).unwrap(), 1.0);
    }

    #[test]
    fn jordan_examples() {
        let c = cache();
        assert_eq!(c.jordan_totient(1, 2.0).unwrap(), 1.0);
        assert_eq!(c.jordan_totient(2, 2.0).unwrap(), 3.0);
        assert_eq!(c.jordan_totient(6, 2.0).unwrap(), 24.0);
        // J_1 is Euler's phi
        for n in 1..200 {
            assert_eq!(c.jordan_totient(n, 1.0).unwrap(), c.phi(n).unwrap() as f64);
        }
        assert!(c.jordan_totient(6, 0.0).is_err());
    }

    #[test]
    fn pillai_examples() {
        let c = cache();
        assert_eq!(c.pillai_mean(1).unwrap(), 1.0);
        assert!((c.pillai_mean(6).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(c.pillai_mean(2).unwrap(), 1.5);
    }

    #[test]
    fn delta_examples() {
        let c = cache();
        assert_eq!(c.erdos_hooley_delta(1).unwrap(), 1);
        assert_eq!(c.erdos_hooley_delta(12).unwrap(), 3);
        for p in [3u64, 5, 7, 11, 997] {
            assert_eq!(c.erdos_hooley_delta(p).unwrap(), 1);
        }
        // 2 is the only prime with both divisors in one window
        assert_eq!(c.erdos_hooley_delta(2).unwrap(), 2);
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0).unwrap() - pi * pi / 6.0).abs() < 1e-13);
        assert!((zeta(4.0).unwrap() - pi.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta(3.0).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-13);
        assert!((zeta(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-12);
        assert!(zeta(1.0).is_err());
        assert!(zeta(0.5).is_err());
        assert!(zeta(f64::NAN).is_err());
    }

    #[test]
    fn primes_between_small() {
        let c = cache();
        assert_eq!(c.primes_between(10, 20).unwrap(), vec![11, 13, 17, 19]);
        assert!(c.primes_between(24, 28).unwrap().is_empty());
    }
}
