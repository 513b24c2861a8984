//! Finite index sets `K`, their construction from a small text language,
//! factor closures, geometric block partitions and the arithmetical
//! complexity functional
//!
//! ```text
//! theta_K(k) = sum_{l in K, l != k} gcd(l, k) / max(l, k)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::ntheory::ArithmeticCache;
use crate::numerics::{gcd, geometric_band, pairwise_sum};
use crate::{Error, Result};

/// Where an [`IndexSet`] came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Explicit,
    Range {
        lo: u64,
        hi: u64,
    },
    Primes {
        lo: u64,
        hi: u64,
    },
    Hadamard {
        ratio: f64,
        count: usize,
        start: u64,
    },
    /// Products of distinct generator primes up to `limit`, including the
    /// empty product 1. `condition_violated` is set when the reciprocal sum
    /// of the generators is at least 1.
    Squarefree {
        generators: Vec<u64>,
        limit: u64,
        reciprocal_sum: f64,
        condition_violated: bool,
    },
    Closure {
        of: Box<Provenance>,
    },
}

/// Sorted, distinct positive integers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSet {
    elements: Vec<u64>,
    provenance: Provenance,
}

impl IndexSet {
    /// Builds an explicit set. Duplicates are merged; zero is rejected.
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::with_provenance(elements, Provenance::Explicit)
    }

    pub fn with_provenance(
        elements: impl IntoIterator<Item = u64>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut v: Vec<u64> = elements.into_iter().collect();
        if v.contains(&0) {
            return Err(Error::domain("index sets hold positive integers only"));
        }
        v.sort_unstable();
        v.dedup();
        Ok(IndexSet {
            elements: v,
            provenance,
        })
    }

    pub fn range(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 {
            return Err(Error::domain("range must start at 1 or above"));
        }
        Self::with_provenance(lo..=hi, Provenance::Range { lo, hi })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Smallest element `K_-`.
    pub fn k_minus(&self) -> Option<u64> {
        self.elements.first().copied()
    }

    /// Largest element `K_+`.
    pub fn k_plus(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.elements.binary_search(&k).is_ok()
    }

    pub fn position(&self, k: u64) -> Option<usize> {
        self.elements.binary_search(&k).ok()
    }

    /// The subset picked by `keep`, tagged explicit.
    pub fn filter(&self, mut keep: impl FnMut(u64) -> bool) -> IndexSet {
        IndexSet {
            elements: self.elements.iter().copied().filter(|&k| keep(k)).collect(),
            provenance: Provenance::Explicit,
        }
    }

    /// Newline-delimited decimal text, one element per line.
    pub fn to_lines(&self) -> String {
        let mut out = String::with_capacity(self.elements.len() * 8);
        for k in &self.elements {
            out.push_str(&k.to_string());
            out.push('\n');
        }
        out
    }

    /// Inverse of [`IndexSet::to_lines`]; blank lines are skipped.
    pub fn from_lines(text: &str) -> Result<Self> {
        let mut v = Vec::new();
        let mut pos = 0;
        for line in text.split('\n') {
            let t = line.trim();
            if !t.is_empty() {
                v.push(t.parse::<u64>().map_err(|e| Error::Parse {
                    pos,
                    msg: format!("bad integer {t:?}: {e}"),
                })?);
            }
            pos += line.len() + 1;
        }
        Self::new(v)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Mini-language
// ---------------------------------------------------------------------------

/// Parses the sequence language:
///
/// ```text
/// range[m,n] | primes[m,n] | hadamard(q,count,start)
///   | squarefree(p1,...,pr;limit) | list(a1,...,an) | closure(<spec>)
/// ```
pub fn parse_spec(text: &str, cache: &ArithmeticCache) -> Result<IndexSet> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let set = p.spec(cache)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(set)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a generator name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn token(&mut self) -> Result<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || b".+-_".contains(&self.src[self.pos]))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok((
            start,
            String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
        ))
    }

    fn uint(&mut self) -> Result<u64> {
        let (start, t) = self.token()?;
        t.replace('_', "").parse::<u64>().map_err(|e| Error::Parse {
            pos: start,
            msg: format!("bad integer {t:?}: {e}"),
        })
    }

    fn real(&mut self) -> Result<f64> {
        let (start, t) = self.token()?;
        t.parse::<f64>().map_err(|e| Error::Parse {
            pos: start,
            msg: format!("bad number {t:?}: {e}"),
        })
    }

    fn spec(&mut self, cache: &ArithmeticCache) -> Result<IndexSet> {
        let at = {
            self.skip_ws();
            self.pos
        };
        let name = self.ident()?;
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::Parse {
                pos: at,
                msg: other.to_string(),
            },
        };
        match name.as_str() {
            "range" | "primes" => {
                self.expect(b'[')?;
                let lo = self.uint()?;
                self.expect(b',')?;
                let hi = self.uint()?;
                self.expect(b']')?;
                if name == "range" {
                    IndexSet::range(lo, hi).map_err(wrap)
                } else {
                    let ps = cache.primes_between(lo, hi).map_err(wrap)?;
                    IndexSet::with_provenance(ps, Provenance::Primes { lo, hi })
                }
            }
            "hadamard" => {
                self.expect(b'(')?;
                let q = self.real()?;
                self.expect(b',')?;
                let count = self.uint()? as usize;
                self.expect(b',')?;
                let start = self.uint()?;
                self.expect(b')')?;
                hadamard(q, count, start).map_err(wrap)
            }
            "squarefree" => {
                self.expect(b'(')?;
                let mut gens = vec![self.uint()?];
                while self.eat(b',') {
                    gens.push(self.uint()?);
                }
                self.expect(b';')?;
                let limit = self.uint()?;
                self.expect(b')')?;
                squarefree(&gens, limit, cache).map_err(wrap)
            }
            "list" => {
                self.expect(b'(')?;
                let mut v = Vec::new();
                if !self.eat(b')') {
                    v.push(self.uint()?);
                    while self.eat(b',') {
                        v.push(self.uint()?);
                    }
                    self.expect(b')')?;
                }
                IndexSet::new(v).map_err(wrap)
            }
            "closure" => {
                self.expect(b'(')?;
                let inner = self.spec(cache)?;
                self.expect(b')')?;
                factor_closure(&inner, cache).map_err(wrap)
            }
            other => Err(Error::Parse {
                pos: at,
                msg: format!("unknown generator {other:?}"),
            }),
        }
    }
}

/// `n_{k+1} = ceil(q * n_k)` starting from `start`, `count` terms.
pub fn hadamard(q: f64, count: usize, start: u64) -> Result<IndexSet> {
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::domain(format!("hadamard ratio must exceed 1, got {q}")));
    }
    if start == 0 || count == 0 {
        return Err(Error::domain("hadamard needs start >= 1 and count >= 1"));
    }
    let mut v = Vec::with_capacity(count);
    let mut n = start;
    v.push(n);
    for _ in 1..count {
        let t = q * n as f64;
        // q*n that is an integer up to rounding must not be pushed up by ceil
        let r = t.round();
        let next = if (t - r).abs() <= 1e-9 * t { r } else { t.ceil() };
        if next >= 9.0e15 {
            return Err(Error::domain("hadamard sequence overflows the exact integer range"));
        }
        n = (next as u64).max(n + 1);
        v.push(n);
    }
    IndexSet::with_provenance(
        v,
        Provenance::Hadamard {
            ratio: q,
            count,
            start,
        },
    )
}

/// Squarefree products of distinct generator primes, up to `limit`,
/// enumerated breadth-first by number of factors.
pub fn squarefree(generators: &[u64], limit: u64, cache: &ArithmeticCache) -> Result<IndexSet> {
    let mut gens = generators.to_vec();
    gens.sort_unstable();
    gens.dedup();
    for &p in &gens {
        let prime = if p <= cache.limit() {
            cache.is_prime(p)?
        } else {
            (2..).take_while(|d| d * d <= p).all(|d| p % d != 0) && p >= 2
        };
        if !prime {
            return Err(Error::domain(format!("squarefree generator {p} is not prime")));
        }
    }
    let reciprocal_sum: f64 = gens.iter().map(|&p| 1.0 / p as f64).sum();
    let mut out = vec![1u64];
    // frontier of (product, index of largest generator used)
    let mut frontier: Vec<(u64, usize)> = vec![(1, usize::MAX)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &(prod, last) in &frontier {
            let from = if last == usize::MAX { 0 } else { last + 1 };
            for (i, &p) in gens.iter().enumerate().skip(from) {
                match prod.checked_mul(p) {
                    Some(m) if m <= limit => {
                        out.push(m);
                        next.push((m, i));
                    }
                    _ => break,
                }
            }
        }
        frontier = next;
    }
    IndexSet::with_provenance(
        out.into_iter().filter(|&m| m <= limit),
        Provenance::Squarefree {
            generators: gens,
            limit,
            reciprocal_sum,
            condition_violated: reciprocal_sum >= 1.0,
        },
    )
}

/// Smallest factor-closed superset of `set`.
pub fn factor_closure(set: &IndexSet, cache: &ArithmeticCache) -> Result<IndexSet> {
    let mut all = BTreeSet::new();
    for &k in set.elements() {
        all.extend(cache.divisors(k)?);
    }
    IndexSet::with_provenance(
        all,
        Provenance::Closure {
            of: Box::new(set.provenance().clone()),
        },
    )
}

/// True iff every divisor of every element lies in the set.
///
/// Closure under division by single primes is enough, by induction on the
/// number of prime factors.
pub fn is_factor_closed(set: &IndexSet, cache: &ArithmeticCache) -> Result<bool> {
    for &k in set.elements() {
        for (p, _) in cache.factorize(k)? {
            if !set.contains(k / p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One nonempty block `K ∩ [mu^j, mu^(j+1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricBlock {
    pub index: u32,
    pub members: IndexSet,
}

/// Trace of `set` over the geometric partition `[mu^j, mu^(j+1))`, empty
/// blocks dropped.
pub fn dyadic_blocks(set: &IndexSet, mu: f64) -> Result<Vec<GeometricBlock>> {
    if !(mu.is_finite() && mu > 1.0) {
        return Err(Error::domain(format!("block ratio must exceed 1, got {mu}")));
    }
    let mut out: Vec<GeometricBlock> = Vec::new();
    for &k in set.elements() {
        let j = geometric_band(k, mu);
        match out.last_mut() {
            Some(b) if b.index == j => b.members.elements.push(k),
            _ => out.push(GeometricBlock {
                index: j,
                members: IndexSet {
                    elements: vec![k],
                    provenance: Provenance::Explicit,
                },
            }),
        }
    }
    Ok(out)
}

/// Per-element values of `theta_K` and their supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaProfile {
    pub elements: Vec<u64>,
    pub values: Vec<f64>,
    pub sup_value: f64,
}

impl ThetaProfile {
    pub fn value_at(&self, k: u64) -> Option<f64> {
        self.elements
            .binary_search(&k)
            .ok()
            .map(|i| self.values[i])
    }
}

/// `theta_K(k)` for every `k` in `set`.
///
/// Rows are independent and run in parallel; each row is summed pairwise
/// in element order, so the result does not depend on the thread count.
pub fn theta(set: &IndexSet) -> Result<ThetaProfile> {
    if set.is_empty() {
        return Err(Error::domain("theta needs a nonempty set"));
    }
    let el = set.elements();
    let values: Vec<f64> = el
        .par_iter()
        .map(|&k| {
            let terms: Vec<f64> = el
                .iter()
                .filter(|&&l| l != k)
                .map(|&l| gcd(k, l) as f64 / k.max(l) as f64)
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let sup_value = values.iter().copied().fold(0.0, f64::max);
    Ok(ThetaProfile {
        elements: el.to_vec(),
        values,
        sup_value,
    })
}

/// One row of [`theta_bound_report`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaBoundRow {
    pub k: u64,
    pub theta: f64,
    /// `log(e K_+ / k) * A(k)`
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaBoundReport {
    pub rows: Vec<ThetaBoundRow>,
    /// Largest ratio, i.e. the smallest constant that works for this set.
    pub max_ratio: f64,
}

/// Compares `theta_K(k)` with the envelope `log(e K_+/k) A(k)`.
pub fn theta_bound_report(set: &IndexSet, cache: &ArithmeticCache) -> Result<ThetaBoundReport> {
    let prof = theta(set)?;
    let k_plus = set.k_plus().expect("nonempty") as f64;
    let mut rows = Vec::with_capacity(set.len());
    let mut max_ratio: f64 = 0.0;
    for (&k, &th) in prof.elements.iter().zip(&prof.values) {
        let envelope = (1.0 + (k_plus / k as f64).ln()) * cache.pillai_mean(k)?;
        let ratio = th / envelope;
        max_ratio = max_ratio.max(ratio);
        rows.push(ThetaBoundRow {
            k,
            theta: th,
            envelope,
            ratio,
        });
    }
    Ok(ThetaBoundReport { rows, max_ratio })
}

/// Family-specific diagnostics for the three worked families.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyDiagnostic {
    /// `max_k theta_K(k) log k`, bounded by an unspecified constant.
    Primes { max_theta_log_k: f64, argmax: u64 },
    /// `sup theta` against the geometric-series envelope `2/(q-1)`.
    Hadamard {
        ratio: f64,
        sup_theta: f64,
        envelope: f64,
        within: bool,
    },
    Squarefree {
        sup_theta: f64,
        reciprocal_sum: f64,
        condition_violated: bool,
    },
}

pub fn example_family_check(set: &IndexSet) -> Result<FamilyDiagnostic> {
    match set.provenance() {
        Provenance::Primes { .. } => {
            let prof = theta(set)?;
            let (argmax, max_theta_log_k) = prof
                .elements
                .iter()
                .zip(&prof.values)
                .map(|(&k, &t)| (k, t * (k as f64).ln()))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            Ok(FamilyDiagnostic::Primes {
                max_theta_log_k,
                argmax,
            })
        }
        Provenance::Hadamard { ratio, .. } => {
            let sup_theta = theta(set)?.sup_value;
            let envelope = 2.0 / (ratio - 1.0);
            Ok(FamilyDiagnostic::Hadamard {
                ratio: *ratio,
                sup_theta,
                envelope,
                within: sup_theta <= envelope,
            })
        }
        Provenance::Squarefree {
            reciprocal_sum,
            condition_violated,
            ..
        } => Ok(FamilyDiagnostic::Squarefree {
            sup_theta: theta(set)?.sup_value,
            reciprocal_sum: *reciprocal_sum,
            condition_violated: *condition_violated,
        }),
        other => Err(Error::usage(format!(
            "family check needs a primes, hadamard or squarefree set, got {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache() -> ArithmeticCache {
        ArithmeticCache::new(10_000).unwrap()
    }

    #[test]
    fn parse_examples() {
        let c = cache();
        assert_eq!(parse_spec("primes[10,20]", &c).unwrap().elements(), &[11, 13, 17, 19]);
        assert_eq!(parse_spec("hadamard(2,5,1)", &c).unwrap().elements(), &[1, 2, 4, 8, 16]);
        assert_eq!(parse_spec("closure(list(6))", &c).unwrap().elements(), &[1, 2, 3, 6]);
        assert_eq!(parse_spec(" range[ 3 , 6 ] ", &c).unwrap().elements(), &[3, 4, 5, 6]);
        assert_eq!(parse_spec("list()", &c).unwrap().len(), 0);
    }

    #[test]
    fn parse_errors_carry_position() {
        let c = cache();
        match parse_spec("range[1,x]", &c) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("{other:?}"),
        }
        match parse_spec("wibble(1)", &c) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_spec("list(1,2) extra", &c), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("list(0)", &c), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("closure(list(20000))", &c), Err(Error::Parse { .. })));
    }

    #[test]
    fn squarefree_flags_reciprocal_condition() {
        let c = cache();
        let ok = parse_spec("squarefree(3,5,7;100)", &c).unwrap();
        assert_eq!(ok.elements(), &[1, 3, 5, 7, 15, 21, 35]);
        match ok.provenance() {
            Provenance::Squarefree { condition_violated, .. } => assert!(!condition_violated),
            p => panic!("{p:?}"),
        }
        let bad = parse_spec("squarefree(2,3,5;100)", &c).unwrap();
        assert!(bad.contains(30));
        match bad.provenance() {
            Provenance::Squarefree {
                condition_violated,
                reciprocal_sum,
                ..
            } => {
                assert!(condition_violated);
                assert!((reciprocal_sum - (1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 5.0)).abs() < 1e-15);
            }
            p => panic!("{p:?}"),
        }
        assert!(parse_spec("squarefree(4;100)", &c).is_err());
    }

    #[test]
    fn hadamard_keeps_gap() {
        let h = hadamard(1.1, 40, 10).unwrap();
        for w in h.elements().windows(2) {
            assert!(w[1] as f64 / w[0] as f64 >= 1.1 - 1e-12);
        }
        // 1.1 * 10 = 11 exactly, not 12
        assert_eq!(h.elements()[1], 11);
        assert!(hadamard(1.0, 3, 1).is_err());
    }

    #[test]
    fn closure_examples() {
        let c = cache();
        assert_eq!(factor_closure(&IndexSet::new([1]).unwrap(), &c).unwrap().elements(), &[1]);
        assert_eq!(
            factor_closure(&IndexSet::new([12]).unwrap(), &c).unwrap().elements(),
            &[1, 2, 3, 4, 6, 12]
        );
        let r = IndexSet::range(1, 30).unwrap();
        assert_eq!(factor_closure(&r, &c).unwrap().elements(), r.elements());
        assert!(is_factor_closed(&IndexSet::new([1, 2, 4]).unwrap(), &c).unwrap());
        assert!(!is_factor_closed(&IndexSet::new([2]).unwrap(), &c).unwrap());
        assert!(is_factor_closed(&IndexSet::new([1, 2, 3, 6]).unwrap(), &c).unwrap());
        assert!(!is_factor_closed(&IndexSet::new([1, 2, 3, 12]).unwrap(), &c).unwrap());
    }

    #[test]
    fn blocks_examples() {
        let b = dyadic_blocks(&IndexSet::range(1, 10).unwrap(), 2.0).unwrap();
        let shapes: Vec<(u32, Vec<u64>)> =
            b.iter().map(|b| (b.index, b.members.elements().to_vec())).collect();
        assert_eq!(
            shapes,
            vec![(0, vec![1]), (1, vec![2, 3]), (2, vec![4, 5, 6, 7]), (3, vec![8, 9, 10])]
        );
        let b = dyadic_blocks(&IndexSet::new([1, 16]).unwrap(), 2.0).unwrap();
        assert_eq!(b.iter().map(|b| b.index).collect::<Vec<_>>(), vec![0, 4]);
        let b = dyadic_blocks(&IndexSet::new([3, 5, 7]).unwrap(), 10.0).unwrap();
        assert_eq!(b.len(), 1);
        assert!(dyadic_blocks(&IndexSet::new([3]).unwrap(), 1.0).is_err());
    }

    #[test]
    fn theta_examples() {
        let t = theta(&IndexSet::new([1, 2]).unwrap()).unwrap();
        assert_eq!(t.values, vec![0.5, 0.5]);
        assert_eq!(t.sup_value, 0.5);
        let t = theta(&IndexSet::new([3, 5, 7]).unwrap()).unwrap();
        assert!((t.values[0] - 12.0 / 35.0).abs() < 1e-15);
        assert!((t.values[1] - 12.0 / 35.0).abs() < 1e-15);
        assert!((t.values[2] - 2.0 / 7.0).abs() < 1e-15);
        assert!((t.sup_value - 12.0 / 35.0).abs() < 1e-15);
        assert_eq!(theta(&IndexSet::new([9]).unwrap()).unwrap().sup_value, 0.0);
        assert!(theta(&IndexSet::new([]).unwrap()).is_err());
    }

    #[test]
    fn theta_bound_examples() {
        let c = cache();
        let r = theta_bound_report(&IndexSet::new([5]).unwrap(), &c).unwrap();
        assert_eq!(r.max_ratio, 0.0);
        let r = theta_bound_report(&IndexSet::new([1, 2]).unwrap(), &c).unwrap();
        let row = &r.rows[1];
        assert_eq!(row.k, 2);
        assert_eq!(row.theta, 0.5);
        assert!((row.envelope - 1.5).abs() < 1e-15);
        assert!((row.ratio - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn family_check_dispatch() {
        let c = cache();
        let h = parse_spec("hadamard(4,20,1)", &c).unwrap();
        match example_family_check(&h).unwrap() {
            FamilyDiagnostic::Hadamard { envelope, within, .. } => {
                assert!((envelope - 2.0 / 3.0).abs() < 1e-15);
                assert!(within);
            }
            d => panic!("{d:?}"),
        }
        assert!(matches!(
            example_family_check(&IndexSet::range(1, 5).unwrap()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn lines_round_trip() {
        let s = IndexSet::new([5, 1, 9]).unwrap();
        assert_eq!(s.to_lines(), "1\n5\n9\n");
        assert_eq!(IndexSet::from_lines("1\n5\n\n9\n").unwrap().elements(), s.elements());
        assert!(IndexSet::from_lines("1\nx\n").is_err());
    }
}
