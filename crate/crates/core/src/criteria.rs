//! Coefficient-side summability criteria for dilated series, with verdicts
//! that never overclaim.
//!
//! Every criterion asks whether some series `sum_k c_k^2 w(k)` (or a
//! block variant) is finite. The evaluator always computes the partial sum
//! over a finite window. A verdict other than `Undecided` is attached only
//! when `c` is a closed-form family `c_k = k^{-a} L(k)^{-b}`:
//!
//! * `Converges` carries a proven upper bound on the tail, obtained from an
//!   explicit majorant of the summand (see [`TAIL_START`]).
//! * `Diverges` comes from an explicit minorant of the form
//!   `k^{-P} (ln k)^q (ln ln k)^r` that is not summable.
//!
//! Small-`k` conventions: `L(k) = max(1, ln k)`, `LL(k) = max(1, ln ln k)`
//! (so log-log factors switch on at `k = 16`), `LLL(k) = max(1, ln ln ln k)`.
//! The index factor `(log n)^2` of the divisor criteria is 0 at `n = 1`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dilated::FourierProfile;
use crate::ntheory::{
    divisor_bound_constant, ArithmeticCache, DIVISOR_EXP_CONSTANT, EULER_GAMMA, MIN_DIVISOR_EXPONENT,
    ROBIN_CORRECTION,
};
use crate::numerics::{format_float, geometric_band, CompensatedSum};
use crate::sequences::IndexSet;
use crate::{Error, Result};

/// Smallest window with an analytic tail: `ceil(e^{e^2})`. From here on
/// `ln ln k >= 2`, every log convention is inactive and every slope bound
/// used below is nonincreasing.
pub const TAIL_START: u64 = 1619;

/// Default summation window for closed-form families.
pub const DEFAULT_WINDOW: u64 = 1 << 14;

/// Default `ε` for the two preset weights of Bremont's criterion.
pub const DEFAULT_PRESET_EPS: f64 = 0.1;

const MAX_TAIL_STEPS: usize = 200_000;
const MAX_LOG_TERM: f64 = 700.0;

/// `σ_{-1}(k) <= ROBIN_FACTOR · ln ln k` once `ln ln k >= 2`.
const ROBIN_FACTOR: f64 = 1.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converges => "converges",
            Verdict::Diverges => "diverges",
            Verdict::Undecided => "undecided",
        }
    }
}

/// Coefficients `c_k`, either closed-form or a raw finite vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientFamily {
    /// `c_k = k^{-a} L(k)^{-b}`
    PowerLog { a: f64, b: f64 },
    /// `c_1, ..., c_n`; zero beyond.
    Raw { values: Vec<f64> },
}

impl CoefficientFamily {
    pub fn power(a: f64) -> Result<Self> {
        Self::power_log(a, 0.0)
    }

    pub fn power_log(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("family exponents must be finite"));
        }
        Ok(CoefficientFamily::PowerLog { a, b })
    }

    pub fn raw(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("raw coefficients must be finite"));
        }
        Ok(CoefficientFamily::Raw { values })
    }

    pub fn value(&self, k: u64) -> f64 {
        match self {
            CoefficientFamily::PowerLog { a, b } => (k as f64).powf(-a) * big_l(k).powf(-b),
            CoefficientFamily::Raw { values } => {
                values.get((k as usize).wrapping_sub(1)).copied().unwrap_or(0.0)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CoefficientFamily::PowerLog { a, b } if *b == 0.0 => format!("k^-{a}"),
            CoefficientFamily::PowerLog { a, b } => format!("k^-{a} L(k)^-{b}"),
            CoefficientFamily::Raw { values } => format!("raw[{}]", values.len()),
        }
    }

    fn exponents(&self) -> Option<(f64, f64)> {
        match self {
            CoefficientFamily::PowerLog { a, b } => Some((*a, *b)),
            CoefficientFamily::Raw { .. } => None,
        }
    }
}

/// `max(1, ln k)`
pub fn big_l(k: u64) -> f64 {
    (k as f64).ln().max(1.0)
}

/// `max(1, ln ln k)`
pub fn big_ll(k: u64) -> f64 {
    let l = (k as f64).ln();
    if l > 1.0 {
        l.ln().max(1.0)
    } else {
        1.0
    }
}

/// `max(1, ln ln ln k)`
pub fn big_lll(k: u64) -> f64 {
    let ll = big_ll(k);
    if ll > 1.0 {
        ll.ln().max(1.0)
    } else {
        1.0
    }
}

/// Index factor `(log n)^2` of the divisor criteria: 0 at `n = 1`,
/// `L(n)^2` afterwards.
pub fn index_log_sq(n: u64) -> f64 {
    if n == 1 {
        0.0
    } else {
        big_l(n).powi(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub name: String,
    /// The multiplier of `c_k^2`, in words.
    pub weight: String,
    /// `(k, w(k))` at a few sample points inside the window.
    pub weight_samples: Vec<(u64, f64)>,
    pub window: u64,
    pub partial_sum: f64,
    /// Proven bound on everything beyond the window.
    pub tail_bound: Option<f64>,
    pub verdict: Verdict,
    /// Sub-series of compound criteria.
    pub components: Vec<CriterionReport>,
    pub notes: Vec<String>,
}

// ---------------------------------------------------------------------------
// Tail machinery
// ---------------------------------------------------------------------------

/// Slowly varying pieces of a log-summand, as functions of `u = ln k`.
#[derive(Debug, Clone, PartialEq)]
enum Slow {
    /// `q ln u`, a factor `(ln k)^q`
    LogPow(f64),
    /// `r ln ln u`, a factor `(ln ln k)^r`
    LogLogPow(f64),
    /// A factor bounded by `d(k)`; valued as its majorant
    /// `exp(DIVISOR_EXP_CONSTANT ln k / ln ln k)`, but also admits `C_ε k^ε`.
    Divisor,
    /// `β u / ln u`, a factor `exp(β ln k / ln ln k)`
    DivisorExp(f64),
    /// `coef u^p / ln u` with `0 < p < 1`
    SubPower { coef: f64, p: f64 },
    /// `c sqrt(ln u · max(1, ln ln u))`
    SqrtLogLog(f64),
    /// `ln C`, a constant factor `C`
    Const(f64),
}

impl Slow {
    fn value(&self, u: f64) -> f64 {
        let l = u.ln();
        match *self {
            Slow::LogPow(q) => q * l,
            Slow::LogLogPow(r) => r * l.ln(),
            Slow::Divisor => DIVISOR_EXP_CONSTANT * u / l,
            Slow::DivisorExp(b) => b * u / l,
            Slow::SubPower { coef, p } => coef * u.powf(p) / l,
            Slow::SqrtLogLog(c) => c * (l * l.ln().max(1.0)).sqrt(),
            Slow::Const(c) => c,
        }
    }

    /// Upper bound for the derivative on `[u, ∞)`, valid for `u >= e^2`.
    fn slope_bound(&self, u: f64) -> f64 {
        let l = u.ln();
        match *self {
            Slow::LogPow(q) => q.max(0.0) / u,
            Slow::LogLogPow(r) => r.max(0.0) / (u * l),
            // (l-1)/l^2 decreases for l >= 2
            Slow::Divisor => DIVISOR_EXP_CONSTANT * (l - 1.0) / (l * l),
            Slow::DivisorExp(b) => b.max(0.0) * (l - 1.0) / (l * l),
            Slow::SubPower { coef, p } => coef.max(0.0) * p * u.powf(p - 1.0) / l,
            // derivative is at most c/u in both regimes of the max
            Slow::SqrtLogLog(c) => c.max(0.0) / u,
            Slow::Const(_) => 0.0,
        }
    }

    fn scaled(&self, f: f64) -> Slow {
        match *self {
            Slow::LogPow(q) => Slow::LogPow(q * f),
            Slow::LogLogPow(r) => Slow::LogLogPow(r * f),
            // d(k)^f no longer admits the ε-route
            Slow::Divisor => Slow::DivisorExp(DIVISOR_EXP_CONSTANT * f),
            Slow::DivisorExp(b) => Slow::DivisorExp(b * f),
            Slow::SubPower { coef, p } => Slow::SubPower { coef: coef * f, p },
            Slow::SqrtLogLog(c) => Slow::SqrtLogLog(c * f),
            Slow::Const(c) => Slow::Const(c * f),
        }
    }
}

/// `exp(−p u + sum S_i(u))`, an upper bound for a summand at `k = e^u`.
#[derive(Debug, Clone, PartialEq)]
struct Majorant {
    p: f64,
    slow: Vec<Slow>,
}

impl Majorant {
    fn new(p: f64, slow: Vec<Slow>) -> Self {
        Majorant { p, slow }
    }

    fn value(&self, u: f64) -> f64 {
        -self.p * u + self.slow.iter().map(|s| s.value(u)).sum::<f64>()
    }

    fn slope_bound(&self, u: f64) -> f64 {
        -self.p + self.slow.iter().map(|s| s.slope_bound(u)).sum::<f64>()
    }

    /// Multiplies the summand by `k`, i.e. shifts to the `du` measure.
    fn per_log_measure(&self) -> Majorant {
        Majorant::new(self.p - 1.0, self.slow.clone())
    }

    fn scaled(&self, f: f64) -> Majorant {
        Majorant::new(self.p * f, self.slow.iter().map(|s| s.scaled(f)).collect())
    }

    /// `(q, r, ln C)` when only log, log-log and constant factors remain.
    fn polylog(&self) -> Option<(f64, f64, f64)> {
        let (mut q, mut r, mut c) = (0.0, 0.0, 0.0);
        for s in &self.slow {
            match *s {
                Slow::LogPow(x) => q += x,
                Slow::LogLogPow(x) => r += x,
                Slow::Const(x) => c += x,
                _ => return None,
            }
        }
        Some((q, r, c))
    }

    /// Variants with one `d(k)` factor replaced by `C_ε k^ε`.
    fn divisor_variants(&self) -> Vec<Majorant> {
        let mut out = vec![self.clone()];
        let Some(i) = self.slow.iter().position(|s| matches!(s, Slow::Divisor)) else {
            return out;
        };
        let room = self.p - 1.0;
        for eps in [room / 2.0, room / 4.0] {
            if eps < MIN_DIVISOR_EXPONENT {
                continue;
            }
            let Ok(c) = divisor_bound_constant(eps.min(1.0)) else {
                continue;
            };
            let mut slow = self.slow.clone();
            slow[i] = Slow::Const(c.ln());
            out.push(Majorant::new(self.p - eps.min(1.0), slow));
        }
        out
    }
}

/// Upper bound for `sum_{i>=0} exp(E(u0 + i δ))`, `u0 >= e^2`, where `E` is
/// the majorant exponent in the `du` measure.
///
/// Terms are added exactly until the slope bound of `E` turns negative,
/// after which the rest is dominated by a geometric series. With `p = 0`
/// only pure log powers are handled, by comparison with an integral.
fn lattice_tail(e: &Majorant, u0: f64, delta: f64) -> Option<f64> {
    debug_assert!(u0 >= 7.389);
    if e.p == 0.0 {
        let (q, r, _) = e.polylog()?;
        let first = e.value(u0);
        if first > MAX_LOG_TERM {
            return None;
        }
        // nonincreasing E lets the sum be bounded by first term + integral / δ
        let integral_ratio = if q < -1.0 {
            let dp = if r <= 0.0 { -q - 1.0 } else { (-q - 1.0) / 2.0 };
            if r > 0.0 && u0.ln() < r / dp {
                return None;
            }
            u0 / dp
        } else if q == -1.0 && r < -1.0 {
            u0.ln() / (-r - 1.0)
        } else {
            return None;
        };
        return Some(first.exp() * (1.0 + integral_ratio / delta));
    }
    if e.p < 1e-9 {
        return None;
    }
    let mut acc = CompensatedSum::new();
    let mut u = u0;
    for _ in 0..MAX_TAIL_STEPS {
        let v = e.value(u);
        if v > MAX_LOG_TERM {
            return None;
        }
        let d = e.slope_bound(u);
        if d < 0.0 {
            acc.add(v.exp() / (1.0 - (d * delta).exp()));
            return Some(acc.value());
        }
        acc.add(v.exp());
        u += delta;
    }
    None
}

/// Bound on `sum_{k > n} g(k)` for a summand majorant `g = exp(h(ln k))`.
///
/// Needs `g` nonincreasing on `[n, ∞)`. Each dyadic block `(n 2^i, n 2^{i+1}]`
/// holds at most `n 2^i` integers, each at most `g(n 2^i)`, so the tail is
/// at most `sum_i exp(h(u_i) + u_i)` with `u_i = ln n + i ln 2`.
fn series_tail(h: &Majorant, n: u64) -> Option<f64> {
    let u0 = (n as f64).ln();
    if n < TAIL_START || h.slope_bound(u0) > 0.0 {
        return None;
    }
    lattice_tail(&h.per_log_measure(), u0, std::f64::consts::LN_2)
}

fn best_series_tail(h: &Majorant, n: u64) -> Option<f64> {
    h.divisor_variants()
        .iter()
        .filter_map(|m| series_tail(m, n))
        .fold(None, |best: Option<f64>, t| Some(best.map_or(t, |b| b.min(t))))
}

/// Summand minorant `k^{-P} (ln k)^q (ln ln k)^r` up to a positive constant.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Minorant {
    p: f64,
    q: f64,
    r: f64,
}

impl Minorant {
    /// Not summable over `k`.
    fn diverges(&self) -> bool {
        lattice_diverges(self.p - 1.0, self.q, self.r)
    }
}

/// `sum_i exp(−p u_i) u_i^q (ln u_i)^r` over an arithmetic lattice diverges.
fn lattice_diverges(p: f64, q: f64, r: f64) -> bool {
    p < 0.0 || (p == 0.0 && (q > -1.0 || (q == -1.0 && r >= -1.0)))
}

fn verdict_from(tail: Option<f64>, diverges: bool) -> Verdict {
    match (tail, diverges) {
        (Some(t), _) if t.is_finite() => Verdict::Converges,
        (_, true) => Verdict::Diverges,
        _ => Verdict::Undecided,
    }
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// Which arithmetic weight multiplies `c_n^2 (log n)^2` in the divisor
/// criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DivisorMode {
    /// Pillai mean `A(k_n)`.
    A,
    /// Divisor count `d(k_n)`.
    D,
    /// `σ_{1−2s}(k_n)`, `s > 1/2`.
    Sigma { s: f64 },
}

/// The positive nondecreasing `φ` of Bremont's two-series criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi {
    /// `φ ≡ c`
    Constant { c: f64 },
    /// `φ(k) = L(k)`; the borderline case where no combined verdict is
    /// given.
    Log,
    /// `φ(k) = L(k) LL(k)^{1+ε}`
    LogLogLog { eps: f64 },
    /// `φ(1), ..., φ(n)` on the window.
    Table { values: Vec<f64> },
}

impl Phi {
    fn value(&self, k: u64) -> f64 {
        match self {
            Phi::Constant { c } => *c,
            Phi::Log => big_l(k),
            Phi::LogLogLog { eps } => big_l(k) * big_ll(k).powf(1.0 + eps),
            Phi::Table { values } => values[(k - 1) as usize],
        }
    }

    /// `φ(k) = C (ln k)^q (ln ln k)^r` for large `k`, as `(ln C, q, r)`.
    fn shape(&self) -> Option<(f64, f64, f64)> {
        match self {
            Phi::Constant { c } => Some((c.ln(), 0.0, 0.0)),
            Phi::Log => Some((0.0, 1.0, 0.0)),
            Phi::LogLogLog { eps } => Some((0.0, 1.0, 1.0 + eps)),
            Phi::Table { .. } => None,
        }
    }

    fn label(&self) -> String {
        match self {
            Phi::Constant { c } => format!("{c}"),
            Phi::Log => "L(k)".into(),
            Phi::LogLogLog { eps } => format!("L(k) LL(k)^{}", 1.0 + eps),
            Phi::Table { values } => format!("table[{}]", values.len()),
        }
    }
}

/// Evaluates criteria over a fixed window with a shared arithmetic cache.
pub struct Criteria<'a> {
    cache: &'a ArithmeticCache,
    window: u64,
}

struct Spec<'f> {
    name: String,
    weight: String,
    /// `w(k)`; the summand is `c_k^2 w(k)`.
    w: Box<dyn Fn(u64) -> Result<f64> + 'f>,
    /// Majorant of the summand for the closed-form family, `(a, b)` given.
    majorant: Option<Majorant>,
    minorant: Option<Minorant>,
    notes: Vec<String>,
}

const SAMPLE_POINTS: [u64; 6] = [1, 2, 10, 100, 1000, 10_000];

impl<'a> Criteria<'a> {
    /// `window` is where the exact partial sum stops for closed-form
    /// families; it is raised to [`TAIL_START`] when smaller.
    pub fn new(cache: &'a ArithmeticCache, window: u64) -> Result<Self> {
        if window == 0 {
            return Err(Error::domain("window must be positive"));
        }
        Ok(Criteria { cache, window })
    }

    fn window_for(&self, c: &CoefficientFamily) -> u64 {
        match c {
            CoefficientFamily::PowerLog { .. } => self.window.max(TAIL_START),
            CoefficientFamily::Raw { values } => values.len() as u64,
        }
    }

    fn run(&self, c: &CoefficientFamily, spec: Spec<'_>) -> Result<CriterionReport> {
        let n = self.window_for(c);
        let mut acc = CompensatedSum::new();
        for k in 1..=n {
            let ck = c.value(k);
            if ck != 0.0 {
                acc.add(ck * ck * (spec.w)(k)?);
            }
        }
        let weight_samples = SAMPLE_POINTS
            .iter()
            .filter(|&&k| k <= n.max(1))
            .map(|&k| Ok((k, (spec.w)(k)?)))
            .collect::<Result<Vec<_>>>()?;
        let (tail, diverges) = match c {
            CoefficientFamily::Raw { .. } => (None, false),
            CoefficientFamily::PowerLog { .. } => (
                spec.majorant.as_ref().and_then(|m| best_series_tail(m, n)),
                spec.minorant.is_some_and(|m| m.diverges()),
            ),
        };
        Ok(CriterionReport {
            name: spec.name,
            weight: spec.weight,
            weight_samples,
            window: n,
            partial_sum: acc.value(),
            tail_bound: tail,
            verdict: verdict_from(tail, diverges),
            components: Vec::new(),
            notes: spec.notes,
        })
    }

    /// `(2a, −2b)`: exponents of `c_k^2 = k^{-2a} (ln k)^{-2b}`.
    fn square_exponents(c: &CoefficientFamily) -> (f64, f64) {
        c.exponents().map_or((0.0, 0.0), |(a, b)| (2.0 * a, -2.0 * b))
    }

    /// `sum_k c_k^2 L(k)^2`.
    pub fn rademacher_menshov(&self, c: &CoefficientFamily) -> Result<CriterionReport> {
        let (p, q) = Self::square_exponents(c);
        self.run(
            c,
            Spec {
                name: "rademacher_menshov".into(),
                weight: "L(k)^2".into(),
                w: Box::new(|k| Ok(big_l(k).powi(2))),
                majorant: Some(Majorant::new(p, vec![Slow::LogPow(q + 2.0)])),
                minorant: Some(Minorant { p, q: q + 2.0, r: 0.0 }),
                notes: vec![],
            },
        )
    }

    /// `sum_k c_k^2 max(1, log 1/|c_k|)^{1+h} L(k)^{1−h}`, `0 <= h < 1`.
    pub fn tandori(&self, c: &CoefficientFamily, h: f64) -> Result<CriterionReport> {
        if !(0.0..1.0).contains(&h) {
            return Err(Error::domain(format!("Tandori exponent h must lie in [0, 1), got {h}")));
        }
        let (p, q) = Self::square_exponents(c);
        let (mut majorant, mut minorant) = (None, None);
        if let Some((a, b)) = c.exponents() {
            // log 1/c_k = a ln k + b ln L(k); ln ln k / ln k <= 1/e
            let hi = a + b.max(0.0) / std::f64::consts::E;
            let lo = a - (-b).max(0.0) / std::f64::consts::E;
            if a > 0.0 {
                majorant = Some(Majorant::new(
                    p,
                    vec![Slow::LogPow(q + 2.0), Slow::Const((1.0 + h) * hi.ln())],
                ));
            }
            minorant = Some(if lo > 0.0 {
                Minorant { p, q: q + 2.0, r: 0.0 }
            } else {
                Minorant { p, q: q + 1.0 - h, r: 0.0 }
            });
        }
        let cc = c.clone();
        self.run(
            c,
            Spec {
                name: format!("tandori(h={h})"),
                weight: format!("max(1, log 1/|c_k|)^{} L(k)^{}", 1.0 + h, 1.0 - h),
                w: Box::new(move |k| {
                    let v = cc.value(k).abs();
                    let lc = if v > 0.0 { (1.0 / v).ln().max(1.0) } else { 1.0 };
                    Ok(lc.powf(1.0 + h) * big_l(k).powf(1.0 - h))
                }),
                majorant,
                minorant,
                notes: vec![],
            },
        )
    }

    /// `σ_{1−2s}(k)` majorant pieces for `k >= TAIL_START`.
    fn sigma_majorant(s: f64) -> Vec<Slow> {
        if s == 1.0 {
            // Robin: σ_{-1} <= e^γ LL + 0.6483/LL <= 1.95 LL once LL >= 2
            debug_assert!(EULER_GAMMA.exp() + ROBIN_CORRECTION / 4.0 <= ROBIN_FACTOR);
            vec![Slow::LogLogPow(1.0), Slow::Const(ROBIN_FACTOR.ln())]
        } else {
            // σ_{1−2s}(k) <= d(k) for s >= 1/2
            vec![Slow::Divisor]
        }
    }

    /// Both series of Bremont's criterion for `1/2 < s <= 1`:
    /// `sum 1/(k φ(k))` and `sum c_k^2 φ(k) L(k)^2 σ_{1−2s}(k)`.
    ///
    /// Combined verdict: diverges if either diverges, converges if both
    /// converge, undecided otherwise and always for [`Phi::Log`].
    pub fn bremont(&self, c: &CoefficientFamily, s: f64, phi: &Phi) -> Result<CriterionReport> {
        check_bremont_s(s)?;
        let n = self.window_for(c);
        if let Phi::Table { values } = phi {
            if (values.len() as u64) < n {
                return Err(Error::Dimension {
                    expected: n as usize,
                    got: values.len(),
                });
            }
        }
        // positive and nondecreasing on the window
        let mut prev = 0.0;
        for k in 1..=n {
            let v = phi.value(k);
            if !(v > 0.0 && v.is_finite()) || v < prev {
                return Err(Error::Precondition(format!(
                    "phi must be positive and nondecreasing; fails at k = {k}"
                )));
            }
            prev = v;
        }
        let shape = phi.shape();
        // first series does not involve c: evaluate as a closed-form
        // family c ≡ 1 with weight 1/(kφ)
        let unit = CoefficientFamily::PowerLog { a: 0.0, b: 0.0 };
        let phi1 = phi.clone();
        let mut first = self.run(
            &match c {
                CoefficientFamily::Raw { values } => CoefficientFamily::Raw {
                    values: vec![1.0; values.len()],
                },
                _ => unit,
            },
            Spec {
                name: "bremont_phi".into(),
                weight: format!("1/(k phi(k)), phi = {}", phi.label()),
                w: Box::new(move |k| Ok(1.0 / (k as f64 * phi1.value(k)))),
                majorant: shape.map(|(lc, q, r)| {
                    Majorant::new(1.0, vec![Slow::LogPow(-q), Slow::LogLogPow(-r), Slow::Const(-lc)])
                }),
                minorant: shape.map(|(_, q, r)| Minorant { p: 1.0, q: -q, r: -r }),
                notes: vec![],
            },
        )?;
        if matches!(phi, Phi::Table { .. }) {
            first.verdict = Verdict::Undecided;
        }
        let (p, q) = Self::square_exponents(c);
        let cache = self.cache;
        let phi2 = phi.clone();
        let second = self.run(
            c,
            Spec {
                name: "bremont_coefficients".into(),
                weight: format!("phi(k) L(k)^2 sigma_(1-2s)(k), s = {s}"),
                w: Box::new(move |k| {
                    Ok(phi2.value(k) * big_l(k).powi(2) * cache.sigma_alpha(k, 1.0 - 2.0 * s)?)
                }),
                majorant: shape.map(|(lc, pq, pr)| {
                    let mut slow = vec![Slow::LogPow(q + pq + 2.0), Slow::LogLogPow(pr), Slow::Const(lc)];
                    slow.extend(Self::sigma_majorant(s));
                    Majorant::new(p, slow)
                }),
                minorant: shape.map(|(_, pq, pr)| Minorant {
                    p,
                    q: q + pq + 2.0,
                    r: pr,
                }),
                notes: vec![],
            },
        )?;
        let borderline = matches!(phi, Phi::Log);
        let verdict = if borderline {
            Verdict::Undecided
        } else if first.verdict == Verdict::Diverges || second.verdict == Verdict::Diverges {
            Verdict::Diverges
        } else if first.verdict == Verdict::Converges && second.verdict == Verdict::Converges {
            Verdict::Converges
        } else {
            Verdict::Undecided
        };
        let mut notes = Vec::new();
        if borderline {
            notes.push("phi = log k is borderline; no combined verdict".into());
        }
        Ok(CriterionReport {
            name: format!("bremont(s={s})"),
            weight: second.weight.clone(),
            weight_samples: second.weight_samples.clone(),
            window: second.window,
            partial_sum: second.partial_sum,
            tail_bound: match (first.tail_bound, second.tail_bound) {
                (Some(x), Some(y)) if verdict == Verdict::Converges => Some(x.max(y)),
                _ => None,
            },
            verdict,
            components: vec![first, second],
            notes,
        })
    }

    /// `sum c_k^2 exp{(1+ε) L(k)^{2(1−s)} / (2(1−s) LL(k))}`, `1/2 < s < 1`.
    pub fn bremont_conds0(&self, c: &CoefficientFamily, s: f64, eps: f64) -> Result<CriterionReport> {
        if !(s > 0.5 && s < 1.0) {
            return Err(Error::domain(format!("this preset needs 1/2 < s < 1, got {s}")));
        }
        check_eps(eps)?;
        let (p, q) = Self::square_exponents(c);
        let e = 2.0 * (1.0 - s);
        let coef = (1.0 + eps) / e;
        self.run(
            c,
            Spec {
                name: format!("bremont_conds0(s={s},eps={eps})"),
                weight: format!("exp((1+{eps}) L(k)^{e} / ({e} LL(k)))"),
                w: Box::new(move |k| Ok((coef * big_l(k).powf(e) / big_ll(k)).exp())),
                majorant: Some(Majorant::new(p, vec![Slow::LogPow(q), Slow::SubPower { coef, p: e }])),
                minorant: Some(Minorant { p, q, r: 0.0 }),
                notes: vec![],
            },
        )
    }

    /// `sum c_k^2 L(k)^3 LL(k)^{2+ε}`.
    pub fn bremont_conds1(&self, c: &CoefficientFamily, eps: f64) -> Result<CriterionReport> {
        check_eps(eps)?;
        let (p, q) = Self::square_exponents(c);
        self.run(
            c,
            Spec {
                name: format!("bremont_conds1(eps={eps})"),
                weight: format!("L(k)^3 LL(k)^{}", 2.0 + eps),
                w: Box::new(move |k| Ok(big_l(k).powi(3) * big_ll(k).powf(2.0 + eps))),
                majorant: Some(Majorant::new(p, vec![Slow::LogPow(q + 3.0), Slow::LogLogPow(2.0 + eps)])),
                minorant: Some(Minorant { p, q: q + 3.0, r: 2.0 + eps }),
                notes: vec![],
            },
        )
    }

    /// `sum_k c_k^2 exp(2 L(k)/LL(k))` for `k >= 3`, weight 1 below.
    pub fn aistleitner(&self, c: &CoefficientFamily) -> Result<CriterionReport> {
        let (p, q) = Self::square_exponents(c);
        self.run(
            c,
            Spec {
                name: "aistleitner".into(),
                weight: "exp(2 L(k) / LL(k)), k >= 3".into(),
                w: Box::new(|k| Ok(aistleitner_weight(k))),
                majorant: Some(Majorant::new(p, vec![Slow::LogPow(q), Slow::DivisorExp(2.0)])),
                minorant: Some(Minorant { p, q, r: 0.0 }),
                notes: vec![],
            },
        )
    }

    /// `sum_{r>=1} (sum_{2^r < j <= 2^{r+1}} c_j^2 d(j) L(j)^2)^{1/2}`.
    pub fn weber(&self, c: &CoefficientFamily) -> Result<CriterionReport> {
        let n = self.window_for(c);
        // complete blocks inside the window
        let top = 63 - n.leading_zeros() as u64; // 2^top <= n
        let mut acc = CompensatedSum::new();
        let mut last_r = 0;
        for r in 1..top {
            let (lo, hi) = (1u64 << r, 1u64 << (r + 1));
            let mut block = CompensatedSum::new();
            for j in lo + 1..=hi {
                let cj = c.value(j);
                block.add(cj * cj * self.cache.divisor_count(j)? as f64 * big_l(j).powi(2));
            }
            acc.add(block.value().sqrt());
            last_r = r;
        }
        if let CoefficientFamily::Raw { values } = c {
            // a raw vector may end mid-block
            let covered = if last_r == 0 { 2 } else { 1u64 << (last_r + 1) };
            if (values.len() as u64) > covered {
                let mut block = CompensatedSum::new();
                for j in covered + 1..=values.len() as u64 {
                    let cj = c.value(j);
                    block.add(cj * cj * self.cache.divisor_count(j)? as f64 * big_l(j).powi(2));
                }
                acc.add(block.value().sqrt());
            }
        }
        let (p, q) = Self::square_exponents(c);
        let (tail, diverges) = match c {
            CoefficientFamily::Raw { .. } => (None, false),
            CoefficientFamily::PowerLog { .. } => {
                let g = Majorant::new(p, vec![Slow::LogPow(q + 2.0), Slow::Divisor]);
                let start = last_r + 1;
                let u0 = start as f64 * std::f64::consts::LN_2;
                let tail = g
                    .divisor_variants()
                    .iter()
                    .filter(|m| (1u64 << start) >= TAIL_START && m.slope_bound(u0) <= 0.0)
                    // block r: 2^r integers each <= g(2^r); square root halves the exponent
                    .filter_map(|m| lattice_tail(&m.per_log_measure().scaled(0.5), u0, std::f64::consts::LN_2))
                    .fold(None, |b: Option<f64>, t| Some(b.map_or(t, |x| x.min(t))));
                // d >= 1: sqrt(B_r) >= const 2^{r(1−P)/2} r^{q/2+1}
                (tail, lattice_diverges((p - 1.0) / 2.0, (q + 2.0) / 2.0, 0.0))
            }
        };
        let cache = self.cache;
        let weight_samples = SAMPLE_POINTS
            .iter()
            .filter(|&&k| k <= n.max(1))
            .map(|&k| Ok((k, cache.divisor_count(k)? as f64 * big_l(k).powi(2))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CriterionReport {
            name: "weber".into(),
            weight: "d(j) L(j)^2, square-rooted per dyadic block".into(),
            weight_samples,
            window: n,
            partial_sum: acc.value(),
            tail_bound: tail,
            verdict: verdict_from(tail, diverges),
            components: Vec::new(),
            notes: vec![],
        })
    }

    /// `sum_n c_n^2 W(k_n) (log n)^2` with `W` picked by `mode`.
    ///
    /// Verdicts need `K = {1, ..., N}` so that `k_n = n`; any other set is
    /// reported as a partial sum only.
    pub fn divisor_criteria(
        &self,
        c: &CoefficientFamily,
        k_set: &IndexSet,
        mode: DivisorMode,
    ) -> Result<CriterionReport> {
        if let DivisorMode::Sigma { s } = mode {
            if !(s.is_finite() && s > 0.5) {
                return Err(Error::domain(format!("sigma mode needs s > 1/2, got {s}")));
            }
        }
        if let CoefficientFamily::Raw { values } = c {
            if values.len() != k_set.len() {
                return Err(Error::usage(format!(
                    "{} coefficients for {} indices",
                    values.len(),
                    k_set.len()
                )));
            }
        }
        let n = k_set.len() as u64;
        let is_initial = k_set.elements().iter().enumerate().all(|(i, &k)| k == i as u64 + 1);
        let cache = self.cache;
        let el = k_set.elements().to_vec();
        let weight = move |kn: u64| -> Result<f64> {
            Ok(match mode {
                DivisorMode::A => cache.pillai_mean(kn)?,
                DivisorMode::D => cache.divisor_count(kn)? as f64,
                DivisorMode::Sigma { s } => cache.sigma_alpha(kn, 1.0 - 2.0 * s)?,
            })
        };
        let mut acc = CompensatedSum::new();
        for (i, &kn) in el.iter().enumerate() {
            let idx = i as u64 + 1;
            let cn = c.value(idx);
            if cn != 0.0 {
                acc.add(cn * cn * weight(kn)? * index_log_sq(idx));
            }
        }
        let (p, q) = Self::square_exponents(c);
        let mut notes = Vec::new();
        let (tail, diverges) = match c {
            CoefficientFamily::PowerLog { .. } if is_initial && n >= TAIL_START => {
                let mut slow = vec![Slow::LogPow(q + 2.0)];
                match mode {
                    // A(k) <= d(k)
                    DivisorMode::A | DivisorMode::D => slow.push(Slow::Divisor),
                    DivisorMode::Sigma { s } if s >= 1.0 => {
                        if s == 1.0 {
                            slow.extend(Self::sigma_majorant(1.0));
                        } else {
                            // σ_{1−2s}(k) <= ζ(2s−1) is not needed; σ <= d suffices
                            slow.push(Slow::Divisor);
                        }
                    }
                    DivisorMode::Sigma { .. } => slow.push(Slow::Divisor),
                }
                let tail = best_series_tail(&Majorant::new(p, slow), n);
                (tail, Minorant { p, q: q + 2.0, r: 0.0 }.diverges())
            }
            CoefficientFamily::PowerLog { .. } => {
                notes.push("verdicts need K = {1..N} with N >= 1619".into());
                (None, false)
            }
            CoefficientFamily::Raw { .. } => (None, false),
        };
        let label = match mode {
            DivisorMode::A => "A(k_n)".to_string(),
            DivisorMode::D => "d(k_n)".to_string(),
            DivisorMode::Sigma { s } => format!("sigma_(1-2s)(k_n), s = {s}"),
        };
        let weight_samples = SAMPLE_POINTS
            .iter()
            .filter(|&&i| i <= n)
            .map(|&i| Ok((i, weight(el[i as usize - 1])? * index_log_sq(i))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CriterionReport {
            name: format!("divisor_{}", match mode {
                DivisorMode::A => "a",
                DivisorMode::D => "d",
                DivisorMode::Sigma { .. } => "sigma",
            }),
            weight: format!("{label} (log n)^2"),
            weight_samples,
            window: n,
            partial_sum: acc.value(),
            tail_bound: tail,
            verdict: verdict_from(tail, diverges),
            components: Vec::new(),
            notes,
        })
    }

    fn profile_series(
        &self,
        profile: &FourierProfile,
        name: String,
        weight: String,
        w: &dyn Fn(u64) -> Result<f64>,
        extra: Vec<Slow>,
    ) -> Result<CriterionReport> {
        let (terms, majorant, window): (Vec<(u64, f64)>, Option<Majorant>, u64) = match profile {
            FourierProfile::Explicit { terms } => (terms.clone(), None, profile.max_frequency()),
            FourierProfile::PowerLawSine { s, truncation } => {
                let n = (*truncation).max(TAIL_START);
                let t = (1..=n).map(|j| (j, (j as f64).powf(-s))).collect();
                let mut slow = extra;
                slow.push(Slow::LogPow(0.0));
                (t, Some(Majorant::new(2.0 * s, slow)), n)
            }
        };
        let mut acc = CompensatedSum::new();
        for &(nu, a) in terms.iter().rev() {
            acc.add(a * a * w(nu)?);
        }
        let tail = majorant.as_ref().and_then(|m| best_series_tail(m, window));
        // weights are >= 1; a_ν^2 = ν^{-2s} with s > 1/2 never diverges here
        let weight_samples = SAMPLE_POINTS
            .iter()
            .filter(|&&k| k <= window.max(1))
            .map(|&k| Ok((k, w(k)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CriterionReport {
            name,
            weight,
            weight_samples,
            window,
            partial_sum: acc.value(),
            tail_bound: tail,
            verdict: verdict_from(tail, false),
            components: Vec::new(),
            notes: if profile.is_explicit() {
                vec!["explicit coefficients are a finite window; no verdict".into()]
            } else {
                vec![]
            },
        })
    }

    /// `sum_ν a_ν^2 Δ(ν)` with the Erdős–Hooley `Δ`.
    pub fn hooley(&self, profile: &FourierProfile) -> Result<CriterionReport> {
        let cache = self.cache;
        self.profile_series(
            profile,
            "hooley".into(),
            "Delta(nu)".into(),
            &|nu| Ok(cache.erdos_hooley_delta(nu)? as f64),
            // Δ <= d
            vec![Slow::Divisor],
        )
    }

    /// `sum_ν a_ν^2 exp(c sqrt(LL(ν) LLL(ν)))`; `c` has no default.
    pub fn hooley1(&self, profile: &FourierProfile, c: f64) -> Result<CriterionReport> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("the constant c must be positive, got {c}")));
        }
        self.profile_series(
            profile,
            format!("hooley1(c={c})"),
            format!("exp({c} sqrt(LL(nu) LLL(nu)))"),
            &|nu| Ok(hooley1_weight(nu, c)),
            vec![Slow::SqrtLogLog(c)],
        )
    }
}

pub fn aistleitner_weight(k: u64) -> f64 {
    if k < 3 {
        1.0
    } else {
        (2.0 * big_l(k) / big_ll(k)).exp()
    }
}

pub fn hooley1_weight(nu: u64, c: f64) -> f64 {
    (c * (big_ll(nu) * big_lll(nu)).sqrt()).exp()
}

fn check_bremont_s(s: f64) -> Result<()> {
    if s > 0.5 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("Bremont's criterion needs 1/2 < s <= 1, got {s}")))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("eps must be positive, got {eps}")))
    }
}

/// Majorizing-measure characterisation of a.e. convergence: not
/// implemented. The condition quantifies over all probability measures on
/// the index set, which no finite computation can range over; this stub
/// always returns a usage error.
pub fn paszkiewicz_majorizing_measure() -> Result<CriterionReport> {
    Err(Error::usage(
        "the majorizing-measure criterion quantifies over measures and is not evaluated",
    ))
}

/// Comparison table: one row per `(family, criterion)`.
pub fn comparison_csv(rows: &[(String, CriterionReport)]) -> String {
    let mut out = String::from("family,criterion,w(2),w(10),w(100),w(1000),window,partial_sum,tail,verdict\n");
    for (family, r) in rows {
        let sample = |k: u64| {
            r.weight_samples
                .iter()
                .find(|s| s.0 == k)
                .map_or_else(|| "NA".to_string(), |s| format_float(s.1))
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            csv_field(family),
            csv_field(&r.name),
            sample(2),
            sample(10),
            sample(100),
            sample(1000),
            r.window,
            format_float(r.partial_sum),
            r.tail_bound.map_or_else(|| "NA".to_string(), format_float),
            r.verdict.as_str()
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// Profile regularity
// ---------------------------------------------------------------------------

/// `L = sum_v M^v sup_{M^v <= j < M^{v+1}} a_j^2`.
///
/// Explicit profiles are summed exactly. A power-law profile is treated as
/// the full infinite series `a_j = j^{-s}`: bands are summed until `M^v`
/// passes `2^50`, then closed with `sum_v M^{v(1−2s)}`, which is exact for
/// integer `M` and an overestimate otherwise.
pub fn profile_regularity_l(profile: &FourierProfile, m: f64) -> Result<f64> {
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::domain(format!("M must exceed 1, got {m}")));
    }
    match profile {
        FourierProfile::Explicit { terms } => {
            let mut bands: Vec<(u32, f64)> = Vec::new();
            for &(j, a) in terms {
                let v = geometric_band(j, m);
                match bands.last_mut() {
                    Some(b) if b.0 == v => b.1 = b.1.max(a * a),
                    _ => bands.push((v, a * a)),
                }
            }
            let mut acc = CompensatedSum::new();
            for (v, sup) in bands {
                acc.add(m.powi(v as i32) * sup);
            }
            Ok(acc.value())
        }
        FourierProfile::PowerLawSine { s, .. } => {
            let ratio = m.powf(1.0 - 2.0 * s);
            let mut acc = CompensatedSum::new();
            let mut v = 0i32;
            while m.powi(v) < 2f64.powi(50) {
                let lo = m.powi(v).ceil();
                if lo < m.powi(v + 1) {
                    acc.add(m.powi(v) * lo.powf(-2.0 * s));
                }
                v += 1;
            }
            acc.add(ratio.powi(v) / (1.0 - ratio));
            Ok(acc.value())
        }
    }
}

/// Nonincreasing majorant `ε(j)` used to split a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsFamily {
    /// `ε(j) = j^{-β}`, `β >= 0`
    Power { beta: f64 },
    /// `ε(j) = ρ^j`, `0 < ρ <= 1`
    Geometric { rho: f64 },
    /// `ε(1), ..., ε(n)`
    Table { values: Vec<f64> },
}

impl EpsFamily {
    fn at(&self, x: f64) -> f64 {
        match self {
            EpsFamily::Power { beta } => x.powf(-beta),
            EpsFamily::Geometric { rho } => rho.powf(x),
            EpsFamily::Table { values } => {
                let i = x.ceil() as usize;
                values.get(i.saturating_sub(1)).copied().unwrap_or(f64::NAN)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            EpsFamily::Power { beta } => beta.is_finite() && *beta >= 0.0,
            EpsFamily::Geometric { rho } => *rho > 0.0 && *rho <= 1.0,
            EpsFamily::Table { values } => {
                values.iter().all(|v| v.is_finite() && *v > 0.0) && values.windows(2).all(|w| w[1] <= w[0])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("eps must be positive and nonincreasing: {self:?}")))
        }
    }
}

/// Block markers `j_1 < j_2 < ...` for the `B` sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Markers {
    /// `j_r = M^r`, `r >= 1`
    Geometric { m: f64 },
    Explicit { values: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSplit {
    /// `|a_l| > ε(l)`
    pub flat: Vec<(u64, f64)>,
    pub sharp: Vec<(u64, f64)>,
    /// `sum |a_l|` over the flat part, in the window.
    pub a_sum: f64,
    /// Bound on the flat mass beyond the window, when known.
    pub a_tail: Option<f64>,
    /// `sum_r j_{r+1}^{1/2} ε(j_r)` over marker pairs inside the window.
    pub b: f64,
    pub b_tail: Option<f64>,
    /// `sum_{j <= window} ε(j)^2`
    pub b1: f64,
    pub b1_tail: Option<f64>,
}

impl ProfileSplit {
    pub fn a_finite(&self) -> bool {
        self.a_tail.is_some_and(f64::is_finite)
    }
    pub fn b_finite(&self) -> bool {
        self.b_tail.is_some_and(f64::is_finite)
    }
    pub fn b1_finite(&self) -> bool {
        self.b1_tail.is_some_and(f64::is_finite)
    }
}

/// Splits `a` into `a♭` (`|a_l| > ε(l)`) and `a♯`, and evaluates `A`, `B`
/// and `B_1` with closed-form tails where the families allow.
pub fn split_flat_sharp(profile: &FourierProfile, eps: &EpsFamily, markers: &Markers) -> Result<ProfileSplit> {
    eps.validate()?;
    let window = profile.max_frequency().max(1);
    if let EpsFamily::Table { values } = eps {
        if (values.len() as u64) < window {
            return Err(Error::Dimension {
                expected: window as usize,
                got: values.len(),
            });
        }
    }
    let (mut flat, mut sharp) = (Vec::new(), Vec::new());
    for (j, a) in profile.coefficients() {
        if a.abs() > eps.at(j as f64) {
            flat.push((j, a));
        } else {
            sharp.push((j, a));
        }
    }
    let mut a_acc = CompensatedSum::new();
    for &(_, a) in flat.iter().rev() {
        a_acc.add(a.abs());
    }
    let wf = window as f64;
    let a_tail = match (profile, eps) {
        (FourierProfile::Explicit { .. }, _) => Some(0.0),
        (FourierProfile::PowerLawSine { s, .. }, EpsFamily::Power { beta }) => Some(if s >= beta {
            0.0
        } else if *s > 1.0 {
            wf.powf(1.0 - s) / (s - 1.0)
        } else {
            f64::INFINITY
        }),
        (FourierProfile::PowerLawSine { s, .. }, EpsFamily::Geometric { .. }) => Some(if *s > 1.0 {
            wf.powf(1.0 - s) / (s - 1.0)
        } else {
            f64::INFINITY
        }),
        _ => None,
    };
    let mut b1_acc = CompensatedSum::new();
    for j in (1..=window).rev() {
        b1_acc.add(eps.at(j as f64).powi(2));
    }
    let b1_tail = match eps {
        EpsFamily::Power { beta } if *beta > 0.5 => Some(wf.powf(1.0 - 2.0 * beta) / (2.0 * beta - 1.0)),
        EpsFamily::Power { .. } => Some(f64::INFINITY),
        EpsFamily::Geometric { rho } if *rho < 1.0 => Some(rho.powf(2.0 * (wf + 1.0)) / (1.0 - rho * rho)),
        EpsFamily::Geometric { .. } => Some(f64::INFINITY),
        EpsFamily::Table { .. } => None,
    };
    let (b, b_tail) = match markers {
        Markers::Explicit { values } => {
            if values.windows(2).any(|w| w[1] <= w[0]) || values.first() == Some(&0) {
                return Err(Error::Precondition("markers must be positive and strictly increasing".into()));
            }
            let mut acc = CompensatedSum::new();
            for w in values.windows(2).filter(|w| w[1] <= window) {
                acc.add((w[1] as f64).sqrt() * eps.at(w[0] as f64));
            }
            (acc.value(), None)
        }
        Markers::Geometric { m } => {
            if !(m.is_finite() && *m > 1.0) {
                return Err(Error::domain(format!("marker ratio must exceed 1, got {m}")));
            }
            let mut acc = CompensatedSum::new();
            let mut r = 1i32;
            while m.powi(r + 1) <= wf {
                acc.add(m.powi(r + 1).sqrt() * eps.at(m.powi(r)));
                r += 1;
            }
            // remaining terms start at index r
            let tail = match eps {
                EpsFamily::Power { beta } => {
                    let q = m.powf(0.5 - beta);
                    Some(if q < 1.0 {
                        m.sqrt() * q.powi(r) / (1.0 - q)
                    } else {
                        f64::INFINITY
                    })
                }
                EpsFamily::Geometric { rho } if *rho < 1.0 => {
                    // consecutive ratio sqrt(M) ρ^{M^{r+1} − M^r} decreases in r and
                    // tends to 0; logs keep underflowing terms from giving 0/0
                    let log_term = |r: i32| 0.5 * (r + 1) as f64 * m.ln() + m.powi(r) * rho.ln();
                    let mut extra = CompensatedSum::new();
                    let mut r = r;
                    loop {
                        let log_ratio = log_term(r + 1) - log_term(r);
                        if log_ratio < 0.0 {
                            extra.add(log_term(r).exp() / (1.0 - log_ratio.exp()));
                            break;
                        }
                        extra.add(log_term(r).exp());
                        r += 1;
                    }
                    Some(extra.value())
                }
                EpsFamily::Geometric { .. } => Some(f64::INFINITY),
                EpsFamily::Table { .. } => None,
            };
            (acc.value(), tail)
        }
    };
    Ok(ProfileSplit {
        flat,
        sharp,
        a_sum: a_acc.value(),
        a_tail,
        b,
        b_tail,
        b1: b1_acc.value(),
        b1_tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipCounterexample {
    pub alpha: f64,
    pub shift: f64,
    /// `ψ(r) 2^{-r/2}` nonincreasing and `ψ(r) 2^{αr}` increasing on the
    /// blocks built.
    pub psi_conditions: bool,
    pub profile: FourierProfile,
    /// `ε(1), ..., ε(2^{R+1})`
    pub eps: Vec<f64>,
    /// Flat mass `sum_{|a_j| > ε(j)} |a_j|`.
    pub a_sum: f64,
    /// `sum ε(j)^2` over the window and a bound on the rest.
    pub b1: f64,
    pub b1_tail: f64,
    /// `(r, sum_{2^r < j <= 2^{r+1}} |a_j| / 2^{r(1/2 − α)})` for even `r`.
    /// A function in `Lip_α` keeps these bounded.
    pub block_ratios: Vec<(u32, f64)>,
    pub ratios_increasing: bool,
}

/// Builds a profile meeting `A < ∞`, `B_1 < ∞` whose dyadic `L^1` masses
/// outgrow the `Lip_α` rate.
///
/// `ψ(r) = (r + shift) 2^{-αr}`. On even blocks `2^r < j <= 2^{r+1}` both
/// `a_j` and `ε(j)` equal `ψ(r) 2^{-r/2}`; odd blocks carry `a_j = 0` and
/// let `ε` fall linearly between its neighbours.
pub fn lip_counterexample(alpha: f64, shift: f64, max_block: u32) -> Result<LipCounterexample> {
    if !(alpha > 0.0 && alpha.is_finite() && shift > 0.0 && shift.is_finite()) {
        return Err(Error::domain("alpha and shift must be positive"));
    }
    if !(2..=24).contains(&max_block) {
        return Err(Error::domain("max_block must lie in 2..=24"));
    }
    let psi = |r: u32| (r as f64 + shift) * 2f64.powf(-alpha * r as f64);
    let level = |r: u32| psi(r) * 2f64.powf(-(r as f64) / 2.0);
    let psi_conditions = (0..=max_block + 1).all(|r| {
        level(r + 1) <= level(r) && psi(r + 1) * 2f64.powf(alpha * (r + 1) as f64) > psi(r) * 2f64.powf(alpha * r as f64)
    });
    let top = 1u64 << (max_block + 1);
    let even_level = |r: u32| if r % 2 == 0 { level(r) } else { level(r - 1) };
    let mut eps = vec![0.0; top as usize];
    let mut terms = Vec::new();
    eps[0] = level(0);
    for r in 0..=max_block {
        let (lo, hi) = (1u64 << r, 1u64 << (r + 1));
        for j in lo + 1..=hi {
            let e = if r % 2 == 0 {
                terms.push((j, level(r)));
                level(r)
            } else {
                // linear from the previous even level at 2^r to the next at 2^{r+1}
                let t = (j - lo) as f64 / (hi - lo) as f64;
                (1.0 - t) * even_level(r - 1) + t * level(r + 1)
            };
            eps[j as usize - 1] = e;
        }
    }
    let profile = FourierProfile::explicit(terms)?;
    let split = split_flat_sharp(
        &profile,
        &EpsFamily::Table { values: eps.clone() },
        &Markers::Geometric { m: 2.0 },
    )?;
    // beyond the window: sum ε^2 <= 3 sum_{r > R} ψ(r)^2, and ψ^2 decays
    // geometrically once ((r+1+shift)/(r+shift))^2 2^{-2α} < 1
    let r0 = max_block + 1;
    let q = ((r0 as f64 + 1.0 + shift) / (r0 as f64 + shift)).powi(2) * 2f64.powf(-2.0 * alpha);
    let b1_tail = if q < 1.0 {
        3.0 * psi(r0).powi(2) / (1.0 - q)
    } else {
        f64::INFINITY
    };
    let block_ratios: Vec<(u32, f64)> = (0..=max_block)
        .step_by(2)
        .map(|r| {
            let (lo, hi) = (1u64 << r, 1u64 << (r + 1));
            let mass: f64 = profile
                .coefficients()
                .iter()
                .filter(|t| t.0 > lo && t.0 <= hi)
                .map(|t| t.1.abs())
                .sum();
            (r, mass / 2f64.powf(r as f64 * (0.5 - alpha)))
        })
        .collect();
    let ratios_increasing = block_ratios.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(LipCounterexample {
        alpha,
        shift,
        psi_conditions,
        profile,
        eps,
        a_sum: split.a_sum,
        b1: split.b1,
        b1_tail,
        block_ratios,
        ratios_increasing,
    })
}
