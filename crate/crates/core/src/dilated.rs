//! Dilated sums `sum_k c_k f(k x)`.
//!
//! Conventions: explicit profiles are read on the exponential system
//! `e_j(x) = exp(2πi j x)`, so the collision count below is Parseval
//! exactly. Sampling and quadrature use real sines `a_j sin(2π j x)`, whose
//! squares integrate to 1/2; hence an exponential-basis norm is
//! [`SINE_GRAM_FACTOR`] times the matching sine-basis integral. The power-law
//! inner product `zeta(2s) (k,l)^{2s}/(k l)^s` is on the exponential scale.

use std::fmt::Write as _;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::ntheory::zeta;
use crate::numerics::{format_float, gcd, geometric_band, pairwise_sum, CompensatedSum};
use crate::sequences::{dyadic_blocks, IndexSet};
use crate::spectral::{build_gcd_matrix, quadratic_form};
use crate::{Error, Result};

/// Exponential-basis norm divided by sine-basis integral.
pub const SINE_GRAM_FACTOR: f64 = 2.0;

/// Relative slack used when checking the band sandwich in floating point.
pub const SANDWICH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FourierProfile {
    /// `a_j = j^{-s}` for `1 <= j <= truncation`.
    PowerLawSine { s: f64, truncation: u64 },
    /// Finitely many `(j, a_j)`, `j >= 1`, strictly increasing in `j`,
    /// all coefficients nonzero.
    Explicit { terms: Vec<(u64, f64)> },
}

impl FourierProfile {
    pub fn power_law_sine(s: f64, truncation: u64) -> Result<Self> {
        if !(s.is_finite() && s > 0.5) {
            return Err(Error::domain(format!("power-law profile needs s > 1/2, got {s}")));
        }
        if truncation == 0 {
            return Err(Error::domain("truncation must be at least 1"));
        }
        Ok(FourierProfile::PowerLawSine { s, truncation })
    }

    /// Zero coefficients are dropped; frequency 0 and repeated frequencies
    /// are rejected.
    pub fn explicit(terms: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut t: Vec<(u64, f64)> = terms.into_iter().collect();
        t.sort_by_key(|p| p.0);
        for w in t.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::domain(format!("frequency {} given twice", w[0].0)));
            }
        }
        if let Some(&(j, a)) = t.iter().find(|&&(j, a)| j == 0 || !a.is_finite()) {
            return Err(Error::domain(format!(
                "bad profile term ({j}, {a}): frequencies start at 1, coefficients are finite"
            )));
        }
        t.retain(|p| p.1 != 0.0);
        Ok(FourierProfile::Explicit { terms: t })
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, FourierProfile::Explicit { .. })
    }

    /// `(j, a_j)` pairs with nonzero coefficient, increasing in `j`.
    pub fn coefficients(&self) -> Vec<(u64, f64)> {
        match self {
            FourierProfile::PowerLawSine { s, truncation } => {
                (1..=*truncation).map(|j| (j, (j as f64).powf(-s))).collect()
            }
            FourierProfile::Explicit { terms } => terms.clone(),
        }
    }

    /// The explicit profile holding the same finitely many coefficients.
    pub fn truncated(&self) -> FourierProfile {
        FourierProfile::Explicit {
            terms: self.coefficients(),
        }
    }

    pub fn max_frequency(&self) -> u64 {
        match self {
            FourierProfile::PowerLawSine { truncation, .. } => *truncation,
            FourierProfile::Explicit { terms } => terms.last().map_or(0, |t| t.0),
        }
    }

    /// `sum_j a_j^2`.
    pub fn energy(&self) -> f64 {
        pairwise_sum(&self.coefficients().iter().map(|t| t.1 * t.1).collect::<Vec<_>>())
    }

    fn constant_sign(&self) -> bool {
        let c = self.coefficients();
        c.iter().all(|t| t.1 >= 0.0) || c.iter().all(|t| t.1 <= 0.0)
    }
}

/// Finite coefficients `c_1..c_n` attached to the elements of an index set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSeq {
    values: Vec<f64>,
    constant_sign: bool,
}

impl CoefficientSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("coefficient {v} is not finite")));
        }
        let constant_sign = values.iter().all(|&v| v >= 0.0) || values.iter().all(|&v| v <= 0.0);
        Ok(CoefficientSeq {
            values,
            constant_sign,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn constant_sign(&self) -> bool {
        self.constant_sign
    }

    pub fn norm_sq(&self) -> f64 {
        pairwise_sum(&self.values.iter().map(|v| v * v).collect::<Vec<_>>())
    }
}

fn check_len(k: &IndexSet, c: &CoefficientSeq) -> Result<()> {
    if k.len() == c.len() {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: k.len(),
            got: c.len(),
        })
    }
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!("exponent s must exceed 1/2, got {s}")))
    }
}

fn explicit_terms(profile: &FourierProfile) -> Result<&[(u64, f64)]> {
    match profile {
        FourierProfile::Explicit { terms } => Ok(terms),
        FourierProfile::PowerLawSine { .. } => Err(Error::usage(
            "collision counting needs an explicit profile; truncate the power law first",
        )),
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// `<f_k, f_l> = zeta(2s) (k,l)^{2s} / (k l)^s` for `a_j = j^{-s}`.
pub fn inner_product_powerlaw(k: u64, l: u64, s: f64) -> Result<f64> {
    check_s(s)?;
    if k == 0 || l == 0 {
        return Err(Error::domain("dilation factors are positive"));
    }
    let g = gcd(k, l) as f64;
    Ok(zeta(2.0 * s)? * ((g / k as f64) * (g / l as f64)).powf(s))
}

/// `‖sum c_k f_k‖² = zeta(2s) cᵀ M(K, s) c`.
pub fn norm_sq_powerlaw(k: &IndexSet, c: &CoefficientSeq, s: f64) -> Result<f64> {
    check_s(s)?;
    check_len(k, c)?;
    Ok(zeta(2.0 * s)? * quadratic_form(&build_gcd_matrix(k, s)?, c.values())?)
}

// ---------------------------------------------------------------------------
// Collision counting
// ---------------------------------------------------------------------------

/// Amplitude `sum_{k j = ν} c_k a_j` of every product frequency `ν`, in
/// increasing `ν`. Within one `ν` the contributions are summed pairwise in
/// `(k, j)` order.
pub fn collision_amplitudes(
    k: &IndexSet,
    c: &CoefficientSeq,
    terms: &[(u64, f64)],
) -> Result<Vec<(u64, f64)>> {
    check_len(k, c)?;
    let mut raw: Vec<(u64, f64)> = Vec::with_capacity(k.len() * terms.len());
    for (&kk, &ck) in k.elements().iter().zip(c.values()) {
        if ck == 0.0 {
            continue;
        }
        for &(j, a) in terms {
            let nu = kk
                .checked_mul(j)
                .ok_or_else(|| Error::Numeric(format!("frequency {kk}·{j} overflows u64")))?;
            raw.push((nu, ck * a));
        }
    }
    // stable: ties keep (k, j) order
    raw.sort_by_key(|p| p.0);
    let mut out = Vec::new();
    let mut i = 0;
    let mut buf = Vec::new();
    while i < raw.len() {
        let nu = raw[i].0;
        buf.clear();
        while i < raw.len() && raw[i].0 == nu {
            buf.push(raw[i].1);
            i += 1;
        }
        out.push((nu, pairwise_sum(&buf)));
    }
    Ok(out)
}

fn energy_of(amps: &[(u64, f64)]) -> f64 {
    pairwise_sum(&amps.iter().map(|a| a.1 * a.1).collect::<Vec<_>>())
}

/// `‖sum_k c_k sum_j a_j e_{kj}‖²`, exactly, by grouping equal products
/// `k j`.
pub fn exact_norm_collisions(k: &IndexSet, c: &CoefficientSeq, profile: &FourierProfile) -> Result<f64> {
    Ok(energy_of(&collision_amplitudes(k, c, explicit_terms(profile)?)?))
}

/// `<g, h>` for two amplitude lists, merged on frequency. Also returns how
/// many frequencies the two share.
pub fn amplitude_inner(a: &[(u64, f64)], b: &[(u64, f64)]) -> (f64, usize) {
    let (mut i, mut j) = (0, 0);
    let mut terms = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                terms.push(a[i].1 * b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    (pairwise_sum(&terms), terms.len())
}

/// How the geometric bands `[M^v, M^{v+1})` cut a dilated sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Banding {
    /// Band on the profile frequency `j`:
    /// `T_K(v) = sum_k c_k sum_{j in band v} a_j e_{kj}`.
    Profile,
    /// Band on the product frequency `ν = k j`. Bands are then mutually
    /// orthogonal and their energies add up to the total.
    Product,
}

fn check_ratio(m: f64, what: &str) -> Result<()> {
    if m.is_finite() && m > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must exceed 1, got {m}")))
    }
}

/// Amplitudes of the band operator `T_K(v)`.
pub fn band_amplitudes(
    k: &IndexSet,
    c: &CoefficientSeq,
    profile: &FourierProfile,
    m: f64,
    v: u32,
    banding: Banding,
) -> Result<Vec<(u64, f64)>> {
    check_ratio(m, "band ratio M")?;
    let terms = explicit_terms(profile)?;
    match banding {
        Banding::Profile => {
            let sel: Vec<(u64, f64)> =
                terms.iter().copied().filter(|t| geometric_band(t.0, m) == v).collect();
            collision_amplitudes(k, c, &sel)
        }
        Banding::Product => Ok(collision_amplitudes(k, c, terms)?
            .into_iter()
            .filter(|t| geometric_band(t.0, m) == v)
            .collect()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockEnergies {
    pub banding: Banding,
    /// `(v, ‖T_K(v)‖²)` for every nonempty band.
    pub bands: Vec<(u32, f64)>,
    pub band_sum: f64,
    pub total: f64,
    /// `K_+ <= M K_-`: bands two or more apart are orthogonal, which gives
    /// `total <= 3 band_sum`.
    pub orthogonality_hypothesis: bool,
    /// `Some` when the upper inequality is asserted.
    pub upper_holds: Option<bool>,
    /// `Some` when `c` and `a` both have constant sign, so every cross
    /// term is nonnegative and `band_sum <= total`.
    pub lower_holds: Option<bool>,
}

/// Energies of the band operators and the total `‖sum c_k f_k‖²`.
///
/// With [`Banding::Product`] the bands partition the spectrum, so both
/// inequalities hold with equality. With [`Banding::Profile`] the upper
/// bound `total <= 3 band_sum` is asserted only under the orthogonality
/// hypothesis `K_+ <= M K_-`, and the lower bound only for constant signs.
pub fn block_operator_energies(
    k: &IndexSet,
    c: &CoefficientSeq,
    profile: &FourierProfile,
    m: f64,
    banding: Banding,
) -> Result<BlockEnergies> {
    check_ratio(m, "band ratio M")?;
    let terms = explicit_terms(profile)?;
    let total_amps = collision_amplitudes(k, c, terms)?;
    let total = energy_of(&total_amps);
    let mut bands: Vec<(u32, f64)> = Vec::new();
    match banding {
        Banding::Profile => {
            let mut start = 0;
            while start < terms.len() {
                let v = geometric_band(terms[start].0, m);
                let mut end = start;
                while end < terms.len() && geometric_band(terms[end].0, m) == v {
                    end += 1;
                }
                bands.push((v, energy_of(&collision_amplitudes(k, c, &terms[start..end])?)));
                start = end;
            }
        }
        Banding::Product => {
            for &(nu, amp) in &total_amps {
                let v = geometric_band(nu, m);
                match bands.last_mut() {
                    Some(b) if b.0 == v => b.1 += amp * amp,
                    _ => bands.push((v, amp * amp)),
                }
            }
        }
    }
    let band_sum = pairwise_sum(&bands.iter().map(|b| b.1).collect::<Vec<_>>());
    let orthogonality_hypothesis = match (k.k_minus(), k.k_plus()) {
        (Some(lo), Some(hi)) => hi as f64 <= m * lo as f64,
        _ => true,
    };
    let tol = SANDWICH_SLACK * band_sum.max(total);
    let upper = total <= 3.0 * band_sum + tol;
    let lower = band_sum <= total + tol;
    let (upper_holds, lower_holds) = match banding {
        Banding::Product => (Some(upper), Some(lower)),
        Banding::Profile => (
            orthogonality_hypothesis.then_some(upper),
            (c.constant_sign() && profile.constant_sign()).then_some(lower),
        ),
    };
    Ok(BlockEnergies {
        banding,
        bands,
        band_sum,
        total,
        orthogonality_hypothesis,
        upper_holds,
        lower_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareAudit {
    /// `(j, ‖sum_{k in N_j} c_k f_k‖²)` over the nonempty blocks
    /// `N_j = N ∩ [μ^j, μ^{j+1})`.
    pub blocks: Vec<(u32, f64)>,
    pub sum_sq: f64,
    pub coefficient_norm: f64,
    /// `sqrt(sum_sq) / ‖c‖₂`
    pub c_emp: f64,
    /// Profile regularity `sum_v M^v sup_{band v} a_j²`.
    pub regularity: f64,
    /// Constant signs give `sum_sq >= ‖a‖² ‖c‖²`, since every cross term
    /// is nonnegative. `None` otherwise.
    pub lower_holds: Option<bool>,
}

/// Exact energies of the block differences `S_{μ^{j+1}} − S_{μ^j}` of the
/// dilated sum over `n_set`, and the empirical constant `C_emp`.
pub fn square_theorem_audit(
    n_set: &IndexSet,
    c: &CoefficientSeq,
    profile: &FourierProfile,
    mu: f64,
    m: f64,
) -> Result<SquareAudit> {
    check_len(n_set, c)?;
    check_ratio(mu, "block ratio mu")?;
    let regularity = crate::criteria::profile_regularity_l(profile, m)?;
    let coefficient_norm = c.norm_sq().sqrt();
    if coefficient_norm == 0.0 {
        return Err(Error::usage("all coefficients are zero; the ratio is undefined"));
    }
    let terms = explicit_terms(profile)?;
    let mut blocks = Vec::new();
    for b in dyadic_blocks(n_set, mu)? {
        let cs: Vec<f64> = b
            .members
            .elements()
            .iter()
            .map(|&k| c.values()[n_set.position(k).expect("block member")])
            .collect();
        let cs = CoefficientSeq::new(cs)?;
        blocks.push((b.index, energy_of(&collision_amplitudes(&b.members, &cs, terms)?)));
    }
    let sum_sq = pairwise_sum(&blocks.iter().map(|b| b.1).collect::<Vec<_>>());
    let floor = profile.energy() * coefficient_norm * coefficient_norm;
    let lower_holds = (c.constant_sign() && profile.constant_sign())
        .then_some(sum_sq >= floor * (1.0 - SANDWICH_SLACK));
    Ok(SquareAudit {
        blocks,
        sum_sq,
        coefficient_norm,
        c_emp: sum_sq.sqrt() / coefficient_norm,
        regularity,
        lower_holds,
    })
}

// ---------------------------------------------------------------------------
// Sampling and quadrature
// ---------------------------------------------------------------------------

/// `sum_j a_j exp(2πi j m / N)` for `m = 0..N`. Exact up to rounding: the
/// coefficient of `j` sits at `j mod N` and the exponential is N-periodic.
fn profile_table(profile: &FourierProfile, n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (j, a) in profile.coefficients() {
        buf[(j % n as u64) as usize].re += a;
    }
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Index of `k x_m` on the grid `x_m = m / N`.
#[inline]
fn dilate(k: u64, m: usize, n: usize) -> usize {
    ((k as u128 * m as u128) % n as u128) as usize
}

fn check_grid(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::domain("grid needs at least 2 points"))
    } else {
        Ok(())
    }
}

/// `sum_k c_k f(k x_m)` on `x_m = m / N` with `f(x) = sum_j a_j sin(2π j x)`.
pub fn sample_partial_sum(
    k: &IndexSet,
    c: &CoefficientSeq,
    profile: &FourierProfile,
    grid: usize,
) -> Result<Vec<f64>> {
    check_len(k, c)?;
    check_grid(grid)?;
    let table: Vec<f64> = profile_table(profile, grid).iter().map(|z| z.im).collect();
    Ok(sample_with(&table, k, c, grid, 0.0))
}

/// As [`sample_partial_sum`] with `f(x) = sum_j a_j exp(2πi j x)`.
pub fn sample_partial_sum_exp(
    k: &IndexSet,
    c: &CoefficientSeq,
    profile: &FourierProfile,
    grid: usize,
) -> Result<Vec<Complex64>> {
    check_len(k, c)?;
    check_grid(grid)?;
    let table = profile_table(profile, grid);
    Ok(sample_with(&table, k, c, grid, Complex64::new(0.0, 0.0)))
}

fn sample_with<T>(table: &[T], k: &IndexSet, c: &CoefficientSeq, n: usize, zero: T) -> Vec<T>
where
    T: Copy + Send + Sync + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    (0..n)
        .into_par_iter()
        .map(|m| {
            let mut acc = zero;
            for (&kk, &ck) in k.elements().iter().zip(c.values()) {
                acc = acc + table[dilate(kk, m, n)] * ck;
            }
            acc
        })
        .collect()
}

/// The grid must be a power of two and exceed the largest dilated
/// frequency. That removes every difference-frequency alias; sum
/// frequencies of the sine products alias only when `ν + ν' ≡ 0 (mod N)`,
/// which needs both near `N/2` or above.
fn check_quadrature_grid(n: usize, max_frequency: u64) -> Result<()> {
    if !n.is_power_of_two() || (n as u64) <= max_frequency {
        return Err(Error::Precision(format!(
            "grid {n} must be a power of two above the largest dilated frequency {max_frequency}"
        )));
    }
    Ok(())
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value() / n as f64
}

/// Trapezoidal `∫_0^1 f(kx) f(lx) dx` for the sine-read profile.
pub fn quadrature_gram(k: u64, l: u64, profile: &FourierProfile, grid: usize) -> Result<f64> {
    if k == 0 || l == 0 {
        return Err(Error::domain("dilation factors are positive"));
    }
    let top = k.max(l).saturating_mul(profile.max_frequency());
    check_quadrature_grid(grid, top)?;
    let table: Vec<f64> = profile_table(profile, grid).iter().map(|z| z.im).collect();
    Ok(mean(
        (0..grid).map(|m| table[dilate(k, m, grid)] * table[dilate(l, m, grid)]),
        grid,
    ))
}

fn dilated_top(k: &IndexSet, profile: &FourierProfile) -> u64 {
    k.k_plus().unwrap_or(0).saturating_mul(profile.max_frequency())
}

/// Trapezoidal `∫_0^1 |sum_k c_k f(k x)|² dx`, sine-read.
pub fn quadrature_norm(
    k: &IndexSet,
    c: &CoefficientSeq,
    profile: &FourierProfile,
    grid: usize,
) -> Result<f64> {
    check_quadrature_grid(grid, dilated_top(k, profile))?;
    let v = sample_partial_sum(k, c, profile, grid)?;
    Ok(mean(v.iter().map(|x| x * x), grid))
}

/// Trapezoidal `∫_0^1 |sum_k c_k f(k x)|² dx`, exponential-read. Exact
/// once the grid exceeds the largest dilated frequency.
pub fn quadrature_norm_exp(
    k: &IndexSet,
    c: &CoefficientSeq,
    profile: &FourierProfile,
    grid: usize,
) -> Result<f64> {
    check_quadrature_grid(grid, dilated_top(k, profile))?;
    let v = sample_partial_sum_exp(k, c, profile, grid)?;
    Ok(mean(v.iter().map(|z| z.norm_sqr()), grid))
}

// ---------------------------------------------------------------------------
// Modulus of continuity
// ---------------------------------------------------------------------------

/// Target for the truncation error of [`modulus_of_continuity`].
pub const MODULUS_TAIL_TARGET: f64 = 1e-10;
/// Hard cap on summed terms.
pub const MODULUS_MAX_TERMS: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusReport {
    /// `∫|f(x+h) − f(x)|² = 2 sum_m sin²(π m h) / m^{2s}`
    pub value: f64,
    /// Bound on the truncation error.
    pub tail_bound: f64,
    pub terms: u64,
    /// `sqrt(value) / h^{s − 1/2}`
    pub ratio: f64,
}

/// Square modulus of continuity of the power-law sine profile at step `h`.
///
/// Uses `2 sin²(x) = 1 − cos(2x)`, so the value is
/// `zeta(2s) − sum_m cos(2π m h)/m^{2s}`. Partial sums of `cos(2π m h)`
/// are bounded by `1/sin(π h)`, so by Abel summation the cosine tail after
/// `T` terms is at most `(T+1)^{-2s} / sin(π h)`.
pub fn modulus_of_continuity(s: f64, h: f64) -> Result<ModulusReport> {
    check_s(s)?;
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::domain(format!("step h must lie in (0, 1), got {h}")));
    }
    let sin_h = (std::f64::consts::PI * h).sin();
    let wanted = (1.0 / (MODULUS_TAIL_TARGET * sin_h)).powf(1.0 / (2.0 * s)).ceil();
    let terms = if wanted.is_finite() {
        (wanted as u64).clamp(1, MODULUS_MAX_TERMS)
    } else {
        MODULUS_MAX_TERMS
    };
    let mut acc = CompensatedSum::new();
    // summed from the small end up
    for m in (1..=terms).rev() {
        let phase = (m as f64 * h).fract();
        acc.add((2.0 * std::f64::consts::PI * phase).cos() * (m as f64).powf(-2.0 * s));
    }
    let value = zeta(2.0 * s)? - acc.value();
    let tail_bound = ((terms + 1) as f64).powf(-2.0 * s) / sin_h;
    Ok(ModulusReport {
        value,
        tail_bound,
        terms,
        ratio: value.max(0.0).sqrt() / h.powf(s - 0.5),
    })
}

/// Trapezoidal `∫|f(x+h) − f(x)|²` of a profile, sine-read. Needs `h·grid`
/// to be an integer so the shift lands on the grid.
pub fn modulus_quadrature(profile: &FourierProfile, h: f64, grid: usize) -> Result<f64> {
    check_quadrature_grid(grid, profile.max_frequency())?;
    let shift = h * grid as f64;
    if !(h > 0.0 && h < 1.0) || shift.fract() != 0.0 {
        return Err(Error::domain(format!("h = {h} is not a multiple of 1/{grid} inside (0, 1)")));
    }
    let shift = shift as usize;
    let table: Vec<f64> = profile_table(profile, grid).iter().map(|z| z.im).collect();
    Ok(mean(
        (0..grid).map(|m| {
            let d = table[(m + shift) % grid] - table[m];
            d * d
        }),
        grid,
    ))
}

// ---------------------------------------------------------------------------
// Dirichlet series
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletProbe {
    /// `(σ, t, |sum_n a_n n^{−σ−it}|)`
    pub samples: Vec<(f64, f64, f64)>,
    pub min: f64,
    pub max: f64,
    /// Bound on `sum_{n > J} |a_n| n^{−σ}` at the smallest `σ`; zero for
    /// explicit profiles, infinite when the tail diverges.
    pub tail_estimate: f64,
    /// A finite grid never certifies boundedness.
    pub heuristic: bool,
}

/// `|sum_n a_n n^{−σ−it}|` over the product grid `sigmas × ts`.
pub fn dirichlet_probe(profile: &FourierProfile, sigmas: &[f64], ts: &[f64]) -> Result<DirichletProbe> {
    if let Some(&s) = sigmas.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::domain(format!("sigma must be positive, got {s}")));
    }
    if sigmas.is_empty() || ts.is_empty() {
        return Err(Error::usage("probe grid is empty"));
    }
    let coeffs = profile.coefficients();
    let grid: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect();
    let samples: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&(sigma, t)| {
            let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
            for &(n, a) in coeffs.iter().rev() {
                let ln = (n as f64).ln();
                let r = a * (-sigma * ln).exp();
                re.add(r * (t * ln).cos());
                im.add(-r * (t * ln).sin());
            }
            (sigma, t, re.value().hypot(im.value()))
        })
        .collect();
    let min = samples.iter().map(|x| x.2).fold(f64::INFINITY, f64::min);
    let max = samples.iter().map(|x| x.2).fold(0.0, f64::max);
    let tail_estimate = match profile {
        FourierProfile::Explicit { .. } => 0.0,
        FourierProfile::PowerLawSine { s, truncation } => {
            let e = s + sigmas.iter().copied().fold(f64::INFINITY, f64::min);
            if e > 1.0 {
                (*truncation as f64).powf(1.0 - e) / (e - 1.0)
            } else {
                f64::INFINITY
            }
        }
    };
    Ok(DirichletProbe {
        samples,
        min,
        max,
        tail_estimate,
        heuristic: true,
    })
}

/// Two-column CSV with a header row.
pub fn two_column_csv<A: std::fmt::Display>(header: (&str, &str), rows: &[(A, f64)]) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (a, v) in rows {
        let _ = writeln!(out, "{a},{}", format_float(*v));
    }
    out
}
