//! GCD matrices `M(K, s)`, their Jordan-totient factorisation, a cyclic
//! Jacobi eigensolver and the quadratic-form bounds built on them.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::ntheory::{zeta, ArithmeticCache};
use crate::numerics::{format_float, gcd, pairwise_sum};
use crate::sequences::{is_factor_closed, IndexSet};
use crate::{Error, Result};

/// Largest dimension the eigensolver accepts.
pub const EIGEN_DIM_CAP: usize = 2048;
/// Off-diagonal Frobenius norm target, relative to `‖M‖_F`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 60;

/// Dense symmetric matrix; only the upper triangle is stored, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    packed: Vec<f64>,
    label: Option<String>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
            label: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from a full square row-major matrix; the two triangles must
    /// agree to rounding.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: r.len(),
                });
            }
            for (j, &v) in r.iter().enumerate().skip(i) {
                m.set(i, j, v);
            }
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate().take(i) {
                let u = m.get(i, j);
                if (u - v).abs() > 1e-12 * u.abs().max(v.abs()) {
                    return Err(Error::domain(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    fn from_upper_rows(n: usize, rows: Vec<Vec<f64>>, label: String) -> Self {
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for r in rows {
            packed.extend(r);
        }
        SymMatrix {
            n,
            packed,
            label: Some(label),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * self.n - i - 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.packed[k] = v;
    }

    /// Full square copy, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        d
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut terms = Vec::with_capacity(self.packed.len());
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                terms.push(if i == j { v * v } else { 2.0 * v * v });
            }
        }
        pairwise_sum(&terms).sqrt()
    }

    pub fn trace(&self) -> f64 {
        pairwise_sum(&(0..self.n).map(|i| self.get(i, i)).collect::<Vec<_>>())
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, v.len())?;
        Ok((0..self.n)
            .map(|i| pairwise_sum(&(0..self.n).map(|j| self.get(i, j) * v[j]).collect::<Vec<_>>()))
            .collect())
    }

    /// Row-major CSV, full square, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format_float(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Dense row-major rectangular matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(DenseMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// `Aᵀ A`, symmetric by construction.
    pub fn gram(&self) -> SymMatrix {
        let n = self.cols;
        let mut g = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let terms: Vec<f64> = (0..self.rows).map(|r| self.get(r, i) * self.get(r, j)).collect();
                g.set(i, j, pairwise_sum(&terms));
            }
        }
        g
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

fn check_positive(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("exponent s must be finite and positive, got {s}")))
    }
}

fn check_above_half(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!("exponent s must exceed 1/2, got {s}")))
    }
}

fn nonempty(k: &IndexSet) -> Result<()> {
    if k.is_empty() {
        Err(Error::domain("index set is empty"))
    } else {
        Ok(())
    }
}

fn build_upper(k: &IndexSet, label: String, entry: impl Fn(u64, u64) -> f64 + Sync) -> SymMatrix {
    let el = k.elements();
    let rows: Vec<Vec<f64>> = (0..el.len())
        .into_par_iter()
        .map(|i| el[i..].iter().map(|&l| entry(el[i], l)).collect())
        .collect();
    SymMatrix::from_upper_rows(el.len(), rows, label)
}

/// `M(K, s)` with entries `(k,l)^{2s} / (k l)^s`; the diagonal is exactly 1.
pub fn build_gcd_matrix(k: &IndexSet, s: f64) -> Result<SymMatrix> {
    check_positive(s)?;
    nonempty(k)?;
    Ok(build_upper(k, format!("gcd matrix |K|={} s={s}", k.len()), |a, b| {
        let g = gcd(a, b) as f64;
        ((g / a as f64) * (g / b as f64)).powf(s)
    }))
}

/// `G(K, s)` with entries `(k,l)^{2s}`.
pub fn build_gcd_power_matrix(k: &IndexSet, s: f64) -> Result<SymMatrix> {
    check_positive(s)?;
    nonempty(k)?;
    Ok(build_upper(k, format!("gcd power matrix |K|={} s={s}", k.len()), |a, b| {
        (gcd(a, b) as f64).powf(2.0 * s)
    }))
}

fn require_factor_closed(k: &IndexSet, cache: &ArithmeticCache) -> Result<()> {
    if is_factor_closed(k, cache)? {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{k} is not factor closed")))
    }
}

/// `A[i][j] = sqrt(J_{2s}(x_i)) [x_i | x_j]`, so that `Aᵀ A = G(K, s)`.
pub fn jordan_factor(k: &IndexSet, s: f64, cache: &ArithmeticCache) -> Result<DenseMatrix> {
    check_positive(s)?;
    require_factor_closed(k, cache)?;
    let el = k.elements();
    let n = el.len();
    let mut a = DenseMatrix::zeros(n, n);
    for (i, &x) in el.iter().enumerate() {
        let j2s = cache.jordan_totient(x, 2.0 * s)?;
        if j2s < 0.0 || !j2s.is_finite() {
            return Err(Error::Numeric(format!("J_2s({x}) = {j2s} has no real square root")));
        }
        let root = j2s.sqrt();
        // elements are sorted, so multiples of x sit at positions >= i
        for (j, &y) in el.iter().enumerate().skip(i) {
            if y % x == 0 {
                a.set(i, j, root);
            }
        }
    }
    Ok(a)
}

/// `yᵀ M y`, accumulating each off-diagonal pair once and doubling.
pub fn quadratic_form(m: &SymMatrix, y: &[f64]) -> Result<f64> {
    check_dim(m.dim(), y.len())?;
    let n = m.dim();
    let mut terms = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        terms.push(m.get(i, i) * y[i] * y[i]);
        for j in i + 1..n {
            terms.push(2.0 * m.get(i, j) * y[i] * y[j]);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `sum_i J_{2s}(x_i) (sum_{x_i | x_k} y_k / x_k^s)^2` over a factor-closed set.
pub fn jordan_quadratic(k: &IndexSet, s: f64, y: &[f64], cache: &ArithmeticCache) -> Result<f64> {
    check_positive(s)?;
    check_dim(k.len(), y.len())?;
    require_factor_closed(k, cache)?;
    let el = k.elements();
    let scaled: Vec<f64> = el.iter().zip(y).map(|(&x, &v)| v / (x as f64).powf(s)).collect();
    let mut terms = Vec::with_capacity(el.len());
    for (i, &x) in el.iter().enumerate() {
        let inner: Vec<f64> = el
            .iter()
            .enumerate()
            .skip(i)
            .filter(|(_, &z)| z % x == 0)
            .map(|(j, _)| scaled[j])
            .collect();
        let inner = pairwise_sum(&inner);
        terms.push(cache.jordan_totient(x, 2.0 * s)? * inner * inner);
    }
    Ok(pairwise_sum(&terms))
}

// ---------------------------------------------------------------------------
// Eigensolver
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Ascending.
    pub spectrum: Vec<f64>,
    /// `max ‖M v − λ v‖_∞` over the two extreme eigenpairs.
    pub residual: f64,
    pub sweeps: usize,
}

impl EigenSummary {
    pub fn spectrum_json(&self) -> String {
        serde_json::to_string(&self.spectrum).expect("floats serialise")
    }
}

/// Round-robin pairing schedule over `m` (even) slots: `m − 1` rounds,
/// each a perfect matching, together covering every pair exactly once.
fn round_robin(m: usize) -> Vec<Vec<(usize, usize)>> {
    let mut slots: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m - 1);
    for _ in 0..m - 1 {
        let round = (0..m / 2)
            .map(|i| {
                let (a, b) = (slots[i], slots[m - 1 - i]);
                (a.min(b), a.max(b))
            })
            .collect();
        rounds.push(round);
        // slot 0 stays put, the rest rotate by one
        let last = slots.pop().expect("m >= 2");
        slots.insert(1, last);
    }
    rounds
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let rows: Vec<f64> = (0..n)
        .map(|i| {
            let t: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| a[i * n + j] * a[i * n + j]).collect();
            pairwise_sum(&t)
        })
        .collect();
    pairwise_sum(&rows).sqrt()
}

/// Jacobi rotation `(c, s)` annihilating `a_pq`.
#[inline]
fn rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    if apq == 0.0 {
        return (1.0, 0.0);
    }
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

/// Full spectrum of a symmetric matrix by cyclic Jacobi.
///
/// Each sweep runs the `n − 1` rounds of a round-robin schedule; rotations
/// within a round touch disjoint index pairs, so they are applied together
/// as `Pᵀ A P`. The order is fixed, so results are bitwise reproducible.
/// Stops once the off-diagonal Frobenius norm is at most
/// [`JACOBI_TOLERANCE`] times `‖M‖_F`.
pub fn eigen_extremes(m: &SymMatrix) -> Result<EigenSummary> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::domain("matrix has dimension 0"));
    }
    if n > EIGEN_DIM_CAP {
        return Err(Error::domain(format!("dimension {n} exceeds the eigensolver cap {EIGEN_DIM_CAP}")));
    }
    if m.packed.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let mut a = m.to_dense();
    // rows of vt are the eigenvector estimates
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let target = JACOBI_TOLERANCE * m.frobenius_norm();
    let slots = n + n % 2;
    let schedule = if n >= 2 { round_robin(slots) } else { Vec::new() };
    let mut sweeps = 0;
    let mut rots: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(slots / 2);
    while off_diagonal_norm(&a, n) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!("Jacobi did not converge in {MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        for round in &schedule {
            rots.clear();
            for &(p, q) in round {
                if q >= n {
                    continue;
                }
                let (c, s) = rotation(a[p * n + p], a[q * n + q], a[p * n + q]);
                if s != 0.0 {
                    rots.push((p, q, c, s));
                }
            }
            if rots.is_empty() {
                continue;
            }
            // A P: column updates, row by row
            for row in a.chunks_exact_mut(n) {
                for &(p, q, c, s) in &rots {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
            // Pᵀ (A P) and Pᵀ Vᵀ: row updates
            for &(p, q, c, s) in &rots {
                rotate_rows(&mut a, n, p, q, c, s);
                rotate_rows(&mut vt, n, p, q, c, s);
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let spectrum: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let (imin, imax) = (order[0], order[n - 1]);
    let residual = [imin, imax]
        .iter()
        .map(|&i| {
            let v = &vt[i * n..(i + 1) * n];
            let mv = m.mul_vec(v).expect("dimension checked");
            mv.iter()
                .zip(v)
                .map(|(x, y)| (x - a[i * n + i] * y).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(EigenSummary {
        lambda_min: spectrum[0],
        lambda_max: spectrum[n - 1],
        spectrum,
        residual,
        sweeps,
    })
}

fn rotate_rows(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let (head, tail) = a.split_at_mut(q * n);
    let rp = &mut head[p * n..(p + 1) * n];
    let rq = &mut tail[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (u, v) = (*x, *y);
        *x = c * u - s * v;
        *y = s * u + c * v;
    }
}

// ---------------------------------------------------------------------------
// Bound reports
// ---------------------------------------------------------------------------

/// Slack allowed on the two-sided zeta bracket.
pub const BRACKET_SLACK: f64 = 1e-9;

/// `[zeta(2s)/zeta(s)^2, zeta(s)^2/zeta(2s)]`, valid for `s > 1`.
pub fn zeta_bracket(s: f64) -> Result<(f64, f64)> {
    if !(s > 1.0) {
        return Err(Error::domain(format!("the zeta bracket needs s > 1, got {s}")));
    }
    let (z, z2) = (zeta(s)?, zeta(2.0 * s)?);
    Ok((z2 / (z * z), z * z / z2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenAudit {
    pub n: usize,
    pub s: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub residual: f64,
    /// Present only when `s > 1`.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Every eigenvalue inside the bracket (`true` when nothing is asserted).
    pub pass: bool,
    pub asserted: bool,
}

/// Spectrum of `M_n(s)` over `{1..n}` against the zeta bracket.
///
/// The bracket is asserted only for `s > 1`; for `1/2 < s <= 1` the
/// extremes are reported without a verdict.
pub fn eigen_bounds_audit(n: usize, s: f64) -> Result<EigenAudit> {
    check_above_half(s)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let k = IndexSet::range(1, n as u64)?;
    let e = eigen_extremes(&build_gcd_matrix(&k, s)?)?;
    let (lower, upper, pass, asserted) = if s > 1.0 {
        let (lo, hi) = zeta_bracket(s)?;
        let ok = e.spectrum.iter().all(|&l| l >= lo - BRACKET_SLACK && l <= hi + BRACKET_SLACK);
        (Some(lo), Some(hi), ok, true)
    } else {
        (None, None, true, false)
    };
    Ok(EigenAudit {
        n,
        s,
        lambda_min: e.lambda_min,
        lambda_max: e.lambda_max,
        residual: e.residual,
        lower,
        upper,
        pass,
        asserted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenTrend {
    pub rows: Vec<EigenAudit>,
    pub lambda_max_increasing: bool,
    pub lambda_min_decreasing: bool,
}

/// Runs [`eigen_bounds_audit`] along a ladder of `n` and records whether the
/// extremes move monotonically. A trend, not a limit statement.
pub fn eigen_trend(ladder: &[usize], s: f64) -> Result<EigenTrend> {
    let rows = ladder
        .iter()
        .map(|&n| eigen_bounds_audit(n, s))
        .collect::<Result<Vec<_>>>()?;
    let inc = rows.windows(2).all(|w| w[1].lambda_max > w[0].lambda_max);
    let dec = rows.windows(2).all(|w| w[1].lambda_min < w[0].lambda_min);
    Ok(EigenTrend {
        rows,
        lambda_max_increasing: inc,
        lambda_min_decreasing: dec,
    })
}

/// `(|sum_{i≠j} x_i x_j α_ij|, ½ sum_i x_i² sum_{l≠i}(|α_il| + |α_li|))`.
/// The first never exceeds the second.
pub fn offdiag_weighted_bound(x: &[f64], alpha: &DenseMatrix) -> Result<(f64, f64)> {
    check_dim(alpha.rows, alpha.cols)?;
    check_dim(alpha.rows, x.len())?;
    let n = x.len();
    let mut lhs = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        let mut w = Vec::with_capacity(n);
        for l in 0..n {
            if l != i {
                lhs.push(x[i] * x[l] * alpha.get(i, l));
                w.push(alpha.get(i, l).abs() + alpha.get(l, i).abs());
            }
        }
        rhs.push(x[i] * x[i] * pairwise_sum(&w));
    }
    Ok((pairwise_sum(&lhs).abs(), 0.5 * pairwise_sum(&rhs)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSumReport {
    pub k: u64,
    pub s: f64,
    /// `sum_{l≠k} (k,l)^{2s} / (k l)^s`
    pub row_sum: f64,
    /// For `s = 1`: `2 log(K_+/K_-) σ_{-1}(k)`. For `s < 1`: the envelope
    /// `2^s k^{s−1} (∫_{K_-}^{K_+} u^{−s} du) σ_{1−2s}(k)` without its constant.
    pub bound: f64,
    pub ratio: f64,
    /// True only at `s = 1`, where the constant is explicit.
    pub asserted: bool,
    pub holds: bool,
}

pub fn row_sum_bound(k_set: &IndexSet, k: u64, s: f64, cache: &ArithmeticCache) -> Result<RowSumReport> {
    if !(s > 0.5 && s <= 1.0) {
        return Err(Error::domain(format!("row sum bound needs 1/2 < s <= 1, got {s}")));
    }
    if !k_set.contains(k) {
        return Err(Error::usage(format!("{k} is not an element of {k_set}")));
    }
    let kf = k as f64;
    let terms: Vec<f64> = k_set
        .elements()
        .iter()
        .filter(|&&l| l != k)
        .map(|&l| {
            let g = gcd(k, l) as f64;
            ((g / kf) * (g / l as f64)).powf(s)
        })
        .collect();
    let row_sum = pairwise_sum(&terms);
    let lo = k_set.k_minus().expect("contains k") as f64;
    let hi = k_set.k_plus().expect("contains k") as f64;
    let asserted = s == 1.0;
    let bound = if asserted {
        2.0 * (hi / lo).ln() * cache.sigma_alpha(k, -1.0)?
    } else {
        let integral = (hi.powf(1.0 - s) - lo.powf(1.0 - s)) / (1.0 - s);
        2f64.powf(s) * kf.powf(s - 1.0) * integral * cache.sigma_alpha(k, 1.0 - 2.0 * s)?
    };
    let ratio = if row_sum == 0.0 { 0.0 } else { row_sum / bound };
    Ok(RowSumReport {
        k,
        s,
        row_sum,
        bound,
        ratio,
        asserted,
        holds: !asserted || row_sum <= bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalReport {
    pub r: usize,
    /// `sum_{i,j} (κ_i,κ_j)^2 / (κ_i κ_j)`, diagonal included.
    pub sum: f64,
    /// `sum / (r (log log r)^2)`, only for `r >= 16`.
    pub ratio: Option<f64>,
}

/// Threshold from which `log log r > 1` and the envelope is reported.
pub const GAL_ENVELOPE_FROM: usize = 16;

pub fn gal_ratio(k: &IndexSet) -> Result<GalReport> {
    let r = k.len();
    if r < 3 {
        return Err(Error::usage(format!("Gal ratio needs at least 3 elements, got {r}")));
    }
    let el = k.elements();
    let rows: Vec<f64> = el
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let t: Vec<f64> = el[i + 1..]
                .iter()
                .map(|&b| {
                    let g = gcd(a, b) as f64;
                    (g / a as f64) * (g / b as f64)
                })
                .collect();
            2.0 * pairwise_sum(&t)
        })
        .collect();
    let sum = r as f64 + pairwise_sum(&rows);
    let ratio = (r >= GAL_ENVELOPE_FROM).then(|| {
        let ll = (r as f64).ln().ln();
        sum / (r as f64 * ll * ll)
    });
    Ok(GalReport { r, sum, ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszReport {
    /// `max_i sum_{j≠i} |M_ij|`
    pub b_value: f64,
    /// `b_value < 1`
    pub verdict: bool,
    /// Always set: a finite window is evidence about an infinite sequence,
    /// not a certificate.
    pub window_evidence: bool,
}

pub fn riesz_condition(k: &IndexSet, s: f64) -> Result<RieszReport> {
    check_above_half(s)?;
    let m = build_gcd_matrix(k, s)?;
    let n = m.dim();
    let b_value = (0..n)
        .map(|i| {
            let t: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| m.get(i, j).abs()).collect();
            pairwise_sum(&t)
        })
        .fold(0.0, f64::max);
    Ok(RieszReport {
        b_value,
        verdict: b_value < 1.0,
        window_evidence: true,
    })
}

/// CSV rows `n,s,lambda_min,lambda_max,lower,upper,pass`, with header.
pub fn audits_to_csv(rows: &[EigenAudit]) -> String {
    let mut out = String::from("n,s,lambda_min,lambda_max,lower,upper,pass\n");
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), format_float);
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            format_float(r.s),
            format_float(r.lambda_min),
            format_float(r.lambda_max),
            opt(r.lower),
            opt(r.upper),
            r.pass
        );
    }
    out
}
