//! Small deterministic summation helpers shared across modules.

/// Pairwise (tree) summation. The result depends only on the order of
/// `values`, never on thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Fifteen significant digits in scientific notation, independent of locale.
pub fn format_float(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Index `v` of the geometric band `[base^v, base^(v+1))` containing `x >= 1`.
pub fn geometric_band(x: u64, base: f64) -> u32 {
    debug_assert!(x >= 1 && base > 1.0);
    let xf = x as f64;
    let mut v = (xf.ln() / base.ln()).floor().max(0.0) as i32;
    // log rounding can land one band off in either direction
    while v > 0 && base.powi(v) > xf {
        v -= 1;
    }
    while base.powi(v + 1) <= xf {
        v += 1;
    }
    v as u32
}
