//! Bounded scalar search: uniform grids and golden-section maximization.

/// 1/φ.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Uniform grid over `[lo, hi]` including both ends, with spacing at most `step`.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    debug_assert!(step > 0.0 && hi >= lo);
    if hi <= lo {
        return vec![lo];
    }
    let intervals = ((hi - lo) / step).ceil().max(1.0) as usize;
    let width = hi - lo;
    (0..=intervals)
        .map(|i| {
            if i == intervals {
                hi
            } else {
                lo + width * i as f64 / intervals as f64
            }
        })
        .collect()
}

/// Index of the largest value, first one on ties. NaNs never win.
pub fn argmax_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            _ if v.is_nan() => {}
            None => best = Some(i),
            Some(b) if *v > values[b] => best = Some(i),
            _ => {}
        }
    }
    best
}

/// The interval between the grid neighbours of `grid[i]`.
pub fn neighbour_bracket(grid: &[f64], i: usize) -> (f64, f64) {
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    (lo, hi)
}

/// Maximizes `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `tol`.
///
/// The bracket endpoints are candidates too, so a maximum sitting on the
/// boundary is returned exactly. Ties keep the smaller position.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> GoldenResult
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(a);
    let f_hi = f(b);
    let mut best = GoldenResult {
        x: a,
        value: f_lo,
        iterations: 0,
    };
    let consider = |x: f64, v: f64, best: &mut GoldenResult| {
        if v > best.value || (v == best.value && x < best.x) || best.value.is_nan() {
            best.x = x;
            best.value = v;
        }
    };
    consider(b, f_hi, &mut best);
    if b - a <= tol {
        return best;
    }

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > tol && iterations < 200 {
        iterations += 1;
        if fc >= fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    best.iterations = iterations;
    best
}
