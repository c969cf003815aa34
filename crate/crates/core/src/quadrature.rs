//! Adaptive Gauss–Kronrod quadrature with helpers for semi-infinite ranges.
//!
//! Finite ranges use a globally adaptive 21-point Gauss–Kronrod rule with
//! caller-supplied breakpoints. Semi-infinite ranges come in two flavours:
//! smooth integrands go through the map `x = a/u`, and integrands that
//! oscillate with a known period are summed half-period by half-period and
//! the partial sums accelerated with Wynn's epsilon algorithm.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Gauss–Kronrod nodes and weights to 33 digits
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_956,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for XGK[1], XGK[3], ..., XGK[9]
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Absolute and relative error targets; the looser of the two wins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-300, 1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            intervals: self.intervals + rhs.intervals,
        }
    }
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut fv = [0.0; 20];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let result = kronrod * half;
    let asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (result, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// Globally adaptive integration over `[points[0], points[last]]`.
///
/// `points` must be sorted ascending; every interior point becomes an
/// initial interval boundary. Pieces narrower than the floating-point
/// resolution are no longer split, so a roundoff-limited integrand reports
/// its honest error instead of looping.
pub fn integrate<F: Fn(f64) -> f64>(
    what: &str,
    f: F,
    points: &[f64],
    tol: Tolerance,
    max_intervals: usize,
) -> Result<Estimate> {
    if points.len() < 2 {
        return Ok(Estimate::ZERO);
    }
    let mut heap = BinaryHeap::new();
    let mut done = Vec::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (value, error) = gk21(&f, a, b);
        total += value;
        total_err += error;
        heap.push(Piece { a, b, value, error });
    }
    let mut count = heap.len() + done.len();
    while total_err > tol.target(total) && count < max_intervals {
        let Some(piece) = heap.pop() else { break };
        let mid = 0.5 * (piece.a + piece.b);
        let width = piece.b - piece.a;
        if width <= 1e-14 * piece.a.abs().max(piece.b.abs()).max(f64::MIN_POSITIVE) || mid <= piece.a || mid >= piece.b {
            // cannot be refined any further
            done.push(piece);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = gk21(&f, piece.a, mid);
        let (v2, e2) = gk21(&f, mid, piece.b);
        total += v1 + v2 - piece.value;
        total_err += e1 + e2 - piece.error;
        heap.push(Piece { a: piece.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: piece.b, value: v2, error: e2 });
        count += 1;
    }
    // resum in interval order so the result does not depend on heap history
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.extend(done);
    pieces.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let value: f64 = pieces.iter().map(|p| p.value).sum();
    let error: f64 = pieces.iter().map(|p| p.error).sum();
    let est = Estimate {
        value,
        error,
        intervals: pieces.len(),
    };
    if !value.is_finite() || error > 10.0 * tol.target(value) {
        return Err(Error::quadrature(what, value, error, pieces.len()));
    }
    Ok(est)
}

/// `∫_a^∞ f(x) dx` for a smooth, non-oscillatory integrand, via `x = a/u`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    what: &str,
    f: F,
    a: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> Result<Estimate> {
    assert!(a > 0.0, "semi-infinite map needs a positive lower limit");
    let g = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            f(a / u) * a / (u * u)
        }
    };
    let mut pts = vec![0.0];
    let mut u = 1.0 / 1024.0;
    while u < 1.0 {
        pts.push(u);
        u *= 2.0;
    }
    pts.push(1.0);
    integrate(what, g, &pts, tol, max_intervals)
}

/// Geometric plus uniform breakpoints for `[a, b]`: ratio-2 steps while the
/// range is scale-dominated, then steps of `period` once it is reached.
pub fn ladder(a: f64, b: f64, start: f64, period: f64, max_points: usize) -> Vec<f64> {
    let mut pts = vec![a];
    let mut x = start.max(a);
    if x > a {
        pts.push(x);
    }
    while x < b {
        let step = if period.is_finite() && period > 0.0 { x.min(period) } else { x };
        x += step.max(f64::MIN_POSITIVE);
        if x < b {
            pts.push(x);
        }
        if pts.len() >= max_points {
            break;
        }
    }
    pts.push(b);
    pts.dedup();
    pts
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
///
/// Returns the most recent even-column estimate.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return *sums.last().unwrap_or(&0.0);
    }
    // e[k] holds column k evaluated at the last available positions
    let mut prev2 = vec![0.0; n + 1];
    let mut prev: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut col = 1;
    loop {
        let len = prev.len();
        if len < 2 {
            break;
        }
        let mut next = Vec::with_capacity(len - 1);
        for i in 0..len - 1 {
            let diff = prev[i + 1] - prev[i];
            let base = if col == 1 { 0.0 } else { prev2[i + 1] };
            if diff == 0.0 {
                // converged exactly along this diagonal
                return prev[i + 1];
            }
            next.push(base + 1.0 / diff);
        }
        col += 1;
        if col % 2 == 1 {
            if let Some(&v) = next.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
        prev2 = prev;
        prev = next;
    }
    best
}

/// `∫_a^∞ f(x) dx` where `f` oscillates with half-period `half_period`.
///
/// Integrates consecutive half-period chunks and extrapolates the partial
/// sums with the epsilon algorithm until two successive estimates agree.
pub fn oscillatory_tail<F: Fn(f64) -> f64>(
    what: &str,
    f: F,
    a: f64,
    half_period: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    const MIN_TERMS: usize = 8;
    const MAX_TERMS: usize = 400;
    let mut sums = Vec::new();
    let mut acc = 0.0;
    let mut err_acc = 0.0;
    let mut intervals = 0;
    let mut last_extrap = f64::NAN;
    let mut agree = 0;
    for k in 0..MAX_TERMS {
        let lo = a + k as f64 * half_period;
        let hi = lo + half_period;
        let pts = if hi / lo > 4.0 { ladder(lo, hi, lo * 2.0, f64::INFINITY, 200) } else { vec![lo, hi] };
        let chunk = integrate(what, &f, &pts, Tolerance::new(tol.abs * 1e-2, tol.rel * 1e-2), 2000)?;
        acc += chunk.value;
        err_acc += chunk.error;
        intervals += chunk.intervals;
        sums.push(acc);
        if sums.len() > 40 {
            sums.remove(0);
        }
        if k + 1 < MIN_TERMS {
            continue;
        }
        let extrap = wynn_epsilon(&sums);
        let change = (extrap - last_extrap).abs();
        let scale = tol.target(extrap);
        if change <= scale || chunk.value.abs() <= 1e-3 * scale {
            agree += 1;
            if agree >= 2 {
                return Ok(Estimate {
                    value: extrap,
                    error: change + err_acc,
                    intervals,
                });
            }
        } else {
            agree = 0;
        }
        last_extrap = extrap;
    }
    Err(Error::quadrature(what, last_extrap, f64::NAN, intervals))
}
