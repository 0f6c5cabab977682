//! Adaptive Gauss–Kronrod (7/15) quadrature over finite and half-infinite
//! ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Interval;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

/// One accepted cell of an adaptive partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > err {
        err = floor;
    }
    err
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { x })
        }
    };
    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut resabs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, resabs * h, resasc * h);
    Ok(Segment { a, b, value, error })
}

/// Adaptive integration on a finite interval, returning the final partition
/// sorted by left endpoint alongside the total.
pub fn integrate_partition<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<(QuadratureResult, Vec<Segment>)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integrate_partition needs finite limits, got [{a}, {b}]"
        )));
    }
    if a == b {
        let seg = Segment { a, b, value: 0.0, error: 0.0 };
        return Ok((
            QuadratureResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 },
            vec![seg],
        ));
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut evaluations = 15;
    heap.push(first);
    let tolerance = |total: f64| opts.abs_tol.max(opts.rel_tol * total.abs());
    while total_err > tolerance(total) {
        if heap.len() >= opts.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total,
                abs_error: total_err,
                evaluations,
            });
        }
        let worst = heap.pop().expect("partition is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::Accuracy {
                estimate: total,
                abs_error: total_err,
                evaluations,
            });
        }
        let left = gk15(&f, worst.a, mid)?;
        let right = gk15(&f, mid, worst.b)?;
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to drop the drift of the running totals.
    let mut segments = heap.into_vec();
    segments.sort_by(|s, t| s.a.total_cmp(&t.a));
    let value: f64 = segments.iter().map(|s| s.value).sum();
    let abs_error_estimate: f64 = segments.iter().map(|s| s.error).sum();
    Ok((
        QuadratureResult { value, abs_error_estimate, evaluations },
        segments,
    ))
}

/// `∫_{edge}^{±∞} f` through `x = edge ± (1 - t)/t`, `t ∈ (0, 1]`.
fn tail_partition<F: Fn(f64) -> f64>(f: F, edge: f64, sign: f64, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    // The map's scale follows |edge| so that far-out edges keep their tail mass at t = O(1).
    let scale = edge.abs().max(1.0);
    let g = |t: f64| {
        let v = f(edge + sign * scale * (1.0 - t) / t);
        if v == 0.0 {
            0.0
        } else {
            scale * v / (t * t)
        }
    };
    integrate_partition(g, 0.0, 1.0, opts)
        .map(|(r, _)| r)
        .map_err(|e| match e {
            // Report the offending point in x, not in t.
            Error::NonFiniteIntegrand { x: t } => Error::NonFiniteIntegrand { x: edge + sign * scale * (1.0 - t) / t },
            other => other,
        })
}

fn combine(a: QuadratureResult, b: QuadratureResult) -> QuadratureResult {
    QuadratureResult {
        value: a.value + b.value,
        abs_error_estimate: a.abs_error_estimate + b.abs_error_estimate,
        evaluations: a.evaluations + b.evaluations,
    }
}

/// `∫_range f`. A half-infinite range `[lo, ∞)` is split at
/// `edge = lo + max(1, |lo|)`: the finite piece is integrated directly, so
/// endpoint singularities keep full resolution, and the rest through
/// `x = edge + s (1 - t)/t` with `s = max(1, |edge|)`. `(-∞, hi]` mirrors this.
pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    range: Interval,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let (lo, hi) = (range.lo, range.hi);
    if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo.is_infinite() && hi.is_infinite() {
        return Err(Error::Domain(format!("cannot integrate over [{lo}, {hi}]")));
    }
    if lo.is_finite() && hi.is_finite() {
        return integrate_partition(f, lo, hi, opts).map(|(r, _)| r);
    }
    if hi.is_infinite() {
        let edge = lo + lo.abs().max(1.0);
        let head = integrate_partition(&f, lo, edge, opts)?.0;
        let tail = tail_partition(&f, edge, 1.0, opts)?;
        Ok(combine(head, tail))
    } else {
        let edge = hi - hi.abs().max(1.0);
        let head = integrate_partition(&f, edge, hi, opts)?.0;
        let tail = tail_partition(&f, edge, -1.0, opts)?;
        Ok(combine(head, tail))
    }
}

/// `∫_range f` with the given absolute and relative tolerances.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    range: Interval,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let opts = QuadratureOptions {
        abs_tol,
        rel_tol,
        ..QuadratureOptions::default()
    };
    integrate_with(f, range, &opts)
}
