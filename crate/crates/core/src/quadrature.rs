//! Adaptive Gauss–Kronrod (10/21 point) integration on finite intervals and
//! on `(0, inf)` via a split at 1 and the substitution `x = 1/t` on the tail.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subintervals: usize,
}

impl Default for QuadratureTolerance {
    fn default() -> Self {
        QuadratureTolerance {
            abs: 1e-10,
            rel: 1e-9,
            max_subintervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subintervals: usize,
}

// Kronrod abscissae (positive half) and weights; odd-indexed nodes are the
// Gauss nodes.
const XK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WK[10];
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = h * XK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let k = kronrod * h;
    let g = gauss * h;
    (k, (k - g).abs())
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
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over the finite interval `[a, b]`, bisecting the piece with
/// the largest error estimate until the global estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &QuadratureTolerance,
) -> Result<QuadResult> {
    let (value, error) = gk21(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut count = 1;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(QuadResult {
                value: total,
                error: total_err,
                subintervals: count,
            });
        }
        if count >= tol.max_subintervals {
            return Err(Error::Quadrature(format!(
                "{count} subintervals on [{a}, {b}], error estimate {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in double precision.
            if total_err <= 1e3 * tol.abs.max(tol.rel * total.abs()) {
                return Ok(QuadResult {
                    value: total,
                    error: total_err,
                    subintervals: count,
                });
            }
            return Err(Error::Quadrature(format!(
                "roundoff limit near {mid}, error estimate {total_err:e}"
            )));
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        count += 1;
        if count % 64 == 0 {
            // Re-sum to keep the running totals from drifting.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Integrates `f` over `(0, inf)`: `[0, 1]` directly and `[1, inf)` as
/// `int_0^1 f(1/t) / t^2 dt`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, tol: &QuadratureTolerance) -> Result<QuadResult> {
    let split = QuadratureTolerance {
        abs: 0.5 * tol.abs,
        ..*tol
    };
    let head = integrate(&f, 0.0, 1.0, &split)?;
    let tail = integrate(
        |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                f(1.0 / t) / (t * t)
            }
        },
        0.0,
        1.0,
        &split,
    )?;
    Ok(QuadResult {
        value: head.value + tail.value,
        error: head.error + tail.error,
        subintervals: head.subintervals + tail.subintervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &Default::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn half_line_exponential() {
        let r = integrate_half_line(|x| (-x).exp(), &Default::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_line_rational_tail() {
        // int_0^inf dx/(1+x^3) = 2 pi / (3 sqrt 3)
        let exact = 2.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt());
        let r = integrate_half_line(|x| 1.0 / (1.0 + x * x * x), &Default::default()).unwrap();
        assert!((r.value - exact).abs() < 1e-12, "{}", r.value - exact);
    }

    #[test]
    fn integrable_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &Default::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn divergent_integral_is_an_error() {
        let tol = QuadratureTolerance {
            max_subintervals: 200,
            ..Default::default()
        };
        assert!(integrate(|x: f64| 1.0 / x, 0.0, 1.0, &tol).is_err());
    }
}
