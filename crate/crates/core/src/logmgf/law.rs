//! Closed-form and quadrature-backed log-Laplace transforms of the 1-D laws.

use num_traits::One;

use crate::distmodel::{Law1D, Orientation};
use crate::error::{Error, Result};
use crate::exact::{rat, to_f64, Rational};
use crate::interval::{Bound, Interval, Side};
use crate::quadrature::{integrate, QuadratureTolerance};

/// Steepness data at a finite endpoint of a law's K domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndpointProfile {
    pub endpoint_in_domain: bool,
    pub k_finite_at_endpoint: bool,
    pub grad_finite_at_endpoint: bool,
}

/// `K`, `K'`, `K''` at one point; derivatives may be infinite at a closed
/// endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawValue {
    pub k: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Law1D {
    /// Effective domain of the law's K, with exact endpoints.
    pub fn k_domain(&self) -> Interval {
        match self {
            Law1D::Atom { .. } | Law1D::Gaussian { .. } | Law1D::Uniform { .. } => {
                Interval::real_line()
            }
            Law1D::Exponential {
                rate, orientation, ..
            } => one_sided_domain(rate, *orientation, false),
            Law1D::ExpPolyTail {
                rate,
                exponent,
                orientation,
                ..
            } => one_sided_domain(rate, *orientation, *exponent > Rational::one()),
        }
    }
}

fn one_sided_domain(rate: &Rational, orientation: Orientation, closed: bool) -> Interval {
    let end = Bound::Finite {
        value: match orientation {
            Orientation::Up => rate.clone(),
            Orientation::Down => -rate.clone(),
        },
        closed,
    };
    match orientation {
        Orientation::Up => Interval {
            lo: Bound::Infinite,
            hi: end,
        },
        Orientation::Down => Interval {
            lo: end,
            hi: Bound::Infinite,
        },
    }
}

/// Analytic endpoint profile; `None` when the domain is unbounded on `side`.
pub fn endpoint_profile(law: &Law1D, side: Side) -> Option<EndpointProfile> {
    law.k_domain().bound(side).value()?;
    Some(match law {
        Law1D::Exponential { .. } => EndpointProfile {
            endpoint_in_domain: false,
            k_finite_at_endpoint: false,
            grad_finite_at_endpoint: false,
        },
        Law1D::ExpPolyTail { exponent, .. } => {
            let k_finite = *exponent > rat(1);
            EndpointProfile {
                endpoint_in_domain: k_finite,
                k_finite_at_endpoint: k_finite,
                grad_finite_at_endpoint: *exponent > rat(2),
            }
        }
        _ => unreachable!("two-sided domains have no finite endpoint"),
    })
}

/// The analytic profile, cross-checked numerically: for tail laws the
/// truncated moment integrals at the endpoint must settle exactly when the
/// profile says they are finite.
pub fn endpoint_profile_confirmed(
    law: &Law1D,
    side: Side,
    tol: &QuadratureTolerance,
) -> Result<Option<EndpointProfile>> {
    let Some(profile) = endpoint_profile(law, side) else {
        return Ok(None);
    };
    if let Law1D::ExpPolyTail { exponent, .. } = law {
        let beta = to_f64(exponent);
        let k_conv = truncated_moment_settles(0, beta, tol)?;
        let g_conv = truncated_moment_settles(1, beta, tol)?;
        if k_conv != profile.k_finite_at_endpoint || g_conv != profile.grad_finite_at_endpoint {
            return Err(Error::Quadrature(format!(
                "endpoint profile for exponent {beta} disagrees with quadrature \
                 (K finite: {k_conv}, gradient finite: {g_conv})"
            )));
        }
    }
    Ok(Some(profile))
}

/// Whether `int_0^R y^k / (1 + y^beta) dy` settles as `R` grows: successive
/// increments over two decades must shrink.
fn truncated_moment_settles(k: i32, beta: f64, tol: &QuadratureTolerance) -> Result<bool> {
    let kf = f64::from(k);
    // y = e^s
    let piece = |s0: f64, s1: f64| {
        integrate(
            |s: f64| ((kf + 1.0) * s).exp() / (1.0 + (beta * s).exp()),
            s0,
            s1,
            tol,
        )
        .map(|r| r.value)
    };
    let ln10 = std::f64::consts::LN_10;
    let d1 = piece(4.0 * ln10, 8.0 * ln10)?;
    let d2 = piece(8.0 * ln10, 12.0 * ln10)?;
    Ok(d2 < 0.5 * d1)
}

/// Numeric form of a law, with the normalizing constant of tail laws cached.
#[derive(Debug, Clone, PartialEq)]
pub enum LawModel {
    Atom {
        at: f64,
    },
    Exponential {
        rate: f64,
        sign: f64,
        shift: f64,
    },
    Gaussian {
        mean: f64,
        variance: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    ExpPolyTail(TailModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailModel {
    pub rate: f64,
    pub beta: f64,
    pub sign: f64,
    pub shift: f64,
    /// `ln int_0^inf e^{-rate y} / (1 + y^beta) dy`
    pub log_norm: f64,
    pub endpoint_closed: bool,
    pub tol: QuadratureTolerance,
}

impl LawModel {
    pub fn new(law: &Law1D, tol: &QuadratureTolerance) -> Result<Self> {
        let sign = |o: &Orientation| if *o == Orientation::Up { 1.0 } else { -1.0 };
        Ok(match law {
            Law1D::Atom { at } => LawModel::Atom { at: to_f64(at) },
            Law1D::Exponential {
                rate,
                orientation,
                shift,
            } => LawModel::Exponential {
                rate: to_f64(rate),
                sign: sign(orientation),
                shift: to_f64(shift),
            },
            Law1D::Gaussian { mean, variance } => LawModel::Gaussian {
                mean: to_f64(mean),
                variance: to_f64(variance),
            },
            Law1D::Uniform { a, b } => LawModel::Uniform {
                a: to_f64(a),
                b: to_f64(b),
            },
            Law1D::ExpPolyTail {
                rate,
                exponent,
                orientation,
                shift,
            } => {
                let rate_f = to_f64(rate);
                let beta = to_f64(exponent);
                let j0 = tail_moment(0, rate_f, beta, tol)?;
                LawModel::ExpPolyTail(TailModel {
                    rate: rate_f,
                    beta,
                    sign: sign(orientation),
                    shift: to_f64(shift),
                    log_norm: j0.ln(),
                    endpoint_closed: *exponent > Rational::one(),
                    tol: *tol,
                })
            }
        })
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(match self {
            LawModel::Atom { at } => *at,
            LawModel::Exponential { rate, sign, shift } => shift + sign / rate,
            LawModel::Gaussian { mean, .. } => *mean,
            LawModel::Uniform { a, b } => 0.5 * (a + b),
            LawModel::ExpPolyTail(t) => {
                let j1 = tail_moment(1, t.rate, t.beta, &t.tol)?;
                t.shift + t.sign * j1 / t.log_norm.exp()
            }
        })
    }

    /// K and derivatives up to `order` at `s`; `None` outside the domain.
    pub fn eval(&self, s: f64, order: u8) -> Result<Option<LawValue>> {
        Ok(Some(match self {
            LawModel::Atom { at } => LawValue {
                k: at * s,
                d1: *at,
                d2: 0.0,
            },
            LawModel::Gaussian { mean, variance } => LawValue {
                k: mean * s + 0.5 * variance * s * s,
                d1: mean + variance * s,
                d2: *variance,
            },
            LawModel::Uniform { a, b } => {
                let w = b - a;
                let x = s * w;
                LawValue {
                    k: a * s + uniform_g(x),
                    d1: a + w * uniform_g1(x),
                    d2: w * w * uniform_g2(x),
                }
            }
            LawModel::Exponential { rate, sign, shift } => {
                // Z ~ Exp(rate): K_Z(z) = -ln(1 - z/rate), z < rate.
                let z = sign * s;
                if z >= *rate {
                    return Ok(None);
                }
                let gap = rate - z;
                LawValue {
                    k: shift * s - (gap / rate).ln(),
                    d1: shift + sign / gap,
                    d2: 1.0 / (gap * gap),
                }
            }
            LawModel::ExpPolyTail(t) => return t.eval(s, order),
        }))
    }
}

impl TailModel {
    fn eval(&self, s: f64, order: u8) -> Result<Option<LawValue>> {
        let z = self.sign * s;
        let c = self.rate - z;
        if c < 0.0 || (c == 0.0 && !self.endpoint_closed) {
            return Ok(None);
        }
        let j0 = tail_integral(0, c, self.beta, &self.tol)?;
        let k = self.shift * s + j0.ln() - self.log_norm;
        let (mut d1, mut d2) = (f64::NAN, f64::NAN);
        if order >= 1 {
            let m1 = if c == 0.0 && self.beta <= 2.0 {
                f64::INFINITY
            } else {
                tail_integral(1, c, self.beta, &self.tol)? / j0
            };
            d1 = self.shift + self.sign * m1;
            if order >= 2 {
                d2 = if (c == 0.0 && self.beta <= 3.0) || m1.is_infinite() {
                    f64::INFINITY
                } else {
                    let m2 = tail_integral(2, c, self.beta, &self.tol)? / j0;
                    (m2 - m1 * m1).max(0.0)
                };
            }
        }
        Ok(Some(LawValue { k, d1, d2 }))
    }
}

/// `int_0^inf y^k e^{-rate y} / (1 + y^beta) dy` at `s = 0`.
fn tail_moment(k: i32, rate: f64, beta: f64, tol: &QuadratureTolerance) -> Result<f64> {
    tail_integral(k, rate, beta, tol)
}

/// `J_k(c) = int_0^inf y^k e^{-c y} / (1 + y^beta) dy`, `c >= 0`.
///
/// With `s = max(c, 1)` and `a = c / s` this is
/// `s^{-(k+1)} int_0^inf x^k e^{-a x} / (1 + (x/s)^beta) dx`; the integral is
/// split at `x = 1` and the tail mapped to `(0, 1]` by `x = 1/t`.
pub fn tail_integral(k: i32, c: f64, beta: f64, tol: &QuadratureTolerance) -> Result<f64> {
    let s = c.max(1.0);
    let a = c / s;
    let kf = f64::from(k);
    let ln_s = s.ln();
    let head = integrate(
        |x: f64| x.powi(k) * (-a * x).exp() / (1.0 + (x / s).powf(beta)),
        0.0,
        1.0,
        tol,
    )?;
    let tail = integrate(
        |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let ts = (t * s).powf(beta);
            ((beta - kf - 2.0) * t.ln() + beta * ln_s - a / t).exp() / (ts + 1.0)
        },
        0.0,
        1.0,
        tol,
    )?;
    let value = (head.value + tail.value) * s.powf(-(kf + 1.0));
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::Quadrature(format!(
            "tail integral J_{k}({c}) evaluated to {value}"
        )));
    }
    Ok(value)
}

// g(x) = ln((e^x - 1)/x), the uniform-on-[0,1] log-Laplace transform.
fn uniform_g(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x / 2.0 + x2 / 24.0 - x2 * x2 / 2880.0 + x2 * x2 * x2 / 181_440.0
    } else if x > 0.0 {
        x + (-(-x).exp_m1()).ln() - x.ln()
    } else {
        (-x.exp_m1()).ln() - (-x).ln()
    }
}

fn uniform_g1(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        0.5 + x / 12.0 - x * x2 / 720.0 + x * x2 * x2 / 30_240.0
    } else {
        -1.0 / (-x).exp_m1() - 1.0 / x
    }
}

fn uniform_g2(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        1.0 / 12.0 - x2 / 240.0 + x2 * x2 / 6048.0
    } else {
        let sh = (0.5 * x).sinh();
        1.0 / (x * x) - 1.0 / (4.0 * sh * sh)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn tol() -> QuadratureTolerance {
        QuadratureTolerance::default()
    }

    // Values of K for the e^{-2y}/(1+y^3) law computed independently with
    // 30-digit mpmath quadrature.
    const K3_HALF: f64 = 0.191_410_198_798_597_75;
    const K3_ONE: f64 = 0.417_655_770_280_912_68;
    const K3_TWO: f64 = 1.072_422_848_934_825_7;
    const K3P_ONE: f64 = 0.496_246_130_499_366_18;
    const K3PP_ONE: f64 = 0.199_197_527_374_305_73;

    #[test]
    fn tail_law_matches_reference_values() {
        let m = LawModel::new(&Law1D::exp_poly_tail(rat(2), rat(3)), &tol()).unwrap();
        let v = m.eval(0.5, 0).unwrap().unwrap();
        assert!((v.k - K3_HALF).abs() < 1e-12);
        let v = m.eval(1.0, 2).unwrap().unwrap();
        assert!((v.k - K3_ONE).abs() < 1e-12);
        assert!((v.d1 - K3P_ONE).abs() < 1e-12);
        assert!((v.d2 - K3PP_ONE).abs() < 1e-10);
        let v = m.eval(2.0, 1).unwrap().unwrap();
        assert!((v.k - K3_TWO).abs() < 1e-12);
        // Both moment integrals equal 2 pi / (3 sqrt 3) at the endpoint.
        assert!((v.d1 - 1.0).abs() < 1e-12);
        assert!(m.eval(2.0 + 1e-12, 0).unwrap().is_none());
        assert_eq!(m.eval(0.0, 0).unwrap().unwrap().k, 0.0);
    }

    #[test]
    fn tail_law_hessian_infinite_at_endpoint() {
        let m = LawModel::new(&Law1D::exp_poly_tail(rat(2), rat(3)), &tol()).unwrap();
        let v = m.eval(2.0, 2).unwrap().unwrap();
        assert!(v.d2.is_infinite());
        let m = LawModel::new(&Law1D::exp_poly_tail(rat(1), rat(2)), &tol()).unwrap();
        let v = m.eval(1.0, 1).unwrap().unwrap();
        assert!(v.k.is_finite() && v.d1.is_infinite());
    }

    #[test]
    fn tail_law_far_left() {
        let m = LawModel::new(&Law1D::exp_poly_tail(rat(2), rat(3)), &tol()).unwrap();
        // For c -> inf, J_0(c) ~ 1/c.
        let v = m.eval(-1.0e4, 1).unwrap().unwrap();
        let expected = -(1.0e4f64 + 2.0).ln() - m_log_norm(&m);
        assert!((v.k - expected).abs() < 1e-3);
        assert!(v.d1 > 0.0 && v.d1 < 2e-4);
    }

    fn m_log_norm(m: &LawModel) -> f64 {
        match m {
            LawModel::ExpPolyTail(t) => t.log_norm,
            _ => unreachable!(),
        }
    }

    #[test]
    fn exponential_closed_form() {
        let m = LawModel::new(&Law1D::exponential(rat(1)), &tol()).unwrap();
        let v = m.eval(0.5, 2).unwrap().unwrap();
        assert!((v.k - 2f64.ln()).abs() < 1e-15);
        assert!((v.d1 - 2.0).abs() < 1e-15);
        assert_eq!(m.eval(0.0, 1).unwrap().unwrap().d1, 1.0);
        assert!(m.eval(1.0, 0).unwrap().is_none());
        let down = Law1D::Exponential {
            rate: rat(2),
            orientation: Orientation::Down,
            shift: rat(1),
        };
        let m = LawModel::new(&down, &tol()).unwrap();
        // X = 1 - E/2: K(s) = s - ln(1 + s/2)
        let v = m.eval(1.0, 1).unwrap().unwrap();
        assert!((v.k - (1.0 - 1.5f64.ln())).abs() < 1e-15);
        assert!(m.eval(-2.0, 0).unwrap().is_none());
    }

    #[test]
    fn uniform_series_and_direct_forms_agree() {
        for &x in &[0.099_999, 0.100_001, -0.099_999, -0.100_001] {
            let h = 1e-6;
            let fd = (uniform_g(x + h) - uniform_g(x - h)) / (2.0 * h);
            assert!((fd - uniform_g1(x)).abs() < 1e-8);
            let fd2 = (uniform_g1(x + h) - uniform_g1(x - h)) / (2.0 * h);
            assert!((fd2 - uniform_g2(x)).abs() < 1e-7);
        }
        assert!((uniform_g(800.0) - (800.0 - 800f64.ln())).abs() < 1e-12);
        assert!(uniform_g(-800.0).is_finite());
    }

    #[test]
    fn profiles() {
        let e = Law1D::exponential(rat(1));
        assert_eq!(
            endpoint_profile(&e, Side::Upper),
            Some(EndpointProfile {
                endpoint_in_domain: false,
                k_finite_at_endpoint: false,
                grad_finite_at_endpoint: false
            })
        );
        assert_eq!(endpoint_profile(&e, Side::Lower), None);
        let t23 = Law1D::exp_poly_tail(rat(2), rat(3));
        assert_eq!(
            endpoint_profile_confirmed(&t23, Side::Upper, &tol()).unwrap(),
            Some(EndpointProfile {
                endpoint_in_domain: true,
                k_finite_at_endpoint: true,
                grad_finite_at_endpoint: true
            })
        );
        let t12 = Law1D::exp_poly_tail(rat(1), rat(2));
        assert_eq!(
            endpoint_profile_confirmed(&t12, Side::Upper, &tol()).unwrap(),
            Some(EndpointProfile {
                endpoint_in_domain: true,
                k_finite_at_endpoint: true,
                grad_finite_at_endpoint: false
            })
        );
        let t_half = Law1D::exp_poly_tail(rat(1), ratio(1, 2));
        let p = endpoint_profile_confirmed(&t_half, Side::Upper, &tol())
            .unwrap()
            .unwrap();
        assert!(!p.endpoint_in_domain && !p.k_finite_at_endpoint);
        assert_eq!(endpoint_profile(&Law1D::Atom { at: rat(0) }, Side::Upper), None);
    }

    #[test]
    fn domains() {
        assert_eq!(
            Law1D::exp_poly_tail(rat(2), rat(3)).k_domain().to_string(),
            "(−∞,2]"
        );
        assert_eq!(Law1D::exponential(rat(1)).k_domain().to_string(), "(−∞,1)");
        let down = Law1D::ExpPolyTail {
            rate: rat(1),
            exponent: ratio(1, 2),
            orientation: Orientation::Down,
            shift: rat(0),
        };
        assert_eq!(down.k_domain().to_string(), "(-1,∞)");
    }
}
