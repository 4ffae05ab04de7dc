//! The log-Laplace transform `K_X(u) = log E exp(u·X)` of a mixture spec:
//! values, gradients, the exact box domain, steepness, and the restricted
//! transform `K̃_{X|L}`.

mod law;

pub use law::{
    endpoint_profile, endpoint_profile_confirmed, tail_integral, EndpointProfile, LawModel,
    LawValue, TailModel,
};

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::convgeo::{Hyperplane, Polyhedron};
use crate::distmodel::{Component, DistributionSpec, Law1D};
use crate::error::{Error, Result};
use crate::exact::{from_f64, to_f64, vec_from_f64, QVec, Rational};
use crate::extended::{ExtendedRational, ExtendedReal};
use crate::interval::{Bound, Interval, Side};
use crate::quadrature::QuadratureTolerance;

/// Numeric form of one mixture component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentModel {
    pub log_weight: f64,
    pub shift: Vec<f64>,
    pub laws: Vec<LawModel>,
    mean: Vec<f64>,
}

impl ComponentModel {
    pub fn new(c: &Component) -> Result<Self> {
        Self::with_tolerance(c, &QuadratureTolerance::default())
    }

    pub fn with_tolerance(c: &Component, tol: &QuadratureTolerance) -> Result<Self> {
        let laws = c
            .laws
            .iter()
            .map(|l| LawModel::new(l, tol))
            .collect::<Result<Vec<_>>>()?;
        let shift: Vec<f64> = c.shift.iter().map(to_f64).collect();
        let mean = laws
            .iter()
            .zip(&shift)
            .map(|(l, t)| Ok(t + l.mean()?))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComponentModel {
            log_weight: to_f64(&c.weight).ln(),
            shift,
            laws,
            mean,
        })
    }

    pub fn reweighted(&self, weight: &Rational) -> Self {
        ComponentModel {
            log_weight: to_f64(weight).ln(),
            ..self.clone()
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        self.mean.clone()
    }

    /// `ln p_i + K_i(u)` with per-coordinate derivatives; `None` off-domain.
    fn eval(&self, u: &[f64], order: u8) -> Result<Option<(f64, Vec<f64>, Vec<f64>)>> {
        let d = u.len();
        let mut k = self.log_weight;
        let mut g = vec![0.0; d];
        let mut h = vec![0.0; d];
        for j in 0..d {
            let Some(v) = self.laws[j].eval(u[j], order)? else {
                return Ok(None);
            };
            k += self.shift[j] * u[j] + v.k;
            g[j] = self.shift[j] + v.d1;
            h[j] = v.d2;
        }
        Ok(Some((k, g, h)))
    }
}

/// `K_X` and its derivatives at one point of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureEval {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `d x d`; only filled for `order >= 2`.
    pub hessian: Vec<Vec<f64>>,
    /// Tilted component weights `p_i e^{K_i(u)} / sum_j p_j e^{K_j(u)}`.
    pub weights: Vec<f64>,
}

/// Evaluates `K_X` (and derivatives up to `order`) at `u`; `None` when
/// `u` is outside `D(K_X)`.
pub fn k_eval_full(spec: &DistributionSpec, u: &[f64], order: u8) -> Result<Option<MixtureEval>> {
    let d = spec.dimension();
    if u.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: u.len(),
        });
    }
    let mut parts = Vec::with_capacity(spec.models().len());
    for m in spec.models() {
        match m.eval(u, order)? {
            Some(p) => parts.push(p),
            None => return Ok(None),
        }
    }
    let top = parts
        .iter()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = parts.iter().map(|p| (p.0 - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    let value = top + total.ln();
    let weights: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let mut grad = vec![0.0; d];
    let mut hessian = Vec::new();
    if order >= 1 {
        for (w, p) in weights.iter().zip(&parts) {
            if *w == 0.0 {
                continue;
            }
            for j in 0..d {
                grad[j] += w * p.1[j];
            }
        }
    }
    if order >= 2 {
        hessian = vec![vec![0.0; d]; d];
        for (w, p) in weights.iter().zip(&parts) {
            if *w == 0.0 {
                continue;
            }
            for a in 0..d {
                hessian[a][a] += w * p.2[a];
                for b in 0..d {
                    hessian[a][b] += w * (p.1[a] - grad[a]) * (p.1[b] - grad[b]);
                }
            }
        }
    }
    Ok(Some(MixtureEval {
        value,
        grad,
        hessian,
        weights,
    }))
}

pub fn k_eval(spec: &DistributionSpec, u: &[f64]) -> Result<ExtendedReal> {
    Ok(match k_eval_full(spec, u, 0)? {
        Some(e) => ExtendedReal::Finite(e.value),
        None => ExtendedReal::PosInf,
    })
}

/// `∇K_X(u)` for `u` in the interior of the domain.
pub fn k_grad(spec: &DistributionSpec, u: &[f64]) -> Result<Vec<f64>> {
    if !k_domain(spec).interior_contains_f64(u) {
        return Err(Error::NotInterior(u.to_vec()));
    }
    match k_eval_full(spec, u, 1)? {
        Some(e) => Ok(e.grad),
        None => Err(Error::NotInterior(u.to_vec())),
    }
}

/// An axis-aligned box with exact endpoints and open/closed flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    pub intervals: Vec<Interval>,
}

impl BoxRegion {
    pub fn full(d: usize) -> Self {
        BoxRegion {
            intervals: vec![Interval::real_line(); d],
        }
    }

    pub fn dimension(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, u: &[Rational]) -> bool {
        self.intervals.iter().zip(u).all(|(i, x)| i.contains(x))
    }

    pub fn contains_f64(&self, u: &[f64]) -> bool {
        self.intervals.iter().zip(u).all(|(i, &x)| i.contains_f64(x))
    }

    /// Strict membership: finite endpoints excluded regardless of flags.
    pub fn interior_contains_f64(&self, u: &[f64]) -> bool {
        self.intervals.iter().zip(u).all(|(i, &x)| {
            i.lo.value().is_none_or(|v| x > to_f64(v))
                && i.hi.value().is_none_or(|v| x < to_f64(v))
        })
    }

    pub fn has_interior(&self) -> bool {
        self.intervals.iter().all(Interval::has_interior)
    }

    pub fn is_full_space(&self) -> bool {
        self.intervals
            .iter()
            .all(|i| i.lo == Bound::Infinite && i.hi == Bound::Infinite)
    }

    /// `sup_{u in R} w·u` (the supremum need not be attained).
    pub fn support(&self, w: &[Rational]) -> ExtendedRational {
        let mut total = Rational::zero();
        for (i, wj) in self.intervals.iter().zip(w) {
            let end = if wj.is_positive() {
                &i.hi
            } else if wj.is_negative() {
                &i.lo
            } else {
                continue;
            };
            match end.value() {
                Some(v) => total += wj * v,
                None => return ExtendedRational::PosInf,
            }
        }
        ExtendedRational::Finite(total)
    }

    /// The closure as an exact polyhedron.
    pub fn closure(&self) -> Polyhedron {
        Polyhedron::from_box(self)
    }

    pub fn intersect(&self, other: &BoxRegion) -> BoxRegion {
        BoxRegion {
            intervals: self
                .intervals
                .iter()
                .zip(&other.intervals)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        }
    }
}

impl fmt::Display for BoxRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("×"))
    }
}

/// Exact `D(K_X)`: the intersection of every law's domain, an endpoint being
/// closed iff every law that binds there is finite at it.
pub fn k_domain(spec: &DistributionSpec) -> BoxRegion {
    let mut b = BoxRegion::full(spec.dimension());
    for c in spec.components() {
        let comp = BoxRegion {
            intervals: c.laws.iter().map(Law1D::k_domain).collect(),
        };
        b = b.intersect(&comp);
    }
    b
}

/// A law whose domain endpoint defines a facet of the box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BindingLaw {
    pub component: usize,
    pub endpoint_in_domain: bool,
    pub k_finite_at_endpoint: bool,
    pub grad_finite_at_endpoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetSteepness {
    pub coordinate: usize,
    pub side: &'static str,
    #[serde(skip)]
    pub endpoint: Rational,
    pub binding: Vec<BindingLaw>,
    pub steep: bool,
    /// `|∇K|` along each probe sequence, at distances `s·10^-1 … s·10^-8`.
    pub probe_gradient_norms: Vec<Vec<f64>>,
    /// `Some(true)` if every probe sequence was still growing at the last
    /// step, `Some(false)` if every one had settled, `None` if mixed.
    pub numerically_steep: Option<bool>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteepnessReport {
    pub steep: bool,
    pub facets: Vec<FacetSteepness>,
}

const PROBE_SEQUENCES: usize = 8;
const PROBE_STEPS: i32 = 8;

/// Steepness of `K_X` decided facet by facet from endpoint profiles, each
/// verdict cross-checked by following `|∇K_X|` towards the facet.
pub fn steepness(spec: &DistributionSpec) -> Result<SteepnessReport> {
    let dom = k_domain(spec);
    if !dom.has_interior() {
        return Err(Error::EmptyInterior);
    }
    let tol = QuadratureTolerance::default();
    let mut facets = Vec::new();
    for j in 0..spec.dimension() {
        for side in [Side::Lower, Side::Upper] {
            let Some(end) = dom.intervals[j].bound(side).value().cloned() else {
                continue;
            };
            let mut binding = Vec::new();
            for (i, c) in spec.components().iter().enumerate() {
                let law = &c.laws[j];
                if law.k_domain().bound(side).value() != Some(&end) {
                    continue;
                }
                let p = endpoint_profile_confirmed(law, side, &tol)?
                    .expect("binding law has a finite endpoint");
                binding.push(BindingLaw {
                    component: i,
                    endpoint_in_domain: p.endpoint_in_domain,
                    k_finite_at_endpoint: p.k_finite_at_endpoint,
                    grad_finite_at_endpoint: p.grad_finite_at_endpoint,
                });
            }
            // If some binding law blows up, K itself diverges. Otherwise every
            // component stays weight-positive on the facet, so a single
            // divergent binding gradient suffices.
            let steep = binding
                .iter()
                .any(|b| !b.k_finite_at_endpoint || !b.grad_finite_at_endpoint);
            let norms = probe_facet(spec, &dom, j, side, &end)?;
            let verdicts: Vec<bool> = norms
                .iter()
                .map(|seq| {
                    let n = seq.len();
                    let (a, b) = (seq[n - 2], seq[n - 1]);
                    !b.is_finite() || (b - a).abs() > 1e-3 * (1.0 + a.abs())
                })
                .collect();
            let numerically_steep = if verdicts.iter().all(|&v| v) {
                Some(true)
            } else if verdicts.iter().all(|&v| !v) {
                Some(false)
            } else {
                None
            };
            facets.push(FacetSteepness {
                coordinate: j,
                side: if side == Side::Lower { "lower" } else { "upper" },
                endpoint: end,
                binding,
                steep,
                probe_gradient_norms: norms,
                numerically_steep,
                agrees: numerically_steep.is_none_or(|n| n == steep),
            });
        }
    }
    Ok(SteepnessReport {
        steep: facets.iter().all(|f| f.steep),
        facets,
    })
}

pub fn is_steep(spec: &DistributionSpec) -> Result<bool> {
    Ok(steepness(spec)?.steep)
}

fn interior_samples(i: &Interval) -> [f64; 3] {
    match (i.lo.value().map(to_f64), i.hi.value().map(to_f64)) {
        (Some(a), Some(b)) => [a + 0.25 * (b - a), a + 0.5 * (b - a), a + 0.75 * (b - a)],
        (None, Some(b)) => [b - 0.5, b - 1.0, b - 2.0],
        (Some(a), None) => [a + 0.5, a + 1.0, a + 2.0],
        (None, None) => [0.0, -1.0, 1.0],
    }
}

fn probe_facet(
    spec: &DistributionSpec,
    dom: &BoxRegion,
    j: usize,
    side: Side,
    end: &Rational,
) -> Result<Vec<Vec<f64>>> {
    let d = spec.dimension();
    let e = to_f64(end);
    let inward = if side == Side::Upper { -1.0 } else { 1.0 };
    let others: Vec<usize> = (0..d).filter(|&k| k != j).collect();
    let mut out = Vec::with_capacity(PROBE_SEQUENCES);
    for q in 0..PROBE_SEQUENCES {
        let mut base = vec![0.0; d];
        // Cycle through the 3^(d-1) sample combinations.
        let mut code = q;
        for &k in &others {
            base[k] = interior_samples(&dom.intervals[k])[code % 3];
            code /= 3;
        }
        let s = 1.0 - q as f64 / 10.0;
        let mut seq = Vec::with_capacity(PROBE_STEPS as usize);
        for m in 1..=PROBE_STEPS {
            let mut u = base.clone();
            u[j] = e + inward * s * 10f64.powi(-m);
            let g = k_eval_full(spec, &u, 1)?
                .ok_or_else(|| Error::NotInterior(u.clone()))?
                .grad;
            seq.push(g.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
        out.push(seq);
    }
    Ok(out)
}

/// `K̃_{X|L}(u)`: `K_{X|L}(u)` when `u` lies in `pr_L^{-1}(pr_L D(K_X))`,
/// otherwise `+∞`.
pub fn k_tilde_eval(spec: &DistributionSpec, l: &Hyperplane, u: &[f64]) -> Result<ExtendedReal> {
    let cond = spec.condition_on_hyperplane(l)?;
    let uq = vec_from_f64(u)?;
    if !in_projected_cylinder(&k_domain(spec), &l.normal, &uq) {
        return Ok(ExtendedReal::PosInf);
    }
    k_eval(&cond, u)
}

/// Whether `u + t·n` meets the box for some real `t` (exact).
pub fn in_projected_cylinder(region: &BoxRegion, n: &[Rational], u: &[Rational]) -> bool {
    let mut t = Interval::real_line();
    for ((iv, nj), uj) in region.intervals.iter().zip(n).zip(u) {
        if nj.is_zero() {
            if !iv.contains(uj) {
                return false;
            }
            continue;
        }
        // (bound - u_j) / n_j, flipping sides for negative n_j.
        let map = |b: &Bound| match b {
            Bound::Infinite => Bound::Infinite,
            Bound::Finite { value, closed } => Bound::Finite {
                value: (value - uj) / nj,
                closed: *closed,
            },
        };
        let (lo, hi) = if nj.is_positive() {
            (map(&iv.lo), map(&iv.hi))
        } else {
            (map(&iv.hi), map(&iv.lo))
        };
        t = t.intersect(&Interval { lo, hi });
    }
    match (&t.lo, &t.hi) {
        (
            Bound::Finite { value: a, closed: ca },
            Bound::Finite { value: b, closed: cb },
        ) => a < b || (a == b && *ca && *cb),
        _ => true,
    }
}

/// Exact rational point from doubles, for callers mixing the two worlds.
pub fn exact_point(u: &[f64]) -> Result<QVec> {
    u.iter().map(|&x| from_f64(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qvec, rat};
    use crate::fixtures;

    #[test]
    fn k_at_origin_is_zero() {
        for spec in fixtures::all() {
            let z = vec![0.0; spec.dimension()];
            assert_eq!(k_eval(&spec, &z).unwrap(), ExtendedReal::Finite(0.0));
        }
    }

    #[test]
    fn counterexample_domain() {
        let ex = fixtures::ex_nts();
        assert_eq!(k_domain(&ex).to_string(), "(−∞,1)×(−∞,1)");
        assert_eq!(k_eval(&ex, &[0.0, 1.5]).unwrap(), ExtendedReal::PosInf);
        assert_eq!(k_eval(&ex, &[0.0, 1.0]).unwrap(), ExtendedReal::PosInf);
        assert!(k_eval(&ex, &[0.5, 0.999]).unwrap().is_finite());
        assert_eq!(
            k_domain(&fixtures::exp_poly_23()).to_string(),
            "(−∞,2]"
        );
        assert!(k_domain(&fixtures::square()).is_full_space());
    }

    #[test]
    fn mixture_rule_not_the_displayed_sum() {
        // K = log(½ e^{K1(u1)+K1(u2)} + ½ e^{K3(u2)})
        let ex = fixtures::ex_nts();
        let (u1, u2) = (0.3, 0.5);
        let k1 = |s: f64| -(1.0f64 - s).ln();
        let k3 = 0.191_410_198_798_597_75;
        let expected = (0.5 * (k1(u1) + k1(u2)).exp() + 0.5 * f64::exp(k3)).ln();
        let got = k_eval(&ex, &[u1, u2]).unwrap().to_f64();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn gradient_examples() {
        let e = fixtures::exp1d();
        assert_eq!(k_grad(&e, &[0.0]).unwrap(), vec![1.0]);
        assert!(matches!(k_grad(&e, &[1.0]), Err(Error::NotInterior(_))));
        let sq = fixtures::square();
        let g = k_grad(&sq, &[0.0, 0.0]).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-15 && (g[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hessian_is_covariance_at_origin() {
        let sq = fixtures::square();
        let e = k_eval_full(&sq, &[0.0, 0.0], 2).unwrap().unwrap();
        assert!((e.hessian[0][0] - 0.25).abs() < 1e-15);
        assert!(e.hessian[0][1].abs() < 1e-15);
    }

    #[test]
    fn support_of_box() {
        let ex = fixtures::ex_nts();
        assert_eq!(
            k_domain(&ex).support(&qvec(&[1, 1])),
            ExtendedRational::Finite(rat(2))
        );
        assert_eq!(
            k_domain(&ex).support(&qvec(&[-1, 0])),
            ExtendedRational::PosInf
        );
    }

    #[test]
    fn steepness_examples() {
        let ex = steepness(&fixtures::ex_nts()).unwrap();
        assert!(ex.steep);
        assert_eq!(ex.facets.len(), 2);
        assert!(ex.facets.iter().all(|f| f.agrees));
        let t = steepness(&fixtures::exp_poly_23()).unwrap();
        assert!(!t.steep);
        assert_eq!(t.facets[0].numerically_steep, Some(false));
        assert!(is_steep(&fixtures::square()).unwrap());
        assert!(steepness(&fixtures::square()).unwrap().facets.is_empty());
        assert!(is_steep(&fixtures::exp1d()).unwrap());
    }

    #[test]
    fn k_tilde_truncates_to_the_cylinder() {
        let ex = fixtures::ex_nts();
        let axis = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        assert_eq!(k_tilde_eval(&ex, &axis, &[0.0, 1.5]).unwrap(), ExtendedReal::PosInf);
        let cond = ex.condition_on_hyperplane(&axis).unwrap();
        assert!(k_eval(&cond, &[0.0, 1.5]).unwrap().is_finite());
        let v = k_tilde_eval(&ex, &axis, &[0.0, 0.5]).unwrap().to_f64();
        assert!((v - 0.191_410_198_798_597_75).abs() < 1e-12);
        assert_eq!(
            k_tilde_eval(&ex, &axis, &[0.0, 0.0]).unwrap(),
            ExtendedReal::Finite(0.0)
        );
        // The normal direction is free.
        assert!(k_tilde_eval(&ex, &axis, &[7.0, 0.5]).unwrap().is_finite());
        let bottom = Hyperplane::new(qvec(&[0, 1]), rat(0)).unwrap();
        assert_eq!(k_tilde_eval(&ex, &bottom, &[0.0, 0.0]), Err(Error::ZeroMass));
    }
}
