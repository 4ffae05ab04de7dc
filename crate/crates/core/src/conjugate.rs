//! Numerical Legendre–Fenchel transform `I_X(v) = sup_u (u·v − K_X(u))`.
//!
//! Points in the relative interior of the convex support go to a projected
//! Newton ascent. Boundary points are routed through the conditional on a
//! facet containing them: for `v` in a supporting hyperplane `L`,
//! `I_X(v) = (K̃_{X|L})*(v) − log P(X ∈ L)` where `K̃_{X|L}` is `K_{X|L}`
//! cut down to `D(K_X) + R·n`. The cut-down region travels with the
//! recursion, so every level solves a problem in the relative interior.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::convgeo::{convex_support, Constraint, Hyperplane, Polyhedron};
use crate::distmodel::DistributionSpec;
use crate::error::{Error, Result};
use crate::exact::{dot, from_f64, is_zero_vec, nullspace, to_f64, vec_to_f64, QVec, Rational};
use crate::extended::ExtendedReal;
use crate::interval::{Bound, Interval, Side};
use crate::logmgf::{endpoint_profile, in_projected_cylinder, k_domain, k_eval_full, BoxRegion};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Gradient-norm tolerance of the ascent.
    pub tol: f64,
    pub max_iter: usize,
    /// Objective values above this are reported as `+∞`.
    pub infinity_threshold: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            tol: 1e-8,
            max_iter: 200,
            infinity_threshold: 1e6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateStatus {
    Converged,
    DivergedToInfinity,
    HitIterationCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub value: ExtendedReal,
    /// Maximizer of the last-stage problem; `None` when the sup diverged.
    pub maximizer: Option<Vec<f64>>,
    pub status: RateStatus,
    pub iterations: usize,
    /// How the point was handled, outermost first.
    pub route: Vec<String>,
    /// Objective values of the final ascent, nondecreasing.
    pub trace: Vec<f64>,
}

impl RateResult {
    fn infinite(route: Vec<String>) -> Self {
        RateResult {
            value: ExtendedReal::PosInf,
            maximizer: None,
            status: RateStatus::DivergedToInfinity,
            iterations: 0,
            route,
            trace: Vec::new(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `B + span(dirs)`: the region the dual variable may range over.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub boxr: BoxRegion,
    /// Free directions that are not coordinate axes.
    pub dirs: Vec<QVec>,
}

impl Region {
    pub fn from_box(boxr: BoxRegion) -> Self {
        Region {
            boxr,
            dirs: Vec::new(),
        }
    }

    fn axis_of(a: &[Rational]) -> Option<usize> {
        let nz: Vec<usize> = (0..a.len()).filter(|&j| !a[j].is_zero()).collect();
        (nz.len() == 1).then(|| nz[0])
    }

    /// `R + R·a`.
    pub fn add_direction(&self, a: &[Rational]) -> Region {
        let mut out = self.clone();
        if let Some(j) = Self::axis_of(a) {
            out.boxr.intervals[j] = Interval::real_line();
        } else if !self.dirs.iter().any(|w| crate::exact::rank(&[w.clone(), a.to_vec()], a.len()) < 2) {
            out.dirs.push(a.to_vec());
        }
        out
    }

    /// `R ∩ D` for a box `D`; `None` when the result is not of the form
    /// box + span(dirs) that this module handles.
    pub fn intersect_box(&self, d: &BoxRegion) -> Option<Region> {
        if self.dirs.is_empty() {
            return Some(Region::from_box(self.boxr.intersect(d)));
        }
        if d.is_full_space() {
            return Some(self.clone());
        }
        None
    }

    /// Whether `a` is a recession direction of the region.
    pub fn has_recession(&self, a: &[Rational]) -> bool {
        let in_box_cone = |x: &[Rational]| {
            self.boxr.intervals.iter().zip(x).all(|(iv, xj)| {
                (!xj.is_positive() || iv.hi == Bound::Infinite)
                    && (!xj.is_negative() || iv.lo == Bound::Infinite)
            })
        };
        match self.dirs.len() {
            0 => in_box_cone(a),
            1 => {
                // a − t·w in rec(B) for some t: an interval condition on t.
                let w = &self.dirs[0];
                let mut t = Interval::real_line();
                for ((iv, aj), wj) in self.boxr.intervals.iter().zip(a).zip(w) {
                    let need_le0 = iv.hi != Bound::Infinite;
                    let need_ge0 = iv.lo != Bound::Infinite;
                    // x_j = a_j − t w_j
                    for (need, sign) in [(need_le0, 1), (need_ge0, -1)] {
                        if !need {
                            continue;
                        }
                        // sign·(a_j − t w_j) <= 0
                        let s = Rational::from_integer(sign.into());
                        let coef = -(&s * wj);
                        let rhs = -(&s * aj);
                        // coef·t <= rhs
                        if coef.is_zero() {
                            if rhs.is_negative() {
                                return false;
                            }
                        } else {
                            let bound = &rhs / &coef;
                            let iv_t = if coef.is_positive() {
                                Interval {
                                    lo: Bound::Infinite,
                                    hi: Bound::closed(bound),
                                }
                            } else {
                                Interval {
                                    lo: Bound::closed(bound),
                                    hi: Bound::Infinite,
                                }
                            };
                            t = t.intersect(&iv_t);
                        }
                    }
                }
                match (t.lo.value(), t.hi.value()) {
                    (Some(a), Some(b)) => a <= b,
                    _ => true,
                }
            }
            _ => false,
        }
    }

    pub fn contains(&self, u: &[Rational]) -> bool {
        match self.dirs.len() {
            0 => self.boxr.contains(u),
            1 => in_projected_cylinder(&self.boxr, &self.dirs[0], u),
            _ => self.closure().contains(u),
        }
    }

    pub fn closure(&self) -> Polyhedron {
        let cl = Polyhedron::from_box(&self.boxr);
        let (pts, mut rays) = cl.generators();
        for w in &self.dirs {
            rays.push(w.clone());
            rays.push(w.iter().map(|x| -x).collect());
        }
        Polyhedron::from_generators(self.boxr.dimension(), pts, rays).expect("nonempty")
    }
}

/// `I_X(v)` at a rational point.
pub fn rate_eval(spec: &DistributionSpec, v: &[Rational], opts: &RateOptions) -> Result<RateResult> {
    check_dim(spec, v.len())?;
    let region = Region::from_box(k_domain(spec));
    let mut route = Vec::new();
    conj(spec, &region, v, opts, &mut route)
}

pub fn rate_eval_f64(spec: &DistributionSpec, v: &[f64], opts: &RateOptions) -> Result<RateResult> {
    let q = v.iter().map(|&x| from_f64(x)).collect::<Result<Vec<_>>>()?;
    rate_eval(spec, &q, opts)
}

/// `(K̃_{X|L})*(v) − log P(X ∈ L)`, which equals `I_X(v)` for `v ∈ L`.
pub fn k_tilde_conjugate(
    spec: &DistributionSpec,
    l: &Hyperplane,
    v: &[Rational],
    opts: &RateOptions,
) -> Result<RateResult> {
    check_dim(spec, v.len())?;
    let mass = spec.mass_in_hyperplane(l);
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    let cond = spec.condition_on_hyperplane(l)?;
    let region = Region::from_box(k_domain(spec)).add_direction(&l.normal);
    let mut route = vec![format!("K̃ on {l} (mass {})", crate::interval::short(&mass))];
    let mut r = conj(&cond, &region, v, opts, &mut route)?;
    r.value = r.value + ExtendedReal::Finite(-to_f64(&mass).ln());
    Ok(r)
}

fn check_dim(spec: &DistributionSpec, got: usize) -> Result<()> {
    if got != spec.dimension() {
        return Err(Error::Dimension {
            expected: spec.dimension(),
            got,
        });
    }
    Ok(())
}

fn conj(
    y: &DistributionSpec,
    region: &Region,
    v: &[Rational],
    opts: &RateOptions,
    route: &mut Vec<String>,
) -> Result<RateResult> {
    let cy = convex_support(y);
    let dom = k_domain(y);
    let Some(feasible) = region.intersect_box(&dom) else {
        route.push("direct ascent (region not reducible)".into());
        return ascent(y, region, &dom, &cy, v, opts, route);
    };

    if !cy.contains(v) {
        let mut violated: Vec<QVec> = Vec::new();
        for c in cy.equalities() {
            let s = dot(&c.normal, v);
            if s > c.offset {
                violated.push(c.normal.clone());
            } else if s < c.offset {
                violated.push(c.normal.iter().map(|x| -x).collect());
            }
        }
        for c in cy.inequalities() {
            if dot(&c.normal, v) > c.offset {
                violated.push(c.normal.clone());
            }
        }
        if let Some(n) = violated.iter().find(|n| feasible.has_recession(n)) {
            route.push(format!(
                "outside the convex support; unbounded ascent along {}",
                fmt_vec(n)
            ));
            return Ok(RateResult::infinite(route.clone()));
        }
        route.push("outside the convex support; direct ascent".into());
        return ascent(y, &feasible, &dom, &cy, v, opts, route);
    }

    if cy.rint_contains(v) {
        route.push(format!("relative interior of a {}-dimensional support", cy.dim()));
        return ascent(y, &feasible, &dom, &cy, v, opts, route);
    }

    let facets: Vec<_> = cy
        .facets()
        .into_iter()
        .filter(|f| f.hyperplane.contains(v) && feasible.has_recession(&f.outward))
        .collect();
    for f in &facets {
        if y.mass_in_hyperplane(&f.hyperplane).is_zero() {
            route.push(format!("zero-mass face on {}", f.hyperplane));
            return Ok(RateResult::infinite(route.clone()));
        }
    }
    if let Some(f) = facets.first() {
        let mass = y.mass_in_hyperplane(&f.hyperplane);
        route.push(format!(
            "face on {} (mass {})",
            f.hyperplane,
            crate::interval::short(&mass)
        ));
        let cond = y.condition_on_hyperplane(&f.hyperplane)?;
        let next = feasible.add_direction(&f.outward);
        let mut r = conj(&cond, &next, v, opts, route)?;
        r.value = r.value + ExtendedReal::Finite(-to_f64(&mass).ln());
        return Ok(r);
    }
    route.push("relative boundary without a usable face; direct ascent".into());
    ascent(y, &feasible, &dom, &cy, v, opts, route)
}

fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(crate::interval::short).collect();
    format!("({})", parts.join(","))
}

/// A linear constraint `a·z ≤ b` on the reduced variable; barrier
/// constraints are never touched, only approached.
#[derive(Debug, Clone)]
struct ZConstraint {
    a_exact: QVec,
    a: Vec<f64>,
    b: f64,
    barrier: bool,
}

/// Concave maximization of `u·v − K_Y(u)` over `u = Bz` in the direction
/// space of `aff C_Y`, subject to the region and the domain of `K_Y`.
fn ascent(
    y: &DistributionSpec,
    region: &Region,
    dom: &BoxRegion,
    cy: &Polyhedron,
    v: &[Rational],
    opts: &RateOptions,
    route: &mut Vec<String>,
) -> Result<RateResult> {
    let d = y.dimension();
    let eq_normals: Vec<QVec> = cy.equalities().iter().map(|c| c.normal.clone()).collect();
    let basis: Vec<QVec> = nullspace(&eq_normals, d);
    let k = basis.len();
    let bf: Vec<Vec<f64>> = basis.iter().map(|b| vec_to_f64(b)).collect();
    let vf = vec_to_f64(v);
    let to_u = |z: &[f64]| -> Vec<f64> {
        let mut u = vec![0.0; d];
        for (zl, b) in z.iter().zip(&bf) {
            for j in 0..d {
                u[j] += zl * b[j];
            }
        }
        u
    };

    // Constraints in u-space, then reduced to z.
    let mut ucons: Vec<(Constraint, bool)> = region
        .closure()
        .inequalities()
        .iter()
        .map(|c| (c.clone(), false))
        .collect();
    for (j, iv) in dom.intervals.iter().enumerate() {
        for side in [Side::Lower, Side::Upper] {
            let Bound::Finite { value, closed } = iv.bound(side) else {
                continue;
            };
            let finite_grad = *closed
                && y.components().iter().all(|c| {
                    let law = &c.laws[j];
                    law.k_domain().bound(side).value() != Some(value)
                        || endpoint_profile(law, side).is_none_or(|p| p.grad_finite_at_endpoint)
                });
            let mut n = vec![Rational::zero(); d];
            let (nj, off) = if side == Side::Upper {
                (Rational::from_integer(1.into()), value.clone())
            } else {
                (Rational::from_integer((-1).into()), -value.clone())
            };
            n[j] = nj;
            ucons.push((
                Constraint {
                    normal: n,
                    offset: off,
                    is_equality: false,
                },
                !finite_grad,
            ));
        }
    }
    let zcons: Vec<ZConstraint> = ucons
        .into_iter()
        .filter_map(|(c, barrier)| {
            let a_exact: QVec = basis.iter().map(|b| dot(b, &c.normal)).collect();
            if is_zero_vec(&a_exact) {
                return None;
            }
            Some(ZConstraint {
                a: vec_to_f64(&a_exact),
                a_exact,
                b: to_f64(&c.offset),
                barrier,
            })
        })
        .collect();

    let feasible = |z: &[f64]| {
        zcons.iter().all(|c| {
            let s: f64 = c.a.iter().zip(z).map(|(x, y)| x * y).sum();
            if c.barrier {
                s < c.b
            } else {
                s <= c.b + 1e-12 * (1.0 + c.b.abs())
            }
        })
    };
    // Objective, reduced gradient and reduced Hessian of u·v − K(u).
    let objective = |z: &[f64]| -> Result<Option<(f64, Vec<f64>, Vec<Vec<f64>>)>> {
        if !feasible(z) {
            return Ok(None);
        }
        let u = to_u(z);
        let Some(e) = k_eval_full(y, &u, 2)? else {
            return Ok(None);
        };
        if !e.value.is_finite() || e.grad.iter().any(|g| !g.is_finite()) {
            return Ok(None);
        }
        let phi: f64 = u.iter().zip(&vf).map(|(a, b)| a * b).sum::<f64>() - e.value;
        let gu: Vec<f64> = vf.iter().zip(&e.grad).map(|(a, b)| a - b).collect();
        let gz: Vec<f64> = bf.iter().map(|b| b.iter().zip(&gu).map(|(x, y)| x * y).sum()).collect();
        let mut hz = vec![vec![0.0; k]; k];
        for p in 0..k {
            for q in 0..k {
                let mut s = 0.0;
                for a in 0..d {
                    for c in 0..d {
                        let h = e.hessian[a][c];
                        let h = if h.is_finite() {
                            h
                        } else if a == c {
                            1e12
                        } else {
                            0.0
                        };
                        s += bf[p][a] * h * bf[q][c];
                    }
                }
                hz[p][q] = -s;
            }
        }
        Ok(Some((phi, gz, hz)))
    };

    let vscale = vf.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut z = vec![0.0; k];
    let (mut phi, mut g, mut h) = objective(&z)?.ok_or_else(|| {
        Error::Geometry("the origin is not feasible for the conjugate problem".into())
    })?;
    let mut trace = vec![phi];
    let mut active: Vec<usize> = Vec::new();
    let mut status = RateStatus::HitIterationCap;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        if phi > opts.infinity_threshold {
            status = RateStatus::DivergedToInfinity;
            break;
        }
        iterations += 1;
        let act_rows: Vec<QVec> = active.iter().map(|&i| zcons[i].a_exact.clone()).collect();
        let nbasis: Vec<Vec<f64>> = nullspace(&act_rows, k).iter().map(|n| vec_to_f64(n)).collect();
        let r = nbasis.len();
        let gr: Vec<f64> = nbasis
            .iter()
            .map(|n| n.iter().zip(&g).map(|(a, b)| a * b).sum())
            .collect();
        let gr_norm = gr.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if gr_norm <= opts.tol * vscale {
            if active.is_empty() {
                status = RateStatus::Converged;
                break;
            }
            // g = sum λ_i a_i with λ ≥ 0 at a constrained maximum.
            let m = active.len();
            let a = DMatrix::from_fn(k, m, |row, col| zcons[active[col]].a[row]);
            let lam = a
                .clone()
                .svd(true, true)
                .solve(&DVector::from_vec(g.clone()), 1e-14)
                .map_err(|e| Error::Geometry(e.to_string()))?;
            let (worst, min_l) = lam
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
            if min_l >= -opts.tol * vscale {
                status = RateStatus::Converged;
                break;
            }
            active.remove(worst);
            continue;
        }

        // Newton direction in the free subspace, gradient as a fallback.
        let nmat = DMatrix::from_fn(k, r, |row, col| nbasis[col][row]);
        let hmat = DMatrix::from_fn(k, k, |p, q| h[p][q]);
        let hr = -(nmat.transpose() * &hmat * &nmat);
        let damp = 1e-12 * (1.0 + hr.diagonal().amax());
        let hr = hr + DMatrix::identity(r, r) * damp;
        let grv = DVector::from_vec(gr.clone());
        let newton = hr.lu().solve(&grv).map(|p| &nmat * p);
        let gdir = &nmat * &grv;
        let mut dirs: Vec<DVector<f64>> = Vec::new();
        if let Some(nd) = newton {
            if nd.iter().all(|x| x.is_finite()) && nd.dot(&DVector::from_vec(g.clone())) > 0.0 {
                dirs.push(nd);
            }
        }
        dirs.push(gdir);

        let mut accepted = false;
        for dir in &dirs {
            let dvec: Vec<f64> = dir.iter().copied().collect();
            let slope: f64 = dvec.iter().zip(&g).map(|(a, b)| a * b).sum();
            // Largest step keeping the closed constraints.
            let mut alpha_max = f64::INFINITY;
            let mut hit = None;
            for (i, c) in zcons.iter().enumerate() {
                if c.barrier || active.contains(&i) {
                    continue;
                }
                let ad: f64 = c.a.iter().zip(&dvec).map(|(x, y)| x * y).sum();
                if ad > 0.0 {
                    let az: f64 = c.a.iter().zip(&z).map(|(x, y)| x * y).sum();
                    let t = ((c.b - az) / ad).max(0.0);
                    if t < alpha_max {
                        alpha_max = t;
                        hit = Some(i);
                    }
                }
            }
            let mut alpha = alpha_max.min(1.0);
            // A nearly flat objective can make Newton steps tiny; let the
            // step grow while the objective keeps improving.
            let mut tries = 0;
            while tries < 80 {
                tries += 1;
                let mut zn: Vec<f64> = z.iter().zip(&dvec).map(|(a, b)| a + alpha * b).collect();
                let at_hit = alpha == alpha_max && hit.is_some();
                if at_hit {
                    let c = &zcons[hit.unwrap()];
                    let az: f64 = c.a.iter().zip(&zn).map(|(x, y)| x * y).sum();
                    let aa: f64 = c.a.iter().map(|x| x * x).sum();
                    let s = (c.b - az) / aa;
                    for (x, a) in zn.iter_mut().zip(&c.a) {
                        *x += s * a;
                    }
                }
                if let Some((p2, g2, h2)) = objective(&zn)? {
                    if p2 >= phi + 1e-4 * alpha * slope && p2 >= phi {
                        z = zn;
                        phi = p2;
                        g = g2;
                        h = h2;
                        trace.push(phi);
                        if at_hit {
                            active.push(hit.unwrap());
                        }
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-18 {
                    break;
                }
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            // No ascent possible at working precision.
            status = if gr_norm <= opts.tol.sqrt() * vscale {
                RateStatus::Converged
            } else {
                RateStatus::HitIterationCap
            };
            break;
        }
    }
    if phi > opts.infinity_threshold {
        status = RateStatus::DivergedToInfinity;
    }
    debug_assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    let value = if status == RateStatus::DivergedToInfinity {
        ExtendedReal::PosInf
    } else {
        ExtendedReal::Finite(phi)
    };
    Ok(RateResult {
        value,
        maximizer: (status != RateStatus::DivergedToInfinity).then(|| to_u(&z)),
        status,
        iterations,
        route: route.clone(),
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub half_width: f64,
    pub n_per_axis: usize,
    pub zoom_levels: usize,
    pub max_doublings: usize,
    pub infinity_threshold: f64,
}

impl OracleOptions {
    /// Grid sizes scaled to the dimension.
    pub fn for_dimension(d: usize) -> Self {
        OracleOptions {
            half_width: 20.0,
            n_per_axis: match d {
                1 => 4001,
                2 => 201,
                _ => 41,
            },
            zoom_levels: 12,
            max_doublings: 4,
            infinity_threshold: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// A lower bound for `I_X(v)`; `+∞` when it exceeded the threshold.
    pub value: ExtendedReal,
    pub argmax: Vec<f64>,
    pub half_width: f64,
    /// Whether doubling the grid width stopped changing the value.
    pub stable: bool,
}

/// Brute-force `max u·v − K_X(u)` over grids on `[−W, W]^d ∩ D(K_X)`,
/// refined around the best point and repeated with doubled `W`.
pub fn rate_eval_oracle(
    spec: &DistributionSpec,
    v: &[f64],
    opts: &OracleOptions,
) -> Result<OracleResult> {
    check_dim(spec, v.len())?;
    let dom = k_domain(spec);
    let mut w = opts.half_width;
    let mut prev: Option<(f64, Vec<f64>)> = None;
    let mut increments: Vec<f64> = Vec::new();
    for _ in 0..=opts.max_doublings {
        let (val, arg) = oracle_at_width(spec, &dom, v, w, opts)?;
        if val > opts.infinity_threshold {
            return Ok(OracleResult {
                value: ExtendedReal::PosInf,
                argmax: arg,
                half_width: w,
                stable: true,
            });
        }
        if let Some((pv, _)) = &prev {
            increments.push(val - pv);
            if (val - pv).abs() <= 1e-9 * (1.0 + val.abs()) {
                return Ok(OracleResult {
                    value: ExtendedReal::Finite(val.max(*pv)),
                    argmax: arg,
                    half_width: w,
                    stable: true,
                });
            }
        }
        prev = Some((val, arg));
        w *= 2.0;
    }
    let (val, arg) = prev.expect("at least one width");
    // Growth proportional to W: the sup is attained at infinity.
    if let [.., a, b] = increments[..] {
        if b > 1e-6 && b >= 1.5 * a {
            return Ok(OracleResult {
                value: ExtendedReal::PosInf,
                argmax: arg,
                half_width: w / 2.0,
                stable: true,
            });
        }
    }
    Ok(OracleResult {
        value: ExtendedReal::Finite(val),
        argmax: arg,
        half_width: w / 2.0,
        stable: false,
    })
}

fn axis_grid(iv: &Interval, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut lo = lo;
    let mut hi = hi;
    let mut extra = Vec::new();
    if let Some(b) = iv.hi.value().map(to_f64) {
        if b <= hi {
            hi = b;
            let span = (hi - lo).max(1e-300);
            for f in [1e-1, 1e-3, 1e-6, 1e-9] {
                extra.push(b - f * span.min(1.0));
            }
        }
    }
    if let Some(a) = iv.lo.value().map(to_f64) {
        if a >= lo {
            lo = a;
            let span = (hi - lo).max(1e-300);
            for f in [1e-1, 1e-3, 1e-6, 1e-9] {
                extra.push(a + f * span.min(1.0));
            }
        }
    }
    let mut g: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect();
    g.extend(extra.into_iter().filter(|x| *x > lo && *x < hi));
    g.retain(|&x| iv.contains_f64(x));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// One grid pass plus zoom refinement. `K_X` is separable per component, so
/// law values are tabulated per axis and combined.
fn oracle_at_width(
    spec: &DistributionSpec,
    dom: &BoxRegion,
    v: &[f64],
    w: f64,
    opts: &OracleOptions,
) -> Result<(f64, Vec<f64>)> {
    let d = spec.dimension();
    let mut ranges: Vec<(f64, f64)> = vec![(-w, w); d];
    let mut n = opts.n_per_axis;
    let mut best = (f64::NEG_INFINITY, vec![0.0; d]);
    let mut level = 0;
    // Window moves that do not shrink; lets the zoom follow flat ridges.
    let mut slides = 0;
    while level <= opts.zoom_levels {
        let grids: Vec<Vec<f64>> = (0..d)
            .map(|j| axis_grid(&dom.intervals[j], ranges[j].0, ranges[j].1, n))
            .collect();
        if grids.iter().any(|g| g.is_empty()) {
            break;
        }
        let (val, arg) = grid_max(spec, &grids, v)?;
        let improved = val > best.0;
        if improved {
            best = (val, arg);
        }
        let on_edge = level > 0
            && improved
            && (0..d).any(|j| {
                let g = &grids[j];
                g.len() > 2 && (best.1[j] == g[0] || best.1[j] == g[g.len() - 1])
            });
        if on_edge && slides < 500 {
            slides += 1;
            for j in 0..d {
                let half = (ranges[j].1 - ranges[j].0) / 2.0;
                ranges[j] = (best.1[j] - half, best.1[j] + half);
            }
            continue;
        }
        // Zoom: ±3 spacings around the incumbent.
        for j in 0..d {
            let h = (ranges[j].1 - ranges[j].0) / (n - 1).max(1) as f64;
            ranges[j] = (best.1[j] - 3.0 * h, best.1[j] + 3.0 * h);
        }
        n = 25;
        if level > 0 && ranges.iter().all(|(a, b)| b - a < 1e-13 * (1.0 + a.abs())) {
            break;
        }
        level += 1;
    }
    Ok(best)
}

fn grid_max(spec: &DistributionSpec, grids: &[Vec<f64>], v: &[f64]) -> Result<(f64, Vec<f64>)> {
    let d = grids.len();
    let models = spec.models();
    // table[i][j][p] = shift_ij·u + K_ij(u) at grid point p of axis j.
    let mut table: Vec<Vec<Vec<Option<f64>>>> = Vec::with_capacity(models.len());
    for m in models {
        let mut per_axis = Vec::with_capacity(d);
        for j in 0..d {
            let mut col = Vec::with_capacity(grids[j].len());
            for &u in &grids[j] {
                col.push(m.laws[j].eval(u, 0)?.map(|lv| m.shift[j] * u + lv.k));
            }
            per_axis.push(col);
        }
        table.push(per_axis);
    }
    let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();
    let mut best = (f64::NEG_INFINITY, vec![0.0; d]);
    let mut idx = vec![0usize; d];
    let mut parts = vec![0.0; models.len()];
    for flat in 0..total {
        let mut rem = flat;
        for j in 0..d {
            idx[j] = rem % sizes[j];
            rem /= sizes[j];
        }
        let mut ok = true;
        for (i, m) in models.iter().enumerate() {
            let mut s = m.log_weight;
            for j in 0..d {
                match table[i][j][idx[j]] {
                    Some(x) => s += x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            parts[i] = s;
        }
        if !ok {
            continue;
        }
        let top = parts.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let k = top + parts.iter().map(|p| (p - top).exp()).sum::<f64>().ln();
        let uv: f64 = (0..d).map(|j| grids[j][idx[j]] * v[j]).sum();
        let val = uv - k;
        if val > best.0 {
            best = (val, (0..d).map(|j| grids[j][idx[j]]).collect());
        }
    }
    Ok(best)
}

/// Discrete 1-D Legendre transform on grids.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTransform1D {
    pub u: Vec<f64>,
    pub k: Vec<f64>,
    pub v: Vec<f64>,
    pub i: Vec<f64>,
}

/// `I(v_q) = max_p (u_p v_q − K_p)` in linear time: the maximizing `u_p` are
/// vertices of the lower convex hull of the samples, visited in slope order.
pub fn llt_1d(u: &[f64], k: &[f64], v: &[f64]) -> Result<GridTransform1D> {
    if u.len() < 2 || u.len() != k.len() {
        return Err(Error::InvalidArgument(
            "need at least two matching (u, K) samples".into(),
        ));
    }
    if k.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("K samples must be finite".into()));
    }
    if u.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("u grid must increase".into()));
    }
    let mut hull: Vec<usize> = Vec::with_capacity(u.len());
    for p in 0..u.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b if it lies on or above the chord from a to p
            let cross = (u[b] - u[a]) * (k[p] - k[a]) - (k[b] - k[a]) * (u[p] - u[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut h = 0;
    for &q in &order {
        let vq = v[q];
        while h + 1 < hull.len() {
            let (a, b) = (hull[h], hull[h + 1]);
            let slope = (k[b] - k[a]) / (u[b] - u[a]);
            if slope < vq {
                h += 1;
            } else {
                break;
            }
        }
        let p = hull[h];
        out[q] = u[p] * vq - k[p];
    }
    Ok(GridTransform1D {
        u: u.to_vec(),
        k: k.to_vec(),
        v: v.to_vec(),
        i: out,
    })
}

/// One point of a restriction-identity comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionPoint {
    pub v: QVec,
    /// `I_X(v)` computed through `K̃_{X|L}`.
    pub lhs: ExtendedReal,
    /// `I_{X|L}(v) − log P(X ∈ L)`.
    pub rhs: ExtendedReal,
    pub delta: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionReport {
    pub hyperplane: Hyperplane,
    pub mass: Rational,
    pub points: Vec<RestrictionPoint>,
    pub holds: bool,
}

/// Compares `I_X(v)` with `I_{X|L}(v) − log P(X ∈ L)` at points of `L`.
pub fn restriction_identity_check(
    spec: &DistributionSpec,
    l: &Hyperplane,
    points: &[QVec],
    tol: f64,
    opts: &RateOptions,
) -> Result<RestrictionReport> {
    let mass = spec.mass_in_hyperplane(l);
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    if mass == Rational::from_integer(1.into()) {
        return Err(Error::FullMass);
    }
    let cx = convex_support(spec);
    let side = [cx.support(&l.normal), cx.support(&l.normal.iter().map(|x| -x).collect::<Vec<_>>())];
    let supports = side.iter().enumerate().any(|(s, h)| {
        h.finite().is_some_and(|h| {
            if s == 0 {
                *h == l.offset
            } else {
                *h == -l.offset.clone()
            }
        })
    });
    if !supports {
        return Err(Error::NotSupporting);
    }
    let cond = spec.condition_on_hyperplane(l)?;
    let log_mass = to_f64(&mass).ln();
    let mut out = Vec::with_capacity(points.len());
    for v in points {
        if !l.contains(v) {
            return Err(Error::InvalidArgument(format!(
                "test point {} is not on {l}",
                fmt_vec(v)
            )));
        }
        let lhs = k_tilde_conjugate(spec, l, v, opts)?.value;
        let rhs = rate_eval(&cond, v, opts)?.value + ExtendedReal::Finite(-log_mass);
        let (delta, holds) = match (&lhs, &rhs) {
            (ExtendedReal::PosInf, ExtendedReal::PosInf) => (0.0, true),
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                ((a - b).abs(), (a - b).abs() <= tol)
            }
            _ => (f64::INFINITY, false),
        };
        out.push(RestrictionPoint {
            v: v.clone(),
            lhs,
            rhs,
            delta,
            holds,
        });
    }
    Ok(RestrictionReport {
        hyperplane: l.clone(),
        mass,
        holds: out.iter().all(|p| p.holds),
        points: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qvec, rat, ratio};
    use crate::fixtures;

    fn opts() -> RateOptions {
        RateOptions::default()
    }

    const K3_ONE: f64 = 0.417_655_770_280_912_68;
    const K3P_ONE: f64 = 0.496_246_130_499_366_18;
    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn bernoulli_rates() {
        let b = fixtures::bernoulli();
        let r = rate_eval(&b, &[ratio(1, 2)], &opts()).unwrap();
        assert_eq!(r.status, RateStatus::Converged);
        assert!(r.value.to_f64().abs() < 1e-14);
        assert_eq!(r.maximizer, Some(vec![0.0]));
        let r = rate_eval(&b, &[rat(1)], &opts()).unwrap();
        assert!((r.value.to_f64() - LN2).abs() < 1e-12);
        let r = rate_eval(&b, &[ratio(3, 2)], &opts()).unwrap();
        assert_eq!(r.value, ExtendedReal::PosInf);
        let v = 0.7;
        let closed = v * (2.0f64 * v).ln() + (1.0 - v) * (2.0 * (1.0 - v)).ln();
        let r = rate_eval_f64(&b, &[v], &opts()).unwrap();
        assert!((r.value.to_f64() - closed).abs() < 1e-12);
    }

    #[test]
    fn exponential_rate_closed_form() {
        let e = fixtures::exp1d();
        for v in [0.25, 0.5, 2.0, 7.5] {
            let r = rate_eval_f64(&e, &[v], &opts()).unwrap();
            let exact = v - 1.0 - f64::ln(v);
            assert!((r.value.to_f64() - exact).abs() < 1e-10, "v={v}");
        }
        // zero-mass vertex and the outside
        assert_eq!(rate_eval_f64(&e, &[0.0], &opts()).unwrap().value, ExtendedReal::PosInf);
        assert_eq!(rate_eval_f64(&e, &[-1.0], &opts()).unwrap().value, ExtendedReal::PosInf);
    }

    #[test]
    fn counterexample_boundary_is_affine() {
        let ex = fixtures::ex_nts();
        for v2 in [1.0, 2.0, 3.5] {
            let r = rate_eval_f64(&ex, &[0.0, v2], &opts()).unwrap();
            assert!(v2 > K3P_ONE);
            let expected = v2 - K3_ONE + LN2;
            assert!((r.value.to_f64() - expected).abs() < 1e-9, "{r:?}");
            assert!(r.route.iter().any(|s| s.contains("face on v1 = 0")));
        }
        assert_eq!(
            rate_eval_f64(&ex, &[1.0, 0.0], &opts()).unwrap().value,
            ExtendedReal::PosInf
        );
        assert_eq!(
            rate_eval_f64(&ex, &[0.0, 0.0], &opts()).unwrap().value,
            ExtendedReal::PosInf
        );
    }

    #[test]
    fn square_vertices_and_edges() {
        let sq = fixtures::square();
        let r = rate_eval(&sq, &qvec(&[0, 0]), &opts()).unwrap();
        assert!((r.value.to_f64() - 4f64.ln()).abs() < 1e-12);
        let r = rate_eval(&sq, &[rat(0), ratio(1, 2)], &opts()).unwrap();
        assert!((r.value.to_f64() - LN2).abs() < 1e-12);
        let r = rate_eval(&sq, &[ratio(1, 2), ratio(1, 2)], &opts()).unwrap();
        assert!(r.value.to_f64().abs() < 1e-14);
        assert_eq!(
            rate_eval(&sq, &[rat(2), ratio(1, 2)], &opts()).unwrap().value,
            ExtendedReal::PosInf
        );
    }

    #[test]
    fn ascent_trace_is_monotone() {
        let ex = fixtures::ex_nts();
        let r = rate_eval_f64(&ex, &[0.3, 2.0], &opts()).unwrap();
        assert_eq!(r.status, RateStatus::Converged);
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn oracle_examples() {
        let b = fixtures::bernoulli();
        let o = rate_eval_oracle(&b, &[0.5], &OracleOptions::for_dimension(1)).unwrap();
        assert!(o.value.to_f64().abs() < 1e-6);
        let e = fixtures::exp1d();
        let o = rate_eval_oracle(&e, &[2.0], &OracleOptions::for_dimension(1)).unwrap();
        assert!((o.value.to_f64() - (1.0 - LN2)).abs() < 1e-4);
        let o = rate_eval_oracle(&b, &[1.5], &OracleOptions::for_dimension(1)).unwrap();
        assert_eq!(o.value, ExtendedReal::PosInf);
    }

    #[test]
    fn llt_examples() {
        let n = 10_000;
        let u: Vec<f64> = (0..n).map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64).collect();
        let k: Vec<f64> = u.iter().map(|x| x * x / 2.0).collect();
        let v: Vec<f64> = (0..101).map(|i| -5.0 + 0.1 * i as f64).collect();
        let t = llt_1d(&u, &k, &v).unwrap();
        for (vq, iq) in t.v.iter().zip(&t.i) {
            assert!((iq - vq * vq / 2.0).abs() < 1e-3);
        }
        let zero = vec![0.0; n];
        let t = llt_1d(&u, &zero, &[0.0, 1.0]).unwrap();
        assert_eq!(t.i[0], 0.0);
        assert!((t.i[1] - 10.0).abs() < 1e-12);
        assert!(llt_1d(&[0.0], &[0.0], &[0.0]).is_err());
        let u: Vec<f64> = (0..n)
            .map(|i| -20.0 + (21.0 - 1e-6) * i as f64 / (n - 1) as f64)
            .collect();
        let k: Vec<f64> = u.iter().map(|x| -(1.0f64 - x).ln()).collect();
        let t = llt_1d(&u, &k, &[2.0]).unwrap();
        assert!((t.i[0] - (1.0 - LN2)).abs() < 1e-3);
    }

    #[test]
    fn restriction_identity_examples() {
        let sq = fixtures::square();
        let l = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        let rep = restriction_identity_check(
            &sq,
            &l,
            &[vec![rat(0), ratio(1, 2)], qvec(&[0, 1])],
            1e-6,
            &opts(),
        )
        .unwrap();
        assert!(rep.holds);
        assert!((rep.points[0].lhs.to_f64() - LN2).abs() < 1e-12);

        let ex = fixtures::ex_nts();
        let rep = restriction_identity_check(&ex, &l, &[qvec(&[0, 3])], 1e-6, &opts()).unwrap();
        assert!(!rep.holds);
        assert!(rep.points[0].delta > 0.1);

        let bottom = Hyperplane::new(qvec(&[0, 1]), rat(0)).unwrap();
        assert_eq!(
            restriction_identity_check(&ex, &bottom, &[], 1e-6, &opts()).unwrap_err(),
            Error::ZeroMass
        );
    }

    #[test]
    fn region_recession() {
        let r = Region::from_box(k_domain(&fixtures::ex_nts()));
        assert!(r.has_recession(&qvec(&[-1, 0])));
        assert!(!r.has_recession(&qvec(&[1, 0])));
        let r2 = r.add_direction(&qvec(&[1, 0]));
        assert!(r2.has_recession(&qvec(&[1, 0])));
        // (−∞,1) × [0,∞) + R·(1,1): a − t(1,1) recedes iff a1 ≤ t ≤ a2
        let b = BoxRegion {
            intervals: vec![
                Interval { lo: Bound::Infinite, hi: Bound::open(rat(1)) },
                Interval { lo: Bound::closed(rat(0)), hi: Bound::Infinite },
            ],
        };
        let slanted = Region::from_box(b).add_direction(&qvec(&[1, 1]));
        assert!(slanted.has_recession(&qvec(&[1, 1])));
        assert!(slanted.has_recession(&qvec(&[0, 1])));
        assert!(!slanted.has_recession(&qvec(&[1, 0])));
    }
}
