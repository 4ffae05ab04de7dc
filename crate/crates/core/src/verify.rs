//! Numerical checks of the structural statements: strictness probes along
//! segments, the inclusions `rint C_X ⊂ D(I_X) ⊂ cl C_X`, the Cramér upper
//! bound by simulation, and finite-difference gradients of `K_X`.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conjugate::{rate_eval, rate_eval_f64, RateOptions};
use crate::convgeo::{convex_support, Polyhedron};
use crate::criteria::formal_decomposition;
use crate::distmodel::{DistributionSpec, Law1D};
use crate::error::{Error, Result};
use crate::exact::{from_f64, to_f64, vec_to_f64, QVec, Rational};
use crate::extended::ExtendedReal;
use crate::interval::Bound;
use crate::logmgf::{k_domain, k_eval, k_grad};

/// Worker pool capped by `RATEKIT_THREADS` (unset or 0: one per core).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let n = std::env::var("RATEKIT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    Strict,
    AffineWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Positions along the segment in `[0, 1]`.
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: ProbeVerdict,
    /// Sub-segment on which `I_X` matches its chord.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    /// Largest chord deviation on the witness sub-segment.
    pub max_deviation: Option<f64>,
    /// Smallest gap below the full chord over interior samples.
    pub min_chord_gap: f64,
}

/// Minimum number of interior samples an affine run must cover.
const MIN_RUN: usize = 5;

/// Samples `I_X` at `n_points` equispaced points of `[a, b]`. A run of at
/// least five consecutive interior samples within `tol` of the chord over
/// the run is an affine witness; otherwise the segment counts as strict.
pub fn strictness_probe(
    spec: &DistributionSpec,
    a: &[Rational],
    b: &[Rational],
    n_points: usize,
    tol: f64,
    opts: &RateOptions,
) -> Result<ProbeReport> {
    if a.len() != spec.dimension() || b.len() != spec.dimension() {
        return Err(Error::Dimension {
            expected: spec.dimension(),
            got: a.len().max(b.len()),
        });
    }
    if a == b {
        return Err(Error::InvalidArgument("degenerate segment".into()));
    }
    if n_points < MIN_RUN + 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} points",
            MIN_RUN + 2
        )));
    }
    let decomp = formal_decomposition(spec)?;
    let m = Rational::from_integer(((n_points - 1) as i64).into());
    let points: Vec<QVec> = (0..n_points)
        .map(|k| {
            let s = Rational::from_integer((k as i64).into()) / &m;
            a.iter().zip(b).map(|(x, y)| x + &s * (y - x)).collect()
        })
        .collect();
    if let Some(p) = points.iter().find(|p| !decomp.contains(p)) {
        return Err(Error::InvalidArgument(format!(
            "segment exits the effective domain at {:?}",
            vec_to_f64(p)
        )));
    }
    let values = points
        .par_iter()
        .map(|p| rate_eval(spec, p, opts).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = values
        .into_iter()
        .map(|v| match v {
            ExtendedReal::Finite(x) => Ok(x),
            ExtendedReal::PosInf => Err(Error::InvalidArgument(
                "rate is infinite on the segment".into(),
            )),
        })
        .collect::<Result<_>>()?;
    let t: Vec<f64> = (0..n_points).map(|k| k as f64 / (n_points - 1) as f64).collect();

    let chord_dev = |i: usize, j: usize| -> f64 {
        (i..=j)
            .map(|k| {
                let s = (t[k] - t[i]) / (t[j] - t[i]);
                (values[i] + s * (values[j] - values[i]) - values[k]).abs()
            })
            .fold(0.0, f64::max)
    };
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..n_points {
        for j in (i + MIN_RUN + 1)..n_points {
            let dev = chord_dev(i, j);
            if dev <= tol && best.is_none_or(|(bi, bj, _)| j - i > bj - bi) {
                best = Some((i, j, dev));
            }
        }
    }
    let last = n_points - 1;
    let min_chord_gap = (1..last)
        .map(|k| values[0] + t[k] * (values[last] - values[0]) - values[k])
        .fold(f64::INFINITY, f64::min);
    Ok(ProbeReport {
        a: vec_to_f64(a),
        b: vec_to_f64(b),
        t,
        verdict: if best.is_some() {
            ProbeVerdict::AffineWitness
        } else {
            ProbeVerdict::Strict
        },
        witness: best.map(|(i, j, _)| (vec_to_f64(&points[i]), vec_to_f64(&points[j]))),
        max_deviation: best.map(|(_, _, d)| d),
        min_chord_gap,
        values,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SampleSet {
    pub samples: usize,
    pub as_expected: usize,
    pub failures: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop11Report {
    /// Points of `rint C_X`; expected finite.
    pub interior: SampleSet,
    /// Points outside `cl C_X`; expected `+∞`.
    pub outside: SampleSet,
    /// Points on zero-mass facets; expected `+∞`.
    pub zero_mass: SampleSet,
    pub passes: bool,
}

/// A random point of `rint P`: a combination of all generators with
/// positive rational weights.
fn rint_point(p: &Polyhedron, rng: &mut ChaCha8Rng) -> QVec {
    let (pts, rays) = p.generators();
    let w: Vec<i64> = pts.iter().map(|_| rng.gen_range(1..=1000)).collect();
    let total = Rational::from_integer(w.iter().sum::<i64>().into());
    let mut x = vec![Rational::zero(); p.ambient_dimension()];
    for (pt, wi) in pts.iter().zip(&w) {
        let c = Rational::from_integer((*wi).into()) / &total;
        for (a, b) in x.iter_mut().zip(pt) {
            *a += &c * b;
        }
    }
    for r in &rays {
        let c = Rational::new(rng.gen_range(1..=300i64).into(), 100.into());
        for (a, b) in x.iter_mut().zip(r) {
            *a += &c * b;
        }
    }
    x
}

/// Box around the generators of `P`, rays followed for three units, padded.
fn bounding_box(p: &Polyhedron) -> Vec<(f64, f64)> {
    let (pts, rays) = p.generators();
    let mut cands: Vec<Vec<f64>> = pts.iter().map(|x| vec_to_f64(x)).collect();
    for x in pts.iter().map(|x| vec_to_f64(x)) {
        for r in &rays {
            let rf = vec_to_f64(r);
            cands.push(x.iter().zip(&rf).map(|(a, b)| a + 3.0 * b).collect());
        }
    }
    (0..p.ambient_dimension())
        .map(|j| {
            let lo = cands.iter().map(|c| c[j]).fold(f64::INFINITY, f64::min);
            let hi = cands.iter().map(|c| c[j]).fold(f64::NEG_INFINITY, f64::max);
            (lo - 1.0, hi + 1.0)
        })
        .collect()
}

fn grid_point(bx: &[(f64, f64)], rng: &mut ChaCha8Rng) -> QVec {
    bx.iter()
        .map(|&(lo, hi)| {
            let k = rng.gen_range(0..=1000i64);
            from_f64(lo).expect("finite") + from_f64(hi - lo).expect("finite") * Rational::new(k.into(), 1000.into())
        })
        .collect()
}

/// `rint C_X ⊂ D(I_X) ⊂ cl C_X`, and `I_X = +∞` on zero-mass facets.
pub fn prop11_check(
    spec: &DistributionSpec,
    n_samples: usize,
    seed: u64,
    opts: &RateOptions,
) -> Result<Prop11Report> {
    let cx = convex_support(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let interior: Vec<QVec> = (0..n_samples).map(|_| rint_point(&cx, &mut rng)).collect();

    let bx = bounding_box(&cx);
    let mut outside = Vec::new();
    let mut attempts = 0;
    while outside.len() < n_samples && attempts < 100 * n_samples {
        attempts += 1;
        let p = grid_point(&bx, &mut rng);
        if !cx.contains(&p) {
            outside.push(p);
        }
    }

    let zero_facets: Vec<Polyhedron> = cx
        .facets()
        .into_iter()
        .filter(|f| spec.mass_in_hyperplane(&f.hyperplane).is_zero())
        .map(|f| f.geometry)
        .collect();
    let zero_mass: Vec<QVec> = if zero_facets.is_empty() {
        Vec::new()
    } else {
        (0..n_samples)
            .map(|k| rint_point(&zero_facets[k % zero_facets.len()], &mut rng))
            .collect()
    };

    let run = |pts: &[QVec], want_finite: bool| -> Result<SampleSet> {
        let vals = pts
            .par_iter()
            .map(|p| rate_eval(spec, p, opts).map(|r| r.value.is_finite()))
            .collect::<Result<Vec<bool>>>()?;
        let failures: Vec<Vec<f64>> = pts
            .iter()
            .zip(&vals)
            .filter(|(_, &f)| f != want_finite)
            .map(|(p, _)| vec_to_f64(p))
            .collect();
        Ok(SampleSet {
            samples: pts.len(),
            as_expected: pts.len() - failures.len(),
            failures,
        })
    };
    let interior = run(&interior, true)?;
    let outside = run(&outside, false)?;
    let zero_mass = run(&zero_mass, false)?;
    let passes = interior.failures.is_empty() && outside.failures.is_empty() && zero_mass.failures.is_empty();
    Ok(Prop11Report {
        interior,
        outside,
        zero_mass,
        passes,
    })
}

#[derive(Debug, Clone)]
enum LawSampler {
    Atom(f64),
    Exponential { rate: f64, sign: f64, shift: f64 },
    Gaussian { mean: f64, sd: f64 },
    Uniform { a: f64, b: f64 },
    Tail { rate: f64, beta: f64, sign: f64, shift: f64 },
}

impl LawSampler {
    fn new(law: &Law1D) -> Self {
        match law {
            Law1D::Atom { at } => LawSampler::Atom(to_f64(at)),
            Law1D::Exponential {
                rate,
                orientation,
                shift,
            } => LawSampler::Exponential {
                rate: to_f64(rate),
                sign: orientation.sign() as f64,
                shift: to_f64(shift),
            },
            Law1D::Gaussian { mean, variance } => LawSampler::Gaussian {
                mean: to_f64(mean),
                sd: to_f64(variance).sqrt(),
            },
            Law1D::Uniform { a, b } => LawSampler::Uniform {
                a: to_f64(a),
                b: to_f64(b),
            },
            Law1D::ExpPolyTail {
                rate,
                exponent,
                orientation,
                shift,
            } => LawSampler::Tail {
                rate: to_f64(rate),
                beta: to_f64(exponent),
                sign: orientation.sign() as f64,
                shift: to_f64(shift),
            },
        }
    }

    /// Inverse CDF for Exponential and Uniform, Box–Muller for Gaussian,
    /// rejection from the Exponential envelope for the tail law. Returns the
    /// draw and the number of envelope proposals used.
    fn draw(&self, rng: &mut ChaCha8Rng) -> (f64, u64) {
        let unit_open = |rng: &mut ChaCha8Rng| 1.0 - rng.gen::<f64>();
        match *self {
            LawSampler::Atom(x) => (x, 0),
            LawSampler::Exponential { rate, sign, shift } => {
                (shift - sign * unit_open(rng).ln() / rate, 0)
            }
            LawSampler::Gaussian { mean, sd } => {
                let r = (-2.0 * unit_open(rng).ln()).sqrt();
                let th = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                (mean + sd * r * th.cos(), 0)
            }
            LawSampler::Uniform { a, b } => (a + (b - a) * rng.gen::<f64>(), 0),
            LawSampler::Tail {
                rate,
                beta,
                sign,
                shift,
            } => {
                let mut tries = 0;
                loop {
                    tries += 1;
                    let y = -unit_open(rng).ln() / rate;
                    if rng.gen::<f64>() * (1.0 + y.powf(beta)) < 1.0 {
                        return (shift + sign * y, tries);
                    }
                }
            }
        }
    }
}

struct Sampler {
    cumulative: Vec<f64>,
    shifts: Vec<Vec<f64>>,
    laws: Vec<Vec<LawSampler>>,
}

impl Sampler {
    fn new(spec: &DistributionSpec) -> Self {
        let mut acc = 0.0;
        let mut cumulative = Vec::new();
        for c in spec.components() {
            acc += to_f64(&c.weight);
            cumulative.push(acc);
        }
        Sampler {
            cumulative,
            shifts: spec.components().iter().map(|c| vec_to_f64(&c.shift)).collect(),
            laws: spec
                .components()
                .iter()
                .map(|c| c.laws.iter().map(LawSampler::new).collect())
                .collect(),
        }
    }

    /// Adds one draw of `X` to `acc`; returns the envelope proposals used
    /// and the number of tail-law draws they produced.
    fn add_draw(&self, rng: &mut ChaCha8Rng, acc: &mut [f64]) -> (u64, u64) {
        let u = rng.gen::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let i = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1);
        let (mut proposals, mut tails) = (0, 0);
        for (j, law) in self.laws[i].iter().enumerate() {
            let (x, p) = law.draw(rng);
            acc[j] += self.shifts[i][j] + x;
            proposals += p;
            tails += u64::from(p > 0);
        }
        (proposals, tails)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub hits: usize,
    pub p_hat: f64,
    /// `(1/n) log p̂`; `None` without hits.
    pub empirical: Option<f64>,
    /// `inf_{cl B} I_X`.
    pub rate_inf: ExtendedReal,
    pub inf_method: &'static str,
    /// `−inf_{cl B} I_X`.
    pub bound: f64,
    pub slack: f64,
    /// No hits: the inequality says nothing.
    pub vacuous: bool,
    pub holds: Option<bool>,
    /// Accepted fraction of tail-law envelope proposals, if any were made.
    pub acceptance_rate: Option<f64>,
}

/// Simulates `S_n/n` and compares `(1/n) log P(S_n/n ∈ B)` with
/// `−inf_{cl B} I_X`. Trial `k` draws from stream `k` of a ChaCha8
/// generator keyed by `seed`, so results do not depend on scheduling.
pub fn cramer_mc_bound(
    spec: &DistributionSpec,
    region: &Polyhedron,
    n: usize,
    trials: usize,
    seed: u64,
    opts: &RateOptions,
) -> Result<McReport> {
    if region.ambient_dimension() != spec.dimension() {
        return Err(Error::Dimension {
            expected: spec.dimension(),
            got: region.ambient_dimension(),
        });
    }
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("n and trials must be positive".into()));
    }
    let sampler = Sampler::new(spec);
    let d = spec.dimension();
    let pool = thread_pool()?;
    let (hits, proposals, tail_draws) = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let mut acc = vec![0.0; d];
                let (mut props, mut tails) = (0u64, 0u64);
                for _ in 0..n {
                    let (p, t) = sampler.add_draw(&mut rng, &mut acc);
                    props += p;
                    tails += t;
                }
                let mean: Option<QVec> = acc.iter().map(|s| from_f64(s / n as f64).ok()).collect();
                let hit = mean.is_some_and(|m| region.contains(&m));
                (usize::from(hit), props, tails)
            })
            .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
    });
    let acceptance_rate = (proposals > 0).then(|| tail_draws as f64 / proposals as f64);

    let (rate_inf, inf_method) = inf_rate_over(spec, region, opts)?;
    let p_hat = hits as f64 / trials as f64;
    let bound = -rate_inf.to_f64();
    let (empirical, slack, holds) = if hits == 0 {
        (None, 0.0, None)
    } else {
        let se = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        let slack = 3.0 * se / (p_hat * n as f64) + 1e-2;
        let emp = p_hat.ln() / n as f64;
        (Some(emp), slack, Some(emp <= bound + slack))
    };
    Ok(McReport {
        n,
        trials,
        seed,
        hits,
        p_hat,
        empirical,
        rate_inf,
        inf_method,
        bound,
        slack,
        vacuous: hits == 0,
        holds,
        acceptance_rate,
    })
}

/// `inf_{cl B} I_X`. In one dimension `I_X` is monotone on either side of
/// the mean, so the infimum sits at the endpoint nearest the mean. Otherwise
/// a pattern search inside `B`, which can only overestimate the infimum.
fn inf_rate_over(
    spec: &DistributionSpec,
    region: &Polyhedron,
    opts: &RateOptions,
) -> Result<(ExtendedReal, &'static str)> {
    let mean = spec.mean();
    let mean_q: Option<QVec> = mean.iter().map(|&x| from_f64(x).ok()).collect();
    if mean_q.as_ref().is_some_and(|m| region.contains(m)) {
        return Ok((ExtendedReal::Finite(0.0), "mean inside"));
    }
    if spec.dimension() == 1 {
        let hi = region.support(&[Rational::from_integer(1.into())]);
        let lo = region.support(&[Rational::from_integer((-1).into())]);
        let mu = mean_q.expect("finite mean");
        let at = match (lo.finite(), hi.finite()) {
            (Some(l), _) if -l.clone() > mu[0] => -l.clone(),
            (_, Some(h)) if *h < mu[0] => h.clone(),
            _ => return Ok((ExtendedReal::Finite(0.0), "mean inside")),
        };
        return Ok((rate_eval(spec, &[at], opts)?.value, "nearest endpoint"));
    }

    let (pts, rays) = region.generators();
    let mut best = (ExtendedReal::PosInf, vec_to_f64(&pts[0]));
    for p in &pts {
        let v = rate_eval(spec, p, opts)?.value;
        if v < best.0 {
            best = (v, vec_to_f64(p));
        }
    }
    let d = spec.dimension();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        dirs.push(e.clone());
        e[j] = -1.0;
        dirs.push(e);
    }
    dirs.extend(rays.iter().map(|r| vec_to_f64(r)));
    let mut step = 0.5;
    while step > 1e-7 {
        let mut improved = false;
        for dir in &dirs {
            let cand: Vec<f64> = best.1.iter().zip(dir).map(|(x, s)| x + step * s).collect();
            let Some(q) = cand.iter().map(|&x| from_f64(x).ok()).collect::<Option<QVec>>() else {
                continue;
            };
            if !region.contains(&q) {
                continue;
            }
            let v = rate_eval_f64(spec, &cand, opts)?.value;
            if v < best.0 {
                best = (v, cand);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((best.0, "pattern search"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientCheck {
    pub max_rel_error: f64,
    pub worst_point: Vec<f64>,
    pub points: usize,
    pub h: f64,
}

/// Central differences against `k_grad` at random points at least `1e-2`
/// inside `D(K_X)`.
pub fn gradient_fd_check(spec: &DistributionSpec, n_points: usize, h: f64, seed: u64) -> Result<GradientCheck> {
    let dom = k_domain(spec);
    if !dom.has_interior() {
        return Err(Error::EmptyInterior);
    }
    let margin = 1e-2_f64.max(10.0 * h);
    let ranges: Vec<(f64, f64)> = dom
        .intervals
        .iter()
        .map(|iv| {
            let lo = iv.lo.value().map(to_f64);
            let hi = iv.hi.value().map(to_f64);
            match (lo, hi) {
                (Some(a), Some(b)) => (a + margin, b - margin),
                (None, Some(b)) => (b - 3.0, b - margin),
                (Some(a), None) => (a + margin, a + 3.0),
                (None, None) => (-2.0, 2.0),
            }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..n_points)
        .map(|_| ranges.iter().map(|&(a, b)| rng.gen_range(a..=b)).collect())
        .collect();
    let errs = pts
        .par_iter()
        .map(|u| -> Result<f64> {
            let g = k_grad(spec, u)?;
            let mut worst: f64 = 0.0;
            for j in 0..u.len() {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[j] += h;
                dn[j] -= h;
                let fd = (k_eval(spec, &up)?.to_f64() - k_eval(spec, &dn)?.to_f64()) / (2.0 * h);
                worst = worst.max((fd - g[j]).abs() / g[j].abs().max(1.0));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (i, max_rel_error) = errs
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc });
    Ok(GradientCheck {
        max_rel_error,
        worst_point: pts.get(i).cloned().unwrap_or_default(),
        points: n_points,
        h,
    })
}

/// `[lo, hi]` per coordinate as a polyhedron, with `None` for an open end.
pub fn box_polyhedron(bounds: &[(Option<Rational>, Option<Rational>)]) -> Result<Polyhedron> {
    if bounds.iter().any(|b| matches!(b, (Some(a), Some(c)) if a > c)) {
        return Err(Error::InvalidArgument("empty box".into()));
    }
    let bound = |x: &Option<Rational>| x.clone().map_or(Bound::Infinite, Bound::closed);
    let intervals = bounds
        .iter()
        .map(|(lo, hi)| crate::interval::Interval {
            lo: bound(lo),
            hi: bound(hi),
        })
        .collect();
    Ok(Polyhedron::from_box(&crate::logmgf::BoxRegion { intervals }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};
    use crate::fixtures;

    #[test]
    fn counterexample_axis_is_affine() {
        let g = k_grad(&fixtures::exp_poly_23(), &[1.0]).unwrap()[0];
        assert!((g - 0.496_246_130_499_366_18).abs() < 1e-10);
        let a = vec![rat(0), from_f64(g + 1.0).unwrap()];
        let b = vec![rat(0), from_f64(g + 3.0).unwrap()];
        let r = strictness_probe(&fixtures::ex_nts(), &a, &b, 21, 1e-6, &RateOptions::default()).unwrap();
        assert_eq!(r.verdict, ProbeVerdict::AffineWitness);
        assert!(r.max_deviation.unwrap() < 1e-6);
    }

    #[test]
    fn square_interior_segment_is_strict() {
        let r = strictness_probe(
            &fixtures::square(),
            &[ratio(1, 10), ratio(1, 5)],
            &[ratio(9, 10), ratio(7, 10)],
            21,
            1e-6,
            &RateOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, ProbeVerdict::Strict);
        assert!(r.min_chord_gap > 1e-3);
    }

    #[test]
    fn probe_rejects_bad_segments() {
        let one_atom = DistributionSpec::from_json(
            r#"{"dimension":1,"components":[{"weight":"1","shift":["0"],"laws":[{"kind":"atom","at":"0"}]}]}"#,
        )
        .unwrap();
        assert!(strictness_probe(&one_atom, &[rat(0)], &[rat(1)], 9, 1e-6, &RateOptions::default()).is_err());
        let b = fixtures::bernoulli();
        assert!(strictness_probe(&b, &[rat(0)], &[rat(0)], 9, 1e-6, &RateOptions::default()).is_err());
        assert!(strictness_probe(&b, &[rat(0)], &[rat(2)], 9, 1e-6, &RateOptions::default()).is_err());
    }

    #[test]
    fn prop11_on_fixtures() {
        for s in [fixtures::two_exp(), fixtures::square(), fixtures::bernoulli()] {
            let r = prop11_check(&s, 20, 42, &RateOptions::default()).unwrap();
            assert!(r.passes, "{r:?}");
            assert_eq!(r.interior.samples, 20);
        }
        let q = prop11_check(&fixtures::two_exp(), 10, 1, &RateOptions::default()).unwrap();
        assert_eq!(q.zero_mass.samples, 10);
        let sq = prop11_check(&fixtures::square(), 10, 1, &RateOptions::default()).unwrap();
        assert_eq!(sq.zero_mass.samples, 0);
    }

    #[test]
    fn cramer_bernoulli_small() {
        let b = box_polyhedron(&[(Some(ratio(7, 10)), Some(rat(1)))]).unwrap();
        let r = cramer_mc_bound(&fixtures::bernoulli(), &b, 50, 20_000, 7, &RateOptions::default()).unwrap();
        assert!(r.hits > 0);
        assert_eq!(r.holds, Some(true));
        assert!((r.rate_inf.to_f64() - 0.082_282_878_505_051_78).abs() < 1e-9);
        assert!(r.acceptance_rate.is_none());
        let far = box_polyhedron(&[(Some(rat(3)), Some(rat(4)))]).unwrap();
        let r = cramer_mc_bound(&fixtures::bernoulli(), &far, 10, 1000, 7, &RateOptions::default()).unwrap();
        assert!(r.vacuous && r.holds.is_none());
    }

    #[test]
    fn tail_sampler_acceptance() {
        let b = box_polyhedron(&[(Some(rat(0)), None)]).unwrap();
        let r = cramer_mc_bound(&fixtures::exp_poly_23(), &b, 1, 200_000, 3, &RateOptions::default()).unwrap();
        let acc = r.acceptance_rate.unwrap();
        assert!((acc - 0.827_524_111_022_821_2).abs() < 5e-3, "{acc}");
    }

    #[test]
    fn deterministic_given_seed() {
        let b = box_polyhedron(&[(Some(ratio(3, 5)), None)]).unwrap();
        let r1 = cramer_mc_bound(&fixtures::bernoulli(), &b, 20, 5000, 11, &RateOptions::default()).unwrap();
        let r2 = cramer_mc_bound(&fixtures::bernoulli(), &b, 20, 5000, 11, &RateOptions::default()).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn gradients_match_differences() {
        let sq = gradient_fd_check(&fixtures::square(), 20, 1e-5, 1).unwrap();
        assert!(sq.max_rel_error < 1e-7, "{sq:?}");
        let ex = gradient_fd_check(&fixtures::ex_nts(), 20, 1e-5, 1).unwrap();
        assert!(ex.max_rel_error < 1e-5, "{ex:?}");
    }
}
