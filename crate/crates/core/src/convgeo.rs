//! Exact polyhedral geometry in `R^d`, `d <= 3`: convex supports, facets and
//! the face lattice, support functions, and projections and slices of box
//! regions.
//!
//! Polyhedra keep both representations. V→H enumerates candidate facet
//! normals from small generator subsets; H→V solves `d`-subsets of
//! constraints. Both are brute force, which is plenty at this size.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::distmodel::DistributionSpec;
use crate::error::{Error, Result};
use crate::exact::{
    combinations, dot, is_zero_vec, nullspace, primitive, rank, scale, solve, span_basis, sub,
    unit, QVec, Rational,
};
use crate::extended::ExtendedRational;
use crate::interval::{short, Bound};
use crate::logmgf::BoxRegion;

/// `{v : normal · v = offset}` with a primitive integer normal whose first
/// nonzero entry is positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyperplane {
    pub normal: QVec,
    pub offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: QVec, offset: Rational) -> Result<Self> {
        if is_zero_vec(&normal) {
            return Err(Error::InvalidArgument("hyperplane normal is zero".into()));
        }
        let (n, c) = canonical(&normal, &offset);
        Ok(Hyperplane {
            normal: n,
            offset: c,
        })
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        dot(&self.normal, v) == self.offset
    }

    /// Whether `w` lies in the direction space `L₀`.
    pub fn is_parallel(&self, w: &[Rational]) -> bool {
        dot(&self.normal, w).is_zero()
    }

    /// Orthogonal projection onto `L`.
    pub fn project_point(&self, x: &[Rational]) -> QVec {
        let nn = dot(&self.normal, &self.normal);
        let t = (dot(&self.normal, x) - &self.offset) / nn;
        sub(x, &scale(&self.normal, &t))
    }

    /// Orthogonal projection onto `L₀`.
    pub fn project_direction(&self, r: &[Rational]) -> QVec {
        let nn = dot(&self.normal, &self.normal);
        let t = dot(&self.normal, r) / nn;
        sub(r, &scale(&self.normal, &t))
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", linear_form(&self.normal), short(&self.offset))
    }
}

fn linear_form(n: &[Rational]) -> String {
    let mut s = String::new();
    for (j, a) in n.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let var = format!("v{}", j + 1);
        let mag = a.abs();
        let term = if mag.is_one() {
            var
        } else {
            format!("{}·{}", short(&mag), var)
        };
        if s.is_empty() {
            if a.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(if a.is_negative() { " - " } else { " + " });
        }
        s.push_str(&term);
    }
    s
}

fn canonical(normal: &[Rational], offset: &Rational) -> (QVec, Rational) {
    let p = primitive(normal);
    // p = factor · normal for a positive rational factor.
    let j = normal.iter().position(|x| !x.is_zero()).expect("nonzero");
    let factor = &p[j] / &normal[j];
    let mut c = offset * &factor;
    let mut n = p;
    if n[j].is_negative() {
        n = n.into_iter().map(|x| -x).collect();
        c = -c;
    }
    (n, c)
}

/// `normal · v <= offset`, or `=` for equalities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub normal: QVec,
    pub offset: Rational,
    pub is_equality: bool,
}

impl Constraint {
    pub fn satisfied(&self, x: &[Rational]) -> bool {
        let v = dot(&self.normal, x);
        if self.is_equality {
            v == self.offset
        } else {
            v <= self.offset
        }
    }
}

/// A closed convex polyhedron `conv(points) + cone(rays)`.
#[derive(Debug, Clone)]
pub struct Polyhedron {
    ambient: usize,
    points: Vec<QVec>,
    rays: Vec<QVec>,
    dim: usize,
    equalities: Vec<Constraint>,
    facets: Vec<Constraint>,
    lineality: Vec<QVec>,
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.same_set(other)
    }
}

/// A maximal proper face with its outward normal and supporting hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub geometry: Polyhedron,
    pub hyperplane: Hyperplane,
    pub outward: QVec,
}

/// A facet of the convex support together with its probability mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub geometry: Polyhedron,
    pub hyperplane: Hyperplane,
    pub outward: QVec,
    pub mass: Rational,
}

impl Polyhedron {
    pub fn point(p: QVec) -> Self {
        let d = p.len();
        Self::from_generators(d, vec![p], vec![]).expect("a point is a polyhedron")
    }

    pub fn from_generators(ambient: usize, points: Vec<QVec>, rays: Vec<QVec>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Geometry("polyhedron needs at least one point".into()));
        }
        if points.iter().chain(&rays).any(|v| v.len() != ambient) {
            return Err(Error::Geometry("generator of wrong dimension".into()));
        }
        let mut pts: Vec<QVec> = Vec::new();
        for p in points {
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let mut rs: Vec<QVec> = Vec::new();
        for r in rays {
            if is_zero_vec(&r) {
                continue;
            }
            let r = primitive(&r);
            if !rs.contains(&r) {
                rs.push(r);
            }
        }
        pts.sort();
        rs.sort();

        let p0 = pts[0].clone();
        let mut dirs: Vec<QVec> = pts.iter().skip(1).map(|p| sub(p, &p0)).collect();
        dirs.extend(rs.iter().cloned());
        let basis = span_basis(&dirs, ambient);
        let k = basis.len();
        let equalities: Vec<Constraint> = nullspace(&basis, ambient)
            .into_iter()
            .map(|n| {
                let c = dot(&n, &p0);
                let (n, c) = canonical(&n, &c);
                Constraint {
                    normal: n,
                    offset: c,
                    is_equality: true,
                }
            })
            .collect();

        let facets = if k == 0 {
            Vec::new()
        } else {
            facet_constraints(&pts, &rs, &basis)
        };

        let mut normals: Vec<QVec> = facets.iter().map(|c| c.normal.clone()).collect();
        normals.extend(equalities.iter().map(|c| c.normal.clone()));
        let lineality = if normals.is_empty() {
            (0..ambient).map(|j| unit(ambient, j)).collect()
        } else {
            nullspace(&normals, ambient)
        };

        let mut poly = Polyhedron {
            ambient,
            points: pts,
            rays: rs,
            dim: k,
            equalities,
            facets,
            lineality,
        };
        poly.prune();
        Ok(poly)
    }

    /// Drops redundant generators when the polyhedron is pointed.
    fn prune(&mut self) {
        if !self.lineality.is_empty() {
            return;
        }
        let eq_normals: Vec<QVec> = self.equalities.iter().map(|c| c.normal.clone()).collect();
        let facets = &self.facets;
        let d = self.ambient;
        let tight_rank = |pred: &dyn Fn(&Constraint) -> bool| {
            let mut rows = eq_normals.clone();
            rows.extend(facets.iter().filter(|c| pred(c)).map(|c| c.normal.clone()));
            rank(&rows, d)
        };
        self.points
            .retain(|p| tight_rank(&|c: &Constraint| dot(&c.normal, p) == c.offset) == d);
        self.rays
            .retain(|r| tight_rank(&|c: &Constraint| dot(&c.normal, r).is_zero()) == d - 1);
    }

    /// H→V: the polyhedron cut out by `constraints` in `R^ambient`.
    pub fn from_constraints(ambient: usize, constraints: &[Constraint]) -> Result<Self> {
        let normals: Vec<QVec> = constraints.iter().map(|c| c.normal.clone()).collect();
        let lineality = if normals.is_empty() {
            (0..ambient).map(|j| unit(ambient, j)).collect()
        } else {
            nullspace(&normals, ambient)
        };
        // Work in the orthogonal complement of the lineality space.
        let mut cons: Vec<Constraint> = constraints.to_vec();
        for l in &lineality {
            cons.push(Constraint {
                normal: l.clone(),
                offset: Rational::zero(),
                is_equality: true,
            });
        }
        let n = cons.len();
        let mut points = Vec::new();
        for idx in combinations(n, ambient) {
            let a: Vec<QVec> = idx.iter().map(|&i| cons[i].normal.clone()).collect();
            let b: QVec = idx.iter().map(|&i| cons[i].offset.clone()).collect();
            if let Some(x) = solve(&a, &b) {
                if cons.iter().all(|c| c.satisfied(&x)) && !points.contains(&x) {
                    points.push(x);
                }
            }
        }
        if points.is_empty() {
            return Err(Error::Geometry("constraints are infeasible".into()));
        }
        let mut rays = Vec::new();
        for idx in combinations(n, ambient.saturating_sub(1)) {
            let a: Vec<QVec> = idx.iter().map(|&i| cons[i].normal.clone()).collect();
            let ns = nullspace(&a, ambient);
            if ns.len() != 1 {
                continue;
            }
            for r in [ns[0].clone(), ns[0].iter().map(|x| -x).collect::<QVec>()] {
                let ok = cons.iter().all(|c| {
                    let v = dot(&c.normal, &r);
                    if c.is_equality {
                        v.is_zero()
                    } else {
                        !v.is_positive()
                    }
                });
                if ok {
                    rays.push(r);
                }
            }
        }
        for l in &lineality {
            rays.push(l.clone());
            rays.push(l.iter().map(|x| -x).collect());
        }
        Self::from_generators(ambient, points, rays)
    }

    /// Closure of a box region.
    pub fn from_box(region: &BoxRegion) -> Self {
        let d = region.dimension();
        let mut per_axis: Vec<Vec<Rational>> = Vec::with_capacity(d);
        let mut rays = Vec::new();
        for (j, iv) in region.intervals.iter().enumerate() {
            let mut pts = Vec::new();
            if let Some(v) = iv.lo.value() {
                pts.push(v.clone());
            } else {
                rays.push(unit(d, j).into_iter().map(|x| -x).collect());
            }
            if let Some(v) = iv.hi.value() {
                if !pts.contains(v) {
                    pts.push(v.clone());
                }
            } else {
                rays.push(unit(d, j));
            }
            if pts.is_empty() {
                pts.push(Rational::zero());
            }
            per_axis.push(pts);
        }
        let mut points: Vec<QVec> = vec![Vec::new()];
        for axis in &per_axis {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x.clone());
                        q
                    })
                })
                .collect();
        }
        Self::from_generators(d, points, rays).expect("box has a corner")
    }

    pub fn ambient_dimension(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices when pointed; otherwise representative points.
    pub fn points(&self) -> &[QVec] {
        &self.points
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn vertices(&self) -> &[QVec] {
        if self.is_pointed() {
            &self.points
        } else {
            &[]
        }
    }

    pub fn lineality(&self) -> &[QVec] {
        &self.lineality
    }

    pub fn equalities(&self) -> &[Constraint] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Constraint] {
        &self.facets
    }

    /// Every constraint, equalities first.
    pub fn constraints(&self) -> Vec<Constraint> {
        self.equalities
            .iter()
            .chain(&self.facets)
            .cloned()
            .collect()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equalities.iter().chain(&self.facets).all(|c| c.satisfied(x))
    }

    pub fn rint_contains(&self, x: &[Rational]) -> bool {
        self.equalities.iter().all(|c| c.satisfied(x))
            && self.facets.iter().all(|c| dot(&c.normal, x) < c.offset)
    }

    /// `sup_{v in P} w · v`.
    pub fn support(&self, w: &[Rational]) -> ExtendedRational {
        if self.rays.iter().any(|r| dot(w, r).is_positive())
            || self.lineality.iter().any(|l| !dot(w, l).is_zero())
        {
            return ExtendedRational::PosInf;
        }
        let best = self
            .points
            .iter()
            .map(|p| dot(w, p))
            .max()
            .expect("nonempty");
        ExtendedRational::Finite(best)
    }

    /// Set equality via support functions on both H-representations.
    pub fn same_set(&self, other: &Polyhedron) -> bool {
        self.ambient == other.ambient && self.subset_of(other) && other.subset_of(self)
    }

    pub fn subset_of(&self, other: &Polyhedron) -> bool {
        other.equalities.iter().chain(&other.facets).all(|c| {
            let le = |w: &[Rational], bound: &Rational| match self.support(w) {
                ExtendedRational::Finite(h) => h <= *bound,
                ExtendedRational::PosInf => false,
            };
            if c.is_equality {
                let neg: QVec = c.normal.iter().map(|x| -x).collect();
                le(&c.normal, &c.offset) && le(&neg, &-c.offset.clone())
            } else {
                le(&c.normal, &c.offset)
            }
        })
    }

    fn tight(&self, c: &Constraint) -> (Vec<QVec>, Vec<QVec>) {
        let pts = self
            .points
            .iter()
            .filter(|p| dot(&c.normal, p) == c.offset)
            .cloned()
            .collect();
        let rays = self.all_rays()
            .into_iter()
            .filter(|r| dot(&c.normal, r).is_zero())
            .collect();
        (pts, rays)
    }

    fn all_rays(&self) -> Vec<QVec> {
        let mut rays = self.rays.clone();
        for l in &self.lineality {
            let neg: QVec = l.iter().map(|x| -x).collect();
            for r in [l.clone(), neg] {
                let p = primitive(&r);
                if !rays.contains(&p) {
                    rays.push(p);
                }
            }
        }
        rays
    }

    /// Generator-based lineality is implicit in `rays`; a polyhedron built
    /// with lineality keeps both signs there already.
    pub fn facets(&self) -> Vec<Facet> {
        let mut out: Vec<Facet> = self
            .facets
            .iter()
            .map(|c| {
                let (pts, rays) = self.tight(c);
                Facet {
                    geometry: Polyhedron::from_generators(self.ambient, pts, rays)
                        .expect("facet has a point"),
                    hyperplane: Hyperplane::new(c.normal.clone(), c.offset.clone())
                        .expect("facet normal is nonzero"),
                    outward: c.normal.clone(),
                }
            })
            .collect();
        out.sort_by_key(|a| a.geometry.cmp_key());
        out
    }

    /// The nonempty faces, `P` itself first, then by decreasing dimension.
    pub fn faces(&self) -> Vec<Polyhedron> {
        let n = self.facets.len();
        let mut seen: Vec<(Vec<QVec>, Vec<QVec>)> = Vec::new();
        let mut out = vec![self.clone()];
        for k in 1..=n.min(8) {
            for idx in combinations(n, k) {
                let all_rays = self.all_rays();
                let pts: Vec<QVec> = self
                    .points
                    .iter()
                    .filter(|p| idx.iter().all(|&i| dot(&self.facets[i].normal, p) == self.facets[i].offset))
                    .cloned()
                    .collect();
                if pts.is_empty() {
                    continue;
                }
                let rays: Vec<QVec> = all_rays
                    .into_iter()
                    .filter(|r| idx.iter().all(|&i| dot(&self.facets[i].normal, r).is_zero()))
                    .collect();
                let key = (pts.clone(), rays.clone());
                if seen.contains(&key) {
                    continue;
                }
                seen.push(key);
                out.push(Polyhedron::from_generators(self.ambient, pts, rays).expect("nonempty"));
            }
        }
        out[1..].sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.cmp_key().cmp(&b.cmp_key())));
        out
    }

    fn cmp_key(&self) -> (Vec<QVec>, Vec<QVec>) {
        (self.points.clone(), self.rays.clone())
    }

    /// Canonical generator listing, for reports.
    pub fn generators(&self) -> (Vec<QVec>, Vec<QVec>) {
        (self.points.clone(), self.all_rays())
    }

    /// A point of the relative interior: the generator barycenter plus the
    /// sum of rays.
    pub fn relative_interior_point(&self) -> QVec {
        let n = Rational::from_integer(self.points.len().into());
        let mut x = vec![Rational::zero(); self.ambient];
        for p in &self.points {
            for (a, b) in x.iter_mut().zip(p) {
                *a += b / &n;
            }
        }
        for r in &self.all_rays() {
            for (a, b) in x.iter_mut().zip(r) {
                *a += b;
            }
        }
        x
    }

    /// If the polyhedron equals a product of intervals, those intervals.
    pub fn as_box(&self) -> Option<Vec<(Option<Rational>, Option<Rational>)>> {
        let d = self.ambient;
        let mut ivs = Vec::with_capacity(d);
        for j in 0..d {
            let e = unit(d, j);
            let neg: QVec = e.iter().map(|x| -x).collect();
            let hi = self.support(&e).finite().cloned();
            let lo = self.support(&neg).finite().map(|v| -v.clone());
            ivs.push((lo, hi));
        }
        let region = BoxRegion {
            intervals: ivs
                .iter()
                .map(|(lo, hi)| crate::interval::Interval {
                    lo: lo.clone().map_or(Bound::Infinite, Bound::closed),
                    hi: hi.clone().map_or(Bound::Infinite, Bound::closed),
                })
                .collect(),
        };
        if Polyhedron::from_box(&region).same_set(self) {
            Some(ivs)
        } else {
            None
        }
    }

    /// Renders the relative interior, e.g. `{0}×(−∞,1)` or `(0,1)×{1}`.
    pub fn render_rint(&self) -> String {
        if let Some(ivs) = self.as_box() {
            let parts: Vec<String> = ivs
                .iter()
                .map(|(lo, hi)| match (lo, hi) {
                    (Some(a), Some(b)) if a == b => format!("{{{}}}", short(a)),
                    _ => format!(
                        "({},{})",
                        lo.as_ref().map_or("−∞".to_string(), short),
                        hi.as_ref().map_or("∞".to_string(), short)
                    ),
                })
                .collect();
            return parts.join("×");
        }
        format!("rint {self}")
    }

    /// Renders the closed set in the same product style where possible.
    pub fn render_closed(&self) -> String {
        if let Some(ivs) = self.as_box() {
            let parts: Vec<String> = ivs
                .iter()
                .map(|(lo, hi)| match (lo, hi) {
                    (Some(a), Some(b)) if a == b => format!("{{{}}}", short(a)),
                    _ => format!(
                        "{}{},{}{}",
                        if lo.is_some() { "[" } else { "(" },
                        lo.as_ref().map_or("−∞".to_string(), short),
                        hi.as_ref().map_or("∞".to_string(), short),
                        if hi.is_some() { "]" } else { ")" },
                    ),
                })
                .collect();
            return parts.join("×");
        }
        self.to_string()
    }
}

fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(short).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|p| fmt_point(p)).collect();
        write!(f, "conv{{{}}}", pts.join(","))?;
        let rays = self.all_rays();
        if !rays.is_empty() {
            let rs: Vec<String> = rays.iter().map(|r| fmt_point(r)).collect();
            write!(f, " + cone{{{}}}", rs.join(","))?;
        }
        Ok(())
    }
}

/// Facet inequalities of `conv(points) + cone(rays)` within its affine hull
/// (spanned by `basis`). Each candidate normal is orthogonal, inside the
/// hull, to `k-1` independent directions taken from a small generator subset.
fn facet_constraints(points: &[QVec], rays: &[QVec], basis: &[QVec]) -> Vec<Constraint> {
    let k = basis.len();
    let d = basis[0].len();
    let mut out: Vec<Constraint> = Vec::new();
    for m in 1..=k.min(points.len()) {
        for pidx in combinations(points.len(), m) {
            let nr = k - m;
            if nr > rays.len() {
                continue;
            }
            for ridx in combinations(rays.len(), nr) {
                let p1 = &points[pidx[0]];
                let mut dirs: Vec<QVec> = pidx[1..].iter().map(|&i| sub(&points[i], p1)).collect();
                dirs.extend(ridx.iter().map(|&i| rays[i].clone()));
                if rank(&dirs, d) != k - 1 {
                    continue;
                }
                // a = sum c_l basis_l with a · dir = 0 for every dir.
                let m_rows: Vec<QVec> = dirs
                    .iter()
                    .map(|dir| basis.iter().map(|b| dot(b, dir)).collect())
                    .collect();
                let ns = nullspace(&m_rows, k);
                if ns.len() != 1 {
                    continue;
                }
                let mut a = vec![Rational::zero(); d];
                for (c, b) in ns[0].iter().zip(basis) {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += c * y;
                    }
                }
                let a = primitive(&a);
                let off = dot(&a, p1);
                let pvals: Vec<Ordering> = points.iter().map(|p| dot(&a, p).cmp(&off)).collect();
                let rvals: Vec<Ordering> = rays
                    .iter()
                    .map(|r| dot(&a, r).cmp(&Rational::zero()))
                    .collect();
                let all = pvals.iter().chain(&rvals);
                let (normal, offset) = if all.clone().all(|o| *o != Ordering::Greater) {
                    (a, off)
                } else if all.clone().all(|o| *o != Ordering::Less) {
                    (a.iter().map(|x| -x).collect(), -off)
                } else {
                    continue;
                };
                let c = Constraint {
                    normal,
                    offset,
                    is_equality: false,
                };
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out.sort();
    out
}

/// `C_X`: the closed convex hull of the component supports.
pub fn convex_support(spec: &DistributionSpec) -> Polyhedron {
    let mut points = Vec::new();
    let mut rays = Vec::new();
    for c in spec.components() {
        let (p, r) = c.support_generators();
        points.extend(p);
        rays.extend(r);
    }
    Polyhedron::from_generators(spec.dimension(), points, rays).expect("spec has a component")
}

pub fn maximal_proper_faces(p: &Polyhedron) -> Vec<Facet> {
    p.facets()
}

/// Facets of `C_X` carrying positive probability.
pub fn positive_mass_faces(spec: &DistributionSpec) -> Vec<Face> {
    let cx = convex_support(spec);
    cx.facets()
        .into_iter()
        .filter_map(|f| {
            let mass = spec.mass_in_affine_hull(&f.geometry);
            mass.is_positive().then_some(Face {
                geometry: f.geometry,
                hyperplane: f.hyperplane,
                outward: f.outward,
                mass,
            })
        })
        .collect()
}

/// Support function of `pr_L(R)` at `w ∈ L₀`, which equals `h_R(w)`.
pub fn project_region_support(
    region: &BoxRegion,
    l: &Hyperplane,
    w: &[Rational],
) -> Result<ExtendedRational> {
    if !l.is_parallel(w) {
        return Err(Error::InvalidArgument(
            "direction is not parallel to the hyperplane".into(),
        ));
    }
    Ok(region.support(w))
}

/// Closure of the orthogonal projection of a box region onto `L`.
pub fn project_region(region: &BoxRegion, l: &Hyperplane) -> Polyhedron {
    let cl = Polyhedron::from_box(region);
    let (pts, rays) = cl.generators();
    Polyhedron::from_generators(
        region.dimension(),
        pts.iter().map(|p| l.project_point(p)).collect(),
        rays.iter().map(|r| l.project_direction(r)).collect(),
    )
    .expect("projection of a nonempty set")
}

/// `L ∩ R` for a box region: the closed slice, plus whether the slice lies
/// in the open box (so that its relative interior is `L ∩ rint R`).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSlice {
    pub closure: Polyhedron,
    /// For each inequality of `closure`, whether that side is open.
    pub open: Vec<bool>,
}

impl RegionSlice {
    /// The slice as it would be printed with its openness, e.g. `{0}×(−∞,2)`.
    pub fn render(&self) -> String {
        self.closure.render_rint()
    }
}

pub fn slice_region(region: &BoxRegion, l: &Hyperplane) -> Result<RegionSlice> {
    let d = region.dimension();
    let mut cons = vec![Constraint {
        normal: l.normal.clone(),
        offset: l.offset.clone(),
        is_equality: true,
    }];
    let mut open_flags = Vec::new();
    for (j, iv) in region.intervals.iter().enumerate() {
        let e = unit(d, j);
        if let Bound::Finite { value, closed } = &iv.hi {
            cons.push(Constraint {
                normal: e.clone(),
                offset: value.clone(),
                is_equality: false,
            });
            open_flags.push((e.clone(), value.clone(), !closed));
        }
        if let Bound::Finite { value, closed } = &iv.lo {
            let neg: QVec = e.iter().map(|x| -x).collect();
            cons.push(Constraint {
                normal: neg.clone(),
                offset: -value.clone(),
                is_equality: false,
            });
            open_flags.push((neg, -value.clone(), !closed));
        }
    }
    let closure = Polyhedron::from_constraints(d, &cons)
        .map_err(|_| Error::Geometry("hyperplane misses the region".into()))?;
    let open = closure
        .inequalities()
        .iter()
        .map(|c| {
            // A slice facet is open if the box face it lies in is open.
            let (pts, rays) = closure.tight(c);
            open_flags.iter().any(|(n, off, is_open)| {
                *is_open
                    && pts.iter().all(|p| dot(n, p) == *off)
                    && rays.iter().all(|r| dot(n, r).is_zero())
            })
        })
        .collect();
    Ok(RegionSlice { closure, open })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qvec, rat, ratio};
    use crate::fixtures;
    use crate::interval::Interval;

    fn quadrant() -> Polyhedron {
        Polyhedron::from_generators(2, vec![qvec(&[0, 0])], vec![qvec(&[1, 0]), qvec(&[0, 1])])
            .unwrap()
    }

    fn unit_square() -> Polyhedron {
        convex_support(&fixtures::square())
    }

    fn boxr(ivs: Vec<Interval>) -> BoxRegion {
        BoxRegion { intervals: ivs }
    }

    fn upto(b: i64, closed: bool) -> Interval {
        Interval {
            lo: Bound::Infinite,
            hi: Bound::Finite {
                value: rat(b),
                closed,
            },
        }
    }

    #[test]
    fn hyperplane_canonical_form() {
        let h = Hyperplane::new(vec![ratio(-1, 2), rat(0)], rat(3)).unwrap();
        assert_eq!(h.normal, qvec(&[1, 0]));
        assert_eq!(h.offset, rat(-6));
        assert!(Hyperplane::new(qvec(&[0, 0]), rat(1)).is_err());
        assert_eq!(
            Hyperplane::new(qvec(&[1, -2]), rat(1)).unwrap().to_string(),
            "v1 - 2·v2 = 1"
        );
    }

    #[test]
    fn convex_supports_of_fixtures() {
        let ex = convex_support(&fixtures::ex_nts());
        assert!(ex.same_set(&quadrant()));
        assert_eq!(ex.dim(), 2);
        let sq = unit_square();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.inequalities().len(), 4);
        let b = convex_support(&fixtures::bernoulli());
        assert_eq!(b.render_closed(), "[0,1]");
    }

    #[test]
    fn gaussian_support_is_the_line() {
        let spec = DistributionSpec::new(
            1,
            vec![crate::distmodel::Component {
                weight: rat(1),
                shift: qvec(&[0]),
                laws: vec![crate::distmodel::Law1D::Gaussian {
                    mean: rat(3),
                    variance: rat(1),
                }],
            }],
        )
        .unwrap();
        let p = convex_support(&spec);
        assert_eq!(p.dim(), 1);
        assert!(p.facets().is_empty());
        assert!(!p.is_pointed());
        assert!(p.rint_contains(&qvec(&[-100])));
    }

    #[test]
    fn facets_of_quadrant_square_segment() {
        let f = quadrant().facets();
        assert_eq!(f.len(), 2);
        let rendered: Vec<String> = f.iter().map(|x| x.geometry.render_closed()).collect();
        assert!(rendered.contains(&"{0}×[0,∞)".to_string()));
        assert!(rendered.contains(&"[0,∞)×{0}".to_string()));
        assert_eq!(unit_square().facets().len(), 4);
        let seg = convex_support(&fixtures::bernoulli());
        let f = seg.facets();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|x| x.geometry.dim() == 0));
        assert!(Polyhedron::point(qvec(&[2, 3])).facets().is_empty());
    }

    #[test]
    fn positive_mass_faces_examples() {
        let f = positive_mass_faces(&fixtures::ex_nts());
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].geometry.render_closed(), "{0}×[0,∞)");
        assert_eq!(f[0].mass, ratio(1, 2));
        assert!(positive_mass_faces(&fixtures::two_exp()).is_empty());
        let sq = positive_mass_faces(&fixtures::square());
        assert_eq!(sq.len(), 4);
        assert!(sq.iter().all(|f| f.mass == ratio(1, 2)));
    }

    #[test]
    fn support_functions() {
        assert_eq!(
            unit_square().support(&qvec(&[1, 1])),
            ExtendedRational::Finite(rat(2))
        );
        assert_eq!(quadrant().support(&qvec(&[1, 0])), ExtendedRational::PosInf);
        let b = boxr(vec![upto(1, false), upto(1, false)]);
        assert_eq!(b.support(&qvec(&[1, 1])), ExtendedRational::Finite(rat(2)));
    }

    #[test]
    fn projected_support() {
        let axis = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        let b = boxr(vec![upto(1, false), upto(1, false)]);
        assert_eq!(
            project_region_support(&b, &axis, &qvec(&[0, 1])).unwrap(),
            ExtendedRational::Finite(rat(1))
        );
        assert!(project_region_support(&b, &axis, &qvec(&[1, 1])).is_err());
        let full = BoxRegion::full(2);
        assert_eq!(
            project_region_support(&full, &axis, &qvec(&[0, -3])).unwrap(),
            ExtendedRational::PosInf
        );
        assert_eq!(
            project_region_support(&full, &axis, &qvec(&[0, 0])).unwrap(),
            ExtendedRational::Finite(rat(0))
        );
        let c = boxr(vec![upto(1, false), upto(2, true)]);
        assert_eq!(
            project_region_support(&c, &axis, &qvec(&[0, 1])).unwrap(),
            ExtendedRational::Finite(rat(2))
        );
        assert_eq!(project_region(&b, &axis).render_rint(), "{0}×(−∞,1)");
    }

    #[test]
    fn slices() {
        let axis = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        let s = slice_region(&boxr(vec![upto(1, false), upto(2, false)]), &axis).unwrap();
        assert_eq!(s.render(), "{0}×(−∞,2)");
        assert_eq!(s.open, vec![true]);
        let full = slice_region(&BoxRegion::full(2), &axis).unwrap();
        assert_eq!(full.closure.dim(), 1);
        assert_eq!(full.render(), "{0}×(−∞,∞)");
        let unit_box = boxr(vec![
            Interval {
                lo: Bound::closed(rat(0)),
                hi: Bound::closed(rat(1)),
            };
            2
        ]);
        let diag = Hyperplane::new(qvec(&[1, 1]), rat(1)).unwrap();
        let seg = slice_region(&unit_box, &diag).unwrap();
        assert_eq!(seg.closure.vertices(), &[qvec(&[0, 1]), qvec(&[1, 0])]);
        let far = Hyperplane::new(qvec(&[1, 1]), rat(5)).unwrap();
        assert!(slice_region(&unit_box, &far).is_err());
    }

    #[test]
    fn relative_interiors() {
        assert!(quadrant().rint_contains(&qvec(&[1, 1])));
        assert!(!quadrant().rint_contains(&qvec(&[0, 1])));
        assert!(Polyhedron::point(qvec(&[2, 3])).rint_contains(&qvec(&[2, 3])));
        let seg =
            Polyhedron::from_generators(2, vec![qvec(&[0, 0]), qvec(&[1, 0])], vec![]).unwrap();
        assert!(seg.rint_contains(&[ratio(1, 2), rat(0)]));
        assert!(!seg.rint_contains(&[ratio(1, 2), ratio(1, 9)]));
    }

    #[test]
    fn h_to_v_roundtrip() {
        let sq = unit_square();
        let back = Polyhedron::from_constraints(2, &sq.constraints()).unwrap();
        assert!(back.same_set(&sq));
        let q = Polyhedron::from_constraints(2, &quadrant().constraints()).unwrap();
        assert_eq!(q.vertices(), &[qvec(&[0, 0])]);
        assert_eq!(q.rays().len(), 2);
    }

    #[test]
    fn redundant_generators_pruned() {
        let p = Polyhedron::from_generators(
            2,
            vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), vec![ratio(1, 4), ratio(1, 4)]],
            vec![],
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 3);
        let q = Polyhedron::from_generators(
            2,
            vec![qvec(&[0, 0]), qvec(&[3, 3])],
            vec![qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])],
        )
        .unwrap();
        assert!(q.same_set(&quadrant()));
        assert_eq!(q.vertices(), &[qvec(&[0, 0])]);
        assert_eq!(q.rays().len(), 2);
    }

    #[test]
    fn face_lattice_of_square() {
        let faces = unit_square().faces();
        // square, 4 edges, 4 vertices
        assert_eq!(faces.len(), 9);
        assert_eq!(faces.iter().filter(|f| f.dim() == 0).count(), 4);
    }
}
