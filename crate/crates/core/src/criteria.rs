//! Decision procedures for strict convexity of `I_X`: the projection
//! property, total steepness, the verdict combining them, and the face-chain
//! decomposition of `D(I_X)`.
//!
//! All recursions walk `F*_+` chains depth-first in facet order; the first
//! failing node supplies the witness.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::convgeo::{
    convex_support, positive_mass_faces, project_region, slice_region, Constraint, Hyperplane,
    Polyhedron,
};
use crate::distmodel::DistributionSpec;
use crate::error::{Error, Result};
use crate::exact::{dot, to_f64, QVec, Rational};
use crate::extended::Extended;
use crate::interval::{short, Bound};
use crate::logmgf::{is_steep, k_domain, BoxRegion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Interior,
    Projection,
    TotalSteepness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub condition: Condition,
    /// `C₁ ⊃ … ⊃ C_k` leading to the failing node, outermost first.
    pub face_chain: Vec<String>,
    /// The face where the condition fails.
    pub face: Option<String>,
    pub hyperplane: Option<String>,
    pub projected: Option<String>,
    pub sliced: Option<String>,
    pub detail: String,
    #[serde(skip)]
    pub faces: Vec<Polyhedron>,
    #[serde(skip)]
    pub hyperplane_exact: Option<Hyperplane>,
}

fn exact_tag<S: serde::Serializer>(r: &str, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(1))?;
    m.serialize_entry("exact", r)?;
    m.end()
}

/// Outcome of condition (a) for one supporting hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionCheck {
    pub hyperplane: String,
    /// Tagged as `{"exact": "p/q"}`.
    #[serde(serialize_with = "exact_tag")]
    pub mass: String,
    /// Depth of the node in the face recursion (0 = root).
    pub depth: usize,
    /// Outward normal lies in `int D(h_C)`, where equality always holds.
    pub shortcut: bool,
    /// `pr_L(rint D(K))`.
    pub projected: String,
    /// `L ∩ rint D(K_{·|L})`.
    pub sliced: String,
    pub holds: bool,
    #[serde(skip)]
    pub exact: Hyperplane,
    #[serde(skip)]
    pub face: Polyhedron,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub checks: Vec<ProjectionCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteepNode {
    pub face_chain: Vec<String>,
    pub steep: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalSteepnessReport {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub nodes: Vec<SteepNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub strictly_convex: bool,
    pub cond_interior: bool,
    pub cond_projection: bool,
    pub cond_totally_steep: bool,
    /// First failing condition, in the order interior, projection, steepness.
    pub witness: Option<Witness>,
    /// One witness per failing condition.
    pub all_witnesses: Vec<Witness>,
}

fn neg(v: &[Rational]) -> QVec {
    v.iter().map(|x| -x).collect()
}

fn box_interior_contains(b: &BoxRegion, q: &[Rational]) -> bool {
    b.intervals.iter().zip(q).all(|(iv, x)| {
        let lo_ok = match &iv.lo {
            Bound::Finite { value, .. } => value < x,
            Bound::Infinite => true,
        };
        let hi_ok = match &iv.hi {
            Bound::Finite { value, .. } => x < value,
            Bound::Infinite => true,
        };
        lo_ok && hi_ok
    })
}

/// Outward normal of `C` at `L`, or `None` if `L` does not support `C`.
fn outward_normal(c: &Polyhedron, l: &Hyperplane) -> Option<QVec> {
    if c.support(&l.normal) == Extended::Finite(l.offset.clone()) {
        return Some(l.normal.clone());
    }
    let n = neg(&l.normal);
    (c.support(&n) == Extended::Finite(-l.offset.clone())).then_some(n)
}

/// `w ∈ int D(h_C)`: `w` is strictly negative on every recession direction.
fn in_barrier_cone_interior(c: &Polyhedron, w: &[Rational]) -> bool {
    let (_, rays) = c.generators();
    rays.iter().all(|r| dot(w, r).is_negative())
}

/// `C ∩ L` for a supporting hyperplane.
fn exposed_face(c: &Polyhedron, l: &Hyperplane) -> Polyhedron {
    c.faces()
        .into_iter()
        .find(|f| {
            let (pts, rays) = f.generators();
            pts.iter().all(|p| l.contains(p)) && rays.iter().all(|r| l.is_parallel(r))
        })
        .expect("a supporting hyperplane exposes a face")
}

/// Condition (a) at one hyperplane: `pr_L(rint D(K_X)) = L ∩ rint D(K_{X|L})`.
pub fn projection_condition_check(spec: &DistributionSpec, l: &Hyperplane) -> Result<ProjectionCheck> {
    if l.dimension() != spec.dimension() {
        return Err(Error::Dimension {
            expected: spec.dimension(),
            got: l.dimension(),
        });
    }
    let cx = convex_support(spec);
    let outward = outward_normal(&cx, l).ok_or(Error::NotSupporting)?;
    let mass = spec.mass_in_hyperplane(l);
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    if mass.is_one() {
        return Err(Error::FullMass);
    }
    let shortcut = in_barrier_cone_interior(&cx, &outward);

    let dom = k_domain(spec);
    let projected = project_region(&dom, l);
    let cond = spec.condition_on_hyperplane(l)?;
    let dom_l = k_domain(&cond);
    // Both sides are relatively open convex sets, so comparing closures is
    // exact once the slice is known to meet the open box.
    let (sliced, slice_cl) = match slice_region(&dom_l, l) {
        Ok(s) => {
            let meets = !dom_l.has_interior()
                || box_interior_contains(&dom_l, &s.closure.relative_interior_point());
            if meets {
                (s.render(), Some(s.closure))
            } else {
                ("∅".to_string(), None)
            }
        }
        Err(_) => ("∅".to_string(), None),
    };
    let equal = slice_cl.as_ref().is_some_and(|s| s.same_set(&projected));
    Ok(ProjectionCheck {
        hyperplane: l.to_string(),
        mass: short(&mass),
        depth: 0,
        shortcut,
        projected: projected.render_rint(),
        sliced,
        holds: shortcut || equal,
        exact: l.clone(),
        face: exposed_face(&cx, l),
    })
}

pub fn projection_condition_holds(spec: &DistributionSpec, l: &Hyperplane) -> Result<bool> {
    Ok(projection_condition_check(spec, l)?.holds)
}

/// Supporting hyperplanes with mass in `(0, 1)` on which condition (a) is
/// checked: facet hyperplanes, hyperplanes orthogonal to the extreme
/// directions of `D(h_C)`, and one exposing hyperplane per lower-dimensional
/// positive-mass face.
pub fn condition_a_hyperplanes(spec: &DistributionSpec) -> Vec<Hyperplane> {
    let d = spec.dimension();
    let cx = convex_support(spec);
    let facets = cx.facets();
    let mut normals: Vec<QVec> = facets.iter().map(|f| f.outward.clone()).collect();

    let (_, rays) = cx.generators();
    let cons: Vec<Constraint> = rays
        .iter()
        .map(|r| Constraint {
            normal: r.clone(),
            offset: Rational::zero(),
            is_equality: false,
        })
        .collect();
    if let Ok(barrier) = Polyhedron::from_constraints(d, &cons) {
        let (_, dirs) = barrier.generators();
        normals.extend(dirs);
    }

    for f in cx.faces().iter().skip(1) {
        if f.dim() + 1 >= cx.dim() || spec.mass_in_affine_hull(f).is_zero() {
            continue;
        }
        let mut n = vec![Rational::zero(); d];
        for facet in &facets {
            if f.subset_of(&facet.geometry) {
                for (a, b) in n.iter_mut().zip(&facet.outward) {
                    *a += b;
                }
            }
        }
        normals.push(n);
    }

    let mut out: Vec<Hyperplane> = Vec::new();
    for n in normals {
        let Extended::Finite(h) = cx.support(&n) else {
            continue;
        };
        let Ok(l) = Hyperplane::new(n, h) else {
            continue;
        };
        let m = spec.mass_in_hyperplane(&l);
        if m.is_positive() && !m.is_one() && !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// Condition (a) at the root only, for every hyperplane that needs checking.
pub fn condition_a(spec: &DistributionSpec) -> Result<Vec<ProjectionCheck>> {
    condition_a_hyperplanes(spec)
        .iter()
        .map(|l| projection_condition_check(spec, l))
        .collect()
}

fn render_chain(chain: &[Polyhedron]) -> Vec<String> {
    chain.iter().map(Polyhedron::render_closed).collect()
}

pub fn has_projection_property(spec: &DistributionSpec) -> Result<ProjectionReport> {
    let mut checks = Vec::new();
    let mut chain = Vec::new();
    let witness = if spec.dimension() == 1 {
        None
    } else {
        projection_rec(spec, &mut chain, &mut checks)?
    };
    Ok(ProjectionReport {
        holds: witness.is_none(),
        witness,
        checks,
    })
}

fn projection_rec(
    y: &DistributionSpec,
    chain: &mut Vec<Polyhedron>,
    checks: &mut Vec<ProjectionCheck>,
) -> Result<Option<Witness>> {
    for mut c in condition_a(y)? {
        c.depth = chain.len();
        let failed = !c.holds;
        checks.push(c.clone());
        if failed {
            return Ok(Some(Witness {
                condition: Condition::Projection,
                face_chain: render_chain(chain),
                face: Some(c.face.render_closed()),
                hyperplane: Some(c.hyperplane.clone()),
                projected: Some(c.projected.clone()),
                sliced: Some(c.sliced.clone()),
                detail: format!(
                    "on {}: pr_L(rint D(K)) = {} but L ∩ rint D(K_{{·|L}}) = {}",
                    c.hyperplane, c.projected, c.sliced
                ),
                faces: chain.clone(),
                hyperplane_exact: Some(c.exact),
            }));
        }
    }
    for face in positive_mass_faces(y) {
        let cond = y.condition_on_face(&face.geometry)?;
        chain.push(face.geometry.clone());
        let w = projection_rec(&cond, chain, checks)?;
        chain.pop();
        if w.is_some() {
            return Ok(w);
        }
    }
    Ok(None)
}

pub fn is_totally_steep(spec: &DistributionSpec) -> Result<TotalSteepnessReport> {
    if !k_domain(spec).has_interior() {
        return Err(Error::EmptyInterior);
    }
    let mut nodes = Vec::new();
    let mut chain = Vec::new();
    let witness = steep_rec(spec, &mut chain, &mut nodes)?;
    Ok(TotalSteepnessReport {
        holds: witness.is_none(),
        witness,
        nodes,
    })
}

fn steep_rec(
    y: &DistributionSpec,
    chain: &mut Vec<Polyhedron>,
    nodes: &mut Vec<SteepNode>,
) -> Result<Option<Witness>> {
    let steep = is_steep(y)?;
    nodes.push(SteepNode {
        face_chain: render_chain(chain),
        steep,
    });
    if !steep {
        let what = chain.last().map_or("the log-Laplace transform".to_string(), |f| {
            format!("the log-Laplace transform conditioned on the face {}", f.render_closed())
        });
        return Ok(Some(Witness {
            condition: Condition::TotalSteepness,
            face_chain: render_chain(chain),
            face: chain.last().map(Polyhedron::render_closed),
            hyperplane: None,
            projected: None,
            sliced: None,
            detail: format!(
                "{what} is not steep on {}",
                k_domain(y)
            ),
            faces: chain.clone(),
            hyperplane_exact: None,
        }));
    }
    for face in positive_mass_faces(y) {
        let cond = y.condition_on_face(&face.geometry)?;
        chain.push(face.geometry.clone());
        let w = steep_rec(&cond, chain, nodes)?;
        chain.pop();
        if w.is_some() {
            return Ok(w);
        }
    }
    Ok(None)
}

pub fn strict_convexity_verdict(spec: &DistributionSpec) -> Result<Verdict> {
    let dom = k_domain(spec);
    let cond_interior = dom.has_interior();
    let projection = has_projection_property(spec)?;
    let steep = if cond_interior {
        Some(is_totally_steep(spec)?)
    } else {
        None
    };
    let mut all_witnesses = Vec::new();
    if !cond_interior {
        all_witnesses.push(Witness {
            condition: Condition::Interior,
            face_chain: Vec::new(),
            face: None,
            hyperplane: None,
            projected: None,
            sliced: None,
            detail: format!("D(K) = {dom} has empty interior"),
            faces: Vec::new(),
            hyperplane_exact: None,
        });
    }
    all_witnesses.extend(projection.witness.clone());
    if let Some(w) = steep.as_ref().and_then(|s| s.witness.clone()) {
        all_witnesses.push(w);
    }
    let cond_projection = projection.holds;
    let cond_totally_steep = steep.is_some_and(|s| s.holds);
    Ok(Verdict {
        strictly_convex: cond_interior && cond_projection && cond_totally_steep,
        cond_interior,
        cond_projection,
        cond_totally_steep,
        witness: all_witnesses.first().cloned(),
        all_witnesses,
    })
}

/// One cell `rint C_{X|C_k}` of the decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub face_chain: Vec<Polyhedron>,
    pub piece: Polyhedron,
    pub spec: DistributionSpec,
}

impl Cell {
    pub fn contains(&self, v: &[Rational]) -> bool {
        self.piece.rint_contains(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainDecomposition {
    /// Root cell `rint C_X` first.
    pub cells: Vec<Cell>,
}

impl DomainDecomposition {
    pub fn contains(&self, v: &[Rational]) -> bool {
        self.cells.iter().any(|c| c.contains(v))
    }

    /// Pieces of the cells, for set comparisons.
    pub fn pieces(&self) -> Vec<&Polyhedron> {
        self.cells.iter().map(|c| &c.piece).collect()
    }
}

/// The face-chain union without checking its hypothesis. Cells reached by
/// several chains are listed once, under the first chain.
pub fn formal_decomposition(spec: &DistributionSpec) -> Result<DomainDecomposition> {
    let mut cells = Vec::new();
    decompose_rec(spec, &mut Vec::new(), &mut cells)?;
    Ok(DomainDecomposition { cells })
}

fn decompose_rec(y: &DistributionSpec, chain: &mut Vec<Polyhedron>, cells: &mut Vec<Cell>) -> Result<()> {
    let piece = convex_support(y);
    if cells.iter().any(|c| c.piece.same_set(&piece)) {
        return Ok(());
    }
    cells.push(Cell {
        face_chain: chain.clone(),
        piece,
        spec: y.clone(),
    });
    for face in positive_mass_faces(y) {
        let cond = y.condition_on_face(&face.geometry)?;
        chain.push(face.geometry.clone());
        decompose_rec(&cond, chain, cells)?;
        chain.pop();
    }
    Ok(())
}

fn require_projection(spec: &DistributionSpec) -> Result<()> {
    let rep = has_projection_property(spec)?;
    match rep.witness {
        None => Ok(()),
        Some(w) => Err(Error::Refused(format!("projection property fails ({})", w.detail))),
    }
}

pub fn domain_decomposition(spec: &DistributionSpec) -> Result<DomainDecomposition> {
    require_projection(spec)?;
    formal_decomposition(spec)
}

pub fn domain_contains(decomp: &DomainDecomposition, v: &[Rational]) -> bool {
    decomp.contains(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremePoint {
    pub point: QVec,
    pub mass: Rational,
    /// `−log P(X = v)`.
    pub value: f64,
}

pub fn extreme_points(spec: &DistributionSpec) -> Result<Vec<ExtremePoint>> {
    require_projection(spec)?;
    let cx = convex_support(spec);
    if !cx.is_pointed() {
        return Ok(Vec::new());
    }
    Ok(cx
        .vertices()
        .iter()
        .filter_map(|v| {
            let mass = spec.atom_mass_at(v);
            mass.is_positive().then(|| ExtremePoint {
                point: v.clone(),
                value: -to_f64(&mass).ln(),
                mass,
            })
        })
        .collect())
}

/// Evidence that `D(I_{X|C})` is a proper face of `D(I_X)` for one
/// `C ∈ F*_+(C_X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceEvidence {
    pub face: Polyhedron,
    pub hyperplane: Hyperplane,
    /// Cell pieces of the conditional decomposition.
    pub conditional_domain: Vec<Polyhedron>,
    /// Every conditional cell is a cell of the root decomposition.
    pub contained: bool,
    /// The conditional domain equals `D(I_X) ∩ L`, an exposed face.
    pub exposed: bool,
    /// Not strictly contained in another conditional domain.
    pub maximal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceCorrespondence {
    pub faces: Vec<FaceEvidence>,
    /// `{D(I_{X|C})} ⊂ F(D(I_X)) \ {D(I_X)}`.
    pub second_inclusion: bool,
    /// `F*(D(I_X)) ⊂ {D(I_{X|C})}` holds as an equality.
    pub first_inclusion_tight: bool,
}

fn family_subset(a: &[Polyhedron], b: &[Polyhedron]) -> bool {
    a.iter().all(|p| b.iter().any(|q| p.same_set(q)))
}

pub fn face_correspondence(spec: &DistributionSpec) -> Result<FaceCorrespondence> {
    if let Some(c) = condition_a(spec)?.into_iter().find(|c| !c.holds) {
        return Err(Error::Refused(format!(
            "condition (a) fails on {}: {} vs {}",
            c.hyperplane, c.projected, c.sliced
        )));
    }
    let root = formal_decomposition(spec)?;
    let root_pieces: Vec<Polyhedron> = root.pieces().into_iter().cloned().collect();
    let mut faces = Vec::new();
    for f in positive_mass_faces(spec) {
        let cond = spec.condition_on_face(&f.geometry)?;
        let sub: Vec<Polyhedron> = formal_decomposition(&cond)?
            .cells
            .into_iter()
            .map(|c| c.piece)
            .collect();
        let on_l: Vec<Polyhedron> = root_pieces
            .iter()
            .filter(|p| {
                let (pts, rays) = p.generators();
                pts.iter().all(|x| f.hyperplane.contains(x))
                    && rays.iter().all(|r| f.hyperplane.is_parallel(r))
            })
            .cloned()
            .collect();
        faces.push(FaceEvidence {
            face: f.geometry,
            hyperplane: f.hyperplane,
            contained: family_subset(&sub, &root_pieces),
            exposed: family_subset(&sub, &on_l) && family_subset(&on_l, &sub),
            conditional_domain: sub,
            maximal: true,
        });
    }
    for i in 0..faces.len() {
        let strictly_inside = (0..faces.len()).any(|j| {
            j != i
                && family_subset(&faces[i].conditional_domain, &faces[j].conditional_domain)
                && !family_subset(&faces[j].conditional_domain, &faces[i].conditional_domain)
        });
        faces[i].maximal = !strictly_inside;
    }
    Ok(FaceCorrespondence {
        second_inclusion: faces.iter().all(|f| f.contained && f.exposed),
        first_inclusion_tight: faces.iter().all(|f| f.maximal),
        faces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::{Component, Law1D};
    use crate::exact::{qvec, rat, ratio};
    use crate::fixtures;

    fn ordinate() -> Hyperplane {
        Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap()
    }

    #[test]
    fn counterexample_projection_fails_on_the_ordinate() {
        let ex = fixtures::ex_nts();
        let c = projection_condition_check(&ex, &ordinate()).unwrap();
        assert!(!c.holds);
        assert!(!c.shortcut);
        assert_eq!(c.projected, "{0}×(−∞,1)");
        assert_eq!(c.sliced, "{0}×(−∞,2)");
        let rep = has_projection_property(&ex).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert_eq!(w.hyperplane.as_deref(), Some("v1 = 0"));
        assert_eq!(w.face.as_deref(), Some("{0}×[0,∞)"));
    }

    #[test]
    fn counterexample_total_steepness() {
        let ex = fixtures::ex_nts();
        let rep = is_totally_steep(&ex).unwrap();
        assert!(!rep.holds);
        assert!(rep.nodes[0].steep);
        assert_eq!(rep.witness.unwrap().face.as_deref(), Some("{0}×[0,∞)"));
        let v = strict_convexity_verdict(&ex).unwrap();
        assert!(!v.strictly_convex && v.cond_interior && !v.cond_projection && !v.cond_totally_steep);
        assert_eq!(v.witness.unwrap().condition, Condition::Projection);
        assert_eq!(v.all_witnesses.len(), 2);
    }

    #[test]
    fn square_and_bernoulli_are_strictly_convex() {
        for s in [fixtures::square(), fixtures::bernoulli(), fixtures::exp1d(), fixtures::two_exp()] {
            let v = strict_convexity_verdict(&s).unwrap();
            assert!(v.strictly_convex, "{v:?}");
            assert!(v.witness.is_none());
        }
        let sq = fixtures::square();
        for l in condition_a_hyperplanes(&sq) {
            assert!(projection_condition_holds(&sq, &l).unwrap());
        }
        // four edge lines plus one diagonal line per vertex
        assert_eq!(condition_a_hyperplanes(&sq).len(), 8);
    }

    #[test]
    fn single_tail_law_is_not_steep() {
        let t = fixtures::exp_poly_23();
        let rep = is_totally_steep(&t).unwrap();
        assert!(!rep.holds);
        assert!(rep.witness.unwrap().face_chain.is_empty());
        assert!(!strict_convexity_verdict(&t).unwrap().strictly_convex);
    }

    fn quadrant_with_origin_atom() -> DistributionSpec {
        let e = Law1D::exponential(rat(1));
        DistributionSpec::new(
            2,
            vec![
                Component {
                    weight: ratio(1, 2),
                    shift: qvec(&[0, 0]),
                    laws: vec![e.clone(), e],
                },
                Component {
                    weight: ratio(1, 2),
                    shift: qvec(&[0, 0]),
                    laws: vec![Law1D::Atom { at: rat(0) }, Law1D::Atom { at: rat(0) }],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn atom_at_the_quadrant_corner() {
        let s = quadrant_with_origin_atom();
        // conditional on the ordinate is the atom, so the slice is all of L
        let c = projection_condition_check(&s, &ordinate()).unwrap();
        assert_eq!(c.mass, "1/2");
        assert_eq!(c.projected, "{0}×(−∞,1)");
        assert_eq!(c.sliced, "{0}×(−∞,∞)");
        assert!(!c.holds);
        assert!(!has_projection_property(&s).unwrap().holds);
    }

    #[test]
    fn precondition_errors() {
        let ex = fixtures::ex_nts();
        let bottom = Hyperplane::new(qvec(&[0, 1]), rat(0)).unwrap();
        assert_eq!(projection_condition_check(&ex, &bottom).unwrap_err(), Error::ZeroMass);
        let inside = Hyperplane::new(qvec(&[1, 0]), rat(1)).unwrap();
        assert_eq!(projection_condition_check(&ex, &inside).unwrap_err(), Error::NotSupporting);
    }

    #[test]
    fn decompositions() {
        let sq = domain_decomposition(&fixtures::square()).unwrap();
        assert_eq!(sq.cells.len(), 9);
        assert!(sq.contains(&[rat(0), ratio(1, 2)]));
        assert!(sq.contains(&qvec(&[1, 1])));
        assert!(!sq.contains(&[rat(2), ratio(1, 2)]));

        let q = domain_decomposition(&fixtures::two_exp()).unwrap();
        assert_eq!(q.cells.len(), 1);
        assert!(!q.contains(&qvec(&[0, 1])));
        assert!(q.contains(&qvec(&[1, 1])));

        let b = domain_decomposition(&fixtures::bernoulli()).unwrap();
        assert_eq!(b.cells.len(), 3);
        assert!(b.contains(&[rat(0)]) && b.contains(&[ratio(1, 2)]) && !b.contains(&[rat(-1)]));

        let err = domain_decomposition(&fixtures::ex_nts()).unwrap_err();
        assert!(matches!(err, Error::Refused(ref m) if m.contains("projection property fails")));
    }

    #[test]
    fn extremes() {
        let pts = extreme_points(&fixtures::square()).unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            assert!((p.value - 4f64.ln()).abs() < 1e-15);
        }
        let b = extreme_points(&fixtures::bernoulli()).unwrap();
        assert_eq!(b.iter().map(|p| p.point.clone()).collect::<Vec<_>>(), vec![qvec(&[0]), qvec(&[1])]);
        assert!(extreme_points(&fixtures::two_exp()).unwrap().is_empty());
        assert!(extreme_points(&fixtures::ex_nts()).is_err());
    }

    #[test]
    fn face_correspondence_square_and_bernoulli() {
        let fc = face_correspondence(&fixtures::square()).unwrap();
        assert_eq!(fc.faces.len(), 4);
        assert!(fc.second_inclusion && fc.first_inclusion_tight);
        for f in &fc.faces {
            assert_eq!(f.conditional_domain.len(), 3);
            assert!(f.conditional_domain[0].same_set(&f.face));
        }
        let fc = face_correspondence(&fixtures::bernoulli()).unwrap();
        assert_eq!(fc.faces.len(), 2);
        assert!(fc.second_inclusion);
        assert!(face_correspondence(&fixtures::ex_nts()).is_err());
    }

    #[test]
    fn edge_with_massless_endpoints() {
        // Uniform[0,1]×{0} plus an atom at (0,1): the bottom edge's endpoints
        // carry no mass, so D(I_{X|C}) is the open edge only.
        let s = DistributionSpec::new(
            2,
            vec![
                Component {
                    weight: ratio(1, 2),
                    shift: qvec(&[0, 0]),
                    laws: vec![Law1D::Uniform { a: rat(0), b: rat(1) }, Law1D::Atom { at: rat(0) }],
                },
                Component {
                    weight: ratio(1, 2),
                    shift: qvec(&[0, 0]),
                    laws: vec![Law1D::Atom { at: rat(0) }, Law1D::Atom { at: rat(1) }],
                },
            ],
        )
        .unwrap();
        let fc = face_correspondence(&s).unwrap();
        assert!(fc.second_inclusion);
        let bottom = fc
            .faces
            .iter()
            .find(|f| f.hyperplane == Hyperplane::new(qvec(&[0, 1]), rat(0)).unwrap())
            .unwrap();
        assert_eq!(bottom.conditional_domain.len(), 1);
        let d = formal_decomposition(&s).unwrap();
        assert!(d.contains(&[ratio(1, 2), rat(0)]));
        assert!(!d.contains(&qvec(&[0, 0])));
        assert!(d.contains(&qvec(&[0, 1])));
    }
}
