//! The representable distribution class: finite mixtures of axis-aligned
//! product components, each coordinate a pure atom or a continuous law.
//!
//! Conditioning on a supporting hyperplane of the convex support is component
//! selection in this class: a component either lies inside the hyperplane or
//! meets it in a null set.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::convgeo::{Hyperplane, Polyhedron};
use crate::error::{Error, Result};
use crate::exact::{dot, format_rational, parse_rational, rat, unit, QVec, Rational};
use crate::interval::{Bound, Interval};
use crate::logmgf::ComponentModel;

/// Direction of a one-sided law: `Up` puts the support on `[shift, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Up => 1,
            Orientation::Down => -1,
        }
    }
}

/// One-dimensional coordinate law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Law1D {
    Atom {
        at: Rational,
    },
    Exponential {
        rate: Rational,
        orientation: Orientation,
        shift: Rational,
    },
    Gaussian {
        mean: Rational,
        variance: Rational,
    },
    Uniform {
        a: Rational,
        b: Rational,
    },
    /// Density proportional to `exp(-rate*y) / (1 + y^exponent)` for `y > 0`,
    /// placed at `shift + orientation*y`.
    ExpPolyTail {
        rate: Rational,
        exponent: Rational,
        orientation: Orientation,
        shift: Rational,
    },
}

impl Law1D {
    pub fn exponential(rate: Rational) -> Self {
        Law1D::Exponential {
            rate,
            orientation: Orientation::Up,
            shift: Rational::zero(),
        }
    }

    pub fn exp_poly_tail(rate: Rational, exponent: Rational) -> Self {
        Law1D::ExpPolyTail {
            rate,
            exponent,
            orientation: Orientation::Up,
            shift: Rational::zero(),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Law1D::Atom { .. })
    }

    /// Closed support interval.
    pub fn support(&self) -> Interval {
        match self {
            Law1D::Atom { at } => Interval::point(at.clone()),
            Law1D::Gaussian { .. } => Interval::real_line(),
            Law1D::Uniform { a, b } => Interval {
                lo: Bound::closed(a.clone()),
                hi: Bound::closed(b.clone()),
            },
            Law1D::Exponential {
                orientation, shift, ..
            }
            | Law1D::ExpPolyTail {
                orientation, shift, ..
            } => match orientation {
                Orientation::Up => Interval {
                    lo: Bound::closed(shift.clone()),
                    hi: Bound::Infinite,
                },
                Orientation::Down => Interval {
                    lo: Bound::Infinite,
                    hi: Bound::closed(shift.clone()),
                },
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: &Rational, what: &str| {
            if x.is_positive() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{what} must be positive, got {}",
                    format_rational(x)
                )))
            }
        };
        match self {
            Law1D::Atom { .. } => Ok(()),
            Law1D::Exponential { rate, .. } => positive(rate, "rate"),
            Law1D::Gaussian { variance, .. } => positive(variance, "variance"),
            Law1D::Uniform { a, b } => {
                if a < b {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "uniform law needs a < b, got a={} b={}",
                        format_rational(a),
                        format_rational(b)
                    )))
                }
            }
            Law1D::ExpPolyTail { rate, exponent, .. } => {
                positive(rate, "rate")?;
                positive(exponent, "exponent")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub weight: Rational,
    pub shift: QVec,
    pub laws: Vec<Law1D>,
}

impl Component {
    /// Generators of the closed support: box corners (finite endpoints, or a
    /// representative point on two-sided unbounded axes) and unbounded axis
    /// directions.
    pub fn support_generators(&self) -> (Vec<QVec>, Vec<QVec>) {
        let d = self.laws.len();
        let mut per_axis: Vec<Vec<Rational>> = Vec::with_capacity(d);
        let mut rays = Vec::new();
        for (j, law) in self.laws.iter().enumerate() {
            let s = law.support();
            let mut pts = Vec::new();
            if let Some(v) = s.lo.value() {
                pts.push(v.clone());
            }
            if let Some(v) = s.hi.value() {
                if !pts.contains(v) {
                    pts.push(v.clone());
                }
            }
            if pts.is_empty() {
                let rep = match law {
                    Law1D::Gaussian { mean, .. } => mean.clone(),
                    _ => Rational::zero(),
                };
                pts.push(rep);
            }
            if s.lo == Bound::Infinite {
                rays.push(unit(d, j).into_iter().map(|x| -x).collect());
            }
            if s.hi == Bound::Infinite {
                rays.push(unit(d, j));
            }
            per_axis.push(pts.into_iter().map(|p| p + &self.shift[j]).collect());
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
        (points, rays)
    }

    pub fn contained_in_hyperplane(&self, h: &Hyperplane) -> bool {
        let (points, rays) = self.support_generators();
        points.iter().all(|p| dot(&h.normal, p) == h.offset)
            && rays.iter().all(|r| dot(&h.normal, r).is_zero())
    }

    /// Support contained in the affine hull of `poly`.
    pub fn contained_in_affine_hull(&self, poly: &Polyhedron) -> bool {
        let (points, rays) = self.support_generators();
        poly.equalities().iter().all(|c| {
            points.iter().all(|p| dot(&c.normal, p) == c.offset)
                && rays.iter().all(|r| dot(&c.normal, r).is_zero())
        })
    }

    /// The point mass location if every coordinate is an atom.
    pub fn atom_location(&self) -> Option<QVec> {
        self.laws
            .iter()
            .zip(&self.shift)
            .map(|(l, t)| match l {
                Law1D::Atom { at } => Some(at + t),
                _ => None,
            })
            .collect()
    }
}

/// A validated random vector `X` in `R^d`, `d <= 3`.
#[derive(Debug, Clone)]
pub struct DistributionSpec {
    dimension: usize,
    components: Vec<Component>,
    /// Component indices in the spec this one was conditioned from.
    origin: Vec<usize>,
    models: Vec<ComponentModel>,
}

impl PartialEq for DistributionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension && self.components == other.components
    }
}

impl DistributionSpec {
    pub fn new(dimension: usize, components: Vec<Component>) -> Result<Self> {
        validate(dimension, components)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn models(&self) -> &[ComponentModel] {
        &self.models
    }

    /// Indices of this spec's components in the root spec.
    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    /// Exact `P(X in L)` for hyperplanes supporting the convex support.
    pub fn mass_in_hyperplane(&self, h: &Hyperplane) -> Rational {
        self.components
            .iter()
            .filter(|c| c.contained_in_hyperplane(h))
            .fold(Rational::zero(), |acc, c| acc + &c.weight)
    }

    pub fn mass_in_affine_hull(&self, poly: &Polyhedron) -> Rational {
        self.components
            .iter()
            .filter(|c| c.contained_in_affine_hull(poly))
            .fold(Rational::zero(), |acc, c| acc + &c.weight)
    }

    pub fn atom_mass_at(&self, v: &[Rational]) -> Rational {
        self.components
            .iter()
            .filter(|c| c.atom_location().as_deref() == Some(v))
            .fold(Rational::zero(), |acc, c| acc + &c.weight)
    }

    /// Renormalized mixture of the components whose support lies in the
    /// affine hull of `face`.
    pub fn condition_on_face(&self, face: &Polyhedron) -> Result<DistributionSpec> {
        let keep: Vec<usize> = (0..self.components.len())
            .filter(|&i| self.components[i].contained_in_affine_hull(face))
            .collect();
        self.select(&keep)
    }

    pub fn condition_on_hyperplane(&self, h: &Hyperplane) -> Result<DistributionSpec> {
        let keep: Vec<usize> = (0..self.components.len())
            .filter(|&i| self.components[i].contained_in_hyperplane(h))
            .collect();
        self.select(&keep)
    }

    fn select(&self, keep: &[usize]) -> Result<DistributionSpec> {
        let mass = keep
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &self.components[i].weight);
        if mass.is_zero() {
            return Err(Error::ZeroMass);
        }
        let mut components = Vec::with_capacity(keep.len());
        let mut models = Vec::with_capacity(keep.len());
        for &i in keep {
            let mut c = self.components[i].clone();
            c.weight = &c.weight / &mass;
            models.push(self.models[i].reweighted(&c.weight));
            components.push(c);
        }
        Ok(DistributionSpec {
            dimension: self.dimension,
            components,
            origin: keep.iter().map(|&i| self.origin[i]).collect(),
            models,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RawSpec::from_spec(self)).expect("spec serializes")
    }

    /// Mean vector when every component has finite mean (always true here).
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dimension];
        for model in &self.models {
            let w = model.log_weight.exp();
            for (j, x) in model.mean().iter().enumerate() {
                m[j] += w * x;
            }
        }
        m
    }
}

fn validate(dimension: usize, components: Vec<Component>) -> Result<DistributionSpec> {
    if !(1..=3).contains(&dimension) {
        return Err(Error::InvalidSpec(format!(
            "dimension must be 1, 2 or 3, got {dimension}"
        )));
    }
    if components.is_empty() {
        return Err(Error::InvalidSpec("no components".into()));
    }
    let mut total = Rational::zero();
    for (i, c) in components.iter().enumerate() {
        if c.shift.len() != dimension || c.laws.len() != dimension {
            return Err(Error::InvalidSpec(format!(
                "component {i} has {} shifts and {} laws for dimension {dimension}",
                c.shift.len(),
                c.laws.len()
            )));
        }
        if !c.weight.is_positive() || c.weight > Rational::one() {
            return Err(Error::InvalidSpec(format!(
                "component {i} weight {} is not in (0,1]",
                format_rational(&c.weight)
            )));
        }
        for law in &c.laws {
            law.validate()?;
        }
        total += &c.weight;
    }
    if total != Rational::one() {
        return Err(Error::InvalidSpec(format!(
            "weights sum to {}",
            crate::interval::short(&total)
        )));
    }
    let models = components
        .iter()
        .map(ComponentModel::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionSpec {
        dimension,
        origin: (0..components.len()).collect(),
        components,
        models,
    })
}

// JSON wire format. Every rational is a "num/den" string.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    dimension: usize,
    components: Vec<RawComponent>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    weight: String,
    shift: Vec<String>,
    laws: Vec<BTreeMap<String, String>>,
}

impl RawSpec {
    fn into_spec(self) -> Result<DistributionSpec> {
        let components = self
            .components
            .into_iter()
            .map(|c| {
                Ok(Component {
                    weight: parse_rational(&c.weight)?,
                    shift: c
                        .shift
                        .iter()
                        .map(|s| parse_rational(s))
                        .collect::<Result<_>>()?,
                    laws: c.laws.iter().map(parse_law).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        validate(self.dimension, components)
    }

    fn from_spec(spec: &DistributionSpec) -> Self {
        RawSpec {
            dimension: spec.dimension,
            components: spec
                .components
                .iter()
                .map(|c| RawComponent {
                    weight: format_rational(&c.weight),
                    shift: c.shift.iter().map(format_rational).collect(),
                    laws: c.laws.iter().map(law_fields).collect(),
                })
                .collect(),
        }
    }
}

fn parse_law(fields: &BTreeMap<String, String>) -> Result<Law1D> {
    let kind = fields
        .get("kind")
        .ok_or_else(|| Error::Parse("law without \"kind\"".into()))?;
    let expected: &[&str] = match kind.as_str() {
        "atom" => &["kind", "at"],
        "exponential" => &["kind", "rate", "orientation", "shift"],
        "gaussian" => &["kind", "mean", "variance"],
        "uniform" => &["kind", "a", "b"],
        "exp_poly_tail" => &["kind", "rate", "exponent", "orientation", "shift"],
        other => return Err(Error::Parse(format!("unknown law kind {other:?}"))),
    };
    if let Some(extra) = fields.keys().find(|k| !expected.contains(&k.as_str())) {
        return Err(Error::Parse(format!("unexpected field {extra:?} in {kind} law")));
    }
    let get = |name: &str| -> Result<Rational> {
        match fields.get(name) {
            Some(s) => parse_rational(s),
            None => Err(Error::Parse(format!("{kind} law is missing {name:?}"))),
        }
    };
    let get_or = |name: &str, default: i64| -> Result<Rational> {
        match fields.get(name) {
            Some(s) => parse_rational(s),
            None => Ok(rat(default)),
        }
    };
    let orientation = || -> Result<Orientation> {
        let o = get_or("orientation", 1)?;
        if o == rat(1) {
            Ok(Orientation::Up)
        } else if o == rat(-1) {
            Ok(Orientation::Down)
        } else {
            Err(Error::Parse(format!(
                "orientation must be 1 or -1, got {}",
                format_rational(&o)
            )))
        }
    };
    Ok(match kind.as_str() {
        "atom" => Law1D::Atom { at: get("at")? },
        "exponential" => Law1D::Exponential {
            rate: get("rate")?,
            orientation: orientation()?,
            shift: get_or("shift", 0)?,
        },
        "gaussian" => Law1D::Gaussian {
            mean: get("mean")?,
            variance: get("variance")?,
        },
        "uniform" => Law1D::Uniform {
            a: get("a")?,
            b: get("b")?,
        },
        _ => Law1D::ExpPolyTail {
            rate: get("rate")?,
            exponent: get("exponent")?,
            orientation: orientation()?,
            shift: get_or("shift", 0)?,
        },
    })
}

fn law_fields(law: &Law1D) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    let orient = |o: &Orientation| if *o == Orientation::Up { "1" } else { "-1" }.to_string();
    match law {
        Law1D::Atom { at } => {
            put("kind", "atom".into());
            put("at", format_rational(at));
        }
        Law1D::Exponential {
            rate,
            orientation,
            shift,
        } => {
            put("kind", "exponential".into());
            put("rate", format_rational(rate));
            put("orientation", orient(orientation));
            put("shift", format_rational(shift));
        }
        Law1D::Gaussian { mean, variance } => {
            put("kind", "gaussian".into());
            put("mean", format_rational(mean));
            put("variance", format_rational(variance));
        }
        Law1D::Uniform { a, b } => {
            put("kind", "uniform".into());
            put("a", format_rational(a));
            put("b", format_rational(b));
        }
        Law1D::ExpPolyTail {
            rate,
            exponent,
            orientation,
            shift,
        } => {
            put("kind", "exp_poly_tail".into());
            put("rate", format_rational(rate));
            put("exponent", format_rational(exponent));
            put("orientation", orient(orientation));
            put("shift", format_rational(shift));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qvec, ratio};
    use crate::fixtures;

    #[test]
    fn bernoulli_is_valid() {
        let b = fixtures::bernoulli();
        assert_eq!(b.components().len(), 2);
        assert_eq!(b.dimension(), 1);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let atom = |w: Rational, x: i64| Component {
            weight: w,
            shift: vec![rat(0)],
            laws: vec![Law1D::Atom { at: rat(x) }],
        };
        let err = DistributionSpec::new(1, vec![atom(ratio(1, 2), 0), atom(ratio(1, 3), 1)])
            .unwrap_err();
        assert_eq!(err, Error::InvalidSpec("weights sum to 5/6".into()));
    }

    #[test]
    fn parameter_errors() {
        let single = |law: Law1D| {
            DistributionSpec::new(
                1,
                vec![Component {
                    weight: rat(1),
                    shift: vec![rat(0)],
                    laws: vec![law],
                }],
            )
        };
        assert!(single(Law1D::exponential(rat(0))).is_err());
        assert!(single(Law1D::Gaussian {
            mean: rat(0),
            variance: rat(-1)
        })
        .is_err());
        assert!(single(Law1D::Uniform { a: rat(1), b: rat(1) }).is_err());
        assert!(single(Law1D::exp_poly_tail(rat(2), rat(0))).is_err());
        let four = DistributionSpec::new(
            4,
            vec![Component {
                weight: rat(1),
                shift: vec![rat(0); 4],
                laws: vec![Law1D::Atom { at: rat(0) }; 4],
            }],
        );
        assert!(matches!(four, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn counterexample_fixture_is_valid() {
        let x = fixtures::ex_nts();
        assert_eq!(x.dimension(), 2);
        assert_eq!(x.components().len(), 2);
    }

    #[test]
    fn hyperplane_masses() {
        let ex = fixtures::ex_nts();
        let ordinate = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        assert_eq!(ex.mass_in_hyperplane(&ordinate), ratio(1, 2));
        let b = fixtures::bernoulli();
        let at_one = Hyperplane::new(qvec(&[1]), rat(1)).unwrap();
        assert_eq!(b.mass_in_hyperplane(&at_one), ratio(1, 2));
        let sq = fixtures::square();
        let left = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        assert_eq!(sq.mass_in_hyperplane(&left), ratio(1, 2));
    }

    #[test]
    fn conditioning_selects_components() {
        let ex = fixtures::ex_nts();
        let ordinate = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        let c = ex.condition_on_hyperplane(&ordinate).unwrap();
        assert_eq!(c.components().len(), 1);
        assert_eq!(c.components()[0].weight, rat(1));
        assert_eq!(c.components()[0].laws[0], Law1D::Atom { at: rat(0) });
        assert_eq!(
            c.components()[0].laws[1],
            Law1D::exp_poly_tail(rat(2), rat(3))
        );

        let sq = fixtures::square();
        let left = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        let e = sq.condition_on_hyperplane(&left).unwrap();
        assert_eq!(e.components().len(), 2);
        assert!(e.components().iter().all(|c| c.weight == ratio(1, 2)));
        let mut locs: Vec<QVec> = e
            .components()
            .iter()
            .map(|c| c.atom_location().unwrap())
            .collect();
        locs.sort();
        assert_eq!(locs, vec![qvec(&[0, 0]), qvec(&[0, 1])]);

        let bottom = Hyperplane::new(qvec(&[0, 1]), rat(0)).unwrap();
        assert_eq!(ex.condition_on_hyperplane(&bottom), Err(Error::ZeroMass));
    }

    #[test]
    fn conditioning_on_full_support_is_identity() {
        let sq = fixtures::square();
        let left = Hyperplane::new(qvec(&[1, 0]), rat(0)).unwrap();
        let e = sq.condition_on_hyperplane(&left).unwrap();
        let again = e.condition_on_hyperplane(&left).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn atom_masses() {
        assert_eq!(fixtures::bernoulli().atom_mass_at(&qvec(&[1])), ratio(1, 2));
        assert_eq!(fixtures::ex_nts().atom_mass_at(&qvec(&[0, 0])), rat(0));
        assert_eq!(fixtures::square().atom_mass_at(&qvec(&[1, 1])), ratio(1, 4));
    }

    #[test]
    fn json_roundtrip_is_exact() {
        for spec in fixtures::all() {
            let text = spec.to_json();
            let back = DistributionSpec::from_json(&text).unwrap();
            assert_eq!(back, spec);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn json_rejects_malformed_input() {
        assert!(DistributionSpec::from_json("{").is_err());
        let bad_kind = r#"{"dimension":1,"components":[{"weight":"1/1","shift":["0/1"],"laws":[{"kind":"cauchy"}]}]}"#;
        assert!(matches!(
            DistributionSpec::from_json(bad_kind),
            Err(Error::Parse(_))
        ));
        let extra = r#"{"dimension":1,"components":[{"weight":"1/1","shift":["0/1"],"laws":[{"kind":"atom","at":"0/1","rate":"1/1"}]}]}"#;
        assert!(DistributionSpec::from_json(extra).is_err());
    }

    #[test]
    fn support_generators_of_product() {
        let c = Component {
            weight: rat(1),
            shift: qvec(&[1, 0]),
            laws: vec![
                Law1D::Uniform { a: rat(0), b: rat(1) },
                Law1D::exponential(rat(1)),
            ],
        };
        let (pts, rays) = c.support_generators();
        assert_eq!(pts, vec![qvec(&[1, 0]), qvec(&[2, 0])]);
        assert_eq!(rays, vec![qvec(&[0, 1])]);
    }
}
