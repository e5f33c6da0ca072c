//! Circle arithmetic and planar Voronoi cells on the unit square and torus.

use thiserror::Error;

use crate::numeric::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("position {0} outside [0, 1)")]
    OutOfRange(String),
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
}

/// A point on the circle of circumference 1, stored as a value in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct UnitCirclePosition<S>(S);

impl<S: Scalar> UnitCirclePosition<S> {
    pub fn new(value: S) -> Result<Self, GeometryError> {
        if value < S::zero() || value >= S::one() {
            return Err(GeometryError::OutOfRange(value.render()));
        }
        Ok(Self(value))
    }

    /// Reduces any value modulo 1.
    pub fn wrapping(value: S) -> Self {
        let mut v = value;
        while v < S::zero() {
            v = v + S::one();
        }
        while v >= S::one() {
            v = v - S::one();
        }
        Self(v)
    }

    pub fn value(&self) -> &S {
        &self.0
    }

    pub fn into_inner(self) -> S {
        self.0
    }

    /// Distance travelled going clockwise from `self` to `other`.
    pub fn clockwise_to(&self, other: &Self) -> S {
        clockwise_distance(&self.0, &other.0)
    }
}

/// `(b - a) mod 1` for values already in `[0, 1)`.
pub fn clockwise_distance<S: Scalar>(a: &S, b: &S) -> S {
    let d = b.clone() - a.clone();
    if d < S::zero() {
        d + S::one()
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPoint<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> PlanarPoint<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn in_unit_square(&self) -> bool {
        let unit = |v: &S| *v >= S::zero() && *v <= S::one();
        unit(&self.x) && unit(&self.y)
    }

    pub fn translated(&self, dx: &S, dy: &S) -> Self {
        Self::new(self.x.clone() + dx.clone(), self.y.clone() + dy.clone())
    }

    pub fn squared_distance(&self, other: &Self) -> S {
        let dx = self.x.clone() - other.x.clone();
        let dy = self.y.clone() - other.y.clone();
        dx.clone() * dx + dy.clone() * dy
    }

    pub fn to_f64(&self) -> PlanarPoint<f64> {
        PlanarPoint::new(self.x.as_f64(), self.y.as_f64())
    }

    pub fn render(&self) -> String {
        format!("({}, {})", self.x.render(), self.y.render())
    }
}

/// The closed half-plane `{ z : normal · z <= offset }`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlane<S> {
    pub normal: PlanarPoint<S>,
    pub offset: S,
}

impl<S: Scalar> HalfPlane<S> {
    pub fn new(normal: PlanarPoint<S>, offset: S) -> Self {
        Self { normal, offset }
    }

    /// Points at least as close to `owner` as to `opponent`; its boundary is
    /// their perpendicular bisector.
    pub fn bisector(owner: &PlanarPoint<S>, opponent: &PlanarPoint<S>) -> Self {
        let normal = PlanarPoint::new(
            opponent.x.clone() - owner.x.clone(),
            opponent.y.clone() - owner.y.clone(),
        );
        let sq = |p: &PlanarPoint<S>| p.x.clone() * p.x.clone() + p.y.clone() * p.y.clone();
        let offset = (sq(opponent) - sq(owner)).half();
        Self { normal, offset }
    }

    /// Signed value `normal · z - offset`; nonpositive inside.
    pub fn excess(&self, z: &PlanarPoint<S>) -> S {
        self.normal.x.clone() * z.x.clone() + self.normal.y.clone() * z.y.clone() - self.offset.clone()
    }

    pub fn contains(&self, z: &PlanarPoint<S>) -> bool {
        self.excess(z) <= S::zero()
    }

    /// Intersection point of the two boundary lines, if they are not parallel.
    pub fn meet(&self, other: &Self) -> Option<PlanarPoint<S>> {
        let (a, b, c) = (&self.normal.x, &self.normal.y, &self.offset);
        let (d, e, f) = (&other.normal.x, &other.normal.y, &other.offset);
        let det = a.clone() * e.clone() - b.clone() * d.clone();
        if det.negligible() {
            return None;
        }
        let x = (c.clone() * e.clone() - b.clone() * f.clone()) / det.clone();
        let y = (a.clone() * f.clone() - c.clone() * d.clone()) / det;
        Some(PlanarPoint::new(x, y))
    }
}

impl HalfPlane<f64> {
    /// Distance from `origin` along the unit ray at angle `theta` to the
    /// boundary line; `None` when the ray runs parallel to or away from it.
    pub fn ray_distance(&self, origin: &PlanarPoint<f64>, theta: f64) -> Option<f64> {
        let (s, c) = theta.sin_cos();
        let along = self.normal.x * c + self.normal.y * s;
        if along <= 1e-12 * self.normal.x.hypot(self.normal.y) {
            return None;
        }
        let gap = -self.excess(origin);
        Some(gap / along)
    }
}

/// Counterclockwise convex polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon<S> {
    pub vertices: Vec<PlanarPoint<S>>,
}

impl<S: Scalar> ConvexPolygon<S> {
    pub fn rectangle(x0: S, y0: S, x1: S, y1: S) -> Self {
        let vertices = vec![
            PlanarPoint::new(x0.clone(), y0.clone()),
            PlanarPoint::new(x1.clone(), y0),
            PlanarPoint::new(x1, y1.clone()),
            PlanarPoint::new(x0, y1),
        ];
        Self { vertices }
    }

    pub fn unit_square() -> Self {
        Self::rectangle(S::zero(), S::zero(), S::one(), S::one())
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Shoelace area.
    pub fn area(&self) -> S {
        let n = self.vertices.len();
        if n < 3 {
            return S::zero();
        }
        let mut twice = S::zero();
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            twice = twice + a.x.clone() * b.y.clone() - b.x.clone() * a.y.clone();
        }
        twice.half()
    }

    /// Keeps the part of the polygon inside `plane`.
    pub fn clip(&self, plane: &HalfPlane<S>) -> Self {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            let fa = plane.excess(a);
            let fb = plane.excess(b);
            let a_in = fa <= S::zero();
            let b_in = fb <= S::zero();
            if a_in {
                out.push(a.clone());
            }
            if a_in != b_in {
                let t = fa.clone() / (fa - fb);
                out.push(PlanarPoint::new(
                    a.x.clone() + (b.x.clone() - a.x.clone()) * t.clone(),
                    a.y.clone() + (b.y.clone() - a.y.clone()) * t,
                ));
            }
        }
        Self { vertices: out }
    }

    pub fn max_squared_distance(&self, from: &PlanarPoint<S>) -> S {
        self.vertices
            .iter()
            .map(|v| v.squared_distance(from))
            .fold(S::zero(), |acc, d| if d > acc { d } else { acc })
    }
}

/// Center of the circle through three points, or `None` when they are
/// collinear (within the scalar tolerance).
pub fn circumcenter<S: Scalar>(
    p: &PlanarPoint<S>,
    q: &PlanarPoint<S>,
    r: &PlanarPoint<S>,
) -> Option<PlanarPoint<S>> {
    HalfPlane::bisector(p, q).meet(&HalfPlane::bisector(p, r))
}

/// Distance from `p` along angle `theta` to the bisector of `p` and `q`.
pub fn bisector_distance(p: &PlanarPoint<f64>, q: &PlanarPoint<f64>, theta: f64) -> Option<f64> {
    HalfPlane::bisector(p, q).ray_distance(p, theta)
}

/// Clips `region` by the bisectors between `site` and `rivals`, nearest
/// first, skipping rivals too far away to cut what is left.
fn clip_nearest_first<S: Scalar>(
    mut region: ConvexPolygon<S>,
    site: &PlanarPoint<S>,
    rivals: Vec<PlanarPoint<S>>,
) -> ConvexPolygon<S> {
    const EAGER: usize = 24;
    let four = S::from_ratio(4, 1);
    let mut keyed: Vec<(S, PlanarPoint<S>)> =
        rivals.into_iter().map(|q| (q.squared_distance(site), q)).collect();
    let by_distance = |a: &(S, PlanarPoint<S>), b: &(S, PlanarPoint<S>)| {
        a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal)
    };
    if keyed.len() > EAGER {
        keyed.select_nth_unstable_by(EAGER, by_distance);
        keyed[..EAGER].sort_by(by_distance);
    } else {
        keyed.sort_by(by_distance);
    }
    let mut reach = region.max_squared_distance(site) * four.clone();
    for (d2, q) in keyed {
        if region.is_empty() {
            break;
        }
        if d2 >= reach {
            continue;
        }
        region = region.clip(&HalfPlane::bisector(site, &q));
        reach = region.max_squared_distance(site) * four.clone();
    }
    region
}

fn reject_duplicate<S: Scalar>(
    site: &PlanarPoint<S>,
    others: &[PlanarPoint<S>],
    same: impl Fn(&PlanarPoint<S>, &PlanarPoint<S>) -> bool,
) -> Result<(), GeometryError> {
    match others.iter().find(|q| same(site, q)) {
        Some(q) => Err(GeometryError::DuplicatePoint(q.render())),
        None => Ok(()),
    }
}

/// The Voronoi cell of `site` inside the unit square.
pub fn voronoi_cell_square<S: Scalar>(
    site: &PlanarPoint<S>,
    others: &[PlanarPoint<S>],
) -> Result<ConvexPolygon<S>, GeometryError> {
    reject_duplicate(site, others, |a, b| a == b)?;
    Ok(clip_nearest_first(ConvexPolygon::unit_square(), site, others.to_vec()))
}

pub fn cell_area_square<S: Scalar>(
    site: &PlanarPoint<S>,
    others: &[PlanarPoint<S>],
) -> Result<S, GeometryError> {
    voronoi_cell_square(site, others).map(|cell| cell.area())
}

fn wrap_unit<S: Scalar>(v: &S) -> S {
    UnitCirclePosition::wrapping(v.clone()).into_inner()
}

/// The toroidal Voronoi cell of `site`, as a polygon around `site` in the
/// plane (it spans at most half a unit in each direction).
pub fn voronoi_cell_torus<S: Scalar>(
    site: &PlanarPoint<S>,
    others: &[PlanarPoint<S>],
) -> Result<ConvexPolygon<S>, GeometryError> {
    reject_duplicate(site, others, |a, b| {
        wrap_unit(&a.x) == wrap_unit(&b.x) && wrap_unit(&a.y) == wrap_unit(&b.y)
    })?;
    let half = S::one().half();
    let box_around = ConvexPolygon::rectangle(
        site.x.clone() - half.clone(),
        site.y.clone() - half.clone(),
        site.x.clone() + half.clone(),
        site.y.clone() + half,
    );
    let shifts = [-S::one(), S::zero(), S::one()];
    let mut rivals = Vec::with_capacity(others.len() * 9);
    for q in others {
        for dx in &shifts {
            for dy in &shifts {
                rivals.push(q.translated(dx, dy));
            }
        }
    }
    Ok(clip_nearest_first(box_around, site, rivals))
}

pub fn cell_area_torus<S: Scalar>(
    site: &PlanarPoint<S>,
    others: &[PlanarPoint<S>],
) -> Result<S, GeometryError> {
    voronoi_cell_torus(site, others).map(|cell| cell.area())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;
    use num_traits::{One, Zero};
    use std::f64::consts::PI;

    fn pt(x: f64, y: f64) -> PlanarPoint<f64> {
        PlanarPoint::new(x, y)
    }

    #[test]
    fn clockwise_distance_examples() {
        assert!((clockwise_distance(&0.2, &0.7) - 0.5).abs() < 1e-15);
        assert!((clockwise_distance(&0.7, &0.2) - 0.5).abs() < 1e-15);
        assert_eq!(clockwise_distance(&0.3, &0.3), 0.0);
    }

    #[test]
    fn circle_position_range() {
        assert!(UnitCirclePosition::new(1.0).is_err());
        assert!(UnitCirclePosition::new(-0.1).is_err());
        assert_eq!(UnitCirclePosition::wrapping(1.25).value(), &0.25);
    }

    #[test]
    fn circumcenter_examples() {
        let c = circumcenter(&pt(0.0, 0.0), &pt(1.0, 0.0), &pt(0.0, 1.0)).unwrap();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        let h = 3f64.sqrt() / 2.0;
        let c = circumcenter(&pt(0.0, 0.0), &pt(1.0, 0.0), &pt(0.5, h)).unwrap();
        assert!((c.x - 0.5).abs() < 1e-12 && (c.y - h / 3.0).abs() < 1e-12);
        assert!(circumcenter(&pt(0.0, 0.0), &pt(0.5, 0.0), &pt(1.0, 0.0)).is_none());
        let r = |a, b| Rational::from_ratio(a, b);
        let exact = circumcenter(
            &PlanarPoint::new(r(0, 1), r(0, 1)),
            &PlanarPoint::new(r(1, 2), r(0, 1)),
            &PlanarPoint::new(r(1, 1), r(0, 1)),
        );
        assert!(exact.is_none());
    }

    #[test]
    fn bisector_distance_examples() {
        let (p, q) = (pt(0.0, 0.0), pt(1.0, 0.0));
        assert!((bisector_distance(&p, &q, 0.0).unwrap() - 0.5).abs() < 1e-15);
        // Ray–line intersection oracle: solve p + t·u on x = 1/2.
        let oracle = 0.5 / (PI / 3.0).cos();
        assert!((bisector_distance(&p, &q, PI / 3.0).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 1.0).abs() < 1e-12);
        assert!(bisector_distance(&p, &q, PI / 2.0).is_none());
        assert!(bisector_distance(&p, &q, PI).is_none());
    }

    #[test]
    fn square_cells() {
        assert!((cell_area_square(&pt(0.3, 0.3), &[]).unwrap() - 1.0).abs() < 1e-15);
        let a = pt(0.25, 0.5);
        let b = pt(0.75, 0.5);
        assert!((cell_area_square(&a, std::slice::from_ref(&b)).unwrap() - 0.5).abs() < 1e-15);
        assert!((cell_area_square(&b, std::slice::from_ref(&a)).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            cell_area_square(&a, std::slice::from_ref(&a)),
            Err(GeometryError::DuplicatePoint(_))
        ));
    }

    #[test]
    fn torus_cells() {
        assert!((cell_area_torus(&pt(0.9, 0.1), &[]).unwrap() - 1.0).abs() < 1e-15);
        let a = pt(0.1, 0.2);
        let b = pt(0.95, 0.7);
        assert!((cell_area_torus(&a, std::slice::from_ref(&b)).unwrap() - 0.5).abs() < 1e-12);
        assert!((cell_area_torus(&b, &[a]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_cells_sum_to_one() {
        let r = |a, b| Rational::from_ratio(a, b);
        let sites = [PlanarPoint::new(r(1, 7), r(2, 9)),
            PlanarPoint::new(r(5, 8), r(1, 3)),
            PlanarPoint::new(r(3, 5), r(7, 8)),
            PlanarPoint::new(r(1, 11), r(9, 10))];
        for torus in [false, true] {
            let mut total = Rational::zero();
            for (i, s) in sites.iter().enumerate() {
                let others: Vec<_> =
                    sites.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
                total += if torus {
                    cell_area_torus(s, &others).unwrap()
                } else {
                    cell_area_square(s, &others).unwrap()
                };
            }
            assert_eq!(total, Rational::one());
        }
    }
}
