//! Implicit description of the curved boundary.
//!
//! The domain is `{ g < 0 }`, its boundary `{ g = 0 }`. Curved domains are
//! split into smooth pieces so that ray intersections never have to cross the
//! kink of a composite level set (the annulus is two circles, not `max(e - r, r - 1)`).

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Point2<f64>;

/// Absolute tolerance used to decide that a point lies on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Default ray-parameter bracket for boundary node construction.
pub const DEFAULT_BRACKET: (f64, f64) = (0.5, 2.0);

/// Iteration cap of the safeguarded Newton iteration.
pub const MAX_ROOT_ITERATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryGeometry {
    /// `(x/e)^2 + y^2 < 1`.
    Ellipse { e: f64 },
    /// `e < r < 1`.
    Annulus { e: f64 },
    /// Straight-sided domain; the mesh boundary coincides with the true one.
    Polygon { vertices: Vec<[f64; 2]> },
}

/// One smooth piece of a curved boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve {
    Ellipse {
        e: f64,
    },
    /// `hole = false`: the domain is inside the circle; `hole = true`: outside.
    Circle {
        radius: f64,
        hole: bool,
    },
}

impl Curve {
    pub fn value(&self, p: &Point) -> f64 {
        match *self {
            Curve::Ellipse { e } => (p.x / e).powi(2) + p.y * p.y - 1.0,
            Curve::Circle { radius, hole } => {
                let r = p.coords.norm();
                if hole {
                    radius - r
                } else {
                    r - radius
                }
            }
        }
    }

    pub fn gradient(&self, p: &Point) -> Vector2<f64> {
        match *self {
            Curve::Ellipse { e } => Vector2::new(2.0 * p.x / (e * e), 2.0 * p.y),
            Curve::Circle { hole, .. } => {
                let r = p.coords.norm();
                if r == 0.0 {
                    return Vector2::zeros();
                }
                let n = p.coords / r;
                if hole {
                    -n
                } else {
                    n
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Inside,
    OnBoundary,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkinSide {
    /// The arc bulges out of the chord: `T` is a proper subset of `T ∪ Δ_T`.
    CurveOutsideChord,
    /// The arc dips into the triangle: the skin is cut away from `T`.
    CurveInsideChord,
    Coincident,
}

/// Ray from an interior vertex through a point of a boundary chord.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayIntersectionQuery {
    pub origin: Point,
    pub through: Point,
    pub bracket: (f64, f64),
}

impl RayIntersectionQuery {
    pub fn new(origin: Point, through: Point) -> Self {
        Self {
            origin,
            through,
            bracket: DEFAULT_BRACKET,
        }
    }

    pub fn at(&self, t: f64) -> Point {
        self.origin + (self.through - self.origin) * t
    }
}

impl BoundaryGeometry {
    pub fn ellipse(e: f64) -> Result<Self> {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "ellipse parameter e = {e} must be positive"
            )));
        }
        Ok(Self::Ellipse { e })
    }

    pub fn annulus(e: f64) -> Result<Self> {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::InvalidParam(format!(
                "annulus inner radius e = {e} must lie in (0, 1)"
            )));
        }
        Ok(Self::Annulus { e })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidParam(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        Ok(Self::Polygon { vertices })
    }

    pub fn unit_square() -> Self {
        Self::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        }
    }

    pub fn is_polygonal(&self) -> bool {
        matches!(self, Self::Polygon { .. })
    }

    /// Smooth curved pieces of the boundary; empty for polygons.
    pub fn pieces(&self) -> Vec<Curve> {
        match *self {
            Self::Ellipse { e } => vec![Curve::Ellipse { e }],
            Self::Annulus { e } => vec![
                Curve::Circle {
                    radius: 1.0,
                    hole: false,
                },
                Curve::Circle {
                    radius: e,
                    hole: true,
                },
            ],
            Self::Polygon { .. } => Vec::new(),
        }
    }

    /// The curved piece passing closest (in `|g|`) to all given points.
    pub fn piece_near(&self, points: &[Point]) -> Option<Curve> {
        self.pieces().into_iter().min_by(|a, b| {
            let da = points.iter().map(|p| a.value(p).abs()).fold(0.0, f64::max);
            let db = points.iter().map(|p| b.value(p).abs()).fold(0.0, f64::max);
            da.total_cmp(&db)
        })
    }

    /// Signed level-set value: negative inside, zero on the boundary.
    pub fn implicit(&self, p: &Point) -> f64 {
        match self {
            Self::Ellipse { e } => Curve::Ellipse { e: *e }.value(p),
            Self::Annulus { e } => {
                let r = p.coords.norm();
                (e - r).max(r - 1.0)
            }
            Self::Polygon { vertices } => polygon_signed_distance(vertices, p).0,
        }
    }

    pub fn gradient(&self, p: &Point) -> Vector2<f64> {
        match self {
            Self::Ellipse { e } => Curve::Ellipse { e: *e }.gradient(p),
            Self::Annulus { e } => {
                let r = p.coords.norm();
                let hole = e - r > r - 1.0;
                let radius = if hole { *e } else { 1.0 };
                Curve::Circle { radius, hole }.gradient(p)
            }
            Self::Polygon { vertices } => polygon_signed_distance(vertices, p).1,
        }
    }
}

pub fn classify_point(geom: &BoundaryGeometry, p: &Point, tol: f64) -> PointClass {
    let g = geom.implicit(p);
    if g.abs() <= tol {
        PointClass::OnBoundary
    } else if g < -tol {
        PointClass::Inside
    } else {
        PointClass::Outside
    }
}

/// Intersection of the ray `origin + t (through - origin)` with the boundary
/// piece closest to `through`.
pub fn ray_boundary_intersection(
    geom: &BoundaryGeometry,
    query: &RayIntersectionQuery,
    tol: f64,
) -> Result<Point> {
    match geom.piece_near(&[query.through]) {
        Some(curve) => ray_curve_intersection(&curve, query, tol),
        None => ray_level_set_intersection(|p| (geom.implicit(p), geom.gradient(p)), query, tol),
    }
}

pub fn ray_curve_intersection(
    curve: &Curve,
    query: &RayIntersectionQuery,
    tol: f64,
) -> Result<Point> {
    ray_level_set_intersection(|p| (curve.value(p), curve.gradient(p)), query, tol)
}

fn ray_level_set_intersection<F>(
    level_set: F,
    query: &RayIntersectionQuery,
    tol: f64,
) -> Result<Point>
where
    F: Fn(&Point) -> (f64, Vector2<f64>),
{
    let dir = query.through - query.origin;
    let t = safeguarded_newton(
        |t| {
            let (g, grad) = level_set(&query.at(t));
            (g, grad.dot(&dir))
        },
        query.bracket,
        1.0,
        tol,
        MAX_ROOT_ITERATIONS,
    )?;
    Ok(query.at(t))
}

/// Newton iteration on a scalar function with a bisection fallback whenever
/// the Newton step leaves the current sign-change bracket.
pub fn safeguarded_newton<F>(
    f: F,
    bracket: (f64, f64),
    start: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = bracket;
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::NoRootInBracket { lo, hi });
    }
    let lo_sign = f_lo.signum();
    let mut t = start.clamp(lo, hi);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let (value, slope) = f(t);
        residual = value.abs();
        if residual <= tol {
            return Ok(t);
        }
        if value.signum() == lo_sign {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - value / slope;
        t = if slope != 0.0 && newton.is_finite() && newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        tol,
        residual,
    })
}

/// Which side of the chord `ab` the boundary arc lies on, judged from the
/// level set at the chord midpoint.
pub fn edge_skin_side(geom: &BoundaryGeometry, a: &Point, b: &Point, tol: f64) -> Result<SkinSide> {
    let Some(curve) = geom.piece_near(&[*a, *b]) else {
        return Ok(SkinSide::Coincident);
    };
    let mid = Point::from((a.coords + b.coords) * 0.5);
    let g = curve.value(&mid);
    if g < -tol {
        Ok(SkinSide::CurveOutsideChord)
    } else if g > tol {
        Ok(SkinSide::CurveInsideChord)
    } else if (b - a).norm() <= tol {
        Ok(SkinSide::Coincident)
    } else {
        Err(Error::AmbiguousEdge {
            a: [a.x, a.y],
            b: [b.x, b.y],
        })
    }
}

/// Signed distance to a closed polygon and its gradient.
fn polygon_signed_distance(vertices: &[[f64; 2]], p: &Point) -> (f64, Vector2<f64>) {
    let n = vertices.len();
    let mut best = f64::INFINITY;
    let mut best_dir = Vector2::zeros();
    let mut inside = false;
    for i in 0..n {
        let a = Point::new(vertices[i][0], vertices[i][1]);
        let j = (i + 1) % n;
        let b = Point::new(vertices[j][0], vertices[j][1]);
        let ab = b - a;
        let s = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
        let foot = a + ab * s;
        let d = (p - foot).norm();
        if d < best {
            best = d;
            best_dir = if d > 0.0 {
                (p - foot) / d
            } else {
                Vector2::new(ab.y, -ab.x).normalize()
            };
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    if inside {
        (-best, -best_dir)
    } else {
        (best, best_dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-12;

    #[test]
    fn classify_examples() {
        let ell = BoundaryGeometry::ellipse(0.5).unwrap();
        assert_eq!(
            classify_point(&ell, &Point::new(0.0, 0.0), TOL),
            PointClass::Inside
        );
        assert_eq!(
            classify_point(&ell, &Point::new(0.5, 0.0), TOL),
            PointClass::OnBoundary
        );
        let ann = BoundaryGeometry::annulus(0.5).unwrap();
        assert_eq!(
            classify_point(&ann, &Point::new(0.4, 0.0), TOL),
            PointClass::Outside
        );
        assert_eq!(
            classify_point(&ann, &Point::new(0.75, 0.0), TOL),
            PointClass::Inside
        );
        assert_eq!(
            classify_point(&ann, &Point::new(1.2, 0.0), TOL),
            PointClass::Outside
        );
    }

    #[test]
    fn polygon_classification() {
        let sq = BoundaryGeometry::unit_square();
        assert_eq!(
            classify_point(&sq, &Point::new(0.5, 0.5), TOL),
            PointClass::Inside
        );
        assert_eq!(
            classify_point(&sq, &Point::new(1.0, 0.3), TOL),
            PointClass::OnBoundary
        );
        assert_eq!(
            classify_point(&sq, &Point::new(1.5, 0.3), TOL),
            PointClass::Outside
        );
        assert_abs_diff_eq!(sq.implicit(&Point::new(0.5, 0.25)), -0.25, epsilon = 1e-15);
    }

    #[test]
    fn ray_hits_outer_circle_radially() {
        let ann = BoundaryGeometry::annulus(0.5).unwrap();
        let q = RayIntersectionQuery::new(Point::new(0.0, 0.0), Point::new(0.6, 0.6));
        let p = ray_boundary_intersection(&ann, &q, TOL).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(p.x, s, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, s, epsilon = 1e-12);
    }

    #[test]
    fn ray_hits_ellipse_at_closed_form_root() {
        // (0.3t/0.5)^2 + (0.4t)^2 = 1  =>  t = 1/sqrt(0.52)
        let ell = BoundaryGeometry::ellipse(0.5).unwrap();
        let q = RayIntersectionQuery::new(Point::new(0.0, 0.0), Point::new(0.3, 0.4));
        let p = ray_boundary_intersection(&ell, &q, TOL).unwrap();
        let t = 1.0 / 0.52f64.sqrt();
        assert_abs_diff_eq!(p.x, 0.3 * t, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.4 * t, epsilon = 1e-12);
        assert_abs_diff_eq!(p.x, 0.4160251, epsilon = 1e-7);
        assert_abs_diff_eq!(p.y, 0.5547002, epsilon = 1e-7);
    }

    #[test]
    fn ray_from_off_center_origin() {
        let circle = Curve::Circle {
            radius: 1.0,
            hole: false,
        };
        let q = RayIntersectionQuery::new(Point::new(0.6, 0.0), Point::new(0.8, 0.6));
        let p = ray_curve_intersection(&circle, &q, TOL).unwrap();
        assert_abs_diff_eq!(p.x, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn ray_without_sign_change_is_rejected() {
        let ell = BoundaryGeometry::ellipse(0.5).unwrap();
        let q = RayIntersectionQuery {
            origin: Point::new(0.0, 0.0),
            through: Point::new(0.01, 0.01),
            bracket: (0.5, 2.0),
        };
        assert!(matches!(
            ray_boundary_intersection(&ell, &q, TOL),
            Err(Error::NoRootInBracket { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        // |g| can never drop below a tolerance of zero for this irrational root
        let r = safeguarded_newton(|t| (t * t - 2.0, 2.0 * t), (1.0, 2.0), 1.5, 0.0, 3);
        assert!(matches!(r, Err(Error::NoConvergence { iterations: 3, .. })));
    }

    #[test]
    fn skin_sides() {
        let ann = BoundaryGeometry::annulus(0.5).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let outer = edge_skin_side(&ann, &Point::new(1.0, 0.0), &Point::new(s, s), TOL).unwrap();
        assert_eq!(outer, SkinSide::CurveOutsideChord);
        let inner = edge_skin_side(
            &ann,
            &Point::new(0.5, 0.0),
            &Point::new(0.5 * s, 0.5 * s),
            TOL,
        )
        .unwrap();
        assert_eq!(inner, SkinSide::CurveInsideChord);
        let sq = BoundaryGeometry::unit_square();
        let flat = edge_skin_side(&sq, &Point::new(0.0, 0.0), &Point::new(1.0, 0.0), TOL).unwrap();
        assert_eq!(flat, SkinSide::Coincident);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BoundaryGeometry::ellipse(0.0).is_err());
        assert!(BoundaryGeometry::annulus(1.0).is_err());
        assert!(BoundaryGeometry::polygon(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn geometry_json_shape() {
        let g: BoundaryGeometry = serde_json::from_str(r#"{"kind":"ellipse","e":0.5}"#).unwrap();
        assert_eq!(g, BoundaryGeometry::Ellipse { e: 0.5 });
        let g: BoundaryGeometry = serde_json::from_str(r#"{"kind":"annulus","e":0.5}"#).unwrap();
        assert_eq!(g, BoundaryGeometry::Annulus { e: 0.5 });
    }
}
