//! Problem data: source, Dirichlet datum and manufactured solutions.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify_point, BoundaryGeometry, Point, PointClass, BOUNDARY_TOL};

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> Vector2<f64> + Send + Sync>;

/// How the source is evaluated at quadrature points outside the true domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    /// Use the closed-form source everywhere.
    #[default]
    Analytic,
    /// Treat the source as zero outside the domain.
    ZeroOutside,
}

#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub grad: VectorFn,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution")
    }
}

/// Poisson problem `-Δu = f` in the domain, `u = d` on its Dirichlet boundary.
#[derive(Clone)]
pub struct ProblemSpec {
    pub geom: BoundaryGeometry,
    pub f: ScalarFn,
    pub d: ScalarFn,
    pub exact: Option<ExactSolution>,
    pub extension_mode: ExtensionMode,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("geom", &self.geom)
            .field("has_exact", &self.exact.is_some())
            .field("extension_mode", &self.extension_mode)
            .finish()
    }
}

impl ProblemSpec {
    /// Problem with homogeneous Dirichlet data and no known solution.
    pub fn new(geom: BoundaryGeometry, f: ScalarFn) -> Self {
        Self {
            geom,
            f,
            d: Arc::new(|_| 0.0),
            exact: None,
            extension_mode: ExtensionMode::Analytic,
        }
    }

    pub fn with_extension(mut self, mode: ExtensionMode) -> Self {
        self.extension_mode = mode;
        self
    }

    /// Source value under the configured extension mode.
    pub fn source(&self, p: &Point) -> f64 {
        if self.extension_mode == ExtensionMode::ZeroOutside
            && classify_point(&self.geom, p, BOUNDARY_TOL) == PointClass::Outside
        {
            return 0.0;
        }
        (self.f)(p)
    }

    pub fn exact(&self) -> Result<&ExactSolution> {
        self.exact.as_ref().ok_or(Error::MissingExact)
    }
}

/// `u = (e² - e²x² - y²)(e² - x² - e²y²)` on the quarter ellipse `(x/e)² + y² < 1`.
pub fn ellipse_test1(e: f64) -> Result<ProblemSpec> {
    let geom = BoundaryGeometry::ellipse(e)?;
    let e2 = e * e;
    let a = move |p: &Point| e2 - e2 * p.x * p.x - p.y * p.y;
    let b = move |p: &Point| e2 - p.x * p.x - e2 * p.y * p.y;
    let u = move |p: &Point| a(p) * b(p);
    let grad = move |p: &Point| {
        let (ax, ay) = (-2.0 * e2 * p.x, -2.0 * p.y);
        let (bx, by) = (-2.0 * p.x, -2.0 * e2 * p.y);
        Vector2::new(ax * b(p) + a(p) * bx, ay * b(p) + a(p) * by)
    };
    let f = move |p: &Point| 2.0 * (1.0 + e2) * (a(p) + b(p)) - 8.0 * e2 * (p.x * p.x + p.y * p.y);
    Ok(ProblemSpec {
        f: Arc::new(f),
        exact: Some(ExactSolution {
            u: Arc::new(u),
            grad: Arc::new(grad),
        }),
        ..ProblemSpec::new(geom, Arc::new(|_| 0.0))
    })
}

/// `u = (r - e)(1 - r)` on the quarter annulus `e < r < 1`.
pub fn annulus_test2(e: f64) -> Result<ProblemSpec> {
    let geom = BoundaryGeometry::annulus(e)?;
    let r = |p: &Point| p.coords.norm();
    let u = move |p: &Point| (r(p) - e) * (1.0 - r(p));
    let grad = move |p: &Point| {
        let rr = r(p);
        p.coords * ((1.0 + e - 2.0 * rr) / rr)
    };
    let f = move |p: &Point| 4.0 - (1.0 + e) / r(p);
    Ok(ProblemSpec {
        f: Arc::new(f),
        exact: Some(ExactSolution {
            u: Arc::new(u),
            grad: Arc::new(grad),
        }),
        ..ProblemSpec::new(geom, Arc::new(|_| 0.0))
    })
}

/// Full degree-`k` polynomial on the unit square with matching Dirichlet data.
pub fn polygon_patch(k: usize) -> Result<ProblemSpec> {
    let cubic = match k {
        2 => 0.0,
        3 => 1.0,
        _ => return Err(Error::UnsupportedDegree(k)),
    };
    let u = move |p: &Point| {
        let (x, y) = (p.x, p.y);
        1.0 + x - 2.0 * y + x * x + x * y - 2.0 * y * y + cubic * (x * x * x + x * y * y)
    };
    let grad = move |p: &Point| {
        let (x, y) = (p.x, p.y);
        Vector2::new(
            1.0 + 2.0 * x + y + cubic * (3.0 * x * x + y * y),
            -2.0 + x - 4.0 * y + cubic * 2.0 * x * y,
        )
    };
    let f = move |p: &Point| 2.0 - cubic * 8.0 * p.x;
    Ok(ProblemSpec {
        geom: BoundaryGeometry::unit_square(),
        f: Arc::new(f),
        d: Arc::new(u),
        exact: Some(ExactSolution {
            u: Arc::new(u),
            grad: Arc::new(grad),
        }),
        extension_mode: ExtensionMode::Analytic,
    })
}
