//! Straight-edged triangulations fitted to the curved domain.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGeometry, Point};

/// Tolerance for mesh vertices that are supposed to lie on the curve.
pub const VERTEX_ON_CURVE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeTag {
    /// Dirichlet edge whose endpoints lie on the true boundary (`D` in mesh files).
    DirichletCurved,
    /// Symmetry (natural Neumann) edge (`S` in mesh files).
    SymmetryStraight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: EdgeTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementClass {
    Interior,
    /// Exactly one curved Dirichlet edge, given as a local edge index:
    /// edge `l` joins local vertices `l` and `(l + 1) % 3`.
    Boundary {
        edge: usize,
    },
}

#[derive(Clone, Debug)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub element_class: Vec<ElementClass>,
    pub h_per_element: Vec<f64>,
    pub rho_per_element: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshStats {
    pub h: f64,
    pub h_min: f64,
    pub gamma: f64,
    pub n_elements: usize,
    pub n_vertices: usize,
}

pub fn signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

fn diameter_and_inradius(a: &Point, b: &Point, c: &Point) -> (f64, f64) {
    let la = (b - c).norm();
    let lb = (c - a).norm();
    let lc = (a - b).norm();
    let area = signed_area(a, b, c).abs();
    (la.max(lb).max(lc), 2.0 * area / (la + lb + lc))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl TriMesh {
    /// Builds a mesh and checks indices, orientation and edge conformity.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::InvalidParam("mesh has no triangles".into()));
        }
        let mut h_per_element = Vec::with_capacity(triangles.len());
        let mut rho_per_element = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidParam(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            if signed_area(&a, &b, &c) <= 0.0 {
                return Err(Error::MeshAssumptionViolated {
                    triangle: t,
                    reason: "non-positive signed area".into(),
                });
            }
            let (h, rho) = diameter_and_inradius(&a, &b, &c);
            h_per_element.push(h);
            rho_per_element.push(rho);
        }
        let mesh = Self {
            element_class: vec![ElementClass::Interior; triangles.len()],
            vertices,
            triangles,
            boundary_edges,
            h_per_element,
            rho_per_element,
        };
        let edges = mesh.edge_map();
        for (key, owners) in &edges {
            if owners.len() > 2 {
                return Err(Error::MeshAssumptionViolated {
                    triangle: owners[0].0,
                    reason: format!("edge {key:?} shared by {} triangles", owners.len()),
                });
            }
        }
        for be in &mesh.boundary_edges {
            let [a, b] = be.vertices;
            match edges.get(&edge_key(a, b)) {
                Some(owners) if owners.len() == 1 => {}
                _ => {
                    return Err(Error::InvalidParam(format!(
                        "boundary edge ({a}, {b}) is not an edge of exactly one triangle"
                    )))
                }
            }
        }
        Ok(mesh)
    }

    pub fn n_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    /// Map from sorted vertex pair to `(triangle, local edge)` owners.
    pub fn edge_map(&self) -> HashMap<(usize, usize), Vec<(usize, usize)>> {
        let mut map: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for l in 0..3 {
                map.entry(edge_key(tri[l], tri[(l + 1) % 3]))
                    .or_default()
                    .push((t, l));
            }
        }
        map
    }

    pub fn boundary_elements(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.element_class
            .iter()
            .enumerate()
            .filter_map(|(t, c)| match c {
                ElementClass::Boundary { edge } => Some((t, *edge)),
                ElementClass::Interior => None,
            })
    }

    pub fn dirichlet_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for be in self
            .boundary_edges
            .iter()
            .filter(|e| e.tag == EdgeTag::DirichletCurved)
        {
            on[be.vertices[0]] = true;
            on[be.vertices[1]] = true;
        }
        on
    }

    /// Sorted vertex pairs of all Dirichlet edges.
    pub fn dirichlet_edge_keys(&self) -> std::collections::HashSet<(usize, usize)> {
        self.boundary_edges
            .iter()
            .filter(|e| e.tag == EdgeTag::DirichletCurved)
            .map(|e| edge_key(e.vertices[0], e.vertices[1]))
            .collect()
    }
}

/// Tags every triangle with a curved Dirichlet edge as a boundary element.
///
/// For polygonal geometries the mesh boundary is the true boundary and no
/// node ever moves, so every triangle stays `Interior`.
pub fn classify_elements(mut mesh: TriMesh, geom: &BoundaryGeometry) -> Result<TriMesh> {
    mesh.element_class = vec![ElementClass::Interior; mesh.n_elements()];
    if geom.is_polygonal() {
        return Ok(mesh);
    }
    for be in mesh
        .boundary_edges
        .iter()
        .filter(|e| e.tag == EdgeTag::DirichletCurved)
    {
        for &v in &be.vertices {
            let p = mesh.vertices[v];
            let g = geom.implicit(&p);
            if g.abs() > VERTEX_ON_CURVE_TOL {
                return Err(Error::InvalidParam(format!(
                    "vertex {v} at ({}, {}) of a curved edge is off the boundary (g = {g:e})",
                    p.x, p.y
                )));
            }
        }
    }
    let curved = mesh.dirichlet_edge_keys();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let on_curve: Vec<usize> = (0..3)
            .filter(|&l| curved.contains(&edge_key(tri[l], tri[(l + 1) % 3])))
            .collect();
        match on_curve.as_slice() {
            [] => {}
            [edge] => mesh.element_class[t] = ElementClass::Boundary { edge: *edge },
            _ => {
                return Err(Error::MeshAssumptionViolated {
                    triangle: t,
                    reason: format!("{} edges on the curved boundary", on_curve.len()),
                })
            }
        }
    }
    Ok(mesh)
}

pub fn mesh_stats(mesh: &TriMesh) -> MeshStats {
    let h = mesh.h_per_element.iter().copied().fold(0.0, f64::max);
    let h_min = mesh
        .h_per_element
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let gamma = mesh
        .h_per_element
        .iter()
        .zip(&mesh.rho_per_element)
        .map(|(h, rho)| h / rho)
        .fold(0.0, f64::max);
    MeshStats {
        h,
        h_min,
        gamma,
        n_elements: mesh.n_elements(),
        n_vertices: mesh.n_vertices(),
    }
}

/// Accumulates triangles of a structured parameter grid, fixing orientation.
struct GridBuilder {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl GridBuilder {
    fn push_triangle(&mut self, mut tri: [usize; 3]) {
        let [a, b, c] = tri.map(|v| self.vertices[v]);
        if signed_area(&a, &b, &c) < 0.0 {
            tri.swap(1, 2);
        }
        self.triangles.push(tri);
    }

    fn push_edge(&mut self, a: usize, b: usize, tag: EdgeTag) {
        self.boundary_edges.push(BoundaryEdge {
            vertices: [a, b],
            tag,
        });
    }

    /// Splits the parameter cell with lower-left corner `(i, j)` along the
    /// diagonal `(i, j) -> (i + 1, j + 1)`, dropping collapsed triangles.
    fn push_cell(&mut self, node: impl Fn(usize, usize) -> usize, i: usize, j: usize) {
        let (p00, p10, p11, p01) = (
            node(i, j),
            node(i + 1, j),
            node(i + 1, j + 1),
            node(i, j + 1),
        );
        if p00 != p10 {
            self.push_triangle([p00, p10, p11]);
        }
        if p01 != p11 {
            self.push_triangle([p00, p11, p01]);
        }
    }

    fn finish(self) -> Result<TriMesh> {
        TriMesh::new(self.vertices, self.triangles, self.boundary_edges)
    }
}

/// `(cos, sin)` of `span * i / n`, exact at both ends of the range.
fn polar_direction(i: usize, n: usize, span: f64) -> (f64, f64) {
    if i == 0 {
        (1.0, 0.0)
    } else if i == n && span == FRAC_PI_2 {
        (0.0, 1.0)
    } else {
        let theta = span * i as f64 / n as f64;
        (theta.cos(), theta.sin())
    }
}

/// Polar image of the uniform `J x J` grid of the unit square on the quarter
/// ellipse `(x/e)^2 + y^2 <= 1, x, y >= 0`. The `r = 0` row collapses to the origin.
pub fn gen_quarter_ellipse_mesh(j_div: usize, e: f64) -> Result<TriMesh> {
    if j_div < 1 {
        return Err(Error::InvalidParam("J must be at least 1".into()));
    }
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "ellipse parameter e = {e} must lie in (0, 1]"
        )));
    }
    let n = j_div;
    let mut b = GridBuilder {
        vertices: vec![Point::origin()],
        triangles: Vec::with_capacity(2 * n * n),
        boundary_edges: Vec::new(),
    };
    for j in 1..=n {
        let r = if j == n { 1.0 } else { j as f64 / n as f64 };
        for i in 0..=n {
            let (c, s) = polar_direction(i, n, FRAC_PI_2);
            b.vertices.push(Point::new(e * r * c, r * s));
        }
    }
    let node = |i: usize, j: usize| if j == 0 { 0 } else { 1 + (j - 1) * (n + 1) + i };
    for j in 0..n {
        for i in 0..n {
            b.push_cell(node, i, j);
        }
    }
    for i in 0..n {
        b.push_edge(node(i, n), node(i + 1, n), EdgeTag::DirichletCurved);
    }
    for j in 0..n {
        b.push_edge(node(0, j), node(0, j + 1), EdgeTag::SymmetryStraight);
        b.push_edge(node(n, j), node(n, j + 1), EdgeTag::SymmetryStraight);
    }
    b.finish()
}

/// Alternative quarter-ellipse mesh without an origin fan: grid point `(a, b)`
/// of the uniform `J x J` square grid lies on ring `m = max(a, b)` at radius
/// `m / J`, at an angle uniform along the L-shaped ring `(m, 0) -> (m, m) -> (0, m)`.
pub fn gen_quarter_ellipse_concentric_mesh(j_div: usize, e: f64) -> Result<TriMesh> {
    if j_div < 1 {
        return Err(Error::InvalidParam("J must be at least 1".into()));
    }
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "ellipse parameter e = {e} must lie in (0, 1]"
        )));
    }
    let n = j_div;
    let mut b = GridBuilder {
        vertices: Vec::with_capacity((n + 1) * (n + 1)),
        triangles: Vec::with_capacity(2 * n * n),
        boundary_edges: Vec::new(),
    };
    for bi in 0..=n {
        for a in 0..=n {
            let m = a.max(bi);
            if m == 0 {
                b.vertices.push(Point::origin());
                continue;
            }
            let r = if m == n { 1.0 } else { m as f64 / n as f64 };
            let along = if a == m { bi } else { 2 * m - a };
            let (c, s) = polar_direction(along, 2 * m, FRAC_PI_2);
            b.vertices.push(Point::new(e * r * c, r * s));
        }
    }
    let node = |a: usize, bi: usize| bi * (n + 1) + a;
    for bi in 0..n {
        for a in 0..n {
            b.push_cell(node, a, bi);
        }
    }
    for t in 0..n {
        b.push_edge(node(n, t), node(n, t + 1), EdgeTag::DirichletCurved);
        b.push_edge(node(t, n), node(t + 1, n), EdgeTag::DirichletCurved);
        b.push_edge(node(t, 0), node(t + 1, 0), EdgeTag::SymmetryStraight);
        b.push_edge(node(0, t), node(0, t + 1), EdgeTag::SymmetryStraight);
    }
    b.finish()
}

/// Quarter annulus `e < r < 1`, `0 < theta < pi/2`, as the polar image of an
/// `I x J` grid (I angular, J radial cells).
pub fn gen_quarter_annulus_mesh(i_div: usize, j_div: usize, e: f64) -> Result<TriMesh> {
    gen_annulus_sector_mesh(i_div, j_div, e, FRAC_PI_2)
}

pub fn gen_annulus_sector_mesh(i_div: usize, j_div: usize, e: f64, span: f64) -> Result<TriMesh> {
    if i_div < 1 || j_div < 1 {
        return Err(Error::InvalidParam("I and J must be at least 1".into()));
    }
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::InvalidParam(format!(
            "annulus inner radius e = {e} must lie in (0, 1)"
        )));
    }
    if !(span > 0.0 && span <= FRAC_PI_2) {
        return Err(Error::InvalidParam(format!(
            "angular span {span} must lie in (0, pi/2]"
        )));
    }
    let (ni, nj) = (i_div, j_div);
    let mut b = GridBuilder {
        vertices: Vec::with_capacity((ni + 1) * (nj + 1)),
        triangles: Vec::with_capacity(2 * ni * nj),
        boundary_edges: Vec::new(),
    };
    for j in 0..=nj {
        let r = if j == nj {
            1.0
        } else {
            e + (1.0 - e) * j as f64 / nj as f64
        };
        for i in 0..=ni {
            let (c, s) = polar_direction(i, ni, span);
            b.vertices.push(Point::new(r * c, r * s));
        }
    }
    let node = |i: usize, j: usize| j * (ni + 1) + i;
    for j in 0..nj {
        for i in 0..ni {
            b.push_cell(node, i, j);
        }
    }
    for i in 0..ni {
        b.push_edge(node(i, 0), node(i + 1, 0), EdgeTag::DirichletCurved);
        b.push_edge(node(i, nj), node(i + 1, nj), EdgeTag::DirichletCurved);
    }
    for j in 0..nj {
        b.push_edge(node(0, j), node(0, j + 1), EdgeTag::SymmetryStraight);
        b.push_edge(node(ni, j), node(ni, j + 1), EdgeTag::SymmetryStraight);
    }
    b.finish()
}

/// Uniform `n x n` grid of the unit square, each cell split along `x = y`,
/// with every boundary edge tagged Dirichlet.
pub fn gen_unit_square_mesh(n: usize) -> Result<TriMesh> {
    if n < 1 {
        return Err(Error::InvalidParam("n must be at least 1".into()));
    }
    let mut b = GridBuilder {
        vertices: Vec::with_capacity((n + 1) * (n + 1)),
        triangles: Vec::with_capacity(2 * n * n),
        boundary_edges: Vec::new(),
    };
    for j in 0..=n {
        for i in 0..=n {
            b.vertices
                .push(Point::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    let node = |i: usize, j: usize| j * (n + 1) + i;
    for j in 0..n {
        for i in 0..n {
            b.push_cell(node, i, j);
        }
    }
    for k in 0..n {
        b.push_edge(node(k, 0), node(k + 1, 0), EdgeTag::DirichletCurved);
        b.push_edge(node(n, k), node(n, k + 1), EdgeTag::DirichletCurved);
        b.push_edge(node(k + 1, n), node(k, n), EdgeTag::DirichletCurved);
        b.push_edge(node(0, k + 1), node(0, k), EdgeTag::DirichletCurved);
    }
    b.finish()
}

/// Text format: `nv nt nb`, then `x y` per vertex, `i1 i2 i3` per triangle
/// and `i1 i2 tag` per boundary edge with `tag` in `{D, S}`.
pub fn write_mesh_text(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.vertices.len(),
        mesh.triangles.len(),
        mesh.boundary_edges.len()
    );
    for p in &mesh.vertices {
        let _ = writeln!(out, "{:?} {:?}", p.x, p.y);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    for be in &mesh.boundary_edges {
        let tag = match be.tag {
            EdgeTag::DirichletCurved => 'D',
            EdgeTag::SymmetryStraight => 'S',
        };
        let _ = writeln!(out, "{} {} {}", be.vertices[0], be.vertices[1], tag);
    }
    out
}

pub fn read_mesh_text(text: &str) -> Result<TriMesh> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut next_fields = |what: &str| -> Result<Vec<&str>> {
        lines
            .next()
            .map(|l| l.split_whitespace().collect())
            .ok_or_else(|| {
                Error::Parse(format!("unexpected end of mesh file while reading {what}"))
            })
    };
    let header = next_fields("header")?;
    let counts: Vec<usize> = header
        .iter()
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad header field '{s}'")))
        })
        .collect::<Result<_>>()?;
    let [nv, nt, nb] = counts[..] else {
        return Err(Error::Parse("header must be `nv nt nb`".into()));
    };
    let parse_f = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad coordinate '{s}'")))
    };
    let parse_u = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad index '{s}'")))
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        match next_fields("vertex")?[..] {
            [x, y] => vertices.push(Point::new(parse_f(x)?, parse_f(y)?)),
            _ => return Err(Error::Parse("vertex line must be `x y`".into())),
        }
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        match next_fields("triangle")?[..] {
            [a, b, c] => triangles.push([parse_u(a)?, parse_u(b)?, parse_u(c)?]),
            _ => return Err(Error::Parse("triangle line must be `i1 i2 i3`".into())),
        }
    }
    let mut boundary_edges = Vec::with_capacity(nb);
    for _ in 0..nb {
        match next_fields("boundary edge")?[..] {
            [a, b, tag] => {
                let tag = match tag {
                    "D" => EdgeTag::DirichletCurved,
                    "S" => EdgeTag::SymmetryStraight,
                    other => return Err(Error::Parse(format!("unknown edge tag '{other}'"))),
                };
                boundary_edges.push(BoundaryEdge {
                    vertices: [parse_u(a)?, parse_u(b)?],
                    tag,
                });
            }
            _ => {
                return Err(Error::Parse(
                    "boundary edge line must be `i1 i2 tag`".into(),
                ))
            }
        }
    }
    TriMesh::new(vertices, triangles, boundary_edges)
}
