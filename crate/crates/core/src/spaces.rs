//! Lagrange node layouts and the trial/test spaces.
//!
//! The test space is the standard continuous degree-`k` Lagrange space that
//! vanishes on the mesh boundary. The trial space differs only on boundary
//! elements: the `k - 1` nodes inside the curved chord are moved onto the
//! true boundary along rays from the opposite vertex, and the element's
//! nodal basis is rebuilt for the moved node set as `K̃⁻¹` applied to the
//! standard basis, where `K̃_ij = φ_j(M̃_i)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{
    ray_curve_intersection, BoundaryGeometry, Point, RayIntersectionQuery, BOUNDARY_TOL,
};
use crate::mesh::{ElementClass, TriMesh};

/// Two nodes closer than this are the same point.
pub const NODE_MERGE_TOL: f64 = 1e-10;

/// Largest accepted 1-norm condition estimate of a local `K̃`.
pub const MAX_LOCAL_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceSpec {
    pub k: usize,
    pub n_k: usize,
    pub m_k: usize,
}

impl SpaceSpec {
    pub fn new(k: usize) -> Result<Self> {
        if !(2..=3).contains(&k) {
            return Err(Error::UnsupportedDegree(k));
        }
        Ok(Self {
            k,
            n_k: (k + 2) * (k + 1) / 2,
            m_k: (k + 1) * k / 2,
        })
    }
}

/// Barycentric multi-indices of the principal lattice: vertices, then the
/// `k - 1` nodes of each edge `l -> l + 1` starting next to vertex `l`,
/// then interior nodes.
pub fn lattice(k: usize) -> Vec<[usize; 3]> {
    let mut out = vec![[k, 0, 0], [0, k, 0], [0, 0, k]];
    for l in 0..3 {
        for m in 1..k {
            let mut alpha = [0; 3];
            alpha[l] = k - m;
            alpha[(l + 1) % 3] = m;
            out.push(alpha);
        }
    }
    for a in 1..k {
        for b in 1..k - a {
            out.push([k - a - b, a, b]);
        }
    }
    out
}

/// Local index of the `m`-th node (counted from vertex `edge`) on local edge `edge`.
pub fn edge_node_index(k: usize, edge: usize, m: usize) -> usize {
    3 + edge * (k - 1) + (m - 1)
}

/// Affine data of a straight triangle.
#[derive(Clone, Debug)]
pub struct ElementGeometry {
    pub vertices: [Point; 3],
    pub area: f64,
    pub grad_lambda: [Vector2<f64>; 3],
}

impl ElementGeometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [a, b, c] = vertices;
        let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        // gradient of l_i is the inward normal of the opposite edge over 2|T|
        let g = |p: &Point, q: &Point| Vector2::new(p.y - q.y, q.x - p.x) / det;
        Self {
            vertices,
            area: 0.5 * det.abs(),
            grad_lambda: [g(&b, &c), g(&c, &a), g(&a, &b)],
        }
    }

    pub fn barycentric(&self, p: &Point) -> [f64; 3] {
        let l1 = self.grad_lambda[1].dot(&(p - self.vertices[0]));
        let l2 = self.grad_lambda[2].dot(&(p - self.vertices[0]));
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn point(&self, lambda: &[f64; 3]) -> Point {
        let [a, b, c] = self.vertices;
        Point::from(a.coords * lambda[0] + b.coords * lambda[1] + c.coords * lambda[2])
    }
}

/// Standard nodal basis of degree `k` on any straight triangle, in
/// barycentric form; valid (as a polynomial) outside the triangle too.
#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    pub k: usize,
    alphas: Vec<[usize; 3]>,
}

impl LagrangeBasis {
    pub fn new(k: usize) -> Result<Self> {
        SpaceSpec::new(k)?;
        Ok(Self {
            k,
            alphas: lattice(k),
        })
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `prod_{m < alpha} (k l - m) / (m + 1)` and its derivative in `l`.
    fn factor(&self, l: f64, alpha: usize) -> (f64, f64) {
        let k = self.k as f64;
        let mut value = 1.0;
        let mut deriv = 0.0;
        for m in 0..alpha {
            let s = (k * l - m as f64) / (m + 1) as f64;
            let ds = k / (m + 1) as f64;
            deriv = deriv * s + value * ds;
            value *= s;
        }
        (value, deriv)
    }

    pub fn values(&self, lambda: &[f64; 3]) -> Vec<f64> {
        self.alphas
            .iter()
            .map(|a| (0..3).map(|i| self.factor(lambda[i], a[i]).0).product())
            .collect()
    }

    pub fn gradients(&self, lambda: &[f64; 3], geo: &ElementGeometry) -> Vec<Vector2<f64>> {
        self.alphas
            .iter()
            .map(|a| {
                let f: [(f64, f64); 3] = std::array::from_fn(|i| self.factor(lambda[i], a[i]));
                geo.grad_lambda[0] * (f[0].1 * f[1].0 * f[2].0)
                    + geo.grad_lambda[1] * (f[0].0 * f[1].1 * f[2].0)
                    + geo.grad_lambda[2] * (f[0].0 * f[1].0 * f[2].1)
            })
            .collect()
    }

    pub fn nodes(&self, geo: &ElementGeometry) -> Vec<Point> {
        let k = self.k as f64;
        self.alphas
            .iter()
            .map(|a| geo.point(&a.map(|ai| ai as f64 / k)))
            .collect()
    }
}

pub fn lagrange_layout(k: usize, tri: &[Point; 3]) -> Result<Vec<Point>> {
    let basis = LagrangeBasis::new(k)?;
    let geo = ElementGeometry::new(*tri);
    if geo.area <= 0.0 {
        return Err(Error::InvalidParam("degenerate triangle".into()));
    }
    Ok(basis.nodes(&geo))
}

/// Moves the `k - 1` inner nodes of the curved edge onto the boundary along
/// rays from the opposite vertex; every other node keeps its position.
pub fn shift_boundary_nodes(
    tri: &[Point; 3],
    edge: usize,
    geom: &BoundaryGeometry,
    k: usize,
) -> Result<Vec<Point>> {
    let mut nodes = lagrange_layout(k, tri)?;
    let (a, b) = (tri[edge], tri[(edge + 1) % 3]);
    let Some(curve) = geom.piece_near(&[a, b]) else {
        return Ok(nodes);
    };
    let apex = tri[(edge + 2) % 3];
    for m in 1..k {
        let i = edge_node_index(k, edge, m);
        let query = RayIntersectionQuery::new(apex, nodes[i]);
        nodes[i] = ray_curve_intersection(&curve, &query, BOUNDARY_TOL)?;
    }
    Ok(nodes)
}

/// Nodal basis of one element: `coeffs` maps nodal values at `nodes` to
/// coefficients in the standard Lagrange basis of the straight triangle.
#[derive(Clone, Debug)]
pub struct LocalBasis {
    pub element_id: usize,
    pub nodes: Vec<Point>,
    pub coeffs: DMatrix<f64>,
    pub kt_deviation: f64,
}

impl LocalBasis {
    pub fn identity(element_id: usize, nodes: Vec<Point>) -> Self {
        let n = nodes.len();
        Self {
            element_id,
            nodes,
            coeffs: DMatrix::identity(n, n),
            kt_deviation: 0.0,
        }
    }

    /// Coefficients in the standard basis for the given nodal values.
    pub fn standard_coefficients(&self, nodal: &[f64]) -> DVector<f64> {
        &self.coeffs * DVector::from_column_slice(nodal)
    }
}

pub fn build_local_basis(
    element_id: usize,
    tri: &[Point; 3],
    nodes: Vec<Point>,
    k: usize,
) -> Result<LocalBasis> {
    let basis = LagrangeBasis::new(k)?;
    let geo = ElementGeometry::new(*tri);
    let n = basis.len();
    if nodes.len() != n {
        return Err(Error::InconsistentDof {
            element: element_id,
            expected: n,
            found: nodes.len(),
        });
    }
    let kt = DMatrix::from_fn(n, n, |i, j| basis.values(&geo.barycentric(&nodes[i]))[j]);
    let kt_deviation = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (kt[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let singular = |condition| Error::SingularLocalSystem {
        element: element_id,
        condition,
    };
    let coeffs = kt
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| singular(f64::INFINITY))?;
    let condition = one_norm(&kt) * one_norm(&coeffs);
    if !condition.is_finite() || condition > MAX_LOCAL_CONDITION {
        return Err(singular(condition));
    }
    Ok(LocalBasis {
        element_id,
        nodes,
        coeffs,
        kt_deviation,
    })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Local bases of every element; identity on interior elements.
pub fn build_local_bases(
    mesh: &TriMesh,
    geom: &BoundaryGeometry,
    k: usize,
) -> Result<Vec<LocalBasis>> {
    (0..mesh.n_elements())
        .map(|t| {
            let tri = mesh.triangle_points(t);
            match mesh.element_class[t] {
                ElementClass::Interior => Ok(LocalBasis::identity(t, lagrange_layout(k, &tri)?)),
                ElementClass::Boundary { edge } => {
                    let nodes = shift_boundary_nodes(&tri, edge, geom, k)?;
                    build_local_basis(t, &tri, nodes, k)
                }
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeStatus {
    Unknown,
    Dirichlet(f64),
}

#[derive(Clone, Debug)]
pub struct DofMap {
    pub k: usize,
    pub node_coords: Vec<Point>,
    pub node_status: Vec<NodeStatus>,
    pub element_to_global: Vec<Vec<usize>>,
    pub n_unknowns: usize,
    /// Unknown number of each global node.
    pub unknown_index: Vec<Option<usize>>,
    /// Global node of each unknown.
    pub unknown_nodes: Vec<usize>,
}

impl DofMap {
    pub fn n_nodes(&self) -> usize {
        self.node_coords.len()
    }

    pub fn n_dirichlet(&self) -> usize {
        self.n_nodes() - self.n_unknowns
    }

    /// Full nodal vector from values at the unknowns plus Dirichlet data.
    pub fn expand(&self, unknowns: &[f64]) -> Vec<f64> {
        self.node_status
            .iter()
            .zip(&self.unknown_index)
            .map(|(status, idx)| match (status, idx) {
                (NodeStatus::Dirichlet(d), _) => *d,
                (NodeStatus::Unknown, Some(i)) => unknowns[*i],
                (NodeStatus::Unknown, None) => unreachable!("unknown node without index"),
            })
            .collect()
    }

    pub fn local_values(&self, element: usize, nodal: &[f64]) -> Vec<f64> {
        self.element_to_global[element]
            .iter()
            .map(|&g| nodal[g])
            .collect()
    }
}

/// Global node numbering shared by the trial and test spaces.
///
/// Nodes are numbered topologically (vertex, edge and cell nodes) so that
/// neighbouring elements share the nodes of their common edge. Every node of
/// a Dirichlet edge is constrained to `dirichlet` at its position; on curved
/// edges that position is the shifted boundary node.
pub fn build_dof_map<D>(
    mesh: &TriMesh,
    geom: &BoundaryGeometry,
    k: usize,
    dirichlet: D,
) -> Result<DofMap>
where
    D: Fn(&Point) -> f64,
{
    let spec = SpaceSpec::new(k)?;
    let dirichlet_edges = mesh.dirichlet_edge_keys();
    let on_dirichlet_vertex = mesh.dirichlet_vertices();

    let mut node_coords: Vec<Point> = mesh.vertices.clone();
    let mut constrained: Vec<bool> = on_dirichlet_vertex;
    let mut edge_nodes: HashMap<(usize, usize), usize> = HashMap::new();
    let mut element_to_global = Vec::with_capacity(mesh.n_elements());

    for t in 0..mesh.n_elements() {
        let tri = mesh.triangles[t];
        let shifted = match mesh.element_class[t] {
            ElementClass::Boundary { edge } => Some((
                edge,
                shift_boundary_nodes(&mesh.triangle_points(t), edge, geom, k)?,
            )),
            ElementClass::Interior => None,
        };
        let mut local = Vec::with_capacity(spec.n_k);
        local.extend_from_slice(&tri);
        for l in 0..3 {
            let (a, b) = (tri[l], tri[(l + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let first = *edge_nodes.entry(key).or_insert_with(|| {
                let first = node_coords.len();
                let (pa, pb) = (mesh.vertices[key.0], mesh.vertices[key.1]);
                for m in 1..k {
                    let s = m as f64 / k as f64;
                    node_coords.push(pa + (pb - pa) * s);
                    constrained.push(dirichlet_edges.contains(&key));
                }
                first
            });
            for m in 1..k {
                let canonical = if a < b { m } else { k - m };
                let g = first + canonical - 1;
                if let Some((edge, nodes)) = &shifted {
                    if *edge == l {
                        node_coords[g] = nodes[edge_node_index(k, l, m)];
                    }
                }
                local.push(g);
            }
        }
        let geo = ElementGeometry::new(mesh.triangle_points(t));
        for alpha in lattice(k).into_iter().skip(3 + 3 * (k - 1)) {
            local.push(node_coords.len());
            node_coords.push(geo.point(&alpha.map(|a| a as f64 / k as f64)));
            constrained.push(false);
        }
        if local.len() != spec.n_k {
            return Err(Error::InconsistentDof {
                element: t,
                expected: spec.n_k,
                found: local.len(),
            });
        }
        element_to_global.push(local);
    }

    check_collisions(&node_coords)?;

    let mut unknown_index = vec![None; node_coords.len()];
    let mut unknown_nodes = Vec::new();
    let node_status = node_coords
        .iter()
        .zip(&constrained)
        .enumerate()
        .map(|(g, (p, &c))| {
            if c {
                NodeStatus::Dirichlet(dirichlet(p))
            } else {
                unknown_index[g] = Some(unknown_nodes.len());
                unknown_nodes.push(g);
                NodeStatus::Unknown
            }
        })
        .collect();

    Ok(DofMap {
        k,
        n_unknowns: unknown_nodes.len(),
        node_coords,
        node_status,
        element_to_global,
        unknown_index,
        unknown_nodes,
    })
}

fn check_collisions(points: &[Point]) -> Result<()> {
    let cell = |v: f64| (v / NODE_MERGE_TOL).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = (cell(p.x), cell(p.y));
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(others) = grid.get(&(cx + dx, cy + dy)) {
                    if let Some(&j) = others
                        .iter()
                        .find(|&&j| (points[j] - p).norm() <= NODE_MERGE_TOL)
                    {
                        return Err(Error::DuplicateNodeCollision {
                            first: j,
                            second: i,
                            x: p.x,
                            y: p.y,
                        });
                    }
                }
            }
        }
        grid.entry((cx, cy)).or_default().push(i);
    }
    Ok(())
}

/// Value and gradient of a trial-space function at `p`, using the polynomial
/// of element `element` (also valid in its skin outside the triangle).
pub fn eval_uh(
    mesh: &TriMesh,
    dofmap: &DofMap,
    local_bases: &[LocalBasis],
    nodal: &[f64],
    element: usize,
    p: &Point,
) -> (f64, Vector2<f64>) {
    let basis = LagrangeBasis::new(dofmap.k).expect("degree validated by the dof map");
    let geo = ElementGeometry::new(mesh.triangle_points(element));
    let coeffs = local_bases[element].standard_coefficients(&dofmap.local_values(element, nodal));
    let lambda = geo.barycentric(p);
    let value = basis
        .values(&lambda)
        .iter()
        .zip(coeffs.iter())
        .map(|(v, c)| v * c)
        .sum();
    let grad = basis
        .gradients(&lambda, &geo)
        .iter()
        .zip(coeffs.iter())
        .fold(Vector2::zeros(), |acc, (g, c)| acc + g * *c);
    (value, grad)
}
