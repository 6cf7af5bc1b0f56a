//! Closed triangle meshes: triangulation of sphere point clouds, point
//! containment by ray parity, and surface distances.

use std::collections::{HashMap, HashSet};

use crate::scalar::{add3, cross3, dot3, norm3, scale3, sub3, Real};

/// Ray directions for the containment vote; generic enough to miss edges
/// and vertices of typical meshes.
const RAY_DIRS: [[f64; 3]; 3] = [
    [0.312_847, 0.721_913, 0.617_231],
    [-0.823_119, 0.132_707, 0.552_301],
    [0.201_137, -0.911_729, -0.358_341],
];

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh<T = f64> {
    pub vertices: Vec<[T; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

fn orient<T: Real>(a: &[T; 3], b: &[T; 3], c: &[T; 3], p: &[T; 3]) -> T {
    dot3(&cross3(&sub3(b, a), &sub3(c, a)), &sub3(p, a))
}

/// Triangulates points on the unit sphere by their convex hull
/// (incremental construction). Returns outward-oriented triangles, or
/// `None` when the points are degenerate (fewer than 4, or coplanar).
pub fn sphere_triangulation<T: Real>(dirs: &[[T; 3]]) -> Option<Vec<[usize; 3]>> {
    let n = dirs.len();
    if n < 4 {
        return None;
    }
    let eps = T::tol(1e-12);
    // initial tetrahedron
    let i0 = 0;
    let i1 = (1..n).max_by(|&a, &b| {
        let da = norm3(&sub3(&dirs[a], &dirs[i0]));
        let db = norm3(&sub3(&dirs[b], &dirs[i0]));
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
    })?;
    let line = sub3(&dirs[i1], &dirs[i0]);
    let i2 = (1..n).filter(|&k| k != i1).max_by(|&a, &b| {
        let da = norm3(&cross3(&line, &sub3(&dirs[a], &dirs[i0])));
        let db = norm3(&cross3(&line, &sub3(&dirs[b], &dirs[i0])));
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
    })?;
    let i3 = (1..n).filter(|&k| k != i1 && k != i2).max_by(|&a, &b| {
        let da = orient(&dirs[i0], &dirs[i1], &dirs[i2], &dirs[a]).abs();
        let db = orient(&dirs[i0], &dirs[i1], &dirs[i2], &dirs[b]).abs();
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
    })?;
    if orient(&dirs[i0], &dirs[i1], &dirs[i2], &dirs[i3]).abs() <= eps {
        return None;
    }
    let mut faces: Vec<Option<[usize; 3]>> = Vec::new();
    let centroid = scale3(&add3(&add3(&dirs[i0], &dirs[i1]), &add3(&dirs[i2], &dirs[i3])), T::lit(0.25));
    for f in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let [a, b, c] = f;
        // outward: the centroid lies on the negative side
        if orient(&dirs[a], &dirs[b], &dirs[c], &centroid) > T::zero() {
            faces.push(Some([a, c, b]));
        } else {
            faces.push(Some(f));
        }
    }
    for p in 0..n {
        if [i0, i1, i2, i3].contains(&p) {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter_map(|(k, f)| {
                let [a, b, c] = (*f)?;
                (orient(&dirs[a], &dirs[b], &dirs[c], &dirs[p]) > eps).then_some(k)
            })
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges = HashSet::new();
        for &k in &visible {
            let [a, b, c] = faces[k].expect("live face");
            edges.insert((a, b));
            edges.insert((b, c));
            edges.insert((c, a));
        }
        for &k in &visible {
            faces[k] = None;
        }
        let mut horizon: Vec<(usize, usize)> = edges.iter().filter(|(a, b)| !edges.contains(&(*b, *a))).copied().collect();
        horizon.sort_unstable();
        for (a, b) in horizon {
            faces.push(Some([a, b, p]));
        }
    }
    Some(faces.into_iter().flatten().collect())
}

impl<T: Real> TriMesh<T> {
    pub fn new(vertices: Vec<[T; 3]>, triangles: Vec<[usize; 3]>) -> Self {
        Self { vertices, triangles }
    }

    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Every edge is shared by exactly two triangles.
    pub fn is_closed(&self) -> bool {
        !self.triangles.is_empty() && self.edge_counts().values().all(|&c| c == 2)
    }

    /// `V - E + F` over the vertices referenced by triangles.
    pub fn euler_characteristic(&self) -> i64 {
        let used: HashSet<usize> = self.triangles.iter().flatten().copied().collect();
        used.len() as i64 - self.edge_counts().len() as i64 + self.triangles.len() as i64
    }

    pub fn aabb(&self) -> ([T; 3], [T; 3]) {
        let mut lo = [T::infinity(); 3];
        let mut hi = [T::neg_infinity(); 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    fn tri(&self, k: usize) -> [&[T; 3]; 3] {
        let t = self.triangles[k];
        [&self.vertices[t[0]], &self.vertices[t[1]], &self.vertices[t[2]]]
    }

    /// Unsigned distance from `p` to the surface.
    pub fn distance(&self, p: &[T; 3]) -> T {
        (0..self.triangles.len()).fold(T::infinity(), |d, k| {
            let [a, b, c] = self.tri(k);
            d.min(norm3(&sub3(p, &closest_on_triangle(p, a, b, c))))
        })
    }

    /// Parity of crossings along `dir` (odd = inside).
    fn parity(&self, p: &[T; 3], dir: &[T; 3]) -> bool {
        let mut hits = 0usize;
        for k in 0..self.triangles.len() {
            let [a, b, c] = self.tri(k);
            if let Some(t) = ray_triangle(p, dir, a, b, c) {
                if t > T::zero() {
                    hits += 1;
                }
            }
        }
        hits % 2 == 1
    }

    /// Closed containment: points within `tol` of the surface are inside;
    /// otherwise ray parity, majority-voted over three directions.
    pub fn contains(&self, p: &[T; 3], tol: T) -> bool {
        let (lo, hi) = self.aabb();
        if (0..3).any(|k| p[k] < lo[k] - tol || p[k] > hi[k] + tol) {
            return false;
        }
        if self.distance(p) <= tol {
            return true;
        }
        let votes = RAY_DIRS.iter().filter(|d| self.parity(p, &d.map(T::lit))).count();
        votes >= 2
    }

    /// Whether the closed segment `[p, q]` meets any triangle.
    pub fn segment_hits(&self, p: &[T; 3], q: &[T; 3]) -> bool {
        let d = sub3(q, p);
        (0..self.triangles.len()).any(|k| {
            let [a, b, c] = self.tri(k);
            matches!(ray_triangle(p, &d, a, b, c), Some(t) if t >= T::zero() && t <= T::one())
        })
    }

    /// Undirected edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edge_counts().into_keys().collect();
        e.sort_unstable();
        e
    }
}

/// Möller–Trumbore: ray parameter of the hit, if any.
pub fn ray_triangle<T: Real>(o: &[T; 3], d: &[T; 3], a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> Option<T> {
    let e1 = sub3(b, a);
    let e2 = sub3(c, a);
    let p = cross3(d, &e2);
    let det = dot3(&e1, &p);
    let scale = norm3(&e1) * norm3(&e2) * norm3(d);
    if det.abs() <= T::epsilon() * scale {
        return None;
    }
    let inv = T::one() / det;
    let s = sub3(o, a);
    let u = dot3(&s, &p) * inv;
    if u < T::zero() || u > T::one() {
        return None;
    }
    let q = cross3(&s, &e1);
    let v = dot3(d, &q) * inv;
    if v < T::zero() || u + v > T::one() {
        return None;
    }
    Some(dot3(&e2, &q) * inv)
}

/// Closest point of triangle `abc` to `p`.
pub fn closest_on_triangle<T: Real>(p: &[T; 3], a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> [T; 3] {
    let ab = sub3(b, a);
    let ac = sub3(c, a);
    let ap = sub3(p, a);
    let d1 = dot3(&ab, &ap);
    let d2 = dot3(&ac, &ap);
    if d1 <= T::zero() && d2 <= T::zero() {
        return *a;
    }
    let bp = sub3(p, b);
    let d3 = dot3(&ab, &bp);
    let d4 = dot3(&ac, &bp);
    if d3 >= T::zero() && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= T::zero() && d1 >= T::zero() && d3 <= T::zero() {
        return add3(a, &scale3(&ab, d1 / (d1 - d3)));
    }
    let cp = sub3(p, c);
    let d5 = dot3(&ab, &cp);
    let d6 = dot3(&ac, &cp);
    if d6 >= T::zero() && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= T::zero() && d2 >= T::zero() && d6 <= T::zero() {
        return add3(a, &scale3(&ac, d2 / (d2 - d6)));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= T::zero() && (d4 - d3) >= T::zero() && (d5 - d6) >= T::zero() {
        let bc = sub3(c, b);
        return add3(b, &scale3(&bc, (d4 - d3) / ((d4 - d3) + (d5 - d6))));
    }
    let denom = T::one() / (va + vb + vc);
    add3(a, &add3(&scale3(&ab, vb * denom), &scale3(&ac, vc * denom)))
}
