//! Incremental 3D convex hull (quickhull) with tolerance-based visibility.
//!
//! Adjacency is tracked through a directed-edge map: every face owns its three
//! counter-clockwise edges, so the neighbour across `a -> b` is the owner of
//! `b -> a`. Points within the distance tolerance of a face count as inside.

use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq)]
pub struct HullFace {
    /// Vertex indices into the input slice, counter-clockwise seen from outside.
    pub vertices: [usize; 3],
    /// Outward unit normal.
    pub normal: [f64; 3],
    /// Plane offset: `normal . x = offset` on the face.
    pub offset: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullError {
    TooFewPoints,
    /// All points lie on a line.
    Collinear,
    /// All points lie on a plane; carries three non-collinear point indices.
    Coplanar([usize; 3]),
}

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

struct Face {
    v: [usize; 3],
    n: P3,
    d: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn dist(&self, p: P3) -> f64 {
        dot(self.n, p) - self.d
    }
}

struct Builder<'a> {
    pts: &'a [P3],
    eps: f64,
    faces: Vec<Face>,
    edges: HashMap<(usize, usize), usize>,
}

impl<'a> Builder<'a> {
    fn plane(&self, v: [usize; 3]) -> (P3, f64) {
        let (a, b, c) = (self.pts[v[0]], self.pts[v[1]], self.pts[v[2]]);
        let n = cross(sub(b, a), sub(c, a));
        let len = norm(n);
        let n = if len > 0.0 { [n[0] / len, n[1] / len, n[2] / len] } else { [0.0; 3] };
        // Offset averaged over the three vertices to spread rounding.
        let d = (dot(n, a) + dot(n, b) + dot(n, c)) / 3.0;
        (n, d)
    }

    fn add_face(&mut self, v: [usize; 3]) -> usize {
        let (n, d) = self.plane(v);
        let id = self.faces.len();
        self.faces.push(Face { v, n, d, outside: Vec::new(), alive: true });
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        id
    }

    fn remove_face(&mut self, id: usize) {
        let v = self.faces[id].v;
        self.faces[id].alive = false;
        for k in 0..3 {
            if self.edges.get(&(v[k], v[(k + 1) % 3])) == Some(&id) {
                self.edges.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
    }

    fn assign(&mut self, candidates: &[usize], points: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut touched = Vec::new();
        for p in points {
            let q = self.pts[p];
            let mut best = (usize::MAX, self.eps);
            for &f in candidates {
                let dd = self.faces[f].dist(q);
                if dd > best.1 {
                    best = (f, dd);
                }
            }
            if best.0 != usize::MAX {
                if self.faces[best.0].outside.is_empty() {
                    touched.push(best.0);
                }
                self.faces[best.0].outside.push(p);
            }
        }
        touched
    }
}

fn initial_simplex(pts: &[P3], eps: f64) -> Result<[usize; 4], HullError> {
    // Extreme points along the axes seed the first edge.
    let mut ext = [0usize; 6];
    for (i, p) in pts.iter().enumerate() {
        for k in 0..3 {
            if p[k] < pts[ext[2 * k]][k] {
                ext[2 * k] = i;
            }
            if p[k] > pts[ext[2 * k + 1]][k] {
                ext[2 * k + 1] = i;
            }
        }
    }
    let mut best = (0, 0, -1.0);
    for &i in &ext {
        for &j in &ext {
            let d = norm(sub(pts[i], pts[j]));
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let (p0, p1) = (best.0, best.1);
    if best.2 <= eps {
        return Err(HullError::Collinear);
    }
    let dir = sub(pts[p1], pts[p0]);
    let (mut p2, mut dmax) = (usize::MAX, eps);
    for (i, p) in pts.iter().enumerate() {
        let d = norm(cross(dir, sub(*p, pts[p0]))) / norm(dir);
        if d > dmax {
            dmax = d;
            p2 = i;
        }
    }
    if p2 == usize::MAX {
        return Err(HullError::Collinear);
    }
    let n = cross(dir, sub(pts[p2], pts[p0]));
    let nl = norm(n);
    let (mut p3, mut dmax) = (usize::MAX, eps);
    for (i, p) in pts.iter().enumerate() {
        let d = (dot(n, sub(*p, pts[p0])) / nl).abs();
        if d > dmax {
            dmax = d;
            p3 = i;
        }
    }
    if p3 == usize::MAX {
        return Err(HullError::Coplanar([p0, p1, p2]));
    }
    Ok([p0, p1, p2, p3])
}

/// Distance tolerance used for a point set: scaled by its coordinate magnitude.
pub fn hull_tolerance(pts: &[P3]) -> f64 {
    let m = pts.iter().flat_map(|p| p.iter()).fold(0.0f64, |a, &x| a.max(x.abs()));
    1e-12 * (1.0 + m)
}

/// Convex hull of `pts` as outward-oriented triangles.
pub fn convex_hull(pts: &[P3]) -> Result<Vec<HullFace>, HullError> {
    if pts.len() < 4 {
        return Err(HullError::TooFewPoints);
    }
    let eps = hull_tolerance(pts);
    let simplex = initial_simplex(pts, eps)?;
    let mut b = Builder { pts, eps, faces: Vec::new(), edges: HashMap::new() };

    let centroid = {
        let mut c = [0.0; 3];
        for &i in &simplex {
            for k in 0..3 {
                c[k] += pts[i][k] / 4.0;
            }
        }
        c
    };
    let [p0, p1, p2, p3] = simplex;
    let mut initial = Vec::with_capacity(4);
    for tri in [[p0, p1, p2], [p0, p1, p3], [p0, p2, p3], [p1, p2, p3]] {
        let (n, d) = b.plane(tri);
        let v = if dot(n, centroid) - d > 0.0 { [tri[0], tri[2], tri[1]] } else { tri };
        initial.push(b.add_face(v));
    }
    let rest = (0..pts.len()).filter(|i| !simplex.contains(i));
    let mut stack = b.assign(&initial, rest);

    let mut stamp = vec![0usize; 0];
    let mut round = 0usize;
    while let Some(fid) = stack.pop() {
        if !b.faces[fid].alive || b.faces[fid].outside.is_empty() {
            continue;
        }
        round += 1;
        let eye = {
            let f = &b.faces[fid];
            *f.outside
                .iter()
                .max_by(|&&x, &&y| f.dist(pts[x]).total_cmp(&f.dist(pts[y])))
                .expect("non-empty outside set")
        };
        let eye_p = pts[eye];
        if stamp.len() < b.faces.len() {
            stamp.resize(b.faces.len(), 0);
        }

        // Flood the visible region from `fid`, collecting horizon edges.
        let mut visible = vec![fid];
        stamp[fid] = round;
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut q = 0;
        while q < visible.len() {
            let f = visible[q];
            q += 1;
            let v = b.faces[f].v;
            for k in 0..3 {
                let (a, c) = (v[k], v[(k + 1) % 3]);
                let nb = *b.edges.get(&(c, a)).expect("hull is closed");
                if stamp[nb] == round {
                    continue;
                }
                if b.faces[nb].dist(eye_p) > eps {
                    stamp[nb] = round;
                    visible.push(nb);
                } else {
                    horizon.push((a, c));
                }
            }
        }
        let mut orphans = Vec::new();
        for &f in &visible {
            orphans.extend(b.faces[f].outside.drain(..).filter(|&p| p != eye));
            b.remove_face(f);
        }
        let new_faces: Vec<usize> = horizon.iter().map(|&(a, c)| b.add_face([a, c, eye])).collect();
        stamp.resize(b.faces.len(), 0);
        let touched = b.assign(&new_faces, orphans.into_iter());
        stack.extend(touched);
    }

    Ok(b
        .faces
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| HullFace { vertices: f.v, normal: f.n, offset: f.d })
        .collect())
}
