//! Triangulations of closed oriented 3-manifolds and the state-sum
//! invariant: a sum over admissible edge colorings of dimension weights and
//! per-tetrahedron associator coefficients, contracted over triangle
//! multiplicity indices.
//!
//! Triangulations are face-glued complexes whose tetrahedra carry local
//! vertex orders, with every gluing monotone on local slots. That makes
//! every edge class consistently directed and lets the evaluator assign
//! each tetrahedron a plain associator block (or its inverse on negatively
//! oriented tetrahedra) with no dual-label bookkeeping.

use crate::groups::GroupTable;
use crate::scalar::Scalar;
use crate::skeletal::SkeletalData;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TriError {
    #[error("input error: {0}")]
    Input(String),
    #[error("move not applicable: {0}")]
    MoveNotApplicable(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

/// Face `f1` of tetrahedron `t1` glued to face `f2` of `t2`, identifying
/// slots in ascending order on both sides.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct Gluing {
    pub t1: usize,
    pub f1: usize,
    pub t2: usize,
    pub f2: usize,
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    /// declared number of vertices after identification
    pub n_vertices: usize,
    /// vertex labels per slot, defining the local order
    pub tets: Vec<[usize; 4]>,
    pub gluings: Vec<Gluing>,
    /// coherent orientation sign per tetrahedron
    pub signs: Vec<i8>,
    /// optional fundamental-group tag for the enumeration oracle
    pub pi1: Option<String>,
    // derived tables
    pub vertex_class: Vec<usize>,
    pub edge_class: Vec<usize>,
    pub n_edges: usize,
    /// per triangle class: the two (tet, face) incidences
    pub triangles: Vec<[(usize, usize); 2]>,
    /// triangle class per (tet, face)
    pub tri_of_face: Vec<usize>,
}

/// The six slot pairs of a tetrahedron in a fixed order; entry `k` is the
/// pair `EDGE_PAIRS[k]`.
pub const EDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)];

fn pair_index(a: usize, b: usize) -> usize {
    EDGE_PAIRS.iter().position(|&p| p == (a, b) || p == (b, a)).unwrap()
}

/// Ascending slots of face `f` (the face opposite slot `f`).
pub fn face_slots(f: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for s in 0..4 {
        if s != f {
            out[k] = s;
            k += 1;
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
    fn classes(&mut self, n: usize) -> (Vec<usize>, usize) {
        let mut ids = HashMap::new();
        let mut out = Vec::with_capacity(n);
        for x in 0..n {
            let r = self.find(x);
            let next = ids.len();
            let id = *ids.entry(r).or_insert(next);
            out.push(id);
        }
        (out, ids.len())
    }
}

/// On-disk form: tetrahedra as vertex 4-tuples; `gluings` optional (derived
/// by matching sorted label triples when absent, in which case orientation
/// is the permutation parity of each listed tuple); `signs` optional in
/// explicit-gluing mode (a coherent orientation is solved for).
#[derive(Serialize, Deserialize)]
pub struct TriangulationJson {
    pub vertices: usize,
    pub tets: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluings: Option<Vec<(usize, usize, usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi1: Option<String>,
}

impl Triangulation {
    pub fn from_json(j: &TriangulationJson) -> Result<Self, TriError> {
        match &j.gluings {
            Some(gl) => {
                let gluings = gl.iter().map(|&(t1, f1, t2, f2)| Gluing { t1, f1, t2, f2 }).collect();
                Triangulation::assemble(
                    j.vertices,
                    j.tets.clone(),
                    gluings,
                    j.signs.clone(),
                    j.pi1.clone(),
                )
            }
            None => {
                // Simplicial mode: sort tuples ascending, remember parity.
                let mut tets = Vec::with_capacity(j.tets.len());
                let mut signs = Vec::with_capacity(j.tets.len());
                for t in &j.tets {
                    let mut s = *t;
                    let mut parity = 1i8;
                    for i in 0..4 {
                        for k in 0..3 - i.min(3) {
                            if s[k] > s[k + 1] {
                                s.swap(k, k + 1);
                                parity = -parity;
                            }
                        }
                    }
                    if s.windows(2).any(|w| w[0] == w[1]) {
                        return Err(TriError::Input(
                            "repeated vertex in a tetrahedron without explicit gluings".into(),
                        ));
                    }
                    tets.push(s);
                    signs.push(parity);
                }
                // Match faces by sorted label triples.
                let mut by_key: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::new();
                for (ti, t) in tets.iter().enumerate() {
                    for f in 0..4 {
                        let sl = face_slots(f);
                        let key = [t[sl[0]], t[sl[1]], t[sl[2]]];
                        by_key.entry(key).or_default().push((ti, f));
                    }
                }
                let mut gluings = Vec::new();
                let mut keys: Vec<_> = by_key.keys().copied().collect();
                keys.sort();
                for key in keys {
                    let inc = &by_key[&key];
                    if inc.len() != 2 {
                        return Err(TriError::Input(format!(
                            "triangle {key:?} is shared by {} tetrahedra, expected 2",
                            inc.len()
                        )));
                    }
                    gluings.push(Gluing { t1: inc[0].0, f1: inc[0].1, t2: inc[1].0, f2: inc[1].1 });
                }
                Triangulation::assemble(j.vertices, tets, gluings, Some(signs), j.pi1.clone())
            }
        }
    }

    pub fn to_json(&self) -> TriangulationJson {
        TriangulationJson {
            vertices: self.n_vertices,
            tets: self.tets.clone(),
            gluings: Some(self.gluings.iter().map(|g| (g.t1, g.f1, g.t2, g.f2)).collect()),
            signs: Some(self.signs.clone()),
            pi1: self.pi1.clone(),
        }
    }

    /// Builds the derived tables and verifies closedness, orientability,
    /// and the Euler characteristic.
    pub fn assemble(
        n_vertices: usize,
        tets: Vec<[usize; 4]>,
        gluings: Vec<Gluing>,
        signs: Option<Vec<i8>>,
        pi1: Option<String>,
    ) -> Result<Self, TriError> {
        let nt = tets.len();
        if nt == 0 {
            return Err(TriError::Input("no tetrahedra".into()));
        }
        // Every face glued exactly once.
        let mut seen = vec![false; nt * 4];
        for g in &gluings {
            for (t, f) in [(g.t1, g.f1), (g.t2, g.f2)] {
                if t >= nt || f >= 4 {
                    return Err(TriError::Input("gluing index out of range".into()));
                }
                if seen[t * 4 + f] {
                    return Err(TriError::Input(format!(
                        "face {f} of tetrahedron {t} glued more than once"
                    )));
                }
                seen[t * 4 + f] = true;
            }
            if (g.t1, g.f1) == (g.t2, g.f2) {
                return Err(TriError::Input("face glued to itself".into()));
            }
        }
        if seen.iter().any(|&s| !s) {
            let missing = seen.iter().position(|&s| !s).unwrap();
            return Err(TriError::Input(format!(
                "triangle shared once: face {} of tetrahedron {} is unglued",
                missing % 4,
                missing / 4
            )));
        }
        // Vertex and edge classes through the gluings.
        let mut vuf = UnionFind::new(nt * 4);
        let mut euf = UnionFind::new(nt * 6);
        for g in &gluings {
            let s1 = face_slots(g.f1);
            let s2 = face_slots(g.f2);
            for k in 0..3 {
                vuf.union(g.t1 * 4 + s1[k], g.t2 * 4 + s2[k]);
            }
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let p1 = pair_index(s1[i], s1[j]);
                let p2 = pair_index(s2[i], s2[j]);
                euf.union(g.t1 * 6 + p1, g.t2 * 6 + p2);
            }
        }
        let (vertex_class, nv) = vuf.classes(nt * 4);
        let (edge_class, ne) = euf.classes(nt * 6);
        if nv != n_vertices {
            return Err(TriError::Input(format!(
                "declared {n_vertices} vertices but the gluings identify {nv}"
            )));
        }
        // Triangle classes: one per gluing.
        let mut triangles = Vec::with_capacity(gluings.len());
        let mut tri_of_face = vec![usize::MAX; nt * 4];
        for (i, g) in gluings.iter().enumerate() {
            triangles.push([(g.t1, g.f1), (g.t2, g.f2)]);
            tri_of_face[g.t1 * 4 + g.f1] = i;
            tri_of_face[g.t2 * 4 + g.f2] = i;
        }
        let chi = nv as i64 - ne as i64 + triangles.len() as i64 - nt as i64;
        if chi != 0 {
            return Err(TriError::Input(format!("euler characteristic {chi}, expected 0")));
        }
        // Orientation: solve (or verify) the coherent 2-coloring
        // sigma_1 (-1)^{f1} = -sigma_2 (-1)^{f2}.
        let mut solved: Vec<i8> = vec![0; nt];
        solved[0] = 1;
        let mut queue = vec![0usize];
        while let Some(t) = queue.pop() {
            for g in &gluings {
                let (a, fa, b, fb) = (g.t1, g.f1, g.t2, g.f2);
                for (x, fx, y, fy) in [(a, fa, b, fb), (b, fb, a, fa)] {
                    if x == t && solved[y] == 0 {
                        let sx = solved[x] as i64;
                        let par = if (fx + fy) % 2 == 0 { -1 } else { 1 };
                        solved[y] = (sx * par) as i8;
                        queue.push(y);
                    }
                }
            }
        }
        if solved.iter().any(|&s| s == 0) {
            return Err(TriError::Input("triangulation is not connected".into()));
        }
        for g in &gluings {
            let lhs = solved[g.t1] as i64 * if g.f1 % 2 == 0 { 1 } else { -1 };
            let rhs = solved[g.t2] as i64 * if g.f2 % 2 == 0 { 1 } else { -1 };
            if lhs != -rhs {
                return Err(TriError::Input("triangulation is not orientable".into()));
            }
        }
        let signs = match signs {
            None => solved,
            Some(given) => {
                if given.len() != nt {
                    return Err(TriError::Input("orientation list length mismatch".into()));
                }
                // The given orientation must agree with a coherent one up to
                // a global flip.
                let flip = given[0] == -solved[0];
                for (a, b) in given.iter().zip(&solved) {
                    let want = if flip { -b } else { *b };
                    if *a != want {
                        return Err(TriError::Input(
                            "listed orientations are not coherent".into(),
                        ));
                    }
                }
                given
            }
        };
        // Monotone directions: every incidence of an edge class must agree
        // on tail and head vertex classes.
        let mut tail = vec![usize::MAX; ne];
        let mut head = vec![usize::MAX; ne];
        for t in 0..nt {
            for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
                let e = edge_class[t * 6 + k];
                let (tl, hd) = (vertex_class[t * 4 + i], vertex_class[t * 4 + j]);
                if tail[e] == usize::MAX {
                    tail[e] = tl;
                    head[e] = hd;
                } else if tail[e] != tl || head[e] != hd {
                    return Err(TriError::Unsupported(
                        "edge directions are inconsistent; the complex is not ordered".into(),
                    ));
                }
            }
        }
        Ok(Triangulation {
            n_vertices,
            tets,
            gluings,
            signs,
            pi1,
            vertex_class,
            edge_class,
            n_edges: ne,
            triangles,
            tri_of_face,
        })
    }

    pub fn n_tets(&self) -> usize {
        self.tets.len()
    }

    /// Tail and head vertex classes of an edge class.
    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        for t in 0..self.n_tets() {
            for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
                if self.edge_class[t * 6 + k] == e {
                    return (self.vertex_class[t * 4 + i], self.vertex_class[t * 4 + j]);
                }
            }
        }
        unreachable!("edge class out of range")
    }

    /// Replaces the two tetrahedra sharing a triangle by three around the
    /// new edge joining their apexes. The input must have globally labeled
    /// vertices (distinct within each tetrahedron).
    pub fn pachner_23(&self, triangle: usize) -> Result<Triangulation, TriError> {
        if triangle >= self.triangles.len() {
            return Err(TriError::Input("triangle id out of range".into()));
        }
        let [(t1, f1), (t2, f2)] = self.triangles[triangle];
        if t1 == t2 {
            return Err(TriError::MoveNotApplicable("both faces on one tetrahedron".into()));
        }
        for t in [t1, t2] {
            let lbl = self.tets[t];
            let mut sorted = lbl;
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(TriError::MoveNotApplicable(
                    "tetrahedron vertices are identified; labeled simplicial input required".into(),
                ));
            }
        }
        let apex1 = self.tets[t1][f1];
        let apex2 = self.tets[t2][f2];
        if self.vertex_class[t1 * 4 + f1] == self.vertex_class[t2 * 4 + f2] {
            return Err(TriError::MoveNotApplicable("shared apex".into()));
        }
        let s1 = face_slots(f1);
        let base = [self.tets[t1][s1[0]], self.tets[t1][s1[1]], self.tets[t1][s1[2]]];
        // New tetrahedra: apexes with each base pair, sorted ascending.
        let mut p = apex1.min(apex2);
        let mut q = apex1.max(apex2);
        std::mem::swap(&mut p, &mut q);
        let (p, q) = (q, p);
        let pairs = [(base[0], base[1]), (base[0], base[2]), (base[1], base[2])];
        let old_count = self.n_tets();
        let keep: Vec<usize> = (0..old_count).filter(|&t| t != t1 && t != t2).collect();
        let remap: HashMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut tets: Vec<[usize; 4]> = keep.iter().map(|&t| self.tets[t]).collect();
        let new_base_idx = tets.len();
        for &(x, y) in &pairs {
            let mut t = [p, q, x, y];
            t.sort();
            tets.push(t);
        }
        // Face lookup by sorted label triple for the new tetrahedra and the
        // survivors of the old boundary.
        let face_key = |t: &[usize; 4], f: usize| -> [usize; 3] {
            let sl = face_slots(f);
            let mut k = [t[sl[0]], t[sl[1]], t[sl[2]]];
            k.sort();
            k
        };
        let mut new_faces: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
        for (i, t) in tets.iter().enumerate().skip(new_base_idx) {
            for f in 0..4 {
                new_faces.insert(face_key(t, f), (i, f));
            }
        }
        let mut gluings: Vec<Gluing> = Vec::new();
        // Internal gluings among the three new tetrahedra: faces containing
        // both apexes.
        let mut internal: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::new();
        for (i, t) in tets.iter().enumerate().skip(new_base_idx) {
            for f in 0..4 {
                let key = face_key(t, f);
                if key.contains(&p) && key.contains(&q) {
                    internal.entry(key).or_default().push((i, f));
                }
            }
        }
        for (key, inc) in internal {
            if inc.len() != 2 {
                return Err(TriError::MoveNotApplicable(format!(
                    "internal face {key:?} not paired; configuration degenerate"
                )));
            }
            gluings.push(Gluing { t1: inc[0].0, f1: inc[0].1, t2: inc[1].0, f2: inc[1].1 });
        }
        // Old gluings: keep those not touching t1/t2; re-point those that
        // attached to the outer faces of t1/t2.
        for g in &self.gluings {
            let touches = |t: usize, f: usize| (t == t1 && f != f1) || (t == t2 && f != f2);
            let is_shared = (g.t1 == t1 && g.f1 == f1) || (g.t1 == t2 && g.f1 == f2);
            if is_shared {
                continue; // interior triangle of the bipyramid disappears
            }
            let map_side = |t: usize, f: usize| -> Result<(usize, usize), TriError> {
                if touches(t, f) {
                    let key = face_key(&self.tets[t], f);
                    new_faces
                        .get(&key)
                        .copied()
                        .ok_or_else(|| TriError::MoveNotApplicable("outer face not rebuilt".into()))
                } else {
                    Ok((remap[&t], f))
                }
            };
            // A gluing between the two outer cones of the bipyramid stays a
            // gluing between new tetrahedra; both sides map.
            let (a, fa) = map_side(g.t1, g.f1)?;
            let (b, fb) = map_side(g.t2, g.f2)?;
            gluings.push(Gluing { t1: a, f1: fa, t2: b, f2: fb });
        }
        Triangulation::assemble(self.n_vertices, tets, gluings, None, self.pi1.clone())
    }
}

// ---------------------------------------------------------------------------
// Bundled manifolds.

/// Boundary of the 4-simplex: the 5-tetrahedron 3-sphere.
pub fn sphere_five() -> Triangulation {
    let mut tets = Vec::new();
    for i in 0..5usize {
        let mut t: Vec<usize> = (0..5).filter(|&v| v != i).collect();
        // Alternate orientations for coherence.
        if i % 2 == 1 {
            t.swap(2, 3);
        }
        tets.push([t[0], t[1], t[2], t[3]]);
    }
    let j = TriangulationJson { vertices: 5, tets, gluings: None, signs: None, pi1: Some("trivial".into()) };
    Triangulation::from_json(&j).expect("five-tetrahedron sphere is valid")
}

/// The same sphere after one 2-3 move.
pub fn sphere_six() -> Triangulation {
    let t = sphere_five();
    for tri in 0..t.triangles.len() {
        if let Ok(mut out) = t.pachner_23(tri) {
            out.pi1 = Some("trivial".into());
            return out;
        }
    }
    unreachable!("some interior triangle admits the move")
}

/// Lens space L(p, q) from the twisted bipyramid over a p-gon.
pub fn lens(p: usize, q: usize) -> Result<Triangulation, TriError> {
    if p < 2 {
        return Err(TriError::Input("lens spaces need p >= 2".into()));
    }
    if gcd(p, q % p) != 1 {
        return Err(TriError::Input("lens parameters must be coprime".into()));
    }
    let north = p;
    let south = p + 1;
    let mut tets = Vec::new();
    for i in 0..p {
        tets.push([i, (i + 1) % p, north, south]);
    }
    let mut gluings = Vec::new();
    for i in 0..p {
        // face opposite slot 0 of T_i is (i+1, N, S); it matches face
        // opposite slot 1 of T_{i+1}.
        gluings.push(Gluing { t1: i, f1: 0, t2: (i + 1) % p, f2: 1 });
        // top face (i, i+1, N) of T_i twists onto the bottom face
        // (i+q, i+q+1, S) of T_{i+q}.
        gluings.push(Gluing { t1: i, f1: 3, t2: (i + q) % p, f2: 2 });
    }
    let vertices = {
        // rim orbit count under +q, apexes identified by the twist
        let g = gcd(p, q);
        g + 1
    };
    Triangulation::assemble(vertices, tets, gluings, None, Some(format!("zn:{p}")))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// The product of the 2-sphere (as the boundary of a 3-simplex) with the
/// circle, from one prism layer glued top to bottom.
pub fn s2_x_s1() -> Triangulation {
    let faces: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let top = |v: usize| v + 4;
    let mut tets: Vec<[usize; 4]> = Vec::new();
    for f in faces {
        let [a, b, c] = f;
        tets.push([a, b, c, top(c)]);
        tets.push([a, b, top(b), top(c)]);
        tets.push([a, top(a), top(b), top(c)]);
    }
    // Derive side/interior gluings by matching label triples; the four
    // top-bottom identifications are explicit.
    let mut by_key: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::new();
    for (ti, t) in tets.iter().enumerate() {
        for f in 0..4 {
            let sl = face_slots(f);
            let mut key = [t[sl[0]], t[sl[1]], t[sl[2]]];
            key.sort();
            by_key.entry(key).or_default().push((ti, f));
        }
    }
    let mut gluings = Vec::new();
    let mut keys: Vec<_> = by_key.keys().copied().collect();
    keys.sort();
    let mut unmatched: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
    for key in keys {
        let inc = &by_key[&key];
        match inc.len() {
            2 => gluings.push(Gluing { t1: inc[0].0, f1: inc[0].1, t2: inc[1].0, f2: inc[1].1 }),
            1 => {
                unmatched.insert(key, inc[0]);
            }
            _ => unreachable!("simplicial prism complex"),
        }
    }
    // top face (a', b', c') of the third prism tet joins the bottom face
    // (a, b, c) of the first tet over the same base triangle.
    for f in faces {
        let [a, b, c] = f;
        let mut bottom = [a, b, c];
        bottom.sort();
        let mut topf = [top(a), top(b), top(c)];
        topf.sort();
        let (bt, bf) = unmatched[&bottom];
        let (tt, tf) = unmatched[&topf];
        gluings.push(Gluing { t1: tt, f1: tf, t2: bt, f2: bf });
    }
    Triangulation::assemble(4, tets, gluings, None, Some("z".into()))
        .expect("prism product is valid")
}

/// The 3-torus from the six-tetrahedron diagonal decomposition of the cube
/// with opposite faces identified by translation.
pub fn torus_three() -> Triangulation {
    // cube vertices as bit masks x + 2y + 4z; one tetrahedron per
    // coordinate order, walking 0 -> a -> a+b -> a+b+c
    let mut tets: Vec<[usize; 4]> = Vec::new();
    let axes = [1usize, 2, 4];
    for p in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        let a = axes[p[0]];
        let b = axes[p[1]];
        let c = axes[p[2]];
        tets.push([0, a, a + b, a + b + c]);
    }
    let mut by_key: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::new();
    for (ti, t) in tets.iter().enumerate() {
        for f in 0..4 {
            let sl = face_slots(f);
            let mut key = [t[sl[0]], t[sl[1]], t[sl[2]]];
            key.sort();
            by_key.entry(key).or_default().push((ti, f));
        }
    }
    let mut gluings = Vec::new();
    let mut keys: Vec<_> = by_key.keys().copied().collect();
    keys.sort();
    let mut boundary: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
    for key in keys {
        let inc = &by_key[&key];
        match inc.len() {
            2 => gluings.push(Gluing { t1: inc[0].0, f1: inc[0].1, t2: inc[1].0, f2: inc[1].1 }),
            1 => {
                boundary.insert(key, inc[0]);
            }
            _ => unreachable!(),
        }
    }
    // Opposite cube faces glue by translation: the face with axis bit 0
    // maps to the face with the bit set.
    let keys: Vec<[usize; 3]> = boundary.keys().copied().collect();
    for key in keys {
        for &axis in &axes {
            if key.iter().all(|&v| v & axis == 0) {
                let mut image = key.map(|v| v + axis);
                image.sort();
                let (t1, f1) = boundary[&key];
                let (t2, f2) = boundary[&image];
                gluings.push(Gluing { t1, f1, t2, f2 });
            }
        }
    }
    Triangulation::assemble(1, tets, gluings, None, Some("z3".into()))
        .expect("cube decomposition of the torus is valid")
}

pub const BUNDLED_TRIANGULATIONS: [&str; 6] =
    ["s3_5tet", "s3_6tet", "rp3", "lens_3_1", "s2xs1", "t3"];

pub fn bundled_triangulation(name: &str) -> Result<Triangulation, TriError> {
    match name {
        "s3_5tet" => Ok(sphere_five()),
        "s3_6tet" => Ok(sphere_six()),
        "rp3" => lens(2, 1),
        "lens_3_1" => lens(3, 1),
        "s2xs1" => Ok(s2_x_s1()),
        "t3" => Ok(torus_three()),
        other => Err(TriError::Input(format!("unknown bundled triangulation `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// The state-sum evaluator.

/// Category data consumed by the evaluator: labels with dimensions, fusion
/// multiplicities, associator entries, and (for the bi-colored sum) the
/// corner constraint on which labels may sit on an edge.
pub trait StateSumTables<S: Scalar>: Sync {
    fn label_count(&self) -> usize;
    fn dim(&self, label: usize) -> S;
    fn total_dsq(&self) -> S;
    fn nfusion(&self, a: usize, b: usize, c: usize) -> usize;
    fn f_entry(
        &self,
        key: (usize, usize, usize, usize),
        row: (usize, usize, usize),
        col: (usize, usize, usize),
    ) -> S;
    fn f_inv_entry(
        &self,
        key: (usize, usize, usize, usize),
        row: (usize, usize, usize),
        col: (usize, usize, usize),
    ) -> S;
    /// Whether a label may decorate an edge from a vertex colored `tail` to
    /// one colored `head`; plain data ignores the colors.
    fn edge_allowed(&self, label: usize, tail: usize, head: usize) -> bool;
}

impl<S: Scalar> StateSumTables<S> for SkeletalData<S> {
    fn label_count(&self) -> usize {
        self.len()
    }
    fn dim(&self, label: usize) -> S {
        self.dims[label].clone()
    }
    fn total_dsq(&self) -> S {
        self.dsq()
    }
    fn nfusion(&self, a: usize, b: usize, c: usize) -> usize {
        self.n(a, b, c)
    }
    fn f_entry(
        &self,
        key: (usize, usize, usize, usize),
        row: (usize, usize, usize),
        col: (usize, usize, usize),
    ) -> S {
        self.f_entry(key.0, key.1, key.2, key.3, row, col)
    }
    fn f_inv_entry(
        &self,
        key: (usize, usize, usize, usize),
        row: (usize, usize, usize),
        col: (usize, usize, usize),
    ) -> S {
        match self.f.get(&(key.0, key.1, key.2, key.3)) {
            None => S::zero(),
            Some(blk) => {
                // rows of the inverse are indexed by the columns of the block
                let ri = blk.cols.iter().position(|&r| r == row);
                let ci = blk.rows.iter().position(|&c| c == col);
                match (ri, ci) {
                    (Some(i), Some(j)) => blk.inv.at(i, j).clone(),
                    _ => S::zero(),
                }
            }
        }
    }
    fn edge_allowed(&self, _label: usize, _tail: usize, _head: usize) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// depth of the prefix partition handed to worker threads
    pub partition_depth: usize,
    pub parallel: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { partition_depth: 3, parallel: true }
    }
}

struct TetView {
    /// edge classes in the role order a, b, c, d, e, f
    edges: [usize; 6],
    /// triangle classes in the role order (012), (023), (123), (013)
    tris: [usize; 4],
    positive: bool,
}

/// Per-tetrahedron roles of the four faces: (012) and (023) index the rows
/// of the associator block, (123) and (013) the columns. Face `f` of a
/// tetrahedron is opposite slot `f`.
fn tet_views(tri: &Triangulation) -> Vec<TetView> {
    (0..tri.n_tets())
        .map(|t| {
            let e = |i: usize, j: usize| tri.edge_class[t * 6 + pair_index(i, j)];
            let tri_at = |f: usize| tri.tri_of_face[t * 4 + f];
            TetView {
                edges: [e(0, 1), e(1, 2), e(2, 3), e(0, 3), e(0, 2), e(1, 3)],
                tris: [tri_at(3), tri_at(1), tri_at(0), tri_at(2)],
                positive: tri.signs[t] > 0,
            }
        })
        .collect()
}

/// Evaluates the state sum over a triangulation with colored vertices.
/// The plain invariant passes the all-zero coloring.
pub fn state_sum<S: Scalar, T: StateSumTables<S>>(
    tri: &Triangulation,
    tables: &T,
    vertex_colors: &[usize],
    opts: &EvalOptions,
) -> Result<S, TriError> {
    if vertex_colors.len() != tri.n_vertices {
        return Err(TriError::Input(format!(
            "expected {} vertex colors, got {}",
            tri.n_vertices,
            vertex_colors.len()
        )));
    }
    let nl = tables.label_count();
    let ne = tri.n_edges;
    // Allowed labels per edge from the endpoint colors.
    let mut allowed: Vec<Vec<usize>> = Vec::with_capacity(ne);
    for e in 0..ne {
        let (tl, hd) = tri.edge_ends(e);
        let list: Vec<usize> = (0..nl)
            .filter(|&l| tables.edge_allowed(l, vertex_colors[tl], vertex_colors[hd]))
            .collect();
        if list.is_empty() {
            return Err(TriError::Unsupported(
                "no labels available for an edge under this coloring".into(),
            ));
        }
        allowed.push(list);
    }
    // Triangles as (a-edge, b-edge, c-edge) in the fusion-space roles.
    let mut tri_edges: Vec<[usize; 3]> = Vec::with_capacity(tri.triangles.len());
    for inc in &tri.triangles {
        let (t, f) = inc[0];
        let sl = face_slots(f);
        let e = |i: usize, j: usize| tri.edge_class[t * 6 + pair_index(sl[i], sl[j])];
        tri_edges.push([e(0, 1), e(1, 2), e(0, 2)]);
    }
    let views = tet_views(tri);
    // Every triangle pairs a row slot of one incident tetrahedron with a
    // column slot of the other; this is forced by orientation coherence.
    for g in &tri.gluings {
        let row_slot = |t: usize, f: usize| (f % 2 == 1) ^ (tri.signs[t] < 0);
        if row_slot(g.t1, g.f1) == row_slot(g.t2, g.f2) {
            return Err(TriError::Unsupported(
                "incoherent face pairing; orientation data is inconsistent".into(),
            ));
        }
    }

    // Static edge order: most constrained first, refined by how many
    // triangles the edge closes early.
    let mut order: Vec<usize> = (0..ne).collect();
    order.sort_by_key(|&e| (allowed[e].len(), e));
    let mut rank = vec![0usize; ne];
    for (i, &e) in order.iter().enumerate() {
        rank[e] = i;
    }
    // Triangles become checkable when their last edge (in the order) is set.
    let mut tri_ready: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for (ti, es) in tri_edges.iter().enumerate() {
        let last = es.iter().copied().max_by_key(|&e| rank[e]).unwrap();
        tri_ready[last].push(ti);
    }

    let depth = opts.partition_depth.min(order.len());
    // Enumerate admissible prefixes of the first `depth` edges.
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    for level in 0..depth {
        let edge = order[level];
        let mut next = Vec::new();
        for pre in &prefixes {
            for &l in &allowed[edge] {
                let mut cand = pre.clone();
                cand.push(l);
                // check triangles fully colored within the prefix
                let ok = tri_ready[edge].iter().all(|&ti| {
                    let es = tri_edges[ti];
                    let val = |e: usize| {
                        if rank[e] <= level {
                            Some(cand[rank[e]])
                        } else {
                            None
                        }
                    };
                    match (val(es[0]), val(es[1]), val(es[2])) {
                        (Some(a), Some(b), Some(c)) => tables.nfusion(a, b, c) > 0,
                        _ => true,
                    }
                });
                if ok {
                    next.push(cand);
                }
            }
        }
        prefixes = next;
    }

    let eval_prefix = |pre: &Vec<usize>| -> Result<S, TriError> {
        let mut coloring = vec![usize::MAX; ne];
        for (i, &l) in pre.iter().enumerate() {
            coloring[order[i]] = l;
        }
        let mut acc = S::zero();
        dfs_color(
            tri,
            tables,
            &allowed,
            &order,
            &tri_edges,
            &tri_ready,
            &views,
            pre.len(),
            &mut coloring,
            &mut acc,
        )?;
        Ok(acc)
    };

    let partials: Result<Vec<S>, TriError> = if opts.parallel {
        prefixes.par_iter().map(eval_prefix).collect()
    } else {
        prefixes.iter().map(eval_prefix).collect()
    };
    let partials = partials?;
    // Compensated fold in a fixed order keeps the floating output
    // bit-stable across thread counts.
    let mut sum = S::zero();
    let mut comp = S::zero();
    for x in partials {
        let t = sum.add(&x);
        if sum.abs() >= x.abs() {
            comp = comp.add(&sum.sub(&t).add(&x));
        } else {
            comp = comp.add(&x.sub(&t).add(&sum));
        }
        sum = t;
    }
    sum = sum.add(&comp);
    // Normalize by the global dimension per vertex.
    let dsq = tables.total_dsq();
    let mut norm = S::one();
    for _ in 0..tri.n_vertices {
        norm = norm.mul(&dsq);
    }
    let inv = norm.inv().ok_or_else(|| TriError::Unsupported("vanishing global dimension".into()))?;
    Ok(sum.mul(&inv))
}

#[allow(clippy::too_many_arguments)]
fn dfs_color<S: Scalar, T: StateSumTables<S>>(
    tri: &Triangulation,
    tables: &T,
    allowed: &[Vec<usize>],
    order: &[usize],
    tri_edges: &[[usize; 3]],
    tri_ready: &[Vec<usize>],
    views: &[TetView],
    level: usize,
    coloring: &mut Vec<usize>,
    acc: &mut S,
) -> Result<(), TriError> {
    if level == order.len() {
        let term = evaluate_coloring(tri, tables, tri_edges, views, coloring)?;
        *acc = acc.add(&term);
        return Ok(());
    }
    let edge = order[level];
    for &l in &allowed[edge] {
        coloring[edge] = l;
        let ok = tri_ready[edge].iter().all(|&ti| {
            let es = tri_edges[ti];
            if es.iter().any(|&e| coloring[e] == usize::MAX) {
                return true;
            }
            tables.nfusion(coloring[es[0]], coloring[es[1]], coloring[es[2]]) > 0
        });
        if ok {
            dfs_color(
                tri, tables, allowed, order, tri_edges, tri_ready, views, level + 1,
                coloring, acc,
            )?;
        }
    }
    coloring[edge] = usize::MAX;
    Ok(())
}

fn evaluate_coloring<S: Scalar, T: StateSumTables<S>>(
    tri: &Triangulation,
    tables: &T,
    tri_edges: &[[usize; 3]],
    views: &[TetView],
    coloring: &[usize],
) -> Result<S, TriError> {
    // Edge-dimension weight and the tetrahedron normalization.
    let mut weight = S::one();
    for e in 0..tri.n_edges {
        weight = weight.mul(&tables.dim(coloring[e]));
    }
    for v in views {
        let de = tables.dim(coloring[v.edges[4]]);
        let df = tables.dim(coloring[v.edges[5]]);
        let root = de.mul(&df).sqrt().ok_or_else(|| {
            TriError::Unsupported("dimension square root not representable in this backend".into())
        })?;
        let inv = root
            .inv()
            .ok_or_else(|| TriError::Unsupported("vanishing label dimension".into()))?;
        weight = weight.mul(&inv);
    }
    // Multiplicity index ranges per triangle.
    let nt = tri_edges.len();
    let mut dims = Vec::with_capacity(nt);
    for es in tri_edges {
        let n = tables.nfusion(coloring[es[0]], coloring[es[1]], coloring[es[2]]);
        if n == 0 {
            return Ok(S::zero());
        }
        dims.push(n);
    }
    // Contract the per-tetrahedron tensors over the triangle indices.
    let mut idx = vec![0usize; nt];
    let mut amp = S::zero();
    loop {
        let mut term = S::one();
        for v in views {
            let a = coloring[v.edges[0]];
            let b = coloring[v.edges[1]];
            let c = coloring[v.edges[2]];
            let d = coloring[v.edges[3]];
            let e = coloring[v.edges[4]];
            let f = coloring[v.edges[5]];
            let mu = idx[v.tris[0]];
            let nu = idx[v.tris[1]];
            let rho = idx[v.tris[2]];
            let sigma = idx[v.tris[3]];
            let entry = if v.positive {
                tables.f_entry((a, b, c, d), (e, mu, nu), (f, rho, sigma))
            } else {
                tables.f_inv_entry((a, b, c, d), (f, rho, sigma), (e, mu, nu))
            };
            if entry.is_zero() {
                term = S::zero();
                break;
            }
            term = term.mul(&entry);
        }
        amp = amp.add(&term);
        // advance the multi-index
        let mut k = 0;
        loop {
            if k == nt {
                return Ok(weight.mul(&amp));
            }
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Brute-force count of flat bundles: homomorphisms from the fundamental
/// group into a finite group, weighted by the group order.
pub fn flat_bundle_oracle<S: Scalar>(pi1: &str, g: &GroupTable) -> Result<S, TriError> {
    let n = g.order();
    let count: usize = match pi1 {
        "trivial" => 1,
        "z" => n,
        "z3" => {
            let mut c = 0;
            for a in 0..n {
                for b in 0..n {
                    if g.mul[a][b] != g.mul[b][a] {
                        continue;
                    }
                    for x in 0..n {
                        if g.mul[a][x] == g.mul[x][a] && g.mul[b][x] == g.mul[x][b] {
                            c += 1;
                        }
                    }
                }
            }
            c
        }
        tag => {
            if let Some(p) = tag.strip_prefix("zn:") {
                let p: usize = p
                    .parse()
                    .map_err(|_| TriError::Unsupported(format!("bad cyclic tag `{tag}`")))?;
                (0..n)
                    .filter(|&x| {
                        let mut acc = g.identity;
                        for _ in 0..p {
                            acc = g.mul[acc][x];
                        }
                        acc == g.identity
                    })
                    .count()
            } else {
                return Err(TriError::Unsupported(format!("unsupported group tag `{tag}`")));
            }
        }
    };
    Ok(S::from_i64(count as i64).mul(&S::from_i64(n as i64).inv().unwrap()))
}


#[cfg(test)]
mod center_tests {
    use super::*;
    use crate::scalar::C64;
    use crate::skeletal::builtin;

    fn value(data_name: &str, tri_name: &str) -> f64 {
        let data = builtin::<C64>(data_name).unwrap();
        let tri = bundled_triangulation(tri_name).unwrap();
        let v = state_sum(&tri, &data, &vec![0; tri.n_vertices], &EvalOptions::default()).unwrap();
        assert!(v.to_c64().im.abs() < 1e-9);
        v.to_c64().re
    }

    /// The product with the circle over the sphere supports a single state
    /// for every input category.
    #[test]
    fn sphere_times_circle_is_one() {
        for name in ["fibonacci", "ising", "rep_s3", "vec_s3"] {
            let v = value(name, "s2xs1");
            assert!((v - 1.0).abs() < 1e-9, "{name}: {v}");
        }
    }

    /// The three-torus value counts the simple objects of the double.
    #[test]
    fn three_torus_counts_center_simples() {
        for (name, expect) in [("fibonacci", 4.0), ("ising", 9.0), ("rep_s3", 8.0), ("vec_s3", 8.0)] {
            let v = value(name, "t3");
            assert!((v - expect).abs() < 1e-9, "{name}: {v} vs {expect}");
        }
    }

    /// A second 2-3 move: three triangulations of the sphere agree.
    #[test]
    fn double_move_stability() {
        let t6 = sphere_six();
        let t7 = (0..t6.triangles.len())
            .find_map(|i| t6.pachner_23(i).ok())
            .expect("some triangle admits the move");
        assert_eq!(t7.n_tets(), 7);
        for name in ["fibonacci", "rep_s3"] {
            let data = builtin::<C64>(name).unwrap();
            let opts = EvalOptions::default();
            let v6 = state_sum(&t6, &data, &vec![0; t6.n_vertices], &opts).unwrap();
            let v7 = state_sum(&t7, &data, &vec![0; t7.n_vertices], &opts).unwrap();
            assert!(v6.sub(&v7).abs() < 1e-9, "{name}");
        }
    }

    /// Lens spaces beyond the bundled pair assemble and match the oracle.
    #[test]
    fn lens_family_oracle() {
        use crate::groups::GroupTable;
        use crate::scalar::Rat;
        use crate::skeletal::vec_group;
        for p in 2..=5 {
            let tri = lens(p, 1).unwrap();
            for g in [GroupTable::cyclic(2), GroupTable::cyclic(3)] {
                let data = vec_group::<Rat>(&g);
                let v = state_sum(&tri, &data, &vec![0; tri.n_vertices], &EvalOptions::default())
                    .unwrap();
                let oracle =
                    flat_bundle_oracle::<Rat>(&format!("zn:{p}"), &g).unwrap();
                assert_eq!(v, oracle, "lens({p},1) over {}", g.name);
            }
        }
    }
}
