//! Skeletal data over a full Morita context: simple 1-morphisms of all four
//! corners as labels, mixed fusion multiplicities, and mixed associator
//! blocks, feeding the two-color state sum. Vertices of a triangulation are
//! colored by the two objects and edges carry corner simples compatible
//! with their endpoint colors.

use crate::mat::Mat;
use crate::morita::{CMor, CObj, Corner, MoritaContext, MoritaError};
use crate::repcat::combine;
use crate::scalar::Scalar;
use crate::skeletal::SkeletalData;
use crate::statesum::StateSumTables;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Object colors of the context.
pub const COLOR_A: usize = 0;
pub const COLOR_B: usize = 1;

pub struct CtxLabel<S> {
    pub corner: Corner,
    pub obj: CObj,
    pub idem: CMor<S>,
    pub dim: S,
    pub name: String,
}

impl Corner {
    /// (source color, target color) of 1-morphisms in this corner.
    pub fn colors(self) -> (usize, usize) {
        match self {
            Corner::AA => (COLOR_A, COLOR_A),
            Corner::BA => (COLOR_B, COLOR_A),
            Corner::AB => (COLOR_A, COLOR_B),
            Corner::BB => (COLOR_B, COLOR_B),
        }
    }
}

pub struct ContextSkeletal<S> {
    pub labels: Vec<CtxLabel<S>>,
    pub dsq: S,
    fusion: HashMap<(usize, usize, usize), usize>,
    f: HashMap<(usize, usize, usize, usize), crate::skeletal::FBlock<S>>,
}

struct FusionSpace<S> {
    /// compressed basis morphisms Z_c -> Z_a Z_b
    basis: Vec<CMor<S>>,
}

impl<S: Scalar> ContextSkeletal<S> {
    pub fn n(&self, a: usize, b: usize, c: usize) -> usize {
        *self.fusion.get(&(a, b, c)).unwrap_or(&0)
    }

    /// Composability of `a . b` (apply `b`, then `a`).
    fn composable(la: &CtxLabel<S>, lb: &CtxLabel<S>) -> bool {
        la.corner.colors().0 == lb.corner.colors().1
    }

    /// Extracts labels, fusion spaces, and associator blocks from a context.
    pub fn extract(ctx: &MoritaContext<S>, rng: &mut ChaCha8Rng) -> Result<Self, MoritaError> {
        let e = &ctx.engine;
        let mut labels: Vec<CtxLabel<S>> = Vec::new();
        // Diagonal base corner: the simples of the table with unit idempotents.
        for i in 0..e.ctx.table.len() {
            let obj = e.obj(Corner::AA, vec![i]);
            let idem = e.unit(&obj);
            let p = &e.ctx.table.packs[i];
            let dim = p.eta.mul(&p.e).at(0, 0).clone();
            labels.push(CtxLabel { corner: Corner::AA, obj, idem, dim, name: format!("a{i}") });
        }
        // Remaining corners: primitive idempotents on every framed simple,
        // deduplicated up to isomorphism.
        let dj2_inv = ctx.dj2.inv().expect("nonzero generator dimension");
        let dj = ctx
            .dj2
            .sqrt()
            .ok_or_else(|| MoritaError::Structural("generator dimension needs a square root".into()))?;
        let dj_inv = dj.inv().unwrap();
        for corner in [Corner::BA, Corner::AB, Corner::BB] {
            let mut found: Vec<(CObj, CMor<S>)> = Vec::new();
            for i in 0..e.ctx.table.len() {
                let host = e.obj(corner, vec![i]);
                let (basis, alg) = e.corner_algebra(&host)?;
                for coords in alg.primitive_idempotents(rng)? {
                    let idem =
                        CMor { src: host.clone(), dst: host.clone(), mat: combine(&basis, &coords) };
                    let mut dup = false;
                    for (pobj, pidem) in &found {
                        if e.compressed_hom_rank(pobj, pidem, &host, &idem)? > 0 {
                            dup = true;
                            break;
                        }
                    }
                    if !dup {
                        found.push((host.clone(), idem));
                    }
                }
            }
            for (k, (obj, idem)) in found.into_iter().enumerate() {
                let tr = e.pushforward_trace(&idem);
                let dim = match corner {
                    Corner::BB => tr.mul(&dj2_inv),
                    _ => tr.mul(&dj_inv),
                };
                let tag = match corner {
                    Corner::BA => "j",
                    Corner::AB => "jb",
                    Corner::BB => "b",
                    Corner::AA => unreachable!(),
                };
                labels.push(CtxLabel { corner, obj, idem, dim, name: format!("{tag}{k}") });
            }
        }

        // Fusion spaces for composable triples.
        let nl = labels.len();
        let mut spaces: HashMap<(usize, usize, usize), FusionSpace<S>> = HashMap::new();
        let mut fusion = HashMap::new();
        for a in 0..nl {
            for b in 0..nl {
                if !Self::composable(&labels[a], &labels[b]) {
                    continue;
                }
                for c in 0..nl {
                    if labels[c].corner.colors() != composed_colors(&labels[a], &labels[b]) {
                        continue;
                    }
                    let basis = fusion_basis(e, &labels[a], &labels[b], &labels[c])?;
                    if !basis.is_empty() {
                        fusion.insert((a, b, c), basis.len());
                        spaces.insert((a, b, c), FusionSpace { basis });
                    }
                }
            }
        }

        // Associator blocks.
        let mut f = HashMap::new();
        for a in 0..nl {
            for b in 0..nl {
                if !Self::composable(&labels[a], &labels[b]) {
                    continue;
                }
                for c in 0..nl {
                    if !Self::composable(&labels[b], &labels[c]) {
                        continue;
                    }
                    for d in 0..nl {
                        let rows = block_rows(&fusion, nl, a, b, c, d);
                        let cols = block_cols(&fusion, nl, a, b, c, d);
                        if rows.is_empty() {
                            continue;
                        }
                        if rows.len() != cols.len() {
                            return Err(MoritaError::Structural(
                                "mixed triple fusion spaces of different dimensions".into(),
                            ));
                        }
                        let blk = associator_block(
                            e, &labels, &spaces, (a, b, c, d), &rows, &cols,
                        )?;
                        f.insert((a, b, c, d), blk);
                    }
                }
            }
        }
        Ok(ContextSkeletal { labels, dsq: e.ctx.table.global_dimension(), fusion, f })
    }

    /// The skeletal data of one diagonal corner, as a standalone table.
    pub fn corner_data(&self, color: usize) -> Result<SkeletalData<S>, MoritaError> {
        let corner = if color == COLOR_A { Corner::AA } else { Corner::BB };
        let ids: Vec<usize> = (0..self.labels.len())
            .filter(|&i| self.labels[i].corner == corner)
            .collect();
        let back: HashMap<usize, usize> =
            ids.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let names: Vec<String> = ids.iter().map(|&i| self.labels[i].name.clone()).collect();
        let dims: Vec<S> = ids.iter().map(|&i| self.labels[i].dim.clone()).collect();
        let mut fusion = HashMap::new();
        for (&(a, b, c), &m) in &self.fusion {
            if let (Some(&a2), Some(&b2), Some(&c2)) = (back.get(&a), back.get(&b), back.get(&c)) {
                fusion.insert((a2, b2, c2), m);
            }
        }
        // unit: the label with N(u, x, x) = 1 for all x in the corner
        let unit = (0..ids.len())
            .find(|&u| (0..ids.len()).all(|x| fusion.get(&(u, x, x)) == Some(&1)))
            .ok_or_else(|| MoritaError::Structural("corner unit not found".into()))?;
        let mut dual = vec![usize::MAX; ids.len()];
        for a in 0..ids.len() {
            for b in 0..ids.len() {
                if fusion.get(&(a, b, unit)) == Some(&1) {
                    dual[a] = b;
                }
            }
        }
        if dual.iter().any(|&d| d == usize::MAX) {
            return Err(MoritaError::Structural("corner duals not found".into()));
        }
        let mut f = HashMap::new();
        for (&(a, b, c, d), blk) in &self.f {
            if let (Some(&a2), Some(&b2), Some(&c2), Some(&d2)) =
                (back.get(&a), back.get(&b), back.get(&c), back.get(&d))
            {
                let remap = |v: &Vec<(usize, usize, usize)>| {
                    v.iter().map(|&(l, x, y)| (back[&l], x, y)).collect::<Vec<_>>()
                };
                f.insert(
                    (a2, b2, c2, d2),
                    crate::skeletal::FBlock {
                        rows: remap(&blk.rows),
                        cols: remap(&blk.cols),
                        mat: blk.mat.clone(),
                        inv: blk.inv.clone(),
                    },
                );
            }
        }
        Ok(SkeletalData { names, unit, dual, dims, fusion, f })
    }
}

fn composed_colors<S: Scalar>(a: &CtxLabel<S>, b: &CtxLabel<S>) -> (usize, usize) {
    (b.corner.colors().0, a.corner.colors().1)
}

/// Compressed basis of `Hom(Z_c, Z_a Z_b)`.
fn fusion_basis<S: Scalar>(
    e: &crate::morita::Engine<S>,
    la: &CtxLabel<S>,
    lb: &CtxLabel<S>,
    lc: &CtxLabel<S>,
) -> Result<Vec<CMor<S>>, MoritaError> {
    let prod_idem = e.hcomp(&la.idem, &lb.idem);
    let src = &lc.obj;
    let dst = &prod_idem.src;
    if src.corner != dst.corner {
        return Ok(Vec::new());
    }
    let raw = e.hom_basis(src, dst)?;
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    // Compress on both sides and take a deterministic basis of the image.
    let mut cols: Vec<Vec<S>> = Vec::new();
    let mut mats: Vec<CMor<S>> = Vec::new();
    for h in &raw {
        let hm = CMor { src: src.clone(), dst: dst.clone(), mat: h.clone() };
        let comp = e.vcomp(&e.vcomp(&prod_idem, &hm), &lc.idem);
        cols.push(e.coords(src, dst, &comp.mat)?);
        mats.push(comp);
    }
    let dim = cols[0].len();
    let stacked = Mat::from_fn(dim, cols.len(), |i, j| cols[j][i].clone());
    let mut ech = stacked.clone();
    let pivots = ech.rref();
    Ok(pivots.into_iter().map(|p| mats[p].clone()).collect())
}

fn block_rows(
    fusion: &HashMap<(usize, usize, usize), usize>,
    nl: usize,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> Vec<(usize, usize, usize)> {
    let n = |x: usize, y: usize, z: usize| *fusion.get(&(x, y, z)).unwrap_or(&0);
    let mut rows = Vec::new();
    for e in 0..nl {
        for mu in 0..n(a, b, e) {
            for nu in 0..n(e, c, d) {
                rows.push((e, mu, nu));
            }
        }
    }
    rows
}

fn block_cols(
    fusion: &HashMap<(usize, usize, usize), usize>,
    nl: usize,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> Vec<(usize, usize, usize)> {
    let n = |x: usize, y: usize, z: usize| *fusion.get(&(x, y, z)).unwrap_or(&0);
    let mut cols = Vec::new();
    for f in 0..nl {
        for rho in 0..n(b, c, f) {
            for sigma in 0..n(a, f, d) {
                cols.push((f, rho, sigma));
            }
        }
    }
    cols
}

fn associator_block<S: Scalar>(
    e: &crate::morita::Engine<S>,
    labels: &[CtxLabel<S>],
    spaces: &HashMap<(usize, usize, usize), FusionSpace<S>>,
    key: (usize, usize, usize, usize),
    rows: &[(usize, usize, usize)],
    cols: &[(usize, usize, usize)],
) -> Result<crate::skeletal::FBlock<S>, MoritaError> {
    let (a, b, c, d) = key;
    // Reference basis of the triple space Hom(Z_d, Z_a Z_b Z_c): the right
    // trees themselves form one, so express left trees in right trees.
    let mut right_trees: Vec<CMor<S>> = Vec::new();
    for &(f, rho, sigma) in cols {
        let u = &spaces[&(b, c, f)].basis[rho];
        let v = &spaces[&(a, f, d)].basis[sigma];
        // (id_a x u) . v
        let step = e.hcomp(&labels[a].idem, u);
        right_trees.push(e.vcomp(&step, v));
    }
    let mut left_trees: Vec<CMor<S>> = Vec::new();
    for &(g, mu, nu) in rows {
        let u = &spaces[&(a, b, g)].basis[mu];
        let v = &spaces[&(g, c, d)].basis[nu];
        // (u x id_c) . v
        let step = e.hcomp(u, &labels[c].idem);
        left_trees.push(e.vcomp(&step, v));
    }
    // Raw coordinates in the engine hom space.
    let src = &left_trees[0].src;
    let dst = &left_trees[0].dst;
    let rdim = e.coords(src, dst, &right_trees[0].mat)?.len();
    let rmat = Mat::from_fn(rdim, cols.len(), |i, j| {
        e.coords(src, dst, &right_trees[j].mat).unwrap()[i].clone()
    });
    let lmat = Mat::from_fn(rdim, rows.len(), |i, j| {
        e.coords(src, dst, &left_trees[j].mat).unwrap()[i].clone()
    });
    let x = rmat
        .solve(&lmat)
        .ok_or_else(|| MoritaError::Structural("mixed associator solve failed".into()))?;
    let mat = x.transpose();
    let inv = mat
        .inverse()
        .ok_or_else(|| MoritaError::Structural("mixed associator block is singular".into()))?;
    Ok(crate::skeletal::FBlock { rows: rows.to_vec(), cols: cols.to_vec(), mat, inv })
}

impl<S: Scalar> StateSumTables<S> for ContextSkeletal<S> {
    fn label_count(&self) -> usize {
        self.labels.len()
    }
    fn dim(&self, label: usize) -> S {
        self.labels[label].dim.clone()
    }
    fn total_dsq(&self) -> S {
        self.dsq.clone()
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
        match self.f.get(&key) {
            None => S::zero(),
            Some(blk) => {
                let ri = blk.rows.iter().position(|&r| r == row);
                let ci = blk.cols.iter().position(|&c2| c2 == col);
                match (ri, ci) {
                    (Some(i), Some(j)) => blk.mat.at(i, j).clone(),
                    _ => S::zero(),
                }
            }
        }
    }
    fn f_inv_entry(
        &self,
        key: (usize, usize, usize, usize),
        row: (usize, usize, usize),
        col: (usize, usize, usize),
    ) -> S {
        match self.f.get(&key) {
            None => S::zero(),
            Some(blk) => {
                let ri = blk.cols.iter().position(|&r| r == row);
                let ci = blk.rows.iter().position(|&c| c == col);
                match (ri, ci) {
                    (Some(i), Some(j)) => blk.inv.at(i, j).clone(),
                    _ => S::zero(),
                }
            }
        }
    }
    fn edge_allowed(&self, label: usize, tail: usize, head: usize) -> bool {
        // an edge from a tail-colored vertex to a head-colored vertex
        // carries a 1-morphism from the head object to the tail object
        let (src, dst) = self.labels[label].corner.colors();
        src == head && dst == tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupTable;
    use crate::hopf::{Side, StructuredBialgebra};
    use crate::morita::build_context;
    use crate::repcat::SimpleTable;
    use crate::scalar::{C64, Tol};
    use crate::statesum::{bundled_triangulation, state_sum, EvalOptions};
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(777)
    }

    fn ctx_for(g: &GroupTable) -> MoritaContext<C64> {
        let h = StructuredBialgebra::<C64>::function_algebra(g);
        let table = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let pair = h.find_integrals(Side::Left).unwrap();
        let (frob, _) = crate::frobenius::regular_from_hopf(&h, &pair).unwrap();
        build_context(table, frob, Tol::default(), &mut rng()).unwrap()
    }

    #[test]
    fn z2_context_extraction() {
        let ctx = ctx_for(&GroupTable::cyclic(2));
        let data = ContextSkeletal::extract(&ctx, &mut rng()).unwrap();
        // 2 base simples + 1 generator + 1 dual generator + 2 opposite
        assert_eq!(data.labels.len(), 6);
        assert!(data.dsq.sub(&C64::from_i64(2)).abs() < 1e-9);
        // both diagonal corners give valid pointed tables
        for color in [COLOR_A, COLOR_B] {
            let corner = data.corner_data(color).unwrap();
            let checks = corner.validate(Tol::default());
            assert!(checks.all_pass(), "color {color}: {:?}", checks.failing());
            assert!(corner.dsq().sub(&C64::from_i64(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn z2_bicolored_labelings_agree() {
        let ctx = ctx_for(&GroupTable::cyclic(2));
        let data = ContextSkeletal::extract(&ctx, &mut rng()).unwrap();
        let tri = bundled_triangulation("s3_5tet").unwrap();
        let opts = EvalOptions::default();
        let all_a = state_sum(&tri, &data, &[COLOR_A; 5], &opts).unwrap();
        assert!((all_a.to_c64().re - 0.5).abs() < 1e-9, "{all_a:?}");
        // the uniform opposite coloring reproduces the opposite corner
        let all_b = state_sum(&tri, &data, &[COLOR_B; 5], &opts).unwrap();
        let b_corner = data.corner_data(COLOR_B).unwrap();
        let direct = state_sum(&tri, &b_corner, &[0; 5], &opts).unwrap();
        assert!(all_b.sub(&direct).abs() < 1e-9);
        // every two-coloring of the five vertices gives the same value
        for mask in 0u32..32 {
            let colors: Vec<usize> = (0..5).map(|v| ((mask >> v) & 1) as usize).collect();
            let val = state_sum(&tri, &data, &colors, &opts).unwrap();
            assert!(
                val.sub(&all_a).abs() < 1e-6,
                "coloring {colors:?}: {val:?} vs {all_a:?}"
            );
        }
    }

    #[test]
    fn s3_corner_state_sums_agree() {
        let ctx = ctx_for(&GroupTable::s3());
        let data = ContextSkeletal::extract(&ctx, &mut rng()).unwrap();
        let a_corner = data.corner_data(COLOR_A).unwrap();
        let b_corner = data.corner_data(COLOR_B).unwrap();
        assert!(a_corner.validate(Tol::default()).all_pass());
        assert!(b_corner.validate(Tol::default()).all_pass());
        let mut bdims: Vec<i64> =
            b_corner.dims.iter().map(|d| d.to_c64().re.round() as i64).collect();
        bdims.sort();
        assert_eq!(bdims, vec![1, 1, 2]);
        let opts = EvalOptions::default();
        for name in ["s3_5tet", "rp3", "lens_3_1"] {
            let tri = bundled_triangulation(name).unwrap();
            let va = state_sum(&tri, &a_corner, &vec![0; tri.n_vertices], &opts).unwrap();
            let vb = state_sum(&tri, &b_corner, &vec![0; tri.n_vertices], &opts).unwrap();
            assert!(va.sub(&vb).abs() < 1e-6, "{name}: {va:?} vs {vb:?}");
        }
    }
}
