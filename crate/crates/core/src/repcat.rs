//! The concrete category backend: modules over a structured algebra, hom
//! spaces by honest linear algebra, simple objects from splitting the
//! regular representation, duality with spherical normalization, and a
//! tensor-word layer that decomposes long products once and answers hom
//! queries through matched simple channels.

use crate::alg::AssocAlgebra;
use crate::hopf::StructuredBialgebra;
use crate::mat::Mat;
use crate::scalar::{Scalar, Tol};
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Alg(#[from] crate::alg::AlgError),
}

/// A module over the algebra part of a structured bialgebra: one action
/// matrix per basis element.
#[derive(Clone)]
pub struct Representation<S> {
    pub dim: usize,
    pub action: Vec<Mat<S>>,
}

impl<S: Scalar> Representation<S> {
    pub fn trivial(h: &StructuredBialgebra<S>) -> Self {
        let action = (0..h.n).map(|i| Mat::scalar(h.counit.at(0, i).clone())).collect();
        Representation { dim: 1, action }
    }

    pub fn regular(h: &StructuredBialgebra<S>) -> Self {
        let alg = h.algebra();
        Representation { dim: h.n, action: (0..h.n).map(|i| alg.left_mul(i)).collect() }
    }

    /// Tensor product action through the comultiplication.
    pub fn tensor(h: &StructuredBialgebra<S>, x: &Representation<S>, y: &Representation<S>) -> Self {
        let n = h.n;
        let dim = x.dim * y.dim;
        let mut action = Vec::with_capacity(n);
        for i in 0..n {
            let mut m: Mat<S> = Mat::zero(dim, dim);
            for p in 0..n {
                for q in 0..n {
                    let c = h.delta.at(p * n + q, i);
                    if c.is_zero() {
                        continue;
                    }
                    m = m.add(&x.action[p].kron(&y.action[q]).scale(c));
                }
            }
            action.push(m);
        }
        Representation { dim, action }
    }

    /// Dual module on the dual space via transpose-of-antipode.
    pub fn dual(h: &StructuredBialgebra<S>, x: &Representation<S>) -> Result<Self, RepError> {
        let s = h
            .antipode
            .as_ref()
            .ok_or_else(|| RepError::Unsupported("dual needs an antipode".into()))?;
        let n = h.n;
        let mut action = Vec::with_capacity(n);
        for i in 0..n {
            let mut m: Mat<S> = Mat::zero(x.dim, x.dim);
            for j in 0..n {
                let c = s.at(j, i);
                if c.is_zero() {
                    continue;
                }
                m = m.add(&x.action[j].scale(c));
            }
            action.push(m.transpose());
        }
        Ok(Representation { dim: x.dim, action })
    }

    /// Action of a general element given by coordinates.
    pub fn act(&self, coeffs: &Mat<S>) -> Mat<S> {
        let mut m: Mat<S> = Mat::zero(self.dim, self.dim);
        for i in 0..coeffs.rows {
            if coeffs.at(i, 0).is_zero() {
                continue;
            }
            m = m.add(&self.action[i].scale(coeffs.at(i, 0)));
        }
        m
    }

    /// Residual of the module axioms.
    pub fn validity_residual(&self, h: &StructuredBialgebra<S>) -> f64 {
        let n = h.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = self.action[i].mul(&self.action[j]);
                let mut rhs: Mat<S> = Mat::zero(self.dim, self.dim);
                for k in 0..n {
                    let c = h.m.at(k, i * n + j);
                    if c.is_zero() {
                        continue;
                    }
                    rhs = rhs.add(&self.action[k].scale(c));
                }
                worst = worst.max(lhs.residual(&rhs));
            }
        }
        worst = worst.max(self.act(&h.unit).residual(&Mat::identity(self.dim)));
        worst
    }
}

/// Basis of the intertwiner space Hom(x, y), by a direct null-space solve.
/// Deterministic: reduced echelon pivots.
pub fn hom_space<S: Scalar>(x: &Representation<S>, y: &Representation<S>) -> Vec<Mat<S>> {
    // T rho_x(b) = rho_y(b) T; flatten row-major: vec(A T B) = (A kron B^T) vec T.
    let (dx, dy) = (x.dim, y.dim);
    let idx = Mat::<S>::identity(dx);
    let idy = Mat::<S>::identity(dy);
    let mut stacked: Option<Mat<S>> = None;
    for i in 0..x.action.len() {
        let lhs = idy.kron(&x.action[i].transpose());
        let rhs = y.action[i].kron(&idx);
        let row = rhs.sub(&lhs);
        stacked = Some(match stacked {
            None => row,
            Some(s) => s.vjoin(&row),
        });
    }
    stacked
        .map(|s| {
            s.nullspace()
                .into_iter()
                .map(|v| Mat::from_fn(dy, dx, |r, c| v.at(r * dx + c, 0).clone()))
                .collect()
        })
        .unwrap_or_default()
}

/// Two-sided duality data for an object, in the balanced normalization where
/// both closed loops evaluate to the integer dimension.
#[derive(Clone)]
pub struct DualityPack<S> {
    pub dual: Representation<S>,
    /// coevaluation 1 -> X (x) X^
    pub e: Mat<S>,
    /// evaluation X^ (x) X -> 1
    pub d: Mat<S>,
    /// coevaluation 1 -> X^ (x) X
    pub eps: Mat<S>,
    /// evaluation X (x) X^ -> 1
    pub eta: Mat<S>,
}

pub fn duality_pack<S: Scalar>(
    h: &StructuredBialgebra<S>,
    x: &Representation<S>,
    tol: &Tol,
) -> Result<DualityPack<S>, RepError> {
    let s = h
        .antipode
        .as_ref()
        .ok_or_else(|| RepError::Unsupported("duality needs an antipode".into()))?;
    let s2 = s.mul(s).residual(&Mat::identity(h.n));
    let ok = if S::EXACT { s2 == 0.0 } else { tol.is_zero(s2) };
    if !ok {
        return Err(RepError::Unsupported(format!(
            "antipode is not involutive (residual {s2:.3e}); two-sided duality unavailable"
        )));
    }
    let dual = Representation::dual(h, x)?;
    let n = x.dim;
    let mut e: Mat<S> = Mat::zero(n * n, 1);
    let mut eps: Mat<S> = Mat::zero(n * n, 1);
    let mut d: Mat<S> = Mat::zero(1, n * n);
    let mut eta: Mat<S> = Mat::zero(1, n * n);
    for k in 0..n {
        e.set(k * n + k, 0, S::one());
        eps.set(k * n + k, 0, S::one());
        d.set(0, k * n + k, S::one());
        eta.set(0, k * n + k, S::one());
    }
    Ok(DualityPack { dual, e, d, eps, eta })
}

impl<S: Scalar> DualityPack<S> {
    /// Residual over the four triangular identities and the intertwiner
    /// property of all four structure maps.
    pub fn verify(&self, h: &StructuredBialgebra<S>, x: &Representation<S>) -> f64 {
        let n = x.dim;
        let id = Mat::<S>::identity(n);
        let mut worst: f64 = 0.0;
        // (id (x) d)(e (x) id) = id on X
        let t1 = id.kron(&self.d).mul(&self.e.kron(&id)).residual(&id);
        // (d (x) id)(id (x) e) = id on X^
        let t2 = self.d.kron(&id).mul(&id.kron(&self.e)).residual(&id);
        // (eta (x) id)(id (x) eps) = id on X
        let t3 = self.eta.kron(&id).mul(&id.kron(&self.eps)).residual(&id);
        // (id (x) eta)(eps (x) id) = id on X^
        let t4 = id.kron(&self.eta).mul(&self.eps.kron(&id)).residual(&id);
        worst = worst.max(t1).max(t2).max(t3).max(t4);
        // Intertwiner property.
        let xxd = Representation::tensor(h, x, &self.dual);
        let dxx = Representation::tensor(h, &self.dual, x);
        for i in 0..h.n 
        {
            let eps_i = h.counit.at(0, i).clone();
            worst = worst.max(xxd.action[i].mul(&self.e).residual(&self.e.scale(&eps_i)));
            worst = worst.max(dxx.action[i].mul(&self.eps).residual(&self.eps.scale(&eps_i)));
            worst = worst.max(self.d.mul(&dxx.action[i]).residual(&self.d.scale(&eps_i)));
            worst = worst.max(self.eta.mul(&xxd.action[i]).residual(&self.eta.scale(&eps_i)));
        }
        worst
    }

    /// Left/right traces of an endomorphism, the dimension, and the square
    /// of the dimension from the two closed loops. Errors when the two
    /// traces disagree or when the two loops fail to square the dimension.
    pub fn trace_and_dim(&self, f: &Mat<S>, tol: &Tol) -> Result<TraceReport<S>, RepError> {
        let n = f.rows;
        let id = Mat::<S>::identity(n);
        let tr_l = self.eta.mul(&f.kron(&id)).mul(&self.e).at(0, 0).clone();
        let tr_r = self.d.mul(&id.kron(f)).mul(&self.eps).at(0, 0).clone();
        let dim = self.eta.mul(&self.e).at(0, 0).clone();
        let d2 = self.eta.mul(&self.e).at(0, 0).mul(self.d.mul(&self.eps).at(0, 0));
        let spher = tr_l.sub(&tr_r).abs();
        let square = d2.sub(&dim.mul(&dim)).abs();
        let bad = |r: f64| if S::EXACT { r != 0.0 } else { !tol.is_zero(r) };
        if bad(spher) {
            return Err(RepError::Structural(format!(
                "left and right traces disagree ({spher:.3e})"
            )));
        }
        if bad(square) {
            return Err(RepError::Structural(format!(
                "loop values do not square the dimension ({square:.3e})"
            )));
        }
        Ok(TraceReport { tr_l, tr_r, dim, d2 })
    }
}

pub struct TraceReport<S> {
    pub tr_l: S,
    pub tr_r: S,
    pub dim: S,
    pub d2: S,
}

/// Explicit injections/projections of one isotypic family.
#[derive(Clone)]
pub struct Channel<S> {
    pub simple: usize,
    /// injection X_simple -> X
    pub inj: Mat<S>,
    /// projection X -> X_simple, biorthogonal to the injections
    pub proj: Mat<S>,
}

/// The list of pairwise non-isomorphic simples of the module category,
/// obtained by splitting the regular representation.
pub struct SimpleTable<S> {
    pub h: StructuredBialgebra<S>,
    pub simples: Vec<Representation<S>>,
    pub packs: Vec<DualityPack<S>>,
    /// index of the dual simple
    pub dual_of: Vec<usize>,
    pub unit_index: usize,
    tol: Tol,
}

impl<S: Scalar> SimpleTable<S> {
    /// Finds all simples inside the regular representation.
    pub fn irreps(h: &StructuredBialgebra<S>, tol: Tol, rng: &mut ChaCha8Rng) -> Result<Self, RepError> {
        let reg = Representation::regular(h);
        let basis = hom_space(&reg, &reg);
        if basis.is_empty() {
            return Err(RepError::Structural("endomorphisms of the regular module vanish".into()));
        }
        let coordizer = Coordizer::new(&basis);
        let unit_coords = coordizer.coords(&Mat::identity(reg.dim)).ok_or_else(|| {
            RepError::Structural("identity not in the computed endomorphism algebra".into())
        })?;
        let alg = AssocAlgebra::from_mul(basis.len(), unit_coords, |a, b| {
            let ma = combine(&basis, a);
            let mb = combine(&basis, b);
            coordizer.coords(&ma.mul(&mb)).expect("algebra closed under composition")
        });
        let prims = alg.primitive_idempotents(rng)?;
        let mut simples: Vec<Representation<S>> = Vec::new();
        for p in &prims {
            let pm = combine(&basis, p);
            let cols = pm.col_space_basis();
            if cols.is_empty() {
                continue;
            }
            let mut b = cols[0].clone();
            for c in cols.iter().skip(1) {
                b = b.hjoin(c);
            }
            let mut action = Vec::with_capacity(h.n);
            let mut ok = true;
            for i in 0..h.n {
                match b.solve(&reg.action[i].mul(&b)) {
                    Some(a) => action.push(a),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                return Err(RepError::Structural("idempotent image is not invariant".into()));
            }
            let cand = Representation { dim: b.cols, action };
            if simples.iter().all(|s| hom_space(s, &cand).is_empty()) {
                simples.push(cand);
            }
        }
        // Deterministic ordering: by dimension, then by discovery order.
        let mut order: Vec<usize> = (0..simples.len()).collect();
        order.sort_by_key(|&i| simples[i].dim);
        let simples: Vec<_> = order.into_iter().map(|i| simples[i].clone()).collect();

        // Completeness: multiplicities in the regular module account for its
        // dimension.
        let mut total = 0usize;
        for s in &simples {
            let mult = hom_space(s, &reg).len();
            total += mult * s.dim;
        }
        if total != h.n {
            return Err(RepError::Structural(format!(
                "regular module decomposes into {total} of {} dimensions; table incomplete",
                h.n
            )));
        }
        // Simplicity and disjointness.
        for (i, s) in simples.iter().enumerate() {
            if hom_space(s, s).len() != 1 {
                return Err(RepError::Structural(format!(
                    "endomorphism algebra of simple {i} has dimension {} (not split over this backend)",
                    hom_space(s, s).len()
                )));
            }
            for (j, t) in simples.iter().enumerate() {
                if i != j && !hom_space(s, t).is_empty() {
                    return Err(RepError::Structural("simples are not mutually disjoint".into()));
                }
            }
        }
        let mut packs = Vec::new();
        for s in &simples {
            let pack = duality_pack(h, s, &tol)?;
            packs.push(pack);
        }
        let mut dual_of = vec![usize::MAX; simples.len()];
        for (i, p) in packs.iter().enumerate() {
            let mut found = None;
            for (j, s) in simples.iter().enumerate() {
                if !hom_space(&p.dual, s).is_empty() {
                    found = Some(j);
                    break;
                }
            }
            dual_of[i] = found.ok_or_else(|| {
                RepError::Structural("dual of a simple is not in the table".into())
            })?;
        }
        let unit_index = {
            let triv = Representation::trivial(h);
            simples
                .iter()
                .position(|s| !hom_space(&triv, s).is_empty())
                .ok_or_else(|| RepError::Structural("trivial module missing from table".into()))?
        };
        Ok(SimpleTable { h: h.clone(), simples, packs, dual_of, unit_index, tol })
    }

    pub fn len(&self) -> usize {
        self.simples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simples.is_empty()
    }

    /// Multiplicities of each simple inside `x`, with explicit biorthogonal
    /// injection/projection families. Errors when dimensions do not add up.
    pub fn decompose(&self, x: &Representation<S>) -> Result<Vec<Channel<S>>, RepError> {
        let mut channels = Vec::new();
        let mut total = 0usize;
        for (i, s) in self.simples.iter().enumerate() {
            let injs = hom_space(s, x);
            if injs.is_empty() {
                continue;
            }
            let projs = hom_space(x, s);
            if projs.len() != injs.len() {
                return Err(RepError::Structural(
                    "hom spaces in the two directions have different dimensions".into(),
                ));
            }
            let k = injs.len();
            // Gram matrix of composites proj_b inj_a = c id.
            let gram = Mat::from_fn(k, k, |b, a| {
                let comp = projs[b].mul(&injs[a]);
                scalar_of(&comp)
            });
            let ginv = gram.inverse().ok_or_else(|| {
                RepError::Structural("injection/projection pairing is degenerate".into())
            })?;
            for a in 0..k {
                let mut proj: Mat<S> = Mat::zero(s.dim, x.dim);
                for b in 0..k {
                    proj = proj.add(&projs[b].scale(ginv.at(a, b)));
                }
                channels.push(Channel { simple: i, inj: injs[a].clone(), proj });
            }
            total += k * s.dim;
        }
        if total != x.dim {
            return Err(RepError::Structural(format!(
                "decomposition covers {total} of {} dimensions (incomplete table?)",
                x.dim
            )));
        }
        // Completeness residual: sum inj proj = id.
        let mut acc: Mat<S> = Mat::zero(x.dim, x.dim);
        for c in &channels {
            acc = acc.add(&c.inj.mul(&c.proj));
        }
        let res = acc.residual(&Mat::identity(x.dim));
        let ok = if S::EXACT { res == 0.0 } else { self.tol.is_zero_rel(res, 1.0) };
        if !ok {
            return Err(RepError::Structural(format!("resolution of identity fails ({res:.3e})")));
        }
        Ok(channels)
    }

    /// Multiplicity vector of `x` against the table.
    pub fn multiplicities(&self, x: &Representation<S>) -> Vec<usize> {
        self.simples.iter().map(|s| hom_space(s, x).len()).collect()
    }

    /// Sum of squared dimensions over the simples.
    pub fn global_dimension(&self) -> S {
        let mut acc = S::zero();
        for p in &self.packs {
            let d2 = p.eta.mul(&p.e).at(0, 0).mul(p.d.mul(&p.eps).at(0, 0));
            acc = acc.add(&d2);
        }
        acc
    }
}

/// Extracts the scalar from a matrix expected to be c * id.
pub fn scalar_of<S: Scalar>(m: &Mat<S>) -> S {
    m.scalar_identity_part().0
}

/// Linear combination of basis matrices.
pub fn combine<S: Scalar>(basis: &[Mat<S>], coeffs: &[S]) -> Mat<S> {
    let mut out: Mat<S> = Mat::zero(basis[0].rows, basis[0].cols);
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            out = out.add(&b.scale(c));
        }
    }
    out
}

/// Expresses matrices in a fixed basis by solving against stacked columns.
pub struct Coordizer<S> {
    stacked: Mat<S>,
}

impl<S: Scalar> Coordizer<S> {
    pub fn new(basis: &[Mat<S>]) -> Self {
        let mut stacked: Mat<S> = Mat::zero(basis[0].rows * basis[0].cols, basis.len());
        for (j, b) in basis.iter().enumerate() {
            for (i, v) in b.vec().into_iter().enumerate() {
                stacked.set(i, j, v);
            }
        }
        Coordizer { stacked }
    }

    pub fn coords(&self, m: &Mat<S>) -> Option<Vec<S>> {
        let v = Mat::col_vec(&m.vec());
        self.stacked.solve(&v).map(|x| x.vec())
    }
}

// ---------------------------------------------------------------------------
// Tensor words with cached decompositions.

/// A word is a product of registered parts; part 0..k are the simples of the
/// table, later indices are auxiliary objects registered by the caller.
pub type Word = Vec<usize>;

pub struct WordCtx<S> {
    pub table: SimpleTable<S>,
    aux: Vec<Representation<S>>,
    pair_cache: RefCell<HashMap<(usize, usize), Vec<Channel<S>>>>,
    word_cache: RefCell<HashMap<Word, DecObj<S>>>,
}

/// Decomposition of a word object into simple channels.
#[derive(Clone)]
pub struct DecObj<S> {
    pub dim: usize,
    pub channels: Vec<Channel<S>>,
}

impl<S: Scalar> WordCtx<S> {
    pub fn new(table: SimpleTable<S>) -> Self {
        WordCtx {
            table,
            aux: Vec::new(),
            pair_cache: RefCell::new(HashMap::new()),
            word_cache: RefCell::new(HashMap::new()),
        }
    }

    /// Registers an auxiliary (possibly non-simple) object; returns its part id.
    pub fn register(&mut self, rep: Representation<S>) -> usize {
        self.aux.push(rep);
        self.table.len() + self.aux.len() - 1
    }

    pub fn part_rep(&self, part: usize) -> &Representation<S> {
        if part < self.table.len() {
            &self.table.simples[part]
        } else {
            &self.aux[part - self.table.len()]
        }
    }

    pub fn part_dim(&self, part: usize) -> usize {
        self.part_rep(part).dim
    }

    pub fn word_dim(&self, word: &Word) -> usize {
        word.iter().map(|&p| self.part_dim(p)).product()
    }

    fn pair_channels(&self, i: usize, j: usize) -> Result<Vec<Channel<S>>, RepError> {
        if let Some(c) = self.pair_cache.borrow().get(&(i, j)) {
            return Ok(c.clone());
        }
        let prod = Representation::tensor(&self.table.h, &self.table.simples[i], &self.table.simples[j]);
        let chans = self.table.decompose(&prod)?;
        self.pair_cache.borrow_mut().insert((i, j), chans.clone());
        Ok(self.pair_cache.borrow()[&(i, j)].clone())
    }

    /// Decomposition of a part into simples (identity channels for simples).
    fn part_channels(&self, part: usize) -> Result<Vec<Channel<S>>, RepError> {
        if part < self.table.len() {
            let d = self.table.simples[part].dim;
            return Ok(vec![Channel { simple: part, inj: Mat::identity(d), proj: Mat::identity(d) }]);
        }
        self.table.decompose(&self.aux[part - self.table.len()])
    }

    /// Decomposition of a word, built left to right through cached pairwise
    /// fusions.
    pub fn dec(&self, word: &Word) -> Result<DecObj<S>, RepError> {
        if let Some(d) = self.word_cache.borrow().get(word) {
            return Ok(d.clone());
        }
        let d = self.dec_uncached(word)?;
        self.word_cache.borrow_mut().insert(word.clone(), d.clone());
        Ok(d)
    }

    fn dec_uncached(&self, word: &Word) -> Result<DecObj<S>, RepError> {
        if word.is_empty() {
            let unit = self.table.unit_index;
            let d = self.table.simples[unit].dim;
            debug_assert_eq!(d, 1);
            return Ok(DecObj {
                dim: 1,
                channels: vec![Channel { simple: unit, inj: Mat::identity(1), proj: Mat::identity(1) }],
            });
        }
        if word.len() == 1 {
            let chans = self.part_channels(word[0])?;
            return Ok(DecObj { dim: self.part_dim(word[0]), channels: chans });
        }
        let prefix: Word = word[..word.len() - 1].to_vec();
        let last = word[word.len() - 1];
        let pre = self.dec(&prefix)?;
        let last_ch = self.part_channels(last)?;
        let last_dim = self.part_dim(last);
        let mut channels = Vec::new();
        for pc in &pre.channels {
            for lc in &last_ch {
                for fc in self.pair_channels(pc.simple, lc.simple)?.iter() {
                    let inj = pc.inj.kron(&lc.inj).mul(&fc.inj);
                    let proj = fc.proj.mul(&pc.proj.kron(&lc.proj));
                    channels.push(Channel { simple: fc.simple, inj, proj });
                }
            }
        }
        Ok(DecObj { dim: pre.dim * last_dim, channels })
    }

    /// Basis of the hom space between two word objects through matched
    /// simple channels; element order is deterministic.
    pub fn hom_basis(&self, src: &Word, dst: &Word) -> Result<Vec<Mat<S>>, RepError> {
        let a = self.dec(src)?;
        let b = self.dec(dst)?;
        let mut out = Vec::new();
        for ca in &a.channels {
            for cb in &b.channels {
                if ca.simple == cb.simple {
                    out.push(cb.inj.mul(&ca.proj));
                }
            }
        }
        Ok(out)
    }

    pub fn hom_dim(&self, src: &Word, dst: &Word) -> Result<usize, RepError> {
        let a = self.dec(src)?;
        let b = self.dec(dst)?;
        let mut count = 0;
        for ca in &a.channels {
            for cb in &b.channels {
                if ca.simple == cb.simple {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Coordinates of a morphism `m: src -> dst` in the channel basis.
    pub fn coords(&self, src: &Word, dst: &Word, m: &Mat<S>) -> Result<Vec<S>, RepError> {
        let a = self.dec(src)?;
        let b = self.dec(dst)?;
        let mut out = Vec::new();
        for ca in &a.channels {
            for cb in &b.channels {
                if ca.simple == cb.simple {
                    let comp = cb.proj.mul(m).mul(&ca.inj);
                    out.push(scalar_of(&comp));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupTable;
    use crate::scalar::{Rat, C64};
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(20240917)
    }

    #[test]
    fn irreps_function_algebra_s3() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.simples.iter().all(|s| s.dim == 1));
        assert_eq!(t.global_dimension(), Rat::from_i64(6));
    }

    #[test]
    fn irreps_function_algebra_z2() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.global_dimension(), Rat::from_i64(2));
        // regular module decomposes with multiplicity one each
        let reg = Representation::regular(&h);
        assert_eq!(t.multiplicities(&reg), vec![1, 1]);
    }

    #[test]
    fn irreps_group_algebra_s3_complex() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let mut dims: Vec<usize> = t.simples.iter().map(|s| s.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
        assert!(t.global_dimension().sub(&C64::from_i64(6)).abs() < 1e-9);
    }

    #[test]
    fn irreps_group_algebra_s3_exact() {
        // S3 has a rational character table, so the exact backend splits it.
        let h = StructuredBialgebra::<Rat>::group_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let mut dims: Vec<usize> = t.simples.iter().map(|s| s.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
    }

    #[test]
    fn hom_space_dimensions() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let std = t.simples.iter().find(|s| s.dim == 2).unwrap();
        // End of a simple is one-dimensional; distinct simples are disjoint.
        assert_eq!(hom_space(std, std).len(), 1);
        let triv = &t.simples[t.unit_index];
        assert!(hom_space(std, triv).is_empty());
        // std (x) std = triv + sign + std
        let prod = Representation::tensor(&h, std, std);
        assert_eq!(hom_space(std, &prod).len(), 1);
        assert_eq!(t.multiplicities(&prod), vec![1, 1, 1]);
    }

    #[test]
    fn tensor_with_trivial_is_identity_like() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(3));
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let triv = Representation::trivial(&h);
        for s in &t.simples {
            let p = Representation::tensor(&h, s, &triv);
            assert_eq!(hom_space(s, &p).len(), 1);
        }
    }

    #[test]
    fn deltas_multiply_as_group() {
        // delta_g (x) delta_h in Rep(F(G)) is delta_{gh}.
        let g = GroupTable::cyclic(3);
        let h = StructuredBialgebra::<Rat>::function_algebra(&g);
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        // identify each simple with its group element: the simple on which
        // delta_x acts by 1.
        let label = |s: &Representation<Rat>| {
            (0..3).find(|&x| s.action[x].at(0, 0) == &Rat::from_i64(1)).unwrap()
        };
        for a in &t.simples {
            for b in &t.simples {
                let prod = Representation::tensor(&h, a, b);
                let expect = g.mul[label(a)][label(b)];
                let hit = t
                    .simples
                    .iter()
                    .position(|s| !hom_space(s, &prod).is_empty())
                    .unwrap();
                assert_eq!(label(&t.simples[hit]), expect);
            }
        }
    }

    #[test]
    fn duality_pack_verifies_and_gives_integer_dims() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        for (s, p) in t.simples.iter().zip(&t.packs) {
            assert!(p.verify(&h, s) < 1e-9);
            let rep = p.trace_and_dim(&Mat::identity(s.dim), &Tol::default()).unwrap();
            assert!(rep.tr_l.sub(&rep.tr_r).abs() < 1e-9);
            assert!(rep.dim.sub(&C64::from_i64(s.dim as i64)).abs() < 1e-9);
            assert!(rep.d2.sub(&C64::from_i64((s.dim * s.dim) as i64)).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_dims_are_integers() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        for (s, p) in t.simples.iter().zip(&t.packs) {
            let rep = p.trace_and_dim(&Mat::identity(s.dim), &Tol::default()).unwrap();
            assert_eq!(rep.dim, Rat::from_i64(s.dim as i64));
            assert_eq!(rep.tr_l, rep.tr_r);
        }
    }

    #[test]
    fn projector_trace_gives_summand_dimension() {
        // the trace of an isotypic projector counts the dimension of the
        // summand it projects onto
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let std = t.simples.iter().position(|s| s.dim == 2).unwrap();
        let x = Representation::tensor(&h, &t.simples[std], &t.simples[std]);
        let pack = duality_pack(&h, &x, &Tol::default()).unwrap();
        for ch in t.decompose(&x).unwrap() {
            let proj = ch.inj.mul(&ch.proj);
            let rep = pack.trace_and_dim(&proj, &Tol::default()).unwrap();
            let expect = C64::from_i64(t.simples[ch.simple].dim as i64);
            assert!(rep.tr_l.sub(&expect).abs() < 1e-9);
        }
    }

    #[test]
    fn dual_of_delta_is_inverse() {
        let g = GroupTable::s3();
        let h = StructuredBialgebra::<Rat>::function_algebra(&g);
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let label = |s: &Representation<Rat>| {
            (0..6).find(|&x| s.action[x].at(0, 0) == &Rat::from_i64(1)).unwrap()
        };
        for (i, s) in t.simples.iter().enumerate() {
            let dual_label = label(&t.simples[t.dual_of[i]]);
            assert_eq!(dual_label, g.inverse(label(s)));
        }
    }

    #[test]
    fn frobenius_reciprocity_and_hom_symmetry() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        for i in 0..t.len() {
            for j in 0..t.len() {
                for k in 0..t.len() {
                    let xy = Representation::tensor(&h, &t.simples[i], &t.simples[j]);
                    let z_ydual =
                        Representation::tensor(&h, &t.simples[k], &t.packs[j].dual);
                    let lhs = hom_space(&xy, &t.simples[k]).len();
                    let rhs = hom_space(&t.simples[i], &z_ydual).len();
                    assert_eq!(lhs, rhs, "reciprocity at ({i},{j},{k})");
                }
                let a = hom_space(&t.simples[i], &t.simples[j]).len();
                let b = hom_space(&t.simples[j], &t.simples[i]).len();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn word_channels_match_direct_hom() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng()).unwrap();
        let std = t.simples.iter().position(|s| s.dim == 2).unwrap();
        let ctx = WordCtx::new(t);
        let w1: Word = vec![std, std];
        let w2: Word = vec![std];
        let basis = ctx.hom_basis(&w1, &w2).unwrap();
        assert_eq!(basis.len(), 1);
        // the channel basis elements really intertwine
        let h = &ctx.table.h;
        let x = Representation::tensor(h, &ctx.table.simples[std], &ctx.table.simples[std]);
        let y = &ctx.table.simples[std];
        for i in 0..h.n {
            let r = basis[0].mul(&x.action[i]).residual(&y.action[i].mul(&basis[0]));
            assert!(r < 1e-9);
        }
        // coordinates round-trip
        let coords = ctx.coords(&w1, &w2, &basis[0]).unwrap();
        let back = combine(&basis, &coords);
        assert!(back.residual(&basis[0]) < 1e-9);
    }

    #[test]
    fn big_word_dimensions() {
        let hh = StructuredBialgebra::<C64>::function_algebra(&GroupTable::s3());
        let t = SimpleTable::irreps(&hh, Tol::default(), &mut rng()).unwrap();
        let mut ctx = WordCtx::new(t);
        let q = Representation::regular(&hh);
        let qid = ctx.register(q);
        // Q (x) Q (x) Q decomposes into 36 copies of each simple... total 216 channels
        let w: Word = vec![qid, qid, qid];
        let dec = ctx.dec(&w).unwrap();
        assert_eq!(dec.dim, 216);
        assert_eq!(dec.channels.len(), 216);
        assert_eq!(ctx.hom_dim(&vec![qid], &w).unwrap(), 216 / 6 * 6 * 6 / 6);
    }
}
