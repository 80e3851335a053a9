//! Portable skeletal data for a fusion category: labels, duals, fusion
//! multiplicities, quantum dimensions, and the associator coefficients on
//! fusion-tree bases. Includes validators (pentagon among them), the
//! symmetrized 6j table, bundled example data, and extraction from the
//! concrete module-category backend.

use crate::groups::GroupTable;
use crate::mat::Mat;
use crate::repcat::{Channel, SimpleTable, WordCtx};
use crate::report::Checks;
use crate::scalar::{Scalar, ScalarJson, Tol};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SkeletalError {
    #[error("input error: {0}")]
    Input(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Rep(#[from] crate::repcat::RepError),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
}

/// One associator block: the change of basis between the two fusion-tree
/// bases of maps `d -> (a b) c` and `d -> a (b c)`.
#[derive(Clone)]
pub struct FBlock<S> {
    /// row index: inner label of the left tree with its two multiplicities
    pub rows: Vec<(usize, usize, usize)>,
    /// column index: inner label of the right tree with its multiplicities
    pub cols: Vec<(usize, usize, usize)>,
    pub mat: Mat<S>,
    pub inv: Mat<S>,
}

#[derive(Clone)]
pub struct SkeletalData<S> {
    pub names: Vec<String>,
    pub unit: usize,
    pub dual: Vec<usize>,
    pub dims: Vec<S>,
    pub fusion: HashMap<(usize, usize, usize), usize>,
    pub f: HashMap<(usize, usize, usize, usize), FBlock<S>>,
}

impl<S: Scalar> SkeletalData<S> {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn n(&self, a: usize, b: usize, c: usize) -> usize {
        *self.fusion.get(&(a, b, c)).unwrap_or(&0)
    }

    pub fn dsq(&self) -> S {
        let mut acc = S::zero();
        for d in &self.dims {
            acc = acc.add(&d.mul(d));
        }
        acc
    }

    /// Index sets of an associator block in the canonical order.
    pub fn block_rows(&self, a: usize, b: usize, c: usize, d: usize) -> Vec<(usize, usize, usize)> {
        let mut rows = Vec::new();
        for e in 0..self.len() {
            for mu in 0..self.n(a, b, e) {
                for nu in 0..self.n(e, c, d) {
                    rows.push((e, mu, nu));
                }
            }
        }
        rows
    }

    pub fn block_cols(&self, a: usize, b: usize, c: usize, d: usize) -> Vec<(usize, usize, usize)> {
        let mut cols = Vec::new();
        for f in 0..self.len() {
            for rho in 0..self.n(b, c, f) {
                for sigma in 0..self.n(a, f, d) {
                    cols.push((f, rho, sigma));
                }
            }
        }
        cols
    }

    pub fn f_entry(
        &self,
        a: usize,
        b: usize,
        c: usize,
        d: usize,
        row: (usize, usize, usize),
        col: (usize, usize, usize),
    ) -> S {
        match self.f.get(&(a, b, c, d)) {
            None => S::zero(),
            Some(block) => {
                let ri = block.rows.iter().position(|&r| r == row);
                let ci = block.cols.iter().position(|&c2| c2 == col);
                match (ri, ci) {
                    (Some(i), Some(j)) => block.mat.at(i, j).clone(),
                    _ => S::zero(),
                }
            }
        }
    }

    /// Per-invariant residuals: unit and dual constraints on the fusion
    /// rules, dimension identities, associator completeness and
    /// invertibility, and the pentagon identity.
    pub fn validate(&self, tol: Tol) -> Checks {
        let mut checks = Checks::new::<S>(tol);
        let n = self.len();
        let mut unit_ok = true;
        let mut dual_ok = true;
        for a in 0..n {
            dual_ok &= self.dual[self.dual[a]] == a;
            for b in 0..n {
                let want = if a == b { 1 } else { 0 };
                unit_ok &= self.n(a, self.unit, b) == want;
                unit_ok &= self.n(self.unit, a, b) == want;
            }
            for b in 0..n {
                let want = if b == self.dual[a] { 1 } else { 0 };
                dual_ok &= self.n(a, b, self.unit) == want;
            }
        }
        checks.add_bool("unit_fusion", unit_ok);
        checks.add_bool("dual_fusion", dual_ok);

        let mut dim_res: f64 = 0.0;
        for a in 0..n {
            dim_res = dim_res.max(self.dims[a].sub(&self.dims[self.dual[a]]).abs());
            for b in 0..n {
                let mut rhs = S::zero();
                for c in 0..n {
                    let m = self.n(a, b, c);
                    if m > 0 {
                        rhs = rhs.add(&S::from_i64(m as i64).mul(&self.dims[c]));
                    }
                }
                dim_res = dim_res.max(self.dims[a].mul(&self.dims[b]).sub(&rhs).abs());
            }
        }
        checks.add("dimension_identities", dim_res);
        checks.add(
            "unit_dimension",
            self.dims[self.unit].sub(&S::one()).abs(),
        );

        // Completeness and invertibility of the associator blocks.
        let mut complete = true;
        let mut missing = String::new();
        let mut inv_res: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let rows = self.block_rows(a, b, c, d);
                        let cols = self.block_cols(a, b, c, d);
                        if rows.len() != cols.len() {
                            complete = false;
                            continue;
                        }
                        if rows.is_empty() {
                            continue;
                        }
                        match self.f.get(&(a, b, c, d)) {
                            None => {
                                complete = false;
                                if missing.is_empty() {
                                    missing = format!("({a},{b},{c},{d})");
                                }
                            }
                            Some(blk) => {
                                if blk.rows != rows || blk.cols != cols {
                                    complete = false;
                                } else {
                                    inv_res = inv_res
                                        .max(blk.mat.mul(&blk.inv).residual(&Mat::identity(rows.len())));
                                }
                            }
                        }
                    }
                }
            }
        }
        checks.add_bool(
            &if missing.is_empty() {
                "f_complete".to_string()
            } else {
                format!("f_complete (missing {missing})")
            },
            complete,
        );
        checks.add("f_invertible", inv_res);
        checks.add("pentagon", self.pentagon_residual());
        checks
    }

    /// Largest residual of the pentagon identity over all admissible label
    /// and multiplicity tuples.
    pub fn pentagon_residual(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            worst = worst.max(self.pentagon_at(a, b, c, d, e));
                        }
                    }
                }
            }
        }
        worst
    }

    fn pentagon_at(&self, a: usize, b: usize, c: usize, d: usize, e: usize) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        // left-side tree indices
        for g in 0..n {
            for mu in 0..self.n(a, b, g) {
                for h in 0..n {
                    for nu in 0..self.n(g, c, h) {
                        for lam in 0..self.n(h, d, e) {
                            // final tree indices
                            for k in 0..n {
                                for rho in 0..self.n(c, d, k) {
                                    for l in 0..n {
                                        for tau in 0..self.n(b, k, l) {
                                            for om in 0..self.n(a, l, e) {
                                                let mut lhs = S::zero();
                                                for sig in 0..self.n(g, k, e) {
                                                    let f1 = self.f_entry(
                                                        g, c, d, e,
                                                        (h, nu, lam),
                                                        (k, rho, sig),
                                                    );
                                                    let f2 = self.f_entry(
                                                        a, b, k, e,
                                                        (g, mu, sig),
                                                        (l, tau, om),
                                                    );
                                                    lhs = lhs.add(&f1.mul(&f2));
                                                }
                                                let mut rhs = S::zero();
                                                for f in 0..n {
                                                    for pi in 0..self.n(b, c, f) {
                                                        for th in 0..self.n(a, f, h) {
                                                            let f1 = self.f_entry(
                                                                a, b, c, h,
                                                                (g, mu, nu),
                                                                (f, pi, th),
                                                            );
                                                            if f1.is_zero() {
                                                                continue;
                                                            }
                                                            for ka in 0..self.n(f, d, l) {
                                                                let f2 = self.f_entry(
                                                                    a, f, d, e,
                                                                    (h, th, lam),
                                                                    (l, ka, om),
                                                                );
                                                                if f2.is_zero() {
                                                                    continue;
                                                                }
                                                                let f3 = self.f_entry(
                                                                    b, c, d, l,
                                                                    (f, pi, ka),
                                                                    (k, rho, tau),
                                                                );
                                                                rhs = rhs.add(&f1.mul(&f2).mul(&f3));
                                                            }
                                                        }
                                                    }
                                                }
                                                worst = worst.max(lhs.sub(&rhs).abs());
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Tetrahedrally normalized 6j table derived from the associator and the
/// dimensions. The normalization divides each block entry by the square
/// root of the product of the two inner-label dimensions.
pub struct SixJ<S> {
    pub data: SkeletalData<S>,
    /// residual of invariance under the tetrahedral symmetry generators
    pub tetra_residual: f64,
}

pub fn symmetrized_6j<S: Scalar>(data: &SkeletalData<S>) -> Result<SixJ<S>, SkeletalError> {
    let six = |a: usize, b: usize, c: usize, d: usize, e: usize, f: usize| -> Result<S, SkeletalError> {
        let block = data.f_entry(a, b, c, d, (e, 0, 0), (f, 0, 0));
        let de_df = data.dims[e].mul(&data.dims[f]);
        let root = de_df.sqrt().ok_or_else(|| {
            SkeletalError::Structural(
                "dimension square root not representable; use the complex backend".into(),
            )
        })?;
        let inv = root
            .inv()
            .ok_or_else(|| SkeletalError::Structural("vanishing dimension".into()))?;
        Ok(block.mul(&inv))
    };
    // Tetrahedral symmetry on the multiplicity-free part: the symbol
    // attached to edge labels (01,12,23,03,02,13) = (a,b,c,d,e,f) is
    // invariant under relabeling the tetrahedron vertices, with edges
    // dualized when their direction flips. Two generators suffice.
    let n = data.len();
    let mut worst: f64 = 0.0;
    let mult_free = |a: usize, b: usize, c: usize| data.n(a, b, c) <= 1;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        for f in 0..n {
                            if data.n(a, b, e) == 0
                                || data.n(e, c, d) == 0
                                || data.n(b, c, f) == 0
                                || data.n(a, f, d) == 0
                            {
                                continue;
                            }
                            if !(mult_free(a, b, e)
                                && mult_free(e, c, d)
                                && mult_free(b, c, f)
                                && mult_free(a, f, d))
                            {
                                continue;
                            }
                            let base = six(a, b, c, d, e, f)?;
                            // rotation (0123) -> (1230): edges
                            // (01,12,23,03,02,13) -> (ab cd ef) with
                            // a'=b, b'=c, c'=dual d, d'=dual a, e'=f, f'=dual e
                            let rot = six(
                                b,
                                c,
                                data.dual[d],
                                data.dual[a],
                                f,
                                data.dual[e],
                            )?;
                            worst = worst.max(base.sub(&rot).abs());
                            // transposition (01): (a,b,c,d,e,f) ->
                            // (dual a, e, c, f, b, d)
                            let swap = six(data.dual[a], e, c, f, b, d)?;
                            worst = worst.max(base.sub(&swap).abs());
                        }
                    }
                }
            }
        }
    }
    Ok(SixJ { data: data.clone(), tetra_residual: worst })
}

// ---------------------------------------------------------------------------
// Bundled data.

/// Pointed data for a finite group with trivial associator.
pub fn vec_group<S: Scalar>(g: &GroupTable) -> SkeletalData<S> {
    let n = g.order();
    let names = (0..n).map(|i| format!("g{i}")).collect();
    let dual = (0..n).map(|i| g.inverse(i)).collect();
    let dims = vec![S::one(); n];
    let mut fusion = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            fusion.insert((a, b, g.mul[a][b]), 1);
        }
    }
    let mut data = SkeletalData { names, unit: g.identity, dual, dims, fusion, f: HashMap::new() };
    fill_f_blocks(&mut data, |_, _, _, _, _, _| S::one());
    data
}

/// Fills every admissible associator block from an entry rule (used for
/// multiplicity-free bundled tables).
fn fill_f_blocks<S: Scalar>(
    data: &mut SkeletalData<S>,
    entry: impl Fn(usize, usize, usize, usize, usize, usize) -> S,
) {
    let n = data.len();
    let mut blocks = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let rows = data.block_rows(a, b, c, d);
                    let cols = data.block_cols(a, b, c, d);
                    if rows.is_empty() || rows.len() != cols.len() {
                        continue;
                    }
                    let mat = Mat::from_fn(rows.len(), cols.len(), |i, j| {
                        entry(a, b, c, d, rows[i].0, cols[j].0)
                    });
                    let inv = mat.inverse().expect("bundled associator block invertible");
                    blocks.insert((a, b, c, d), FBlock { rows, cols, mat, inv });
                }
            }
        }
    }
    data.f = blocks;
}

/// The golden-ratio fusion category on two labels.
pub fn fibonacci<S: Scalar>() -> Result<SkeletalData<S>, SkeletalError> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let num = |x: f64| S::from_json(&ScalarJson::Complex { re: x, im: 0.0 });
    let d_tau = num(phi)?;
    let names = vec!["1".to_string(), "tau".to_string()];
    let mut fusion = HashMap::new();
    fusion.insert((0, 0, 0), 1);
    fusion.insert((0, 1, 1), 1);
    fusion.insert((1, 0, 1), 1);
    fusion.insert((1, 1, 0), 1);
    fusion.insert((1, 1, 1), 1);
    let mut data = SkeletalData {
        names,
        unit: 0,
        dual: vec![0, 1],
        dims: vec![S::one(), d_tau],
        fusion,
        f: HashMap::new(),
    };
    let inv_phi = num(1.0 / phi)?;
    let inv_sqrt_phi = num(1.0 / phi.sqrt())?;
    let neg_inv_phi = num(-1.0 / phi)?;
    fill_f_blocks(&mut data, |a, b, c, d, e, f| {
        if a == 1 && b == 1 && c == 1 && d == 1 {
            match (e, f) {
                (0, 0) => inv_phi.clone(),
                (0, 1) | (1, 0) => inv_sqrt_phi.clone(),
                (1, 1) => neg_inv_phi.clone(),
                _ => unreachable!(),
            }
        } else {
            S::one()
        }
    });
    Ok(data)
}

/// Associator blocks of the three-label data carrying a sign.
const ISING_NEGATIVE: [(usize, usize, usize, usize); 2] = [(1, 2, 1, 2), (2, 1, 2, 1)];

/// The three-label data with a dimension-root-two self-dual label.
pub fn ising<S: Scalar>() -> Result<SkeletalData<S>, SkeletalError> {
    let num = |x: f64| S::from_json(&ScalarJson::Complex { re: x, im: 0.0 });
    let s2 = num(2.0f64.sqrt())?;
    // labels: 1, sigma, psi
    let names = vec!["1".to_string(), "sigma".to_string(), "psi".to_string()];
    let mut fusion = HashMap::new();
    fusion.insert((0, 0, 0), 1);
    fusion.insert((0, 1, 1), 1);
    fusion.insert((0, 2, 2), 1);
    fusion.insert((1, 0, 1), 1);
    fusion.insert((2, 0, 2), 1);
    fusion.insert((1, 1, 0), 1);
    fusion.insert((1, 1, 2), 1);
    fusion.insert((1, 2, 1), 1);
    fusion.insert((2, 1, 1), 1);
    fusion.insert((2, 2, 0), 1);
    let mut data = SkeletalData {
        names,
        unit: 0,
        dual: vec![0, 1, 2],
        dims: vec![S::one(), s2, S::one()],
        fusion,
        f: HashMap::new(),
    };
    let inv_s2 = num(1.0 / 2.0f64.sqrt())?;
    let neg_inv_s2 = num(-1.0 / 2.0f64.sqrt())?;
    let neg_one = num(-1.0)?;
    fill_f_blocks(&mut data, |a, b, c, d, e, f| {
        if (a, b, c, d) == (1, 1, 1, 1) {
            // rows/cols indexed by (1, psi)
            match (e, f) {
                (0, 0) => inv_s2.clone(),
                (0, 2) | (2, 0) => inv_s2.clone(),
                (2, 2) => neg_inv_s2.clone(),
                _ => unreachable!(),
            }
        } else if ISING_NEGATIVE.contains(&(a, b, c, d)) {
            let _ = f;
            let _ = e;
            neg_one.clone()
        } else {
            S::one()
        }
    });
    Ok(data)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = ["vec_z2", "vec_z3", "vec_s3", "rep_s3", "fibonacci", "ising"];

pub fn builtin<S: Scalar>(name: &str) -> Result<SkeletalData<S>, SkeletalError> {
    match name {
        "vec_z2" => Ok(vec_group(&GroupTable::cyclic(2))),
        "vec_z3" => Ok(vec_group(&GroupTable::cyclic(3))),
        "vec_s3" => Ok(vec_group(&GroupTable::s3())),
        "fibonacci" => fibonacci(),
        "ising" => ising(),
        "rep_s3" => extract_rep_s3(),
        other => Err(SkeletalError::UnknownBuiltin(other.to_string())),
    }
}

fn extract_rep_s3<S: Scalar>() -> Result<SkeletalData<S>, SkeletalError> {
    if S::EXACT {
        return Err(SkeletalError::Structural(
            "rep_s3 extraction needs the complex backend".into(),
        ));
    }
    use rand::SeedableRng;
    let h = crate::hopf::StructuredBialgebra::<S>::group_algebra(&GroupTable::s3());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(600);
    let table = SimpleTable::irreps(&h, Tol::default(), &mut rng)
        .map_err(SkeletalError::Rep)?;
    let ctx = WordCtx::new(table);
    extract_from_words(&ctx)
}

// ---------------------------------------------------------------------------
// Extraction from the module-category backend.

/// Extracts skeletal data from a simple table through the tensor-word layer:
/// fusion multiplicities from pair decompositions, associator blocks from
/// expressing left trees in right-tree coordinates.
pub fn extract_from_words<S: Scalar>(ctx: &WordCtx<S>) -> Result<SkeletalData<S>, SkeletalError> {
    let t = &ctx.table;
    let n = t.len();
    let names = (0..n).map(|i| format!("x{i}")).collect();
    let dims: Vec<S> = (0..n)
        .map(|i| t.packs[i].eta.mul(&t.packs[i].e).at(0, 0).clone())
        .collect();
    let mut fusion = HashMap::new();
    let mut fusion_bases: HashMap<(usize, usize), Vec<Channel<S>>> = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            let chans = ctx.dec(&vec![a, b]).map_err(SkeletalError::Rep)?.channels;
            for c in 0..n {
                let m = chans.iter().filter(|ch| ch.simple == c).count();
                if m > 0 {
                    fusion.insert((a, b, c), m);
                }
            }
            fusion_bases.insert((a, b), chans);
        }
    }
    let mut data = SkeletalData {
        names,
        unit: t.unit_index,
        dual: t.dual_of.clone(),
        dims,
        fusion,
        f: HashMap::new(),
    };
    // Associator blocks: express each left tree in the right-tree basis of
    // the triple space through the word-channel coordinates.
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let rows = data.block_rows(a, b, c, d);
                    let cols = data.block_cols(a, b, c, d);
                    if rows.is_empty() {
                        continue;
                    }
                    if rows.len() != cols.len() {
                        return Err(SkeletalError::Structural(
                            "triple fusion space dimensions disagree".into(),
                        ));
                    }
                    let word = vec![a, b, c];
                    let rep_c_dim = ctx.part_dim(c);
                    let rep_a_dim = ctx.part_dim(a);
                    let mut left_coords: Vec<Vec<S>> = Vec::new();
                    for &(e, mu, nu) in &rows {
                        let t_ab: Vec<&Channel<S>> = fusion_bases[&(a, b)]
                            .iter()
                            .filter(|ch| ch.simple == e)
                            .collect();
                        let t_ed: Vec<&Channel<S>> = fusion_bases[&(e, c)]
                            .iter()
                            .filter(|ch| ch.simple == d)
                            .collect();
                        let tree = t_ab[mu]
                            .inj
                            .kron(&Mat::identity(rep_c_dim))
                            .mul(&t_ed[nu].inj);
                        left_coords
                            .push(ctx.coords(&vec![d], &word, &tree).map_err(SkeletalError::Rep)?);
                    }
                    let mut right_coords: Vec<Vec<S>> = Vec::new();
                    for &(f, rho, sigma) in &cols {
                        let t_bc: Vec<&Channel<S>> = fusion_bases[&(b, c)]
                            .iter()
                            .filter(|ch| ch.simple == f)
                            .collect();
                        let t_af: Vec<&Channel<S>> = fusion_bases[&(a, f)]
                            .iter()
                            .filter(|ch| ch.simple == d)
                            .collect();
                        let tree = Mat::identity(rep_a_dim)
                            .kron(&t_bc[rho].inj)
                            .mul(&t_af[sigma].inj);
                        right_coords
                            .push(ctx.coords(&vec![d], &word, &tree).map_err(SkeletalError::Rep)?);
                    }
                    // Solve R X = L columnwise; F = X^T.
                    let dim = left_coords[0].len();
                    let rmat = Mat::from_fn(dim, cols.len(), |i, j| right_coords[j][i].clone());
                    let lmat = Mat::from_fn(dim, rows.len(), |i, j| left_coords[j][i].clone());
                    let x = rmat.solve(&lmat).ok_or_else(|| {
                        SkeletalError::Structural("associator solve is rank deficient".into())
                    })?;
                    let mat = x.transpose();
                    let inv = mat.inverse().ok_or_else(|| {
                        SkeletalError::Structural("associator block is singular".into())
                    })?;
                    data.f.insert((a, b, c, d), FBlock { rows, cols, mat, inv });
                }
            }
        }
    }
    Ok(data)
}

// ---------------------------------------------------------------------------
// Serialization.

#[derive(Serialize, Deserialize)]
pub struct SkeletalJson {
    pub labels: Vec<String>,
    pub unit: String,
    pub dual: std::collections::BTreeMap<String, String>,
    pub n: Vec<(usize, usize, usize, usize)>,
    pub dims: std::collections::BTreeMap<String, ScalarJson>,
    pub f: Vec<FEntryJson>,
}

#[derive(Serialize, Deserialize)]
pub struct FEntryJson {
    pub key: [usize; 10],
    pub val: ScalarJson,
}

impl<S: Scalar> SkeletalData<S> {
    pub fn to_json(&self) -> SkeletalJson {
        let mut n = Vec::new();
        let mut keys: Vec<_> = self.fusion.iter().collect();
        keys.sort();
        for (&(a, b, c), &m) in keys {
            n.push((a, b, c, m));
        }
        let mut f = Vec::new();
        let mut fkeys: Vec<_> = self.f.keys().collect();
        fkeys.sort();
        for &(a, b, c, d) in fkeys {
            let blk = &self.f[&(a, b, c, d)];
            for (i, &(e, mu, nu)) in blk.rows.iter().enumerate() {
                for (j, &(ff, rho, sigma)) in blk.cols.iter().enumerate() {
                    let v = blk.mat.at(i, j);
                    if !v.is_zero() {
                        f.push(FEntryJson {
                            key: [a, b, c, d, e, ff, mu, nu, rho, sigma],
                            val: v.to_json(),
                        });
                    }
                }
            }
        }
        SkeletalJson {
            labels: self.names.clone(),
            unit: self.names[self.unit].clone(),
            dual: self
                .names
                .iter()
                .enumerate()
                .map(|(i, nm)| (nm.clone(), self.names[self.dual[i]].clone()))
                .collect(),
            n,
            dims: self
                .names
                .iter()
                .enumerate()
                .map(|(i, nm)| (nm.clone(), self.dims[i].to_json()))
                .collect(),
            f,
        }
    }

    pub fn from_json(j: &SkeletalJson) -> Result<Self, SkeletalError> {
        let n = j.labels.len();
        let index = |name: &str| -> Result<usize, SkeletalError> {
            j.labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| SkeletalError::Input(format!("unknown label `{name}`")))
        };
        let unit = index(&j.unit)?;
        let mut dual = vec![0; n];
        for (k, v) in &j.dual {
            dual[index(k)?] = index(v)?;
        }
        let mut dims = vec![S::zero(); n];
        for (k, v) in &j.dims {
            dims[index(k)?] = S::from_json(v)?;
        }
        let mut fusion = HashMap::new();
        for &(a, b, c, m) in &j.n {
            if a >= n || b >= n || c >= n {
                return Err(SkeletalError::Input("fusion index out of range".into()));
            }
            fusion.insert((a, b, c), m);
        }
        let mut data = SkeletalData {
            names: j.labels.clone(),
            unit,
            dual,
            dims,
            fusion,
            f: HashMap::new(),
        };
        // group entries into blocks
        let mut raw: HashMap<(usize, usize, usize, usize), Vec<([usize; 10], S)>> = HashMap::new();
        for e in &j.f {
            let k = (e.key[0], e.key[1], e.key[2], e.key[3]);
            raw.entry(k).or_default().push((e.key, S::from_json(&e.val)?));
        }
        for ((a, b, c, d), entries) in raw {
            let rows = data.block_rows(a, b, c, d);
            let cols = data.block_cols(a, b, c, d);
            let mut mat: Mat<S> = Mat::zero(rows.len(), cols.len());
            for (key, val) in entries {
                let row = (key[4], key[6], key[7]);
                let col = (key[5], key[8], key[9]);
                let i = rows
                    .iter()
                    .position(|&r| r == row)
                    .ok_or_else(|| SkeletalError::Input("inadmissible row key".into()))?;
                let jj = cols
                    .iter()
                    .position(|&cc| cc == col)
                    .ok_or_else(|| SkeletalError::Input("inadmissible column key".into()))?;
                mat.set(i, jj, val);
            }
            let inv = mat
                .inverse()
                .ok_or_else(|| SkeletalError::Input("singular associator block in file".into()))?;
            data.f.insert((a, b, c, d), FBlock { rows, cols, mat, inv });
        }
        Ok(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rat, C64};

    #[test]
    fn vec_z2_validates_exactly() {
        let d = vec_group::<Rat>(&GroupTable::cyclic(2));
        let checks = d.validate(Tol::default());
        assert!(checks.all_pass(), "{:?}", checks.failing());
        assert_eq!(checks.max_residual(), 0.0);
        assert_eq!(d.dsq(), Rat::from_i64(2));
    }

    #[test]
    fn vec_s3_validates() {
        let d = vec_group::<Rat>(&GroupTable::s3());
        assert!(d.validate(Tol::default()).all_pass());
        assert_eq!(d.dsq(), Rat::from_i64(6));
    }

    #[test]
    fn fibonacci_pentagon_tight() {
        let d = fibonacci::<C64>().unwrap();
        let checks = d.validate(Tol::default());
        assert!(checks.all_pass(), "{:?}", checks.failing());
        assert!(d.pentagon_residual() < 1e-12);
        // dimension identity d_tau^2 = 1 + d_tau
        let dt = d.dims[1];
        assert!(dt.mul(&dt).sub(&dt.add(&C64::one())).abs() < 1e-12);
        let dsq = d.dsq();
        assert!(dsq.sub(&C64::from_json(&ScalarJson::Complex { re: (5.0 + 5.0f64.sqrt()) / 2.0, im: 0.0 }).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_fault_breaks_pentagon() {
        let mut d = fibonacci::<C64>().unwrap();
        let blk = d.f.get_mut(&(1, 1, 1, 1)).unwrap();
        let v = blk.mat.at(1, 1).neg();
        blk.mat.set(1, 1, v);
        assert!(d.pentagon_residual() > 1e-3);
    }

    #[test]
    fn ising_pentagon_tight() {
        let d = ising::<C64>().unwrap();
        let checks = d.validate(Tol::default());
        assert!(checks.all_pass(), "{:?}", checks.failing());
        assert!(d.pentagon_residual() < 1e-12);
        assert!(d.dsq().sub(&C64::from_i64(4)).abs() < 1e-12);
    }

    #[test]
    fn six_j_normalization_fibonacci() {
        let d = fibonacci::<C64>().unwrap();
        let sj = symmetrized_6j(&d).unwrap();
        // all-tau outer labels with trivial inner pair: equals 1/d_tau
        let val = d.f_entry(1, 1, 1, 1, (0, 0, 0), (0, 0, 0));
        let dt = d.dims[1];
        assert!(val.sub(&dt.inv().unwrap()).abs() < 1e-12);
        assert!(sj.tetra_residual < 1e-9, "residual {}", sj.tetra_residual);
    }

    #[test]
    fn pointed_six_j_modulus_one() {
        let d = vec_group::<C64>(&GroupTable::s3());
        let sj = symmetrized_6j(&d).unwrap();
        assert!(sj.tetra_residual < 1e-9);
        for ((_, _, _, _), blk) in &d.f {
            for v in blk.mat.data() {
                assert!((v.abs() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extract_vec_z2_from_modules() {
        use rand::SeedableRng;
        let h = crate::hopf::StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng).unwrap();
        let ctx = WordCtx::new(t);
        let d = extract_from_words(&ctx).unwrap();
        let checks = d.validate(Tol::default());
        assert!(checks.all_pass(), "{:?}", checks.failing());
        assert_eq!(d.dsq(), Rat::from_i64(2));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn extract_rep_s3_builtin() {
        let d = builtin::<C64>("rep_s3").unwrap();
        let checks = d.validate(Tol::default());
        assert!(checks.all_pass(), "{:?}", checks.failing());
        assert!(d.dsq().sub(&C64::from_i64(6)).abs() < 1e-9);
        let mut dims: Vec<i64> = d.dims.iter().map(|x| x.to_c64().re.round() as i64).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
    }

    #[test]
    fn extract_vec_s3_pointed() {
        use rand::SeedableRng;
        let h = crate::hopf::StructuredBialgebra::<Rat>::function_algebra(&GroupTable::s3());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let t = SimpleTable::irreps(&h, Tol::default(), &mut rng).unwrap();
        let ctx = WordCtx::new(t);
        let d = extract_from_words(&ctx).unwrap();
        assert!(d.validate(Tol::default()).all_pass());
        assert_eq!(d.dsq(), Rat::from_i64(6));
        // pointed: six labels of dimension one, group fusion
        assert_eq!(d.len(), 6);
        assert!(d.dims.iter().all(|x| *x == Rat::from_i64(1)));
    }

    #[test]
    fn json_round_trip() {
        let d = fibonacci::<C64>().unwrap();
        let j = d.to_json();
        let d2 = SkeletalData::<C64>::from_json(&j).unwrap();
        assert!(d2.validate(Tol::default()).all_pass());
        let text = serde_json::to_string(&j).unwrap();
        let j2: SkeletalJson = serde_json::from_str(&text).unwrap();
        let d3 = SkeletalData::<C64>::from_json(&j2).unwrap();
        assert!(d3.pentagon_residual() < 1e-12);
    }
}
