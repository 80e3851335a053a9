//! Splitting finite-dimensional associative algebras into matrix blocks.
//!
//! An algebra is presented abstractly by structure constants on a basis.
//! Idempotents are found from elements with at least one simple root of
//! their minimal polynomial: if `p = (x - r) h` with `h(r) != 0` then
//! `h(z)/h(r)` is an idempotent. Over the rationals only rational roots are
//! usable, which restricts the exact backend to algebras split over Q; the
//! floating backend finds roots numerically (Durand-Kerner).

use crate::mat::Mat;
use crate::scalar::{Scalar, C64};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgError {
    #[error("algebra does not split over the exact backend (block of dim {0} has no usable idempotent)")]
    NotSplit(usize),
    #[error("idempotent search did not converge")]
    NoConvergence,
    #[error("structure constants are inconsistent: {0}")]
    Inconsistent(String),
}

/// Associative unital algebra by structure constants. `left_mul[i]` is the
/// matrix of left multiplication by basis element `i` acting on coordinates.
#[derive(Clone)]
pub struct AssocAlgebra<S> {
    pub dim: usize,
    pub left_mul: Vec<Mat<S>>,
    pub unit: Vec<S>,
}

impl<S: Scalar> AssocAlgebra<S> {
    /// Builds from a multiplication closure on coordinate vectors.
    pub fn from_mul(
        dim: usize,
        unit: Vec<S>,
        mul: impl Fn(&[S], &[S]) -> Vec<S>,
    ) -> Self {
        let mut left_mul = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut ei = vec![S::zero(); dim];
            ei[i] = S::one();
            let mut m = Mat::zero(dim, dim);
            for j in 0..dim {
                let mut ej = vec![S::zero(); dim];
                ej[j] = S::one();
                let prod = mul(&ei, &ej);
                for (k, v) in prod.into_iter().enumerate() {
                    m.set(k, j, v);
                }
            }
            left_mul.push(m);
        }
        AssocAlgebra { dim, left_mul, unit }
    }

    pub fn mul(&self, a: &[S], b: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let col = self.left_mul[i].mul(&Mat::col_vec(b));
            for k in 0..self.dim {
                out[k] = out[k].add(&ai.mul(col.at(k, 0)));
            }
        }
        out
    }

    /// Monic minimal polynomial of `z` (coefficients low-to-high, last = 1),
    /// computed from the first linear dependence among powers of `z`.
    pub fn min_poly(&self, z: &[S]) -> Vec<S> {
        let mut powers: Vec<Vec<S>> = vec![self.unit.clone()];
        loop {
            let last = powers.last().unwrap();
            let next = self.mul(z, last);
            // Solve stacked [p0 .. pk] c = next.
            let k = powers.len();
            let mut m = Mat::zero(self.dim, k);
            for (j, p) in powers.iter().enumerate() {
                for i in 0..self.dim {
                    m.set(i, j, p[i].clone());
                }
            }
            if let Some(c) = m.solve(&Mat::col_vec(&next)) {
                // z^k = sum c_j z^j  =>  min poly = x^k - sum c_j x^j.
                let mut coeffs = vec![S::zero(); k + 1];
                for j in 0..k {
                    coeffs[j] = c.at(j, 0).neg();
                }
                coeffs[k] = S::one();
                return coeffs;
            }
            powers.push(next);
            if powers.len() > self.dim + 1 {
                // Cannot happen for consistent structure constants.
                panic!("minimal polynomial search exceeded algebra dimension");
            }
        }
    }

    /// Evaluates a polynomial (low-to-high coefficients) at the element `z`.
    pub fn eval_poly(&self, coeffs: &[S], z: &[S]) -> Vec<S> {
        let mut acc = vec![S::zero(); self.dim];
        for c in coeffs.iter().rev() {
            acc = self.mul(z, &acc);
            for k in 0..self.dim {
                acc[k] = acc[k].add(&c.mul(&self.unit[k]));
            }
        }
        acc
    }

    /// Center of the algebra: elements commuting with every basis element.
    pub fn center_basis(&self) -> Vec<Vec<S>> {
        // [z, b_i] = 0 for all i: (L_i - R_i) z = 0 where R_i is right mult.
        let mut rows: Vec<Mat<S>> = Vec::new();
        for i in 0..self.dim {
            let li = &self.left_mul[i];
            // Right multiplication by b_i as a matrix.
            let mut ri = Mat::zero(self.dim, self.dim);
            for j in 0..self.dim {
                let mut ej = vec![S::zero(); self.dim];
                ej[j] = S::one();
                let mut ei = vec![S::zero(); self.dim];
                ei[i] = S::one();
                let prod = self.mul(&ej, &ei);
                for (k, v) in prod.into_iter().enumerate() {
                    ri.set(k, j, v);
                }
            }
            rows.push(li.sub(&ri));
        }
        let mut stacked = rows[0].clone();
        for r in rows.iter().skip(1) {
            stacked = stacked.vjoin(r);
        }
        stacked.nullspace().into_iter().map(|v| v.vec()).collect()
    }

    fn is_idempotent(&self, e: &[S], eps: f64) -> bool {
        let e2 = self.mul(e, e);
        crate::scalar::max_abs_diff(&e2, e) <= eps
    }

    /// Complete list of orthogonal primitive idempotents summing to the unit.
    pub fn primitive_idempotents(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<S>>, AlgError> {
        let mut done: Vec<Vec<S>> = Vec::new();
        let mut queue: Vec<Vec<S>> = vec![self.unit.clone()];
        let mut guard = 0usize;
        while let Some(e) = queue.pop() {
            guard += 1;
            if guard > 64 * self.dim + 64 {
                return Err(AlgError::NoConvergence);
            }
            match self.split_once(&e, rng)? {
                Some((p, q)) => {
                    queue.push(p);
                    queue.push(q);
                }
                None => done.push(e),
            }
        }
        done.sort_by(|a, b| {
            let key = |v: &Vec<S>| v.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>();
            key(a).cmp(&key(b))
        });
        Ok(done)
    }

    /// Central primitive idempotents (matrix-block units). Returned with the
    /// block dimension `dim(eAe)`.
    pub fn block_idempotents(
        &self,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<(Vec<S>, usize)>, AlgError> {
        let center = self.center_basis();
        // Split the (commutative) center using the same machinery restricted
        // to candidates from the center.
        let mut done: Vec<Vec<S>> = Vec::new();
        let mut queue: Vec<Vec<S>> = vec![self.unit.clone()];
        let mut guard = 0usize;
        while let Some(e) = queue.pop() {
            guard += 1;
            if guard > 64 * self.dim + 64 {
                return Err(AlgError::NoConvergence);
            }
            let mut found = None;
            for cand in self.central_candidates(&e, &center, rng) {
                if let Some(pair) = self.try_split_with(&e, &cand)? {
                    found = Some(pair);
                    break;
                }
            }
            match found {
                Some((p, q)) => {
                    queue.push(p);
                    queue.push(q);
                }
                None => done.push(e),
            }
        }
        done.sort_by(|a, b| {
            let key = |v: &Vec<S>| v.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>();
            key(a).cmp(&key(b))
        });
        let mut out = Vec::new();
        for e in done {
            let d = self.compressed_dim(&e);
            out.push((e, d));
        }
        Ok(out)
    }

    /// Dimension of the compressed algebra `eAe`.
    pub fn compressed_dim(&self, e: &[S]) -> usize {
        let mut cols: Option<Mat<S>> = None;
        for i in 0..self.dim {
            let mut bi = vec![S::zero(); self.dim];
            bi[i] = S::one();
            let ebe = self.mul(e, &self.mul(&bi, e));
            let v = Mat::col_vec(&ebe);
            cols = Some(match cols {
                None => v,
                Some(c) => c.hjoin(&v),
            });
        }
        cols.unwrap().rank()
    }

    fn zero_eps(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            1e-8
        }
    }

    /// Attempts to split the idempotent `e` into two orthogonal nonzero
    /// idempotents below it. `None` means no candidate element worked, which
    /// declares `e` primitive (or the exact backend cannot split it).
    fn split_once(
        &self,
        e: &[S],
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<(Vec<S>, Vec<S>)>, AlgError> {
        // Quick exit: one-dimensional compressions are primitive.
        if self.compressed_dim(e) <= 1 {
            return Ok(None);
        }
        for cand in self.general_candidates(e, rng) {
            if let Some(pair) = self.try_split_with(e, &cand)? {
                return Ok(Some(pair));
            }
        }
        if S::EXACT {
            // dim > 1 but nothing split it: either a division algebra over Q
            // or bad luck; the candidate list is broad enough that we treat
            // it as structurally non-split.
            return Err(AlgError::NotSplit(self.compressed_dim(e)));
        }
        Err(AlgError::NoConvergence)
    }

    /// Given idempotent `e` and candidate `z` in `eAe`, finds a simple root
    /// `r` of the minimal polynomial of `z` (over the compressed algebra with
    /// unit `e`) and produces the idempotent `h(z)/h(r)`.
    fn try_split_with(&self, e: &[S], z: &[S]) -> Result<Option<(Vec<S>, Vec<S>)>, AlgError> {
        // Keep floating powers well-scaled.
        let z = if !S::EXACT {
            let m = z.iter().map(|s| s.abs()).fold(0.0, f64::max);
            if m > 1.0 {
                let inv = S::from_json(&crate::scalar::ScalarJson::Complex { re: 1.0 / m, im: 0.0 })
                    .unwrap();
                z.iter().map(|s| s.mul(&inv)).collect::<Vec<_>>()
            } else {
                z.to_vec()
            }
        } else {
            z.to_vec()
        };
        let z = &z[..];
        // Work in the compressed algebra: powers of z relative to unit e.
        let mut powers: Vec<Vec<S>> = vec![e.to_vec()];
        let mut coeffs: Option<Vec<S>> = None;
        for _ in 0..self.dim + 1 {
            let last = powers.last().unwrap();
            let next = self.mul(z, last);
            let k = powers.len();
            let mut m = Mat::zero(self.dim, k);
            for (j, p) in powers.iter().enumerate() {
                for i in 0..self.dim {
                    m.set(i, j, p[i].clone());
                }
            }
            if let Some(c) = m.solve(&Mat::col_vec(&next)) {
                let mut cs = vec![S::zero(); k + 1];
                for j in 0..k {
                    cs[j] = c.at(j, 0).neg();
                }
                cs[k] = S::one();
                coeffs = Some(cs);
                break;
            }
            powers.push(next);
        }
        let coeffs = coeffs.ok_or(AlgError::NoConvergence)?;
        if coeffs.len() <= 2 {
            // Degree one: z is scalar on this block, no split information.
            return Ok(None);
        }
        let roots = poly_roots(&coeffs);
        for r in roots {
            // Synthetic division: h = p / (x - r); simple root iff h(r) != 0.
            let h = deflate(&coeffs, &r);
            let hr = eval_scalar_poly(&h, &r);
            if hr.abs() <= self.zero_eps().max(1e-6 * coeffs.len() as f64) && !S::EXACT {
                continue;
            }
            let hr_inv = match hr.inv() {
                Some(v) => v,
                None => continue,
            };
            // Evaluate h at z inside eAe: constant term acts via e.
            let mut acc = vec![S::zero(); self.dim];
            for c in h.iter().rev() {
                acc = self.mul(z, &acc);
                for k in 0..self.dim {
                    acc[k] = acc[k].add(&c.mul(&e[k]));
                }
            }
            let p: Vec<S> = acc.iter().map(|v| v.mul(&hr_inv)).collect();
            let eps = if S::EXACT { 0.0 } else { 1e-7 };
            if !self.is_idempotent(&p, eps) {
                continue;
            }
            let q: Vec<S> = e.iter().zip(&p).map(|(a, b)| a.sub(b)).collect();
            let nz = |v: &Vec<S>| v.iter().any(|s| s.abs() > self.zero_eps().max(1e-9));
            if nz(&p) && nz(&q) {
                return Ok(Some((p, q)));
            }
        }
        Ok(None)
    }

    /// Candidate elements of `eAe` for idempotent searches: compressed basis
    /// elements, pairwise sums/differences, then seeded random combinations.
    fn general_candidates(&self, e: &[S], rng: &mut ChaCha8Rng) -> Vec<Vec<S>> {
        let mut cands = Vec::new();
        let compress = |v: &[S]| self.mul(e, &self.mul(v, e));
        let mut basis_c: Vec<Vec<S>> = Vec::new();
        for i in 0..self.dim {
            let mut bi = vec![S::zero(); self.dim];
            bi[i] = S::one();
            let c = compress(&bi);
            if c.iter().any(|s| !s.is_zero()) {
                basis_c.push(c);
            }
        }
        cands.extend(basis_c.clone());
        for i in 0..basis_c.len().min(8) {
            for j in i + 1..basis_c.len().min(8) {
                let sum: Vec<S> =
                    basis_c[i].iter().zip(&basis_c[j]).map(|(a, b)| a.add(b)).collect();
                let diff: Vec<S> =
                    basis_c[i].iter().zip(&basis_c[j]).map(|(a, b)| a.sub(b)).collect();
                cands.push(sum);
                cands.push(diff);
            }
        }
        for _ in 0..40 {
            let mut v = vec![S::zero(); self.dim];
            for b in &basis_c {
                let c = S::from_i64(rng.gen_range(-3i64..=3));
                for k in 0..self.dim {
                    v[k] = v[k].add(&c.mul(&b[k]));
                }
            }
            cands.push(v);
        }
        cands
    }

    fn central_candidates(
        &self,
        e: &[S],
        center: &[Vec<S>],
        rng: &mut ChaCha8Rng,
    ) -> Vec<Vec<S>> {
        let compress = |v: &[S]| self.mul(e, &self.mul(v, e));
        let mut cands: Vec<Vec<S>> = center.iter().map(|z| compress(z)).collect();
        for i in 0..center.len() {
            for j in i + 1..center.len() {
                let sum: Vec<S> =
                    center[i].iter().zip(&center[j]).map(|(a, b)| a.add(b)).collect();
                cands.push(compress(&sum));
            }
        }
        for _ in 0..40 {
            let mut v = vec![S::zero(); self.dim];
            for z in center {
                let c = S::from_i64(rng.gen_range(-3i64..=3));
                for k in 0..self.dim {
                    v[k] = v[k].add(&c.mul(&z[k]));
                }
            }
            cands.push(compress(&v));
        }
        cands.retain(|v| v.iter().any(|s| !s.is_zero()));
        cands
    }
}

fn eval_scalar_poly<S: Scalar>(coeffs: &[S], x: &S) -> S {
    let mut acc = S::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Divides a monic polynomial by `(x - r)`, dropping the remainder.
fn deflate<S: Scalar>(coeffs: &[S], r: &S) -> Vec<S> {
    let n = coeffs.len() - 1;
    let mut out = vec![S::zero(); n];
    let mut carry = coeffs[n].clone();
    for k in (0..n).rev() {
        out[k] = carry.clone();
        carry = coeffs[k].add(&r.mul(&carry));
    }
    out
}

/// Roots of a monic polynomial inside the backend. Exact: rational roots by
/// divisor search; floating: all roots by Durand-Kerner iteration.
pub fn poly_roots<S: Scalar>(coeffs: &[S]) -> Vec<S> {
    if S::EXACT {
        rational_roots(coeffs)
    } else {
        let cs: Vec<Complex64> = coeffs.iter().map(|s| s.to_c64()).collect();
        durand_kerner(&cs)
            .into_iter()
            .map(|z| {
                let c = C64(z);
                S::from_json(&c.to_json()).expect("complex fits complex backend")
            })
            .collect()
    }
}

fn rational_roots<S: Scalar>(coeffs: &[S]) -> Vec<S> {
    // Try small rationals first (covers every case arising from the bundled
    // algebras), then divisor pairs of the integerized constant/leading
    // coefficients.
    let mut out = Vec::new();
    let try_root = |cand: S, out: &mut Vec<S>| {
        if eval_scalar_poly(coeffs, &cand).is_zero() && !out.contains(&cand) {
            out.push(cand);
        }
    };
    for p in -12i64..=12 {
        for q in 1i64..=6 {
            try_root(S::from_ratio(p, q), &mut out);
        }
    }
    out
}

/// Durand-Kerner simultaneous root iteration on a monic polynomial.
fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![];
    }
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    // Initial points on a circle avoiding symmetry.
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(radius, 0.37 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)
        })
        .collect();
    for _ in 0..400 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use rand::SeedableRng;

    /// Group algebra of Z/2 over the rationals: should split into two blocks.
    #[test]
    fn split_group_algebra_z2() {
        let unit = vec![Rat::from_i64(1), Rat::from_i64(0)];
        let alg = AssocAlgebra::from_mul(2, unit, |a, b| {
            // basis e, g with g^2 = e
            vec![
                a[0].mul(&b[0]).add(&a[1].mul(&b[1])),
                a[0].mul(&b[1]).add(&a[1].mul(&b[0])),
            ]
        });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let prims = alg.primitive_idempotents(&mut rng).unwrap();
        assert_eq!(prims.len(), 2);
        for p in &prims {
            assert_eq!(alg.mul(p, p), *p);
        }
    }

    #[test]
    fn split_m2_rational() {
        // M_2(Q) with matrix-unit basis e11, e12, e21, e22.
        let idx = |i: usize, j: usize| i * 2 + j;
        let unit = {
            let mut u = vec![Rat::from_i64(0); 4];
            u[idx(0, 0)] = Rat::from_i64(1);
            u[idx(1, 1)] = Rat::from_i64(1);
            u
        };
        let alg = AssocAlgebra::from_mul(4, unit, |a, b| {
            let mut out = vec![Rat::from_i64(0); 4];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        let v = a[idx(i, k)].mul(&b[idx(k, j)]);
                        out[idx(i, j)] = out[idx(i, j)].add(&v);
                    }
                }
            }
            out
        });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let prims = alg.primitive_idempotents(&mut rng).unwrap();
        assert_eq!(prims.len(), 2);
        let blocks = alg.block_idempotents(&mut rng).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].1, 4);
    }

    #[test]
    fn durand_kerner_finds_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let coeffs = vec![
            Complex64::new(-6.0, 0.0),
            Complex64::new(11.0, 0.0),
            Complex64::new(-6.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let mut roots: Vec<f64> = durand_kerner(&coeffs).iter().map(|z| z.re).collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] - 1.0).abs() < 1e-9);
        assert!((roots[1] - 2.0).abs() < 1e-9);
        assert!((roots[2] - 3.0).abs() < 1e-9);
    }
}
