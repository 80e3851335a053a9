//! Frobenius algebras inside a module-category backend: axiom verification,
//! classification (canonical / normalized / irreducible), and the standard
//! constructions: from a dual pair, from a Hopf algebra with integrals, and
//! by completing a self-dual monoid.

use crate::hopf::{IntegralPair, StructuredBialgebra};
use crate::mat::Mat;
use crate::repcat::{duality_pack, hom_space, DualityPack, Representation};
use crate::report::Checks;
use crate::scalar::{Scalar, Tol};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrobError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Hopf(#[from] crate::hopf::HopfError),
    #[error(transparent)]
    Rep(#[from] crate::repcat::RepError),
}

/// An object with unit/counit and multiplication/comultiplication morphisms.
#[derive(Clone)]
pub struct FrobeniusData<S> {
    pub q: Representation<S>,
    /// unit 1 -> Q
    pub v: Mat<S>,
    /// counit Q -> 1
    pub vprime: Mat<S>,
    /// comultiplication Q -> Q (x) Q
    pub w: Mat<S>,
    /// multiplication Q (x) Q -> Q
    pub wprime: Mat<S>,
}

impl<S: Scalar> std::fmt::Debug for FrobeniusData<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FrobeniusData(dim {})", self.q.dim)
    }
}

#[derive(Debug, Clone)]
pub struct Classification<S> {
    pub canonical: bool,
    pub normalized: bool,
    pub irreducible: bool,
    pub lambda1: S,
    pub lambda2: S,
    /// `v' w' w v`, invariant under renormalization.
    pub product: S,
    pub lambda1_residual: f64,
}

impl<S: Scalar> FrobeniusData<S> {
    fn dim(&self) -> usize {
        self.q.dim
    }

    pub fn shapes_ok(&self) -> Result<(), FrobError> {
        let d = self.dim();
        let want = [
            (self.v.rows, self.v.cols, d, 1, "v"),
            (self.vprime.rows, self.vprime.cols, 1, d, "vprime"),
            (self.w.rows, self.w.cols, d * d, d, "w"),
            (self.wprime.rows, self.wprime.cols, d, d * d, "wprime"),
        ];
        for (r, c, er, ec, name) in want {
            if (r, c) != (er, ec) {
                return Err(FrobError::Shape(format!("{name} is {r}x{c}, expected {er}x{ec}")));
            }
        }
        Ok(())
    }

    /// Residual of the four structure maps being module morphisms.
    pub fn intertwiner_residual(&self, h: &StructuredBialgebra<S>) -> f64 {
        let qq = Representation::tensor(h, &self.q, &self.q);
        let mut worst: f64 = 0.0;
        for i in 0..h.n {
            let eps_i = h.counit.at(0, i).clone();
            worst = worst.max(self.q.action[i].mul(&self.v).residual(&self.v.scale(&eps_i)));
            worst = worst.max(self.vprime.mul(&self.q.action[i]).residual(&self.vprime.scale(&eps_i)));
            worst = worst.max(qq.action[i].mul(&self.w).residual(&self.w.mul(&self.q.action[i])));
            worst = worst.max(self.q.action[i].mul(&self.wprime).residual(&self.wprime.mul(&qq.action[i])));
        }
        worst
    }

    /// Residuals for coassociativity, associativity, counit, unit, and the
    /// two Frobenius compatibilities.
    pub fn check_axioms(&self, tol: Tol) -> Result<Checks, FrobError> {
        self.shapes_ok()?;
        let d = self.dim();
        let id = Mat::<S>::identity(d);
        let mut checks = Checks::new::<S>(tol);
        let coassoc = self
            .w
            .kron(&id)
            .mul(&self.w)
            .residual(&id.kron(&self.w).mul(&self.w));
        checks.add("coassociativity", coassoc);
        let assoc = self
            .wprime
            .mul(&self.wprime.kron(&id))
            .residual(&self.wprime.mul(&id.kron(&self.wprime)));
        checks.add("associativity", assoc);
        let cl = self.vprime.kron(&id).mul(&self.w).residual(&id);
        let cr = id.kron(&self.vprime).mul(&self.w).residual(&id);
        checks.add("counit", cl.max(cr));
        let ul = self.wprime.mul(&self.v.kron(&id)).residual(&id);
        let ur = self.wprime.mul(&id.kron(&self.v)).residual(&id);
        checks.add("unit", ul.max(ur));
        let mid = self.w.mul(&self.wprime);
        let fl = self.wprime.kron(&id).mul(&id.kron(&self.w)).residual(&mid);
        let fr = id.kron(&self.wprime).mul(&self.w.kron(&id)).residual(&mid);
        checks.add("frobenius_left", fl);
        checks.add("frobenius_right", fr);
        Ok(checks)
    }

    pub fn classify(&self, tol: &Tol) -> Classification<S> {
        let (lambda1, lambda1_residual) = self.wprime.mul(&self.w).scalar_identity_part();
        let lambda2 = self.vprime.mul(&self.v).at(0, 0).clone();
        let product = self
            .vprime
            .mul(&self.wprime)
            .mul(&self.w)
            .mul(&self.v)
            .at(0, 0)
            .clone();
        let scalar_ok = if S::EXACT { lambda1_residual == 0.0 } else { tol.is_zero(lambda1_residual) };
        let canonical = scalar_ok && !tol.is_zero(lambda1.abs()) && !tol.is_zero(lambda2.abs());
        let normalized = canonical && lambda1.approx_eq(&lambda2, tol);
        Classification {
            canonical,
            normalized,
            irreducible: false, // filled by classify_in
            lambda1,
            lambda2,
            product,
            lambda1_residual,
        }
    }

    /// Classification including the irreducibility test, which needs the
    /// ambient bialgebra to form hom spaces against the trivial module.
    pub fn classify_in(&self, h: &StructuredBialgebra<S>, tol: &Tol) -> Classification<S> {
        let mut c = self.classify(tol);
        let triv = Representation::trivial(h);
        c.irreducible = hom_space(&self.q, &triv).len() == 1;
        c
    }

    /// Renormalization `(a v, b^{-1} v', b w, a^{-1} w')`.
    pub fn renormalize(&self, a: &S, b: &S) -> FrobeniusData<S> {
        FrobeniusData {
            q: self.q.clone(),
            v: self.v.scale(a),
            vprime: self.vprime.scale(&b.inv().expect("b invertible")),
            w: self.w.scale(b),
            wprime: self.wprime.scale(&a.inv().expect("a invertible")),
        }
    }

    /// Rescales to `lambda1 = lambda2 = sqrt(lambda1 lambda2)` (floating
    /// backend; the square root must exist in the backend).
    pub fn normalized_copy(&self, tol: &Tol) -> Option<FrobeniusData<S>> {
        let c = self.classify(tol);
        if !c.canonical {
            return None;
        }
        if c.normalized {
            return Some(self.clone());
        }
        let ratio = c.lambda1.mul(&c.lambda2.inv()?);
        let a = ratio.sqrt()?;
        Some(self.renormalize(&a, &S::one()))
    }

    /// Self-duality morphisms `r = w v`, `r' = v' w'`; returns them with the
    /// residual of the two duality equations and the loop value `r' r`.
    pub fn self_duality(&self) -> (Mat<S>, Mat<S>, f64, S) {
        let d = self.dim();
        let id = Mat::<S>::identity(d);
        let r = self.w.mul(&self.v);
        let rp = self.vprime.mul(&self.wprime);
        let e1 = id.kron(&rp).mul(&r.kron(&id)).residual(&id);
        let e2 = rp.kron(&id).mul(&id.kron(&r)).residual(&id);
        let loop_val = rp.mul(&r).at(0, 0).clone();
        (r, rp, e1.max(e2), loop_val)
    }
}

/// The Frobenius algebra carried by an object with a two-sided dual:
/// `Q = X (x) X^` with structure maps assembled from the duality pack.
pub fn from_dual_pair<S: Scalar>(
    h: &StructuredBialgebra<S>,
    x: &Representation<S>,
    pack: &DualityPack<S>,
) -> FrobeniusData<S> {
    let q = Representation::tensor(h, x, &pack.dual);
    let idx = Mat::<S>::identity(x.dim);
    let idxb = Mat::<S>::identity(pack.dual.dim);
    let w = idx.kron(&pack.eps.kron(&idxb));
    let wprime = idx.kron(&pack.d.kron(&idxb));
    FrobeniusData { q, v: pack.e.clone(), vprime: pack.eta.clone(), w, wprime }
}

/// The regular Frobenius algebra of a Hopf algebra: the left regular module
/// with unit given by the integral, counit by the counit, comultiplication by
/// the coproduct, and multiplication pulled back from the dual.
pub fn regular_from_hopf<S: Scalar>(
    h: &StructuredBialgebra<S>,
    pair: &IntegralPair<S>,
) -> Result<(FrobeniusData<S>, f64), FrobError> {
    let q = Representation::regular(h);
    let (tilde_m, agreement) = h.tilde_multiplication(pair)?;
    let data = FrobeniusData {
        q,
        v: pair.lambda.clone(),
        vprime: h.counit.clone(),
        w: h.delta.clone(),
        wprime: tilde_m,
    };
    Ok((data, agreement))
}

/// Completes a self-dual monoid `(Q, v, w')` with identification `s: Q -> Q^`
/// to a canonical Frobenius algebra, provided the compatibility between `s`
/// and `v' w'` holds. Preconditions are verified and named on failure.
#[allow(clippy::too_many_arguments)]
pub fn complete_from_algebra<S: Scalar>(
    h: &StructuredBialgebra<S>,
    q: &Representation<S>,
    v: &Mat<S>,
    wprime: &Mat<S>,
    s_iso: &Mat<S>,
    vprime: &Mat<S>,
    tol: &Tol,
) -> Result<FrobeniusData<S>, FrobError> {
    let d = q.dim;
    let id = Mat::<S>::identity(d);
    // Monoid axioms.
    let assoc = wprime
        .mul(&wprime.kron(&id))
        .residual(&wprime.mul(&id.kron(wprime)));
    let unit_res = wprime
        .mul(&v.kron(&id))
        .residual(&id)
        .max(wprime.mul(&id.kron(v)).residual(&id));
    let bad = |r: f64| if S::EXACT { r != 0.0 } else { !tol.is_zero(r) };
    if bad(assoc) {
        return Err(FrobError::Precondition(format!("associativity fails ({assoc:.3e})")));
    }
    if bad(unit_res) {
        return Err(FrobError::Precondition(format!("unit law fails ({unit_res:.3e})")));
    }
    let triv = Representation::trivial(h);
    let units = hom_space(&triv, q).len();
    if units != 1 {
        return Err(FrobError::Precondition(format!(
            "space of maps 1 -> Q has dimension {units}, expected 1"
        )));
    }
    let pack = duality_pack(h, q, tol)?;
    let s_inv = s_iso
        .inverse()
        .ok_or_else(|| FrobError::Precondition("self-duality map is singular".into()))?;
    // Compatibility: eta (id (x) s) = d (s (x) id) = v' w' on Q (x) Q.
    let lhs1 = pack.eta.mul(&id.kron(s_iso));
    let lhs2 = pack.d.mul(&s_iso.kron(&id));
    let target = vprime.mul(wprime);
    let c1 = lhs1.residual(&target);
    let c2 = lhs2.residual(&target);
    if bad(c1) || bad(c2) {
        return Err(FrobError::Precondition(format!(
            "self-duality compatibility fails ({:.3e})",
            c1.max(c2)
        )));
    }
    // r = (id (x) s^{-1}) e = (s^{-1} (x) id) eps, then w = (w' (x) id)(id (x) r).
    let r = id.kron(&s_inv).mul(&pack.e);
    let r_alt = s_inv.kron(&id).mul(&pack.eps);
    let r_res = r.residual(&r_alt);
    if bad(r_res) {
        return Err(FrobError::Precondition(format!(
            "the two self-duality coevaluations disagree ({r_res:.3e})"
        )));
    }
    let w = wprime.kron(&id).mul(&id.kron(&r));
    let w_alt = id.kron(wprime).mul(&r.kron(&id));
    let w_res = w.residual(&w_alt);
    if bad(w_res) {
        return Err(FrobError::Precondition(format!(
            "left and right comultiplication candidates disagree ({w_res:.3e})"
        )));
    }
    Ok(FrobeniusData { q: q.clone(), v: v.clone(), vprime: vprime.clone(), w, wprime: wprime.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupTable;
    use crate::hopf::Side;
    use crate::repcat::SimpleTable;
    use crate::scalar::{Rat, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tol {
        Tol::default()
    }

    fn regular<S: Scalar>(h: &StructuredBialgebra<S>) -> FrobeniusData<S> {
        let pair = h.find_integrals(Side::Left).unwrap();
        let (data, agreement) = regular_from_hopf(h, &pair).unwrap();
        assert!(agreement < 1e-12);
        data
    }

    #[test]
    fn regular_algebra_fz2_passes_exactly() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        let f = regular(&h);
        assert_eq!(f.intertwiner_residual(&h), 0.0);
        let checks = f.check_axioms(tol()).unwrap();
        assert!(checks.all_pass(), "{:?}", checks.failing());
        assert_eq!(checks.max_residual(), 0.0);
        let c = f.classify_in(&h, &tol());
        assert!(c.canonical && c.irreducible);
        assert_eq!(c.lambda1.mul(&c.lambda2), Rat::from_i64(2));
        assert_eq!(c.product, Rat::from_i64(2));
    }

    #[test]
    fn scaled_comultiplication_breaks_only_counit() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        let mut f = regular(&h);
        f.w = f.w.scale(&Rat::from_i64(2));
        let checks = f.check_axioms(tol()).unwrap();
        let by_name = |n: &str| checks.list.iter().find(|c| c.name == n).unwrap().pass;
        assert!(by_name("coassociativity"));
        assert!(!by_name("counit"));
    }

    #[test]
    fn regular_algebra_fs3_product_is_six() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::s3());
        let f = regular(&h);
        assert!(f.check_axioms(tol()).unwrap().all_pass());
        let c = f.classify_in(&h, &tol());
        assert!(c.irreducible);
        assert_eq!(c.product, Rat::from_i64(6));
    }

    #[test]
    fn regular_algebra_group_z3_floating() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::cyclic(3));
        let f = regular(&h);
        assert!(f.intertwiner_residual(&h) < 1e-9);
        let checks = f.check_axioms(tol()).unwrap();
        assert!(checks.all_pass());
        assert!(checks.max_residual() < 1e-9);
    }

    #[test]
    fn from_dual_pair_std_s3() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = SimpleTable::irreps(&h, tol(), &mut rng).unwrap();
        let i = t.simples.iter().position(|s| s.dim == 2).unwrap();
        let f = from_dual_pair(&h, &t.simples[i], &t.packs[i]);
        assert_eq!(f.q.dim, 4);
        assert!(f.intertwiner_residual(&h) < 1e-9);
        let checks = f.check_axioms(tol()).unwrap();
        assert!(checks.all_pass(), "{:?}", checks.failing());
        let c = f.classify_in(&h, &tol());
        assert!(c.canonical);
        assert!(c.irreducible); // End(X) is one-dimensional
        assert!(c.lambda2.sub(&C64::from_i64(2)).abs() < 1e-9);
        assert!(c.product.sub(&C64::from_i64(4)).abs() < 1e-9);
    }

    #[test]
    fn from_dual_pair_invertible_object_gives_unit() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::s3());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = SimpleTable::irreps(&h, tol(), &mut rng).unwrap();
        let g = (0..t.len()).find(|&i| i != t.unit_index).unwrap();
        let f = from_dual_pair(&h, &t.simples[g], &t.packs[g]);
        assert_eq!(f.q.dim, 1);
        assert!(f.check_axioms(tol()).unwrap().all_pass());
        // invertible object: Q is the unit object
        let triv = Representation::trivial(&h);
        assert_eq!(hom_space(&f.q, &triv).len(), 1);
    }

    #[test]
    fn dual_pair_of_dual_object_same_product() {
        let h = StructuredBialgebra::<C64>::group_algebra(&GroupTable::s3());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = SimpleTable::irreps(&h, tol(), &mut rng).unwrap();
        for i in 0..t.len() {
            let f = from_dual_pair(&h, &t.simples[i], &t.packs[i]);
            let j = t.dual_of[i];
            let g = from_dual_pair(&h, &t.simples[j], &t.packs[j]);
            let pf = f.classify(&tol()).product;
            let pg = g.classify(&tol()).product;
            assert!(pf.sub(&pg).abs() < 1e-9);
        }
    }

    proptest::proptest! {
        /// Rescaling the four structure maps by unit scalars preserves the
        /// axioms and the loop product, while the individual loop scalars
        /// move by the expected ratios.
        #[test]
        fn renormalization_preserves_axioms_and_product(seed in 0u64..200) {
            let h = StructuredBialgebra::<C64>::function_algebra(&GroupTable::s3());
            let f = regular(&h);
            let base = f.classify(&tol());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = C64::random_small(&mut rng);
            let b = C64::random_small(&mut rng);
            let g = f.renormalize(&a, &b);
            proptest::prop_assert!(g.check_axioms(tol()).unwrap().all_pass());
            let c = g.classify(&tol());
            proptest::prop_assert!(c.product.sub(&base.product).abs() < 1e-8);
            // lambda2 scales by a/b, lambda1 by b/a; the product is fixed
            let expect = base.lambda2.mul(&a).mul(&b.inv().unwrap());
            proptest::prop_assert!(c.lambda2.sub(&expect).abs() < 1e-8);
        }
    }

    #[test]
    fn self_duality_loop_values() {
        let h2 = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        let f2 = regular(&h2);
        let (_, _, res, loop_val) = f2.self_duality();
        assert_eq!(res, 0.0);
        assert_eq!(loop_val, Rat::from_i64(2));
        let h6 = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::s3());
        let f6 = regular(&h6);
        let (_, _, res6, loop6) = f6.self_duality();
        assert_eq!(res6, 0.0);
        assert_eq!(loop6, Rat::from_i64(6));
    }

    #[test]
    fn normalized_copy_balances_lambdas() {
        let h = StructuredBialgebra::<C64>::function_algebra(&GroupTable::s3());
        let f = regular(&h);
        let g = f.normalized_copy(&tol()).unwrap();
        let c = g.classify(&tol());
        assert!(c.normalized);
        assert!(c.lambda1.sub(&c.lambda2).abs() < 1e-9);
        assert!(c.product.sub(&C64::from_i64(6)).abs() < 1e-9);
        assert!(g.check_axioms(tol()).unwrap().all_pass());
    }

    #[test]
    fn completion_reproduces_comultiplication_up_to_gauge() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        let f = regular(&h);
        // Self-duality identification from r: (id (x) s) r = e.
        let pack = duality_pack(&h, &f.q, &tol()).unwrap();
        let d = f.q.dim;
        let r = f.w.mul(&f.v);
        let rmat = Mat::from_fn(d, d, |a, b| r.at(a * d + b, 0).clone());
        let emat = Mat::from_fn(d, d, |a, b| pack.e.at(a * d + b, 0).clone());
        // R S^T = E
        let st = rmat.inverse().unwrap().mul(&emat);
        let s_iso = st.transpose();
        let out = complete_from_algebra(&h, &f.q, &f.v, &f.wprime, &s_iso, &f.vprime, &tol()).unwrap();
        assert!(out.check_axioms(tol()).unwrap().all_pass());
        // out.w is proportional to the coproduct.
        let mut ratio = None;
        for i in 0..out.w.rows {
            for j in 0..out.w.cols {
                if !f.w.at(i, j).is_zero() {
                    ratio = Some(out.w.at(i, j).mul(&f.w.at(i, j).inv().unwrap()));
                }
            }
        }
        let c = ratio.unwrap();
        assert_eq!(out.w.residual(&f.w.scale(&c)), 0.0);
        assert!(!c.is_zero());
    }

    #[test]
    fn completion_trivial_object() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        let q = Representation::trivial(&h);
        let one = Mat::identity(1);
        let out = complete_from_algebra(&h, &q, &one, &one, &one, &one, &tol()).unwrap();
        assert_eq!(out.w.residual(&Mat::identity(1)), 0.0);
    }

    #[test]
    fn completion_rejects_reducible_unit_space() {
        let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::cyclic(2));
        // Q = 1 (+) 1 with componentwise product.
        let q = Representation { dim: 2, action: (0..h.n).map(|i| Mat::identity(2).scale(h.counit.at(0, i))).collect() };
        let mut v: Mat<Rat> = Mat::zero(2, 1);
        v.set(0, 0, Rat::from_i64(1));
        v.set(1, 0, Rat::from_i64(1));
        let mut wp: Mat<Rat> = Mat::zero(2, 4);
        wp.set(0, 0, Rat::from_i64(1));
        wp.set(1, 3, Rat::from_i64(1));
        let vp = v.transpose();
        let s = Mat::identity(2);
        let err = complete_from_algebra(&h, &q, &v, &wp, &s, &vp, &tol()).unwrap_err();
        match err {
            FrobError::Precondition(msg) => assert!(msg.contains("dimension 2")),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
