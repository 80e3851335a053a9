//! Finite-dimensional Hopf algebras by structure tensors: group examples,
//! axiom validation, duals, integrals, Fourier transform, the twisted
//! multiplication carried by the dual product, classical Frobenius systems,
//! and the dimension invariant.

use crate::groups::GroupTable;
use crate::mat::Mat;
use crate::report::Checks;
use crate::scalar::{Scalar, ScalarJson, Tol};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HopfError {
    #[error("input error: {0}")]
    Input(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
    #[error(transparent)]
    Group(#[from] crate::groups::GroupError),
}

/// Plain finite-dimensional unital algebra: multiplication tensor and unit.
#[derive(Clone)]
pub struct PlainAlgebra<S> {
    pub n: usize,
    /// `n x n^2` matrix of the multiplication, pair index `(i,j) = i*n + j`.
    pub m: Mat<S>,
    pub unit: Mat<S>,
}

impl<S: Scalar> PlainAlgebra<S> {
    /// Matrix of left multiplication by basis element `i`.
    pub fn left_mul(&self, i: usize) -> Mat<S> {
        Mat::from_fn(self.n, self.n, |k, j| self.m.at(k, i * self.n + j).clone())
    }

    /// Matrix of right multiplication by basis element `i`.
    pub fn right_mul(&self, i: usize) -> Mat<S> {
        Mat::from_fn(self.n, self.n, |k, j| self.m.at(k, j * self.n + i).clone())
    }

    /// Left multiplication by a general element (column vector).
    pub fn left_mul_by(&self, a: &Mat<S>) -> Mat<S> {
        let mut out: Mat<S> = Mat::zero(self.n, self.n);
        for i in 0..self.n {
            if a.at(i, 0).is_zero() {
                continue;
            }
            out = out.add(&self.left_mul(i).scale(a.at(i, 0)));
        }
        out
    }

    pub fn validate(&self, tol: Tol) -> Checks {
        let n = self.n;
        let id = Mat::<S>::identity(n);
        let mut checks = Checks::new::<S>(tol);
        let assoc = self
            .m
            .mul(&self.m.kron(&id))
            .residual(&self.m.mul(&id.kron(&self.m)));
        checks.add("associativity", assoc);
        let ul = self.m.mul(&self.unit.kron(&id)).residual(&id);
        let ur = self.m.mul(&id.kron(&self.unit)).residual(&id);
        checks.add("unit", ul.max(ur));
        checks
    }

    /// M_2(F) with the matrix-unit basis e11, e12, e21, e22; test fodder for
    /// Frobenius systems with a trace form.
    pub fn m2() -> Self {
        let n = 4;
        let idx = |i: usize, j: usize| i * 2 + j;
        let mut m: Mat<S> = Mat::zero(n, n * n);
        for i in 0..2 {
            for k in 0..2 {
                for kk in 0..2 {
                    for j in 0..2 {
                        // e_{i,k} * e_{kk,j} = delta_{k,kk} e_{i,j}
                        if k == kk {
                            m.set(idx(i, j), idx(i, k) * n + idx(kk, j), S::one());
                        }
                    }
                }
            }
        }
        let mut unit = Mat::zero(n, 1);
        unit.set(idx(0, 0), 0, S::one());
        unit.set(idx(1, 1), 0, S::one());
        PlainAlgebra { n, m, unit }
    }

    /// The commutative algebra `F[x]/(x^2)` with basis `{1, x}`.
    pub fn dual_numbers() -> Self {
        let n = 2;
        let mut m: Mat<S> = Mat::zero(n, n * n);
        m.set(0, 0, S::one()); // 1*1 = 1
        m.set(1, 1, S::one()); // 1*x = x
        m.set(1, 2, S::one()); // x*1 = x
        let mut unit = Mat::zero(n, 1);
        unit.set(0, 0, S::one());
        PlainAlgebra { n, m, unit }
    }
}

/// Bialgebra/Hopf algebra by structure tensors. The antipode is optional so
/// the same container carries plain bialgebras.
#[derive(Clone)]
pub struct StructuredBialgebra<S> {
    pub n: usize,
    pub m: Mat<S>,       // n x n^2
    pub unit: Mat<S>,    // n x 1
    pub delta: Mat<S>,   // n^2 x n
    pub counit: Mat<S>,  // 1 x n
    pub antipode: Option<Mat<S>>, // n x n
    pub name: String,
}

/// Which one-sided invariance defines the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A normalized pair of integrals: `lambda` in the algebra, `phi` in the
/// dual, with `phi(lambda) = 1`.
#[derive(Clone)]
pub struct IntegralPair<S> {
    pub lambda: Mat<S>, // n x 1
    pub phi: Mat<S>,    // 1 x n
    pub side: Side,
}

/// Dual bases for a nondegenerate form `phi` on an algebra, together with the
/// derived Frobenius element and its index.
#[derive(Clone)]
pub struct FrobeniusSystem<S> {
    pub phi: Mat<S>,          // 1 x n
    pub dual_basis: Mat<S>,   // row i = coordinates of y_i, with phi(y_i x_j) = delta_ij
    pub frobenius_element: Mat<S>, // n^2 x 1
    pub e_index: Mat<S>,      // n x 1, the central element sum x_i y_i
}

/// Frobenius system plus the induced comultiplication with counit `phi`.
#[derive(Clone)]
pub struct ClassicalFrobenius<S> {
    pub system: FrobeniusSystem<S>,
    pub delta: Mat<S>,  // n^2 x n
    pub checks: Checks,
}

impl<S: Scalar> StructuredBialgebra<S> {
    pub fn algebra(&self) -> PlainAlgebra<S> {
        PlainAlgebra { n: self.n, m: self.m.clone(), unit: self.unit.clone() }
    }

    pub fn left_mul(&self, i: usize) -> Mat<S> {
        self.algebra().left_mul(i)
    }

    /// Function algebra F(G) with basis of indicator functions.
    pub fn function_algebra(g: &GroupTable) -> Self {
        let n = g.order();
        let mut m: Mat<S> = Mat::zero(n, n * n);
        for i in 0..n {
            m.set(i, i * n + i, S::one());
        }
        let unit = Mat::from_fn(n, 1, |_, _| S::one());
        let mut delta: Mat<S> = Mat::zero(n * n, n);
        for a in 0..n {
            for b in 0..n {
                delta.set(a * n + b, g.mul[a][b], S::one());
            }
        }
        let counit = Mat::from_fn(1, n, |_, j| if j == g.identity { S::one() } else { S::zero() });
        let mut antipode: Mat<S> = Mat::zero(n, n);
        for i in 0..n {
            antipode.set(g.inverse(i), i, S::one());
        }
        StructuredBialgebra {
            n,
            m,
            unit,
            delta,
            counit,
            antipode: Some(antipode),
            name: format!("f({})", g.name),
        }
    }

    /// Group algebra `F[G]` with the group-element basis.
    pub fn group_algebra(g: &GroupTable) -> Self {
        let n = g.order();
        let mut m: Mat<S> = Mat::zero(n, n * n);
        for a in 0..n {
            for b in 0..n {
                m.set(g.mul[a][b], a * n + b, S::one());
            }
        }
        let mut unit: Mat<S> = Mat::zero(n, 1);
        unit.set(g.identity, 0, S::one());
        let mut delta: Mat<S> = Mat::zero(n * n, n);
        for a in 0..n {
            delta.set(a * n + a, a, S::one());
        }
        let counit = Mat::from_fn(1, n, |_, _| S::one());
        let mut antipode: Mat<S> = Mat::zero(n, n);
        for i in 0..n {
            antipode.set(g.inverse(i), i, S::one());
        }
        StructuredBialgebra {
            n,
            m,
            unit,
            delta,
            counit,
            antipode: Some(antipode),
            name: format!("k[{}]", g.name),
        }
    }

    pub fn group_hopf(kind: &str, g: &GroupTable) -> Result<Self, HopfError> {
        g.validate()?;
        match kind {
            "function-algebra" => Ok(Self::function_algebra(g)),
            "group-algebra" => Ok(Self::group_algebra(g)),
            other => Err(HopfError::Input(format!("unknown kind `{other}`"))),
        }
    }

    /// Per-axiom residuals for the full Hopf structure.
    pub fn validate(&self, tol: Tol) -> Checks {
        let n = self.n;
        let id = Mat::<S>::identity(n);
        let mut checks = self.algebra().validate(tol);
        // Coassociativity and counit.
        let coassoc = self
            .delta
            .kron(&id)
            .mul(&self.delta)
            .residual(&id.kron(&self.delta).mul(&self.delta));
        checks.add("coassociativity", coassoc);
        let cl = self.counit.kron(&id).mul(&self.delta).residual(&id);
        let cr = id.kron(&self.counit).mul(&self.delta).residual(&id);
        checks.add("counit", cl.max(cr));
        // Bialgebra compatibility.
        let swap = swap_matrix::<S>(n);
        let mm = self.m.kron(&self.m);
        let mid = id.kron(&swap.kron(&id));
        let lhs = self.delta.mul(&self.m);
        let rhs = mm.mul(&mid).mul(&self.delta.kron(&self.delta));
        checks.add("delta_multiplicative", lhs.residual(&rhs));
        checks.add(
            "delta_unit",
            self.delta.mul(&self.unit).residual(&self.unit.kron(&self.unit)),
        );
        checks.add(
            "counit_multiplicative",
            self.counit.mul(&self.m).residual(&self.counit.kron(&self.counit)),
        );
        checks.add(
            "counit_unit",
            self.counit.mul(&self.unit).residual(&Mat::scalar(S::one())),
        );
        if let Some(s) = &self.antipode {
            let eta_eps = self.unit.mul(&self.counit);
            let al = self.m.mul(&s.kron(&id)).mul(&self.delta).residual(&eta_eps);
            let ar = self.m.mul(&id.kron(s)).mul(&self.delta).residual(&eta_eps);
            checks.add("antipode", al.max(ar));
        }
        checks
    }

    /// Dual Hopf algebra on the dual basis: multiplication is the transpose
    /// of the comultiplication and vice versa.
    pub fn dual(&self) -> Self {
        StructuredBialgebra {
            n: self.n,
            m: self.delta.transpose(),
            unit: self.counit.transpose(),
            delta: self.m.transpose(),
            counit: self.unit.transpose(),
            antipode: self.antipode.as_ref().map(|s| s.transpose()),
            name: format!("dual({})", self.name),
        }
    }

    /// Solves the one-sided invariance system for the integral in H and in
    /// the dual, normalized so that `phi(lambda) = 1`.
    pub fn find_integrals(&self, side: Side) -> Result<IntegralPair<S>, HopfError> {
        let n = self.n;
        let alg = self.algebra();
        // lambda: x.lambda = eps(x) lambda for all basis x (left), or
        // lambda.x = eps(x) lambda (right).
        let mut stacked: Option<Mat<S>> = None;
        for i in 0..n {
            let mult = match side {
                Side::Left => alg.left_mul(i),
                Side::Right => alg.right_mul(i),
            };
            let eps_i = self.counit.at(0, i).clone();
            let row = mult.sub(&Mat::identity(n).scale(&eps_i));
            stacked = Some(match stacked {
                None => row,
                Some(s) => s.vjoin(&row),
            });
        }
        let null = stacked.unwrap().nullspace();
        if null.len() != 1 {
            return Err(HopfError::Structural(format!(
                "integral space in the algebra has dimension {}, expected 1",
                null.len()
            )));
        }
        let lambda = normalize_first_nonzero(&null[0]);

        // phi: left integral in the dual means (id (x) phi) Delta(a) = phi(a) 1;
        // right means (phi (x) id) Delta(a) = phi(a) 1. Unknowns are the n
        // coordinates of phi.
        let mut sys: Mat<S> = Mat::zero(n * n, n);
        for j in 0..n {
            for p in 0..n {
                for q in 0..n {
                    let coeff = match side {
                        Side::Left => self.delta.at(p * n + q, j).clone(),
                        Side::Right => self.delta.at(q * n + p, j).clone(),
                    };
                    let cur = sys.at(j * n + p, q).add(&coeff);
                    sys.set(j * n + p, q, cur);
                }
                // minus phi_j * unit_p
                let cur = sys.at(j * n + p, j).sub(self.unit.at(p, 0));
                sys.set(j * n + p, j, cur);
            }
        }
        let nulls = sys.nullspace();
        if nulls.len() != 1 {
            return Err(HopfError::Structural(format!(
                "integral space in the dual has dimension {}, expected 1",
                nulls.len()
            )));
        }
        let phi_raw = nulls[0].transpose(); // 1 x n
        let pairing = phi_raw.mul(&lambda).at(0, 0).clone();
        let scale = pairing.inv().ok_or_else(|| {
            HopfError::Structural("phi(lambda) = 0; cannot normalize the pair".into())
        })?;
        Ok(IntegralPair { lambda, phi: phi_raw.scale(&scale), side })
    }

    /// `eps(lambda) != 0` detects semisimplicity, `phi(1) != 0` detects
    /// cosemisimplicity.
    pub fn semisimplicity_test(&self, pair: &IntegralPair<S>, tol: &Tol) -> (bool, bool) {
        let eps_lambda = self.counit.mul(&pair.lambda).at(0, 0).clone();
        let phi_one = pair.phi.mul(&self.unit).at(0, 0).clone();
        (!tol.is_zero(eps_lambda.abs()), !tol.is_zero(phi_one.abs()))
    }

    /// Matrix of `a -> phi(. a)` from the basis of H to the dual basis.
    pub fn fourier_map(&self, pair: &IntegralPair<S>) -> Result<Mat<S>, HopfError> {
        let f = self.gram(&pair.phi);
        if f.inverse().is_none() {
            return Err(HopfError::Structural("fourier map is singular (phi degenerate)".into()));
        }
        Ok(f)
    }

    /// Gram matrix `G[i][j] = phi(b_i b_j)`.
    pub fn gram(&self, phi: &Mat<S>) -> Mat<S> {
        let row = phi.mul(&self.m); // 1 x n^2
        Mat::from_fn(self.n, self.n, |i, j| row.at(0, i * self.n + j).clone())
    }

    /// The multiplication pulled back from the dual along the Fourier map,
    /// computed both as a conjugation and by the closed Sweedler formula; the
    /// two must agree. Returns the tensor and the agreement residual.
    pub fn tilde_multiplication(
        &self,
        pair: &IntegralPair<S>,
    ) -> Result<(Mat<S>, f64), HopfError> {
        let n = self.n;
        let f = self.fourier_map(pair)?;
        let f_inv = f.inverse().unwrap();
        let dual_m = self.delta.transpose();
        let route1 = f_inv.mul(&dual_m).mul(&f.kron(&f));

        let s = self
            .antipode
            .as_ref()
            .ok_or_else(|| HopfError::Input("antipode required".into()))?;
        let s_inv = s
            .inverse()
            .ok_or_else(|| HopfError::Structural("antipode not invertible".into()))?;
        // closed form: m~(a (x) b) = phi(S^{-1}(b_(1)) a) b_(2)
        let phim = pair.phi.mul(&self.m); // 1 x n^2, phi(b_p b_i)
        let mut route2: Mat<S> = Mat::zero(n, n * n);
        for i in 0..n {
            for j in 0..n {
                for p in 0..n {
                    for q in 0..n {
                        let dcoef = self.delta.at(p * n + q, j);
                        if dcoef.is_zero() {
                            continue;
                        }
                        // phi(S^{-1}(b_p) b_i) = sum_r s_inv[r][p] phi(b_r b_i)
                        let mut c = S::zero();
                        for r in 0..n {
                            c = c.add(&s_inv.at(r, p).mul(phim.at(0, r * n + i)));
                        }
                        let v = route2.at(q, i * n + j).add(&dcoef.mul(&c));
                        route2.set(q, i * n + j, v);
                    }
                }
            }
        }
        let agreement = route1.residual(&route2);
        Ok((route2, agreement))
    }

    /// Strong left invariance residual over all basis pairs.
    pub fn strong_left_invariance_residual(&self, pair: &IntegralPair<S>) -> f64 {
        let n = self.n;
        let alg = self.algebra();
        let s = match &self.antipode {
            Some(s) => s.clone(),
            None => return f64::NAN,
        };
        let g = self.gram(&pair.phi);
        let mut worst = 0.0f64;
        for t in 0..n {
            // LHS matrix: column j = (id (x) phi)((1 (x) b_t) Delta(b_j))
            let lhs = Mat::from_fn(n, n, |k, j| {
                let mut acc = S::zero();
                for q in 0..n {
                    acc = acc.add(&self.delta.at(k * n + q, j).mul(g.at(t, q)));
                }
                acc
            });
            // RHS: W = (S (x) id) Delta(b_t); column j = sum W[(k,l)] G[l][j] e_k
            let w = s.kron(&Mat::identity(n)).mul(&self.delta.column(t));
            let rhs = Mat::from_fn(n, n, |k, j| {
                let mut acc = S::zero();
                for l in 0..n {
                    acc = acc.add(&w.at(k * n + l, 0).mul(g.at(l, j)));
                }
                acc
            });
            worst = worst.max(lhs.residual(&rhs));
        }
        let _ = alg;
        worst
    }

    /// Compatibility of the twisted multiplication with the coproduct:
    /// `phi(c m~(a (x) b)) = (phi (x) phi)(Delta(c)(a (x) b))` on all basis triples.
    pub fn tilde_compatibility_residual(&self, pair: &IntegralPair<S>, tilde_m: &Mat<S>) -> f64 {
        let n = self.n;
        let id = Mat::<S>::identity(n);
        let lhs = pair.phi.mul(&self.m).mul(&id.kron(tilde_m)); // 1 x n^3
        // RHS: (phi (x) phi)((m (x) m)(1 (x) swap (x) 1)(Delta (x) id (x) id))
        let swap = swap_matrix::<S>(n);
        let mm = self.m.kron(&self.m);
        let mid = id.kron(&swap.kron(&id));
        let rhs = pair
            .phi
            .kron(&pair.phi)
            .mul(&mm)
            .mul(&mid)
            .mul(&self.delta.kron(&id.kron(&id)));
        lhs.residual(&rhs)
    }

    /// `phi(1) eps(lambda) / phi(lambda)`; equals `dim H` whenever nonzero.
    pub fn dimension_invariant(&self, pair: &IntegralPair<S>) -> Result<S, HopfError> {
        let phi_lambda = pair.phi.mul(&pair.lambda).at(0, 0).clone();
        let inv = phi_lambda
            .inv()
            .ok_or_else(|| HopfError::Structural("phi(lambda) = 0".into()))?;
        let phi_one = pair.phi.mul(&self.unit).at(0, 0).clone();
        let eps_lambda = self.counit.mul(&pair.lambda).at(0, 0).clone();
        Ok(phi_one.mul(&eps_lambda).mul(&inv))
    }

    pub fn convert<T: Scalar>(&self) -> StructuredBialgebra<T> {
        let f = |s: &S| T::from_json(&s.to_json()).expect("backend embedding");
        StructuredBialgebra {
            n: self.n,
            m: self.m.convert(f),
            unit: self.unit.convert(f),
            delta: self.delta.convert(f),
            counit: self.counit.convert(f),
            antipode: self.antipode.as_ref().map(|s| s.convert(f)),
            name: self.name.clone(),
        }
    }
}

/// Dual bases and the induced coalgebra for a nondegenerate form on an
/// algebra. Fails naming the Gram rank when the form is degenerate.
pub fn classical_frobenius_from_form<S: Scalar>(
    alg: &PlainAlgebra<S>,
    phi: &Mat<S>,
    tol: Tol,
) -> Result<ClassicalFrobenius<S>, HopfError> {
    let n = alg.n;
    let row = phi.mul(&alg.m);
    let gram = Mat::from_fn(n, n, |i, j| row.at(0, i * n + j).clone());
    let c = match gram.inverse() {
        Some(c) => c,
        None => {
            return Err(HopfError::Input(format!(
                "form is degenerate: gram rank {} < {}",
                gram.rank(),
                n
            )))
        }
    };
    // y_i = sum_k C[i][k] b_k satisfies phi(y_i x_j) = delta_ij.
    let frob = Mat::from_fn(n * n, 1, |ik, _| c.at(ik / n, ik % n).clone());
    let e_index = alg.m.mul(&frob);
    // Induced coproduct Delta(a) = (a (x) 1) Delta(1) with Delta(1) the
    // Frobenius element.
    let id = Mat::<S>::identity(n);
    let delta = Mat::from_fn(n * n, n, |kl, j| {
        let (k, l) = (kl / n, kl % n);
        let mut acc = S::zero();
        for i in 0..n {
            acc = acc.add(&alg.m.at(k, j * n + i).mul(c.at(i, l)));
        }
        acc
    });
    let mut checks = Checks::new::<S>(tol);
    // Dual-basis identities.
    let mut worst = 0.0f64;
    for j in 0..n {
        // sum_i x_i phi(y_i b_j) = b_j and sum_i phi(b_j x_i) y_i = b_j
        let mut v1: Mat<S> = Mat::zero(n, 1);
        let mut v2: Mat<S> = Mat::zero(n, 1);
        for i in 0..n {
            // phi(y_i b_j) = sum_k C[i][k] G[k][j]
            let mut cij = S::zero();
            for k in 0..n {
                cij = cij.add(&c.at(i, k).mul(gram.at(k, j)));
            }
            let cur = v1.at(i, 0).add(&cij);
            v1.set(i, 0, cur);
            // phi(b_j x_i) y_i contributes G[j][i] C[i][k] on b_k.
            for k in 0..n {
                let cur = v2.at(k, 0).add(&gram.at(j, i).mul(c.at(i, k)));
                v2.set(k, 0, cur);
            }
        }
        let mut ej: Mat<S> = Mat::zero(n, 1);
        ej.set(j, 0, S::one());
        worst = worst.max(v1.residual(&ej)).max(v2.residual(&ej));
    }
    checks.add("dual_basis_identity", worst);
    // The two Frobenius diagrams: Delta m = (m (x) 1)(1 (x) Delta) = (1 (x) m)(Delta (x) 1).
    let lhs = delta.mul(&alg.m);
    let r1 = alg.m.kron(&id).mul(&id.kron(&delta));
    let r2 = id.kron(&alg.m).mul(&delta.kron(&id));
    checks.add("frobenius_left", lhs.residual(&r1));
    checks.add("frobenius_right", lhs.residual(&r2));
    // Counit laws for the induced coproduct.
    let cl = phi.kron(&id).mul(&delta).residual(&id);
    let cr = id.kron(phi).mul(&delta).residual(&id);
    checks.add("induced_counit", cl.max(cr));
    Ok(ClassicalFrobenius {
        system: FrobeniusSystem { phi: phi.clone(), dual_basis: c, frobenius_element: frob, e_index },
        delta,
        checks,
    })
}

/// Result of the strong-separability probe on a Frobenius system.
pub struct Separability<S> {
    pub canonical: bool,
    pub lambda1: S,
    pub lambda2: S,
    pub central_residual: f64,
}

pub fn strong_separability_test<S: Scalar>(
    alg: &PlainAlgebra<S>,
    sys: &FrobeniusSystem<S>,
    tol: &Tol,
) -> Separability<S> {
    let lambda2 = sys.phi.mul(&alg.unit).at(0, 0).clone();
    // e_index should be a scalar multiple of the unit.
    let mut k = 0;
    let mut best = 0.0;
    for i in 0..alg.n {
        let a = alg.unit.at(i, 0).abs();
        if a > best {
            best = a;
            k = i;
        }
    }
    let lambda1 = match alg.unit.at(k, 0).inv() {
        Some(inv) => sys.e_index.at(k, 0).mul(&inv),
        None => S::zero(),
    };
    let central_residual = sys.e_index.residual(&alg.unit.scale(&lambda1));
    let scalar_ok = if S::EXACT { central_residual == 0.0 } else { tol.is_zero(central_residual) };
    let canonical = scalar_ok && !tol.is_zero(lambda1.abs()) && !tol.is_zero(lambda2.abs());
    Separability { canonical, lambda1, lambda2, central_residual }
}

fn normalize_first_nonzero<S: Scalar>(v: &Mat<S>) -> Mat<S> {
    // Deterministic representative: first coordinate of magnitude above the
    // float noise floor is scaled to one.
    let floor = if S::EXACT { 0.0 } else { v.max_abs() * 1e-6 };
    for i in 0..v.rows {
        if v.at(i, 0).abs() > floor {
            let inv = v.at(i, 0).inv().unwrap();
            return v.scale(&inv);
        }
    }
    v.clone()
}

/// The flip `a (x) b -> b (x) a` as an `n^2 x n^2` matrix.
pub fn swap_matrix<S: Scalar>(n: usize) -> Mat<S> {
    let mut m = Mat::zero(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m.set(j * n + i, i * n + j, S::one());
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Serialization: sparse triples with 0-based indices.

#[derive(Serialize, Deserialize)]
pub struct HopfJson {
    pub n: usize,
    pub m: Vec<(usize, usize, usize, ScalarJson)>,
    pub unit: Vec<ScalarJson>,
    pub delta: Vec<(usize, usize, usize, ScalarJson)>,
    pub counit: Vec<ScalarJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antipode: Option<Vec<(usize, usize, ScalarJson)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl<S: Scalar> StructuredBialgebra<S> {
    pub fn to_json(&self) -> HopfJson {
        let n = self.n;
        let mut m = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.m.at(k, i * n + j);
                    if !v.is_zero() {
                        m.push((i, j, k, v.to_json()));
                    }
                }
            }
        }
        let mut delta = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.delta.at(j * n + k, i);
                    if !v.is_zero() {
                        delta.push((i, j, k, v.to_json()));
                    }
                }
            }
        }
        let antipode = self.antipode.as_ref().map(|s| {
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let v = s.at(j, i);
                    if !v.is_zero() {
                        out.push((i, j, v.to_json()));
                    }
                }
            }
            out
        });
        HopfJson {
            n,
            m,
            unit: (0..n).map(|i| self.unit.at(i, 0).to_json()).collect(),
            delta,
            counit: (0..n).map(|j| self.counit.at(0, j).to_json()).collect(),
            antipode,
            name: Some(self.name.clone()),
        }
    }

    pub fn from_json(j: &HopfJson) -> Result<Self, HopfError> {
        let n = j.n;
        let dim_err = |what: &str| HopfError::Input(format!("{what} index out of range"));
        let mut m: Mat<S> = Mat::zero(n, n * n);
        for (i, jj, k, v) in &j.m {
            if *i >= n || *jj >= n || *k >= n {
                return Err(dim_err("m"));
            }
            m.set(*k, i * n + jj, S::from_json(v)?);
        }
        if j.unit.len() != n || j.counit.len() != n {
            return Err(HopfError::Input("unit/counit length mismatch".into()));
        }
        let unit = Mat::from_fn(n, 1, |i, _| S::from_json(&j.unit[i]).unwrap_or_else(|_| S::zero()));
        let mut delta: Mat<S> = Mat::zero(n * n, n);
        for (i, jj, k, v) in &j.delta {
            if *i >= n || *jj >= n || *k >= n {
                return Err(dim_err("delta"));
            }
            delta.set(jj * n + k, *i, S::from_json(v)?);
        }
        let counit =
            Mat::from_fn(1, n, |_, i| S::from_json(&j.counit[i]).unwrap_or_else(|_| S::zero()));
        let antipode = match &j.antipode {
            None => None,
            Some(entries) => {
                let mut s: Mat<S> = Mat::zero(n, n);
                for (i, jj, v) in entries {
                    if *i >= n || *jj >= n {
                        return Err(dim_err("antipode"));
                    }
                    s.set(*jj, *i, S::from_json(v)?);
                }
                Some(s)
            }
        };
        Ok(StructuredBialgebra {
            n,
            m,
            unit,
            delta,
            counit,
            antipode,
            name: j.name.clone().unwrap_or_else(|| "hopf".into()),
        })
    }
}
