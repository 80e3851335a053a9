//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test -p morita-ssum --test acceptance -- --nocapture`.

use morita_ssum::bicolored::{ContextSkeletal, COLOR_A, COLOR_B};
use morita_ssum::frobenius::regular_from_hopf;
use morita_ssum::groups::GroupTable;
use morita_ssum::hopf::{Side, StructuredBialgebra};
use morita_ssum::morita::{build_context, Corner, MoritaContext};
use morita_ssum::repcat::SimpleTable;
use morita_ssum::scalar::{Rat, Scalar, Tol, C64};
use morita_ssum::skeletal::{builtin, vec_group};
use morita_ssum::statesum::{
    bundled_triangulation, flat_bundle_oracle, state_sum, EvalOptions, BUNDLED_TRIANGULATIONS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE97)
}

fn tol() -> Tol {
    Tol::default()
}

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!("acceptance {criterion}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

fn bundled_hopfs<S: Scalar>() -> Vec<StructuredBialgebra<S>> {
    vec![
        StructuredBialgebra::function_algebra(&GroupTable::cyclic(2)),
        StructuredBialgebra::function_algebra(&GroupTable::cyclic(3)),
        StructuredBialgebra::function_algebra(&GroupTable::s3()),
        StructuredBialgebra::group_algebra(&GroupTable::cyclic(2)),
        StructuredBialgebra::group_algebra(&GroupTable::s3()),
    ]
}

/// Criterion 1: the normalized integral ratio equals the dimension, exactly
/// in the rational backend and below 1e-9 in the complex backend.
#[test]
fn criterion_1_hopf_dimension_invariant() {
    let mut worst_exact = 0.0f64;
    for h in bundled_hopfs::<Rat>() {
        let pair = h.find_integrals(Side::Left).unwrap();
        let v = h.dimension_invariant(&pair).unwrap();
        worst_exact = worst_exact.max(v.sub(&Rat::from_i64(h.n as i64)).abs());
    }
    let mut worst_complex = 0.0f64;
    for h in bundled_hopfs::<C64>() {
        let pair = h.find_integrals(Side::Left).unwrap();
        let v = h.dimension_invariant(&pair).unwrap();
        worst_complex = worst_complex.max(v.sub(&C64::from_i64(h.n as i64)).abs());
    }
    verdict(
        "1 hopf dimension invariant",
        worst_exact == 0.0 && worst_complex < 1e-9,
        &format!("exact residual {worst_exact:.1e}, complex residual {worst_complex:.1e}"),
    );
}

/// Criterion 2: the regular Frobenius algebras pass the axiom suite with
/// zero residual (exact) and below 1e-9 (complex); an injected single-entry
/// fault is detected.
#[test]
fn criterion_2_frobenius_axiom_suite() {
    let mut worst_exact = 0.0f64;
    for h in bundled_hopfs::<Rat>() {
        let pair = h.find_integrals(Side::Left).unwrap();
        let (f, agreement) = regular_from_hopf(&h, &pair).unwrap();
        worst_exact = worst_exact.max(agreement);
        worst_exact = worst_exact.max(f.intertwiner_residual(&h));
        worst_exact = worst_exact.max(f.check_axioms(tol()).unwrap().max_residual());
    }
    let mut worst_complex = 0.0f64;
    for h in bundled_hopfs::<C64>() {
        let pair = h.find_integrals(Side::Left).unwrap();
        let (f, agreement) = regular_from_hopf(&h, &pair).unwrap();
        worst_complex = worst_complex.max(agreement);
        worst_complex = worst_complex.max(f.intertwiner_residual(&h));
        worst_complex = worst_complex.max(f.check_axioms(tol()).unwrap().max_residual());
    }
    // fault injection: scale one comultiplication entry
    let h = StructuredBialgebra::<Rat>::function_algebra(&GroupTable::s3());
    let pair = h.find_integrals(Side::Left).unwrap();
    let (mut f, _) = regular_from_hopf(&h, &pair).unwrap();
    let v = f.w.at(0, 0).mul(&Rat::from_i64(2)).add(&Rat::from_i64(1));
    f.w.set(0, 0, v);
    let detected = !f.check_axioms(tol()).unwrap().all_pass();
    verdict(
        "2 frobenius axiom suite",
        worst_exact == 0.0 && worst_complex < 1e-9 && detected,
        &format!(
            "exact residual {worst_exact:.1e}, complex residual {worst_complex:.1e}, fault detected {detected}"
        ),
    );
}

/// Criterion 3: the renormalization-invariant product of the loop scalars
/// equals the dimension for every regular algebra.
#[test]
fn criterion_3_canonicity_product() {
    let mut ok = true;
    let mut detail = String::new();
    for h in bundled_hopfs::<Rat>() {
        let pair = h.find_integrals(Side::Left).unwrap();
        let (f, _) = regular_from_hopf(&h, &pair).unwrap();
        let c = f.classify_in(&h, &tol());
        ok &= c.canonical && c.irreducible;
        ok &= c.product == Rat::from_i64(h.n as i64);
        detail.push_str(&format!("{}={:?} ", h.name, c.product));
    }
    for h in bundled_hopfs::<C64>() {
        let pair = h.find_integrals(Side::Left).unwrap();
        let (f, _) = regular_from_hopf(&h, &pair).unwrap();
        let c = f.classify(&tol());
        ok &= c.product.sub(&C64::from_i64(h.n as i64)).abs() < 1e-9;
    }
    verdict("3 canonicity product", ok, detail.trim());
}

fn context_over<S: Scalar>(g: &GroupTable) -> MoritaContext<S> {
    let h = StructuredBialgebra::<S>::function_algebra(g);
    let table = SimpleTable::irreps(&h, tol(), &mut rng()).unwrap();
    let pair = h.find_integrals(Side::Left).unwrap();
    let (frob, _) = regular_from_hopf(&h, &pair).unwrap();
    build_context(table, frob, tol(), &mut rng()).unwrap()
}

/// Criterion 4: the four corner dimensions of the pointed contexts match the
/// group order, and the opposite diagonal corner of the S3 context has three
/// simples with dimensions matching the group-algebra oracle.
#[test]
fn criterion_4_corner_dimensions() {
    let mut ok = true;
    let mut detail = String::new();
    for (g, expect) in [
        (GroupTable::cyclic(2), 2i64),
        (GroupTable::cyclic(3), 3),
        (GroupTable::s3(), 6),
    ] {
        let ctx = context_over::<C64>(&g);
        ok &= ctx.checks.all_pass();
        let sum_d2 = |v: &Vec<morita_ssum::morita::CornerSimple<C64>>| {
            let mut acc = C64::zero();
            for y in v {
                acc = acc.add(&y.d2);
            }
            acc
        };
        let target = C64::from_i64(expect);
        let corners = [
            ctx.engine.ctx.table.global_dimension(),
            sum_d2(&ctx.ba),
            sum_d2(&ctx.ab),
            sum_d2(&ctx.bb),
        ];
        for c in &corners {
            ok &= c.sub(&target).abs() < 1e-9;
        }
        detail.push_str(&format!("{}: corners {:?} ", g.name, expect));
        if g.order() == 6 {
            // character-theory oracle: simple dimensions of the group algebra
            let kh = StructuredBialgebra::<C64>::group_algebra(&g);
            let kt = SimpleTable::irreps(&kh, tol(), &mut rng()).unwrap();
            let mut oracle: Vec<usize> = kt.simples.iter().map(|s| s.dim).collect();
            oracle.sort();
            let mut got: Vec<i64> = ctx
                .bb
                .iter()
                .map(|y| y.d.as_ref().unwrap().to_c64().re.round() as i64)
                .collect();
            got.sort();
            ok &= ctx.bb.len() == 3;
            ok &= got == oracle.iter().map(|&d| d as i64).collect::<Vec<_>>();
            detail.push_str(&format!("s3 opposite corner dims {got:?} "));
        }
    }
    verdict("4 corner dimensions", ok, detail.trim());
}

/// Criterion 5: interchange and associativity of the two compositions on
/// randomized composable tuples, one hundred per corner pattern.
#[test]
fn criterion_5_interchange_suite() {
    let ctx = context_over::<C64>(&GroupTable::s3());
    let e = &ctx.engine;
    let mut r = rng();
    let q = e.q_part;
    let mut worst = 0.0f64;
    let patterns = [
        (false, false, false),
        (true, false, false),
        (false, true, false),
        (false, false, true),
        (true, true, false),
        (false, true, true),
        (true, false, true),
        (true, true, true),
    ];
    for p in patterns {
        for i in 0..100 {
            let w1: Vec<usize> = vec![i % 6];
            let w2: Vec<usize> = vec![q];
            worst = worst.max(e.interchange_residual(p, (&w1, &w2), &mut r).unwrap());
        }
    }
    for corner in [Corner::AA, Corner::BA, Corner::AB, Corner::BB] {
        for i in 0..100 {
            let w: Vec<usize> = if i % 2 == 0 { vec![q] } else { vec![i % 6] };
            worst = worst.max(e.vertical_assoc_residual(corner, &w, &mut r).unwrap());
        }
    }
    verdict("5 interchange and associativity", worst < 1e-9, &format!("max residual {worst:.1e}"));
}

/// Criterion 6: Hopf reconstruction from the two pointed depth-two contexts.
#[test]
fn criterion_6_hopf_reconstruction() {
    let mut ok = true;
    let mut detail = String::new();
    for (g, dim) in [(GroupTable::cyclic(2), 2usize), (GroupTable::s3(), 6)] {
        let ctx = context_over::<C64>(&g);
        let href = StructuredBialgebra::<C64>::function_algebra(&g);
        let rec = ctx.reconstruct(Some(&href), &mut rng()).unwrap();
        ok &= rec.a_hopf.n == dim && rec.b_hopf.n == dim;
        ok &= rec.checks.all_pass();
        ok &= rec.checks.max_residual() < 1e-9;
        let s = rec.a_hopf.antipode.clone().unwrap();
        let invol = s.mul(&s).residual(&morita_ssum::mat::Mat::identity(dim));
        ok &= invol < 1e-9;
        if g.order() == 2 {
            ok &= rec.matched == Some(true);
        }
        detail.push_str(&format!(
            "{}: dim {} residual {:.1e} matched {:?} ",
            g.name,
            rec.a_hopf.n,
            rec.checks.max_residual(),
            rec.matched
        ));
    }
    verdict("6 depth-two reconstruction", ok, detail.trim());
}

/// Criterion 7: pointed state sums equal the flat-bundle counts on every
/// bundled manifold, exactly in the rational backend.
#[test]
fn criterion_7_pointed_state_sums() {
    let mut ok = true;
    let mut lines = String::new();
    for g in [GroupTable::cyclic(2), GroupTable::cyclic(3), GroupTable::s3()] {
        let data = vec_group::<Rat>(&g);
        for name in BUNDLED_TRIANGULATIONS {
            let tri = bundled_triangulation(name).unwrap();
            let v = state_sum(&tri, &data, &vec![0; tri.n_vertices], &EvalOptions::default())
                .unwrap();
            let oracle = flat_bundle_oracle::<Rat>(tri.pi1.as_deref().unwrap(), &g).unwrap();
            if v != oracle {
                ok = false;
                lines.push_str(&format!("{name}/{}: {v:?} != {oracle:?} ", g.name));
            }
        }
    }
    verdict(
        "7 pointed state sums vs oracle",
        ok,
        if lines.is_empty() { "all 15 pairs equal exactly" } else { &lines },
    );
}

/// Criterion 8: both diagonal corners of a context produce the same
/// state-sum invariant on every bundled manifold.
#[test]
fn criterion_8_morita_invariance() {
    let mut ok = true;
    let mut detail = String::new();
    for g in [GroupTable::cyclic(2), GroupTable::s3()] {
        let ctx = context_over::<C64>(&g);
        let skel = ContextSkeletal::extract(&ctx, &mut rng()).unwrap();
        let a_corner = skel.corner_data(COLOR_A).unwrap();
        let b_corner = skel.corner_data(COLOR_B).unwrap();
        assert!(a_corner.validate(tol()).all_pass());
        assert!(b_corner.validate(tol()).all_pass());
        let mut worst = 0.0f64;
        for name in BUNDLED_TRIANGULATIONS {
            let tri = bundled_triangulation(name).unwrap();
            let colors = vec![0; tri.n_vertices];
            let opts = EvalOptions::default();
            let va = state_sum(&tri, &a_corner, &colors, &opts).unwrap();
            let vb = state_sum(&tri, &b_corner, &colors, &opts).unwrap();
            worst = worst.max(va.sub(&vb).abs());
        }
        ok &= worst < 1e-6;
        detail.push_str(&format!("{}: max gap {worst:.1e} ", g.name));
    }
    verdict("8 morita invariance of the state sum", ok, detail.trim());
}

/// Criterion 9: the two-color sum over the cyclic-group context is
/// independent of all thirty-two vertex labelings of the five-tetrahedron
/// sphere.
#[test]
fn criterion_9_labeling_independence() {
    let ctx = context_over::<C64>(&GroupTable::cyclic(2));
    let skel = ContextSkeletal::extract(&ctx, &mut rng()).unwrap();
    let tri = bundled_triangulation("s3_5tet").unwrap();
    let opts = EvalOptions::default();
    let base = state_sum(&tri, &skel, &[COLOR_A; 5], &opts).unwrap();
    let mut worst = 0.0f64;
    for mask in 0u32..32 {
        let colors: Vec<usize> =
            (0..5).map(|v| if (mask >> v) & 1 == 1 { COLOR_B } else { COLOR_A }).collect();
        let v = state_sum(&tri, &skel, &colors, &opts).unwrap();
        worst = worst.max(v.sub(&base).abs());
    }
    verdict(
        "9 labeling independence",
        worst < 1e-6,
        &format!("32 labelings, max gap {worst:.1e}, value {:.6}", base.to_c64().re),
    );
}

/// Criterion 10: the golden-ratio sphere value, its stability under the
/// 2-3 move, and the pentagon residuals of the bundled irrational tables.
#[test]
fn criterion_10_normalization_pins() {
    let fib = builtin::<C64>("fibonacci").unwrap();
    let ising = builtin::<C64>("ising").unwrap();
    let expect = 2.0 / (5.0 + 5.0f64.sqrt());
    let opts = EvalOptions::default();
    let t5 = bundled_triangulation("s3_5tet").unwrap();
    let t6 = bundled_triangulation("s3_6tet").unwrap();
    let v5 = state_sum(&t5, &fib, &[0; 5], &opts).unwrap();
    let v6 = state_sum(&t6, &fib, &[0; 5], &opts).unwrap();
    let fib_res = (v5.to_c64().re - expect).abs().max(v5.to_c64().im.abs());
    let move_res = v5.sub(&v6).abs();
    let pent = fib.pentagon_residual().max(ising.pentagon_residual());
    let ok = fib_res < 1e-9 && move_res < 1e-9 && pent < 1e-12;
    verdict(
        "10 normalization pins",
        ok,
        &format!("sphere residual {fib_res:.1e}, move gap {move_res:.1e}, pentagon {pent:.1e}"),
    );
}
