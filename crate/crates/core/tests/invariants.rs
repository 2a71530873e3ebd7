//! Cross-module invariants checked against independent oracles. Every
//! random draw is seeded; every comparison is exact rational arithmetic.
//!
//! The oracles here deliberately avoid the code paths they check: the norm
//! is recomputed from the vertex representation alone (the library computes
//! it from facet normals), T-set membership is recomputed as conic-
//! combination feasibility (the library compares supporting-functional
//! values), and the adjoint identity is checked entrywise on raw matrices.

use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tset_core::decompose::decompose;
use tset_core::fixtures::{
    cube_bipyramid, hexagon, identity_op, octahedron, path_metric, square, swap_op, wc_random,
};
use tset_core::function_space::{
    evaluate_functional, function_tsets, sample_members, sup_norm, ExtremeFunctional,
    FunctionElement, FunctionSpace, PointSet,
};
use tset_core::linalg::combinations;
use tset_core::operator::BlockOperator;
use tset_core::scalar::{int, rat, random_scalar};
use tset_core::stnorm::{lipschitz_seminorm, max_norm, MaxNormSpec, Seminorm};
use tset_core::tsets::{
    gamma, has_property_d, has_property_dw, on_common_facet, st_contains, stw_contains,
    tset_contains, tsets, PropertyD, PropertyDw, TSet,
};
use tset_core::{Covector, Matrix, NormedSpace, Scalar, Vector};

fn fixture_spaces() -> Vec<(&'static str, NormedSpace)> {
    vec![
        ("square", square()),
        ("hexagon", hexagon()),
        ("octahedron", octahedron()),
        ("cube_bipyramid", cube_bipyramid()),
    ]
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector((0..dim).map(|_| random_scalar(rng, 8, 8)).collect())
}

/// Least total weight `Σλ` over conic combinations `v = Σ λ_i v_i` of ball
/// vertices — the gauge of `v`, computed from the vertex representation
/// alone. By conic Carathéodory the optimum is attained on a linearly
/// independent set, so subsets of at most `dim` vertices are exhaustive.
fn vertex_gauge(space: &NormedSpace, v: &Vector) -> Scalar {
    if v.0.iter().all(Zero::is_zero) {
        return Scalar::zero();
    }
    let verts = &space.ball.vertices;
    let mut best: Option<Scalar> = None;
    for k in 1..=space.dim {
        for subset in combinations(verts.len(), k) {
            let mut m = Matrix::zero(space.dim, k);
            for (j, &vi) in subset.iter().enumerate() {
                for i in 0..space.dim {
                    m[(i, j)] = verts[vi].0[i].clone();
                }
            }
            let Ok(lambda) = m.solve(v) else { continue };
            if lambda.0.iter().any(|l| l < &Scalar::zero()) || m.apply(&lambda) != *v {
                continue;
            }
            let total = lambda.0.iter().fold(Scalar::zero(), |a, l| a + l);
            if best.as_ref().is_none_or(|b| total < *b) {
                best = Some(total);
            }
        }
    }
    best.expect("a full-dimensional ball represents every vector conically")
}

/// Unit-ball membership from the vertex representation: some conic
/// combination with total weight at most one reaches `w`.
fn hull_contains(space: &NormedSpace, w: &Vector) -> bool {
    if w.0.iter().all(Zero::is_zero) {
        return true;
    }
    let verts = &space.ball.vertices;
    let one = Scalar::one();
    for k in 1..=space.dim {
        for subset in combinations(verts.len(), k) {
            let mut m = Matrix::zero(space.dim, k);
            for (j, &vi) in subset.iter().enumerate() {
                for i in 0..space.dim {
                    m[(i, j)] = verts[vi].0[i].clone();
                }
            }
            let Ok(lambda) = m.solve(w) else { continue };
            if lambda.0.iter().any(|l| l < &Scalar::zero()) || m.apply(&lambda) != *w {
                continue;
            }
            if lambda.0.iter().fold(Scalar::zero(), |a, l| a + l) <= one {
                return true;
            }
        }
    }
    false
}

/// Conic-combination membership in one T-set: `v = Σ λ_i w_i` with
/// `λ ≥ 0` over the facet's incident vertices.
fn cone_contains(space: &NormedSpace, ts: &TSet, v: &Vector) -> bool {
    if v.0.iter().all(Zero::is_zero) {
        return true;
    }
    let incident: Vec<&Vector> = ts.incident.iter().map(|&i| space.vertex(i)).collect();
    for k in 1..=space.dim.min(incident.len()) {
        for subset in combinations(incident.len(), k) {
            let mut m = Matrix::zero(space.dim, k);
            for (j, &wi) in subset.iter().enumerate() {
                for i in 0..space.dim {
                    m[(i, j)] = incident[wi].0[i].clone();
                }
            }
            let Ok(lambda) = m.solve(v) else { continue };
            if lambda.0.iter().all(|l| l >= &Scalar::zero()) && m.apply(&lambda) == *v {
                return true;
            }
        }
    }
    false
}

/// The facet-normal norm equals the vertex-representation gauge on 1000
/// random rational vectors per fixture.
#[test]
fn norm_agrees_with_vertex_representation_gauge() {
    for (fixture_id, (name, space)) in fixture_spaces().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA0 + fixture_id as u64);
        for _ in 0..1000 {
            let v = random_vector(&mut rng, space.dim);
            assert_eq!(
                space.norm(&v),
                vertex_gauge(&space, &v),
                "{name}: facet norm and vertex gauge disagree at {v:?}"
            );
        }
    }
}

/// Membership bisection built only on the vertex representation brackets
/// the facet-normal norm at every step, and the scaled point `v/‖v‖` is on
/// the boundary: inside the ball, but outside after any stretch.
#[test]
fn membership_bisection_brackets_the_norm() {
    let stretch = rat(1001, 1000);
    for (fixture_id, (name, space)) in fixture_spaces().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB0 + fixture_id as u64);
        let mut checked = 0usize;
        while checked < 25 {
            let v = random_vector(&mut rng, space.dim);
            let t_star = space.norm(&v);
            if t_star.is_zero() {
                continue;
            }
            checked += 1;

            // Boundary certificate.
            let unit = v.scale(&(Scalar::one() / &t_star));
            assert!(hull_contains(&space, &unit), "{name}: v/‖v‖ not in the ball");
            assert!(
                !hull_contains(&space, &unit.scale(&stretch)),
                "{name}: stretched v/‖v‖ should leave the ball"
            );

            // Exponential bracket, then 20 exact bisection steps. The
            // invariant `t* ∈ (lo, hi]` must hold throughout.
            let mut hi = Scalar::one();
            while !hull_contains(&space, &v.scale(&(Scalar::one() / &hi))) {
                hi = &hi + &hi;
            }
            let mut lo = Scalar::zero();
            for _ in 0..20 {
                assert!(
                    lo < t_star && t_star <= hi,
                    "{name}: bracket ({lo}, {hi}] lost t* = {t_star}"
                );
                let mid = (&lo + &hi) / int(2);
                if hull_contains(&space, &v.scale(&(Scalar::one() / &mid))) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!(lo < t_star && t_star <= hi);
        }
    }
}

/// Triangle inequality, symmetry, homogeneity, and normalization of the
/// facet normals, on seeded random data per fixture.
#[test]
fn norm_axioms_hold_exactly() {
    for (fixture_id, (name, space)) in fixture_spaces().into_iter().enumerate() {
        for facet in &space.ball.facets {
            assert!(
                space.dual_norm(&facet.normal).is_one(),
                "{name}: facet normal {:?} is not normalized",
                facet.normal
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0 + fixture_id as u64);
        for _ in 0..300 {
            let u = random_vector(&mut rng, space.dim);
            let v = random_vector(&mut rng, space.dim);
            let t = random_scalar(&mut rng, 9, 7);
            assert!(
                space.norm(&(&u + &v)) <= space.norm(&u) + space.norm(&v),
                "{name}: triangle inequality fails for {u:?}, {v:?}"
            );
            let minus_one = -Scalar::one();
            assert_eq!(space.norm(&v.scale(&minus_one)), space.norm(&v), "{name}: not symmetric");
            let abs_t = if t < Scalar::zero() { -t.clone() } else { t.clone() };
            assert_eq!(
                space.norm(&v.scale(&t)),
                abs_t * space.norm(&v),
                "{name}: not absolutely homogeneous"
            );
        }
    }
}

/// At every pairwise vertex midpoint, supporting-functional membership
/// agrees with conic-combination membership for every T-set, and Γ is the
/// singleton facet normal recovered independently from incident vertices.
#[test]
fn tset_membership_matches_cone_oracle_at_midpoints() {
    let half = rat(1, 2);
    for (name, space) in fixture_spaces() {
        let all = tsets(&space);
        for ts in &all {
            let g = gamma(&space, ts);
            assert_eq!(g.functionals.len(), 1, "{name}: Γ is not a singleton");
            assert_eq!(g.functionals[0], ts.support, "{name}: Γ differs from the facet normal");
        }
        let n = space.ball.vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                let m = (space.vertex(i) + space.vertex(j)).scale(&half);
                for ts in &all {
                    assert_eq!(
                        tset_contains(&space, ts, &m),
                        cone_contains(&space, ts, &m),
                        "{name}: membership oracles disagree at midpoint {m:?} of ({i}, {j})"
                    );
                }
            }
        }
    }
}

/// No T-set can be enlarged: adding any ball vertex outside the facet
/// breaks norm additivity against some incident vertex, while additivity
/// holds exactly between incident vertices.
#[test]
fn tsets_are_maximal_additive_families() {
    let two = int(2);
    for (name, space) in fixture_spaces() {
        for ts in tsets(&space) {
            for (w_id, w) in space.ball.vertices.iter().enumerate() {
                if ts.incident.contains(&w_id) {
                    continue;
                }
                let strict = ts.incident.iter().any(|&u_id| {
                    let u = space.vertex(u_id);
                    space.norm(&(u + w)) < two
                });
                assert!(
                    strict,
                    "{name}: facet {} plus outside vertex {w_id} stays additive",
                    ts.facet_id
                );
            }
            for &a in &ts.incident {
                for &b in &ts.incident {
                    assert_eq!(
                        space.norm(&(space.vertex(a) + space.vertex(b))),
                        two,
                        "{name}: incident vertices {a}, {b} of facet {} are not additive",
                        ts.facet_id
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        .. ProptestConfig::default()
    })]

    /// Cones are scale-invariant: membership in a T-set is unchanged under
    /// multiplication by any positive rational.
    #[test]
    fn tset_membership_is_invariant_under_positive_scaling(
        fixture in 0usize..4,
        coords in prop::collection::vec(-8i64..=8, 3),
        num in 1i64..=12,
        den in 1i64..=12,
    ) {
        let (_, space) = fixture_spaces().swap_remove(fixture);
        let v = Vector(coords.into_iter().take(space.dim).map(int).collect());
        prop_assume!(v.dim() == space.dim);
        let t = rat(num, den);
        let tv = v.scale(&t);
        for ts in tsets(&space) {
            prop_assert_eq!(
                tset_contains(&space, &ts, &v),
                tset_contains(&space, &ts, &tv),
                "facet {} changes membership under scaling by {}", ts.facet_id, t
            );
        }
    }

    /// The norm is positively homogeneous and definite on integer vectors.
    #[test]
    fn norm_is_definite_and_homogeneous(
        fixture in 0usize..4,
        coords in prop::collection::vec(-8i64..=8, 3),
        num in 1i64..=12,
        den in 1i64..=12,
    ) {
        let (_, space) = fixture_spaces().swap_remove(fixture);
        let v = Vector(coords.into_iter().take(space.dim).map(int).collect());
        prop_assume!(v.dim() == space.dim);
        let t = rat(num, den);
        prop_assert_eq!(space.norm(&v.scale(&t)), t * space.norm(&v));
        prop_assert_eq!(space.norm(&v).is_zero(), v.0.iter().all(Zero::is_zero));
    }
}

/// `St(e)` has two equivalent descriptions on the sphere: norm additivity
/// (`‖e + e'‖ = 2`) and lying on a common facet. 1000 random sphere pairs
/// per fixture.
#[test]
fn st_characterizations_agree_on_random_sphere_pairs() {
    for (fixture_id, (name, space)) in fixture_spaces().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD0 + fixture_id as u64);
        let sphere_point = |rng: &mut ChaCha8Rng| loop {
            let v = random_vector(rng, space.dim);
            let n = space.norm(&v);
            if !n.is_zero() {
                return v.scale(&(Scalar::one() / n));
            }
        };
        for _ in 0..1000 {
            let e = sphere_point(&mut rng);
            let ep = sphere_point(&mut rng);
            let additive = st_contains(&space, &e, &ep).expect("both points are on the sphere");
            assert_eq!(
                additive,
                on_common_facet(&space, &e, &ep),
                "{name}: St descriptions disagree at ({e:?}, {ep:?})"
            );
        }
    }
}

/// Membership in the weak star set only grows with the step: if
/// `‖u + e'‖ > ‖u‖` for a sphere point `e'`, then `‖u + r·e'‖ > ‖u‖`
/// for r = 2, 3 as well.
#[test]
fn weak_star_sets_grow_along_rays() {
    for (fixture_id, (name, space)) in fixture_spaces().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xE0 + fixture_id as u64);
        let mut hits = 0usize;
        for _ in 0..600 {
            let u = random_vector(&mut rng, space.dim);
            let e = random_vector(&mut rng, space.dim);
            let n = space.norm(&e);
            if n.is_zero() {
                continue;
            }
            let ep = e.scale(&(Scalar::one() / n));
            if !stw_contains(&space, &u, &ep).expect("e' is on the sphere") {
                continue;
            }
            hits += 1;
            for r in [2i64, 3] {
                assert!(
                    space.norm(&(&u + &ep.scale(&int(r)))) > space.norm(&u),
                    "{name}: ‖u + {r}e'‖ ≤ ‖u‖ although e' ∈ St_w(u), u = {u:?}, e' = {ep:?}"
                );
            }
        }
        assert!(hits > 100, "{name}: weak star membership almost never sampled ({hits})");
    }
}

/// (D) implies (D_w), checked on every fixture; where (D) fails the
/// implication is vacuous and both verdicts are still well-formed.
#[test]
fn property_d_implies_property_dw() {
    for (name, space) in fixture_spaces() {
        let d = has_property_d(&space);
        let dw = has_property_dw(&space);
        if matches!(d, PropertyD::Holds) {
            assert!(
                matches!(dw, PropertyDw::Holds { .. }),
                "{name}: (D) holds but (D_w) fails"
            );
        }
    }
}

/// Every generated member of a function T-set is peaked there: the extreme
/// functional (Γ of the facet, at the point) evaluates to the sup norm.
#[test]
fn extreme_functionals_peak_on_sampled_members() {
    let points = PointSet::new(["a", "b"]).expect("valid labels");
    let fs = FunctionSpace::new(points, square());
    let space_tsets = tsets(&fs.value_space);
    for ft in function_tsets(&fs) {
        let g = gamma(&fs.value_space, &space_tsets[ft.value_tset.facet_id]);
        let ef = ExtremeFunctional {
            covector: g.functionals[0].clone(),
            point: ft.point,
        };
        for (k, member) in sample_members(&fs, &ft, 50, 0xF0).iter().enumerate() {
            assert_eq!(
                evaluate_functional(member, &ef),
                sup_norm(&fs, member),
                "member {k} of (facet {}, point {}) is not peaked",
                ft.value_tset.facet_id,
                ft.point
            );
        }
    }
}

/// The adjoint identity behind functional transport: for every certificate
/// (R, y, x, v*) of a decomposition, pulling the padded covector
/// Γ_R ∘ δ_y back through the operator matrix lands exactly on v* ∘ δ_x.
#[test]
fn certificates_satisfy_the_adjoint_identity() {
    let mut ops: Vec<BlockOperator> = vec![identity_op(), swap_op()];
    for seed in 0..8 {
        ops.push(wc_random(&["a", "b"], square(), seed));
    }
    for seed in 0..4 {
        ops.push(wc_random(&["a", "b", "c"], cube_bipyramid(), seed));
    }
    for (k, t) in ops.iter().enumerate() {
        let d = decompose(t).unwrap_or_else(|e| panic!("operator {k} should decompose: {e}"));
        let codomain_tsets = tsets(&t.codomain.value_space);
        let df = t.codomain.value_space.dim;
        let de = t.domain.value_space.dim;
        for cert in &d.certificates {
            let g = gamma(&t.codomain.value_space, &codomain_tsets[cert.facet_id]);
            let mut padded = vec![Scalar::zero(); t.codomain.stacked_dim()];
            for (i, c) in g.functionals[0].0.iter().enumerate() {
                padded[cert.y * df + i] = c.clone();
            }
            let pulled = t.matrix.apply_transpose(&Covector(padded));
            let mut expected = vec![Scalar::zero(); t.domain.stacked_dim()];
            for (i, c) in cert.functional.0.iter().enumerate() {
                expected[cert.x * de + i] = c.clone();
            }
            assert_eq!(
                pulled,
                Covector(expected),
                "operator {k}: adjoint identity fails at (facet {}, y={})",
                cert.facet_id,
                cert.y
            );
        }
    }
}

/// The Lipschitz seminorm vanishes exactly on constants, so the max norm
/// collapses to the sup norm there — 100 random constants per metric.
#[test]
fn lipschitz_seminorm_kernel_contains_constants()  {
    for labels in [vec!["a", "b"], vec!["a", "b", "c"]] {
        let metric = path_metric(&labels);
        let fs = FunctionSpace::new(PointSet::new(labels.clone()).expect("valid labels"), square());
        let spec = MaxNormSpec::new(fs.clone(), Seminorm::Lipschitz { metric: metric.clone() })
            .expect("metric matches the point set");
        let mut rng = ChaCha8Rng::seed_from_u64(0x5E);
        for _ in 0..100 {
            let u = random_vector(&mut rng, fs.value_space.dim);
            let c = FunctionElement::constant(&fs, &u);
            assert!(
                lipschitz_seminorm(&metric, &fs.value_space, &c).is_zero(),
                "seminorm does not vanish on the constant {u:?}"
            );
            assert_eq!(
                max_norm(&spec, &c),
                sup_norm(&fs, &c),
                "max norm and sup norm differ on a constant"
            );
            assert_eq!(sup_norm(&fs, &c), fs.value_space.norm(&u));
        }
    }
}
