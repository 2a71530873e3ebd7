//! Decomposition of sup-norm isometries into weighted composition form.
//!
//! For a surjective isometry `T: C(X,E) → C(Y,F)` the adjoint maps extreme
//! dual functionals to extreme dual functionals, and every extreme dual
//! functional of a finite sup-norm space is `v* ∘ δ_x` with `v*` an extreme
//! functional of the value space. Pulling the facet functional `g ∘ δ_y`
//! back through `T` therefore yields a covector supported at a single
//! domain point `x` and equal there to a facet normal of `E`. When the
//! recovered point is the same for every facet `g` of `F`, it defines
//! `φ(y)`, the fiber `V_y` is the corresponding block, and
//! `Tf(y) = V_y(f(φ(y)))` holds identically.
//!
//! When the recovered points disagree, the operator is a genuine isometry
//! without weighted-composition form; [`DecompositionFailure::PhiDisagreement`]
//! then carries the conflicting transports. This is expected exactly when
//! the value space fails property (D_w).

use crate::exec;
use crate::function_space::FunctionElement;
use crate::linalg::{Covector, Matrix, Vector};
use crate::operator::{make_weighted_composition, matrix_is_ball_isometry, verify_isometry, BlockOperator};
use crate::scalar::rat;
use crate::tsets::{has_property_dw, PropertyDw};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One functional transport: the facet `R` of `F` at codomain point `y`
/// pulled back through `T` lands at domain point `x` with covector
/// `functional` (a facet normal of `E`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub facet_id: usize,
    pub y: usize,
    pub x: usize,
    pub functional: Covector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `phi[y]` is the domain point feeding codomain point `y`.
    pub phi: Vec<usize>,
    /// `fibers[y]` is the `dim F × dim E` matrix `V_y`.
    pub fibers: Vec<Matrix>,
    /// All transports, sorted by `(y, facet_id)`.
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub enum DecompositionFailure {
    #[error("operator is not a surjective sup-norm isometry")]
    NotIsometry,
    #[error("functional transport at (facet {facet_id:?}, y={y}) is supported at points {support:?}, not a singleton")]
    BlockSupportNotSingleton {
        y: usize,
        /// The transported codomain facet; absent on the structural path,
        /// which scans raw block sparsity instead.
        facet_id: Option<usize>,
        support: Vec<usize>,
    },
    #[error("transported functional at (facet {facet_id}, y={y}) matches no facet normal of the domain value space")]
    FunctionalNotExtreme {
        y: usize,
        facet_id: usize,
        x: usize,
        functional: Covector,
    },
    #[error("facet transports at y={y} disagree on the source point: {conflicts:?}")]
    PhiDisagreement {
        y: usize,
        /// `(facet_id, recovered x)` for every facet of `F`.
        conflicts: Vec<(usize, usize)>,
    },
    #[error("block at (y={y}, x={x}) is nonzero off the point map")]
    OffBlockNonzero { y: usize, x: usize },
    #[error("fiber at y={y} does not map the domain value ball onto the codomain value ball")]
    FiberNotIsometry { y: usize },
}

/// Pull `gamma(R) ∘ δ_y` back through `T` and split it over domain points.
/// For a surjective isometry the result is supported at one point and equals
/// a facet normal of `E` there; that pair is returned.
pub fn recover_functional(
    t: &BlockOperator,
    facet_id: usize,
    y: usize,
) -> Result<(usize, Covector), DecompositionFailure> {
    let g = &t.codomain.value_space.facet(facet_id).normal;
    let df = t.codomain.value_space.dim;
    let de = t.domain.value_space.dim;
    // Stacked covector for g ∘ δ_y.
    let mut stacked = vec![crate::scalar::int(0); t.codomain.stacked_dim()];
    stacked[y * df..(y + 1) * df].clone_from_slice(&g.0);
    let ell = t.matrix.apply_transpose(&Covector(stacked));

    let support: Vec<usize> = (0..t.domain.points.len())
        .filter(|&x| ell.0[x * de..(x + 1) * de].iter().any(|c| !c.is_zero()))
        .collect();
    let [x] = support[..] else {
        return Err(DecompositionFailure::BlockSupportNotSingleton {
            y,
            facet_id: Some(facet_id),
            support,
        });
    };
    let vstar = Covector(ell.0[x * de..(x + 1) * de].to_vec());
    if !t
        .domain
        .value_space
        .ball
        .facets
        .iter()
        .any(|f| f.normal == vstar)
    {
        return Err(DecompositionFailure::FunctionalNotExtreme {
            y,
            facet_id,
            x,
            functional: vstar,
        });
    }
    Ok((x, vstar))
}

/// The per-point body of [`decompose`]: transport every facet of `F`
/// through `δ_y ∘ T` and require all transports to land at one point.
fn decompose_at(t: &BlockOperator, y: usize) -> Result<(usize, Matrix, Vec<Certificate>), DecompositionFailure> {
    let f_facets = t.codomain.value_space.facet_count();
    let mut certs = Vec::with_capacity(f_facets);
    for r in 0..f_facets {
        let (x, vstar) = recover_functional(t, r, y)?;
        certs.push(Certificate {
            facet_id: r,
            y,
            x,
            functional: vstar,
        });
    }
    let x0 = certs[0].x;
    if certs.iter().any(|c| c.x != x0) {
        return Err(DecompositionFailure::PhiDisagreement {
            y,
            conflicts: certs.iter().map(|c| (c.facet_id, c.x)).collect(),
        });
    }
    // All facet functionals of F vanish on the off blocks and they span the
    // dual, so the off blocks must be zero; verified, not assumed.
    for x in 0..t.domain.points.len() {
        if x != x0 && t.block(y, x) != Matrix::zero(t.codomain.value_space.dim, t.domain.value_space.dim) {
            return Err(DecompositionFailure::OffBlockNonzero { y, x });
        }
    }
    Ok((x0, t.block(y, x0), certs))
}

/// What one codomain point contributes: `(φ(y), fiber at y, certificates)`.
type PointDecomposition = Result<(usize, Matrix, Vec<Certificate>), DecompositionFailure>;

fn assemble(per_y: Vec<PointDecomposition>) -> Result<Decomposition, DecompositionFailure> {
    let mut phi = Vec::with_capacity(per_y.len());
    let mut fibers = Vec::with_capacity(per_y.len());
    let mut certificates = Vec::new();
    for item in per_y {
        let (x, fiber, certs) = item?;
        phi.push(x);
        fibers.push(fiber);
        certificates.extend(certs);
    }
    Ok(Decomposition {
        phi,
        fibers,
        certificates,
    })
}

pub fn decompose_seq(t: &BlockOperator) -> Result<Decomposition, DecompositionFailure> {
    if !crate::operator::verify_isometry_seq(t) {
        return Err(DecompositionFailure::NotIsometry);
    }
    let ny = t.codomain.points.len();
    assemble(exec::seq_map_collect(ny, |y| decompose_at(t, y)))
}

#[cfg(feature = "parallel")]
pub fn decompose_par(t: &BlockOperator) -> Result<Decomposition, DecompositionFailure> {
    if !crate::operator::verify_isometry_par(t) {
        return Err(DecompositionFailure::NotIsometry);
    }
    let ny = t.codomain.points.len();
    assemble(exec::par_map_collect(ny, |y| decompose_at(t, y)))
}

/// Paper-faithful decomposition via functional transport. Returns the
/// lowest-`y` failure; per-`y` work is independent and may run in parallel.
pub fn decompose(t: &BlockOperator) -> Result<Decomposition, DecompositionFailure> {
    #[cfg(feature = "parallel")]
    {
        decompose_par(t)
    }
    #[cfg(not(feature = "parallel"))]
    {
        decompose_seq(t)
    }
}

/// Structural oracle: decompose by block sparsity alone. Each block row
/// must hold exactly one nonzero block, and that block must map the value
/// ball of `E` onto the value ball of `F`. Produces the same certificates
/// as the transport path (`g ∘ V_y` is the transported functional).
pub fn structural_decompose(t: &BlockOperator) -> Result<Decomposition, DecompositionFailure> {
    if !verify_isometry(t) {
        return Err(DecompositionFailure::NotIsometry);
    }
    let e = &t.domain.value_space;
    let f = &t.codomain.value_space;
    let zero_block = Matrix::zero(f.dim, e.dim);
    let mut phi = Vec::with_capacity(t.codomain.points.len());
    let mut fibers = Vec::with_capacity(t.codomain.points.len());
    let mut certificates = Vec::new();
    for y in 0..t.codomain.points.len() {
        let support: Vec<usize> = (0..t.domain.points.len())
            .filter(|&x| t.block(y, x) != zero_block)
            .collect();
        let [x] = support[..] else {
            return Err(DecompositionFailure::BlockSupportNotSingleton {
                y,
                facet_id: None,
                support,
            });
        };
        let fiber = t.block(y, x);
        if !matrix_is_ball_isometry(e, f, &fiber) {
            return Err(DecompositionFailure::FiberNotIsometry { y });
        }
        for r in 0..f.facet_count() {
            certificates.push(Certificate {
                facet_id: r,
                y,
                x,
                functional: fiber.apply_transpose(&f.facet(r).normal),
            });
        }
        phi.push(x);
        fibers.push(fiber);
    }
    Ok(Decomposition {
        phi,
        fibers,
        certificates,
    })
}

/// Post-decomposition report on the conclusions and hypotheses of the
/// weighted-composition theorem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongReport {
    pub phi_bijective: bool,
    /// Per codomain point: the fiber maps the `E`-ball exactly onto the
    /// `F`-ball (vertex transport through the fiber and its inverse).
    pub fibers_surjective_isometries: Vec<bool>,
    /// Contraction certificates `‖V_y e‖ ≤ 1` on every ball vertex `e`.
    pub fibers_contractive: Vec<bool>,
    pub domain_value_dw: bool,
    pub codomain_value_dw: bool,
    /// At finite discrete scale the full product space is the unique
    /// completely regular subspace, so this hypothesis always holds.
    pub complete_regularity: bool,
}

impl StrongReport {
    pub fn all_hold(&self) -> bool {
        self.phi_bijective
            && self.fibers_surjective_isometries.iter().all(|&b| b)
            && self.fibers_contractive.iter().all(|&b| b)
    }
}

/// Check the theorem's "moreover" clause on a decomposition: `phi` is a
/// bijection and every fiber is a surjective isometry of the value spaces.
/// Reports hypothesis status alongside; never fails.
pub fn verify_decomposition_strong(t: &BlockOperator, d: &Decomposition) -> StrongReport {
    let e = &t.domain.value_space;
    let f = &t.codomain.value_space;
    let mut seen = vec![false; t.domain.points.len()];
    let mut injective = true;
    for &x in &d.phi {
        if seen[x] {
            injective = false;
        }
        seen[x] = true;
    }
    let phi_bijective =
        injective && t.domain.points.len() == t.codomain.points.len() && seen.iter().all(|&b| b);
    let one = crate::scalar::int(1);
    StrongReport {
        phi_bijective,
        fibers_surjective_isometries: d
            .fibers
            .iter()
            .map(|v| matrix_is_ball_isometry(e, f, v))
            .collect(),
        fibers_contractive: d
            .fibers
            .iter()
            .map(|v| e.ball.vertices.iter().all(|u| f.norm(&v.apply(u)) <= one))
            .collect(),
        domain_value_dw: matches!(has_property_dw(e), PropertyDw::Holds { .. }),
        codomain_value_dw: matches!(has_property_dw(f), PropertyDw::Holds { .. }),
        complete_regularity: true,
    }
}

/// A found violation of the vanishing transfer `f(φ(y)) = 0 ⇒ (Tf)(y) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishWitness {
    pub y: usize,
    pub f: FunctionElement,
    pub image_value: Vector,
}

/// Random check of the vanishing transfer: for `trials` random elements
/// vanishing at `phi[y]` for a random `y`, `(Tf)(y)` must be exactly zero.
pub fn vanish_transfer_check(
    t: &BlockOperator,
    d: &Decomposition,
    trials: usize,
    seed: u64,
) -> Result<(), VanishWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let de = t.domain.value_space.dim;
    for _ in 0..trials {
        let y = rng.random_range(0..t.codomain.points.len());
        let mut values = Vec::with_capacity(t.domain.points.len());
        for _ in 0..t.domain.points.len() {
            values.push(Vector(
                (0..de).map(|_| rat(rng.random_range(-12i64..=12), 3)).collect(),
            ));
        }
        values[d.phi[y]] = Vector::zero(de);
        let f = FunctionElement { values };
        let image_value = t.apply(&f).values[y].clone();
        if !image_value.is_zero() {
            return Err(VanishWitness { y, f, image_value });
        }
    }
    Ok(())
}

/// Rebuild the operator a decomposition describes; equality with the
/// original matrix is the reconstruction invariant.
pub fn synthesize(t: &BlockOperator, d: &Decomposition) -> BlockOperator {
    make_weighted_composition(t.domain.clone(), t.codomain.clone(), &d.phi, &d.fibers)
        .expect("a decomposition of a valid operator has consistent shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::square;
    use crate::function_space::{FunctionSpace, PointSet};

    fn two_point_square_space() -> FunctionSpace {
        FunctionSpace::new(PointSet::new(["a", "b"]).unwrap(), square())
    }

    fn mixing_swap_op() -> BlockOperator {
        let fs = two_point_square_space();
        let m = Matrix::from_int_rows(&[
            &[1, 0, 0, 0],
            &[0, 0, 0, 1],
            &[0, 0, 1, 0],
            &[0, 1, 0, 0],
        ]);
        BlockOperator::new(fs.clone(), fs, m).unwrap()
    }

    #[test]
    fn identity_recovers_identity() {
        let fs = two_point_square_space();
        let t = BlockOperator::new(fs.clone(), fs.clone(), Matrix::identity(4)).unwrap();
        for r in 0..4 {
            for y in 0..2 {
                let (x, vstar) = recover_functional(&t, r, y).unwrap();
                assert_eq!(x, y);
                assert_eq!(vstar, fs.value_space.facet(r).normal);
            }
        }
        let d = decompose(&t).unwrap();
        assert_eq!(d.phi, vec![0, 1]);
        assert_eq!(d.fibers, vec![Matrix::identity(2), Matrix::identity(2)]);
        assert_eq!(d.certificates.len(), 8);
        assert_eq!(synthesize(&t, &d).matrix, t.matrix);
        let strong = verify_decomposition_strong(&t, &d);
        assert!(strong.phi_bijective);
        assert!(strong.all_hold());
        assert!(!strong.domain_value_dw);
        assert!(vanish_transfer_check(&t, &d, 200, 0).is_ok());
    }

    #[test]
    fn swap_recovers_the_swapped_point() {
        let fs = two_point_square_space();
        let id2 = Matrix::identity(2);
        let t = make_weighted_composition(fs.clone(), fs, &[1, 0], &[id2.clone(), id2]).unwrap();
        let (x, vstar) = recover_functional(&t, 2, 0).unwrap();
        assert_eq!(x, 1);
        assert_eq!(vstar, t.domain.value_space.facet(2).normal);
        let d = decompose(&t).unwrap();
        assert_eq!(d.phi, vec![1, 0]);
        assert_eq!(synthesize(&t, &d).matrix, t.matrix);
    }

    #[test]
    fn mixing_swap_yields_phi_disagreement() {
        let t = mixing_swap_op();
        assert!(verify_isometry(&t));
        match decompose(&t) {
            Err(DecompositionFailure::PhiDisagreement { y, conflicts }) => {
                assert_eq!(y, 0);
                // Facet 0 ({x=1}) stays at point a; facet 1 ({y=1}) moves
                // to point b.
                assert_eq!(conflicts[0], (0, 0));
                assert_eq!(conflicts[1], (1, 1));
            }
            other => panic!("expected PhiDisagreement, got {other:?}"),
        }
        // The structural oracle rejects it too: block rows have support 2.
        match structural_decompose(&t) {
            Err(DecompositionFailure::BlockSupportNotSingleton { y: 0, facet_id: None, support }) => {
                assert_eq!(support, vec![0, 1]);
            }
            other => panic!("expected BlockSupportNotSingleton, got {other:?}"),
        }
    }

    #[test]
    fn non_isometry_is_rejected_up_front() {
        let fs = two_point_square_space();
        let mut m = Matrix::identity(4);
        m[(0, 0)] = rat(1, 2);
        let t = BlockOperator::new(fs.clone(), fs, m).unwrap();
        assert_eq!(decompose(&t), Err(DecompositionFailure::NotIsometry));
        assert_eq!(structural_decompose(&t), Err(DecompositionFailure::NotIsometry));
    }

    #[test]
    fn structural_and_transport_paths_agree_on_wc_operators() {
        let fs = two_point_square_space();
        let rot = Matrix::from_int_rows(&[&[0, -1], &[1, 0]]);
        let flip = Matrix::from_int_rows(&[&[-1, 0], &[0, 1]]);
        let t = make_weighted_composition(fs.clone(), fs, &[1, 0], &[rot, flip]).unwrap();
        let d1 = decompose(&t).unwrap();
        let d2 = structural_decompose(&t).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(synthesize(&t, &d1).matrix, t.matrix);
        assert!(verify_decomposition_strong(&t, &d1).all_hold());
    }

    #[test]
    fn planted_off_block_is_caught_by_vanish_transfer() {
        let fs = two_point_square_space();
        // Identity plus a sneaky off-block entry: not an isometry, but
        // vanish_transfer_check operates on any (T, D) pair handed to it.
        let mut m = Matrix::identity(4);
        m[(0, 2)] = rat(1, 7);
        let t = BlockOperator::new(fs.clone(), fs.clone(), m).unwrap();
        let d = Decomposition {
            phi: vec![0, 1],
            fibers: vec![Matrix::identity(2), Matrix::identity(2)],
            certificates: vec![],
        };
        let witness = vanish_transfer_check(&t, &d, 500, 1).unwrap_err();
        assert_eq!(witness.y, 0);
        assert!(witness.f.values[0].is_zero());
        assert!(!witness.image_value.is_zero());
        // And the bump example: T = identity, f a bump away from y.
        let t_id = BlockOperator::new(fs.clone(), fs.clone(), Matrix::identity(4)).unwrap();
        let f = crate::function_space::bump(&fs, 1, &Vector::from_ints(&[1, 0])).unwrap();
        assert!(t_id.apply(&f).values[0].is_zero());
    }

    #[test]
    fn vanish_check_accepts_true_decompositions_of_scaled_inputs() {
        let fs = two_point_square_space();
        let t = BlockOperator::new(fs.clone(), fs.clone(), Matrix::identity(4)).unwrap();
        let d = decompose(&t).unwrap();
        assert!(vanish_transfer_check(&t, &d, 500, 42).is_ok());
    }
}
