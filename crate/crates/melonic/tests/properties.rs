//! Randomized invariants: basis changes are exact bijections, the ring
//! operations behave, and reduction never moves a class.

use num_bigint::BigInt;
use proptest::prelude::*;

use melonic::construction::{MelonicConstruction, Stage};
use melonic::motive::{class_of, ClassEngine};
use melonic::polyring::{Basis, IntPoly};

fn arb_basis() -> impl Strategy<Value = Basis> {
    prop_oneof![Just(Basis::L), Just(Basis::T), Just(Basis::S)]
}

/// Coefficients spanning the full u64 range (and beyond, via products in
/// the tests themselves), degree <= 30.
fn arb_poly(basis: Basis) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec((any::<u64>(), any::<bool>()), 0..=31).prop_map(move |raw| {
        IntPoly::new(
            basis,
            raw.into_iter()
                .map(|(mag, neg)| {
                    let c = BigInt::from(mag);
                    if neg {
                        -c
                    } else {
                        c
                    }
                })
                .collect(),
        )
    })
}

fn arb_poly_any_basis() -> impl Strategy<Value = IntPoly> {
    arb_basis().prop_flat_map(arb_poly)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn change_basis_round_trips(p in arb_poly_any_basis(), target in arb_basis()) {
        let converted = p.change_basis(target);
        prop_assert_eq!(converted.change_basis(p.basis()), p);
    }

    #[test]
    fn change_basis_preserves_value(p in arb_poly(Basis::L), x in -100i64..100) {
        let s_form = p.change_basis(Basis::S);
        // S = L - 2, so evaluating the S form at x-2 is evaluating the
        // original at L = x
        prop_assert_eq!(
            s_form.eval_int(&BigInt::from(x - 2)),
            p.eval_int(&BigInt::from(x))
        );
        prop_assert_eq!(s_form.eval_at_l(&BigInt::from(x)), p.eval_int(&BigInt::from(x)));
    }

    #[test]
    fn division_inverts_multiplication(
        a in arb_poly(Basis::T),
        b in arb_poly(Basis::T),
    ) {
        prop_assume!(!b.is_zero());
        let product = a.mul(&b).unwrap();
        prop_assert_eq!(product.exact_div(&b).unwrap(), a);
    }

    #[test]
    fn ring_laws(
        a in arb_poly(Basis::T),
        b in arb_poly(Basis::T),
        c in arb_poly(Basis::T),
    ) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(&ab, &b.mul(&a).unwrap());
        prop_assert_eq!(
            ab.mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        let sum = b.add(&c).unwrap();
        prop_assert_eq!(
            a.mul(&sum).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn degree_of_product_adds(a in arb_poly(Basis::T), b in arb_poly(Basis::T)) {
        let product = a.mul(&b).unwrap();
        match (a.degree(), b.degree()) {
            (Some(da), Some(db)) => prop_assert_eq!(product.degree(), Some(da + db)),
            _ => prop_assert!(product.is_zero()),
        }
    }
}

/// Deterministic xorshift generator for structured random constructions.
struct Rng(u64);

impl Rng {
    fn next(&mut self, bound: usize) -> usize {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 % bound as u64) as usize
    }
}

/// Random valid construction with stage tuples of small entries; respects
/// capacity by checking slot usage before targeting.
fn random_construction(rng: &mut Rng, max_stages: usize) -> MelonicConstruction {
    let first: Vec<u32> = (0..1 + rng.next(3))
        .map(|_| 1 + rng.next(4) as u32)
        .collect();
    let mut stages = vec![Stage::new(&first, 0, 1)];
    for _ in 2..=max_stages {
        let parent = 1 + rng.next(stages.len());
        let plen = stages[parent - 1].banana.len();
        let slot = 1 + rng.next(plen);
        let cap = stages[parent - 1].banana[slot - 1] as usize;
        let used = stages
            .iter()
            .filter(|t| t.parent == parent && t.slot == slot)
            .count();
        if used >= cap {
            continue;
        }
        let banana: Vec<u32> = (0..1 + rng.next(3))
            .map(|_| 1 + rng.next(4) as u32)
            .collect();
        stages.push(Stage {
            banana,
            parent,
            slot,
        });
    }
    MelonicConstruction::new(stages)
}

#[test]
fn reduce_preserves_class_on_random_constructions() {
    let mut rng = Rng(0x2545F4914F6CDD1D);
    let engine = ClassEngine::new();
    let mut nontrivial = 0usize;
    for _ in 0..500 {
        let c = random_construction(&mut rng, 7);
        assert!(c.validate().is_valid());
        let reduced = c.reduce().unwrap();
        assert!(reduced.validate().reduced);
        assert_eq!(reduced.reduce().unwrap(), reduced, "idempotence");
        assert_eq!(
            engine.class_of(&c).unwrap(),
            engine.class_of(&reduced).unwrap(),
            "{c}"
        );
        if !c.validate().reduced {
            nontrivial += 1;
        }
    }
    assert!(
        nontrivial > 50,
        "want many genuinely non-reduced samples, got {nontrivial}"
    );
}

#[test]
fn matrix_tree_cross_check() {
    // exhaustive through 9 edges, then a deterministic sample through 12
    let mut checked = 0usize;
    melonic::construction::for_each_reduced(12, &mut |tree| {
        let edges = tree.edge_count();
        checked += 1;
        if edges > 9 && !checked.is_multiple_of(97) {
            return;
        }
        let g = tree.to_construction().realize_graph().unwrap();
        let psi = melonic::oracle::kirchhoff(&g).unwrap();
        assert_eq!(
            num_bigint::BigInt::from(psi.monomials.len()),
            melonic::oracle::matrix_tree_count(&g),
            "{:?}",
            g
        );
        assert_eq!(psi.degree(), g.loop_number());
    });
}

#[test]
fn random_constructions_realize_consistently() {
    let mut rng = Rng(0xD1B54A32D192ED03);
    for _ in 0..200 {
        let c = random_construction(&mut rng, 6);
        let g = c.realize_graph().unwrap();
        assert_eq!(g.edges.len(), c.edge_count());
        assert!(g.is_connected());
        assert!(g.edges.iter().all(|&(u, w)| u != w));
        // spanning-tree enumeration only at desk scale
        if g.edges.len() <= 12 {
            let psi = melonic::oracle::kirchhoff(&g).unwrap();
            assert_eq!(psi.degree(), g.loop_number());
        }
        // a class computed for it is monic of the right degree
        let u = class_of(&c).unwrap();
        assert!(u.invariants_hold());
    }
}
