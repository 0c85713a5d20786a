use num_rational::BigRational;
use proptest::prelude::*;
use qhexa_core::conformal::{spin_square, spin_vector_from_generators};
use qhexa_core::ncalg::{Atom, Basis, GaussRational, NCPoly, RewriteSystem, Word};
use qhexa_core::tables;

fn rw(basis: Basis) -> std::sync::Arc<RewriteSystem> {
    tables::system(basis).expect("table loads")
}

fn poly(basis: Basis, max_terms: usize, max_len: usize) -> impl Strategy<Value = NCPoly> {
    let atoms = Atom::all(basis);
    let n = atoms.len();
    prop::collection::vec(
        (-3i64..=3, 1i64..=3, -2i64..=2, 0u32..=1, prop::collection::vec(0..n, 0..=max_len)),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        let mut p = NCPoly::zero();
        for (re, den, im, h, idx) in terms {
            let word: Vec<Atom> = idx.iter().map(|&i| atoms[i]).collect();
            let c = GaussRational::new(BigRational::new(re.into(), den.into()), BigRational::from_integer(im.into()));
            p.add_term(Word::from_atoms(&word), h, c);
        }
        p
    })
}

fn basis() -> impl Strategy<Value = Basis> {
    prop_oneof![Just(Basis::A), Just(Basis::B)]
}

fn with_basis(max_terms: usize, max_len: usize) -> impl Strategy<Value = (Basis, NCPoly, NCPoly, NCPoly)> {
    basis().prop_flat_map(move |b| {
        (
            Just(b),
            poly(b, max_terms, max_len),
            poly(b, max_terms, max_len),
            poly(b, max_terms, max_len),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normal_form_is_idempotent((b, p, _, _) in with_basis(4, 3)) {
        let r = rw(b);
        let n = r.normalize(&p).unwrap();
        prop_assert_eq!(r.normalize(&n).unwrap(), n);
    }

    #[test]
    fn bracket_is_bilinear_and_antisymmetric((b, p, q, s) in with_basis(3, 2)) {
        let r = rw(b);
        let lhs = r.commutator(&(&p + &q), &s).unwrap();
        let rhs = &r.commutator(&p, &s).unwrap() + &r.commutator(&q, &s).unwrap();
        prop_assert_eq!(lhs, rhs);
        let ps = r.commutator(&p, &s).unwrap();
        let sp = r.commutator(&s, &p).unwrap();
        prop_assert!((&ps + &sp).is_zero());
    }

    #[test]
    fn product_is_associative((b, p, q, s) in with_basis(2, 2)) {
        let r = rw(b);
        let left = r.product(&r.product(&p, &q).unwrap(), &s).unwrap();
        let right = r.product(&p, &r.product(&q, &s).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn leibniz_rule((b, p, q, s) in with_basis(2, 2)) {
        let r = rw(b);
        let lhs = r.commutator(&p, &r.product(&q, &s).unwrap()).unwrap();
        let rhs = &r.product(&r.commutator(&p, &q).unwrap(), &s).unwrap()
            + &r.product(&q, &r.commutator(&p, &s).unwrap()).unwrap();
        prop_assert_eq!(lhs, r.normalize(&rhs).unwrap());
    }

    #[test]
    fn symmetrized_product_defect_is_order_hbar_squared((b, p, q, s) in with_basis(2, 2)) {
        // (a.b).c − a.(b.c) = ¼[b,[a,c]] = −¼ℏ²(b,(a,c))
        let r = rw(b);
        let left = r.sym_product(&r.sym_product(&p, &q).unwrap(), &s).unwrap();
        let right = r.sym_product(&p, &r.sym_product(&q, &s).unwrap()).unwrap();
        let inner = r.commutator(&q, &r.commutator(&p, &s).unwrap()).unwrap();
        let mut expect = NCPoly::zero();
        expect.add_scaled(&inner, &GaussRational::ratio(-1, 4), 2);
        prop_assert_eq!(&left - &right, r.normalize(&expect).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_identity((b, p, q, s) in with_basis(3, 1)) {
        let r = rw(b);
        let c = |x: &NCPoly, y: &NCPoly| r.commutator(x, y).unwrap();
        let total = &(&c(&c(&p, &q), &s) + &c(&c(&q, &s), &p)) + &c(&c(&s, &p), &q);
        prop_assert!(total.is_zero(), "{:?}", total);
    }
}

#[test]
fn flipping_the_epsilon_convention_negates_the_spin_vector() {
    let a = rw(Basis::A);
    let plus = spin_vector_from_generators(&a, 1).unwrap();
    let minus = spin_vector_from_generators(&a, -1).unwrap();
    for mu in 0..4 {
        assert!((&plus[mu] + &minus[mu]).is_zero(), "S_{mu}");
    }
    assert_eq!(spin_square(&a, &plus).unwrap(), spin_square(&a, &minus).unwrap());
}

#[test]
fn canonical_bracket_of_momentum_and_position() {
    let b = rw(Basis::B);
    for mu in 0..4u8 {
        for nu in 0..4u8 {
            let c = b.commutator(&NCPoly::atom(Atom::P(mu)), &NCPoly::atom(Atom::X(nu))).unwrap();
            let expect = if mu == nu { NCPoly::int(if mu == 0 { -1 } else { 1 }) } else { NCPoly::zero() };
            assert_eq!(c, expect, "(P_{mu},X_{nu})");
        }
    }
}
