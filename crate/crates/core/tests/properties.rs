use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use padist::amice::{amice_of_dirac, convolve, pair};
use padist::groups::bch::BchSeries;
use padist::groups::{bch_with, group_law_check, GroupElement, LieElement};
use padist::hopf::{counit_check, phi_coordinates, StructureConstants, SymTruncation};
use padist::mahler::{evaluate, mahler_coefficients, FunctionTable, MahlerSeries};
use padist::poly::IntPoly;
use padist::{PadicMatrix, PadicScalar, PrimeContext};

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

fn poly() -> impl Strategy<Value = IntPoly> {
    proptest::collection::vec(-500i64..500, 1..8).prop_map(|c| IntPoly::from_i64(&c))
}

fn mahler(c: PrimeContext, f: &IntPoly) -> MahlerSeries {
    mahler_coefficients(&FunctionTable::from_poly(c, f, 16, 20).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mahler_is_linear(f in poly(), g in poly(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let c = ctx(p);
        let sum = mahler(c, &f.add(&g));
        prop_assert!(sum.eq_mod_precision(&mahler(c, &f).add(&mahler(c, &g)).unwrap()));
    }

    #[test]
    fn mahler_evaluates_off_the_table(f in poly(), x in -200i64..200) {
        let c = ctx(3);
        let got = evaluate(&mahler(c, &f), &PadicScalar::from_integer(c, x, 20)).unwrap();
        prop_assert!(got.eq_mod_precision(&PadicScalar::from_integer(c, f.eval_i64(x), 20)));
    }

    #[test]
    fn dirac_pairing_is_evaluation(f in poly(), a in -50i64..50, p in prop::sample::select(vec![3u64, 5, 7])) {
        let c = ctx(p);
        let got = pair(&amice_of_dirac(c, a, 16, 20), &mahler(c, &f)).unwrap();
        prop_assert!(got.eq_mod_precision(&PadicScalar::from_integer(c, f.eval_i64(a), 20)));
    }

    #[test]
    fn dirac_convolution_adds(a in -10_000i64..10_000, b in -10_000i64..10_000) {
        let c = ctx(5);
        let prod = convolve(&amice_of_dirac(c, a, 20, 15), &amice_of_dirac(c, b, 20, 15)).unwrap();
        prop_assert!(prod.eq_mod_precision(&amice_of_dirac(c, a + b, 20, 15)));
    }

    #[test]
    fn bch_of_commuting_diagonals_adds(a in -100i64..100, b in -100i64..100, e in -100i64..100, f in -100i64..100) {
        let c = ctx(3);
        let lie = |u: i64, v: i64| LieElement::new(PadicMatrix::from_integers(c, 2, &[3 * u, 0, 0, 3 * v], 16).unwrap()).unwrap();
        let series = BchSeries::new(6).unwrap();
        let z = bch_with(&series, &lie(a, b), &lie(e, f)).unwrap();
        prop_assert!(z.matrix().eq_mod_precision(lie(a, b).add(&lie(e, f)).unwrap().matrix()));
    }

    #[test]
    fn bch_discrepancy_never_below_degree_bound(entries in proptest::collection::vec(0i64..6561, 8)) {
        let c = ctx(3);
        let elem = |e: &[i64]| {
            let m: Vec<i64> = e.iter().enumerate().map(|(i, x)| 3 * x + i64::from(i == 0 || i == 3)).collect();
            GroupElement::new(PadicMatrix::from_integers(c, 2, &m, 12).unwrap()).unwrap()
        };
        let (x, y) = (elem(&entries[..4]), elem(&entries[4..]));
        let series = BchSeries::new(6).unwrap();
        // each extra degree contributes at least half a digit at p = 3
        prop_assert!(group_law_check(&series, &x, &y).unwrap() >= 3);
    }

    #[test]
    fn substitution_composes(coeffs in proptest::collection::vec(-20i64..20, 6)) {
        // f(x0, x1) = sum coeffs * monomial; substituting variables for themselves is the identity
        let monos = [[1u32, 0], [0, 1], [2, 0], [1, 1], [0, 2], [2, 1]];
        let mut f = SymTruncation::zero(2, 4);
        for (m, &k) in monos.iter().zip(&coeffs) {
            f = f.add(&SymTruncation::monomial(2, 4, m.to_vec(), BigRational::from_integer(BigInt::from(k))));
        }
        let vars = [SymTruncation::var(2, 4, 0), SymTruncation::var(2, 4, 1)];
        prop_assert_eq!(f.substitute(&vars).unwrap(), f.clone());
        // swapping twice is the identity
        let swapped = f.substitute(&[vars[1].clone(), vars[0].clone()]).unwrap();
        prop_assert_eq!(swapped.substitute(&[vars[1].clone(), vars[0].clone()]).unwrap(), f);
    }
}

#[test]
fn heisenberg_phi_has_unit_laws_at_every_degree() {
    for degree in 2..=6 {
        let phi = phi_coordinates(&StructureConstants::heisenberg(ctx(5)), degree).unwrap();
        assert!(counit_check(&phi));
    }
}
