use proptest::prelude::*;

use fibbraid::braidrep::{artin_check, generator};
use fibbraid::fusion::{count_paths, decode, encode, Label, QubitWord};
use fibbraid::gatesynth::{evaluate, leakage, BraidWord, Factor};
use fibbraid::{CMatrix32, CMatrix64};

fn word_strategy(strands: usize, gens: Vec<usize>) -> impl Strategy<Value = BraidWord> {
    prop::collection::vec((prop::sample::select(gens), 1i32..=5, any::<bool>()), 0..10).prop_map(move |fs| {
        let factors = fs.into_iter().map(|(g, e, neg)| Factor { generator: g, exponent: if neg { -e } else { e } }).collect();
        BraidWord::new(strands, factors).expect("valid factors")
    })
}

proptest! {
    #[test]
    fn words_are_unitary_and_invertible(w in word_strategy(6, vec![1, 2, 3, 4, 5])) {
        let m: CMatrix64 = evaluate(&w, Label::I).unwrap();
        prop_assert!(m.unitarity_defect() < 1e-12);
        let back: CMatrix64 = evaluate(&w.concat(&w.inverse()), Label::I).unwrap();
        prop_assert!(back.max_abs_diff(&CMatrix64::identity(5)) < 1e-12);
    }

    #[test]
    fn single_qubit_generators_never_leak(w in word_strategy(6, vec![1, 2, 4, 5])) {
        prop_assert!(leakage(&w, 2).unwrap() <= 1e-12);
    }

    #[test]
    fn word_syntax_round_trips(w in word_strategy(8, vec![1, 2, 3, 4, 5, 6, 7])) {
        let again = BraidWord::parse(&w.to_string(), 8).unwrap();
        let a: CMatrix64 = evaluate(&w, Label::I).unwrap();
        let b: CMatrix64 = evaluate(&again, Label::I).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn register_encoding_round_trips(bits in prop::collection::vec(any::<bool>(), 1..6)) {
        let path = encode(&bits);
        prop_assert_eq!(decode(&path, bits.len()).unwrap(), QubitWord::Bits(bits));
    }
}

#[test]
fn path_counts_follow_the_fibonacci_recursion() {
    for n in 3..40 {
        let i = count_paths(n, Label::I).unwrap();
        let e = count_paths(n, Label::Eps).unwrap();
        assert_eq!(i, count_paths(n - 1, Label::Eps).unwrap());
        assert_eq!(e, count_paths(n - 1, Label::I).unwrap() + count_paths(n - 1, Label::Eps).unwrap());
    }
}

#[test]
fn single_precision_matches_double() {
    for (n, charge) in [(4, Label::I), (6, Label::I), (7, Label::Eps)] {
        for i in 1..n {
            let a: CMatrix32 = generator::<f32>(n, i, charge).unwrap().matrix;
            let b: CMatrix64 = generator::<f64>(n, i, charge).unwrap().matrix;
            let up = CMatrix64::from_fn(a.rows(), a.cols(), |r, c| {
                let z = a[(r, c)];
                num_complex::Complex64::new(f64::from(z.re), f64::from(z.im))
            });
            assert!(up.max_abs_diff(&b) < 1e-6, "n={n} i={i}");
        }
        assert!(artin_check::<f32>(n, charge).unwrap().max_violation < 1e-5);
    }
    let w = BraidWord::parse("B1 B2 B1", 4).unwrap();
    let m: CMatrix32 = evaluate(&w, Label::I).unwrap();
    assert!(m.unitarity_defect() < 1e-5);
}
