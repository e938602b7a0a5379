mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use typmod::evidence::{conjunction_bounds, evidence_all, evidence_of, evidence_of_conjunction};
use typmod::{parse_formula, Lit, Var};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn exact_routines_match_enumeration(seed in any::<u64>(), n in 1usize..=10) {
        let s = random_system(&mut rng(seed), n);
        prop_assert_eq!(oracle_check(&s), Ok(()));
    }

    #[test]
    fn conjunctions_and_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_satisfiable(&mut r, 10);
        let n = s.num_vars();
        let ms = models(&s);
        let table = evidence_all(&s).unwrap();
        let k = r.gen_range(1..=n);
        let lits: Vec<Lit> = (0..k).map(|i| {
            let v = Var::from_offset(i);
            if r.gen_bool(0.5) { v.pos() } else { v.neg() }
        }).collect();
        let exact = evidence_of_conjunction(&s, &lits).unwrap();
        prop_assert_eq!(&exact, &evidence(&ms, &lits));
        let b = conjunction_bounds(&table, &lits, n, &table.total_models);
        prop_assert!(b.contains(&exact), "{:?} outside [{}, {}]", exact, b.lower, b.upper);
    }

    #[test]
    fn formula_evidence_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_satisfiable(&mut r, 8);
        let n = s.num_vars() as i64;
        let mut atom = || format!("{}v{}", if r.gen_bool(0.5) { "!" } else { "" }, r.gen_range(1..=n));
        let text = format!("({} | {}) -> ({} & {})", atom(), atom(), atom(), atom());
        let f = parse_formula(&text, &s).unwrap();
        let ms = models(&s);
        let hit = ms.iter().filter(|&&m| f.eval(&to_model(s.num_vars(), m))).count();
        prop_assert_eq!(evidence_of(&s, &f).unwrap(), frac(hit, ms.len()));
    }
}

#[test]
fn empty_system_is_uniform() {
    let s = typmod::CnfSystem::new(4);
    assert_eq!(oracle_check(&s), Ok(()));
    assert_eq!(models(&s).len(), 16);
}

#[test]
fn twelve_variables() {
    let mut r = rng(12);
    for _ in 0..5 {
        assert_eq!(oracle_check(&random_system(&mut r, 12)), Ok(()));
    }
}
