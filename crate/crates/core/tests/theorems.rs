mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use typmod::evidence::evidence_all;
use typmod::kernel::{check_stability, typical_kernel, Stability};
use typmod::session::{answer_oblivious, Mode, SessionState};
use typmod::typicality::most_typical_model;
use typmod::{CnfSystem, Lit, PropFormula, Var};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn typical_models_dominate(seed in any::<u64>()) {
        prop_assert_eq!(check_domination(&random_satisfiable(&mut rng(seed), 9)), Ok(()));
    }

    #[test]
    fn kernel_is_consistent_and_in_every_typical_model(seed in any::<u64>()) {
        let s = random_satisfiable(&mut rng(seed), 10);
        prop_assert_eq!(check_kernel(&s), Ok(()));
        for v in &typical_kernel(&s).unwrap().verdicts {
            prop_assert!(v.n2 <= v.n1);
        }
    }

    #[test]
    fn kernel_atoms_survive_unrelated_additions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_satisfiable(&mut r, 9);
        let phi = random_side_formula(&mut r, &s);
        let applied = check_stability_case(&s, &phi);
        prop_assume!(applied != Ok(false));
        prop_assert_eq!(applied, Ok(true));
        let extended = typmod::formula::attach_formula(&s, &phi);
        let ms = models(&extended);
        let after = kernel(&extended, &ms);
        for e in &check_stability(&s, &phi).unwrap().entries {
            let mentioned = phi.vars().contains(&e.atom.var());
            prop_assert_eq!(e.status == Stability::GuaranteedStable, !mentioned);
            if e.status == Stability::Lost {
                prop_assert!(!after.contains(&e.atom));
            } else {
                let (n1, n2) = neighbour_counts(&extended, &ms, e.atom);
                prop_assert_eq!(n1, n2);
            }
        }
    }

    #[test]
    fn nonoblivious_sessions_stay_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_satisfiable(&mut r, 8);
        let vars: Vec<Var> = s.vars().collect();
        let mut state = SessionState::new(s.clone(), Mode::Nonoblivious).unwrap();
        for _ in 0..r.gen_range(1..6) {
            let q = random_formula(&mut r, &vars);
            state.ask(q).unwrap();
        }
        prop_assert!(typmod::counter::is_satisfiable(state.current()));
        prop_assert!(state.check());
    }

    #[test]
    fn certain_queries_agree_across_modes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_satisfiable(&mut r, 8);
        let vars: Vec<Var> = s.vars().collect();
        let queries: Vec<PropFormula> = (0..5).map(|_| random_formula(&mut r, &vars)).collect();
        let oblivious = answer_oblivious(&s, &queries).unwrap();
        let mut state = SessionState::new(s.clone(), Mode::Nonoblivious).unwrap();
        for (q, ob) in queries.iter().zip(&oblivious.beliefs) {
            let nb = state.ask(q.clone()).unwrap();
            let certain = ob.evidence == frac(0, 1) || ob.evidence == frac(1, 1);
            if certain {
                prop_assert_eq!(nb.verdict, ob.verdict);
            }
        }
    }

    #[test]
    fn kernel_queries_are_safe_in_any_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_satisfiable(&mut r, 10);
        let mut atoms: Vec<Lit> = typical_kernel(&s).unwrap().atoms();
        atoms.shuffle(&mut r);
        let queries: Vec<PropFormula> = atoms.iter().map(|&a| PropFormula::atom(a.var())).collect();
        prop_assert!(answer_oblivious(&s, &queries).unwrap().jointly_consistent);
    }

    #[test]
    fn atomic_queries_are_safe_with_a_most_typical_model(seed in any::<u64>()) {
        let s = random_satisfiable(&mut rng(seed), 10);
        let table = evidence_all(&s).unwrap();
        let queries: Vec<PropFormula> = s.vars().map(PropFormula::atom).collect();
        let answers = answer_oblivious(&s, &queries).unwrap();
        if most_typical_model(&s, &table).is_some() {
            prop_assert!(answers.jointly_consistent);
        } else {
            prop_assert!(!answers.jointly_consistent);
        }
    }
}

#[test]
fn order_changes_beliefs_but_not_consistency() {
    let mut s = CnfSystem::with_names(["a", "b", "c"]);
    for c in [&[1i64, 2][..], &[2, 3], &[3, 1], &[-1, -2, -3]] {
        s.add_clause(typmod::Clause::from_dimacs(c).unwrap());
    }
    for order in [[0, 1, 2], [2, 1, 0], [1, 2, 0]] {
        let mut state = SessionState::new(s.clone(), Mode::Nonoblivious).unwrap();
        for i in order {
            state.ask(PropFormula::atom(Var::from_offset(i))).unwrap();
        }
        assert!(state.check());
    }
}

