//! Randomised invariants of the bound and divergence routines.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subfn_core::completions::{bounds, s_bounds, sam_bounds, sam_upper_iterative_trace, xos_bounds};
use subfn_core::divergence::{divergence_value, Norm};
use subfn_core::oracles::{random_instance, random_mask, random_member};
use subfn_core::{check_class, FunctionClass, IncompleteSetFunction, SetFunction};

const TOL: f64 = 1e-9;

fn tag() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["s", "sam", "xos", "ss", "ca"])
}

fn within(b: &subfn_core::Bounds, f: &SetFunction) -> Result<(), TestCaseError> {
    for s in f.ground().subsets() {
        let v = f.get(s);
        prop_assert!(b.lower.get(s) <= v + TOL, "lower {} > f {} at {s}", b.lower.get(s), v);
        prop_assert!(v <= b.upper.get(s) + TOL, "upper {} < f {} at {s}", b.upper.get(s), v);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounds_contain_the_hidden_function(tag in tag(), n in 2usize..=5, p in 0.0f64..0.6, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, class) = random_instance(tag, n, p, &mut rng).unwrap();
        prop_assert!(check_class(g.underlying(), &class));
        let b = bounds(&g, &class).unwrap();
        within(&b, g.underlying())?;
        for &s in g.mask().members() {
            prop_assert_eq!(b.lower.get(s), g.value(s).unwrap());
            prop_assert_eq!(b.upper.get(s), g.value(s).unwrap());
        }
    }

    #[test]
    fn smaller_classes_give_narrower_bounds(n in 2usize..=5, p in 0.0f64..0.6, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, _) = random_member("xos", n, &mut rng).unwrap();
        let g = IncompleteSetFunction::new(f.clone(), random_mask(f.ground(), p, &mut rng)).unwrap();
        let (s, sam, xos) = (s_bounds(&g).unwrap(), sam_bounds(&g).unwrap(), xos_bounds(&g).unwrap());
        for t in f.ground().subsets() {
            prop_assert!(s.lower.get(t) <= sam.lower.get(t) + TOL);
            prop_assert!(sam.lower.get(t) <= xos.lower.get(t) + TOL);
            prop_assert!(xos.upper.get(t) <= sam.upper.get(t) + TOL);
            prop_assert!(sam.upper.get(t) <= s.upper.get(t) + TOL);
        }
    }

    #[test]
    fn revealing_more_never_widens(tag in tag(), n in 2usize..=5, p in 0.0f64..0.5, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, class) = random_instance(tag, n, p, &mut rng).unwrap();
        let extra = random_mask(g.ground(), 0.3, &mut rng);
        let h = g.reveal(extra.members().iter().copied());
        let (bg, bh) = (bounds(&g, &class).unwrap(), bounds(&h, &class).unwrap());
        for s in g.ground().subsets() {
            prop_assert!(bg.lower.get(s) <= bh.lower.get(s) + TOL);
            prop_assert!(bh.upper.get(s) <= bg.upper.get(s) + TOL);
        }
        for norm in [Norm::L1, Norm::L2, Norm::Linf] {
            let (dg, dh) = (divergence_value(&g, &class, norm).unwrap(), divergence_value(&h, &class, norm).unwrap());
            prop_assert!(dh <= dg + TOL * dg.max(1.0), "{norm:?}: {dh} > {dg}");
        }
    }

    #[test]
    fn iterative_sam_upper_is_sound_and_decreasing(n in 2usize..=5, p in 0.0f64..0.6, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, class) = random_instance("sam", n, p, &mut rng).unwrap();
        let tight = bounds(&g, &class).unwrap();
        let trace = sam_upper_iterative_trace(&g, 20, 0.0);
        for pair in trace.windows(2) {
            for s in g.ground().subsets() {
                prop_assert!(pair[1].get(s) <= pair[0].get(s) + TOL);
            }
        }
        let last = trace.last().unwrap();
        for s in g.ground().subsets() {
            prop_assert!(last.get(s) >= tight.upper.get(s) - TOL);
        }
    }

    #[test]
    fn json_round_trip(tag in tag(), n in 2usize..=5, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, class) = random_member(tag, n, &mut rng).unwrap();
        let back: SetFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(&back, &f);
        let c: FunctionClass = serde_json::from_str(&serde_json::to_string(&class).unwrap()).unwrap();
        prop_assert_eq!(c, class);
    }
}
