mod support;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vinberg::diagram::{assemble_gram, parse_diagram, CoxeterDiagram};
use vinberg::exactlin::signature;
use vinberg::groundfield::{cyc2_integrality, cycle_generators, subfield_closure};

use support::{cycle_closure_agrees, random_diagram, simple_cycles};

fn diagram(seed: u64, nodes: usize, density: f64) -> CoxeterDiagram {
    random_diagram(&mut ChaCha8Rng::seed_from_u64(seed), nodes, density)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(seed in any::<u64>(), nodes in 1usize..=7, density in 0.0f64..1.0) {
        let d = diagram(seed, nodes, density);
        let text = d.to_text();
        let back = parse_diagram(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn relabeling_invariance(seed in any::<u64>(), nodes in 2usize..=6, density in 0.2f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, nodes, density);
        let mut perm: Vec<usize> = (0..nodes).collect();
        perm.shuffle(&mut rng);
        let r = d.relabeled(&perm);
        let (_, g) = assemble_gram(&d).unwrap();
        let (_, h) = assemble_gram(&r).unwrap();
        // h[perm[i]][perm[j]] = g[i][j]
        let mut inverse = vec![0; nodes];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        for i in 0..nodes {
            for j in 0..nodes {
                prop_assert_eq!(h.get(perm[i], perm[j]), g.get(i, j));
            }
        }
        prop_assert_eq!(signature(&g), signature(&h));
        let kg = subfield_closure(g.tower(), &cycle_generators(&g));
        let kh = subfield_closure(h.tower(), &cycle_generators(&h));
        prop_assert_eq!(kg.degree(), kh.degree());
        prop_assert!(kh.generators.iter().all(|x| kg.contains(x)));
        prop_assert_eq!(cyc2_integrality(&g, &kg).0, cyc2_integrality(&h, &kh).0);
        prop_assert_eq!(d.relabeled(&perm).relabeled(&inverse), d);
    }

    #[test]
    fn cycle_closure_matches_simple_cycles(seed in any::<u64>(), nodes in 1usize..=7, density in 0.2f64..1.0) {
        cycle_closure_agrees(&diagram(seed, nodes, density)).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn simple_cycle_counts() {
    // K4 has 7 simple cycles of length >= 3, K5 has 37
    let complete = |n: usize| {
        (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect::<Vec<Vec<usize>>>()
    };
    assert_eq!(simple_cycles(&complete(4)).len(), 7);
    assert_eq!(simple_cycles(&complete(5)).len(), 37);
    let path = vec![vec![1], vec![0, 2], vec![1]];
    assert!(simple_cycles(&path).is_empty());
}
