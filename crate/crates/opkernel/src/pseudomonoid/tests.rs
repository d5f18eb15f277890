use super::*;
use crate::category::BackendKind;

fn qvect_samples(n: usize, dim_cap: usize, seed: u64) -> Vec<Obj> {
    let b = Backend::qvect();
    (0..n)
        .map(|i| b.free_atom((i + seed as usize) % dim_cap + 1, &format!("x{i}_")).unwrap())
        .collect()
}

fn random_seqs(backend: Backend, count: usize, bound: usize, cap: usize, seed: u64) -> Vec<SymmetricSequence> {
    (0..count as u64)
        .map(|i| SymmetricSequence::random(backend, bound, cap, seed * 97 + i).unwrap())
        .collect()
}

#[test]
fn tuple_enumeration_matches_independent_count() {
    for max_n in 1..=5usize {
        let tuples = enumerate_coherence_tuples(max_n);
        // Exactly-once check.
        let mut seen = tuples.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), tuples.len(), "no duplicates");

        // Independent enumeration by filtering full ranges.
        let mut count = 0usize;
        for n in 1..=max_n {
            for k in 0..=n {
                for l in 0..=n {
                    for r in 0..=n {
                        let window = r >= 1 && l + r <= n;
                        if !window {
                            continue;
                        }
                        if k <= l {
                            count += 1;
                        }
                        if k >= l && k <= l + r {
                            count += 1;
                        }
                        if k >= l + r {
                            count += 1;
                        }
                    }
                }
            }
            for l in 0..=n {
                for s in 0..=n {
                    for k in 0..=n {
                        for r in 0..=n {
                            let w1 = s >= 1 && l + s <= n;
                            let w2 = r >= 1 && k + r <= n;
                            if !(w1 && w2) {
                                continue;
                            }
                            if l + s <= k {
                                count += 1;
                            }
                            if l <= k && k + r <= l + s {
                                count += 1;
                            }
                        }
                    }
                }
            }
            count += (n + 1) * (n + 2) / 2;
        }
        assert_eq!(tuples.len(), count, "max_n = {max_n}");
    }
}

#[test]
fn monoidal_structures_satisfy_coherence() {
    for kind in [BackendKind::QVect, BackendKind::PSet, BackendKind::OpPSet] {
        let b = Backend::new(kind);
        let ps = MonoidalStructure::new(b);
        let samples: Vec<Obj> = match kind {
            BackendKind::QVect => qvect_samples(3, 3, 1),
            _ => (0..3)
                .map(|i| b.free_atom(i + 2, &format!("p{i}_")).unwrap())
                .collect(),
        };
        let report = check_coherence(&ps, &samples, 4).unwrap();
        assert!(
            report.all_passed(),
            "{kind:?}: {:?}",
            report.failing().take(3).collect::<Vec<_>>()
        );
    }
}

#[test]
fn monoidal_unit_insertion_is_the_unit_iso() {
    let b = Backend::qvect();
    let ps = MonoidalStructure::new(b);
    let x = b.free_atom(2, "x").unwrap();
    let iota = ps.iota(std::slice::from_ref(&x), 1).unwrap();
    assert_eq!(iota.src(), &x);
    assert_eq!(iota.dst(), &b.tensor(&[x.clone(), b.unit()]).unwrap());
    assert!(iota.is_invertible());

    // Left-iterated products make the inner collapse a permutation-free
    // relabelling of the same basis.
    let ys = qvect_samples(3, 3, 0);
    let alpha = ps.alpha(&ys, 0, 2).unwrap();
    assert!(alpha.matrix().unwrap().is_permutation_like());
}

#[test]
fn composition_structure_coherence_qvect() {
    let ps = CompositionStructure::new(Backend::qvect(), 3);
    let samples = random_seqs(Backend::qvect(), 3, 3, 2, 11);
    let report = check_coherence(&ps, &samples, 4).unwrap();
    assert!(
        report.all_passed(),
        "failures: {:?}",
        report
            .failing()
            .take(3)
            .map(|c| (&c.condition, &c.tuple, &c.scope))
            .collect::<Vec<_>>()
    );
}

#[test]
fn composition_structure_coherence_op_pset() {
    let ps = CompositionStructure::new(Backend::op_pset(), 3);
    let samples = random_seqs(Backend::op_pset(), 3, 3, 2, 13);
    let report = check_coherence(&ps, &samples, 4).unwrap();
    assert!(
        report.all_passed(),
        "failures: {:?}",
        report
            .failing()
            .take(3)
            .map(|c| (&c.condition, &c.tuple, &c.scope))
            .collect::<Vec<_>>()
    );
}

#[test]
fn mu_of_one_argument_is_the_identity_functor() {
    let ps = CompositionStructure::new(Backend::qvect(), 3);
    let f = SymmetricSequence::random(Backend::qvect(), 3, 2, 5).unwrap();
    let one = ps.mu(std::slice::from_ref(&f)).unwrap();
    assert!(one.is_same(&f));

    let b = Backend::qvect();
    let ms = MonoidalStructure::new(b);
    let x = b.free_atom(2, "x").unwrap();
    assert_eq!(ms.mu(std::slice::from_ref(&x)).unwrap(), x);
}

#[test]
fn corrupted_iota_fails_condition_three() {
    let ps = CompositionStructure::new(Backend::qvect(), 3);
    // Unit-valued constant sequences give equal-dimension summands at
    // three labels, so the swap has something to corrupt.
    let com = SymmetricSequence::constant(Backend::qvect(), &Backend::qvect().unit(), 3, "com")
        .unwrap();
    let samples = vec![com];
    let clean = check_coherence(&ps, &samples, 3).unwrap();
    assert!(clean.all_passed());

    let bad = ps.with_corrupted_iota();
    let report = check_coherence(&bad, &samples, 3).unwrap();
    assert!(!report.all_passed());
    let cond3_failures: Vec<_> = report
        .for_condition("3")
        .filter(|c| !c.ok)
        .collect();
    assert!(
        !cond3_failures.is_empty(),
        "the unit-unit family must name the corruption"
    );
    // Failing records carry serialized counterexamples.
    assert!(cond3_failures[0].counterexample.is_some());
}

#[test]
fn alpha_is_invertible_in_the_distributive_backend() {
    let ps = CompositionStructure::new(Backend::qvect(), 3);
    let samples = random_seqs(Backend::qvect(), 3, 3, 2, 23);
    let report = alpha_invertibility_report(&ps, &samples, 4).unwrap();
    assert!(report.all_passed());
}

#[test]
fn reports_are_deterministic() {
    let run = || {
        let ps = CompositionStructure::new(Backend::qvect(), 2);
        let samples = random_seqs(Backend::qvect(), 2, 2, 2, 31);
        let report = check_coherence(&ps, &samples, 3).unwrap();
        serde_json::to_string(&report.to_json()).unwrap()
    };
    assert_eq!(run(), run());
}
