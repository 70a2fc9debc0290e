use std::collections::{BTreeMap, BTreeSet};

use arrange_core::baselines::{random_delta, random_sq};
use arrange_core::cover::{eligibility_sets, solve, Configuration, OptionTable};
use arrange_core::dataset::validate;
use arrange_core::merge::{can_merge, merge_all};
use arrange_core::metrics::{discipline_summary, quality_signals};
use arrange_core::model::sim;
use arrange_core::synth::{synth_dataset, SynthParams};
use arrange_core::{PartisanId, TOLERANCE};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SynthParams> {
    (1usize..4, 0usize..4, 4usize..40, 0usize..30, 0.0..0.3f64, 0.0..0.5f64, any::<u64>()).prop_map(
        |(n_blocs, extra, n_propositions, more, noise_rate, switch_rate, seed)| {
            let n_parties = n_blocs + extra;
            SynthParams {
                n_parties,
                n_blocs,
                n_propositions,
                n_partisans: n_parties + more,
                noise_rate,
                switch_rate,
                seed,
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pipeline_invariants(p in params()) {
        let ds = synth_dataset(&p).unwrap();
        prop_assert!(validate(&ds).is_valid());

        let pm = merge_all(&ds.voting_parties(), None);
        prop_assert_eq!(pm.len(), p.n_blocs);
        for a in &pm.parties {
            for b in &pm.parties {
                if a.id != b.id {
                    prop_assert!(!can_merge(a, b));
                }
            }
        }

        let table = OptionTable::build(&ds, &pm).unwrap();
        let sq = Configuration::status_quo(&ds).unwrap();
        let mut previous: Option<BTreeMap<String, BTreeSet<PartisanId>>> = None;
        for delta in [0.0, 0.1, 0.3, 0.6, 1.0] {
            let sets: BTreeMap<String, BTreeSet<PartisanId>> = eligibility_sets(&table, delta)
                .unwrap()
                .into_iter()
                .map(|s| (s.party, s.members))
                .collect();
            if let Some(prev) = &previous {
                for (party, members) in prev {
                    prop_assert!(members.is_subset(&sets[party]));
                }
            }
            previous = Some(sets);

            let sol = solve(&table, delta).unwrap();
            for e in &table.entries {
                let placed = &sol.config.placements[&e.partisan];
                prop_assert!(sol.pstar.contains(&placed.party));
                let a = ds.partisan(e.partisan).unwrap();
                let s = sim(&a.votes, &pm.get(&placed.party).unwrap().votes).unwrap();
                prop_assert!((placed.similarity.unwrap() - s).abs() < 1e-12);
                let own = e.options.iter().any(|o| o.own_party && o.target == placed.party);
                prop_assert!(own || s >= e.discipline - delta - TOLERANCE);
                // Max similarity among the selected parties the partisan may join.
                let best = e
                    .good(delta)
                    .filter(|o| sol.pstar.contains(&o.target))
                    .map(|o| o.similarity)
                    .fold(f64::MIN, f64::max);
                prop_assert!(s >= best - TOLERANCE);
            }
            if delta == 0.0 {
                let q = quality_signals(&sol.config, &sq).unwrap();
                prop_assert!(q.new.overall >= q.old.overall - TOLERANCE);
            }
            let rd = random_delta(&table, &sol.pstar, delta, p.seed).unwrap();
            prop_assert!(rd.placements.values().all(|pl| sol.pstar.contains(&pl.party)));
            prop_assert!(
                discipline_summary(&rd).unwrap().overall
                    <= discipline_summary(&sol.config).unwrap().overall + TOLERANCE
            );
        }

        let rs = random_sq(&ds, p.seed).unwrap();
        for a in &ds.partisans {
            let target = ds.party(rs.party_of(a.id).unwrap()).unwrap();
            prop_assert!(a.votes.is_subset_of(&target.votes));
        }
    }
}

#[test]
fn noiseless_status_quo_is_fully_disciplined() {
    let ds = synth_dataset(&SynthParams {
        n_parties: 8,
        n_blocs: 4,
        n_propositions: 50,
        n_partisans: 30,
        noise_rate: 0.0,
        switch_rate: 0.3,
        seed: 17,
    })
    .unwrap();
    let s = discipline_summary(&Configuration::status_quo(&ds).unwrap()).unwrap();
    assert_eq!((s.overall, s.mean_partisan, s.mean_party), (1.0, 1.0, 1.0));
}
