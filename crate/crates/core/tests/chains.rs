//! Monte-Carlo checks of the pruning chain and the Λ-coalescent chain,
//! separately and against each other.

use std::f64::consts::PI;

use coalforge_core::harness::rng::{stream, try_replicates};
use coalforge_core::harness::stats::{chi_square, chi_square_homogeneity, with_retries};
use coalforge_core::lambdasim::{self, run_lambda_chain, LambdaChain, RateTable};
use coalforge_core::prunesim::{self, first_merger_snapshot, run_chain, ChainOptions};
use coalforge_core::specfun::LambdaMeasure;
use coalforge_core::treecore::{enumerate_all, TreeCode};

const REPS: u64 = 100_000;

fn timed() -> ChainOptions {
    ChainOptions {
        timed: true,
        record_trees: false,
    }
}

#[test]
fn two_leaf_waiting_time_has_mean_two_over_pi() {
    let t = try_replicates(11, REPS, |_, rng| run_chain(2, rng, timed()).map(|l| l.events[0].time)).unwrap();
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    assert!((mean / (2.0 / PI) - 1.0).abs() < 0.02, "mean {mean}");
    let table = RateTable::build(LambdaMeasure::PRUNING, 2).unwrap();
    let t = try_replicates(12, REPS, |_, rng| run_lambda_chain(2, &table, rng, true).map(|l| l.events[0].time)).unwrap();
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    assert!((mean / (2.0 / PI) - 1.0).abs() < 0.02, "mean {mean}");
}

#[test]
fn three_leaves_merge_all_at_once_half_the_time() {
    let logs = try_replicates(13, REPS, |_, rng| run_chain(3, rng, ChainOptions::default())).unwrap();
    let single = logs.iter().filter(|l| l.collision_count() == 1).count() as f64 / REPS as f64;
    assert!((single - 0.5).abs() < 0.01, "{single}");
    assert!(logs.iter().all(|l| matches!(l.collision_count(), 1 | 2)));
    let table = RateTable::build(LambdaMeasure::PRUNING, 3).unwrap();
    let firsts = try_replicates(14, REPS, |_, rng| lambdasim::first_two_mergers(3, &table, rng)).unwrap();
    let triple = firsts.iter().filter(|x| x.0 == 3).count() as f64 / REPS as f64;
    assert!((triple - 0.5).abs() < 0.01, "{triple}");
}

#[test]
fn first_merger_size_follows_rates_at_n10() {
    let table = RateTable::build(LambdaMeasure::PRUNING, 10).unwrap();
    let probs: Vec<f64> = (0..=10).map(|k| if k < 2 { 0.0 } else { table.merger_probability(10, k) }).collect();
    let r = with_retries(15, |seed| {
        let firsts = try_replicates(seed, REPS, |_, rng| prunesim::first_two_mergers(10, rng)).unwrap();
        let mut counts = vec![0u64; 11];
        for (a, _) in firsts {
            counts[a as usize] += 1;
        }
        chi_square(&counts, &probs)
    })
    .unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn post_merger_tree_is_uniform_at_n3() {
    let index: std::collections::HashMap<TreeCode, usize> =
        enumerate_all(2).unwrap().iter().enumerate().map(|(i, t)| (TreeCode::encode(t), i)).collect();
    let r = with_retries(16, |seed| {
        let snaps = try_replicates(seed, REPS, |_, rng| first_merger_snapshot(3, rng)).unwrap();
        let mut counts = vec![0u64; 2];
        for s in snaps.iter().filter(|s| s.merged == 2) {
            counts[index[&TreeCode::encode(&s.tree)]] += 1;
        }
        chi_square(&counts, &[0.5, 0.5])
    })
    .unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn collision_counts_agree_between_constructions_at_n10() {
    let table = RateTable::build(LambdaMeasure::PRUNING, 10).unwrap();
    let r = with_retries(17, |seed| {
        let a = try_replicates(seed, REPS, |_, rng| run_chain(10, rng, ChainOptions::default())).unwrap();
        let b = try_replicates(seed ^ 1, REPS, |_, rng| run_lambda_chain(10, &table, rng, false)).unwrap();
        let (mut ca, mut cb) = (vec![0u64; 10], vec![0u64; 10]);
        for l in &a {
            ca[l.collision_count()] += 1;
        }
        for l in &b {
            cb[l.collision_count()] += 1;
        }
        chi_square_homogeneity(&ca, &cb)
    })
    .unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn joint_first_two_mergers_agree_at_n5() {
    let table = RateTable::build(LambdaMeasure::PRUNING, 5).unwrap();
    let cell = |(a, b): (u32, u32)| (a * 6 + b) as usize;
    let r = with_retries(18, |seed| {
        let a = try_replicates(seed, REPS, |_, rng| prunesim::first_two_mergers(5, rng)).unwrap();
        let b = try_replicates(seed ^ 1, REPS, |_, rng| lambdasim::first_two_mergers(5, &table, rng)).unwrap();
        let (mut ca, mut cb) = (vec![0u64; 36], vec![0u64; 36]);
        for x in a {
            ca[cell(x)] += 1;
        }
        for x in b {
            cb[cell(x)] += 1;
        }
        chi_square_homogeneity(&ca, &cb)
    })
    .unwrap();
    assert!(r.pass, "{r:?}");
}

/// Given the merger size, every subset of the current blocks is equally
/// likely to merge.
#[test]
fn lambda_chain_picks_uniform_subsets() {
    let table = RateTable::build(LambdaMeasure::PRUNING, 5).unwrap();
    for k in [2usize, 3] {
        let r = with_retries(19 + k as u64, |seed| {
            let subsets = try_replicates(seed, REPS, |_, rng| {
                let mut chain = LambdaChain::new(5, &table, false)?;
                let step = chain.step(rng).expect("five blocks");
                Ok::<_, coalforge_core::Error>(
                    (step.parts.len() == k)
                        .then(|| step.parts.iter().map(|b| 1u32 << (b.min_label() - 1)).sum::<u32>()),
                )
            })
            .unwrap();
            let mut counts = vec![0u64; 32];
            for m in subsets.into_iter().flatten() {
                counts[m as usize] += 1;
            }
            let expected: Vec<f64> = (0..32u32).map(|m| (m.count_ones() as usize == k) as u8 as f64).collect();
            chi_square(&counts, &expected)
        })
        .unwrap();
        assert!(r.pass, "k={k}: {r:?}");
    }
}

#[test]
fn kingman_and_uniform_tables() {
    let k = RateTable::build(LambdaMeasure::Kingman, 50).unwrap();
    let mut rng = stream(20, 0);
    let log = run_lambda_chain(50, &k, &mut rng, true).unwrap();
    assert_eq!(log.collision_count(), 49);
    assert!(log.merger_sizes().iter().all(|&m| m == 2));
    let u = RateTable::build(LambdaMeasure::Uniform, 30).unwrap();
    for b in 2..=30u32 {
        // Bolthausen–Sznitman: λ_b = b − 1
        assert!((u.total(b) - (b - 1) as f64).abs() < 1e-9, "b={b}");
    }
    let g = RateTable::build(LambdaMeasure::beta(0.8, 1.2).unwrap(), 20).unwrap();
    let log = run_lambda_chain(20, &g, &mut rng, true).unwrap();
    log.validate().unwrap();
}
