mod common;

use std::collections::HashSet;

use ccs_ura::analysis::{expected_erroneous_paths, Variant};
use ccs_ura::tree_code::{tree_decode, FragmentLists, Message, ParityProfile, TreeCodebook, DEFAULT_PATH_CAP};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn genie_lists(encoded: &[Vec<u64>], sections: usize, rng: &mut ChaCha8Rng) -> FragmentLists {
    let mut lists = FragmentLists::from_encoded(encoded, sections);
    for list in lists.0.iter_mut() {
        list.shuffle(rng);
    }
    lists
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn genie_decoding_accounts_for_every_root(seed in any::<u64>(), users in 1usize..12, parity in 1usize..6) {
        let profile = ParityProfile::new(vec![6, 6, 6, 6], vec![0, parity, parity, 6]).unwrap();
        let codebook = TreeCodebook::new(profile.clone(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let sent: Vec<Message> = (0..users).map(|_| Message::random(&profile, &mut rng)).collect();
        let encoded: Vec<Vec<u64>> = sent.iter().map(|m| codebook.encode(m).unwrap()).collect();
        let lists = genie_lists(&encoded, 4, &mut rng);
        let out = tree_decode(&codebook, &lists, DEFAULT_PATH_CAP).unwrap();

        let sent_set: HashSet<&Message> = sent.iter().collect();
        prop_assert!(out.messages.iter().all(|m| sent_set.contains(m)));
        prop_assert_eq!(out.roots, users);
        // duplicate roots decode to one message, so successes can fall short of roots - failures
        prop_assert!(out.messages.len() + out.failures <= users);
        let distinct: HashSet<&Message> = out.messages.iter().collect();
        prop_assert_eq!(distinct.len(), out.messages.len());
    }

    #[test]
    fn distinct_messages_decode_or_fail_exactly_once(seed in any::<u64>(), users in 1usize..12) {
        let profile = ParityProfile::new(vec![6, 6, 6, 6], vec![0, 3, 4, 6]).unwrap();
        let codebook = TreeCodebook::new(profile.clone(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17));
        let sent = common::distinct_messages(&profile, users, &mut rng);
        let encoded: Vec<Vec<u64>> = sent.iter().map(|m| codebook.encode(m).unwrap()).collect();
        let lists = genie_lists(&encoded, 4, &mut rng);
        let out = tree_decode(&codebook, &lists, DEFAULT_PATH_CAP).unwrap();
        prop_assert_eq!(out.messages.len() + out.failures, users);
    }
}

#[test]
fn single_user_always_decodes() {
    let profile = ParityProfile::new(vec![5, 5, 5], vec![0, 1, 1]).unwrap();
    for seed in 0..50 {
        let codebook = TreeCodebook::new(profile.clone(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Message::random(&profile, &mut rng);
        let lists = FragmentLists::from_encoded(&[codebook.encode(&m).unwrap()], 3);
        let out = tree_decode(&codebook, &lists, DEFAULT_PATH_CAP).unwrap();
        assert_eq!(out.messages, vec![m]);
    }
}

#[test]
fn mean_erroneous_paths_track_the_recursion() {
    let profile = ParityProfile::new(vec![8, 8, 8, 8], vec![0, 2, 3, 4]).unwrap();
    let users = 6;
    let trials = 3000;
    let mut sums = [0.0; 4];
    let mut squares = [0.0; 4];
    for t in 0..trials {
        let codebook = TreeCodebook::new(profile.clone(), 1000 + t);
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let sent = common::distinct_messages(&profile, users, &mut rng);
        let encoded: Vec<Vec<u64>> = sent.iter().map(|m| codebook.encode(m).unwrap()).collect();
        for (s, &c) in common::erroneous_paths_from_first_root(&codebook, &encoded).iter().enumerate() {
            sums[s] += c as f64;
            squares[s] += (c * c) as f64;
        }
    }
    let n = trials as f64;
    for slot in 1..4 {
        let mean = sums[slot] / n;
        let se = ((squares[slot] / n - mean * mean) / (n - 1.0)).sqrt();
        let expected = expected_erroneous_paths(users, &profile, slot, Variant::Full);
        assert!((mean - expected).abs() <= 4.0 * se, "slot {slot}: {mean} vs {expected} (se {se})");
    }
}
