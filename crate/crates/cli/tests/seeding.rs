use dulab_core::{derive_seed, LabRng};

#[test]
fn adjacent_children_never_collide() {
    let mut rng = LabRng::seed_from_u64(0x5eed);
    for _ in 0..1_000_000 {
        let m = rng.next_u64();
        assert_ne!(derive_seed(m, 0), derive_seed(m, 1), "master {m:#x}");
    }
}

#[test]
fn changing_the_master_changes_every_child() {
    let mut rng = LabRng::seed_from_u64(0xa5a5);
    for _ in 0..10_000 {
        let m = rng.next_u64();
        let other = m ^ (1 << rng.below(64));
        for i in 0..8 {
            assert_ne!(derive_seed(m, i), derive_seed(other, i));
        }
    }
}

#[test]
fn one_bit_of_master_flips_about_half_the_output() {
    let mut rng = LabRng::seed_from_u64(17);
    let mut flipped = 0u64;
    let trials = 10_000u64;
    for _ in 0..trials {
        let m = rng.next_u64();
        let other = m ^ (1 << rng.below(64));
        flipped += (derive_seed(m, 3) ^ derive_seed(other, 3)).count_ones() as u64;
    }
    let mean = flipped as f64 / trials as f64;
    assert!((mean - 32.0).abs() < 0.5, "{mean}");
}

#[test]
fn children_are_distinct_within_a_run() {
    let mut seen: Vec<u64> = (0..100_000).map(|i| derive_seed(42, i)).collect();
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen.len(), 100_000);
}
