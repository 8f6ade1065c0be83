use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kickgate::budget::{gate_emission_infidelity, spontaneous_emission_error};
use kickgate::ga::{crossover, mutate, Chromosome, GridSpec, WindowLayout};
use kickgate::oracle::compose_kicks;
use kickgate::pipeline::{parse_config, PipelineConfig};
use kickgate::{closure_residual, phase_factor, KickSequence, SpinBranch};

fn phases(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..4.0 * PI, 1..=max_len)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn translation_invariance(x in phases(12), shift in -10.0..10.0f64) {
        let a = KickSequence::new(x.iter().map(|v| v + 20.0).collect()).unwrap();
        let b = KickSequence::new(x.iter().map(|v| v + 20.0 + shift).collect()).unwrap();
        prop_assert!(rel_close(closure_residual(&a).epsilon_dimless, closure_residual(&b).epsilon_dimless, 1e-9));
        prop_assert!(rel_close(phase_factor(&a), phase_factor(&b), 1e-9));
    }

    #[test]
    fn order_of_listing_is_irrelevant(x in phases(12)) {
        let mut sorted = x.clone();
        sorted.sort_by(f64::total_cmp);
        let mut reversed = sorted.clone();
        reversed.reverse();
        let a = KickSequence::canonical(&reversed).unwrap();
        let b = KickSequence::canonical(&sorted).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn time_reversal_keeps_error_and_phase(x in phases(12)) {
        let fwd = KickSequence::canonical(&x).unwrap();
        let mirrored: Vec<f64> = x.iter().map(|v| -v).collect();
        let rev = KickSequence::canonical(&mirrored).unwrap();
        prop_assert!(rel_close(closure_residual(&fwd).epsilon_dimless, closure_residual(&rev).epsilon_dimless, 1e-9));
        prop_assert!(rel_close(phase_factor(&fwd), phase_factor(&rev), 1e-9));
    }

    #[test]
    fn batching_scales_error_and_phase(x in phases(8), m in 1usize..5) {
        let base = KickSequence::canonical(&x).unwrap();
        let b = base.batched(m);
        let m2 = (m * m) as f64;
        prop_assert!(rel_close(closure_residual(&b).epsilon_dimless, m2 * closure_residual(&base).epsilon_dimless, 1e-9));
        prop_assert!(rel_close(phase_factor(&b), m2 * phase_factor(&base), 1e-9));
    }

    #[test]
    fn oracle_concatenation(a in phases(6), b in phases(6), alpha in 0.001..0.3f64) {
        let whole = KickSequence::new([a.clone(), b.clone()].concat()).unwrap();
        let a = KickSequence::new(a).unwrap();
        let b = KickSequence::new(b).unwrap();
        for spin in SpinBranch::ALL {
            let w = compose_kicks(&whole, spin, alpha);
            let p = compose_kicks(&a, spin, alpha).then(&compose_kicks(&b, spin, alpha));
            prop_assert!((w.disp_c - p.disp_c).norm() < 1e-12);
            prop_assert!((w.disp_s - p.disp_s).norm() < 1e-12);
            prop_assert!((w.phase - p.phase).abs() < 1e-12);
        }
    }

    #[test]
    fn emission_error_bounds(t1 in 0.0..1e-7f64, t2 in 0.0..1e-7f64, n in 0u32..200) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let e_lo = spontaneous_emission_error(lo, 6.9e-9).unwrap();
        let e_hi = spontaneous_emission_error(hi, 6.9e-9).unwrap();
        prop_assert!((0.0..=1.0).contains(&e_lo) && e_lo <= e_hi);
        let gate = gate_emission_infidelity(e_hi, n);
        prop_assert!(gate <= f64::from(n) * e_hi * (1.0 + 1e-12));
        prop_assert!(n == 0 || gate >= e_hi * (1.0 - 1e-12));
    }
}

fn layout(n: usize, m: usize, m_max: usize) -> Arc<WindowLayout> {
    let grid = GridSpec { ratio: 100.0, origin: 0.0 };
    let starts: Vec<i64> = (0..n as i64).map(|w| w * (m_max as i64 + 3)).collect();
    let targets = starts.iter().map(|&s| grid.slot_phase(s) + (m_max as f64 - 1.0) / 2.0 * grid.spacing()).collect();
    Arc::new(WindowLayout { grid, m, m_max, starts, targets, snap_distances: vec![0.0; n] })
}

fn chromosome(layout: &Arc<WindowLayout>, seed: u64) -> Chromosome {
    use rand::seq::index::sample;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut genes = vec![false; layout.n_windows() * layout.m_max];
    for w in 0..layout.n_windows() {
        for o in sample(&mut rng, layout.m_max, layout.m) {
            genes[w * layout.m_max + o] = true;
        }
    }
    Chromosome::new(genes, Arc::clone(layout)).unwrap()
}

proptest! {
    #[test]
    fn ga_operators_conserve_picks(n in 1usize..9, m in 1usize..4, extra in 0usize..4, s1: u64, s2: u64, s3: u64) {
        let l = layout(n, m, m + extra);
        let a = chromosome(&l, s1);
        let b = chromosome(&l, s2);
        let (c, d) = crossover(&a, &b).unwrap();
        let e = mutate(&c, &mut ChaCha8Rng::seed_from_u64(s3));
        for ch in [&c, &d, &e] {
            prop_assert!(ch.check().is_ok());
            prop_assert_eq!(ch.active_count(), n * m);
        }
    }

    #[test]
    fn config_round_trip(
        seed in 0u64..=i64::MAX as u64,
        ratio in 10.0..1e6f64,
        n in 3usize..40,
        m in 1usize..5,
        tol in 1e-14..1e-3f64,
        sep in prop::option::of(0.0..1.0f64),
        target in 1e5..1e7f64,
    ) {
        let mut cfg = PipelineConfig::default();
        cfg.master_seed = seed;
        cfg.grid.ratio = ratio;
        cfg.designer.n_pulses = n;
        cfg.designer.tolerance = tol;
        cfg.designer.min_separation = sep;
        cfg.ga.m = m;
        cfg.target_omega = target;
        prop_assert_eq!(parse_config(&cfg.to_text(), &[]).unwrap(), cfg);
    }
}
