use aircombat::engagement::EngagementConfig;
use aircombat::nn::{Mlp, NetworkSpec, NnError, PolicyParameters};
use aircombat::ppo::{actor_spec, collect_cycle, critic_spec, Learner, Policy, PpoConfig, CONTROL_DIM};
use aircombat::rng::{substream, Stream};
use aircombat::Side;
use rand::Rng;

#[test]
fn initial_pre_activations_have_roughly_unit_spread() {
    let mut rng = substream(5, Stream::Init, &[]);
    let root3 = 3.0f64.sqrt();
    for spec in [actor_spec(), critic_spec(), NetworkSpec::new(&[12, 64, 64, 4])] {
        let net: Mlp<f32> = Mlp::init(&spec, &mut rng).unwrap();
        let slices = net.param_slices();
        let hidden_layers = spec.layer_sizes.len() - 2;
        for layer in 0..hidden_layers {
            let (fan_in, fan_out) = (spec.layer_sizes[layer], spec.layer_sizes[layer + 1]);
            let w = slices[2 * layer];
            let mut values = Vec::new();
            for _ in 0..200 {
                // Uniform on [-sqrt3, sqrt3]: unit variance.
                let x: Vec<f64> = (0..fan_in).map(|_| rng.random_range(-root3..root3)).collect();
                for o in 0..fan_out {
                    values.push((0..fan_in).map(|i| w[o * fan_in + i] as f64 * x[i]).sum::<f64>());
                }
            }
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            assert!((0.5..=1.5).contains(&std), "{:?} layer {layer}: std {std}", spec.layer_sizes);
        }
        assert!(slices.iter().skip(1).step_by(2).all(|b| b.iter().all(|&v| v == 0.0)));
    }
}

#[test]
fn forward_is_bit_deterministic_and_casts_agree() {
    let mut rng = substream(6, Stream::Init, &[]);
    let net: Mlp<f32> = Mlp::init(&actor_spec(), &mut rng).unwrap();
    let x: Vec<f32> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = net.forward(&x).unwrap();
    let b = net.clone().forward(&x).unwrap();
    assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    let wide: Mlp<f64> = net.cast();
    let xw: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    for (s, d) in a.iter().zip(wide.forward(&xw).unwrap()) {
        assert!((*s as f64 - d).abs() < 1e-4);
    }
}

#[test]
fn model_file_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let policy = Policy::init(&mut substream(1, Stream::Init, &[]));
    let path = dir.path().join("p.model");
    policy.params.save(&path).unwrap();
    let loaded = PolicyParameters::<f32>::load(&path).unwrap();
    assert_eq!(loaded, policy.params);
    assert!(Policy::from_params(loaded).is_ok());

    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
    assert!(matches!(PolicyParameters::<f32>::load(&path), Err(NnError::Format(_))));

    let wrong = PolicyParameters::<f32>::init(
        &NetworkSpec::new(&[10, 8, 4]),
        &NetworkSpec::new(&[10, 8, 1]),
        CONTROL_DIM,
        &mut substream(2, Stream::Init, &[]),
    )
    .unwrap();
    assert!(Policy::from_params(wrong).is_err());
    assert!(PolicyParameters::<f32>::load(&dir.path().join("missing.model")).is_err());
}

fn collected(seed: u64) -> (Policy, aircombat::ppo::CycleData) {
    let policy = Policy::init(&mut substream(seed, Stream::Init, &[]));
    let mut data = collect_cycle(&policy, &EngagementConfig::default(), 300, seed, &[0, 0], 3).unwrap();
    data.buffer.compute_returns_and_advantages(1.0, true);
    (policy, data)
}

#[test]
fn collection_is_reproducible_and_meets_the_minimum() {
    let (_, a) = collected(4);
    let (_, b) = collected(4);
    assert_eq!(a, b);
    assert!(a.buffer.count_side(Side::Red) >= 300);
    assert_eq!(a.buffer.count_side(Side::Red), a.buffer.count_side(Side::Blue));
    assert_eq!(a.tally.total() as usize, a.outcomes.len());
    a.buffer.verify_return_identity().unwrap();
    // Returns of the two sides of each episode cancel.
    let total: f32 = a.buffer.returns.iter().zip(&a.buffer.transitions).filter(|(_, t)| t.done).map(|(g, _)| g).sum();
    assert_eq!(total, 0.0);
}

#[test]
fn update_does_not_depend_on_thread_count() {
    let (policy, data) = collected(8);
    let config = PpoConfig { batch_size: 256, epochs: 2, ..PpoConfig::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut learner = Learner::new(policy.clone(), &config);
            let stats = learner.update(&data.buffer, &config, &mut substream(8, Stream::Shuffle, &[])).unwrap();
            (learner.policy, stats)
        })
    };
    let (p1, s1) = run(1);
    let (p3, s3) = run(3);
    assert_eq!(p1.params.to_bytes(), p3.params.to_bytes());
    assert_eq!(s1, s3);
    assert_ne!(p1.params.to_bytes(), policy.params.to_bytes());
    assert!(s1.is_finite());
}
