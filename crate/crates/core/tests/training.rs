use wganlab_core::data::{sample_latent, Dataset, DatasetKind};
use wganlab_core::nn::evaluate;
use wganlab_core::numerics::rng::purpose;
use wganlab_core::regularizers::RegularizerSpec;
use wganlab_core::training::{train_run, Checkpoint, TrainConfig, Trainer};
use wganlab_core::RngState;

fn small(regularizer: RegularizerSpec) -> TrainConfig {
    TrainConfig {
        dataset: DatasetKind::SwissRoll,
        critic_hidden: vec![16, 16],
        generator_hidden: vec![16, 16],
        regularizer,
        batch_size: 32,
        n_critic: 3,
        warmup_gen_iters: 2,
        warmup_n_critic: 5,
        iterations: 8,
        emd_every: 4,
        emd_sample_size: 40,
        levelset_iters: vec![],
        seed: 31,
        ..TrainConfig::default()
    }
}

#[test]
fn equal_seeds_give_equal_logs() {
    let c = small(RegularizerSpec::Gp { lambda: 10.0 });
    let a = train_run(c.clone()).unwrap();
    let b = train_run(c.clone()).unwrap();
    assert_eq!(a.log.to_csv(false), b.log.to_csv(false));
    assert_eq!(a.checkpoint.to_bytes(), b.checkpoint.to_bytes());
    let other = train_run(TrainConfig { seed: 32, ..c }).unwrap();
    assert_ne!(a.log.to_csv(false), other.log.to_csv(false));
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    for reg in [
        RegularizerSpec::Lp { lambda: 10.0 },
        RegularizerSpec::Ratio {
            lambda: 10.0,
            p: 2,
            one_sided: true,
        },
        RegularizerSpec::WeightClip { c_max: 0.05 },
    ] {
        let c = small(reg);
        let full = train_run(c.clone()).unwrap();
        let mut first = Trainer::new(c.clone()).unwrap();
        let head = first.run_to(3);
        let restored = Checkpoint::read_from(&head.checkpoint.to_bytes()[..]).unwrap();
        let tail = Trainer::resume(c.clone(), restored).unwrap().run_to(c.iterations);
        let mut joined = head.log.records.clone();
        joined.extend(tail.log.records.clone());
        assert_eq!(joined, full.log.records, "{reg:?}");
        assert_eq!(tail.checkpoint.to_bytes(), full.checkpoint.to_bytes(), "{reg:?}");
    }
}

#[test]
fn resume_rejects_foreign_checkpoint() {
    let c = small(RegularizerSpec::Lp { lambda: 10.0 });
    let ckpt = Trainer::new(c.clone()).unwrap().checkpoint();
    assert!(Trainer::resume(TrainConfig { seed: 1, ..c.clone() }, ckpt.clone()).is_err());
    assert!(Trainer::resume(
        TrainConfig {
            critic_hidden: vec![8],
            ..c
        },
        ckpt
    )
    .is_err());
}

/// Replays the first iteration by hand with `critic_steps` critic updates.
fn replay_first_iteration(c: &TrainConfig, critic_steps: usize) -> Checkpoint {
    let mut t = Trainer::new(c.clone()).unwrap();
    let data = Dataset::standard(c.dataset);
    let mut rng = RngState::derive(c.seed, purpose::TRAIN, 1);
    for _ in 0..critic_steps {
        let real = data.sample(c.batch_size, &mut rng);
        let z = sample_latent(c.latent, c.batch_size, &mut rng);
        let gen = evaluate(t.generator(), &z).unwrap();
        t.critic_update(&real, &gen, &mut rng).unwrap();
    }
    let z = sample_latent(c.latent, c.batch_size, &mut rng);
    t.generator_update(&z).unwrap();
    let mut ckpt = t.checkpoint();
    ckpt.iteration = 1;
    ckpt
}

#[test]
fn single_iteration_runs_warmup_critic_steps_then_one_generator_step() {
    let c = TrainConfig {
        iterations: 1,
        ..small(RegularizerSpec::Lp { lambda: 10.0 })
    };
    let out = train_run(c.clone()).unwrap();
    assert_eq!(out.log.records.len(), 1);
    assert_eq!(replay_first_iteration(&c, c.warmup_n_critic), out.checkpoint);
    assert_ne!(replay_first_iteration(&c, c.warmup_n_critic - 1), out.checkpoint);
    assert_ne!(replay_first_iteration(&c, c.warmup_n_critic + 1), out.checkpoint);
}

#[test]
fn logged_critic_loss_excludes_penalty() {
    // One critic step per iteration: the logged d_loss is the loss of the
    // critic stored in the previous checkpoint on this iteration's batch.
    let c = TrainConfig {
        warmup_gen_iters: 0,
        n_critic: 1,
        ..small(RegularizerSpec::Lp { lambda: 100.0 })
    };
    let data = Dataset::standard(c.dataset);
    let mut t = Trainer::new(c.clone()).unwrap();
    for it in 1..=c.iterations {
        let before = t.checkpoint();
        let record = t.step().unwrap();
        let mut rng = RngState::derive(c.seed, purpose::TRAIN, it as u64);
        let real = data.sample(c.batch_size, &mut rng);
        let gen = evaluate(&before.generator, &sample_latent(c.latent, c.batch_size, &mut rng)).unwrap();
        let mean = |m: &wganlab_core::Matrix| m.as_slice().iter().sum::<f64>() / m.rows() as f64;
        let d = mean(&evaluate(&before.critic, &gen).unwrap()) - mean(&evaluate(&before.critic, &real).unwrap());
        assert_eq!(record.d_loss, d, "iteration {it}");
        assert!(record.penalty >= 0.0);
    }
}

#[test]
fn schedule_total_matches_config_arithmetic() {
    let c = small(RegularizerSpec::None);
    let per_iter: usize = (1..=c.iterations).map(|it| c.critic_steps_at(it)).sum();
    assert_eq!(per_iter, c.total_critic_steps(c.iterations));
    assert_eq!(
        per_iter,
        c.warmup_gen_iters * c.warmup_n_critic + (c.iterations - c.warmup_gen_iters) * c.n_critic
    );
}
