//! Every CSV the CLI emits parses back to the exact values it was made from.

use wganlab_cli::aggregate::{aggregate, to_csv};
use wganlab_core::data::DatasetKind;
use wganlab_core::regularizers::RegularizerSpec;
use wganlab_core::training::{train_run, TrainConfig};

fn parse(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn config(seed: u64) -> TrainConfig {
    TrainConfig {
        dataset: DatasetKind::TwentyFiveGaussians,
        critic_hidden: vec![8, 8],
        generator_hidden: vec![8],
        regularizer: RegularizerSpec::Gp { lambda: 10.0 },
        batch_size: 16,
        warmup_gen_iters: 1,
        warmup_n_critic: 3,
        n_critic: 2,
        iterations: 5,
        emd_every: 2,
        emd_sample_size: 16,
        levelset_iters: vec![5],
        levelset_resolution: 5,
        seed,
        log_wall_time: true,
        ..TrainConfig::default()
    }
}

#[test]
fn runlog_csv_round_trips() {
    let out = train_run(config(1)).unwrap();
    let rows = parse(&out.log.to_csv(true));
    assert_eq!(rows.len(), out.log.records.len());
    for (row, rec) in rows.iter().zip(&out.log.records) {
        assert_eq!(row[0].parse::<usize>().unwrap(), rec.iter);
        assert_eq!(num(&row[1]).to_bits(), rec.d_loss.to_bits());
        assert_eq!(num(&row[2]).to_bits(), rec.penalty.to_bits());
        assert_eq!(num(&row[3]).to_bits(), rec.grad_norm_mean.to_bits());
        assert_eq!(num(&row[4]).to_bits(), rec.grad_norm_max.to_bits());
        assert_eq!(rec.emd.map(f64::to_bits), (!row[5].is_empty()).then(|| num(&row[5]).to_bits()));
        assert!(num(&row[6]) >= 0.0);
    }
}

#[test]
fn levelset_csv_round_trips() {
    let out = train_run(config(2)).unwrap();
    let ls = &out.levelsets[0];
    let rows = parse(&ls.to_csv());
    assert_eq!(rows.len(), 25);
    for (row, v) in rows.iter().zip(ls.grid.as_slice()) {
        assert_eq!(num(&row[2]).to_bits(), v.to_bits());
    }
}

#[test]
fn aggregate_csv_round_trips() {
    let logs: Vec<_> = (3..6).map(|s| train_run(config(s)).unwrap().log).collect();
    let rows = aggregate(&logs);
    let parsed = parse(&to_csv(&rows));
    for (row, agg) in parsed.iter().zip(&rows) {
        assert_eq!(num(&row[2]).to_bits(), agg.d_loss.median.to_bits());
        assert_eq!(num(&row[3]).to_bits(), agg.d_loss.q25.to_bits());
        assert_eq!(num(&row[4]).to_bits(), agg.d_loss.q75.to_bits());
        match agg.emd {
            Some(q) => assert_eq!(num(&row[6]).to_bits(), q.median.to_bits()),
            None => assert!(row[6].is_empty()),
        }
    }
}
