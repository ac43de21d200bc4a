use rnnbench::bench::replicate_series;
use rnnbench::cells::CellKind;
use rnnbench::dgp::DgpKind;
use rnnbench::seeds;
use rnnbench::train::*;

fn criterion5(epochs: usize, seed: u64) {
    let mut ratios_blend = Vec::new();
    let mut ratios_train = Vec::new();
    let mut rmses = Vec::new();
    for rep in 0..3 {
        let series = replicate_series(seed, DgpKind::T, 600, rep).unwrap();
        let split_spec = SplitSpec { train: 400, validation: 100, test: 100 };
        let grid = GridSpec::new(1..=4, 1..=5, 3);
        let job_seed = seeds::derive(seed, &format!("job|cell=LSTM-VANILLA|dgp=T|rep={rep}"));
        let cfg = TrainConfig { max_epochs: epochs, seed: job_seed, ..TrainConfig::default() };
        let g = grid_search(CellKind::LstmVanilla, &series.values, &split_spec, &grid, &cfg).unwrap();
        let run = retrain_and_test(CellKind::LstmVanilla, g.best_n_h, g.best_window, &series.values, &split_spec, &cfg).unwrap();
        let r = run.test_rmse.unwrap();
        let (train_part, _, _) = split(&series.values, &split_spec).unwrap();
        let blended = &series.values[..500];
        let range = |xs: &[f64]| xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let fb = 0.2 / range(blended);
        let ft = 0.2 / range(train_part);
        println!("  rep{rep}: best=({},{}) test={:.5} ratio_blend={:.3} ratio_train={:.3}", g.best_n_h, g.best_window, r, r / fb, r / ft);
        rmses.push(r);
        ratios_blend.push(r / fb);
        ratios_train.push(r / ft);
    }
    let med = |mut v: Vec<f64>| -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[1] };
    println!("epochs={epochs} seed={seed}: median rmse {:.5}, median ratio blend {:.3}, train {:.3}", med(rmses), med(ratios_blend), med(ratios_train));
}

fn main() {
    let t0 = std::time::Instant::now();
    criterion5(100, 7);
    criterion5(500, 7);
    println!("elapsed {:.1}s", t0.elapsed().as_secs_f64());
}
