//! Scratch diagnostic: per-level cross-validation minima for chosen
//! replications of the 1D study. Not part of the shipped surface.

use hwfr::simgen::{gen_1d, BetaCase, NoiseVarianceMode, PredictorFamily, SimDesign1D};
use hwfr::tuning::{select_cv, TuningGrid};

fn main() {
    let reps: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().unwrap())
        .collect();
    for &rep in &reps {
        let (full, _truth) = gen_1d(&SimDesign1D {
            x_type: PredictorFamily::BSpline,
            beta_case: BetaCase::PiecewiseConstant,
            n: 2100,
            p: 128,
            snr: 9.0,
            seed: 31_000 + rep,
            noise_mode: NoiseVarianceMode::AcrossSampleMean,
        })
        .unwrap();
        let train = full.subset(&(0..100).collect::<Vec<_>>()).unwrap();
        let grid = TuningGrid::all_levels(train.dims()).unwrap();
        let sel = select_cv(&train, 5, &grid, 37_000 + rep).unwrap();
        println!("rep {rep}: selected level {} λ={:.4e}", sel.best_level, sel.best_lambda);
        for level in 1..=7usize {
            let best = sel
                .score_table
                .iter()
                .filter(|e| e.level == level)
                .min_by(|a, b| a.score.partial_cmp(&b.score).unwrap())
                .unwrap();
            println!(
                "    level {level}: min CV score {:.6e} at λ={:.3e} (df≈{:.1})",
                best.score, best.lambda, best.df
            );
        }
    }
}
