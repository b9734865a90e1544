//! Scratch diagnostic: sampling spread of the 30-replication 1D study
//! average across alternative seed bases. Not part of the shipped surface.

use hwfr::funreg::predict;
use hwfr::simgen::{gen_1d, BetaCase, NoiseVarianceMode, PredictorFamily, SimDesign1D};
use hwfr::tuning::{select_cv, TuningGrid};

fn support_percentages(estimated: &[bool], truth: &[bool]) -> (f64, f64) {
    let (mut hit, mut support, mut kept_zero, mut zero) = (0usize, 0usize, 0usize, 0usize);
    for (&e, &t) in estimated.iter().zip(truth) {
        if t {
            support += 1;
            hit += usize::from(e);
        } else {
            zero += 1;
            kept_zero += usize::from(!e);
        }
    }
    (
        100.0 * hit as f64 / support as f64,
        100.0 * kept_zero as f64 / zero as f64,
    )
}

fn main() {
    for base in [31_000u64, 131_000, 231_000, 331_000] {
        let mut mses = Vec::new();
        let mut nzs = Vec::new();
        let mut zs = Vec::new();
        let mut level_hist = [0usize; 8];
        for rep in 0..30u64 {
            let (full, truth) = gen_1d(&SimDesign1D {
                x_type: PredictorFamily::BSpline,
                beta_case: BetaCase::PiecewiseConstant,
                n: 2100,
                p: 128,
                snr: 9.0,
                seed: base + rep,
                noise_mode: NoiseVarianceMode::AcrossSampleMean,
            })
            .unwrap();
            let train = full.subset(&(0..100).collect::<Vec<_>>()).unwrap();
            let grid = TuningGrid::all_levels(train.dims()).unwrap();
            let sel = select_cv(&train, 5, &grid, base + 6_000 + rep).unwrap();
            let fitted = sel.fit_selected(&train).unwrap();
            let preds = predict(&fitted, &full.predictors()[100..]).unwrap();
            let test_g = &truth.g_values[100..];
            let mse = preds
                .iter()
                .zip(test_g)
                .map(|(p, g)| (p - g) * (p - g))
                .sum::<f64>()
                / test_g.len() as f64;
            let (nz, z) = support_percentages(
                fitted.beta().support_mask(),
                truth.beta_field.support_mask(),
            );
            mses.push(mse);
            nzs.push(nz);
            zs.push(z);
            level_hist[sel.best_level] += 1;
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "base {base}: mse {:.3e} nonzero {:.2}% zero {:.2}% | levels 1..7: {:?}",
            mean(&mses),
            mean(&nzs),
            mean(&zs),
            &level_hist[1..]
        );
    }
}
