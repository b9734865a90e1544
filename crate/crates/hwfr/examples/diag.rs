//! Scratch diagnostic for the 1D study: per-replication selections under
//! two test-set conventions. Not part of the shipped surface.

use hwfr::funreg::{predict, FunctionalDataset};
use hwfr::simgen::{gen_1d, BetaCase, NoiseVarianceMode, PredictorFamily, SimDesign1D};
use hwfr::tuning::{refitted_cv_sigma2, select_bic, select_cv, TuningGrid, TuningResult};
use hwfr::SignalGrid;

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

fn describe(
    label: &str,
    sel: &TuningResult,
    train: &FunctionalDataset<SignalGrid>,
    test_x: &[SignalGrid],
    test_g: &[f64],
    truth_mask: &[bool],
) {
    let fitted = sel.fit_selected(train).unwrap();
    let preds = predict(&fitted, test_x).unwrap();
    let mse = preds
        .iter()
        .zip(test_g)
        .map(|(p, g)| (p - g) * (p - g))
        .sum::<f64>()
        / test_g.len() as f64;
    let df = fitted
        .lasso_fit
        .coefficients
        .iter()
        .filter(|c| **c != 0.0)
        .count();
    let lambda_max = sel
        .score_table
        .iter()
        .filter(|e| e.level == sel.best_level)
        .map(|e| e.lambda)
        .fold(0.0f64, f64::max);
    let (nz, z) = support_percentages(fitted.beta().support_mask(), truth_mask);
    println!(
        "  {label}: level={} λ/λmax={:.4} df={df} nonzero={nz:.1}% zero={z:.1}% mse={mse:.3e}",
        sel.best_level,
        sel.best_lambda / lambda_max,
    );
}

fn main() {
    let reps: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    for rep in 0..reps {
        // Protocol A: one pooled draw, first 100 train / rest test.
        let (full, truth) = gen_1d(&SimDesign1D {
            x_type: PredictorFamily::BSpline,
            beta_case: BetaCase::PiecewiseConstant,
            n: 2100,
            p: 128,
            snr: 9.0,
            seed: 31_000 + rep,
            noise_mode: NoiseVarianceMode::AcrossSampleMean,
        })
        .unwrap();
        let train_a = full.subset(&(0..100).collect::<Vec<_>>()).unwrap();
        let grid = TuningGrid::all_levels(train_a.dims()).unwrap();
        let mask_a = truth.beta_field.support_mask().to_vec();

        // Protocol B: standalone n=100 training draw (noise scales from the
        // training sample), separate n=2000 test draw.
        let (train_b, truth_b) = gen_1d(&SimDesign1D {
            x_type: PredictorFamily::BSpline,
            beta_case: BetaCase::PiecewiseConstant,
            n: 100,
            p: 128,
            snr: 9.0,
            seed: 31_000 + rep,
            noise_mode: NoiseVarianceMode::AcrossSampleMean,
        })
        .unwrap();
        let (test_full, test_truth) = gen_1d(&SimDesign1D {
            x_type: PredictorFamily::BSpline,
            beta_case: BetaCase::PiecewiseConstant,
            n: 2000,
            p: 128,
            snr: 9.0,
            seed: 34_000 + rep,
            noise_mode: NoiseVarianceMode::AcrossSampleMean,
        })
        .unwrap();
        let mask_b = truth_b.beta_field.support_mask().to_vec();

        println!(
            "rep {rep}: σ²(A)={:.3e} σ²(B)={:.3e} σΕ²(A)={:.3e} σΕ²(B)={:.3e}",
            truth.sigma2, truth_b.sigma2, truth.sigma_e2, truth_b.sigma_e2
        );
        for level in [3usize, 5] {
            let s2 = refitted_cv_sigma2(&train_b, level, 41_000 + rep).unwrap();
            println!(
                "    refitted σ̂² at level {level} (B train): {:.3e} (truncated={})",
                s2.value, s2.truncated
            );
        }

        describe(
            "A cv ",
            &select_cv(&train_a, 5, &grid, 37_000 + rep).unwrap(),
            &train_a,
            &full.predictors()[100..],
            &truth.g_values[100..],
            &mask_a,
        );
        describe(
            "A bic",
            &select_bic(&train_a, &grid, 41_000 + rep).unwrap(),
            &train_a,
            &full.predictors()[100..],
            &truth.g_values[100..],
            &mask_a,
        );
        describe(
            "B cv ",
            &select_cv(&train_b, 5, &grid, 37_000 + rep).unwrap(),
            &train_b,
            test_full.predictors(),
            &test_truth.g_values,
            &mask_b,
        );
        describe(
            "B bic",
            &select_bic(&train_b, &grid, 41_000 + rep).unwrap(),
            &train_b,
            test_full.predictors(),
            &test_truth.g_values,
            &mask_b,
        );
    }
}
