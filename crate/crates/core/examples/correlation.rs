//! Pairwise-complete correlation matrix and a log-log scaling fit on
//! synthetic zip data with gaps.
//!
//!     cargo run --example correlation

use innodex::render::{render_corr_heatmap, DivergingPalette};
use innodex::stats::{correlation_matrix_from_columns, loglog_slope, pearson};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> innodex::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 60;
    let places: Vec<f64> = (0..n)
        .map(|_| rng.random_range(1.0..40.0f64).round())
        .collect();
    // reviews grow faster than the number of places
    let reviews: Vec<f64> = places
        .iter()
        .map(|p| (20.0 * p.powf(1.3) * rng.random_range(0.8..1.25)).round())
        .collect();
    let income: Vec<Option<f64>> = places
        .iter()
        .map(|p| {
            (rng.random::<f64>() > 0.1)
                .then(|| 40_000.0 + 1_500.0 * p + rng.random_range(-15_000.0..15_000.0))
        })
        .collect();
    let vacancy: Vec<Option<f64>> = places
        .iter()
        .map(|p| {
            (rng.random::<f64>() > 0.2).then(|| 0.15 - 0.002 * p + rng.random_range(-0.04..0.04))
        })
        .collect();

    let names: Vec<String> = ["places", "reviews", "income", "vacancy"]
        .map(String::from)
        .to_vec();
    let some = |v: &[f64]| v.iter().map(|x| Some(*x)).collect::<Vec<_>>();
    let columns = vec![
        some(&places),
        some(&reviews),
        income.clone(),
        vacancy.clone(),
    ];
    let m = correlation_matrix_from_columns(&names, &columns)?;

    print!("{:>9}", "");
    for c in &m.columns {
        print!("{c:>9}");
    }
    println!();
    for (i, c) in m.columns.iter().enumerate() {
        print!("{c:>9}");
        for j in 0..m.len() {
            match m.r[i][j] {
                Some(r) => print!("{r:>9.3}"),
                None => print!("{:>9}", "-"),
            }
        }
        println!("   (n = {:?})", m.n[i]);
    }

    let r = pearson(&income, &vacancy)?;
    println!("income vs vacancy on complete pairs: {r:?}");

    let fit = loglog_slope(&places, &reviews)?;
    println!(
        "ln(reviews) = {:.3} + {:.3} ln(places), r2 {:.3}, {}",
        fit.intercept,
        fit.slope,
        fit.r2,
        if fit.is_superlinear() {
            "super-linear"
        } else {
            "not super-linear"
        }
    );

    let out = std::env::temp_dir().join("innodex_correlation.svg");
    std::fs::write(&out, render_corr_heatmap(&m, &DivergingPalette::default()))
        .map_err(|e| innodex::Error::io(&out, e))?;
    println!("heatmap written to {}", out.display());
    Ok(())
}
