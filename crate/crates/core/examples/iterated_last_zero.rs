//! Iterated Brownian motion and nested last zeros.

use zerocross::iterated::{
    iter_last_zero_cdf, iter_last_zero_cdf_drifted_inner, iterated_bm_pdf, nested_last_zero_cdf, nfold_last_zero_pdf,
    nfold_mgf, nfold_moment,
};
use zerocross::quad::QuadratureBudget;
use zerocross::reflmax::{MaxKind, SeriesBudget};

fn main() -> zerocross::Result<()> {
    let qb = QuadratureBudget::default();
    let sb = SeriesBudget::default();

    println!("density of B1(|B2(1)|), mu1 = 1, mu2 = 0.5:");
    for x in [-1.0, -0.2, 0.2, 1.0] {
        println!("  x = {x:>4}: {:.8}", iterated_bm_pdf(1.0, 0.5, 1.0, x, qb)?);
    }

    println!("\nlast zero before the inner running maximum, mu = 1, t = 1:");
    for a in [0.2, 0.5, 1.0, 2.0] {
        println!(
            "  a = {a:>3}: abs {:.8}, one-sided with mu2 = 0.8 {:.8}",
            iter_last_zero_cdf(1.0, 1.0, a, qb, sb)?,
            iter_last_zero_cdf_drifted_inner(1.0, 0.8, 1.0, a, MaxKind::OneSidedMax, qb, sb)?,
        );
    }

    println!("\nlast zero before a last zero, mu = (1, 0.5), t = 1:");
    for a in [0.05, 0.2, 0.5] {
        println!("  a = {a:>4}: {:.8}", nested_last_zero_cdf(1.0, 0.5, 1.0, a, qb)?);
    }

    println!("\n{:>2} {:>10} {:>10} {:>12} {:>12}", "n", "mean", "2nd", "pdf(0.3)", "mgf(a=-1)");
    for n in 1..=3 {
        println!(
            "{n:>2} {:>10.6} {:>10.6} {:>12.8} {:>12.8}",
            nfold_moment(n, 1, 1.0)?,
            nfold_moment(n, 2, 1.0)?,
            nfold_last_zero_pdf(n, 1.0, 0.3, qb)?,
            nfold_mgf(n, 1.0, -1.0)?,
        );
    }
    if let Err(e) = nfold_last_zero_pdf(4, 1.0, 0.3, qb) {
        println!("n = 4: {e}");
    }
    Ok(())
}
