//! Eigenvalues of the all-ones circulant band and its spectral gap, which
//! controls how much noise the eigenvector step tolerates.

use blockpr::spectral::spectral_gap;

fn main() -> blockpr::Result<()> {
    println!("{:>6} {:>6} {:>10} {:>12} {:>12} {:>12}", "d", "delta", "gap", "lower", "nu1-nu2", "upper");
    for (d, delta) in [(64, 3), (64, 4), (128, 8), (256, 8), (256, 16), (1024, 10)] {
        let s = spectral_gap(d, delta)?;
        let mark = |ok: bool| if !s.bounds_apply { " " } else if ok { "ok" } else { "!!" };
        println!(
            "{d:>6} {delta:>6} {:>10.4} {:>10.4}{:>2} {:>12.4} {:>10.4}{:>2}",
            s.gap,
            s.gap_lower_bound,
            mark(s.lower_bound_holds),
            s.nu1_minus_nu2,
            s.gap_upper_bound,
            mark(s.upper_bound_holds)
        );
    }
    Ok(())
}
