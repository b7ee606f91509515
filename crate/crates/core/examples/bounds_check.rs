//! Randomized checks of the perturbation inequalities behind the recovery
//! guarantee, followed by the band spectrum report as JSON.

fn main() -> blockpr::Result<()> {
    for (d, delta) in [(32, 4), (64, 6)] {
        let r = blockpr::bounds::check_bounds(d, delta, 20, 2024)?;
        println!(
            "d={d} delta={delta}: rank-one {:.3}, sin-theta {:.3}, cheeger {:.3}, identity gap {:.1e}, all hold: {}",
            r.rank1.worst_ratio, r.sin_theta.worst_ratio, r.cheeger.worst_ratio, r.frustration_identity_gap, r.all_hold
        );
    }
    let r = blockpr::bounds::check_bounds(16, 3, 5, 1)?;
    println!("{}", serde_json::to_string_pretty(&r.spectrum).expect("finite"));
    Ok(())
}
