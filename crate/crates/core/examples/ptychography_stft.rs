//! Ptychographic and short-time Fourier measurements reduce to local
//! correlations: shifted exponential illumination gives the exponential
//! mask family, and a band-limited window turns the STFT into correlations
//! of the signal's spectrum.

use blockpr::fourier::{ptycho_masks, ptycho_measure, stft_measure, stft_recover, Illumination, Window};
use blockpr::masks::default_decay;
use blockpr::prelude::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(5);

    let (d, delta) = (35, 4);
    let illum = Illumination::exponential(d, delta, default_decay(delta))?;
    let x = Signal::random_gaussian(d, &mut rng);
    // every (2 delta - 1)-th Fourier mode is enough
    let masks = ptycho_masks(&illum, Some(d / (2 * delta - 1)))?;
    let y = forward_measure(&x, &masks)?;
    let full = ptycho_measure(&x, &illum)?;
    let solver = LiftedSolver::build(&masks, SolverStrategy::BlockCirculantFft)?;
    let r = recover(&y, &solver, &RecoveryConfig::default(), Some(&x))?;
    println!(
        "ptychography d={d}: {} of {} measurements used, error {:.1} dB",
        y.total(),
        full.total(),
        r.error_db.unwrap()
    );

    // a flat spectrum with linear phase would leave the lifted system rank
    // deficient, so the magnitudes decay
    let (d, delta) = (64, 5);
    let spectrum: Vec<Complex64> =
        (0..d).map(|s| if s < delta { Complex64::from_polar((-(s as f64) / 3.0).exp(), 0.3 * s as f64) } else { Complex64::new(0.0, 0.0) }).collect();
    let window = Window::from_spectrum(Signal::new(spectrum)?, delta)?;
    let x = Signal::random_gaussian(d, &mut rng);
    let shifts: Vec<usize> = (0..d).collect();
    let y = stft_measure(&x, &window, &shifts)?;
    let r = stft_recover(&y, &window, &RecoveryConfig::default(), Some(&x))?;
    println!("STFT d={d}, window bandwidth {delta}: error {:.1} dB", r.error_db.unwrap());
    Ok(())
}
