//! Point processes and segment obstacles: sampled counts against their
//! Poisson means.

use shadowcorr::geometry::{sample_matern, sample_ppp, sample_segments, Window};
use shadowcorr::Seed;

fn main() -> shadowcorr::Result<()> {
    let window = Window::new(10.0)?;
    let reps = 2000;
    let (mut ppp, mut matern, mut segs) = (0usize, 0usize, 0usize);
    for rep in 0..reps {
        let seed = Seed::new(42, rep);
        ppp += sample_ppp(1.0, window, seed)?.len();
        matern += sample_matern(0.2, 5.0, 1.0, window, seed)?.len();
        segs += sample_segments(0.5, 5.0, window, seed)?.len();
    }
    let n = reps as f64;
    println!("PPP lambda=1:             {:.2} points (mean {:.2})", ppp as f64 / n, window.area());
    println!("Matern 0.2 x 5, r_d=1:    {:.2} points (about {:.2} inside the window)", matern as f64 / n, window.area());
    println!(
        "segments lambda_b=0.5:    {:.2} centres (mean {:.2} on the window inflated by l/2)",
        segs as f64 / n,
        0.5 * window.inflated(2.5).area()
    );
    let p = sample_matern(0.2, 5.0, 1.0, window, Seed::new(42, 0))?;
    println!("first Matern draw: {} mothers, {} daughters", p.mothers.len(), p.len());
    Ok(())
}
