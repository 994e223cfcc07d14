//! Array response of the 20-element half-wavelength line array across the
//! sensing sector, and the Gaussian tail used for every error probability.

use isac_feedback::numerics::{dbm_to_mw, q_function, steering_vector};
use isac_feedback::Angle;

fn main() -> isac_feedback::Result<()> {
    let m = 20;
    let boresight = steering_vector(Angle::from_degrees(90.0), m)?;
    println!("normalized array gain toward 90 deg:");
    for deg in [80.0, 85.0, 88.0, 89.0, 90.0, 91.0, 95.0, 100.0] {
        let a = steering_vector(Angle::from_degrees(deg), m)?;
        let gain = boresight.dotc(&a).norm() / m as f64;
        println!("  {deg:>5.1} deg  {gain:.4}");
    }

    println!("\nQ(x):");
    for x in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
        println!("  {x:.1}  {:.6e}", q_function(x));
    }
    println!(
        "\n13 dBm = {} mW, -100 dBm = {:e} mW",
        dbm_to_mw(13.0),
        dbm_to_mw(-100.0)
    );
    Ok(())
}
