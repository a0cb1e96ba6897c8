//! Gaussian channels in (A, G) form and the same channel as a
//! completely positive map.

use gaussent::channels::{
    apply_channel, apply_cp_map, attenuation_channel, channel_valid, GaussianChannel, GaussianCpMap,
};
use gaussent::entanglement::{log_negativity_gaussian, ModePartition};
use gaussent::{CovarianceMatrix, GaussianState};
use nalgebra::DMatrix;

fn main() -> gaussent::Result<()> {
    let tms = GaussianState::centered(CovarianceMatrix::two_mode_squeezed(&[0.6]))?;
    let p = ModePartition::split(1, 1);
    for eta in [1.0, 0.8, 0.5, 0.1] {
        let loss = attenuation_channel(eta, 1)?.on_modes(&[1], 2)?;
        let out = apply_channel(&tms, &loss)?;
        println!(
            "eta = {eta:.1}: E_N = {:.4}",
            log_negativity_gaussian(out.covariance(), &p)?
        );
    }

    // amplification by 2 needs at least |1 - 4| units of added noise
    let amp = |noise: f64| {
        GaussianChannel::new(
            DMatrix::identity(2, 2) * 2.0,
            DMatrix::identity(2, 2) * noise,
            nalgebra::DVector::zeros(2),
        )
    };
    for noise in [1.0, 3.0] {
        let v = channel_valid(&amp(noise)?);
        println!(
            "amplifier with G = {noise}: valid {} ({:+.3})",
            v.valid, v.min_eigenvalue
        );
    }

    let ch = attenuation_channel(0.7, 1)?;
    // the map representation converges to the channel as a grows
    let map = GaussianCpMap::from_channel(&ch, 1e4)?;
    let input = GaussianState::centered(CovarianceMatrix::thermal(&[2.0])?)?;
    let direct = apply_channel(&input, &ch)?;
    let via_map = apply_cp_map(&input, &map)?;
    println!(
        "channel {:.5}, cp map {:.5}",
        direct.covariance().matrix()[(0, 0)],
        via_map.covariance().matrix()[(0, 0)]
    );
    Ok(())
}
