use rand::rngs::StdRng;
use rand::Rng;

use crate::fourier::BlaschkeProduct;
use crate::C64;

pub(crate) fn random_inner(rng: &mut StdRng, max_deg: usize, max_modulus: f64) -> BlaschkeProduct {
    let deg = rng.gen_range(1..=max_deg);
    let zeros = (0..deg)
        .map(|_| {
            C64::from_polar(
                max_modulus * rng.gen::<f64>().sqrt(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    BlaschkeProduct::new(
        C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
        zeros,
    )
    .unwrap()
}
