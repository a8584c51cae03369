//! Closed-form rates for the stuck-at memory example.

use crate::channels::ToyChannelParams;
use crate::probability::binary_entropy;

/// (bin-forward capacity, decode-forward rate) = (1 - p, 1 - H2(p/2)).
pub fn toy_rates(params: ToyChannelParams) -> (f64, f64) {
    let p = params.p();
    (1.0 - p, 1.0 - binary_entropy(p / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let (bf, df) = toy_rates(ToyChannelParams::new(0.4).unwrap());
        assert!((bf - 0.6).abs() < 1e-12);
        assert!((df - 0.278072).abs() < 1e-6);
        let (bf, df) = toy_rates(ToyChannelParams::new(0.2).unwrap());
        assert!((bf - 0.8).abs() < 1e-12);
        assert!((df - 0.531005).abs() < 1e-6);
        let (bf, df) = toy_rates(ToyChannelParams::new(1e-12).unwrap());
        assert!((bf - 1.0).abs() < 1e-9 && (df - 1.0).abs() < 1e-9);
    }
}
