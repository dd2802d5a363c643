//! Integer rounding of real powers and logarithms.
//!
//! `powf` can land a hair above an exact integer (`4^1.5 = 8.000000000000002`),
//! which would push a ceiling one too far. Values within a relative 1e-9 of an
//! integer are snapped to it first.

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// ⌈base^exp⌉, at least 1.
pub(crate) fn ceil_pow(base: f64, exp: f64) -> u64 {
    (snap(base.powf(exp)).ceil() as u64).max(1)
}

/// ⌊base^exp⌋, at least 1.
pub(crate) fn floor_pow(base: f64, exp: f64) -> u64 {
    (snap(base.powf(exp)).floor() as u64).max(1)
}

pub(crate) fn log2(x: f64) -> f64 {
    x.log2()
}

/// ⌊k · √n · log₂ n⌋.
pub(crate) fn degree_threshold(k: f64, n: usize) -> u64 {
    let n = n as f64;
    snap(k * n.sqrt() * log2(n)).floor() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_powers_are_not_bumped() {
        assert_eq!(ceil_pow(4.0, 1.5), 8);
        assert_eq!(ceil_pow(20.0, 1.5), 90);
        assert_eq!(floor_pow(16.0, 0.75), 8);
        assert_eq!(floor_pow(400.0, 0.75), 89);
        assert_eq!(ceil_pow(1.0, 1.25), 1);
    }

    #[test]
    fn thresholds() {
        // 2 * 20 * log2(400) = 345.75...
        assert_eq!(degree_threshold(2.0, 400), 345);
        assert_eq!(degree_threshold(2.0, 16), 32);
    }
}
