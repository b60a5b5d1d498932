//! Thin float helpers over `libm` so the crate stays `no_std`.

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `q^k` with `q = 1 - p`, evaluated as `exp(k * ln(1 - p))`.
///
/// `q = 0` gives 0 for every `k > 0` and 1 for `k = 0`.
pub(crate) fn q_pow(p: f64, k: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    libm::exp(k * libm::log1p(-p))
}

/// `1 - q^k`, accurate when `p` is small (no cancellation).
pub(crate) fn one_minus_q_pow(p: f64, k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    -libm::expm1(k * libm::log1p(-p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_pow_edges() {
        assert_eq!(q_pow(1.0, 0.0), 1.0);
        assert_eq!(q_pow(1.0, 3.0), 0.0);
        assert!((q_pow(0.2, 2.0) - 0.64).abs() < 1e-15);
        assert!((one_minus_q_pow(1e-9, 1.0) - 1e-9).abs() < 1e-24);
        assert_eq!(one_minus_q_pow(0.3, 0.0), 0.0);
    }
}
