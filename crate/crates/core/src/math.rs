use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::{Float, ToPrimitive, Zero};

const LN_2: f64 = core::f64::consts::LN_2;

/// Natural log of a positive big integer without overflowing `f64`.
pub(crate) fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.sign() == Sign::Plus);
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * LN_2
}

/// Natural log of a rational; `-inf` for zero.
pub(crate) fn ln_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    debug_assert!(r.numer().sign() == r.denom().sign());
    let num = r.numer().magnitude().clone().into();
    let den = r.denom().magnitude().clone().into();
    ln_bigint(&num) - ln_bigint(&den)
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| ln_rational(r).exp())
}

/// `ln(sum_i exp(x_i))` over the finite entries; `-inf` if there are none.
pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = xs.map(|x| (x - m).exp()).sum();
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn ln_of_huge_integers() {
        let x = BigInt::one() << 3000u32;
        let got = ln_bigint(&x);
        assert!((got - 3000.0 * LN_2).abs() < 1e-9);
    }

    #[test]
    fn ln_of_ratio() {
        let r = BigRational::new(3.into(), 4.into());
        assert!((ln_rational(&r) - 0.75f64.ln()).abs() < 1e-15);
        assert_eq!(ln_rational(&BigRational::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn lse_matches_direct() {
        let xs = [0.1f64, -2.0, 1.5];
        let direct = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(xs.iter().copied()) - direct).abs() < 1e-14);
    }
}
