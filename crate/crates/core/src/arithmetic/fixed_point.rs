use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two's-complement (or unsigned) fixed-point number format.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FixedPointFormat {
    pub total_bits: u32,
    pub fraction_bits: u32,
    pub signed: bool,
}

impl Default for FixedPointFormat {
    fn default() -> Self {
        Self { total_bits: 32, fraction_bits: 16, signed: true }
    }
}

/// Divide by `2^shift`, rounding half to even.
pub(crate) fn round_shift(v: i128, shift: u32) -> i128 {
    if shift == 0 {
        return v;
    }
    let q = v >> shift;
    let rem = v - (q << shift);
    let half = 1i128 << (shift - 1);
    if rem > half || (rem == half && q & 1 == 1) {
        q + 1
    } else {
        q
    }
}

impl FixedPointFormat {
    pub fn new(total_bits: u32, fraction_bits: u32, signed: bool) -> Result<Self> {
        if total_bits == 0 || total_bits > 64 {
            return Err(Error::UnsupportedWidth(total_bits));
        }
        if fraction_bits >= total_bits {
            return Err(Error::UnsupportedWidth(fraction_bits));
        }
        Ok(Self { total_bits, fraction_bits, signed })
    }

    pub fn scale(&self) -> f64 {
        (self.fraction_bits as f64).exp2()
    }

    pub fn min_raw(&self) -> i64 {
        if self.signed {
            ((-1i128) << (self.total_bits - 1)) as i64
        } else {
            0
        }
    }

    pub fn max_raw(&self) -> i64 {
        let top = if self.signed { self.total_bits - 1 } else { self.total_bits };
        ((1i128 << top) - 1).min(i64::MAX as i128) as i64
    }

    /// Reduce an integer into the representable range modulo `2^total_bits`.
    pub fn wrap(&self, v: i128) -> i64 {
        let m = 1i128 << self.total_bits;
        let mut r = v.rem_euclid(m);
        if self.signed && r >= m / 2 {
            r -= m;
        }
        r as i64
    }

    /// Nearest representable raw value, or `None` when out of range.
    pub fn quantize(&self, x: f64) -> Option<i64> {
        let r = (x * self.scale()).round_ties_even();
        if !r.is_finite() || r < self.min_raw() as f64 || r > self.max_raw() as f64 {
            return None;
        }
        Some(r as i64)
    }

    /// Nearest raw value reduced modulo `2^total_bits`.
    pub fn quantize_wrapping(&self, x: f64) -> i64 {
        let r = (x * self.scale()).round_ties_even();
        if !r.is_finite() {
            return 0;
        }
        self.wrap(r.clamp(-1.7e38, 1.7e38) as i128)
    }

    pub fn to_f64(&self, raw: i64) -> f64 {
        raw as f64 / self.scale()
    }

    /// Bit pattern of a raw value as stored in a register.
    pub fn to_bits(&self, raw: i64) -> u64 {
        let mask = if self.total_bits == 64 { u64::MAX } else { (1u64 << self.total_bits) - 1 };
        raw as u64 & mask
    }

    pub fn from_bits(&self, bits: u64) -> i64 {
        self.wrap(bits as i128)
    }
}

/// `(x + y) mod 2^b`.
pub fn ref_add(x: i64, y: i64, fmt: FixedPointFormat) -> i64 {
    fmt.wrap(x as i128 + y as i128)
}

/// Rounded fixed-point product with wraparound.
pub fn ref_multiply(x: i64, y: i64, fmt: FixedPointFormat) -> i64 {
    fmt.wrap(round_shift(x as i128 * y as i128, fmt.fraction_bits))
}

pub fn ref_square(x: i64, fmt: FixedPointFormat) -> i64 {
    ref_multiply(x, x, fmt)
}

pub fn ref_negate(x: i64, fmt: FixedPointFormat) -> i64 {
    fmt.wrap(-(x as i128))
}

/// Phase `exp(2πi·raw/2^b)` imprinted by adding `raw` into a `b`-bit phase
/// gradient register.
pub fn phase_of_accumulation(raw: i64, fmt: FixedPointFormat) -> Complex64 {
    let unsigned = fmt.to_bits(raw) as f64;
    let turns = unsigned / (fmt.total_bits as f64).exp2();
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * turns)
}
