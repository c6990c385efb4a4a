//! Thin multiprecision context over `astro-float`, used where double
//! precision cannot absorb the cancellation of alternating weight sums.

use astro_float::{BigFloat, Consts, RoundingMode};

pub use astro_float::BigFloat as Big;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision plus the constant cache needed by `pow`, `ln`, `exp`.
pub struct Mp {
    bits: usize,
    consts: Consts,
}

impl std::fmt::Debug for Mp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mp").field("bits", &self.bits).finish()
    }
}

impl Mp {
    pub fn new(bits: usize) -> Self {
        Self {
            bits: bits.max(64),
            consts: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn num(&self, x: f64) -> Big {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn int(&self, n: u64) -> Big {
        BigFloat::from_u64(n, self.bits)
    }

    pub fn add(&self, a: &Big, b: &Big) -> Big {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &Big, b: &Big) -> Big {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &Big, b: &Big) -> Big {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &Big, b: &Big) -> Big {
        a.div(b, self.bits, RM)
    }

    /// `a^b` for `a > 0`.
    pub fn pow(&mut self, a: &Big, b: &Big) -> Big {
        a.pow(b, self.bits, RM, &mut self.consts)
    }

    pub fn powf(&mut self, a: &Big, b: f64) -> Big {
        let e = self.num(b);
        self.pow(a, &e)
    }

    pub fn exp(&mut self, a: &Big) -> Big {
        a.exp(self.bits, RM, &mut self.consts)
    }

    pub fn ln(&mut self, a: &Big) -> Big {
        a.ln(self.bits, RM, &mut self.consts)
    }

    pub fn ln2(&mut self) -> Big {
        self.consts.ln_2(self.bits, RM)
    }

    /// Nearest double (via the decimal representation).
    pub fn to_f64(&self, a: &Big) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        if a.is_nan() {
            return f64::NAN;
        }
        if a.is_inf_pos() {
            return f64::INFINITY;
        }
        if a.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let s = format!("{a}");
        s.parse::<f64>().unwrap_or(f64::NAN)
    }
}
