//! GF(2^m) arithmetic over log/antilog tables.
//!
//! Tables are built once per field from a fixed primitive polynomial and are
//! immutable afterwards, so shared concurrent use is safe.

use crate::error::Error;
use crate::Result;

/// Primitive polynomial for each supported field size, including the
/// leading term (e.g. `0b1011` is x^3 + x + 1).
fn primitive_poly(m: u32) -> Option<u32> {
    Some(match m {
        2 => 0b111,
        3 => 0b1011,
        4 => 0b1_0011,
        5 => 0b10_0101,
        6 => 0b100_0011,
        7 => 0b1000_1001,
        8 => 0b1_0001_1101,
        9 => 0b10_0001_0001,
        10 => 0b100_0000_1001,
        _ => return None,
    })
}

/// Log/antilog tables for one field.
#[derive(Debug, Clone)]
pub struct GfTables {
    m: u32,
    order: usize,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GfTables {
    pub fn new(m: u32) -> Result<Self> {
        let poly = primitive_poly(m).ok_or_else(|| {
            Error::param("rs_symbol_bits", "supported symbol widths are 2..=10 bits")
        })?;
        let size = 1usize << m;
        let order = size - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; size];
        let mut x = 1u32;
        #[allow(clippy::needless_range_loop)] // i indexes exp and log together
        for i in 0..order {
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        // Duplicate so exp indexing never needs a modulo for sums of logs.
        exp.copy_within(0..order, order);
        Ok(GfTables { m, order, exp, log })
    }

    pub fn symbol_bits(&self) -> u32 {
        self.m
    }

    /// Multiplicative order, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `alpha^i` for any non-negative exponent.
    pub fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % self.order]
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: u16) -> u16 {
        debug_assert!(a != 0, "zero has no inverse");
        self.exp[self.order - self.log[a as usize] as usize]
    }

    pub fn div(&self, a: u16, b: u16) -> u16 {
        debug_assert!(b != 0, "division by zero");
        if a == 0 {
            0
        } else {
            self.exp
                [self.log[a as usize] as usize + self.order - self.log[b as usize] as usize]
        }
    }

    /// Evaluates a polynomial (coefficient of x^0 first) at `x`.
    pub fn poly_eval(&self, poly: &[u16], x: u16) -> u16 {
        let mut acc = 0u16;
        for &c in poly.iter().rev() {
            acc = self.mul(acc, x) ^ c;
        }
        acc
    }

    /// Product of two polynomials (coefficient of x^0 first).
    pub fn poly_mul(&self, a: &[u16], b: &[u16]) -> Vec<u16> {
        let mut out = vec![0u16; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] ^= self.mul(ai, bj);
            }
        }
        out
    }
}
