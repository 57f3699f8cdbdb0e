//! Arithmetic over GF(2^s) for symbol sizes 2 through 16.
//!
//! Each field is built once from a fixed primitive polynomial and cached for
//! the lifetime of the process. The generator element is `alpha = 2` (the
//! polynomial `x`).
//!
//! | s  | primitive polynomial              | hex     |
//! |----|-----------------------------------|---------|
//! | 2  | x^2 + x + 1                       | 0x7     |
//! | 3  | x^3 + x + 1                       | 0xB     |
//! | 4  | x^4 + x + 1                       | 0x13    |
//! | 5  | x^5 + x^2 + 1                     | 0x25    |
//! | 6  | x^6 + x + 1                       | 0x43    |
//! | 7  | x^7 + x^3 + 1                     | 0x89    |
//! | 8  | x^8 + x^4 + x^3 + x^2 + 1         | 0x11D   |
//! | 9  | x^9 + x^4 + 1                     | 0x211   |
//! | 10 | x^10 + x^3 + 1                    | 0x409   |
//! | 11 | x^11 + x^2 + 1                    | 0x805   |
//! | 12 | x^12 + x^6 + x^4 + x + 1          | 0x1053  |
//! | 13 | x^13 + x^4 + x^3 + x + 1          | 0x201B  |
//! | 14 | x^14 + x^10 + x^6 + x + 1         | 0x4443  |
//! | 15 | x^15 + x + 1                      | 0x8003  |
//! | 16 | x^16 + x^12 + x^3 + x + 1         | 0x1100B |

use std::sync::OnceLock;

/// Smallest supported symbol size in bits.
pub const MIN_SYMBOL_BITS: u32 = 2;
/// Largest supported symbol size in bits.
pub const MAX_SYMBOL_BITS: u32 = 16;

const PRIMITIVE_POLYNOMIALS: [u32; 15] = [
    0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003,
    0x1100B,
];

/// A field element. Only the low `s` bits are meaningful.
pub type Symbol = u16;

/// Returns the primitive polynomial used for `GF(2^s)`, or `None` when `s` is
/// out of range.
pub fn primitive_polynomial(s: u32) -> Option<u32> {
    if (MIN_SYMBOL_BITS..=MAX_SYMBOL_BITS).contains(&s) {
        Some(PRIMITIVE_POLYNOMIALS[(s - MIN_SYMBOL_BITS) as usize])
    } else {
        None
    }
}

/// Log/antilog tables for one field `GF(2^s)`.
#[derive(Debug)]
pub struct GaloisField {
    bits: u32,
    order: usize,
    // exp is doubled so that exp[log a + log b] needs no reduction.
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

impl GaloisField {
    fn build(s: u32) -> Self {
        let poly = primitive_polynomial(s).expect("symbol size checked by caller");
        let size = 1usize << s;
        let order = size - 1;
        let mut exp = vec![0 as Symbol; 2 * order];
        let mut log = vec![0u32; size];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = x as Symbol;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (size as u32) != 0 {
                x ^= poly;
            }
        }
        debug_assert_eq!(x, 1, "polynomial for s={s} is not primitive");
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        GaloisField {
            bits: s,
            order,
            exp,
            log,
        }
    }

    /// Returns the shared field for symbol size `s`, building its tables on
    /// first use.
    pub fn get(s: u32) -> Option<&'static GaloisField> {
        static FIELDS: [OnceLock<GaloisField>; 15] = [const { OnceLock::new() }; 15];
        primitive_polynomial(s)?;
        Some(FIELDS[(s - MIN_SYMBOL_BITS) as usize].get_or_init(|| GaloisField::build(s)))
    }

    /// Bits per symbol.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Size of the multiplicative group, `2^s - 1`. This is also the maximum
    /// Reed-Solomon codeword length in symbols.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Multiplies `a` by `alpha^power`.
    #[inline]
    pub fn mul_exp(&self, a: Symbol, power: usize) -> Symbol {
        if a == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + power % self.order]
        }
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Symbol) -> Symbol {
        assert!(a != 0, "zero has no multiplicative inverse");
        let l = self.log[a as usize] as usize;
        self.exp[(self.order - l) % self.order]
    }

    #[inline]
    pub fn div(&self, a: Symbol, b: Symbol) -> Symbol {
        assert!(b != 0, "division by zero in GF(2^{})", self.bits);
        if a == 0 {
            0
        } else {
            let la = self.log[a as usize] as usize;
            let lb = self.log[b as usize] as usize;
            self.exp[la + self.order - lb]
        }
    }

    /// `alpha^power`.
    #[inline]
    pub fn alpha_pow(&self, power: usize) -> Symbol {
        self.exp[power % self.order]
    }

    /// Discrete log base alpha. Panics on zero.
    #[inline]
    pub fn log(&self, a: Symbol) -> usize {
        assert!(a != 0, "log of zero");
        self.log[a as usize] as usize
    }

    pub fn pow(&self, a: Symbol, e: usize) -> Symbol {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as usize;
        self.exp[(l * (e % self.order)) % self.order]
    }

    /// Evaluates a polynomial given highest-degree coefficient first.
    pub fn eval_poly(&self, coeffs: &[Symbol], x: Symbol) -> Symbol {
        coeffs
            .iter()
            .fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}
