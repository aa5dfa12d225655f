//! Dirichlet characters mod a prime, Kronecker symbols and fundamental discriminants.

use crate::error::{domain, Result};
use crate::primes;
use num_complex::Complex64;
use std::f64::consts::PI;

/// A Dirichlet character evaluated at positive integers.
pub trait DirichletCharacter: Sync {
    fn modulus(&self) -> u64;
    fn value(&self, n: u64) -> Complex64;
    /// Value for real characters; `None` when the character is complex.
    fn real_value(&self, n: u64) -> Option<f64>;
    fn is_real(&self) -> bool {
        self.real_value(1).is_some()
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Smallest primitive root of the prime `q`.
pub fn primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let factors = primes::factorize(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&(l, _)| pow_mod(g, (q - 1) / l, q) != 1))
        .expect("a prime modulus has a primitive root")
}

/// All characters mod a prime `q`, indexed by `j ∈ [0, q−1)` with
/// `χ_j(g^k) = e^{2πi·jk/(q−1)}` for the smallest primitive root `g`.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    modulus: u64,
    generator: u64,
    dlog: Vec<u32>,
}

impl CharacterTable {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || !primes::is_prime(q) {
            return domain(format!("character tables need a prime modulus ≥ 3, got {q}"));
        }
        if q > u32::MAX as u64 {
            return domain(format!("modulus {q} too large for a discrete-log table"));
        }
        let g = primitive_root(q);
        let mut dlog = vec![u32::MAX; q as usize];
        let mut a = 1u64;
        for k in 0..q - 1 {
            dlog[a as usize] = k as u32;
            a = a * g % q;
        }
        Ok(Self { modulus: q, generator: g, dlog })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Group order `q − 1`, which is also the number of characters.
    pub fn order(&self) -> u64 {
        self.modulus - 1
    }

    /// Number of non-principal (primitive) characters, `q − 2`.
    pub fn primitive_count(&self) -> u64 {
        self.modulus - 2
    }

    pub fn dlog(&self, a: u64) -> Option<u64> {
        let r = a % self.modulus;
        (r != 0).then(|| self.dlog[r as usize] as u64)
    }

    /// Exponent `e` with `χ_j(a) = e^{2πi·e/(q−1)}`, or `None` when `q | a`.
    pub fn exponent(&self, j: u64, a: u64) -> Option<u64> {
        self.dlog(a).map(|k| ((j as u128 * k as u128) % self.order() as u128) as u64)
    }

    pub fn value(&self, j: u64, a: u64) -> Complex64 {
        match self.exponent(j, a) {
            None => Complex64::new(0.0, 0.0),
            Some(e) => exponent_to_unit(e, self.order()),
        }
    }

    pub fn character(&self, j: u64) -> TableCharacter<'_> {
        TableCharacter { table: self, index: j % self.order() }
    }
}

/// `e^{2πi·e/m}`, exact at the quarter turns.
pub fn exponent_to_unit(e: u64, m: u64) -> Complex64 {
    let e = e % m;
    if e == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * e == m {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * e == m {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * e == 3 * m {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * e as f64 / m as f64)
}

#[derive(Clone, Copy, Debug)]
pub struct TableCharacter<'a> {
    pub table: &'a CharacterTable,
    pub index: u64,
}

impl DirichletCharacter for TableCharacter<'_> {
    fn modulus(&self) -> u64 {
        self.table.modulus
    }

    fn value(&self, n: u64) -> Complex64 {
        self.table.value(self.index, n)
    }

    fn real_value(&self, n: u64) -> Option<f64> {
        if !(2 * self.index).is_multiple_of(self.table.order()) {
            return None;
        }
        Some(self.table.value(self.index, n).re)
    }
}

/// Jacobi symbol `(a/b)` for odd `b > 0`.
fn jacobi(a: i64, b: u64) -> i32 {
    let mut a = a.rem_euclid(b as i64) as u64;
    let mut b = b;
    let mut result = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if b % 8 == 3 || b % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a % 4 == 3 && b % 4 == 3 {
            result = -result;
        }
        a %= b;
    }
    if b == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(D/n)` for `n ≥ 0`.
pub fn kronecker(d: i64, n: u64) -> i32 {
    if n == 0 {
        return i32::from(d == 1 || d == -1);
    }
    let mut n = n;
    let mut v = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        v += 1;
    }
    let two = if v == 0 {
        1
    } else {
        match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => {
                if v % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            _ => 0,
        }
    };
    if two == 0 {
        return 0;
    }
    two * jacobi(d, n)
}

/// The real character `χ_D = (D/·)`, tabulated over one period `|D|`.
#[derive(Clone, Debug)]
pub struct QuadraticCharacter {
    d: i64,
    table: Vec<i8>,
}

impl QuadraticCharacter {
    pub fn new(d: i64) -> Self {
        let k = d.unsigned_abs();
        let table = (0..k).map(|n| kronecker(d, n) as i8).collect();
        Self { d, table }
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    #[inline]
    pub fn at(&self, n: u64) -> i8 {
        self.table[(n % self.table.len() as u64) as usize]
    }

    /// `+1` for even characters (`D > 0`), `−1` for odd ones.
    pub fn parity(&self) -> i32 {
        if self.d > 0 {
            1
        } else {
            -1
        }
    }
}

impl DirichletCharacter for QuadraticCharacter {
    fn modulus(&self) -> u64 {
        self.d.unsigned_abs()
    }

    fn value(&self, n: u64) -> Complex64 {
        Complex64::new(self.at(n) as f64, 0.0)
    }

    fn real_value(&self, n: u64) -> Option<f64> {
        Some(self.at(n) as f64)
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 || d == 0 {
        return false;
    }
    let squarefree = |m: u64| primes::factorize(m).iter().all(|&(_, k)| k == 1);
    if d.rem_euclid(4) == 1 {
        return squarefree(d.unsigned_abs());
    }
    if d.rem_euclid(4) == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && squarefree(m.unsigned_abs());
    }
    false
}

/// Fundamental discriminants `D ≠ 1` with `|D| ≤ Y`, sorted by `(|D|, D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminantSet {
    pub bound: u64,
    pub discriminants: Vec<i64>,
    /// `†`-filter outcome per discriminant, filled on demand
    pub dagger_flags: Vec<Option<bool>>,
}

impl DiscriminantSet {
    pub fn len(&self) -> usize {
        self.discriminants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discriminants.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.discriminants.iter().copied()
    }

    pub fn excluded(&self) -> Vec<i64> {
        self.discriminants
            .iter()
            .zip(&self.dagger_flags)
            .filter(|(_, f)| **f == Some(false))
            .map(|(d, _)| *d)
            .collect()
    }
}

pub fn enumerate_fundamental_discriminants(y: u64) -> DiscriminantSet {
    let flags = primes::squarefree_flags(y);
    let mut ds = Vec::new();
    for m in 1..=y {
        if !flags[m as usize] {
            continue;
        }
        let mi = m as i64;
        if m % 4 == 1 && m != 1 {
            ds.push(mi);
        }
        if m % 4 == 3 {
            ds.push(-mi);
        }
        if 4 * m <= y {
            match m % 4 {
                2 => {
                    ds.push(4 * mi);
                    ds.push(-4 * mi);
                }
                3 => ds.push(4 * mi),
                1 => ds.push(-4 * mi),
                _ => {}
            }
        }
    }
    ds.sort_by_key(|&d| (d.unsigned_abs(), d));
    let n = ds.len();
    DiscriminantSet { bound: y, discriminants: ds, dagger_flags: vec![None; n] }
}

/// `f_Y(n) = Σ_{|D| ≤ Y} χ_D(n)` over the set.
pub fn f_y_sum(n: u64, set: &DiscriminantSet) -> i64 {
    set.iter().map(|d| kronecker(d, n) as i64).sum()
}
