//! Dense polynomials over `F_q` for prime `q < 2^64`, constant term first,
//! always trimmed so the last entry is nonzero. The zero polynomial is empty.

use crate::primes::{mul_mod, pow_mod};

pub type FqPoly = Vec<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    q: u64,
}

impl Field {
    /// `q` must be prime; callers check.
    pub fn new(q: u64) -> Self {
        Self { q }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.q as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.q - (b - a)
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q)
    }

    fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        pow_mod(a, self.q - 2, self.q)
    }

    pub fn trim(p: &mut FqPoly) {
        while p.last() == Some(&0) {
            p.pop();
        }
    }

    /// Degree, with `None` for zero.
    pub fn degree(p: &[u64]) -> Option<usize> {
        p.len().checked_sub(1)
    }

    pub fn monic(&self, p: &mut FqPoly) {
        if let Some(&lead) = p.last() {
            let inv = self.inv(lead);
            for c in p.iter_mut() {
                *c = self.mul(*c, inv);
            }
        }
    }

    pub fn sub_poly(&self, a: &[u64], b: &[u64]) -> FqPoly {
        let mut out: FqPoly = (0..a.len().max(b.len()))
            .map(|i| {
                self.sub(
                    a.get(i).copied().unwrap_or(0),
                    b.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::trim(&mut out);
        out
    }

    pub fn mul_poly(&self, a: &[u64], b: &[u64]) -> FqPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        Self::trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn div_rem(&self, a: &[u64], b: &[u64]) -> (FqPoly, FqPoly) {
        assert!(!b.is_empty(), "division by zero polynomial");
        let mut r: FqPoly = a.to_vec();
        Self::trim(&mut r);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let db = b.len() - 1;
        let inv = self.inv(b[db]);
        let mut quot = vec![0u64; r.len() - db];
        for i in (0..quot.len()).rev() {
            let c = self.mul(r[i + db], inv);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = self.sub(r[i + j], self.mul(c, bj));
            }
        }
        r.truncate(db);
        Self::trim(&mut r);
        Self::trim(&mut quot);
        (quot, r)
    }

    pub fn rem(&self, a: &[u64], b: &[u64]) -> FqPoly {
        self.div_rem(a, b).1
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, a: &[u64], b: &[u64]) -> FqPoly {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        Self::trim(&mut x);
        Self::trim(&mut y);
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&mut x);
        x
    }

    pub fn derivative(&self, p: &[u64]) -> FqPoly {
        let mut out: FqPoly = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, i as u64 % self.q))
            .collect();
        Self::trim(&mut out);
        out
    }

    pub fn mul_mod_poly(&self, a: &[u64], b: &[u64], m: &[u64]) -> FqPoly {
        self.rem(&self.mul_poly(a, b), m)
    }

    /// `base^e mod m`.
    pub fn pow_mod_poly(&self, base: &[u64], mut e: u64, m: &[u64]) -> FqPoly {
        let mut acc = self.rem(&[1], m);
        let mut b = self.rem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_mod_poly(&acc, &b, m);
            }
            b = self.mul_mod_poly(&b, &b, m);
            e >>= 1;
        }
        acc
    }

    pub fn is_squarefree(&self, p: &[u64]) -> bool {
        Self::degree(&self.gcd(p, &self.derivative(p))) == Some(0)
    }

    /// Degrees of the irreducible factors of a monic squarefree `f`, ascending.
    pub fn distinct_degree_degrees(&self, f: &[u64]) -> Vec<usize> {
        let mut f = f.to_vec();
        let mut degrees = Vec::new();
        let mut h = self.rem(&[0, 1], &f);
        let mut d = 1;
        while let Some(deg) = Self::degree(&f) {
            if deg == 0 {
                break;
            }
            if 2 * d > deg {
                degrees.push(deg);
                break;
            }
            h = self.pow_mod_poly(&h, self.q, &f);
            let g = self.gcd(&f, &self.sub_poly(&h, &self.rem(&[0, 1], &f)));
            let dg = Self::degree(&g).unwrap_or(0);
            if dg > 0 {
                degrees.extend(std::iter::repeat_n(d, dg / d));
                f = self.div_rem(&f, &g).0;
                if !f.is_empty() {
                    h = self.rem(&h, &f);
                }
            }
            d += 1;
        }
        degrees
    }
}
