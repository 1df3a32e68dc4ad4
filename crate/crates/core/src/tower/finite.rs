//! `F_{p^d}` as `F_p[x]/(m(x))` with a primitive modulus, plus the
//! subfield embeddings of a divisibility chain of degrees.

use crate::error::{Error, Result};

/// Conway polynomials, coefficients from the constant term up (monic).
const CONWAY: &[(u32, &[u32])] = &[
    (2, &[1, 1]),
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 1]),
    (2, &[1, 0, 1, 0, 0, 1]),
    (2, &[1, 1, 0, 1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (2, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
    (2, &[1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1]),
    (3, &[1, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (3, &[1, 2, 0, 0, 0, 1]),
    (3, &[2, 2, 1, 0, 2, 0, 1]),
    (5, &[3, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (7, &[4, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (7, &[3, 4, 5, 0, 1]),
];

pub(crate) fn conway_polynomial(p: u32, d: u32) -> Option<&'static [u32]> {
    CONWAY
        .iter()
        .find(|(q, m)| *q == p && m.len() == d as usize + 1)
        .map(|(_, m)| *m)
}

pub(crate) type Coords = Vec<u32>;

#[derive(Debug, Clone)]
pub(crate) struct FiniteField {
    pub p: u32,
    pub degrees: Vec<u32>,
    /// top degree `d_r`
    pub d: usize,
    modulus: Vec<u32>,
    /// generator of each level's subfield, as an element of the top field
    pub sub_generators: Vec<Coords>,
}

impl FiniteField {
    pub fn new(p: u32, degrees: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidTower(format!("{p} is not prime")));
        }
        if degrees.is_empty() || degrees.contains(&0) {
            return Err(Error::InvalidTower("degrees must be positive and nonempty".into()));
        }
        for w in degrees.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::InvalidTower(format!("degree {} does not divide {}", w[0], w[1])));
            }
        }
        let top = *degrees.last().unwrap();
        let modulus = conway_polynomial(p, top)
            .ok_or_else(|| Error::InvalidTower(format!("no stored modulus for F_{p}^{top}")))?
            .to_vec();
        if (p as u128).checked_pow(top).is_none_or(|q| q > u64::MAX as u128) {
            return Err(Error::InvalidTower("field too large".into()));
        }
        let mut field = FiniteField { p, degrees: degrees.clone(), d: top as usize, modulus, sub_generators: vec![] };
        if !field.generator_is_primitive() {
            return Err(Error::InvalidTower(format!("stored modulus for F_{p}^{top} is not primitive")));
        }
        let q = field.order();
        let x = field.x();
        field.sub_generators = degrees
            .iter()
            .map(|&di| {
                let qi = (p as u128).pow(di);
                field.pow(&x, (q - 1) / (qi - 1))
            })
            .collect();
        Ok(field)
    }

    /// `p^{d_r}`
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.d as u32)
    }

    pub fn zero(&self) -> Coords {
        vec![0; self.d]
    }

    pub fn from_int(&self, n: i64) -> Coords {
        let mut c = self.zero();
        c[0] = n.rem_euclid(self.p as i64) as u32;
        c
    }

    /// The class of `x`.
    pub fn x(&self) -> Coords {
        if self.d == 1 {
            // x ≡ -m_0
            return self.from_int(-(self.modulus[0] as i64));
        }
        let mut c = self.zero();
        c[1] = 1;
        c
    }

    pub fn is_zero(&self, a: &Coords) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Coords, b: &Coords) -> Coords {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &Coords) -> Coords {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn sub(&self, a: &Coords, b: &Coords) -> Coords {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Coords, k: u32) -> Coords {
        a.iter().map(|&x| ((x as u64 * k as u64) % self.p as u64) as u32).collect()
    }

    pub fn mul(&self, a: &Coords, b: &Coords) -> Coords {
        let p = self.p as u64;
        let d = self.d;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce with the monic modulus, top degree first
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (j, &m) in self.modulus[..d].iter().enumerate() {
                let idx = k - d + j;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        prod.truncate(d);
        prod.into_iter().map(|c| c as u32).collect()
    }

    pub fn pow(&self, a: &Coords, mut e: u128) -> Coords {
        let mut base = a.clone();
        let mut acc = self.from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Coords) -> Result<Coords> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// `a^{p^k}`
    pub fn frobenius(&self, a: &Coords, k: u32) -> Coords {
        let mut out = a.clone();
        for _ in 0..k {
            out = self.pow(&out, self.p as u128);
        }
        out
    }

    /// Least level whose subfield contains `a`.
    pub fn min_level(&self, a: &Coords) -> usize {
        self.degrees
            .iter()
            .position(|&di| self.frobenius(a, di) == *a)
            .expect("the top level contains everything")
    }

    /// `F_p`-basis `1, γ, …, γ^{d_i - 1}` of the level-`i` subfield.
    pub fn sub_basis(&self, level: usize) -> Vec<Coords> {
        let g = &self.sub_generators[level];
        let mut out = vec![self.from_int(1)];
        for _ in 1..self.degrees[level] {
            let next = self.mul(out.last().unwrap(), g);
            out.push(next);
        }
        out
    }

    fn generator_is_primitive(&self) -> bool {
        let n = self.order() - 1;
        let x = self.x();
        if self.pow(&x, n) != self.from_int(1) {
            return false;
        }
        prime_factors(n).into_iter().all(|l| self.pow(&x, n / l) != self.from_int(1))
    }

    pub fn format(&self, a: &Coords) -> String {
        let mut parts = Vec::new();
        for k in (0..self.d).rev() {
            let c = a[k];
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{k}"),
            };
            parts.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                (_, false) => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Rank of a matrix over `F_p`.
pub fn rank_mod_p(mut rows: Vec<Vec<u32>>, p: u32) -> usize {
    let p64 = p as u64;
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][col] as u64, p64);
        for c in col..ncols {
            rows[rank][c] = ((rows[rank][c] as u64 * inv) % p64) as u32;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col] as u64;
                for c in col..ncols {
                    let sub = (f * rows[rank][c] as u64) % p64;
                    rows[r][c] = ((rows[r][c] as u64 + p64 - sub) % p64) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut k = 2u128;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
