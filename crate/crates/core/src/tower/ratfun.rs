//! Rational functions in `t1, …, tn` over `Q`, kept as gcd-reduced
//! fractions with a monic denominator.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent vector, ordered graded-lexicographically (total degree
/// first, then the highest variable is most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, k: usize, e: u32) -> Self {
        let mut m = vec![0; n];
        m[k] = e;
        Monomial(m)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, o: &Self) -> Self {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, o: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over `Q` in a fixed number of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial::var(nvars, k, 1), BigRational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().is_some_and(|(m, c)| m.degree() == 0 && c.is_one())
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Highest variable index occurring, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.0.iter().rposition(|&e| e > 0)).max()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect() }
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(dm)?;
            let c = rc / dc;
            rem = rem.sub(&d.mul_term(&m, &c));
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Scaled so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.keys().map(|m| m.0[k]).max().unwrap_or(0)
    }

    /// Coefficients with respect to variable `k`, indexed by degree.
    fn coeffs_in(&self, k: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(self.nvars); self.degree_in(k) as usize + 1];
        for (m, c) in &self.terms {
            let mut mm = m.clone();
            let e = std::mem::replace(&mut mm.0[k], 0);
            out[e as usize].add_term(mm, c.clone());
        }
        out
    }

    fn content_in(&self, k: usize) -> Poly {
        self.coeffs_in(k)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Poly::zero(self.nvars), |g, c| gcd(&g, &c))
    }

    fn primitive_part_in(&self, k: usize) -> Poly {
        let c = self.content_in(k);
        self.div_exact(&c).expect("content divides").monic()
    }

    /// Pseudo-remainder of `self` by `b` with respect to variable `k`.
    fn pseudo_rem(&self, b: &Poly, k: usize) -> Poly {
        let db = b.degree_in(k);
        let lc = b.coeffs_in(k).pop().unwrap();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(k) >= db {
            let dr = r.degree_in(k);
            let lr = r.coeffs_in(k).pop().unwrap();
            let shift = Poly::from_terms(self.nvars, [(Monomial::var(self.nvars, k, dr - db), BigRational::one())]);
            r = lc.mul(&r).sub(&lr.mul(&shift).mul(b));
        }
        r
    }

    pub fn eval_format(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(k, &e)| if e == 1 { format!("t{}", k + 1) } else { format!("t{}^{e}", k + 1) })
                .collect::<Vec<_>>()
                .join("*");
            let abs = c.abs();
            let body = if mono.is_empty() {
                format_rational(&abs)
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{mono}", format_rational(&abs))
            };
            match (i, c.is_negative()) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

fn format_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Monic gcd of two polynomials (zero when both are zero), by recursive
/// primitive pseudo-remainder sequences.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let Some(k) = a.max_var().max(b.max_var()) else {
        return Poly::one(a.nvars);
    };
    if a.degree_in(k) == 0 {
        return gcd(a, &b.content_in(k));
    }
    if b.degree_in(k) == 0 {
        return gcd(&a.content_in(k), b);
    }
    let c = gcd(&a.content_in(k), &b.content_in(k));
    let mut pa = a.primitive_part_in(k);
    let mut pb = b.primitive_part_in(k);
    if pa.degree_in(k) < pb.degree_in(k) {
        std::mem::swap(&mut pa, &mut pb);
    }
    while !pb.is_zero() {
        let r = pa.pseudo_rem(&pb, k);
        pa = pb;
        pb = if r.is_zero() { r } else { r.primitive_part_in(k) };
    }
    c.mul(&pa.primitive_part_in(k)).monic()
}

/// A reduced fraction `num/den` with `den` monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = num.nvars;
        if num.is_zero() {
            return Ok(RatFun { num, den: Poly::one(n) });
        }
        let g = gcd(&num, &den);
        let num = num.div_exact(&g).expect("gcd divides numerator");
        let den = den.div_exact(&g).expect("gcd divides denominator");
        let lc = den.leading().unwrap().1.recip();
        Ok(RatFun { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars;
        RatFun { num: p, den: Poly::one(n) }
    }

    pub fn from_int(nvars: usize, k: i64) -> Self {
        RatFun::from_poly(Poly::constant(nvars, BigRational::from_integer(BigInt::from(k))))
    }

    pub fn from_rational(nvars: usize, c: BigRational) -> Self {
        RatFun::from_poly(Poly::constant(nvars, c))
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        RatFun::from_poly(Poly::var(nvars, k))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Number of leading variables the value depends on.
    pub fn var_level(&self) -> usize {
        self.num.max_var().max(self.den.max_var()).map_or(0, |k| k + 1)
    }

    pub fn add(&self, o: &RatFun) -> RatFun {
        if self.den == o.den {
            return RatFun::new(self.num.add(&o.num), self.den.clone()).unwrap();
        }
        RatFun::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den)).unwrap()
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFun) -> RatFun {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFun) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::from_poly(Poly::zero(self.num.nvars));
        }
        RatFun::new(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }

    pub fn inv(&self) -> Result<RatFun> {
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn format(&self) -> String {
        if self.den.is_one() {
            return self.num.eval_format();
        }
        let wrap_num = self.num.terms.len() > 1;
        let ds = self.den.eval_format();
        let wrap_den = self.den.terms.len() > 1 || ds.contains('*') || ds.contains('/');
        let ns = self.num.eval_format();
        format!(
            "{}/{}",
            if wrap_num { format!("({ns})") } else { ns },
            if wrap_den { format!("({ds})") } else { ds }
        )
    }
}
