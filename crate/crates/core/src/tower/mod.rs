//! Exact arithmetic in a chain of fields `K_0 ⊆ K_1 ⊆ … ⊆ K_r`.
//!
//! Two backends sit behind [`Tower`]: finite fields `F_{p^{d_0}} ⊆ … ⊆
//! F_{p^{d_r}}` and rational function fields `Q(t1,…,ti)`. Elements are
//! stored in the top field's canonical form together with their least
//! level. A tower may be a *window* `K_a ⊆ … ⊆ K_b` of a larger chain;
//! levels are then reported relative to `K_a`.

mod expr;
mod finite;

pub use finite::rank_mod_p;
pub mod ratfun;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use finite::{Coords, FiniteField};
use ratfun::{Poly, RatFun};

/// Serialized description of a field chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TowerSpec {
    /// `F_{p^{d_0}} ⊆ … ⊆ F_{p^{d_r}}`, degrees a divisibility chain.
    FiniteField { p: u32, degrees: Vec<u32> },
    /// `Q ⊆ Q(t1) ⊆ … ⊆ Q(t1,…,tr)`; `levels` is `r`.
    RationalFunction { levels: usize },
    /// One field repeated `levels + 1` times: `F_p`, or `Q` when `p = 0`.
    Constant { p: u32, levels: usize },
}

impl TowerSpec {
    pub fn build(&self) -> Result<Tower> {
        Tower::new(self.clone())
    }

    pub fn level_count(&self) -> usize {
        match self {
            TowerSpec::FiniteField { degrees, .. } => degrees.len(),
            TowerSpec::RationalFunction { levels } | TowerSpec::Constant { levels, .. } => levels + 1,
        }
    }
}

#[derive(Debug)]
enum Backend {
    Finite(FiniteField),
    /// number of indeterminates present at each level
    Rational { vars: Vec<usize> },
}

#[derive(Debug)]
struct TowerData {
    spec: TowerSpec,
    backend: Backend,
}

/// A field chain, or a contiguous window of one. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Tower {
    data: Arc<TowerData>,
    offset: usize,
    levels: usize,
}

impl PartialEq for Tower {
    fn eq(&self, o: &Self) -> bool {
        self.offset == o.offset && self.levels == o.levels && self.data.spec == o.data.spec
    }
}

impl Eq for Tower {}

impl Hash for Tower {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.data.spec.hash(state);
        self.offset.hash(state);
        self.levels.hash(state);
    }
}

impl Tower {
    pub fn new(spec: TowerSpec) -> Result<Self> {
        let (backend, levels) = match &spec {
            TowerSpec::FiniteField { p, degrees } => {
                (Backend::Finite(FiniteField::new(*p, degrees.clone())?), degrees.len())
            }
            TowerSpec::RationalFunction { levels } => {
                (Backend::Rational { vars: (0..=*levels).collect() }, levels + 1)
            }
            TowerSpec::Constant { p: 0, levels } => (Backend::Rational { vars: vec![0; levels + 1] }, levels + 1),
            TowerSpec::Constant { p, levels } => {
                (Backend::Finite(FiniteField::new(*p, vec![1; levels + 1])?), levels + 1)
            }
        };
        Ok(Tower { data: Arc::new(TowerData { spec, backend }), offset: 0, levels })
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.data.spec
    }

    /// `r`: the index of the top level of this window.
    pub fn top(&self) -> usize {
        self.levels - 1
    }

    pub fn level_count(&self) -> usize {
        self.levels
    }

    /// `(first, last)` levels of this window inside the full chain, or
    /// `None` for the full chain.
    pub fn window_bounds(&self) -> Option<(usize, usize)> {
        let full = self.offset == 0 && self.levels == self.data.spec.level_count();
        (!full).then(|| (self.offset, self.offset + self.levels - 1))
    }

    /// The sub-chain `K_{from} ⊆ … ⊆ K_{to}` (window-relative indices).
    pub fn window(&self, from: usize, to: usize) -> Result<Tower> {
        if from > to || to > self.top() {
            return Err(Error::LevelOutOfRange(to));
        }
        Ok(Tower { data: self.data.clone(), offset: self.offset + from, levels: to - from + 1 })
    }

    pub fn is_finite_field(&self) -> bool {
        matches!(self.data.backend, Backend::Finite(_))
    }

    fn finite(&self) -> Option<&FiniteField> {
        match &self.data.backend {
            Backend::Finite(f) => Some(f),
            Backend::Rational { .. } => None,
        }
    }

    fn nvars(&self) -> usize {
        match &self.data.backend {
            Backend::Rational { vars } => *vars.last().unwrap(),
            Backend::Finite(_) => 0,
        }
    }

    /// Window-relative level from an absolute one.
    fn relative(&self, abs: usize) -> usize {
        abs.saturating_sub(self.offset)
    }

    fn make(&self, value: Value) -> TowerElement {
        let abs = match (&self.data.backend, &value) {
            (Backend::Finite(f), Value::Finite(c)) => f.min_level(c),
            (Backend::Rational { vars }, Value::Rational(r)) => {
                let k = r.var_level();
                vars.iter().position(|&n| n >= k).expect("value lives in the top field")
            }
            _ => unreachable!("value matches backend"),
        };
        TowerElement { tower: self.clone(), value, abs_level: abs }
    }

    pub fn zero(&self) -> TowerElement {
        self.from_int(0)
    }

    pub fn one(&self) -> TowerElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> TowerElement {
        match &self.data.backend {
            Backend::Finite(f) => self.make(Value::Finite(f.from_int(n))),
            Backend::Rational { .. } => self.make(Value::Rational(RatFun::from_int(self.nvars(), n))),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> TowerElement {
        match &self.data.backend {
            Backend::Finite(f) => {
                let p = BigInt::from(f.p);
                let r = ((n % &p) + &p) % &p;
                self.from_int(i64::try_from(r).expect("residue fits"))
            }
            Backend::Rational { .. } => self.make(Value::Rational(RatFun::from_rational(
                self.nvars(),
                BigRational::from_integer(n.clone()),
            ))),
        }
    }

    /// Generator of the top field over the prime field (`w`), finite
    /// towers only.
    pub fn w(&self) -> Result<TowerElement> {
        let f = self.finite().ok_or(Error::NeedsFiniteField)?;
        Ok(self.make(Value::Finite(f.x())))
    }

    /// The indeterminate `t_k` (1-based), rational towers only.
    pub fn t(&self, k: usize) -> Result<TowerElement> {
        let n = self.nvars();
        if self.is_finite_field() || k == 0 || k > n {
            return Err(Error::Parse(format!("no indeterminate t{k} in this tower")));
        }
        Ok(self.make(Value::Rational(RatFun::var(n, k - 1))))
    }

    /// An element of `K_level` lying outside `K_{level-1}` whenever that
    /// inclusion is strict (window-relative level).
    pub fn level_generator(&self, level: usize) -> Result<TowerElement> {
        let abs = self.offset + level;
        if level > self.top() {
            return Err(Error::LevelOutOfRange(level));
        }
        match &self.data.backend {
            Backend::Finite(f) => Ok(self.make(Value::Finite(f.sub_generators[abs].clone()))),
            Backend::Rational { vars } => {
                if vars[abs] == 0 {
                    Ok(self.one())
                } else {
                    self.t(vars[abs])
                }
            }
        }
    }

    /// `[K_level : K_0]` within this window, when finite.
    pub fn degree_over_base(&self, level: usize) -> Result<usize> {
        if level > self.top() {
            return Err(Error::LevelOutOfRange(level));
        }
        match &self.data.backend {
            Backend::Finite(f) => Ok((f.degrees[self.offset + level] / f.degrees[self.offset]) as usize),
            Backend::Rational { vars } => {
                if vars[self.offset + level] == vars[self.offset] {
                    Ok(1)
                } else {
                    Err(Error::InfiniteDimension)
                }
            }
        }
    }

    /// Re-tag an element of another window of the same chain into this one.
    pub fn retag(&self, a: &TowerElement) -> Result<TowerElement> {
        if a.tower.data.spec != self.data.spec {
            return Err(Error::TowerMismatch);
        }
        let max = self.offset + self.top();
        if a.abs_level > max {
            return Err(Error::LevelViolation {
                path: a.to_string(),
                coefficient_level: a.abs_level - self.offset,
                required_level: self.top(),
            });
        }
        Ok(TowerElement { tower: self.clone(), value: a.value.clone(), abs_level: a.abs_level })
    }

    /// Parse a coefficient expression (`w`-polynomials or `t1..tr`
    /// rational expressions with `+ - * / ^` and parentheses).
    pub fn parse(&self, text: &str) -> Result<TowerElement> {
        let a = expr::parse(self, text)?;
        if a.abs_level > self.offset + self.top() {
            return Err(Error::Parse(format!("{text:?} is outside the top field")));
        }
        Ok(a)
    }

    /// Uniform element of `K_level` (finite), or a small random rational
    /// function in the indeterminates of `K_level`.
    pub fn random_element<R: Rng + ?Sized>(&self, level: usize, rng: &mut R) -> TowerElement {
        let abs = self.offset + level.min(self.top());
        match &self.data.backend {
            Backend::Finite(f) => {
                let mut acc = f.zero();
                for b in f.sub_basis(abs) {
                    let k = rng.gen_range(0..f.p);
                    acc = f.add(&acc, &f.scale(&b, k));
                }
                self.make(Value::Finite(acc))
            }
            Backend::Rational { vars } => {
                let n = self.nvars();
                let k = vars[abs];
                let random_poly = |rng: &mut R, allow_zero: bool| loop {
                    let mut p = Poly::constant(n, BigRational::from_integer(rng.gen_range(-3i64..=3).into()));
                    for _ in 0..rng.gen_range(0..=2usize) {
                        if k == 0 {
                            break;
                        }
                        let mut m = vec![0u32; n];
                        m[rng.gen_range(0..k)] = rng.gen_range(1..=2);
                        let c = BigRational::from_integer(rng.gen_range(-2i64..=2).into());
                        p = p.add(&Poly::from_terms(n, [(monomial(m), c)]));
                    }
                    if allow_zero || !p.is_zero() {
                        break p;
                    }
                };
                let num = random_poly(rng, true);
                let den = if k > 0 && rng.gen_bool(0.2) { random_poly(rng, false) } else { Poly::one(n) };
                self.make(Value::Rational(RatFun::new(num, den).expect("nonzero denominator")))
            }
        }
    }

    /// `F_p`-basis of `K_level` (finite towers).
    pub fn prime_basis(&self, level: usize) -> Result<Vec<TowerElement>> {
        let f = self.finite().ok_or(Error::NeedsFiniteField)?;
        if level > self.top() {
            return Err(Error::LevelOutOfRange(level));
        }
        Ok(f.sub_basis(self.offset + level).into_iter().map(|c| self.make(Value::Finite(c))).collect())
    }

    /// Element with the given coordinates in the power basis of `w`.
    pub fn from_prime_coordinates(&self, coords: &[u32]) -> Result<TowerElement> {
        let f = self.finite().ok_or(Error::NeedsFiniteField)?;
        if coords.len() != f.d {
            return Err(Error::DimensionMismatch(format!("expected {} coordinates", f.d)));
        }
        Ok(self.make(Value::Finite(coords.iter().map(|&c| c % f.p).collect())))
    }

    /// Every element of `K_level` (finite towers, at most 4096 elements).
    pub fn enumerate_level(&self, level: usize) -> Result<Vec<TowerElement>> {
        let f = self.finite().ok_or(Error::NeedsFiniteField)?;
        if level > self.top() {
            return Err(Error::LevelOutOfRange(level));
        }
        let basis = f.sub_basis(self.offset + level);
        let count = (f.p as u128).pow(basis.len() as u32);
        if count > 4096 {
            return Err(Error::InvalidTower("subfield too large to enumerate".into()));
        }
        let mut out = vec![f.zero()];
        for b in &basis {
            out = out
                .iter()
                .flat_map(|a| (0..f.p).map(move |k| f.add(a, &f.scale(b, k))))
                .collect();
        }
        Ok(out.into_iter().map(|c| self.make(Value::Finite(c))).collect())
    }

    /// Whether `elems` are linearly independent over `K_level`.
    /// The empty family is independent.
    pub fn linear_independent_over(&self, elems: &[TowerElement], level: usize) -> Result<bool> {
        let rows: Vec<Vec<TowerElement>> = elems.iter().map(|e| vec![e.clone()]).collect();
        self.vectors_independent_over(&rows, level)
    }

    /// Whether the given vectors (equal length, entries in the top
    /// field) are linearly independent over `K_level`.
    pub fn vectors_independent_over(&self, rows: &[Vec<TowerElement>], level: usize) -> Result<bool> {
        if level > self.top() {
            return Err(Error::LevelOutOfRange(level));
        }
        if rows.is_empty() {
            return Ok(true);
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::DimensionMismatch("vectors of different lengths".into()));
        }
        for a in rows.iter().flatten() {
            self.check_same(a)?;
        }
        let abs = self.offset + level;
        match &self.data.backend {
            Backend::Finite(f) => {
                // K_level-independence of v_j ⇔ F_p-independence of {b_k v_j}
                let basis = f.sub_basis(abs);
                let mut mat = Vec::new();
                for row in rows {
                    for b in &basis {
                        let mut coords = Vec::with_capacity(width * f.d);
                        for a in row {
                            coords.extend(f.mul(b, a.finite_coords()));
                        }
                        mat.push(coords);
                    }
                }
                Ok(finite::rank_mod_p(mat, f.p) == rows.len() * basis.len())
            }
            Backend::Rational { vars } => {
                let k = vars[abs];
                let n = self.nvars();
                // clear denominators, then split each entry by monomials in
                // the variables beyond K_level; coefficients lie in K_level
                let mut den = Poly::one(n);
                for a in rows.iter().flatten() {
                    let d = a.rational().den();
                    let g = ratfun::gcd(&den, d);
                    den = den.mul(&d.div_exact(&g).expect("gcd divides"));
                }
                let mut columns: Vec<(usize, Vec<u32>)> = Vec::new();
                let mut split_rows: Vec<Vec<((usize, Vec<u32>), Poly)>> = Vec::new();
                for row in rows {
                    let mut parts: Vec<((usize, Vec<u32>), Poly)> = Vec::new();
                    for (j, a) in row.iter().enumerate() {
                        let r = a.rational();
                        let cleared = r.num().mul(&den.div_exact(r.den()).expect("common denominator"));
                        for (m, c) in cleared.terms() {
                            let e = m.exponents();
                            let outer = e[k..].to_vec();
                            let mut inner = e.to_vec();
                            inner[k..].iter_mut().for_each(|x| *x = 0);
                            let key = (j, outer);
                            let term = Poly::from_terms(n, [(monomial(inner), c.clone())]);
                            match parts.iter_mut().find(|(kk, _)| *kk == key) {
                                Some((_, p)) => *p = p.add(&term),
                                None => parts.push((key, term)),
                            }
                        }
                    }
                    for (key, _) in &parts {
                        if !columns.contains(key) {
                            columns.push(key.clone());
                        }
                    }
                    split_rows.push(parts);
                }
                let matrix: Vec<Vec<TowerElement>> = split_rows
                    .into_iter()
                    .map(|parts| {
                        columns
                            .iter()
                            .map(|key| match parts.iter().find(|(k, _)| k == key) {
                                Some((_, p)) => self.make(Value::Rational(RatFun::from_poly(p.clone()))),
                                None => self.zero(),
                            })
                            .collect()
                    })
                    .collect();
                Ok(rank(matrix) == rows.len())
            }
        }
    }

    fn check_same(&self, a: &TowerElement) -> Result<()> {
        if a.tower == *self {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }
}

fn monomial(e: Vec<u32>) -> ratfun::Monomial {
    ratfun::Monomial::from_exponents(e)
}

/// Rank by Gaussian elimination over the tower's top field.
pub fn rank(mut m: Vec<Vec<TowerElement>>) -> usize {
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        let pivot_row: Vec<TowerElement> = m[r].iter().map(|x| x * &inv).collect();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..ncols {
                    m[i][j] = &m[i][j] - &(&f * &pivot_row[j]);
                }
            }
        }
        m[r] = pivot_row;
        r += 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Finite(Coords),
    Rational(RatFun),
}

/// An exact element of a [`Tower`], with its least level cached.
#[derive(Clone)]
pub struct TowerElement {
    tower: Tower,
    value: Value,
    abs_level: usize,
}

impl PartialEq for TowerElement {
    fn eq(&self, o: &Self) -> bool {
        self.value == o.value && self.tower == o.tower
    }
}

impl Eq for TowerElement {}

impl Hash for TowerElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Finite(c) => write!(f, "{}", self.tower.finite().unwrap().format(c)),
            Value::Rational(r) => write!(f, "{}", r.format()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic.
pub fn arith(a: &TowerElement, b: &TowerElement, op: ArithOp) -> Result<TowerElement> {
    a.tower.check_same(b)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
    })
}

impl TowerElement {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// Least window-relative level containing this element.
    pub fn level(&self) -> usize {
        self.tower.relative(self.abs_level)
    }

    pub fn membership_at_level(&self, level: usize) -> bool {
        self.level() <= level
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Finite(c) => c.iter().all(|&x| x == 0),
            Value::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.tower.one()
    }

    fn finite_coords(&self) -> &Coords {
        match &self.value {
            Value::Finite(c) => c,
            Value::Rational(_) => panic!("not a finite-field element"),
        }
    }

    fn rational(&self) -> &RatFun {
        match &self.value {
            Value::Rational(r) => r,
            Value::Finite(_) => panic!("not a rational-function element"),
        }
    }

    /// Coordinates over the prime field in the power basis of `w`
    /// (finite towers only).
    pub fn prime_coordinates(&self) -> Option<&[u32]> {
        match &self.value {
            Value::Finite(c) => Some(c),
            Value::Rational(_) => None,
        }
    }

    pub fn inv(&self) -> Result<TowerElement> {
        let value = match &self.value {
            Value::Finite(c) => Value::Finite(self.tower.finite().unwrap().inv(c)?),
            Value::Rational(r) => Value::Rational(r.inv()?),
        };
        Ok(self.tower.make(value))
    }

    pub fn try_div(&self, o: &TowerElement) -> Result<TowerElement> {
        self.tower.check_same(o)?;
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: u32) -> TowerElement {
        (0..e).fold(self.tower.one(), |acc, _| &acc * self)
    }

    fn binop(&self, o: &TowerElement, fin: impl Fn(&FiniteField, &Coords, &Coords) -> Coords, rat: impl Fn(&RatFun, &RatFun) -> RatFun) -> TowerElement {
        assert!(self.tower == o.tower, "tower mismatch in arithmetic");
        let value = match (&self.value, &o.value) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(fin(self.tower.finite().unwrap(), a, b)),
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(rat(a, b)),
            _ => unreachable!(),
        };
        self.tower.make(value)
    }
}

impl Add for &TowerElement {
    type Output = TowerElement;
    fn add(self, o: &TowerElement) -> TowerElement {
        self.binop(o, |f, a, b| f.add(a, b), |a, b| a.add(b))
    }
}

impl Sub for &TowerElement {
    type Output = TowerElement;
    fn sub(self, o: &TowerElement) -> TowerElement {
        self.binop(o, |f, a, b| f.sub(a, b), |a, b| a.sub(b))
    }
}

impl Mul for &TowerElement {
    type Output = TowerElement;
    fn mul(self, o: &TowerElement) -> TowerElement {
        self.binop(o, |f, a, b| f.mul(a, b), |a, b| a.mul(b))
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        let value = match &self.value {
            Value::Finite(c) => Value::Finite(self.tower.finite().unwrap().neg(c)),
            Value::Rational(r) => Value::Rational(r.neg()),
        };
        TowerElement { tower: self.tower.clone(), value, abs_level: self.abs_level }
    }
}

#[cfg(test)]
mod tests;
