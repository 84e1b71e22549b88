use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact complex rational.
pub type Scalar = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> Scalar {
    Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

pub fn integer(v: i64) -> Scalar {
    rational(v, 1)
}

pub fn imaginary_unit() -> Scalar {
    Complex::new(BigRational::zero(), BigRational::one())
}

/// Exact conversion of a finite float.
pub fn from_f64(v: f64) -> Scalar {
    let re = BigRational::from_float(v).unwrap_or_else(BigRational::zero);
    Complex::new(re, BigRational::zero())
}

pub fn from_complex64(v: Complex64) -> Scalar {
    Complex::new(from_f64(v.re).re, from_f64(v.im).re)
}

pub fn to_complex64(v: &Scalar) -> Complex64 {
    Complex64::new(v.re.to_f64().unwrap_or(f64::NAN), v.im.to_f64().unwrap_or(f64::NAN))
}

fn is_zero(v: &Scalar) -> bool {
    v.re.is_zero() && v.im.is_zero()
}

/// Multivariate polynomial in `x1..xn` with exact complex rational
/// coefficients, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        Self::monomial(n, vec![0; n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, integer(1))
    }

    /// The coordinate `x_{j+1}` (0-based `j`).
    pub fn var(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        Self::monomial(n, e, integer(1))
    }

    pub fn monomial(n: usize, exps: Vec<u32>, c: Scalar) -> Self {
        assert_eq!(exps.len(), n, "exponent length must equal the dimension");
        let mut p = Self::zero(n);
        p.add_term(exps, c);
        p
    }

    /// Linear form `Σ c_j x_j`.
    pub fn linear(coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub(crate) fn add_term(&mut self, exps: Vec<u32>, c: Scalar) {
        if is_zero(&c) {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect() }
    }

    /// `true` when no term involves `x_{j+1}`.
    pub fn independent_of(&self, j: usize) -> bool {
        self.terms.keys().all(|e| e[j] == 0)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if is_zero(c) {
            return Self::zero(self.n);
        }
        Self { n: self.n, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[j] -= 1;
            out.add_term(e2, c * integer(e[j] as i64));
        }
        out
    }

    /// `∂^α` for an exponent vector `α`.
    pub fn partial(&self, alpha: &[u32]) -> Self {
        let mut out = self.clone();
        for (j, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = out.derivative(j);
                if out.is_zero() {
                    return out;
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Replaces `x_j` by `subs[j]`; all substitutes share one dimension.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Self> {
        if subs.len() != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: subs.len() });
        }
        let target = subs.first().map_or(0, |p| p.n);
        if subs.iter().any(|p| p.n != target) {
            return Err(Error::invalid("substitutes must share one dimension"));
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &subs[j].pow(k);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    pub fn eval_exact(&self, x: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi;
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Float copy for repeated evaluation on grids.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), to_complex64(c))).collect() }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.compile().eval(x)
    }

    /// Parses the text format, e.g. `3/4*x1^2*x2 - (1/2+2i)*x3 + 0.25`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0, n };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("unexpected trailing input in {text:?}")));
        }
        Ok(p)
    }
}

/// Float polynomial for fast evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        // power table shared by all terms
        let top = self.terms.iter().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0) as usize;
        let mut pows = vec![1.0; x.len() * (top + 1)];
        for (j, &v) in x.iter().enumerate() {
            for k in 1..=top {
                pows[j * (top + 1) + k] = pows[j * (top + 1) + k - 1] * v;
            }
        }
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().enumerate().map(|(j, &k)| pows[j * (top + 1) + k as usize]).product::<f64>())
            .sum()
    }
}

impl CompiledPoly {
    /// Values on the tensor grid `axes[0] × axes[1] × …`, row-major with the
    /// last axis fastest. One axis is contracted at a time, which is far
    /// cheaper than pointwise evaluation for polynomials with many terms.
    pub fn eval_tensor_grid(&self, axes: &[Vec<f64>]) -> Vec<Complex64> {
        fn contract(terms: &[(Vec<u32>, Complex64)], axes: &[Vec<f64>], out: &mut Vec<Complex64>) {
            let Some((first, rest)) = axes.split_first() else {
                out.push(terms.iter().map(|(_, c)| c).sum());
                return;
            };
            for &x in first {
                let mut grouped: BTreeMap<&[u32], Complex64> = BTreeMap::new();
                for (e, c) in terms {
                    *grouped.entry(&e[1..]).or_default() += c * x.powi(e[0] as i32);
                }
                let reduced: Vec<(Vec<u32>, Complex64)> = grouped.into_iter().map(|(e, c)| (e.to_vec(), c)).collect();
                contract(&reduced, rest, out);
            }
        }
        let mut out = Vec::with_capacity(axes.iter().map(Vec::len).product());
        contract(&self.terms, axes, &mut out);
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "polynomial dimensions differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "polynomial dimensions differ");
        let mut out = Polynomial::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_scalar(c: &Scalar) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_rational(&c.re),
        (true, false) => format!("({}i)", fmt_rational(&c.im)),
        (false, false) => {
            let sign = if c.im.is_negative() { "-" } else { "+" };
            format!("({}{}{}i)", fmt_rational(&c.re), sign, fmt_rational(&c.im.abs()))
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.iter().sum::<u32>().cmp(&a.iter().sum::<u32>()).then(b.cmp(a)));
        for (t, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let negative_real = c.im.is_zero() && c.re.is_negative();
            let shown = if negative_real { -c.clone() } else { c.clone() };
            if t == 0 {
                if negative_real {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative_real { " - " } else { " + " })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { format!("x{}", j + 1) } else { format!("x{}^{k}", j + 1) })
                .collect();
            let unit = shown.im.is_zero() && shown.re.is_one();
            match (vars.is_empty(), unit) {
                (true, _) => write!(f, "{}", fmt_scalar(&shown))?,
                (false, true) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{}*{}", fmt_scalar(&shown), vars.join("*"))?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(BigRational),
    Imag,
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => (out.push(Token::Plus), i += 1).1,
            '-' => (out.push(Token::Minus), i += 1).1,
            '*' => (out.push(Token::Star), i += 1).1,
            '^' => (out.push(Token::Caret), i += 1).1,
            '(' => (out.push(Token::Open), i += 1).1,
            ')' => (out.push(Token::Close), i += 1).1,
            'i' => (out.push(Token::Imag), i += 1).1,
            'x' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let idx: usize = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse(format!("variable without index at offset {}", start - 1)))?;
                if idx == 0 {
                    return Err(Error::Parse("variables are numbered from x1".into()));
                }
                out.push(Token::Var(idx - 1));
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let mut value = parse_decimal(&chars[start..i].iter().collect::<String>())?;
                // a/b binds tighter than anything else
                if i < chars.len() && chars[i] == '/' {
                    let s = i + 1;
                    i = s;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let den: BigInt = chars[s..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad denominator at offset {s}")))?;
                    if den.is_zero() {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    value /= BigRational::from_integer(den);
                }
                out.push(Token::Number(value));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?} at offset {i}"))),
        }
    }
    Ok(out)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number {s:?}"));
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut negate = false;
        match self.peek() {
            Some(Token::Minus) => (negate = true, self.pos += 1).1,
            Some(Token::Plus) => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.next() {
                Some(Token::Number(k)) if k.is_integer() && !k.is_negative() => {
                    let k = k.to_integer().to_u32().ok_or_else(|| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(k));
                }
                _ => return Err(Error::Parse("exponent must be a non-negative integer".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.n;
        match self.next() {
            Some(Token::Number(v)) => {
                let mut c = Complex::new(v, BigRational::zero());
                if self.peek() == Some(&Token::Imag) {
                    self.pos += 1;
                    c = c * imaginary_unit();
                }
                Ok(Polynomial::constant(n, c))
            }
            Some(Token::Imag) => Ok(Polynomial::constant(n, imaginary_unit())),
            Some(Token::Var(j)) => {
                if j >= n {
                    return Err(Error::Parse(format!("variable x{} outside dimension {n}", j + 1)));
                }
                Ok(Polynomial::var(n, j))
            }
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}
