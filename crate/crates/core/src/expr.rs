//! The fractal expression language: decimal constants, the variables x and t,
//! fractal powers x^(k*a) with 'a' denoting the symbolic order α, the fractal
//! exponential E(k*x^a) = E_α(k·x^α), symbolic gamma ratios
//! G(k,j) = Γ(1+kα)/Γ(1+jα), sums, and products. The differentiator applies
//! the rule table
//! d^α x^{kα}/dx^α = (Γ(1+kα)/Γ(1+(k−1)α))·x^{(k−1)α} and
//! d^α E_α(kx^α)/dx^α = k·E_α(kx^α) and nothing else — there is no product,
//! quotient, or chain rule in this calculus.

use std::fmt;

use thiserror::Error;

use crate::numeric::{cst, to_f64, Real};
use crate::series::{FractalSeries, SeriesError};
use crate::special::{fractal_pow, gamma_ratio, ml, FractalOrder, SeriesControl, SpecialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parse error at byte {offset}: expected {}", expected.join(" | "))]
    Parse { offset: usize, expected: Vec<&'static str> },
    #[error("unsupported form: {0}")]
    UnsupportedForm(String),
    #[error("unbound variable '{var}'")]
    UnboundVariable { var: VarName },
    #[error("domain error: {reason}, got {value}")]
    Domain { reason: &'static str, value: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarName {
    X,
    T,
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarName::X => "x",
            VarName::T => "t",
        })
    }
}

/// Expression tree. Constructors may produce any shape; [`canonicalize`]
/// folds constants, flattens nests, and fixes the conventions the printer
/// and the round-trip guarantee rely on.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst<T> {
    Number(T),
    /// Γ(1+kα)/Γ(1+jα), kept symbolic until α is bound at evaluation.
    GammaRatio { k: u32, j: u32 },
    Var(VarName),
    /// var^(k·α); canonical only for k ≥ 1 (k = 0 folds to 1).
    Pow { var: VarName, k: u32 },
    /// E_α(scale·var^α).
    Ml { scale: T, var: VarName },
    Scale(T, Box<ExprAst<T>>),
    Product(Vec<ExprAst<T>>),
    Sum(Vec<ExprAst<T>>),
}

fn mk_scale<T: Real>(c: T, inner: ExprAst<T>) -> ExprAst<T> {
    if c == T::zero() {
        return ExprAst::Number(T::zero());
    }
    match inner {
        ExprAst::Number(v) => ExprAst::Number(c * v),
        ExprAst::Scale(d, f) => mk_scale(c * d, *f),
        ExprAst::Sum(items) => mk_sum(items.into_iter().map(|t| mk_scale(c, t)).collect()),
        other if c == T::one() => other,
        other => ExprAst::Scale(c, Box::new(other)),
    }
}

fn mk_product<T: Real>(factors: Vec<ExprAst<T>>) -> ExprAst<T> {
    let mut constant = T::one();
    let mut rest: Vec<ExprAst<T>> = Vec::new();
    let push = |node: ExprAst<T>, constant: &mut T, rest: &mut Vec<ExprAst<T>>| match node {
        ExprAst::Number(v) => *constant *= v,
        ExprAst::Product(inner) => rest.extend(inner),
        other => rest.push(other),
    };
    for factor in factors {
        match factor {
            ExprAst::Scale(d, f) => {
                constant *= d;
                push(*f, &mut constant, &mut rest);
            }
            other => push(other, &mut constant, &mut rest),
        }
    }
    if constant == T::zero() {
        return ExprAst::Number(T::zero());
    }
    match rest.len() {
        0 => ExprAst::Number(constant),
        1 => mk_scale(constant, rest.pop().expect("len checked")),
        _ => mk_scale(constant, ExprAst::Product(rest)),
    }
}

fn mk_sum<T: Real>(terms: Vec<ExprAst<T>>) -> ExprAst<T> {
    let mut out: Vec<ExprAst<T>> = Vec::new();
    let mut total = T::zero();
    let mut number_slot: Option<usize> = None;
    for term in terms {
        match term {
            ExprAst::Sum(inner) => {
                for t in inner {
                    match t {
                        ExprAst::Number(v) => {
                            number_slot.get_or_insert(out.len());
                            total += v;
                        }
                        other => out.push(other),
                    }
                }
            }
            ExprAst::Number(v) => {
                number_slot.get_or_insert(out.len());
                total += v;
            }
            other => out.push(other),
        }
    }
    if total != T::zero() {
        out.insert(number_slot.unwrap_or(out.len()), ExprAst::Number(total));
    }
    match out.len() {
        0 => ExprAst::Number(T::zero()),
        1 => out.pop().expect("len checked"),
        _ => ExprAst::Sum(out),
    }
}

/// Rewrites a tree into canonical form: constants folded, Scale never nested
/// or wrapping numbers/sums, products carry no constant factors, sums are
/// flat with at most one numeric term, x^(0·a) and E(0·x^a) fold to 1.
/// Idempotent; the parser and differentiator only emit canonical trees.
pub fn canonicalize<T: Real>(ast: ExprAst<T>) -> ExprAst<T> {
    match ast {
        ExprAst::Pow { k: 0, .. } => ExprAst::Number(T::one()),
        ExprAst::Ml { scale, .. } if scale == T::zero() => ExprAst::Number(T::one()),
        ExprAst::Scale(c, inner) => mk_scale(c, canonicalize(*inner)),
        ExprAst::Product(items) => mk_product(items.into_iter().map(canonicalize).collect()),
        ExprAst::Sum(items) => mk_sum(items.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

fn fmt_factor<T: Real>(node: &ExprAst<T>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if matches!(node, ExprAst::Sum(_)) {
        write!(f, "({node})")
    } else {
        write!(f, "{node}")
    }
}

impl<T: Real> fmt::Display for ExprAst<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Number(v) => write!(f, "{v}"),
            ExprAst::GammaRatio { k, j } => write!(f, "G({k},{j})"),
            ExprAst::Var(v) => write!(f, "{v}"),
            ExprAst::Pow { var, k } => write!(f, "{var}^({k}*a)"),
            ExprAst::Ml { scale, var } => {
                if *scale == T::one() {
                    write!(f, "E({var}^a)")
                } else if *scale == -T::one() {
                    write!(f, "E(-{var}^a)")
                } else if *scale < T::zero() {
                    write!(f, "E(-{}*{var}^a)", -*scale)
                } else {
                    write!(f, "E({scale}*{var}^a)")
                }
            }
            ExprAst::Scale(c, inner) => {
                if *c < T::zero() {
                    write!(f, "-")?;
                    return fmt::Display::fmt(&mk_scale(-*c, (**inner).clone()), f);
                }
                write!(f, "{c}*")?;
                fmt_factor(inner, f)
            }
            ExprAst::Product(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    fmt_factor(item, f)?;
                }
                Ok(())
            }
            ExprAst::Sum(items) => {
                for (i, item) in items.iter().enumerate() {
                    let (negative, magnitude) = match item {
                        ExprAst::Number(v) if *v < T::zero() => (true, ExprAst::Number(-*v)),
                        ExprAst::Scale(c, inner) if *c < T::zero() => {
                            (true, mk_scale(-*c, (**inner).clone()))
                        }
                        other => (false, other.clone()),
                    };
                    match (i, negative) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    write!(f, "{magnitude}")?;
                }
                Ok(())
            }
        }
    }
}

const EXPECTED_FACTOR: [&str; 7] = ["number", "'x'", "'t'", "'E'", "'G'", "'('", "'-'"];
const EXPECTED_AFTER_TERM: [&str; 4] = ["'+'", "'-'", "'*'", "end of input"];

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { bytes: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail<V>(&mut self, expected: &[&'static str]) -> Result<V, ExprError> {
        self.skip_ws();
        Err(ExprError::Parse { offset: self.pos, expected: expected.to_vec() })
    }

    fn expect(&mut self, b: u8, expected: &'static str) -> Result<(), ExprError> {
        if self.eat(b) {
            Ok(())
        } else {
            self.fail(&[expected])
        }
    }

    /// Decimal literal: digits, optional fraction, optional e/E exponent. The
    /// exponent marker is consumed only when a digit (or sign + digit)
    /// follows, so "2E(" lexes as the number 2 before the symbol E.
    fn lex_number<T: Real>(&mut self) -> Result<T, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos + 1 < self.bytes.len()
            && self.bytes[self.pos] == b'.'
            && self.bytes[self.pos + 1].is_ascii_digit()
        {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.bytes.len() && (self.bytes[self.pos] | 0x20) == b'e' {
            let after_sign = match self.bytes.get(self.pos + 1) {
                Some(b'+') | Some(b'-') => self.pos + 2,
                _ => self.pos + 1,
            };
            if self.bytes.get(after_sign).is_some_and(|b| b.is_ascii_digit()) {
                self.pos = after_sign;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value: f64 = text.parse().map_err(|_| ExprError::Parse {
            offset: start,
            expected: vec!["number"],
        })?;
        if !value.is_finite() {
            return Err(ExprError::Parse { offset: start, expected: vec!["finite number"] });
        }
        Ok(cst(value))
    }

    fn lex_u32(&mut self) -> Result<u32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| ExprError::Parse { offset: start, expected: vec!["integer"] })
    }

    fn var(&mut self) -> Option<VarName> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Some(VarName::X)
            }
            Some(b't') => {
                self.pos += 1;
                Some(VarName::T)
            }
            _ => None,
        }
    }

    /// '(' [NUMBER '*'] 'a' ')' after a '^'; the multiplier must be a
    /// nonnegative integer (the basis is {x^{kα}, k ∈ ℕ}).
    fn exponent<T: Real>(&mut self) -> Result<u32, ExprError> {
        self.expect(b'(', "'('")?;
        let k = match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                self.skip_ws();
                let num_start = self.pos;
                let value: T = self.lex_number()?;
                let as_f64 = to_f64(value);
                if as_f64.fract() != 0.0 || as_f64 < 0.0 || as_f64 > u32::MAX as f64 {
                    return Err(ExprError::Parse {
                        offset: num_start,
                        expected: vec!["nonnegative integer"],
                    });
                }
                self.expect(b'*', "'*'")?;
                self.expect(b'a', "'a'")?;
                as_f64 as u32
            }
            Some(b'a') => {
                self.pos += 1;
                1
            }
            _ => return self.fail(&["number", "'a'"]),
        };
        self.expect(b')', "')'")?;
        Ok(k)
    }

    /// 'E' '(' ['-'] [NUMBER '*'] VAR '^' 'a' ')'
    fn ml_call<T: Real>(&mut self) -> Result<ExprAst<T>, ExprError> {
        self.expect(b'(', "'('")?;
        let negative = self.eat(b'-');
        let scale: T = match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                let v = self.lex_number()?;
                self.expect(b'*', "'*'")?;
                v
            }
            _ => T::one(),
        };
        let var = match self.var() {
            Some(v) => v,
            None => return self.fail(&["number", "'x'", "'t'"]),
        };
        self.expect(b'^', "'^'")?;
        self.expect(b'a', "'a'")?;
        self.expect(b')', "')'")?;
        let scale = if negative { -scale } else { scale };
        Ok(canonicalize(ExprAst::Ml { scale, var }))
    }

    /// 'G' '(' INT ',' INT ')'
    fn gamma_call<T: Real>(&mut self) -> Result<ExprAst<T>, ExprError> {
        self.expect(b'(', "'('")?;
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {}
            _ => return self.fail(&["integer"]),
        }
        let k = self.lex_u32()?;
        self.expect(b',', "','")?;
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {}
            _ => return self.fail(&["integer"]),
        }
        let j = self.lex_u32()?;
        self.expect(b')', "')'")?;
        Ok(ExprAst::GammaRatio { k, j })
    }

    fn factor<T: Real>(&mut self) -> Result<ExprAst<T>, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(mk_scale(-T::one(), inner))
            }
            Some(b) if b.is_ascii_digit() => self.lex_number().map(ExprAst::Number),
            Some(b'E') => {
                self.pos += 1;
                self.ml_call()
            }
            Some(b'G') => {
                self.pos += 1;
                self.gamma_call()
            }
            Some(b'x') | Some(b't') => {
                let var = self.var().expect("peeked");
                if self.eat(b'^') {
                    let k = self.exponent::<T>()?;
                    Ok(canonicalize(ExprAst::Pow { var, k }))
                } else {
                    Ok(ExprAst::Var(var))
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.eat(b')') {
                    Ok(inner)
                } else {
                    self.fail(&["'+'", "'-'", "'*'", "')'"])
                }
            }
            _ => self.fail(&EXPECTED_FACTOR),
        }
    }

    fn term<T: Real>(&mut self) -> Result<ExprAst<T>, ExprError> {
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        Ok(mk_product(factors))
    }

    fn expr<T: Real>(&mut self) -> Result<ExprAst<T>, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(mk_scale(-T::one(), t));
            } else {
                break;
            }
        }
        Ok(mk_sum(terms))
    }
}

/// Parses the expression grammar
/// `expr := term (('+'|'-') term)*; term := factor ('*' factor)*;`
/// `factor := '-' factor | NUMBER | G(INT,INT) | VAR ['^' '(' [NUMBER '*'] 'a' ')']`
/// `| 'E' '(' ['-'] [NUMBER '*'] VAR '^' 'a' ')' | '(' expr ')'`
/// (whitespace insensitive) into a canonical tree that round-trips through
/// the printer.
pub fn parse<T: Real>(text: &str) -> Result<ExprAst<T>, ExprError> {
    let mut p = Parser::new(text);
    let ast = p.expr()?;
    if p.peek().is_some() {
        return p.fail(&EXPECTED_AFTER_TERM);
    }
    Ok(ast)
}

fn is_constant<T: Real>(ast: &ExprAst<T>) -> bool {
    match ast {
        ExprAst::Number(_) | ExprAst::GammaRatio { .. } => true,
        ExprAst::Var(_) | ExprAst::Pow { .. } | ExprAst::Ml { .. } => false,
        ExprAst::Scale(_, inner) => is_constant(inner),
        ExprAst::Product(items) | ExprAst::Sum(items) => items.iter().all(is_constant),
    }
}

/// Applies the rule table once: constants → 0, x^(k·a) → G(k,k−1)·x^((k−1)·a),
/// E(k·v^a) → k·E(k·v^a), linearity over sums and scalings. Gamma ratios stay
/// symbolic so repeated differentiation composes exactly; α enters only at
/// evaluation. Products of two or more non-constant factors and bare
/// variables are outside the table and error.
pub fn diff_ast<T: Real>(ast: &ExprAst<T>) -> Result<ExprAst<T>, ExprError> {
    match ast {
        ExprAst::Number(_) | ExprAst::GammaRatio { .. } => Ok(ExprAst::Number(T::zero())),
        ExprAst::Var(v) => Err(ExprError::UnsupportedForm(format!(
            "bare variable '{v}' is outside the fractal basis; only {v}^(k*a) powers differentiate"
        ))),
        ExprAst::Pow { var, k } => Ok(canonicalize(ExprAst::Product(vec![
            ExprAst::GammaRatio { k: *k, j: *k - 1 },
            ExprAst::Pow { var: *var, k: *k - 1 },
        ]))),
        ExprAst::Ml { scale, var } => {
            Ok(mk_scale(*scale, ExprAst::Ml { scale: *scale, var: *var }))
        }
        ExprAst::Scale(c, inner) => Ok(mk_scale(*c, diff_ast(inner)?)),
        ExprAst::Sum(items) => {
            let parts = items.iter().map(diff_ast).collect::<Result<Vec<_>, _>>()?;
            Ok(mk_sum(parts))
        }
        ExprAst::Product(items) => {
            let live: Vec<usize> = (0..items.len()).filter(|&i| !is_constant(&items[i])).collect();
            match live.as_slice() {
                [] => Ok(ExprAst::Number(T::zero())),
                [only] => {
                    let mut factors = items.clone();
                    factors[*only] = diff_ast(&items[*only])?;
                    Ok(mk_product(factors))
                }
                _ => Err(ExprError::UnsupportedForm(format!(
                    "no product rule for '{ast}'; only a single non-constant factor differentiates"
                ))),
            }
        }
    }
}

/// Values for the variables an expression may mention.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<T> {
    pub x: Option<T>,
    pub t: Option<T>,
}

impl<T> Default for Bindings<T> {
    fn default() -> Self {
        Self { x: None, t: None }
    }
}

impl<T: Real> Bindings<T> {
    pub fn x(value: T) -> Self {
        Self { x: Some(value), t: None }
    }

    pub fn t(value: T) -> Self {
        Self { x: None, t: Some(value) }
    }

    fn get(&self, var: VarName) -> Option<T> {
        match var {
            VarName::X => self.x,
            VarName::T => self.t,
        }
    }

    fn validate(&self) -> Result<(), ExprError> {
        for v in [self.x, self.t].into_iter().flatten() {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(ExprError::Domain { reason: "bindings must be finite and >= 0", value: to_f64(v) });
            }
        }
        Ok(())
    }
}

/// Evaluates with α bound: powers via fractal_pow, E via the Mittag-Leffler
/// series, gamma ratios via Γ(1+kα)/Γ(1+jα).
pub fn eval_ast<T: Real>(
    ast: &ExprAst<T>,
    bindings: &Bindings<T>,
    order: FractalOrder<T>,
) -> Result<T, ExprError> {
    bindings.validate()?;
    eval_inner(ast, bindings, order)
}

fn eval_inner<T: Real>(
    ast: &ExprAst<T>,
    bindings: &Bindings<T>,
    order: FractalOrder<T>,
) -> Result<T, ExprError> {
    let alpha = order.alpha();
    match ast {
        ExprAst::Number(v) => Ok(*v),
        ExprAst::GammaRatio { k, j } => Ok(gamma_ratio(
            T::one() + cst::<T>(*k as f64) * alpha,
            T::one() + cst::<T>(*j as f64) * alpha,
        )),
        ExprAst::Var(v) => bindings.get(*v).ok_or(ExprError::UnboundVariable { var: *v }),
        ExprAst::Pow { var, k } => {
            let v = bindings.get(*var).ok_or(ExprError::UnboundVariable { var: *var })?;
            Ok(fractal_pow(v, cst::<T>(*k as f64) * alpha)?)
        }
        ExprAst::Ml { scale, var } => {
            let v = bindings.get(*var).ok_or(ExprError::UnboundVariable { var: *var })?;
            let w = *scale * fractal_pow(v, alpha)?;
            Ok(ml(order, w, SeriesControl::default())?.value)
        }
        ExprAst::Scale(c, inner) => Ok(*c * eval_inner(inner, bindings, order)?),
        ExprAst::Product(items) => {
            let mut acc = T::one();
            for item in items {
                acc *= eval_inner(item, bindings, order)?;
            }
            Ok(acc)
        }
        ExprAst::Sum(items) => {
            let mut acc = T::zero();
            for item in items {
                acc += eval_inner(item, bindings, order)?;
            }
            Ok(acc)
        }
    }
}

fn vars_used<T: Real>(ast: &ExprAst<T>, seen: &mut [bool; 2]) {
    match ast {
        ExprAst::Var(v) | ExprAst::Pow { var: v, .. } | ExprAst::Ml { var: v, .. } => {
            seen[matches!(v, VarName::T) as usize] = true;
        }
        ExprAst::Scale(_, inner) => vars_used(inner, seen),
        ExprAst::Product(items) | ExprAst::Sum(items) => {
            for item in items {
                vars_used(item, seen);
            }
        }
        ExprAst::Number(_) | ExprAst::GammaRatio { .. } => {}
    }
}

/// Lowers the expression to its fractal series about 0 in the single variable
/// it mentions: Pow(k) contributes a unit coefficient at index k (dropped if
/// k exceeds the degree), Ml(s) contributes s^j/Γ(1+jα) at every index, and
/// constants land at index 0. Bare variables and products of several
/// non-constant factors have no series in this basis.
pub fn to_series<T: Real>(
    ast: &ExprAst<T>,
    order: FractalOrder<T>,
    degree: usize,
) -> Result<FractalSeries<T>, ExprError> {
    let mut seen = [false; 2];
    vars_used(ast, &mut seen);
    if seen[0] && seen[1] {
        return Err(ExprError::UnsupportedForm(
            "series expansion needs a single variable, found both x and t".to_string(),
        ));
    }
    let mut coeffs = vec![T::zero(); degree + 1];
    accumulate(ast, T::one(), order, &mut coeffs)?;
    Ok(FractalSeries::new(order, T::zero(), coeffs)?)
}

fn accumulate<T: Real>(
    ast: &ExprAst<T>,
    mult: T,
    order: FractalOrder<T>,
    coeffs: &mut [T],
) -> Result<(), ExprError> {
    let alpha = order.alpha();
    match ast {
        ExprAst::Number(v) => coeffs[0] += mult * *v,
        ExprAst::GammaRatio { k, j } => {
            coeffs[0] += mult
                * gamma_ratio(
                    T::one() + cst::<T>(*k as f64) * alpha,
                    T::one() + cst::<T>(*j as f64) * alpha,
                )
        }
        ExprAst::Var(v) => {
            return Err(ExprError::UnsupportedForm(format!(
                "bare variable '{v}' is outside the fractal basis {{{v}^(k*a)}}"
            )))
        }
        ExprAst::Pow { k, .. } => {
            if (*k as usize) < coeffs.len() {
                coeffs[*k as usize] += mult;
            }
        }
        ExprAst::Ml { scale, .. } => {
            let mut power = T::one();
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c += mult * power / order.gamma_1p(j);
                power *= *scale;
            }
        }
        ExprAst::Scale(c, inner) => accumulate(inner, mult * *c, order, coeffs)?,
        ExprAst::Sum(items) => {
            for item in items {
                accumulate(item, mult, order, coeffs)?;
            }
        }
        ExprAst::Product(items) => {
            let mut constant = mult;
            let mut live: Option<&ExprAst<T>> = None;
            for item in items {
                if is_constant(item) {
                    constant *= eval_inner(item, &Bindings::default(), order)?;
                } else if live.is_none() {
                    live = Some(item);
                } else {
                    return Err(ExprError::UnsupportedForm(format!(
                        "no series for the product '{ast}'; only a single non-constant factor expands"
                    )));
                }
            }
            match live {
                Some(item) => accumulate(item, constant, order, coeffs)?,
                None => coeffs[0] += constant,
            }
        }
    }
    Ok(())
}
