//! Infix expressions over a fixed set of named variables.
//!
//! Grammar (standard precedence, `^` right-associative, no implicit
//! multiplication):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' unary)?
//! primary := number | constant | variable | function '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: `sin cos tan sinh cosh tanh exp log sqrt`. Constants: `pi`, `e`.
//! Derivatives are exact and returned as new expressions; the smart
//! constructors fold constants and drop `0`/`1` identities so results stay
//! readable (`d/dy (y*z)` prints as `z`).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

/// Evaluation hit a point outside the expression's domain.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct EvalError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

fn as_const(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

// simplifying constructors, not operator impls
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (as_const(&a), as_const(&b)) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => match b {
                Expr::Neg(inner) => Expr::Sub(Box::new(a), inner),
                b => Expr::Add(Box::new(a), Box::new(b)),
            },
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (as_const(&a), as_const(&b)) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ => match b {
                Expr::Neg(inner) => Expr::Add(Box::new(a), inner),
                b => Expr::Sub(Box::new(a), Box::new(b)),
            },
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (as_const(&a), as_const(&b)) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(0.0), _) => Expr::Const(0.0),
            (_, Some(0.0)) => Expr::Const(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            (Some(-1.0), _) => Expr::neg(b),
            (_, Some(-1.0)) => Expr::neg(a),
            // keep numeric factors on the left
            (None, Some(_)) => Expr::Mul(Box::new(b), Box::new(a)),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (as_const(&a), as_const(&b)) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (Some(0.0), _) => Expr::Const(0.0),
            (_, Some(1.0)) => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (as_const(&a), as_const(&b)) {
            (_, Some(0.0)) => Expr::Const(1.0),
            (_, Some(1.0)) => a,
            (Some(x), Some(y)) if (x > 0.0) || y.fract() == 0.0 => Expr::Const(x.powf(y)),
            _ => Expr::Pow(Box::new(a), Box::new(b)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(i) => *i == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    pub fn eval(&self, args: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => args[*i],
            Expr::Neg(a) => -a.eval(args)?,
            Expr::Add(a, b) => a.eval(args)? + b.eval(args)?,
            Expr::Sub(a, b) => a.eval(args)? - b.eval(args)?,
            Expr::Mul(a, b) => a.eval(args)? * b.eval(args)?,
            Expr::Div(a, b) => {
                let num = a.eval(args)?;
                let den = b.eval(args)?;
                if den == 0.0 {
                    return Err(EvalError("division by zero".into()));
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(args)?;
                let exp = b.eval(args)?;
                if exp.fract() == 0.0 && exp.abs() <= 64.0 {
                    if base == 0.0 && exp < 0.0 {
                        return Err(EvalError("zero raised to a negative power".into()));
                    }
                    base.powi(exp as i32)
                } else {
                    if base < 0.0 {
                        return Err(EvalError("negative base raised to a non-integer power".into()));
                    }
                    if base == 0.0 && exp < 0.0 {
                        return Err(EvalError("zero raised to a negative power".into()));
                    }
                    base.powf(exp)
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(args)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(EvalError(format!("log of non-positive value {x}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError(format!("sqrt of negative value {x}")));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError("non-finite value".into()))
        }
    }

    /// Exact partial derivative with respect to variable index `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        use Expr as E;
        match self {
            E::Const(_) => E::Const(0.0),
            E::Var(i) => E::Const(if *i == var { 1.0 } else { 0.0 }),
            E::Neg(a) => E::neg(a.derivative(var)),
            E::Add(a, b) => E::add(a.derivative(var), b.derivative(var)),
            E::Sub(a, b) => E::sub(a.derivative(var), b.derivative(var)),
            E::Mul(a, b) => E::add(E::mul(a.derivative(var), (**b).clone()), E::mul((**a).clone(), b.derivative(var))),
            E::Div(a, b) => E::div(
                E::sub(E::mul(a.derivative(var), (**b).clone()), E::mul((**a).clone(), b.derivative(var))),
                E::pow((**b).clone(), E::Const(2.0)),
            ),
            E::Pow(a, b) => {
                let base_dep = a.depends_on(var);
                let exp_dep = b.depends_on(var);
                match (base_dep, exp_dep) {
                    (false, false) => E::Const(0.0),
                    (true, false) => {
                        let reduced = match as_const(b) {
                            Some(c) => E::Const(c - 1.0),
                            None => E::sub((**b).clone(), E::Const(1.0)),
                        };
                        E::mul(E::mul((**b).clone(), E::pow((**a).clone(), reduced)), a.derivative(var))
                    }
                    (false, true) => E::mul(E::mul(self.clone(), E::call(Func::Log, (**a).clone())), b.derivative(var)),
                    (true, true) => E::mul(
                        self.clone(),
                        E::add(
                            E::mul(b.derivative(var), E::call(Func::Log, (**a).clone())),
                            E::div(E::mul((**b).clone(), a.derivative(var)), (**a).clone()),
                        ),
                    ),
                }
            }
            E::Call(f, a) => {
                let inner = a.derivative(var);
                let x = (**a).clone();
                let outer = match f {
                    Func::Sin => E::call(Func::Cos, x),
                    Func::Cos => E::neg(E::call(Func::Sin, x)),
                    Func::Tan => E::div(E::Const(1.0), E::pow(E::call(Func::Cos, x), E::Const(2.0))),
                    Func::Sinh => E::call(Func::Cosh, x),
                    Func::Cosh => E::call(Func::Sinh, x),
                    Func::Tanh => E::div(E::Const(1.0), E::pow(E::call(Func::Cosh, x), E::Const(2.0))),
                    Func::Exp => E::call(Func::Exp, x),
                    Func::Log => E::div(E::Const(1.0), x),
                    Func::Sqrt => E::div(E::Const(1.0), E::mul(E::Const(2.0), E::call(Func::Sqrt, x))),
                };
                match as_const(&inner) {
                    Some(0.0) => E::Const(0.0),
                    Some(1.0) => outer,
                    _ => match outer {
                        E::Div(n, d) if as_const(&n) == Some(1.0) => E::div(inner, *d),
                        outer => E::mul(outer, inner),
                    },
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Const(c) if *c < 0.0 => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool| -> fmt::Result {
            if parens {
                write!(f, "(")?;
                e.write(f, names)?;
                write!(f, ")")
            } else {
                e.write(f, names)
            }
        };
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "{}", names[*i]),
            Expr::Neg(a) => {
                write!(f, "-")?;
                child(f, a, a.precedence() < 3)
            }
            Expr::Add(a, b) => {
                child(f, a, false)?;
                write!(f, " + ")?;
                child(f, b, b.precedence() <= 1 || b.precedence() == 3)
            }
            Expr::Sub(a, b) => {
                child(f, a, false)?;
                write!(f, " - ")?;
                child(f, b, b.precedence() <= 1 || b.precedence() == 3)
            }
            Expr::Mul(a, b) => {
                child(f, a, a.precedence() < 2)?;
                write!(f, "*")?;
                child(f, b, b.precedence() <= 3)
            }
            Expr::Div(a, b) => {
                child(f, a, a.precedence() < 2)?;
                write!(f, "/")?;
                child(f, b, b.precedence() <= 3)
            }
            Expr::Pow(a, b) => {
                child(f, a, a.precedence() <= 4)?;
                write!(f, "^")?;
                child(f, b, b.precedence() < 4)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, names)?;
                write!(f, ")")
            }
        }
    }
}

/// A parsed expression together with its source text and variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    source: String,
    vars: Vec<String>,
    expr: Expr,
}

impl Formula {
    pub fn parse(text: &str, vars: &[&str]) -> Result<Formula, ParseError> {
        let expr = Parser::new(text, vars)?.parse_all()?;
        Ok(Formula { source: text.to_string(), vars: vars.iter().map(|s| s.to_string()).collect(), expr })
    }

    pub fn from_expr(expr: Expr, vars: &[&str]) -> Formula {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let source = Shown { expr: &expr, names: &vars }.to_string();
        Formula { source, vars, expr }
    }

    pub fn constant(c: f64, vars: &[&str]) -> Formula {
        Formula::from_expr(Expr::Const(c), vars)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_constant(&self) -> bool {
        (0..self.vars.len()).all(|i| !self.expr.depends_on(i))
    }

    pub fn eval(&self, args: &[f64]) -> Result<f64, EvalError> {
        debug_assert_eq!(args.len(), self.vars.len());
        self.expr.eval(args)
    }

    /// Exact partial derivative; panics if `var` is not one of this formula's variables.
    pub fn derivative(&self, var: &str) -> Formula {
        let idx = self
            .vars
            .iter()
            .position(|v| v == var)
            .unwrap_or_else(|| panic!("`{var}` is not a variable of this formula"));
        self.derivative_at(idx)
    }

    pub fn derivative_at(&self, idx: usize) -> Formula {
        let expr = self.expr.derivative(idx);
        let source = Shown { expr: &expr, names: &self.vars }.to_string();
        Formula { source, vars: self.vars.clone(), expr }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, &self.vars)
    }
}

struct Shown<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, self.names)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [&'a str],
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when followed by digits, so `2*e` and `2e` stay distinct
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit
                .parse()
                .map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number `{lit}`") })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = text[start..].chars().next().unwrap_or('?');
                    return Err(ParseError::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
                }
            };
            out.push((tok, start));
            i += 1;
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

impl<'a> Parser<'a> {
    fn new(text: &str, vars: &'a [&'a str]) -> Result<Self, ParseError> {
        Ok(Parser { tokens: tokenize(text)?, pos: 0, vars })
    }

    fn peek(&self) -> &(Tok, usize) {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn parse_all(mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        match self.peek() {
            (Tok::End, _) => Ok(e),
            (tok, offset) => Err(ParseError::Syntax {
                offset: *offset,
                message: match tok {
                    Tok::RParen => "unbalanced `)`".to_string(),
                    _ => "expected an operator".to_string(),
                },
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().0 {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Tok::Op('^') = self.peek().0 {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen(offset)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    let (next, at) = self.bump();
                    if next != Tok::LParen {
                        return Err(ParseError::Syntax { offset: at, message: format!("expected `(` after `{name}`") });
                    }
                    let arg = self.expr()?;
                    self.expect_rparen(at)?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(idx));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => Ok(Expr::Const(std::f64::consts::E)),
                    _ => Err(ParseError::UnknownIdentifier { name, offset }),
                }
            }
            Tok::End => Err(ParseError::Syntax { offset, message: "unexpected end of input".into() }),
            Tok::RParen => Err(ParseError::Syntax { offset, message: "unexpected `)`".into() }),
            Tok::Op(c) => Err(ParseError::Syntax { offset, message: format!("unexpected operator `{c}`") }),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        match self.bump() {
            (Tok::RParen, _) => Ok(()),
            (Tok::End, at) => {
                Err(ParseError::Syntax { offset: at, message: format!("missing `)` for `(` at byte {open}") })
            }
            (_, at) => Err(ParseError::Syntax { offset: at, message: "expected `)`".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const YZ: &[&str] = &["y", "z"];

    #[test]
    fn precedence_and_associativity() {
        let f = Formula::parse("2^3^2", YZ).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 512.0);
        let f = Formula::parse("-2^2", YZ).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), -4.0);
        let f = Formula::parse("1 - 2 - 3", YZ).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), -4.0);
        let f = Formula::parse("8 / 4 / 2", YZ).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 1.0);
        let f = Formula::parse("y + 2*z^2", YZ).unwrap();
        assert_eq!(f.eval(&[1.0, 3.0]).unwrap(), 19.0);
        let f = Formula::parse("2^-1", YZ).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 0.5);
        let f = Formula::parse("1.5e-3 * 2E2", YZ).unwrap();
        assert!((f.eval(&[0.0, 0.0]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn product_rule() {
        let f = Formula::parse("y*z", YZ).unwrap();
        assert_eq!(f.derivative("y").to_string(), "z");
        assert_eq!(f.derivative("z").to_string(), "y");
    }

    #[test]
    fn flat_field_has_zero_partials() {
        let f = Formula::parse("0", YZ).unwrap();
        assert_eq!(f.derivative("y").expr(), &Expr::Const(0.0));
        assert_eq!(f.derivative("z").expr(), &Expr::Const(0.0));
        assert!(f.is_constant());
    }

    #[test]
    fn textbook_derivatives() {
        let f = Formula::parse("sinh(y) + z^2", YZ).unwrap();
        assert_eq!(f.derivative("y").to_string(), "cosh(y)");
        assert_eq!(f.derivative("z").to_string(), "2*z");
    }

    #[test]
    fn derivative_display_reparses_to_same_values() {
        let f = Formula::parse("exp(y*z)/(1 + y^2) - log(2 + sin(z))^3", YZ).unwrap();
        for var in ["y", "z"] {
            let d = f.derivative(var);
            let again = Formula::parse(d.source(), YZ).unwrap();
            for &(y, z) in &[(0.3, -0.7), (1.1, 0.4), (-2.0, 2.5)] {
                let a = d.eval(&[y, z]).unwrap();
                let b = again.eval(&[y, z]).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{var}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        let err = Formula::parse("2y", YZ).unwrap_err();
        assert_eq!(err, ParseError::Syntax { offset: 1, message: "expected an operator".into() });
        let err = Formula::parse("(y)(z)", YZ).unwrap_err();
        assert_eq!(err.offset(), 3);
    }

    #[test]
    fn syntax_errors_carry_byte_offsets() {
        let err = Formula::parse("y*", YZ).unwrap_err();
        assert_eq!(err.offset(), 2);
        let err = Formula::parse("sin(y", YZ).unwrap_err();
        assert_eq!(err.offset(), 5);
        let err = Formula::parse("y $ z", YZ).unwrap_err();
        assert_eq!(err.offset(), 2);
        let err = Formula::parse("", YZ).unwrap_err();
        assert_eq!(err.offset(), 0);
    }

    #[test]
    fn unknown_identifiers() {
        let err = Formula::parse("x + y", YZ).unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { name: "x".into(), offset: 0 });
        let err = Formula::parse("y*w", YZ).unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { name: "w".into(), offset: 2 });
    }

    #[test]
    fn singular_points_are_errors() {
        let f = Formula::parse("1/y", YZ).unwrap();
        assert!(f.eval(&[0.0, 1.0]).is_err());
        let f = Formula::parse("log(z)", YZ).unwrap();
        assert!(f.eval(&[0.0, -1.0]).is_err());
        let f = Formula::parse("sqrt(y)", YZ).unwrap();
        assert!(f.eval(&[-1.0, 0.0]).is_err());
        let f = Formula::parse("y^0.5", YZ).unwrap();
        assert!(f.eval(&[-1.0, 0.0]).is_err());
        let f = Formula::parse("exp(y)", YZ).unwrap();
        assert!(f.eval(&[1000.0, 0.0]).is_err());
    }

    #[test]
    fn constants() {
        let f = Formula::parse("pi + e", YZ).unwrap();
        let want = std::f64::consts::PI + std::f64::consts::E;
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), want);
        let f = Formula::parse("2*e", YZ).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 2.0 * std::f64::consts::E);
    }
}
