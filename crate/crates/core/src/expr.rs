//! A small operator-expression language.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (factor | '*' factor)*
//! factor   := atom [''']
//!           | rational ['*' factor]
//!           | '(' expr ')' [''']
//! atom     := 'c(' int ')' | 'a(' int ')' | 'I'
//! rational := int ['/' int]
//! int      := ['-'] digits
//! ```
//!
//! `c(i)` is the creator at `i`, `a(i)` the annihilator, `'` the adjoint.
//! Juxtaposition is a left-associative product and binds like `*`; the
//! adjoint binds tighter. A bare rational stands for that multiple of `I`.
//! A juxtaposed factor never starts with `-`, so `c(1) -2*c(0)` is a
//! difference. `·` and `−` are accepted for `*` and `-`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{BasisIndex, Element, Index, Letter, LetterWord};
use crate::scalar::{format_scalar, Scalar};
use crate::wick::{adjoint, multiply, normalize_combination, RewriteTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("zero denominator at byte {offset}")]
    ZeroDenominator { offset: usize },
    #[error("index out of range at byte {offset}")]
    IndexOutOfRange { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::ZeroDenominator { offset }
            | ParseError::IndexOutOfRange { offset } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprAst {
    Scalar(Scalar),
    Creator(Index),
    Annihilator(Index),
    Identity,
    Sum(Box<ExprAst>, Box<ExprAst>),
    Difference(Box<ExprAst>, Box<ExprAst>),
    Product(Box<ExprAst>, Box<ExprAst>),
    ScalarMultiple(Scalar, Box<ExprAst>),
    Adjoint(Box<ExprAst>),
    Group(Box<ExprAst>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Digits(&'a str),
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
    Prime,
    Creator,
    Annihilator,
    Identity,
    End,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Digits(d) => return write!(f, "`{d}`"),
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Open => "`(`",
            Tok::Close => "`)`",
            Tok::Prime => "`'`",
            Tok::Creator => "`c`",
            Tok::Annihilator => "`a`",
            Tok::Identity => "`I`",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

struct Token<'a> {
    tok: Tok<'a>,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token<'_>>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some((offset, ch)) = chars.next() {
        let tok = match ch {
            c if c.is_whitespace() => continue,
            '0'..='9' => {
                let mut end = offset + 1;
                while let Some(&(i, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = i + 1;
                    chars.next();
                }
                Tok::Digits(&src[offset..end])
            }
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::Open,
            ')' => Tok::Close,
            '\'' => Tok::Prime,
            'c' => Tok::Creator,
            'a' => Tok::Annihilator,
            'I' => Tok::Identity,
            other => {
                return Err(ParseError::Syntax {
                    offset,
                    expected: vec!["operator", "factor"],
                    found: format!("`{other}`"),
                })
            }
        };
        out.push(Token { tok, offset });
    }
    out.push(Token {
        tok: Tok::End,
        offset: src.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

const FACTOR_START: &[&str] = &["`c(`", "`a(`", "`I`", "`(`", "rational"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok<'a> {
        &self.tokens[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].offset
    }

    fn bump(&mut self) -> &Token<'a> {
        let t = &self.tokens[self.pos];
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok<'static>, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn signed_digits(&mut self) -> Result<(bool, &'a str, usize), ParseError> {
        let start = self.offset();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Digits(d) => {
                self.bump();
                Ok((negative, d, start))
            }
            _ => Err(self.error(&["digits"])),
        }
    }

    fn big_int(&mut self) -> Result<(BigInt, usize), ParseError> {
        let (negative, digits, start) = self.signed_digits()?;
        let n: BigInt = digits.parse().expect("ascii digits");
        Ok((if negative { -n } else { n }, start))
    }

    fn index(&mut self) -> Result<Index, ParseError> {
        let (n, start) = self.big_int()?;
        Index::try_from(n).map_err(|_| ParseError::IndexOutOfRange { offset: start })
    }

    fn rational(&mut self) -> Result<Scalar, ParseError> {
        let (num, _) = self.big_int()?;
        if *self.peek() != Tok::Slash {
            return Ok(Scalar::from_integer(num));
        }
        self.bump();
        let (den, at) = self.big_int()?;
        if den.is_zero() {
            return Err(ParseError::ZeroDenominator { offset: at });
        }
        Ok(Scalar::new(num, den))
    }

    fn postfix(&mut self, inner: ExprAst) -> ExprAst {
        if *self.peek() == Tok::Prime {
            self.bump();
            ExprAst::Adjoint(Box::new(inner))
        } else {
            inner
        }
    }

    fn atom_index(&mut self) -> Result<Index, ParseError> {
        self.bump();
        self.expect(Tok::Open, "`(`")?;
        let i = self.index()?;
        self.expect(Tok::Close, "`)`")?;
        Ok(i)
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        match *self.peek() {
            Tok::Creator => {
                let i = self.atom_index()?;
                Ok(self.postfix(ExprAst::Creator(i)))
            }
            Tok::Annihilator => {
                let i = self.atom_index()?;
                Ok(self.postfix(ExprAst::Annihilator(i)))
            }
            Tok::Identity => {
                self.bump();
                Ok(self.postfix(ExprAst::Identity))
            }
            Tok::Open => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::Close, "`)`")?;
                Ok(self.postfix(ExprAst::Group(Box::new(inner))))
            }
            Tok::Minus | Tok::Digits(_) => {
                let q = self.rational()?;
                if *self.peek() == Tok::Star {
                    self.bump();
                    let f = self.factor()?;
                    Ok(ExprAst::ScalarMultiple(q, Box::new(f)))
                } else {
                    Ok(ExprAst::Scalar(q))
                }
            }
            _ => Err(self.error(FACTOR_START)),
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut left = self.factor()?;
        loop {
            let right = match self.peek() {
                Tok::Star => {
                    self.bump();
                    self.factor()?
                }
                Tok::Creator | Tok::Annihilator | Tok::Identity | Tok::Open | Tok::Digits(_) => {
                    self.factor()?
                }
                _ => break,
            };
            left = ExprAst::Product(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut left = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let right = self.term()?;
                    left = ExprAst::Sum(Box::new(left), Box::new(right));
                }
                Tok::Minus => {
                    self.bump();
                    let right = self.term()?;
                    left = ExprAst::Difference(Box::new(left), Box::new(right));
                }
                _ => return Ok(left),
            }
        }
    }
}

pub fn parse(src: &str) -> Result<ExprAst, ParseError> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
    };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`+`", "`-`", "`*`", "factor", "end of input"]));
    }
    Ok(ast)
}

/// Evaluates bottom-up; every product is normalized immediately.
pub fn eval_ast(t: &ExprAst) -> Element {
    match t {
        ExprAst::Scalar(q) => Element::term(BasisIndex::identity(), q.clone()),
        ExprAst::Creator(i) => Element::basis(BasisIndex::creator(*i)),
        ExprAst::Annihilator(i) => Element::basis(BasisIndex::annihilator(*i)),
        ExprAst::Identity => Element::identity(),
        ExprAst::Sum(l, r) => eval_ast(l) + eval_ast(r),
        ExprAst::Difference(l, r) => eval_ast(l) - eval_ast(r),
        ExprAst::Product(l, r) => multiply(&eval_ast(l), &eval_ast(r)),
        ExprAst::ScalarMultiple(q, f) => eval_ast(f).scale(q),
        ExprAst::Adjoint(f) => adjoint(&eval_ast(f)),
        ExprAst::Group(e) => eval_ast(e),
    }
}

/// Smallest and largest generator index appearing in the expression.
pub fn index_span(t: &ExprAst) -> Option<(Index, Index)> {
    fn merge(a: Option<(Index, Index)>, b: Option<(Index, Index)>) -> Option<(Index, Index)> {
        match (a, b) {
            (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
            (x, None) | (None, x) => x,
        }
    }
    match t {
        ExprAst::Scalar(_) | ExprAst::Identity => None,
        ExprAst::Creator(i) | ExprAst::Annihilator(i) => Some((*i, *i)),
        ExprAst::Sum(l, r) | ExprAst::Difference(l, r) | ExprAst::Product(l, r) => {
            merge(index_span(l), index_span(r))
        }
        ExprAst::ScalarMultiple(_, f) | ExprAst::Adjoint(f) | ExprAst::Group(f) => index_span(f),
    }
}

/// Expands the expression into a formal combination of raw words without
/// normalizing.
pub fn expand_words(t: &ExprAst) -> Vec<(LetterWord, Scalar)> {
    match t {
        ExprAst::Scalar(q) => vec![(LetterWord::empty(), q.clone())],
        ExprAst::Creator(i) => vec![(LetterWord::new(vec![Letter::creator(*i)]), Scalar::from_integer(1.into()))],
        ExprAst::Annihilator(i) => {
            vec![(LetterWord::new(vec![Letter::annihilator(*i)]), Scalar::from_integer(1.into()))]
        }
        ExprAst::Identity => vec![(LetterWord::empty(), Scalar::from_integer(1.into()))],
        ExprAst::Sum(l, r) => {
            let mut out = expand_words(l);
            out.extend(expand_words(r));
            out
        }
        ExprAst::Difference(l, r) => {
            let mut out = expand_words(l);
            out.extend(expand_words(r).into_iter().map(|(w, c)| (w, -c)));
            out
        }
        ExprAst::Product(l, r) => {
            let right = expand_words(r);
            let mut out = Vec::new();
            for (w1, c1) in expand_words(l) {
                for (w2, c2) in &right {
                    out.push((w1.concat(w2), &c1 * c2));
                }
            }
            out
        }
        ExprAst::ScalarMultiple(q, f) => expand_words(f)
            .into_iter()
            .map(|(w, c)| (w, c * q))
            .collect(),
        ExprAst::Adjoint(f) => expand_words(f)
            .into_iter()
            .map(|(w, c)| (w.adjoint(), c))
            .collect(),
        ExprAst::Group(e) => expand_words(e),
    }
}

/// Expands to raw words and normalizes them in a single recorded run.
pub fn eval_ast_traced(t: &ExprAst) -> (Element, RewriteTrace) {
    let mut trace = RewriteTrace::default();
    let x = normalize_combination(expand_words(t), Some(&mut trace));
    (x, trace)
}

/// JSON document printed by `normalize --json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizeReport {
    pub input: String,
    pub result: Element,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<RewriteTrace>,
}

impl NormalizeReport {
    pub fn new(src: &str, with_trace: bool) -> Result<Self, ParseError> {
        let ast = parse(src)?;
        let (result, trace) = if with_trace {
            let (x, t) = eval_ast_traced(&ast);
            (x, Some(t))
        } else {
            (eval_ast(&ast), None)
        };
        Ok(NormalizeReport {
            input: src.to_string(),
            result,
            trace,
        })
    }
}

pub fn parse_element(src: &str) -> Result<Element, ParseError> {
    parse(src).map(|t| eval_ast(&t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Text: `1·c(1)a(2) − 1·c(1)c(3)a(3)a(2)` in canonical term order, `0` for
/// the zero element. Json: the `{"terms":[...]}` schema.
pub fn format_element(x: &Element, mode: OutputFormat) -> String {
    match mode {
        OutputFormat::Json => serde_json::to_string(x).expect("element serializes"),
        OutputFormat::Text => {
            if x.is_zero() {
                return "0".to_string();
            }
            let mut out = String::new();
            for (n, (b, c)) in x.iter().enumerate() {
                let negative = c.is_negative();
                match (n, negative) {
                    (0, false) => {}
                    (0, true) => out.push('−'),
                    (_, false) => out.push_str(" + "),
                    (_, true) => out.push_str(" − "),
                }
                out.push_str(&format_scalar(&c.abs()));
                out.push('·');
                out.push_str(&b.to_string());
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn ev(s: &str) -> Element {
        parse_element(s).unwrap()
    }

    #[test]
    fn adjoint_of_annihilator() {
        let t = parse("a(3)' ").unwrap();
        assert_eq!(t, ExprAst::Adjoint(Box::new(ExprAst::Annihilator(3))));
        assert_eq!(eval_ast(&t), Element::basis(BasisIndex::creator(3)));
    }

    #[test]
    fn juxtaposed_product() {
        let x = ev("c(1) a(3) c(3) a(2)");
        assert_eq!(format_element(&x, OutputFormat::Text), "1·c(1)a(2) − 1·c(1)c(3)a(3)a(2)");
        assert_eq!(x, ev("c(1)*a(3)*c(3)*a(2)"));
    }

    #[test]
    fn zero_denominator() {
        assert_eq!(parse("2/0 * I"), Err(ParseError::ZeroDenominator { offset: 2 }));
    }

    #[test]
    fn number_split() {
        assert_eq!(
            format_element(&ev("c(3)*a(3)"), OutputFormat::Text),
            "1·a(2)c(2) − 1·a(3)c(3)"
        );
    }

    #[test]
    fn formatting_edge_cases() {
        assert_eq!(format_element(&Element::zero(), OutputFormat::Text), "0");
        assert_eq!(format_element(&ev("I"), OutputFormat::Text), "1·I");
        assert_eq!(format_element(&ev("-2/3*c(1)"), OutputFormat::Text), "−2/3·c(1)");
        assert_eq!(ev("0"), Element::zero());
        assert_eq!(ev("−2/3·c(1)"), ev("-2/3*c(1)"));
    }

    #[test]
    fn sign_handling() {
        assert_eq!(ev("c(1) -2*c(0)"), ev("c(1) - 2*c(0)"));
        assert_eq!(ev("c(1) - -2*c(0)"), ev("c(1) + 2*c(0)"));
        assert_eq!(ev("2 c(1)"), ev("2*c(1)"));
    }

    #[test]
    fn squared_counterexample_element() {
        let z = ev("(a(0) a(0)' + c(1))' * (a(0) a(0)' + c(1))");
        assert_eq!(
            format_element(&z, OutputFormat::Text),
            "1·a(1) + 1·c(1) + 1·a(0)c(0) + 1·a(1)c(1)"
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("c(1) + ") {
            Err(ParseError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 7);
                assert!(expected.contains(&"rational"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("c(1))"), Err(ParseError::Syntax { offset: 4, .. })));
        assert!(matches!(parse("c(x)"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("b(1)"), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(
            parse("c(99999999999999999999)"),
            Err(ParseError::IndexOutOfRange { offset: 2 })
        ));
        assert!(parse("a(1)''").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn traced_route_agrees() {
        let t = parse("(c(0) + 2*a(1)')' (a(2) c(2) - 1/2 * c(1) a(1))").unwrap();
        let (x, trace) = eval_ast_traced(&t);
        assert_eq!(x, eval_ast(&t));
        assert_eq!(trace.replay(), Some(x));
    }

    #[test]
    fn json_mode() {
        let x = ev("3*c(1)");
        assert_eq!(
            format_element(&x, OutputFormat::Json),
            r#"{"terms":[{"l1":[1],"l2":[],"coeff":"3"}]}"#
        );
        assert_eq!(x.coeff(&BasisIndex::creator(1)), int(3));
    }
}
