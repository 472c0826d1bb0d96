//! A small expression language for Hölder potentials evaluated at points of
//! the upper half-plane: variables `x` and `y`, arithmetic with the usual
//! precedence, and a fixed set of unary functions.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("unknown identifier {name:?} at byte {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }

    fn by_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(f64),
    /// 0 = x, 1 = y.
    Var(u8),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::Var(0) => x,
            Node::Var(_) => y,
            Node::Neg(a) => -a.eval(x, y),
            Node::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Node::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Node::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Node::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Node::Pow(a, b) => a.eval(x, y).powf(b.eval(x, y)),
            Node::Call(f, a) => f.apply(a.eval(x, y)),
        }
    }

    /// Collapse variable-free subtrees to constants.
    fn fold(self) -> Node {
        let fold2 =
            |a: Box<Node>, b: Box<Node>| -> (Box<Node>, Box<Node>) { (Box::new(a.fold()), Box::new(b.fold())) };
        let folded = match self {
            n @ (Node::Const(_) | Node::Var(_)) => n,
            Node::Neg(a) => Node::Neg(Box::new(a.fold())),
            Node::Add(a, b) => { let (a, b) = fold2(a, b); Node::Add(a, b) }
            Node::Sub(a, b) => { let (a, b) = fold2(a, b); Node::Sub(a, b) }
            Node::Mul(a, b) => { let (a, b) = fold2(a, b); Node::Mul(a, b) }
            Node::Div(a, b) => { let (a, b) = fold2(a, b); Node::Div(a, b) }
            Node::Pow(a, b) => { let (a, b) = fold2(a, b); Node::Pow(a, b) }
            Node::Call(f, a) => Node::Call(f, Box::new(a.fold())),
        };
        if folded.is_constant() {
            if let Node::Const(_) = folded {
                folded
            } else {
                Node::Const(folded.eval(0.0, 0.0))
            }
        } else {
            folded
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Node::Const(_) => true,
            Node::Var(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }
}

/// A parsed potential expression in the variables (x, y).
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.root.eval(x, y)
    }

    /// True when the expression uses neither variable.
    pub fn is_constant(&self) -> bool {
        self.root.is_constant()
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// Parse a potential expression; errors carry the byte offset of the
/// offending token.
pub fn parse_potential(src: &str) -> Result<Expr, ExprError> {
    let mut parser = Parser { src: src.as_bytes(), pos: 0 };
    parser.skip_ws();
    if parser.pos >= parser.src.len() {
        return Err(ExprError::ParseError { pos: 0, msg: "empty expression".into() });
    }
    let root = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(ExprError::ParseError {
            pos: parser.pos,
            msg: format!("unexpected trailing input starting at {:?}", parser.rest_preview()),
        });
    }
    Ok(Expr { root: root.fold(), source: src.to_string() })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn rest_preview(&self) -> String {
        let rest = &self.src[self.pos.min(self.src.len())..];
        String::from_utf8_lossy(&rest[..rest.len().min(8)]).into_owned()
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    /// Unary minus binds looser than `^`: -x^2 parses as -(x^2).
    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            // Right-associative: 2^3^2 = 2^(3^2). The exponent may carry
            // its own unary minus.
            let exponent = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(ExprError::ParseError {
                        pos: self.pos,
                        msg: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            _ => Err(ExprError::ParseError {
                pos: self.pos,
                msg: format!("expected a number, variable, function, or '(', found {:?}", self.rest_preview()),
            }),
        }
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // Exponent part: e/E with optional sign, only when digits follow.
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && matches!(self.src[probe], b'+' | b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        text.parse::<f64>().map(Node::Const).map_err(|_| ExprError::ParseError {
            pos: start,
            msg: format!("malformed number {text:?}"),
        })
    }

    fn identifier(&mut self) -> Result<Node, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        match name {
            "x" => return Ok(Node::Var(0)),
            "y" => return Ok(Node::Var(1)),
            _ => {}
        }
        if let Some(func) = Func::by_name(name) {
            if self.peek() != Some(b'(') {
                return Err(ExprError::ParseError {
                    pos: self.pos,
                    msg: format!("function {name} must be followed by '('"),
                });
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(ExprError::ParseError { pos: self.pos, msg: "expected ')'".into() });
            }
            self.pos += 1;
            return Ok(Node::Call(func, Box::new(arg)));
        }
        Err(ExprError::UnknownIdentifier { pos: start, name: name.to_string() })
    }
}
