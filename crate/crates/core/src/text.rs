//! The `.tea` text format.
//!
//! ```text
//! document   = { statement } ;
//! statement  = ( "event" | "clock" | "global" | "local" ) ident { "," ident } ";"
//!            | "init" pred ";"
//!            | "invariant" pred ";"
//!            | "trans" "{" [ ident { "," ident } ] "}" [ "when" pred ] [ "do" assign { "," assign } ] ";" ;
//! assign     = ident ":=" ( "0" | "true" | "false" ) ;
//! pred       = conj { "||" conj } ;
//! conj       = unary { "&&" unary } ;
//! unary      = "!" unary | "(" pred ")" | "true" | "false" | comparison | ident ;
//! comparison = term op int [ op int ]          (* x < 3,  x - y >= -2 *)
//!            | int op term op int ;            (* 3 < x <= 5 *)
//! term       = ident [ "-" ident ] ;
//! op         = "<" | "<=" | "=" | ">=" | ">" ;
//! ```
//!
//! `init` and `invariant` default to `true`; several occurrences are
//! conjoined. Comments run from `//` or `#` to the end of the line.

use std::fmt;

use crate::model::{Assigned, CmpOp, Ident, ModelError, PartialAssignment, Pred, Tea, Transition};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: {message}")]
    Semantic { line: usize, col: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    /// A constant with a fraction or decimal point; always rejected.
    Rational(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 17] = [
    ":=", "<=", ">=", "&&", "||", "<", ">", "=", "!", "(", ")", "{", "}", ",", ";", "-", "/",
];

fn lex(text: &str) -> Result<Vec<Token>, TextError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let at = |tok| Token { tok, line: ln + 1, col };
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
                break;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push(at(Tok::Ident(chars[start..i].iter().collect())));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let frac = match (chars.get(i), chars.get(i + 1)) {
                    (Some('.'), Some(d)) if d.is_ascii_digit() => true,
                    (Some('/'), Some(d)) if d.is_ascii_digit() => true,
                    _ => false,
                };
                if frac {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push(at(Tok::Rational(chars[start..i].iter().collect())));
                } else {
                    let v = digits.parse().map_err(|_| TextError::Syntax {
                        line: ln + 1,
                        col,
                        message: format!("constant {digits} is too large"),
                    })?;
                    out.push(at(Tok::Int(v)));
                }
            } else {
                let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
                let sym = SYMBOLS
                    .iter()
                    .find(|s| rest.starts_with(**s))
                    .ok_or_else(|| TextError::Syntax {
                        line: ln + 1,
                        col,
                        message: format!("unexpected character `{c}`"),
                    })?;
                out.push(at(Tok::Sym(sym)));
                i += sym.len();
            }
        }
    }
    Ok(out)
}

/// A parsed document, before names are checked. Equality ignores source
/// positions.
#[derive(Clone, Debug, Default)]
pub struct TeaDocument {
    pub events: Vec<Ident>,
    pub clocks: Vec<Ident>,
    pub globals: Vec<Ident>,
    pub locals: Vec<Ident>,
    pub init: Vec<Pred>,
    pub invariant: Vec<Pred>,
    pub transitions: Vec<TransitionDecl>,
    /// Source position of each transition, for error messages.
    positions: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionDecl {
    pub label: Vec<Ident>,
    pub guard: Pred,
    pub assign: Vec<(Ident, AssignValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssignValue {
    Int(i64),
    Bool(bool),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, TextError> {
        let (line, col) = self.here();
        Err(TextError::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), TextError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.error(format!("expected `{sym}`"))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<Ident, TextError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !is_keyword(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("expected an identifier"),
        }
    }

    fn int(&mut self) -> Result<i64, TextError> {
        let neg = self.eat("-");
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            Some(Tok::Rational(r)) => {
                let (line, col) = self.here();
                Err(TextError::Semantic {
                    line,
                    col,
                    message: format!("constant {r} is not an integer"),
                })
            }
            _ => self.error("expected an integer"),
        }
    }

    fn op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Some(Tok::Sym("<")) => CmpOp::Lt,
            Some(Tok::Sym("<=")) => CmpOp::Le,
            Some(Tok::Sym("=")) => CmpOp::Eq,
            Some(Tok::Sym(">=")) => CmpOp::Ge,
            Some(Tok::Sym(">")) => CmpOp::Gt,
            _ => return None,
        };
        self.pos += 1;
        Some(op)
    }

    fn ident_list(&mut self, until: &str) -> Result<Vec<Ident>, TextError> {
        let mut out = Vec::new();
        if self.eat(until) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat(until) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn pred(&mut self) -> Result<Pred, TextError> {
        let mut parts = vec![self.conj()?];
        while self.eat("||") {
            parts.push(self.conj()?);
        }
        Ok(Pred::or(parts))
    }

    fn conj(&mut self) -> Result<Pred, TextError> {
        let mut parts = vec![self.unary()?];
        while self.eat("&&") {
            parts.push(self.unary()?);
        }
        Ok(Pred::and(parts))
    }

    fn unary(&mut self) -> Result<Pred, TextError> {
        if self.eat("!") {
            return Ok(Pred::not(self.unary()?));
        }
        if self.eat("(") {
            let p = self.pred()?;
            self.expect(")")?;
            return Ok(p);
        }
        if self.keyword("true") {
            return Ok(Pred::True);
        }
        if self.keyword("false") {
            return Ok(Pred::False);
        }
        match self.peek() {
            Some(Tok::Int(_)) | Some(Tok::Rational(_)) | Some(Tok::Sym("-")) => {
                // int op term [op int]
                let lo = self.int()?;
                let Some(op1) = self.op() else {
                    return self.error("expected a comparison");
                };
                let (x, y) = self.term()?;
                let lower = atom(&x, &y, flip(op1), lo);
                match self.op() {
                    Some(op2) => {
                        let hi = self.int()?;
                        Ok(Pred::And(vec![lower, atom(&x, &y, op2, hi)]))
                    }
                    None => Ok(lower),
                }
            }
            Some(Tok::Ident(_)) => {
                let (x, y) = self.term()?;
                match self.op() {
                    Some(op) => Ok(atom(&x, &y, op, self.int()?)),
                    None if y.is_none() => Ok(Pred::Prop(x)),
                    None => self.error("expected a comparison"),
                }
            }
            _ => self.error("expected a predicate"),
        }
    }

    fn term(&mut self) -> Result<(Ident, Option<Ident>), TextError> {
        let x = self.ident()?;
        let y = if self.eat("-") { Some(self.ident()?) } else { None };
        Ok((x, y))
    }

    fn assign(&mut self) -> Result<(Ident, AssignValue), TextError> {
        let x = self.ident()?;
        self.expect(":=")?;
        let v = if self.keyword("true") {
            AssignValue::Bool(true)
        } else if self.keyword("false") {
            AssignValue::Bool(false)
        } else {
            AssignValue::Int(self.int()?)
        };
        Ok((x, v))
    }

    fn document(&mut self) -> Result<TeaDocument, TextError> {
        let mut doc = TeaDocument::default();
        while self.pos < self.toks.len() {
            if self.keyword("event") {
                doc.events.extend(self.ident_list(";")?);
            } else if self.keyword("clock") {
                doc.clocks.extend(self.ident_list(";")?);
            } else if self.keyword("global") {
                doc.globals.extend(self.ident_list(";")?);
            } else if self.keyword("local") {
                doc.locals.extend(self.ident_list(";")?);
            } else if self.keyword("init") {
                doc.init.push(self.pred()?);
                self.expect(";")?;
            } else if self.keyword("invariant") {
                doc.invariant.push(self.pred()?);
                self.expect(";")?;
            } else if matches!(self.peek(), Some(Tok::Ident(s)) if s == "trans") {
                let at = self.here();
                self.pos += 1;
                self.expect("{")?;
                let label = self.ident_list("}")?;
                let guard = if self.keyword("when") { self.pred()? } else { Pred::True };
                let mut assign = Vec::new();
                if self.keyword("do") {
                    assign.push(self.assign()?);
                    while self.eat(",") {
                        assign.push(self.assign()?);
                    }
                }
                self.expect(";")?;
                doc.transitions.push(TransitionDecl { label, guard, assign });
                doc.positions.push(at);
            } else {
                return self.error("expected a declaration, `init`, `invariant` or `trans`");
            }
        }
        Ok(doc)
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "event" | "clock" | "global" | "local" | "init" | "invariant" | "trans" | "when" | "do" | "true" | "false"
    )
}

fn flip(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Lt => CmpOp::Gt,
        CmpOp::Le => CmpOp::Ge,
        CmpOp::Eq => CmpOp::Eq,
        CmpOp::Ge => CmpOp::Le,
        CmpOp::Gt => CmpOp::Lt,
    }
}

fn atom(x: &str, y: &Option<Ident>, op: CmpOp, c: i64) -> Pred {
    match y {
        Some(y) => Pred::diff(x, y, op, c),
        None => Pred::clock(x, op, c),
    }
}

/// Parses a document without checking names.
pub fn parse_document(text: &str) -> Result<TeaDocument, TextError> {
    Parser {
        toks: lex(text)?,
        pos: 0,
    }
    .document()
}

/// Parses a single predicate.
pub fn parse_pred(text: &str) -> Result<Pred, TextError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let pred = p.pred()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected input after the predicate");
    }
    Ok(pred)
}

/// Parses and checks a document.
pub fn parse(text: &str) -> Result<Tea, TextError> {
    parse_document(text)?.to_tea()
}

impl TeaDocument {
    pub fn to_tea(&self) -> Result<Tea, TextError> {
        let mut transitions = Vec::new();
        for (k, t) in self.transitions.iter().enumerate() {
            let (line, col) = self.positions.get(k).copied().unwrap_or((0, 0));
            let mut assign = PartialAssignment::new();
            for (x, v) in &t.assign {
                let semantic = |message: String| TextError::Semantic { line, col, message };
                assign = match v {
                    AssignValue::Int(0) if self.clocks.contains(x) => assign.reset(x),
                    AssignValue::Int(n) if self.clocks.contains(x) => {
                        return Err(semantic(format!("clock `{x}` can only be reset to 0, not {n}")))
                    }
                    AssignValue::Bool(b) if self.globals.contains(x) || self.locals.contains(x) => assign.set(x, *b),
                    AssignValue::Int(_) => return Err(semantic(format!("`{x}` is not a clock"))),
                    AssignValue::Bool(_) => return Err(semantic(format!("`{x}` is not a proposition"))),
                };
            }
            let label: Vec<&str> = t.label.iter().map(String::as_str).collect();
            transitions.push(Transition::new(&label, t.guard.clone(), assign));
        }
        let tea = Tea {
            events: self.events.iter().cloned().collect(),
            clocks: self.clocks.clone(),
            globals: self.globals.clone(),
            locals: self.locals.clone(),
            init: Pred::and(self.init.iter().cloned()),
            invariant: Pred::and(self.invariant.iter().cloned()),
            transitions,
        };
        tea.validate()?;
        Ok(tea)
    }

    /// The document that prints `tea`.
    pub fn from_tea(tea: &Tea) -> TeaDocument {
        let one = |p: &Pred| if *p == Pred::True { vec![] } else { vec![p.clone()] };
        TeaDocument {
            events: tea.events.iter().cloned().collect(),
            clocks: tea.clocks.clone(),
            globals: tea.globals.clone(),
            locals: tea.locals.clone(),
            init: one(&tea.init),
            invariant: one(&tea.invariant),
            transitions: tea
                .transitions
                .iter()
                .map(|t| TransitionDecl {
                    label: t.label.iter().cloned().collect(),
                    guard: t.guard.clone(),
                    assign: t
                        .assign
                        .entries
                        .iter()
                        .map(|(x, v)| {
                            (
                                x.clone(),
                                match v {
                                    Assigned::Zero => AssignValue::Int(0),
                                    Assigned::Bool(b) => AssignValue::Bool(*b),
                                },
                            )
                        })
                        .collect(),
                })
                .collect(),
            positions: Vec::new(),
        }
    }
}

impl PartialEq for TeaDocument {
    fn eq(&self, o: &TeaDocument) -> bool {
        self.events == o.events
            && self.clocks == o.clocks
            && self.globals == o.globals
            && self.locals == o.locals
            && self.init == o.init
            && self.invariant == o.invariant
            && self.transitions == o.transitions
    }
}

impl Eq for TeaDocument {}

/// Prints `p` in the text syntax. Nested conjunctions and disjunctions are
/// parenthesised so the printed form parses back to the same tree.
pub struct PrettyPred<'a>(pub &'a Pred);

impl fmt::Display for PrettyPred<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pred(f, self.0, false)
    }
}

fn write_pred(f: &mut fmt::Formatter<'_>, p: &Pred, nested: bool) -> fmt::Result {
    match p {
        Pred::True => write!(f, "true"),
        Pred::False => write!(f, "false"),
        Pred::Prop(q) => write!(f, "{q}"),
        Pred::Clock {
            clock,
            other,
            op,
            bound,
        } => match other {
            Some(y) => write!(f, "{clock} - {y} {} {bound}", op.symbol()),
            None => write!(f, "{clock} {} {bound}", op.symbol()),
        },
        Pred::Not(q) => {
            write!(f, "!")?;
            match **q {
                Pred::And(_) | Pred::Or(_) | Pred::Clock { .. } => {
                    write!(f, "(")?;
                    write_pred(f, q, false)?;
                    write!(f, ")")
                }
                _ => write_pred(f, q, true),
            }
        }
        Pred::And(qs) | Pred::Or(qs) => {
            let sep = if matches!(p, Pred::And(_)) { " && " } else { " || " };
            if nested {
                write!(f, "(")?;
            }
            for (i, q) in qs.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write_pred(f, q, true)?;
            }
            if nested {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

fn list(f: &mut fmt::Formatter<'_>, kw: &str, names: &[Ident]) -> fmt::Result {
    if !names.is_empty() {
        writeln!(f, "{kw} {};", names.join(", "))?;
    }
    Ok(())
}

impl fmt::Display for TeaDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        list(f, "event", &self.events)?;
        list(f, "clock", &self.clocks)?;
        list(f, "global", &self.globals)?;
        list(f, "local", &self.locals)?;
        for p in &self.init {
            writeln!(f, "init {};", PrettyPred(p))?;
        }
        for p in &self.invariant {
            writeln!(f, "invariant {};", PrettyPred(p))?;
        }
        for t in &self.transitions {
            write!(f, "trans {{{}}}", t.label.join(", "))?;
            if t.guard != Pred::True {
                write!(f, " when {}", PrettyPred(&t.guard))?;
            }
            if !t.assign.is_empty() {
                let parts: Vec<String> = t
                    .assign
                    .iter()
                    .map(|(x, v)| match v {
                        AssignValue::Int(n) => format!("{x} := {n}"),
                        AssignValue::Bool(b) => format!("{x} := {b}"),
                    })
                    .collect();
                write!(f, " do {}", parts.join(", "))?;
            }
            writeln!(f, ";")?;
        }
        Ok(())
    }
}

/// Prints `tea` in the text syntax.
pub fn print(tea: &Tea) -> String {
    TeaDocument::from_tea(tea).to_string()
}
