//! The structured config syntax and typed experiment configs.
//!
//! A config is a list of items, each either `key = value` or a section
//! `name { items }`. Values are integers, reals, booleans, bare words,
//! quoted strings, lists `[a, b]` and tagged sections such as
//! `polydisc { center = [0,0, 0,0]; radius = [1, 1] }`. Items are
//! separated by newlines, `;` or `,`; `#` starts a comment. Complex
//! coordinates are written as flat `re, im` pairs.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::foliation::{FieldPreset, Monomial, PolyVectorField};
use crate::geometry::{BoundingBox, DomainExpr, Point};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

fn parse_err(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Num(f64),
    Bool(bool),
    /// Bare word or quoted string.
    Str(String),
    List(Vec<Value>),
    Section(Section),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    /// `polydisc` in `polydisc { ... }` used as a value.
    pub tag: Option<String>,
    pub items: Vec<Item>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub key: String,
    pub value: Value,
    pub pos: Pos,
}

impl Item {
    pub fn new(key: &str, value: Value) -> Self {
        Self {
            key: key.into(),
            value,
            pos: Pos::default(),
        }
    }
}

impl Section {
    pub fn tagged(tag: &str, items: Vec<Item>) -> Self {
        Self {
            tag: Some(tag.into()),
            items,
            pos: Pos::default(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.key == key)
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Num(f64),
    Open,
    Close,
    LBracket,
    RBracket,
    Eq,
    Sep,
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>> {
        let mut out = Vec::new();
        loop {
            let start = self.pos;
            let Some(&c) = self.chars.peek() else {
                out.push((Tok::Eof, start));
                return Ok(out);
            };
            let tok = match c {
                '#' => {
                    while self.chars.peek().is_some_and(|c| *c != '\n') {
                        self.bump();
                    }
                    continue;
                }
                '\n' | ';' | ',' => {
                    self.bump();
                    Tok::Sep
                }
                c if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                '{' => {
                    self.bump();
                    Tok::Open
                }
                '}' => {
                    self.bump();
                    Tok::Close
                }
                '[' => {
                    self.bump();
                    Tok::LBracket
                }
                ']' => {
                    self.bump();
                    Tok::RBracket
                }
                '=' => {
                    self.bump();
                    Tok::Eq
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('n') => s.push('\n'),
                                Some(c) => s.push(c),
                                None => return Err(parse_err(start, "unterminated string")),
                            },
                            Some('\n') | None => return Err(parse_err(start, "unterminated string")),
                            Some(c) => s.push(c),
                        }
                    }
                    Tok::Str(s)
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+' | '_') {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let integral = !s.contains(['.', 'e', 'E']) && !s.contains("inf") && !s.contains("NaN");
                    match (integral, s.parse::<i64>(), s.parse::<f64>()) {
                        (true, Ok(i), _) => Tok::Int(i),
                        (_, _, Ok(x)) => Tok::Num(x),
                        _ => return Err(parse_err(start, format!("malformed number `{s}`"))),
                    }
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => return Err(parse_err(start, format!("unexpected character `{other}`"))),
            };
            out.push((tok, start));
        }
    }
}

// ---------------------------------------------------------------- parser

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn skip_seps(&mut self) {
        while *self.peek() == Tok::Sep {
            self.next();
        }
    }

    /// Items up to `}` (nested) or end of input (top level).
    fn items(&mut self, nested: bool) -> Result<Vec<Item>> {
        let mut items = Vec::new();
        loop {
            self.skip_seps();
            match self.peek() {
                Tok::Close if nested => {
                    self.next();
                    return Ok(items);
                }
                Tok::Eof if !nested => return Ok(items),
                Tok::Eof => return Err(parse_err(self.pos(), "unexpected end of input, expected `}`")),
                Tok::Ident(_) => {
                    let (Tok::Ident(key), pos) = self.next() else { unreachable!() };
                    let value = match self.next() {
                        (Tok::Eq, _) => self.value()?,
                        (Tok::Open, p) => Value::Section(Section {
                            tag: None,
                            items: self.items(true)?,
                            pos: p,
                        }),
                        (_, p) => return Err(parse_err(p, format!("expected `=` or `{{` after `{key}`"))),
                    };
                    items.push(Item { key, value, pos });
                    match self.peek() {
                        Tok::Sep | Tok::Close | Tok::Eof | Tok::Ident(_) => {}
                        _ => return Err(parse_err(self.pos(), "expected a separator after the value")),
                    }
                }
                _ => return Err(parse_err(self.pos(), "expected a key")),
            }
        }
    }

    fn value(&mut self) -> Result<Value> {
        while *self.peek() == Tok::Sep && matches!(self.toks.get(self.at + 1), Some((Tok::Sep, _))) {
            self.next();
        }
        let (tok, pos) = self.next();
        Ok(match tok {
            Tok::Int(i) => Value::Int(i),
            Tok::Num(x) => Value::Num(x),
            Tok::Str(s) => Value::Str(s),
            Tok::Ident(w) => {
                if *self.peek() == Tok::Open {
                    let p = self.pos();
                    self.next();
                    Value::Section(Section {
                        tag: Some(w),
                        items: self.items(true)?,
                        pos: p,
                    })
                } else {
                    match w.as_str() {
                        "true" => Value::Bool(true),
                        "false" => Value::Bool(false),
                        _ => Value::Str(w),
                    }
                }
            }
            Tok::Open => Value::Section(Section {
                tag: None,
                items: self.items(true)?,
                pos,
            }),
            Tok::LBracket => {
                let mut list = Vec::new();
                loop {
                    self.skip_seps();
                    if *self.peek() == Tok::RBracket {
                        self.next();
                        break;
                    }
                    if *self.peek() == Tok::Eof {
                        return Err(parse_err(pos, "unterminated list"));
                    }
                    list.push(self.value()?);
                }
                Value::List(list)
            }
            _ => return Err(parse_err(pos, "expected a value")),
        })
    }
}

/// Parses config text into its top-level items.
pub fn parse(src: &str) -> Result<Section> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser { toks, at: 0 };
    Ok(Section {
        tag: None,
        items: p.items(false)?,
        pos: Pos { line: 1, column: 1 },
    })
}

// ---------------------------------------------------------------- printer

fn fmt_num(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'i', 'N']) {
        s
    } else {
        format!("{s}.0")
    }
}

fn is_word(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_alphanumeric() || c == '_')
        && !matches!(s, "true" | "false")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Int(i) => write!(out, "{i}").unwrap(),
        Value::Num(x) => out.push_str(&fmt_num(*x)),
        Value::Bool(b) => write!(out, "{b}").unwrap(),
        Value::Str(s) if is_word(s) => out.push_str(s),
        Value::Str(s) => write!(out, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")).unwrap(),
        Value::List(items) => {
            let nested = items.iter().any(|v| matches!(v, Value::Section(_) | Value::List(_)));
            if nested {
                out.push_str("[\n");
                for v in items {
                    out.push_str(&"  ".repeat(indent + 1));
                    write_value(out, v, indent + 1);
                    out.push('\n');
                }
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            } else {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, v, indent);
                }
                out.push(']');
            }
        }
        Value::Section(s) => {
            if let Some(t) = &s.tag {
                out.push_str(t);
                out.push(' ');
            }
            out.push_str("{\n");
            write_items(out, &s.items, indent + 1);
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

fn write_items(out: &mut String, items: &[Item], indent: usize) {
    for it in items {
        out.push_str(&"  ".repeat(indent));
        match &it.value {
            Value::Section(s) if s.tag.is_none() => {
                out.push_str(&it.key);
                out.push(' ');
                write_value(out, &it.value, indent);
            }
            v => {
                out.push_str(&it.key);
                out.push_str(" = ");
                write_value(out, v, indent);
            }
        }
        out.push('\n');
    }
}

/// Renders items in the config syntax; reals print in shortest
/// round-trip form.
pub fn to_string(items: &[Item]) -> String {
    let mut out = String::new();
    write_items(&mut out, items, 0);
    out
}

// ---------------------------------------------------------------- typed access

fn type_err(pos: Pos, what: &str) -> Error {
    parse_err(pos, format!("expected {what}"))
}

impl Value {
    pub fn as_f64(&self, pos: Pos) -> Result<f64> {
        match self {
            Value::Int(i) => Ok(*i as f64),
            Value::Num(x) => Ok(*x),
            _ => Err(type_err(pos, "a number")),
        }
    }

    pub fn as_usize(&self, pos: Pos) -> Result<usize> {
        match self {
            Value::Int(i) if *i >= 0 => Ok(*i as usize),
            _ => Err(type_err(pos, "a non-negative integer")),
        }
    }

    pub fn as_bool(&self, pos: Pos) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            _ => Err(type_err(pos, "true or false")),
        }
    }

    pub fn as_str(&self, pos: Pos) -> Result<&str> {
        match self {
            Value::Str(s) => Ok(s),
            _ => Err(type_err(pos, "a word or string")),
        }
    }

    pub fn as_list(&self, pos: Pos) -> Result<&[Value]> {
        match self {
            Value::List(l) => Ok(l),
            _ => Err(type_err(pos, "a list")),
        }
    }

    pub fn as_f64s(&self, pos: Pos) -> Result<Vec<f64>> {
        self.as_list(pos)?.iter().map(|v| v.as_f64(pos)).collect()
    }

    pub fn as_section(&self, pos: Pos) -> Result<&Section> {
        match self {
            Value::Section(s) => Ok(s),
            _ => Err(type_err(pos, "a section")),
        }
    }
}

/// Key-checked view of a section: every key must be read exactly once.
pub struct Fields<'a> {
    section: &'a Section,
    seen: HashSet<usize>,
    context: String,
}

impl<'a> Fields<'a> {
    pub fn new(section: &'a Section, context: &str) -> Result<Self> {
        let mut keys = HashSet::new();
        for it in &section.items {
            if !keys.insert(it.key.as_str()) {
                return Err(parse_err(it.pos, format!("duplicate key `{}` in {context}", it.key)));
            }
        }
        Ok(Self {
            section,
            seen: HashSet::new(),
            context: context.into(),
        })
    }

    pub fn opt(&mut self, key: &str) -> Option<&'a Item> {
        let i = self.section.items.iter().position(|i| i.key == key)?;
        self.seen.insert(i);
        Some(&self.section.items[i])
    }

    pub fn req(&mut self, key: &str) -> Result<&'a Item> {
        let ctx = self.context.clone();
        let pos = self.section.pos;
        self.opt(key)
            .ok_or_else(|| parse_err(pos, format!("missing key `{key}` in {ctx}")))
    }

    /// Rejects keys that were never read.
    pub fn finish(self) -> Result<()> {
        for (i, it) in self.section.items.iter().enumerate() {
            if !self.seen.contains(&i) {
                return Err(parse_err(it.pos, format!("unknown key `{}` in {}", it.key, self.context)));
            }
        }
        Ok(())
    }
}

fn num(x: f64) -> Value {
    Value::Num(x)
}

fn nums(xs: &[f64]) -> Value {
    Value::List(xs.iter().map(|x| num(*x)).collect())
}

fn point_value(p: &Point) -> Value {
    nums(&p.to_re_im())
}

fn point_of(v: &Value, pos: Pos) -> Result<Point> {
    let flat = v.as_f64s(pos)?;
    if flat.is_empty() || flat.len() % 2 != 0 {
        return Err(parse_err(pos, "a point is a flat list of re, im pairs"));
    }
    Point::from_re_im(&flat).map_err(|e| parse_err(pos, e.to_string()))
}

fn with_pos<T>(r: Result<T>, pos: Pos) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => parse_err(pos, other.to_string()),
    })
}

// ---------------------------------------------------------------- domains

/// A domain as a tagged section.
pub fn domain_to_value(d: &DomainExpr) -> Value {
    let (tag, items) = match d {
        DomainExpr::Polydisc { center, radii } => (
            "polydisc",
            vec![Item::new("center", point_value(center)), Item::new("radius", nums(radii))],
        ),
        DomainExpr::Ball { center, radius } => (
            "ball",
            vec![Item::new("center", point_value(center)), Item::new("radius", num(*radius))],
        ),
        DomainExpr::Tube { a, b, radius } => (
            "tube",
            vec![
                Item::new("a", point_value(a)),
                Item::new("b", point_value(b)),
                Item::new("radius", num(*radius)),
            ],
        ),
        DomainExpr::LineNeighborhood {
            base,
            direction,
            extent,
            width,
        } => (
            "line",
            vec![
                Item::new("base", point_value(base)),
                Item::new("direction", point_value(direction)),
                Item::new("extent", num(*extent)),
                Item::new("width", num(*width)),
            ],
        ),
        DomainExpr::Union(c) => ("union", vec![Item::new("of", Value::List(c.iter().map(domain_to_value).collect()))]),
        DomainExpr::Intersection(c) => (
            "intersection",
            vec![Item::new("of", Value::List(c.iter().map(domain_to_value).collect()))],
        ),
        DomainExpr::Difference(l, r) => (
            "difference",
            vec![Item::new("left", domain_to_value(l)), Item::new("right", domain_to_value(r))],
        ),
        DomainExpr::Thickening { child, epsilon } => (
            "thickening",
            vec![Item::new("of", domain_to_value(child)), Item::new("epsilon", num(*epsilon))],
        ),
    };
    Value::Section(Section::tagged(tag, items))
}

pub fn domain_of(v: &Value, pos: Pos) -> Result<DomainExpr> {
    let s = v.as_section(pos)?;
    let tag = s
        .tag
        .as_deref()
        .ok_or_else(|| parse_err(s.pos, "a domain needs a kind, e.g. `polydisc { ... }`"))?;
    let mut f = Fields::new(s, tag)?;
    let d = match tag {
        "polydisc" => {
            let c = f.req("center")?;
            let r = f.req("radius")?;
            with_pos(DomainExpr::polydisc(point_of(&c.value, c.pos)?, r.value.as_f64s(r.pos)?), s.pos)?
        }
        "ball" => {
            let c = f.req("center")?;
            let r = f.req("radius")?;
            with_pos(DomainExpr::ball(point_of(&c.value, c.pos)?, r.value.as_f64(r.pos)?), s.pos)?
        }
        "tube" => {
            let a = f.req("a")?;
            let b = f.req("b")?;
            let r = f.req("radius")?;
            with_pos(
                DomainExpr::tube(point_of(&a.value, a.pos)?, point_of(&b.value, b.pos)?, r.value.as_f64(r.pos)?),
                s.pos,
            )?
        }
        "line" => {
            let base = f.req("base")?;
            let dir = f.req("direction")?;
            let e = f.req("extent")?;
            let w = f.req("width")?;
            let base = point_of(&base.value, base.pos)?;
            let direction = point_of(&dir.value, dir.pos)?;
            let (extent, width) = (e.value.as_f64(e.pos)?, w.value.as_f64(w.pos)?);
            // Unit directions are kept verbatim so that printing and
            // re-reading is exact.
            let d = if (direction.norm() - 1.0).abs() < 1e-12 {
                DomainExpr::LineNeighborhood {
                    base,
                    direction,
                    extent,
                    width,
                }
            } else {
                with_pos(DomainExpr::line_neighborhood(base, direction, extent, width), s.pos)?
            };
            with_pos(d.validate(), s.pos)?;
            d
        }
        "union" | "intersection" => {
            let of = f.req("of")?;
            let children = of
                .value
                .as_list(of.pos)?
                .iter()
                .map(|c| domain_of(c, of.pos))
                .collect::<Result<Vec<_>>>()?;
            with_pos(
                if tag == "union" {
                    DomainExpr::union(children)
                } else {
                    DomainExpr::intersection(children)
                },
                s.pos,
            )?
        }
        "difference" => {
            let l = f.req("left")?;
            let r = f.req("right")?;
            with_pos(DomainExpr::difference(domain_of(&l.value, l.pos)?, domain_of(&r.value, r.pos)?), s.pos)?
        }
        "thickening" => {
            let of = f.req("of")?;
            let e = f.req("epsilon")?;
            with_pos(DomainExpr::thickening(domain_of(&of.value, of.pos)?, e.value.as_f64(e.pos)?), s.pos)?
        }
        other => return Err(parse_err(s.pos, format!("unknown domain kind `{other}`"))),
    };
    f.finish()?;
    Ok(d)
}

// ---------------------------------------------------------------- fields

pub fn field_to_items(x: &PolyVectorField) -> Vec<Item> {
    if let Some(p) = x.catalog_kind() {
        return vec![Item::new("preset", Value::Str(p.name()))];
    }
    x.components()
        .iter()
        .map(|comp| {
            Item::new(
                "component",
                Value::List(
                    comp.iter()
                        .map(|m| {
                            Value::Section(Section {
                                tag: None,
                                items: vec![
                                    Item::new("exps", Value::List(m.exps.iter().map(|e| Value::Int(*e as i64)).collect())),
                                    Item::new("coeff", nums(&[m.coeff.re, m.coeff.im])),
                                ],
                                pos: Pos::default(),
                            })
                        })
                        .collect(),
                ),
            )
        })
        .collect()
}

pub fn field_of(s: &Section) -> Result<PolyVectorField> {
    if let Some(p) = s.get("preset") {
        if s.items.len() > 1 {
            let other = s.items.iter().find(|i| i.key != "preset").expect("len > 1");
            return Err(parse_err(other.pos, "a preset field takes no other keys"));
        }
        let name = p.value.as_str(p.pos)?;
        return with_pos(FieldPreset::from_name(name).map(PolyVectorField::preset), p.pos);
    }
    let mut comps = Vec::new();
    for it in &s.items {
        if it.key != "component" {
            return Err(parse_err(it.pos, format!("unknown key `{}` in field", it.key)));
        }
        let mut monos = Vec::new();
        for m in it.value.as_list(it.pos)? {
            let ms = m.as_section(it.pos)?;
            let mut f = Fields::new(ms, "monomial")?;
            let e = f.req("exps")?;
            let c = f.req("coeff")?;
            let exps = e
                .value
                .as_list(e.pos)?
                .iter()
                .map(|v| v.as_usize(e.pos).map(|u| u as u32))
                .collect::<Result<Vec<_>>>()?;
            let coeff = match c.value.as_f64s(c.pos)?.as_slice() {
                [re, im] => Complex64::new(*re, *im),
                _ => return Err(parse_err(c.pos, "coeff is [re, im]")),
            };
            f.finish()?;
            monos.push(Monomial::new(exps, coeff));
        }
        comps.push(monos);
    }
    if comps.is_empty() {
        return Err(parse_err(s.pos, "field needs `preset` or `component` entries"));
    }
    with_pos(PolyVectorField::new(comps), s.pos)
}

// ---------------------------------------------------------------- experiment config

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentType {
    Pointwise,
    Uniform,
    Hausdorff,
    Kernel,
    Eta,
    Defect,
    Dense,
}

impl ExperimentType {
    pub const ALL: [ExperimentType; 7] = [
        ExperimentType::Pointwise,
        ExperimentType::Uniform,
        ExperimentType::Hausdorff,
        ExperimentType::Kernel,
        ExperimentType::Eta,
        ExperimentType::Defect,
        ExperimentType::Dense,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentType::Pointwise => "pointwise",
            ExperimentType::Uniform => "uniform",
            ExperimentType::Hausdorff => "hausdorff",
            ExperimentType::Kernel => "kernel",
            ExperimentType::Eta => "eta",
            ExperimentType::Defect => "defect",
            ExperimentType::Dense => "dense",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    fn needs_field(&self) -> bool {
        !matches!(self, ExperimentType::Hausdorff | ExperimentType::Kernel)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpec {
    /// A built-in family; `j_max`, `m_max` size the dense construction.
    Family { name: String, j_max: usize, m_max: usize },
    /// `W_n = terms[min(n, len) − 1]` with declared limit and base point.
    Terms {
        terms: Vec<DomainExpr>,
        limit: DomainExpr,
        base: Point,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointsSpec {
    List(Vec<Point>),
    /// `count` seeded points of the polydisc `P(0, radii)`.
    Polydisc { radii: Vec<f64>, count: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub summary: Option<String>,
    pub svg: Option<String>,
    pub plot: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentType,
    pub field: Option<PolyVectorField>,
    pub sequence: Option<SequenceSpec>,
    /// Overrides the family's limit domain.
    pub w: Option<DomainExpr>,
    /// Overrides the family's ambient domain.
    pub ambient: Option<DomainExpr>,
    /// Domain for `eta` runs; defaults to the limit.
    pub domain: Option<DomainExpr>,
    pub bbox: Option<BoundingBox>,
    pub points: Option<PointsSpec>,
    pub schedule: Vec<usize>,
    pub h: f64,
    pub tol: f64,
    pub seed: u64,
    pub budget: usize,
    pub n_max: usize,
    pub subsequences: usize,
    pub detect_f: bool,
    pub allow_e: bool,
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentType) -> Self {
        Self {
            experiment,
            field: None,
            sequence: None,
            w: None,
            ambient: None,
            domain: None,
            bbox: None,
            points: None,
            schedule: vec![],
            h: 0.02,
            tol: 1e-3,
            seed: 7,
            budget: 10_000,
            n_max: 200,
            subsequences: 5,
            detect_f: true,
            allow_e: false,
            output: OutputSpec::default(),
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        Self::from_section(&parse(src)?)
    }

    pub fn from_section(root: &Section) -> Result<Self> {
        let mut f = Fields::new(root, "config")?;
        let kind = f
            .opt("experiment")
            .ok_or_else(|| Error::Config("missing key `experiment`".into()))?;
        let experiment = ExperimentType::from_name(kind.value.as_str(kind.pos)?).ok_or_else(|| {
            let names: Vec<&str> = ExperimentType::ALL.iter().map(|k| k.as_str()).collect();
            parse_err(kind.pos, format!("unknown experiment; expected one of {}", names.join(", ")))
        })?;
        let mut c = Self::new(experiment);
        if let Some(it) = f.opt("field") {
            c.field = Some(field_of(it.value.as_section(it.pos)?)?);
        } else if experiment.needs_field() {
            return Err(Error::Config("missing section `field`".into()));
        }
        if let Some(it) = f.opt("sequence") {
            let s = it.value.as_section(it.pos)?;
            let mut g = Fields::new(s, "sequence")?;
            c.sequence = Some(if let Some(fam) = g.opt("family") {
                let name = fam.value.as_str(fam.pos)?.to_string();
                let j_max = g.opt("j_max").map_or(Ok(8), |i| i.value.as_usize(i.pos))?;
                let m_max = g.opt("m_max").map_or(Ok(8), |i| i.value.as_usize(i.pos))?;
                SequenceSpec::Family { name, j_max, m_max }
            } else {
                let t = g.req("terms")?;
                let terms = t
                    .value
                    .as_list(t.pos)?
                    .iter()
                    .map(|d| domain_of(d, t.pos))
                    .collect::<Result<Vec<_>>>()?;
                if terms.is_empty() {
                    return Err(parse_err(t.pos, "terms must be nonempty"));
                }
                let l = g.req("limit")?;
                let b = g.req("base")?;
                SequenceSpec::Terms {
                    terms,
                    limit: domain_of(&l.value, l.pos)?,
                    base: point_of(&b.value, b.pos)?,
                }
            });
            g.finish()?;
        } else if experiment != ExperimentType::Eta {
            return Err(Error::Config("missing section `sequence`".into()));
        }
        for (key, slot) in [("w", &mut c.w), ("ambient", &mut c.ambient), ("domain", &mut c.domain)] {
            if let Some(it) = f.opt(key) {
                *slot = Some(domain_of(&it.value, it.pos)?);
            }
        }
        if let Some(it) = f.opt("bbox") {
            let s = it.value.as_section(it.pos)?;
            let mut g = Fields::new(s, "bbox")?;
            let lo = g.req("lo")?;
            let hi = g.req("hi")?;
            c.bbox = Some(with_pos(BoundingBox::new(lo.value.as_f64s(lo.pos)?, hi.value.as_f64s(hi.pos)?), it.pos)?);
            g.finish()?;
        }
        if let Some(it) = f.opt("points") {
            c.points = Some(match &it.value {
                Value::List(l) => PointsSpec::List(l.iter().map(|p| point_of(p, it.pos)).collect::<Result<_>>()?),
                Value::Section(s) => {
                    let mut g = Fields::new(s, "points")?;
                    let r = g.req("radii")?;
                    let n = g.req("count")?;
                    let spec = PointsSpec::Polydisc {
                        radii: r.value.as_f64s(r.pos)?,
                        count: n.value.as_usize(n.pos)?,
                    };
                    g.finish()?;
                    spec
                }
                _ => return Err(parse_err(it.pos, "points is a list of points or `{ radii, count }`")),
            });
        }
        if let Some(it) = f.opt("schedule") {
            c.schedule = it
                .value
                .as_list(it.pos)?
                .iter()
                .map(|v| v.as_usize(it.pos))
                .collect::<Result<_>>()?;
            if c.schedule.is_empty() || c.schedule[0] == 0 || c.schedule.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_err(it.pos, "schedule must be increasing indices n ≥ 1"));
            }
        }
        let real = |f: &mut Fields, key: &str, slot: &mut f64| -> Result<()> {
            if let Some(it) = f.opt(key) {
                let x = it.value.as_f64(it.pos)?;
                if !(x.is_finite() && x > 0.0) {
                    return Err(parse_err(it.pos, format!("{key} must be positive")));
                }
                *slot = x;
            }
            Ok(())
        };
        real(&mut f, "h", &mut c.h)?;
        real(&mut f, "tol", &mut c.tol)?;
        if let Some(it) = f.opt("seed") {
            c.seed = it.value.as_usize(it.pos)? as u64;
        }
        for (key, slot) in [("budget", &mut c.budget), ("n_max", &mut c.n_max), ("subsequences", &mut c.subsequences)] {
            if let Some(it) = f.opt(key) {
                *slot = it.value.as_usize(it.pos)?;
            }
        }
        for (key, slot) in [("detect_f", &mut c.detect_f), ("allow_e", &mut c.allow_e)] {
            if let Some(it) = f.opt(key) {
                *slot = it.value.as_bool(it.pos)?;
            }
        }
        if let Some(it) = f.opt("output") {
            let s = it.value.as_section(it.pos)?;
            let mut g = Fields::new(s, "output")?;
            for (key, slot) in [
                ("csv", &mut c.output.csv),
                ("summary", &mut c.output.summary),
                ("svg", &mut c.output.svg),
                ("plot", &mut c.output.plot),
            ] {
                if let Some(i) = g.opt(key) {
                    *slot = Some(i.value.as_str(i.pos)?.to_string());
                }
            }
            g.finish()?;
        }
        f.finish()?;
        if matches!(experiment, ExperimentType::Pointwise | ExperimentType::Uniform | ExperimentType::Eta)
            && c.points.is_none()
        {
            return Err(Error::Config("missing key `points`".into()));
        }
        if matches!(experiment, ExperimentType::Pointwise | ExperimentType::Uniform | ExperimentType::Hausdorff)
            && c.schedule.is_empty()
        {
            return Err(Error::Config("missing key `schedule`".into()));
        }
        Ok(c)
    }

    pub fn to_items(&self) -> Vec<Item> {
        let mut items = vec![Item::new("experiment", Value::Str(self.experiment.as_str().into()))];
        if let Some(x) = &self.field {
            items.push(Item::new(
                "field",
                Value::Section(Section {
                    tag: None,
                    items: field_to_items(x),
                    pos: Pos::default(),
                }),
            ));
        }
        if let Some(s) = &self.sequence {
            let inner = match s {
                SequenceSpec::Family { name, j_max, m_max } => vec![
                    Item::new("family", Value::Str(name.clone())),
                    Item::new("j_max", Value::Int(*j_max as i64)),
                    Item::new("m_max", Value::Int(*m_max as i64)),
                ],
                SequenceSpec::Terms { terms, limit, base } => vec![
                    Item::new("terms", Value::List(terms.iter().map(domain_to_value).collect())),
                    Item::new("limit", domain_to_value(limit)),
                    Item::new("base", point_value(base)),
                ],
            };
            items.push(Item::new(
                "sequence",
                Value::Section(Section {
                    tag: None,
                    items: inner,
                    pos: Pos::default(),
                }),
            ));
        }
        for (key, d) in [("w", &self.w), ("ambient", &self.ambient), ("domain", &self.domain)] {
            if let Some(d) = d {
                items.push(Item::new(key, domain_to_value(d)));
            }
        }
        if let Some(b) = &self.bbox {
            items.push(Item::new(
                "bbox",
                Value::Section(Section {
                    tag: None,
                    items: vec![Item::new("lo", nums(&b.lo)), Item::new("hi", nums(&b.hi))],
                    pos: Pos::default(),
                }),
            ));
        }
        match &self.points {
            Some(PointsSpec::List(ps)) => items.push(Item::new("points", Value::List(ps.iter().map(point_value).collect()))),
            Some(PointsSpec::Polydisc { radii, count }) => items.push(Item::new(
                "points",
                Value::Section(Section {
                    tag: None,
                    items: vec![Item::new("radii", nums(radii)), Item::new("count", Value::Int(*count as i64))],
                    pos: Pos::default(),
                }),
            )),
            None => {}
        }
        if !self.schedule.is_empty() {
            items.push(Item::new(
                "schedule",
                Value::List(self.schedule.iter().map(|n| Value::Int(*n as i64)).collect()),
            ));
        }
        items.push(Item::new("h", num(self.h)));
        items.push(Item::new("tol", num(self.tol)));
        items.push(Item::new("seed", Value::Int(self.seed as i64)));
        items.push(Item::new("budget", Value::Int(self.budget as i64)));
        items.push(Item::new("n_max", Value::Int(self.n_max as i64)));
        items.push(Item::new("subsequences", Value::Int(self.subsequences as i64)));
        items.push(Item::new("detect_f", Value::Bool(self.detect_f)));
        items.push(Item::new("allow_e", Value::Bool(self.allow_e)));
        let o = &self.output;
        let out: Vec<Item> = [("csv", &o.csv), ("summary", &o.summary), ("svg", &o.svg), ("plot", &o.plot)]
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|s| Item::new(k, Value::Str(s.clone()))))
            .collect();
        if !out.is_empty() {
            items.push(Item::new(
                "output",
                Value::Section(Section {
                    tag: None,
                    items: out,
                    pos: Pos::default(),
                }),
            ));
        }
        items
    }

    pub fn to_config_string(&self) -> String {
        to_string(&self.to_items())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ARM: &str = r#"
# radial field on the two-arm bidisc
experiment = pointwise
field { preset = radial2 }
sequence { family = arm_bidisc }
points = [[0.5, 0, 0, 0], [0.2, 0.1, 0.3, -0.2]]
schedule = [1, 10, 100]
h = 0.02; tol = 1e-3; seed = 11
output { csv = "arm.csv"; plot = eta_vs_n }
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::parse(ARM).unwrap();
        assert_eq!(c.experiment, ExperimentType::Pointwise);
        assert_eq!(c.seed, 11);
        assert_eq!(c.schedule, vec![1, 10, 100]);
        let text = c.to_config_string();
        let again = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_config_string(), text);
    }

    #[test]
    fn domains_round_trip() {
        let d = DomainExpr::union(vec![
            DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap(),
            DomainExpr::line_neighborhood(Point::origin(2), Point::real(&[1.0, 0.3]), 3.0, 0.1).unwrap(),
            DomainExpr::thickening(DomainExpr::ball(Point::real(&[0.1, 0.2]), 0.7).unwrap(), 0.05).unwrap(),
        ])
        .unwrap();
        let text = to_string(&[Item::new("d", domain_to_value(&d))]);
        let root = parse(&text).unwrap();
        let back = domain_of(&root.items[0].value, root.items[0].pos).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn explicit_field_matches_preset() {
        let src = "field { component = [ { exps=[1,0], coeff=[1,0] } ]\n component = [ { exps = [0, 1]; coeff = [2, 0] } ] }";
        let root = parse(src).unwrap();
        let x = field_of(root.items[0].value.as_section(Pos::default()).unwrap()).unwrap();
        assert_eq!(x.catalog_kind(), Some(FieldPreset::Weighted12));
    }

    #[test]
    fn unknown_key_reports_position() {
        let src = "experiment = eta\nfield { preset = radial2 }\npoints = [[0.1,0,0,0]]\nbogus = 3\n";
        match ExperimentConfig::parse(src) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!((line, column), (4, 1));
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_field_names_the_section() {
        let src = "experiment = pointwise\nsequence { family = arm_bidisc }\npoints = [[0.5,0,0,0]]\nschedule = [1]\n";
        let e = ExperimentConfig::parse(src).unwrap_err();
        assert!(e.to_string().contains("field"), "{e}");
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        match parse("a = [1, 2\nb = 3") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse("a = 1\n  b ! 2") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
    }
}
