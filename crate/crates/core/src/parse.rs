//! Text formats.
//!
//! Population files hold one rollout per line:
//!
//! ```text
//! # comment
//! alpha: 1/a, 5/a, 6/a -> f1
//! beta:  2/a.1, 1/b.1 -> f2.1
//! ```
//!
//! Schemata are `#` or `alpha: 1, 2 -> #` / `alpha: 1, 2 -> f6`. Whitespace
//! is insignificant everywhere; symbols are case-sensitive.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Position, Result};
use crate::model::{Letter, Population, Rollout, StateLabel, Symbol, TerminalLabel};
use crate::prediction::PayoffMap;
use crate::recombination::{RecombOp, TransformationSequence};
use crate::schema::{Schema, Tail};
use crate::Rational;

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line, _src: src }
    }

    fn at(&self) -> Position {
        Position { line: self.line, column: self.pos + 1 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { at: self.at(), message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.expected(&format!("'{c}'"))
        }
    }

    fn eat_arrow(&mut self) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&'-') && self.chars.get(self.pos + 1) == Some(&'>') {
            self.pos += 2;
            true
        } else {
            false
        }
    }

    fn expect_arrow(&mut self) -> Result<()> {
        if self.eat_arrow() {
            Ok(())
        } else {
            self.expected("'->'")
        }
    }

    fn expected<T>(&mut self, what: &str) -> Result<T> {
        match self.peek() {
            Some(c) => self.err(format!("expected {what}, found '{c}'")),
            None => self.err(format!("expected {what}, found end of input")),
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|&c| pred(c)) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        let s = self.take_while(|c| c.is_alphanumeric() || c == '_');
        if s.is_empty() {
            self.expected(what)
        } else {
            Ok(s)
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let start = self.at();
        let s = self.take_while(|c| c.is_ascii_digit());
        if s.is_empty() {
            return self.expected(what);
        }
        s.parse::<u32>().map_err(|_| Error::Syntax {
            at: start,
            message: format!("{what} out of range: {s}"),
        })
    }

    fn positive(&mut self, what: &str) -> Result<u32> {
        let start = self.at();
        let n = self.number(what)?;
        if n == 0 {
            return Err(Error::Syntax { at: start, message: format!("{what} must be at least 1") });
        }
        Ok(n)
    }

    /// Optional `.k` copy suffix, directly attached.
    fn copy_index(&mut self) -> Result<Option<u32>> {
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            if !self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                return self.err("expected copy index after '.'");
            }
            Ok(Some(self.positive("copy index")?))
        } else {
            Ok(None)
        }
    }

    fn letter(&mut self) -> Result<Letter> {
        let base = self.take_while(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if base.is_empty() {
            return self.expected("letter [a-z0-9_]");
        }
        let copy = self.copy_index()?;
        Ok(Letter { base: Symbol::new(&base), copy })
    }

    fn state(&mut self) -> Result<StateLabel> {
        let class = self.positive("class")?;
        self.expect('/')?;
        let letter = self.letter()?;
        Ok(StateLabel { class, letter })
    }

    fn terminal(&mut self) -> Result<TerminalLabel> {
        let name = self.ident("terminal label")?;
        let copy = self.copy_index()?;
        Ok(TerminalLabel { name: Symbol::new(&name), copy })
    }

    fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.expected("end of line")
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim_start();
        (!t.is_empty() && !t.starts_with('#')).then_some((i + 1, l))
    })
}

fn parse_rollout(cur: &mut Cursor<'_>) -> Result<Rollout> {
    let action = cur.ident("action")?;
    cur.expect(':')?;
    if cur.eat_arrow() {
        return Err(Error::EmptyRollout { line: cur.line });
    }
    let mut states = vec![cur.state()?];
    while cur.eat(',') {
        states.push(cur.state()?);
    }
    cur.expect_arrow()?;
    let terminal = cur.terminal()?;
    cur.finish()?;
    Ok(Rollout { action: Symbol::new(&action), states, terminal })
}

/// Parse and validate a population file.
pub fn parse_population(text: &str) -> Result<Population> {
    let mut rollouts = Vec::new();
    let mut lines = Vec::new();
    for (no, line) in content_lines(text) {
        let mut cur = Cursor::new(line, no);
        rollouts.push(parse_rollout(&mut cur)?);
        lines.push(no);
    }
    Population::with_lines(rollouts, &lines)
}

pub fn parse_schema(text: &str) -> Result<Schema> {
    let mut cur = Cursor::new(text, 1);
    if cur.eat('#') {
        cur.finish()?;
        return Ok(Schema::Root);
    }
    let action = cur.ident("action or '#'")?;
    cur.expect(':')?;
    if cur.eat_arrow() {
        return cur.err("schema needs at least one class");
    }
    let mut classes = vec![cur.positive("class")?];
    while cur.eat(',') {
        classes.push(cur.positive("class")?);
    }
    cur.expect_arrow()?;
    let tail = if cur.eat('#') {
        Tail::Any
    } else {
        let name = cur.ident("'#' or terminal name")?;
        if cur.chars.get(cur.pos) == Some(&'.') {
            return cur.err("schema terminals take no copy index");
        }
        Tail::Terminal(Symbol::new(&name))
    };
    cur.finish()?;
    Ok(Schema::Pattern { action: Symbol::new(&action), classes, tail })
}

fn parse_op(cur: &mut Cursor<'_>) -> Result<RecombOp> {
    let name = cur.ident("operator")?;
    match name.as_str() {
        "id" => Ok(RecombOp::Identity),
        "chi" | "nu" => {
            cur.expect('(')?;
            let class = cur.positive("class")?;
            cur.expect(',')?;
            let x = cur.letter()?;
            cur.expect(',')?;
            let y = cur.letter()?;
            cur.expect(')')?;
            let op = if name == "chi" {
                RecombOp::one_point(class, x, y)
            } else {
                RecombOp::single_swap(class, x, y)
            };
            op.or_else(|e| cur.err(e.to_string()))
        }
        "swap" => {
            cur.expect('(')?;
            let i = cur.positive("rollout index")? as usize;
            cur.expect(',')?;
            let j = cur.positive("rollout index")? as usize;
            cur.expect(')')?;
            RecombOp::transpose(i, j).or_else(|e| cur.err(e.to_string()))
        }
        other => cur.err(format!("unknown operator {other}; expected chi, nu, swap or id")),
    }
}

pub fn parse_op_sequence(text: &str) -> Result<TransformationSequence> {
    let mut cur = Cursor::new(text, 1);
    let mut ops = Vec::new();
    if cur.at_end() {
        return Ok(TransformationSequence::new(ops));
    }
    loop {
        ops.push(parse_op(&mut cur)?);
        if !cur.eat(',') {
            break;
        }
    }
    cur.finish()?;
    Ok(TransformationSequence::new(ops))
}

/// `-3/4`, `2`, `0.125`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            s => s.parse().ok()?,
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part: BigInt = frac.parse().ok()?;
        let mag = Rational::new(int_part * &scale + frac_part, scale);
        return Some(if negative { -mag } else { mag });
    }
    t.parse::<BigInt>().ok().map(|n| Rational::new(n, BigInt::one()))
}

/// Payoff file: `TERMINAL = RATIONAL` per line.
pub fn parse_payoffs(text: &str) -> Result<PayoffMap> {
    let mut map = BTreeMap::new();
    for (no, line) in content_lines(text) {
        let mut cur = Cursor::new(line, no);
        let name = cur.ident("terminal name")?;
        cur.expect('=')?;
        let rest: String = cur.chars[cur.pos..].iter().collect();
        let value = parse_rational(&rest).ok_or_else(|| Error::Syntax {
            at: cur.at(),
            message: format!("expected rational payoff, found '{}'", rest.trim()),
        })?;
        map.insert(Symbol::new(&name), value);
    }
    Ok(PayoffMap::new(map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_population() {
        let p = parse_population("alpha: 1/a -> f1").unwrap();
        assert_eq!(p.size(), 1);
        assert_eq!(p.heights(), vec![1]);
    }

    #[test]
    fn duplicate_state_in_one_rollout() {
        let err = parse_population("alpha: 1/a, 1/a -> f1").unwrap_err();
        assert!(matches!(err, Error::DuplicateState { line: 1, .. }), "{err}");
    }

    #[test]
    fn empty_rollout() {
        let err = parse_population("# c\n\nalpha: -> f1").unwrap_err();
        assert!(matches!(err, Error::EmptyRollout { line: 3 }), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_population("alpha: 1/a\nbeta: 2/b -> f2").unwrap_err() {
            Error::Syntax { at, .. } => assert_eq!(at, Position { line: 1, column: 11 }),
            e => panic!("unexpected {e}"),
        }
        match parse_population("alpha: 1/A -> f").unwrap_err() {
            Error::Syntax { at, .. } => assert_eq!(at.column, 10),
            e => panic!("unexpected {e}"),
        }
        assert!(parse_population("alpha: 0/a -> f").is_err());
    }

    #[test]
    fn inflated_labels() {
        let p = parse_population("alpha: 3/d.2 -> f1.2").unwrap();
        let r = &p.rollouts()[0];
        assert_eq!(r.states[0].letter, Letter::with_copy("d", 2));
        assert_eq!(r.terminal, TerminalLabel::with_copy("f1", 2));
        assert!(parse_population("alpha: 3/d. -> f1").is_err());
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_population("alpha:1/a,2/b->f1").unwrap();
        let b = parse_population("  alpha :  1 / a ,  2/ b  ->  f1  ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schemata() {
        assert_eq!(parse_schema("#").unwrap(), Schema::Root);
        assert_eq!(
            parse_schema("alpha: 1, 2 -> #").unwrap(),
            Schema::Pattern { action: "alpha".into(), classes: vec![1, 2], tail: Tail::Any }
        );
        assert_eq!(
            parse_schema("alpha: 1, 2 -> f6").unwrap(),
            Schema::Pattern {
                action: "alpha".into(),
                classes: vec![1, 2],
                tail: Tail::Terminal("f6".into())
            }
        );
        assert!(parse_schema("alpha: -> #").is_err());
        assert!(parse_schema("alpha: 1 -> f6.2").is_err());
        assert!(parse_schema("# x").is_err());
    }

    #[test]
    fn op_sequences() {
        let seq = parse_op_sequence("chi(1,c,d), nu(6, b, a), swap(1,2), id").unwrap();
        assert_eq!(seq.to_string(), "chi(1,c,d), nu(6,a,b), swap(1,2), id");
        assert!(parse_op_sequence("").unwrap().is_empty());
        assert!(parse_op_sequence("chi(1,a,a)").is_err());
        assert!(parse_op_sequence("swap(2,2)").is_err());
        assert!(parse_op_sequence("mu(1,a,b)").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/4").unwrap(), Rational::new((-3).into(), 4.into()));
        assert_eq!(parse_rational("0.125").unwrap(), Rational::new(1.into(), 8.into()));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), Rational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn payoffs() {
        let p = parse_payoffs("f1 = 1\n# c\nf2 = -1/2\n").unwrap();
        assert_eq!(p.get("f2").unwrap(), &Rational::new((-1).into(), 2.into()));
        assert!(parse_payoffs("f1 = abc").is_err());
    }
}
