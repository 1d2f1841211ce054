//! Text formats: algebra files (one directive per line, `#` comments, with
//! optional appended unary-map blocks), word / signed-word / antichain
//! literals, and the quasi-inequality syntax.

use pomonoid::{
    Elem, FinitePomonoid, Inequality, QuasiInequality, Signature, SignedWord, StructuralError,
    Term, UnaryMap, Word,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("bad literal `{text}`: {msg}")]
    Literal { text: String, msg: String },
    #[error(transparent)]
    Structure(#[from] StructuralError),
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line { line, msg: msg.into() }
}

fn lit_err(text: &str, msg: impl Into<String>) -> ParseError {
    ParseError::Literal { text: text.to_string(), msg: msg.into() }
}

/// Parse an algebra file: a header directive, the element count, the order
/// and multiplication tables, and any number of trailing unary-map blocks.
pub fn parse_algebra(text: &str) -> Result<(FinitePomonoid, Vec<UnaryMap>), ParseError> {
    let mut signature: Option<(Signature, String)> = None;
    let mut n: Option<usize> = None;
    let mut unit: Option<Elem> = None;
    let mut le_pairs: Vec<(usize, Elem, Elem)> = Vec::new();
    let mut mult_lines: Vec<(usize, Elem, Elem, Elem)> = Vec::new();
    let mut join_lines: Vec<(usize, Elem, Elem, Elem)> = Vec::new();
    let mut maps: Vec<(usize, String, Vec<(usize, Elem, Elem)>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        let ints = |want: usize| -> Result<Vec<usize>, ParseError> {
            if rest.len() != want {
                return Err(err(ln, format!("`{head}` expects {want} argument(s)")));
            }
            rest.iter()
                .map(|t| t.parse::<usize>().map_err(|_| err(ln, format!("`{t}` is not a number"))))
                .collect()
        };
        match head {
            "pomonoid" | "slmonoid" | "posemigroup" => {
                if signature.is_some() {
                    return Err(err(ln, "duplicate header"));
                }
                let sig = match head {
                    "pomonoid" => Signature::Pomonoid,
                    "slmonoid" => Signature::SlMonoid,
                    _ => Signature::Posemigroup,
                };
                let name = rest.join(" ");
                if name.is_empty() {
                    return Err(err(ln, "header needs a name"));
                }
                signature = Some((sig, name));
            }
            "elements" => {
                let v = ints(1)?;
                if v[0] == 0 {
                    return Err(err(ln, "element count must be positive"));
                }
                n = Some(v[0]);
            }
            "unit" => {
                let v = ints(1)?;
                unit = Some(v[0]);
            }
            "le" => {
                let v = ints(2)?;
                le_pairs.push((ln, v[0], v[1]));
            }
            "mult" => {
                let v = ints(3)?;
                mult_lines.push((ln, v[0], v[1], v[2]));
            }
            "join" => {
                let v = ints(3)?;
                join_lines.push((ln, v[0], v[1], v[2]));
            }
            "nucleus" => {
                let name = rest.join(" ");
                if name.is_empty() {
                    return Err(err(ln, "nucleus block needs a name"));
                }
                maps.push((ln, name, Vec::new()));
            }
            "map" => {
                let v = ints(2)?;
                match maps.last_mut() {
                    Some((_, _, entries)) => entries.push((ln, v[0], v[1])),
                    None => return Err(err(ln, "`map` before any `nucleus` header")),
                }
            }
            other => return Err(err(ln, format!("unknown directive `{other}`"))),
        }
    }

    let (sig, name) = signature.ok_or_else(|| err(0, "missing algebra header"))?;
    let n = n.ok_or_else(|| err(0, "missing `elements` directive"))?;
    let check = |ln: usize, id: usize| -> Result<(), ParseError> {
        if id >= n {
            return Err(err(ln, format!("element {id} out of range 0..{n}")));
        }
        Ok(())
    };

    let mut le = vec![false; n * n];
    for i in 0..n {
        le[i * n + i] = true;
    }
    for (ln, i, j) in le_pairs {
        check(ln, i)?;
        check(ln, j)?;
        le[i * n + j] = true;
    }

    let mut mult = vec![usize::MAX; n * n];
    for (ln, i, j, k) in mult_lines {
        check(ln, i)?;
        check(ln, j)?;
        check(ln, k)?;
        mult[i * n + j] = k;
    }
    if let Some(pos) = mult.iter().position(|&v| v == usize::MAX) {
        return Err(err(0, format!("mult table incomplete: missing {}·{}", pos / n, pos % n)));
    }

    let join = if join_lines.is_empty() {
        None
    } else {
        let mut table = vec![usize::MAX; n * n];
        for (ln, i, j, k) in join_lines {
            check(ln, i)?;
            check(ln, j)?;
            check(ln, k)?;
            table[i * n + j] = k;
        }
        if let Some(pos) = table.iter().position(|&v| v == usize::MAX) {
            return Err(err(0, format!("join table incomplete: missing {}∨{}", pos / n, pos % n)));
        }
        Some(table)
    };

    let algebra = FinitePomonoid::from_tables(name, sig, n, le, mult, unit, join)?;

    let mut out_maps = Vec::new();
    for (ln, map_name, entries) in maps {
        let mut table = vec![usize::MAX; n];
        for (mln, i, j) in entries {
            check(mln, i)?;
            check(mln, j)?;
            table[i] = j;
        }
        if let Some(pos) = table.iter().position(|&v| v == usize::MAX) {
            return Err(err(ln, format!("map `{map_name}` missing entry for {pos}")));
        }
        out_maps.push(UnaryMap::new(map_name, table));
    }

    Ok((algebra, out_maps))
}

/// Serialize in the same grammar: header, elements, unit, the non-reflexive
/// order pairs, and the full multiplication (and join) tables.
pub fn serialize_algebra(a: &FinitePomonoid) -> String {
    let mut out = String::new();
    let n = a.n();
    out.push_str(&format!("{} {}\n", a.signature.keyword(), a.name));
    out.push_str(&format!("elements {n}\n"));
    if let Some(u) = a.unit() {
        out.push_str(&format!("unit {u}\n"));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && a.le(i, j) {
                out.push_str(&format!("le {i} {j}\n"));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            out.push_str(&format!("mult {i} {j} {}\n", a.mul(i, j)));
        }
    }
    if a.join(0, 0).is_some() {
        for i in 0..n {
            for j in 0..n {
                out.push_str(&format!("join {i} {j} {}\n", a.join(i, j).unwrap()));
            }
        }
    }
    out
}

/// Serialize an algebra with unary-map blocks appended.
pub fn serialize_algebra_with_maps(a: &FinitePomonoid, maps: &[UnaryMap]) -> String {
    let mut out = serialize_algebra(a);
    for m in maps {
        out.push_str(&format!("nucleus {}\n", m.name));
        for (i, &j) in m.map.iter().enumerate() {
            out.push_str(&format!("map {i} {j}\n"));
        }
    }
    out
}

/// `e` for the empty word, otherwise `[0,2,1]`.
pub fn parse_word(text: &str) -> Result<Word, ParseError> {
    let s = text.trim();
    if s == "e" {
        return Ok(Word::empty());
    }
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| lit_err(text, "expected `e` or `[..]`"))?;
    if inner.trim().is_empty() {
        return Ok(Word::empty());
    }
    let letters = inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| lit_err(text, format!("`{}` is not a letter", t.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Word(letters))
}

/// `e` for the empty word, otherwise `[2,~3,1]` with `~` marking a negative
/// letter.
pub fn parse_signed_word(text: &str) -> Result<SignedWord, ParseError> {
    let s = text.trim();
    if s == "e" {
        return Ok(SignedWord::empty());
    }
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| lit_err(text, "expected `e` or `[..]`"))?;
    if inner.trim().is_empty() {
        return Ok(SignedWord::empty());
    }
    let mut letters = Vec::new();
    for tok in inner.split(',') {
        let t = tok.trim();
        let (body, neg) = match t.strip_prefix('~') {
            Some(rest) => (rest.trim(), true),
            None => (t, false),
        };
        let a = body
            .parse::<usize>()
            .map_err(|_| lit_err(text, format!("`{t}` is not a signed letter")))?;
        letters.push((a, neg));
    }
    Ok(SignedWord::from_letters(letters))
}

/// `{[0],[1,2]}`: a set of word literals. Returned as the raw generator
/// list; normalization against a carrier happens at the point of use.
pub fn parse_antichain(text: &str) -> Result<Vec<Word>, ParseError> {
    let s = text.trim();
    let inner = s
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| lit_err(text, "expected `{..}`"))?;
    let mut words = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in inner.chars() {
        match c {
            '[' => {
                depth += 1;
                cur.push(c);
            }
            ']' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| lit_err(text, "unbalanced `]`"))?;
                cur.push(c);
            }
            ',' if depth == 0 => {
                words.push(cur.clone());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(lit_err(text, "unbalanced `[`"));
    }
    if !cur.trim().is_empty() || !words.is_empty() {
        words.push(cur);
    }
    let mut out = Vec::new();
    for w in words {
        let t = w.trim();
        if t.is_empty() {
            return Err(lit_err(text, "empty member"));
        }
        out.push(parse_word(t)?);
    }
    if out.is_empty() {
        return Err(lit_err(text, "antichains are non-empty"));
    }
    Ok(out)
}

/// `x*y <= z & g(x) <= y => x*x <= z`: premises joined by `&`, one `=>`,
/// products binding tighter than joins, `g(..)` for the closure symbol,
/// `1` for the unit, variables `x`, `y`, `z`, `v3`, `v4`, …
pub fn parse_quasi(text: &str) -> Result<QuasiInequality, ParseError> {
    let (premise_part, conclusion_part) = match text.find("=>") {
        Some(pos) => (Some(&text[..pos]), &text[pos + 2..]),
        None => (None, text),
    };
    let mut premises = Vec::new();
    if let Some(ps) = premise_part {
        for chunk in ps.split('&') {
            premises.push(parse_inequality(chunk)?);
        }
    }
    let conclusion = parse_inequality(conclusion_part)?;
    Ok(QuasiInequality::new(premises, conclusion))
}

pub fn parse_inequality(text: &str) -> Result<Inequality, ParseError> {
    let pos = text
        .find("<=")
        .ok_or_else(|| lit_err(text, "expected `lhs <= rhs`"))?;
    let lhs = parse_term(&text[..pos])?;
    let rhs = parse_term(&text[pos + 2..])?;
    Ok(Inequality::new(lhs, rhs))
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = TermParser { src: text.as_bytes(), pos: 0, whole: text };
    let t = p.join()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(lit_err(text, format!("trailing input at byte {}", p.pos)));
    }
    Ok(t)
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
    whole: &'a str,
}

impl TermParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.pos < self.src.len() && self.src[self.pos] == c {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail(&self, msg: impl Into<String>) -> ParseError {
        lit_err(self.whole, msg)
    }

    fn join(&mut self) -> Result<Term, ParseError> {
        let mut t = self.product()?;
        while self.eat(b'|') {
            t = Term::join(t, self.product()?);
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        while self.eat(b'*') {
            t = Term::mul(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        let Some(&c) = self.src.get(self.pos) else {
            return Err(self.fail("unexpected end of term"));
        };
        match c {
            b'1' => {
                self.pos += 1;
                Ok(Term::One)
            }
            b'(' => {
                self.pos += 1;
                let t = self.join()?;
                if !self.eat(b')') {
                    return Err(self.fail("missing `)`"));
                }
                Ok(t)
            }
            b'g' => {
                self.pos += 1;
                if !self.eat(b'(') {
                    return Err(self.fail("`g` must be applied as `g(..)`"));
                }
                let t = self.join()?;
                if !self.eat(b')') {
                    return Err(self.fail("missing `)` after `g(`"));
                }
                Ok(Term::gamma(t))
            }
            b'x' => {
                self.pos += 1;
                Ok(Term::Var(0))
            }
            b'y' => {
                self.pos += 1;
                Ok(Term::Var(1))
            }
            b'z' => {
                self.pos += 1;
                Ok(Term::Var(2))
            }
            b'v' => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.fail("`v` must be followed by an index"));
                }
                let idx: usize = self.whole[start..self.pos]
                    .parse()
                    .map_err(|_| self.fail("variable index out of range"))?;
                Ok(Term::Var(idx))
            }
            other => Err(self.fail(format!("unexpected character `{}`", other as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN2: &str = "\
# two-element chain with meet as product
pomonoid bool-meet
elements 2
unit 1
le 0 1
mult 0 0 0
mult 0 1 0
mult 1 0 0
mult 1 1 1
";

    #[test]
    fn parse_and_reserialize_round_trip() {
        let (a, maps) = parse_algebra(CHAIN2).unwrap();
        assert_eq!(a.n(), 2);
        assert_eq!(a.unit(), Some(1));
        assert!(a.le(0, 1));
        assert!(!a.le(1, 0));
        assert_eq!(a.mul(1, 0), 0);
        assert!(maps.is_empty());
        let text = serialize_algebra(&a);
        let (b, _) = parse_algebra(&text).unwrap();
        assert_eq!(a, b);
        // serialization is stable
        assert_eq!(text, serialize_algebra(&b));
    }

    #[test]
    fn reflexive_le_lines_are_tolerated() {
        let text = CHAIN2.replace("le 0 1", "le 0 1\nle 0 0\nle 1 1");
        let (a, _) = parse_algebra(&text).unwrap();
        let (b, _) = parse_algebra(CHAIN2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nucleus_blocks_parse_and_round_trip() {
        let text = format!("{CHAIN2}nucleus top\nmap 0 1\nmap 1 1\n");
        let (a, maps) = parse_algebra(&text).unwrap();
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].name, "top");
        assert_eq!(maps[0].map, vec![1, 1]);
        let again = serialize_algebra_with_maps(&a, &maps);
        let (b, maps2) = parse_algebra(&again).unwrap();
        assert_eq!(a, b);
        assert_eq!(maps2[0].map, maps[0].map);
    }

    #[test]
    fn malformed_directives_are_rejected_with_line_numbers() {
        let missing = "pomonoid p\nelements 2\nunit 0\nmult 0 0 0\n";
        assert!(parse_algebra(missing).is_err());
        let unknown = format!("{CHAIN2}frobnicate 1\n");
        let e = parse_algebra(&unknown).unwrap_err();
        assert!(e.to_string().contains("unknown directive"));
        let out_of_range = CHAIN2.replace("mult 1 1 1", "mult 1 1 7");
        assert!(parse_algebra(&out_of_range).is_err());
    }

    #[test]
    fn word_literals() {
        assert_eq!(parse_word("e").unwrap(), Word::empty());
        assert_eq!(parse_word("[3]").unwrap(), Word(vec![3]));
        assert_eq!(parse_word("[0, 2,1]").unwrap(), Word(vec![0, 2, 1]));
        assert_eq!(parse_word("[0,2,1]").unwrap().to_string(), "[0,2,1]");
        assert!(parse_word("0,1").is_err());
        assert!(parse_word("[a]").is_err());
    }

    #[test]
    fn signed_word_literals() {
        let w = parse_signed_word("[2,~3,1]").unwrap();
        assert_eq!(w.letters(), &[(2, false), (3, true), (1, false)]);
        assert_eq!(w.to_string(), "[2,~3,1]");
        assert_eq!(parse_signed_word("e").unwrap(), SignedWord::empty());
        assert!(parse_signed_word("[~~1]").is_err());
    }

    #[test]
    fn antichain_literals() {
        let gens = parse_antichain("{[0],[1,2]}").unwrap();
        assert_eq!(gens, vec![Word(vec![0]), Word(vec![1, 2])]);
        let single = parse_antichain("{e}").unwrap();
        assert_eq!(single, vec![Word::empty()]);
        assert!(parse_antichain("{}").is_err());
        assert!(parse_antichain("[0]").is_err());
    }

    #[test]
    fn quasi_inequality_round_trip() {
        let q = parse_quasi("x*y <= z & g(x) <= y => x*x <= z").unwrap();
        assert_eq!(q.premises.len(), 2);
        assert_eq!(q.to_string(), "x*y <= z & g(x) <= y => x*x <= z");
        let reparsed = parse_quasi(&q.to_string()).unwrap();
        assert_eq!(reparsed, q);
        // precedence: * over |, parentheses override
        let t = parse_term("x*(y|z)|1").unwrap();
        assert_eq!(t.to_string(), "x*(y|z)|1");
        let u = parse_term("x*y|z").unwrap();
        assert_eq!(u.to_string(), "x*y|z");
        // no premises: bare inequality
        let bare = parse_quasi("g(v3) <= 1").unwrap();
        assert!(bare.premises.is_empty());
        assert_eq!(bare.to_string(), "g(v3) <= 1");
        assert!(parse_quasi("x <= ").is_err());
        assert!(parse_term("x+y").is_err());
    }
}
