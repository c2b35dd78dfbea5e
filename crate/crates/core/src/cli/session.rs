//! Session files: named alphabets, substitutions, basis maps and graph maps.
//!
//! ```text
//! # comments run to the end of the line
//! alphabet abcd: a b c d
//!
//! subst fib
//!   a -> a b
//!   b -> a
//!
//! autom mixed over abcd
//!   heights a:1 b:2 c:3 d:3
//!   a -> a
//!   b -> b a
//!   c -> c b c d
//!   d -> c
//!
//! graphmap cover
//!   vertices: v0 v1
//!   edge y v0 v1 height 1
//!   vmap v0 -> v0
//!   map y -> y
//! ```
//!
//! A section runs until the next header. Rule lines are `letter -> word`;
//! without `over`, the alphabet is the rule letters in order. `autom` also
//! accepts `rank r`. Basis-map and graph-map images are freely reduced on
//! load, with a warning.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::automorphisms::BasisMap;
use crate::error::{Error, Result};
use crate::graphmap::{Graph, StratifiedGraphMap};
use crate::substitutions::Substitution;
use crate::words::{reduce, InverseAlphabet, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetDef {
    pub name: String,
    pub alphabet: InverseAlphabet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstDef {
    pub name: String,
    pub over: Option<String>,
    pub substitution: Substitution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomDef {
    pub name: String,
    pub over: Option<String>,
    pub rank: Option<usize>,
    pub heights: Option<Vec<usize>>,
    pub map: BasisMap,
}

impl AutomDef {
    /// The rose map carrying the declared heights.
    pub fn rose(&self) -> Result<StratifiedGraphMap> {
        let heights = self.heights.clone().ok_or_else(|| {
            Error::InvalidArgument(format!("autom `{}` declares no heights", self.name))
        })?;
        StratifiedGraphMap::rose(&self.map, heights)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMapDef {
    pub name: String,
    pub map: StratifiedGraphMap,
    /// Per edge, whether the file gave its height.
    pub explicit_heights: Vec<bool>,
    /// Per vertex, whether the file gave a `vmap` line.
    pub explicit_vmap: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Alphabet(AlphabetDef),
    Subst(SubstDef),
    Autom(AutomDef),
    GraphMap(GraphMapDef),
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Alphabet(d) => &d.name,
            Item::Subst(d) => &d.name,
            Item::Autom(d) => &d.name,
            Item::GraphMap(d) => &d.name,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Item::Alphabet(_) => "alphabet",
            Item::Subst(_) => "subst",
            Item::Autom(_) => "autom",
            Item::GraphMap(_) => "graphmap",
        }
    }
}

/// Parsed session: definitions in file order plus load-time warnings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Session {
    items: Vec<Item>,
    index: HashMap<String, usize>,
    warnings: Vec<String>,
}

impl Session {
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn get(&self, name: &str) -> Result<&Item> {
        self.index
            .get(name)
            .map(|&i| &self.items[i])
            .ok_or_else(|| Error::InvalidArgument(format!("nothing named `{name}` in the session")))
    }

    pub fn alphabet(&self, name: &str) -> Result<&InverseAlphabet> {
        match self.get(name)? {
            Item::Alphabet(d) => Ok(&d.alphabet),
            Item::Subst(d) => Ok(d.substitution.alphabet()),
            Item::Autom(d) => Ok(d.map.alphabet()),
            Item::GraphMap(d) => Ok(d.map.graph().edges()),
        }
    }

    pub fn subst(&self, name: &str) -> Result<&SubstDef> {
        match self.get(name)? {
            Item::Subst(d) => Ok(d),
            other => Err(wrong_kind(name, other, "subst")),
        }
    }

    pub fn autom(&self, name: &str) -> Result<&AutomDef> {
        match self.get(name)? {
            Item::Autom(d) => Ok(d),
            other => Err(wrong_kind(name, other, "autom")),
        }
    }

    /// A graph map, or the rose map of an `autom` with heights.
    pub fn graph_map(&self, name: &str) -> Result<StratifiedGraphMap> {
        match self.get(name)? {
            Item::GraphMap(d) => Ok(d.map.clone()),
            Item::Autom(d) => d.rose(),
            other => Err(wrong_kind(name, other, "graphmap")),
        }
    }

    /// Canonical text: one blank line between sections, two-space indented
    /// bodies, words in token form. Comments are not kept.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            dump_item(item, &mut out);
        }
        out
    }

    fn insert(&mut self, item: Item, line: usize) -> Result<()> {
        let name = item.name().to_string();
        if self.index.contains_key(&name) {
            return Err(parse_error(line, 1, format!("`{name}` is already defined")));
        }
        self.index.insert(name, self.items.len());
        self.items.push(item);
        Ok(())
    }
}

fn wrong_kind(name: &str, item: &Item, want: &str) -> Error {
    Error::InvalidArgument(format!("`{name}` is a {}, not a {want}", item.kind()))
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn dump_item(item: &Item, out: &mut String) {
    match item {
        Item::Alphabet(d) => {
            let _ = writeln!(out, "alphabet {}: {}", d.name, d.alphabet.names().join(" "));
        }
        Item::Subst(d) => {
            let _ = writeln!(out, "subst {}{}", d.name, over_suffix(&d.over));
            let s = &d.substitution;
            for l in s.alphabet().positive_letters() {
                let _ = writeln!(
                    out,
                    "  {} -> {}",
                    s.alphabet().name(l),
                    s.alphabet().format_tokens(s.image(l))
                );
            }
        }
        Item::Autom(d) => {
            let _ = writeln!(out, "autom {}{}", d.name, over_suffix(&d.over));
            let a = d.map.alphabet();
            if let Some(r) = d.rank {
                let _ = writeln!(out, "  rank {r}");
            }
            if let Some(h) = &d.heights {
                let parts: Vec<String> = a
                    .positive_letters()
                    .map(|l| format!("{}:{}", a.name(l), h[l.symbol()]))
                    .collect();
                let _ = writeln!(out, "  heights {}", parts.join(" "));
            }
            for l in a.positive_letters() {
                let _ = writeln!(
                    out,
                    "  {} -> {}",
                    a.name(l),
                    a.format_tokens(&d.map.image(l))
                );
            }
        }
        Item::GraphMap(d) => {
            let f = &d.map;
            let g = f.graph();
            let _ = writeln!(out, "graphmap {}", d.name);
            let _ = writeln!(out, "  vertices: {}", g.vertices().join(" "));
            for l in g.edges().positive_letters() {
                let _ = write!(
                    out,
                    "  edge {} {} {}",
                    g.edges().name(l),
                    g.vertices()[g.initial(l)],
                    g.vertices()[g.terminal(l)],
                );
                if d.explicit_heights[l.symbol()] {
                    let _ = write!(out, " height {}", f.height(l));
                }
                out.push('\n');
            }
            for (v, name) in g.vertices().iter().enumerate() {
                if d.explicit_vmap[v] {
                    let _ = writeln!(out, "  vmap {name} -> {}", g.vertices()[f.vertex_image(v)]);
                }
            }
            for l in g.edges().positive_letters() {
                let _ = writeln!(
                    out,
                    "  map {} -> {}",
                    g.edges().name(l),
                    g.edges().format_tokens(&f.image(l))
                );
            }
        }
    }
}

fn over_suffix(over: &Option<String>) -> String {
    over.as_ref()
        .map(|a| format!(" over {a}"))
        .unwrap_or_default()
}

/// A whitespace-separated token with its 1-based column.
#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

#[derive(Clone, Debug)]
struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn new(number: usize, raw: &'a str) -> Self {
        let text = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, c) in text.char_indices() {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &text[s..i],
                        column: text[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            tokens.push(Token {
                text: &text[s..],
                column: text[..s].chars().count() + 1,
            });
        }
        Line {
            number,
            text,
            tokens,
        }
    }

    fn error(&self, column: usize, message: impl Into<String>) -> Error {
        parse_error(self.number, column, message)
    }

    fn at(&self, token: Token<'_>, message: impl Into<String>) -> Error {
        self.error(token.column, message)
    }

    /// Text after the token at `index`, for word right-hand sides.
    fn rest_after(&self, index: usize) -> (&'a str, usize) {
        let t = self.tokens[index];
        let byte = char_to_byte(self.text, t.column - 1) + t.text.len();
        let rest = &self.text[byte..];
        let column = self
            .tokens
            .get(index + 1)
            .map_or(t.column + t.text.chars().count(), |n| n.column);
        (rest.trim(), column)
    }

    /// `lhs -> rhs` with the arrow as the token at `arrow`.
    fn rule(&self, arrow: usize) -> Result<(Token<'a>, &'a str, usize)> {
        match self.tokens.get(arrow) {
            Some(t) if t.text == "->" => {}
            Some(t) => return Err(self.at(*t, "expected `->`")),
            None => return Err(self.error(self.text.chars().count() + 1, "expected `->`")),
        }
        let lhs = self.tokens[arrow - 1];
        let (rhs, column) = self.rest_after(arrow);
        if rhs.is_empty() {
            return Err(self.error(column, "missing image (write `1` for the empty word)"));
        }
        Ok((lhs, rhs, column))
    }
}

fn char_to_byte(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map_or(s.len(), |(i, _)| i)
}

const HEADERS: [&str; 4] = ["alphabet", "subst", "autom", "graphmap"];

fn is_header(line: &Line<'_>) -> bool {
    match line.tokens.first() {
        Some(t) if HEADERS.contains(&t.text) => line.tokens.get(1).is_some_and(|t| t.text != "->"),
        _ => false,
    }
}

/// Parses a session from text.
pub fn parse_session(text: &str) -> Result<Session> {
    let lines: Vec<Line<'_>> = text
        .lines()
        .enumerate()
        .map(|(i, raw)| Line::new(i + 1, raw))
        .filter(|l| !l.tokens.is_empty())
        .collect();
    let mut session = Session::default();
    let mut i = 0;
    while i < lines.len() {
        let header = &lines[i];
        if !is_header(header) {
            let t = header.tokens[0];
            return Err(header.at(
                t,
                format!(
                    "expected a section header ({}), found `{}`",
                    HEADERS.join(", "),
                    t.text
                ),
            ));
        }
        let mut j = i + 1;
        while j < lines.len() && !is_header(&lines[j]) {
            j += 1;
        }
        let body = &lines[i + 1..j];
        let item = match header.tokens[0].text {
            "alphabet" => parse_alphabet(header, body)?,
            "subst" => parse_subst(&session, header, body)?,
            "autom" => parse_autom(&mut session, header, body)?,
            _ => parse_graphmap(&mut session, header, body)?,
        };
        session.insert(item, header.number)?;
        i = j;
    }
    Ok(session)
}

fn check_name(line: &Line<'_>, token: Token<'_>) -> Result<String> {
    let name = token.text.trim_end_matches(':');
    if name.is_empty() || name.contains(['(', ')', '^', ',', ':']) {
        return Err(line.at(token, format!("invalid name `{}`", token.text)));
    }
    Ok(name.to_string())
}

fn parse_alphabet(header: &Line<'_>, body: &[Line<'_>]) -> Result<Item> {
    if let Some(l) = body.first() {
        return Err(l.at(l.tokens[0], "an alphabet section has no body"));
    }
    let name_token = header.tokens[1];
    let (name, letters): (String, Vec<Token<'_>>) = if name_token.text.ends_with(':') {
        (check_name(header, name_token)?, header.tokens[2..].to_vec())
    } else {
        match header.tokens.get(2) {
            Some(t) if t.text == ":" => {
                (check_name(header, name_token)?, header.tokens[3..].to_vec())
            }
            _ => return Err(header.at(name_token, "expected `alphabet <name>: <letters>`")),
        }
    };
    if letters.is_empty() {
        return Err(header.error(header.text.chars().count() + 1, "alphabet has no letters"));
    }
    let names: Vec<&str> = letters.iter().map(|t| t.text).collect();
    let alphabet = InverseAlphabet::new(&names).map_err(|e| {
        let bad = match &e {
            Error::InvalidName(n) | Error::DuplicateName(n) => {
                letters.iter().rev().find(|t| t.text == n)
            }
            _ => None,
        };
        header.error(bad.map_or(letters[0].column, |t| t.column), e.to_string())
    })?;
    Ok(Item::Alphabet(AlphabetDef { name, alphabet }))
}

/// `<kind> <name> [over <alphabet>]`
fn parse_map_header<'s>(
    session: &'s Session,
    header: &Line<'_>,
) -> Result<(String, Option<(String, &'s InverseAlphabet)>)> {
    let name = check_name(header, header.tokens[1])?;
    match header.tokens.get(2..) {
        Some([]) | None => Ok((name, None)),
        Some([kw, alph]) if kw.text == "over" => {
            let alphabet = session
                .alphabet(alph.text)
                .map_err(|_| header.at(*alph, format!("undefined alphabet `{}`", alph.text)))?;
            Ok((name, Some((alph.text.to_string(), alphabet))))
        }
        Some(rest) => Err(header.at(rest[0], "expected `over <alphabet>` or end of line")),
    }
}

struct Rules<'a> {
    alphabet: InverseAlphabet,
    images: Vec<(Word, usize, usize)>,
    extras: Vec<&'a Line<'a>>,
}

/// Collects `x -> w` lines into images indexed by symbol; other lines are
/// returned to the caller.
fn collect_rules<'a>(
    header: &Line<'_>,
    body: &'a [Line<'a>],
    fixed: Option<&InverseAlphabet>,
    is_extra: impl Fn(&Line<'_>) -> bool,
) -> Result<Rules<'a>> {
    let mut extras = Vec::new();
    let mut rules = Vec::new();
    for line in body {
        if is_extra(line) {
            extras.push(line);
            continue;
        }
        if line.tokens.len() < 2 {
            return Err(line.error(line.text.chars().count() + 1, "expected `letter -> word`"));
        }
        let (lhs, rhs, column) = line.rule(1)?;
        rules.push((line, lhs, rhs, column));
    }
    let alphabet = match fixed {
        Some(a) => a.clone(),
        None => {
            let names: Vec<&str> = rules.iter().map(|r| r.1.text).collect();
            if names.is_empty() {
                return Err(header.error(1, "section defines no rules"));
            }
            InverseAlphabet::new(&names).map_err(|e| {
                let bad = match &e {
                    Error::InvalidName(n) | Error::DuplicateName(n) => {
                        rules.iter().rev().find(|r| r.1.text == n)
                    }
                    _ => None,
                };
                match bad {
                    Some(r) => r.0.at(r.1, e.to_string()),
                    None => header.error(1, e.to_string()),
                }
            })?
        }
    };
    let mut images: Vec<Option<(Word, usize, usize)>> = vec![None; alphabet.rank()];
    for (line, lhs, rhs, column) in rules {
        let l = alphabet.letter(lhs.text).ok_or_else(|| {
            line.at(
                lhs,
                format!("`{}` is not a letter of the alphabet", lhs.text),
            )
        })?;
        if images[l.symbol()].is_some() {
            return Err(line.at(lhs, format!("second rule for `{}`", lhs.text)));
        }
        let w = alphabet
            .parse_word(rhs)
            .map_err(|e| line.error(column, e.to_string()))?;
        images[l.symbol()] = Some((w, line.number, column));
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(s, w)| {
            w.ok_or_else(|| {
                header.error(
                    1,
                    format!("no rule for `{}`", alphabet.name(Letter::new(s, false))),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Rules {
        alphabet,
        images,
        extras,
    })
}

fn parse_subst(session: &Session, header: &Line<'_>, body: &[Line<'_>]) -> Result<Item> {
    let (name, over) = parse_map_header(session, header)?;
    let rules = collect_rules(header, body, over.as_ref().map(|o| o.1), |_| false)?;
    let images = rules.images.into_iter().map(|w| w.0).collect();
    let substitution =
        Substitution::new(rules.alphabet, images).map_err(|e| header.error(1, e.to_string()))?;
    Ok(Item::Subst(SubstDef {
        name,
        over: over.map(|o| o.0),
        substitution,
    }))
}

fn reduce_with_warning(session: &mut Session, w: Word, line: usize, what: &str) -> Word {
    let reduced = reduce(&w).into_word();
    if reduced.len() != w.len() {
        session.warnings.push(format!(
            "line {line}: {what} is not freely reduced; using its reduction ({} of {} letters kept)",
            reduced.len(),
            w.len()
        ));
    }
    reduced
}

fn parse_autom(session: &mut Session, header: &Line<'_>, body: &[Line<'_>]) -> Result<Item> {
    let (name, over) = parse_map_header(session, header)?;
    let over = over.map(|(n, a)| (n, a.clone()));
    let rules = collect_rules(header, body, over.as_ref().map(|o| &o.1), |l| {
        matches!(l.tokens[0].text, "rank" | "heights")
            && l.tokens.get(1).is_none_or(|t| t.text != "->")
    })?;
    let alphabet = rules.alphabet;
    let mut rank = None;
    let mut heights = None;
    for line in rules.extras {
        match line.tokens[0].text {
            "rank" => {
                let t = *line
                    .tokens
                    .get(1)
                    .ok_or_else(|| line.error(5, "expected `rank <r>`"))?;
                let r: usize = t
                    .text
                    .parse()
                    .map_err(|_| line.at(t, "rank must be a number"))?;
                if r != alphabet.rank() {
                    return Err(line.at(
                        t,
                        format!("rank {r} does not match the {} rules", alphabet.rank()),
                    ));
                }
                rank = Some(r);
            }
            _ => heights = Some(parse_heights(line, &alphabet)?),
        }
    }
    let mut images = Vec::new();
    for (s, (w, line, _)) in rules.images.into_iter().enumerate() {
        let what = format!("image of `{}`", alphabet.name(Letter::new(s, false)));
        images.push(reduce_with_warning(session, w, line, &what));
    }
    let map = BasisMap::new(alphabet, images).map_err(|e| header.error(1, e.to_string()))?;
    let def = AutomDef {
        name,
        over: over.map(|o| o.0),
        rank,
        heights,
        map,
    };
    if def.heights.is_some() {
        def.rose().map_err(|e| header.error(1, e.to_string()))?;
    }
    Ok(Item::Autom(def))
}

fn parse_heights(line: &Line<'_>, alphabet: &InverseAlphabet) -> Result<Vec<usize>> {
    let mut heights = vec![None; alphabet.rank()];
    for t in &line.tokens[1..] {
        let (letter, h) = t
            .text
            .split_once(':')
            .ok_or_else(|| line.at(*t, "expected `letter:height`"))?;
        let l = alphabet
            .letter(letter)
            .ok_or_else(|| line.at(*t, format!("unknown letter `{letter}`")))?;
        let h: usize = h
            .parse()
            .ok()
            .filter(|&h| h > 0)
            .ok_or_else(|| line.at(*t, "height must be a positive integer"))?;
        if heights[l.symbol()].replace(h).is_some() {
            return Err(line.at(*t, format!("second height for `{letter}`")));
        }
    }
    heights
        .into_iter()
        .enumerate()
        .map(|(s, h)| {
            h.ok_or_else(|| {
                line.error(
                    1,
                    format!("no height for `{}`", alphabet.name(Letter::new(s, false))),
                )
            })
        })
        .collect()
}

fn parse_graphmap(session: &mut Session, header: &Line<'_>, body: &[Line<'_>]) -> Result<Item> {
    let name = check_name(header, header.tokens[1])?;
    if let Some(t) = header.tokens.get(2) {
        return Err(header.at(*t, "unexpected text after the graph map name"));
    }
    let mut vertices: Option<Vec<String>> = None;
    let mut edges: Vec<(String, usize, usize)> = Vec::new();
    let mut edge_lines = Vec::new();
    let mut heights = Vec::new();
    let mut explicit_heights = Vec::new();
    let mut vmap_lines = Vec::new();
    let mut map_lines = Vec::new();
    for line in body {
        let first = line.tokens[0];
        match first.text {
            "vertices:" => {
                if vertices.is_some() {
                    return Err(line.at(first, "vertices declared twice"));
                }
                vertices = Some(
                    line.tokens[1..]
                        .iter()
                        .map(|t| t.text.to_string())
                        .collect(),
                );
            }
            "edge" => {
                let vs = vertices
                    .as_ref()
                    .ok_or_else(|| line.at(first, "declare `vertices:` before edges"))?;
                let t = &line.tokens;
                if !(t.len() == 4 || (t.len() == 6 && t[4].text == "height")) {
                    return Err(line.at(first, "expected `edge <name> <from> <to> height <h>`"));
                }
                let vertex = |tok: Token<'_>| {
                    vs.iter()
                        .position(|v| v == tok.text)
                        .ok_or_else(|| line.at(tok, format!("unknown vertex `{}`", tok.text)))
                };
                let (from, to) = (vertex(t[2])?, vertex(t[3])?);
                let h = match t.get(5) {
                    Some(ht) => ht
                        .text
                        .parse::<usize>()
                        .ok()
                        .filter(|&h| h > 0)
                        .ok_or_else(|| line.at(*ht, "height must be a positive integer"))?,
                    None => 1,
                };
                explicit_heights.push(t.len() == 6);
                edges.push((t[1].text.to_string(), from, to));
                edge_lines.push(line);
                heights.push(h);
            }
            "vmap" => vmap_lines.push(line),
            "map" => map_lines.push(line),
            _ => {
                return Err(line.at(
                    first,
                    format!(
                        "expected `vertices:`, `edge`, `vmap` or `map`, found `{}`",
                        first.text
                    ),
                ))
            }
        }
    }
    let vertices = vertices.ok_or_else(|| header.error(1, "graph map declares no vertices"))?;
    let graph = Graph::new(&vertices, &edges).map_err(|e| {
        let at = match &e {
            Error::InvalidName(n) | Error::DuplicateName(n) => edge_lines
                .iter()
                .rev()
                .find(|l| l.tokens[1].text == n)
                .map(|l| l.at(l.tokens[1], e.to_string())),
            _ => None,
        };
        at.unwrap_or_else(|| header.error(1, e.to_string()))
    })?;
    let mut vmap: Vec<Option<usize>> = vec![None; vertices.len()];
    for line in vmap_lines {
        let (lhs, rhs, column) = line.rule(2)?;
        let v = graph
            .vertex(lhs.text)
            .ok_or_else(|| line.at(lhs, format!("unknown vertex `{}`", lhs.text)))?;
        let w = graph
            .vertex(rhs)
            .ok_or_else(|| line.error(column, format!("unknown vertex `{rhs}`")))?;
        if vmap[v].replace(w).is_some() {
            return Err(line.at(lhs, format!("second vmap for `{}`", lhs.text)));
        }
    }
    let explicit_vmap: Vec<bool> = vmap.iter().map(Option::is_some).collect();
    let vmap: Vec<usize> = vmap
        .into_iter()
        .enumerate()
        .map(|(v, w)| w.unwrap_or(v))
        .collect();
    let mut images: Vec<Option<Word>> = vec![None; graph.edge_count()];
    for line in map_lines {
        let (lhs, rhs, column) = line.rule(2)?;
        let e = graph
            .edges()
            .letter(lhs.text)
            .ok_or_else(|| line.at(lhs, format!("unknown edge `{}`", lhs.text)))?;
        let w = graph
            .edges()
            .parse_word(rhs)
            .map_err(|err| line.error(column, err.to_string()))?;
        let w = reduce_with_warning(session, w, line.number, &format!("image of `{}`", lhs.text));
        if images[e.symbol()].replace(w).is_some() {
            return Err(line.at(lhs, format!("second map for `{}`", lhs.text)));
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(s, w)| {
            w.ok_or_else(|| {
                header.error(
                    1,
                    format!(
                        "no map for edge `{}`",
                        graph.edges().name(Letter::new(s, false))
                    ),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let map = StratifiedGraphMap::new(graph, heights, vmap, images)
        .map_err(|e| header.error(1, e.to_string()))?;
    Ok(Item::GraphMap(GraphMapDef {
        name,
        map,
        explicit_heights,
        explicit_vmap,
    }))
}
