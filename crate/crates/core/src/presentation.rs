//! Monoid presentations: parsing and bounded realization as finite tables.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! presentation ::= gens "|" [ rel { ";" rel } ]
//! gens         ::= [ name { "," name } ]
//! rel          ::= word "=" word
//! word         ::= name { name } | "1"
//! ```
//!
//! When every generator name is a single character, a word may also be
//! written without spaces (`fef`).

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::monoid::{verify_monoid_axioms, FiniteMonoid};

pub type Word = Vec<usize>;

/// Rewrite rules completion may produce.
pub const DEFAULT_REWRITE_BUDGET: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("bounds exceeded: {} elements found, frontier {}", .0.elements_found, .0.frontier_size)]
    BoundExceeded(Box<GrowthDiagnostic>),
    #[error("completion stopped at {budget} rewrite rules and the partial table is not sound: {reason}")]
    RewriteBudgetExceeded { budget: usize, reason: String },
    #[error("realized table is unsound: {0}")]
    Unsound(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relations: Vec<(Word, Word)>,
}

/// Element-count growth recorded when a realization does not close.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthDiagnostic {
    pub elements_found: usize,
    pub frontier_size: usize,
    pub max_elements: usize,
    pub max_word_length: usize,
    /// `growth[k]` = number of normal forms of length `k`.
    pub growth: Vec<usize>,
    /// Normal forms found, in shortlex order.
    pub normal_forms: Vec<String>,
    /// Whether completion finished, so that distinct normal forms are
    /// distinct elements.
    pub rules_confluent: bool,
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub monoid: FiniteMonoid,
    /// Shortlex-least word for each element, indexed like the monoid.
    pub normal_forms: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(String),
    Comma,
    Bar,
    Semi,
    Eq,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, PresentationError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            ',' | '|' | ';' | '=' => {
                chars.next();
                out.push((
                    pos,
                    match c {
                        ',' => Token::Comma,
                        '|' => Token::Bar,
                        ';' => Token::Semi,
                        _ => Token::Eq,
                    },
                ));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((pos, Token::Name(name)));
            }
            other => {
                return Err(PresentationError::Syntax {
                    position: pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let tokens = tokenize(text)?;
    let end = text.len();
    let syntax = |position: usize, message: &str| PresentationError::Syntax {
        position,
        message: message.to_string(),
    };
    let bar = tokens
        .iter()
        .position(|(_, t)| *t == Token::Bar)
        .ok_or_else(|| syntax(end, "expected `|` after the generator list"))?;

    let mut generators: Vec<String> = Vec::new();
    let mut expect_name = true;
    for (pos, tok) in &tokens[..bar] {
        match (tok, expect_name) {
            (Token::Name(n), true) => {
                if n == "1" || n.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(syntax(*pos, "generator names cannot start with a digit"));
                }
                if generators.contains(n) {
                    return Err(PresentationError::DuplicateGenerator(n.clone()));
                }
                generators.push(n.clone());
                expect_name = false;
            }
            (Token::Comma, false) => expect_name = true,
            _ => return Err(syntax(*pos, "malformed generator list")),
        }
    }
    if expect_name && !generators.is_empty() {
        return Err(syntax(tokens[bar].0, "trailing comma in generator list"));
    }

    let single_chars = !generators.is_empty() && generators.iter().all(|g| g.chars().count() == 1);
    let lookup = |name: &str| -> Result<Word, PresentationError> {
        if name == "1" {
            return Ok(Vec::new());
        }
        if let Some(i) = generators.iter().position(|g| g == name) {
            return Ok(vec![i]);
        }
        if single_chars {
            let split: Option<Word> = name
                .chars()
                .map(|c| generators.iter().position(|g| g.starts_with(c)))
                .collect();
            if let Some(w) = split {
                return Ok(w);
            }
        }
        Err(PresentationError::UnknownGenerator(name.to_string()))
    };

    let mut relations = Vec::new();
    let rest = &tokens[bar + 1..];
    for chunk in rest.split(|(_, t)| *t == Token::Semi) {
        if chunk.is_empty() {
            continue;
        }
        let eq = chunk
            .iter()
            .position(|(_, t)| *t == Token::Eq)
            .ok_or_else(|| syntax(chunk[0].0, "relation needs `=`"))?;
        let word = |part: &[(usize, Token)], at: usize| -> Result<Word, PresentationError> {
            if part.is_empty() {
                return Err(syntax(at, "empty side of a relation (write `1` for the identity)"));
            }
            let mut w = Vec::new();
            for (pos, tok) in part {
                match tok {
                    Token::Name(n) => w.extend(lookup(n)?),
                    _ => return Err(syntax(*pos, "unexpected token in word")),
                }
            }
            Ok(w)
        };
        let lhs = word(&chunk[..eq], chunk[eq].0)?;
        let rhs = word(&chunk[eq + 1..], chunk[eq].0 + 1)?;
        relations.push((lhs, rhs));
    }
    Ok(Presentation {
        generators,
        relations,
    })
}

fn shortlex_less(a: &[usize], b: &[usize]) -> bool {
    (a.len(), a) < (b.len(), b)
}

impl Presentation {
    pub fn render_word(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let sep = if self.generators.iter().all(|g| g.chars().count() == 1) {
            ""
        } else {
            " "
        };
        w.iter()
            .map(|&g| self.generators[g].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Relations oriented as rewrite rules, larger side (shortlex) first.
    fn rules(&self) -> Vec<(Word, Word)> {
        self.relations
            .iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| {
                if shortlex_less(v, u) {
                    (u.clone(), v.clone())
                } else {
                    (v.clone(), u.clone())
                }
            })
            .collect()
    }
}

/// Rewrites leftmost-first until no rule applies. Each step strictly
/// decreases the word in shortlex order, so this terminates.
fn reduce(rules: &[(Word, Word)], mut w: Word) -> Word {
    'outer: loop {
        for start in 0..w.len() {
            for (lhs, rhs) in rules {
                if w[start..].starts_with(lhs) {
                    w.splice(start..start + lhs.len(), rhs.iter().copied());
                    continue 'outer;
                }
            }
        }
        return w;
    }
}

/// Rules `(l, r)` and `(l', r')` overlapping on a proper suffix/prefix, or
/// with `l'` inside `l`, give two one-step rewrites of a common word.
fn critical_pairs(a: &(Word, Word), b: &(Word, Word)) -> Vec<(Word, Word)> {
    let (l1, r1) = a;
    let (l2, r2) = b;
    let mut out = Vec::new();
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            let mut x = r1.clone();
            x.extend_from_slice(&l2[k..]);
            let mut y = l1[..l1.len() - k].to_vec();
            y.extend_from_slice(r2);
            out.push((x, y));
        }
    }
    if l2.len() <= l1.len() && a != b {
        for start in 0..=l1.len() - l2.len() {
            if l1[start..].starts_with(l2) {
                let mut y = l1[..start].to_vec();
                y.extend_from_slice(r2);
                y.extend_from_slice(&l1[start + l2.len()..]);
                out.push((r1.clone(), y));
            }
        }
    }
    out
}

/// Knuth-Bendix completion under shortlex, stopping once `max_rules` rules
/// exist. Rules longer than `max_len` are not added. Returns the rules and
/// whether the system is known to be confluent.
fn complete(initial: Vec<(Word, Word)>, max_rules: usize, max_len: usize) -> (Vec<(Word, Word)>, bool) {
    let mut rules = initial;
    let mut confluent = true;
    let mut checked = 0;
    let mut i = 0;
    while i < rules.len() {
        for j in 0..=i {
            for (x, y) in critical_pairs(&rules[i], &rules[j])
                .into_iter()
                .chain(critical_pairs(&rules[j], &rules[i]))
            {
                let x = reduce(&rules, x);
                let y = reduce(&rules, y);
                if x == y {
                    continue;
                }
                let rule = if shortlex_less(&y, &x) { (x, y) } else { (y, x) };
                if rules.len() >= max_rules || rule.0.len() > max_len {
                    confluent = false;
                    continue;
                }
                rules.push(rule);
            }
        }
        checked += 1;
        i = checked;
    }
    (rules, confluent)
}

/// Enumerates irreducible words breadth-first in shortlex order under a
/// completed rewriting system and closes the right Cayley table.
///
/// Succeeds only if the table closes with at most `max_elements` elements,
/// all normal forms have length at most `max_word_length`, and the resulting
/// table is an associative monoid satisfying every relation. `budget` caps
/// the number of rewrite rules produced by completion.
pub fn realize(
    p: &Presentation,
    max_elements: usize,
    max_word_length: usize,
) -> Result<Realization, PresentationError> {
    realize_with_budget(p, max_elements, max_word_length, DEFAULT_REWRITE_BUDGET)
}

pub fn realize_with_budget(
    p: &Presentation,
    max_elements: usize,
    max_word_length: usize,
    budget: usize,
) -> Result<Realization, PresentationError> {
    assert!(max_elements > 0 && max_word_length > 0, "bounds must be positive");
    let slack = p
        .relations
        .iter()
        .map(|(u, v)| u.len().max(v.len()))
        .max()
        .unwrap_or(0);
    let (rules, confluent) = complete(p.rules(), budget, 2 * (max_word_length + slack));
    let mut index: HashMap<Word, usize> = HashMap::from([(Vec::new(), 0)]);
    let ngens = p.generators.len();
    let mut elements: Vec<Word> = vec![Vec::new()];
    let mut trans: Vec<Vec<usize>> = Vec::new();

    let diagnostic = |elements: &[Word], processed: usize| {
        let longest = elements.iter().map(Vec::len).max().unwrap_or(0);
        let mut growth = vec![0; longest + 1];
        for w in elements {
            growth[w.len()] += 1;
        }
        PresentationError::BoundExceeded(Box::new(GrowthDiagnostic {
            elements_found: elements.len(),
            frontier_size: elements.len() - processed,
            max_elements,
            max_word_length,
            growth,
            normal_forms: elements.iter().map(|w| p.render_word(w)).collect(),
            rules_confluent: confluent,
        }))
    };

    let mut next = 0;
    while next < elements.len() {
        let mut row = Vec::with_capacity(ngens);
        for g in 0..ngens {
            let mut w = elements[next].clone();
            w.push(g);
            let w = reduce(&rules, w);
            match index.get(&w) {
                Some(&e) => row.push(e),
                None => {
                    if w.len() > max_word_length || elements.len() >= max_elements {
                        return Err(diagnostic(&elements, next));
                    }
                    let id = elements.len();
                    index.insert(w.clone(), id);
                    elements.push(w);
                    row.push(id);
                }
            }
        }
        trans.push(row);
        next += 1;
    }

    let unsound = |reason: String| {
        if confluent {
            PresentationError::Unsound(reason)
        } else {
            PresentationError::RewriteBudgetExceeded { budget, reason }
        }
    };
    let n = elements.len();
    let follow = |mut x: usize, w: &[usize]| {
        for &g in w {
            x = trans[x][g];
        }
        x
    };
    let table: Vec<usize> = (0..n)
        .flat_map(|x| elements.iter().map(move |w| (x, w)))
        .map(|(x, w)| follow(x, w))
        .collect();
    let names: Vec<String> = elements.iter().map(|w| p.render_word(w)).collect();
    let monoid = verify_monoid_axioms(table, n)
        .map_err(|e| unsound(e.to_string()))?
        .with_names(names)
        .expect("one name per element");
    for (u, v) in &p.relations {
        if follow(0, u) != follow(0, v) {
            return Err(unsound(format!(
                "relation {} = {} fails",
                p.render_word(u),
                p.render_word(v)
            )));
        }
    }
    let reps: HashSet<&Word> = elements.iter().collect();
    if let Some(w) = elements
        .iter()
        .find(|w| !w.is_empty() && !reps.contains(&w[..w.len() - 1].to_vec()))
    {
        return Err(unsound(format!(
            "normal form {} has a prefix that is not a normal form",
            p.render_word(w)
        )));
    }
    Ok(Realization {
        monoid,
        normal_forms: elements,
    })
}
