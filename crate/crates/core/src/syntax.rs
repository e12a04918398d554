//! Formulas, announcements, the surface grammar and its printer.
//!
//! Surface syntax:
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" iff)?
//! imp     := or ("->" imp)?
//! or      := and ("|" or)?
//! and     := unary ("&" and)?
//! unary   := "~" unary | "B{" AGENT ("|" formula)? "}" unary | "K{" AGENT "}" unary
//!          | "[" ann "]" unary | "(" formula ")" | "true" | "false" | ATOM
//! ann     := FLAVOR ("{" AGENT "}")? formula
//! ```
//!
//! All binary connectives associate to the right.

use std::collections::BTreeSet;
use std::fmt;

use crate::action::ActionModel;
use crate::error::ParseError;

/// Agent name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Agent(pub String);

/// Propositional variable name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Atom(pub String);

impl Agent {
    pub fn new(name: impl Into<String>) -> Self {
        Agent(name.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An action model together with its designated action, usable as an
/// announcement operator `[A, alpha]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointedActionModel {
    pub model: ActionModel,
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Believes(Agent, Box<Formula>),
    /// `CondBelieves(a, condition, body)`: belief in `body` conditional on `condition`.
    CondBelieves(Agent, Box<Formula>, Box<Formula>),
    Knows(Agent, Box<Formula>),
    Dyn(Box<Announcement>, Box<Formula>),
}

/// Announcement operators. The announced formula is the last field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Announcement {
    PubTruth(Formula),
    PubLie(Formula),
    AgTruth(Agent, Formula),
    AgLie(Agent, Formula),
    AgBluff(Agent, Formula),
    SkPubTruth(Formula),
    SkPubLie(Formula),
    SkPubRejected(Formula),
    SkAgTruth(Agent, Formula),
    SkAgLie(Agent, Formula),
    SkAgBluff(Agent, Formula),
    SkAgTruthRejected(Agent, Formula),
    SkAgLieRejected(Agent, Formula),
    SkAgBluffRejected(Agent, Formula),
    PlPubTruth(Formula),
    PlPubLie(Formula),
    PlAgTruth(Agent, Formula),
    PlAgLie(Agent, Formula),
    PlAgBluff(Agent, Formula),
    GenericAction(PointedActionModel),
}

/// The keyword of each announcement flavor, and whether it takes an agent.
const FLAVORS: &[(&str, Option<bool>)] = &[
    // (keyword, None = public only, Some(true) = agent only, Some(false) = both)
    ("truth", Some(false)),
    ("lie", Some(false)),
    ("bluff", Some(true)),
    ("truth_sk", Some(false)),
    ("lie_sk", Some(false)),
    ("rej_sk", None),
    ("bluff_sk", Some(true)),
    ("truth_skr", Some(true)),
    ("lie_skr", Some(true)),
    ("bluff_skr", Some(true)),
    ("truth_pl", Some(false)),
    ("lie_pl", Some(false)),
    ("bluff_pl", Some(true)),
];

const KEYWORDS: &[&str] = &["true", "false", "B", "K"];

/// Is `name` usable as an atom or agent identifier?
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
        && !FLAVORS.iter().any(|(k, _)| *k == name)
}

impl Announcement {
    /// The announced formula.
    pub fn content(&self) -> Option<&Formula> {
        use Announcement::*;
        match self {
            PubTruth(f) | PubLie(f) | SkPubTruth(f) | SkPubLie(f) | SkPubRejected(f) | PlPubTruth(f)
            | PlPubLie(f) => Some(f),
            AgTruth(_, f) | AgLie(_, f) | AgBluff(_, f) | SkAgTruth(_, f) | SkAgLie(_, f)
            | SkAgBluff(_, f) | SkAgTruthRejected(_, f) | SkAgLieRejected(_, f)
            | SkAgBluffRejected(_, f) | PlAgTruth(_, f) | PlAgLie(_, f) | PlAgBluff(_, f) => Some(f),
            GenericAction(_) => None,
        }
    }

    /// The announcing agent, for agent announcements.
    pub fn speaker(&self) -> Option<&Agent> {
        use Announcement::*;
        match self {
            AgTruth(a, _) | AgLie(a, _) | AgBluff(a, _) | SkAgTruth(a, _) | SkAgLie(a, _)
            | SkAgBluff(a, _) | SkAgTruthRejected(a, _) | SkAgLieRejected(a, _)
            | SkAgBluffRejected(a, _) | PlAgTruth(a, _) | PlAgLie(a, _) | PlAgBluff(a, _) => Some(a),
            _ => None,
        }
    }

    /// The surface keyword of this flavor (`None` for action models).
    pub fn keyword(&self) -> Option<&'static str> {
        use Announcement::*;
        Some(match self {
            PubTruth(_) | AgTruth(..) => "truth",
            PubLie(_) | AgLie(..) => "lie",
            AgBluff(..) => "bluff",
            SkPubTruth(_) | SkAgTruth(..) => "truth_sk",
            SkPubLie(_) | SkAgLie(..) => "lie_sk",
            SkPubRejected(_) => "rej_sk",
            SkAgBluff(..) => "bluff_sk",
            SkAgTruthRejected(..) => "truth_skr",
            SkAgLieRejected(..) => "lie_skr",
            SkAgBluffRejected(..) => "bluff_skr",
            PlPubTruth(_) | PlAgTruth(..) => "truth_pl",
            PlPubLie(_) | PlAgLie(..) => "lie_pl",
            PlAgBluff(..) => "bluff_pl",
            GenericAction(_) => return None,
        })
    }

    /// Build an announcement from a surface keyword.
    pub fn from_keyword(
        keyword: &str,
        agent: Option<Agent>,
        f: Formula,
    ) -> Result<Announcement, String> {
        use Announcement::*;
        let Some((_, arity)) = FLAVORS.iter().find(|(k, _)| *k == keyword) else {
            return Err(format!("unknown announcement flavor `{keyword}`"));
        };
        match (arity, &agent) {
            (None, Some(_)) => return Err(format!("`{keyword}` is public and takes no agent")),
            (Some(true), None) => return Err(format!("`{keyword}` needs an agent: {keyword}{{a}}")),
            _ => {}
        }
        Ok(match (keyword, agent) {
            ("truth", None) => PubTruth(f),
            ("truth", Some(a)) => AgTruth(a, f),
            ("lie", None) => PubLie(f),
            ("lie", Some(a)) => AgLie(a, f),
            ("bluff", Some(a)) => AgBluff(a, f),
            ("truth_sk", None) => SkPubTruth(f),
            ("truth_sk", Some(a)) => SkAgTruth(a, f),
            ("lie_sk", None) => SkPubLie(f),
            ("lie_sk", Some(a)) => SkAgLie(a, f),
            ("rej_sk", None) => SkPubRejected(f),
            ("bluff_sk", Some(a)) => SkAgBluff(a, f),
            ("truth_skr", Some(a)) => SkAgTruthRejected(a, f),
            ("lie_skr", Some(a)) => SkAgLieRejected(a, f),
            ("bluff_skr", Some(a)) => SkAgBluffRejected(a, f),
            ("truth_pl", None) => PlPubTruth(f),
            ("truth_pl", Some(a)) => PlAgTruth(a, f),
            ("lie_pl", None) => PlPubLie(f),
            ("lie_pl", Some(a)) => PlAgLie(a, f),
            ("bluff_pl", Some(a)) => PlAgBluff(a, f),
            _ => unreachable!("arity checked above"),
        })
    }

    /// Same flavor and speaker, different announced formula.
    pub fn with_content(&self, f: Formula) -> Announcement {
        match (self.keyword(), self.speaker()) {
            (Some(k), a) => Announcement::from_keyword(k, a.cloned(), f).expect("same flavor"),
            (None, _) => self.clone(),
        }
    }

    pub fn is_plausibility(&self) -> bool {
        use Announcement::*;
        matches!(self, PlPubTruth(_) | PlPubLie(_) | PlAgTruth(..) | PlAgLie(..) | PlAgBluff(..))
    }

    /// Apply `f` to every formula inside the announcement, including action
    /// model preconditions.
    pub fn map_formulas(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Announcement {
        match self {
            Announcement::GenericAction(pam) => {
                let mut model = pam.model.clone();
                for p in model.pre.iter_mut() {
                    *p = f(p);
                }
                Announcement::GenericAction(PointedActionModel { model, point: pam.point })
            }
            other => other.with_content(f(other.content().expect("flavor has content"))),
        }
    }

    fn formulas(&self) -> Vec<&Formula> {
        match self {
            Announcement::GenericAction(pam) => pam.model.pre.iter().collect(),
            other => vec![other.content().expect("flavor has content")],
        }
    }
}

// Constructors that keep call sites short.
impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }
    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }
    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }
    pub fn believes(a: &str, f: Formula) -> Formula {
        Formula::Believes(Agent::new(a), Box::new(f))
    }
    pub fn cond_believes(a: &str, c: Formula, f: Formula) -> Formula {
        Formula::CondBelieves(Agent::new(a), Box::new(c), Box::new(f))
    }
    pub fn knows(a: &str, f: Formula) -> Formula {
        Formula::Knows(Agent::new(a), Box::new(f))
    }
    pub fn dynamic(ann: Announcement, f: Formula) -> Formula {
        Formula::Dyn(Box::new(ann), Box::new(f))
    }

    /// Right-nested conjunction; `Top` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut v: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = v.pop() else { return Formula::Top };
        while let Some(f) = v.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Right-nested disjunction; `Bot` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut v: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = v.pop() else { return Formula::Bot };
        while let Some(f) = v.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    /// Parse without checking names against a signature.
    pub fn parse_unchecked(text: &str) -> Result<Formula, ParseError> {
        Parser::new(text).parse_complete()
    }

    /// Nesting depth of belief, knowledge and announcement operators.
    ///
    /// An announcement counts as one level above the deeper of its announced
    /// formula and its body.
    pub fn modal_depth(&self) -> usize {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => 0,
            Not(f) => f.modal_depth(),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) => l.modal_depth().max(r.modal_depth()),
            Believes(_, f) | Knows(_, f) => 1 + f.modal_depth(),
            CondBelieves(_, c, f) => 1 + c.modal_depth().max(f.modal_depth()),
            Dyn(ann, f) => {
                let inner = ann.formulas().iter().map(|g| g.modal_depth()).max().unwrap_or(0);
                1 + inner.max(f.modal_depth())
            }
        }
    }

    /// Number of nodes in the syntax tree (announcement contents included).
    pub fn size(&self) -> usize {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => 1,
            Not(f) | Believes(_, f) | Knows(_, f) => 1 + f.size(),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) | CondBelieves(_, l, r) => {
                1 + l.size() + r.size()
            }
            Dyn(ann, f) => 1 + f.size() + ann.formulas().iter().map(|g| g.size()).sum::<usize>(),
        }
    }

    /// Does the formula contain an announcement operator anywhere?
    pub fn has_announcements(&self) -> bool {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => false,
            Not(f) | Believes(_, f) | Knows(_, f) => f.has_announcements(),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) | CondBelieves(_, l, r) => {
                l.has_announcements() || r.has_announcements()
            }
            Dyn(..) => true,
        }
    }

    /// Collect the agents and atoms occurring in the formula.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        self.collect_names(&mut sig);
        sig
    }

    fn collect_names(&self, sig: &mut Signature) {
        use Formula::*;
        match self {
            Top | Bot => {}
            Atom(p) => {
                sig.atoms.insert(p.clone());
            }
            Not(f) => f.collect_names(sig),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) => {
                l.collect_names(sig);
                r.collect_names(sig);
            }
            Believes(a, f) | Knows(a, f) => {
                sig.agents.insert(a.clone());
                f.collect_names(sig);
            }
            CondBelieves(a, c, f) => {
                sig.agents.insert(a.clone());
                c.collect_names(sig);
                f.collect_names(sig);
            }
            Dyn(ann, f) => {
                if let Some(a) = ann.speaker() {
                    sig.agents.insert(a.clone());
                }
                if let Announcement::GenericAction(pam) = &**ann {
                    sig.agents.extend(pam.model.agents.iter().cloned());
                }
                for g in ann.formulas() {
                    g.collect_names(sig);
                }
                f.collect_names(sig);
            }
        }
    }

    /// Rewrite `|`, `->`, `<->` and `true` into `~`, `&` and `false`.
    /// Modal and dynamic operators are kept, their arguments rewritten.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        let nand = |l: Formula, r: Formula| Formula::not(Formula::and(l, r));
        match self {
            // `false` stays a constant; `true` becomes its negation.
            Top => Formula::not(Bot),
            Bot => Bot,
            Atom(_) => self.clone(),
            Not(f) => Formula::not(f.desugar()),
            And(l, r) => Formula::and(l.desugar(), r.desugar()),
            Or(l, r) => nand(Formula::not(l.desugar()), Formula::not(r.desugar())),
            Implies(l, r) => nand(l.desugar(), Formula::not(r.desugar())),
            Iff(l, r) => {
                let (l, r) = (l.desugar(), r.desugar());
                Formula::and(
                    nand(l.clone(), Formula::not(r.clone())),
                    nand(r, Formula::not(l)),
                )
            }
            Believes(a, f) => Believes(a.clone(), Box::new(f.desugar())),
            Knows(a, f) => Knows(a.clone(), Box::new(f.desugar())),
            CondBelieves(a, c, f) => {
                CondBelieves(a.clone(), Box::new(c.desugar()), Box::new(f.desugar()))
            }
            Dyn(ann, f) => {
                Formula::dynamic(ann.map_formulas(&mut |g| g.desugar()), f.desugar())
            }
        }
    }
}

/// Agents and atoms a formula may mention.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub agents: BTreeSet<Agent>,
    pub atoms: BTreeSet<Atom>,
}

impl Signature {
    pub fn new<A: AsRef<str>, P: AsRef<str>>(agents: &[A], atoms: &[P]) -> Signature {
        Signature {
            agents: agents.iter().map(|a| Agent::new(a.as_ref())).collect(),
            atoms: atoms.iter().map(|p| Atom::new(p.as_ref())).collect(),
        }
    }

    /// Check that every name in `f` is declared here.
    pub fn check(&self, f: &Formula) -> Result<(), ParseError> {
        let used = f.signature();
        if let Some(a) = used.agents.iter().find(|a| !self.agents.contains(a)) {
            return Err(ParseError::UnknownAgent(a.0.clone()));
        }
        if let Some(p) = used.atoms.iter().find(|p| !self.atoms.contains(p)) {
            return Err(ParseError::UnknownAtom(p.0.clone()));
        }
        Ok(())
    }
}

/// Parse `text` and check its names against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let f = Formula::parse_unchecked(text)?;
    sig.check(&f)?;
    Ok(f)
}

/// Parse an announcement in the `ann` form of the grammar, e.g. `lie{a} p`.
pub fn parse_announcement(text: &str, sig: &Signature) -> Result<Announcement, ParseError> {
    let mut p = Parser::new(text);
    let ann = p.announcement()?;
    p.expect_end()?;
    if let Some(a) = ann.speaker() {
        if !sig.agents.contains(a) {
            return Err(ParseError::UnknownAgent(a.0.clone()));
        }
    }
    sig.check(ann.content().expect("parsed flavors have content"))?;
    Ok(ann)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    lex_error: Option<ParseError>,
}

impl Parser {
    fn new(text: &str) -> Parser {
        let mut toks = Vec::new();
        let mut lex_error = None;
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            let tok = match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'~' => Tok::Tilde,
                b'&' => Tok::Amp,
                b'|' => Tok::Bar,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b'-' if text[i..].starts_with("->") => {
                    i += 1;
                    Tok::Arrow
                }
                b'<' if text[i..].starts_with("<->") => {
                    i += 2;
                    Tok::DArrow
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    toks.push((Tok::Ident(text[start..i].to_string()), start));
                    continue;
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    lex_error = Some(ParseError::Syntax {
                        pos: i,
                        message: format!("unexpected character `{ch}`"),
                    });
                    break;
                }
            };
            i += 1;
            toks.push((tok, start));
        }
        toks.push((Tok::End, text.len()));
        Parser { toks, pos: 0, lex_error }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.offset(), message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        if *self.peek() != Tok::End {
            return self.error("unexpected trailing input");
        }
        Ok(())
    }

    fn parse_complete(mut self) -> Result<Formula, ParseError> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        let f = self.formula()?;
        self.expect_end()?;
        Ok(f)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let l = self.imp()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            return Ok(Formula::iff(l, self.formula()?));
        }
        Ok(l)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let l = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            return Ok(Formula::implies(l, self.imp()?));
        }
        Ok(l)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let l = self.and()?;
        if *self.peek() == Tok::Bar {
            self.bump();
            return Ok(Formula::or(l, self.or()?));
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let l = self.unary()?;
        if *self.peek() == Tok::Amp {
            self.bump();
            return Ok(Formula::and(l, self.and()?));
        }
        Ok(l)
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if is_identifier(&name) => {
                self.bump();
                Ok(name)
            }
            Tok::Ident(name) => self.error(format!("`{name}` is reserved and cannot be {what}")),
            _ => self.error(format!("expected {what}")),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::LBracket => {
                self.bump();
                let ann = self.announcement()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Formula::dynamic(ann, self.unary()?))
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::Top)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::Bot)
                }
                "B" | "K" => {
                    self.bump();
                    self.expect(Tok::LBrace, "`{` after modal operator")?;
                    let agent = Agent(self.ident("an agent name")?);
                    let cond = if name == "B" && *self.peek() == Tok::Bar {
                        self.bump();
                        Some(self.formula()?)
                    } else {
                        None
                    };
                    self.expect(Tok::RBrace, "`}`")?;
                    let body = Box::new(self.unary()?);
                    Ok(match (name.as_str(), cond) {
                        ("K", _) => Formula::Knows(agent, body),
                        (_, Some(c)) => Formula::CondBelieves(agent, Box::new(c), body),
                        (_, None) => Formula::Believes(agent, body),
                    })
                }
                _ => Ok(Formula::Atom(Atom(self.ident("an atom")?))),
            },
            _ => self.error("expected a formula"),
        }
    }

    fn announcement(&mut self) -> Result<Announcement, ParseError> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        let at = self.offset();
        let keyword = match self.bump() {
            Tok::Ident(k) => k,
            _ => return Err(ParseError::Syntax { pos: at, message: "expected an announcement flavor".into() }),
        };
        let agent = if *self.peek() == Tok::LBrace {
            self.bump();
            let a = Agent(self.ident("an agent name")?);
            self.expect(Tok::RBrace, "`}`")?;
            Some(a)
        } else {
            None
        };
        let f = self.formula()?;
        Announcement::from_keyword(&keyword, agent, f)
            .map_err(|message| ParseError::Syntax { pos: at, message })
    }
}

// Printing. Precedence levels: 1 iff, 2 implies, 3 or, 4 and, 5 unary.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        _ => 5,
    }
}

fn write_operand(out: &mut fmt::Formatter<'_>, f: &Formula, min_prec: u8) -> fmt::Result {
    if prec(f) < min_prec {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let binary = |out: &mut fmt::Formatter<'_>, l: &Formula, op: &str, r: &Formula, p: u8| {
            // Right associative: the left operand must bind tighter.
            write_operand(out, l, p + 1)?;
            write!(out, " {op} ")?;
            write_operand(out, r, p)
        };
        match self {
            Top => out.write_str("true"),
            Bot => out.write_str("false"),
            Atom(p) => write!(out, "{p}"),
            Not(f) => {
                out.write_str("~")?;
                write_operand(out, f, 5)
            }
            And(l, r) => binary(out, l, "&", r, 4),
            Or(l, r) => binary(out, l, "|", r, 3),
            Implies(l, r) => binary(out, l, "->", r, 2),
            Iff(l, r) => binary(out, l, "<->", r, 1),
            Believes(a, f) => {
                write!(out, "B{{{a}}} ")?;
                write_operand(out, f, 5)
            }
            Knows(a, f) => {
                write!(out, "K{{{a}}} ")?;
                write_operand(out, f, 5)
            }
            CondBelieves(a, c, f) => {
                write!(out, "B{{{a}|{c}}} ")?;
                write_operand(out, f, 5)
            }
            Dyn(ann, f) => {
                write!(out, "[{ann}] ")?;
                write_operand(out, f, 5)
            }
        }
    }
}

impl fmt::Display for Announcement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Announcement::GenericAction(pam) => {
                let name = pam.model.actions.get(pam.point).map(String::as_str).unwrap_or("?");
                write!(out, "action {name}")
            }
            other => {
                out.write_str(other.keyword().expect("flavor"))?;
                if let Some(a) = other.speaker() {
                    write!(out, "{{{a}}}")?;
                }
                write!(out, " {}", other.content().expect("flavor has content"))
            }
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::parse_unchecked(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(&["a", "b"], &["p", "q"])
    }

    #[test]
    fn parses_simple_belief() {
        assert_eq!(parse("B{a} p", &sig()).unwrap(), Formula::believes("a", Formula::atom("p")));
    }

    #[test]
    fn parses_example_with_announcement_and_right_nesting() {
        let f = parse("p & ~(B{b} p | B{b} ~p) & [truth p] B{b} p", &sig()).unwrap();
        let p = Formula::atom("p");
        let expected = Formula::and(
            p.clone(),
            Formula::and(
                Formula::not(Formula::or(
                    Formula::believes("b", p.clone()),
                    Formula::believes("b", Formula::not(p.clone())),
                )),
                Formula::dynamic(Announcement::PubTruth(p.clone()), Formula::believes("b", p)),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn agent_lie_with_nested_belief() {
        let f = parse("[lie{a} B{a} p] B{b} p", &sig()).unwrap();
        let p = Formula::atom("p");
        assert_eq!(
            f,
            Formula::dynamic(
                Announcement::AgLie(Agent::new("a"), Formula::believes("a", p.clone())),
                Formula::believes("b", p)
            )
        );
    }

    #[test]
    fn unknown_agent_is_rejected() {
        assert_eq!(parse("B{c} p", &sig()), Err(ParseError::UnknownAgent("c".into())));
    }

    #[test]
    fn unknown_atom_is_rejected() {
        assert_eq!(parse("r", &sig()), Err(ParseError::UnknownAtom("r".into())));
    }

    #[test]
    fn public_flavor_rejects_agent_and_agent_flavor_requires_one() {
        assert!(parse("[rej_sk{a} p] p", &sig()).is_err());
        assert!(parse("[bluff p] p", &sig()).is_err());
        assert!(parse("[lie_skr p] p", &sig()).is_err());
    }

    #[test]
    fn printer_examples() {
        let p = Formula::atom("p");
        assert_eq!(Formula::believes("a", p.clone()).to_string(), "B{a} p");
        let f = Formula::dynamic(Announcement::PubLie(p.clone()), Formula::believes("b", p.clone()));
        assert_eq!(f.to_string(), "[lie p] B{b} p");
        assert_eq!(
            Formula::cond_believes("a", p.clone(), Formula::atom("q")).to_string(),
            "B{a|p} q"
        );
    }

    #[test]
    fn printer_parenthesizes_left_nested_binaries() {
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        let f = Formula::implies(Formula::implies(p.clone(), q.clone()), p.clone());
        assert_eq!(f.to_string(), "(p -> q) -> p");
        let g = Formula::not(Formula::and(p.clone(), q.clone()));
        assert_eq!(g.to_string(), "~(p & q)");
        assert_eq!(Formula::parse_unchecked(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn modal_depth_examples() {
        let p = Formula::atom("p");
        let bbp = Formula::believes("a", Formula::believes("b", p.clone()));
        assert_eq!(bbp.modal_depth(), 2);
        let d = Formula::dynamic(
            Announcement::PubTruth(Formula::believes("a", p.clone())),
            Formula::believes("b", p),
        );
        assert_eq!(d.modal_depth(), 2);
    }

    #[test]
    fn reserved_words_are_not_atoms() {
        assert!(Formula::parse_unchecked("lie").is_err());
        assert!(Formula::parse_unchecked("B").is_err());
        assert!(Formula::parse_unchecked("truth_p").is_ok());
    }

    #[test]
    fn syntax_errors_report_positions() {
        match Formula::parse_unchecked("p & & q") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Formula::parse_unchecked("p $ q").is_err());
        assert!(Formula::parse_unchecked("(p").is_err());
    }

    #[test]
    fn announcement_parsing() {
        let ann = parse_announcement("lie{a} p", &sig()).unwrap();
        assert_eq!(ann, Announcement::AgLie(Agent::new("a"), Formula::atom("p")));
        assert_eq!(ann.to_string(), "lie{a} p");
        assert!(parse_announcement("lie{z} p", &sig()).is_err());
    }
}
