use num_rational::BigRational;
use num_traits::Zero;

use super::number::{parse_complex, parse_real};
use super::{gcrl_problem, BranchElem, ElementValue, Line, Netlist, SourceElem, SourceKind};
use crate::error::{Error, Result};
use crate::scalar::ExactComplex;

#[derive(Clone, Debug)]
struct Token {
    col: usize,
    text: String,
}

struct Stmt {
    line: usize,
    tokens: Vec<Token>,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, col, message: message.into() }
}

/// Splits a line into whitespace-separated tokens, gluing `a , b` into `a,b`.
fn tokenize(text: &str) -> Vec<Token> {
    let text = match text.find('#') {
        Some(p) => &text[..p],
        None => text,
    };
    let mut raw: Vec<Token> = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                raw.push(Token { col: s + 1, text: text[s..i].to_string() });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        raw.push(Token { col: s + 1, text: text[s..].to_string() });
    }
    let mut out: Vec<Token> = Vec::new();
    for t in raw {
        let glue = match out.last() {
            Some(prev) => prev.text.ends_with(',') || t.text.starts_with(','),
            None => false,
        };
        if glue {
            out.last_mut().unwrap().text.push_str(&t.text);
        } else {
            out.push(t);
        }
    }
    out
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && !s.contains(['=', ','])
}

struct Ctx {
    nodes: Vec<String>,
}

impl Ctx {
    fn node(&mut self, name: &str) -> usize {
        match self.nodes.iter().position(|n| n == name) {
            Some(i) => i + 1,
            None => {
                self.nodes.push(name.to_string());
                self.nodes.len()
            }
        }
    }
}

/// Key/value arguments after the positional part of a statement.
struct Args<'a> {
    line: usize,
    pairs: Vec<(&'a Token, &'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn new(line: usize, tokens: &'a [Token], allowed: &[&str]) -> Result<Self> {
        let mut pairs: Vec<(&Token, &str, &str)> = Vec::new();
        for t in tokens {
            let Some((k, v)) = t.text.split_once('=') else {
                return Err(syntax(line, t.col, format!("expected key=value, found '{}'", t.text)));
            };
            if !allowed.contains(&k) {
                return Err(syntax(line, t.col, format!("unexpected key '{k}'")));
            }
            if pairs.iter().any(|(_, pk, _)| *pk == k) {
                return Err(syntax(line, t.col, format!("key '{k}' given twice")));
            }
            if v.is_empty() {
                return Err(syntax(line, t.col, format!("missing value for '{k}'")));
            }
            pairs.push((t, k, v));
        }
        Ok(Args { line, pairs })
    }

    fn get(&self, key: &str) -> Option<(&'a Token, &'a str)> {
        self.pairs.iter().find(|(_, k, _)| *k == key).map(|(t, _, v)| (*t, *v))
    }

    fn complex(&self, key: &str, end_col: usize) -> Result<ExactComplex> {
        let (t, v) = self.get(key).ok_or_else(|| syntax(self.line, end_col, format!("missing '{key}='")))?;
        parse_complex(v).ok_or_else(|| syntax(self.line, t.col + key.len() + 1, format!("bad complex number '{v}'")))
    }

    fn real_or_zero(&self, key: &str) -> Result<BigRational> {
        match self.get(key) {
            None => Ok(BigRational::zero()),
            Some((t, v)) => {
                parse_real(v).ok_or_else(|| syntax(self.line, t.col + key.len() + 1, format!("bad real number '{v}'")))
            }
        }
    }

    fn ctrl(&self, end_col: usize) -> Result<(&'a Token, &'a str)> {
        self.get("ctrl").ok_or_else(|| syntax(self.line, end_col, "missing 'ctrl='"))
    }
}

fn end_col(tokens: &[Token]) -> usize {
    tokens.last().map_or(1, |t| t.col + t.text.len())
}

/// Parses netlist text. Node indices follow first appearance.
pub fn parse(text: &str) -> Result<Netlist> {
    let stmts: Vec<Stmt> = text
        .lines()
        .enumerate()
        .map(|(i, l)| Stmt { line: i + 1, tokens: tokenize(l) })
        .filter(|s| !s.tokens.is_empty())
        .collect();

    // Branch names are resolved in a second pass so that current-controlled
    // sources may refer to branches declared later in the file.
    let mut ctx = Ctx { nodes: Vec::new() };
    let mut nl = Netlist::default();
    let mut pending_ctrl: Vec<(usize, usize, usize, String)> = Vec::new(); // source idx, line, col, branch name
    let mut pending_nodes: Vec<(usize, usize, usize, String, String)> = Vec::new();

    for st in &stmts {
        let line = st.line;
        let toks = &st.tokens;
        let kw = toks[0].text.as_str();
        let need = |count: usize| -> Result<()> {
            if toks.len() < count {
                Err(syntax(line, end_col(toks), format!("'{kw}' needs at least {} fields", count - 1)))
            } else {
                Ok(())
            }
        };
        let ident = |t: &Token| -> Result<()> {
            if is_ident(&t.text) {
                Ok(())
            } else {
                Err(syntax(line, t.col, format!("bad identifier '{}'", t.text)))
            }
        };
        match kw {
            "node" => {
                if toks.len() != 2 {
                    return Err(syntax(line, toks[0].col, "expected 'node NAME'"));
                }
                ident(&toks[1])?;
                ctx.node(&toks[1].text);
            }
            "omega" | "sigma" => {
                if toks.len() != 2 {
                    return Err(syntax(line, toks[0].col, format!("expected '{kw} REAL'")));
                }
                let v = parse_real(&toks[1].text)
                    .ok_or_else(|| syntax(line, toks[1].col, format!("bad real number '{}'", toks[1].text)))?;
                let slot = if kw == "omega" { &mut nl.omega } else { &mut nl.sigma };
                if slot.is_some() {
                    return Err(syntax(line, toks[0].col, format!("'{kw}' given twice")));
                }
                *slot = Some(v);
            }
            "branch" => {
                need(5)?;
                for t in &toks[1..4] {
                    ident(t)?;
                }
                let name = toks[1].text.clone();
                if nl.branches.iter().any(|b| b.name == name) {
                    return Err(Error::DuplicateName { line, name });
                }
                if toks[2].text == toks[3].text {
                    return Err(syntax(
                        line,
                        toks[3].col,
                        format!("branch '{name}' connects node '{}' to itself", toks[2].text),
                    ));
                }
                let args = Args::new(line, &toks[4..], &["y", "g", "c", "r", "l"])?;
                let value = if let Some((t, _)) = args.get("y") {
                    if args.pairs.len() > 1 {
                        return Err(syntax(line, t.col, "'y=' cannot be combined with g/c/r/l"));
                    }
                    ElementValue::Direct(args.complex("y", end_col(toks))?)
                } else {
                    let g = args.real_or_zero("g")?;
                    let c = args.real_or_zero("c")?;
                    let r = args.real_or_zero("r")?;
                    let l = args.real_or_zero("l")?;
                    if let Some(message) = gcrl_problem(&g, &c, &r, &l) {
                        return Err(Error::InvalidGcrl { line, name, message });
                    }
                    ElementValue::Gcrl { g, c, r, l }
                };
                let head = ctx.node(&toks[2].text);
                let tail = ctx.node(&toks[3].text);
                nl.branches.push(BranchElem { name, head, tail, value, line: Line(line) });
            }
            "isrc" | "vsrc" | "vccs" | "cccs" | "vcvs" | "ccvs" => {
                need(5)?;
                for t in &toks[1..4] {
                    ident(t)?;
                }
                let name = toks[1].text.clone();
                if nl.sources.iter().any(|s| s.name == name) {
                    return Err(Error::DuplicateName { line, name });
                }
                if toks[2].text == toks[3].text {
                    return Err(syntax(
                        line,
                        toks[3].col,
                        format!("source '{name}' has both terminals at '{}'", toks[2].text),
                    ));
                }
                let allowed: &[&str] = match kw {
                    "isrc" => &["i"],
                    "vsrc" => &["v"],
                    "vccs" | "cccs" => &["ctrl", "gain"],
                    _ => &["ctrl", "gain", "series"],
                };
                let args = Args::new(line, &toks[4..], allowed)?;
                let end = end_col(toks);
                let a = ctx.node(&toks[2].text);
                let b = ctx.node(&toks[3].text);
                let src_idx = nl.sources.len();
                let kind = match kw {
                    "isrc" => SourceKind::Current { from: a, to: b, i: args.complex("i", end)? },
                    "vsrc" => SourceKind::Voltage { pos: a, neg: b, v: args.complex("v", end)? },
                    _ => {
                        let gain = args.complex("gain", end)?;
                        let (ct, cv) = args.ctrl(end)?;
                        let ctrl_col = ct.col + 5;
                        let node_ctrl = kw == "vccs" || kw == "vcvs";
                        if node_ctrl {
                            let Some((p, q)) = cv.split_once(',') else {
                                return Err(syntax(line, ctrl_col, "expected 'ctrl=P,Q'"));
                            };
                            if !is_ident(p) || !is_ident(q) {
                                return Err(syntax(line, ctrl_col, "expected 'ctrl=P,Q'"));
                            }
                            pending_nodes.push((src_idx, line, ctrl_col, p.to_string(), q.to_string()));
                        } else {
                            if !is_ident(cv) {
                                return Err(syntax(line, ctrl_col, "expected 'ctrl=BRANCH'"));
                            }
                            pending_ctrl.push((src_idx, line, ctrl_col, cv.to_string()));
                        }
                        match kw {
                            "vccs" => SourceKind::Vccs { pos: a, neg: b, ctrl: (0, 0), gain },
                            "cccs" => SourceKind::Cccs { pos: a, neg: b, branch: 0, gain },
                            "vcvs" => SourceKind::Vcvs {
                                pos: a,
                                neg: b,
                                ctrl: (0, 0),
                                gain,
                                series: args.complex("series", end)?,
                            },
                            _ => SourceKind::Ccvs {
                                pos: a,
                                neg: b,
                                branch: 0,
                                gain,
                                series: args.complex("series", end)?,
                            },
                        }
                    }
                };
                nl.sources.push(SourceElem { name, kind, line: Line(line) });
            }
            other => return Err(syntax(line, toks[0].col, format!("unknown statement '{other}'"))),
        }
    }

    nl.nodes = ctx.nodes;
    for (idx, line, _col, p, q) in pending_nodes {
        let lookup = |name: &str| {
            nl.nodes
                .iter()
                .position(|n| n == name)
                .map(|i| i + 1)
                .ok_or_else(|| Error::UnknownNode { line, name: name.to_string() })
        };
        let pair = (lookup(&p)?, lookup(&q)?);
        match &mut nl.sources[idx].kind {
            SourceKind::Vccs { ctrl, .. } | SourceKind::Vcvs { ctrl, .. } => *ctrl = pair,
            _ => unreachable!("node-controlled source"),
        }
    }
    for (idx, line, col, name) in pending_ctrl {
        let Some(bi) = nl.branches.iter().position(|b| b.name == name) else {
            return Err(syntax(line, col, format!("unknown control branch '{name}'")));
        };
        match &mut nl.sources[idx].kind {
            SourceKind::Cccs { branch, .. } | SourceKind::Ccvs { branch, .. } => *branch = bi,
            _ => unreachable!("branch-controlled source"),
        }
    }
    Ok(nl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact_complex, rational};

    #[test]
    fn minimal_file() {
        let nl = parse("branch b1 a b y=2\n").unwrap();
        assert_eq!(nl.nodes, vec!["a", "b"]);
        assert_eq!(nl.branches.len(), 1);
        assert_eq!(nl.branches[0].value, ElementValue::Direct(exact_complex(rational(2, 1), rational(0, 1))));
    }

    #[test]
    fn inductor_without_conductance_is_invalid() {
        assert!(matches!(parse("branch L1 a b l=1.0 g=0"), Err(Error::InvalidGcrl { line: 1, .. })));
        assert!(matches!(parse("branch X a b g=1 c=1 r=1 l=1"), Err(Error::InvalidGcrl { .. })));
        assert!(parse("branch X a b g=1 c=1 r=2 l=1").is_ok());
    }

    #[test]
    fn diagnostics_carry_positions() {
        match parse("node a\nbranch b1 a b y=1+xj\n") {
            Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 17)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("resistor r a b"), Err(Error::Syntax { line: 1, col: 1, .. })));
        assert!(matches!(parse("branch b a b y=1\nbranch b a c y=1"), Err(Error::DuplicateName { line: 2, .. })));
        assert!(matches!(parse("branch b a a y=1"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse("branch b a c y=1\nvccs s a c ctrl=a,zz gain=1"),
            Err(Error::UnknownNode { line: 2, .. })
        ));
        assert!(matches!(parse("branch b a c y=1 g=1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("isrc s a c"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn sources_and_controls() {
        let text = "branch b1 a c y=1\nisrc I1 c a i=1/3\nvcvs E1 a c ctrl=a , c gain=2 series=1\ncccs F1 c a ctrl=b2 gain=3\nbranch b2 a d y=1\n";
        let nl = parse(text).unwrap();
        assert_eq!(nl.nodes, vec!["a", "c", "d"]);
        assert_eq!(
            nl.sources[0].kind,
            SourceKind::Current { from: 2, to: 1, i: exact_complex(rational(1, 3), rational(0, 1)) }
        );
        assert!(matches!(nl.sources[1].kind, SourceKind::Vcvs { ctrl: (1, 2), .. }));
        assert!(matches!(nl.sources[2].kind, SourceKind::Cccs { branch: 1, .. }));
    }

    #[test]
    fn comments_and_blank_lines() {
        let nl = parse("# header\n\nnode x # first\nbranch b y x y=0.5-1j\nomega 60\n").unwrap();
        assert_eq!(nl.nodes, vec!["x", "y"]);
        assert_eq!(nl.omega, Some(rational(60, 1)));
    }
}
