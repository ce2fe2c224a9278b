//! Line-oriented text formats for tree instances, metric instances and
//! solutions. Blank lines and text after `#` are ignored. Rationals are
//! written as `p`, `p/q` or finite decimals and parsed exactly.
//!
//! ```text
//! rmfc v1            nukc v1            solution v1
//! n 4                points 2           protect 1
//! root 0             0 3                protect 3
//! edge 0 1           3 0
//! edge 0 2           levels 1           solution v1
//! edge 2 3           k 1                center 0 1
//! budget 1 1/2       r 3
//! protect 1 3
//! ```

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::nukc::{CenterSet, MetricSpace, SnukcInstance};
use crate::ratio::{fmt_q, parse_q, Q};
use crate::tree_core::{build_tree, normalize_targets, ProtectionSet, RmfcInstance, RootedTree, SrmfcInstance};

/// Upper bound on vertex and point counts accepted by the parsers.
pub const MAX_ITEMS: usize = 1 << 20;

/// A whitespace-separated token with its 1-based line and column.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

/// A non-empty line split into tokens.
#[derive(Debug)]
struct Line<'a> {
    no: usize,
    tokens: Vec<Token<'a>>,
}

fn malformed(line: usize, col: usize, msg: impl std::fmt::Display) -> Error {
    Error::MalformedInput(format!("line {line}, column {col}: {msg}"))
}

/// Re-tags an error raised by a validating constructor with a position.
fn at(line: usize, col: usize, e: Error) -> Error {
    match e {
        Error::MalformedInput(m) => malformed(line, col, m),
        other => malformed(line, col, other),
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        let mut col = 0;
        for (byte, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            col += 1;
            if ch.is_whitespace() {
                if let Some((b, c)) = start.take() {
                    tokens.push(Token { text: &body[b..byte], line: i + 1, col: c });
                }
            } else if start.is_none() {
                start = Some((byte, col));
            }
        }
        if !tokens.is_empty() {
            out.push(Line { no: i + 1, tokens });
        }
    }
    out
}

/// Cursor over the non-empty lines of a document.
struct Reader<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let last_line = text.lines().count().max(1);
        Reader { lines: lines(text), pos: 0, last_line }
    }

    fn peek_keyword(&self) -> Option<&str> {
        self.lines.get(self.pos).map(|l| l.tokens[0].text)
    }

    fn next(&mut self, what: &str) -> Result<&Line<'a>> {
        let l = self.lines.get(self.pos).ok_or_else(|| malformed(self.last_line + 1, 1, format!("expected {what}, found end of input")))?;
        self.pos += 1;
        Ok(l)
    }

    /// Next line, which must start with `keyword`; returns its arguments.
    fn keyword(&mut self, keyword: &str) -> Result<(usize, Vec<Token<'a>>)> {
        let l = self.next(&format!("`{keyword}`"))?;
        let head = l.tokens[0];
        if head.text != keyword {
            return Err(malformed(head.line, head.col, format!("expected `{keyword}`, found `{}`", head.text)));
        }
        Ok((l.no, l.tokens[1..].to_vec()))
    }

    fn header(&mut self, magic: &str) -> Result<()> {
        let l = self.next(&format!("`{magic} v1`"))?;
        let t = &l.tokens;
        if t.len() != 2 || t[0].text != magic || t[1].text != "v1" {
            return Err(malformed(l.no, t[0].col, format!("expected header `{magic} v1`")));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some(l) => Err(malformed(l.no, l.tokens[0].col, format!("unexpected `{}`", l.tokens[0].text))),
            None => Ok(()),
        }
    }
}

fn arity(line: usize, args: &[Token], n: usize, what: &str) -> Result<()> {
    if args.len() != n {
        let col = args.get(n).or(args.last()).map_or(1, |t| t.col);
        return Err(malformed(line, col, format!("`{what}` takes {n} argument(s), found {}", args.len())));
    }
    Ok(())
}

fn index(t: &Token, bound: usize, what: &str) -> Result<usize> {
    let v: usize = t.text.parse().map_err(|_| malformed(t.line, t.col, format!("{what} must be a nonnegative integer")))?;
    if v >= bound {
        return Err(malformed(t.line, t.col, format!("{what} {v} out of range 0..{bound}")));
    }
    Ok(v)
}

fn count(t: &Token, what: &str) -> Result<usize> {
    let v: usize = t.text.parse().map_err(|_| malformed(t.line, t.col, format!("{what} must be a nonnegative integer")))?;
    if v > MAX_ITEMS {
        return Err(malformed(t.line, t.col, format!("{what} {v} exceeds {MAX_ITEMS}")));
    }
    Ok(v)
}

fn rational(t: &Token) -> Result<Q> {
    parse_q(t.text).map_err(|e| at(t.line, t.col, e))
}

fn rationals(args: &[Token]) -> Result<Vec<Q>> {
    args.iter().map(rational).collect()
}

fn join(xs: &[Q]) -> String {
    xs.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
}

/// A parsed tree document: the tree, the budget line as written, and the
/// optional target set (`None` means every leaf).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFile {
    pub tree: RootedTree,
    pub budgets: Vec<Q>,
    pub targets: Option<BTreeSet<usize>>,
}

impl TreeFile {
    /// Budgets per level: a single value applies to every level.
    pub fn level_budgets(&self) -> Result<Vec<Q>> {
        let l = self.tree.height();
        match self.budgets.len() {
            1 => Ok(vec![self.budgets[0].clone(); l]),
            m if m == l => Ok(self.budgets.clone()),
            m => Err(Error::MalformedInput(format!("expected 1 or {l} budgets, found {m}"))),
        }
    }

    /// The tree pruned to the targets (identity map when there are none).
    pub fn normalized(&self) -> Result<(RootedTree, Vec<usize>)> {
        match &self.targets {
            None => Ok((self.tree.clone(), (0..self.tree.vertex_count()).collect())),
            Some(s) => normalize_targets(&self.tree, s),
        }
    }

    /// Smooth instance on the normalized tree, with the map from its vertex
    /// ids back to the ids of this document.
    pub fn srmfc(&self) -> Result<(SrmfcInstance, Vec<usize>)> {
        let budgets = self.level_budgets()?;
        let (tree, map) = self.normalized()?;
        let h = tree.height();
        Ok((SrmfcInstance::new(tree, budgets[..h].to_vec())?, map))
    }

    /// Classic instance; every level must carry the same integral budget.
    pub fn rmfc(&self) -> Result<(RmfcInstance, Vec<usize>)> {
        let budgets = self.level_budgets()?;
        let b = budgets.first().cloned().unwrap_or_default();
        if budgets.iter().any(|x| *x != b) || !b.is_integer() || b < Q::default() {
            return Err(Error::MalformedInput("classic instances need one nonnegative integral budget".into()));
        }
        let budget = b.to_integer().try_into().map_err(|_| Error::MalformedInput("budget too large".into()))?;
        let (tree, map) = self.normalized()?;
        Ok((RmfcInstance { tree, budget }, map))
    }

    /// Document for a smooth instance, protecting every leaf.
    pub fn from_srmfc(inst: &SrmfcInstance) -> Self {
        TreeFile { tree: inst.tree.clone(), budgets: inst.budgets().to_vec(), targets: None }
    }
}

/// Parses the `rmfc v1` tree format.
pub fn parse_tree(text: &str) -> Result<TreeFile> {
    let mut rd = Reader::new(text);
    rd.header("rmfc")?;
    let (ln, args) = rd.keyword("n")?;
    arity(ln, &args, 1, "n")?;
    let n = count(&args[0], "n")?;
    if n < 2 {
        return Err(malformed(ln, args[0].col, "a tree needs at least 2 vertices"));
    }
    let (ln, args) = rd.keyword("root")?;
    arity(ln, &args, 1, "root")?;
    let root = index(&args[0], n, "root")?;
    let mut edges = Vec::new();
    let mut first_edge = 0;
    for i in 0..n - 1 {
        let (ln, args) = rd.keyword("edge")?;
        if i == 0 {
            first_edge = ln;
        }
        arity(ln, &args, 2, "edge")?;
        edges.push((index(&args[0], n, "vertex")?, index(&args[1], n, "vertex")?));
    }
    let tree = build_tree(n, &edges, root).map_err(|e| at(first_edge, 1, e))?;
    let (ln, args) = rd.keyword("budget")?;
    if args.is_empty() {
        return Err(malformed(ln, 1, "`budget` needs at least one value"));
    }
    let budgets = rationals(&args)?;
    if let Some((t, _)) = args.iter().zip(&budgets).find(|(_, b)| **b < Q::default()) {
        return Err(malformed(t.line, t.col, "negative budget"));
    }
    if budgets.len() != 1 && budgets.len() != tree.height() {
        return Err(malformed(ln, args[0].col, format!("expected 1 or {} budgets, found {}", tree.height(), budgets.len())));
    }
    let mut targets = None;
    if rd.peek_keyword() == Some("protect") {
        let (ln, args) = rd.keyword("protect")?;
        if args.is_empty() {
            return Err(malformed(ln, 1, "`protect` needs at least one vertex"));
        }
        let mut s = BTreeSet::new();
        for t in &args {
            if !s.insert(index(t, n, "vertex")?) {
                return Err(malformed(t.line, t.col, "duplicate vertex"));
            }
        }
        if s.contains(&root) {
            return Err(malformed(ln, 1, "the root cannot be a target"));
        }
        targets = Some(s);
    }
    rd.finish()?;
    Ok(TreeFile { tree, budgets, targets })
}

/// Renders a tree document; edges are listed in BFS order.
pub fn serialize_tree(f: &TreeFile) -> String {
    let t = &f.tree;
    let mut s = format!("rmfc v1\nn {}\nroot {}\n", t.vertex_count(), t.root());
    for v in t.bfs_order() {
        if let Some(p) = t.parent(v) {
            s += &format!("edge {p} {v}\n");
        }
    }
    s += &format!("budget {}\n", join(&f.budgets));
    if let Some(ts) = &f.targets {
        s += &format!("protect {}\n", ts.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
    }
    s
}

/// Parses the `nukc v1` metric format.
pub fn parse_metric(text: &str) -> Result<SnukcInstance> {
    let mut rd = Reader::new(text);
    rd.header("nukc")?;
    let (ln, args) = rd.keyword("points")?;
    arity(ln, &args, 1, "points")?;
    let n = count(&args[0], "points")?;
    if n == 0 {
        return Err(malformed(ln, args[0].col, "a metric needs at least one point"));
    }
    let points_line = ln;
    let mut d = Vec::new();
    for i in 0..n {
        let row = rd.next(&format!("distance row {i}"))?;
        if row.tokens.len() != n {
            let col = row.tokens.get(n).unwrap_or(&row.tokens[0]).col;
            return Err(malformed(row.no, col, format!("distance row {i} has {} entries, expected {n}", row.tokens.len())));
        }
        d.push(rationals(&row.tokens)?);
    }
    let space = MetricSpace::new(d).map_err(|e| at(points_line, 1, e))?;
    let (ln, args) = rd.keyword("levels")?;
    arity(ln, &args, 1, "levels")?;
    let levels = count(&args[0], "levels")?;
    if levels == 0 {
        return Err(malformed(ln, args[0].col, "at least one level is required"));
    }
    let (kl, kargs) = rd.keyword("k")?;
    arity(kl, &kargs, levels, "k")?;
    let k = rationals(&kargs)?;
    let (rl, rargs) = rd.keyword("r")?;
    arity(rl, &rargs, levels, "r")?;
    let r = rationals(&rargs)?;
    rd.finish()?;
    SnukcInstance::new(space, k, r).map_err(|e| at(kl, 1, e))
}

/// Renders a metric document.
pub fn serialize_metric(inst: &SnukcInstance) -> String {
    let mut s = format!("nukc v1\npoints {}\n", inst.n());
    for row in inst.space.matrix() {
        s += &join(row);
        s.push('\n');
    }
    s += &format!("levels {}\nk {}\nr {}\n", inst.levels(), join(inst.budgets()), join(inst.radii()));
    s
}

/// A solution document: protected vertices or placed centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Protect(ProtectionSet),
    Centers(CenterSet),
}

impl Solution {
    /// The protected set, if this is a tree solution.
    pub fn protection(&self) -> Option<&ProtectionSet> {
        match self {
            Solution::Protect(r) => Some(r),
            Solution::Centers(_) => None,
        }
    }

    /// The center set; an empty document counts as an empty set.
    pub fn centers(&self) -> Option<CenterSet> {
        match self {
            Solution::Centers(c) => Some(c.clone()),
            Solution::Protect(r) if r.is_empty() => Some(CenterSet::new()),
            Solution::Protect(_) => None,
        }
    }
}

/// Parses the `solution v1` format. Ids are only range-checked against the
/// instance when the solution is checked.
pub fn parse_solution(text: &str) -> Result<Solution> {
    let mut rd = Reader::new(text);
    rd.header("solution")?;
    let mut protect = ProtectionSet::new();
    let mut centers = CenterSet::new();
    while let Some(kw) = rd.peek_keyword() {
        let kw = kw.to_string();
        let (ln, args) = rd.keyword(&kw)?;
        let dup = |t: &Token| malformed(t.line, t.col, "duplicate entry");
        match kw.as_str() {
            "protect" => {
                arity(ln, &args, 1, "protect")?;
                if !protect.insert(index(&args[0], MAX_ITEMS, "vertex")?) {
                    return Err(dup(&args[0]));
                }
            }
            "center" => {
                arity(ln, &args, 2, "center")?;
                let p = index(&args[0], MAX_ITEMS, "point")?;
                let l = index(&args[1], MAX_ITEMS, "level")?;
                if l == 0 {
                    return Err(malformed(args[1].line, args[1].col, "levels start at 1"));
                }
                if !centers.insert((p, l)) {
                    return Err(dup(&args[0]));
                }
            }
            other => return Err(malformed(ln, 1, format!("unknown entry `{other}`"))),
        }
        if !protect.is_empty() && !centers.is_empty() {
            return Err(malformed(ln, 1, "a solution cannot mix `protect` and `center` lines"));
        }
    }
    Ok(if centers.is_empty() { Solution::Protect(protect) } else { Solution::Centers(centers) })
}

/// Renders a solution document.
pub fn serialize_solution(s: &Solution) -> String {
    let mut out = String::from("solution v1\n");
    match s {
        Solution::Protect(r) => r.iter().for_each(|v| out += &format!("protect {v}\n")),
        Solution::Centers(c) => c.iter().for_each(|(p, l)| out += &format!("center {p} {l}\n")),
    }
    out
}

/// Either kind of instance document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Tree(TreeFile),
    Metric(SnukcInstance),
}

/// Dispatches on the header line.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let rd = Reader::new(text);
    match rd.peek_keyword() {
        Some("rmfc") => parse_tree(text).map(Instance::Tree),
        Some("nukc") => parse_metric(text).map(Instance::Metric),
        Some(other) => {
            let l = &rd.lines[0];
            Err(malformed(l.no, l.tokens[0].col, format!("unknown header `{other}`")))
        }
        None => Err(malformed(1, 1, "empty input")),
    }
}

/// Renders either kind of instance.
pub fn serialize_instance(inst: &Instance) -> String {
    match inst {
        Instance::Tree(t) => serialize_tree(t),
        Instance::Metric(m) => serialize_metric(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{q, qf};

    pub const T1: &str = "rmfc v1\nn 6\nroot 0\nedge 0 1\nedge 0 2\nedge 1 3\nedge 1 4\nedge 2 5\nbudget 1 1\n";
    pub const M1: &str = "nukc v1\npoints 3\n0 10 20\n10 0 10\n20 10 0\nlevels 1\nk 1\nr 5\n";

    fn message(e: Error) -> String {
        match e {
            Error::MalformedInput(m) => m,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tree_round_trip() {
        let f = parse_tree(T1).unwrap();
        assert_eq!(f.tree.leaves(), &[3, 4, 5]);
        assert_eq!(f.budgets, vec![q(1), q(1)]);
        assert_eq!(serialize_tree(&f), T1);
        let with = "rmfc v1\nn 4\nroot 0\nedge 0 1  # comment\n\nedge 0 2\nedge 2 3\nbudget 1/3\nprotect 1 3\n";
        let g = parse_tree(with).unwrap();
        assert_eq!(g.budgets, vec![qf(1, 3)]);
        assert_eq!(parse_tree(&serialize_tree(&g)).unwrap(), g);
        let (inst, map) = g.srmfc().unwrap();
        assert_eq!(inst.budgets(), &[qf(1, 3), qf(1, 3)]);
        assert_eq!(map.len(), 4);
    }

    #[test]
    fn budgets_are_exact() {
        let f = parse_tree("rmfc v1\nn 2\nroot 0\nedge 0 1\nbudget 1/3\n").unwrap();
        assert_eq!(f.budgets, vec![qf(1, 3)]);
        let f = parse_tree("rmfc v1\nn 2\nroot 0\nedge 0 1\nbudget 0.25\n").unwrap();
        assert_eq!(f.budgets, vec![qf(1, 4)]);
        assert!(f.rmfc().is_err());
    }

    #[test]
    fn tree_errors_carry_positions() {
        let m = message(parse_tree("rmfc v1\nn 3\nroot 0\nedge 0 1\nedge 0 x\nbudget 1\n").unwrap_err());
        assert!(m.starts_with("line 5, column 8"), "{m}");
        let m = message(parse_tree("rmfc v2\n").unwrap_err());
        assert!(m.starts_with("line 1, column 1"), "{m}");
        let m = message(parse_tree("rmfc v1\nn 3\nroot 0\nedge 0 1\nedge 1 0\nbudget 1\n").unwrap_err());
        assert!(m.starts_with("line 4"), "{m}");
        let m = message(parse_tree("rmfc v1\nn 2\nroot 0\nedge 0 1\n").unwrap_err());
        assert!(m.contains("end of input"), "{m}");
        assert!(parse_tree("rmfc v1\nn 2\nroot 0\nedge 0 1\nbudget 1 1\n").is_err());
        assert!(parse_tree("rmfc v1\nn 2\nroot 0\nedge 0 1\nbudget -1\n").is_err());
        assert!(parse_tree("rmfc v1\nn 2\nroot 0\nedge 0 1\nbudget 1\nextra\n").is_err());
        assert!(parse_tree("rmfc v1\nn 2\nroot 0\nedge 0 1\nbudget 1\nprotect 0\n").is_err());
    }

    #[test]
    fn metric_round_trip_and_validation() {
        let m = parse_metric(M1).unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(serialize_metric(&m), M1);
        let bad = "nukc v1\npoints 3\n0 1 5\n1 0 1\n5 1 0\nlevels 1\nk 1\nr 1\n";
        let msg = message(parse_metric(bad).unwrap_err());
        assert!(msg.contains("non-metric") && msg.starts_with("line 2"), "{msg}");
        let short = "nukc v1\npoints 2\n0 1\n1\nlevels 1\nk 1\nr 1\n";
        assert!(message(parse_metric(short).unwrap_err()).starts_with("line 4"));
        assert!(parse_metric("nukc v1\npoints 1\n0\nlevels 2\nk 1 1\nr 1 2\n").is_err());
    }

    #[test]
    fn solutions() {
        let s = parse_solution("solution v1\nprotect 1\nprotect 5\n").unwrap();
        assert_eq!(s, Solution::Protect([1, 5].into_iter().collect()));
        assert_eq!(parse_solution(&serialize_solution(&s)).unwrap(), s);
        let c = parse_solution("solution v1\ncenter 1 1\n").unwrap();
        assert_eq!(c.centers(), Some([(1, 1)].into_iter().collect()));
        assert_eq!(parse_solution(&serialize_solution(&c)).unwrap(), c);
        assert_eq!(parse_solution("solution v1\n").unwrap().centers(), Some(CenterSet::new()));
        assert!(parse_solution("solution v1\nprotect 1\ncenter 1 1\n").is_err());
        assert!(parse_solution("solution v1\ncenter 1 0\n").is_err());
        assert!(parse_solution("solution v1\nprotect 1\nprotect 1\n").is_err());
    }

    #[test]
    fn dispatch() {
        assert!(matches!(parse_instance(T1), Ok(Instance::Tree(_))));
        assert!(matches!(parse_instance(M1), Ok(Instance::Metric(_))));
        assert!(parse_instance("").is_err());
        assert!(parse_instance("other v1").is_err());
    }
}
