//! Newick reading and writing.
//!
//! Accepted: nested `(…)` groups, unquoted or `'quoted'` labels (`''` is an
//! escaped quote), `:length` suffixes (missing lengths are 0), `[comments]`
//! anywhere between tokens, and arbitrary whitespace. Internal node labels
//! are read and dropped. Output is canonical: children ordered by their
//! smallest leaf index, lengths printed with 12 significant digits.

use std::fmt;

use troppca_core::RootedTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the text handed to the parser.
    pub offset: usize,
    /// 1-based line and column of `offset`.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {} (offset {}): {}", self.line, self.column, self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

fn locate(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error(text: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = locate(text, offset);
    ParseError { offset, line, column, message: message.into() }
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    /// Offset of `bytes[0]` within the text used for error positions.
    base: usize,
    full: &'a str,
    parents: Vec<Option<usize>>,
    lengths: Vec<f64>,
    names: Vec<Option<String>>,
    root_length: Option<f64>,
    seen: std::collections::HashMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn err(&self, at: usize, message: impl Into<String>) -> ParseError {
        error(self.full, self.base + at, message)
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_blank(&mut self) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    match self.text[self.pos..].find(']') {
                        Some(end) => self.pos += end + 1,
                        None => return Err(self.err(start, "unterminated comment")),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn new_node(&mut self, parent: Option<usize>) -> usize {
        self.parents.push(parent);
        self.lengths.push(0.0);
        self.names.push(None);
        self.parents.len() - 1
    }

    fn label(&mut self) -> Result<Option<(String, usize)>, ParseError> {
        self.skip_blank()?;
        let start = self.pos;
        match self.peek() {
            Some(b'\'') => {
                let mut out = String::new();
                self.pos += 1;
                loop {
                    let rest = &self.text[self.pos..];
                    let Some(q) = rest.find('\'') else {
                        return Err(self.err(start, "unterminated quoted label"));
                    };
                    out.push_str(&rest[..q]);
                    self.pos += q + 1;
                    if self.peek() == Some(b'\'') {
                        out.push('\'');
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                if out.is_empty() {
                    return Err(self.err(start, "empty quoted label"));
                }
                Ok(Some((out, start)))
            }
            _ => {
                while let Some(b) = self.peek() {
                    if b"()[]':;,".contains(&b) || b.is_ascii_whitespace() {
                        break;
                    }
                    self.pos += 1;
                }
                if self.pos == start {
                    Ok(None)
                } else {
                    Ok(Some((self.text[start..self.pos].to_string(), start)))
                }
            }
        }
    }

    fn length(&mut self) -> Result<Option<f64>, ParseError> {
        self.skip_blank()?;
        if self.peek() != Some(b':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_blank()?;
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b"+-.".contains(&b) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let raw = &self.text[start..self.pos];
        if raw.is_empty() {
            return Err(self.err(start, "missing branch length after ':'"));
        }
        let value: f64 = raw
            .parse()
            .map_err(|_| self.err(start, format!("malformed branch length '{raw}'")))?;
        if !value.is_finite() {
            return Err(self.err(start, format!("branch length '{raw}' is not finite")));
        }
        if value < 0.0 {
            return Err(self.err(start, format!("negative branch length {raw}")));
        }
        Ok(Some(value))
    }

    /// Parses one subtree hanging from `parent`; returns its node.
    fn subtree(&mut self, parent: Option<usize>, depth: usize) -> Result<usize, ParseError> {
        if depth > 10_000 {
            return Err(self.err(self.pos, "nesting too deep"));
        }
        self.skip_blank()?;
        let node = self.new_node(parent);
        if self.peek() == Some(b'(') {
            let open = self.pos;
            self.pos += 1;
            loop {
                self.subtree(Some(node), depth + 1)?;
                self.skip_blank()?;
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(b';') | None => {
                        return Err(self.err(self.pos, format!("unbalanced parentheses: '(' at offset {} is never closed", self.base + open)))
                    }
                    Some(_) => return Err(self.err(self.pos, "expected ',' or ')'")),
                }
            }
            // internal labels are dropped
            self.label()?;
        } else {
            match self.label()? {
                Some((name, at)) => {
                    if self.seen.insert(name.clone(), at).is_some() {
                        return Err(self.err(at, format!("duplicate leaf label '{name}'")));
                    }
                    self.names[node] = Some(name);
                }
                None => {
                    let msg = match self.peek() {
                        Some(b')') => "unbalanced parentheses: unexpected ')'".to_string(),
                        Some(b';') | None if parent.is_none() && self.names.len() == 1 => "empty tree".to_string(),
                        Some(b) => format!("expected a leaf label, found '{}'", b as char),
                        None => "unexpected end of input".to_string(),
                    };
                    return Err(self.err(self.pos, msg));
                }
            }
        }
        if let Some(l) = self.length()? {
            if parent.is_some() {
                self.lengths[node] = l;
            } else {
                self.root_length = Some(l);
            }
        }
        Ok(node)
    }
}

/// Parses a single Newick statement terminated by `;`.
pub fn parse_newick(text: &str) -> Result<RootedTree, ParseError> {
    parse_statement(text, 0, text)
}

/// `stmt` is a slice of `full` starting at byte `base`.
fn parse_statement(stmt: &str, base: usize, full: &str) -> Result<RootedTree, ParseError> {
    let mut p = Parser {
        text: stmt,
        bytes: stmt.as_bytes(),
        pos: 0,
        base,
        full,
        parents: Vec::new(),
        lengths: Vec::new(),
        names: Vec::new(),
        root_length: None,
        seen: Default::default(),
    };
    p.skip_blank()?;
    if p.peek().is_none() {
        return Err(p.err(0, "empty input"));
    }
    p.subtree(None, 0)?;
    p.skip_blank()?;
    match p.peek() {
        Some(b';') => p.pos += 1,
        Some(b')') => return Err(p.err(p.pos, "unbalanced parentheses: unexpected ')'")),
        Some(_) => return Err(p.err(p.pos, "expected ';'")),
        None => return Err(p.err(p.pos, "missing ';' at end of tree")),
    }
    p.skip_blank()?;
    if p.pos < p.bytes.len() {
        return Err(p.err(p.pos, "unexpected text after ';'"));
    }
    let root_length = p.root_length;
    let invalid = p.err(0, "");
    let mut tree = RootedTree::from_named(p.parents, p.lengths, p.names)
        .map_err(|e| ParseError { message: e.to_string(), ..invalid })?;
    tree.set_root_length(root_length);
    Ok(tree)
}

/// Byte ranges of the `;`-terminated statements in `text`, ignoring `;`
/// inside quotes and comments. Trailing text without `;` is returned as a
/// final (unterminated) statement.
fn statements(text: &str) -> Vec<(usize, usize)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    let (mut quoted, mut comment) = (false, false);
    while i < bytes.len() {
        match bytes[i] {
            b'\'' if !comment => quoted = !quoted,
            b'[' if !quoted => comment = true,
            b']' if !quoted => comment = false,
            b';' if !quoted && !comment => {
                out.push((start, i + 1));
                start = i + 1;
            }
            _ => {}
        }
        i += 1;
    }
    if !text[start..].trim().is_empty() {
        out.push((start, text.len()));
    }
    out
}

/// Parses every tree in a file: one per line or several `;`-separated.
/// All errors are collected, each positioned in the whole file.
pub fn parse_newick_file(text: &str) -> Result<Vec<RootedTree>, Vec<ParseError>> {
    let mut trees = Vec::new();
    let mut errors = Vec::new();
    for (start, end) in statements(text) {
        match parse_statement(&text[start..end], start, text) {
            Ok(t) => trees.push(t),
            Err(e) => errors.push(e),
        }
    }
    if trees.is_empty() && errors.is_empty() {
        errors.push(error(text, 0, "empty input"));
    }
    if errors.is_empty() {
        Ok(trees)
    } else {
        Err(errors)
    }
}

/// Rounds to 12 significant digits and prints the shortest form of the result.
pub fn format_length(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded}")
}

fn needs_quotes(label: &str) -> bool {
    label.is_empty() || label.bytes().any(|b| b"()[]':;,".contains(&b) || b.is_ascii_whitespace())
}

fn write_label(out: &mut String, label: &str) {
    if needs_quotes(label) {
        out.push('\'');
        out.push_str(&label.replace('\'', "''"));
        out.push('\'');
    } else {
        out.push_str(label);
    }
}

/// Canonical Newick for `tree`.
pub fn to_newick(tree: &RootedTree) -> String {
    let sets = tree.leaf_sets();
    let smallest = |v: usize| sets[v].iter().copied().min().unwrap_or(usize::MAX);
    let mut out = String::new();
    // explicit stack: (node, next child position)
    let mut stack: Vec<(usize, usize)> = vec![(tree.root(), 0)];
    let mut ordered: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if tree.is_leaf(v) {
            let leaf = tree.leaf_index(v).expect("leaf node has an index");
            write_label(&mut out, &tree.labels()[leaf]);
            stack.pop();
            close(tree, v, &mut out);
            continue;
        }
        let kids = ordered.entry(v).or_insert_with(|| {
            let mut k = tree.children(v).to_vec();
            k.sort_by_key(|&c| smallest(c));
            k
        });
        if *next == 0 {
            out.push('(');
        } else if *next < kids.len() {
            out.push(',');
        }
        if *next < kids.len() {
            let child = kids[*next];
            *next += 1;
            stack.push((child, 0));
        } else {
            out.push(')');
            stack.pop();
            close(tree, v, &mut out);
        }
    }
    out.push(';');
    out
}

fn close(tree: &RootedTree, v: usize, out: &mut String) {
    let len = if v == tree.root() { tree.root_length() } else { Some(tree.length(v)) };
    if let Some(l) = len {
        out.push(':');
        out.push_str(&format_length(l));
    }
}

/// Newick of a topology alone: clades as nested groups, no lengths.
pub fn topology_newick(topology: &troppca_core::TreeTopology, labels: &[String]) -> String {
    let clades = topology.clades();
    let inside = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok());
    // each clade hangs from the smallest clade strictly containing it
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); clades.len()];
    let mut root = 0;
    for (i, c) in clades.iter().enumerate() {
        let parent = (0..clades.len())
            .filter(|&j| inside(c, &clades[j]))
            .min_by_key(|&j| clades[j].len());
        match parent {
            Some(p) => children[p].push(i),
            None => root = i,
        }
    }
    for kids in &mut children {
        kids.sort_by_key(|&j| clades[j][0]);
    }
    fn render(i: usize, clades: &[Vec<usize>], children: &[Vec<usize>], labels: &[String], out: &mut String) {
        if children[i].is_empty() {
            write_label(out, &labels[clades[i][0]]);
            return;
        }
        out.push('(');
        for (n, &k) in children[i].iter().enumerate() {
            if n > 0 {
                out.push(',');
            }
            render(k, clades, children, labels, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    render(root, clades, &children, labels, &mut out);
    out.push(';');
    out
}
