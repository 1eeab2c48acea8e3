//! Newick reading and canonical writing for unrooted X-trees.
//!
//! The reader accepts the usual parenthesised form terminated by `;`, with
//! optional `:length` annotations (default 1.0). The implicit root and any
//! vertex left with two neighbours are suppressed. Interior labels are
//! accepted and ignored; quoted labels are not supported.
//!
//! The writer roots at the interior vertex next to the smallest taxon and
//! orders children by their smallest descendant taxon, so equivalent trees
//! with equal weights produce identical strings.

use thiserror::Error;

use crate::tree::{Taxon, TreeBuilder, TreeError, XTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NewickError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: negative branch length {value}")]
    NegativeBranchLength { line: usize, column: usize, value: f64 },
    #[error("duplicate leaf label {0:?}")]
    DuplicateTaxon(String),
    #[error("tree has {0} leaves, at least 3 are required")]
    TooFewLeaves(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

struct Cursor<'a> {
    chars: Vec<(usize, usize, char)>,
    pos: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let mut chars = Vec::with_capacity(text.len());
        let (mut line, mut column) = (1, 1);
        for c in text.chars() {
            chars.push((line, column, c));
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Cursor { chars, pos: 0, text }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].2.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, _, c)| c)
    }

    fn location(&self) -> (usize, usize) {
        match self.chars.get(self.pos) {
            Some(&(l, c, _)) => (l, c),
            None => {
                let line = self.text.lines().count().max(1);
                let column = self.text.lines().last().map_or(0, |l| l.chars().count()) + 1;
                (line, column)
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> NewickError {
        let (line, column) = self.location();
        NewickError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(&(_, _, c)) = self.chars.get(self.pos) {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.pos += 1;
        }
        out
    }

    fn label(&mut self) -> Result<Option<String>, NewickError> {
        match self.peek() {
            Some('\'') | Some('"') => Err(self.error("quoted labels are not supported")),
            Some(c) if Taxon::label_char(c) => Ok(Some(self.take_while(Taxon::label_char))),
            _ => Ok(None),
        }
    }

    fn length(&mut self) -> Result<Option<f64>, NewickError> {
        if self.peek() != Some(':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_ws();
        let (line, column) = self.location();
        let raw = self.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        let value: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| NewickError::Syntax {
                line,
                column,
                message: format!("invalid branch length {raw:?}"),
            })?;
        if value < 0.0 {
            return Err(NewickError::NegativeBranchLength { line, column, value });
        }
        Ok(Some(value))
    }
}

/// Parses one Newick tree.
pub fn parse_newick(text: &str) -> Result<XTree, NewickError> {
    let mut cur = Cursor::new(text);
    let mut builder = TreeBuilder::new();
    let mut leaves: Vec<String> = Vec::new();

    if cur.peek() != Some('(') {
        return Err(cur.error("expected '('"));
    }
    // Open vertices, innermost last, with their child count.
    let mut stack: Vec<(usize, usize)> = Vec::new();
    loop {
        // Expect a subtree.
        match cur.peek() {
            Some('(') => {
                cur.pos += 1;
                let v = builder.add_vertex(None);
                stack.push((v, 0));
                continue;
            }
            _ => {
                let (line, column) = cur.location();
                let label = cur.label()?.ok_or_else(|| cur.error("expected a leaf label or '('"))?;
                if leaves.contains(&label) {
                    return Err(NewickError::DuplicateTaxon(label));
                }
                let taxon = Taxon::new(label.clone()).map_err(|_| NewickError::Syntax {
                    line,
                    column,
                    message: format!("invalid leaf label {label:?}"),
                })?;
                leaves.push(label);
                let v = builder.add_vertex(Some(taxon));
                let w = cur.length()?.unwrap_or(1.0);
                let top = stack.last_mut().unwrap();
                builder.add_edge(top.0, v, w);
                top.1 += 1;
            }
        }
        // After a subtree: ',' continues the sibling list, ')' closes.
        loop {
            match cur.peek() {
                Some(',') => {
                    cur.pos += 1;
                    break;
                }
                Some(')') => {
                    cur.pos += 1;
                    let (v, _) = stack.pop().unwrap();
                    cur.label()?;
                    let w = cur.length()?;
                    match stack.last_mut() {
                        Some(top) => {
                            builder.add_edge(top.0, v, w.unwrap_or(1.0));
                            top.1 += 1;
                        }
                        None => {
                            if cur.peek() != Some(';') {
                                return Err(cur.error("expected ';'"));
                            }
                            cur.pos += 1;
                            if cur.peek().is_some() {
                                return Err(cur.error("unexpected text after ';'"));
                            }
                            return finish(builder, leaves.len());
                        }
                    }
                }
                None => return Err(cur.error("unbalanced parenthesis: unexpected end of input")),
                Some(c) => return Err(cur.error(format!("unexpected character {c:?}"))),
            }
        }
    }
}

fn finish(builder: TreeBuilder, leaf_count: usize) -> Result<XTree, NewickError> {
    if leaf_count < 3 {
        return Err(NewickError::TooFewLeaves(leaf_count));
    }
    Ok(builder.build()?)
}

/// Canonical Newick serialization.
pub fn write_newick(tree: &XTree) -> String {
    let first = tree.leaf(0);
    let (root, _) = tree.neighbors(first)[0];
    if tree.taxon_at(root).is_some() {
        // Two-leaf tree: a single edge.
        let w = tree.edges()[0].weight();
        return format!("({}:{},{}:0);", tree.taxa()[0], w, tree.taxa()[1]);
    }

    // Smallest descendant taxon of every vertex, hanging from `root`.
    let nv = tree.vertex_count();
    let mut parent = vec![(usize::MAX, usize::MAX); nv];
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &(u, e) in tree.neighbors(v) {
            if u != parent[v].0 {
                parent[u] = (v, e);
                order.push(u);
            }
        }
        i += 1;
    }
    let mut min_below = vec![usize::MAX; nv];
    for &v in order.iter().rev() {
        if let Some(t) = tree.taxon_at(v) {
            min_below[v] = t;
        }
        if v != root {
            let p = parent[v].0;
            min_below[p] = min_below[p].min(min_below[v]);
        }
    }

    let mut out = String::new();
    write_vertex(tree, root, &parent, &min_below, &mut out);
    out.push(';');
    out
}

fn write_vertex(
    tree: &XTree,
    v: usize,
    parent: &[(usize, usize)],
    min_below: &[usize],
    out: &mut String,
) {
    if let Some(t) = tree.taxon_at(v) {
        out.push_str(tree.taxa()[t].as_str());
        return;
    }
    let mut children: Vec<(usize, usize)> = tree
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&(u, _)| u != parent[v].0)
        .collect();
    children.sort_by_key(|&(u, _)| min_below[u]);
    out.push('(');
    for (k, (u, e)) in children.into_iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write_vertex(tree, u, parent, min_below, out);
        out.push(':');
        out.push_str(&tree.edge(e).weight().to_string());
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartet_with_suppressed_root() {
        let t = parse_newick("((a:1,b:1):1,(c:1,d:1):1);").unwrap();
        assert_eq!(t.n_taxa(), 4);
        assert_eq!(t.edges().len(), 5);
        let interior: Vec<f64> = (0..5)
            .filter(|&e| !t.is_pendant(e))
            .map(|e| t.edge(e).weight())
            .collect();
        assert_eq!(interior, vec![2.0]);
        assert!(t.quartet_topology("a", "b", "c", "d").unwrap().is("a", "b", "c", "d"));
    }

    #[test]
    fn default_weights_and_star() {
        let t = parse_newick("((a,b),c);").unwrap();
        assert_eq!(t.edges().len(), 3);
        assert_eq!(t.interior_vertices().count(), 1);
        // The suppressed root joins two unit edges into one of length 2.
        let mut w: Vec<f64> = t.edges().iter().map(|e| e.weight()).collect();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![1.0, 1.0, 2.0]);
        assert_eq!(t.path_distance("a", "c").unwrap(), 3.0);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_newick("((a,b)") {
            Err(NewickError::Syntax { line, message, .. }) => {
                assert_eq!(line, 1);
                assert!(message.contains("unbalanced"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_newick("(a,\n b,\n c:x);") {
            Err(NewickError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 4)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_newick("(a,b,c)"), Err(NewickError::Syntax { .. })));
        assert!(matches!(parse_newick("(a,b,c);x"), Err(NewickError::Syntax { .. })));
        assert!(matches!(parse_newick("(a,,c);"), Err(NewickError::Syntax { .. })));
        assert!(matches!(parse_newick("('a',b,c);"), Err(NewickError::Syntax { .. })));
    }

    #[test]
    fn semantic_errors() {
        assert_eq!(
            parse_newick("(a,b,a);").unwrap_err(),
            NewickError::DuplicateTaxon("a".into())
        );
        assert_eq!(parse_newick("(a,b);").unwrap_err(), NewickError::TooFewLeaves(2));
        assert!(matches!(
            parse_newick("(a:1,b:-2,c);"),
            Err(NewickError::NegativeBranchLength { value, .. }) if value == -2.0
        ));
    }

    #[test]
    fn interior_labels_and_redundant_parentheses() {
        let t = parse_newick("(((a:0.5)):0.5,(b,c)x:2)root;").unwrap();
        assert_eq!(t.n_taxa(), 3);
        assert_eq!(t.path_distance("a", "b").unwrap(), 5.0);
    }

    #[test]
    fn canonical_writer() {
        let t = parse_newick("((a:1,b:1):1,(c:1,d:1):1);").unwrap();
        assert_eq!(write_newick(&t), "(a:1,b:1,(c:1,d:1):2);");
        let shuffled = parse_newick("(d:1,(b:1,a:1):2,c:1);").unwrap();
        assert_eq!(write_newick(&t), write_newick(&shuffled));
        let back = parse_newick(&write_newick(&t)).unwrap();
        assert!(back.is_equivalent(&t).unwrap());
        assert_eq!(back.max_weight_difference(&t).unwrap(), Some(0.0));
    }

    #[test]
    fn two_leaf_restriction_round_trips() {
        let t = parse_newick("((a:1,b:2):3,(c:4,d:5):6);").unwrap();
        let pair = t.restrict(&["b", "d"]).unwrap();
        assert_eq!(write_newick(&pair), "(b:16,d:0);");
    }
}
