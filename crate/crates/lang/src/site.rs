//! Source locations for lowered statements.
//!
//! Lowered ASTs carry no positions (they are compared structurally and
//! serialized into certificates). Instead the parser records where each
//! statement came from, keyed by the statement's path from the body root.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Child indices from the function body down to a statement.
///
/// `Seq` numbers its children 0 and 1, `If` its branches 0 and 1; `Let`,
/// `While` and `Block` have the single child 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StmtPath(pub Vec<u8>);

impl StmtPath {
    pub fn root() -> Self {
        StmtPath(Vec::new())
    }

    pub fn child(&self, i: u8) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        StmtPath(v)
    }
}

impl fmt::Display for StmtPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("body")?;
        for i in &self.0 {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}

/// Where a formula node originated: a statement, or one of the contracts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Pre,
    Post,
    Stmt(StmtPath),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Pre => f.write_str("precondition"),
            Site::Post => f.write_str("postcondition"),
            Site::Stmt(p) => p.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SiteMap {
    pub header: Pos,
    pub pre: Pos,
    pub post: Pos,
    pub stmts: BTreeMap<StmtPath, Pos>,
}

impl SiteMap {
    /// Best-known position for `site`: the statement itself, else its
    /// nearest recorded ancestor, else the function header.
    pub fn locate(&self, site: &Site) -> Pos {
        match site {
            Site::Pre => self.pre,
            Site::Post => self.post,
            Site::Stmt(path) => {
                let mut p = path.0.as_slice();
                loop {
                    if let Some(pos) = self.stmts.get(&StmtPath(p.to_vec())) {
                        return *pos;
                    }
                    match p.split_last() {
                        Some((_, rest)) => p = rest,
                        None => return self.header,
                    }
                }
            }
        }
    }
}
