//! Front end for a small annotated C subset: abstract syntax, the C parser
//! and its lowering, persistent stores, and the certificate file format.
//!
//! ```
//! use vfx_lang::{parse_program, SourceProgram, ast};
//!
//! let p = parse_program(&SourceProgram::new("countdown.c", ast::COUNTDOWN_SOURCE)).unwrap();
//! assert_eq!(p.func, ast::countdown());
//! ```

pub mod analysis;
pub mod ast;
pub mod cert;
pub mod parse;
pub mod sexpr;
pub mod site;
pub mod store;

pub use analysis::{free_targets, well_formed, Diagnostic};
pub use ast::{BinOp, Expr, Func, Ident, Stmt};
pub use parse::{parse_annotation_expr, parse_program, ParseError, ParsedProgram, SourceProgram};
pub use site::{Pos, Site, SiteMap, StmtPath};
pub use store::{is_int, IntBounds, Store, MAX_SIGNED, MIN_SIGNED};
