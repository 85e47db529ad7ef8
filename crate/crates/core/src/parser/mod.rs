//! Deladas source text to [`Goal`](crate::model::Goal).

mod grammar;
mod infer;
mod lexer;
mod pretty;

pub use grammar::parse_goal;
pub use infer::{direction_hint, infer_ports};
pub use lexer::{tokenize, Keyword, Symbol, Token, TokenKind};
