//! Model description: the formula language and the JSON model file.

pub mod expr;
pub mod file;

pub use expr::{eval_expr, parse_expr, EvalError, ModelExpr, ParseError};
pub use file::{load_model, parse_model, plugin_model, MeasureEntry, Meta, ModelError, ModelFile};
