//! The class-expression rule language: conjunction, object existentials,
//! datatype facets and `SubClassOf` axioms.

mod ast;
mod bind;
mod parser;
mod render;

pub use ast::{Axiom, ClassExpr, Facet, FacetKind, Literal, Name, Span};
pub use bind::{bind, bind_axiom, BindError, BindErrorKind, BoundAxiom, BoundExpr, BoundFacet, BoundHead};
pub use parser::{is_keyword, line_col, parse_axiom, parse_expr, parse_number, AxiomError, ParseError};
pub use render::{render_axiom, render_expr, render_literal};
