//! Instance parsing, JSON formats and SVG rendering.

mod json;
mod parse;
mod svg;

pub use json::{circuit_from_json, circuit_to_json, graph_from_json, graph_to_json, rational_arg};
pub use parse::{instance_to_text, parse_instance, ParseOptions};
pub use svg::{render_circuit, render_graph, SvgOptions};
