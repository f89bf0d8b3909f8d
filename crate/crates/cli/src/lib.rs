//! Germ documents, report rendering and front sampling for the `legendre`
//! command line tool.

pub mod document;
pub mod front;
pub mod render;
