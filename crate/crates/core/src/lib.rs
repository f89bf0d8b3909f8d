//! Exact jet-level computations for integral map-germs into the standard
//! contact space `(K^{2n+1}, dr - sum p_i dq_i)`.

pub mod contact;
pub mod corpus;
pub mod deformations;
pub mod exec;
pub mod forms;
pub mod integral_maps;
pub mod jet;
pub mod linalg;
pub mod ring;
pub mod scalar;
pub mod stability;
