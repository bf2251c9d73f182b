//! Exact computations with filtered A∞ algebras over the Novikov field:
//! labeled operator systems, homological perturbation, pseudo-isotopies,
//! potentials and wall-crossing.

pub mod algebra;
pub mod fixtures;
pub mod fukaya;
pub mod group_series;
pub mod hpt;
pub mod isotopy;
pub mod labels;
pub mod novikov;
pub mod obstruction;
pub mod poly;
pub mod specfile;
pub mod transitions;
