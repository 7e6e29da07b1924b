//! Exact univariate algebra over the rationals, plus root classification.

pub mod cyclotomic;
mod gcd;
pub mod polynomial;
pub mod ratfunc;
pub mod rational;
pub mod roots;
pub mod stability;
pub mod sturm;

pub use cyclotomic::{cyclotomic, cyclotomic_product, euler_phi, extract_cyclotomic_part, CyclotomicPart};
pub use polynomial::{parse_polynomial_json, Polynomial};
pub use ratfunc::RationalFunction;
pub use rational::{format_rational, parse_rational, rat, Rational};
pub use roots::{roots_numeric, ComplexPoint};
pub use stability::{all_roots_outside_unit_disk, has_root_on_unit_circle, DiskVerdict};
pub use sturm::{count_real_roots, isolate_with_width, sturm_isolate, RootInterval};
