//! Howe operators, the Kudla–Millson forms `φ⁺_{q,q}` and `φ_KM`, and the
//! Laguerre family behind their Gaussian moments.

pub mod kmform;
pub mod laguerre;
pub mod wedge;

pub use kmform::{
    km_form, km_form_expansion, km_schwartz, km_term, multi_indices, pair_count, term_multiplicities, term_sign,
    top_coefficient, var_index, wedge_power, FabCache, KMForm, KMFormJson, SignRule, TermMultiplicities,
};
pub use laguerre::{
    e_operator_formula, f_ab, f_k, laguerre_closed, laguerre_g, laguerre_recursive, normalize_f_k, LaguerreMode,
};
pub use wedge::{sort_sign, sort_sign_closed_form, uniform_sign, xi_word, Generator, WedgeWord};
