//! Explicitly-typed pure type systems.

mod pts;
pub mod reduce;
mod sort;
mod term;
mod typing;

pub use pts::{elaborate, erase_to_pts, PtsTerm};
pub use reduce::{epts_step, ConversionError};
pub use sort::{sort_base_theory, FiniteSpec, InternalizedSpec, SortSpec, SpecError, SORT_AXIOM, SORT_RULE, SORT_TYPE};
pub use term::{Binder, EptsContext, EptsPath, EptsTerm, Sort};
pub use typing::{
    epts_check, epts_check_context, epts_check_with_fuel, epts_infer, epts_infer_with_fuel, epts_sort_of,
    EptsChecker, EptsError,
};
