//! Randomized and adversarial verification of the colorings.

mod coloring;
mod generate;
mod search;

pub use coloring::{Coloring, Judgement};
pub use generate::{
    check_mode_dim, gen_near_identity_box, gen_unit_area_rectangle, gen_unit_product_parallelogram,
    gen_unit_product_skeleton, gen_unit_volume_box, sample_configuration, Mode, Ranges, State,
    SKELETON_RESAMPLE_BUDGET, SKELETON_SEPARATION,
};
pub use search::{
    adversarial_search, run_search, with_threads, AdversarialSpec, AdversarialStats, Outcome,
    SearchReport, TrialSpec, Witness, MAX_WITNESSES, RESAMPLE_BUDGET,
};
