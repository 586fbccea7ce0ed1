//! Lower-bound gadgets and what can be read off them.

mod adversarial;
mod kl;

pub use adversarial::{
    build_adversarial, customer_index, extract_bid_set, facility_index, verify_property_ii, AdversarialInstance,
    GadgetViolation, PropertyReport, ADVERSARIAL_MAX_M, PROPERTY_CHECK_MAX_M,
};
pub use kl::{build_kl, kl_algorithm, KlCosts, KlInstance, KlOption, KlOutcome};
