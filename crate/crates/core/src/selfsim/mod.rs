//! Virtual endomorphisms, tree representations built from them, and F-core
//! witnesses.

mod fcore;
mod gdata_text;
mod rep;
mod tree;
mod vendo;

pub use fcore::{
    central_preimage, common_powers, fcore_witness, nf_matrix, Witness, WitnessChecks, WitnessKind, WitnessOutcome,
    INVARIANT_CHAIN_STEPS,
};
pub use gdata_text::parse_gdata;
pub use rep::{
    build_cosettree_rep, divisibility_certificate, faithful_to_depth, format_tree_word, parse_tree_word, Detection,
    FaithfulReport, GData, GDataRep,
};
pub use tree::{act_on_word, states, Automaton, AutomatonState, PNode, Portrait, TreeAction};
pub use vendo::{Endomorphism, VirtualEndomorphism};
