//! The three augmented local hidden variable protocols.

pub mod composed;
pub mod slot;
pub mod table;

pub use composed::{composed_run, ComposedBit, ComposedProtocol};
pub use slot::{
    bob_plan, pr_equal_given_theta, slot_alice, slot_bob, BobPlan, Separation, SlotHidden,
    SlotProtocol,
};
pub use table::{
    bell_scenario, chsh_example, correlated_example, dj_scenario, table_prepare,
    table_prepare_lazy, table_run, FiniteScenario, TableHidden, TableProtocol,
};
