//! Verification of the theorems relating epistemic rationality to
//! iterated elimination, with seeded generators and property suites.

pub mod dump;
pub mod generate;
pub mod suites;
pub mod verify;

pub use generate::{generate_game, generate_model, instance_seed, GeneratorConfig};
pub use verify::{replay, Claim, Counterexample, Verdict, VerificationReport};
