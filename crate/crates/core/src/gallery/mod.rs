//! Generated instances, named scenarios and property suites.
pub mod oracles;
pub mod random;
pub mod scenarios;
pub mod suites;
pub use random::{random_instance, random_morphism, random_system, GeneratorParams, Instance, Kind};
pub use scenarios::{builtin_scenarios, find_scenario, run_scenario, Scenario, ScenarioReport};
pub use suites::{run_suite, LawTally, SuiteError, SuiteReport, SuiteViolation, SUITES};
