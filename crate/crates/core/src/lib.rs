//! Exactly-1 3SAT: formulas, single-literal reduction, the scope/scan
//! procedure, assignment construction, an enumeration oracle, and the `x3c`
//! text format.

pub mod assignment;
pub mod clause;
pub mod formula;
pub mod literal;
pub mod minterm;
pub mod oracle;
pub mod reduction;
pub mod scan;
pub mod solve;
pub mod x3c;

pub use assignment::{construct_assignment, verify_assignment, AssignmentCertificate, PickPolicy};
pub use clause::{Clause, ClauseId};
pub use formula::{convert_special, Formula, Instance};
pub use literal::{Assignment, Literal, ModelError, Var};
pub use minterm::Minterm;
pub use oracle::Oracle;
pub use reduction::reduce;
pub use scan::{scan, scope, LiteralOrder, ScanConfig, ScanOutcome, ScanState};
pub use solve::{emit_result, solve, SolveConfig, Solution, Status, Verdict};
pub use x3c::{parse_x3c, to_x3c, X3cDocument};
