pub mod bounds;
pub mod cap;
pub mod code;
pub mod capfile;
pub mod error;
pub mod field;
pub mod fop;
pub mod greedy;
pub mod linalg;
pub mod space;
pub mod tables;
pub mod tracker;

pub use cap::{verify_complete_cap, Cap, Provenance, Verdict};
pub use capfile::{parse_cap, read_cap, write_cap};
pub use error::{Error, Result};
pub use field::{Field, FieldElem, FieldOp};
pub use space::{ProjPoint, ProjSpace};
pub use tracker::{CoverageTracker, MemoryBudget};
pub use fop::{fop_run, lexicap_size, PointOrder};
pub use greedy::{greedy_attempts, greedy_search, greedy_stage1, GreedyParams};
pub use bounds::{beta, bound_values, BoundRecord, BoundRecordF64, SeriesTag};
pub use code::{covering_density, covering_radius, min_distance, parity_check, profile, CodeProfile, Distance, ParityCheck};
pub use tables::{compare, load_table, ComparisonReport, ReferenceTable, Tag};
