//! Instance files, generators, single fits and benchmark runs for the
//! `dagiso` command line tool.

pub mod bench;
pub mod error;
pub mod fit;
pub mod gen;
pub mod io;

pub use bench::{run_bench, summarize, write_csv, BenchRow, BenchSpec, Family, SummaryRow};
pub use error::{BenchError, Result};
pub use fit::{run_fit, FitOptions, FitReport, Norm};
pub use io::{parse_instance, InstanceData};
