pub mod algebra;
pub mod auditor;
pub mod bounds;
pub mod caching;
pub mod cli;
pub mod pir;
