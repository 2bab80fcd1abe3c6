//! Chart type recommendation for SQL result sets and captioned tables.
//!
//! Given either a SQL query with its result set or a data table with a
//! natural language caption, the library identifies which columns act as
//! independent and dependent variables, extracts a binary feature vector,
//! and recommends the two most appropriate chart types together with
//! column-to-axis bindings.  Two engines produce recommendations: a fixed
//! rule table and a random forest trained on labeled feature vectors.

pub mod caption;
pub mod chartspec;
pub mod forest;
pub mod corpus;
pub mod ingest;
pub mod pipeline;
pub mod rules;
pub mod sql;
pub mod types;

pub use types::*;
