pub mod complex;
pub mod branched;
pub mod diagram;
pub mod khovanov;
pub mod linalg;
pub mod surgery;
pub mod corpus;
pub mod selftest;
pub mod job;
