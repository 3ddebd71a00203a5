pub mod app;
pub mod corpus;
pub mod report;
pub mod suites;
