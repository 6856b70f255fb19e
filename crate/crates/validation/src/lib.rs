//! Holds the `acceptance` test target. It runs after the unit and
//! integration suites of the other crates.
