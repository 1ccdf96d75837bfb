//! Holds the `acceptance` test target. Run it with
//! `cargo test -p ifs-chaos-suite --test acceptance`.
