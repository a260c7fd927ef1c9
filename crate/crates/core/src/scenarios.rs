//! Scenarios shipped with the library, addressable by name.

use crate::scenario::{Scenario, ScenarioError};

/// `(name, json)` of every bundled scenario.
pub const BUNDLED: &[(&str, &str)] = &[
    ("scenario1", include_str!("../scenarios/scenario1.json")),
    ("scenario2", include_str!("../scenarios/scenario2.json")),
    ("scenario3", include_str!("../scenarios/scenario3.json")),
    ("blockage", include_str!("../scenarios/blockage.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// Parses a bundled scenario; `None` for an unknown name.
pub fn bundled(name: &str) -> Option<Result<Scenario, ScenarioError>> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| Scenario::from_json(json))
}
