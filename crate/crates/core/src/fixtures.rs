//! Reference systems bundled with the crate.

use crate::error::{Error, Result};
use crate::io::parse_system;
use crate::system::HyperbolicSystem;

pub const NAMES: [&str; 10] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "R"];

/// Raw JSON of fixture `name` (`"A"` … `"I"`, `"R"`).
pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "A" => include_str!("../fixtures/fixtureA.json"),
        "B" => include_str!("../fixtures/fixtureB.json"),
        "C" => include_str!("../fixtures/fixtureC.json"),
        "D" => include_str!("../fixtures/fixtureD.json"),
        "E" => include_str!("../fixtures/fixtureE.json"),
        "F" => include_str!("../fixtures/fixtureF.json"),
        "G" => include_str!("../fixtures/fixtureG.json"),
        "H" => include_str!("../fixtures/fixtureH.json"),
        "I" => include_str!("../fixtures/fixtureI.json"),
        "R" => include_str!("../fixtures/fixtureR.json"),
        _ => return None,
    })
}

pub fn get(name: &str) -> Result<HyperbolicSystem> {
    let text = source(name).ok_or_else(|| Error::Parameter(format!("unknown fixture {name:?}")))?;
    parse_system(text)
}
