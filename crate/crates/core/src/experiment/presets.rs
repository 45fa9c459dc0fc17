use serde::Serialize;

use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Named terminal placement used in the measurement campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub alice: Vec3,
    pub bob: Vec3,
    pub eve: Vec3,
}

impl ScenarioPreset {
    /// Scenario with default link budget; noise is left for the caller to size.
    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.alice, self.bob, self.eve)
    }
}

const LOC1: ScenarioPreset = ScenarioPreset {
    name: "loc1",
    alice: Vec3::new(0.00, -0.35, 0.80),
    bob: Vec3::new(-0.54, -0.35, 2.70),
    eve: Vec3::new(1.20, -0.35, 2.60),
};

pub fn builtin_presets() -> Vec<ScenarioPreset> {
    vec![
        LOC1,
        ScenarioPreset {
            name: "loc2",
            bob: LOC1.eve,
            eve: LOC1.bob,
            ..LOC1
        },
        ScenarioPreset {
            name: "loc3",
            alice: Vec3::new(-0.40, -0.35, 0.46),
            bob: Vec3::new(-0.10, -0.35, 2.60),
            eve: Vec3::new(0.80, -0.35, 3.80),
        },
    ]
}

/// Looks up a preset by name, ignoring case.
pub fn preset(name: &str) -> Result<ScenarioPreset> {
    builtin_presets()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            Error::Domain(format!(
                "unknown preset '{name}' (expected loc1, loc2 or loc3)"
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates() {
        let p = builtin_presets();
        assert_eq!(p.len(), 3);
        assert_eq!(p[0].bob, Vec3::new(-0.54, -0.35, 2.70));
        assert_eq!(p[1].bob, p[0].eve);
        assert_eq!(p[1].eve, p[0].bob);
        assert_eq!(p[1].alice, p[0].alice);
        assert_eq!(p[2].eve, Vec3::new(0.80, -0.35, 3.80));
        assert_eq!(p[2].alice, Vec3::new(-0.40, -0.35, 0.46));
    }

    #[test]
    fn lookup() {
        assert_eq!(preset("LOC3").unwrap().name, "loc3");
        assert!(preset("loc4").is_err());
    }
}
