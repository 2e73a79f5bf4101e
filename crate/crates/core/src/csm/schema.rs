use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use serde::{Deserialize, Serialize};

use crate::imgcore::{Label, BACKGROUND};
use crate::{Error, Result};

/// One body part of the schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartDef {
    pub name: String,
    pub label: Label,
    /// Parent part name; `None` only for the root.
    #[serde(default)]
    pub parent: Option<String>,
    /// Name of the joint linking this part to its parent.
    #[serde(default)]
    pub joint: Option<String>,
}

/// Part tree plus limb grouping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartSchema {
    pub parts: Vec<PartDef>,
    /// Each limb is a root-excluding parent-to-child chain of part names.
    #[serde(default)]
    pub limbs: Vec<Vec<String>>,
}

impl Default for PartSchema {
    fn default() -> Self {
        let part = |name: &str, label: Label, parent: Option<&str>, joint: Option<&str>| PartDef {
            name: name.to_string(),
            label,
            parent: parent.map(ToString::to_string),
            joint: joint.map(ToString::to_string),
        };
        PartSchema {
            parts: vec![
                part("torso", 1, None, None),
                part("head", 2, Some("torso"), Some("neck")),
                part("left_upper_arm", 3, Some("torso"), Some("left_shoulder")),
                part("left_forearm", 4, Some("left_upper_arm"), Some("left_elbow")),
                part("right_upper_arm", 5, Some("torso"), Some("right_shoulder")),
                part("right_forearm", 6, Some("right_upper_arm"), Some("right_elbow")),
            ],
            limbs: vec![
                vec!["left_upper_arm".to_string(), "left_forearm".to_string()],
                vec!["right_upper_arm".to_string(), "right_forearm".to_string()],
            ],
        }
    }
}

impl PartSchema {
    /// A schema holding only a root torso.
    pub fn torso_only() -> Self {
        PartSchema {
            parts: vec![PartDef { name: "torso".into(), label: 1, parent: None, joint: None }],
            limbs: Vec::new(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.parts.iter().position(|p| p.name == name)
    }

    /// Checks tree shape, label uniqueness and limb chains. Returns the root
    /// index and parent indices.
    pub fn validate(&self) -> Result<(usize, Vec<Option<usize>>)> {
        let bad = |m: String| Err(Error::InvalidSchema(m));
        if self.parts.is_empty() {
            return bad("schema has no parts".into());
        }
        for (i, p) in self.parts.iter().enumerate() {
            if p.label == BACKGROUND {
                return bad(format!("part {} uses the background label", p.name));
            }
            if self.parts[..i].iter().any(|q| q.name == p.name) {
                return bad(format!("duplicate part name {}", p.name));
            }
            if self.parts[..i].iter().any(|q| q.label == p.label) {
                return bad(format!("duplicate label {}", p.label));
            }
        }
        let mut parents = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            match &p.parent {
                None => parents.push(None),
                Some(name) => match self.index_of(name) {
                    Some(k) => parents.push(Some(k)),
                    None => return bad(format!("part {} has unknown parent {name}", p.name)),
                },
            }
        }
        let roots: Vec<usize> = (0..parents.len()).filter(|&i| parents[i].is_none()).collect();
        if roots.len() != 1 {
            return bad(format!("schema needs exactly one root, found {}", roots.len()));
        }
        let root = roots[0];
        for start in 0..parents.len() {
            let (mut cur, mut steps) = (start, 0);
            while let Some(k) = parents[cur] {
                cur = k;
                steps += 1;
                if steps > parents.len() {
                    return bad(format!("cycle through part {}", self.parts[start].name));
                }
            }
        }
        let mut used = vec![false; self.parts.len()];
        for limb in &self.limbs {
            if limb.is_empty() {
                return bad("empty limb".into());
            }
            let mut prev: Option<usize> = None;
            for name in limb {
                let Some(i) = self.index_of(name) else {
                    return bad(format!("limb names unknown part {name}"));
                };
                if i == root {
                    return bad("limbs may not contain the root".into());
                }
                if used[i] {
                    return bad(format!("part {name} appears in two limbs"));
                }
                used[i] = true;
                if let Some(p) = prev {
                    if parents[i] != Some(p) {
                        return bad(format!("limb is not a parent-child chain at {name}"));
                    }
                }
                prev = Some(i);
            }
        }
        Ok((root, parents))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schema_is_valid() {
        let s = PartSchema::default();
        let (root, parents) = s.validate().unwrap();
        assert_eq!(s.parts[root].name, "torso");
        assert_eq!(parents.iter().filter(|p| p.is_none()).count(), 1);
        assert_eq!(s.parts.len(), 6);
    }

    #[test]
    fn rejects_malformed_schemas() {
        let mut s = PartSchema::default();
        s.parts[1].parent = None;
        assert!(matches!(s.validate(), Err(Error::InvalidSchema(_))));

        let mut s = PartSchema::default();
        s.limbs[0].reverse();
        assert!(s.validate().is_err());

        let mut s = PartSchema::default();
        s.limbs[1] = vec!["left_forearm".into()];
        assert!(s.validate().is_err());

        let mut s = PartSchema::default();
        s.parts[2].label = 1;
        assert!(s.validate().is_err());

        let mut s = PartSchema::default();
        s.parts[0].parent = Some("head".into());
        assert!(s.validate().is_err());
    }
}
