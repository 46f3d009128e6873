//! Topic content for the concept-association activity.
//!
//! Correctness logic never looks at labels; it only compares ids. A content
//! file is a JSON array of items:
//!
//! ```text
//! [{"topic":"Animals","optionId":"chicken","label":"Chicken",
//!   "pictogramId":"pict-chicken","matchesTargetId":"egg"}, ...]
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Topic {
    Animals,
    Vehicles,
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topic::Animals => "animals",
            Topic::Vehicles => "vehicles",
        })
    }
}

impl FromStr for Topic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "animals" => Ok(Topic::Animals),
            "vehicles" => Ok(Topic::Vehicles),
            other => Err(format!("unknown topic {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContentItem {
    pub topic: Topic,
    pub option_id: String,
    pub label: String,
    pub pictogram_id: String,
    pub matches_target_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContentError {
    #[error("duplicate element id {0:?} in topic {1}")]
    DuplicateId(String, Topic),
    #[error("topic {topic} has {available} items, {needed} are needed")]
    NotEnoughItems {
        topic: Topic,
        available: usize,
        needed: usize,
    },
    #[error("content item has an empty id")]
    EmptyId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Content {
    pub items: Vec<ContentItem>,
}

impl Content {
    pub fn new(items: Vec<ContentItem>) -> Result<Self, ContentError> {
        let content = Content { items };
        content.validate()?;
        Ok(content)
    }

    /// Ids must be non-empty and unique per topic across options and targets.
    pub fn validate(&self) -> Result<(), ContentError> {
        for topic in [Topic::Animals, Topic::Vehicles] {
            let mut seen = HashSet::new();
            for item in self.items.iter().filter(|i| i.topic == topic) {
                for id in [&item.option_id, &item.matches_target_id] {
                    if id.is_empty() {
                        return Err(ContentError::EmptyId);
                    }
                    if !seen.insert(id.as_str()) {
                        return Err(ContentError::DuplicateId(id.clone(), topic));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn for_topic(&self, topic: Topic) -> Vec<ContentItem> {
        self.items.iter().filter(|i| i.topic == topic).cloned().collect()
    }

    pub fn builtin() -> Self {
        let item = |topic, id: &str, label: &str, target: &str| ContentItem {
            topic,
            option_id: id.to_string(),
            label: label.to_string(),
            pictogram_id: format!("pict-{id}"),
            matches_target_id: target.to_string(),
        };
        Content {
            items: vec![
                item(Topic::Animals, "chicken", "Chicken", "egg"),
                item(Topic::Animals, "bee", "Bee", "flower"),
                item(Topic::Animals, "cow", "Cow", "milk"),
                item(Topic::Animals, "dog", "Dog", "bone"),
                item(Topic::Animals, "sheep", "Sheep", "wool"),
                item(Topic::Vehicles, "car", "Car", "road"),
                item(Topic::Vehicles, "boat", "Boat", "sea"),
                item(Topic::Vehicles, "plane", "Plane", "sky"),
                item(Topic::Vehicles, "train", "Train", "rails"),
                item(Topic::Vehicles, "bicycle", "Bicycle", "helmet"),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_is_valid() {
        let c = Content::builtin();
        c.validate().unwrap();
        assert_eq!(c.for_topic(Topic::Animals).len(), 5);
        assert_eq!(c.for_topic(Topic::Vehicles).len(), 5);
    }

    #[test]
    fn duplicates_are_rejected() {
        let mut items = Content::builtin().items;
        items[1].matches_target_id = "egg".into();
        assert_eq!(
            Content::new(items),
            Err(ContentError::DuplicateId("egg".into(), Topic::Animals))
        );
    }

    #[test]
    fn json_shape() {
        let c = Content::builtin();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.starts_with(r#"[{"topic":"Animals","optionId":"chicken""#));
        let back: Content = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn topic_parsing() {
        assert_eq!("animals".parse::<Topic>().unwrap(), Topic::Animals);
        assert_eq!("Vehicles".parse::<Topic>().unwrap(), Topic::Vehicles);
        assert!("plants".parse::<Topic>().is_err());
    }
}
