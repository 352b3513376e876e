//! Synthetic snapshot generation and edge-list ingestion.
//!
//! Friendships come from a community block model with a homophily knob;
//! engagement is a two-probability Bernoulli model: a friend of a picture's
//! owner engages with probability `p_friend`, anyone else with `p_stranger`.
//! Every engaged user likes the picture and additionally comments on it with
//! probability `comment_ratio`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Label, OsnSnapshot, Picture, PictureId, PrivacySettings, UserId, UserProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub users: usize,
    pub mean_degree: f64,
    pub communities: usize,
    /// Fraction of edges inside a community, and probability that an
    /// attribute takes its community's value.
    pub homophily: f64,
    pub schools: Vec<String>,
    pub cities: Vec<String>,
    /// Probability that a given attribute is filled in at all.
    pub attribute_presence: f64,
    pub pictures_min: usize,
    pub pictures_max: usize,
    pub picture_public: f64,
    pub p_friend: f64,
    pub p_stranger: f64,
    pub comment_ratio: f64,
    pub friends_list_public: f64,
    pub attributes_public: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            users: 100,
            mean_degree: 12.0,
            communities: 4,
            homophily: 0.8,
            schools: ["Padua", "Venice", "Bologna", "Rome", "Milan"]
                .map(String::from)
                .to_vec(),
            cities: ["Padua", "Rome", "Venice", "Bologna", "Paris", "Madrid", "Turin"]
                .map(String::from)
                .to_vec(),
            attribute_presence: 0.8,
            pictures_min: 1,
            pictures_max: 4,
            picture_public: 0.7,
            p_friend: 0.6,
            p_stranger: 0.01,
            comment_ratio: 0.3,
            friends_list_public: 0.1,
            attributes_public: 0.7,
        }
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("{p} is outside [0, 1]"),
        });
    }
    Ok(())
}

impl GeneratorConfig {
    /// Checks only the activity-model parameters (pictures, engagement, privacy).
    pub fn validate_activity(&self) -> Result<()> {
        check_probability("picture_public", self.picture_public)?;
        check_probability("p_friend", self.p_friend)?;
        check_probability("p_stranger", self.p_stranger)?;
        check_probability("comment_ratio", self.comment_ratio)?;
        check_probability("friends_list_public", self.friends_list_public)?;
        check_probability("attributes_public", self.attributes_public)?;
        if self.pictures_min > self.pictures_max {
            return Err(Error::InvalidParameter {
                name: "pictures_min",
                reason: format!("{} exceeds pictures_max {}", self.pictures_min, self.pictures_max),
            });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            return Err(Error::InvalidParameter {
                name: "users",
                reason: format!("need at least 2 users, got {}", self.users),
            });
        }
        if !self.mean_degree.is_finite() || self.mean_degree < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean_degree",
                reason: format!("{} is not a non-negative number", self.mean_degree),
            });
        }
        if self.communities == 0 {
            return Err(Error::InvalidParameter {
                name: "communities",
                reason: "need at least one community".into(),
            });
        }
        check_probability("homophily", self.homophily)?;
        check_probability("attribute_presence", self.attribute_presence)?;
        if self.attribute_presence > 0.0 && (self.schools.is_empty() || self.cities.is_empty()) {
            return Err(Error::InvalidParameter {
                name: "attribute_presence",
                reason: "attributes requested but a vocabulary is empty".into(),
            });
        }
        for label in self.schools.iter().chain(&self.cities) {
            Label::new(label)?;
        }
        self.validate_activity()
    }
}

/// Generates a snapshot; identical `(config, seed)` always yields the same snapshot.
pub fn generate_synthetic(config: &GeneratorConfig, seed: u64) -> Result<OsnSnapshot> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.users;
    let k = config.communities.min(n);
    let ids: Vec<UserId> = (0..n)
        .map(|i| UserId::new(format!("u{i}")).expect("non-empty"))
        .collect();
    let community = |i: usize| i % k;

    let schools: Vec<Label> = config.schools.iter().map(Label::new).collect::<Result<_>>()?;
    let cities: Vec<Label> = config.cities.iter().map(Label::new).collect::<Result<_>>()?;

    let mut profiles: Vec<UserProfile> = ids.iter().cloned().map(UserProfile::new).collect();
    for (i, profile) in profiles.iter_mut().enumerate() {
        let c = community(i);
        profile.personal.insert("name".into(), format!("User {i}"));
        profile.education = draw_attribute(&mut rng, config, &schools, c);
        profile.high_school = draw_attribute(&mut rng, config, &schools, c + 1);
        profile.hometown = draw_attribute(&mut rng, config, &cities, c);
        profile.current_city = draw_attribute(&mut rng, config, &cities, c + 1);
    }

    let (p_in, p_out) = edge_probabilities(n, k, config.mean_degree, config.homophily);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if community(i) == community(j) { p_in } else { p_out };
            if rng.gen_bool(p) {
                profiles[i].friends.insert(ids[j].clone());
                profiles[j].friends.insert(ids[i].clone());
            }
        }
    }

    let pictures = synthesize_activity(&mut rng, config, &mut profiles)?;
    OsnSnapshot::new(profiles, pictures)
}

fn draw_attribute(
    rng: &mut ChaCha8Rng,
    config: &GeneratorConfig,
    vocab: &[Label],
    community: usize,
) -> Option<Label> {
    if vocab.is_empty() || !rng.gen_bool(config.attribute_presence) {
        return None;
    }
    let idx = if rng.gen_bool(config.homophily) {
        community % vocab.len()
    } else {
        rng.gen_range(0..vocab.len())
    };
    Some(vocab[idx].clone())
}

fn edge_probabilities(n: usize, k: usize, mean_degree: f64, homophily: f64) -> (f64, f64) {
    let mut sizes = vec![0usize; k];
    for i in 0..n {
        sizes[i % k] += 1;
    }
    let same: f64 = sizes.iter().map(|&s| (s * s.saturating_sub(1) / 2) as f64).sum();
    let total = (n * (n - 1) / 2) as f64;
    let cross = total - same;
    let expected_edges = n as f64 * mean_degree / 2.0;
    let (p_in, p_out) = if cross == 0.0 {
        (expected_edges / same, 0.0)
    } else if same == 0.0 {
        (0.0, expected_edges / cross)
    } else {
        (
            homophily * expected_edges / same,
            (1.0 - homophily) * expected_edges / cross,
        )
    };
    (p_in.clamp(0.0, 1.0), p_out.clamp(0.0, 1.0))
}

/// Privacy flags, pictures and engagement for profiles whose friendships are
/// already fixed.
fn synthesize_activity(
    rng: &mut ChaCha8Rng,
    config: &GeneratorConfig,
    profiles: &mut [UserProfile],
) -> Result<Vec<Picture>> {
    let ids: Vec<UserId> = profiles.iter().map(|p| p.id.clone()).collect();
    let mut pictures = Vec::new();
    for owner in profiles.iter_mut() {
        owner.privacy = PrivacySettings {
            friends_list_public: rng.gen_bool(config.friends_list_public),
            attributes_public: rng.gen_bool(config.attributes_public),
        };
        let count = rng.gen_range(config.pictures_min..=config.pictures_max);
        for p in 0..count {
            let public = rng.gen_bool(config.picture_public);
            let mut likers = BTreeSet::new();
            let mut commenters = BTreeSet::new();
            for other in &ids {
                if *other == owner.id {
                    continue;
                }
                let prob = if owner.friends.contains(other) {
                    config.p_friend
                } else {
                    config.p_stranger
                };
                if rng.gen_bool(prob) {
                    likers.insert(other.clone());
                    if rng.gen_bool(config.comment_ratio) {
                        commenters.insert(other.clone());
                    }
                }
            }
            pictures.push(Picture {
                id: PictureId::new(format!("{}-p{p}", owner.id))?,
                owner: owner.id.clone(),
                public,
                likers,
                commenters,
            });
        }
    }
    Ok(pictures)
}

/// One row of an attribute document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeRow {
    pub id: String,
    pub feature: String,
    pub value: String,
}

/// Parses a whitespace-separated undirected edge list. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<BTreeSet<(UserId, UserId)>> {
    let mut edges = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = tokens[..] else {
            return Err(Error::EdgeListLine {
                line: line_no,
                reason: format!("expected two ids, found {}", tokens.len()),
            });
        };
        if a == b {
            return Err(Error::EdgeListLine {
                line: line_no,
                reason: format!("self-loop `{a} {b}`"),
            });
        }
        let (a, b) = (UserId::new(a)?, UserId::new(b)?);
        edges.insert(if a < b { (a, b) } else { (b, a) });
    }
    Ok(edges)
}

/// Builds a snapshot whose friendships are exactly `edges`; pictures,
/// engagement and privacy flags come from the activity part of `activity`.
/// Attribute rows may name users absent from the edge list; they become
/// isolated users.
pub fn ingest_edge_list(
    edges: &str,
    attrs: Option<&[AttributeRow]>,
    activity: &GeneratorConfig,
    seed: u64,
) -> Result<OsnSnapshot> {
    activity.validate_activity()?;
    let edges = parse_edge_list(edges)?;
    let mut profiles: BTreeMap<UserId, UserProfile> = BTreeMap::new();
    for (a, b) in &edges {
        profiles
            .entry(a.clone())
            .or_insert_with(|| UserProfile::new(a.clone()))
            .friends
            .insert(b.clone());
        profiles
            .entry(b.clone())
            .or_insert_with(|| UserProfile::new(b.clone()))
            .friends
            .insert(a.clone());
    }

    for row in attrs.unwrap_or_default() {
        let id = UserId::new(row.id.clone())?;
        let value = Label::new(&row.value)?;
        let profile = profiles
            .entry(id.clone())
            .or_insert_with(|| UserProfile::new(id));
        let slot = match row.feature.trim() {
            "education" => &mut profile.education,
            "hometown" => &mut profile.hometown,
            "current_city" => &mut profile.current_city,
            "high_school" => &mut profile.high_school,
            other => {
                return Err(Error::Schema(format!(
                    "unknown attribute feature `{other}` for user `{}`",
                    row.id
                )))
            }
        };
        match slot {
            Some(existing) if *existing != value => {
                return Err(Error::ContradictoryAttribute {
                    id: row.id.clone(),
                    feature: row.feature.trim().to_string(),
                    first: existing.display().to_string(),
                    second: value.display().to_string(),
                });
            }
            _ => *slot = Some(value),
        }
    }

    let mut profiles: Vec<UserProfile> = profiles.into_values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pictures = synthesize_activity(&mut rng, activity, &mut profiles)?;
    OsnSnapshot::new(profiles, pictures)
}
