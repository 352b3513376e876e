//! In-memory social network snapshot: users, friendships, pictures and
//! privacy flags.
//!
//! This is the only place ground truth lives. Analysis code never touches an
//! [`OsnSnapshot`] directly; it goes through [`crate::oracle::OracleHandle`],
//! which exposes the publicly observable surfaces only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! opaque_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self> {
                let id = id.into();
                if id.is_empty() {
                    return Err(Error::Schema(format!("empty {}", stringify!($name))));
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;
            fn try_from(s: String) -> Result<Self> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

opaque_id!(
    /// Identifier of a user, unique within a snapshot.
    UserId
);
opaque_id!(PictureId);
opaque_id!(PageId);
opaque_id!(GroupId);

impl UserId {
    /// Panicking constructor for literals in tests and examples.
    pub fn from_static(id: &'static str) -> Self {
        Self::new(id).expect("static user id must be non-empty")
    }
}

/// A city or school label.
///
/// Labels compare by their canonical key (trimmed, case-folded) while keeping
/// the original spelling for display.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Label {
    display: String,
    key: String,
}

pub type City = Label;
pub type School = Label;

impl Label {
    pub fn new(raw: impl AsRef<str>) -> Result<Self> {
        let display = raw.as_ref().trim();
        if display.is_empty() {
            return Err(Error::Schema(
                "attribute label is empty; omit the field instead".into(),
            ));
        }
        Ok(Self {
            display: display.to_string(),
            key: display.to_lowercase(),
        })
    }

    pub fn display(&self) -> &str {
        &self.display
    }

    pub fn key(&self) -> &str {
        &self.key
    }
}

impl TryFrom<String> for Label {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Self::new(s)
    }
}

impl From<Label> for String {
    fn from(l: Label) -> String {
        l.display
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

impl std::hash::Hash for Label {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}

/// The three profile features used for inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Education,
    Hometown,
    CurrentCity,
}

impl Feature {
    pub const ALL: [Feature; 3] = [Feature::Education, Feature::Hometown, Feature::CurrentCity];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Education => "education",
            Feature::Hometown => "hometown",
            Feature::CurrentCity => "current_city",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrivacySettings {
    pub friends_list_public: bool,
    pub attributes_public: bool,
}

/// Education, hometown and current city of one user. Any field may be absent.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AttributeTriple {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub education: Option<School>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hometown: Option<City>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub current_city: Option<City>,
}

impl AttributeTriple {
    pub fn get(&self, feature: Feature) -> Option<&Label> {
        match feature {
            Feature::Education => self.education.as_ref(),
            Feature::Hometown => self.hometown.as_ref(),
            Feature::CurrentCity => self.current_city.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserProfile {
    pub id: UserId,
    pub personal: BTreeMap<String, String>,
    /// Ground-truth friend set.
    pub friends: BTreeSet<UserId>,
    pub pages_liked: BTreeSet<PageId>,
    pub groups: BTreeSet<GroupId>,
    /// Pictures owned by this user; derived from picture ownership.
    pub pictures: BTreeSet<PictureId>,
    pub hometown: Option<City>,
    pub current_city: Option<City>,
    pub education: Option<School>,
    pub high_school: Option<School>,
    pub privacy: PrivacySettings,
}

impl UserProfile {
    pub fn new(id: UserId) -> Self {
        Self {
            id,
            personal: BTreeMap::new(),
            friends: BTreeSet::new(),
            pages_liked: BTreeSet::new(),
            groups: BTreeSet::new(),
            pictures: BTreeSet::new(),
            hometown: None,
            current_city: None,
            education: None,
            high_school: None,
            privacy: PrivacySettings::default(),
        }
    }

    /// Projection onto one inference feature, ignoring privacy.
    pub fn attribute(&self, feature: Feature) -> Option<&Label> {
        match feature {
            Feature::Education => self.education.as_ref(),
            Feature::Hometown => self.hometown.as_ref(),
            Feature::CurrentCity => self.current_city.as_ref(),
        }
    }

    pub fn attributes(&self) -> AttributeTriple {
        AttributeTriple {
            education: self.education.clone(),
            hometown: self.hometown.clone(),
            current_city: self.current_city.clone(),
        }
    }

    pub fn display_name(&self) -> &str {
        self.personal
            .get("name")
            .map(String::as_str)
            .unwrap_or(self.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Picture {
    pub id: PictureId,
    pub owner: UserId,
    pub public: bool,
    pub likers: BTreeSet<UserId>,
    pub commenters: BTreeSet<UserId>,
}

/// A validated social network snapshot. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OsnSnapshot {
    users: BTreeMap<UserId, UserProfile>,
    pictures: BTreeMap<PictureId, Picture>,
}

impl OsnSnapshot {
    /// Validates and assembles a snapshot. Each profile's `pictures` set is
    /// rebuilt from picture ownership.
    pub fn new(
        users: impl IntoIterator<Item = UserProfile>,
        pictures: impl IntoIterator<Item = Picture>,
    ) -> Result<Self> {
        let mut user_map = BTreeMap::new();
        for mut user in users {
            user.pictures.clear();
            let id = user.id.clone();
            if user_map.insert(id.clone(), user).is_some() {
                return Err(Error::Integrity(format!("duplicate user id `{id}`")));
            }
        }
        let mut picture_map = BTreeMap::new();
        for picture in pictures {
            let id = picture.id.clone();
            if picture_map.insert(id.clone(), picture).is_some() {
                return Err(Error::Integrity(format!("duplicate picture id `{id}`")));
            }
        }

        for (id, user) in &user_map {
            for friend in &user.friends {
                if friend == id {
                    return Err(Error::Integrity(format!("user `{id}` lists itself as friend")));
                }
                let Some(other) = user_map.get(friend) else {
                    return Err(Error::Integrity(format!(
                        "user `{id}` lists unknown friend `{friend}`"
                    )));
                };
                if !other.friends.contains(id) {
                    return Err(Error::AsymmetricFriendship(id.clone(), friend.clone()));
                }
            }
        }

        for (pid, picture) in &picture_map {
            if !user_map.contains_key(&picture.owner) {
                return Err(Error::Integrity(format!(
                    "picture `{pid}` has unknown owner `{}`",
                    picture.owner
                )));
            }
            for u in picture.likers.iter().chain(&picture.commenters) {
                if !user_map.contains_key(u) {
                    return Err(Error::Integrity(format!(
                        "picture `{pid}` references unknown user `{u}`"
                    )));
                }
            }
        }
        for (pid, picture) in &picture_map {
            user_map
                .get_mut(&picture.owner)
                .expect("owner checked above")
                .pictures
                .insert(pid.clone());
        }

        Ok(Self {
            users: user_map,
            pictures: picture_map,
        })
    }

    pub fn users(&self) -> impl ExactSizeIterator<Item = &UserProfile> {
        self.users.values()
    }

    pub fn user_ids(&self) -> impl ExactSizeIterator<Item = &UserId> {
        self.users.keys()
    }

    pub fn user(&self, id: &UserId) -> Option<&UserProfile> {
        self.users.get(id)
    }

    pub fn require_user(&self, id: &UserId) -> Result<&UserProfile> {
        self.users
            .get(id)
            .ok_or_else(|| Error::UnknownUser(id.clone()))
    }

    pub fn contains_user(&self, id: &UserId) -> bool {
        self.users.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn pictures(&self) -> impl ExactSizeIterator<Item = &Picture> {
        self.pictures.values()
    }

    pub fn picture(&self, id: &PictureId) -> Option<&Picture> {
        self.pictures.get(id)
    }

    pub fn pictures_of(&self, owner: &UserId) -> impl Iterator<Item = &Picture> + '_ {
        let owned = self.users.get(owner).map(|u| &u.pictures);
        owned
            .into_iter()
            .flatten()
            .filter_map(|pid| self.pictures.get(pid))
    }

    pub fn are_friends(&self, a: &UserId, b: &UserId) -> bool {
        self.users
            .get(a)
            .is_some_and(|u| u.friends.contains(b))
    }

    /// Ground-truth friend set of `id`; empty for unknown users.
    pub fn friends_of(&self, id: &UserId) -> &BTreeSet<UserId> {
        static EMPTY: BTreeSet<UserId> = BTreeSet::new();
        self.users.get(id).map(|u| &u.friends).unwrap_or(&EMPTY)
    }

    /// Undirected edges as sorted pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> BTreeSet<(UserId, UserId)> {
        self.users
            .values()
            .flat_map(|u| {
                u.friends
                    .iter()
                    .filter(move |f| u.id < **f)
                    .map(move |f| (u.id.clone(), f.clone()))
            })
            .collect()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: SnapshotDoc =
            serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        doc.into_snapshot()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_document(&self) -> SnapshotDoc {
        SnapshotDoc::from(self)
    }

    /// Pretty JSON; deterministic because every collection is ordered.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("snapshot serializes")
    }
}

/// Parses and validates a snapshot document.
pub fn load_snapshot(source: &str) -> Result<OsnSnapshot> {
    OsnSnapshot::from_json_str(source)
}

/// Wire form of a snapshot.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotDoc {
    pub users: Vec<UserDoc>,
    pub pictures: Vec<PictureDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserDoc {
    pub id: UserId,
    pub friends: Vec<UserId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hometown: Option<City>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_city: Option<City>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub education: Option<School>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high_school: Option<School>,
    pub privacy: PrivacySettings,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub personal: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pages_liked: Vec<PageId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PictureDoc {
    pub id: PictureId,
    pub owner: UserId,
    pub public: bool,
    pub likers: Vec<UserId>,
    pub commenters: Vec<UserId>,
}

fn unique<T: Ord + Clone + fmt::Display>(items: Vec<T>, what: &str, owner: &str) -> Result<BTreeSet<T>> {
    let mut set = BTreeSet::new();
    for item in items {
        if !set.insert(item.clone()) {
            return Err(Error::Integrity(format!("{owner}: duplicate {what} `{item}`")));
        }
    }
    Ok(set)
}

impl SnapshotDoc {
    pub fn into_snapshot(self) -> Result<OsnSnapshot> {
        let mut users = Vec::with_capacity(self.users.len());
        for u in self.users {
            let owner = format!("user `{}`", u.id);
            users.push(UserProfile {
                friends: unique(u.friends, "friend", &owner)?,
                pages_liked: unique(u.pages_liked, "page", &owner)?,
                groups: unique(u.groups, "group", &owner)?,
                id: u.id,
                personal: u.personal,
                pictures: BTreeSet::new(),
                hometown: u.hometown,
                current_city: u.current_city,
                education: u.education,
                high_school: u.high_school,
                privacy: u.privacy,
            });
        }
        let mut pictures = Vec::with_capacity(self.pictures.len());
        for p in self.pictures {
            let owner = format!("picture `{}`", p.id);
            pictures.push(Picture {
                likers: unique(p.likers, "liker", &owner)?,
                commenters: unique(p.commenters, "commenter", &owner)?,
                id: p.id,
                owner: p.owner,
                public: p.public,
            });
        }
        OsnSnapshot::new(users, pictures)
    }
}

impl From<&OsnSnapshot> for SnapshotDoc {
    fn from(s: &OsnSnapshot) -> Self {
        SnapshotDoc {
            users: s
                .users()
                .map(|u| UserDoc {
                    id: u.id.clone(),
                    friends: u.friends.iter().cloned().collect(),
                    hometown: u.hometown.clone(),
                    current_city: u.current_city.clone(),
                    education: u.education.clone(),
                    high_school: u.high_school.clone(),
                    privacy: u.privacy,
                    personal: u.personal.clone(),
                    pages_liked: u.pages_liked.iter().cloned().collect(),
                    groups: u.groups.iter().cloned().collect(),
                })
                .collect(),
            pictures: s
                .pictures()
                .map(|p| PictureDoc {
                    id: p.id.clone(),
                    owner: p.owner.clone(),
                    public: p.public,
                    likers: p.likers.iter().cloned().collect(),
                    commenters: p.commenters.iter().cloned().collect(),
                })
                .collect(),
        }
    }
}
