//! A hand-built snapshot with known rates and shared-edge counts, used by the
//! examples and tests.
//!
//! The victim has 100 recovered friends. Their attributes give these rates:
//!
//! | current city | rate | hometown | rate | education | rate |
//! |--------------|------|----------|------|-----------|------|
//! | Padua        | 0.27 | Padua    | 0.13 | Padua     | 0.40 |
//! | Bologna      | 0.09 | Rome     | 0.11 | Venice    | 0.10 |
//! | Paris        | 0.04 | Venice   | 0.03 |           |      |
//! | Madrid       | 0.02 |          |      |           |      |
//!
//! Four 2-hop candidates share 8, 3, 10 and 2 friends with the victim; a
//! fifth shares only one and is removed by pruning.

use std::collections::BTreeSet;

use crate::attrs::{AttributeRates, FriendRecord};
use crate::eval::ConfusionMatrix;
use crate::model::{AttributeTriple, Label, OsnSnapshot, Picture, PictureId, PrivacySettings, UserId, UserProfile};
use crate::scoring::CandidateInput;

pub const VICTIM: &str = "victim";
pub const FRIEND_COUNT: usize = 100;
pub const VICTIM_PUBLIC_PICTURES: usize = 5;

/// `(id, current city, hometown, education, shared edges)`.
pub type CandidateRow = (&'static str, Option<&'static str>, Option<&'static str>, Option<&'static str>, usize);

pub const CANDIDATES: [CandidateRow; 4] = [
    ("2-hop_ID-1", Some("Padua"), Some("Padua"), Some("Padua"), 8),
    ("2-hop_ID-2", Some("Brussels"), Some("Turin"), Some("Rome"), 3),
    ("2-hop_ID-3", None, Some("Venice"), None, 10),
    ("2-hop_ID-4", Some("Venice"), None, Some("Venice"), 2),
];

/// Shares a single friend with the victim.
pub const SINGLE_EDGE_CANDIDATE: &str = "2-hop_ID-5";

/// Averaged confusion matrix reported for eight privacy-aware victims.
pub const REFERENCE_CONFUSION: ConfusionMatrix = ConfusionMatrix {
    tn: 253,
    fp: 118,
    fn_: 28,
    tp: 11,
};

fn label(s: &str) -> Label {
    Label::new(s).expect("fixture labels are non-empty")
}

fn id(s: impl Into<String>) -> UserId {
    UserId::new(s).expect("fixture ids are non-empty")
}

pub fn friend_id(i: usize) -> UserId {
    id(format!("f{i:03}"))
}

/// Attributes of friend `i`, laid out in index bands so the counts per
/// value match the rate table above.
pub fn friend_attributes(i: usize) -> AttributeTriple {
    let band = |bands: &[(usize, &str)]| {
        let mut start = 0;
        for (len, value) in bands {
            if i < start + len {
                return Some(label(value));
            }
            start += len;
        }
        None
    };
    AttributeTriple {
        current_city: band(&[(27, "Padua"), (9, "Bologna"), (4, "Paris"), (2, "Madrid")]),
        hometown: band(&[(13, "Padua"), (11, "Rome"), (3, "Venice")]),
        education: band(&[(40, "Padua"), (10, "Venice")]),
    }
}

fn candidate_attributes(c: &CandidateRow) -> AttributeTriple {
    AttributeTriple {
        current_city: c.1.map(label),
        hometown: c.2.map(label),
        education: c.3.map(label),
    }
}

/// The rate table, built directly from the friend attribute bands.
pub fn reference_rates() -> AttributeRates {
    let records: Vec<FriendRecord> = (0..FRIEND_COUNT)
        .map(|i| FriendRecord {
            source: friend_id(i),
            public: true,
            attributes: friend_attributes(i),
        })
        .collect();
    AttributeRates::from_records(&records, &id(VICTIM)).expect("non-empty")
}

/// The four candidates as scoring inputs.
pub fn reference_candidates() -> Vec<CandidateInput> {
    CANDIDATES
        .iter()
        .map(|c| CandidateInput {
            candidate: id(c.0),
            attributes: Some(candidate_attributes(c)),
            shared_edges: c.4,
        })
        .collect()
}

fn set(ids: impl IntoIterator<Item = UserId>) -> BTreeSet<UserId> {
    ids.into_iter().collect()
}

/// The full snapshot: victim, 100 friends, four scored candidates and one
/// single-edge candidate, with public engagement wired so that friend
/// recovery finds exactly the intended sets.
pub fn reference_snapshot() -> OsnSnapshot {
    let victim = id(VICTIM);
    let private = PrivacySettings {
        friends_list_public: false,
        attributes_public: false,
    };
    let open = PrivacySettings {
        friends_list_public: false,
        attributes_public: true,
    };

    let mut v = UserProfile::new(victim.clone());
    v.privacy = private;
    v.education = Some(label("Padua"));
    v.hometown = Some(label("Padua"));
    v.current_city = Some(label("Padua"));
    v.personal.insert("name".into(), "Victim".into());

    let mut friends: Vec<UserProfile> = (0..FRIEND_COUNT)
        .map(|i| {
            let mut f = UserProfile::new(friend_id(i));
            let a = friend_attributes(i);
            f.education = a.education;
            f.hometown = a.hometown;
            f.current_city = a.current_city;
            f.privacy = open;
            f.friends.insert(victim.clone());
            f
        })
        .collect();
    v.friends = set((0..FRIEND_COUNT).map(friend_id));

    let mut candidates = Vec::new();
    let mut all_candidates: Vec<(String, AttributeTriple, usize)> = CANDIDATES
        .iter()
        .map(|c| (c.0.to_string(), candidate_attributes(c), c.4))
        .collect();
    all_candidates.push((SINGLE_EDGE_CANDIDATE.into(), AttributeTriple::default(), 1));
    for (k, (cid, attrs, shared)) in all_candidates.iter().enumerate() {
        let mut c = UserProfile::new(id(cid.as_str()));
        c.privacy = open;
        c.education = attrs.education.clone();
        c.hometown = attrs.hometown.clone();
        c.current_city = attrs.current_city.clone();
        // Consecutive friend windows so candidates overlap but differ.
        for j in 0..*shared {
            let fi = (k * 17 + j) % FRIEND_COUNT;
            c.friends.insert(friend_id(fi));
            friends[fi].friends.insert(c.id.clone());
        }
        candidates.push(c);
    }

    let mut pictures = Vec::new();
    for p in 0..VICTIM_PUBLIC_PICTURES {
        let engaged: Vec<UserId> = (0..FRIEND_COUNT)
            .filter(|i| i % VICTIM_PUBLIC_PICTURES == p)
            .map(friend_id)
            .collect();
        let commenters = engaged.iter().step_by(3).cloned().collect();
        pictures.push(Picture {
            id: PictureId::new(format!("{VICTIM}-p{p}")).expect("non-empty"),
            owner: victim.clone(),
            public: true,
            likers: set(engaged),
            commenters,
        });
    }
    pictures.push(Picture {
        id: PictureId::new(format!("{VICTIM}-private")).expect("non-empty"),
        owner: victim.clone(),
        public: false,
        likers: set([friend_id(0)]),
        commenters: BTreeSet::new(),
    });
    for f in &friends {
        let likers = f.friends.iter().filter(|u| **u != victim).cloned();
        pictures.push(Picture {
            id: PictureId::new(format!("{}-p0", f.id)).expect("non-empty"),
            owner: f.id.clone(),
            public: true,
            likers: set(likers),
            commenters: BTreeSet::new(),
        });
    }
    for c in &candidates {
        pictures.push(Picture {
            id: PictureId::new(format!("{}-p0", c.id)).expect("non-empty"),
            owner: c.id.clone(),
            public: true,
            likers: BTreeSet::new(),
            commenters: BTreeSet::new(),
        });
    }

    let users = std::iter::once(v).chain(friends).chain(candidates);
    OsnSnapshot::new(users, pictures).expect("fixture snapshot is consistent")
}
