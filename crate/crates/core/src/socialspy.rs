//! Friend recovery from public picture engagement ("likes and comments").
//!
//! Everyone who liked or commented one of the victim's public pictures is a
//! candidate; each candidate is then checked against the MCP friendship
//! banner.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::model::UserId;
use crate::oracle::OracleHandle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FriendsFound {
    pub victim: UserId,
    pub friends: BTreeSet<UserId>,
    pub candidates_checked: usize,
}

/// One line of the friends-found log.
pub fn friend_found_line(index: usize, display: &str, id: &UserId) -> String {
    format!("FRIEND FOUND -- {index} {display} ({id})")
}

/// Recovers the friends of `victim` that engaged with at least one of their
/// public pictures. Candidates are verified in id order.
pub fn socialspy_s4(victim: &UserId, oracle: &OracleHandle<'_>) -> Result<FriendsFound> {
    let mut candidates = BTreeSet::new();
    for picture in oracle.public_pictures_of(victim)? {
        candidates.extend(picture.likers.iter().cloned());
        candidates.extend(picture.commenters.iter().cloned());
    }
    candidates.remove(victim);

    let mut friends = BTreeSet::new();
    for candidate in &candidates {
        if oracle.are_friends(candidate, victim)? {
            friends.insert(candidate.clone());
            log::debug!("{}", friend_found_line(friends.len(), candidate.as_str(), candidate));
        }
    }
    Ok(FriendsFound {
        victim: victim.clone(),
        friends,
        candidates_checked: candidates.len(),
    })
}
