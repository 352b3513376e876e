//! The attacker's view of the platform.
//!
//! [`OracleHandle`] emulates the Mutual Content Page and public picture
//! pages. Friendship between two users and their mutual friends are always
//! visible through it, whatever the friends-list privacy flag says. Nothing
//! else about the ground truth is reachable.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::model::{AttributeTriple, OsnSnapshot, Picture, UserId};

/// Read-only, query-counting access to a snapshot's public surfaces.
///
/// Every successful call increments the counter. Calls rejected for bad
/// arguments or an exhausted budget are not counted.
#[derive(Debug)]
pub struct OracleHandle<'s> {
    snapshot: &'s OsnSnapshot,
    queries: AtomicU64,
    budget: Option<u64>,
}

impl<'s> OracleHandle<'s> {
    pub fn new(snapshot: &'s OsnSnapshot) -> Self {
        Self {
            snapshot,
            queries: AtomicU64::new(0),
            budget: None,
        }
    }

    pub fn with_budget(snapshot: &'s OsnSnapshot, budget: Option<u64>) -> Self {
        Self {
            budget,
            ..Self::new(snapshot)
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn contains(&self, id: &UserId) -> bool {
        self.snapshot.contains_user(id)
    }

    fn charge(&self) -> Result<()> {
        match self.budget {
            None => {
                self.queries.fetch_add(1, Ordering::SeqCst);
                Ok(())
            }
            Some(budget) => self
                .queries
                .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |q| {
                    (q < budget).then_some(q + 1)
                })
                .map(|_| ())
                .map_err(|_| Error::BudgetExhausted { budget }),
        }
    }

    fn check_pair(&self, a: &UserId, b: &UserId) -> Result<()> {
        self.snapshot.require_user(a)?;
        self.snapshot.require_user(b)?;
        if a == b {
            return Err(Error::SameUser(a.clone()));
        }
        Ok(())
    }

    /// The "Friends since" banner of the MCP of `a` and `b`.
    pub fn are_friends(&self, a: &UserId, b: &UserId) -> Result<bool> {
        self.check_pair(a, b)?;
        self.charge()?;
        Ok(self.snapshot.are_friends(a, b))
    }

    /// Mutual friends listed on the MCP of `a` and `b`.
    pub fn mutual_friends(&self, a: &UserId, b: &UserId) -> Result<BTreeSet<UserId>> {
        self.check_pair(a, b)?;
        self.charge()?;
        let fa = self.snapshot.friends_of(a);
        let fb = self.snapshot.friends_of(b);
        Ok(fa.intersection(fb).cloned().collect())
    }

    /// Public pictures owned by `v`, ordered by picture id.
    pub fn public_pictures_of(&self, v: &UserId) -> Result<Vec<&'s Picture>> {
        self.snapshot.require_user(v)?;
        self.charge()?;
        Ok(self.snapshot.pictures_of(v).filter(|p| p.public).collect())
    }

    /// The about-page triple, or `None` when `v` hides attributes.
    pub fn public_attributes_of(&self, v: &UserId) -> Result<Option<AttributeTriple>> {
        let user = self.snapshot.require_user(v)?;
        self.charge()?;
        Ok(user.privacy.attributes_public.then(|| user.attributes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_snapshot;

    fn snap() -> OsnSnapshot {
        load_snapshot(
            r#"{"users": [
                {"id": "A", "friends": ["B", "C"], "privacy": {"friends_list_public": false, "attributes_public": true}, "hometown": "Rome"},
                {"id": "B", "friends": ["A", "C"], "privacy": {"friends_list_public": false, "attributes_public": false}, "hometown": "Padua"},
                {"id": "C", "friends": ["A", "B"], "privacy": {"friends_list_public": false, "attributes_public": false}},
                {"id": "D", "friends": [], "privacy": {"friends_list_public": true, "attributes_public": true}}
            ], "pictures": [
                {"id": "a1", "owner": "A", "public": true, "likers": ["B"], "commenters": []},
                {"id": "a2", "owner": "A", "public": false, "likers": ["C"], "commenters": []}
            ]}"#,
        )
        .unwrap()
    }

    fn id(s: &'static str) -> UserId {
        UserId::from_static(s)
    }

    #[test]
    fn friendship_and_mutuals() {
        let s = snap();
        let o = OracleHandle::new(&s);
        assert!(o.are_friends(&id("A"), &id("B")).unwrap());
        assert!(!o.are_friends(&id("A"), &id("D")).unwrap());
        assert_eq!(o.mutual_friends(&id("A"), &id("B")).unwrap(), BTreeSet::from([id("C")]));
        assert!(o.mutual_friends(&id("A"), &id("D")).unwrap().is_empty());
        assert_eq!(o.queries(), 4);
    }

    #[test]
    fn bad_arguments_rejected_and_uncounted() {
        let s = snap();
        let o = OracleHandle::new(&s);
        assert!(matches!(o.are_friends(&id("A"), &id("A")), Err(Error::SameUser(_))));
        assert!(matches!(o.mutual_friends(&id("A"), &id("Z")), Err(Error::UnknownUser(_))));
        assert!(matches!(o.public_pictures_of(&id("Z")), Err(Error::UnknownUser(_))));
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn only_public_pictures_visible() {
        let s = snap();
        let o = OracleHandle::new(&s);
        let pics = o.public_pictures_of(&id("A")).unwrap();
        assert_eq!(pics.len(), 1);
        assert_eq!(pics[0].id.as_str(), "a1");
        assert!(o.public_pictures_of(&id("D")).unwrap().is_empty());
    }

    #[test]
    fn private_attributes_hidden() {
        let s = snap();
        let o = OracleHandle::new(&s);
        assert_eq!(o.public_attributes_of(&id("B")).unwrap(), None);
        let a = o.public_attributes_of(&id("A")).unwrap().unwrap();
        assert_eq!(a.hometown.unwrap().display(), "Rome");
        assert!(a.education.is_none() && a.current_city.is_none());
    }

    #[test]
    fn budget_exhaustion_is_a_hard_error() {
        let s = snap();
        let o = OracleHandle::with_budget(&s, Some(2));
        o.are_friends(&id("A"), &id("B")).unwrap();
        o.are_friends(&id("A"), &id("C")).unwrap();
        assert!(matches!(
            o.are_friends(&id("B"), &id("C")),
            Err(Error::BudgetExhausted { budget: 2 })
        ));
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn counter_is_exact_under_concurrency() {
        let s = snap();
        let o = OracleHandle::with_budget(&s, Some(1000));
        std::thread::scope(|scope| {
            for _ in 0..8 {
                scope.spawn(|| {
                    for _ in 0..200 {
                        let _ = o.are_friends(&id("A"), &id("B"));
                    }
                });
            }
        });
        assert_eq!(o.queries(), 1000);
    }
}
