//! Attribute-rate tables built from a victim's recovered friends, and ranked
//! guesses of the victim's own hidden attributes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AttributeTriple, Feature, Label, UserId};
use crate::oracle::OracleHandle;
use crate::rational::Rational;
use crate::socialspy::FriendsFound;

/// What the about page of one recovered friend showed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FriendRecord {
    pub source: UserId,
    pub public: bool,
    #[serde(flatten)]
    pub attributes: AttributeTriple,
}

/// Per-feature value counts over the recovered friends. Each rate is the
/// count divided by `denominator`, the number of recovered friends, whether
/// or not they show attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeRates {
    counts: BTreeMap<Feature, BTreeMap<Label, u64>>,
    denominator: u64,
}

impl AttributeRates {
    pub fn from_records(records: &[FriendRecord], victim: &UserId) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::NoRecoveredFriends(victim.clone()));
        }
        let mut counts: BTreeMap<Feature, BTreeMap<Label, u64>> =
            Feature::ALL.iter().map(|f| (*f, BTreeMap::new())).collect();
        for record in records {
            for feature in Feature::ALL {
                if let Some(label) = record.attributes.get(feature) {
                    *counts
                        .get_mut(&feature)
                        .expect("all features present")
                        .entry(label.clone())
                        .or_insert(0) += 1;
                }
            }
        }
        Ok(Self {
            counts,
            denominator: records.len() as u64,
        })
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn count(&self, feature: Feature, label: &Label) -> u64 {
        self.counts[&feature].get(label).copied().unwrap_or(0)
    }

    /// Zero for values no friend shows.
    pub fn rate(&self, feature: Feature, label: &Label) -> Rational {
        Rational::new(self.count(feature, label), self.denominator)
    }

    pub fn table(&self, feature: Feature) -> BTreeMap<Label, Rational> {
        self.counts[&feature]
            .iter()
            .map(|(l, c)| (l.clone(), Rational::new(*c, self.denominator)))
            .collect()
    }

    /// Total rate mass of a feature: visible count over the denominator.
    pub fn mass(&self, feature: Feature) -> Rational {
        Rational::new(self.counts[&feature].values().sum(), self.denominator)
    }
}

/// Queries the about page of every recovered friend, in id order.
pub fn collect_friend_records(
    friends: &FriendsFound,
    oracle: &OracleHandle<'_>,
) -> Result<Vec<FriendRecord>> {
    friends
        .friends
        .iter()
        .map(|f| {
            let shown = oracle.public_attributes_of(f)?;
            Ok(FriendRecord {
                source: f.clone(),
                public: shown.is_some(),
                attributes: shown.unwrap_or_default(),
            })
        })
        .collect()
}

pub fn extract_rates(friends: &FriendsFound, oracle: &OracleHandle<'_>) -> Result<AttributeRates> {
    let records = collect_friend_records(friends, oracle)?;
    AttributeRates::from_records(&records, &friends.victim)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedGuess {
    pub feature: Feature,
    /// Descending by rate, ties by canonical label.
    pub values: Vec<(Label, Rational)>,
}

impl RankedGuess {
    /// The label at 1-based position `k`.
    pub fn at(&self, k: usize) -> Option<&Label> {
        k.checked_sub(1)
            .and_then(|i| self.values.get(i))
            .map(|(l, _)| l)
    }

    /// 1-based rank of `label`, if ranked.
    pub fn position_of(&self, label: &Label) -> Option<usize> {
        self.values.iter().position(|(l, _)| l == label).map(|i| i + 1)
    }
}

/// One ranking per feature, in [`Feature::ALL`] order.
pub fn rank_guesses(rates: &AttributeRates) -> Vec<RankedGuess> {
    Feature::ALL
        .iter()
        .map(|&feature| {
            let mut values: Vec<(Label, Rational)> = rates.table(feature).into_iter().collect();
            values.sort_by(|(la, ra), (lb, rb)| rb.cmp(ra).then_with(|| la.cmp(lb)));
            RankedGuess { feature, values }
        })
        .collect()
}

/// Guesses and ground truth for one victim.
#[derive(Debug, Clone)]
pub struct VictimGuesses {
    pub guesses: Vec<RankedGuess>,
    pub truth: AttributeTriple,
}

fn accuracy_by(
    cases: &[VictimGuesses],
    hit: impl Fn(Option<usize>) -> bool,
) -> Result<BTreeMap<Feature, Option<Rational>>> {
    if cases.is_empty() {
        return Err(Error::EmptyVictimSet);
    }
    let mut out = BTreeMap::new();
    for feature in Feature::ALL {
        let (mut total, mut hits) = (0u64, 0u64);
        for case in cases {
            let Some(truth) = case.truth.get(feature) else {
                continue;
            };
            total += 1;
            let position = case
                .guesses
                .iter()
                .find(|g| g.feature == feature)
                .and_then(|g| g.position_of(truth));
            if hit(position) {
                hits += 1;
            }
        }
        out.insert(feature, (total > 0).then(|| Rational::new(hits, total)));
    }
    Ok(out)
}

/// Fraction of victims whose true value sits at exactly position `k`.
/// Victims without a ground-truth value for a feature are left out of that
/// feature's denominator; `None` marks a feature no victim has.
pub fn top_k_accuracy(
    cases: &[VictimGuesses],
    k: usize,
) -> Result<BTreeMap<Feature, Option<Rational>>> {
    accuracy_by(cases, |pos| pos == Some(k))
}

/// Fraction of victims whose true value is ranked at position `k` or better.
pub fn top_k_cumulative_accuracy(
    cases: &[VictimGuesses],
    k: usize,
) -> Result<BTreeMap<Feature, Option<Rational>>> {
    accuracy_by(cases, |pos| pos.is_some_and(|p| p <= k))
}
