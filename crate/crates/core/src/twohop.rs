//! Two-hop collection, friendship graph production, single-edge pruning and
//! DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::UserId;
use crate::oracle::OracleHandle;
use crate::socialspy::{socialspy_s4, FriendsFound};

/// For every recovered friend `u_i` of the victim and every `u_j` recovered
/// for `u_i`, the mutual friends of `(u_i, u_j)` as shown by the MCP.
///
/// Friends with an empty recovery still appear as keys with an empty inner
/// map so the 1-hop set survives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutualFriendMap {
    pub victim: UserId,
    pub one_hop: BTreeMap<UserId, BTreeMap<UserId, BTreeSet<UserId>>>,
}

impl MutualFriendMap {
    pub fn entries(&self) -> impl Iterator<Item = ((&UserId, &UserId), &BTreeSet<UserId>)> {
        self.one_hop
            .iter()
            .flat_map(|(ui, inner)| inner.iter().map(move |(uj, m)| ((ui, uj), m)))
    }

    pub fn len(&self) -> usize {
        self.one_hop.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, ui: &UserId, uj: &UserId) -> Option<&BTreeSet<UserId>> {
        self.one_hop.get(ui)?.get(uj)
    }

    /// Pair descriptor used as the JSON key.
    pub fn pair_key(ui: &UserId, uj: &UserId) -> String {
        format!("{ui}?and={uj}")
    }

    /// JSON object keyed by pair descriptor, valued by the mutual-friend ids.
    pub fn to_json_value(&self) -> serde_json::Value {
        let map: BTreeMap<String, Vec<&str>> = self
            .entries()
            .map(|((ui, uj), m)| {
                (
                    Self::pair_key(ui, uj),
                    m.iter().map(UserId::as_str).collect(),
                )
            })
            .collect();
        serde_json::to_value(map).expect("string map serializes")
    }
}

/// Runs friend recovery on the victim, then on each recovered friend, and
/// queries the MCP for every resulting pair.
pub fn collect_2hop(victim: &UserId, oracle: &OracleHandle<'_>) -> Result<MutualFriendMap> {
    let found = socialspy_s4(victim, oracle)?;
    collect_2hop_from(&found, oracle)
}

/// Same as [`collect_2hop`] but reuses an existing recovery for the victim.
pub fn collect_2hop_from(found: &FriendsFound, oracle: &OracleHandle<'_>) -> Result<MutualFriendMap> {
    let victim = &found.victim;
    let mut one_hop = BTreeMap::new();
    for ui in &found.friends {
        let recovered = socialspy_s4(ui, oracle)?;
        let mut inner = BTreeMap::new();
        for uj in recovered.friends.iter().filter(|uj| *uj != victim) {
            inner.insert(uj.clone(), oracle.mutual_friends(ui, uj)?);
        }
        one_hop.insert(ui.clone(), inner);
    }
    Ok(MutualFriendMap {
        victim: victim.clone(),
        one_hop,
    })
}

/// Node roles, one per colour of the graph legend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Victim,
    /// Recovered friend of the victim.
    OneHop,
    /// Recovered friend of the victim that is also a friend of another
    /// recovered friend.
    CommonFriend,
    /// Two-hop id sharing at least two recovered friends with the victim.
    TwoHopRelevant,
    /// Two-hop id sharing a single recovered friend with the victim.
    TwoHopSingleEdge,
}

impl Role {
    pub fn is_one_hop(self) -> bool {
        matches!(self, Role::OneHop | Role::CommonFriend)
    }

    pub fn is_two_hop(self) -> bool {
        matches!(self, Role::TwoHopRelevant | Role::TwoHopSingleEdge)
    }

    pub fn fill_color(self) -> &'static str {
        match self {
            Role::Victim => "green",
            Role::OneHop => "mediumpurple",
            Role::CommonFriend => "lightblue",
            Role::TwoHopRelevant => "orange",
            Role::TwoHopSingleEdge => "grey",
        }
    }
}

/// Simple undirected graph around one victim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FriendshipGraph {
    victim: UserId,
    roles: BTreeMap<UserId, Role>,
    adjacency: BTreeMap<UserId, BTreeSet<UserId>>,
}

impl FriendshipGraph {
    fn new(victim: UserId) -> Self {
        let mut g = Self {
            victim: victim.clone(),
            roles: BTreeMap::new(),
            adjacency: BTreeMap::new(),
        };
        g.add_node(victim, Role::Victim);
        g
    }

    fn add_node(&mut self, id: UserId, role: Role) -> bool {
        if self.roles.contains_key(&id) {
            return false;
        }
        self.adjacency.insert(id.clone(), BTreeSet::new());
        self.roles.insert(id, role);
        true
    }

    fn add_edge(&mut self, a: &UserId, b: &UserId) {
        debug_assert!(a != b, "self-loop {a}");
        self.adjacency.get_mut(a).expect("endpoint is a node").insert(b.clone());
        self.adjacency.get_mut(b).expect("endpoint is a node").insert(a.clone());
    }

    fn remove_node(&mut self, id: &UserId) {
        if let Some(neighbours) = self.adjacency.remove(id) {
            for n in neighbours {
                if let Some(set) = self.adjacency.get_mut(&n) {
                    set.remove(id);
                }
            }
        }
        self.roles.remove(id);
    }

    pub fn victim(&self) -> &UserId {
        &self.victim
    }

    pub fn role(&self, id: &UserId) -> Option<Role> {
        self.roles.get(id).copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&UserId, Role)> {
        self.roles.iter().map(|(id, r)| (id, *r))
    }

    pub fn node_count(&self) -> usize {
        self.roles.len()
    }

    pub fn neighbours(&self, id: &UserId) -> Option<&BTreeSet<UserId>> {
        self.adjacency.get(id)
    }

    pub fn has_edge(&self, a: &UserId, b: &UserId) -> bool {
        self.adjacency.get(a).is_some_and(|s| s.contains(b))
    }

    /// Edges as sorted pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> BTreeSet<(UserId, UserId)> {
        self.adjacency
            .iter()
            .flat_map(|(a, ns)| {
                ns.iter()
                    .filter(move |b| a < *b)
                    .map(move |b| (a.clone(), b.clone()))
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn one_hop(&self) -> impl Iterator<Item = &UserId> {
        self.nodes().filter(|(_, r)| r.is_one_hop()).map(|(id, _)| id)
    }

    pub fn two_hop(&self) -> impl Iterator<Item = &UserId> {
        self.nodes().filter(|(_, r)| r.is_two_hop()).map(|(id, _)| id)
    }

    fn count_one_hop_neighbours(&self, u: &UserId) -> usize {
        self.adjacency[u]
            .iter()
            .filter(|n| self.roles[*n].is_one_hop())
            .count()
    }

    /// Number of the victim's recovered friends adjacent to `u`.
    pub fn shared_edge_count(&self, u: &UserId) -> Result<usize> {
        match self.roles.get(u) {
            Some(r) if r.is_two_hop() => Ok(self.count_one_hop_neighbours(u)),
            _ => Err(Error::NotInGraph(u.clone())),
        }
    }

    fn assign_roles(&mut self) {
        let ids: Vec<UserId> = self.roles.keys().cloned().collect();
        let mut updates = Vec::with_capacity(ids.len());
        for id in ids {
            let role = self.roles[&id];
            let new = match role {
                Role::Victim => Role::Victim,
                Role::OneHop | Role::CommonFriend => {
                    if self.count_one_hop_neighbours(&id) > 0 {
                        Role::CommonFriend
                    } else {
                        Role::OneHop
                    }
                }
                Role::TwoHopRelevant | Role::TwoHopSingleEdge => {
                    if self.count_one_hop_neighbours(&id) >= 2 {
                        Role::TwoHopRelevant
                    } else {
                        Role::TwoHopSingleEdge
                    }
                }
            };
            updates.push((id, new));
        }
        for (id, role) in updates {
            self.roles.insert(id, role);
        }
    }

    /// Two-hop ids that pruning would remove.
    pub fn single_edge_ids(&self) -> Vec<UserId> {
        self.two_hop()
            .filter(|u| self.count_one_hop_neighbours(u) < 2)
            .cloned()
            .collect()
    }

    /// Graphviz rendering, nodes and edges in sorted order.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {} {{", dot_quote(&format!("ossint_{}", self.victim)));
        out.push_str("  node [style=filled];\n");
        for (id, role) in self.nodes() {
            let _ = writeln!(
                out,
                "  {} [fillcolor={}, role={}];",
                dot_quote(id.as_str()),
                role.fill_color(),
                dot_quote(role_name(role)),
            );
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  {} -- {};", dot_quote(a.as_str()), dot_quote(b.as_str()));
        }
        out.push_str("}\n");
        out
    }
}

fn role_name(role: Role) -> &'static str {
    match role {
        Role::Victim => "victim",
        Role::OneHop => "one_hop",
        Role::CommonFriend => "common_friend",
        Role::TwoHopRelevant => "two_hop_relevant",
        Role::TwoHopSingleEdge => "two_hop_single_edge",
    }
}

fn dot_quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Builds the 2-hop friendship graph of `victim` from its mutual friend map.
///
/// Unlike a literal node-dedup pass, edges whose endpoints already exist are
/// still inserted: `(u_i, u_j)` for every recovered pair and `(u_i, u_k)`,
/// `(u_k, u_j)` for every mutual friend `u_k`. The victim is never linked to
/// anyone but its recovered friends.
pub fn build_graph(victim: &UserId, map: &MutualFriendMap) -> Result<FriendshipGraph> {
    if &map.victim != victim {
        return Err(Error::VictimMismatch {
            expected: victim.clone(),
            found: map.victim.clone(),
        });
    }
    let mut g = FriendshipGraph::new(victim.clone());
    for ui in map.one_hop.keys() {
        g.add_node(ui.clone(), Role::OneHop);
        g.add_edge(victim, ui);
    }
    for (ui, inner) in &map.one_hop {
        for (uj, mutuals) in inner {
            if uj == victim {
                continue;
            }
            g.add_node(uj.clone(), Role::TwoHopSingleEdge);
            g.add_edge(ui, uj);
            for uk in mutuals {
                if uk == victim || uk == ui || uk == uj {
                    continue;
                }
                g.add_node(uk.clone(), Role::TwoHopSingleEdge);
                g.add_edge(ui, uk);
                g.add_edge(uk, uj);
            }
        }
    }
    g.assign_roles();
    Ok(g)
}

/// Removes every two-hop node with fewer than two recovered friends of the
/// victim among its neighbours. Idempotent; never touches the victim or
/// 1-hop nodes.
pub fn prune_single_edge(g: &FriendshipGraph) -> FriendshipGraph {
    let mut pruned = g.clone();
    for id in g.single_edge_ids() {
        pruned.remove_node(&id);
    }
    pruned.assign_roles();
    pruned
}
