use serde::{Deserialize, Serialize};

use super::{ProError, Violation, ViolationKind};

/// The natural numbers, with system data repeating with period `tail_period` from
/// `prefix_len` on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerIndex {
    pub prefix_len: usize,
    pub tail_period: usize,
}

impl TowerIndex {
    pub fn new(prefix_len: usize, tail_period: usize) -> Result<Self, ProError> {
        if tail_period == 0 {
            return Err(ProError::Invalid("tail period must be at least 1".into()));
        }
        Ok(TowerIndex { prefix_len, tail_period })
    }

    /// Number of explicitly stored levels.
    pub fn stored(&self) -> usize {
        self.prefix_len + self.tail_period
    }

    /// Storage slot holding the data of level `n`.
    pub fn slot(&self, n: usize) -> usize {
        if n < self.stored() {
            n
        } else {
            self.prefix_len + (n - self.prefix_len) % self.tail_period
        }
    }

    pub fn default_horizon(&self) -> usize {
        3 * self.stored()
    }

    /// Common refinement with another tower index: larger prefix, lcm of periods.
    pub fn join(&self, other: &TowerIndex) -> TowerIndex {
        TowerIndex {
            prefix_len: self.prefix_len.max(other.prefix_len),
            tail_period: num_integer::lcm(self.tail_period, other.tail_period),
        }
    }
}

/// A finite directed partial order on labelled elements `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PosetIndex {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl PosetIndex {
    /// Validates that `leq` is a directed partial order.
    pub fn new(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, Violation> {
        let n = labels.len();
        let bad = |kind, message: String| Err(Violation { kind, message, triple: None });
        if n == 0 {
            return bad(ViolationKind::Shape, "a directed set is nonempty".into());
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return bad(ViolationKind::Shape, format!("order matrix must be {}x{}", n, n));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return bad(ViolationKind::Shape, format!("duplicate element {:?}", l));
            }
        }
        for a in 0..n {
            if !leq[a][a] {
                return bad(ViolationKind::NotPartialOrder, format!("{} is not <= itself", labels[a]));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return bad(
                        ViolationKind::NotPartialOrder,
                        format!("{} and {} are mutually <=", labels[a], labels[b]),
                    );
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(Violation {
                            kind: ViolationKind::NotPartialOrder,
                            message: format!("not transitive: {} <= {} <= {}", labels[a], labels[b], labels[c]),
                            triple: Some([a, b, c]),
                        });
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if !(0..n).any(|c| leq[a][c] && leq[b][c]) {
                    return bad(
                        ViolationKind::NotDirected,
                        format!("not directed: {} and {} have no upper bound", labels[a], labels[b]),
                    );
                }
            }
        }
        Ok(PosetIndex { labels, leq })
    }

    /// Reflexive-transitive closure of the given `(smaller, larger)` pairs.
    pub fn from_relations<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        pairs: &[(usize, usize)],
    ) -> Result<Self, Violation> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Violation {
                    kind: ViolationKind::Shape,
                    message: format!("relation ({}, {}) outside {} elements", a, b, n),
                    triple: None,
                });
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        Self::new(labels, leq)
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relations((0..n).map(|i| i.to_string()), &pairs).expect("chains are directed")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn leq_matrix(&self) -> &[Vec<bool>] {
        &self.leq
    }

    /// Elements sorted so that every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&a| ((0..self.len()).filter(|&b| self.leq[b][a]).count(), a));
        order
    }

    /// All `b >= a`, in linear-extension order.
    pub fn above(&self, a: usize) -> Vec<usize> {
        self.linear_extension().into_iter().filter(|&b| self.leq[a][b]).collect()
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|a| self.leq[a][m]))
    }

    /// Pairs `(smaller, larger)` with `larger` covering `smaller`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq[a][b] && !(0..n).any(|c| c != a && c != b && self.leq[a][c] && self.leq[c][b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Index of an inverse system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Index {
    Tower(TowerIndex),
    Poset(PosetIndex),
}

impl Index {
    pub fn as_tower(&self) -> Option<&TowerIndex> {
        match self {
            Index::Tower(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_poset(&self) -> Option<&PosetIndex> {
        match self {
            Index::Poset(p) => Some(p),
            _ => None,
        }
    }

    /// Number of stored levels (towers) or elements (posets).
    pub fn stored(&self) -> usize {
        match self {
            Index::Tower(t) => t.stored(),
            Index::Poset(p) => p.len(),
        }
    }

    pub fn default_horizon(&self) -> usize {
        match self {
            Index::Tower(t) => t.default_horizon(),
            Index::Poset(p) => p.len(),
        }
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        match self {
            Index::Tower(_) => a <= b,
            Index::Poset(p) => p.leq(a, b),
        }
    }

    pub fn label(&self, a: usize) -> String {
        match self {
            Index::Tower(_) => a.to_string(),
            Index::Poset(p) => p.label(a).to_string(),
        }
    }
}
