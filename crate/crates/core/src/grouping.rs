//! Semantic similarity, user grouping, and interference weights for
//! cooperative transmission.
//!
//! Users are first clustered greedily on a similarity matrix (each user
//! joins the existing group with the highest mean similarity when that mean
//! clears a threshold), then every cluster is split into subgroups of at
//! most two users by exhaustively maximizing the intra-pair cross gains
//! `C[i][j] + C[j][i]` — pairs are the only group size whose phases can be
//! aligned at both receivers. Co-grouped users get interference weight
//! `1 - R[i][j]` (clamped to [0, 1]); everyone else keeps weight 1.

use crate::beamforming::logistic::LogisticParams;
use crate::beamforming::solver::{optimize_uncorrelated, SolveReport, SolverOptions};
use crate::channel::{BeamformerSet, ChannelSet};
use crate::error::{Error, Result};
use crate::numerics::complex::inner;

/// Largest cluster the exhaustive pair refinement will accept.
pub const PAIRING_LIMIT: usize = 10;

/// Cosine similarity of two embedding vectors.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "embedding lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(na > 0.0) || !(nb > 0.0) {
        return Err(Error::DegenerateInput("cosine similarity of a zero vector".into()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Symmetric K x K similarity matrix with unit diagonal and entries in
/// [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    k: usize,
    r: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("similarity matrix must be square".into()));
        }
        let mut r = Vec::with_capacity(k * k);
        for row in &rows {
            r.extend_from_slice(row);
        }
        let m = SimilarityMatrix { k, r };
        m.validate()?;
        Ok(m)
    }

    /// Identity similarity: every pair fully dissimilar.
    pub fn identity(k: usize) -> Self {
        let mut r = vec![0.0; k * k];
        for i in 0..k {
            r[i * k + i] = 1.0;
        }
        SimilarityMatrix { k, r }
    }

    /// Similarity from a batch of embedding vectors.
    pub fn from_embeddings(embeddings: &[Vec<f64>]) -> Result<Self> {
        let k = embeddings.len();
        let mut rows = vec![vec![0.0; k]; k];
        for i in 0..k {
            rows[i][i] = 1.0;
            for j in (i + 1)..k {
                let s = cosine_similarity(&embeddings[i], &embeddings[j])?;
                rows[i][j] = s;
                rows[j][i] = s;
            }
        }
        SimilarityMatrix::new(rows)
    }

    /// Parse a K x K matrix from CSV text (one row per line).
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| Error::Format {
                        offset: ln as u64,
                        what: format!("bad similarity value '{}': {e}", f.trim()),
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        SimilarityMatrix::new(rows)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.k {
            if (self.at(i, i) - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "similarity diagonal must be 1, got {} at {i}",
                    self.at(i, i)
                )));
            }
            for j in 0..self.k {
                let v = self.at(i, j);
                if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&v) {
                    return Err(Error::InvalidConfig(format!(
                        "similarity entry ({i},{j}) = {v} outside [-1, 1]"
                    )));
                }
                if (v - self.at(j, i)).abs() > 1e-9 {
                    return Err(Error::InvalidConfig(format!(
                        "similarity matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.k + j]
    }
}

/// A partition of the users into groups of size one or two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    users: usize,
    groups: Vec<Vec<usize>>,
}

impl Grouping {
    pub fn new(groups: Vec<Vec<usize>>, users: usize) -> Result<Self> {
        let mut seen = vec![false; users];
        for g in &groups {
            if g.is_empty() || g.len() > 2 {
                return Err(Error::InvalidConfig(format!(
                    "groups must have size 1 or 2, got {}",
                    g.len()
                )));
            }
            for &u in g {
                if u >= users || seen[u] {
                    return Err(Error::InvalidConfig(
                        "groups must partition the user set".into(),
                    ));
                }
                seen[u] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidConfig("every user must belong to a group".into()));
        }
        let mut groups = groups;
        for g in &mut groups {
            g.sort_unstable();
        }
        Ok(Grouping { users, groups })
    }

    /// Construction without the size/partition checks, for exercising
    /// contract enforcement in consumers.
    pub fn from_parts_unchecked(groups: Vec<Vec<usize>>) -> Self {
        let users = groups.iter().map(|g| g.len()).sum();
        Grouping { users, groups }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Index of the group containing `user`.
    pub fn group_of(&self, user: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(&user))
            .expect("user must belong to a group")
    }

    /// The other member of `user`'s group, if any.
    pub fn partner(&self, user: usize) -> Option<usize> {
        self.groups[self.group_of(user)]
            .iter()
            .copied()
            .find(|&u| u != user)
    }

    pub fn all_singletons(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }
}

/// Greedy threshold clustering: users join the existing group with the
/// highest mean similarity when that mean reaches `th`, otherwise they open
/// a new group. Returns coarse groups of arbitrary size.
pub fn semantic_group(r: &SimilarityMatrix, th: f64) -> Result<Vec<Vec<usize>>> {
    if !(-1.0 < th && th < 1.0) {
        return Err(Error::InvalidConfig(format!("threshold must lie in (-1, 1), got {th}")));
    }
    let k = r.size();
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for user in 1..k {
        let mut best_group = 0;
        let mut best_mean = f64::NEG_INFINITY;
        for (gi, g) in groups.iter().enumerate() {
            let mean = g.iter().map(|&j| r.at(user, j)).sum::<f64>() / g.len() as f64;
            if mean > best_mean {
                best_mean = mean;
                best_group = gi;
            }
        }
        if best_mean >= th {
            groups[best_group].push(user);
        } else {
            groups.push(vec![user]);
        }
    }
    Ok(groups)
}

/// All partitions of `items` into parts of size one or two, reported to the
/// visitor as index-pair lists (singletons are `(i, None)`).
fn for_each_pairing<F: FnMut(&[(usize, Option<usize>)])>(items: &[usize], visit: &mut F) {
    fn recurse<F: FnMut(&[(usize, Option<usize>)])>(
        rest: &mut Vec<usize>,
        acc: &mut Vec<(usize, Option<usize>)>,
        visit: &mut F,
    ) {
        if rest.is_empty() {
            visit(acc);
            return;
        }
        let first = rest.remove(0);
        // first stays alone
        acc.push((first, None));
        recurse(rest, acc, visit);
        acc.pop();
        // first pairs with each remaining element
        for idx in 0..rest.len() {
            let other = rest.remove(idx);
            acc.push((first, Some(other)));
            recurse(rest, acc, visit);
            acc.pop();
            rest.insert(idx, other);
        }
        rest.insert(0, first);
    }
    let mut rest = items.to_vec();
    let mut acc = Vec::new();
    recurse(&mut rest, &mut acc, visit);
}

/// Split one coarse group into subgroups of at most two users, maximizing
/// the summed intra-pair cross gains `C[i][j] + C[j][i]`. Groups already of
/// size <= 2 pass through unchanged; ties break toward the lexicographically
/// smallest pairing.
pub fn refine_pairs(group: &[usize], gains: &[Vec<f64>]) -> Result<Vec<Vec<usize>>> {
    if group.len() <= 2 {
        return Ok(vec![group.to_vec()]);
    }
    if group.len() > PAIRING_LIMIT {
        return Err(Error::GroupTooLarge { size: group.len(), limit: PAIRING_LIMIT });
    }
    for &u in group {
        if u >= gains.len() || gains[u].len() != gains.len() {
            return Err(Error::DimensionMismatch(
                "gain matrix must be square and cover all grouped users".into(),
            ));
        }
    }
    let mut sorted = group.to_vec();
    sorted.sort_unstable();
    let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
    for_each_pairing(&sorted, &mut |pairing| {
        let mut score = 0.0;
        let mut parts: Vec<Vec<usize>> = Vec::with_capacity(pairing.len());
        for &(i, j) in pairing {
            match j {
                Some(j) => {
                    score += gains[i][j] + gains[j][i];
                    parts.push(vec![i.min(j), i.max(j)]);
                }
                None => parts.push(vec![i]),
            }
        }
        parts.sort();
        let better = match &best {
            None => true,
            Some((s, p)) => score > *s || (score == *s && parts < *p),
        };
        if better {
            best = Some((score, parts));
        }
    });
    Ok(best.expect("at least one pairing exists").1)
}

/// End-to-end grouping: a beamforming pre-pass supplies the channel gain
/// matrix `C[j][k] = |h_j^H v_k|^2`, then threshold clustering and pair
/// refinement produce the final grouping.
pub struct GroupingOutcome {
    pub grouping: Grouping,
    /// Beams from the uncorrelated pre-pass (reusable as the non-COMP
    /// baseline for the same channels).
    pub prepass_beams: BeamformerSet,
    pub prepass_report: SolveReport,
}

pub fn group_users(
    r: &SimilarityMatrix,
    th: f64,
    ch: &ChannelSet,
    p_t: f64,
    params: &LogisticParams,
    opts: &SolverOptions,
) -> Result<GroupingOutcome> {
    if r.size() != ch.users() {
        return Err(Error::DimensionMismatch(format!(
            "similarity matrix is {}x{0} but there are {} users",
            r.size(),
            ch.users()
        )));
    }
    let (beams, report) = optimize_uncorrelated(ch, p_t, params, opts)?;
    let k = ch.users();
    let mut gains = vec![vec![0.0f64; k]; k];
    for j in 0..k {
        for v in 0..k {
            gains[j][v] = inner(ch.h(j), beams.v(v)).norm_sqr();
        }
    }
    let coarse = semantic_group(r, th)?;
    let mut final_groups = Vec::new();
    for g in &coarse {
        final_groups.extend(refine_pairs(g, &gains)?);
    }
    Ok(GroupingOutcome {
        grouping: Grouping::new(final_groups, k)?,
        prepass_beams: beams,
        prepass_report: report,
    })
}

/// Interference weight matrix: `1 - R[i][j]` (clamped to [0, 1]) for
/// co-grouped pairs, 1 otherwise. Weight 0 means in-group interference is
/// ignored by the beamformer; clamping keeps negative similarities from
/// penalizing interference beyond the Gaussian level.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    k: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn ones(k: usize) -> Self {
        WeightMatrix { k, w: vec![1.0; k * k] }
    }

    pub fn users(&self) -> usize {
        self.k
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.k..(i + 1) * self.k]
    }
}

/// Build the interference weights for a grouping.
pub fn build_weights(g: &Grouping, r: &SimilarityMatrix) -> WeightMatrix {
    let k = g.users();
    let mut w = WeightMatrix::ones(k);
    for group in g.groups() {
        if let [i, j] = group[..] {
            let v = (1.0 - r.at(i, j)).clamp(0.0, 1.0);
            w.w[i * k + j] = v;
            w.w[j * k + i] = v;
        }
    }
    w
}
