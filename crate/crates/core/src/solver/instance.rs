use serde::{Deserialize, Serialize};

use crate::competence::{CompetenceLevel, LevelAssignment};
use crate::error::{Error, Result};
use crate::preference::{RuleMatrix, RuleProvenance};

/// An `n × n` cost structure in which self-review arcs do not exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceInstance {
    n: usize,
    /// Row-major; diagonal slots are never read.
    costs: Vec<f64>,
    ids: Vec<String>,
    levels: Option<Vec<CompetenceLevel>>,
    provenance: Option<RuleProvenance>,
}

impl DistanceInstance {
    /// Builds an instance from explicit rows; diagonal entries are ignored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut costs = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &c) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::SizeMismatch(format!("cost ({i}, {j}) = {c} is not a finite non-negative number")));
                }
                costs[i * n + j] = c;
            }
        }
        Ok(DistanceInstance {
            n,
            costs,
            ids: (1..=n).map(|i| i.to_string()).collect(),
            levels: None,
            provenance: None,
        })
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::SizeMismatch(format!("{} ids for n = {}", ids.len(), self.n)));
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn with_levels(mut self, levels: Vec<CompetenceLevel>) -> Result<Self> {
        if levels.len() != self.n {
            return Err(Error::SizeMismatch(format!("{} levels for n = {}", levels.len(), self.n)));
        }
        self.levels = Some(levels);
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: Option<RuleProvenance>) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `None` on the diagonal.
    pub fn cost(&self, i: usize, j: usize) -> Option<f64> {
        (i != j).then(|| self.costs[i * self.n + j])
    }

    #[inline]
    pub(crate) fn cost_unchecked(&self, i: usize, j: usize) -> f64 {
        debug_assert_ne!(i, j);
        self.costs[i * self.n + j]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn levels(&self) -> Option<&[CompetenceLevel]> {
        self.levels.as_deref()
    }

    pub fn provenance(&self) -> Option<RuleProvenance> {
        self.provenance
    }

    pub fn max_cost(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| (0..self.n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.cost_unchecked(i, j))
            .fold(0.0, f64::max)
    }

    /// Rows with `None` on the diagonal, for serialization.
    pub fn rows(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.cost(i, j)).collect()).collect()
    }

    /// Same instance with every cost multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> DistanceInstance {
        let mut out = self.clone();
        out.costs.iter_mut().for_each(|c| *c *= factor);
        out
    }
}

/// Expands a rule matrix over a cohort: `cost(i, j) = rule[level(i)][level(j)]`.
pub fn expand_distance(rule: &RuleMatrix, levels: &LevelAssignment) -> Result<DistanceInstance> {
    let lv = levels.levels();
    let n = lv.len();
    if rule.values.values().any(|v| !v.is_finite() || v < 0.0) {
        return Err(Error::SizeMismatch("rule matrix entries must be finite and non-negative".into()));
    }
    let mut costs = vec![0.0; n * n];
    for (i, li) in lv.iter().enumerate() {
        for (j, lj) in lv.iter().enumerate() {
            if i != j {
                costs[i * n + j] = rule.values[(li.index(), lj.index())];
            }
        }
    }
    Ok(DistanceInstance {
        n,
        costs,
        ids: levels.ids().map(str::to_string).collect(),
        levels: Some(lv),
        provenance: Some(rule.provenance),
    })
}

/// Expands over an explicit roster, failing for any student without a level.
pub fn expand_distance_for(rule: &RuleMatrix, roster: &[String], levels: &LevelAssignment) -> Result<DistanceInstance> {
    let entries = roster
        .iter()
        .map(|id| {
            levels
                .level_of(id)
                .map(|l| (id.clone(), l))
                .ok_or_else(|| Error::MissingLevel(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    expand_distance(rule, &LevelAssignment::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat3;
    use CompetenceLevel::*;

    fn r3_prime() -> RuleMatrix {
        RuleMatrix::new(
            Mat3([[4.17, 11.74, 17.11], [2.51, 4.17, 11.74], [1.00, 2.51, 4.17]]),
            RuleProvenance::Reviewer,
        )
    }

    #[test]
    fn expands_by_level_pair() {
        let inst = expand_distance(&r3_prime(), &LevelAssignment::from_levels(&[High, Middle, Low])).unwrap();
        assert_eq!(
            inst.rows(),
            vec![
                vec![None, Some(11.74), Some(17.11)],
                vec![Some(2.51), None, Some(11.74)],
                vec![Some(1.00), Some(2.51), None],
            ]
        );
        assert_eq!(inst.provenance(), Some(RuleProvenance::Reviewer));
    }

    #[test]
    fn middle_reviewer_high_author_reads_row_two_col_one() {
        let rule = r3_prime();
        let inst = expand_distance(&rule, &LevelAssignment::from_levels(&[Middle, High])).unwrap();
        assert_eq!(inst.cost(0, 1), Some(rule.values[(1, 0)]));
    }

    #[test]
    fn all_ones_rule() {
        let rule = RuleMatrix::custom([[1.0; 3]; 3]);
        let inst = expand_distance(&rule, &LevelAssignment::from_levels(&[Low, High, High, Middle])).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(inst.cost(i, j), (i != j).then_some(1.0));
            }
        }
    }

    #[test]
    fn roster_without_level_is_rejected() {
        let levels = LevelAssignment::from_entries(vec![("a".into(), High)]);
        let err = expand_distance_for(&r3_prime(), &["a".into(), "b".into()], &levels).unwrap_err();
        assert!(matches!(err, Error::MissingLevel(ref id) if id == "b"));
    }

    #[test]
    fn from_rows_validates() {
        assert!(DistanceInstance::from_rows(&[vec![0.0, 1.0], vec![1.0]]).is_err());
        assert!(DistanceInstance::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).is_err());
        // Diagonal is ignored even if it holds garbage.
        let inst = DistanceInstance::from_rows(&[vec![f64::INFINITY, 1.0], vec![2.0, f64::NAN]]).unwrap();
        assert_eq!(inst.cost(0, 0), None);
        assert_eq!(inst.cost(1, 0), Some(2.0));
    }
}
