use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiskPoint;

/// A finite sequence of distinct disk points with optional subsequence
/// labels (`1..=n`) and an optional value assignment, both aligned with
/// `points`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct LabeledSequence {
    points: Vec<DiskPoint>,
    labels: Option<Vec<usize>>,
    values: Option<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    points: Vec<DiskPoint>,
    #[serde(default)]
    labels: Option<Vec<usize>>,
    #[serde(default, with = "crate::json::complex_vec_opt")]
    values: Option<Vec<Complex64>>,
}

impl TryFrom<RawSequence> for LabeledSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        let mut s = LabeledSequence::new(raw.points)?;
        if let Some(l) = raw.labels {
            s = s.with_labels(l)?;
        }
        if let Some(v) = raw.values {
            s = s.with_values(v)?;
        }
        Ok(s)
    }
}

impl From<LabeledSequence> for RawSequence {
    fn from(s: LabeledSequence) -> Self {
        RawSequence {
            points: s.points,
            labels: s.labels,
            values: s.values,
        }
    }
}

impl LabeledSequence {
    pub fn new(points: Vec<DiskPoint>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for &p in &points {
            if !seen.insert(p) {
                return Err(Error::DuplicatePoint(p));
            }
        }
        Ok(LabeledSequence {
            points,
            labels: None,
            values: None,
        })
    }

    /// Builds a labeled sequence from parts; part `j` (0-based) gets label `j + 1`.
    pub fn from_parts(parts: &[Vec<DiskPoint>]) -> Result<Self> {
        let points: Vec<DiskPoint> = parts.iter().flatten().copied().collect();
        let labels = parts
            .iter()
            .enumerate()
            .flat_map(|(j, part)| std::iter::repeat_n(j + 1, part.len()))
            .collect();
        LabeledSequence::new(points)?.with_labels(labels)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::InvalidParams(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        if labels.contains(&0) {
            return Err(Error::InvalidParams("labels start at 1".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_values(mut self, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != self.points.len() {
            return Err(Error::InvalidParams(format!(
                "{} values for {} points",
                values.len(),
                self.points.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParams("values must be finite".into()));
        }
        self.values = Some(values);
        Ok(self)
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn values(&self) -> Option<&[Complex64]> {
        self.values.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn require_values(&self) -> Result<&[Complex64]> {
        self.values.as_deref().ok_or(Error::NoValues)
    }

    /// Number of labeled subsequences (largest label).
    pub fn part_count(&self) -> usize {
        self.labels
            .as_ref()
            .and_then(|l| l.iter().max().copied())
            .unwrap_or(0)
    }

    /// Points grouped by label, in input order within each part.
    pub fn parts(&self) -> Result<Vec<Vec<DiskPoint>>> {
        let labels = self.labels.as_ref().ok_or(Error::NoLabels)?;
        let mut parts = vec![Vec::new(); self.part_count()];
        for (&p, &l) in self.points.iter().zip(labels) {
            parts[l - 1].push(p);
        }
        Ok(parts)
    }

    pub fn value_map(&self) -> Result<HashMap<DiskPoint, Complex64>> {
        let values = self.require_values()?;
        Ok(self.points.iter().copied().zip(values.iter().copied()).collect())
    }
}
