use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered tensor factors of a Hilbert space, each with a unique label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLayout {
    systems: Vec<(String, usize)>,
}

impl SystemLayout {
    pub fn new<S: Into<String>>(systems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let systems: Vec<(String, usize)> = systems.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (label, dim)) in systems.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidDimension { label: label.clone(), dim: *dim });
            }
            if systems[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { systems })
    }

    /// A layout with a single subsystem.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    pub fn empty() -> Self {
        Self { systems: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.systems.iter().map(|(_, d)| d).product()
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn systems(&self) -> &[(String, usize)] {
        &self.systems
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.systems.iter().map(|(l, _)| l.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(|(_, d)| *d).collect()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.systems.iter().any(|(l, _)| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.systems
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::LabelNotFound(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.systems[self.position(label)?].1)
    }

    /// Product dimension of the named subsystems.
    pub fn dim_of_all(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().try_fold(1, |acc, l| Ok(acc * self.dim_of(l)?))
    }

    /// Concatenation `self ⊗ other`; labels must stay unique.
    pub fn concat(&self, other: &SystemLayout) -> Result<Self> {
        Self::new(self.systems.iter().chain(other.systems.iter()).cloned())
    }

    /// The sub-layout of the named labels, kept in this layout's order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        for l in keep {
            self.position(l)?;
        }
        Ok(Self {
            systems: self.systems.iter().filter(|(l, _)| keep.contains(&l.as_str())).cloned().collect(),
        })
    }

    /// Renames one subsystem.
    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        let pos = self.position(from)?;
        let mut systems = self.systems.clone();
        systems[pos].0 = to.to_string();
        Self::new(systems)
    }

    /// Replaces a contiguous run of labels by another layout, returning the new
    /// layout and the index of the first replaced factor.
    pub fn splice(&self, labels: &[&str], replacement: &SystemLayout) -> Result<(Self, usize)> {
        let start = self.contiguous_run(labels)?;
        let mut systems: Vec<(String, usize)> = self.systems[..start].to_vec();
        systems.extend(replacement.systems.iter().cloned());
        systems.extend(self.systems[start + labels.len()..].iter().cloned());
        Ok((Self::new(systems)?, start))
    }

    /// Position of the first label if `labels` appear contiguously and in order.
    pub fn contiguous_run(&self, labels: &[&str]) -> Result<usize> {
        let first = match labels.first() {
            Some(l) => self.position(l)?,
            None => return Err(Error::InvalidArgument("empty label run".into())),
        };
        for (offset, l) in labels.iter().enumerate() {
            let pos = self.position(l)?;
            if pos != first + offset {
                return Err(Error::NotContiguous(labels.iter().map(|s| s.to_string()).collect()));
            }
        }
        Ok(first)
    }

    /// Dimensions of the factors before and after a contiguous run.
    pub(crate) fn surrounding_dims(&self, start: usize, len: usize) -> (usize, usize) {
        let before = self.systems[..start].iter().map(|(_, d)| d).product();
        let after = self.systems[start + len..].iter().map(|(_, d)| d).product();
        (before, after)
    }
}

impl fmt::Display for SystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.systems.iter().map(|(l, d)| format!("{l}[{d}]")).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}
