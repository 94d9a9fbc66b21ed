use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ModelError;

/// Finite, ordered state space. States are addressed by their position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self, ModelError> {
        if labels.is_empty() {
            return Err(ModelError::EmptyStateSpace);
        }
        let mut out: Vec<String> = Vec::with_capacity(labels.len());
        for label in labels {
            let label = label.as_ref();
            if out.iter().any(|l| l == label) {
                return Err(ModelError::DuplicateState(label.to_string()));
            }
            out.push(label.to_string());
        }
        Ok(Self { labels: out })
    }

    /// States labelled `0`, `1`, ... `size - 1`.
    pub fn numbered(size: usize) -> Result<Self, ModelError> {
        let labels: Vec<String> = (0..size).map(|i| i.to_string()).collect();
        Self::new(&labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    // Never true for a constructed value; present for clippy's sake.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Result<usize, ModelError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ModelError::UnknownState(label.to_string()))
    }

    pub fn check(&self, index: usize) -> Result<(), ModelError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(ModelError::StateOutOfRange {
                index,
                size: self.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicates() {
        let empty: [&str; 0] = [];
        assert_eq!(StateSpace::new(&empty), Err(ModelError::EmptyStateSpace));
        assert!(matches!(
            StateSpace::new(&["a", "b", "a"]),
            Err(ModelError::DuplicateState(_))
        ));
    }

    #[test]
    fn lookup() {
        let states = StateSpace::new(&["active", "disabled", "dead"]).unwrap();
        assert_eq!(states.len(), 3);
        assert_eq!(states.index_of("dead").unwrap(), 2);
        assert_eq!(states.label(1), Some("disabled"));
        assert!(states.check(3).is_err());
    }
}
