use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite carrier: a sorted, duplicate-free list of element identifiers.
///
/// Every map between carriers in this crate is a dense `Vec<usize>` indexed by
/// positions in a `FiniteSet`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteSet {
    elements: Vec<String>,
}

impl FiniteSet {
    pub fn new<I, S>(elements: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        elements.sort();
        elements.dedup();
        FiniteSet { elements }
    }

    pub fn empty() -> Self {
        FiniteSet::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements
            .binary_search_by(|e| e.as_str().cmp(name))
            .ok()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Name at position `idx`. Panics when out of range.
    pub fn name(&self, idx: usize) -> &str {
        &self.elements[idx]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.elements.iter().map(String::as_str)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.elements
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    /// Subset made of the given positions.
    pub fn select(&self, positions: impl IntoIterator<Item = usize>) -> FiniteSet {
        FiniteSet::new(positions.into_iter().map(|p| self.elements[p].clone()))
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements.iter()).finish()
    }
}

impl Serialize for FiniteSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Vec::<String>::deserialize(deserializer).map(FiniteSet::new)
    }
}

/// Gives every candidate label a distinct name, appending primes on collision.
pub(crate) fn unique_names(candidates: Vec<String>) -> Vec<String> {
    let mut taken = std::collections::BTreeSet::new();
    candidates
        .into_iter()
        .map(|mut name| {
            while !taken.insert(name.clone()) {
                name.push('\'');
            }
            name
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_order_and_duplicates() {
        let s = FiniteSet::new(["b", "a", "b", "c"]);
        assert_eq!(s.as_slice(), &["a", "b", "c"]);
        assert_eq!(s.index_of("c"), Some(2));
        assert_eq!(s.index_of("z"), None);
    }

    #[test]
    fn unique_names_disambiguates() {
        let names = unique_names(vec!["p".into(), "q".into(), "p".into(), "p".into()]);
        assert_eq!(names, vec!["p", "q", "p'", "p''"]);
    }
}
