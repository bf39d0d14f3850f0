use indexmap::IndexSet;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Bidirectional name <-> dense id maps for entities and relations.
///
/// Ids are assigned in order of first sight and are contiguous from zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entities: IndexSet<String>,
    relations: IndexSet<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<E, R>(entities: E, relations: R) -> Result<Self>
    where
        E: IntoIterator,
        E::Item: Into<String>,
        R: IntoIterator,
        R::Item: Into<String>,
    {
        let mut vocab = Self::new();
        for name in entities {
            let name = name.into();
            if !vocab.entities.insert(name.clone()) {
                return Err(Error::Validation(format!("duplicate entity `{name}`")));
            }
        }
        for name in relations {
            let name = name.into();
            if !vocab.relations.insert(name.clone()) {
                return Err(Error::Validation(format!("duplicate relation `{name}`")));
            }
        }
        Ok(vocab)
    }

    pub fn intern_entity(&mut self, name: &str) -> usize {
        match self.entities.get_index_of(name) {
            Some(id) => id,
            None => self.entities.insert_full(name.to_owned()).0,
        }
    }

    pub fn intern_relation(&mut self, name: &str) -> usize {
        match self.relations.get_index_of(name) {
            Some(id) => id,
            None => self.relations.insert_full(name.to_owned()).0,
        }
    }

    pub fn entity_id(&self, name: &str) -> Option<usize> {
        self.entities.get_index_of(name)
    }

    pub fn relation_id(&self, name: &str) -> Option<usize> {
        self.relations.get_index_of(name)
    }

    pub fn entity_name(&self, id: usize) -> Option<&str> {
        self.entities.get_index(id).map(String::as_str)
    }

    pub fn relation_name(&self, id: usize) -> Option<&str> {
        self.relations.get_index(id).map(String::as_str)
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.entities.iter().map(String::as_str)
    }

    pub fn relations(&self) -> impl Iterator<Item = &str> {
        self.relations.iter().map(String::as_str)
    }

    /// SHA-256 over the ordered entity names, newline-terminated.
    pub fn entity_hash(&self) -> [u8; 32] {
        hash_names(self.entities.iter())
    }

    pub fn relation_hash(&self) -> [u8; 32] {
        hash_names(self.relations.iter())
    }
}

fn hash_names<'a>(names: impl Iterator<Item = &'a String>) -> [u8; 32] {
    let mut hasher = Sha256::new();
    for name in names {
        hasher.update(name.as_bytes());
        hasher.update(b"\n");
    }
    hasher.finalize().into()
}
