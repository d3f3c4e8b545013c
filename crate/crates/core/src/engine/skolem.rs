use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uuid::Uuid;

use crate::rdf::Iri;
use crate::vocab;

/// A source of version-4 UUIDs.
pub trait UuidSource {
    fn next_uuid(&mut self) -> Uuid;
}

/// Fresh randomness from the operating system on every call.
#[derive(Debug, Default, Clone, Copy)]
pub struct RandomUuids;

impl UuidSource for RandomUuids {
    fn next_uuid(&mut self) -> Uuid {
        Uuid::new_v4()
    }
}

/// Deterministic UUID stream for reproducible output.
#[derive(Debug, Clone)]
pub struct SeededUuids(ChaCha8Rng);

impl SeededUuids {
    pub fn new(seed: u64) -> Self {
        SeededUuids(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl UuidSource for SeededUuids {
    fn next_uuid(&mut self) -> Uuid {
        let mut bytes = [0u8; 16];
        self.0.fill_bytes(&mut bytes);
        uuid::Builder::from_random_bytes(bytes).into_uuid()
    }
}

/// `base` + `.well-known/genid/` + a fresh lowercase hyphenated UUIDv4.
pub fn generate_skolem_iri(base: &Iri) -> Iri {
    skolem_iri_from(base, RandomUuids.next_uuid())
}

pub fn skolem_iri_from(base: &Iri, uuid: Uuid) -> Iri {
    Iri::new(format!(
        "{base}{}{}",
        vocab::GENID_PATH,
        uuid.hyphenated().encode_lower(&mut Uuid::encode_buffer())
    ))
    .expect("base joined with a genid path is a valid IRI")
}

/// Whether `iri` is `base` + `.well-known/genid/` + a lowercase UUIDv4.
pub fn is_skolem_iri(base: &Iri, iri: &Iri) -> bool {
    let Some(id) = iri
        .as_str()
        .strip_prefix(base.as_str())
        .and_then(|rest| rest.strip_prefix(vocab::GENID_PATH))
    else {
        return false;
    };
    let b = id.as_bytes();
    if b.len() != 36 {
        return false;
    }
    let hex = |c: u8| c.is_ascii_digit() || (b'a'..=b'f').contains(&c);
    b.iter().enumerate().all(|(i, &c)| match i {
        8 | 13 | 18 | 23 => c == b'-',
        14 => c == b'4',
        19 => matches!(c, b'8' | b'9' | b'a' | b'b'),
        _ => hex(c),
    })
}

/// Key under which an anonymous shape's skolem IRI is stored.
pub fn anon_key(ordinal: u32) -> Iri {
    Iri::new(format!("{}{ordinal}", vocab::ANON_KEY_NS)).expect("valid constant prefix")
}

/// Maps exVar IRIs and anonymous-shape keys to skolem IRIs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkolemMap {
    entries: BTreeMap<Iri, Iri>,
}

impl SkolemMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous value for `key`, if any.
    pub fn insert(&mut self, key: Iri, skolem: Iri) -> Option<Iri> {
        self.entries.insert(key, skolem)
    }

    pub fn get(&self, key: &Iri) -> Option<&Iri> {
        self.entries.get(key)
    }

    pub fn contains_skolem(&self, skolem: &Iri) -> bool {
        self.entries.values().any(|v| v == skolem)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.entries.iter()
    }

    pub fn skolems(&self) -> impl Iterator<Item = &Iri> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// No two keys share a skolem IRI.
    pub fn is_injective(&self) -> bool {
        let mut values: Vec<&Iri> = self.entries.values().collect();
        values.sort();
        values.windows(2).all(|w| w[0] != w[1])
    }
}

impl FromIterator<(Iri, Iri)> for SkolemMap {
    fn from_iter<T: IntoIterator<Item = (Iri, Iri)>>(iter: T) -> Self {
        SkolemMap {
            entries: iter.into_iter().collect(),
        }
    }
}
