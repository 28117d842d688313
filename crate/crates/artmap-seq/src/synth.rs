//! Seeded synthetic sequence corpora.
//!
//! Each family is assigned a small set of preferred residues; every
//! position of a generated sequence is drawn from that set with
//! probability `separation`, and uniformly from the full alphabet
//! otherwise. `separation` therefore dials families from
//! indistinguishable (0.0) to nearly disjoint compositions (1.0).
//! Generated sequences are unique across the whole generator lifetime,
//! so no label conflicts can arise between draws.

use std::collections::{BTreeMap, HashSet};
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sequence::{ProteinSequence, AMINO_ACIDS};

/// Residues each family prefers.
pub const PREFERRED_RESIDUES: usize = 6;

const UNIQUENESS_ATTEMPTS: usize = 10_000;

/// Deterministic corpus generator over a fixed family roster.
///
/// Family profiles are drawn once at construction; subsequent
/// [`Synthesizer::block`] calls consume the same random stream, so a
/// fixed seed and call sequence reproduce the corpus exactly.
pub struct Synthesizer {
    profiles: Vec<(String, [u8; PREFERRED_RESIDUES])>,
    lengths: RangeInclusive<usize>,
    separation: f64,
    rng: ChaCha8Rng,
    seen: HashSet<String>,
    serials: BTreeMap<String, usize>,
}

impl Synthesizer {
    pub fn new(
        families: &[&str],
        separation: f64,
        lengths: RangeInclusive<usize>,
        seed: u64,
    ) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::EmptyInput("family roster"));
        }
        let mut unique = HashSet::new();
        for name in families {
            if name.is_empty() {
                return Err(Error::Config("empty family name".into()));
            }
            if !unique.insert(*name) {
                return Err(Error::Config(format!("duplicate family name {name:?}")));
            }
        }
        if !(0.0..=1.0).contains(&separation) {
            return Err(Error::Config(format!(
                "separation {separation} outside [0, 1]"
            )));
        }
        if *lengths.start() < 2 || lengths.is_empty() {
            return Err(Error::Config(format!(
                "length range {}..={} must start at 2 or more",
                lengths.start(),
                lengths.end()
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profiles = families
            .iter()
            .map(|name| {
                let picks =
                    rand::seq::index::sample(&mut rng, AMINO_ACIDS.len(), PREFERRED_RESIDUES);
                let mut preferred = [0u8; PREFERRED_RESIDUES];
                for (slot, i) in preferred.iter_mut().zip(picks.iter()) {
                    *slot = AMINO_ACIDS[i];
                }
                (name.to_string(), preferred)
            })
            .collect();

        Ok(Synthesizer {
            profiles,
            lengths,
            separation,
            rng,
            seen: HashSet::new(),
            serials: BTreeMap::new(),
        })
    }

    pub fn family_names(&self) -> Vec<&str> {
        self.profiles
            .iter()
            .map(|(name, _)| name.as_str())
            .collect()
    }

    fn draw(&mut self, preferred: &[u8; PREFERRED_RESIDUES]) -> String {
        let len = self
            .rng
            .gen_range(*self.lengths.start()..=*self.lengths.end());
        (0..len)
            .map(|_| {
                let residue = if self.rng.gen_bool(self.separation) {
                    preferred[self.rng.gen_range(0..PREFERRED_RESIDUES)]
                } else {
                    AMINO_ACIDS[self.rng.gen_range(0..AMINO_ACIDS.len())]
                };
                residue as char
            })
            .collect()
    }

    /// Generates `count` fresh sequences for a rostered family. Serial
    /// numbers continue across calls, so repeated blocks for one family
    /// never reuse an id.
    pub fn block(&mut self, family: &str, count: usize) -> Result<Vec<ProteinSequence>> {
        let preferred = self
            .profiles
            .iter()
            .find(|(name, _)| name == family)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::UnknownLabel(family.to_string()))?;

        let mut block = Vec::with_capacity(count);
        for _ in 0..count {
            let mut residues = self.draw(&preferred);
            let mut attempts = 1;
            while self.seen.contains(&residues) {
                if attempts >= UNIQUENESS_ATTEMPTS {
                    return Err(Error::Config(format!(
                        "exhausted uniqueness attempts for family {family}; \
                         widen the length range or lower the count"
                    )));
                }
                residues = self.draw(&preferred);
                attempts += 1;
            }
            self.seen.insert(residues.clone());
            let serial = self.serials.entry(family.to_string()).or_insert(0);
            *serial += 1;
            block.push(ProteinSequence {
                id: format!("{family}-{serial:04}"),
                family: Some(family.to_string()),
                residues,
            });
        }
        Ok(block)
    }

    /// Draws one block per `(family, count)` pair and flattens the result.
    pub fn corpus(&mut self, counts: &[(&str, usize)]) -> Result<Vec<ProteinSequence>> {
        let mut all = Vec::new();
        for &(family, count) in counts {
            all.extend(self.block(family, count)?);
        }
        Ok(all)
    }
}
