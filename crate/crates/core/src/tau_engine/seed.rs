use super::TauError;
use crate::{Signature, Q};
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Staircase class of an initial moment-matrix entry.
///
/// Entries `(a, b)` and `(a + N, b − M)` share a class because the constraint
/// reads `M_{a+N, b} = M_{a, b+M}`. The key is `(a mod N, b + ⌊a/N⌋ M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassKey {
    pub residue: u32,
    pub level: u64,
}

impl ClassKey {
    pub fn of(sig: Signature, a: u32, b: u32) -> ClassKey {
        ClassKey { residue: a % sig.n, level: b as u64 + (a / sig.n) as u64 * sig.m as u64 }
    }

    /// All `(a, b)` with `b ≥ 0` in this class, in order of increasing `a`.
    pub fn entries(self, sig: Signature) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut q = 0u64;
        while q * sig.m as u64 <= self.level {
            out.push(((self.residue as u64 + q * sig.n as u64) as u32, (self.level - q * sig.m as u64) as u32));
            q += 1;
        }
        out
    }
}

/// Initial moment matrix given by finitely many nonzero class values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub sig: Signature,
    values: BTreeMap<ClassKey, Q>,
}

impl Seed {
    pub fn from_classes(sig: Signature, values: impl IntoIterator<Item = (ClassKey, Q)>) -> Result<Seed, TauError> {
        let mut map = BTreeMap::new();
        for (k, v) in values {
            if k.residue >= sig.n {
                return Err(TauError::BadClass { residue: k.residue, n: sig.n });
            }
            if map.insert(k, v.clone()).is_some_and(|old| old != v) {
                return Err(TauError::OverDetermined { residue: k.residue, level: k.level });
            }
        }
        map.retain(|_, v| !v.is_zero());
        Ok(Seed { sig, values: map })
    }

    /// Builds a seed from explicit entries; entries of one class must agree.
    pub fn from_entries(sig: Signature, entries: impl IntoIterator<Item = ((u32, u32), Q)>) -> Result<Seed, TauError> {
        Self::from_classes(sig, entries.into_iter().map(|((a, b), v)| (ClassKey::of(sig, a, b), v)))
    }

    /// Single class `(0, 0)` set to one: `M0 = E_{00}`.
    pub fn delta_origin(sig: Signature) -> Seed {
        Seed::from_classes(sig, [(ClassKey { residue: 0, level: 0 }, Q::from_integer(1.into()))])
            .expect("valid class")
    }

    /// `M0_{a,b} = 1` iff `aM + bN = k`, giving the all-ones rational solutions.
    pub fn rational(sig: Signature, k: u64) -> Seed {
        let (n, m) = (sig.n as u64, sig.m as u64);
        let mut vals = Vec::new();
        let mut a = 0u64;
        while a * m <= k {
            let rest = k - a * m;
            if rest.is_multiple_of(n) {
                vals.push(((a as u32, (rest / n) as u32), Q::from_integer(1.into())));
            }
            a += 1;
        }
        Seed::from_entries(sig, vals).expect("one value per class")
    }

    /// Random small integers on classes with `level ≤ max_level`; each
    /// class is nonzero with probability `density`.
    pub fn random(sig: Signature, max_level: u64, density: f64, rng: &mut impl Rng) -> Seed {
        let mut vals = Vec::new();
        for residue in 0..sig.n {
            for level in 0..=max_level {
                if rng.gen_bool(density) {
                    let v: i64 = loop {
                        let v = rng.gen_range(-4i64..=4);
                        if v != 0 {
                            break v;
                        }
                    };
                    vals.push((ClassKey { residue, level }, Q::from_integer(v.into())));
                }
            }
        }
        Seed::from_classes(sig, vals).expect("distinct keys")
    }

    pub fn classes(&self) -> impl Iterator<Item = (&ClassKey, &Q)> {
        self.values.iter()
    }

    pub fn value(&self, a: u32, b: u32) -> Q {
        self.values.get(&ClassKey::of(self.sig, a, b)).cloned().unwrap_or_else(Q::zero)
    }

    /// Every nonzero entry of the infinite initial matrix.
    pub fn support(&self) -> Vec<(u32, u32, Q)> {
        let mut out: Vec<(u32, u32, Q)> = self
            .values
            .iter()
            .flat_map(|(k, v)| k.entries(self.sig).into_iter().map(move |(a, b)| (a, b, v.clone())))
            .collect();
        out.sort_by_key(|e| (e.0, e.1));
        out
    }
}
