use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::arith::primes_up_to;
use crate::error::{Error, Result};

use super::model::WeierstrassModel;
use super::points::ap_good;
use super::tate::{disc_valuation, tate_local_data, LocalData, ReductionType};

pub const AP_CACHE_MAGIC: &[u8; 6] = b"KURAP\0";
pub const AP_CACHE_VERSION: u16 = 1;

/// A curve together with its local data and a shared table of `a_l`.
#[derive(Debug)]
pub struct CurveContext {
    model: WeierstrassModel,
    label: Option<String>,
    local: Vec<LocalData>,
    conductor: u64,
    aps: RwLock<BTreeMap<u64, i64>>,
    cache_file: Option<PathBuf>,
}

impl CurveContext {
    /// Derives local data at every bad prime and checks global minimality.
    pub fn new(model: WeierstrassModel, label: Option<String>) -> Result<Self> {
        let disc = model.discriminant().abs().to_biguint().expect("nonnegative");
        let mut local = Vec::new();
        let mut conductor: u64 = 1;
        for (q, _) in crate::arith::factorize_big(&disc) {
            let q = q.to_u64().ok_or_else(|| {
                Error::InvalidInput(format!("bad prime {q} does not fit in 64 bits"))
            })?;
            let data = tate_local_data(&model, q);
            if data.disc_valuation != disc_valuation(&model, q) {
                return Err(Error::NotMinimal { prime: q });
            }
            if data.reduction != ReductionType::Good {
                conductor = q
                    .checked_pow(data.conductor_exponent)
                    .and_then(|f| conductor.checked_mul(f))
                    .ok_or_else(|| Error::InvalidInput("conductor exceeds 64 bits".into()))?;
                local.push(data);
            }
        }
        Ok(CurveContext {
            model,
            label,
            local,
            conductor,
            aps: RwLock::new(BTreeMap::new()),
            cache_file: None,
        })
    }

    pub fn model(&self) -> &WeierstrassModel {
        &self.model
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn curve_hash(&self) -> u64 {
        self.model.curve_hash()
    }

    /// Local data at the primes of bad reduction, in increasing order.
    pub fn bad_primes(&self) -> &[LocalData] {
        &self.local
    }

    pub fn local_data(&self, q: u64) -> LocalData {
        self.local
            .iter()
            .find(|d| d.prime == q)
            .cloned()
            .unwrap_or_else(|| tate_local_data(&self.model, q))
    }

    pub fn is_bad(&self, q: u64) -> bool {
        self.conductor.is_multiple_of(q)
    }

    pub fn tamagawa_product(&self) -> u64 {
        self.local.iter().map(|d| d.tamagawa).product()
    }

    /// `a_l` for a prime `l`, from the cache when available.
    pub fn ap(&self, l: u64) -> i64 {
        if let Some(d) = self.local.iter().find(|d| d.prime == l) {
            return d.reduction.bad_ap().expect("bad prime");
        }
        if let Some(&a) = self.aps.read().expect("lock").get(&l) {
            return a;
        }
        let a = ap_good(&self.model, l).expect("good prime");
        self.aps.write().expect("lock").insert(l, a);
        a
    }

    /// Fills the cache for all listed primes, in parallel.
    pub fn precompute_aps(&self, primes: &[u64]) {
        let missing: Vec<u64> = {
            let cache = self.aps.read().expect("lock");
            primes
                .iter()
                .copied()
                .filter(|l| !cache.contains_key(l) && !self.is_bad(*l))
                .collect()
        };
        let computed: Vec<(u64, i64)> = missing
            .par_iter()
            .map(|&l| (l, ap_good(&self.model, l).expect("good prime")))
            .collect();
        self.aps.write().expect("lock").extend(computed);
    }

    /// `a_1, ..., a_bound` (index 0 holds 0), from Hecke multiplicativity.
    pub fn an_sequence(&self, bound: usize) -> Vec<i64> {
        let primes = primes_up_to(bound as u64);
        self.precompute_aps(&primes);
        let mut an = vec![0i64; bound + 1];
        if bound == 0 {
            return an;
        }
        an[1] = 1;
        let mut spf = vec![0u32; bound + 1];
        for &q in &primes {
            let q = q as usize;
            let mut m = q;
            while m <= bound {
                if spf[m] == 0 {
                    spf[m] = q as u32;
                }
                m += q;
            }
        }
        for n in 2..=bound {
            let q = spf[n] as usize;
            let mut m = n;
            let mut qk = 1usize;
            while m % q == 0 {
                m /= q;
                qk *= q;
            }
            if m > 1 {
                an[n] = an[m] * an[qk];
                continue;
            }
            // n is a prime power q^k
            let aq = self.ap(q as u64);
            an[n] = if n == q {
                aq
            } else if self.is_bad(q as u64) {
                aq * an[n / q]
            } else {
                aq * an[n / q] - q as i64 * an[n / q / q]
            };
        }
        an
    }

    /// Attaches an on-disk `a_l` cache in `dir`, loading whatever it holds
    /// for this curve. A file with a foreign header is ignored and later
    /// overwritten.
    pub fn attach_cache(&mut self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{:016x}.ap", self.curve_hash()));
        if let Ok(entries) = read_ap_cache(&path, self.curve_hash()) {
            let mut cache = self.aps.write().expect("lock");
            for (l, a) in entries {
                cache.insert(l, a);
            }
        }
        self.cache_file = Some(path);
        Ok(())
    }

    /// Writes the current `a_l` table to the attached cache file, if any.
    pub fn flush_cache(&self) -> Result<()> {
        let Some(path) = &self.cache_file else {
            return Ok(());
        };
        let entries: Vec<(u64, i64)> = self.aps.read().expect("lock").iter().map(|(&l, &a)| (l, a)).collect();
        write_ap_cache(path, self.curve_hash(), &entries)
    }

    pub fn cached_ap_count(&self) -> usize {
        self.aps.read().expect("lock").len()
    }
}

pub fn write_ap_cache(path: &Path, curve_hash: u64, entries: &[(u64, i64)]) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + entries.len() * 16);
    bytes.extend_from_slice(AP_CACHE_MAGIC);
    bytes.extend_from_slice(&AP_CACHE_VERSION.to_le_bytes());
    bytes.extend_from_slice(&curve_hash.to_le_bytes());
    for &(l, a) in entries {
        bytes.extend_from_slice(&l.to_le_bytes());
        bytes.extend_from_slice(&a.to_le_bytes());
    }
    let tmp = path.with_extension("ap.tmp");
    fs::File::create(&tmp)?.write_all(&bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_ap_cache(path: &Path, curve_hash: u64) -> Result<Vec<(u64, i64)>> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..6] != AP_CACHE_MAGIC {
        return Err(Error::Format("a_l cache: bad magic".into()));
    }
    let version = u16::from_le_bytes([bytes[6], bytes[7]]);
    if version != AP_CACHE_VERSION {
        return Err(Error::Format(format!("a_l cache: version {version}")));
    }
    let hash = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    if hash != curve_hash {
        return Err(Error::Format("a_l cache: curve hash mismatch".into()));
    }
    let body = &bytes[16..];
    if body.len() % 16 != 0 {
        return Err(Error::Format("a_l cache: truncated record".into()));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            (
                u64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                i64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect())
}
