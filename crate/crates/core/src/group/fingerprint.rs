//! Hash keys for group elements of finitely presented groups.
//!
//! A key is the image of a word under a handful of homomorphisms (into
//! `SL(2, F_p)` and `Z`), so equal elements always get equal keys. Keys only
//! narrow down candidates; equality is still decided by the word problem.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alphabet::{Letter, Word};
use super::oracle::GroupOracle;

const PRIMES: [u32; 8] = [5, 7, 11, 13, 17, 19, 23, 29];
const TRIES_PER_PRIME: usize = 400_000;
const SEARCH_SEED: u64 = 0x5eed_cafe;

type Mat = [u32; 4];

#[derive(Debug, Clone)]
struct Sl2Rep {
    p: u32,
    /// One matrix per letter.
    mats: Vec<Mat>,
}

#[derive(Debug, Clone)]
pub(crate) struct Fingerprinter {
    reps: Vec<Sl2Rep>,
    /// Exponent of each letter under each homomorphism to `Z`.
    zmaps: Vec<Vec<i32>>,
}

fn mul(a: &Mat, b: &Mat, p: u32) -> Mat {
    let p = p as u64;
    let f =
        |x: u32, y: u32, z: u32, w: u32| ((x as u64 * y as u64 + z as u64 * w as u64) % p) as u32;
    [
        f(a[0], b[0], a[1], b[2]),
        f(a[0], b[1], a[1], b[3]),
        f(a[2], b[0], a[3], b[2]),
        f(a[2], b[1], a[3], b[3]),
    ]
}

fn inverse(a: &Mat, p: u32) -> Mat {
    [a[3], (p - a[1]) % p, (p - a[2]) % p, a[0]]
}

fn mod_inv(x: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (x as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn random_sl2(rng: &mut ChaCha8Rng, p: u32) -> Mat {
    let a = rng.gen_range(1..p);
    let b = rng.gen_range(0..p);
    let c = rng.gen_range(0..p);
    let d = ((1 + b as u64 * c as u64) % p as u64 * mod_inv(a, p) as u64 % p as u64) as u32;
    [a, b, c, d]
}

const IDENTITY: Mat = [1, 0, 0, 1];

fn eval(mats: &[Mat], w: &[Letter], p: u32) -> Mat {
    w.iter()
        .fold(IDENTITY, |acc, &l| mul(&acc, &mats[l as usize], p))
}

fn is_central(m: &Mat, p: u32) -> bool {
    m[1] == 0 && m[2] == 0 && (m[0] == m[3]) && (m[0] == 1 || m[0] == p - 1)
}

impl Fingerprinter {
    /// Searches, deterministically, for homomorphisms satisfying every relator.
    pub(crate) fn search(oracle: &GroupOracle) -> Self {
        let alphabet = oracle.alphabet();
        let gens = oracle.generators();
        let relators = oracle.relators();
        let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
        let mut reps = Vec::new();
        for &p in &PRIMES {
            for _ in 0..TRIES_PER_PRIME {
                let mut mats = vec![IDENTITY; alphabet.len()];
                for &(pos, neg) in gens {
                    let m = random_sl2(&mut rng, p);
                    mats[pos as usize] = m;
                    mats[neg as usize] = inverse(&m, p);
                }
                if gens
                    .iter()
                    .all(|&(pos, _)| is_central(&mats[pos as usize], p))
                {
                    continue;
                }
                if relators
                    .iter()
                    .all(|r| eval(&mats, r.letters(), p) == IDENTITY)
                {
                    reps.push(Sl2Rep { p, mats });
                    break;
                }
            }
        }
        let mut zmaps = Vec::new();
        for (gi, _) in gens.iter().enumerate() {
            let exponent_sum = |w: &Word| -> i64 {
                w.letters()
                    .iter()
                    .map(|&l| oracle.letter_generator(l))
                    .filter(|&(g, _)| g == gi)
                    .map(|(_, e)| e)
                    .sum()
            };
            if relators.iter().all(|r| exponent_sum(r) == 0) {
                zmaps.push(
                    alphabet
                        .letters()
                        .map(|l| {
                            let (g, e) = oracle.letter_generator(l);
                            if g == gi {
                                e as i32
                            } else {
                                0
                            }
                        })
                        .collect(),
                );
            }
        }
        Fingerprinter { reps, zmaps }
    }

    #[cfg(test)]
    pub(crate) fn rep_count(&self) -> usize {
        self.reps.len() + self.zmaps.len()
    }

    pub(crate) fn key(&self, w: &[Letter]) -> u64 {
        let mut h = DefaultHasher::new();
        for rep in &self.reps {
            eval(&rep.mats, w, rep.p).hash(&mut h);
        }
        for z in &self.zmaps {
            w.iter().map(|&l| z[l as usize]).sum::<i32>().hash(&mut h);
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_group_has_nontrivial_images() {
        let o = GroupOracle::small_cancellation(&['a', 'b', 'c', 'd'], &["abABcdCD"]).unwrap();
        let f = o.fingerprinter().unwrap();
        assert!(f.rep_count() >= 6, "only {} homomorphisms", f.rep_count());
        let r = o.word("abABcdCD").unwrap();
        assert_eq!(f.key(r.letters()), f.key(&[]));
        let u = o.word("abAB").unwrap();
        let v = o.word("dcDC").unwrap();
        assert_eq!(f.key(u.letters()), f.key(v.letters()));
        assert_ne!(f.key(&[0]), f.key(&[2]));
    }
}
