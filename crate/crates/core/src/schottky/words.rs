//! Reduced words in the generators and their action.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::projective::ProjPoint;
use crate::psl::ProjMap;

use super::dynamics::{fundamental_domain_membership, Membership};
use super::{RegionRef, SchottkyData, Side};

/// `gamma_generator^sign` with `generator` counted from 1 and `sign = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub sign: i8,
}

impl Letter {
    pub fn new(generator: usize, sign: i8) -> Result<Self> {
        if generator == 0 || (sign != 1 && sign != -1) {
            return Err(Error::InvalidInput(format!("invalid letter ({generator}, {sign})")));
        }
        Ok(Letter { generator, sign })
    }

    pub fn inverse(self) -> Letter {
        Letter { generator: self.generator, sign: -self.sign }
    }

    /// Position in the alphabet `g1, g1^-1, g2, g2^-1, ...`.
    fn rank(self) -> usize {
        2 * (self.generator - 1) + usize::from(self.sign < 0)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign > 0 {
            write!(f, "g{}", self.generator)
        } else {
            write!(f, "g{}^-1", self.generator)
        }
    }
}

/// A word written left to right; the rightmost letter acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        for l in &letters {
            Letter::new(l.generator, l.sign)?;
        }
        if let Some(i) = letters.windows(2).position(|w| w[1] == w[0].inverse()) {
            return Err(Error::NotReduced(i));
        }
        Ok(ReducedWord { letters })
    }

    pub fn from_pairs(pairs: &[(usize, i8)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(g, s)| Letter::new(g, s)).collect::<Result<_>>()?)
    }

    pub fn identity() -> Self {
        ReducedWord::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The leftmost letter, which acts last.
    pub fn leading(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    fn check_generators(&self, s: &SchottkyData) -> Result<()> {
        match self.letters.iter().find(|l| l.generator > s.g()) {
            Some(l) => Err(Error::InvalidInput(format!("letter {l} uses a generator outside 1..={}", s.g()))),
            None => Ok(()),
        }
    }

    /// The product of the letters' lifts.
    pub fn map(&self, s: &SchottkyData) -> Result<ProjMap> {
        self.check_generators(s)?;
        let mut acc = ProjMap::identity(s.n());
        for l in &self.letters {
            acc = acc.compose(s.generator(l.generator, l.sign))?;
        }
        Ok(acc)
    }

    /// Applies the letters to `p`, rightmost first.
    pub fn apply(&self, s: &SchottkyData, p: &ProjPoint) -> Result<ProjPoint> {
        self.check_generators(s)?;
        let mut q = p.clone();
        for l in self.letters.iter().rev() {
            q = s.generator(l.generator, l.sign).apply(&q)?;
        }
        Ok(q)
    }
}

impl Ord for ReducedWord {
    /// Shortlex: shorter words first, then letter by letter.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self.letters.iter().map(Letter::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.letters.iter().map(|l| (l.generator, l.sign)).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReducedWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(usize, i8)>::deserialize(d)?;
        ReducedWord::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// Reduced words of length `0..=max_len` over `g` generators in shortlex order.
#[derive(Debug, Clone)]
pub struct WordIter {
    g: usize,
    max_len: usize,
    level: Vec<Vec<Letter>>,
    index: usize,
}

impl Iterator for WordIter {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<ReducedWord> {
        if self.index == self.level.len() {
            let len = self.level.first().map_or(usize::MAX, Vec::len);
            if len >= self.max_len || self.g == 0 {
                return None;
            }
            let alphabet: Vec<Letter> =
                (1..=self.g).flat_map(|generator| [1i8, -1].map(|sign| Letter { generator, sign })).collect();
            let mut next = Vec::with_capacity(self.level.len() * (2 * self.g - 1).max(1));
            for word in &self.level {
                for &l in &alphabet {
                    if word.last().is_some_and(|last| *last == l.inverse()) {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(l);
                    next.push(w);
                }
            }
            self.level = next;
            self.index = 0;
        }
        let word = ReducedWord { letters: self.level[self.index].clone() };
        self.index += 1;
        Some(word)
    }
}

pub fn enumerate_reduced_words(g: usize, max_len: usize) -> WordIter {
    WordIter { g, max_len, level: vec![Vec::new()], index: 0 }
}

/// `1 + sum_{l=1}^{max_len} 2g (2g - 1)^{l-1}`.
pub fn reduced_word_count(g: usize, max_len: usize) -> usize {
    (1..=max_len).map(|l| 2 * g * (2 * g - 1).pow(l as u32 - 1)).sum::<usize>() + 1
}

/// The region a nonempty reduced word sends the interior of the fundamental
/// domain into: `S_j` when the leading letter is `gamma_j`, `R_j` for `gamma_j^{-1}`.
pub fn word_image_region(s: &SchottkyData, w: &ReducedWord) -> Result<RegionRef> {
    w.check_generators(s)?;
    let lead = w.leading().ok_or_else(|| Error::InvalidInput("the identity word has no image region".into()))?;
    let side = if lead.sign > 0 { Side::S } else { Side::R };
    Ok(RegionRef { generator: lead.generator, side })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordViolation {
    pub word: ReducedWord,
    pub point: usize,
    pub predicted: RegionRef,
    pub landed: Membership,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCheckReport {
    pub words: usize,
    pub points: usize,
    pub violation_count: usize,
    /// The first violations in word order.
    pub violations: Vec<WordViolation>,
    /// Smallest, over nonidentity words, of the largest displacement on the
    /// sample; absent when there are no such words.
    pub min_displacement: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub least_moving_word: Option<ReducedWord>,
}

const MAX_LISTED_VIOLATIONS: usize = 100;

/// Maps every sample point through every nonidentity word and checks that it
/// lands in the predicted region.
pub fn check_words(
    s: &SchottkyData,
    words: &[ReducedWord],
    points: &[ProjPoint],
    tol: &Tolerances,
) -> Result<WordCheckReport> {
    for w in words {
        w.check_generators(s)?;
    }
    for p in points {
        p.check_dim(s.n())?;
    }
    let results: Vec<(Vec<WordViolation>, f64)> = words
        .par_iter()
        .filter(|w| !w.is_empty())
        .map(|w| -> Result<(Vec<WordViolation>, f64)> {
            let predicted = word_image_region(s, w)?;
            let region = s.region(predicted);
            let mut violations = Vec::new();
            let mut displacement = 0.0f64;
            for (i, p) in points.iter().enumerate() {
                let q = w.apply(s, p)?;
                displacement = displacement.max(q.fs_distance(p)?);
                if !region.contains(&q) {
                    let landed = fundamental_domain_membership(s, &q, tol);
                    violations.push(WordViolation { word: w.clone(), point: i, predicted, landed });
                }
            }
            Ok((violations, displacement))
        })
        .collect::<Result<_>>()?;

    let nonidentity: Vec<&ReducedWord> = words.iter().filter(|w| !w.is_empty()).collect();
    let mut violation_count = 0;
    let mut violations = Vec::new();
    let mut min_displacement: Option<f64> = None;
    let mut least_moving_word = None;
    for (w, (v, d)) in nonidentity.iter().zip(results) {
        violation_count += v.len();
        violations.extend(v.into_iter().take(MAX_LISTED_VIOLATIONS - violations.len().min(MAX_LISTED_VIOLATIONS)));
        if min_displacement.is_none_or(|m| d < m) {
            min_displacement = Some(d);
            least_moving_word = Some((*w).clone());
        }
    }
    Ok(WordCheckReport {
        words: nonidentity.len(),
        points: points.len(),
        violation_count,
        violations,
        min_displacement,
        least_moving_word,
    })
}
