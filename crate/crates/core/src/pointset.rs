//! Bit-packed subsets of `F_q^n`.
//!
//! Bit `i` of the membership array is the point with index `i`. The hex form
//! is the big-endian rendering of the integer `sum 2^i` over members, padded
//! to `ceil(q^n / 4)` lowercase digits, so the last digit holds points 0..3.

use serde::{Deserialize, Serialize};

use crate::field::{make_field, FieldSpec};
use crate::geometry::{point_coords, point_index};
use crate::limits::space_size;
use crate::{Elem, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    q: u32,
    n: usize,
    size: usize,
    bits: Vec<u64>,
    cardinality: usize,
}

impl PointSet {
    pub fn empty(q: u32, n: usize) -> Result<PointSet> {
        let size = space_size(q, n)?;
        Ok(PointSet { q, n, size, bits: vec![0; size.div_ceil(64)], cardinality: 0 })
    }

    pub fn full(q: u32, n: usize) -> Result<PointSet> {
        let mut set = PointSet::empty(q, n)?;
        for w in set.bits.iter_mut() {
            *w = u64::MAX;
        }
        set.clear_tail();
        set.cardinality = set.size;
        Ok(set)
    }

    pub fn from_indices(q: u32, n: usize, indices: impl IntoIterator<Item = usize>) -> Result<PointSet> {
        let mut set = PointSet::empty(q, n)?;
        for i in indices {
            set.try_insert(i)?;
        }
        Ok(set)
    }

    /// Builds a set directly from packed words; bits past `q^n` must be clear.
    pub fn from_words(q: u32, n: usize, words: Vec<u64>) -> Result<PointSet> {
        let mut set = PointSet::empty(q, n)?;
        if words.len() != set.bits.len() {
            return Err(Error::Length { got: words.len(), expected: set.bits.len() });
        }
        set.bits = words;
        let before: usize = set.bits.iter().map(|w| w.count_ones() as usize).sum();
        set.clear_tail();
        set.cardinality = set.bits.iter().map(|w| w.count_ones() as usize).sum();
        if before != set.cardinality {
            return Err(Error::PointOutOfRange { index: set.size as u64, size: set.size as u64 });
        }
        Ok(set)
    }

    fn clear_tail(&mut self) {
        let rem = self.size % 64;
        if rem != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points of the ambient space, `q^n`.
    pub fn universe_size(&self) -> usize {
        self.size
    }

    /// Cardinality of the set.
    pub fn len(&self) -> usize {
        self.cardinality
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, index: usize) -> bool {
        index < self.size && self.bits[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn contains_coords(&self, coords: &[Elem]) -> bool {
        coords.len() == self.n && coords.iter().all(|&c| c < self.q) && self.contains(point_index(self.q, coords))
    }

    /// Inserts a point; returns whether it was newly added. Panics when out of range.
    pub fn insert(&mut self, index: usize) -> bool {
        assert!(index < self.size, "point index {index} out of range");
        let mask = 1u64 << (index % 64);
        let word = &mut self.bits[index / 64];
        let fresh = *word & mask == 0;
        *word |= mask;
        self.cardinality += fresh as usize;
        fresh
    }

    pub fn try_insert(&mut self, index: usize) -> Result<bool> {
        if index >= self.size {
            return Err(Error::PointOutOfRange { index: index as u64, size: self.size as u64 });
        }
        Ok(self.insert(index))
    }

    pub fn remove(&mut self, index: usize) -> bool {
        if index >= self.size {
            return false;
        }
        let mask = 1u64 << (index % 64);
        let word = &mut self.bits[index / 64];
        let present = *word & mask != 0;
        *word &= !mask;
        self.cardinality -= present as usize;
        present
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    fn same_space(&self, other: &PointSet) {
        assert_eq!((self.q, self.n), (other.q, other.n), "point sets over different spaces");
    }

    fn zip_with(&self, other: &PointSet, op: impl Fn(u64, u64) -> u64) -> PointSet {
        self.same_space(other);
        let bits: Vec<u64> = self.bits.iter().zip(&other.bits).map(|(&a, &b)| op(a, b)).collect();
        let cardinality = bits.iter().map(|w| w.count_ones() as usize).sum();
        PointSet { q: self.q, n: self.n, size: self.size, bits, cardinality }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.same_space(other);
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0)
    }

    pub fn coordinate_list(&self) -> Vec<Vec<Elem>> {
        self.iter().map(|i| point_coords(self.q, self.n, i)).collect()
    }

    pub fn hex_len(&self) -> usize {
        self.size.div_ceil(4)
    }

    pub fn to_hex(&self) -> String {
        let digits = self.hex_len();
        (0..digits)
            .rev()
            .map(|j| {
                let bit = 4 * j;
                let nibble = (self.bits[bit / 64] >> (bit % 64)) & 0xf;
                char::from_digit(nibble as u32, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(q: u32, n: usize, hex: &str) -> Result<PointSet> {
        let mut set = PointSet::empty(q, n)?;
        let digits = set.hex_len();
        if hex.len() != digits {
            return Err(Error::Format(format!("bits_hex has {} digits, expected {}", hex.len(), digits)));
        }
        for (pos, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .filter(|_| !ch.is_ascii_uppercase())
                .ok_or_else(|| Error::Format(format!("invalid hex digit {ch:?}")))? as usize;
            let j = digits - 1 - pos;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let index = 4 * j + b;
                    if index >= set.size {
                        return Err(Error::Format(format!("bit {index} set beyond q^n = {}", set.size)));
                    }
                    set.insert(index);
                }
            }
        }
        Ok(set)
    }

    pub fn to_file(&self, field: &FieldSpec, with_points: bool) -> PointSetFile {
        assert_eq!(field.q(), self.q);
        PointSetFile {
            q: self.q,
            p: field.p(),
            k: field.k(),
            n: self.n,
            bits_hex: self.to_hex(),
            points: with_points.then(|| self.coordinate_list()),
        }
    }
}

/// On-disk JSON form of a point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub q: u32,
    pub p: u32,
    pub k: u32,
    pub n: usize,
    pub bits_hex: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<Elem>>>,
}

impl PointSetFile {
    pub fn from_json(text: &str) -> Result<PointSetFile> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("point-set file serializes")
    }

    /// Validates the file and returns the field and the decoded set.
    pub fn decode(&self) -> Result<(FieldSpec, PointSet)> {
        let field = make_field(self.p, self.k)?;
        if field.q() != self.q {
            return Err(Error::Format(format!("q = {} but p^k = {}", self.q, field.q())));
        }
        if self.n < 1 {
            return Err(Error::Dimension { n: self.n, min: 1 });
        }
        let set = PointSet::from_hex(self.q, self.n, &self.bits_hex)?;
        if let Some(points) = &self.points {
            let mut listed = PointSet::empty(self.q, self.n)?;
            for coords in points {
                if coords.len() != self.n || coords.iter().any(|&c| c >= self.q) {
                    return Err(Error::Format(format!("invalid point {coords:?}")));
                }
                listed.insert(point_index(self.q, coords));
            }
            if listed != set {
                return Err(Error::Format("points and bits_hex disagree".into()));
            }
        }
        Ok((field, set))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_membership() {
        let mut s = PointSet::empty(3, 2).unwrap();
        assert!(s.is_empty());
        assert!(s.insert(4));
        assert!(!s.insert(4));
        assert!(s.contains(4));
        assert!(s.contains_coords(&[1, 1]));
        assert_eq!(s.len(), 1);
        assert!(s.remove(4));
        assert!(!s.remove(4));
        assert_eq!(s.len(), 0);
        assert!(s.try_insert(9).is_err());
        assert_eq!(PointSet::full(3, 2).unwrap().len(), 9);
    }

    #[test]
    fn hex_layout() {
        let s = PointSet::from_indices(2, 3, [0, 5]).unwrap();
        assert_eq!(s.to_hex(), "21");
        let s = PointSet::from_indices(3, 2, [8]).unwrap();
        // 9 points -> 3 hex digits.
        assert_eq!(s.to_hex(), "100");
        assert_eq!(PointSet::full(3, 2).unwrap().to_hex(), "1ff");
        assert!(PointSet::from_hex(3, 2, "2ff").is_err());
        assert!(PointSet::from_hex(3, 2, "ff").is_err());
        assert!(PointSet::from_hex(3, 2, "1FF").is_err());
    }

    #[test]
    fn file_validation() {
        let field = make_field(2, 1).unwrap();
        let s = PointSet::from_indices(2, 3, [1, 2, 7]).unwrap();
        let file = s.to_file(&field, true);
        let back = PointSetFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back.decode().unwrap().1, s);

        let mut bad = file.clone();
        bad.points = Some(vec![vec![1, 0, 0]]);
        assert!(bad.decode().is_err());
        let mut bad = file.clone();
        bad.q = 4;
        assert!(bad.decode().is_err());
        let mut bad = file;
        bad.bits_hex.push('0');
        assert!(bad.decode().is_err());
    }

    proptest! {
        #[test]
        fn hex_roundtrip(q in prop::sample::select(vec![2u32, 3, 4, 5, 7]), n in 1usize..4, seed in any::<u64>()) {
            let size = (q as usize).pow(n as u32);
            let members = (0..size).filter(|i| (seed.rotate_left(*i as u32 % 64) ^ (*i as u64 * 0x9e37)) & 1 == 1);
            let s = PointSet::from_indices(q, n, members).unwrap();
            prop_assert_eq!(s.hex_len(), size.div_ceil(4));
            let back = PointSet::from_hex(q, n, &s.to_hex()).unwrap();
            prop_assert_eq!(back.iter().count(), s.len());
            prop_assert_eq!(back, s);
        }
    }
}
