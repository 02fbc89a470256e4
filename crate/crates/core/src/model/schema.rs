use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of attributes a schema may hold; subsets are `u64` bitmasks.
pub const MAX_ATTRIBUTES: usize = 64;

/// A discretized personal attribute that may be revealed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: String,
    pub cardinality: usize,
    pub bits: u32,
    /// Subjective sharing cost `s(a)`, in bits once calibrated.
    pub sensitivity: f64,
}

impl AttributeDef {
    /// Attribute with the minimal bit width for `cardinality` and zero sensitivity.
    pub fn new(name: impl Into<String>, cardinality: usize) -> Self {
        AttributeDef {
            name: name.into(),
            cardinality,
            bits: min_bits(cardinality),
            sensitivity: 0.0,
        }
    }

    pub fn with_bits(mut self, bits: u32) -> Self {
        self.bits = bits;
        self
    }

    pub fn with_sensitivity(mut self, sensitivity: f64) -> Self {
        self.sensitivity = sensitivity;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Schema("attribute name is empty".into()));
        }
        if self.cardinality < 2 {
            return Err(Error::Schema(format!(
                "attribute `{}` has cardinality {} (< 2)",
                self.name, self.cardinality
            )));
        }
        if self.bits < min_bits(self.cardinality) {
            return Err(Error::Schema(format!(
                "attribute `{}` needs at least {} bits for {} values, got {}",
                self.name,
                min_bits(self.cardinality),
                self.cardinality,
                self.bits
            )));
        }
        if !(self.sensitivity >= 0.0) || !self.sensitivity.is_finite() {
            return Err(Error::Schema(format!(
                "attribute `{}` has invalid sensitivity {}",
                self.name, self.sensitivity
            )));
        }
        Ok(())
    }
}

/// `ceil(log2(cardinality))`, at least 1.
pub fn min_bits(cardinality: usize) -> u32 {
    let mut bits = 1;
    while (1usize << bits) < cardinality {
        bits += 1;
    }
    bits
}

/// Ordered attribute universe. Schema order is the tie-break order for every optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSchema {
    attributes: Vec<AttributeDef>,
    index: HashMap<String, usize>,
    strides: Vec<u64>,
}

impl AttributeSchema {
    pub fn new(attributes: Vec<AttributeDef>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::Schema("schema has no attributes".into()));
        }
        if attributes.len() > MAX_ATTRIBUTES {
            return Err(Error::Schema(format!(
                "{} attributes exceed the maximum of {MAX_ATTRIBUTES}",
                attributes.len()
            )));
        }
        let mut index = HashMap::with_capacity(attributes.len());
        for (i, attr) in attributes.iter().enumerate() {
            attr.validate()?;
            if matches!(attr.name.as_str(), "user" | "query" | "intent") {
                return Err(Error::Schema(format!("attribute name `{}` is reserved", attr.name)));
            }
            if index.insert(attr.name.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate attribute `{}`", attr.name)));
            }
        }
        // mixed-radix strides; the full tuple code must fit in a u64
        let mut strides = Vec::with_capacity(attributes.len());
        let mut stride: u128 = 1;
        for attr in &attributes {
            strides.push(stride as u64);
            stride *= attr.cardinality as u128;
            if stride > u64::MAX as u128 {
                return Err(Error::Schema(
                    "product of attribute domain sizes does not fit in 64 bits".into(),
                ));
            }
        }
        Ok(AttributeSchema {
            attributes,
            index,
            strides,
        })
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attributes(&self) -> &[AttributeDef] {
        &self.attributes
    }

    pub fn attribute(&self, i: usize) -> &AttributeDef {
        &self.attributes[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.attributes.iter().map(|a| a.cardinality).collect()
    }

    pub fn sensitivities(&self) -> Vec<f64> {
        self.attributes.iter().map(|a| a.sensitivity).collect()
    }

    /// Mixed-radix stride of attribute `i` in the full tuple code.
    pub fn stride(&self, i: usize) -> u64 {
        self.strides[i]
    }

    /// Number of joint outcomes of the attributes in `set`.
    pub fn pattern_count(&self, set: AttrSet) -> u128 {
        set.iter()
            .map(|i| self.attributes[i].cardinality as u128)
            .product()
    }

    pub fn full_set(&self) -> AttrSet {
        AttrSet::full(self.len())
    }

    /// Encodes a full attribute vector as a single mixed-radix code.
    pub fn tuple_code(&self, values: &[u32]) -> u64 {
        values
            .iter()
            .zip(&self.strides)
            .map(|(&v, &s)| v as u64 * s)
            .sum()
    }

    pub fn decode_tuple(&self, code: u64) -> Vec<u32> {
        self.attributes
            .iter()
            .zip(&self.strides)
            .map(|(a, &s)| ((code / s) % a.cardinality as u64) as u32)
            .collect()
    }

    /// Parses a list of attribute names into a subset.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<AttrSet> {
        let mut set = AttrSet::empty();
        for name in names {
            let name = name.as_ref();
            let i = self
                .position(name)
                .ok_or_else(|| Error::UnknownAttribute(name.to_string()))?;
            set.insert(i);
        }
        Ok(set)
    }

    /// Parses `"A+B"` or `"A,B"`; the empty string is the empty set.
    pub fn parse_subset(&self, text: &str) -> Result<AttrSet> {
        let names: Vec<&str> = text
            .split(|c| c == '+' || c == ',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        self.subset(&names)
    }

    pub fn names(&self, set: AttrSet) -> Vec<String> {
        set.iter().map(|i| self.attributes[i].name.clone()).collect()
    }

    /// `'+'`-joined names in schema order.
    pub fn join_names(&self, set: AttrSet) -> String {
        self.names(set).join("+")
    }

    pub fn contains_set(&self, set: AttrSet) -> bool {
        set.is_subset_of(self.full_set())
    }

    /// Copy of this schema with sensitivities replaced.
    pub fn with_sensitivities(&self, sensitivities: &[f64]) -> Result<Self> {
        if sensitivities.len() != self.len() {
            return Err(Error::Schema(format!(
                "expected {} sensitivities, got {}",
                self.len(),
                sensitivities.len()
            )));
        }
        let attributes = self
            .attributes
            .iter()
            .zip(sensitivities)
            .map(|(a, &s)| a.clone().with_sensitivity(s))
            .collect();
        AttributeSchema::new(attributes)
    }
}

/// A subset of schema attributes, stored as a bitmask over schema positions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttrSet(u64);

impl AttrSet {
    pub const fn empty() -> Self {
        AttrSet(0)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            AttrSet(u64::MAX)
        } else {
            AttrSet((1u64 << n) - 1)
        }
    }

    pub const fn from_bits(bits: u64) -> Self {
        AttrSet(bits)
    }

    pub fn singleton(i: usize) -> Self {
        AttrSet(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(AttrSet::empty(), |s, i| s.with(i))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    pub fn with(self, i: usize) -> Self {
        AttrSet(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Self {
        AttrSet(self.0 & !(1u64 << i))
    }

    pub fn union(self, other: Self) -> Self {
        AttrSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        AttrSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        AttrSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Indices in ascending (schema) order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = AttrSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(AttrSet(cur))
        })
    }

    /// Canonical order: smaller cardinality first, then lexicographic on sorted indices.
    pub fn canonical_cmp(self, other: Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {
                let diff = self.0 ^ other.0;
                if diff == 0 {
                    Ordering::Equal
                } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            ord => ord,
        }
    }
}

impl fmt::Debug for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for AttrSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        AttrSet::from_indices(iter)
    }
}
