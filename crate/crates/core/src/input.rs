//! Read-only input arrays with access and comparison instrumentation.
//!
//! Elements are 64-bit signed integers addressed by 1-based index. Every
//! element access bumps the `reads` counter and every order test between
//! two elements bumps the `comparisons` counter, so an algorithm's probe
//! and comparison counts can be asserted exactly. Duplicate values are
//! allowed; ties are broken by index, which makes the induced order a
//! strict total order.

use std::cell::Cell;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An element together with its 1-based position. Ordering is
/// lexicographic on `(value, index)`, so distinct positions never
/// compare equal even when the values do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderedKey {
    pub value: i64,
    pub index: usize,
}

impl OrderedKey {
    #[inline]
    fn tuple(&self) -> (i64, usize) {
        (self.value, self.index)
    }
}

/// Immutable element sequence with monotone access/comparison counters.
///
/// The contents are shared and never change after construction. Counters
/// are per-handle and non-atomic: one handle belongs to one selection run
/// on one thread. Use [`ReadOnlyArray::share`] to run several queries
/// against the same data concurrently, each with fresh counters.
#[derive(Debug)]
pub struct ReadOnlyArray {
    data: Arc<[i64]>,
    reads: Cell<u64>,
    comparisons: Cell<u64>,
}

impl ReadOnlyArray {
    pub fn from_values(values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(ReadOnlyArray {
            data: values.into(),
            reads: Cell::new(0),
            comparisons: Cell::new(0),
        })
    }

    /// New handle onto the same elements with counters reset to zero.
    pub fn share(&self) -> ReadOnlyArray {
        ReadOnlyArray {
            data: Arc::clone(&self.data),
            reads: Cell::new(0),
            comparisons: Cell::new(0),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // construction rejects empty inputs
    }

    /// Element at 1-based index `i`. Counts one read.
    ///
    /// Panics if `i` is out of range.
    #[inline]
    pub fn get(&self, i: usize) -> OrderedKey {
        assert!(
            i >= 1 && i <= self.data.len(),
            "index {i} out of bounds (N={})",
            self.data.len()
        );
        self.reads.set(self.reads.get() + 1);
        OrderedKey {
            value: self.data[i - 1],
            index: i,
        }
    }

    /// Order test between the elements at positions `i` and `j` in the
    /// tie-broken order. Counts two reads and one comparison.
    #[inline]
    pub fn less(&self, i: usize, j: usize) -> bool {
        let a = self.get(i);
        let b = self.get(j);
        self.key_less(&a, &b)
    }

    /// Order test between two already-fetched keys. Counts one comparison
    /// and no reads.
    #[inline]
    pub fn key_less(&self, a: &OrderedKey, b: &OrderedKey) -> bool {
        self.comparisons.set(self.comparisons.get() + 1);
        a.tuple() < b.tuple()
    }

    #[inline]
    pub fn reads(&self) -> u64 {
        self.reads.get()
    }

    #[inline]
    pub fn comparisons(&self) -> u64 {
        self.comparisons.get()
    }

    pub fn reset_counters(&self) {
        self.reads.set(0);
        self.comparisons.set(0);
    }

    /// Uninstrumented view of the elements. For verification tooling
    /// (sorting oracle, file writers); algorithm code must go through
    /// [`ReadOnlyArray::get`].
    pub fn values(&self) -> &[i64] {
        &self.data
    }
}

/// Distribution for generated inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// A uniformly random permutation of 1..=N.
    UniformPermutation,
    /// 1, 2, ..., N.
    Sorted,
    /// N, N-1, ..., 1.
    ReverseSorted,
    /// Values drawn from a handful of distinct values; exercises the
    /// index tie-break.
    FewDistinct,
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random-permutation" | "permutation" | "perm" | "uniform" => {
                Ok(Distribution::UniformPermutation)
            }
            "sorted" => Ok(Distribution::Sorted),
            "reverse-sorted" | "reverse" => Ok(Distribution::ReverseSorted),
            "few-distinct" | "few" => Ok(Distribution::FewDistinct),
            other => Err(Error::Parameter(format!(
                "unknown distribution {other:?} (expected uniform-random-permutation, sorted, reverse-sorted or few-distinct)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub count: usize,
    pub seed: u64,
    pub distribution: Distribution,
}

impl GeneratorSpec {
    pub fn new(count: usize, seed: u64, distribution: Distribution) -> Self {
        GeneratorSpec {
            count,
            seed,
            distribution,
        }
    }

    /// Parses the CLI form `N:seed=X[,dist=D]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parameter(format!("invalid generator spec {spec:?}: {msg}"));
        let (count_str, rest) = match spec.split_once(':') {
            Some((c, r)) => (c, Some(r)),
            None => (spec, None),
        };
        let count: usize = count_str
            .parse()
            .map_err(|_| bad("count must be an integer"))?;
        let mut seed = 1u64;
        let mut distribution = Distribution::UniformPermutation;
        if let Some(rest) = rest {
            for part in rest.split(',') {
                match part.split_once('=') {
                    Some(("seed", v)) => {
                        seed = v.parse().map_err(|_| bad("seed must be an integer"))?;
                    }
                    Some(("dist", v)) => {
                        distribution = v.parse()?;
                    }
                    _ => return Err(bad("expected seed=X or dist=D")),
                }
            }
        }
        Ok(GeneratorSpec {
            count,
            seed,
            distribution,
        })
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<ReadOnlyArray> {
    if spec.count == 0 {
        return Err(Error::EmptyInput);
    }
    let n = spec.count;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values: Vec<i64> = match spec.distribution {
        Distribution::UniformPermutation => {
            let mut v: Vec<i64> = (1..=n as i64).collect();
            v.shuffle(&mut rng);
            v
        }
        Distribution::Sorted => (1..=n as i64).collect(),
        Distribution::ReverseSorted => (1..=n as i64).rev().collect(),
        Distribution::FewDistinct => {
            let domain = usize::min(8, n) as i64;
            (0..n).map(|_| rng.gen_range(1..=domain)).collect()
        }
    };
    ReadOnlyArray::from_values(values)
}

/// Text format: ASCII decimal integers, one per line, optional trailing
/// newline.
pub fn load_text(path: &Path) -> Result<ReadOnlyArray> {
    let content = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let v: i64 = token.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            token: token.to_string(),
        })?;
        values.push(v);
    }
    ReadOnlyArray::from_values(values)
}

/// Binary format: N consecutive little-endian 64-bit two's-complement
/// integers, no header.
pub fn load_binary(path: &Path) -> Result<ReadOnlyArray> {
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Io(format!(
            "binary input length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    let values: Vec<i64> = bytes
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ReadOnlyArray::from_values(values)
}

/// Writes the binary format read back by [`load_binary`].
pub fn write_binary(path: &Path, values: &[i64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub enum InputSource {
    Text(PathBuf),
    Binary(PathBuf),
    Generator(GeneratorSpec),
}

pub fn load(source: &InputSource) -> Result<ReadOnlyArray> {
    match source {
        InputSource::Text(p) => load_text(p),
        InputSource::Binary(p) => load_binary(p),
        InputSource::Generator(spec) => generate(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn get_returns_value_and_index() {
        let a = ReadOnlyArray::from_values(vec![3, 1, 4]).unwrap();
        assert_eq!(a.get(2), OrderedKey { value: 1, index: 2 });
        assert_eq!(a.get(1), OrderedKey { value: 3, index: 1 });
    }

    #[test]
    fn reads_count_every_access() {
        let a = ReadOnlyArray::from_values(vec![3, 1, 4]).unwrap();
        a.get(1);
        a.get(1);
        assert_eq!(a.reads(), 2);
        assert_eq!(a.comparisons(), 0);
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn get_out_of_range_panics() {
        let a = ReadOnlyArray::from_values(vec![3, 1, 4]).unwrap();
        a.get(4);
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn get_zero_panics() {
        let a = ReadOnlyArray::from_values(vec![3, 1, 4]).unwrap();
        a.get(0);
    }

    #[test]
    fn less_breaks_ties_by_index() {
        let a = ReadOnlyArray::from_values(vec![5, 5]).unwrap();
        assert!(a.less(1, 2));
        assert!(!a.less(2, 1));
        assert_eq!(a.comparisons(), 2);
        assert_eq!(a.reads(), 4);
    }

    #[test]
    fn less_on_distinct_values() {
        let a = ReadOnlyArray::from_values(vec![3, 1]).unwrap();
        assert!(!a.less(1, 2));
        assert!(a.less(2, 1));
    }

    #[test]
    fn induced_order_is_strict_total_order() {
        // Exhaustive check on all triples of a duplicate-heavy array.
        let spec = GeneratorSpec::new(30, 11, Distribution::FewDistinct);
        let a = generate(&spec).unwrap();
        let n = a.len();
        for i in 1..=n {
            assert!(!a.less(i, i), "irreflexivity failed at {i}");
            for j in 1..=n {
                if i != j {
                    assert!(
                        a.less(i, j) != a.less(j, i),
                        "antisymmetry/totality failed at ({i},{j})"
                    );
                }
                for k in 1..=n {
                    if a.less(i, j) && a.less(j, k) {
                        assert!(a.less(i, k), "transitivity failed at ({i},{j},{k})");
                    }
                }
            }
        }
    }

    #[test]
    fn counters_are_monotone() {
        let a = ReadOnlyArray::from_values(vec![2, 7, 1, 8]).unwrap();
        let mut last_reads = 0;
        let mut last_cmps = 0;
        for i in 1..=4 {
            for j in 1..=4 {
                a.less(i, j);
                assert!(a.reads() >= last_reads && a.comparisons() >= last_cmps);
                last_reads = a.reads();
                last_cmps = a.comparisons();
            }
        }
    }

    #[test]
    fn share_resets_counters_and_keeps_data() {
        let a = ReadOnlyArray::from_values(vec![9, 2]).unwrap();
        a.get(1);
        let b = a.share();
        assert_eq!(b.reads(), 0);
        assert_eq!(b.get(1).value, 9);
        assert_eq!(a.reads(), 1);
    }

    #[test]
    fn generator_permutation_property() {
        let spec = GeneratorSpec::new(5, 7, Distribution::UniformPermutation);
        let a = generate(&spec).unwrap();
        let mut sorted = a.values().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = GeneratorSpec::new(100, 42, Distribution::UniformPermutation);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn generator_empty_rejected() {
        let spec = GeneratorSpec::new(0, 7, Distribution::Sorted);
        assert_eq!(generate(&spec).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn spec_parsing() {
        let s = GeneratorSpec::parse("1000:seed=7").unwrap();
        assert_eq!(s.count, 1000);
        assert_eq!(s.seed, 7);
        assert_eq!(s.distribution, Distribution::UniformPermutation);
        let s = GeneratorSpec::parse("64:seed=3,dist=few-distinct").unwrap();
        assert_eq!(s.distribution, Distribution::FewDistinct);
        assert!(GeneratorSpec::parse("x:seed=1").is_err());
        assert!(GeneratorSpec::parse("10:sd=1").is_err());
    }

    #[test]
    fn text_load_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.txt");
        std::fs::write(&good, "3\n1\n4\n").unwrap();
        let a = load_text(&good).unwrap();
        assert_eq!(a.values(), &[3, 1, 4]);

        let empty = dir.path().join("empty.txt");
        std::fs::write(&empty, "").unwrap();
        assert_eq!(load_text(&empty).unwrap_err(), Error::EmptyInput);

        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "3\nx7\n4\n").unwrap();
        match load_text(&bad).unwrap_err() {
            Error::Parse { line, token } => {
                assert_eq!(line, 2);
                assert_eq!(token, "x7");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn binary_round_trip() {
        // Write-then-read oracle for the binary format.
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.bin");
        let values = vec![i64::MIN, -1, 0, 1, 42, i64::MAX];
        write_binary(&path, &values).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 8 * 6);
        let a = load_binary(&path).unwrap();
        assert_eq!(a.values(), values.as_slice());
    }

    #[test]
    fn binary_bad_length_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ragged.bin");
        std::fs::write(&path, [1, 2, 3]).unwrap();
        assert!(matches!(load_binary(&path).unwrap_err(), Error::Io(_)));
    }
}
