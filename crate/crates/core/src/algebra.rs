//! Algebraic structures the kernels are generic over.
//!
//! Every comparison between edges goes through `(weight, key)` lexicographic
//! order, so duplicate input weights still produce a unique forest.

use std::cmp::Ordering;
use std::fmt;
use std::marker::PhantomData;
use std::ops::Add;

use serde::{Serialize, Serializer};

/// Edge weight: a non-NaN `f64` whose top element is `+∞`.
///
/// `-∞` and NaN are rejected at construction and `-0.0` is normalised to
/// `0.0`, so equality and ordering agree with `f64::total_cmp`.
#[derive(Clone, Copy, Debug)]
pub struct Weight(f64);

impl Weight {
    pub const INFINITY: Weight = Weight(f64::INFINITY);
    pub const ZERO: Weight = Weight(0.0);

    pub fn new(value: f64) -> Option<Weight> {
        if value.is_nan() || value == f64::NEG_INFINITY {
            None
        } else {
            Some(Weight(value + 0.0))
        }
    }

    /// Panics on NaN or `-∞`; meant for literals.
    pub fn of(value: f64) -> Weight {
        Weight::new(value).unwrap_or_else(|| panic!("invalid weight {value}"))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Weight {}

impl Default for Weight {
    fn default() -> Self {
        Weight::ZERO
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for Weight {
    type Output = Weight;

    /// `∞` absorbs; two finite operands can overflow to `±∞` but never NaN.
    fn add(self, rhs: Weight) -> Weight {
        if self.0 == f64::INFINITY || rhs.0 == f64::INFINITY {
            Weight::INFINITY
        } else {
            Weight(self.0 + rhs.0)
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_finite() {
            serializer.serialize_f64(self.0)
        } else {
            serializer.serialize_str("inf")
        }
    }
}

/// Canonical name of an undirected edge `{lo, hi}` with `lo <= hi`.
///
/// Vertex ids are 0-based in memory; `Display` prints them 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    lo: usize,
    hi: usize,
}

impl EdgeKey {
    pub fn new(u: usize, v: usize) -> EdgeKey {
        if u <= v {
            EdgeKey { lo: u, hi: v }
        } else {
            EdgeKey { lo: v, hi: u }
        }
    }

    #[inline]
    pub fn lo(self) -> usize {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> usize {
        self.hi
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo + 1, self.hi + 1)
    }
}

/// A stored matrix entry `a_ij`: the edge weight plus its tie-break key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixEntry {
    pub weight: Weight,
    pub key: EdgeKey,
}

/// Element of the EDGE monoid: a candidate hook `(weight, key, parent)`.
///
/// The identity `(∞, -, -)` is the only entry without a parent. Ordering is
/// lexicographic on `(weight, key, parent)` with a missing key or parent
/// sorting last, which makes the identity the greatest element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeEntry {
    pub weight: Weight,
    pub key: Option<EdgeKey>,
    pub parent: Option<usize>,
}

impl std::hash::Hash for Weight {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

fn cmp_none_last<T: Ord>(a: &Option<T>, b: &Option<T>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.cmp(y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

impl EdgeEntry {
    pub const IDENTITY: EdgeEntry = EdgeEntry {
        weight: Weight::INFINITY,
        key: None,
        parent: None,
    };

    pub fn new(weight: Weight, key: EdgeKey, parent: usize) -> EdgeEntry {
        EdgeEntry {
            weight,
            key: Some(key),
            parent: Some(parent),
        }
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.parent.is_none()
    }
}

impl Default for EdgeEntry {
    fn default() -> Self {
        EdgeEntry::IDENTITY
    }
}

impl PartialOrd for EdgeEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .cmp(&other.weight)
            .then_with(|| cmp_none_last(&self.key, &other.key))
            .then_with(|| cmp_none_last(&self.parent, &other.parent))
    }
}

impl fmt::Display for EdgeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.key, self.parent) {
            (Some(k), Some(p)) => write!(f, "({}, {}, {})", self.weight, k, p + 1),
            (None, Some(p)) => write!(f, "({}, -, {})", self.weight, p + 1),
            _ => write!(f, "({}, 0)", self.weight),
        }
    }
}

/// Commutative monoid used by every reduction kernel.
pub trait Monoid {
    type Elem: Clone;

    fn identity(&self) -> Self::Elem;

    fn combine(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// A semiring `(S, ⊕, ⊗)`; `⊕` must be commutative.
pub trait Semiring {
    type Elem: Clone;

    /// Additive identity, which also annihilates under `⊗`.
    fn zero(&self) -> Self::Elem;

    fn one(&self) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// The additive monoid of a semiring.
#[derive(Clone, Copy, Debug)]
pub struct Additive<'a, S>(pub &'a S);

impl<S: Semiring> Monoid for Additive<'_, S> {
    type Elem = S::Elem;

    fn identity(&self) -> S::Elem {
        self.0.zero()
    }

    fn combine(&self, a: &S::Elem, b: &S::Elem) -> S::Elem {
        self.0.add(a, b)
    }
}

/// `(EDGE, MinWeight)`: keeps the lighter edge under the strict entry order.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinWeight;

/// Free-function form of the `MinWeight` combine.
pub fn min_weight(a: EdgeEntry, b: EdgeEntry) -> EdgeEntry {
    if b < a {
        b
    } else {
        a
    }
}

impl Monoid for MinWeight {
    type Elem = EdgeEntry;

    fn identity(&self) -> EdgeEntry {
        EdgeEntry::IDENTITY
    }

    #[inline]
    fn combine(&self, a: &EdgeEntry, b: &EdgeEntry) -> EdgeEntry {
        min_weight(*a, *b)
    }
}

/// Minimum over optional vertex ids; `None` is the identity.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinVertex;

impl Monoid for MinVertex {
    type Elem = Option<usize>;

    fn identity(&self) -> Option<usize> {
        None
    }

    #[inline]
    fn combine(&self, a: &Option<usize>, b: &Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(*x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(*x),
            (None, None) => None,
        }
    }
}

/// The `(min, +)` semiring over [`Weight`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Tropical;

pub fn tropical() -> Tropical {
    Tropical
}

impl Semiring for Tropical {
    type Elem = Weight;

    fn zero(&self) -> Weight {
        Weight::INFINITY
    }

    fn one(&self) -> Weight {
        Weight::ZERO
    }

    #[inline]
    fn add(&self, a: &Weight, b: &Weight) -> Weight {
        *a.min(b)
    }

    #[inline]
    fn mul(&self, a: &Weight, b: &Weight) -> Weight {
        *a + *b
    }
}

/// A three-operand function `f(x_i, a_ij, y_j)` evaluated per stored entry.
///
/// Implementations must be pure.
pub trait MultilinearFn<X, Y> {
    type Output;

    fn apply(&self, x: &X, a: &MatrixEntry, y: &Y) -> Self::Output;
}

/// `f(p_i, a_ij, p_j) = (a_ij, key(i,j), p_j)` if `p_i != p_j`, else identity.
#[derive(Clone, Copy, Debug, Default)]
pub struct OutgoingEdge;

pub fn outgoing_edge_fn() -> OutgoingEdge {
    OutgoingEdge
}

impl MultilinearFn<usize, usize> for OutgoingEdge {
    type Output = EdgeEntry;

    #[inline]
    fn apply(&self, p_i: &usize, a: &MatrixEntry, p_j: &usize) -> EdgeEntry {
        if p_i != p_j {
            EdgeEntry::new(a.weight, a.key, *p_j)
        } else {
            EdgeEntry::IDENTITY
        }
    }
}

/// Adapts a closure into a [`MultilinearFn`].
pub struct FnMultilinear<F, O> {
    f: F,
    _out: PhantomData<fn() -> O>,
}

pub fn multilinear_fn<X, Y, O, F>(f: F) -> FnMultilinear<F, O>
where
    F: Fn(&X, &MatrixEntry, &Y) -> O,
{
    FnMultilinear {
        f,
        _out: PhantomData,
    }
}

impl<X, Y, O, F> MultilinearFn<X, Y> for FnMultilinear<F, O>
where
    F: Fn(&X, &MatrixEntry, &Y) -> O,
{
    type Output = O;

    #[inline]
    fn apply(&self, x: &X, a: &MatrixEntry, y: &Y) -> O {
        (self.f)(x, a, y)
    }
}
