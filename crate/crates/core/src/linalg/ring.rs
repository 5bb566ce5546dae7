use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Integer entries.
pub type Int = BigInt;
/// Rational entries, always kept in lowest terms with positive denominator.
pub type Rat = BigRational;

/// The two coefficient rings the library works over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RingKind {
    Z,
    Q,
}

impl Display for RingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RingKind::Z => write!(f, "Z"),
            RingKind::Q => write!(f, "Q"),
        }
    }
}

impl std::str::FromStr for RingKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Z" | "z" => Ok(RingKind::Z),
            "Q" | "q" => Ok(RingKind::Q),
            other => Err(format!("unknown ring '{other}', expected Z or Q")),
        }
    }
}

/// A Euclidean coefficient ring with exact arithmetic.
///
/// Implemented for [`Int`] and [`Rat`]. Over `Q` every nonzero element is a
/// unit and Euclidean division has zero remainder, so the same normal-form
/// algorithms produce reduced row echelon forms and rank decompositions.
pub trait Ring:
    Clone
    + PartialEq
    + Eq
    + Debug
    + Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const KIND: RingKind;

    fn is_unit(&self) -> bool;

    /// Size used for pivot selection; smaller is preferred.
    fn pivot_size(&self) -> BigInt;

    /// Euclidean division `self = q * d + r`, with `0 <= r < |d|` over `Z`
    /// and `r = 0` over `Q`. `d` must be nonzero.
    fn div_rem_euclid(&self, d: &Self) -> (Self, Self);

    /// `Some(self / d)` if `d` divides `self` in the ring.
    fn exact_div(&self, d: &Self) -> Option<Self>;

    /// A unit `u` with `u * self` the canonical associate (nonnegative over
    /// `Z`, one over `Q`). Returns one for zero.
    fn canonical_unit(&self) -> Self;

    /// Extended gcd: `(g, s, t)` with `s*a + t*b = g`, `g` a gcd of `a, b`.
    fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self);

    fn from_int(n: &BigInt) -> Self;
    fn from_i64(n: i64) -> Self {
        Self::from_int(&BigInt::from(n))
    }
    fn to_rat(&self) -> Rat;
    /// Inverse of [`Ring::to_rat`]; `None` if the rational is not in the ring.
    fn from_rat(q: &Rat) -> Option<Self>;
}

impl Ring for BigInt {
    const KIND: RingKind = RingKind::Z;

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }

    fn pivot_size(&self) -> BigInt {
        self.abs()
    }

    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        let (mut q, mut r) = self.div_mod_floor(d);
        if r.is_negative() {
            // only reachable for negative d
            r += d.abs();
            q += BigInt::one();
        }
        (q, r)
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return if self.is_zero() { Some(BigInt::zero()) } else { None };
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    fn canonical_unit(&self) -> Self {
        if self.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }

    fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let e = a.extended_gcd(b);
        (e.gcd, e.x, e.y)
    }

    fn from_int(n: &BigInt) -> Self {
        n.clone()
    }

    fn to_rat(&self) -> Rat {
        Rat::from_integer(self.clone())
    }

    fn from_rat(q: &Rat) -> Option<Self> {
        q.is_integer().then(|| q.to_integer())
    }
}

impl Ring for BigRational {
    const KIND: RingKind = RingKind::Q;

    fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    fn pivot_size(&self) -> BigInt {
        let n = self.numer().abs();
        let d = self.denom().clone();
        if n > d {
            n
        } else {
            d
        }
    }

    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        (self / d, Rat::zero())
    }

    fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return if self.is_zero() { Some(Rat::zero()) } else { None };
        }
        Some(self / d)
    }

    fn canonical_unit(&self) -> Self {
        if self.is_zero() {
            Rat::one()
        } else {
            self.recip()
        }
    }

    fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        if !a.is_zero() {
            (a.clone(), Rat::one(), Rat::zero())
        } else {
            (b.clone(), Rat::zero(), Rat::one())
        }
    }

    fn from_int(n: &BigInt) -> Self {
        Rat::from_integer(n.clone())
    }

    fn to_rat(&self) -> Rat {
        self.clone()
    }

    fn from_rat(q: &Rat) -> Option<Self> {
        Some(q.clone())
    }
}
