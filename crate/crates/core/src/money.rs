use core::fmt;
use core::ops::{Add, AddAssign, Mul, Sub};

/// Currency amount in integer cents.
///
/// Every amount that crosses a ledger boundary (bids, reserves, payments)
/// is held as `Money`, so clearing and accounting are exact. Formulas work in
/// `f64` and convert at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(pub i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_cents(cents: i64) -> Self {
        Money(cents)
    }

    pub const fn cents(self) -> i64 {
        self.0
    }

    /// Round half away from zero to the nearest cent.
    pub fn from_f64_round(value: f64) -> Self {
        Money(libm::round(value * 100.0) as i64)
    }

    /// Round down to the cent. Used for reserves: the buyer never commits more
    /// than it computed.
    pub fn from_f64_floor(value: f64) -> Self {
        Money(libm::floor(value * 100.0 + 1e-9) as i64)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Mul<i64> for Money {
    type Output = Money;
    fn mul(self, rhs: i64) -> Money {
        Money(self.0 * rhs)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{}{}.{:02}", sign, abs / 100, abs % 100)
    }
}

impl core::str::FromStr for Money {
    type Err = ();

    /// Parses the `Display` form (`-12.05`, `3.00`).
    fn from_str(s: &str) -> Result<Self, ()> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (whole, frac) = body.split_once('.').ok_or(())?;
        if frac.len() != 2 {
            return Err(());
        }
        let whole: i64 = whole.parse().map_err(|_| ())?;
        let frac: i64 = frac.parse().map_err(|_| ())?;
        let cents = whole * 100 + frac;
        Ok(Money(if neg { -cents } else { cents }))
    }
}
