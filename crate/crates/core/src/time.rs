use core::fmt;
use core::ops::{Add, Sub};

/// Simulated time in integer microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    const PER_SECOND: u64 = 1_000_000;

    pub fn from_secs(secs: u64) -> Self {
        SimTime(secs * Self::PER_SECOND)
    }

    /// Rounds to the nearest microsecond; negative input clamps to zero.
    pub fn from_secs_f64(secs: f64) -> Self {
        if secs <= 0.0 {
            return SimTime::ZERO;
        }
        SimTime(libm::round(secs * Self::PER_SECOND as f64) as u64)
    }

    pub fn micros(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / Self::PER_SECOND as f64
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

/// Seconds with six fixed decimals, exact for every representable value.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / Self::PER_SECOND, self.0 % Self::PER_SECOND)
    }
}

impl core::str::FromStr for SimTime {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (whole, frac) = s.split_once('.').ok_or(())?;
        if frac.len() != 6 {
            return Err(());
        }
        let whole: u64 = whole.parse().map_err(|_| ())?;
        let frac: u64 = frac.parse().map_err(|_| ())?;
        Ok(SimTime(whole * Self::PER_SECOND + frac))
    }
}
