//! Calendar months as a totally ordered integer type.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar month, stored as `year * 12 + (month - 1)` so that consecutive
/// months differ by exactly one.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Month(i64);

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::validation(format!("month out of range: {month}")));
        }
        Ok(Month(year as i64 * 12 + (month as i64 - 1)))
    }

    pub fn year(self) -> i32 {
        self.0.div_euclid(12) as i32
    }

    pub fn month(self) -> u32 {
        (self.0.rem_euclid(12) + 1) as u32
    }

    pub fn next(self) -> Self {
        Month(self.0 + 1)
    }

    /// Signed number of months from `other` to `self`.
    pub fn months_since(self, other: Month) -> i64 {
        self.0 - other.0
    }

    pub fn add_months(self, n: i64) -> Self {
        Month(self.0 + n)
    }

    /// Parses `1993M04`, `1993-04` (optionally with a day suffix) or the
    /// FRED-MD `m/d/yyyy` layout.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::validation(format!("unrecognized month `{s}`"));
        if let Some((y, m)) = s.split_once(['M', 'm']) {
            if let (Ok(y), Ok(m)) = (y.parse::<i32>(), m.parse::<u32>()) {
                return Month::new(y, m);
            }
        }
        if s.contains('-') {
            let mut it = s.split('-');
            let y = it.next().and_then(|v| v.parse::<i32>().ok());
            let m = it.next().and_then(|v| v.parse::<u32>().ok());
            if let (Some(y), Some(m)) = (y, m) {
                return Month::new(y, m);
            }
        }
        if s.contains('/') {
            let parts: Vec<&str> = s.split('/').collect();
            if parts.len() == 3 {
                let m = parts[0].parse::<u32>().map_err(|_| bad())?;
                let y = parts[2].parse::<i32>().map_err(|_| bad())?;
                return Month::new(y, m);
            }
        }
        Err(bad())
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}M{:02}", self.year(), self.month())
    }
}

impl fmt::Debug for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Month {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Month::parse(s)
    }
}

impl TryFrom<String> for Month {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Month::parse(&s)
    }
}

impl From<Month> for String {
    fn from(m: Month) -> String {
        m.to_string()
    }
}
