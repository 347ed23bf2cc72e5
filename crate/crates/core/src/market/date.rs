use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar date. Year fractions use ACT/365-fixed throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CivilDate(NaiveDate);

impl CivilDate {
    pub fn new(year: i32, month: u32, day: u32) -> Result<Self> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(CivilDate)
            .ok_or_else(|| Error::input(format!("invalid date {year:04}-{month:02}-{day:02}")))
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    /// Signed number of days from `self` to `other`.
    pub fn days_until(&self, other: CivilDate) -> i64 {
        (other.0 - self.0).num_days()
    }

    /// Number of days in this date's month.
    pub fn days_in_month(&self) -> u32 {
        let (y, m) = (self.year(), self.month());
        let next = if m == 12 {
            NaiveDate::from_ymd_opt(y + 1, 1, 1)
        } else {
            NaiveDate::from_ymd_opt(y, m + 1, 1)
        }
        .unwrap();
        (next - NaiveDate::from_ymd_opt(y, m, 1).unwrap()).num_days() as u32
    }

    pub fn month_stamp(&self) -> MonthStamp {
        MonthStamp::new(self.year(), self.month())
    }
}

impl fmt::Display for CivilDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl FromStr for CivilDate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map(CivilDate)
            .map_err(|e| Error::input(format!("bad ISO-8601 date {s:?}: {e}")))
    }
}

impl TryFrom<String> for CivilDate {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CivilDate> for String {
    fn from(d: CivilDate) -> String {
        d.to_string()
    }
}

/// A calendar month, ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthStamp {
    index: i64,
}

impl MonthStamp {
    /// `month` is 1-based; out-of-range months normalise into adjacent years.
    pub fn new(year: i32, month: u32) -> Self {
        Self {
            index: year as i64 * 12 + month as i64 - 1,
        }
    }

    pub fn year(&self) -> i32 {
        self.index.div_euclid(12) as i32
    }

    pub fn month(&self) -> u32 {
        (self.index.rem_euclid(12) + 1) as u32
    }

    pub fn offset(&self, months: i64) -> Self {
        Self {
            index: self.index + months,
        }
    }
}

impl fmt::Display for MonthStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year(), self.month())
    }
}

/// ACT/365F year fraction between two dates.
pub fn year_fraction(d1: CivilDate, d2: CivilDate) -> Result<f64> {
    if d1 > d2 {
        return Err(Error::ordering(format!(
            "year_fraction: {d1} is after {d2}"
        )));
    }
    Ok(d1.days_until(d2) as f64 / 365.0)
}
