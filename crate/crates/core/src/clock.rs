//! Mission dates (`ddmmyyyy`), times (`hhmm`) and scenario seconds.
//!
//! All ledger time is "seconds since the scenario epoch", where the epoch is
//! midnight of a configured calendar date. Wall-clock time is never read.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Seconds since the scenario epoch.
pub type Seconds = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MissionDate(NaiveDate);

impl MissionDate {
    pub fn new(day: u32, month: u32, year: i32) -> Result<MissionDate> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(MissionDate)
            .ok_or_else(|| Error::Parse(format!("invalid date {day:02}{month:02}{year:04}")))
    }

    /// Whole days from `epoch` to `self`; `None` if `self` precedes it.
    pub fn days_since(self, epoch: MissionDate) -> Option<u64> {
        u64::try_from((self.0 - epoch.0).num_days()).ok()
    }

    pub fn plus_days(self, days: u64) -> MissionDate {
        MissionDate(self.0 + chrono::Days::new(days))
    }
}

impl fmt::Display for MissionDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%d%m%Y"))
    }
}

impl FromStr for MissionDate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("date {s:?} is not ddmmyyyy")));
        }
        let day = s[0..2].parse().unwrap();
        let month = s[2..4].parse().unwrap();
        let year = s[4..8].parse().unwrap();
        MissionDate::new(day, month, year)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MissionTime {
    hour: u8,
    minute: u8,
}

impl MissionTime {
    pub fn new(hour: u8, minute: u8) -> Result<MissionTime> {
        if hour > 23 || minute > 59 {
            return Err(Error::Parse(format!("invalid time {hour:02}{minute:02}")));
        }
        Ok(MissionTime { hour, minute })
    }

    pub fn seconds_into_day(self) -> u64 {
        self.hour as u64 * 3600 + self.minute as u64 * 60
    }
}

impl fmt::Display for MissionTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}{:02}", self.hour, self.minute)
    }
}

impl FromStr for MissionTime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("time {s:?} is not hhmm")));
        }
        MissionTime::new(s[0..2].parse().unwrap(), s[2..4].parse().unwrap())
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(MissionDate);
string_serde!(MissionTime);

/// Converts `(date, time)` to seconds since midnight of `epoch`.
pub fn to_scenario_seconds(epoch: MissionDate, date: MissionDate, time: MissionTime) -> Option<Seconds> {
    date.days_since(epoch).map(|d| d * 86_400 + time.seconds_into_day())
}

/// Inverse of [`to_scenario_seconds`], truncated to the minute.
pub fn from_scenario_seconds(epoch: MissionDate, secs: Seconds) -> (MissionDate, MissionTime) {
    let date = epoch.plus_days(secs / 86_400);
    let rem = secs % 86_400;
    let time = MissionTime::new((rem / 3600) as u8, ((rem / 60) % 60) as u8).unwrap();
    (date, time)
}
