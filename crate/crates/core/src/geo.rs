//! DMS coordinates, the flat airspace grid and straight-line routes.
//!
//! Coordinates are held as signed integer arcseconds. The grid is a flat
//! projection: one arcsecond is 1852/60 m on both axes (no cos(lat) term).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const METERS_PER_ARCSEC: f64 = 1852.0 / 60.0;
pub const ALTITUDE_BAND_M: u32 = 30;

const MAX_LAT_ARCSEC: i32 = 90 * 3600;
const MAX_LON_ARCSEC: i32 = 180 * 3600;

/// One DMS coordinate component in arcseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dms(i32);

impl Dms {
    pub fn from_arcsec(arcsec: i32) -> Dms {
        Dms(arcsec)
    }

    pub fn arcsec(self) -> i32 {
        self.0
    }

    fn parse_component(s: &str) -> Result<Dms> {
        let bad = |why: &str| Error::InvalidDms(format!("{s:?}: {why}"));
        let (neg, rest) = match s.chars().next() {
            Some('+') => (false, &s[1..]),
            Some('-') => (true, &s[1..]),
            Some(c) if c.is_ascii_digit() => (false, s),
            _ => return Err(bad("expected sign or digit")),
        };
        let (deg, rest) = rest.split_once(['°', 'd']).ok_or_else(|| bad("missing degree mark"))?;
        let (min, rest) = rest.split_once(['′', '\'']).ok_or_else(|| bad("missing minute mark"))?;
        let sec = rest.strip_suffix(['″', '"']).ok_or_else(|| bad("missing second mark"))?;
        let num = |t: &str, max_len: usize| -> Result<i32> {
            if t.is_empty() || t.len() > max_len || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("malformed field"));
            }
            t.parse().map_err(|_| bad("malformed field"))
        };
        let (deg, min, sec) = (num(deg, 3)?, num(min, 2)?, num(sec, 2)?);
        if min >= 60 || sec >= 60 {
            return Err(bad("minutes and seconds must be below 60"));
        }
        let total = deg * 3600 + min * 60 + sec;
        Ok(Dms(if neg { -total } else { total }))
    }
}

impl fmt::Display for Dms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { '-' } else { '+' };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{:03}°{:02}′{:02}″", a / 3600, (a / 60) % 60, a % 60)
    }
}

/// A latitude/longitude pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DmsPoint {
    pub lat: Dms,
    pub lon: Dms,
}

impl DmsPoint {
    pub fn from_arcsec(lat: i32, lon: i32) -> Result<DmsPoint> {
        if lat.abs() > MAX_LAT_ARCSEC {
            return Err(Error::InvalidDms(format!("latitude {lat}\" out of range")));
        }
        if lon.abs() > MAX_LON_ARCSEC {
            return Err(Error::InvalidDms(format!("longitude {lon}\" out of range")));
        }
        Ok(DmsPoint { lat: Dms(lat), lon: Dms(lon) })
    }
}

impl fmt::Display for DmsPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lat, self.lon)
    }
}

impl FromStr for DmsPoint {
    type Err = Error;

    /// Parses `±DDD°MM′SS″,±DDD°MM′SS″` (latitude first). ASCII `d`, `'`
    /// and `"` are accepted in place of the degree, prime and double-prime marks.
    fn from_str(s: &str) -> Result<Self> {
        let (lat, lon) = s.split_once(',').ok_or_else(|| Error::InvalidDms(format!("{s:?}: expected \"lat,lon\"")))?;
        let lat = Dms::parse_component(lat.trim())?;
        let lon = Dms::parse_component(lon.trim())?;
        DmsPoint::from_arcsec(lat.0, lon.0)
    }
}

impl Serialize for DmsPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DmsPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Planar position in meters (x east, y north).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xy {
    pub x: f64,
    pub y: f64,
}

impl Xy {
    pub fn of(p: DmsPoint) -> Xy {
        Xy { x: p.lon.arcsec() as f64 * METERS_PER_ARCSEC, y: p.lat.arcsec() as f64 * METERS_PER_ARCSEC }
    }

    /// Nearest whole-arcsecond coordinate.
    pub fn to_dms(self) -> Result<DmsPoint> {
        DmsPoint::from_arcsec((self.y / METERS_PER_ARCSEC).round() as i32, (self.x / METERS_PER_ARCSEC).round() as i32)
    }

    pub fn distance(self, other: Xy) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Xy, frac: f64) -> Xy {
        Xy { x: self.x + (other.x - self.x) * frac, y: self.y + (other.y - self.y) * frac }
    }
}

/// A grid cell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoCell {
    pub lat: i64,
    pub lon: i64,
}

impl GeoCell {
    pub fn chebyshev(self, other: GeoCell) -> u64 {
        self.lat.abs_diff(other.lat).max(self.lon.abs_diff(other.lon))
    }

    pub fn offset(self, dlat: i64, dlon: i64) -> GeoCell {
        GeoCell { lat: self.lat + dlat, lon: self.lon + dlon }
    }
}

impl fmt::Display for GeoCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lat, self.lon)
    }
}

/// Square cells of a fixed pitch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub cell_size_m: u32,
}

impl Grid {
    pub fn new(cell_size_m: u32) -> Grid {
        assert!(cell_size_m > 0, "cell size must be positive");
        Grid { cell_size_m }
    }

    fn size(self) -> f64 {
        self.cell_size_m as f64
    }

    pub fn cell_of_xy(self, p: Xy) -> GeoCell {
        GeoCell { lat: (p.y / self.size()).floor() as i64, lon: (p.x / self.size()).floor() as i64 }
    }

    pub fn cell_of(self, p: DmsPoint) -> GeoCell {
        self.cell_of_xy(Xy::of(p))
    }

    pub fn center(self, c: GeoCell) -> Xy {
        Xy { x: (c.lon as f64 + 0.5) * self.size(), y: (c.lat as f64 + 0.5) * self.size() }
    }

    /// Traces the straight segment `from -> to` flown at `speed` m/s from
    /// `depart`, returning every cell crossed with the time window spent in it.
    pub fn trace(self, from: Xy, to: Xy, depart: u64, speed: f64, altitude_m: u32) -> Route {
        assert!(speed > 0.0, "speed must be positive");
        let band = altitude_m / ALTITUDE_BAND_M;
        let length = from.distance(to);
        let duration = length / speed;
        let at = |frac: f64| depart as f64 + frac * duration;

        let start = self.cell_of_xy(from);
        let end = self.cell_of_xy(to);
        let (dx, dy) = (to.x - from.x, to.y - from.y);
        let cs = self.size();

        let axis = |d: f64, origin: f64, idx: i64| -> (i64, f64, f64) {
            if d > 0.0 {
                (1, (((idx + 1) as f64) * cs - origin) / d, cs / d)
            } else if d < 0.0 {
                (-1, ((idx as f64) * cs - origin) / d, -cs / d)
            } else {
                (0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (step_lon, mut next_lon, delta_lon) = axis(dx, from.x, start.lon);
        let (step_lat, mut next_lat, delta_lat) = axis(dy, from.y, start.lat);

        let mut waypoints = Vec::new();
        let mut cell = start;
        let mut entered = 0.0_f64;
        let max_steps = start.lat.abs_diff(end.lat) + start.lon.abs_diff(end.lon);
        for _ in 0..=max_steps {
            let leave = next_lon.min(next_lat).min(1.0);
            waypoints.push(Waypoint {
                cell,
                altitude_band: band,
                enter: at(entered).floor() as u64,
                exit: at(leave).ceil() as u64,
            });
            if cell == end {
                break;
            }
            if next_lon < next_lat {
                cell.lon += step_lon;
                next_lon += delta_lon;
            } else {
                cell.lat += step_lat;
                next_lat += delta_lat;
            }
            entered = leave;
        }
        if waypoints.last().map(|w| w.cell) != Some(end) {
            // float drift at the very end of the segment
            waypoints.push(Waypoint {
                cell: end,
                altitude_band: band,
                enter: at(1.0).floor() as u64,
                exit: at(1.0).ceil() as u64,
            });
        }
        Route { waypoints, depart, arrive: at(1.0).ceil() as u64 }
    }
}

/// A cell on a route and the window `[enter, exit]` (seconds) it is occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Waypoint {
    pub cell: GeoCell,
    pub altitude_band: u32,
    pub enter: u64,
    pub exit: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Route {
    pub waypoints: Vec<Waypoint>,
    pub depart: u64,
    pub arrive: u64,
}

impl Route {
    /// True if the route is in `cell` at some instant within `tolerance`
    /// seconds of `time`.
    pub fn occupies(&self, cell: GeoCell, time: u64, tolerance: u64) -> bool {
        self.waypoints.iter().any(|w| w.cell == cell && time + tolerance >= w.enter && time <= w.exit + tolerance)
    }

    /// True if any two waypoints share an altitude band, lie within
    /// `buffer_cells` (Chebyshev) of each other and have occupancy windows
    /// closer than `buffer_secs`.
    pub fn conflicts_with(&self, other: &Route, buffer_cells: u64, buffer_secs: u64) -> bool {
        if self.arrive + buffer_secs < other.depart || other.arrive + buffer_secs < self.depart {
            return false;
        }
        self.waypoints.iter().any(|a| {
            other.waypoints.iter().any(|b| {
                a.altitude_band == b.altitude_band
                    && a.cell.chebyshev(b.cell) <= buffer_cells
                    && a.enter <= b.exit + buffer_secs
                    && b.enter <= a.exit + buffer_secs
            })
        })
    }
}
