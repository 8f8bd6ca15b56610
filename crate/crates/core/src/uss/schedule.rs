//! Straight-line routing with cell-time deconfliction.

use crate::geo::{DmsPoint, Grid, Route, Xy};
use crate::ledger::{reasons, Revert};
use crate::uss::UssConfig;

/// Routes `source -> destination` at the configured cruise speed and
/// altitude, rejecting it if it comes within the deconfliction buffer of
/// any of `active`.
pub fn schedule_route<'a>(
    config: &UssConfig,
    active: impl IntoIterator<Item = &'a Route>,
    source: DmsPoint,
    destination: DmsPoint,
    depart: u64,
) -> Result<Route, Revert> {
    let grid = Grid::new(config.cell_size_m);
    let route =
        grid.trace(Xy::of(source), Xy::of(destination), depart, config.cruise_speed_mps as f64, config.altitude_m);
    let conflict = active.into_iter().any(|other| route.conflicts_with(other, config.buffer_cells, config.buffer_secs));
    if conflict {
        return Err(Revert::new(reasons::SCHEDULE_CONFLICT));
    }
    Ok(route)
}
