//! CSV exchange formats for simulated paths and observations.

use std::path::Path;

use super::{ObservationSet, Trajectory};
use crate::error::{Error, Result};

/// Writes jump paths as `trajectory_id,time,species,value`, one row per
/// species at every event time.
pub fn write_trajectories_csv(path: &Path, trajs: &[Trajectory], species: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["trajectory_id", "time", "species", "value"])?;
    for (id, tr) in trajs.iter().enumerate() {
        for (t, s) in tr.times.iter().zip(&tr.states) {
            for (name, x) in species.iter().zip(s) {
                w.write_record([id.to_string(), t.to_string(), name.clone(), x.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes observations as `trajectory_id,time,species,value`.
pub fn write_observations_csv(path: &Path, obs: &[ObservationSet]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["trajectory_id", "time", "species", "value"])?;
    for (id, o) in obs.iter().enumerate() {
        for (t, row) in o.times.iter().zip(&o.values) {
            for (sp, y) in o.observed.iter().zip(row) {
                w.write_record([id.to_string(), t.to_string(), sp.to_string(), y.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the format produced by [`write_observations_csv`]. Rows must be
/// grouped by trajectory and time.
pub fn read_observations_csv(path: &Path) -> Result<Vec<ObservationSet>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out: Vec<ObservationSet> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("bad observation row {rec:?}")))
        };
        let id = parse(0)? as usize;
        let (t, sp, y) = (parse(1)?, parse(2)? as usize, parse(3)?);
        if id == out.len() {
            out.push(ObservationSet { times: vec![], observed: vec![], values: vec![] });
        } else if id + 1 != out.len() {
            return Err(Error::Config(format!("trajectory ids out of order at {id}")));
        }
        let o = out.last_mut().unwrap();
        if o.times.last() != Some(&t) {
            o.times.push(t);
            o.values.push(vec![]);
        }
        if o.times.len() == 1 {
            o.observed.push(sp);
        } else if o.observed.get(o.values.last().unwrap().len()) != Some(&sp) {
            return Err(Error::Config(format!("inconsistent species order at t = {t}")));
        }
        o.values.last_mut().unwrap().push(y);
    }
    Ok(out)
}
