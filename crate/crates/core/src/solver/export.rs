use std::io::Write;
use std::path::Path;

use super::grid::GridTrajectory;

/// Long-format CSV with header `t,x,u`.
pub fn trajectory_csv(traj: &GridTrajectory) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(["t", "x", "u"]).expect("in-memory write");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        for (x, u) in s.grid.nodes().iter().zip(&s.values) {
            w.write_record([t.to_string(), x.to_string(), u.to_string()])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn write_trajectory_csv(traj: &GridTrajectory, path: &Path) -> std::io::Result<()> {
    std::fs::File::create(path)?.write_all(trajectory_csv(traj).as_bytes())
}

/// Snapshots as JSON: `{"grid": {...}, "times": [...], "states": [[...], ...]}`.
pub fn trajectory_json(traj: &GridTrajectory) -> serde_json::Value {
    serde_json::json!({
        "grid": traj.grid(),
        "times": traj.times,
        "states": traj.states.iter().map(|s| &s.values).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::grid::{Grid, GridFunction};

    #[test]
    fn csv_shape() {
        let g = Grid::new(1.0, 16).unwrap();
        let tr = GridTrajectory {
            times: vec![0.0, 0.5],
            states: vec![GridFunction::zeros(g), GridFunction::from_fn(g, |x| x)],
            steps: vec![],
            weight_centers: vec![],
        };
        let s = trajectory_csv(&tr);
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines.len(), 33);
        assert_eq!(lines[0], "t,x,u");
        assert_eq!(lines[17], "0.5,-1,-1");
        let j = trajectory_json(&tr);
        assert_eq!(j["states"].as_array().unwrap().len(), 2);
    }
}
