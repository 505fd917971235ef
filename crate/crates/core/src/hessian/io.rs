//! Potential files: CSV whose first line is `m,lower_1,upper_1,n_1,..` with the
//! values on the second line, then a `u_1,..,u_m,phi` header and one row per
//! node in grid order (last axis fastest).

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ma_solver::SolverConfig;
use super::potential::HessianPotential;
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};

pub fn write_potential_csv<W: Write>(pot: &HessianPotential, out: W) -> Result<()> {
    let g = pot.grid();
    let m = g.dim();
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let mut head = vec!["m".to_string()];
    let mut vals = vec![m.to_string()];
    for a in 0..m {
        head.extend([format!("lower_{}", a + 1), format!("upper_{}", a + 1), format!("n_{}", a + 1)]);
        vals.extend([
            format!("{:e}", g.lower()[a]),
            format!("{:e}", g.upper()[a]),
            g.resolution()[a].to_string(),
        ]);
    }
    w.write_record(&head)?;
    w.write_record(&vals)?;
    let mut cols: Vec<String> = (1..=m).map(|i| format!("u_{i}")).collect();
    cols.push("phi".into());
    w.write_record(&cols)?;
    for node in 0..g.node_count() {
        let mut rec: Vec<String> = g.coordinates(node).iter().map(|x| format!("{x:e}")).collect();
        rec.push(format!("{:e}", pot.values()[node]));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Input(format!("bad {what} {s:?} in potential file")))
}

pub fn read_potential_csv<R: Read>(input: R) -> Result<HessianPotential> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(false)
        .from_reader(input);
    let recs: Vec<csv::StringRecord> = r.records().collect::<std::result::Result<_, _>>()?;
    if recs.len() < 3 {
        return Err(Error::Input("potential file needs a grid header, values and a column header".into()));
    }
    let meta = &recs[1];
    let m: usize = num(&meta[0], "dimension")?;
    if m == 0 || meta.len() != 1 + 3 * m {
        return Err(Error::Input(format!("grid line has {} fields for m = {m}", meta.len())));
    }
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut res = Vec::new();
    for a in 0..m {
        lower.push(num(&meta[1 + 3 * a], "lower bound")?);
        upper.push(num(&meta[2 + 3 * a], "upper bound")?);
        res.push(num(&meta[3 + 3 * a], "node count")?);
    }
    let grid = BoxGrid::new(lower, upper, res)?;
    let rows = &recs[3..];
    if rows.len() != grid.node_count() {
        return Err(Error::Input(format!("{} rows for {} nodes", rows.len(), grid.node_count())));
    }
    let mut values = Vec::with_capacity(rows.len());
    for (node, row) in rows.iter().enumerate() {
        if row.len() != m + 1 {
            return Err(Error::Input(format!("row {node} has {} fields", row.len())));
        }
        let x = grid.coordinates(node);
        for a in 0..m {
            let got: f64 = num(&row[a], "coordinate")?;
            if (got - x[a]).abs() > 1e-9 * grid.spacing(a) {
                return Err(Error::Input(format!(
                    "row {node} has u_{} = {got}, expected {} (rows must follow grid order)",
                    a + 1,
                    x[a]
                )));
            }
        }
        values.push(num(&row[m], "value")?);
    }
    HessianPotential::new(grid, values, None)
}

/// Closed-form potentials available by name in configuration files.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `sum c_i u_i^2 / 2` (all `c_i = 1` when no coefficients are given).
    Quadratic,
    /// `u_1^4 / 12 + u_1^2 / 2 + sum_{i > 1} u_i^2 / 2`.
    Quartic,
    /// `sum exp(u_i)`.
    Exp,
    /// `u_1^2 / (2 u_2) + u_2^3 / 6`, with `det Hess = 1` for `u_2 > 0`.
    MaExample,
    /// `sum c_i u_i`.
    Affine,
    /// `c log |u - center|` from coefficients `[c, center_1, center_2, ..]`.
    Log,
}

/// A named potential sampled on a box grid, plus a constant `offset`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BuiltinPotential {
    pub kind: PotentialKind,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: Vec<usize>,
    #[serde(default)]
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub c: Option<f64>,
}

impl BuiltinPotential {
    fn coefficients_or(&self, m: usize, fill: f64) -> Result<Vec<f64>> {
        match self.coefficients.len() {
            0 => Ok(vec![fill; m]),
            n if n == m => Ok(self.coefficients.clone()),
            n => Err(Error::Input(format!("{:?} needs {m} coefficients, got {n}", self.kind))),
        }
    }

    pub fn evaluate_on(&self, grid: BoxGrid) -> Result<HessianPotential> {
        let m = grid.dim();
        let offset = self.offset;
        let f: Box<dyn Fn(&[f64]) -> f64> = match self.kind {
            PotentialKind::Quadratic => {
                let c = self.coefficients_or(m, 1.0)?;
                Box::new(move |u| u.iter().zip(&c).map(|(x, c)| c * x * x / 2.0).sum())
            }
            PotentialKind::Quartic => Box::new(|u| {
                u[0].powi(4) / 12.0 + u.iter().map(|x| x * x / 2.0).sum::<f64>()
            }),
            PotentialKind::Exp => Box::new(|u| u.iter().map(|x| x.exp()).sum()),
            PotentialKind::MaExample => {
                if m != 2 || grid.lower()[1] <= 0.0 {
                    return Err(Error::Input("ma-example needs two variables with u_2 > 0".into()));
                }
                Box::new(|u| u[0] * u[0] / (2.0 * u[1]) + u[1].powi(3) / 6.0)
            }
            PotentialKind::Affine => {
                let c = self.coefficients_or(m, 0.0)?;
                Box::new(move |u| u.iter().zip(&c).map(|(x, c)| c * x).sum())
            }
            PotentialKind::Log => {
                if self.coefficients.len() != m + 1 {
                    return Err(Error::Input(format!("log needs {} coefficients", m + 1)));
                }
                let c = self.coefficients[0];
                let center = self.coefficients[1..].to_vec();
                if grid.contains(&center) {
                    return Err(Error::Input("log source lies inside the grid".into()));
                }
                Box::new(move |u| {
                    let r2: f64 = u.iter().zip(&center).map(|(x, y)| (x - y).powi(2)).sum();
                    0.5 * c * r2.ln()
                })
            }
        };
        HessianPotential::from_fn(grid, |u| f(u) + offset, self.c)
    }

    pub fn to_potential(&self) -> Result<HessianPotential> {
        let grid = BoxGrid::new(self.lower.clone(), self.upper.clone(), self.resolution.clone())?;
        self.evaluate_on(grid)
    }
}

/// Where a configuration file takes a potential from: a potential CSV
/// (relative to the configuration file) or a named closed form.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PotentialSpec {
    File(String),
    Builtin(BuiltinPotential),
}

impl PotentialSpec {
    pub fn load(&self, base_dir: Option<&Path>) -> Result<HessianPotential> {
        match self {
            PotentialSpec::File(path) => {
                let full = base_dir.map_or_else(|| Path::new(path).to_path_buf(), |d| d.join(path));
                read_potential_csv(std::fs::File::open(&full).map_err(|e| {
                    Error::Input(format!("cannot open potential file {}: {e}", full.display()))
                })?)
            }
            PotentialSpec::Builtin(b) => b.to_potential(),
        }
    }
}

/// Solver configuration file: the [`SolverConfig`] keys plus the potential
/// whose boundary nodes give the Dirichlet data.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolverFile {
    #[serde(flatten)]
    pub config: SolverConfig,
    #[serde(default)]
    pub boundary: Option<PotentialSpec>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let g = BoxGrid::new(vec![-1.0, 0.5], vec![1.0, 2.0], vec![7, 9]).unwrap();
        let p = HessianPotential::from_fn(g, |u| u[0].exp() + u[1] * u[1], None).unwrap();
        let mut buf = Vec::new();
        write_potential_csv(&p, &mut buf).unwrap();
        let back = read_potential_csv(buf.as_slice()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn config_defaults_fill_in() {
        let f: SolverFile = serde_json::from_str(r#"{"c": 2.0, "boundary": "b.csv"}"#).unwrap();
        assert_eq!(f.config.c, 2.0);
        assert_eq!(f.config.max_iter, 50);
        assert_eq!(f.boundary, Some(PotentialSpec::File("b.csv".into())));
        let f: SolverFile = serde_json::from_str(
            r#"{"boundary": {"kind": "ma-example", "lower": [-0.5, 1.0], "upper": [0.5, 2.0], "resolution": [9, 9]}}"#,
        )
        .unwrap();
        let pot = f.boundary.unwrap().load(None).unwrap();
        assert!((pot.values()[0] - (0.25 / 2.0 + 1.0 / 6.0)).abs() < 1e-15);
    }
}
