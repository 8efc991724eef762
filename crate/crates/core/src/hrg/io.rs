//! Text instance format, versioned and round-trip exact.
//!
//! ```text
//! hrg-instance v1
//! n alpha C seed R N
//! id r phi          (N lines)
//! edges M
//! u v               (M lines, u < v)
//! ```
//!
//! Floats are printed in shortest round-trip form, so writing and re-reading
//! an instance reproduces every coordinate bit for bit.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{HrgError, HrgGraph, HrgParams, VertexId};
use crate::geometry::PolarPoint;

impl HrgGraph {
    pub fn to_writer<W: Write>(&self, w: &mut W) -> Result<(), HrgError> {
        let p = self.params();
        writeln!(w, "hrg-instance v1")?;
        writeln!(
            w,
            "{} {} {} {} {} {}",
            p.n,
            p.alpha,
            p.c,
            p.seed,
            p.radius(),
            self.num_vertices()
        )?;
        for (i, pt) in self.coords().iter().enumerate() {
            writeln!(w, "{} {} {}", i, pt.r, pt.phi)?;
        }
        let edges = self.edge_list();
        writeln!(w, "edges {}", edges.len())?;
        for (u, v) in edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn write_to_path<P: AsRef<Path>>(&self, path: P) -> Result<(), HrgError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.to_writer(&mut f)
    }

    pub fn from_reader<R: Read>(r: R) -> Result<Self, HrgError> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines().enumerate();

        let mut next_line = |what: &str| -> Result<(usize, String), HrgError> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i + 1, l)),
                Some((i, Err(e))) => Err(HrgError::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                }),
                None => Err(HrgError::Parse {
                    line: 0,
                    msg: format!("unexpected end of file, expected {what}"),
                }),
            }
        };

        let (line_no, header) = next_line("header")?;
        if header.trim() != "hrg-instance v1" {
            return Err(HrgError::Parse {
                line: line_no,
                msg: format!("expected `hrg-instance v1`, got `{header}`"),
            });
        }

        let (line_no, meta) = next_line("parameter line")?;
        let fields: Vec<&str> = meta.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(HrgError::Parse {
                line: line_no,
                msg: format!("expected 6 fields `n alpha C seed R N`, got {}", fields.len()),
            });
        }
        let parse_field = |idx: usize, name: &str| -> Result<f64, HrgError> {
            fields[idx].parse::<f64>().map_err(|e| HrgError::Parse {
                line: line_no,
                msg: format!("field {name}: {e}"),
            })
        };
        let n = fields[0].parse::<u64>().map_err(|e| HrgError::Parse {
            line: line_no,
            msg: format!("field n: {e}"),
        })?;
        let alpha = parse_field(1, "alpha")?;
        let c = parse_field(2, "C")?;
        let seed = fields[3].parse::<u64>().map_err(|e| HrgError::Parse {
            line: line_no,
            msg: format!("field seed: {e}"),
        })?;
        let radius_in_file = parse_field(4, "R")?;
        let count = fields[5].parse::<usize>().map_err(|e| HrgError::Parse {
            line: line_no,
            msg: format!("field N: {e}"),
        })?;

        let params = HrgParams::new(n, alpha, c, seed).map_err(|e| HrgError::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let derived = params.radius();
        if (radius_in_file - derived).abs() > 1e-9 * derived.abs().max(1.0) {
            return Err(HrgError::Parse {
                line: line_no,
                msg: format!(
                    "stored radius {radius_in_file} does not match 2 ln(n) + C = {derived}"
                ),
            });
        }

        let mut coords = Vec::with_capacity(count);
        for i in 0..count {
            let (line_no, line) = next_line("vertex line")?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(HrgError::Parse {
                    line: line_no,
                    msg: format!("expected `id r phi`, got `{line}`"),
                });
            }
            let id: usize = fields[0].parse().map_err(|e| HrgError::Parse {
                line: line_no,
                msg: format!("vertex id: {e}"),
            })?;
            if id != i {
                return Err(HrgError::Parse {
                    line: line_no,
                    msg: format!("vertex ids must be consecutive, expected {i} got {id}"),
                });
            }
            let r: f64 = fields[1].parse().map_err(|e| HrgError::Parse {
                line: line_no,
                msg: format!("radius: {e}"),
            })?;
            let phi: f64 = fields[2].parse().map_err(|e| HrgError::Parse {
                line: line_no,
                msg: format!("angle: {e}"),
            })?;
            coords.push(PolarPoint { r, phi });
        }

        let (line_no, edge_header) = next_line("edge header")?;
        let m: usize = edge_header
            .strip_prefix("edges ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| HrgError::Parse {
                line: line_no,
                msg: format!("expected `edges M`, got `{edge_header}`"),
            })?;

        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line_no, line) = next_line("edge line")?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(HrgError::Parse {
                    line: line_no,
                    msg: format!("expected `u v`, got `{line}`"),
                });
            }
            let u: VertexId = fields[0].parse().map_err(|e| HrgError::Parse {
                line: line_no,
                msg: format!("endpoint u: {e}"),
            })?;
            let v: VertexId = fields[1].parse().map_err(|e| HrgError::Parse {
                line: line_no,
                msg: format!("endpoint v: {e}"),
            })?;
            if u >= v {
                return Err(HrgError::Parse {
                    line: line_no,
                    msg: format!("edges must satisfy u < v, got {u} {v}"),
                });
            }
            edges.push((u, v));
        }

        HrgGraph::from_parts(params, coords, edges)
    }
}

/// Reads an instance from a file path.
pub fn read_instance<P: AsRef<Path>>(path: P) -> Result<HrgGraph, HrgError> {
    HrgGraph::from_reader(std::fs::File::open(path)?)
}
