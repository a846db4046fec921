//! Polytope files: a JSON array of integer vectors, or one vertex per line
//! with whitespace- or comma-separated coordinates (`#` starts a comment).

use smoothpoly::{hull, LatticePolytope, LatticeVector};

pub fn parse_points(text: &str) -> Result<Vec<LatticeVector>, String> {
    let trimmed = text.trim_start();
    let rows: Vec<Vec<i64>> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| format!("invalid JSON point list: {e}"))?
    } else {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<i64>, _> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect();
            rows.push(row.map_err(|e| format!("line {}: {e}", i + 1))?);
        }
        rows
    };
    if rows.is_empty() {
        return Err("no points given".into());
    }
    let dim = rows[0].len();
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != dim {
                return Err(format!(
                    "point {} has {} coordinates, expected {dim}",
                    i + 1,
                    r.len()
                ));
            }
            LatticeVector::new(r).map_err(|e| e.to_string())
        })
        .collect()
}

pub fn parse_polytope(text: &str) -> Result<LatticePolytope, String> {
    hull(&parse_points(text)?).map_err(|e| e.to_string())
}
