//! Text formats for tile systems and grids.
//!
//! System:
//! ```text
//! tiles: a b c
//! H: a b
//! V: b c
//! ```
//!
//! Grid:
//! ```text
//! size: 2 2
//! a b
//! b a
//! periodic: true
//! ```
//!
//! Lines starting with `#` (after optional whitespace) are ignored by the
//! parsers and never produced by the serializers, so round trips are
//! byte-exact on serializer output. The optional `periodic: true` trailer is
//! emitted only when set.

use serde::{Deserialize, Serialize};

use crate::error::TilingError;
use crate::system::{TileSystem, TilingGrid};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn perr(line: usize, msg: impl Into<String>) -> TilingError {
    TilingError::Parse { line, msg: msg.into() }
}

pub fn serialize_system(system: &TileSystem) -> String {
    let mut out = String::new();
    out.push_str("tiles:");
    for t in system.tokens() {
        out.push(' ');
        out.push_str(t);
    }
    out.push('\n');
    for (a, b) in system.h_pairs() {
        out.push_str(&format!("H: {} {}\n", system.token(a), system.token(b)));
    }
    for (a, b) in system.v_pairs() {
        out.push_str(&format!("V: {} {}\n", system.token(a), system.token(b)));
    }
    out
}

pub fn parse_system(text: &str) -> Result<TileSystem, TilingError> {
    let mut system: Option<TileSystem> = None;
    for (ln, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("tiles:") {
            if system.is_some() {
                return Err(perr(ln, "duplicate tiles: line"));
            }
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            if tokens.is_empty() {
                return Err(perr(ln, "tiles: line lists no tiles"));
            }
            system = Some(TileSystem::new(tokens)?);
        } else if let Some(rest) = line.strip_prefix("H:") {
            let s = system.as_mut().ok_or_else(|| perr(ln, "H: before tiles:"))?;
            let pair: Vec<&str> = rest.split_whitespace().collect();
            if pair.len() != 2 {
                return Err(perr(ln, "H: expects exactly two tiles"));
            }
            s.add_h_tok(pair[0], pair[1])?;
        } else if let Some(rest) = line.strip_prefix("V:") {
            let s = system.as_mut().ok_or_else(|| perr(ln, "V: before tiles:"))?;
            let pair: Vec<&str> = rest.split_whitespace().collect();
            if pair.len() != 2 {
                return Err(perr(ln, "V: expects exactly two tiles"));
            }
            s.add_v_tok(pair[0], pair[1])?;
        } else {
            return Err(perr(ln, format!("unrecognized line `{line}`")));
        }
    }
    system.ok_or_else(|| perr(0, "missing tiles: line"))
}

pub fn serialize_grid(system: &TileSystem, grid: &TilingGrid) -> String {
    let mut out = format!("size: {} {}\n", grid.width(), grid.height());
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            if col > 0 {
                out.push(' ');
            }
            out.push_str(system.token(grid.get(col, row)));
        }
        out.push('\n');
    }
    if grid.periodic {
        out.push_str("periodic: true\n");
    }
    out
}

pub fn parse_grid(text: &str, system: &TileSystem) -> Result<TilingGrid, TilingError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty grid"))?;
    let dims = header
        .strip_prefix("size:")
        .ok_or_else(|| perr(ln, "grid must start with size:"))?;
    let dims: Vec<&str> = dims.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(perr(ln, "size: expects width and height"));
    }
    let width: usize = dims[0].parse().map_err(|_| perr(ln, "bad width"))?;
    let height: usize = dims[1].parse().map_err(|_| perr(ln, "bad height"))?;
    if width == 0 || height == 0 {
        return Err(perr(ln, "grid dimensions must be positive"));
    }

    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(height);
    let mut periodic = false;
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix("periodic:") {
            match rest.trim() {
                "true" => periodic = true,
                "false" => periodic = false,
                other => return Err(perr(ln, format!("bad periodic value `{other}`"))),
            }
            continue;
        }
        if rows.len() == height {
            return Err(perr(ln, "more rows than the declared height"));
        }
        let mut row = Vec::with_capacity(width);
        for tok in line.split_whitespace() {
            let idx = system
                .tile_index(tok)
                .ok_or_else(|| TilingError::UnknownTile(tok.into()))?;
            row.push(idx);
        }
        if row.len() != width {
            return Err(perr(ln, format!("expected {} tiles, got {}", width, row.len())));
        }
        rows.push(row);
    }
    if rows.len() != height {
        return Err(TilingError::MalformedGrid(format!(
            "expected {} rows, got {}",
            height,
            rows.len()
        )));
    }
    let mut grid = TilingGrid::from_rows(rows)?;
    grid.periodic = periodic;
    Ok(grid)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SystemJson {
    pub tiles: Vec<String>,
    pub h: Vec<[String; 2]>,
    pub v: Vec<[String; 2]>,
}

pub fn system_to_json(system: &TileSystem) -> SystemJson {
    SystemJson {
        tiles: system.tokens().to_vec(),
        h: system
            .h_pairs()
            .map(|(a, b)| [system.token(a).to_string(), system.token(b).to_string()])
            .collect(),
        v: system
            .v_pairs()
            .map(|(a, b)| [system.token(a).to_string(), system.token(b).to_string()])
            .collect(),
    }
}

pub fn system_from_json(json: &SystemJson) -> Result<TileSystem, TilingError> {
    let mut s = TileSystem::new(json.tiles.clone())?;
    for [a, b] in &json.h {
        s.add_h_tok(a, b)?;
    }
    for [a, b] in &json.v {
        s.add_v_tok(a, b)?;
    }
    Ok(s)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GridJson {
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub periodic: bool,
}

pub fn grid_to_json(system: &TileSystem, grid: &TilingGrid) -> GridJson {
    GridJson {
        width: grid.width(),
        height: grid.height(),
        rows: (0..grid.height())
            .map(|r| (0..grid.width()).map(|c| system.token(grid.get(c, r)).to_string()).collect())
            .collect(),
        periodic: grid.periodic,
    }
}

pub fn grid_from_json(json: &GridJson, system: &TileSystem) -> Result<TilingGrid, TilingError> {
    let mut rows = Vec::with_capacity(json.rows.len());
    for row in &json.rows {
        let mut out = Vec::with_capacity(row.len());
        for tok in row {
            out.push(
                system
                    .tile_index(tok)
                    .ok_or_else(|| TilingError::UnknownTile(tok.clone()))?,
            );
        }
        out.len()
            .eq(&json.width)
            .then_some(())
            .ok_or_else(|| TilingError::MalformedGrid("row width mismatch".into()))?;
        rows.push(out);
    }
    if rows.len() != json.height {
        return Err(TilingError::MalformedGrid("row count mismatch".into()));
    }
    let mut grid = TilingGrid::from_rows(rows)?;
    grid.periodic = json.periodic;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TileSystem {
        let mut s = TileSystem::new(vec!["a", "b", "c"]).unwrap();
        s.add_h_tok("a", "b").unwrap();
        s.add_h_tok("b", "c").unwrap();
        s.add_v_tok("c", "a").unwrap();
        s
    }

    #[test]
    fn system_round_trip_is_byte_exact() {
        let s = sample();
        let text = serialize_system(&s);
        let back = parse_system(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(serialize_system(&back), text);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = "# header\n\ntiles: a b\n  # mid\nH: a b\nV: b a\n";
        let s = parse_system(text).unwrap();
        assert_eq!(s.n_tiles(), 2);
        assert!(s.h_contains(0, 1));
        assert!(s.v_contains(1, 0));
    }

    #[test]
    fn grid_round_trip_with_periodic_flag() {
        let s = sample();
        let mut g = TilingGrid::from_rows(vec![vec![0, 1], vec![2, 0]]).unwrap();
        g.periodic = true;
        let text = serialize_grid(&s, &g);
        let back = parse_grid(&text, &s).unwrap();
        assert_eq!(back, g);
        assert!(back.periodic);
        assert_eq!(serialize_grid(&s, &back), text);
    }

    #[test]
    fn grid_errors() {
        let s = sample();
        assert!(parse_grid("size: 2 2\na b\n", &s).is_err());
        assert!(parse_grid("size: 2 1\na b c\n", &s).is_err());
        assert!(matches!(
            parse_grid("size: 1 1\nzz\n", &s),
            Err(TilingError::UnknownTile(_))
        ));
        assert!(parse_grid("a b\n", &s).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = sample();
        let j = serde_json::to_string(&system_to_json(&s)).unwrap();
        let back = system_from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, s);

        let mut g = TilingGrid::from_rows(vec![vec![0, 1]]).unwrap();
        g.periodic = true;
        let gj = serde_json::to_string(&grid_to_json(&s, &g)).unwrap();
        let gback = grid_from_json(&serde_json::from_str(&gj).unwrap(), &s).unwrap();
        assert_eq!(gback, g);
    }
}
