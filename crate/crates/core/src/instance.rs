//! GTSP-lib instance files and the derived multi-depot instances.
//!
//! A GTSP-lib file is a TSPLIB file with two extra keywords: `GTSP_SETS`
//! (number of clusters) and `GTSP_SET_SECTION`, where every set is written as
//! `<set id> <vertex> <vertex> ... -1`.  Multi-depot instances are derived by
//! turning the first `d` vertices of the file into depots.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {field}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, field: &str, message: impl Into<String>) -> Self {
        ParseError {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("depot count {depots} must satisfy 1 <= d < dimension ({dimension})")]
    DepotCount { depots: usize, dimension: usize },
    #[error("no edge between depots {0} and {1}")]
    DepotPair(usize, usize),
    #[error("vertex {0} is out of range")]
    UnknownVertex(usize),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeWeightType {
    Euc2d,
    Geo,
    Explicit,
}

impl EdgeWeightType {
    fn keyword(self) -> &'static str {
        match self {
            EdgeWeightType::Euc2d => "EUC_2D",
            EdgeWeightType::Geo => "GEO",
            EdgeWeightType::Explicit => "EXPLICIT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeWeightFormat {
    FullMatrix,
    LowerDiagRow,
    UpperRow,
}

impl EdgeWeightFormat {
    fn keyword(self) -> &'static str {
        match self {
            EdgeWeightFormat::FullMatrix => "FULL_MATRIX",
            EdgeWeightFormat::LowerDiagRow => "LOWER_DIAG_ROW",
            EdgeWeightFormat::UpperRow => "UPPER_ROW",
        }
    }

    fn entry_count(self, n: usize) -> usize {
        match self {
            EdgeWeightFormat::FullMatrix => n * n,
            EdgeWeightFormat::LowerDiagRow => n * (n + 1) / 2,
            EdgeWeightFormat::UpperRow => n * (n.saturating_sub(1)) / 2,
        }
    }
}

/// Contents of a GTSP-lib file.  Vertex ids are 0-indexed here; the file
/// uses 1-indexed ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawGtspInstance {
    pub name: String,
    pub comment: Option<String>,
    pub dimension: usize,
    pub edge_weight_type: EdgeWeightType,
    pub edge_weight_format: Option<EdgeWeightFormat>,
    pub coords: Option<Vec<(f64, f64)>>,
    /// Dense symmetric `dimension x dimension` table for `EXPLICIT` files.
    pub matrix: Option<Vec<Vec<i64>>>,
    pub sets: Vec<Vec<usize>>,
}

const KEYWORDS_IGNORED: &[&str] = &["DISPLAY_DATA_TYPE", "NODE_COORD_TYPE"];

/// Parses the text of a GTSP-lib file.
pub fn parse_instance(text: &str) -> Result<RawGtspInstance, ParseError> {
    let mut name = None;
    let mut comment: Option<String> = None;
    let mut dimension = None;
    let mut set_count = None;
    let mut weight_type = None;
    let mut weight_format = None;
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut flat_weights: Option<(usize, Vec<i64>)> = None;
    let mut sets: Option<Vec<Vec<usize>>> = None;

    let lines: Vec<&str> = text.lines().collect();
    let mut pos = 0;
    while pos < lines.len() {
        let lineno = pos + 1;
        let line = lines[pos].trim();
        pos += 1;
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), Some(v.trim())),
            None => (line, None),
        };
        match key {
            "EOF" => break,
            "NAME" => name = Some(required(value, lineno, key)?.to_string()),
            "TYPE" => {
                let v = required(value, lineno, key)?;
                if v != "GTSP" && v != "TSP" {
                    return Err(ParseError::new(lineno, key, format!("unsupported problem type {v}")));
                }
            }
            "COMMENT" => {
                let v = value.unwrap_or("").to_string();
                comment = Some(match comment {
                    Some(c) => format!("{c}\n{v}"),
                    None => v,
                });
            }
            "DIMENSION" => dimension = Some(parse_usize(required(value, lineno, key)?, lineno, key)?),
            "GTSP_SETS" => set_count = Some(parse_usize(required(value, lineno, key)?, lineno, key)?),
            "EDGE_WEIGHT_TYPE" => {
                weight_type = Some(match required(value, lineno, key)? {
                    "EUC_2D" => EdgeWeightType::Euc2d,
                    "GEO" => EdgeWeightType::Geo,
                    "EXPLICIT" => EdgeWeightType::Explicit,
                    other => {
                        return Err(ParseError::new(
                            lineno,
                            key,
                            format!("unsupported edge weight type {other}"),
                        ))
                    }
                })
            }
            "EDGE_WEIGHT_FORMAT" => {
                weight_format = Some(match required(value, lineno, key)? {
                    "FULL_MATRIX" => EdgeWeightFormat::FullMatrix,
                    "LOWER_DIAG_ROW" => EdgeWeightFormat::LowerDiagRow,
                    "UPPER_ROW" => EdgeWeightFormat::UpperRow,
                    other => {
                        return Err(ParseError::new(
                            lineno,
                            key,
                            format!("unsupported edge weight format {other}"),
                        ))
                    }
                })
            }
            "NODE_COORD_SECTION" => {
                let n = dimension
                    .ok_or_else(|| ParseError::new(lineno, key, "DIMENSION must precede the section"))?;
                let mut out = vec![None; n];
                for _ in 0..n {
                    let (ln, l) = next_data_line(&lines, &mut pos)
                        .ok_or_else(|| ParseError::new(lineno, key, "unexpected end of coordinates"))?;
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    if toks.len() != 3 {
                        return Err(ParseError::new(ln, key, "expected `id x y`"));
                    }
                    let id = parse_usize(toks[0], ln, key)?;
                    if id == 0 || id > n {
                        return Err(ParseError::new(ln, key, format!("vertex id {id} out of range")));
                    }
                    if out[id - 1].is_some() {
                        return Err(ParseError::new(ln, key, format!("duplicate vertex id {id}")));
                    }
                    out[id - 1] = Some((parse_f64(toks[1], ln, key)?, parse_f64(toks[2], ln, key)?));
                }
                coords = Some(out.into_iter().map(|c| c.unwrap()).collect());
            }
            "EDGE_WEIGHT_SECTION" => {
                let n = dimension
                    .ok_or_else(|| ParseError::new(lineno, key, "DIMENSION must precede the section"))?;
                let fmt = weight_format
                    .ok_or_else(|| ParseError::new(lineno, key, "EDGE_WEIGHT_FORMAT must precede the section"))?;
                let want = fmt.entry_count(n);
                let mut vals = Vec::with_capacity(want);
                while vals.len() < want {
                    let (ln, l) = next_data_line(&lines, &mut pos)
                        .ok_or_else(|| ParseError::new(lineno, key, "unexpected end of edge weights"))?;
                    for tok in l.split_whitespace() {
                        let v = tok
                            .parse::<f64>()
                            .map_err(|_| ParseError::new(ln, key, format!("bad weight `{tok}`")))?;
                        if v < 0.0 || v.fract() != 0.0 {
                            return Err(ParseError::new(ln, key, format!("weight `{tok}` is not a nonnegative integer")));
                        }
                        vals.push(v as i64);
                    }
                    if vals.len() > want {
                        return Err(ParseError::new(ln, key, "too many edge weights"));
                    }
                }
                flat_weights = Some((lineno, vals));
            }
            "GTSP_SET_SECTION" => {
                let m = set_count
                    .ok_or_else(|| ParseError::new(lineno, key, "GTSP_SETS must precede the section"))?;
                let n = dimension
                    .ok_or_else(|| ParseError::new(lineno, key, "DIMENSION must precede the section"))?;
                let mut out = vec![None; m];
                let mut toks: Vec<(usize, i64)> = Vec::new();
                let mut done = 0;
                let mut current: Option<(usize, usize, Vec<usize>)> = None;
                while done < m {
                    if toks.is_empty() {
                        let (ln, l) = next_data_line(&lines, &mut pos)
                            .ok_or_else(|| ParseError::new(lineno, key, "unexpected end of sets"))?;
                        for tok in l.split_whitespace().rev() {
                            let v = tok
                                .parse::<i64>()
                                .map_err(|_| ParseError::new(ln, key, format!("bad set entry `{tok}`")))?;
                            toks.push((ln, v));
                        }
                        continue;
                    }
                    let (ln, v) = toks.pop().unwrap();
                    match current.take() {
                        None => {
                            if v < 1 || v as usize > m {
                                return Err(ParseError::new(ln, key, format!("set id {v} out of range")));
                            }
                            current = Some((ln, v as usize, Vec::new()));
                        }
                        Some((sl, id, mut members)) => {
                            if v == -1 {
                                if out[id - 1].is_some() {
                                    return Err(ParseError::new(sl, key, format!("duplicate set id {id}")));
                                }
                                out[id - 1] = Some(members);
                                done += 1;
                            } else {
                                if v < 1 || v as usize > n {
                                    return Err(ParseError::new(ln, key, format!("vertex {v} out of range")));
                                }
                                members.push(v as usize - 1);
                                current = Some((sl, id, members));
                            }
                        }
                    }
                }
                if current.is_some() || !toks.is_empty() {
                    return Err(ParseError::new(lineno, key, "set not terminated by -1"));
                }
                sets = Some(out.into_iter().map(|s| s.unwrap()).collect());
            }
            k if KEYWORDS_IGNORED.contains(&k) => {}
            other => return Err(ParseError::new(lineno, other, "unknown keyword")),
        }
    }

    let name = name.ok_or_else(|| ParseError::new(0, "NAME", "missing"))?;
    let dimension = dimension.ok_or_else(|| ParseError::new(0, "DIMENSION", "missing"))?;
    let edge_weight_type = weight_type.ok_or_else(|| ParseError::new(0, "EDGE_WEIGHT_TYPE", "missing"))?;
    let sets = sets.ok_or_else(|| ParseError::new(0, "GTSP_SET_SECTION", "missing"))?;

    let matrix = match edge_weight_type {
        EdgeWeightType::Explicit => {
            let (ln, flat) = flat_weights.ok_or_else(|| ParseError::new(0, "EDGE_WEIGHT_SECTION", "missing"))?;
            let fmt = weight_format.unwrap();
            Some(unflatten(&flat, dimension, fmt).map_err(|m| ParseError::new(ln, "EDGE_WEIGHT_SECTION", m))?)
        }
        _ => {
            if coords.is_none() {
                return Err(ParseError::new(0, "NODE_COORD_SECTION", "missing"));
            }
            None
        }
    };

    let raw = RawGtspInstance {
        name,
        comment,
        dimension,
        edge_weight_type,
        edge_weight_format: weight_format,
        coords,
        matrix,
        sets,
    };
    raw.check_partition()
        .map_err(|m| ParseError::new(0, "GTSP_SET_SECTION", m))?;
    Ok(raw)
}

fn required<'a>(value: Option<&'a str>, line: usize, key: &str) -> Result<&'a str, ParseError> {
    match value {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(ParseError::new(line, key, "missing value")),
    }
}

fn parse_usize(s: &str, line: usize, key: &str) -> Result<usize, ParseError> {
    s.parse()
        .map_err(|_| ParseError::new(line, key, format!("expected a count, got `{s}`")))
}

fn parse_f64(s: &str, line: usize, key: &str) -> Result<f64, ParseError> {
    s.parse()
        .map_err(|_| ParseError::new(line, key, format!("expected a number, got `{s}`")))
}

fn next_data_line<'a>(lines: &[&'a str], pos: &mut usize) -> Option<(usize, &'a str)> {
    while *pos < lines.len() {
        let l = lines[*pos].trim();
        *pos += 1;
        if !l.is_empty() {
            return Some((*pos, l));
        }
    }
    None
}

fn unflatten(flat: &[i64], n: usize, fmt: EdgeWeightFormat) -> Result<Vec<Vec<i64>>, String> {
    let mut m = vec![vec![0i64; n]; n];
    let mut it = flat.iter().copied();
    match fmt {
        EdgeWeightFormat::FullMatrix => {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v = it.next().unwrap();
                }
            }
            for i in 0..n {
                for j in 0..i {
                    if m[i][j] != m[j][i] {
                        return Err(format!("matrix not symmetric at ({}, {})", i + 1, j + 1));
                    }
                }
            }
        }
        EdgeWeightFormat::LowerDiagRow => {
            for i in 0..n {
                for j in 0..=i {
                    let v = it.next().unwrap();
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
        }
        EdgeWeightFormat::UpperRow => {
            for i in 0..n {
                for j in i + 1..n {
                    let v = it.next().unwrap();
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
        }
    }
    Ok(m)
}

impl RawGtspInstance {
    fn check_partition(&self) -> Result<(), String> {
        let mut seen = vec![false; self.dimension];
        for set in &self.sets {
            if set.is_empty() {
                return Err("empty set".into());
            }
            for &v in set {
                if v >= self.dimension {
                    return Err(format!("vertex {} out of range", v + 1));
                }
                if seen[v] {
                    return Err(format!("sets not disjoint: vertex {} appears twice", v + 1));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(format!("sets do not cover vertex {}", v + 1));
        }
        if let Some(c) = &self.coords {
            if c.len() != self.dimension {
                return Err("coordinate count differs from dimension".into());
            }
        }
        Ok(())
    }

    /// TSPLIB distance between two 0-indexed vertices of the file.
    pub fn distance(&self, i: usize, j: usize) -> i64 {
        match self.edge_weight_type {
            EdgeWeightType::Euc2d => {
                let c = self.coords.as_ref().unwrap();
                euc_2d(c[i], c[j])
            }
            EdgeWeightType::Geo => {
                let c = self.coords.as_ref().unwrap();
                if i == j {
                    0
                } else {
                    geo(c[i], c[j])
                }
            }
            EdgeWeightType::Explicit => self.matrix.as_ref().unwrap()[i][j],
        }
    }

    /// Writes the instance back in GTSP-lib syntax.
    pub fn to_gtsp_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "NAME : {}", self.name).unwrap();
        writeln!(s, "TYPE : GTSP").unwrap();
        if let Some(c) = &self.comment {
            for l in c.split('\n') {
                writeln!(s, "COMMENT : {l}").unwrap();
            }
        }
        writeln!(s, "DIMENSION : {}", self.dimension).unwrap();
        writeln!(s, "GTSP_SETS : {}", self.sets.len()).unwrap();
        writeln!(s, "EDGE_WEIGHT_TYPE : {}", self.edge_weight_type.keyword()).unwrap();
        if let Some(f) = self.edge_weight_format {
            writeln!(s, "EDGE_WEIGHT_FORMAT : {}", f.keyword()).unwrap();
        }
        if let Some(coords) = &self.coords {
            writeln!(s, "NODE_COORD_SECTION").unwrap();
            for (i, (x, y)) in coords.iter().enumerate() {
                writeln!(s, "{} {:?} {:?}", i + 1, x, y).unwrap();
            }
        }
        if let (Some(m), Some(f)) = (&self.matrix, self.edge_weight_format) {
            writeln!(s, "EDGE_WEIGHT_SECTION").unwrap();
            let n = self.dimension;
            for i in 0..n {
                let row: Vec<String> = match f {
                    EdgeWeightFormat::FullMatrix => (0..n).map(|j| m[i][j].to_string()).collect(),
                    EdgeWeightFormat::LowerDiagRow => (0..=i).map(|j| m[i][j].to_string()).collect(),
                    EdgeWeightFormat::UpperRow => (i + 1..n).map(|j| m[i][j].to_string()).collect(),
                };
                if !row.is_empty() {
                    writeln!(s, "{}", row.join(" ")).unwrap();
                }
            }
        }
        writeln!(s, "GTSP_SET_SECTION:").unwrap();
        for (h, set) in self.sets.iter().enumerate() {
            write!(s, "{}", h + 1).unwrap();
            for v in set {
                write!(s, " {}", v + 1).unwrap();
            }
            writeln!(s, " -1").unwrap();
        }
        writeln!(s, "EOF").unwrap();
        s
    }
}

/// TSPLIB `EUC_2D`: Euclidean distance rounded to the nearest integer.
pub fn euc_2d(a: (f64, f64), b: (f64, f64)) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    ((dx * dx + dy * dy).sqrt() + 0.5).floor() as i64
}

// the truncated value is part of the GEO distance definition
#[allow(clippy::approx_constant)]
const GEO_PI: f64 = 3.141592;
const EARTH_RADIUS: f64 = 6378.388;

fn geo_radians(v: f64) -> f64 {
    let deg = v.trunc();
    let min = v - deg;
    GEO_PI * (deg + 5.0 * min / 3.0) / 180.0
}

/// TSPLIB `GEO`: coordinates are `DDD.MM` latitude/longitude pairs.
pub fn geo(a: (f64, f64), b: (f64, f64)) -> i64 {
    let (lat_a, lon_a) = (geo_radians(a.0), geo_radians(a.1));
    let (lat_b, lon_b) = (geo_radians(b.0), geo_radians(b.1));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    (EARTH_RADIUS * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0) as i64
}

/// A multi-depot instance.
///
/// Vertices are numbered locally: depots occupy `0..k` and targets `k..k+n`.
/// `depot_ids` / `target_ids` map local numbers back to the 1-based vertex
/// ids of the source file.  Targets are referred to by their target index
/// `0..n` (local vertex `k + t`) wherever only targets make sense.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    depot_ids: Vec<usize>,
    target_ids: Vec<usize>,
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<usize>,
    cost: Vec<i64>,
    triangle: bool,
    dropped_clusters: Vec<usize>,
}

impl Instance {
    /// Builds an instance from explicit parts.  `cost(u, v)` is queried for
    /// local vertices and must be symmetric and nonnegative.
    pub fn new(
        name: impl Into<String>,
        depot_ids: Vec<usize>,
        target_ids: Vec<usize>,
        clusters: Vec<Vec<usize>>,
        cost: impl Fn(usize, usize) -> i64,
    ) -> Result<Instance, InstanceError> {
        let k = depot_ids.len();
        let n = target_ids.len();
        if k == 0 {
            return Err(InstanceError::Invalid("no depots".into()));
        }
        if n == 0 {
            return Err(InstanceError::Invalid("no targets".into()));
        }
        let mut cluster_of = vec![usize::MAX; n];
        for (h, c) in clusters.iter().enumerate() {
            if c.is_empty() {
                return Err(InstanceError::Invalid(format!("cluster {h} is empty")));
            }
            for &t in c {
                if t >= n {
                    return Err(InstanceError::Invalid(format!("cluster {h} names target {t}")));
                }
                if cluster_of[t] != usize::MAX {
                    return Err(InstanceError::Invalid(format!("target {t} in two clusters")));
                }
                cluster_of[t] = h;
            }
        }
        if let Some(t) = cluster_of.iter().position(|&h| h == usize::MAX) {
            return Err(InstanceError::Invalid(format!("target {t} in no cluster")));
        }
        let nv = k + n;
        let mut table = vec![0i64; nv * nv];
        for u in 0..nv {
            for v in 0..nv {
                if u == v || (u < k && v < k) {
                    continue;
                }
                let c = cost(u, v);
                if c < 0 {
                    return Err(InstanceError::Invalid(format!("negative cost on ({u}, {v})")));
                }
                table[u * nv + v] = c;
            }
        }
        for u in 0..nv {
            for v in 0..u {
                if table[u * nv + v] != table[v * nv + u] {
                    return Err(InstanceError::Invalid(format!("asymmetric cost on ({v}, {u})")));
                }
            }
        }
        let mut inst = Instance {
            name: name.into(),
            depot_ids,
            target_ids,
            clusters,
            cluster_of,
            cost: table,
            triangle: false,
            dropped_clusters: Vec::new(),
        };
        inst.triangle = inst.compute_triangle();
        Ok(inst)
    }

    fn compute_triangle(&self) -> bool {
        let k = self.num_depots();
        let nv = self.num_vertices();
        for u in 0..nv {
            for v in 0..nv {
                if u == v || (u < k && v < k) {
                    continue;
                }
                for w in k..nv {
                    if w == u || w == v {
                        continue;
                    }
                    // (u, w, v) path versus the direct edge (u, v)
                    if self.c(u, w) + self.c(w, v) < self.c(u, v) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_depots(&self) -> usize {
        self.depot_ids.len()
    }

    pub fn num_targets(&self) -> usize {
        self.target_ids.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.depot_ids.len() + self.target_ids.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// Local vertex number of target `t`.
    #[inline]
    pub fn target_vertex(&self, t: usize) -> usize {
        self.depot_ids.len() + t
    }

    #[inline]
    pub fn is_depot(&self, v: usize) -> bool {
        v < self.depot_ids.len()
    }

    pub fn depot_ids(&self) -> &[usize] {
        &self.depot_ids
    }

    pub fn target_ids(&self) -> &[usize] {
        &self.target_ids
    }

    /// File id (1-based) of a local vertex.
    pub fn vertex_id(&self, v: usize) -> usize {
        let k = self.num_depots();
        if v < k {
            self.depot_ids[v]
        } else {
            self.target_ids[v - k]
        }
    }

    /// Local vertex with the given file id.
    pub fn vertex_by_id(&self, id: usize) -> Option<usize> {
        if let Some(d) = self.depot_ids.iter().position(|&x| x == id) {
            return Some(d);
        }
        self.target_ids
            .iter()
            .position(|&x| x == id)
            .map(|t| self.target_vertex(t))
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster(&self, h: usize) -> &[usize] {
        &self.clusters[h]
    }

    pub fn cluster_of(&self, t: usize) -> usize {
        self.cluster_of[t]
    }

    /// True if target `t` is alone in its cluster (the set `W`).
    pub fn in_singleton_cluster(&self, t: usize) -> bool {
        self.clusters[self.cluster_of[t]].len() == 1
    }

    pub fn singleton_targets(&self) -> Vec<usize> {
        (0..self.num_targets())
            .filter(|&t| self.in_singleton_cluster(t))
            .collect()
    }

    pub fn triangle(&self) -> bool {
        self.triangle
    }

    /// File order indices of GTSP sets that vanished because all of their
    /// members became depots.
    pub fn dropped_clusters(&self) -> &[usize] {
        &self.dropped_clusters
    }

    /// Cost between two local vertices; unchecked.
    #[inline]
    pub fn c(&self, u: usize, v: usize) -> i64 {
        self.cost[u * self.num_vertices() + v]
    }

    /// Cost of an edge of `E` between two local vertices.
    pub fn edge_cost(&self, u: usize, v: usize) -> Result<i64, InstanceError> {
        let nv = self.num_vertices();
        if u >= nv {
            return Err(InstanceError::UnknownVertex(u));
        }
        if v >= nv {
            return Err(InstanceError::UnknownVertex(v));
        }
        if u == v || (self.is_depot(u) && self.is_depot(v)) {
            return Err(InstanceError::DepotPair(self.vertex_id(u), self.vertex_id(v)));
        }
        Ok(self.c(u, v))
    }

    /// Instance with only the listed targets (target indices) kept.  Clusters
    /// that lose every member are dropped.
    pub fn restrict_targets(&self, keep: &[usize]) -> Instance {
        let k = self.num_depots();
        let mut new_index = vec![usize::MAX; self.num_targets()];
        for (i, &t) in keep.iter().enumerate() {
            new_index[t] = i;
        }
        let clusters: Vec<Vec<usize>> = self
            .clusters
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|&&t| new_index[t] != usize::MAX)
                    .map(|&t| new_index[t])
                    .collect::<Vec<_>>()
            })
            .filter(|c: &Vec<usize>| !c.is_empty())
            .collect();
        let old_vertex = |v: usize| if v < k { v } else { k + keep[v - k] };
        let mut inst = Instance::new(
            self.name.clone(),
            self.depot_ids.clone(),
            keep.iter().map(|&t| self.target_ids[t]).collect(),
            clusters,
            |u, v| self.c(old_vertex(u), old_vertex(v)),
        )
        .expect("restriction of a valid instance is valid");
        inst.dropped_clusters = self.dropped_clusters.clone();
        inst
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} depots, {} targets, {} clusters",
            self.name,
            self.num_depots(),
            self.num_targets(),
            self.num_clusters()
        )
    }
}

/// Turns the first `depots` vertices of the file into depots.
pub fn derive_gmdtsp(raw: &RawGtspInstance, depots: usize) -> Result<Instance, InstanceError> {
    if depots == 0 || depots >= raw.dimension {
        return Err(InstanceError::DepotCount {
            depots,
            dimension: raw.dimension,
        });
    }
    let n = raw.dimension - depots;
    let mut clusters = Vec::new();
    let mut dropped = Vec::new();
    for (h, set) in raw.sets.iter().enumerate() {
        let members: Vec<usize> = set
            .iter()
            .filter(|&&v| v >= depots)
            .map(|&v| v - depots)
            .collect();
        if members.is_empty() {
            log::warn!(
                "{}: set {} contains only depots and is dropped",
                raw.name,
                h + 1
            );
            dropped.push(h);
        } else {
            clusters.push(members);
        }
    }
    let mut inst = Instance::new(
        format!("{}-{}", raw.name, depots),
        (1..=depots).collect(),
        (depots + 1..=raw.dimension).collect(),
        clusters,
        |u, v| raw.distance(u, v),
    )?;
    debug_assert_eq!(inst.num_targets(), n);
    inst.dropped_clusters = dropped;
    Ok(inst)
}
