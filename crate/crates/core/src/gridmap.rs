//! Grid workspaces: parsing, cell classification and shortest-distance tables.
//!
//! Maps follow the MovingAI `.map` framing. The warehouse dialect extends the
//! character set with workstation (`w`) and endpoint (`e`) cells.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side length of one grid cell in meters.
pub const CELL_PITCH: f64 = 1.0;

/// Marker for cells that cannot reach the goal of a distance table.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("malformed map header: {0}")]
    MalformedHeader(String),
    #[error("unknown cell character {ch:?} at row {row}, col {col}")]
    UnknownCellChar { ch: char, row: usize, col: usize },
    #[error("map has no traversable cells")]
    EmptyMap,
    #[error("goal {0} is not traversable")]
    GoalOnObstacle(Cell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub const fn new(row: u32, col: u32) -> Self {
        Cell { row, col }
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Heading of an agent. North points towards row 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::North,
        Orientation::East,
        Orientation::South,
        Orientation::West,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Orientation {
        Self::ALL[i % 4]
    }

    /// Quarter turn clockwise (North -> East).
    pub fn clockwise(self) -> Orientation {
        Self::from_index(self.index() + 1)
    }

    pub fn counter_clockwise(self) -> Orientation {
        Self::from_index(self.index() + 3)
    }

    pub fn opposite(self) -> Orientation {
        Self::from_index(self.index() + 2)
    }

    /// (row, col) offset of one step in this heading.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Orientation::North => (-1, 0),
            Orientation::East => (0, 1),
            Orientation::South => (1, 0),
            Orientation::West => (0, -1),
        }
    }

    /// Heading in the world frame: East = 0, counter-clockwise positive.
    pub fn radians(self) -> f64 {
        use std::f64::consts::{FRAC_PI_2, PI};
        match self {
            Orientation::East => 0.0,
            Orientation::North => FRAC_PI_2,
            Orientation::West => PI,
            Orientation::South => 3.0 * FRAC_PI_2,
        }
    }

    /// Heading that moves from `from` to the adjacent cell `to`.
    pub fn between(from: Cell, to: Cell) -> Option<Orientation> {
        let dr = to.row as i64 - from.row as i64;
        let dc = to.col as i64 - from.col as i64;
        match (dr, dc) {
            (-1, 0) => Some(Orientation::North),
            (0, 1) => Some(Orientation::East),
            (1, 0) => Some(Orientation::South),
            (0, -1) => Some(Orientation::West),
            _ => None,
        }
    }

    /// Signed number of clockwise quarter turns from `self` to `target`, in (-2, 2].
    pub fn quarter_turns_to(self, target: Orientation) -> i32 {
        match (target.index() + 4 - self.index()) % 4 {
            0 => 0,
            1 => 1,
            2 => 2,
            _ => -1,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Orientation::North => 'N',
            Orientation::East => 'E',
            Orientation::South => 'S',
            Orientation::West => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Orientation> {
        match c {
            'N' => Some(Orientation::North),
            'E' => Some(Orientation::East),
            'S' => Some(Orientation::South),
            'W' => Some(Orientation::West),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Free,
    Obstacle,
    Workstation,
    Endpoint,
}

impl CellKind {
    pub fn is_traversable(self) -> bool {
        self != CellKind::Obstacle
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Movingai,
    Warehouse,
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "movingai" => Ok(Dialect::Movingai),
            "warehouse" => Ok(Dialect::Warehouse),
            other => Err(format!("unknown map dialect `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: u32,
    height: u32,
    kinds: Vec<CellKind>,
}

impl GridMap {
    /// Build a map from row-major cell kinds.
    pub fn from_kinds(width: u32, height: u32, kinds: Vec<CellKind>) -> Result<Self, MapError> {
        if kinds.len() != (width as usize) * (height as usize) {
            return Err(MapError::MalformedHeader(format!(
                "{} cells for a {}x{} map",
                kinds.len(),
                height,
                width
            )));
        }
        if !kinds.iter().any(|k| k.is_traversable()) {
            return Err(MapError::EmptyMap);
        }
        Ok(GridMap {
            width,
            height,
            kinds,
        })
    }

    /// An obstacle-free map.
    pub fn empty(width: u32, height: u32) -> Self {
        GridMap::from_kinds(width, height, vec![CellKind::Free; (width * height) as usize])
            .expect("non-degenerate empty map")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn num_cells(&self) -> usize {
        self.kinds.len()
    }

    #[inline]
    pub fn index(&self, c: Cell) -> usize {
        c.row as usize * self.width as usize + c.col as usize
    }

    #[inline]
    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(
            (index / self.width as usize) as u32,
            (index % self.width as usize) as u32,
        )
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn kind(&self, c: Cell) -> CellKind {
        self.kinds[self.index(c)]
    }

    pub fn is_traversable(&self, c: Cell) -> bool {
        self.contains(c) && self.kinds[self.index(c)].is_traversable()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.kinds.len()).map(move |i| self.cell(i))
    }

    pub fn traversable_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells().filter(move |c| self.kind(*c).is_traversable())
    }

    pub fn cells_of_kind(&self, kind: CellKind) -> Vec<Cell> {
        self.cells().filter(|c| self.kind(*c) == kind).collect()
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.kinds.iter().filter(|k| **k == kind).count()
    }

    /// The cell one step from `c` in heading `o`, if it is on the map.
    #[inline]
    pub fn step(&self, c: Cell, o: Orientation) -> Option<Cell> {
        let (dr, dc) = o.delta();
        let r = c.row as i64 + dr as i64;
        let col = c.col as i64 + dc as i64;
        if r < 0 || col < 0 || r >= self.height as i64 || col >= self.width as i64 {
            None
        } else {
            Some(Cell::new(r as u32, col as u32))
        }
    }

    /// Traversable 4-neighbors in North, East, South, West order.
    pub fn neighbors(&self, c: Cell) -> Vec<Cell> {
        if !self.is_traversable(c) {
            return Vec::new();
        }
        Orientation::ALL
            .iter()
            .filter_map(|o| self.step(c, *o))
            .filter(|n| self.is_traversable(*n))
            .collect()
    }

    /// The dialect needed to serialize this map losslessly.
    pub fn dialect(&self) -> Dialect {
        if self
            .kinds
            .iter()
            .any(|k| matches!(k, CellKind::Workstation | CellKind::Endpoint))
        {
            Dialect::Warehouse
        } else {
            Dialect::Movingai
        }
    }

    /// Demote every traversable cell outside the largest connected component
    /// to an obstacle. Returns the number of demoted cells.
    pub fn keep_largest_component(&mut self) -> usize {
        let n = self.kinds.len();
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if !self.kinds[start].is_traversable() || component[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            component[start] = id;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                size += 1;
                for nb in self.neighbors(self.cell(i)) {
                    let j = self.index(nb);
                    if component[j] == usize::MAX {
                        component[j] = id;
                        queue.push_back(j);
                    }
                }
            }
            sizes.push(size);
        }
        // first largest wins ties, keeping the choice deterministic
        let Some((keep, _)) = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        else {
            return 0;
        };
        let mut demoted = 0;
        for i in 0..n {
            if self.kinds[i].is_traversable() && component[i] != keep {
                self.kinds[i] = CellKind::Obstacle;
                demoted += 1;
            }
        }
        demoted
    }

    /// Serialize in the MovingAI framing, using the warehouse characters when needed.
    pub fn to_map_string(&self) -> String {
        let mut out = format!(
            "type octile\nheight {}\nwidth {}\nmap\n",
            self.height, self.width
        );
        for row in 0..self.height {
            for col in 0..self.width {
                out.push(match self.kind(Cell::new(row, col)) {
                    CellKind::Free => '.',
                    CellKind::Obstacle => '@',
                    CellKind::Workstation => 'w',
                    CellKind::Endpoint => 'e',
                });
            }
            out.push('\n');
        }
        out
    }
}

fn classify(ch: char, dialect: Dialect) -> Option<CellKind> {
    match (ch, dialect) {
        ('.' | 'G', _) => Some(CellKind::Free),
        ('@' | 'T' | 'O' | 'S' | 'W', _) => Some(CellKind::Obstacle),
        ('e', Dialect::Warehouse) => Some(CellKind::Endpoint),
        ('w', Dialect::Warehouse) => Some(CellKind::Workstation),
        _ => None,
    }
}

fn header_value(line: Option<&str>, key: &str) -> Result<u32, MapError> {
    let line = line.ok_or_else(|| MapError::MalformedHeader(format!("missing `{key}` line")))?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v
            .parse()
            .map_err(|_| MapError::MalformedHeader(format!("bad {key} value `{v}`"))),
        _ => Err(MapError::MalformedHeader(format!(
            "expected `{key} N`, found `{line}`"
        ))),
    }
}

/// Parse a map document without connectivity validation.
pub fn parse_map(text: &str, dialect: Dialect) -> Result<GridMap, MapError> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    match lines.next() {
        Some(l) if l.starts_with("type") => {}
        Some(l) => {
            return Err(MapError::MalformedHeader(format!(
                "expected `type` line, found `{l}`"
            )))
        }
        None => return Err(MapError::EmptyMap),
    }
    let height = header_value(lines.next(), "height")?;
    let width = header_value(lines.next(), "width")?;
    match lines.next() {
        Some("map") => {}
        other => {
            return Err(MapError::MalformedHeader(format!(
                "expected `map`, found {other:?}"
            )))
        }
    }
    if width == 0 || height == 0 {
        return Err(MapError::EmptyMap);
    }
    let mut kinds = Vec::with_capacity((width * height) as usize);
    let mut rows = 0usize;
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if rows == height as usize {
            return Err(MapError::MalformedHeader(format!(
                "more than {height} rows in body"
            )));
        }
        let line = line.trim_end();
        if line.chars().count() != width as usize {
            return Err(MapError::MalformedHeader(format!(
                "row {row} has {} cells, header says {width}",
                line.chars().count()
            )));
        }
        for (col, ch) in line.chars().enumerate() {
            kinds.push(classify(ch, dialect).ok_or(MapError::UnknownCellChar { ch, row, col })?);
        }
        rows += 1;
    }
    if rows != height as usize {
        return Err(MapError::MalformedHeader(format!(
            "header says {height} rows, body has {rows}"
        )));
    }
    GridMap::from_kinds(width, height, kinds)
}

/// Parse and validate: traversable cells outside the largest component are demoted.
pub fn load_map(text: &str, dialect: Dialect) -> Result<GridMap, MapError> {
    let mut map = parse_map(text, dialect)?;
    let demoted = map.keep_largest_component();
    if demoted > 0 {
        log::warn!("demoted {demoted} cells outside the largest connected component");
    }
    Ok(map)
}

/// Unit-step distances from every cell to a fixed goal cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    goal: Cell,
    width: u32,
    dist: Vec<u32>,
}

impl DistanceTable {
    pub fn goal(&self) -> Cell {
        self.goal
    }

    pub fn get(&self, c: Cell) -> Option<u32> {
        let d = self.dist[c.row as usize * self.width as usize + c.col as usize];
        (d != UNREACHABLE).then_some(d)
    }

    /// Raw distance by cell index; `UNREACHABLE` if no path.
    #[inline]
    pub fn at(&self, index: usize) -> u32 {
        self.dist[index]
    }
}

/// Exact 4-connected BFS distances to `goal`.
pub fn bfs_distance(map: &GridMap, goal: Cell) -> Result<DistanceTable, MapError> {
    if !map.is_traversable(goal) {
        return Err(MapError::GoalOnObstacle(goal));
    }
    let mut dist = vec![UNREACHABLE; map.num_cells()];
    let mut queue = VecDeque::new();
    dist[map.index(goal)] = 0;
    queue.push_back(goal);
    while let Some(c) = queue.pop_front() {
        let d = dist[map.index(c)];
        for o in Orientation::ALL {
            if let Some(n) = map.step(c, o) {
                let j = map.index(n);
                if map.kinds[j].is_traversable() && dist[j] == UNREACHABLE {
                    dist[j] = d + 1;
                    queue.push_back(n);
                }
            }
        }
    }
    Ok(DistanceTable {
        goal,
        width: map.width,
        dist,
    })
}

/// Distances over (cell, heading) under the forward / quarter-turn primitive set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationDistanceTable {
    goal: Cell,
    width: u32,
    dist: Vec<u32>,
}

impl RotationDistanceTable {
    pub fn goal(&self) -> Cell {
        self.goal
    }

    pub fn get(&self, c: Cell, o: Orientation) -> Option<u32> {
        let d = self.at(c.row as usize * self.width as usize + c.col as usize, o);
        (d != UNREACHABLE).then_some(d)
    }

    #[inline]
    pub fn at(&self, index: usize, o: Orientation) -> u32 {
        self.dist[index * 4 + o.index()]
    }

    /// Best distance over all headings at a cell.
    pub fn min_over_headings(&self, c: Cell) -> Option<u32> {
        Orientation::ALL.iter().filter_map(|o| self.get(c, *o)).min()
    }
}

/// Backward search from the goal (reached in any heading) over unit-cost
/// forward moves and quarter turns.
pub fn rotation_distance(map: &GridMap, goal: Cell) -> Result<RotationDistanceTable, MapError> {
    if !map.is_traversable(goal) {
        return Err(MapError::GoalOnObstacle(goal));
    }
    let mut dist = vec![UNREACHABLE; map.num_cells() * 4];
    let mut queue = VecDeque::new();
    let gi = map.index(goal);
    for o in Orientation::ALL {
        dist[gi * 4 + o.index()] = 0;
        queue.push_back((goal, o));
    }
    while let Some((c, o)) = queue.pop_front() {
        let d = dist[map.index(c) * 4 + o.index()];
        let ci = map.index(c);
        // predecessors by rotation: same cell, adjacent heading
        for p in [o.clockwise(), o.counter_clockwise()] {
            let k = ci * 4 + p.index();
            if dist[k] == UNREACHABLE {
                dist[k] = d + 1;
                queue.push_back((c, p));
            }
        }
        // predecessor by forward move: one step behind, same heading
        if let Some(prev) = map.step(c, o.opposite()) {
            let pi = map.index(prev);
            if map.kinds[pi].is_traversable() {
                let k = pi * 4 + o.index();
                if dist[k] == UNREACHABLE {
                    dist[k] = d + 1;
                    queue.push_back((prev, o));
                }
            }
        }
    }
    Ok(RotationDistanceTable {
        goal,
        width: map.width,
        dist,
    })
}

/// Lazily computed distance tables, one per goal cell. Shareable across threads.
pub struct DistanceOracle {
    map: std::sync::Arc<GridMap>,
    pebble: Vec<OnceLock<DistanceTable>>,
    rotation: Vec<OnceLock<RotationDistanceTable>>,
}

impl DistanceOracle {
    pub fn new(map: std::sync::Arc<GridMap>) -> Self {
        let n = map.num_cells();
        DistanceOracle {
            map,
            pebble: (0..n).map(|_| OnceLock::new()).collect(),
            rotation: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn map_arc(&self) -> &std::sync::Arc<GridMap> {
        &self.map
    }

    /// Panics if `goal` is not traversable.
    pub fn pebble(&self, goal: Cell) -> &DistanceTable {
        self.pebble[self.map.index(goal)]
            .get_or_init(|| bfs_distance(&self.map, goal).expect("goal must be traversable"))
    }

    /// Panics if `goal` is not traversable.
    pub fn rotation(&self, goal: Cell) -> &RotationDistanceTable {
        self.rotation[self.map.index(goal)]
            .get_or_init(|| rotation_distance(&self.map, goal).expect("goal must be traversable"))
    }

    pub fn distance(&self, from: Cell, to: Cell) -> Option<u32> {
        self.pebble(to).get(from)
    }
}

impl fmt::Debug for DistanceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceOracle")
            .field("width", &self.map.width)
            .field("height", &self.map.height)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(rows: &[&str]) -> String {
        format!(
            "type octile\nheight {}\nwidth {}\nmap\n{}\n",
            rows.len(),
            rows[0].len(),
            rows.join("\n")
        )
    }

    #[test]
    fn parses_small_movingai_map() {
        let map = parse_map(&doc(&[".@", ".."]), Dialect::Movingai).unwrap();
        assert_eq!(map.count(CellKind::Free), 3);
        assert_eq!(map.count(CellKind::Obstacle), 1);
        assert_eq!(map.kind(Cell::new(0, 1)), CellKind::Obstacle);
    }

    #[test]
    fn empty_32_is_all_free() {
        let rows: Vec<String> = (0..32).map(|_| ".".repeat(32)).collect();
        let refs: Vec<&str> = rows.iter().map(|s| s.as_str()).collect();
        let map = parse_map(&doc(&refs), Dialect::Movingai).unwrap();
        assert_eq!(map.count(CellKind::Free), 1024);
        assert_eq!(map.count(CellKind::Obstacle), 0);
    }

    #[test]
    fn header_row_mismatch_is_malformed() {
        let text = "type octile\nheight 3\nwidth 2\nmap\n..\n..\n";
        assert!(matches!(
            parse_map(text, Dialect::Movingai),
            Err(MapError::MalformedHeader(_))
        ));
    }

    #[test]
    fn unknown_chars_and_dialects() {
        let text = doc(&[".e", "w."]);
        assert!(matches!(
            parse_map(&text, Dialect::Movingai),
            Err(MapError::UnknownCellChar { ch: 'e', .. })
        ));
        let map = parse_map(&text, Dialect::Warehouse).unwrap();
        assert_eq!(map.kind(Cell::new(0, 1)), CellKind::Endpoint);
        assert_eq!(map.kind(Cell::new(1, 0)), CellKind::Workstation);
        assert_eq!(map.dialect(), Dialect::Warehouse);
    }

    #[test]
    fn all_obstacles_is_empty_map() {
        assert_eq!(
            parse_map(&doc(&["@@", "@@"]), Dialect::Movingai),
            Err(MapError::EmptyMap)
        );
    }

    #[test]
    fn neighbor_counts() {
        let map = GridMap::empty(5, 5);
        assert_eq!(map.neighbors(Cell::new(2, 2)).len(), 4);
        assert_eq!(
            map.neighbors(Cell::new(0, 0)),
            vec![Cell::new(0, 1), Cell::new(1, 0)]
        );
        let walled = parse_map(&doc(&[".@.", "@.@", ".@."]), Dialect::Movingai).unwrap();
        assert!(walled.neighbors(Cell::new(1, 1)).is_empty());
        assert!(walled.neighbors(Cell::new(0, 1)).is_empty());
    }

    #[test]
    fn neighbor_order_is_nesw() {
        let map = GridMap::empty(3, 3);
        assert_eq!(
            map.neighbors(Cell::new(1, 1)),
            vec![
                Cell::new(0, 1),
                Cell::new(1, 2),
                Cell::new(2, 1),
                Cell::new(1, 0)
            ]
        );
    }

    #[test]
    fn bfs_examples() {
        let map = GridMap::empty(8, 8);
        let t = bfs_distance(&map, Cell::new(0, 0)).unwrap();
        assert_eq!(t.get(Cell::new(3, 4)), Some(7));
        assert_eq!(t.get(Cell::new(0, 0)), Some(0));
        let sealed = parse_map(&doc(&["..@.", "..@.", "@@@.", "...."]), Dialect::Movingai).unwrap();
        let t = bfs_distance(&sealed, Cell::new(0, 0)).unwrap();
        assert_eq!(t.get(Cell::new(3, 3)), None);
        assert_eq!(
            bfs_distance(&sealed, Cell::new(0, 2)),
            Err(MapError::GoalOnObstacle(Cell::new(0, 2)))
        );
    }

    #[test]
    fn rotation_examples() {
        let map = GridMap::empty(4, 4);
        let goal = Cell::new(1, 1);
        let t = rotation_distance(&map, goal).unwrap();
        for o in Orientation::ALL {
            assert_eq!(t.get(goal, o), Some(0));
        }
        let east = Cell::new(1, 2);
        assert_eq!(t.get(east, Orientation::West), Some(1));
        assert_eq!(t.get(east, Orientation::North), Some(2));
        assert_eq!(t.get(east, Orientation::East), Some(3));
    }

    #[test]
    fn largest_component_kept() {
        let mut map = parse_map(&doc(&["..@.", "..@.", "@@@.", "...."]), Dialect::Movingai).unwrap();
        let demoted = map.keep_largest_component();
        assert_eq!(demoted, 4);
        assert!(!map.is_traversable(Cell::new(0, 0)));
        assert!(map.is_traversable(Cell::new(3, 0)));
    }

    #[test]
    fn orientation_turns() {
        use Orientation::*;
        assert_eq!(North.quarter_turns_to(East), 1);
        assert_eq!(North.quarter_turns_to(West), -1);
        assert_eq!(North.quarter_turns_to(South), 2);
        assert_eq!(East.quarter_turns_to(East), 0);
        assert_eq!(Orientation::between(Cell::new(1, 1), Cell::new(0, 1)), Some(North));
        assert_eq!(Orientation::between(Cell::new(1, 1), Cell::new(2, 2)), None);
    }
}
