//! Maze environment: cells, traps, gates, exits and hand-on-wall geometry.
//!
//! Text format, one row per line:
//!
//! | char | cell |
//! |------|------|
//! | `#`  | wall |
//! | `.`  | path |
//! | `T`  | active red square (token / trap) |
//! | `t`  | deactivated red square |
//! | `G`  | gate |
//! | `S`  | start |
//! | `E`  | exit |

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SimRng;

/// Grid coordinate. `x` is the column, `y` the row, both from the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Position {
    pub x: usize,
    pub y: usize,
}

impl Position {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Position) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl From<(usize, usize)> for Position {
    fn from((x, y): (usize, usize)) -> Self {
        Self { x, y }
    }
}

impl From<Position> for (usize, usize) {
    fn from(p: Position) -> Self {
        (p.x, p.y)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    pub fn left(self) -> Self {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    pub fn right(self) -> Self {
        self.left().reverse()
    }

    pub fn reverse(self) -> Self {
        match self {
            Heading::North => Heading::South,
            Heading::South => Heading::North,
            Heading::East => Heading::West,
            Heading::West => Heading::East,
        }
    }

    /// Neighbouring coordinate in this direction, `None` when it would be negative.
    pub fn step(self, from: Position) -> Option<Position> {
        match self {
            Heading::North => from.y.checked_sub(1).map(|y| Position::new(from.x, y)),
            Heading::South => Some(Position::new(from.x, from.y + 1)),
            Heading::West => from.x.checked_sub(1).map(|x| Position::new(x, from.y)),
            Heading::East => Some(Position::new(from.x + 1, from.y)),
        }
    }

    /// Heading that moves `from` onto an adjacent `to`.
    pub fn towards(from: Position, to: Position) -> Option<Heading> {
        Heading::ALL.into_iter().find(|h| h.step(from) == Some(to))
    }
}

/// Which hand stays on the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hand {
    Left,
    Right,
}

impl Hand {
    pub fn turn(self, heading: Heading) -> Heading {
        match self {
            Hand::Left => heading.left(),
            Hand::Right => heading.right(),
        }
    }

    pub fn opposite(self) -> Hand {
        match self {
            Hand::Left => Hand::Right,
            Hand::Right => Hand::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CellKind {
    Path,
    Wall,
    RedSquare { active: bool },
    Gate,
    Exit,
    Start,
}

impl CellKind {
    pub fn is_traversable(self) -> bool {
        self != CellKind::Wall
    }

    pub fn is_active_red(self) -> bool {
        self == CellKind::RedSquare { active: true }
    }

    pub fn to_char(self) -> char {
        match self {
            CellKind::Wall => '#',
            CellKind::Path => '.',
            CellKind::RedSquare { active: true } => 'T',
            CellKind::RedSquare { active: false } => 't',
            CellKind::Gate => 'G',
            CellKind::Start => 'S',
            CellKind::Exit => 'E',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            '#' => CellKind::Wall,
            '.' => CellKind::Path,
            'T' => CellKind::RedSquare { active: true },
            't' => CellKind::RedSquare { active: false },
            'G' => CellKind::Gate,
            'S' => CellKind::Start,
            'E' => CellKind::Exit,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MazeError {
    #[error("maze text is empty")]
    Empty,
    #[error("row {line} has {found} cells, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("maze has no start cell")]
    NoStart,
    #[error("maze has no exit cell")]
    NoExit,
    #[error("unknown character {ch:?} at {position}")]
    UnknownChar { position: Position, ch: char },
    #[error("maze {width}x{height} is too small, both sides must be at least 5")]
    TooSmall { width: usize, height: usize },
    #[error("maze sides must be odd, got {width}x{height}")]
    EvenDimension { width: usize, height: usize },
    #[error("cannot place {requested} tokens and gates on {available} free cells")]
    PlacementOverflow { requested: usize, available: usize },
    #[error("position {0} is outside the maze")]
    OutOfBounds(Position),
}

/// Which cells a route may pass through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Passability {
    /// Anything that is not a wall.
    Open,
    /// Open cells except active red squares.
    AvoidTraps,
}

/// Result of asking for the next step of a route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteStep {
    Arrived,
    Next(Position),
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Maze {
    width: usize,
    height: usize,
    cells: Vec<CellKind>,
    starts: Vec<Position>,
    exits: Vec<Position>,
}

impl Maze {
    /// Builds a maze from a row-major grid and checks its invariants.
    pub fn from_cells(width: usize, height: usize, cells: Vec<CellKind>) -> Result<Self, MazeError> {
        if width == 0 || height == 0 {
            return Err(MazeError::Empty);
        }
        assert_eq!(cells.len(), width * height, "grid size mismatch");
        let mut starts = Vec::new();
        let mut exits = Vec::new();
        for (i, kind) in cells.iter().enumerate() {
            let pos = Position::new(i % width, i / width);
            match kind {
                CellKind::Start => starts.push(pos),
                CellKind::Exit => exits.push(pos),
                _ => {}
            }
        }
        if starts.is_empty() {
            return Err(MazeError::NoStart);
        }
        if exits.is_empty() {
            return Err(MazeError::NoExit);
        }
        Ok(Self {
            width,
            height,
            cells,
            starts,
            exits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn starts(&self) -> &[Position] {
        &self.starts
    }

    pub fn exits(&self) -> &[Position] {
        &self.exits
    }

    pub fn in_bounds(&self, pos: Position) -> bool {
        pos.x < self.width && pos.y < self.height
    }

    pub fn get(&self, pos: Position) -> Option<CellKind> {
        self.in_bounds(pos).then(|| self.cells[pos.y * self.width + pos.x])
    }

    /// Out-of-bounds reads as wall.
    pub fn kind(&self, pos: Position) -> CellKind {
        self.get(pos).unwrap_or(CellKind::Wall)
    }

    pub fn is_open(&self, pos: Position) -> bool {
        self.kind(pos).is_traversable()
    }

    fn passable(&self, pos: Position, rule: Passability) -> bool {
        let kind = self.kind(pos);
        match rule {
            Passability::Open => kind.is_traversable(),
            Passability::AvoidTraps => kind.is_traversable() && !kind.is_active_red(),
        }
    }

    /// Replaces one cell. Start/exit lists follow the new kind.
    pub fn set_cell(&mut self, pos: Position, kind: CellKind) -> Result<(), MazeError> {
        if !self.in_bounds(pos) {
            return Err(MazeError::OutOfBounds(pos));
        }
        self.cells[pos.y * self.width + pos.x] = kind;
        self.starts.retain(|p| *p != pos);
        self.exits.retain(|p| *p != pos);
        match kind {
            CellKind::Start => {
                self.starts.push(pos);
                self.starts.sort_by_key(|p| (p.y, p.x));
            }
            CellKind::Exit => {
                self.exits.push(pos);
                self.exits.sort_by_key(|p| (p.y, p.x));
            }
            _ => {}
        }
        Ok(())
    }

    /// Turns an active red square into a deactivated one. Returns whether it was active.
    pub fn deactivate_red(&mut self, pos: Position) -> Result<bool, MazeError> {
        match self.get(pos) {
            None => Err(MazeError::OutOfBounds(pos)),
            Some(kind) if kind.is_active_red() => {
                self.set_cell(pos, CellKind::RedSquare { active: false })?;
                Ok(true)
            }
            Some(_) => Ok(false),
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Position::new(x, y)))
    }

    pub fn count(&self, pred: impl Fn(CellKind) -> bool) -> usize {
        self.cells.iter().filter(|k| pred(**k)).count()
    }

    pub fn active_reds(&self) -> usize {
        self.count(|k| k == CellKind::RedSquare { active: true })
    }

    pub fn inactive_reds(&self) -> usize {
        self.count(|k| k == CellKind::RedSquare { active: false })
    }

    pub fn open_cells(&self) -> usize {
        self.count(CellKind::is_traversable)
    }

    /// Orthogonal neighbours that are inside the grid.
    pub fn neighbours(&self, pos: Position) -> impl Iterator<Item = Position> + '_ {
        Heading::ALL
            .into_iter()
            .filter_map(move |h| h.step(pos))
            .filter(move |p| self.in_bounds(*p))
    }

    /// Breadth-first distances from `from` over non-wall cells, row-major.
    pub fn bfs_distances(&self, from: Position) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.cells.len()];
        if !self.is_open(from) {
            return dist;
        }
        let mut queue = VecDeque::new();
        dist[from.y * self.width + from.x] = Some(0);
        queue.push_back(from);
        while let Some(p) = queue.pop_front() {
            let d = dist[p.y * self.width + p.x].unwrap_or(0);
            for n in self.neighbours(p) {
                let idx = n.y * self.width + n.x;
                if dist[idx].is_none() && self.is_open(n) {
                    dist[idx] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    pub fn distance(&self, from: Position, to: Position) -> Option<usize> {
        if !self.in_bounds(to) {
            return None;
        }
        self.bfs_distances(from)[to.y * self.width + to.x]
    }

    /// Shortest distance from `from` to the nearest exit.
    pub fn exit_distance(&self, from: Position) -> Option<usize> {
        let dist = self.bfs_distances(from);
        self.exits
            .iter()
            .filter_map(|e| dist[e.y * self.width + e.x])
            .min()
    }

    /// First step of a shortest route from `from` to any cell within Manhattan
    /// distance `reach` of `goal`. Intermediate and final cells obey `rule`.
    pub fn route_step(&self, from: Position, goal: Position, reach: usize, rule: Passability) -> RouteStep {
        let is_target =
            |p: Position| p.manhattan(goal) <= reach && (p == from || self.passable(p, rule));
        if is_target(from) {
            return RouteStep::Arrived;
        }
        let mut parent: Vec<Option<Position>> = vec![None; self.cells.len()];
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::new();
        seen[from.y * self.width + from.x] = true;
        queue.push_back(from);
        while let Some(p) = queue.pop_front() {
            for n in self.neighbours(p) {
                let idx = n.y * self.width + n.x;
                if seen[idx] || !self.passable(n, rule) {
                    continue;
                }
                seen[idx] = true;
                parent[idx] = Some(p);
                if is_target(n) {
                    let mut step = n;
                    while let Some(prev) = parent[step.y * self.width + step.x] {
                        if prev == from {
                            return RouteStep::Next(step);
                        }
                        step = prev;
                    }
                    return RouteStep::Next(step);
                }
                queue.push_back(n);
            }
        }
        RouteStep::Unreachable
    }

    /// Text form; every row ends with a newline.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in self.cells.chunks(self.width) {
            out.extend(row.iter().map(|k| k.to_char()));
            out.push('\n');
        }
        out
    }
}

impl FromStr for Maze {
    type Err = MazeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        load_maze(text)
    }
}

impl fmt::Display for Maze {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Parses the text format. A single trailing newline is optional.
pub fn load_maze(text: &str) -> Result<Maze, MazeError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err(MazeError::Empty);
    }
    let mut cells = Vec::new();
    let mut width = None;
    let mut height = 0;
    for (y, line) in body.split('\n').enumerate() {
        let row_len = line.chars().count();
        let expected = *width.get_or_insert(row_len);
        if row_len != expected {
            return Err(MazeError::RaggedRows {
                line: y,
                expected,
                found: row_len,
            });
        }
        for (x, ch) in line.chars().enumerate() {
            let kind = CellKind::from_char(ch).ok_or(MazeError::UnknownChar {
                position: Position::new(x, y),
                ch,
            })?;
            cells.push(kind);
        }
        height += 1;
    }
    Maze::from_cells(width.unwrap_or(0), height, cells)
}

/// Parameters for [`generate_maze`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeParams {
    pub width: usize,
    pub height: usize,
    pub tokens: usize,
    pub gates: usize,
}

impl Default for MazeParams {
    fn default() -> Self {
        Self {
            width: 21,
            height: 21,
            tokens: 5,
            gates: 3,
        }
    }
}

/// Perfect maze by depth-first carving. Start at the bottom-left cell, one
/// exit opened on the top or right boundary, tokens and gates on distinct
/// path cells.
pub fn generate_maze(params: MazeParams, seed: u64) -> Result<Maze, MazeError> {
    let MazeParams {
        width,
        height,
        tokens,
        gates,
    } = params;
    if width < 5 || height < 5 {
        return Err(MazeError::TooSmall { width, height });
    }
    if width % 2 == 0 || height % 2 == 0 {
        return Err(MazeError::EvenDimension { width, height });
    }
    let mut rng = SimRng::new(seed);
    let mut cells = vec![CellKind::Wall; width * height];
    let idx = |p: Position| p.y * width + p.x;

    let start = Position::new(1, height - 2);
    cells[idx(start)] = CellKind::Path;
    let mut stack = vec![start];
    while let Some(&cur) = stack.last() {
        let mut dirs = Heading::ALL;
        rng.shuffle(&mut dirs);
        let next = dirs.into_iter().find_map(|h| {
            let mid = h.step(cur)?;
            let to = h.step(mid)?;
            let inside = to.x >= 1 && to.y >= 1 && to.x <= width - 2 && to.y <= height - 2;
            (inside && cells[idx(to)] == CellKind::Wall).then_some((mid, to))
        });
        match next {
            Some((mid, to)) => {
                cells[idx(mid)] = CellKind::Path;
                cells[idx(to)] = CellKind::Path;
                stack.push(to);
            }
            None => {
                stack.pop();
            }
        }
    }

    let exit_candidates: Vec<Position> = (1..width - 1)
        .step_by(2)
        .map(|x| Position::new(x, 0))
        .chain((1..height - 1).step_by(2).map(|y| Position::new(width - 1, y)))
        .collect();
    let exit = exit_candidates[rng.below(exit_candidates.len())];
    cells[idx(start)] = CellKind::Start;
    cells[idx(exit)] = CellKind::Exit;

    let mut free: Vec<Position> = (0..height)
        .flat_map(|y| (0..width).map(move |x| Position::new(x, y)))
        .filter(|p| cells[idx(*p)] == CellKind::Path)
        .collect();
    if tokens + gates > free.len() {
        return Err(MazeError::PlacementOverflow {
            requested: tokens + gates,
            available: free.len(),
        });
    }
    rng.shuffle(&mut free);
    for p in &free[..tokens] {
        cells[idx(*p)] = CellKind::RedSquare { active: true };
    }
    for p in &free[tokens..tokens + gates] {
        cells[idx(*p)] = CellKind::Gate;
    }
    Maze::from_cells(width, height, cells)
}

/// One hand-on-wall step: prefer the hand side, then straight, then the
/// other side, then back. Fully enclosed agents stay put and turn around.
pub fn wall_follow_step(maze: &Maze, pos: Position, heading: Heading, hand: Hand) -> (Position, Heading) {
    let order = [
        hand.turn(heading),
        heading,
        hand.opposite().turn(heading),
        heading.reverse(),
    ];
    for dir in order {
        if let Some(next) = dir.step(pos) {
            if maze.is_open(next) {
                return (next, dir);
            }
        }
    }
    (pos, heading.reverse())
}
