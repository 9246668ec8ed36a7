//! Slice sequences: graph-level slicings of the four 2-cell piece types and
//! the token-level abstract slicing of an s-move 3-cell.
//!
//! A slice is a list of labelled components. Circles carry the labels of the
//! points fused into them; arcs carry two endpoint labels and the letters
//! circulated so far. Local moves act on component indices and every
//! untouched component is carried over unchanged.

use std::fmt;

use thiserror::Error;

use crate::criterion::{self, ConjugatedRelator, CriterionInstance};
use crate::freegroup::{self, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("move {mv}: no component {index}")]
    ComponentIndex { mv: usize, index: usize },
    #[error("move {mv}: component {index} is not an arc")]
    NotArc { mv: usize, index: usize },
    #[error("move {mv}: component {index} is not a circle")]
    NotCircle { mv: usize, index: usize },
    #[error("move {mv}: component {index} has no endpoint for strand {strand:?}")]
    UnknownStrand { mv: usize, index: usize, strand: String },
    #[error("move {mv}: label {label:?} does not occur in the slice")]
    MissingLabel { mv: usize, label: String },
    #[error("move {mv}: a join takes one or two distinct arcs")]
    JoinArity { mv: usize },
    #[error("{slices} slices need {} moves, found {moves}", slices.saturating_sub(1))]
    Arity { slices: usize, moves: usize },
    #[error("slice {index} is not reproduced by the preceding move")]
    Mismatch { index: usize },
    #[error("connect needs at least one piece")]
    EmptyConnect,
    #[error("the criterion instance does not verify")]
    NotVerified,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Circle { marks: Vec<String> },
    Arc { left: String, right: String, trace: Vec<Letter> },
}

impl Component {
    pub fn circle<S: Into<String>>(marks: impl IntoIterator<Item = S>) -> Self {
        Component::Circle {
            marks: marks.into_iter().map(Into::into).collect(),
        }
    }

    pub fn arc(left: impl Into<String>, right: impl Into<String>) -> Self {
        Component::Arc {
            left: left.into(),
            right: right.into(),
            trace: Vec::new(),
        }
    }

    fn labels(&self) -> Vec<&str> {
        match self {
            Component::Circle { marks } => marks.iter().map(String::as_str).collect(),
            Component::Arc { left, right, .. } => vec![left, right],
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Circle { marks } => write!(f, "C[{}]", marks.join(",")),
            Component::Arc { left, right, trace } => write!(
                f,
                "A[{left},{right};trace={}]",
                freegroup::format_letters(trace)
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SliceGraph {
    pub components: Vec<Component>,
    pub level: usize,
}

impl fmt::Display for SliceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "(empty)");
        }
        let parts: Vec<String> = self.components.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    M,
    Q,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::M => "M",
            Level::Q => "Q",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LocalMove {
    /// New circle appended at the end.
    BirthCircle { marks: Vec<String> },
    DeathCircle { component: usize },
    SplitCircleToArc { component: usize, left: String, right: String },
    /// One or two arcs close up into a circle at the lowest index.
    JoinArcsToCircle { components: Vec<usize>, level: Option<Level> },
    /// One letter is circulated on the strand ending at `strand`.
    CirculateStep { component: usize, strand: String, letter: Letter },
    /// `(first.left, second.right)` with concatenated traces, at the lower index.
    MergeArcs { first: usize, second: usize, level: Level },
    /// Every endpoint labelled `a` or `b` becomes `a=b`.
    IdentifyEdges { a: String, b: String },
    /// Swaps the endpoints of an arc.
    Reorder { component: usize },
    SaddlePair { component: usize },
    /// Absorbs circle `from` into circle `into`.
    JoinCells { into: usize, from: usize },
    /// A new circle leaves circle `from` and is appended at the end.
    SplitCell { from: usize, marks: Vec<String> },
}

impl LocalMove {
    fn shift(&self, by: usize) -> LocalMove {
        use LocalMove::*;
        match self.clone() {
            BirthCircle { marks } => BirthCircle { marks },
            DeathCircle { component } => DeathCircle {
                component: component + by,
            },
            SplitCircleToArc {
                component,
                left,
                right,
            } => SplitCircleToArc {
                component: component + by,
                left,
                right,
            },
            JoinArcsToCircle { components, level } => JoinArcsToCircle {
                components: components.into_iter().map(|c| c + by).collect(),
                level,
            },
            CirculateStep {
                component,
                strand,
                letter,
            } => CirculateStep {
                component: component + by,
                strand,
                letter,
            },
            MergeArcs {
                first,
                second,
                level,
            } => MergeArcs {
                first: first + by,
                second: second + by,
                level,
            },
            IdentifyEdges { a, b } => IdentifyEdges { a, b },
            Reorder { component } => Reorder {
                component: component + by,
            },
            SaddlePair { component } => SaddlePair {
                component: component + by,
            },
            JoinCells { into, from } => JoinCells {
                into: into + by,
                from: from + by,
            },
            SplitCell { from, marks } => SplitCell {
                from: from + by,
                marks,
            },
        }
    }
}

impl fmt::Display for LocalMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use LocalMove::*;
        match self {
            BirthCircle { marks } => write!(f, "BIRTH {}", marks.join(",")),
            DeathCircle { component } => write!(f, "DEATH {component}"),
            SplitCircleToArc {
                component,
                left,
                right,
            } => write!(f, "SPLIT {component} {left} {right}"),
            JoinArcsToCircle { components, level } => {
                let cs: Vec<String> = components.iter().map(ToString::to_string).collect();
                match level {
                    Some(l) => write!(f, "JOIN {} {l}", cs.join(",")),
                    None => write!(f, "JOIN {}", cs.join(",")),
                }
            }
            CirculateStep {
                component,
                strand,
                letter,
            } => write!(f, "CIRC {component} {strand} {letter}"),
            MergeArcs {
                first,
                second,
                level,
            } => write!(f, "MERGE {first} {second} {level}"),
            IdentifyEdges { a, b } => write!(f, "IDENTIFY {a} {b}"),
            Reorder { component } => write!(f, "REORDER {component}"),
            SaddlePair { component } => write!(f, "SADDLE {component}"),
            JoinCells { into, from } => write!(f, "JOINCELLS {into} {from}"),
            SplitCell { from, marks } => write!(f, "SPLITCELL {from} {}", marks.join(",")),
        }
    }
}

fn strand_matches(label: &str, strand: &str) -> bool {
    label == strand || label.split('=').any(|part| part == strand)
}

fn get(slice: &SliceGraph, mv: usize, index: usize) -> Result<&Component, SliceError> {
    slice
        .components
        .get(index)
        .ok_or(SliceError::ComponentIndex { mv, index })
}

fn need_circle(slice: &SliceGraph, mv: usize, index: usize) -> Result<(), SliceError> {
    match get(slice, mv, index)? {
        Component::Circle { .. } => Ok(()),
        _ => Err(SliceError::NotCircle { mv, index }),
    }
}

fn need_arc(
    slice: &SliceGraph,
    mv: usize,
    index: usize,
) -> Result<(String, String, Vec<Letter>), SliceError> {
    match get(slice, mv, index)? {
        Component::Arc { left, right, trace } => Ok((left.clone(), right.clone(), trace.clone())),
        _ => Err(SliceError::NotArc { mv, index }),
    }
}

/// Applies one move; `mv` is only used in error values.
pub fn apply_move(slice: &SliceGraph, m: &LocalMove, mv: usize) -> Result<SliceGraph, SliceError> {
    let mut out = slice.clone();
    out.level = slice.level + 1;
    let comps = &mut out.components;
    match m {
        LocalMove::BirthCircle { marks } => comps.push(Component::circle(marks.clone())),
        LocalMove::DeathCircle { component } => {
            need_circle(slice, mv, *component)?;
            comps.remove(*component);
        }
        LocalMove::SplitCircleToArc {
            component,
            left,
            right,
        } => {
            need_circle(slice, mv, *component)?;
            comps[*component] = Component::arc(left.clone(), right.clone());
        }
        LocalMove::JoinArcsToCircle { components, .. } => {
            let mut idx = components.clone();
            idx.sort_unstable();
            idx.dedup();
            if idx.is_empty() || idx.len() > 2 || idx.len() != components.len() {
                return Err(SliceError::JoinArity { mv });
            }
            let mut marks = Vec::new();
            for &i in components {
                let (l, r, _) = need_arc(slice, mv, i)?;
                marks.push(l);
                marks.push(r);
            }
            for &i in idx.iter().skip(1).rev() {
                comps.remove(i);
            }
            comps[idx[0]] = Component::Circle { marks };
        }
        LocalMove::CirculateStep {
            component,
            strand,
            letter,
        } => {
            let (l, r, _) = need_arc(slice, mv, *component)?;
            if !strand_matches(&l, strand) && !strand_matches(&r, strand) {
                return Err(SliceError::UnknownStrand {
                    mv,
                    index: *component,
                    strand: strand.clone(),
                });
            }
            if let Component::Arc { trace, .. } = &mut comps[*component] {
                trace.push(*letter);
            }
        }
        LocalMove::MergeArcs { first, second, .. } => {
            if first == second {
                return Err(SliceError::JoinArity { mv });
            }
            let (l, _, mut t1) = need_arc(slice, mv, *first)?;
            let (_, r, t2) = need_arc(slice, mv, *second)?;
            t1.extend(t2);
            let (lo, hi) = (*first.min(second), *first.max(second));
            comps.remove(hi);
            comps[lo] = Component::Arc {
                left: l,
                right: r,
                trace: t1,
            };
        }
        LocalMove::IdentifyEdges { a, b } => {
            for label in [a, b] {
                let present = slice
                    .components
                    .iter()
                    .any(|c| c.labels().iter().any(|l| l == label));
                if !present {
                    return Err(SliceError::MissingLabel {
                        mv,
                        label: label.clone(),
                    });
                }
            }
            let fused = format!("{a}={b}");
            for c in comps.iter_mut() {
                let labels: Vec<&mut String> = match c {
                    Component::Circle { marks } => marks.iter_mut().collect(),
                    Component::Arc { left, right, .. } => vec![left, right],
                };
                for l in labels {
                    if l == a || l == b {
                        *l = fused.clone();
                    }
                }
            }
        }
        LocalMove::Reorder { component } => {
            need_arc(slice, mv, *component)?;
            if let Component::Arc { left, right, .. } = &mut comps[*component] {
                std::mem::swap(left, right);
            }
        }
        LocalMove::SaddlePair { component } => {
            get(slice, mv, *component)?;
        }
        LocalMove::JoinCells { into, from } => {
            need_circle(slice, mv, *into)?;
            need_circle(slice, mv, *from)?;
            if into == from {
                return Err(SliceError::JoinArity { mv });
            }
            comps.remove(*from);
        }
        LocalMove::SplitCell { from, marks } => {
            need_circle(slice, mv, *from)?;
            comps.push(Component::circle(marks.clone()));
        }
    }
    Ok(out)
}

/// How a named strand enters the boundary word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// The strand's trace as circulated.
    Strand,
    /// The trace read backwards; an inverse strand read this way gives the
    /// inverse relator word.
    Reversed,
    /// The inverse of the strand's trace.
    PartnerOf,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryEntry {
    pub kind: BoundaryKind,
    pub label: String,
    /// Half-open range of move indices searched for the strand's steps.
    pub span: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSequence {
    pub slices: Vec<SliceGraph>,
    pub moves: Vec<LocalMove>,
    pub boundary: Vec<BoundaryEntry>,
}

impl SliceSequence {
    /// Runs `moves` from the empty slice.
    pub fn from_moves(moves: Vec<LocalMove>) -> Result<Self, SliceError> {
        let mut slices = vec![SliceGraph::default()];
        for (k, m) in moves.iter().enumerate() {
            let next = apply_move(&slices[k], m, k)?;
            slices.push(next);
        }
        Ok(SliceSequence {
            slices,
            moves,
            boundary: Vec::new(),
        })
    }

    fn with_boundary(mut self, entries: &[(BoundaryKind, &str)]) -> Self {
        let span = (0, self.moves.len());
        self.boundary = entries
            .iter()
            .map(|(kind, label)| BoundaryEntry {
                kind: kind.clone(),
                label: label.to_string(),
                span,
            })
            .collect();
        self
    }

    /// Letters of the `CirculateStep` moves on `strand` in move order.
    pub fn strand_trace(&self, strand: &str, span: (usize, usize)) -> Vec<Letter> {
        self.moves[span.0..span.1.min(self.moves.len())]
            .iter()
            .filter_map(|m| match m {
                LocalMove::CirculateStep {
                    strand: s, letter, ..
                } if s == strand => Some(*letter),
                _ => None,
            })
            .collect()
    }

    pub fn circulation_steps(&self) -> Vec<&LocalMove> {
        self.moves
            .iter()
            .filter(|m| matches!(m, LocalMove::CirculateStep { .. }))
            .collect()
    }

    pub fn count_moves(&self, pred: impl Fn(&LocalMove) -> bool) -> usize {
        self.moves.iter().filter(|m| pred(m)).count()
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.slices.iter().enumerate() {
            out.push_str(&format!("{s}\n"));
            if let Some(m) = self.moves.get(k) {
                out.push_str(&format!("-- {m}\n"));
            }
        }
        out
    }
}

/// Checks arity and that each move reproduces the next slice exactly.
pub fn validate(seq: &SliceSequence) -> Result<(), SliceError> {
    if seq.slices.is_empty() || seq.moves.len() + 1 != seq.slices.len() {
        return Err(SliceError::Arity {
            slices: seq.slices.len(),
            moves: seq.moves.len(),
        });
    }
    for (k, m) in seq.moves.iter().enumerate() {
        match apply_move(&seq.slices[k], m, k) {
            Ok(next) if next == seq.slices[k + 1] => {}
            _ => return Err(SliceError::Mismatch { index: k + 1 }),
        }
    }
    Ok(())
}

/// Reads the declared boundary strands in order and freely reduces.
pub fn boundary_trace(seq: &SliceSequence) -> Result<Word, SliceError> {
    validate(seq)?;
    let mut letters = Vec::new();
    for e in &seq.boundary {
        let t = seq.strand_trace(&e.label, e.span);
        match e.kind {
            BoundaryKind::Strand => letters.extend(t),
            BoundaryKind::Reversed => letters.extend(t.into_iter().rev()),
            BoundaryKind::PartnerOf => letters.extend(t.iter().rev().map(|l| l.inverse())),
        }
    }
    Ok(freegroup::reduce(&letters))
}

/// Letterwise inversion with the order kept.
pub fn inverse_trace(r: &Word) -> Word {
    Word::from_letters(r.letters().iter().map(|l| l.inverse()).collect::<Vec<_>>())
}

struct Builder {
    moves: Vec<LocalMove>,
}

impl Builder {
    fn new() -> Self {
        Builder { moves: Vec::new() }
    }

    fn birth(&mut self, mark: &str) {
        self.moves.push(LocalMove::BirthCircle {
            marks: vec![mark.into()],
        });
    }

    fn death(&mut self, component: usize) {
        self.moves.push(LocalMove::DeathCircle { component });
    }

    fn split(&mut self, component: usize, left: &str, right: &str) {
        self.moves.push(LocalMove::SplitCircleToArc {
            component,
            left: left.into(),
            right: right.into(),
        });
    }

    fn identify(&mut self, a: &str, b: &str) {
        self.moves.push(LocalMove::IdentifyEdges {
            a: a.into(),
            b: b.into(),
        });
    }

    fn step(&mut self, component: usize, strand: &str, letter: Letter) {
        self.moves.push(LocalMove::CirculateStep {
            component,
            strand: strand.into(),
            letter,
        });
    }

    fn circulate(&mut self, component: usize, strand: &str, w: &Word) {
        for &l in w.letters() {
            self.step(component, strand, l);
        }
    }

    /// Steps `w` on one strand and its inverse trace on the partner, letter
    /// by letter.
    fn paired(&mut self, c1: usize, s1: &str, c2: usize, s2: &str, w: &Word) {
        for &l in w.letters() {
            self.step(c1, s1, l);
            self.step(c2, s2, l.inverse());
        }
    }

    fn merge(&mut self, first: usize, second: usize) {
        self.moves.push(LocalMove::MergeArcs {
            first,
            second,
            level: Level::M,
        });
    }

    fn join(&mut self, components: &[usize], level: Option<Level>) {
        self.moves.push(LocalMove::JoinArcsToCircle {
            components: components.to_vec(),
            level,
        });
    }

    fn finish(self) -> SliceSequence {
        SliceSequence::from_moves(self.moves).expect("builder emits a valid move list")
    }
}

/// A bag with boundary `W·W⁻¹`: only the `W` strand circulates.
pub fn slice_bag(w: &Word, identify: bool) -> SliceSequence {
    let mut b = Builder::new();
    b.birth("P1");
    b.birth("P2");
    b.split(0, "W^-1", "W");
    b.split(1, "w^-1", "w");
    if identify {
        b.identify("W", "W^-1");
        b.identify("w", "w^-1");
    }
    b.circulate(0, "W", w);
    b.join(&[0, 1], Some(Level::Q));
    b.death(0);
    b.finish()
        .with_boundary(&[(BoundaryKind::Strand, "W"), (BoundaryKind::PartnerOf, "W")])
}

/// Two relator arcs `R` and `R⁻¹`, the second stepping around the inverse
/// generator each time.
pub fn slice_inverse_pair(r: &Word) -> SliceSequence {
    let mut b = Builder::new();
    b.birth("P1");
    b.birth("P2");
    b.split(0, "R", "r");
    b.split(1, "R^-1", "r^-1");
    b.paired(0, "R", 1, "R^-1", r);
    b.join(&[0], None);
    b.join(&[1], None);
    b.death(1);
    b.death(0);
    b.finish()
        .with_boundary(&[(BoundaryKind::Strand, "R"), (BoundaryKind::Reversed, "R^-1")])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dominant {
    RFirst,
    SFirst,
}

/// Number of extra moves the identification ladder adds to a commutator.
pub const IDENTIFY_LADDER_LEN: usize = 5;

/// The commutator piece `[R, S]` on four relator circles.
pub fn slice_commutator(r: &Word, s: &Word, dominant: Dominant, identify: bool) -> SliceSequence {
    let mut b = Builder::new();
    for p in ["P1", "P2", "P3", "P4"] {
        b.birth(p);
    }
    b.split(0, "S^-1", "R");
    b.split(1, "r", "S");
    b.split(2, "s", "r^-1");
    b.split(3, "R^-1", "s^-1");
    if identify {
        b.identify("r", "r^-1");
        b.identify("s", "s^-1");
        b.identify("R", "R^-1");
        b.identify("S", "S^-1");
        b.moves.push(LocalMove::Reorder { component: 1 });
    }
    match dominant {
        Dominant::RFirst => {
            b.paired(0, "R", 3, "R^-1", r);
            b.merge(0, 1);
            b.merge(1, 2);
            b.paired(0, "S", 0, "S^-1", s);
        }
        Dominant::SFirst => {
            b.paired(1, "S", 0, "S^-1", s);
            b.merge(1, 2);
            b.merge(2, 0);
            b.paired(0, "R", 0, "R^-1", r);
        }
    }
    b.join(&[0, 1], Some(Level::Q));
    b.death(0);
    b.finish().with_boundary(&[
        (BoundaryKind::Strand, "R"),
        (BoundaryKind::Strand, "S"),
        (BoundaryKind::Reversed, "R^-1"),
        (BoundaryKind::Reversed, "S^-1"),
    ])
}

/// The product piece `R·S⁻¹`; the `S⁻¹` level lies above the `R` level.
pub fn slice_product(r: &Word, s: &Word) -> SliceSequence {
    let mut b = Builder::new();
    b.birth("P1");
    b.birth("P2");
    b.split(0, "s^-1", "R");
    b.split(1, "r", "S^-1");
    b.circulate(0, "R", r);
    b.merge(0, 1);
    b.circulate(0, "S^-1", &inverse_trace(s));
    b.join(&[0], Some(Level::Q));
    b.death(0);
    b.finish()
        .with_boundary(&[(BoundaryKind::Strand, "R"), (BoundaryKind::Reversed, "S^-1")])
}

/// Enters every piece from a common root cell: each piece's first birth
/// becomes a split off the root and its last death a join back into it.
pub fn connect(pieces: &[SliceSequence]) -> Result<SliceSequence, SliceError> {
    if pieces.is_empty() {
        return Err(SliceError::EmptyConnect);
    }
    let mut moves = vec![LocalMove::BirthCircle {
        marks: vec!["root".into()],
    }];
    let mut boundary = Vec::new();
    for piece in pieces {
        let start = moves.len();
        let first_birth = piece
            .moves
            .iter()
            .position(|m| matches!(m, LocalMove::BirthCircle { .. }));
        let last_death = piece
            .moves
            .iter()
            .rposition(|m| matches!(m, LocalMove::DeathCircle { .. }));
        for (k, m) in piece.moves.iter().enumerate() {
            let shifted = match m {
                LocalMove::BirthCircle { marks } if Some(k) == first_birth => {
                    LocalMove::SplitCell {
                        from: 0,
                        marks: marks.clone(),
                    }
                }
                LocalMove::DeathCircle { component } if Some(k) == last_death => {
                    LocalMove::JoinCells {
                        into: 0,
                        from: component + 1,
                    }
                }
                other => other.shift(1),
            };
            moves.push(shifted);
        }
        for e in &piece.boundary {
            boundary.push(BoundaryEntry {
                span: (e.span.0 + start, e.span.1 + start),
                ..e.clone()
            });
        }
    }
    moves.push(LocalMove::DeathCircle { component: 0 });
    let mut seq = SliceSequence::from_moves(moves)?;
    seq.boundary = boundary;
    Ok(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentificationType {
    Longitudinal,
    Meridian,
}

impl IdentificationType {
    pub fn other(self) -> Self {
        match self {
            IdentificationType::Longitudinal => IdentificationType::Meridian,
            IdentificationType::Meridian => IdentificationType::Longitudinal,
        }
    }
}

impl fmt::Display for IdentificationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentificationType::Longitudinal => "long",
            IdentificationType::Meridian => "mer",
        })
    }
}

/// Which presentation a spherical element's relator comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    R,
    S,
}

/// Tokens are labelled by content (expanded words), so that a token and its
/// formal inverse can be recognised across instances.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellToken {
    Empty,
    Sphere,
    SpElBag { index: usize, side: Side, word: Word },
    SpElInvPair { index: usize, side: Side, word: Word },
    /// A 2-cell whose boundary is the formal product of the given words.
    Cell(Vec<Word>),
    /// `[x, y]` for factor `index`.
    Commutator { index: usize, x: Word, y: Word },
}

fn product_label(parts: &[Word]) -> String {
    if parts.is_empty() {
        return "1".into();
    }
    parts
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("*")
}

impl CellToken {
    pub fn is_spel(&self) -> bool {
        matches!(
            self,
            CellToken::SpElBag { .. } | CellToken::SpElInvPair { .. }
        )
    }

    /// Backend key; `None` for `Empty`.
    pub fn label(&self) -> Option<String> {
        Some(match self {
            CellToken::Empty => return None,
            CellToken::Sphere => "S2".into(),
            CellToken::SpElBag { word, .. } => format!("bag[{word}]"),
            CellToken::SpElInvPair { word, .. } => format!("pair[{word}]"),
            CellToken::Cell(parts) => format!("cell[{}]", product_label(parts)),
            CellToken::Commutator { x, y, .. } => format!("comm[{x}|{y}]"),
        })
    }

    /// The token for the same 2-cell with opposite orientation.
    pub fn formal_inverse(&self) -> CellToken {
        match self {
            CellToken::Empty | CellToken::Sphere => self.clone(),
            CellToken::SpElBag { index, side, word } => CellToken::SpElBag {
                index: *index,
                side: *side,
                word: word.inverse(),
            },
            CellToken::SpElInvPair { index, side, word } => CellToken::SpElInvPair {
                index: *index,
                side: *side,
                word: word.inverse(),
            },
            CellToken::Cell(parts) => CellToken::Cell(parts.iter().rev().map(Word::inverse).collect()),
            CellToken::Commutator { index, x, y } => CellToken::Commutator {
                index: *index,
                x: y.clone(),
                y: x.clone(),
            },
        }
    }
}

/// Smaller of the label and the inverse label.
pub fn canonical_key(label: &str) -> String {
    let inv = inverse_label(label);
    if inv.as_str() < label {
        inv
    } else {
        label.to_string()
    }
}

/// Label of the formal inverse, computed from the label text alone.
pub fn inverse_label(label: &str) -> String {
    let Some((kind, rest)) = label.split_once('[') else {
        return label.to_string();
    };
    let Some(body) = rest.strip_suffix(']') else {
        return label.to_string();
    };
    let inv_word = |s: &str| match Word::parse(s) {
        Ok(w) => w.inverse().to_string(),
        Err(_) => s.to_string(),
    };
    let body = match kind {
        "comm" => match body.split_once('|') {
            Some((x, y)) => format!("{y}|{x}"),
            None => body.to_string(),
        },
        "cell" => body
            .split('*')
            .rev()
            .map(inv_word)
            .collect::<Vec<_>>()
            .join("*"),
        _ => inv_word(body),
    };
    format!("{kind}[{body}]")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbstractSlice {
    pub tokens: Vec<CellToken>,
}

impl AbstractSlice {
    pub fn empty() -> Self {
        AbstractSlice {
            tokens: vec![CellToken::Empty],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.iter().all(|t| *t == CellToken::Empty)
    }

    /// Labels sorted, for multiset comparison.
    pub fn sorted_labels(&self) -> Vec<String> {
        let mut v: Vec<String> = self.tokens.iter().filter_map(CellToken::label).collect();
        v.sort();
        v
    }
}

impl fmt::Display for AbstractSlice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{empty}}");
        }
        let labels: Vec<String> = self.tokens.iter().filter_map(CellToken::label).collect();
        write!(f, "{{{}}}", labels.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transition {
    Join,
    Split,
    Transform,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transition::Join => "join",
            Transition::Split => "split",
            Transition::Transform => "transform",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractSliceSequence {
    pub slices: Vec<AbstractSlice>,
    pub transitions: Vec<Transition>,
    pub identification: IdentificationType,
    /// The perturbed transition runs from this slice to the next.
    pub perturbation_index: usize,
}

impl AbstractSliceSequence {
    pub fn spels(&self) -> Vec<&CellToken> {
        self.slices[self.perturbation_index]
            .tokens
            .iter()
            .filter(|t| t.is_spel())
            .collect()
    }

    pub fn labels(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .slices
            .iter()
            .flat_map(|s| s.tokens.iter().filter_map(CellToken::label))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn dump(&self) -> String {
        let mut out = format!(
            "type {} perturbation {}\n",
            self.identification, self.perturbation_index
        );
        for (k, s) in self.slices.iter().enumerate() {
            out.push_str(&format!("slice{k} {s}\n"));
            if let Some(t) = self.transitions.get(k) {
                let mark = if k == self.perturbation_index { " *" } else { "" };
                out.push_str(&format!("-- {t}{mark}\n"));
            }
        }
        out
    }
}

fn spel(ty: IdentificationType, side: Side, index: usize, word: Word) -> CellToken {
    let pair = matches!(
        (ty, side),
        (IdentificationType::Longitudinal, Side::R) | (IdentificationType::Meridian, Side::S)
    );
    if pair {
        CellToken::SpElInvPair { index, side, word }
    } else {
        CellToken::SpElBag { index, side, word }
    }
}

/// The canonical eight-slice abstract sequence of the s-move 3-cell over a
/// verified instance. A residual word rides as an extra cell beside
/// `R·S⁻¹` in slices 3 and 4.
pub fn build_abstract(
    inst: &CriterionInstance,
    ty: IdentificationType,
    residual: Option<&Word>,
) -> Result<AbstractSliceSequence, SliceError> {
    if !criterion::verify(inst) {
        return Err(SliceError::NotVerified);
    }
    let r = inst.r_word().clone();
    let s_inv = inst.s_word().inverse();
    let words = inst.factor_words();
    let mut spels = Vec::new();
    let mut comms = Vec::new();
    for (alpha, (ra, sa)) in words.iter().enumerate() {
        spels.push(spel(ty, Side::R, alpha, ra.clone()));
        spels.push(spel(ty, Side::S, alpha, sa.clone()));
        comms.push(CellToken::Commutator {
            index: alpha,
            x: sa.clone(),
            y: ra.clone(),
        });
    }
    let rs = CellToken::Cell(vec![r.clone(), s_inv.clone()]);
    let extra: Vec<CellToken> = residual
        .map(|w| CellToken::Cell(vec![w.clone()]))
        .into_iter()
        .collect();
    let spheres = vec![CellToken::Sphere, CellToken::Sphere];
    let with = |mut base: Vec<CellToken>, more: &[CellToken]| {
        base.extend_from_slice(more);
        AbstractSlice { tokens: base }
    };
    let slices = vec![
        AbstractSlice::empty(),
        AbstractSlice {
            tokens: spheres.clone(),
        },
        with(
            vec![CellToken::Cell(vec![r]), CellToken::Cell(vec![s_inv])],
            &spels,
        ),
        with([vec![rs.clone()], extra.clone(), spels].concat(), &[]),
        with([vec![rs], extra, comms].concat(), &[]),
        AbstractSlice {
            tokens: vec![CellToken::Cell(Vec::new())],
        },
        AbstractSlice { tokens: spheres },
        AbstractSlice::empty(),
    ];
    use Transition::*;
    Ok(AbstractSliceSequence {
        slices,
        transitions: vec![Split, Split, Join, Transform, Join, Split, Join],
        identification: ty,
        perturbation_index: 3,
    })
}

/// The `(R_α, S_α)` spherical-element relators, useful for reports.
pub fn spel_relators(inst: &CriterionInstance) -> Vec<(ConjugatedRelator, ConjugatedRelator)> {
    inst.decomposition()
        .factors
        .iter()
        .map(|f| (f.r.clone(), f.s.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn inverse_trace_examples() {
        assert_eq!(inverse_trace(&w("aabb")).to_string(), "AABB");
        assert_eq!(inverse_trace(&w("")), Word::identity());
        assert_eq!(inverse_trace(&w("aB")).to_string(), "Ab");
    }

    #[test]
    fn bag_examples() {
        let s = slice_bag(&w("a"), false);
        assert!(validate(&s).is_ok());
        assert!(boundary_trace(&s).unwrap().is_identity());
        assert!(validate(&slice_bag(&w(""), false)).is_ok());
        let plain = slice_bag(&w("ab"), false);
        let ident = slice_bag(&w("ab"), true);
        assert!(boundary_trace(&ident).unwrap().is_identity());
        assert_eq!(ident.moves.len(), plain.moves.len() + 2);
        let ids = |s: &SliceSequence| s.count_moves(|m| matches!(m, LocalMove::IdentifyEdges { .. }));
        assert_eq!(ids(&ident) - ids(&plain), 2);
    }

    #[test]
    fn inverse_pair_examples() {
        let s = slice_inverse_pair(&w("ab"));
        assert!(validate(&s).is_ok());
        let span = (0, s.moves.len());
        assert_eq!(freegroup::format_letters(&s.strand_trace("R", span)), "ab");
        assert_eq!(freegroup::format_letters(&s.strand_trace("R^-1", span)), "AB");
        let e = slice_inverse_pair(&w(""));
        assert_eq!(e.circulation_steps().len(), 0);
    }

    #[test]
    fn commutator_examples() {
        for d in [Dominant::RFirst, Dominant::SFirst] {
            for identify in [false, true] {
                let s = slice_commutator(&w("a"), &w("b"), d, identify);
                validate(&s).unwrap();
                let b = boundary_trace(&s).unwrap();
                assert!(b.is_rotation_of(&w("abAB")), "{d:?} {identify}: {b}");
            }
        }
        let deg = slice_commutator(&w(""), &w("b"), Dominant::RFirst, false);
        assert!(boundary_trace(&deg).unwrap().is_identity());
        let plain = slice_commutator(&w("ab"), &w("b"), Dominant::SFirst, false);
        let ident = slice_commutator(&w("ab"), &w("b"), Dominant::SFirst, true);
        assert_eq!(ident.moves.len() - plain.moves.len(), IDENTIFY_LADDER_LEN);
    }

    #[test]
    fn product_examples() {
        let s = slice_product(&w("ab"), &w("ab"));
        assert!(boundary_trace(&s).unwrap().is_identity());
        let s = slice_product(&w("abA"), &w("b"));
        assert_eq!(boundary_trace(&s).unwrap().to_string(), "abAB");
        let last_r = s
            .moves
            .iter()
            .rposition(|m| matches!(m, LocalMove::CirculateStep { strand, .. } if strand == "R"))
            .unwrap();
        let first_s = s
            .moves
            .iter()
            .position(|m| matches!(m, LocalMove::CirculateStep { strand, .. } if strand == "S^-1"))
            .unwrap();
        assert!(last_r < first_s);
    }

    #[test]
    fn connect_examples() {
        assert_eq!(connect(&[]), Err(SliceError::EmptyConnect));
        let one = slice_bag(&w("ab"), false);
        let c = connect(std::slice::from_ref(&one)).unwrap();
        validate(&c).unwrap();
        assert_eq!(c.moves.len(), one.moves.len() + 2);
        assert_eq!(boundary_trace(&c).unwrap(), boundary_trace(&one).unwrap());

        let pieces: Vec<_> = ["a", "b", "ab"]
            .iter()
            .map(|r| slice_commutator(&w(r), &w("b"), Dominant::RFirst, false))
            .collect();
        let c = connect(&pieces).unwrap();
        validate(&c).unwrap();
        let splits = c.count_moves(|m| matches!(m, LocalMove::SplitCell { .. }));
        let joins = c.count_moves(|m| matches!(m, LocalMove::JoinCells { .. }));
        assert_eq!((splits, joins), (3, 3));
        let mut before: Vec<String> = pieces
            .iter()
            .flat_map(|p| p.circulation_steps().into_iter().map(|m| m.to_string()))
            .collect();
        let mut after: Vec<String> = c
            .circulation_steps()
            .into_iter()
            .map(|m| m.shift(0).to_string())
            .collect();
        // component indices shift by one inside connect; compare letters and strands
        let strip = |s: &String| {
            let mut it = s.split_whitespace();
            let _ = (it.next(), it.next());
            it.collect::<Vec<_>>().join(" ")
        };
        before.iter_mut().for_each(|s| *s = strip(s));
        after.iter_mut().for_each(|s| *s = strip(s));
        before.sort();
        after.sort();
        assert_eq!(before, after);
    }

    #[test]
    fn validate_catches_corruption_and_arity() {
        let mut s = slice_product(&w("abA"), &w("b"));
        let k = 6;
        match &mut s.slices[k].components[0] {
            Component::Arc { trace, .. } => trace[0] = trace[0].inverse(),
            other => panic!("unexpected {other}"),
        }
        assert_eq!(validate(&s), Err(SliceError::Mismatch { index: k }));

        let bad = SliceSequence {
            slices: vec![SliceGraph::default(), SliceGraph::default()],
            moves: vec![],
            boundary: vec![],
        };
        assert!(matches!(validate(&bad), Err(SliceError::Arity { .. })));
        assert!(boundary_trace(&bad).is_err());
    }

    #[test]
    fn move_errors() {
        let s = SliceGraph::default();
        assert!(matches!(
            apply_move(&s, &LocalMove::DeathCircle { component: 0 }, 0),
            Err(SliceError::ComponentIndex { .. })
        ));
        let one = SliceGraph {
            components: vec![Component::arc("R", "r")],
            level: 0,
        };
        assert!(matches!(
            apply_move(
                &one,
                &LocalMove::CirculateStep {
                    component: 0,
                    strand: "S".into(),
                    letter: Letter::pos(1)
                },
                0
            ),
            Err(SliceError::UnknownStrand { .. })
        ));
        assert!(matches!(
            apply_move(
                &one,
                &LocalMove::IdentifyEdges {
                    a: "R".into(),
                    b: "Q".into()
                },
                0
            ),
            Err(SliceError::MissingLabel { .. })
        ));
    }

    #[test]
    fn dump_format() {
        let d = slice_product(&w("a"), &w("b")).dump();
        let lines: Vec<&str> = d.lines().collect();
        assert_eq!(lines[0], "(empty)");
        assert_eq!(lines[1], "-- BIRTH P1");
        assert!(d.contains("A[s^-1,R;trace=a]"));
        assert!(d.contains("-- MERGE 0 1 M"));
    }

    #[test]
    fn labels_and_inverses() {
        let t = CellToken::Cell(vec![w("abA"), w("B")]);
        assert_eq!(t.label().unwrap(), "cell[abA*B]");
        assert_eq!(inverse_label("cell[abA*B]"), "cell[b*aBA]");
        assert_eq!(t.formal_inverse().label().unwrap(), "cell[b*aBA]");
        assert_eq!(inverse_label("comm[a|b]"), "comm[b|a]");
        assert_eq!(inverse_label("pair[ab]"), "pair[BA]");
        assert_eq!(inverse_label("S2"), "S2");
        assert_eq!(canonical_key("cell[b*aBA]"), canonical_key("cell[abA*B]"));
        assert_eq!(inverse_label("cell[1]"), "cell[1]");
    }
}
