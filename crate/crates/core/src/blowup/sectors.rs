//! Sector bookkeeping: half-portraits at divisor points, gluing along the
//! divisor, and canonical cyclic words for topological comparison.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Flow along a boundary orbit relative to the singular point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flow {
    In,
    Out,
}

impl Flow {
    pub fn flip(self) -> Flow {
        match self {
            Flow::In => Flow::Out,
            Flow::Out => Flow::In,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SectorKind {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl SectorKind {
    pub fn letter(self) -> char {
        match self {
            SectorKind::Elliptic => 'E',
            SectorKind::Hyperbolic => 'H',
            SectorKind::Parabolic => 'P',
        }
    }

    fn between(a: Flow, b: Flow) -> SectorKind {
        if a == b {
            SectorKind::Parabolic
        } else {
            SectorKind::Hyperbolic
        }
    }
}

/// A sector wedge with the flows along its two boundary orbits, listed in
/// counterclockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub kind: SectorKind,
    pub left: Flow,
    pub right: Flow,
}

impl Piece {
    pub fn new(kind: SectorKind, left: Flow, right: Flow) -> Piece {
        Piece { kind, left, right }
    }

    fn flipped(self) -> Piece {
        Piece { kind: self.kind, left: self.left.flip(), right: self.right.flip() }
    }

    fn reversed(self) -> Piece {
        Piece { kind: self.kind, left: self.right, right: self.left }
    }
}

/// A characteristic orbit. `axis` marks the orbit running along the local
/// s-axis of the chart the point was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ray {
    pub flow: Flow,
    pub axis: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    Piece(Piece),
    Ray(Ray),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GlueError {
    #[error("flows disagree along a divisor arc")]
    ArcMismatch,
    #[error("sector stream is malformed")]
    Malformed,
}

/// The part of a neighbourhood of a divisor point on the side away from the
/// divisor: pieces and rays alternate, starting and ending with a piece.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfPortrait {
    pub tokens: Vec<Token>,
}

impl HalfPortrait {
    /// Half at an elementary point: the divisor arcs carry `left`/`right`
    /// and one characteristic orbit leaves transversally with `middle`.
    pub fn elementary(left: Flow, middle: Flow, right: Flow) -> HalfPortrait {
        HalfPortrait {
            tokens: vec![
                Token::Piece(Piece::new(SectorKind::between(left, middle), left, middle)),
                Token::Ray(Ray { flow: middle, axis: true }),
                Token::Piece(Piece::new(SectorKind::between(middle, right), middle, right)),
            ],
        }
    }

    pub fn left(&self) -> Flow {
        match self.tokens.first() {
            Some(Token::Piece(p)) => p.left,
            _ => unreachable!("half starts with a piece"),
        }
    }

    pub fn right(&self) -> Flow {
        match self.tokens.last() {
            Some(Token::Piece(p)) => p.right,
            _ => unreachable!("half ends with a piece"),
        }
    }

    pub fn reversed(&self) -> HalfPortrait {
        HalfPortrait {
            tokens: self
                .tokens
                .iter()
                .rev()
                .map(|t| match t {
                    Token::Piece(p) => Token::Piece(p.reversed()),
                    Token::Ray(r) => Token::Ray(*r),
                })
                .collect(),
        }
    }

    pub fn rays(&self) -> impl Iterator<Item = &Ray> {
        self.tokens.iter().filter_map(|t| match t {
            Token::Ray(r) => Some(r),
            _ => None,
        })
    }

    pub fn clear_axis(&mut self) {
        for t in &mut self.tokens {
            if let Token::Ray(r) = t {
                r.axis = false;
            }
        }
    }

    /// Split at the marked axis ray: (tokens before, axis ray, tokens after).
    pub fn split_at_axis(&self) -> Option<(Vec<Token>, Ray, Vec<Token>)> {
        let k = self.tokens.iter().position(|t| matches!(t, Token::Ray(r) if r.axis))?;
        let ray = match self.tokens[k] {
            Token::Ray(r) => r,
            _ => unreachable!(),
        };
        Some((self.tokens[..k].to_vec(), ray, self.tokens[k + 1..].to_vec()))
    }

    /// Drop interior rays that are not separatrices.
    pub fn normalized(&self) -> HalfPortrait {
        let mut ts = self.tokens.clone();
        let mut k = 1;
        while k + 1 < ts.len() {
            let (Token::Piece(a), Token::Piece(b)) = (ts[k - 1], ts[k + 1]) else {
                k += 1;
                continue;
            };
            let merged = match (a.kind, b.kind) {
                (SectorKind::Parabolic, SectorKind::Parabolic) => Some(SectorKind::Parabolic),
                (SectorKind::Elliptic, SectorKind::Parabolic) | (SectorKind::Parabolic, SectorKind::Elliptic) => {
                    Some(SectorKind::Elliptic)
                }
                _ => None,
            };
            match merged {
                Some(kind) => {
                    ts.splice(k - 1..k + 2, [Token::Piece(Piece::new(kind, a.left, b.right))]);
                    k = 1;
                }
                None => k += 2,
            }
        }
        HalfPortrait { tokens: ts }
    }

    /// Word with boundary flows: `+`/`-` for outgoing/incoming divisor
    /// arcs, `o`/`i` for rays, sector letters in between.
    pub fn flow_word(&self) -> String {
        let arc = |f: Flow| if f == Flow::Out { '+' } else { '-' };
        let mut s = String::new();
        s.push(arc(self.left()));
        for t in &self.tokens {
            s.push(match t {
                Token::Piece(p) => p.kind.letter(),
                Token::Ray(r) if r.flow == Flow::Out => 'o',
                Token::Ray(_) => 'i',
            });
        }
        s.push(arc(self.right()));
        s
    }

    pub fn word(&self) -> String {
        self.tokens
            .iter()
            .map(|t| match t {
                Token::Piece(p) => p.kind.letter().to_string(),
                Token::Ray(r) => match r.flow {
                    Flow::In => "<".into(),
                    Flow::Out => ">".into(),
                },
            })
            .collect()
    }
}

fn flip_tokens(ts: &[Token]) -> Vec<Token> {
    ts.iter()
        .map(|t| match t {
            Token::Piece(p) => Token::Piece(p.flipped()),
            Token::Ray(r) => Token::Ray(Ray { flow: r.flow.flip(), axis: r.axis }),
        })
        .collect()
}

/// Merge two pieces adjacent across a divisor arc.
pub fn merge_pieces(a: Piece, b: Piece) -> Result<Vec<Token>, GlueError> {
    match (a.right, b.left) {
        (Flow::Out, Flow::In) => {}
        (Flow::In, Flow::Out) => {
            let out = merge_pieces(a.flipped(), b.flipped())?;
            return Ok(flip_tokens(&out));
        }
        _ => return Err(GlueError::ArcMismatch),
    }
    // the arc runs from a to b
    use SectorKind::*;
    let silent = |flow| Token::Ray(Ray { flow, axis: false });
    if a.kind == Elliptic {
        let mut out = vec![Token::Piece(a), silent(Flow::Out)];
        out.extend(merge_pieces(Piece::new(Parabolic, Flow::Out, Flow::Out), b)?);
        return Ok(out);
    }
    if b.kind == Elliptic {
        let mut out = merge_pieces(a, Piece::new(Parabolic, Flow::In, Flow::In))?;
        out.push(silent(Flow::In));
        out.push(Token::Piece(b));
        return Ok(out);
    }
    let kind = match (a.kind, b.kind) {
        (Hyperbolic, Hyperbolic) => Hyperbolic,
        (Hyperbolic, Parabolic) => Parabolic,
        (Parabolic, Hyperbolic) => Parabolic,
        (Parabolic, Parabolic) => Elliptic,
        _ => unreachable!(),
    };
    Ok(vec![Token::Piece(Piece::new(kind, a.left, b.right))])
}

/// Concatenate halves met along consecutive divisor arcs.
pub fn glue_linear(parts: &[Vec<Token>]) -> Result<Vec<Token>, GlueError> {
    let mut out: Vec<Token> = Vec::new();
    for part in parts {
        if part.is_empty() {
            continue;
        }
        if out.is_empty() {
            out.extend(part.iter().cloned());
            continue;
        }
        let a = match out.pop() {
            Some(Token::Piece(p)) => p,
            _ => return Err(GlueError::Malformed),
        };
        let b = match part[0] {
            Token::Piece(p) => p,
            _ => return Err(GlueError::Malformed),
        };
        out.extend(merge_pieces(a, b)?);
        out.extend(part[1..].iter().cloned());
    }
    Ok(out)
}

/// Close a linear stream into a cycle by merging its two end pieces.
pub fn close_cycle(stream: Vec<Token>) -> Result<Cycle, GlueError> {
    if stream.is_empty() {
        return Ok(Cycle { tokens: Vec::new() });
    }
    let rays = stream.iter().filter(|t| matches!(t, Token::Ray(_))).count();
    let first = match stream.first() {
        Some(Token::Piece(p)) => *p,
        _ => return Err(GlueError::Malformed),
    };
    let last = match stream.last() {
        Some(Token::Piece(p)) => *p,
        _ => return Err(GlueError::Malformed),
    };
    if rays == 0 {
        // a single wedge wrapping all the way round
        if first.kind == SectorKind::Hyperbolic && first.right != first.left {
            return Ok(Cycle { tokens: Vec::new() });
        }
        return Err(GlueError::Malformed);
    }
    let merged = merge_pieces(last, first)?;
    let mut tokens = merged;
    tokens.extend(stream[1..stream.len() - 1].iter().cloned());
    Ok(Cycle { tokens })
}

/// Cyclic sequence of alternating rays and pieces; empty when monodromic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub tokens: Vec<Token>,
}

impl Cycle {
    pub fn is_monodromic(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                Token::Piece(p) => Some(*p),
                _ => None,
            })
            .collect()
    }

    /// Drop rays that are not separatrices: between two parabolic wedges
    /// of the same flow, and parabolic wedges touching an elliptic one.
    pub fn normalized(&self) -> Cycle {
        let mut ts = self.tokens.clone();
        loop {
            let n = ts.len();
            if n < 4 {
                break;
            }
            let mut changed = false;
            for k in 0..n {
                if let Token::Ray(_) = ts[k] {
                    let a = match ts[(k + n - 1) % n] {
                        Token::Piece(p) => p,
                        _ => continue,
                    };
                    let b = match ts[(k + 1) % n] {
                        Token::Piece(p) => p,
                        _ => continue,
                    };
                    let merged = match (a.kind, b.kind) {
                        (SectorKind::Parabolic, SectorKind::Parabolic) if a.left == b.right => {
                            Some(Piece::new(SectorKind::Parabolic, a.left, b.right))
                        }
                        (SectorKind::Elliptic, SectorKind::Parabolic) => {
                            Some(Piece::new(SectorKind::Elliptic, a.left, b.right))
                        }
                        (SectorKind::Parabolic, SectorKind::Elliptic) => {
                            Some(Piece::new(SectorKind::Elliptic, a.left, b.right))
                        }
                        _ => None,
                    };
                    if let Some(m) = merged {
                        // replace a, ray, b by m
                        let ia = (k + n - 1) % n;
                        let ib = (k + 1) % n;
                        let mut next = Vec::with_capacity(n - 2);
                        for (idx, t) in ts.iter().enumerate() {
                            if idx == ia {
                                next.push(Token::Piece(m));
                            } else if idx != k && idx != ib {
                                next.push(*t);
                            }
                        }
                        // keep ray/piece alternation starting point irrelevant (cyclic)
                        ts = next;
                        changed = true;
                        break;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Cycle { tokens: ts }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let n = self.normalized();
        let mut e = 0;
        let mut h = 0;
        let mut p = 0;
        for piece in n.pieces() {
            match piece.kind {
                SectorKind::Elliptic => e += 1,
                SectorKind::Hyperbolic => h += 1,
                SectorKind::Parabolic => p += 1,
            }
        }
        (e, h, p)
    }

    /// Poincare index `1 + (e - h) / 2`.
    pub fn index(&self) -> i64 {
        if self.is_monodromic() {
            return 1;
        }
        let (e, h, _) = self.counts();
        1 + (e as i64 - h as i64) / 2
    }

    /// Canonical word up to rotation, reflection and time reversal.
    pub fn canonical_word(&self) -> String {
        let n = self.normalized();
        let letters: Vec<char> = n.pieces().iter().map(|p| p.kind.letter()).collect();
        canonical_rotation(&letters)
    }
}

/// Lexicographically least rotation of the word or its reverse.
pub fn canonical_rotation(letters: &[char]) -> String {
    if letters.is_empty() {
        return String::new();
    }
    let mut best: Option<String> = None;
    let rev: Vec<char> = letters.iter().rev().cloned().collect();
    for w in [letters.to_vec(), rev] {
        for k in 0..w.len() {
            let s: String = w[k..].iter().chain(w[..k].iter()).collect();
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.unwrap()
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_monodromic() {
            return write!(f, "monodromic");
        }
        write!(f, "{}", self.canonical_word())
    }
}
