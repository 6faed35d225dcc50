//! Concrete countable groups: ℤ, ℤ², ℤ³ and the discrete Heisenberg group.
//!
//! Each group comes with a canonical enumeration `g_1, g_2, …` of its
//! elements (indices start at 1). The enumeration drives the discrete metric
//! [`GroupKind::rho`], the point metric on full shifts and every "first N
//! sites" truncation in the crate, so it is fixed once here:
//!
//! * ℤ: `0, 1, -1, 2, -2, …`
//! * ℤ²: the square spiral `(0,0), (1,0), (1,1), (0,1), (-1,1), …`
//! * ℤ³ and Heisenberg: shells of constant max-norm, lexicographic inside a shell.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::Dyadic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum GroupKind {
    Z,
    Z2,
    Z3,
    /// Discrete Heisenberg group in upper-triangular coordinates,
    /// `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+x·y')`.
    H3,
}

/// An element of one of the [`GroupKind`] groups.
///
/// Unused trailing coordinates are always zero, so derived equality is
/// coordinate-wise equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    kind: GroupKind,
    coords: [i64; 3],
}

impl GroupKind {
    pub const ALL: [GroupKind; 4] = [GroupKind::Z, GroupKind::Z2, GroupKind::Z3, GroupKind::H3];

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Z => "Z",
            GroupKind::Z2 => "Z2",
            GroupKind::Z3 => "Z3",
            GroupKind::H3 => "H3",
        }
    }

    /// Name of the canonical enumeration, echoed in reports.
    pub fn enumeration_name(self) -> &'static str {
        match self {
            GroupKind::Z => "zigzag(0,1,-1,2,-2,...)",
            GroupKind::Z2 => "square-spiral",
            GroupKind::Z3 | GroupKind::H3 => "maxnorm-shell-lex",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            GroupKind::Z => 1,
            GroupKind::Z2 => 2,
            GroupKind::Z3 | GroupKind::H3 => 3,
        }
    }

    pub fn is_abelian(self) -> bool {
        self != GroupKind::H3
    }

    pub fn identity(self) -> GroupElement {
        GroupElement { kind: self, coords: [0; 3] }
    }

    /// Build an element from its coordinates; the slice length must match [`GroupKind::dim`].
    pub fn element(self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.dim() {
            return Err(Error::usage(format!(
                "{} expects {} coordinates, got {}",
                self.name(),
                self.dim(),
                coords.len()
            )));
        }
        let mut c = [0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(GroupElement { kind: self, coords: c })
    }

    pub fn z(n: i64) -> GroupElement {
        GroupElement { kind: GroupKind::Z, coords: [n, 0, 0] }
    }

    pub fn z2(x: i64, y: i64) -> GroupElement {
        GroupElement { kind: GroupKind::Z2, coords: [x, y, 0] }
    }

    pub fn h3(x: i64, y: i64, z: i64) -> GroupElement {
        GroupElement { kind: GroupKind::H3, coords: [x, y, z] }
    }

    /// Checked group product; operands from different groups are a usage error.
    pub fn op(self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        if a.kind != self || b.kind != self {
            return Err(Error::usage(format!(
                "cannot multiply {} and {} elements in {}",
                a.kind.name(),
                b.kind.name(),
                self.name()
            )));
        }
        Ok(mul_unchecked(a, b))
    }

    pub fn inv(self, a: &GroupElement) -> Result<GroupElement> {
        if a.kind != self {
            return Err(Error::usage(format!("{} element used as {}", a.kind.name(), self.name())));
        }
        Ok(a.inv())
    }

    /// `g_n` of the canonical enumeration (`n ≥ 1`).
    pub fn enumerate(self, n: u64) -> GroupElement {
        assert!(n >= 1, "enumeration indices start at 1");
        let m = n - 1;
        let coords = match self {
            GroupKind::Z => {
                let v = if m == 0 {
                    0
                } else if m % 2 == 1 {
                    m.div_ceil(2) as i64
                } else {
                    -((m / 2) as i64)
                };
                [v, 0, 0]
            }
            GroupKind::Z2 => {
                let (x, y) = spiral_unrank(m);
                [x, y, 0]
            }
            GroupKind::Z3 | GroupKind::H3 => shell_unrank(m),
        };
        GroupElement { kind: self, coords }
    }

    /// Inverse of [`GroupKind::enumerate`].
    pub fn index_of(self, g: &GroupElement) -> u64 {
        debug_assert_eq!(g.kind, self);
        let c = g.coords;
        match self {
            GroupKind::Z => {
                if c[0] > 0 {
                    2 * c[0] as u64
                } else {
                    2 * c[0].unsigned_abs() + 1
                }
            }
            GroupKind::Z2 => spiral_rank(c[0], c[1]) + 1,
            GroupKind::Z3 | GroupKind::H3 => shell_rank(c) + 1,
        }
    }

    /// The discrete metric `ρ(g_n, g_m) = 2^-min(n,m)` for `n ≠ m`.
    pub fn rho(self, a: &GroupElement, b: &GroupElement) -> Dyadic {
        if a == b {
            Dyadic::zero()
        } else {
            Dyadic::pow2_neg(self.index_of(a).min(self.index_of(b)))
        }
    }

    /// Box of radius `r`: `[-r, r]^d`, or `|x|,|y| ≤ r, |z| ≤ r²` for Heisenberg.
    pub fn folner_box(self, r: u32) -> Vec<GroupElement> {
        let r = r as i64;
        let mut out = Vec::new();
        match self {
            GroupKind::Z => out.extend((-r..=r).map(GroupKind::z)),
            GroupKind::Z2 => {
                for x in -r..=r {
                    for y in -r..=r {
                        out.push(GroupKind::z2(x, y));
                    }
                }
            }
            GroupKind::Z3 | GroupKind::H3 => {
                let rz = if self == GroupKind::H3 { r * r } else { r };
                for x in -r..=r {
                    for y in -r..=r {
                        for z in -rz..=rz {
                            out.push(GroupElement { kind: self, coords: [x, y, z] });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn parse_element(self, s: &str) -> Result<GroupElement> {
        let coords = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(format!("bad element {s:?}: {e}")))?;
        self.element(&coords)
            .map_err(|_| Error::parse(format!("element {s:?} does not belong to {}", self.name())))
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(GroupKind::Z),
            "Z2" => Ok(GroupKind::Z2),
            "Z3" => Ok(GroupKind::Z3),
            "H3" => Ok(GroupKind::H3),
            other => Err(Error::parse(format!("unknown group {other:?} (expected Z, Z2, Z3, H3)"))),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn mul_unchecked(a: &GroupElement, b: &GroupElement) -> GroupElement {
    let (x, y) = (a.coords, b.coords);
    let mut c = [x[0] + y[0], x[1] + y[1], x[2] + y[2]];
    if a.kind == GroupKind::H3 {
        c[2] += x[0] * y[1];
    }
    GroupElement { kind: a.kind, coords: c }
}

impl GroupElement {
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.kind.dim()]
    }

    pub fn is_identity(&self) -> bool {
        self.coords == [0; 3]
    }

    pub fn inv(&self) -> GroupElement {
        let [x, y, z] = self.coords;
        let z_inv = if self.kind == GroupKind::H3 { -z + x * y } else { -z };
        GroupElement { kind: self.kind, coords: [-x, -y, z_inv] }
    }

    /// Canonical text encoding: comma-separated coordinates.
    pub fn encode(&self) -> String {
        self.to_string()
    }
}

/// Group product. Panics on mixed groups; use [`GroupKind::op`] for a checked product.
impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        assert_eq!(self.kind, rhs.kind, "mixed-group product");
        mul_unchecked(&self, &rhs)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

// Square spiral around the origin. Ring r ≥ 1 holds 8r points and starts at
// (r, -r+1), walking up the right side, left along the top, down the left
// side and right along the bottom.
fn spiral_rank(x: i64, y: i64) -> u64 {
    let r = x.abs().max(y.abs());
    if r == 0 {
        return 0;
    }
    let before = ((2 * r - 1) * (2 * r - 1)) as u64;
    let t = if x == r && y > -r {
        y + r - 1
    } else if y == r {
        2 * r + (r - 1 - x)
    } else if x == -r {
        4 * r + (r - 1 - y)
    } else {
        6 * r + (x + r - 1)
    };
    before + t as u64
}

fn spiral_unrank(m: u64) -> (i64, i64) {
    if m == 0 {
        return (0, 0);
    }
    let r = m.isqrt().div_ceil(2);
    let t = (m - (2 * r - 1) * (2 * r - 1)) as i64;
    let r = r as i64;
    match t / (2 * r) {
        0 => (r, -r + 1 + t),
        1 => (r - 1 - (t - 2 * r), r),
        2 => (-r, r - 1 - (t - 4 * r)),
        _ => (-r + 1 + (t - 6 * r), -r),
    }
}

// Number of tuples in [-r, r]^m whose max-norm is exactly r, given whether an
// earlier coordinate already reached ±r.
fn shell_tail(m: u32, r: u64, hit: bool) -> u64 {
    let full = (2 * r + 1).pow(m);
    if hit {
        full
    } else if r == 0 {
        u64::from(m == 0)
    } else {
        full - (2 * r - 1).pow(m)
    }
}

fn shell_rank(c: [i64; 3]) -> u64 {
    let r = c.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    if r == 0 {
        return 0;
    }
    let mut rank = (2 * r - 1).pow(3);
    let mut hit = false;
    for (i, &v) in c.iter().enumerate() {
        let rest = 2 - i as u32;
        // values -r ..= v-1 precede v in this coordinate
        let below = (v + r as i64) as u64;
        if below > 0 {
            rank += shell_tail(rest, r, true) + (below - 1) * shell_tail(rest, r, hit);
        }
        hit |= v.unsigned_abs() == r;
    }
    rank
}

fn icbrt(m: u64) -> u64 {
    let mut c = (m as f64).cbrt() as u64;
    while c.pow(3) > m {
        c -= 1;
    }
    while (c + 1).pow(3) <= m {
        c += 1;
    }
    c
}

fn shell_unrank(m: u64) -> [i64; 3] {
    if m == 0 {
        return [0; 3];
    }
    let r = icbrt(m).div_ceil(2);
    let mut t = m - (2 * r - 1).pow(3);
    let mut hit = false;
    let mut out = [0i64; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let rest = 2 - i as u32;
        let edge = shell_tail(rest, r, true);
        let mid = shell_tail(rest, r, hit);
        let ri = r as i64;
        if t < edge {
            *slot = -ri;
            hit = true;
        } else if mid > 0 && t - edge < mid * (2 * r - 1) {
            let u = t - edge;
            *slot = -ri + 1 + (u / mid) as i64;
            t = u % mid;
        } else {
            t -= edge + mid * (2 * r - 1);
            *slot = ri;
            hit = true;
        }
    }
    out
}
