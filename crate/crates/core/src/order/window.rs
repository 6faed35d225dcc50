use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind};

/// A finite contiguous segment `bi(lo), …, bi(hi)` of an anchored bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderWindow {
    group: GroupKind,
    lo: i64,
    elements: Vec<GroupElement>,
    positions: HashMap<GroupElement, i64>,
}

impl OrderWindow {
    /// Validates `lo ≤ 0 ≤ hi`, `bi(0) = e` and injectivity.
    pub fn new(group: GroupKind, lo: i64, elements: Vec<GroupElement>) -> Result<Self> {
        let hi = lo + elements.len() as i64 - 1;
        if lo > 0 || hi < 0 {
            return Err(Error::usage(format!("window [{lo}, {hi}] does not contain index 0")));
        }
        if !elements[(-lo) as usize].is_identity() {
            return Err(Error::usage(format!(
                "window is not anchored: index 0 holds {}",
                elements[(-lo) as usize]
            )));
        }
        let mut positions = HashMap::with_capacity(elements.len());
        for (i, g) in elements.iter().enumerate() {
            if g.kind() != group {
                return Err(Error::usage(format!("{} element in a {} window", g.kind(), group)));
            }
            if positions.insert(*g, lo + i as i64).is_some() {
                return Err(Error::usage(format!("element {g} appears twice in the window")));
            }
        }
        Ok(OrderWindow { group, lo, elements, positions })
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.elements.len() as i64 - 1
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element_at(&self, k: i64) -> Result<GroupElement> {
        if k < self.lo || k > self.hi() {
            return Err(Error::horizon(format!("index {k} outside window [{}, {}]", self.lo, self.hi())));
        }
        Ok(self.elements[(k - self.lo) as usize])
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<i64> {
        if g.kind() != self.group {
            return Err(Error::usage(format!("{} element queried in a {} window", g.kind(), self.group)));
        }
        self.positions
            .get(g)
            .copied()
            .ok_or_else(|| Error::horizon(format!("{g} not in window [{}, {}]", self.lo, self.hi())))
    }

    /// Acting shifts the valid range by `-k` where `g = k^≺`; nothing is extrapolated.
    pub fn act(&self, g: &GroupElement) -> Result<OrderWindow> {
        let k = self.index_of(g)?;
        let g_inv = g.inv();
        let elements = self.elements.iter().map(|h| *h * g_inv).collect();
        OrderWindow::new(self.group, self.lo - k, elements)
    }

    /// One `k<TAB>element` line per index, each terminated by `\n`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, g) in self.elements.iter().enumerate() {
            out.push_str(&format!("{}\t{}\n", self.lo + i as i64, g));
        }
        out
    }

    pub fn parse(group: GroupKind, text: &str) -> Result<OrderWindow> {
        let mut lo = None;
        let mut elements = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, enc) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(format!("line {}: expected k<TAB>element", lineno + 1)))?;
            let k: i64 = k
                .trim()
                .parse()
                .map_err(|e| Error::parse(format!("line {}: bad index: {e}", lineno + 1)))?;
            let expected = lo.map_or(k, |l: i64| l + elements.len() as i64);
            if k != expected {
                return Err(Error::parse(format!(
                    "line {}: indices must be contiguous (expected {expected}, got {k})",
                    lineno + 1
                )));
            }
            lo.get_or_insert(k);
            elements.push(group.parse_element(enc)?);
        }
        let lo = lo.ok_or_else(|| Error::parse("empty order window"))?;
        OrderWindow::new(group, lo, elements).map_err(|e| match e {
            Error::Usage(m) => Error::Parse(m),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_swap_window() -> OrderWindow {
        // bi: -1↦-1, 0↦0, 1↦2, 2↦1, 3↦3
        let e = [-1, 0, 2, 1, 3].map(GroupKind::z).to_vec();
        OrderWindow::new(GroupKind::Z, -1, e).unwrap()
    }

    #[test]
    fn lookups_and_horizon() {
        let w = pair_swap_window();
        assert_eq!(w.element_at(1).unwrap(), GroupKind::z(2));
        assert_eq!(w.index_of(&GroupKind::z(1)).unwrap(), 2);
        assert!(w.element_at(4).unwrap_err().is_horizon());
        assert!(w.index_of(&GroupKind::z(9)).unwrap_err().is_horizon());
        assert!(matches!(w.index_of(&GroupKind::z2(0, 0)), Err(Error::Usage(_))));
    }

    #[test]
    fn act_example() {
        let acted = pair_swap_window().act(&GroupKind::z(2)).unwrap();
        assert_eq!((acted.lo(), acted.hi()), (-2, 2));
        let got: Vec<i64> = (-1..=2).map(|k| acted.element_at(k).unwrap().coords()[0]).collect();
        assert_eq!(got, vec![-2, 0, -1, 1]);
    }

    #[test]
    fn rejects_invalid_windows() {
        assert!(OrderWindow::new(GroupKind::Z, 1, vec![GroupKind::z(0)]).is_err());
        assert!(OrderWindow::new(GroupKind::Z, 0, vec![GroupKind::z(1)]).is_err());
        assert!(OrderWindow::new(GroupKind::Z, 0, vec![GroupKind::z(0), GroupKind::z(0)]).is_err());
    }

    #[test]
    fn text_format() {
        let w = pair_swap_window();
        let text = w.to_text();
        assert_eq!(text, "-1\t-1\n0\t0\n1\t2\n2\t1\n3\t3\n");
        assert_eq!(OrderWindow::parse(GroupKind::Z, &text).unwrap(), w);
        assert!(OrderWindow::parse(GroupKind::Z, "0\t0\n2\t1\n").is_err());
        assert!(OrderWindow::parse(GroupKind::Z, "1\t1\n").is_err());
        assert!(OrderWindow::parse(GroupKind::Z, "0 0\n").is_err());
        assert!(OrderWindow::parse(GroupKind::Z, "").is_err());
    }
}
