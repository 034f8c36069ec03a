//! Next-Fit-Decreasing-Height shelf packing and its area certificate.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rat;

/// A 2D rectangle; `h` is the dimension NFDH sorts by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect2D {
    pub id: String,
    pub w: Rat,
    pub h: Rat,
}

impl Rect2D {
    pub fn new(id: impl Into<String>, w: Rat, h: Rat) -> Self {
        Rect2D { id: id.into(), w, h }
    }

    pub fn area(&self) -> Rat {
        &self.w * &self.h
    }
}

/// A rectangle placed at `(x, y)` with its original extents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedRect {
    pub id: String,
    pub x: Rat,
    pub y: Rat,
    pub w: Rat,
    pub h: Rat,
}

impl PlacedRect {
    pub fn overlaps(&self, other: &PlacedRect) -> bool {
        self.x < &other.x + &other.w
            && other.x < &self.x + &self.w
            && self.y < &other.y + &other.h
            && other.y < &self.y + &self.h
    }
}

/// One NFDH shelf: members laid left to right on the shelf base line.
#[derive(Debug, Clone)]
pub struct Shelf {
    pub base_z: Rat,
    pub height: Rat,
    pub members: Vec<PlacedRect>,
}

/// Packs rectangles into a strip of the given width with NFDH. Returns the
/// shelves and the total packing height (the sum of shelf heights).
pub fn nfdh_2d(rects: &[Rect2D], strip_width: &Rat) -> Result<(Vec<Shelf>, Rat)> {
    for r in rects {
        if &r.w > strip_width {
            return Err(Error::Precondition(format!(
                "rect {:?} is wider ({}) than the strip ({})",
                r.id, r.w, strip_width
            )));
        }
    }
    let mut order: Vec<&Rect2D> = rects.iter().collect();
    order.sort_by(|a, b| b.h.cmp(&a.h).then_with(|| a.id.cmp(&b.id)));

    let mut shelves: Vec<Shelf> = Vec::new();
    let mut base = Rat::zero();
    let mut used = Rat::zero();
    for rect in order {
        let fits_current =
            !shelves.is_empty() && &used + &rect.w <= *strip_width;
        if !fits_current {
            if let Some(last) = shelves.last() {
                base = &last.base_z + &last.height;
            }
            used = Rat::zero();
            shelves.push(Shelf { base_z: base.clone(), height: rect.h.clone(), members: Vec::new() });
        }
        let shelf = shelves.last_mut().expect("shelf exists");
        shelf.members.push(PlacedRect {
            id: rect.id.clone(),
            x: used.clone(),
            y: shelf.base_z.clone(),
            w: rect.w.clone(),
            h: rect.h.clone(),
        });
        used += &rect.w;
    }
    let total = shelves
        .last()
        .map(|s| &s.base_z + &s.height)
        .unwrap_or_else(Rat::zero);
    Ok((shelves, total))
}

/// Sufficiency certificate: when the total area is at most
/// `(box_h - h_max)(box_w - w_max)`, NFDH is guaranteed to place every
/// rectangle within `box_h`. Sufficient, not necessary.
pub fn nfdh_fits(box_w: &Rat, box_h: &Rat, rects: &[Rect2D]) -> bool {
    if rects.is_empty() {
        return true;
    }
    let w_max = rects.iter().map(|r| r.w.clone()).max().expect("nonempty");
    let h_max = rects.iter().map(|r| r.h.clone()).max().expect("nonempty");
    if &w_max > box_w || &h_max > box_h {
        return false;
    }
    let area: Rat = rects.iter().map(|r| r.area()).sum();
    area <= (box_h - h_max) * (box_w - w_max)
}

/// Containment and pairwise-disjointness check for 2D placements, swept
/// along y to keep near-disjoint layouts cheap.
pub fn verify_rects_2d(placed: &[PlacedRect], box_w: &Rat, box_h: &Rat) -> bool {
    use num_traits::Signed;
    for p in placed {
        if p.x.is_negative() || p.y.is_negative() {
            return false;
        }
        if &p.x + &p.w > *box_w || &p.y + &p.h > *box_h {
            return false;
        }
    }
    let mut order: Vec<usize> = (0..placed.len()).collect();
    order.sort_by(|&a, &b| placed[a].y.cmp(&placed[b].y).then(a.cmp(&b)));
    let mut active: Vec<usize> = Vec::new();
    for &cur in &order {
        let c = &placed[cur];
        active.retain(|&a| &placed[a].y + &placed[a].h > c.y);
        for &a in &active {
            if placed[a].overlaps(c) {
                return false;
            }
        }
        active.push(cur);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    fn r(id: &str, w: (i64, i64), h: (i64, i64)) -> Rect2D {
        Rect2D::new(id, rat(w.0, w.1), rat(h.0, h.1))
    }

    #[test]
    fn hand_simulated_example() {
        // (0.6,0.5), (0.5,0.4), (0.3,0.3) into width 1:
        // shelf of height 0.5 holds the first, shelf of height 0.4 the rest.
        let rects = vec![r("a", (3, 5), (1, 2)), r("b", (1, 2), (2, 5)), r("c", (3, 10), (3, 10))];
        let (shelves, height) = nfdh_2d(&rects, &rint(1)).unwrap();
        assert_eq!(shelves.len(), 2);
        assert_eq!(shelves[0].height, rat(1, 2));
        assert_eq!(shelves[0].members.len(), 1);
        assert_eq!(shelves[1].height, rat(2, 5));
        assert_eq!(shelves[1].members.len(), 2);
        assert_eq!(height, rat(9, 10));
    }

    #[test]
    fn empty_list_packs_to_zero() {
        let (shelves, height) = nfdh_2d(&[], &rint(1)).unwrap();
        assert!(shelves.is_empty());
        assert_eq!(height, rint(0));
    }

    #[test]
    fn single_full_rect() {
        let rects = vec![r("a", (1, 1), (1, 1))];
        let (shelves, height) = nfdh_2d(&rects, &rint(1)).unwrap();
        assert_eq!(shelves.len(), 1);
        assert_eq!(height, rint(1));
    }

    #[test]
    fn too_wide_rect_errors() {
        let rects = vec![r("a", (3, 2), (1, 2))];
        assert!(nfdh_2d(&rects, &rint(1)).is_err());
    }

    #[test]
    fn shelf_members_are_disjoint() {
        let rects = vec![
            r("a", (2, 5), (1, 2)),
            r("b", (2, 5), (1, 2)),
            r("c", (2, 5), (2, 5)),
            r("d", (1, 2), (1, 4)),
        ];
        let (shelves, height) = nfdh_2d(&rects, &rint(1)).unwrap();
        let placed: Vec<PlacedRect> = shelves.into_iter().flat_map(|s| s.members).collect();
        assert_eq!(placed.len(), 4);
        assert!(verify_rects_2d(&placed, &rint(1), &height));
    }

    #[test]
    fn certificate_boundary_cases() {
        // One 0.5x0.5 rect in a unit box: area 0.25 == (1-0.5)(1-0.5).
        let one = vec![r("a", (1, 2), (1, 2))];
        assert!(nfdh_fits(&rint(1), &rint(1), &one));
        let (_, height) = nfdh_2d(&one, &rint(1)).unwrap();
        assert!(height <= rint(1));

        // A 1x1 rect fails the certificate even though NFDH trivially fits it.
        let full = vec![r("a", (1, 1), (1, 1))];
        assert!(!nfdh_fits(&rint(1), &rint(1), &full));
        let (_, height) = nfdh_2d(&full, &rint(1)).unwrap();
        assert!(height <= rint(1));
    }

    #[test]
    fn certificate_with_small_items() {
        // 360 rects of 0.05 x 0.05 fill area 0.9; bound is 0.95^2 = 0.9025.
        let rects: Vec<Rect2D> = (0..360)
            .map(|i| Rect2D::new(format!("r{i:03}"), rat(1, 20), rat(1, 20)))
            .collect();
        let area: Rat = rects.iter().map(|r| r.area()).sum();
        assert_eq!(area, rat(9, 10));
        assert!(nfdh_fits(&rint(1), &rint(1), &rects));
        let (_, height) = nfdh_2d(&rects, &rint(1)).unwrap();
        assert!(height <= rint(1));
    }
}
