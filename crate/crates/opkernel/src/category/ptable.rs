//! Function tables for finite pointed sets.
//!
//! Element 0 of every object is the basepoint, so a table is
//! basepoint-preserving exactly when `map[0] == 0`.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PTable {
    pub src_card: usize,
    pub dst_card: usize,
    pub map: Vec<u32>,
}

impl PTable {
    pub fn new(src_card: usize, dst_card: usize, map: Vec<u32>) -> Self {
        debug_assert_eq!(map.len(), src_card);
        debug_assert!(map.iter().all(|&v| (v as usize) < dst_card));
        debug_assert!(src_card == 0 || map[0] == 0, "basepoint must be preserved");
        PTable {
            src_card,
            dst_card,
            map,
        }
    }

    pub fn identity(card: usize) -> Self {
        PTable {
            src_card: card,
            dst_card: card,
            map: (0..card as u32).collect(),
        }
    }

    /// Everything to the basepoint.
    pub fn collapse(src_card: usize, dst_card: usize) -> Self {
        PTable {
            src_card,
            dst_card,
            map: vec![0; src_card],
        }
    }

    pub fn composed(g: &PTable, f: &PTable) -> PTable {
        assert_eq!(g.src_card, f.dst_card, "composition shape mismatch");
        PTable {
            src_card: f.src_card,
            dst_card: g.dst_card,
            map: f.map.iter().map(|&m| g.map[m as usize]).collect(),
        }
    }

    pub fn apply(&self, e: usize) -> usize {
        self.map[e] as usize
    }

    pub fn is_bijective(&self) -> bool {
        if self.src_card != self.dst_card {
            return false;
        }
        let mut hit = vec![false; self.dst_card];
        for &v in &self.map {
            if hit[v as usize] {
                return false;
            }
            hit[v as usize] = true;
        }
        true
    }

    pub fn inverted(&self) -> Option<PTable> {
        if !self.is_bijective() {
            return None;
        }
        let mut map = vec![0u32; self.src_card];
        for (e, &v) in self.map.iter().enumerate() {
            map[v as usize] = e as u32;
        }
        Some(PTable {
            src_card: self.dst_card,
            dst_card: self.src_card,
            map,
        })
    }
}
