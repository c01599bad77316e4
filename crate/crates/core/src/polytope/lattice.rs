use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::HPolytope;

/// Integer points of `NΔ` in lexicographic order, produced lazily by a
/// depth-first scan of the bounding box with per-slice interval pruning.
#[derive(Clone, Debug)]
pub struct LatticePoints {
    normals: Vec<Vec<i128>>,
    rhs: Vec<i128>,
    lo: Vec<i128>,
    hi: Vec<i128>,
    x: Vec<i128>,
    upper: Vec<i128>,
    depth: usize,
    started: bool,
    done: bool,
}

impl HPolytope {
    pub fn lattice_points(&self, n: u64) -> LatticePoints {
        let scale = BigInt::from(n);
        let mut lo = vec![i128::MAX; self.dim];
        let mut hi = vec![i128::MIN; self.dim];
        for v in &self.vertices {
            for (i, x) in v.coords.iter().enumerate() {
                let (num, den) = (x.numer() * &scale, x.denom().clone());
                let f = num.div_floor(&den).to_i128().expect("coordinate fits in i128");
                let c = (-(-num).div_floor(&den)).to_i128().expect("coordinate fits in i128");
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(f);
            }
        }
        LatticePoints {
            normals: self.facets.iter().map(|f| f.u.iter().map(|&a| a as i128).collect()).collect(),
            rhs: self.facets.iter().map(|f| f.c as i128 * n as i128).collect(),
            x: lo.clone(),
            upper: hi.clone(),
            lo,
            hi,
            depth: 0,
            started: false,
            done: false,
        }
    }

    pub fn count_lattice_points(&self, n: u64) -> u64 {
        self.lattice_points(n).count() as u64
    }
}

impl LatticePoints {
    /// Admissible range of coordinate `level` given the fixed prefix, using
    /// box bounds for the remaining coordinates.
    fn range(&self, level: usize) -> (i128, i128) {
        let (mut lo, mut hi) = (self.lo[level], self.hi[level]);
        for (u, &c) in self.normals.iter().zip(&self.rhs) {
            let a = u[level];
            if a == 0 {
                continue;
            }
            let mut rest = c;
            for i in 0..level {
                rest -= u[i] * self.x[i];
            }
            for i in level + 1..u.len() {
                rest -= (u[i] * self.lo[i]).min(u[i] * self.hi[i]);
            }
            if a > 0 {
                hi = hi.min(Integer::div_floor(&rest, &a));
            } else {
                lo = lo.max(-Integer::div_floor(&rest, &-a));
            }
        }
        (lo, hi)
    }

    fn bump_level(&mut self) -> bool {
        while self.depth > 0 {
            let l = self.depth - 1;
            if self.x[l] < self.upper[l] {
                self.x[l] += 1;
                return true;
            }
            self.depth -= 1;
        }
        false
    }

    fn descend(&mut self) -> bool {
        while self.depth < self.x.len() {
            let (lo, hi) = self.range(self.depth);
            if lo <= hi {
                self.x[self.depth] = lo;
                self.upper[self.depth] = hi;
                self.depth += 1;
            } else if !self.bump_level() {
                return false;
            }
        }
        true
    }

    fn feasible(&self) -> bool {
        self.normals.iter().zip(&self.rhs).all(|(u, &c)| u.iter().zip(&self.x).map(|(a, b)| a * b).sum::<i128>() <= c)
    }
}

impl Iterator for LatticePoints {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let mut ok = if self.started {
            self.bump_level() && self.descend()
        } else {
            self.started = true;
            self.descend()
        };
        while ok {
            if self.feasible() {
                return Some(self.x.iter().map(|&v| v as i64).collect());
            }
            ok = self.bump_level() && self.descend();
        }
        self.done = true;
        None
    }
}
