//! Lookup of cells by cube, so set operations only pair up cells whose
//! propositional parts can interact.

use rustc_hash::FxHashMap;

use super::cube::Cube;

struct Group {
    mask: u128,
    buckets: FxHashMap<u128, Vec<usize>>,
}

/// Positions of cubes, grouped by which propositions they fix. Sets
/// usually have few distinct masks, so most queries are a handful of hash
/// lookups.
#[derive(Default)]
pub(crate) struct CubeIndex {
    groups: Vec<Group>,
}

impl CubeIndex {
    pub fn new<'a>(cubes: impl IntoIterator<Item = &'a Cube>) -> CubeIndex {
        let mut idx = CubeIndex::default();
        for (i, c) in cubes.into_iter().enumerate() {
            idx.insert(i, *c);
        }
        idx
    }

    pub fn insert(&mut self, pos: usize, cube: Cube) {
        let g = match self.groups.iter().position(|g| g.mask == cube.mask) {
            Some(g) => g,
            None => {
                self.groups.push(Group {
                    mask: cube.mask,
                    buckets: FxHashMap::default(),
                });
                self.groups.len() - 1
            }
        };
        self.groups[g].buckets.entry(cube.value).or_default().push(pos);
    }

    /// Positions of cubes consistent with `cube`.
    pub fn compatible(&self, cube: Cube, out: &mut Vec<usize>) {
        out.clear();
        for g in &self.groups {
            if g.mask & !cube.mask == 0 {
                if let Some(b) = g.buckets.get(&(cube.value & g.mask)) {
                    out.extend_from_slice(b);
                }
            } else {
                let shared = g.mask & cube.mask;
                for (v, b) in &g.buckets {
                    if (v ^ cube.value) & shared == 0 {
                        out.extend_from_slice(b);
                    }
                }
            }
        }
    }

    /// Positions of cubes implied by `cube` (weaker or equal).
    pub fn implied_by(&self, cube: Cube, out: &mut Vec<usize>) {
        out.clear();
        for g in &self.groups {
            if g.mask & !cube.mask == 0 {
                if let Some(b) = g.buckets.get(&(cube.value & g.mask)) {
                    out.extend_from_slice(b);
                }
            }
        }
    }

    /// Positions of cubes implying `cube` (stronger or equal).
    pub fn implying(&self, cube: Cube, out: &mut Vec<usize>) {
        out.clear();
        for g in &self.groups {
            if cube.mask & !g.mask != 0 {
                continue;
            }
            if g.mask == cube.mask {
                if let Some(b) = g.buckets.get(&cube.value) {
                    out.extend_from_slice(b);
                }
            } else {
                for (v, b) in &g.buckets {
                    if (v ^ cube.value) & cube.mask == 0 {
                        out.extend_from_slice(b);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(lits: &[(usize, bool)]) -> Cube {
        lits.iter().fold(Cube::TRUE, |c, &(p, v)| c.with(p, v).unwrap())
    }

    #[test]
    fn queries_match_brute_force() {
        let cubes: Vec<Cube> = vec![
            Cube::TRUE,
            cube(&[(0, true)]),
            cube(&[(0, false)]),
            cube(&[(0, true), (1, false)]),
            cube(&[(1, true)]),
            cube(&[(0, false), (1, true), (2, true)]),
        ];
        let idx = CubeIndex::new(&cubes);
        let mut out = Vec::new();
        for q in &cubes {
            idx.compatible(*q, &mut out);
            out.sort();
            let want: Vec<usize> = (0..cubes.len()).filter(|&i| cubes[i].conjoin(q).is_some()).collect();
            assert_eq!(out, want);
            idx.implied_by(*q, &mut out);
            out.sort();
            let want: Vec<usize> = (0..cubes.len()).filter(|&i| q.implies(&cubes[i])).collect();
            assert_eq!(out, want);
            idx.implying(*q, &mut out);
            out.sort();
            let want: Vec<usize> = (0..cubes.len()).filter(|&i| cubes[i].implies(q)).collect();
            assert_eq!(out, want);
        }
    }
}
