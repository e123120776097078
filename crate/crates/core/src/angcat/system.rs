use crate::error::{Error, Result};
use crate::exactlin::{solve_affine, Coset, Matrix, Ring};

use super::{postcompose_matrix, precompose_matrix, Backend, Morphism, ObjRef};

/// Handle to a block of unknowns in a [`LinearSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockId(pub usize);

/// One summand `coef · post ∘ Σ^susp(U) ∘ pre` of an equation.
#[derive(Debug, Clone)]
pub struct Term {
    pub coef: u64,
    pub post: Option<Morphism>,
    pub block: BlockId,
    pub susp: i64,
    pub pre: Option<Morphism>,
}

impl Term {
    pub fn plain(block: BlockId) -> Self {
        Term { coef: 1, post: None, block, susp: 0, pre: None }
    }

    pub fn post(mut self, g: &Morphism) -> Self {
        self.post = Some(g.clone());
        self
    }

    pub fn pre(mut self, h: &Morphism) -> Self {
        self.pre = Some(h.clone());
        self
    }

    pub fn suspended(mut self, k: i64) -> Self {
        self.susp = k;
        self
    }

    pub fn coef(mut self, c: u64) -> Self {
        self.coef = c;
        self
    }
}

#[derive(Debug, Clone)]
struct Block {
    src: ObjRef,
    tgt: ObjRef,
    offset: usize,
    len: usize,
}

/// Joint linear system whose unknowns are morphisms.
///
/// Equations are sums of terms `g ∘ Σ^k U ∘ h` set equal to a fixed morphism;
/// the full solution set is solved at once and returned as a coset over the
/// concatenated coordinates of all blocks.
pub struct LinearSystem<'a> {
    backend: &'a dyn Backend,
    ring: Ring,
    blocks: Vec<Block>,
    equations: Vec<(Vec<(usize, Matrix)>, Vec<u64>)>,
}

impl<'a> LinearSystem<'a> {
    pub fn new(backend: &'a dyn Backend) -> Self {
        LinearSystem { backend, ring: backend.ring(), blocks: Vec::new(), equations: Vec::new() }
    }

    pub fn add_unknown(&mut self, src: ObjRef, tgt: ObjRef) -> Result<BlockId> {
        let len = self.backend.hom_rank(src, tgt)?;
        let offset = self.blocks.last().map_or(0, |b| b.offset + b.len);
        self.blocks.push(Block { src, tgt, offset, len });
        Ok(BlockId(self.blocks.len() - 1))
    }

    pub fn total(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.offset + b.len)
    }

    fn term_matrix(&self, src: ObjRef, tgt: ObjRef, t: &Term) -> Result<Matrix> {
        let b = self.backend;
        let block = &self.blocks[t.block.0];
        let (bs, bt) = (block.src, block.tgt);
        let mut m = if t.susp == 0 {
            Matrix::identity(self.ring, block.len)
        } else {
            let (ss, st) = (bs.suspend(t.susp), bt.suspend(t.susp));
            let out = b.hom_rank(ss, st)?;
            let mut m = Matrix::zeros(self.ring, out, block.len);
            for j in 0..block.len {
                let mut e = vec![0; block.len];
                e[j] = 1;
                for (i, v) in b.suspend_coords(bs, bt, t.susp, &e)?.into_iter().enumerate() {
                    m.set(i, j, v);
                }
            }
            m
        };
        let (mut cur_src, mut cur_tgt) = (bs.suspend(t.susp), bt.suspend(t.susp));
        if let Some(h) = &t.pre {
            if !b.obj_eq(h.tgt, cur_src) {
                return Err(Error::Shape(format!("precomposed map ends at {}, not {}", h.tgt, cur_src)));
            }
            m = precompose_matrix(b, h, cur_tgt)?.mul(&m)?;
            cur_src = h.src;
        }
        if let Some(g) = &t.post {
            if !b.obj_eq(g.src, cur_tgt) {
                return Err(Error::Shape(format!("postcomposed map starts at {}, not {}", g.src, cur_tgt)));
            }
            m = postcompose_matrix(b, g, cur_src)?.mul(&m)?;
            cur_tgt = g.tgt;
        }
        if !b.obj_eq(cur_src, src) || !b.obj_eq(cur_tgt, tgt) {
            return Err(Error::Shape(format!(
                "term lands in Hom({cur_src},{cur_tgt}), equation is in Hom({src},{tgt})"
            )));
        }
        Ok(m.scale(t.coef))
    }

    /// Adds `Σ terms = rhs` in `Hom(src, tgt)`; `rhs = None` means zero.
    pub fn add_equation(
        &mut self,
        src: ObjRef,
        tgt: ObjRef,
        terms: &[Term],
        rhs: Option<&Morphism>,
    ) -> Result<()> {
        let rank = self.backend.hom_rank(src, tgt)?;
        let mut mats = Vec::with_capacity(terms.len());
        for t in terms {
            mats.push((t.block.0, self.term_matrix(src, tgt, t)?));
        }
        let rhs = match rhs {
            Some(r) => {
                if r.coords.len() != rank {
                    return Err(Error::Shape("right-hand side in the wrong hom space".into()));
                }
                r.coords.clone()
            }
            None => vec![0; rank],
        };
        self.equations.push((mats, rhs));
        Ok(())
    }

    /// The full solution set over all unknowns.
    pub fn solve(&self) -> Result<Coset> {
        let total = self.total();
        let rows: usize = self.equations.iter().map(|(_, r)| r.len()).sum();
        let mut a = Matrix::zeros(self.ring, rows, total);
        let mut b = Vec::with_capacity(rows);
        let mut r0 = 0;
        for (mats, rhs) in &self.equations {
            for (blk, m) in mats {
                let off = self.blocks[*blk].offset;
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let v = self.ring.add(a.get(r0 + i, off + j), m.get(i, j));
                        a.set(r0 + i, off + j, v);
                    }
                }
            }
            b.extend_from_slice(rhs);
            r0 += rhs.len();
        }
        solve_affine(&a, &b)
    }

    pub fn indices(&self, blocks: &[BlockId]) -> Vec<usize> {
        blocks
            .iter()
            .flat_map(|b| {
                let blk = &self.blocks[b.0];
                blk.offset..blk.offset + blk.len
            })
            .collect()
    }

    /// Projection of a solution set onto the given blocks.
    pub fn project(&self, sol: &Coset, blocks: &[BlockId]) -> Coset {
        sol.project(&self.indices(blocks))
    }

    /// Reads a block out of a full coordinate vector.
    pub fn morphism(&self, point: &[u64], block: BlockId) -> Morphism {
        let blk = &self.blocks[block.0];
        Morphism::new(blk.src, blk.tgt, self.ring, point[blk.offset..blk.offset + blk.len].to_vec())
    }
}
