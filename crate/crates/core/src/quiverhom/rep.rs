use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Matrix, Ring};

use super::QuiverAlgebra;

/// A representation: a vector space per vertex and a matrix per arrow.
///
/// The matrix of `α: s -> t` has shape `dims[t] × dims[s]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rep {
    pub dims: Vec<usize>,
    pub maps: Vec<Matrix>,
}

/// Vertexwise matrices `g_v: M(v) -> N(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleMap {
    pub blocks: Vec<Matrix>,
}

impl Rep {
    /// Builds a representation from integer arrow matrices (row lists) and
    /// checks shapes and relations.
    pub fn from_i64(alg: &QuiverAlgebra, dims: Vec<usize>, maps: &[Vec<Vec<i64>>]) -> Result<Rep> {
        let ring = alg.ring();
        if dims.len() != alg.num_vertices() || maps.len() != alg.num_arrows() {
            return Err(Error::Shape("representation does not match the quiver".into()));
        }
        let maps = maps
            .iter()
            .enumerate()
            .map(|(a, rows)| {
                let (s, t) = alg.arrow_ends(a);
                if rows.is_empty() || dims[s] == 0 {
                    return Ok(Matrix::zeros(ring, dims[t], dims[s]));
                }
                let m = Matrix::from_i64(ring, rows)?;
                if m.rows() != dims[t] || m.cols() != dims[s] {
                    return Err(Error::Shape(format!("arrow {a} has the wrong shape")));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = Rep { dims, maps };
        rep.validate(alg)?;
        Ok(rep)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Matrix of a basis path acting on the representation.
    pub fn path_matrix(&self, alg: &QuiverAlgebra, path: usize) -> Matrix {
        let p = &alg.basis()[path];
        let mut m = Matrix::identity(alg.ring(), self.dims[p.src]);
        for &a in &p.arrows {
            m = self.maps[a].mul(&m).expect("arrow shapes chain along a path");
        }
        m
    }

    /// Matrix of an element of `e_s Λ e_t`.
    pub fn element_matrix(&self, alg: &QuiverAlgebra, s: usize, t: usize, x: &[u64]) -> Matrix {
        let ring = alg.ring();
        let mut m = Matrix::zeros(ring, self.dims[t], self.dims[s]);
        for (&b, &c) in alg.between(s, t).iter().zip(x) {
            if c != 0 {
                m = m.add(&self.path_matrix(alg, b).scale(c)).expect("same shape");
            }
        }
        m
    }

    fn validate(&self, alg: &QuiverAlgebra) -> Result<()> {
        for rel in &alg.spec().relations {
            let mut acc: Option<Matrix> = None;
            for term in rel {
                let m = self.word_matrix(alg, &term.path)?.scale(alg.ring().reduce(term.coeff));
                acc = Some(match acc {
                    None => m,
                    Some(a) => a.add(&m)?,
                });
            }
            if let Some(a) = acc {
                if !a.is_zero() {
                    return Err(Error::Invalid("representation violates a relation".into()));
                }
            }
        }
        Ok(())
    }

    fn word_matrix(&self, alg: &QuiverAlgebra, text: &str) -> Result<Matrix> {
        let arrows = alg.walk(text)?;
        let (s, _) = alg.arrow_ends(arrows[0]);
        let mut m = Matrix::identity(alg.ring(), self.dims[s]);
        for a in arrows {
            m = self.maps[a].mul(&m)?;
        }
        Ok(m)
    }

    /// The indecomposable projective `P_v`: paths starting at `v`.
    pub fn projective(alg: &QuiverAlgebra, v: usize) -> Rep {
        let ring = alg.ring();
        let nv = alg.num_vertices();
        let dims: Vec<usize> = (0..nv).map(|x| alg.between_dim(v, x)).collect();
        let maps = (0..alg.num_arrows())
            .map(|a| {
                let (s, t) = alg.arrow_ends(a);
                let mut m = Matrix::zeros(ring, dims[t], dims[s]);
                let arrow = alg.arrow_element(a);
                for k in 0..dims[s] {
                    let mut e = vec![0u64; dims[s]];
                    e[k] = 1;
                    let img = alg.mul(v, s, t, &e, &arrow);
                    for (r, &x) in img.iter().enumerate() {
                        m.set(r, k, x);
                    }
                }
                m
            })
            .collect();
        Rep { dims, maps }
    }

    pub fn zero(alg: &QuiverAlgebra) -> Rep {
        Rep::from_i64(alg, vec![0; alg.num_vertices()], &vec![vec![]; alg.num_arrows()]).expect("zero representation")
    }
}

impl ModuleMap {
    pub fn from_i64(alg: &QuiverAlgebra, src: &Rep, tgt: &Rep, blocks: &[Vec<Vec<i64>>]) -> Result<ModuleMap> {
        let ring = alg.ring();
        if blocks.len() != alg.num_vertices() {
            return Err(Error::Shape("module map needs one block per vertex".into()));
        }
        let blocks = blocks
            .iter()
            .enumerate()
            .map(|(v, rows)| {
                if rows.is_empty() || src.dims[v] == 0 {
                    return Ok(Matrix::zeros(ring, tgt.dims[v], src.dims[v]));
                }
                let m = Matrix::from_i64(ring, rows)?;
                if m.rows() != tgt.dims[v] || m.cols() != src.dims[v] {
                    return Err(Error::Shape(format!("module map block at vertex {v} has the wrong shape")));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let g = ModuleMap { blocks };
        g.check(alg, src, tgt)?;
        Ok(g)
    }

    pub fn check(&self, alg: &QuiverAlgebra, src: &Rep, tgt: &Rep) -> Result<()> {
        for a in 0..alg.num_arrows() {
            let (s, t) = alg.arrow_ends(a);
            let lhs = self.blocks[t].mul(&src.maps[a])?;
            let rhs = tgt.maps[a].mul(&self.blocks[s])?;
            if lhs != rhs {
                return Err(Error::Invalid(format!("module map does not commute with arrow {a}")));
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> Ring {
        self.blocks[0].ring()
    }
}
