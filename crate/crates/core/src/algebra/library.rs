//! The file library every scheme codes over.

use serde::{Deserialize, Serialize};

use super::{AlgebraError, Gf, SymbolVec};

/// Flat index layout: `files` files, each split into `subfiles` subfiles of
/// `sub_len` symbols. Symbol `(n, s, j)` lives at `(n * subfiles + s) * sub_len + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Layout {
    pub files: usize,
    pub subfiles: usize,
    pub sub_len: usize,
}

impl Layout {
    pub fn new(files: usize, subfiles: usize, sub_len: usize) -> Self {
        Layout {
            files,
            subfiles,
            sub_len,
        }
    }

    #[inline]
    pub fn index(&self, file: usize, subfile: usize, j: usize) -> usize {
        (file * self.subfiles + subfile) * self.sub_len + j
    }

    /// Symbols per file.
    pub fn file_len(&self) -> usize {
        self.subfiles * self.sub_len
    }

    /// Total symbols in the library.
    pub fn dim(&self) -> usize {
        self.files * self.file_len()
    }

    /// Number of library realizations over GF(q), if it fits in `u128`.
    pub fn realizations(&self, q: u32) -> Option<u128> {
        (q as u128).checked_pow(u32::try_from(self.dim()).ok()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Library {
    modulus: u32,
    layout: Layout,
    symbols: Vec<u32>,
}

impl Library {
    pub fn new(gf: Gf, layout: Layout, symbols: Vec<u32>) -> Result<Self, AlgebraError> {
        if symbols.len() != layout.dim() {
            return Err(AlgebraError::LibraryShape {
                expected: layout.dim(),
                got: symbols.len(),
            });
        }
        let q = gf.modulus();
        if let Some(&value) = symbols.iter().find(|&&v| v >= q) {
            return Err(AlgebraError::OutOfField { value, modulus: q });
        }
        Ok(Library {
            modulus: q,
            layout,
            symbols,
        })
    }

    /// Builds a library from whole files.
    pub fn from_files(gf: Gf, layout: Layout, files: &[SymbolVec]) -> Result<Self, AlgebraError> {
        let mut symbols = Vec::with_capacity(layout.dim());
        for f in files {
            if f.len() != layout.file_len() {
                return Err(AlgebraError::LibraryShape {
                    expected: layout.file_len(),
                    got: f.len(),
                });
            }
            symbols.extend_from_slice(f.values());
        }
        Library::new(gf, layout, symbols)
    }

    /// The `index`-th realization in base-q order (symbol 0 least significant).
    pub fn from_index(gf: Gf, layout: Layout, mut index: u128) -> Self {
        let q = gf.modulus() as u128;
        let symbols = (0..layout.dim())
            .map(|_| {
                let v = (index % q) as u32;
                index /= q;
                v
            })
            .collect();
        Library {
            modulus: gf.modulus(),
            layout,
            symbols,
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn file(&self, n: usize) -> SymbolVec {
        let len = self.layout.file_len();
        SymbolVec::from_raw(self.modulus, self.symbols[n * len..(n + 1) * len].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_indexing() {
        let l = Layout::new(2, 3, 2);
        assert_eq!(l.dim(), 12);
        assert_eq!(l.index(1, 2, 1), 11);
        assert_eq!(l.realizations(3), Some(3u128.pow(12)));
    }

    #[test]
    fn realizations_enumerate_all() {
        let gf = Gf::new(3).unwrap();
        let l = Layout::new(2, 1, 1);
        let libs: Vec<_> = (0..9).map(|i| Library::from_index(gf, l, i).symbols().to_vec()).collect();
        assert_eq!(libs[0], vec![0, 0]);
        assert_eq!(libs[5], vec![2, 1]);
        let mut sorted = libs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 9);
    }

    #[test]
    fn shape_checked() {
        let gf = Gf::new(2).unwrap();
        assert!(Library::new(gf, Layout::new(2, 1, 1), vec![0]).is_err());
        assert!(Library::new(gf, Layout::new(1, 1, 1), vec![2]).is_err());
    }
}
