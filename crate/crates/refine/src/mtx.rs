//! MatrixMarket coordinate dump of a sparse matrix.

use std::io::Write;

use refine_core::SparseMatrix;

use crate::error::Result;

pub fn write_matrix_market(mut w: impl Write, m: &SparseMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_entries() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 2, 1.5), (1, 0, -2.0)]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &m).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 3 1.5e0\n2 1 -2e0\n"
        );
    }
}
