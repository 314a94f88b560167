#pragma once
//
// Matrix Market coordinate/array reader and coordinate writer.
//

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <mpbal/dense.hpp>
#include <mpbal/sparse.hpp>

namespace mpbal {

struct MatrixHandle
{
    std::string                   name;        // file stem
    std::filesystem::path         path;
    std::size_t                   rows = 0;
    std::size_t                   cols = 0;
    bool                          symmetric = false;    // as declared in the header
    SparseMatrixCSC               csc;
    std::optional< DenseMatrix >  dense;       // present when rows, cols <= dense_cap()

    std::size_t  nnz () const { return csc.nnz(); }
};

//
// real/integer, general/symmetric, coordinate or array. Symmetric input is
// expanded to full storage and duplicate coordinates are summed.
// Throws ParseError (with line number) or UnsupportedField.
//
MatrixHandle     load_matrix_market ( const std::filesystem::path &  path );
SparseMatrixCSC  read_matrix_market ( std::istream &  in );

// coordinate real general, 17 significant digits
void  write_matrix_market ( std::ostream &  out, const SparseMatrixCSC &  A );
void  write_matrix_market ( const std::filesystem::path &  path, const SparseMatrixCSC &  A );

}// namespace mpbal
