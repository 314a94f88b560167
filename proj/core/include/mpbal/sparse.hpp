#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <mpbal/dense.hpp>
#include <mpbal/fpemu.hpp>

namespace mpbal {

struct Triplet
{
    std::size_t  row;
    std::size_t  col;
    double       value;
};

//
// Compressed sparse column storage; row indices sorted within each column.
//
class SparseMatrixCSC
{
public:
    SparseMatrixCSC () = default;
    SparseMatrixCSC ( std::size_t  rows, std::size_t  cols );

    // duplicates are summed, entries sorted; explicit zeros kept unless drop_zeros
    static SparseMatrixCSC  from_triplets ( std::size_t  rows, std::size_t  cols,
                                            std::vector< Triplet >  entries,
                                            bool  drop_zeros = false );
    static SparseMatrixCSC  from_dense    ( const DenseMatrix &  A );
    static SparseMatrixCSC  identity      ( std::size_t  n );

    std::size_t  rows () const { return rows_; }
    std::size_t  cols () const { return cols_; }
    std::size_t  nnz  () const { return row_idx_.size(); }

    std::span< const std::size_t >  col_rows   ( std::size_t  j ) const
    {
        return { row_idx_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j] };
    }
    std::span< const double >       col_values ( std::size_t  j ) const
    {
        return { values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j] };
    }
    std::span< double >             col_values ( std::size_t  j )
    {
        return { values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j] };
    }

    std::span< const std::size_t >  col_ptr () const { return col_ptr_; }
    std::span< const std::size_t >  row_idx () const { return row_idx_; }
    std::span< const double >       values  () const { return values_; }
    std::span< double >             values  ()       { return values_; }

    // entry lookup by binary search, 0 if absent
    double  at ( std::size_t  i, std::size_t  j ) const;

    SparseMatrixCSC  transposed () const;
    DenseMatrix      to_dense   () const;

    // y = A x in fp64
    Vector           multiply   ( std::span< const double >  x ) const;
    // y = |A| |x|
    Vector           abs_multiply ( std::span< const double >  x ) const;

    bool  is_symmetric () const;

    friend bool  operator == ( const SparseMatrixCSC &, const SparseMatrixCSC & ) = default;

private:
    std::size_t                 rows_ = 0;
    std::size_t                 cols_ = 0;
    std::vector< std::size_t >  col_ptr_{ 0 };
    std::vector< std::size_t >  row_idx_;
    std::vector< double >       values_;
};

double  norm_inf ( const SparseMatrixCSC &  A );
double  norm_fro ( const SparseMatrixCSC &  A );

struct RoundedSparse
{
    SparseMatrixCSC  matrix;
    RoundingEvents   events;
};

// pattern preserved, entries rounded
RoundedSparse  round_matrix ( const SparseMatrixCSC &  A, const FloatFormat &  fmt );

}// namespace mpbal
