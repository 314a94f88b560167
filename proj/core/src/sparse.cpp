#include <mpbal/sparse.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpbal {

SparseMatrixCSC::SparseMatrixCSC ( std::size_t  rows, std::size_t  cols )
        : rows_( rows ), cols_( cols ), col_ptr_( cols + 1, 0 )
{}

SparseMatrixCSC
SparseMatrixCSC::from_triplets ( std::size_t  rows, std::size_t  cols, std::vector< Triplet >  entries, bool  drop_zeros )
{
    for ( const auto &  t : entries )
        if ( t.row >= rows || t.col >= cols )
            throw std::out_of_range( "from_triplets: index out of range" );

    std::stable_sort( entries.begin(), entries.end(), [] ( const Triplet &  a, const Triplet &  b ) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    } );

    SparseMatrixCSC  A( rows, cols );

    A.row_idx_.reserve( entries.size() );
    A.values_.reserve( entries.size() );

    std::size_t  k = 0;

    for ( std::size_t  j = 0; j < cols; ++j )
    {
        while ( k < entries.size() && entries[k].col == j )
        {
            const auto  i = entries[k].row;
            double      v = 0.0;

            // sum duplicates in input order
            while ( k < entries.size() && entries[k].col == j && entries[k].row == i )
                v += entries[k++].value;

            if ( drop_zeros && v == 0.0 )
                continue;

            A.row_idx_.push_back( i );
            A.values_.push_back( v );
        }

        A.col_ptr_[j + 1] = A.row_idx_.size();
    }

    return A;
}

SparseMatrixCSC
SparseMatrixCSC::from_dense ( const DenseMatrix &  D )
{
    std::vector< Triplet >  t;

    for ( std::size_t  j = 0; j < D.cols(); ++j )
        for ( std::size_t  i = 0; i < D.rows(); ++i )
            if ( D( i, j ) != 0.0 )
                t.push_back( { i, j, D( i, j ) } );

    return from_triplets( D.rows(), D.cols(), std::move( t ) );
}

SparseMatrixCSC
SparseMatrixCSC::identity ( std::size_t  n )
{
    std::vector< Triplet >  t;

    for ( std::size_t  i = 0; i < n; ++i )
        t.push_back( { i, i, 1.0 } );

    return from_triplets( n, n, std::move( t ) );
}

double
SparseMatrixCSC::at ( std::size_t  i, std::size_t  j ) const
{
    const auto  r  = col_rows( j );
    const auto  it = std::lower_bound( r.begin(), r.end(), i );

    if ( it == r.end() || *it != i )
        return 0.0;

    return col_values( j )[ std::size_t( it - r.begin() ) ];
}

SparseMatrixCSC
SparseMatrixCSC::transposed () const
{
    SparseMatrixCSC             T( cols_, rows_ );
    std::vector< std::size_t >  count( rows_ + 1, 0 );

    for ( auto  i : row_idx_ )
        ++count[i + 1];

    for ( std::size_t  i = 0; i < rows_; ++i )
        count[i + 1] += count[i];

    T.col_ptr_ = count;
    T.row_idx_.resize( nnz() );
    T.values_.resize( nnz() );

    auto  next = count;

    // visiting columns in order keeps the transposed row indices sorted
    for ( std::size_t  j = 0; j < cols_; ++j )
        for ( std::size_t  p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p )
        {
            const auto  dst = next[ row_idx_[p] ]++;

            T.row_idx_[dst] = j;
            T.values_[dst]  = values_[p];
        }

    return T;
}

DenseMatrix
SparseMatrixCSC::to_dense () const
{
    DenseMatrix  D( rows_, cols_ );

    for ( std::size_t  j = 0; j < cols_; ++j )
        for ( std::size_t  p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p )
            D( row_idx_[p], j ) = values_[p];

    return D;
}

Vector
SparseMatrixCSC::multiply ( std::span< const double >  x ) const
{
    if ( x.size() != cols_ )
        throw std::invalid_argument( "SparseMatrixCSC::multiply: dimension mismatch" );

    Vector  y( rows_, 0.0 );

    for ( std::size_t  j = 0; j < cols_; ++j )
    {
        const double  xj = x[j];

        if ( xj == 0.0 )
            continue;

        for ( std::size_t  p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p )
            y[ row_idx_[p] ] += values_[p] * xj;
    }

    return y;
}

Vector
SparseMatrixCSC::abs_multiply ( std::span< const double >  x ) const
{
    Vector  y( rows_, 0.0 );

    for ( std::size_t  j = 0; j < cols_; ++j )
        for ( std::size_t  p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p )
            y[ row_idx_[p] ] += std::fabs( values_[p] ) * std::fabs( x[j] );

    return y;
}

bool
SparseMatrixCSC::is_symmetric () const
{
    return rows_ == cols_ && transposed() == *this;
}

double
norm_inf ( const SparseMatrixCSC &  A )
{
    Vector  rs( A.rows(), 0.0 );

    for ( std::size_t  j = 0; j < A.cols(); ++j )
    {
        const auto  r = A.col_rows( j );
        const auto  v = A.col_values( j );

        for ( std::size_t  p = 0; p < r.size(); ++p )
            rs[ r[p] ] += std::fabs( v[p] );
    }

    return rs.empty() ? 0.0 : *std::max_element( rs.begin(), rs.end() );
}

double
norm_fro ( const SparseMatrixCSC &  A )
{
    return norm_two( A.values() );
}

RoundedSparse
round_matrix ( const SparseMatrixCSC &  A, const FloatFormat &  fmt )
{
    RoundedSparse  r{ A, {} };

    r.events = round_span( r.matrix.values(), fmt );

    return r;
}

}// namespace mpbal
