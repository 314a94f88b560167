#pragma once
//
// Column-major dense matrix and vector helpers.
//

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <mpbal/fpemu.hpp>

namespace mpbal {

using Vector = std::vector< double >;

class DenseMatrix
{
public:
    DenseMatrix () = default;

    DenseMatrix ( std::size_t  rows, std::size_t  cols, double  fill = 0.0 )
            : rows_( rows ), cols_( cols ), data_( rows * cols, fill )
    {}

    // entries given row by row
    static DenseMatrix  from_rows ( std::initializer_list< std::initializer_list< double > >  rows );
    static DenseMatrix  identity  ( std::size_t  n );
    static DenseMatrix  diagonal  ( std::span< const double >  d );

    std::size_t  rows  () const { return rows_; }
    std::size_t  cols  () const { return cols_; }
    std::size_t  size  () const { return data_.size(); }
    bool         empty () const { return data_.empty(); }
    bool         square() const { return rows_ == cols_; }

    double &        operator () ( std::size_t  i, std::size_t  j )       { assert( i < rows_ && j < cols_ ); return data_[ j * rows_ + i ]; }
    const double &  operator () ( std::size_t  i, std::size_t  j ) const { assert( i < rows_ && j < cols_ ); return data_[ j * rows_ + i ]; }

    std::span< double >        col ( std::size_t  j )       { return { data_.data() + j * rows_, rows_ }; }
    std::span< const double >  col ( std::size_t  j ) const { return { data_.data() + j * rows_, rows_ }; }

    std::span< double >        values ()       { return data_; }
    std::span< const double >  values () const { return data_; }

    DenseMatrix  transposed () const;

    // rows [r0, r0+nr) x cols [c0, c0+nc)
    DenseMatrix  block ( std::size_t  r0, std::size_t  c0, std::size_t  nr, std::size_t  nc ) const;
    void         set_block ( std::size_t  r0, std::size_t  c0, const DenseMatrix &  B );

    // first k columns
    DenseMatrix  leading_cols ( std::size_t  k ) const;

    friend bool  operator == ( const DenseMatrix &, const DenseMatrix & ) = default;

private:
    std::size_t           rows_ = 0;
    std::size_t           cols_ = 0;
    std::vector< double > data_;
};

double  norm_fro  ( const DenseMatrix &  A );
double  norm_inf  ( const DenseMatrix &  A );   // max row sum
double  norm_one  ( const DenseMatrix &  A );   // max column sum
double  max_abs   ( const DenseMatrix &  A );

double  norm_inf  ( std::span< const double >  x );
double  norm_two  ( std::span< const double >  x );

DenseMatrix  abs  ( const DenseMatrix &  A );
DenseMatrix  operator - ( const DenseMatrix &  A, const DenseMatrix &  B );
DenseMatrix  operator + ( const DenseMatrix &  A, const DenseMatrix &  B );
DenseMatrix  operator * ( double  s, const DenseMatrix &  A );

// plain fp64 products (no emulation), used by diagnostics and oracles
DenseMatrix  multiply   ( const DenseMatrix &  A, const DenseMatrix &  B );
DenseMatrix  multiply_tn( const DenseMatrix &  A, const DenseMatrix &  B );   // A^T B
Vector       multiply   ( const DenseMatrix &  A, std::span< const double >  x );

struct RoundedDense
{
    DenseMatrix     matrix;
    RoundingEvents  events;
};

RoundedDense  round_matrix ( const DenseMatrix &  A, const FloatFormat &  fmt );

}// namespace mpbal
