#include <mpbal/dense.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpbal {

DenseMatrix
DenseMatrix::from_rows ( std::initializer_list< std::initializer_list< double > >  rows )
{
    const std::size_t  m = rows.size();
    const std::size_t  n = m == 0 ? 0 : rows.begin()->size();
    DenseMatrix        A( m, n );
    std::size_t        i = 0;

    for ( const auto &  row : rows )
    {
        if ( row.size() != n )
            throw std::invalid_argument( "from_rows: ragged rows" );

        std::size_t  j = 0;

        for ( double  v : row )
            A( i, j++ ) = v;
        ++i;
    }

    return A;
}

DenseMatrix
DenseMatrix::identity ( std::size_t  n )
{
    DenseMatrix  I( n, n );

    for ( std::size_t  i = 0; i < n; ++i )
        I( i, i ) = 1.0;

    return I;
}

DenseMatrix
DenseMatrix::diagonal ( std::span< const double >  d )
{
    DenseMatrix  D( d.size(), d.size() );

    for ( std::size_t  i = 0; i < d.size(); ++i )
        D( i, i ) = d[i];

    return D;
}

DenseMatrix
DenseMatrix::transposed () const
{
    DenseMatrix  T( cols_, rows_ );

    for ( std::size_t  j = 0; j < cols_; ++j )
        for ( std::size_t  i = 0; i < rows_; ++i )
            T( j, i ) = (*this)( i, j );

    return T;
}

DenseMatrix
DenseMatrix::block ( std::size_t  r0, std::size_t  c0, std::size_t  nr, std::size_t  nc ) const
{
    assert( r0 + nr <= rows_ && c0 + nc <= cols_ );

    DenseMatrix  B( nr, nc );

    for ( std::size_t  j = 0; j < nc; ++j )
        std::copy_n( data_.data() + ( c0 + j ) * rows_ + r0, nr, B.data_.data() + j * nr );

    return B;
}

void
DenseMatrix::set_block ( std::size_t  r0, std::size_t  c0, const DenseMatrix &  B )
{
    assert( r0 + B.rows() <= rows_ && c0 + B.cols() <= cols_ );

    for ( std::size_t  j = 0; j < B.cols(); ++j )
        std::copy_n( B.data_.data() + j * B.rows(), B.rows(), data_.data() + ( c0 + j ) * rows_ + r0 );
}

DenseMatrix
DenseMatrix::leading_cols ( std::size_t  k ) const
{
    return block( 0, 0, rows_, std::min( k, cols_ ) );
}

double
norm_fro ( const DenseMatrix &  A )
{
    // scaled sum of squares, no overflow for large entries
    double  scale = 0.0, ssq = 1.0;

    for ( double  v : A.values() )
    {
        if ( v == 0.0 )
            continue;

        const double  a = std::fabs( v );

        if ( scale < a )
        {
            ssq   = 1.0 + ssq * ( scale / a ) * ( scale / a );
            scale = a;
        }
        else
            ssq += ( a / scale ) * ( a / scale );
    }

    return scale * std::sqrt( ssq );
}

double
norm_inf ( const DenseMatrix &  A )
{
    Vector  rs( A.rows(), 0.0 );

    for ( std::size_t  j = 0; j < A.cols(); ++j )
        for ( std::size_t  i = 0; i < A.rows(); ++i )
            rs[i] += std::fabs( A( i, j ) );

    return rs.empty() ? 0.0 : *std::max_element( rs.begin(), rs.end() );
}

double
norm_one ( const DenseMatrix &  A )
{
    double  r = 0.0;

    for ( std::size_t  j = 0; j < A.cols(); ++j )
    {
        double  s = 0.0;

        for ( double  v : A.col( j ) )
            s += std::fabs( v );
        r = std::max( r, s );
    }

    return r;
}

double
max_abs ( const DenseMatrix &  A )
{
    double  r = 0.0;

    for ( double  v : A.values() )
        r = std::max( r, std::fabs( v ) );

    return r;
}

double
norm_inf ( std::span< const double >  x )
{
    double  r = 0.0;

    for ( double  v : x )
        r = std::max( r, std::fabs( v ) );

    return r;
}

double
norm_two ( std::span< const double >  x )
{
    double  scale = 0.0, ssq = 1.0;

    for ( double  v : x )
    {
        if ( v == 0.0 )
            continue;

        const double  a = std::fabs( v );

        if ( scale < a )
        {
            ssq   = 1.0 + ssq * ( scale / a ) * ( scale / a );
            scale = a;
        }
        else
            ssq += ( a / scale ) * ( a / scale );
    }

    return scale * std::sqrt( ssq );
}

DenseMatrix
abs ( const DenseMatrix &  A )
{
    DenseMatrix  B = A;

    for ( auto &  v : B.values() )
        v = std::fabs( v );

    return B;
}

DenseMatrix
operator - ( const DenseMatrix &  A, const DenseMatrix &  B )
{
    assert( A.rows() == B.rows() && A.cols() == B.cols() );

    DenseMatrix  C = A;
    auto         b = B.values();
    auto         c = C.values();

    for ( std::size_t  i = 0; i < c.size(); ++i )
        c[i] -= b[i];

    return C;
}

DenseMatrix
operator + ( const DenseMatrix &  A, const DenseMatrix &  B )
{
    assert( A.rows() == B.rows() && A.cols() == B.cols() );

    DenseMatrix  C = A;
    auto         b = B.values();
    auto         c = C.values();

    for ( std::size_t  i = 0; i < c.size(); ++i )
        c[i] += b[i];

    return C;
}

DenseMatrix
operator * ( double  s, const DenseMatrix &  A )
{
    DenseMatrix  C = A;

    for ( auto &  v : C.values() )
        v *= s;

    return C;
}

DenseMatrix
multiply ( const DenseMatrix &  A, const DenseMatrix &  B )
{
    if ( A.cols() != B.rows() )
        throw std::invalid_argument( "multiply: inner dimensions differ" );

    DenseMatrix  C( A.rows(), B.cols() );

    for ( std::size_t  j = 0; j < B.cols(); ++j )
    {
        auto  c = C.col( j );

        for ( std::size_t  p = 0; p < A.cols(); ++p )
        {
            const double  b = B( p, j );

            if ( b == 0.0 )
                continue;

            auto  a = A.col( p );

            for ( std::size_t  i = 0; i < c.size(); ++i )
                c[i] += a[i] * b;
        }
    }

    return C;
}

DenseMatrix
multiply_tn ( const DenseMatrix &  A, const DenseMatrix &  B )
{
    if ( A.rows() != B.rows() )
        throw std::invalid_argument( "multiply_tn: inner dimensions differ" );

    DenseMatrix  C( A.cols(), B.cols() );

    for ( std::size_t  j = 0; j < B.cols(); ++j )
    {
        auto  b = B.col( j );

        for ( std::size_t  i = 0; i < A.cols(); ++i )
        {
            auto    a = A.col( i );
            double  s = 0.0;

            for ( std::size_t  p = 0; p < a.size(); ++p )
                s += a[p] * b[p];

            C( i, j ) = s;
        }
    }

    return C;
}

Vector
multiply ( const DenseMatrix &  A, std::span< const double >  x )
{
    if ( A.cols() != x.size() )
        throw std::invalid_argument( "multiply: dimension mismatch" );

    Vector  y( A.rows(), 0.0 );

    for ( std::size_t  j = 0; j < A.cols(); ++j )
    {
        if ( x[j] == 0.0 )
            continue;

        auto  a = A.col( j );

        for ( std::size_t  i = 0; i < y.size(); ++i )
            y[i] += a[i] * x[j];
    }

    return y;
}

RoundedDense
round_matrix ( const DenseMatrix &  A, const FloatFormat &  fmt )
{
    RoundedDense  r{ A, {} };

    r.events = round_span( r.matrix.values(), fmt );

    return r;
}

}// namespace mpbal
