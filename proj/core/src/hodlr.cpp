#include <mpbal/hodlr.hpp>
#include <mpbal/errors.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace mpbal {

namespace
{

double
block_fro ( const DenseMatrix &  A, std::size_t  r0, std::size_t  c0, std::size_t  nr, std::size_t  nc )
{
    double  s = 0.0;

    for ( std::size_t  j = c0; j < c0 + nc; ++j )
        for ( std::size_t  i = r0; i < r0 + nr; ++i )
            s += A( i, j ) * A( i, j );

    return std::sqrt( s );
}

// visit the two off-diagonal blocks of every split at this level:
// f(row0, col0, rows, cols), upper block first
template < typename F >
void
for_each_sibling_block ( std::size_t  n, int  level, F &&  f )
{
    const auto  parts = hodlr_partition( n, level );

    for ( std::size_t  p = 0; p + 1 < parts.size(); p += 2 )
    {
        const auto [ a, ma ] = parts[p];
        const auto [ b, mb ] = parts[p + 1];

        f( a, b, ma, mb );
        f( b, a, mb, ma );
    }
}

bool
fits ( const DenseMatrix &  F, const DenseMatrix &  R, const RoundingEvents &  ev, const FloatFormat &  fmt )
{
    if ( ev.overflow > 0 )
        return false;

    // catches values pushed into the subnormal range or flushed to zero
    return norm_fro( F - R ) <= fmt.unit_roundoff() * norm_fro( F );
}

}// namespace anonymous

std::vector< std::pair< std::size_t, std::size_t > >
hodlr_partition ( std::size_t  n, int  level )
{
    std::vector< std::pair< std::size_t, std::size_t > >  parts{ { 0, n } };

    for ( int  l = 0; l < level; ++l )
    {
        std::vector< std::pair< std::size_t, std::size_t > >  next;

        next.reserve( 2 * parts.size() );

        for ( const auto & [ off, m ] : parts )
        {
            const std::size_t  m1 = m - m / 2;

            next.push_back( { off, m1 } );
            next.push_back( { off + m1, m / 2 } );
        }

        parts = std::move( next );
    }

    return parts;
}

//
// SVD cache
//

HodlrSvdCache::HodlrSvdCache ( const DenseMatrix &  A )
        : A_( A ), symmetric_( A.square() && A == A.transposed() )
{}

const HodlrSvdCache::Entry &
HodlrSvdCache::get ( std::size_t  row0, std::size_t  col0, std::size_t  rows, std::size_t  cols )
{
    const Key  key{ row0, col0, rows, cols };

    if ( auto  it = cache_.find( key ); it != cache_.end() )
        return it->second;

    if ( symmetric_ )
    {
        if ( auto  it = cache_.find( Key{ col0, row0, cols, rows } ); it != cache_.end() )
        {
            const auto &  t = it->second;

            return cache_.emplace( key, Entry{ t.cols, t.rows, t.V, t.sigma, t.U } ).first->second;
        }
    }

    Entry  e;

    for ( std::size_t  i = 0; i < rows; ++i )
        for ( std::size_t  j = 0; j < cols; ++j )
            if ( A_( row0 + i, col0 + j ) != 0.0 )
            {
                e.rows.push_back( i );
                break;
            }

    for ( std::size_t  j = 0; j < cols; ++j )
        for ( std::size_t  i = 0; i < rows; ++i )
            if ( A_( row0 + i, col0 + j ) != 0.0 )
            {
                e.cols.push_back( j );
                break;
            }

    if ( e.rows.empty() )
    {
        e.U = DenseMatrix( 0, 0 );
        e.V = DenseMatrix( 0, 0 );
    }
    else
    {
        DenseMatrix  C( e.rows.size(), e.cols.size() );

        for ( std::size_t  j = 0; j < e.cols.size(); ++j )
            for ( std::size_t  i = 0; i < e.rows.size(); ++i )
                C( i, j ) = A_( row0 + e.rows[i], col0 + e.cols[j] );

        auto  s = svd( C );

        e.U     = std::move( s.U );
        e.sigma = std::move( s.sigma );
        e.V     = std::move( s.V );
    }

    return cache_.emplace( key, std::move( e ) ).first->second;
}

//
// construction
//

std::size_t
truncation_rank ( std::span< const double >  sigma, double  eps )
{
    double  total = 0.0;

    for ( double  s : sigma )
        total += s * s;

    const double  allowed = eps * eps * total;
    double        tail    = 0.0;
    std::size_t   r       = sigma.size();

    // drop trailing values while their energy stays within the budget
    while ( r > 0 && tail + sigma[r - 1] * sigma[r - 1] <= allowed )
    {
        tail += sigma[r - 1] * sigma[r - 1];
        --r;
    }

    return r;
}

Vector
xi_levels ( const DenseMatrix &  A, int  levels )
{
    if ( ! A.square() )
        throw ConfigError( "xi_levels: matrix must be square" );
    if ( levels < 1 || A.rows() < ( std::size_t( 1 ) << levels ) )
        throw ConfigError( "xi_levels: need 1 <= levels and n >= 2^levels" );

    const double  nrm = norm_fro( A );
    Vector        xi( std::size_t( levels ), 0.0 );

    if ( nrm == 0.0 )
        return xi;

    for ( int  k = 1; k <= levels; ++k )
        for_each_sibling_block( A.rows(), k, [&] ( auto  r0, auto  c0, auto  nr, auto  nc ) {
            xi[k - 1] = std::max( xi[k - 1], block_fro( A, r0, c0, nr, nc ) / nrm );
        } );

    return xi;
}

HodlrMatrix
hodlr_build ( const DenseMatrix &  A, int  levels, double  eps,
              std::span< const FloatFormat >  menu, HodlrSvdCache *  cache )
{
    if ( ! A.square() )
        throw ConfigError( "hodlr_build: matrix must be square" );
    if ( levels < 1 || levels > 30 || A.rows() < ( std::size_t( 1 ) << levels ) )
        throw ConfigError( "hodlr_build: need 1 <= levels and n >= 2^levels (n=" + std::to_string( A.rows() ) +
                           ", levels=" + std::to_string( levels ) + ")" );
    if ( ! ( eps > 0.0 && eps < 1.0 ) )
        throw ConfigError( "hodlr_build: eps must lie in (0, 1)" );
    if ( std::none_of( menu.begin(), menu.end(), [] ( const auto &  f ) { return f.is_host_double(); } ) )
        throw ConfigError( "hodlr_build: format menu must contain fp64" );
    if ( cache && &cache->matrix() != &A )
        throw ConfigError( "hodlr_build: SVD cache belongs to a different matrix" );

    HodlrSvdCache  local( A );

    if ( ! cache )
        cache = &local;

    // finest first
    std::vector< FloatFormat >  fmts( menu.begin(), menu.end() );

    std::stable_sort( fmts.begin(), fmts.end(), [] ( const auto &  a, const auto &  b ) {
        return a.unit_roundoff() < b.unit_roundoff();
    } );

    HodlrMatrix  H;

    H.n      = A.rows();
    H.levels = levels;
    H.eps    = eps;
    H.xi     = xi_levels( A, levels );

    std::vector< std::size_t >  level_idx( static_cast< std::size_t >( levels ) );

    for ( int  k = 1; k <= levels; ++k )
    {
        const double  xi  = H.xi[k - 1];
        std::size_t   idx = fmts.size() - 1;

        if ( xi > 0.0 )
        {
            const double  thr = eps / ( std::sqrt( std::ldexp( 1.0, k ) ) * xi );

            while ( idx > 0 && fmts[idx].unit_roundoff() > thr )
                --idx;
        }

        level_idx[k - 1] = idx;
        H.level_formats.push_back( fmts[idx] );
    }

    for ( int  k = 1; k <= levels; ++k )
    {
        for_each_sibling_block( H.n, k, [&] ( auto  r0, auto  c0, auto  nr, auto  nc ) {
            const auto &       e = cache->get( r0, c0, nr, nc );
            const std::size_t  r = truncation_rank( e.sigma, eps );
            HodlrBlock         b;

            b.level = k;
            b.row0  = r0;
            b.col0  = c0;
            b.rows  = nr;
            b.cols  = nc;

            DenseMatrix  X( nr, r ), Y( nc, r );

            for ( std::size_t  j = 0; j < r; ++j )
            {
                const double  s = std::sqrt( e.sigma[j] );

                for ( std::size_t  i = 0; i < e.rows.size(); ++i )
                    X( e.rows[i], j ) = e.U( i, j ) * s;
                for ( std::size_t  i = 0; i < e.cols.size(); ++i )
                    Y( e.cols[i], j ) = e.V( i, j ) * s;
            }

            // round in the level format, moving to finer formats while range is violated
            for ( std::size_t  idx = level_idx[k - 1];; --idx )
            {
                auto  rx = round_matrix( X, fmts[idx] );
                auto  ry = round_matrix( Y, fmts[idx] );

                if ( idx == 0 || ( fits( X, rx.matrix, rx.events, fmts[idx] ) && fits( Y, ry.matrix, ry.events, fmts[idx] ) ) )
                {
                    b.X        = std::move( rx.matrix );
                    b.Y        = std::move( ry.matrix );
                    b.fmt      = fmts[idx];
                    b.promoted = idx != level_idx[k - 1];
                    H.events  += rx.events;
                    H.events  += ry.events;
                    break;
                }
            }

            H.blocks.push_back( std::move( b ) );
        } );
    }

    for ( const auto & [ off, m ] : hodlr_partition( H.n, levels ) )
        H.leaves.push_back( { off, A.block( off, off, m, m ) } );

    return H;
}

DenseMatrix
HodlrMatrix::assemble () const
{
    DenseMatrix  D( n, n );

    for ( const auto &  l : leaves )
        D.set_block( l.offset, l.offset, l.D );

    for ( const auto &  b : blocks )
        if ( b.rank() > 0 )
            D.set_block( b.row0, b.col0, multiply( b.X, b.Y.transposed() ) );

    return D;
}

//
// diagnostics
//

HodlrErrorReport
hodlr_reconstruct_error ( const DenseMatrix &  A, const HodlrMatrix &  H )
{
    if ( A.rows() != H.n || A.cols() != H.n )
        throw ConfigError( "hodlr_reconstruct_error: dimension mismatch" );

    HodlrErrorReport  r;
    const double      nrm  = norm_fro( A );
    const double      diff = norm_fro( A - H.assemble() );

    r.error = nrm > 0.0 ? diff / nrm : diff;
    r.bound = ( 2.0 * std::sqrt( 2.0 ) * H.levels + 1.0 ) * H.eps;

    return r;
}

StorageReport
storage_report ( const HodlrMatrix &  H )
{
    StorageReport  s;

    s.level_formats = H.level_formats;
    s.promoted_blocks.assign( std::size_t( H.levels ), 0 );

    for ( const auto &  b : H.blocks )
    {
        const std::uint64_t  entries = ( b.rows + b.cols ) * b.rank();

        s.bits_adaptive       += entries * std::uint64_t( b.fmt.storage_bits() );
        s.bits_uniform_double += entries * 64;

        if ( b.promoted )
            ++s.promoted_blocks[ std::size_t( b.level - 1 ) ];
    }

    for ( const auto &  l : H.leaves )
    {
        s.bits_adaptive       += l.D.size() * 64;
        s.bits_uniform_double += l.D.size() * 64;
    }

    s.savings_ratio = s.bits_uniform_double > 0
                      ? 1.0 - double( s.bits_adaptive ) / double( s.bits_uniform_double )
                      : 0.0;

    return s;
}

HodlrMatvecResult
hodlr_matvec ( const HodlrMatrix &  H, std::span< const double >  x, const FloatFormat &  work_fmt )
{
    if ( x.size() != H.n )
        throw ConfigError( "hodlr_matvec: dimension mismatch" );

    const Rounder      rnd( work_fmt );
    HodlrMatvecResult  res;
    auto &             ev = res.events;
    auto &             y  = res.y;

    y.assign( H.n, 0.0 );

    for ( const auto &  l : H.leaves )
    {
        const std::size_t  m = l.D.rows();

        for ( std::size_t  j = 0; j < m; ++j )
        {
            const double  xj = x[ l.offset + j ];

            for ( std::size_t  i = 0; i < m; ++i )
                y[ l.offset + i ] = rnd( y[ l.offset + i ] + rnd( l.D( i, j ) * xj, ev ), ev );
        }
    }

    Vector  t, w;

    for ( const auto &  b : H.blocks )
    {
        const std::size_t  r = b.rank();

        if ( r == 0 )
            continue;

        // t = Y^T x_cols
        t.assign( r, 0.0 );

        for ( std::size_t  j = 0; j < r; ++j )
            for ( std::size_t  p = 0; p < b.cols; ++p )
                t[j] = rnd( t[j] + rnd( b.Y( p, j ) * x[ b.col0 + p ], ev ), ev );

        // w = X t
        w.assign( b.rows, 0.0 );

        for ( std::size_t  j = 0; j < r; ++j )
            for ( std::size_t  i = 0; i < b.rows; ++i )
                w[i] = rnd( w[i] + rnd( b.X( i, j ) * t[j], ev ), ev );

        for ( std::size_t  i = 0; i < b.rows; ++i )
            y[ b.row0 + i ] = rnd( y[ b.row0 + i ] + w[i], ev );
    }

    const auto    D     = H.assemble();
    const auto    y64   = multiply( D, x );
    const double  denom = norm_inf( D ) * norm_inf( x );
    double        diff  = 0.0;

    for ( std::size_t  i = 0; i < y.size(); ++i )
        diff = std::max( diff, std::fabs( y64[i] - y[i] ) );

    res.backward_error_estimate = denom > 0.0 ? diff / denom : diff;

    return res;
}

}// namespace mpbal
