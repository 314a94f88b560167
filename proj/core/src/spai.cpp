#include <mpbal/spai.hpp>
#include <mpbal/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpbal {

void
SpaiConfig::validate () const
{
    if ( ! ( tau > 0.0 && tau < 1.0 ) )
        throw ConfigError( "spai: tau must lie in (0, 1)" );
    if ( max_pattern_growth_steps == 0 || candidates_per_step == 0 || max_nnz_per_column == 0 )
        throw ConfigError( "spai: growth steps, candidates per step and max nnz per column must be positive" );
}

const char *
to_string ( SpaiFailure  f )
{
    switch ( f )
    {
        case SpaiFailure::none:          return "none";
        case SpaiFailure::no_candidates: return "no_candidates";
        case SpaiFailure::qr_breakdown:  return "qr_breakdown";
        case SpaiFailure::caps_reached:  return "caps_reached";
        case SpaiFailure::nonfinite:     return "nonfinite";
    }
    return "unknown";
}

std::size_t
SpaiResult::failed_columns () const
{
    return std::size_t( std::count( success.begin(), success.end(), false ) );
}

std::vector< std::size_t >
spai_candidates ( const SparseMatrixCSC &  AT, std::span< const std::size_t >  J, std::span< const double >  r )
{
    std::vector< std::size_t >  c;

    for ( std::size_t  i = 0; i < r.size(); ++i )
    {
        if ( r[i] == 0.0 )
            continue;

        // column i of A^T lists the nonzero columns of row i of A
        for ( auto  j : AT.col_rows( i ) )
            c.push_back( j );
    }

    std::sort( c.begin(), c.end() );
    c.erase( std::unique( c.begin(), c.end() ), c.end() );

    std::vector< std::size_t >  out;

    std::set_difference( c.begin(), c.end(), J.begin(), J.end(), std::back_inserter( out ) );

    return out;
}

namespace
{

double
rho2 ( const SparseMatrixCSC &  A, std::size_t  j, std::span< const double >  r, double  rr, const Rounder &  rnd )
{
    const auto  rows = A.col_rows( j );
    const auto  vals = A.col_values( j );
    double      ra   = 0.0;
    double      aa   = 0.0;

    for ( std::size_t  p = 0; p < rows.size(); ++p )
    {
        ra = rnd( ra + rnd( r[ rows[p] ] * vals[p] ) );
        aa = rnd( aa + rnd( vals[p] * vals[p] ) );
    }

    if ( aa == 0.0 )
        return rr;

    return rnd( rr - rnd( rnd( ra * ra ) / aa ) );
}

double
sum_squares ( std::span< const double >  r, const Rounder &  rnd )
{
    double  s = 0.0;

    for ( double  v : r )
        if ( v != 0.0 )
            s = rnd( s + rnd( v * v ) );

    return s;
}

}// namespace anonymous

double
spai_rho2 ( const SparseMatrixCSC &  A, std::size_t  j, std::span< const double >  r, const PrecisionContext &  ctx )
{
    const Rounder  rnd( ctx.fmt );

    return rho2( A, j, r, sum_squares( r, rnd ), rnd );
}

std::vector< std::size_t >
pattern_grow ( const SparseMatrixCSC &  A, const SparseMatrixCSC &  AT, std::span< const std::size_t >  J,
               std::span< const double >  r, std::size_t  s, const PrecisionContext &  ctx )
{
    const auto  cand = spai_candidates( AT, J, r );

    if ( cand.empty() )
        throw NoCandidates( "pattern_grow: residual support yields no candidates" );

    const Rounder  rnd( ctx.fmt );
    const double   rr = sum_squares( r, rnd );

    std::vector< std::pair< double, std::size_t > >  ranked;

    ranked.reserve( cand.size() );

    for ( auto  j : cand )
        ranked.emplace_back( rho2( A, j, r, rr, rnd ), j );

    std::sort( ranked.begin(), ranked.end() );

    std::vector< std::size_t >  out( J.begin(), J.end() );

    for ( std::size_t  p = 0; p < std::min( s, ranked.size() ); ++p )
        out.push_back( ranked[p].second );

    std::sort( out.begin(), out.end() );

    return out;
}

SpaiColumn
spai_column ( const SparseMatrixCSC &  As, const SparseMatrixCSC &  AsT, std::size_t  k, const SpaiConfig &  cfg )
{
    const std::size_t       n = As.rows();
    const PrecisionContext  ctx{ cfg.u_s };
    const Rounder           rnd( cfg.u_s );
    SpaiColumn              col;
    Vector                  r( n, 0.0 );
    std::vector< long >     local( n, -1 );

    col.rows = { k };

    while ( true )
    {
        const auto &  J = col.rows;

        // rows touched by the pattern, plus k itself
        std::vector< std::size_t >  I{ k };

        for ( auto  j : J )
            for ( auto  i : As.col_rows( j ) )
                I.push_back( i );

        std::sort( I.begin(), I.end() );
        I.erase( std::unique( I.begin(), I.end() ), I.end() );

        for ( std::size_t  p = 0; p < I.size(); ++p )
            local[ I[p] ] = long( p );

        bool  solved = I.size() >= J.size();

        if ( solved )
        {
            DenseMatrix  S( I.size(), J.size() );
            Vector       e( I.size(), 0.0 );

            for ( std::size_t  q = 0; q < J.size(); ++q )
            {
                const auto  rows = As.col_rows( J[q] );
                const auto  vals = As.col_values( J[q] );

                for ( std::size_t  p = 0; p < rows.size(); ++p )
                    S( std::size_t( local[ rows[p] ] ), q ) = vals[p];
            }

            e[ std::size_t( local[k] ) ] = 1.0;

            try
            {
                col.values = qr_least_squares( qr_householder( S, ctx ), e, ctx );
            }
            catch ( const SingularPivot & )
            {
                solved = false;
            }
        }

        for ( auto  i : I )
            local[i] = -1;

        if ( ! solved )
        {
            col.failure = SpaiFailure::qr_breakdown;
            col.values.assign( J.size(), 0.0 );
            col.residual = 1.0;
            break;
        }

        if ( ! std::all_of( col.values.begin(), col.values.end(), [] ( double  v ) { return std::isfinite( v ); } ) )
        {
            col.failure  = SpaiFailure::nonfinite;
            col.residual = std::numeric_limits< double >::infinity();
            break;
        }

        // r = e_k - A(:,J) m in u_s, supported on I
        for ( auto  i : I )
            r[i] = 0.0;
        r[k] = 1.0;

        for ( std::size_t  q = 0; q < J.size(); ++q )
        {
            const auto  rows = As.col_rows( J[q] );
            const auto  vals = As.col_values( J[q] );

            for ( std::size_t  p = 0; p < rows.size(); ++p )
                r[ rows[p] ] = rnd( r[ rows[p] ] - rnd( vals[p] * col.values[q] ) );
        }

        col.residual = rnd( std::sqrt( sum_squares( r, rnd ) ) );
        col.residual_history.push_back( col.residual );

        if ( col.residual <= cfg.tau )
        {
            col.success = true;
            break;
        }

        if ( col.growth_steps >= cfg.max_pattern_growth_steps || J.size() >= cfg.max_nnz_per_column )
        {
            col.failure = SpaiFailure::caps_reached;
            break;
        }

        const auto  s = std::min( cfg.candidates_per_step, cfg.max_nnz_per_column - J.size() );

        try
        {
            col.rows = pattern_grow( As, AsT, J, r, s, ctx );
        }
        catch ( const NoCandidates & )
        {
            col.failure = SpaiFailure::no_candidates;
            break;
        }

        ++col.growth_steps;

        for ( auto  i : I )
            r[i] = 0.0;
    }

    return col;
}

SpaiResult
spai_build ( const SparseMatrixCSC &  A, const SpaiConfig &  cfg )
{
    cfg.validate();

    if ( A.rows() != A.cols() )
        throw ConfigError( "spai_build: matrix must be square" );

    const std::size_t  n  = A.rows();
    auto               ra = round_matrix( A, cfg.u_s );
    const auto &       As = ra.matrix;
    const auto         AT = As.transposed();

    SpaiResult              res;
    std::vector< Triplet >  t;

    res.events = ra.events;
    res.residuals.resize( n );
    res.success.resize( n );
    res.failures.resize( n );

    for ( std::size_t  k = 0; k < n; ++k )
    {
        const auto  c = spai_column( As, AT, k, cfg );

        for ( std::size_t  q = 0; q < c.rows.size(); ++q )
            t.push_back( { c.rows[q], k, c.values[q] } );

        res.residuals[k] = c.residual;
        res.success[k]   = c.success;
        res.failures[k]  = c.failure;
    }

    res.M = SparseMatrixCSC::from_triplets( n, n, std::move( t ) );

    return res;
}

SpaiFeasibility
spai_feasibility ( const SparseMatrixCSC &  A, const FloatFormat &  u_s, double  tau, const SparseMatrixCSC *  M )
{
    SpaiFeasibility  f{};

    f.cond2_abs_value = cond2_abs( A.to_dense() );
    f.heuristic_value = u_s.unit_roundoff() * f.cond2_abs_value;
    f.heuristic_ok    = f.heuristic_value <= tau;
    f.rigorous_lhs    = std::numeric_limits< double >::quiet_NaN();

    if ( M )
    {
        const double  n3 = std::pow( double( A.rows() ), 3 );

        f.rigorous_lhs = 0.0;

        for ( std::size_t  k = 0; k < M->cols(); ++k )
        {
            Vector  m( A.cols(), 0.0 );
            const auto  rows = M->col_rows( k );
            const auto  vals = M->col_values( k );

            for ( std::size_t  p = 0; p < rows.size(); ++p )
                m[ rows[p] ] = vals[p];

            auto  v = A.abs_multiply( m );

            v[k] += 1.0;
            f.rigorous_lhs = std::max( f.rigorous_lhs, n3 * u_s.unit_roundoff() * norm_two( v ) );
        }
    }

    return f;
}

PosterioriCheck
spai_posteriori_check ( const SparseMatrixCSC &  A, const SpaiResult &  res, double  tau, const FloatFormat &  u_s )
{
    const std::size_t  n  = A.rows();
    const double       n3 = std::pow( double( n ), 3 );
    PosterioriCheck    pc;
    Vector             m( n, 0.0 );

    for ( std::size_t  k = 0; k < n; ++k )
    {
        if ( ! res.success[k] )
            continue;

        const auto  rows = res.M.col_rows( k );
        const auto  vals = res.M.col_values( k );

        for ( std::size_t  p = 0; p < rows.size(); ++p )
            m[ rows[p] ] = vals[p];

        auto        r = A.multiply( m );
        auto        v = A.abs_multiply( m );

        for ( auto &  x : r )
            x = -x;
        r[k] += 1.0;
        v[k] += 1.0;

        const double  lhs = norm_two( r );
        const double  rhs = tau + n3 * u_s.unit_roundoff() * norm_two( v );

        ++pc.checked;
        if ( lhs > rhs )
            ++pc.violations;
        pc.max_ratio = std::max( pc.max_ratio, lhs / rhs );

        for ( auto  i : rows )
            m[i] = 0.0;
    }

    return pc;
}

}// namespace mpbal
