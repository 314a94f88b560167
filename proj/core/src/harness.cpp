#include <mpbal/harness.hpp>

#include <mpbal/densela.hpp>
#include <mpbal/errors.hpp>
#include <mpbal/hodlr.hpp>
#include <mpbal/ir.hpp>
#include <mpbal/matrix_market.hpp>
#include <mpbal/nystrom.hpp>
#include <mpbal/rng.hpp>
#include <mpbal/spai.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace mpbal {

namespace
{

std::string
str ( std::size_t  v )
{
    return std::to_string( v );
}

std::string
join ( const std::vector< std::string > &  xs, char  sep )
{
    std::string  s;

    for ( std::size_t  i = 0; i < xs.size(); ++i )
    {
        if ( i > 0 )
            s += sep;
        s += xs[i];
    }

    return s;
}

std::string
format_names ( const std::vector< FloatFormat > &  fs, char  sep = ',' )
{
    std::vector< std::string >  names;

    for ( const auto &  f : fs )
        names.push_back( f.name );

    return join( names, sep );
}

// short form for summaries
std::string
sci ( double  v )
{
    char  buf[32];

    std::snprintf( buf, sizeof( buf ), "%.3e", v );

    return buf;
}

MatrixHandle
load ( const std::string &  path )
{
    if ( path.empty() )
        throw ConfigError( "--matrix is required" );

    return load_matrix_market( path );
}

const DenseMatrix &
require_dense ( const MatrixHandle &  h )
{
    if ( ! h.dense )
        throw ConfigError( h.name + ": n=" + str( h.rows ) + " exceeds the dense cap " + str( dense_cap() ) +
                           "; raise MPBAL_DENSE_CAP" );

    return *h.dense;
}

}// namespace anonymous

//
// CSV
//

std::string
csv_real ( double  v )
{
    if ( std::isnan( v ) )
        return "nan";
    if ( std::isinf( v ) )
        return v > 0 ? "inf" : "-inf";

    char  buf[40];

    std::snprintf( buf, sizeof( buf ), "%.16e", v );

    return buf;
}

std::string
csv_field ( const std::string &  s )
{
    if ( s.find_first_of( ",\"\r\n" ) == std::string::npos )
        return s;

    std::string  q = "\"";

    for ( char  c : s )
    {
        if ( c == '"' )
            q += '"';
        q += c;
    }

    return q + '"';
}

std::string
render_csv ( const CsvTable &  t )
{
    std::ostringstream  out;

    out << "# schema=v1\n";

    for ( const auto & [ k, v ] : t.config )
        out << "# " << k << '=' << v << '\n';

    for ( std::size_t  i = 0; i < t.columns.size(); ++i )
        out << ( i ? "," : "" ) << csv_field( t.columns[i] );
    out << '\n';

    for ( const auto &  row : t.rows )
    {
        if ( row.size() != t.columns.size() )
            throw std::logic_error( "render_csv: row width differs from header" );

        for ( std::size_t  i = 0; i < row.size(); ++i )
            out << ( i ? "," : "" ) << csv_field( row[i] );
        out << '\n';
    }

    return out.str();
}

void
write_file_atomic ( const std::filesystem::path &  path, const std::string &  contents )
{
    auto  tmp = path;

    tmp += ".tmp";

    {
        std::ofstream  f( tmp, std::ios::binary | std::ios::trunc );

        if ( ! f )
            throw ConfigError( "cannot write " + tmp.string() );

        f << contents;
        f.flush();

        if ( ! f )
            throw ConfigError( "write failed for " + tmp.string() );
    }

    std::filesystem::rename( tmp, path );
}

std::vector< std::filesystem::path >
write_outputs ( const ExperimentReport &  r, const std::filesystem::path &  dir )
{
    std::filesystem::create_directories( dir );

    std::vector< std::filesystem::path >  paths;

    for ( const auto &  o : r.outputs )
    {
        paths.push_back( dir / o.file );
        write_file_atomic( paths.back(), render_csv( o.table ) );
    }

    return paths;
}

std::vector< std::string >
split_list ( const std::string &  s )
{
    std::vector< std::string >  out;
    std::string                 cur;
    std::istringstream          in( s );

    while ( std::getline( in, cur, ',' ) )
    {
        const auto  b = cur.find_first_not_of( " \t" );
        const auto  e = cur.find_last_not_of( " \t" );

        if ( b != std::string::npos )
            out.push_back( cur.substr( b, e - b + 1 ) );
    }

    return out;
}

std::vector< FloatFormat >
parse_format_list ( const std::string &  s )
{
    std::vector< FloatFormat >  out;

    for ( const auto &  name : split_list( s ) )
        out.push_back( find_format( name ) );

    if ( out.empty() )
        throw ConfigError( "empty format list" );

    return out;
}

std::vector< double >
parse_real_list ( const std::string &  s )
{
    std::vector< double >  out;

    for ( const auto &  item : split_list( s ) )
    {
        std::size_t  used = 0;
        double       v    = 0.0;

        try
        {
            v = std::stod( item, &used );
        }
        catch ( const std::exception & )
        {
            used = 0;
        }

        if ( used != item.size() )
            throw ConfigError( "not a number: '" + item + "'" );

        out.push_back( v );
    }

    if ( out.empty() )
        throw ConfigError( "empty number list" );

    return out;
}

//
// formats
//

ExperimentReport
run_formats ()
{
    ExperimentReport  r;
    CsvTable          t;

    r.experiment = "formats";
    t.add_config( "experiment", "formats" );
    t.columns = { "format", "exponent_bits", "significand_bits", "storage_bits", "unit_roundoff",
                  "unit_roundoff_log2", "min_normal", "max_finite", "table_tflops" };

    r.summary.push_back( "format      bits  u          range" );

    for ( const auto &  f : builtin_formats() )
    {
        const auto  rg = format_range( f );

        t.rows.push_back( { f.name, std::to_string( f.exponent_bits ), std::to_string( f.significand_bits ),
                            std::to_string( f.storage_bits() ), csv_real( f.unit_roundoff() ),
                            std::to_string( -( f.significand_bits + 1 ) ), csv_real( rg.min_normal ),
                            csv_real( rg.max_finite ), csv_real( f.table_tflops ) } );

        char  line[128];

        std::snprintf( line, sizeof( line ), "%-10s  %4d  %.2e   %.0e .. %.0e", f.name.c_str(), f.storage_bits(),
                       f.unit_roundoff(), rg.min_normal, rg.max_finite );
        r.summary.push_back( line );
    }

    r.outputs.push_back( { "formats.csv", std::move( t ) } );

    return r;
}

//
// iterative refinement
//

ExperimentReport
run_ir ( const IrExperiment &  cfg )
{
    const auto         h = load( cfg.matrix );
    const std::size_t  n = h.rows;

    if ( h.rows != h.cols )
        throw ConfigError( "exp-ir: matrix must be square" );

    PrecisionTriple  triple{ cfg.u_f, cfg.u, cfg.u_r };

    triple.validate();

    std::vector< CorrectionSolver >  solvers;

    for ( const auto &  s : cfg.solvers )
        solvers.push_back( parse_solver( s ) );

    Vector  b( n, 1.0 );

    if ( cfg.rhs == "random" )
    {
        GaussianSource  g( cfg.seed );

        for ( auto &  v : b )
            v = g();
    }
    else if ( cfg.rhs != "ones" )
        throw ConfigError( "exp-ir: --rhs must be 'ones' or 'random'" );

    SolverParams  params;

    params.gmres_tol = cfg.gmres_tol;
    params.spai.tau  = cfg.tau;

    if ( ! cfg.u_s.empty() )
        params.u_s = find_format( cfg.u_s );

    const auto    x_ref = reference_solution( h.csc, b );
    const double  kappa = h.dense ? cond_inf( *h.dense ) : std::nan( "" );

    CsvTable  steps, summary;

    for ( auto *  t : { &steps, &summary } )
    {
        t->add_config( "experiment", "exp-ir" );
        t->add_config( "matrix", cfg.matrix );
        t->add_config( "u_f", cfg.u_f.name );
        t->add_config( "u", cfg.u.name );
        t->add_config( "u_r", cfg.u_r.name );
        t->add_config( "solvers", join( cfg.solvers, ',' ) );
        t->add_config( "tau", csv_real( cfg.tau ) );
        t->add_config( "u_s", params.u_s ? params.u_s->name : cfg.u_f.name );
        t->add_config( "gmres_tol", csv_real( cfg.gmres_tol ) );
        t->add_config( "maxit", str( cfg.maxit ) );
        t->add_config( "rhs", cfg.rhs );
        t->add_config( "seed", std::to_string( cfg.seed ) );
    }

    steps.columns   = { "solver", "step", "ferr", "nbe", "cbe", "gmres_iters" };
    summary.columns = { "solver", "status", "steps", "total_gmres_iters", "precond_nnz", "spai_failed_columns",
                        "final_ferr", "final_nbe", "final_cbe", "kappa_inf" };

    ExperimentReport  r;

    r.experiment = "exp-ir";
    r.matrix     = h.name;
    r.summary.push_back( h.name + ": n=" + str( n ) + " nnz=" + str( h.nnz() ) + " kappa_inf=" + sci( kappa ) );

    for ( auto  s : solvers )
    {
        const auto  res = refine( h.csc, b, triple, s, params, cfg.maxit, &x_ref );
        const auto &  tr = res.trace;

        for ( const auto &  st : tr.steps )
            steps.rows.push_back( { to_string( s ), str( st.step ), csv_real( st.ferr ), csv_real( st.nbe ),
                                    csv_real( st.cbe ), str( st.inner_iterations ) } );

        const auto &  last = tr.steps.back();

        summary.rows.push_back( { to_string( s ), to_string( tr.status ), str( tr.steps.size() - 1 ),
                                  str( tr.total_inner_iterations() ), str( tr.precond_nnz ),
                                  str( tr.spai_failed_columns ), csv_real( last.ferr ), csv_real( last.nbe ),
                                  csv_real( last.cbe ), csv_real( kappa ) } );

        r.summary.push_back( std::string( to_string( s ) ) + ": " + to_string( tr.status ) + " after " +
                             str( tr.steps.size() - 1 ) + " steps, gmres its " + str( tr.total_inner_iterations() ) +
                             ", precond nnz " + str( tr.precond_nnz ) + ", nbe " + sci( last.nbe ) +
                             ", cbe " + sci( last.cbe ) + ", ferr " + sci( last.ferr ) );
    }

    r.outputs.push_back( { "ir_steps.csv", std::move( steps ) } );
    r.outputs.push_back( { "ir_summary.csv", std::move( summary ) } );

    return r;
}

//
// SPAI
//

ExperimentReport
run_spai ( const SpaiExperiment &  cfg )
{
    const auto  h = load( cfg.matrix );

    SpaiConfig  sc;

    sc.tau                      = cfg.tau;
    sc.u_s                      = cfg.u_s;
    sc.max_pattern_growth_steps = cfg.max_growth_steps;
    sc.candidates_per_step      = cfg.candidates_per_step;
    sc.max_nnz_per_column       = cfg.max_nnz_per_column;
    sc.validate();

    const auto  res  = spai_build( h.csc, sc );
    const auto  post = spai_posteriori_check( h.csc, res, cfg.tau, cfg.u_s );
    const auto  feas = spai_feasibility( h.csc, cfg.u_s, cfg.tau, &res.M );

    std::size_t  lu_fill = 0;

    if ( h.dense )
        lu_fill = lu_nnz( lu_factor( *h.dense, PrecisionContext::of( cfg.u_s ) ) );

    CsvTable  cols, summary;

    for ( auto *  t : { &cols, &summary } )
    {
        t->add_config( "experiment", "exp-spai" );
        t->add_config( "matrix", cfg.matrix );
        t->add_config( "tau", csv_real( cfg.tau ) );
        t->add_config( "u_s", cfg.u_s.name );
        t->add_config( "max_growth_steps", str( cfg.max_growth_steps ) );
        t->add_config( "candidates_per_step", str( cfg.candidates_per_step ) );
        t->add_config( "max_nnz_per_column", str( cfg.max_nnz_per_column ) );
    }

    cols.columns = { "column", "nnz", "residual", "success", "failure" };

    for ( std::size_t  k = 0; k < h.cols; ++k )
        cols.rows.push_back( { str( k ), str( res.M.col_rows( k ).size() ), csv_real( res.residuals[k] ),
                               res.success[k] ? "1" : "0", to_string( res.failures[k] ) } );

    summary.columns = { "n", "nnz_A", "nnz_M", "nnz_LU", "failed_columns", "posteriori_checked",
                        "posteriori_violations", "posteriori_max_ratio", "cond2_abs", "heuristic_value",
                        "heuristic_ok", "rigorous_lhs" };
    summary.rows.push_back( { str( h.rows ), str( h.nnz() ), str( res.M.nnz() ), str( lu_fill ),
                              str( res.failed_columns() ), str( post.checked ), str( post.violations ),
                              csv_real( post.max_ratio ), csv_real( feas.cond2_abs_value ),
                              csv_real( feas.heuristic_value ), feas.heuristic_ok ? "1" : "0",
                              csv_real( feas.rigorous_lhs ) } );

    ExperimentReport  r;

    r.experiment = "exp-spai";
    r.matrix     = h.name;
    r.summary.push_back( h.name + ": nnz(M)=" + str( res.M.nnz() ) + " nnz(L+U)=" + str( lu_fill ) +
                         " failed columns " + str( res.failed_columns() ) );
    r.summary.push_back( "a posteriori: " + str( post.violations ) + " violations in " + str( post.checked ) +
                         " columns, max ratio " + sci( post.max_ratio ) );
    r.summary.push_back( "heuristic u_s*cond2(A) = " + sci( feas.heuristic_value ) +
                         ( feas.heuristic_ok ? " <= " : " > " ) + "tau" );

    r.outputs.push_back( { "spai_columns.csv", std::move( cols ) } );
    r.outputs.push_back( { "spai_summary.csv", std::move( summary ) } );

    return r;
}

//
// Nystrom
//

ExperimentReport
run_nystrom ( const NystromExperiment &  cfg )
{
    const auto      h = load( cfg.matrix );
    const auto &    A = require_dense( h );
    const std::size_t  n = h.rows;

    if ( cfg.kstep == 0 || cfg.kmin == 0 || cfg.kmin > cfg.kmax )
        throw ConfigError( "exp-nystrom: need 1 <= kmin <= kmax and kstep >= 1" );
    if ( cfg.runs == 0 )
        throw ConfigError( "exp-nystrom: runs must be positive" );

    std::vector< std::size_t >  ks;

    for ( std::size_t  k = cfg.kmin; k <= std::min( cfg.kmax, n ); k += cfg.kstep )
        ks.push_back( k );

    if ( ks.empty() )
        throw ConfigError( "exp-nystrom: no rank in [kmin, kmax] is <= n" );

    for ( const auto &  p : cfg.precisions )
    {
        NystromConfig  c;

        c.k   = ks.back();
        c.u_p = p;
        c.u   = cfg.u;
        c.validate( n );
    }

    CsvTable  errs, heur;

    for ( auto *  t : { &errs, &heur } )
    {
        t->add_config( "experiment", "exp-nystrom" );
        t->add_config( "matrix", cfg.matrix );
        t->add_config( "kmin", str( cfg.kmin ) );
        t->add_config( "kmax", str( cfg.kmax ) );
        t->add_config( "kstep", str( cfg.kstep ) );
        t->add_config( "precisions", format_names( cfg.precisions ) );
        t->add_config( "u", cfg.u.name );
        t->add_config( "runs", str( cfg.runs ) );
        t->add_config( "seed", std::to_string( cfg.seed ) );
        t->add_config( "max_shift_retries", str( cfg.max_shift_retries ) );
    }

    errs.columns = { "k", "precision", "mean_error", "shift_retries", "failed_runs" };
    heur.columns = { "precision", "unit_roundoff", "threshold_k" };

    ExperimentReport  r;

    r.experiment = "exp-nystrom";
    r.matrix     = h.name;

    const auto  eig = sym_eig( A );

    for ( const auto &  p : cfg.precisions )
    {
        const auto  thr = precision_heuristic( eig.values, n, p );

        heur.rows.push_back( { p.name, csv_real( p.unit_roundoff() ), str( thr ) } );
        r.summary.push_back( "heuristic threshold " + p.name + ": k <= " + str( thr ) );
    }

    for ( const auto &  p : cfg.precisions )
    {
        Vector                      sum( ks.size(), 0.0 );
        std::vector< std::size_t >  retries( ks.size(), 0 ), failed( ks.size(), 0 );

        for ( std::size_t  run = 0; run < cfg.runs; ++run )
        {
            const auto  sketch = nystrom_sketch( A, ks.back(), p, derive_seed( cfg.seed, run ) );

            for ( std::size_t  i = 0; i < ks.size(); ++i )
            {
                try
                {
                    const auto  res = nystrom_finalize( sketch, ks[i], cfg.u, cfg.max_shift_retries );

                    sum[i]     += nystrom_error( A, res );
                    retries[i] += res.shift_retries;
                }
                catch ( const NotPositiveDefinite & )
                {
                    ++failed[i];
                }
            }
        }

        for ( std::size_t  i = 0; i < ks.size(); ++i )
        {
            const std::size_t  ok   = cfg.runs - failed[i];
            const double       mean = ok > 0 ? sum[i] / double( ok ) : std::nan( "" );

            errs.rows.push_back( { str( ks[i] ), p.name, csv_real( mean ), str( retries[i] ), str( failed[i] ) } );
        }
    }

    r.outputs.push_back( { "nystrom_error.csv", std::move( errs ) } );
    r.outputs.push_back( { "nystrom_heuristic.csv", std::move( heur ) } );

    return r;
}

//
// HODLR
//

ExperimentReport
run_hodlr ( const HodlrExperiment &  cfg )
{
    const auto      h = load( cfg.matrix );
    const auto &    A = require_dense( h );
    const std::size_t  n = h.rows;

    if ( h.rows != h.cols )
        throw ConfigError( "exp-hodlr: matrix must be square" );
    if ( cfg.levels < 1 )
        throw ConfigError( "exp-hodlr: levels must be positive" );

    int  levels = cfg.levels;

    while ( levels > 1 && ( std::size_t( 1 ) << levels ) > n )
        --levels;

    const auto  menu = cfg.menu.empty()
                       ? std::vector< FloatFormat >{ fp64(), fp32(), bf16(), fp16(), find_format( "fp8-e4m3" ) }
                       : cfg.menu;

    CsvTable  t;

    t.add_config( "experiment", "exp-hodlr" );
    t.add_config( "matrix", cfg.matrix );
    t.add_config( "levels", std::to_string( cfg.levels ) );
    t.add_config( "levels_used", std::to_string( levels ) );
    {
        std::vector< std::string >  e;

        for ( double  v : cfg.eps )
            e.push_back( csv_real( v ) );
        t.add_config( "eps", join( e, ',' ) );
    }
    t.add_config( "menu", format_names( menu ) );
    t.add_config( "seed", std::to_string( cfg.seed ) );
    t.add_config( "matvec_trials", str( cfg.matvec_trials ) );

    t.columns = { "matrix", "eps", "levels", "bits_adaptive", "bits_uniform", "savings_ratio", "error", "bound",
                  "level_formats", "promoted_blocks", "matvec_work_format", "matvec_max_backward_error" };

    ExperimentReport  r;

    r.experiment = "exp-hodlr";
    r.matrix     = h.name;

    if ( levels != cfg.levels )
        r.summary.push_back( "levels reduced to " + std::to_string( levels ) + " (n=" + str( n ) + ")" );

    HodlrSvdCache  cache( A );

    for ( double  eps : cfg.eps )
    {
        const auto  H   = hodlr_build( A, levels, eps, menu, &cache );
        const auto  err = hodlr_reconstruct_error( A, H );
        const auto  s   = storage_report( H );

        std::size_t  promoted = 0;

        for ( auto  p : s.promoted_blocks )
            promoted += p;

        // coarsest built-in format meeting u <= eps / n
        std::string  work_name;
        double       worst = std::nan( "" );

        if ( cfg.matvec_trials > 0 )
        {
            const FloatFormat *  work = &fp64();

            for ( const auto &  f : builtin_formats() )
                if ( f.unit_roundoff() <= eps / double( n ) && f.unit_roundoff() > work->unit_roundoff() )
                    work = &f;

            work_name = work->name;
            worst     = 0.0;

            std::mt19937_64                           gen( derive_seed( cfg.seed, 0 ) );
            std::uniform_real_distribution< double >  ud( -1.0, 1.0 );
            Vector                                    x( n );

            for ( std::size_t  trial = 0; trial < cfg.matvec_trials; ++trial )
            {
                for ( auto &  v : x )
                    v = ud( gen );
                worst = std::max( worst, hodlr_matvec( H, x, *work ).backward_error_estimate );
            }
        }

        t.rows.push_back( { h.name, csv_real( eps ), std::to_string( levels ), std::to_string( s.bits_adaptive ),
                            std::to_string( s.bits_uniform_double ), csv_real( s.savings_ratio ), csv_real( err.error ),
                            csv_real( err.bound ), format_names( s.level_formats, ';' ), str( promoted ), work_name,
                            csv_real( worst ) } );

        r.summary.push_back( "eps=" + sci( eps ) + ": savings " + sci( s.savings_ratio ) + ", error " +
                             sci( err.error ) + " <= bound " + sci( err.bound ) + ", formats " +
                             format_names( s.level_formats, ' ' ) +
                             ( cfg.matvec_trials > 0 ? ", matvec(" + work_name + ") bwd " + sci( worst ) : "" ) );
    }

    r.outputs.push_back( { "hodlr_" + h.name + ".csv", std::move( t ) } );

    return r;
}

}// namespace mpbal
