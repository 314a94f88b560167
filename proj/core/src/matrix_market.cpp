#include <mpbal/matrix_market.hpp>
#include <mpbal/densela.hpp>
#include <mpbal/errors.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace mpbal {

namespace
{

std::string
lower ( std::string  s )
{
    std::transform( s.begin(), s.end(), s.begin(), [] ( unsigned char  c ) { return char( std::tolower( c ) ); } );
    return s;
}

// whitespace-separated token reader over one line
class Tokens
{
public:
    Tokens ( std::string_view  s, long  line ) : s_( s ), line_( line ) {}

    std::string_view  next ()
    {
        while ( pos_ < s_.size() && std::isspace( (unsigned char) s_[pos_] ) )
            ++pos_;

        if ( pos_ == s_.size() )
            throw ParseError( "unexpected end of line", line_ );

        const auto  b = pos_;

        while ( pos_ < s_.size() && ! std::isspace( (unsigned char) s_[pos_] ) )
            ++pos_;

        return s_.substr( b, pos_ - b );
    }

    std::size_t  index ()
    {
        const auto   t = next();
        std::size_t  v = 0;
        auto [p, ec]   = std::from_chars( t.data(), t.data() + t.size(), v );

        if ( ec != std::errc() || p != t.data() + t.size() )
            throw ParseError( "invalid integer '" + std::string( t ) + "'", line_ );

        return v;
    }

    double  real ()
    {
        const auto  t = next();
        double      v = 0;
        auto [p, ec]  = std::from_chars( t.data(), t.data() + t.size(), v );

        if ( ec != std::errc() || p != t.data() + t.size() )
            throw ParseError( "invalid number '" + std::string( t ) + "'", line_ );

        return v;
    }

    bool  done ()
    {
        while ( pos_ < s_.size() && std::isspace( (unsigned char) s_[pos_] ) )
            ++pos_;
        return pos_ == s_.size();
    }

private:
    std::string_view  s_;
    std::size_t       pos_ = 0;
    long              line_;
};

}// namespace anonymous

SparseMatrixCSC
read_matrix_market ( std::istream &  in )
{
    std::string  line;
    long         lineno = 0;

    if ( ! std::getline( in, line ) )
        throw ParseError( "empty input", 1 );

    ++lineno;

    std::istringstream  hs( line );
    std::string         banner, object, format, field, symmetry;

    hs >> banner >> object >> format >> field >> symmetry;

    if ( banner != "%%MatrixMarket" )
        throw ParseError( "missing %%MatrixMarket banner", lineno );

    object   = lower( object );
    format   = lower( format );
    field    = lower( field );
    symmetry = lower( symmetry );

    if ( object != "matrix" )
        throw UnsupportedField( "Matrix Market object '" + object + "' is not supported" );
    if ( format != "coordinate" && format != "array" )
        throw ParseError( "unknown format '" + format + "'", lineno );
    if ( field == "complex" || field == "pattern" )
        throw UnsupportedField( "Matrix Market field '" + field + "' is not supported" );
    if ( field != "real" && field != "integer" && field != "double" )
        throw ParseError( "unknown field '" + field + "'", lineno );
    if ( symmetry != "general" && symmetry != "symmetric" )
        throw UnsupportedField( "Matrix Market symmetry '" + symmetry + "' is not supported" );

    const bool  sym = symmetry == "symmetric";

    // skip comments and blank lines up to the size line
    auto  next_data_line = [&] () -> bool {
        while ( std::getline( in, line ) )
        {
            ++lineno;

            const auto  p = line.find_first_not_of( " \t\r" );

            if ( p == std::string::npos || line[p] == '%' )
                continue;

            return true;
        }
        return false;
    };

    if ( ! next_data_line() )
        throw ParseError( "missing size line", lineno + 1 );

    Tokens       sz( line, lineno );
    const auto   m = sz.index();
    const auto   n = sz.index();

    std::vector< Triplet >  t;

    if ( format == "coordinate" )
    {
        const auto  nz = sz.index();

        if ( ! sz.done() )
            throw ParseError( "trailing tokens on size line", lineno );
        if ( sym && m != n )
            throw ParseError( "symmetric matrix must be square", lineno );

        t.reserve( sym ? 2 * nz : nz );

        for ( std::size_t  k = 0; k < nz; ++k )
        {
            if ( ! next_data_line() )
                throw ParseError( "expected " + std::to_string( nz ) + " entries, found " + std::to_string( k ), lineno + 1 );

            Tokens      tk( line, lineno );
            const auto  i = tk.index();
            const auto  j = tk.index();
            const auto  v = tk.real();

            if ( i < 1 || i > m || j < 1 || j > n )
                throw ParseError( "index out of range", lineno );
            if ( ! tk.done() )
                throw ParseError( "trailing tokens in entry", lineno );

            t.push_back( { i - 1, j - 1, v } );

            if ( sym && i != j )
                t.push_back( { j - 1, i - 1, v } );
        }
    }
    else
    {
        if ( ! sz.done() )
            throw ParseError( "trailing tokens on size line", lineno );
        if ( sym && m != n )
            throw ParseError( "symmetric matrix must be square", lineno );

        // column-major; symmetric arrays store the lower triangle only
        for ( std::size_t  j = 0; j < n; ++j )
            for ( std::size_t  i = sym ? j : 0; i < m; ++i )
            {
                if ( ! next_data_line() )
                    throw ParseError( "array data ended early", lineno + 1 );

                Tokens      tk( line, lineno );
                const auto  v = tk.real();

                if ( v == 0.0 )
                    continue;

                t.push_back( { i, j, v } );

                if ( sym && i != j )
                    t.push_back( { j, i, v } );
            }
    }

    if ( next_data_line() )
        throw ParseError( "unexpected data after the last entry", lineno );

    return SparseMatrixCSC::from_triplets( m, n, std::move( t ) );
}

MatrixHandle
load_matrix_market ( const std::filesystem::path &  path )
{
    std::ifstream  in( path );

    if ( ! in )
        throw ConfigError( "cannot open matrix file '" + path.string() + "'" );

    std::string  banner;

    std::getline( in, banner );
    in.seekg( 0 );

    MatrixHandle  h;

    h.name      = path.stem().string();
    h.path      = path;
    h.csc       = read_matrix_market( in );
    h.rows      = h.csc.rows();
    h.cols      = h.csc.cols();
    h.symmetric = lower( banner ).find( "symmetric" ) != std::string::npos;

    if ( h.rows <= dense_cap() && h.cols <= dense_cap() )
        h.dense = h.csc.to_dense();

    return h;
}

void
write_matrix_market ( std::ostream &  out, const SparseMatrixCSC &  A )
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';

    char  buf[64];

    for ( std::size_t  j = 0; j < A.cols(); ++j )
    {
        const auto  r = A.col_rows( j );
        const auto  v = A.col_values( j );

        for ( std::size_t  p = 0; p < r.size(); ++p )
        {
            std::snprintf( buf, sizeof( buf ), "%.17g", v[p] );
            out << r[p] + 1 << ' ' << j + 1 << ' ' << buf << '\n';
        }
    }
}

void
write_matrix_market ( const std::filesystem::path &  path, const SparseMatrixCSC &  A )
{
    std::ofstream  out( path );

    if ( ! out )
        throw ConfigError( "cannot write '" + path.string() + "'" );

    write_matrix_market( out, A );
}

}// namespace mpbal
