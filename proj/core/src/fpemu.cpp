#include <mpbal/fpemu.hpp>
#include <mpbal/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace mpbal {

namespace
{

FloatFormat
make ( const char *  name, int  ebits, int  sbits, double  tflops, bool  ext_top = false )
{
    FloatFormat  f;

    f.name                = name;
    f.exponent_bits       = ebits;
    f.significand_bits    = sbits;
    f.supports_subnormals = true;
    f.extended_top_binade = ext_top;
    f.table_tflops        = tflops;

    return f;
}

std::string
lower ( std::string_view  s )
{
    std::string  r( s );

    std::transform( r.begin(), r.end(), r.begin(), [] ( unsigned char  c ) { return char( std::tolower( c ) ); } );
    return r;
}

}// namespace anonymous

double FloatFormat::unit_roundoff () const { return std::ldexp( 1.0, -( significand_bits + 1 ) ); }
double FloatFormat::min_normal    () const { return std::ldexp( 1.0, min_exponent() ); }
double FloatFormat::min_subnormal () const
{
    return supports_subnormals ? std::ldexp( 1.0, min_exponent() - significand_bits ) : min_normal();
}

double
FloatFormat::max_finite () const
{
    if ( is_host_double() )
        return std::numeric_limits< double >::max();

    // with an extended top binade the largest significand pattern is reserved
    const double  frac = extended_top_binade ? 2.0 - std::ldexp( 1.0, 1 - significand_bits )
                                             : 2.0 - std::ldexp( 1.0, -significand_bits );

    return frac * std::ldexp( 1.0, max_exponent() );
}

const std::vector< FloatFormat > &
builtin_formats ()
{
    static const std::vector< FloatFormat >  formats = {
        make( "fp64",     11, 52,   67 ),
        make( "fp32",      8, 23,  989 ),
        make( "tf32",      8, 10,  989 ),
        make( "fp16",      5, 10, 1979 ),
        make( "bf16",      8,  7, 1979 ),
        make( "fp8-e5m2",  5,  2, 3958 ),
        make( "fp8-e4m3",  4,  3, 3958, true ),
    };

    return formats;
}

const FloatFormat &
find_format ( std::string_view  name )
{
    const auto  key = lower( name );
    std::string canonical = key;

    if      ( key == "double" || key == "d" || key == "binary64" ) canonical = "fp64";
    else if ( key == "single" || key == "s" || key == "binary32" ) canonical = "fp32";
    else if ( key == "half"   || key == "h" || key == "binary16" ) canonical = "fp16";
    else if ( key == "bfloat16" )                                  canonical = "bf16";
    else if ( key == "e5m2" )                                      canonical = "fp8-e5m2";
    else if ( key == "e4m3" )                                      canonical = "fp8-e4m3";

    for ( const auto &  f : builtin_formats() )
        if ( f.name == canonical )
            return f;

    throw ConfigError( "unknown floating point format '" + std::string( name ) +
                       "' (expected one of fp64, fp32, tf32, fp16, bf16, fp8-e5m2, fp8-e4m3)" );
}

const FloatFormat & fp64 () { return builtin_formats()[0]; }
const FloatFormat & fp32 () { return builtin_formats()[1]; }
const FloatFormat & fp16 () { return builtin_formats()[3]; }
const FloatFormat & bf16 () { return builtin_formats()[4]; }

FormatRange
format_range ( const FloatFormat &  fmt )
{
    return { fmt.min_normal(), fmt.max_finite() };
}

Rounder::Rounder ( const FloatFormat &  fmt )
        : native_( fmt.is_host_double() )
        , t_( fmt.significand_bits )
        , emin_( fmt.min_exponent() )
        , xmax_( fmt.max_finite() )
        , min_normal_( fmt.min_normal() )
        , unit_roundoff_( fmt.unit_roundoff() )
        , subnormals_( fmt.supports_subnormals )
{}

RoundedScalar
round_scalar_ex ( double  x, const FloatFormat &  fmt )
{
    const Rounder   rnd( fmt );
    RoundingEvents  ev;
    const double    r = rnd( x, ev );

    return { r, ev.overflow > 0, ev.underflow > 0 };
}

RoundingEvents
round_span ( std::span< double >  values, const FloatFormat &  fmt )
{
    const Rounder   rnd( fmt );
    RoundingEvents  ev;

    if ( rnd.native() )
        return ev;

    for ( auto &  v : values )
        v = rnd( v, ev );

    return ev;
}

}// namespace mpbal
