#pragma once
//
// Software emulation of low precision floating point formats.
//
// Every format is described by its exponent width and the number of
// explicitly stored significand bits. Values are always carried in host
// doubles; "computing in format f" means rounding the result of every
// scalar operation to f (round to nearest, ties to even).
//

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpbal {

struct FloatFormat
{
    std::string name;
    int         exponent_bits      = 11;
    int         significand_bits   = 52;   // stored bits, implicit one excluded
    bool        supports_subnormals = true;

    // OCP fp8-e4m3 style: the all-ones exponent still encodes finite values,
    // only the all-ones significand of that binade is reserved.
    bool        extended_top_binade = false;

    // nominal hardware metadata, display only
    double      table_tflops = 0.0;

    int    storage_bits    () const { return 1 + exponent_bits + significand_bits; }
    int    exponent_offset () const { return (1 << (exponent_bits - 1)) - 1; }
    int    min_exponent    () const { return 1 - exponent_offset(); }
    int    max_exponent    () const { return exponent_offset() + (extended_top_binade ? 1 : 0); }

    // u = 2^-(t+1)
    double unit_roundoff   () const;
    double min_normal      () const;
    double min_subnormal   () const;
    double max_finite      () const;

    bool   is_host_double  () const { return exponent_bits == 11 && significand_bits == 52; }

    friend bool operator == ( const FloatFormat &  a, const FloatFormat &  b )
    {
        return a.exponent_bits == b.exponent_bits && a.significand_bits == b.significand_bits
            && a.supports_subnormals == b.supports_subnormals
            && a.extended_top_binade == b.extended_top_binade;
    }
};

// fp64, fp32, tf32, fp16, bf16, fp8-e5m2, fp8-e4m3 (in that order)
const std::vector< FloatFormat > &  builtin_formats ();

// lookup by name ("fp16", "half", "double", ...); throws ConfigError if unknown
const FloatFormat &  find_format ( std::string_view  name );

const FloatFormat &  fp64 ();
const FloatFormat &  fp32 ();
const FloatFormat &  fp16 ();
const FloatFormat &  bf16 ();

struct FormatRange
{
    double  min_normal;
    double  max_finite;
};

FormatRange  format_range ( const FloatFormat &  fmt );

// Counters for range events. Overflow to infinity is reported, not raised.
struct RoundingEvents
{
    std::uint64_t  overflow  = 0;
    std::uint64_t  underflow = 0;

    RoundingEvents &  operator += ( const RoundingEvents &  o )
    {
        overflow  += o.overflow;
        underflow += o.underflow;
        return *this;
    }

    bool  any () const { return overflow + underflow > 0; }
};

//
// Precomputed rounding parameters for one format. Cheap to copy and used by
// every emulated kernel in the inner loops.
//
class Rounder
{
public:
    explicit Rounder ( const FloatFormat &  fmt );

    double  operator () ( double  x ) const
    {
        if ( native_ )
            return x;
        return round_emulated( x );
    }

    // same as operator() but records overflow / underflow
    double  operator () ( double  x, RoundingEvents &  ev ) const
    {
        if ( native_ )
            return x;

        const double  r = round_emulated( x );

        if ( std::isinf( r ) && std::isfinite( x ) )
            ++ev.overflow;
        else if ( x != 0.0 && std::fabs( x ) < min_normal_ && r != x )
            ++ev.underflow;

        return r;
    }

    bool    native        () const { return native_; }
    double  unit_roundoff () const { return unit_roundoff_; }

private:
    double  round_emulated ( double  x ) const
    {
        const auto  bits   = std::bit_cast< std::uint64_t >( x );
        const int   biased = int( ( bits >> 52 ) & 0x7ff );

        if ( biased == 0x7ff )
            return x;                               // inf / nan pass through

        if ( biased == 0 )
            return std::copysign( 0.0, x );         // zero or host subnormal: far below any emulated range

        const double  ax = std::fabs( x );
        const int     e  = biased - 1023;

        if ( ! subnormals_ && e < emin_ )
            return std::copysign( ax > 0.5 * min_normal_ ? min_normal_ : 0.0, x );

        //
        // round |x| at the quantum 2^(max(e,emin)-t) with the 2^52 trick (the host
        // FPU does round-to-nearest-even); power of two scalings are exact here
        //
        const int     qe = std::max( e, emin_ ) - t_;
        const double  y  = ax * pow2( -qe );
        double        r  = ( ( y + 0x1p52 ) - 0x1p52 ) * pow2( qe );

        if ( r > xmax_ )
            r = std::numeric_limits< double >::infinity();

        return std::copysign( r, x );
    }

    static double  pow2 ( int  e ) { return std::bit_cast< double >( std::uint64_t( e + 1023 ) << 52 ); }

    bool    native_;
    int     t_;             // stored significand bits
    int     emin_;
    double  xmax_;
    double  min_normal_;
    double  unit_roundoff_;
    bool    subnormals_;
};

struct RoundedScalar
{
    double  value;
    bool    overflow;       // finite input became infinite
    bool    underflow;      // tiny input lost accuracy (includes flush to zero)
};

RoundedScalar  round_scalar_ex ( double  x, const FloatFormat &  fmt );

inline double  round_scalar ( double  x, const FloatFormat &  fmt ) { return round_scalar_ex( x, fmt ).value; }

// elementwise in-place rounding of a contiguous range
RoundingEvents  round_span ( std::span< double >  values, const FloatFormat &  fmt );

}// namespace mpbal
