#pragma once
//
// Portable seeded random streams. std::normal_distribution is
// implementation-defined, so Gaussians use an explicit Box-Muller transform
// over mt19937_64 to keep results identical across standard libraries.
//

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mpbal {

// SplitMix64 finalizer; derives independent stream seeds from (seed, index)
constexpr std::uint64_t
derive_seed ( std::uint64_t  seed, std::uint64_t  index )
{
    std::uint64_t  z = seed + 0x9e3779b97f4a7c15ull * ( index + 1 );

    z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
    z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebull;

    return z ^ ( z >> 31 );
}

class GaussianSource
{
public:
    explicit GaussianSource ( std::uint64_t  seed ) : gen_( seed ) {}

    // uniform on (0, 1), 53 random bits
    double  uniform ()
    {
        return ( double( gen_() >> 11 ) + 0.5 ) * 0x1p-53;
    }

    double  operator () ()
    {
        if ( has_spare_ )
        {
            has_spare_ = false;
            return spare_;
        }

        const double  r = std::sqrt( -2.0 * std::log( uniform() ) );
        const double  t = 2.0 * std::numbers::pi * uniform();

        spare_     = r * std::sin( t );
        has_spare_ = true;

        return r * std::cos( t );
    }

private:
    std::mt19937_64  gen_;
    double           spare_     = 0.0;
    bool             has_spare_ = false;
};

}// namespace mpbal
