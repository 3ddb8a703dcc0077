#pragma once

// Counter-based random number generation (Philox 4x32-10) with a fixed
// inverse-CDF normal transform. Every draw is a pure function of
// (key, counter), so streams can be evaluated in any order on any number
// of threads and still produce identical bits.

#include <array>
#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace temlab {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
}

} // namespace detail

/// One 128-bit Philox 4x32-10 block.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int i = 0; i < 10; ++i) detail::philox_round(ctr, key);
    return ctr;
}

/// Map a 64-bit word to a uniform in the open interval (0, 1).
inline double uniform_from_bits(std::uint64_t bits) {
    // 52 significant bits, offset by half a step so 0 and 1 are excluded.
    // With 52 bits the offset sum stays exactly representable, so the
    // result is in [2^-53, 1 - 2^-53] with no rounding to an endpoint.
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -value : value;
}

/// Keyed stream of standard normal samples. Sample i of stream
/// (seed, stream_id) is a pure function of those three values.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id) {}

    /// i-th standard normal of this stream.
    double operator()(std::uint64_t i) const {
        // Two normals per Philox block; block index = i/2.
        const std::uint64_t block = i >> 1;
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block),
            static_cast<std::uint32_t>(block >> 32),
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32)};
        const std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(seed_),
            static_cast<std::uint32_t>(seed_ >> 32)};
        const auto out = philox4x32(ctr, key);
        const std::uint64_t w =
            (i & 1) ? (static_cast<std::uint64_t>(out[2]) << 32 | out[3])
                    : (static_cast<std::uint64_t>(out[0]) << 32 | out[1]);
        return inverse_normal_cdf(uniform_from_bits(w));
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace temlab
