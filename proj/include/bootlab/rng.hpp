#pragma once

// Counter-based random number generation.
//
// Every random quantity in the library is drawn from a CounterRng positioned at
// (master_seed, stream_id, replicate). The generator is Philox4x32-10: the
// output block for counter c under key k is a bijective function of (c, k), so
// replicate r's stream can be opened directly without advancing any shared
// state. Results therefore do not depend on thread count or scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace bootlab {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Identifies an independent random stream.
struct SeedPolicy {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    /// Deterministically derived sub-stream; distinct `k` give distinct streams.
    [[nodiscard]] constexpr SeedPolicy child(std::uint64_t k) const noexcept {
        return {master_seed, detail::splitmix64(stream_id ^ detail::splitmix64(k + 0x632be59bd9b4e019ULL))};
    }

    friend constexpr bool operator==(const SeedPolicy&, const SeedPolicy&) = default;
};

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    [[nodiscard]] static constexpr Counter block(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += 0x9E3779B9U;
            key[1] += 0xBB67AE85U;
        }
        return ctr;
    }

private:
    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53U} * c[0];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Stream generator for one (SeedPolicy, replicate) pair.
///
/// Satisfies UniformRandomBitGenerator, but the member samplers below should be
/// preferred over <random> distributions: those are implementation-defined and
/// would break cross-platform reproducibility.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(SeedPolicy seed, std::uint64_t replicate) noexcept
        : key_{}, replicate_(replicate) {
        const std::uint64_t k = detail::splitmix64(seed.master_seed ^ detail::splitmix64(seed.stream_id));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (buffered_ == 0) {
            refill();
        }
        --buffered_;
        return buffer_[buffered_];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, n) (Lemire's multiply-shift rejection). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) noexcept {
        auto m = static_cast<unsigned __int128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925 * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    double exponential() noexcept { return -std::log(uniform_open()); }

    /// Student t with integer degrees of freedom.
    double student_t(int dof) noexcept {
        const double z = normal();
        double chi2 = 0.0;
        for (int i = 0; i < dof; ++i) {
            const double g = normal();
            chi2 += g * g;
        }
        return z / std::sqrt(chi2 / dof);
    }

    /// Poisson with unit mean (inversion by sequential products).
    int poisson_unit() noexcept {
        constexpr double limit = 0.36787944117144233;  // exp(-1)
        int k = 0;
        double prod = uniform_open();
        while (prod > limit) {
            ++k;
            prod *= uniform_open();
        }
        return k;
    }

    /// Positions the stream so that the next 64-bit output is draw number `index`.
    void seek(std::uint64_t index) noexcept {
        block_ = index / 2;
        refill();
        buffered_ = 2 - static_cast<int>(index % 2);
        has_spare_ = false;
    }

    [[nodiscard]] std::uint64_t replicate() const noexcept { return replicate_; }

private:
    void refill() noexcept {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(replicate_),
                                      static_cast<std::uint32_t>(replicate_ >> 32)};
        const auto out = Philox4x32::block(ctr, key_);
        ++block_;
        // Consumed from index 1 down to 0.
        buffer_[1] = (std::uint64_t{out[1]} << 32) | out[0];
        buffer_[0] = (std::uint64_t{out[3]} << 32) | out[2];
        buffered_ = 2;
    }

    Philox4x32::Key key_;
    std::uint64_t replicate_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bootlab
