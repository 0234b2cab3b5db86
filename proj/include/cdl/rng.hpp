#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cdl {

// Counter-based RNG (Philox-4x32-10). A generator is a pure function of
// (seed, stream, counter), so independent streams can be handed to worker
// threads and results do not depend on the thread count or on call
// interleaving.
class PhiloxRng {
  public:
    PhiloxRng(uint64_t seed, uint64_t stream = 0)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)),
          stream_(stream),
          counter_(0) {}

    /// Generator for the same seed but an independent stream.
    PhiloxRng split(uint64_t stream) const {
        PhiloxRng r(static_cast<uint64_t>(key0_) | (static_cast<uint64_t>(key1_) << 32), stream);
        return r;
    }

    uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        uint32_t c0 = static_cast<uint32_t>(counter_);
        uint32_t c1 = static_cast<uint32_t>(counter_ >> 32);
        uint32_t c2 = static_cast<uint32_t>(stream_);
        uint32_t c3 = static_cast<uint32_t>(stream_ >> 32);
        ++counter_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = static_cast<uint64_t>(0xD2511F53u) * c0;
            const uint64_t p1 = static_cast<uint64_t>(0xCD9E8D57u) * c2;
            uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
            uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        spare_ = (static_cast<uint64_t>(c2) << 32) | c3;
        have_spare_ = true;
        return (static_cast<uint64_t>(c0) << 32) | c1;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound) via rejection.
    uint64_t uniform_int(uint64_t bound) {
        const uint64_t limit = bound * (UINT64_MAX / bound);
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    bool bernoulli() { return (next_u64() & 1u) != 0; }

    /// Standard normal via Box-Muller (self-contained for reproducibility).
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

  private:
    uint32_t key0_, key1_;
    uint64_t stream_;
    uint64_t counter_;
    uint64_t spare_ = 0;
    bool have_spare_ = false;
    double spare_normal_ = 0.0;
    bool have_normal_ = false;
};

}  // namespace cdl
