#pragma once

#include <cstdint>
#include <random>

namespace credence {

/// Deterministic substream of the scenario seed. Streams are keyed by
/// (purpose, step, entity) so results do not depend on evaluation order.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t purpose, uint64_t a = 0, uint64_t b = 0) {
        std::seed_seq seq{seed, purpose, a, b};
        engine_.seed(seq);
    }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal(double mean = 0.0, double sigma = 1.0) {
        return std::normal_distribution<double>(mean, sigma)(engine_);
    }

    double exponential(double rate) {
        return std::exponential_distribution<double>(rate)(engine_);
    }

    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<int>(mean)(engine_);
    }

    uint64_t integer() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

namespace rng_purpose {
constexpr uint64_t kTraffic = 0x7452414646; // "TRAFF"
constexpr uint64_t kSense = 0x53454e5345;   // "SENSE"
}  // namespace rng_purpose

}  // namespace credence
