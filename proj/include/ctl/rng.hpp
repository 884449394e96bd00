#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace ctl {

// Philox4x32-10 counter-based generator. A stream is a 64-bit key; the
// counter walks through 128-bit blocks so streams never overlap.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key = 0) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();
    std::uint32_t next_u32();

    // [0,1) with 53 bits
    double uniform();
    // (0,1], safe for log
    double uniform_pos();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t uniform_index(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

    double exponential();
    double exponential(double rate) { return exponential() / rate; }
    double normal();
    double gamma(double shape);
    std::uint64_t poisson(double mean);

    std::uint64_t key() const { return key_; }

private:
    void refill();

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

// Hierarchical stream keys: seed -> experiment -> replica.
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index);
std::uint64_t derive_key(std::uint64_t parent, std::string_view label);

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

}  // namespace ctl
