#pragma once

#include <cstdint>
#include <random>

namespace dampnet {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for stream `stream` of ensemble member `run_index`. Stable across
/// platforms: only mix64 and integer arithmetic are involved.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t run_index,
                          std::uint64_t stream = 0);

/// Standard normal variates from mt19937_64 via the Box–Muller transform.
///
/// Both the engine and the transform are fixed so a seed produces the same
/// sequence with every standard library (std::normal_distribution does not
/// give that guarantee).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double operator()();

private:
    double uniform_open();  // (0, 1]

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dampnet
