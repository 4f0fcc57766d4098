#include "dampnet/random.hpp"

#include <cmath>
#include <numbers>

namespace dampnet {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t run_index,
                          std::uint64_t stream) {
    return mix64(mix64(mix64(master_seed) ^ run_index) ^ (stream * 0xD1B54A32D192ED03ULL));
}

double NormalStream::uniform_open() {
    // 53 random bits mapped to (0, 1].
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

}  // namespace dampnet
