#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rdpp {

/// Derives an independent, reproducible RNG stream from a root seed plus a
/// tag and indices. Streams depend only on their inputs, never on draw order
/// elsewhere, which is what makes per-image work order-independent and
/// nested sample prefixes exact.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0);

std::mt19937_64 make_rng(std::uint64_t root, std::string_view tag,
                         std::uint64_t a = 0, std::uint64_t b = 0);

/// Uniform double in [0, 1) from the top 53 bits of the generator output.
/// Used instead of std::uniform_real_distribution so draws are identical
/// across standard library implementations.
double uniform01(std::mt19937_64& rng);

/// 64-bit FNV-1a. Chainable: pass a previous result as the basis to hash a
/// sequence of fields.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace rdpp
