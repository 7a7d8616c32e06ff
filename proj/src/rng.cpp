#include "rdpp/rng.hpp"

namespace rdpp {

namespace {

// splitmix64; the usual mixing constants.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                          std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix(root ^ fnv1a64(tag));
  h = mix(h ^ a);
  h = mix(h ^ b);
  return h;
}

std::mt19937_64 make_rng(std::uint64_t root, std::string_view tag,
                         std::uint64_t a, std::uint64_t b) {
  return std::mt19937_64(derive_seed(root, tag, a, b));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rdpp
