#include "mfp/rng.hpp"

namespace mfp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = splitmix64(master_seed);
  for (std::uint64_t c : counters) {
    h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

Rng make_substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> counters) {
  return Rng(derive_seed(master_seed, counters));
}

}  // namespace mfp
