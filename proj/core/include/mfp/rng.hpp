#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mfp {

using Rng = std::mt19937_64;

/// Counter-derived substream seed: mixes the master seed with each counter
/// through SplitMix64 so that (master, counters...) maps to an independent
/// generator state regardless of evaluation order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<std::uint64_t> counters);

Rng make_substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> counters);

}  // namespace mfp
