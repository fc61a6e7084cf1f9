#pragma once

#include <cstdint>
#include <random>

namespace rankcorr {

// All randomized routines draw from this engine. Runs are reproducible for a
// fixed seed on a given standard library.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 0;

// Seed of the independent substream owned by `stream` under `master_seed`.
// Stream 0 of a seed is not the seed itself, so (seed, 0) and a plain
// Rng(seed) are unrelated.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream);

Rng make_substream(std::uint64_t master_seed, std::uint64_t stream);

// Half-open row range [begin, end) owned by `worker` when `rows` rows are split
// into `workers` contiguous chunks. Earlier workers receive the remainder.
struct RowRange {
  std::size_t begin;
  std::size_t end;
};
RowRange worker_rows(std::size_t rows, std::size_t workers, std::size_t worker);

}  // namespace rankcorr
