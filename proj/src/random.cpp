#include "rankcorr/random.hpp"

namespace rankcorr {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream) {
  constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  return mix(mix(master_seed + kGolden) ^ (stream + 1) * kGolden);
}

Rng make_substream(std::uint64_t master_seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(substream_seed(master_seed, stream)),
                    static_cast<std::uint32_t>(substream_seed(master_seed, stream) >> 32)};
  return Rng(seq);
}

RowRange worker_rows(std::size_t rows, std::size_t workers, std::size_t worker) {
  if (workers == 0) workers = 1;
  const std::size_t base = rows / workers;
  const std::size_t extra = rows % workers;
  const std::size_t begin = worker * base + (worker < extra ? worker : extra);
  const std::size_t len = base + (worker < extra ? 1 : 0);
  return {begin, begin + len};
}

}  // namespace rankcorr
