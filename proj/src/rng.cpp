#include "rng.hpp"

namespace hjbac {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag_a,
                          std::uint64_t tag_b, std::uint64_t tag_c) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s ^= tag_a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= tag_b + 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(s);
  s ^= tag_c + 0x8bb84b93962eacc9ULL;
  h ^= splitmix64(s);
  return h;
}

}  // namespace hjbac
