#include "corrcs/rng.hpp"

namespace corrcs {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
  return Rng(derive_seed(master, parts));
}

void fill_gaussian(Rng& rng, std::span<double> out, double stddev) {
  // Draw standard normals and scale, so the stream consumption does not depend
  // on stddev (stddev = 0 is allowed).
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : out) v = stddev * dist(rng);
}

}  // namespace corrcs
