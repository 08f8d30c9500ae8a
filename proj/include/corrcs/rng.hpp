#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace corrcs {

/// Random stream used everywhere in the library. There is no global state:
/// every consumer receives an explicitly seeded engine.
using Rng = std::mt19937_64;

/// Stream purposes, hashed into per-trial seeds so the streams are independent.
enum class StreamTag : std::uint64_t {
  kSignal = 0x5349474e,
  kEnsemble = 0x454e5342,
  kNoise = 0x4e4f4953,
  kGainFit = 0x4741494e,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic seed from a master seed and any number of counters.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);

/// Engine seeded from (master, parts...).
Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> parts);

/// Fills `out` with IID N(0, stddev^2) draws.
void fill_gaussian(Rng& rng, std::span<double> out, double stddev = 1.0);

}  // namespace corrcs
