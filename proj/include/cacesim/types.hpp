#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cacesim {

class SimError : public std::runtime_error {
public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public SimError {
public:
  explicit ParseError(const std::string& msg) : SimError(msg) {}
};

enum class Language : int {
  Java = 0,
  Python,
  Cpp,
  C,
  Go,
  Rust,
  CSharp,
  JavaScript,
};

inline constexpr int kNumLanguages = 8;

inline constexpr std::array<Language, kNumLanguages> kAllLanguages = {
    Language::Java, Language::Python,  Language::Cpp, Language::C,
    Language::Go,   Language::Rust,    Language::CSharp,
    Language::JavaScript};

enum class TaskClass : int {
  Completion = 0,
  Reasoning,
};

inline constexpr std::array<TaskClass, 2> kAllTaskClasses = {
    TaskClass::Completion, TaskClass::Reasoning};

std::string_view to_string(Language lang);
std::string_view to_string(TaskClass tc);
Language language_from_string(std::string_view s);
TaskClass task_class_from_string(std::string_view s);

enum class PatternName : int {
  Uniform = 0,
  IdeHeavy,
  PopularitySkewed,
};

std::string_view to_string(PatternName p);
PatternName pattern_from_string(std::string_view s);

enum class Variant : int {
  Lru = 0,
  CaceFull,
  CaceMinusP1,
  CaceMinusP2,
  CaceMinusP3,
  CaceMinusP4,
};

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);

// Deterministic RNG wrapper. mt19937_64 has a bit-exact standard-defined
// sequence; the derived draws below avoid implementation-defined
// distributions so traces are reproducible across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

private:
  std::uint64_t state_;
};

// Independent sub-stream for a named purpose within one seeded run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0x6a09e667f3bcc909ULL * (stream + 1)));
  return r.next_u64();
}

// FNV-1a, used for stable config hashes in report metadata.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cacesim
