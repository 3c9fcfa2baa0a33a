#ifndef TDO_UTIL_HPP
#define TDO_UTIL_HPP

#include <atomic>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace tdo {

// All randomness flows through mt19937_64 plus these helpers so that a seed
// determines every output byte regardless of platform (std distributions are
// not pinned down by the standard, so we do not use them).
inline double uniform01(std::mt19937_64 &rng) {
  // 53 random bits -> [0,1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64 &rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline std::uint64_t uniform_index(std::mt19937_64 &rng, std::uint64_t n) {
  // rejection sampling, unbiased
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// splitmix64, used to derive independent stream seeds from (seed, tag)
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Shortest decimal representation that round-trips bit-exact (to_chars).
inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("parse_double: bad number '" + std::string(s) + "'");
  return x;
}

inline long long parse_int(std::string_view s) {
  long long x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("parse_int: bad integer '" + std::string(s) + "'");
  return x;
}

// whitespace-separated tokens, '#' comments out the rest of the line
class TokenReader {
 public:
  explicit TokenReader(std::istream &in) : in_(in) {}

  std::string next() {
    std::string tok;
    char c;
    while (in_.get(c)) {
      if (c == '#') {
        while (in_.get(c) && c != '\n') {
        }
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(c);
    }
    if (tok.empty()) throw std::runtime_error("unexpected end of file");
    return tok;
  }

  long long next_int() { return parse_int(next()); }
  double next_double() { return parse_double(next()); }

 private:
  std::istream &in_;
};

// Runs fn(i) for i in [0,count) on `threads` workers. Work is claimed by
// atomic counter; callers index results by i so merge order is deterministic.
template <typename Fn>
void parallel_for_index(std::size_t count, unsigned threads, Fn &&fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto &th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace tdo

#endif  // TDO_UTIL_HPP
