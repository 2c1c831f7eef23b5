#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace carnot {

inline constexpr const char* kVersion = "0.1.0";

enum class ErrorCode {
  BadDimensions,
  AntisymmetryViolation,
  NotTwoStep,
  DimensionMismatch,
  InvalidArgument,
  ZeroCovector,
  NotRepresentable,
  InfeasibleFiber,
  NonUnitDirection,
  WitnessNotSingular,
  MomentaVanished,
  NoConvergence,
  BudgetExceeded,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::AntisymmetryViolation: return "AntisymmetryViolation";
    case ErrorCode::NotTwoStep: return "NotTwoStep";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroCovector: return "ZeroCovector";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::InfeasibleFiber: return "InfeasibleFiber";
    case ErrorCode::NonUnitDirection: return "NonUnitDirection";
    case ErrorCode::WitnessNotSingular: return "WitnessNotSingular";
    case ErrorCode::MomentaVanished: return "MomentaVanished";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

// FNV-1a, used for hashing lattice elements and for config digests.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Static-partition parallel map: body(i) must only touch state indexed by i,
// so results are independent of scheduling.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  unsigned n = std::min<unsigned>(threads, std::thread::hardware_concurrency() > 0
                                               ? std::thread::hardware_concurrency()
                                               : 1u);
  n = static_cast<unsigned>(std::min<std::size_t>(n, count));
  std::vector<std::thread> pool;
  pool.reserve(n);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&, t]() {
      const std::size_t lo = count * t / n;
      const std::size_t hi = count * (t + 1) / n;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace carnot
