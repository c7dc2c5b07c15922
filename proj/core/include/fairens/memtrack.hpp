#pragma once
#include <cstdint>

namespace fairens::memtrack {

struct Usage {
  std::int64_t current = 0;
  std::int64_t peak = 0;
};

/// True when the build instruments the global allocator on this platform.
/// When false, measured windows report zero and callers should treat the
/// memory field as undefined.
bool available() noexcept;

/// Allocation counters of the calling thread.
Usage snapshot() noexcept;

/// Allocation high-water mark on the calling thread between construction
/// and the peak_bytes() call. Windows must not be nested: construction
/// resets the shared per-thread peak.
class ScopedWindow {
 public:
  ScopedWindow() noexcept;

  std::uint64_t peak_bytes() const noexcept;

 private:
  std::int64_t baseline_;
};

}  // namespace fairens::memtrack
