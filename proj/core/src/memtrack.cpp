#include "fairens/memtrack.hpp"

#include <cstdlib>
#include <new>

#if __has_include(<malloc.h>)
#include <malloc.h>
#define FAIRENS_MEMTRACK 1
#else
// without malloc_usable_size the freed size is unknowable, so the
// instrumentation is disabled rather than left to drift
#define FAIRENS_MEMTRACK 0
#endif

namespace fairens::memtrack {

namespace {

thread_local std::int64_t tl_current = 0;
thread_local std::int64_t tl_peak = 0;

#if FAIRENS_MEMTRACK
void note_alloc(void* p) noexcept {
  if (!p) return;
  tl_current += static_cast<std::int64_t>(malloc_usable_size(p));
  if (tl_current > tl_peak) tl_peak = tl_current;
}

void note_free(void* p) noexcept {
  if (!p) return;
  // blocks freed on a different thread than they were allocated on can
  // drive this negative; window arithmetic clamps at zero
  tl_current -= static_cast<std::int64_t>(malloc_usable_size(p));
}
#endif

}  // namespace

bool available() noexcept { return FAIRENS_MEMTRACK != 0; }

Usage snapshot() noexcept { return {tl_current, tl_peak}; }

ScopedWindow::ScopedWindow() noexcept : baseline_(tl_current) { tl_peak = tl_current; }

std::uint64_t ScopedWindow::peak_bytes() const noexcept {
  std::int64_t delta = tl_peak - baseline_;
  return delta > 0 ? static_cast<std::uint64_t>(delta) : 0;
}

}  // namespace fairens::memtrack

#if FAIRENS_MEMTRACK

namespace {

void* tracked_alloc(std::size_t size) {
  if (size == 0) size = 1;
  for (;;) {
    if (void* p = std::malloc(size)) {
      fairens::memtrack::note_alloc(p);
      return p;
    }
    std::new_handler handler = std::get_new_handler();
    if (!handler) throw std::bad_alloc();
    handler();
  }
}

void* tracked_alloc(std::size_t size, std::align_val_t al) {
  std::size_t align = static_cast<std::size_t>(al);
  if (align < alignof(void*)) align = alignof(void*);
  std::size_t rounded = (size + align - 1) / align * align;
  if (rounded == 0) rounded = align;
  for (;;) {
    if (void* p = std::aligned_alloc(align, rounded)) {
      fairens::memtrack::note_alloc(p);
      return p;
    }
    std::new_handler handler = std::get_new_handler();
    if (!handler) throw std::bad_alloc();
    handler();
  }
}

void tracked_free(void* p) noexcept {
  if (!p) return;
  fairens::memtrack::note_free(p);
  std::free(p);
}

}  // namespace

void* operator new(std::size_t size) { return tracked_alloc(size); }
void* operator new[](std::size_t size) { return tracked_alloc(size); }
void* operator new(std::size_t size, std::align_val_t al) { return tracked_alloc(size, al); }
void* operator new[](std::size_t size, std::align_val_t al) { return tracked_alloc(size, al); }

void* operator new(std::size_t size, const std::nothrow_t&) noexcept {
  try {
    return tracked_alloc(size);
  } catch (...) {
    return nullptr;
  }
}
void* operator new[](std::size_t size, const std::nothrow_t&) noexcept {
  try {
    return tracked_alloc(size);
  } catch (...) {
    return nullptr;
  }
}
void* operator new(std::size_t size, std::align_val_t al, const std::nothrow_t&) noexcept {
  try {
    return tracked_alloc(size, al);
  } catch (...) {
    return nullptr;
  }
}
void* operator new[](std::size_t size, std::align_val_t al, const std::nothrow_t&) noexcept {
  try {
    return tracked_alloc(size, al);
  } catch (...) {
    return nullptr;
  }
}

void operator delete(void* p) noexcept { tracked_free(p); }
void operator delete[](void* p) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete(void* p, std::align_val_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::align_val_t) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t, std::align_val_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t, std::align_val_t) noexcept { tracked_free(p); }
void operator delete(void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
void operator delete(void* p, std::align_val_t, const std::nothrow_t&) noexcept {
  tracked_free(p);
}
void operator delete[](void* p, std::align_val_t, const std::nothrow_t&) noexcept {
  tracked_free(p);
}

#endif
