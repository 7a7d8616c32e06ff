#pragma once

#include <cstdint>
#include <type_traits>

namespace rdpp::par {

/// Number of threads a value of 0 resolves to (OpenMP default, or 1 when
/// built without OpenMP).
int hardware_threads();

/// Runs f(i) for i in [0, n). threads == 1 takes the plain serial loop;
/// threads == 0 uses the OpenMP default. Each index must only touch its own
/// output slot so results are identical for any thread count.
void for_index(std::int64_t n, int threads, void (*f)(std::int64_t, void*),
               void* ctx);

template <typename F>
void for_index(std::int64_t n, int threads, F&& f) {
  using Fn = std::remove_reference_t<F>;
  auto trampoline = [](std::int64_t i, void* ctx) {
    (*static_cast<Fn*>(ctx))(i);
  };
  for_index(n, threads, +trampoline, static_cast<void*>(&f));
}

}  // namespace rdpp::par
