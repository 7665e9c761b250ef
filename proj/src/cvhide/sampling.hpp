// Copyright 2026 The cvhide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based random streams and deterministic chunked fan-out.
//
// Every sample index owns its own stream, so results never depend on how
// samples are spread over threads.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

namespace cvhide {

inline constexpr uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream)
      : key_(mix64(seed ^ mix64(stream ^ 0x632be59bd9b4e019ULL))) {}

  uint64_t next_u64() { return mix64(key_ + 0xd1342543de82ef95ULL * ++counter_); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into fixed-size chunks, evaluates fn(begin, end) -> T for each
// chunk on up to `workers` threads, and returns the per-chunk results in chunk
// order. Chunking depends only on n and chunk_size.
template <typename T, typename Fn>
std::vector<T> map_chunks(uint64_t n, uint64_t chunk_size, unsigned workers,
                          Fn fn) {
  const uint64_t n_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<T> out(n_chunks);
  auto run = [&](unsigned w, unsigned n_workers) {
    for (uint64_t c = w; c < n_chunks; c += n_workers) {
      out[c] = fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
  };
  const unsigned n_workers =
      static_cast<unsigned>(std::min<uint64_t>(std::max(1u, workers), n_chunks));
  if (n_workers <= 1) {
    run(0, 1);
    return out;
  }
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(run, w, n_workers);
  for (auto& t : threads) t.join();
  return out;
}

}  // namespace cvhide
