// Copyright 2026 The tcpalign Authors.
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

// Serial vs OpenMP kernels and per-frame alignment latency.
//   tcpalign_bench [iterations]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "tcpalign/align.hpp"
#include "tcpalign/harness.hpp"
#include "tcpalign/parallel.hpp"

using namespace tcpalign;

namespace {

double median_ms(int iterations, const std::function<void()>& fn) {
  std::vector<double> t;
  for (int i = 0; i < iterations; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

ImageBuf noise_image(int w, int h, std::uint64_t seed) {
  FrameRng rng(seed);
  ImageBuf img(w, h);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng.next() & 0xff);
  return img;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3f ms   omp %8.3f ms   speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int iterations = argc > 1 ? std::max(1, std::atoi(argv[1])) : 50;
  std::printf("threads: %d, iterations: %d\n", worker_count(0), iterations);

  const ImageBuf big = noise_image(1024, 1024, 1);
  const ImageBuf other = noise_image(1024, 1024, 2);
  ImageBuf sink(1, 1);

  row("resize 1024->512",
      median_ms(iterations, [&] { sink = serial::resize_bilinear(big, 512, 512); }),
      median_ms(iterations, [&] { sink = resize_bilinear(big, 512, 512); }));
  const Homography h(Mat3{{1.02, 0.01, -4.0}, {-0.015, 0.98, 3.0}, {1e-5, -2e-5, 1.0}});
  row("warp 1024", median_ms(iterations, [&] { sink = serial::warp_perspective(big, h); }),
      median_ms(iterations, [&] { sink = warp_perspective(big, h); }));
  row("blend 1024", median_ms(iterations, [&] { sink = serial::alpha_blend(big, other, 0.5); }),
      median_ms(iterations, [&] { sink = alpha_blend(big, other, 0.5); }));

  // Per-frame alignment on a rendered 512x512 scene.
  harness::HarnessConfig cfg;
  FrameRng rng = derive_rng(0, "bench", 0, "scene");
  const harness::SceneState s = harness::sample_scene(cfg, rng);
  const ImageBuf frame = harness::render_scene(s);
  const double align_ms = median_ms(std::max(iterations, 200), [&] {
    sink = align_visual(frame, s.calib, s.ee_pose, cfg.align).image;
  });
  std::printf("align_visual 512 (kappa %d -> %d): median %.3f ms per frame (target < 5 ms)\n",
              cfg.align.kappa, cfg.align.output_size, align_ms);
  return sink.width() > 0 ? 0 : 1;
}
