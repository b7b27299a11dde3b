#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "texturecrop/image.h"
#include "texturecrop/manifest.h"

namespace texturecrop::testing {

PixelImage constant_image(int w, int h, float v, int channels = 1);
// Per-pixel uniform noise in [lo, hi].
PixelImage noise_image(int w, int h, std::mt19937& rng, float lo = 0.0f,
                       float hi = 1.0f, int channels = 1);
// 0/1 checkerboard with 1-pixel cells.
PixelImage checkerboard(int w, int h);
// Left half constant `flat`, right half uniform noise in [0,1].
PixelImage half_flat_half_noise(int w, int h, std::mt19937& rng, float flat = 0.5f);
// Random values quantized to 8-bit codes (exactly representable after a
// PNG round trip).
PixelImage random_8bit_image(int w, int h, int channels, std::mt19937& rng);

// Labeled images for end-to-end runs. Fakes carry noise-textured patches on
// a smooth background; reals are smooth gradients with random amplitude.
PixelImage synthetic_fake(int side, std::mt19937& rng);
PixelImage synthetic_real(int side, std::mt19937& rng);

struct Corpus {
  std::filesystem::path dir;
  std::filesystem::path manifest;
  std::vector<DatasetEntry> entries;
};

// Writes `n_fake` + `n_real` grayscale PNGs and a manifest.csv into `dir`.
// Fakes are split round-robin across `fake_subsets`; reals go to
// `real_subset`.
Corpus write_corpus(const std::filesystem::path& dir, int n_fake, int n_real,
                    int side, unsigned seed,
                    const std::vector<std::string>& fake_subsets = {"synthetic"},
                    const std::string& real_subset = "real-pool");

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace texturecrop::testing
