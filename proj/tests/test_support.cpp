#include "test_support.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "texturecrop/image_io.h"

namespace texturecrop::testing {

namespace fs = std::filesystem;

PixelImage constant_image(int w, int h, float v, int channels) {
  PixelImage img(w, h, channels);
  auto d = img.mutable_data();
  std::fill(d.begin(), d.end(), v);
  return img;
}

PixelImage noise_image(int w, int h, std::mt19937& rng, float lo, float hi,
                       int channels) {
  std::uniform_real_distribution<float> u(lo, hi);
  PixelImage img(w, h, channels);
  for (float& v : img.mutable_data()) v = std::clamp(u(rng), 0.0f, 1.0f);
  return img;
}

PixelImage checkerboard(int w, int h) {
  PixelImage img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<float>((x + y) % 2);
  }
  return img;
}

PixelImage half_flat_half_noise(int w, int h, std::mt19937& rng, float flat) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  PixelImage img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = x < w / 2 ? flat : u(rng);
  }
  return img;
}

PixelImage random_8bit_image(int w, int h, int channels, std::mt19937& rng) {
  std::uniform_int_distribution<int> u(0, 255);
  PixelImage img(w, h, channels);
  for (float& v : img.mutable_data()) v = static_cast<float>(u(rng) / 255.0);
  return img;
}

namespace {

// Linear ramp with peak-to-peak range `amp` along a random direction.
void paint_gradient(PixelImage& img, double base, double amp, std::mt19937& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const double t = angle(rng);
  const double dx = std::cos(t), dy = std::sin(t);
  const double span = std::abs(dx) * (img.width() - 1) + std::abs(dy) * (img.height() - 1);
  const double x0 = dx < 0 ? img.width() - 1 : 0;
  const double y0 = dy < 0 ? img.height() - 1 : 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double p = ((x - x0) * dx + (y - y0) * dy) / span;
      img.at(x, y) = static_cast<float>(std::clamp(base + amp * p, 0.0, 1.0));
    }
  }
}

// Gradient amplitude whose per-224-window range stays well under the
// default 0.1 SD threshold.
double max_smooth_amp(int side) { return std::min(0.6, 0.26 * side / 224.0); }

}  // namespace

PixelImage synthetic_fake(int side, std::mt19937& rng) {
  PixelImage img(side, side, 1);
  std::uniform_real_distribution<double> amp(0.05, 0.3 * max_smooth_amp(side) / 0.6);
  std::uniform_real_distribution<double> base(0.2, 0.5);
  paint_gradient(img, base(rng), amp(rng), rng);

  const int patch = std::min(side, std::max(side * 5 / 16, 48));
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_int_distribution<int> pos(0, side - patch);
  std::uniform_real_distribution<float> noise(0.0f, 1.0f);
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const int px = pos(rng), py = pos(rng);
    for (int y = py; y < py + patch; ++y) {
      for (int x = px; x < px + patch; ++x) img.at(x, y) = noise(rng);
    }
  }
  return img;
}

PixelImage synthetic_real(int side, std::mt19937& rng) {
  PixelImage img(side, side, 1);
  std::uniform_real_distribution<double> amp(0.1, max_smooth_amp(side));
  std::uniform_real_distribution<double> base(0.1, 0.3);
  paint_gradient(img, base(rng), amp(rng), rng);
  return img;
}

Corpus write_corpus(const fs::path& dir, int n_fake, int n_real, int side,
                    unsigned seed, const std::vector<std::string>& fake_subsets,
                    const std::string& real_subset) {
  fs::create_directories(dir / "images");
  std::mt19937 rng(seed);
  Corpus corpus;
  corpus.dir = dir;
  corpus.manifest = dir / "manifest.csv";
  for (int i = 0; i < n_fake; ++i) {
    const std::string rel = "images/fake_" + std::to_string(i) + ".png";
    write_png(dir / rel, synthetic_fake(side, rng));
    const std::string& subset = fake_subsets[i % fake_subsets.size()];
    corpus.entries.push_back({rel, 1, subset, image_id_from_path(rel)});
  }
  for (int i = 0; i < n_real; ++i) {
    const std::string rel = "images/real_" + std::to_string(i) + ".png";
    write_png(dir / rel, synthetic_real(side, rng));
    corpus.entries.push_back({rel, 0, real_subset, image_id_from_path(rel)});
  }
  std::ofstream out(corpus.manifest);
  write_dataset_csv(out, corpus.entries);
  return corpus;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("texturecrop_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace texturecrop::testing
