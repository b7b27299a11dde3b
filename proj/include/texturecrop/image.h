#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace texturecrop {

// Axis-aligned pixel rectangle, top-left anchored.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool fits_within(int width, int height) const {
    return x >= 0 && y >= 0 && w >= 1 && h >= 1 && right() <= width &&
           bottom() <= height;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Decoded raster, channels-last, row-major, intensities in [0,1].
class PixelImage {
 public:
  PixelImage() = default;
  // Zero-filled image. Throws InvalidArgument for non-positive dims or
  // channels outside {1,3}.
  PixelImage(int width, int height, int channels);
  // Takes ownership of `data`; validates length and range.
  PixelImage(int width, int height, int channels, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  float at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  friend bool operator==(const PixelImage&, const PixelImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

class GrayView;

// Single-channel luma raster in [0,1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const float> data() const { return data_; }
  float at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  GrayView view() const;
  GrayView view(const Rect& r) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// Non-owning window into a GrayImage. Texture metrics run on views so the
// sliding-window croppers never copy candidate pixels.
class GrayView {
 public:
  GrayView(const float* origin, int width, int height, std::ptrdiff_t stride)
      : origin_(origin), width_(width), height_(height), stride_(stride) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  const float* row(int y) const { return origin_ + y * stride_; }
  float at(int x, int y) const { return row(y)[x]; }

 private:
  const float* origin_;
  int width_;
  int height_;
  std::ptrdiff_t stride_;
};

// BT.601 luma for 3-channel input; identity copy for 1-channel input.
GrayImage to_grayscale(const PixelImage& img);

// Center region of at most target_w x target_h. Oversize targets clamp to
// the image extent; odd remainders floor the offset.
Rect center_rect(int width, int height, int target_w, int target_h);
PixelImage center_crop(const PixelImage& img, int target_w, int target_h);

// Bilinear resampling with half-pixel centers, edge-clamped sampling.
PixelImage resize(const PixelImage& img, int out_w, int out_h);

// Rect kept by clamp_oversize, in source coordinates.
Rect oversize_rect(int width, int height, int max_side = 2048);
// Per-axis center crop down to max_side; in-bounds images pass unchanged.
PixelImage clamp_oversize(const PixelImage& img, int max_side = 2048);

// Sub-image copy, optionally mirrored left-right. Throws OutOfBounds.
PixelImage crop(const PixelImage& img, const Rect& r, bool flip = false);

}  // namespace texturecrop
