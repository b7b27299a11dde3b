#include "texturecrop/image.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "texturecrop/error.h"

namespace texturecrop {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive, got " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

}  // namespace

PixelImage::PixelImage(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw UnsupportedChannels("channels must be 1 or 3, got " +
                              std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
}

PixelImage::PixelImage(int width, int height, int channels,
                       std::vector<float> data)
    : PixelImage(width, height, channels) {
  if (data.size() != data_.size()) {
    throw InvalidArgument("pixel buffer has " + std::to_string(data.size()) +
                          " samples, expected " +
                          std::to_string(data_.size()));
  }
  for (float v : data) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw InvalidArgument("pixel intensity outside [0,1]");
    }
  }
  data_ = std::move(data);
}

GrayImage::GrayImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("gray buffer length does not match dimensions");
  }
}

GrayView GrayImage::view() const {
  return GrayView(data_.data(), width_, height_, width_);
}

GrayView GrayImage::view(const Rect& r) const {
  if (!r.fits_within(width_, height_)) {
    throw OutOfBounds("view rect exceeds gray image bounds");
  }
  return GrayView(data_.data() + static_cast<std::size_t>(r.y) * width_ + r.x,
                  r.w, r.h, width_);
}

GrayImage to_grayscale(const PixelImage& img) {
  if (img.channels() == 1) {
    auto src = img.data();
    return GrayImage(img.width(), img.height(),
                     std::vector<float>(src.begin(), src.end()));
  }
  if (img.channels() != 3) {
    throw UnsupportedChannels("grayscale conversion needs 1 or 3 channels");
  }
  const auto src = img.data();
  std::vector<float> out(static_cast<std::size_t>(img.width()) * img.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = src[3 * i];
    const double g = src[3 * i + 1];
    const double b = src[3 * i + 2];
    const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
    out[i] = static_cast<float>(std::clamp(luma, 0.0, 1.0));
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

Rect center_rect(int width, int height, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1) {
    throw InvalidArgument("center crop target must be positive");
  }
  const int w = std::min(target_w, width);
  const int h = std::min(target_h, height);
  return Rect{(width - w) / 2, (height - h) / 2, w, h};
}

PixelImage center_crop(const PixelImage& img, int target_w, int target_h) {
  return crop(img, center_rect(img.width(), img.height(), target_w, target_h));
}

PixelImage resize(const PixelImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw InvalidArgument("resize target must be positive");
  }
  if (out_w == img.width() && out_h == img.height()) return img;

  const int channels = img.channels();
  const double sx = static_cast<double>(img.width()) / out_w;
  const double sy = static_cast<double>(img.height()) / out_h;

  // Per-column source taps are shared by every output row.
  struct Tap {
    int i0, i1;
    double frac;
  };
  auto taps = [](int out, double scale, int extent) {
    std::vector<Tap> t(out);
    for (int d = 0; d < out; ++d) {
      double s = (d + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(extent - 1));
      const int i0 = static_cast<int>(std::floor(s));
      const int i1 = std::min(i0 + 1, extent - 1);
      t[d] = Tap{i0, i1, s - i0};
    }
    return t;
  };
  const auto xt = taps(out_w, sx, img.width());
  const auto yt = taps(out_h, sy, img.height());

  PixelImage out(out_w, out_h, channels);
  for (int y = 0; y < out_h; ++y) {
    const Tap& ty = yt[y];
    for (int x = 0; x < out_w; ++x) {
      const Tap& tx = xt[x];
      for (int c = 0; c < channels; ++c) {
        const double top = img.at(tx.i0, ty.i0, c) * (1.0 - tx.frac) +
                           img.at(tx.i1, ty.i0, c) * tx.frac;
        const double bot = img.at(tx.i0, ty.i1, c) * (1.0 - tx.frac) +
                           img.at(tx.i1, ty.i1, c) * tx.frac;
        const double v = top * (1.0 - ty.frac) + bot * ty.frac;
        out.at(x, y, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

Rect oversize_rect(int width, int height, int max_side) {
  if (max_side < 1) throw InvalidArgument("max_side must be positive");
  return center_rect(width, height, max_side, max_side);
}

PixelImage clamp_oversize(const PixelImage& img, int max_side) {
  const Rect r = oversize_rect(img.width(), img.height(), max_side);
  if (r.w == img.width() && r.h == img.height()) return img;
  return crop(img, r);
}

PixelImage crop(const PixelImage& img, const Rect& r, bool flip) {
  if (!r.fits_within(img.width(), img.height())) {
    throw OutOfBounds("crop rect (" + std::to_string(r.x) + "," +
                      std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                      std::to_string(r.h) + ") exceeds " +
                      std::to_string(img.width()) + "x" +
                      std::to_string(img.height()));
  }
  const int channels = img.channels();
  PixelImage out(r.w, r.h, channels);
  const auto src = img.data();
  auto dst = out.mutable_data();
  const std::size_t row_len = static_cast<std::size_t>(r.w) * channels;
  for (int y = 0; y < r.h; ++y) {
    const float* s =
        src.data() +
        (static_cast<std::size_t>(r.y + y) * img.width() + r.x) * channels;
    float* d = dst.data() + y * row_len;
    if (!flip) {
      std::copy(s, s + row_len, d);
      continue;
    }
    for (int x = 0; x < r.w; ++x) {
      std::copy(s + static_cast<std::size_t>(r.w - 1 - x) * channels,
                s + static_cast<std::size_t>(r.w - x) * channels,
                d + static_cast<std::size_t>(x) * channels);
    }
  }
  return out;
}

}  // namespace texturecrop
