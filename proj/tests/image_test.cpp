#include <gtest/gtest.h>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <random>

#include "test_support.h"
#include "texturecrop/error.h"
#include "texturecrop/image.h"
#include "texturecrop/image_io.h"

namespace texturecrop {
namespace {

using testing::constant_image;

// Encodes through OpenCV directly so decode tests do not depend on
// encode_png.
std::vector<std::uint8_t> cv_encode(const cv::Mat& m, const std::string& ext) {
  std::vector<std::uint8_t> buf;
  EXPECT_TRUE(cv::imencode(ext, m, buf));
  return buf;
}

std::vector<std::uint8_t> rgb_pixel_png(int r, int g, int b) {
  cv::Mat m(1, 1, CV_8UC3, cv::Scalar(b, g, r));  // OpenCV is BGR
  return cv_encode(m, ".png");
}

TEST(DecodeImage, WhitePixelMapsToOne) {
  const auto img = decode_image(rgb_pixel_png(255, 255, 255));
  ASSERT_EQ(img.channels(), 3);
  EXPECT_EQ(std::vector<float>(img.data().begin(), img.data().end()),
            (std::vector<float>{1.0f, 1.0f, 1.0f}));
}

TEST(DecodeImage, BlackPixelMapsToZero) {
  const auto img = decode_image(rgb_pixel_png(0, 0, 0));
  EXPECT_EQ(std::vector<float>(img.data().begin(), img.data().end()),
            (std::vector<float>{0.0f, 0.0f, 0.0f}));
}

TEST(DecodeImage, DividesEightBitSamplesBy255InRgbOrder) {
  const auto img = decode_image(rgb_pixel_png(128, 64, 32));
  EXPECT_FLOAT_EQ(img.at(0, 0, 0), 128.0f / 255.0f);
  EXPECT_FLOAT_EQ(img.at(0, 0, 1), 64.0f / 255.0f);
  EXPECT_FLOAT_EQ(img.at(0, 0, 2), 32.0f / 255.0f);
}

TEST(DecodeImage, SixteenBitDividesBy65535) {
  cv::Mat m(1, 2, CV_16UC1);
  m.at<std::uint16_t>(0, 0) = 65535;
  m.at<std::uint16_t>(0, 1) = 1000;
  const auto img = decode_image(cv_encode(m, ".png"));
  ASSERT_EQ(img.channels(), 1);
  EXPECT_FLOAT_EQ(img.at(0, 0), 1.0f);
  EXPECT_FLOAT_EQ(img.at(1, 0), static_cast<float>(1000.0 / 65535.0));
}

TEST(DecodeImage, DropsAlpha) {
  cv::Mat m(1, 1, CV_8UC4, cv::Scalar(10, 20, 30, 77));
  const auto img = decode_image(cv_encode(m, ".png"));
  ASSERT_EQ(img.channels(), 3);
  EXPECT_FLOAT_EQ(img.at(0, 0, 0), 30.0f / 255.0f);
  EXPECT_FLOAT_EQ(img.at(0, 0, 2), 10.0f / 255.0f);
}

TEST(DecodeImage, ReadsTiffAndJpeg) {
  cv::Mat m(8, 8, CV_8UC3, cv::Scalar(40, 80, 120));
  const auto tif = decode_image(cv_encode(m, ".tiff"));
  EXPECT_EQ(tif.width(), 8);
  EXPECT_FLOAT_EQ(tif.at(3, 3, 0), 120.0f / 255.0f);
  const auto jpg = decode_image(cv_encode(m, ".jpg"));
  EXPECT_EQ(jpg.height(), 8);
  EXPECT_NEAR(jpg.at(3, 3, 0), 120.0 / 255.0, 3.0 / 255.0);
}

TEST(DecodeImage, RejectsCorruptPayload) {
  const std::vector<std::uint8_t> junk = {0x89, 'P', 'N', 'G', 1, 2, 3};
  EXPECT_THROW(decode_image(junk), DecodeError);
  EXPECT_THROW(decode_image(std::vector<std::uint8_t>{}), DecodeError);
  EXPECT_THROW(read_image("/nonexistent/file.png"), DecodeError);
}

TEST(DecodeImage, LosslessRoundTripPreservesData) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int channels = trial % 2 == 0 ? 1 : 3;
    const auto img = testing::random_8bit_image(1 + trial * 3, 2 + trial, channels, rng);
    EXPECT_EQ(decode_image(encode_png(img)), img);
  }
  // 16-bit keeps 16-bit codes exactly.
  PixelImage img(3, 1, 1, {0.0f, static_cast<float>(12345 / 65535.0), 1.0f});
  EXPECT_EQ(decode_image(encode_png(img, 16)), img);
}

TEST(PixelImage, ValidatesConstruction) {
  EXPECT_THROW(PixelImage(0, 3, 1), InvalidArgument);
  EXPECT_THROW(PixelImage(2, 2, 2), UnsupportedChannels);
  EXPECT_THROW(PixelImage(1, 1, 1, {1.5f}), InvalidArgument);
  EXPECT_THROW(PixelImage(1, 1, 1, {0.1f, 0.2f}), InvalidArgument);
}

TEST(ToGrayscale, RedPixelUsesBt601Weight) {
  const PixelImage img(1, 1, 3, {1.0f, 0.0f, 0.0f});
  EXPECT_NEAR(to_grayscale(img).at(0, 0), 0.299, 1e-7);
}

TEST(ToGrayscale, NeutralPixelsKeepTheirValue) {
  for (int code = 0; code <= 255; ++code) {
    const float g = static_cast<float>(code / 255.0);
    const PixelImage img(1, 1, 3, {g, g, g});
    EXPECT_EQ(to_grayscale(img).at(0, 0), g) << code;
  }
}

TEST(ToGrayscale, SingleChannelIsIdentity) {
  std::mt19937 rng(1);
  const auto img = testing::noise_image(5, 4, rng);
  const auto gray = to_grayscale(img);
  EXPECT_TRUE(std::equal(gray.data().begin(), gray.data().end(), img.data().begin()));
}

TEST(ToGrayscale, OutputStaysInUnitRange) {
  std::mt19937 rng(2);
  const auto img = testing::noise_image(32, 32, rng, 0.0f, 1.0f, 3);
  const auto gray = to_grayscale(img);
  for (float v : gray.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

PixelImage ramp(int w, int h) {
  PixelImage img(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<float>((y * w + x) / 100.0);
  return img;
}

TEST(CenterCrop, SymmetricCenter) {
  EXPECT_EQ(center_rect(4, 4, 2, 2), (Rect{1, 1, 2, 2}));
  const auto c = center_crop(ramp(4, 4), 2, 2);
  EXPECT_EQ(c, crop(ramp(4, 4), Rect{1, 1, 2, 2}));
}

TEST(CenterCrop, OddRemainderFloorsOffset) {
  EXPECT_EQ(center_rect(5, 5, 2, 2), (Rect{1, 1, 2, 2}));
}

TEST(CenterCrop, OversizeTargetClampsToImage) {
  const auto img = ramp(3, 3);
  EXPECT_EQ(center_crop(img, 10, 10), img);
  EXPECT_EQ(center_rect(3, 7, 10, 2), (Rect{0, 2, 3, 2}));
  EXPECT_THROW(center_rect(3, 3, 0, 1), InvalidArgument);
}

TEST(CenterCrop, IsIdempotent) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> dim(1, 40);
  for (int i = 0; i < 100; ++i) {
    const auto img = testing::noise_image(dim(rng), dim(rng), rng);
    const int tw = dim(rng), th = dim(rng);
    const auto once = center_crop(img, tw, th);
    EXPECT_EQ(center_crop(once, tw, th), once);
  }
}

TEST(Resize, SameSizeIsIdentity) {
  std::mt19937 rng(4);
  const auto img = testing::noise_image(7, 5, rng, 0.0f, 1.0f, 3);
  EXPECT_EQ(resize(img, 7, 5), img);
}

TEST(Resize, BilinearMidpoint) {
  const PixelImage img(2, 1, 1, {0.0f, 1.0f});
  EXPECT_FLOAT_EQ(resize(img, 1, 1).at(0, 0), 0.5f);
}

TEST(Resize, ConstantStaysConstant) {
  const auto img = constant_image(9, 6, 0.375f, 3);
  for (auto [w, h] : {std::pair{1, 1}, {4, 3}, {20, 31}}) {
    const auto out = resize(img, w, h);
    for (float v : out.data()) EXPECT_FLOAT_EQ(v, 0.375f);
  }
}

TEST(Resize, UpsampleInterpolatesBetweenNeighbours) {
  const PixelImage img(2, 1, 1, {0.0f, 1.0f});
  const auto out = resize(img, 4, 1);
  // Sample centres map to -0.25, 0.25, 0.75, 1.25 in source space.
  EXPECT_FLOAT_EQ(out.at(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(out.at(1, 0), 0.25f);
  EXPECT_FLOAT_EQ(out.at(2, 0), 0.75f);
  EXPECT_FLOAT_EQ(out.at(3, 0), 1.0f);
}

TEST(ClampOversize, SquareInputLimitedTo2048) {
  EXPECT_EQ(oversize_rect(3000, 3000), (Rect{476, 476, 2048, 2048}));
}

TEST(ClampOversize, ClampsEachAxisIndependently) {
  EXPECT_EQ(oversize_rect(3000, 1500), (Rect{476, 0, 2048, 1500}));
}

TEST(ClampOversize, InBoundsPassesThrough) {
  EXPECT_EQ(oversize_rect(1024, 1024), (Rect{0, 0, 1024, 1024}));
  const auto img = constant_image(30, 20, 0.5f);
  EXPECT_EQ(clamp_oversize(img, 64), img);
}

TEST(ClampOversize, NeverGrowsAndIsIdempotent) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> dim(1, 60);
  for (int i = 0; i < 100; ++i) {
    const auto img = testing::noise_image(dim(rng), dim(rng), rng);
    const int max_side = dim(rng);
    const auto once = clamp_oversize(img, max_side);
    EXPECT_LE(once.width(), img.width());
    EXPECT_LE(once.height(), img.height());
    EXPECT_EQ(once.width(), std::min(img.width(), max_side));
    EXPECT_EQ(clamp_oversize(once, max_side), once);
  }
}

TEST(Crop, FullRectIsWholeImage) {
  const auto img = ramp(4, 3);
  EXPECT_EQ(crop(img, Rect{0, 0, 4, 3}), img);
}

TEST(Crop, InteriorOfRamp) {
  const auto c = crop(ramp(4, 4), Rect{1, 1, 2, 2});
  EXPECT_FLOAT_EQ(c.at(0, 0), 0.05f);
  EXPECT_FLOAT_EQ(c.at(1, 0), 0.06f);
  EXPECT_FLOAT_EQ(c.at(0, 1), 0.09f);
  EXPECT_FLOAT_EQ(c.at(1, 1), 0.10f);
}

TEST(Crop, FlipReversesColumns) {
  std::mt19937 rng(6);
  const auto img = testing::noise_image(5, 3, rng, 0.0f, 1.0f, 3);
  const auto f = crop(img, Rect{0, 0, 5, 3}, true);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x)
      for (int c = 0; c < 3; ++c) EXPECT_EQ(f.at(x, y, c), img.at(4 - x, y, c));
}

TEST(Crop, OutOfBoundsThrows) {
  const auto img = ramp(4, 4);
  EXPECT_THROW(crop(img, Rect{3, 0, 2, 1}), OutOfBounds);
  EXPECT_THROW(crop(img, Rect{-1, 0, 1, 1}), OutOfBounds);
}

}  // namespace
}  // namespace texturecrop
