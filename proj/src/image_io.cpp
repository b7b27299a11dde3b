#include "texturecrop/image_io.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "texturecrop/error.h"

namespace texturecrop {

namespace {

template <typename Sample>
PixelImage from_mat(const cv::Mat& mat, double full_scale) {
  const int src_channels = mat.channels();
  // OpenCV stores colour as BGR(A); gray(+alpha) keeps luma in channel 0.
  const int channels = src_channels >= 3 ? 3 : 1;
  std::vector<float> data(static_cast<std::size_t>(mat.cols) * mat.rows *
                          channels);
  std::size_t k = 0;
  for (int y = 0; y < mat.rows; ++y) {
    const Sample* row = mat.ptr<Sample>(y);
    for (int x = 0; x < mat.cols; ++x) {
      const Sample* px = row + static_cast<std::size_t>(x) * src_channels;
      if (channels == 3) {
        data[k++] = static_cast<float>(px[2] / full_scale);
        data[k++] = static_cast<float>(px[1] / full_scale);
        data[k++] = static_cast<float>(px[0] / full_scale);
      } else {
        data[k++] = static_cast<float>(px[0] / full_scale);
      }
    }
  }
  return PixelImage(mat.cols, mat.rows, channels, std::move(data));
}

}  // namespace

PixelImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw DecodeError("empty image payload");
  cv::Mat mat;
  try {
    const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1,
                      const_cast<std::uint8_t*>(bytes.data()));
    mat = cv::imdecode(buf, cv::IMREAD_UNCHANGED | cv::IMREAD_IGNORE_ORIENTATION);
  } catch (const cv::Exception& e) {
    throw DecodeError(std::string("image decode failed: ") + e.what());
  }
  if (mat.empty()) throw DecodeError("unrecognized or corrupt image payload");
  if (mat.dims != 2 || mat.channels() > 4) {
    throw DecodeError("unsupported image layout");
  }
  switch (mat.depth()) {
    case CV_8U:
      return from_mat<std::uint8_t>(mat, 255.0);
    case CV_16U:
      return from_mat<std::uint16_t>(mat, 65535.0);
    default:
      throw DecodeError("unsupported sample depth (only 8/16-bit unsigned)");
  }
}

PixelImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const PixelImage& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw InvalidArgument("PNG bit depth must be 8 or 16");
  }
  const int channels = img.channels();
  const double full_scale = bit_depth == 8 ? 255.0 : 65535.0;
  const int type = CV_MAKETYPE(bit_depth == 8 ? CV_8U : CV_16U, channels);
  cv::Mat mat(img.height(), img.width(), type);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < channels; ++c) {
        // Write back in OpenCV's BGR order.
        const int dst_c = channels == 3 ? 2 - c : c;
        const double v = std::round(img.at(x, y, c) * full_scale);
        if (bit_depth == 8) {
          mat.ptr<std::uint8_t>(y)[x * channels + dst_c] =
              static_cast<std::uint8_t>(v);
        } else {
          mat.ptr<std::uint16_t>(y)[x * channels + dst_c] =
              static_cast<std::uint16_t>(v);
        }
      }
    }
  }
  std::vector<std::uint8_t> out;
  try {
    if (!cv::imencode(".png", mat, out)) throw EncodeError("PNG encoding failed");
  } catch (const cv::Exception& e) {
    throw EncodeError(std::string("PNG encoding failed: ") + e.what());
  }
  return out;
}

void write_png(const std::filesystem::path& path, const PixelImage& img,
               int bit_depth) {
  const auto bytes = encode_png(img, bit_depth);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw EncodeError("cannot write " + path.string());
}

}  // namespace texturecrop
