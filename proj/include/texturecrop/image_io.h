#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "texturecrop/image.h"

namespace texturecrop {

// Decodes PNG, JPEG or TIFF bytes. 8-bit samples are divided by 255 and
// 16-bit samples by 65535; alpha is dropped and gray+alpha becomes gray.
// Throws DecodeError on corrupt or unsupported payloads.
PixelImage decode_image(std::span<const std::uint8_t> bytes);
PixelImage read_image(const std::filesystem::path& path);

// Lossless PNG encoding at 8 or 16 bits per sample.
std::vector<std::uint8_t> encode_png(const PixelImage& img, int bit_depth = 8);
void write_png(const std::filesystem::path& path, const PixelImage& img,
               int bit_depth = 8);

}  // namespace texturecrop
