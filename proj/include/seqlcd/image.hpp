#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>

#include "seqlcd/descriptor.hpp"

namespace seqlcd {

/// 8-bit grayscale image, rows = height.
using GrayImage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PixelDescriptorConfig {
  int target_width = 64;
  int target_height = 32;
  int patch_size = 8;

  void validate() const;
};

/// Area-average resampling to `width` x `height`. Each output pixel is the
/// exact overlap-weighted mean of the source pixels under its footprint.
Eigen::MatrixXd area_resize(const GrayImage& image, int width, int height);

/// Down-samples, min-max rescales every patch to [0, 255] (constant patches
/// become zero), flattens row-major and normalizes to unit length.
Descriptor pixel_descriptor(const GrayImage& image, const PixelDescriptorConfig& config = {});

/// Binary PGM (P5, maxval <= 255).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace seqlcd
