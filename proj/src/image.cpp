#include "seqlcd/image.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "csv.hpp"

namespace seqlcd {

void PixelDescriptorConfig::validate() const {
  if (target_width < 1 || target_height < 1 || patch_size < 1)
    throw Error(Errc::BadConfig, "pixel descriptor sizes must be positive");
  if (target_width % patch_size != 0 || target_height % patch_size != 0)
    throw Error(Errc::BadConfig, "target size must be divisible by the patch size");
}

namespace {

// Integer overlap weights in units of 1/(src*dst): output cell t covers
// [t*src, (t+1)*src) and source cell s covers [s*dst, (s+1)*dst). Each row sums to src*dst/dst = src.
Eigen::MatrixXd overlap_weights(Eigen::Index src, Eigen::Index dst) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dst, src);
  for (Eigen::Index t = 0; t < dst; ++t) {
    const Eigen::Index lo = t * src;
    const Eigen::Index hi = (t + 1) * src;
    for (Eigen::Index s = lo / dst; s < src && s * dst < hi; ++s) {
      const Eigen::Index overlap = std::min(hi, (s + 1) * dst) - std::max(lo, s * dst);
      if (overlap > 0) w(t, s) = static_cast<double>(overlap);
    }
  }
  return w;
}

}  // namespace

Eigen::MatrixXd area_resize(const GrayImage& image, int width, int height) {
  if (image.rows() == 0 || image.cols() == 0) throw Error(Errc::EmptyImage, "zero-sized image");
  if (width < 1 || height < 1) throw Error(Errc::BadConfig, "target size must be positive");
  const Eigen::MatrixXd src = image.cast<double>();
  const Eigen::MatrixXd wy = overlap_weights(image.rows(), height);
  const Eigen::MatrixXd wx = overlap_weights(image.cols(), width);
  const double scale = static_cast<double>(image.rows()) * static_cast<double>(image.cols());
  return (wy * src * wx.transpose()) / scale;
}

Descriptor pixel_descriptor(const GrayImage& image, const PixelDescriptorConfig& config) {
  config.validate();
  Eigen::MatrixXd small = area_resize(image, config.target_width, config.target_height);
  const int p = config.patch_size;
  for (Eigen::Index by = 0; by < small.rows(); by += p) {
    for (Eigen::Index bx = 0; bx < small.cols(); bx += p) {
      auto patch = small.block(by, bx, p, p);
      const double lo = patch.minCoeff();
      const double hi = patch.maxCoeff();
      if (hi > lo)
        patch = (patch.array() - lo) * (255.0 / (hi - lo));
      else
        patch.setZero();
    }
  }
  Eigen::VectorXd flat(small.size());
  for (Eigen::Index r = 0; r < small.rows(); ++r)
    for (Eigen::Index c = 0; c < small.cols(); ++c) flat[r * small.cols() + c] = small(r, c);
  return normalize(flat);
}

namespace {

std::string next_token(std::istream& in) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(ch));
    }
    ch = in.get();
  }
  return token;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file_bytes(path));
  if (next_token(in) != "P5") throw Error(Errc::BadFormat, path.string() + " is not a binary PGM (P5)");
  long long width = 0, height = 0, maxval = 0;
  try {
    width = detail::parse_int(next_token(in));
    height = detail::parse_int(next_token(in));
    maxval = detail::parse_int(next_token(in));
  } catch (const Error&) {
    throw Error(Errc::BadFormat, "malformed PGM header in " + path.string());
  }
  if (width == 0 || height == 0) throw Error(Errc::EmptyImage, path.string());
  if (width < 0 || height < 0 || maxval < 1 || maxval > 255)
    throw Error(Errc::BadFormat, "unsupported PGM header in " + path.string());
  GrayImage image(height, width);
  in.read(reinterpret_cast<char*>(image.data()), static_cast<std::streamsize>(image.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.size()))
    throw Error(Errc::TruncatedFile, "PGM pixel data short in " + path.string());
  return image;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

}  // namespace seqlcd
