#include "faota/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include "faota/errors.hpp"

namespace faota {
namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  std::uint32_t u32(const char* what) {
    std::array<unsigned char, 4> b{};
    read(b.data(), b.size(), what);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
  }

  void read(unsigned char* dst, std::size_t n, const char* what) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n) {
      throw ParseError(std::string("truncated IDX stream while reading ") + what, offset_ + got);
    }
    offset_ += n;
  }

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

}  // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.n_classes = n_classes;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.labels.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) throw DimensionError("subset index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(indices[i]));
    out.labels[i] = labels[indices[i]];
  }
  return out;
}

IdxImages read_idx_images(std::istream& in) {
  ByteReader r(in);
  const auto magic = r.u32("magic");
  if (magic != kImageMagic) {
    throw ParseError("bad IDX image magic " + std::to_string(magic) + " (expected 2051)", 0);
  }
  IdxImages img;
  img.count = r.u32("image count");
  img.rows = r.u32("row count");
  img.cols = r.u32("column count");
  if (img.rows == 0 || img.cols == 0) {
    throw ParseError("IDX image dimensions must be nonzero", r.offset() - 8);
  }
  img.pixels.resize(img.count * img.rows * img.cols);
  r.read(img.pixels.data(), img.pixels.size(), "pixel data");
  return img;
}

std::vector<unsigned char> read_idx_labels(std::istream& in) {
  ByteReader r(in);
  const auto magic = r.u32("magic");
  if (magic != kLabelMagic) {
    throw ParseError("bad IDX label magic " + std::to_string(magic) + " (expected 2049)", 0);
  }
  const auto count = r.u32("label count");
  std::vector<unsigned char> labels(count);
  r.read(labels.data(), labels.size(), "label data");
  return labels;
}

TrainTestSplit split_dataset(const Dataset& data, double train_fraction, RngStream& rng) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw DomainError("train fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(data.size())));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {data.subset(train), data.subset(test)};
}

TrainTestSplit ingest_mnist(const std::filesystem::path& images, const std::filesystem::path& labels,
                            double train_fraction, RngStream& rng) {
  std::ifstream img_in(images, std::ios::binary);
  if (!img_in) throw std::runtime_error("cannot open IDX image file " + images.string());
  std::ifstream lbl_in(labels, std::ios::binary);
  if (!lbl_in) throw std::runtime_error("cannot open IDX label file " + labels.string());

  const auto img = read_idx_images(img_in);
  const auto lbl = read_idx_labels(lbl_in);
  if (img.count != lbl.size()) {
    throw ValidationError("IDX image count " + std::to_string(img.count) +
                          " does not match label count " + std::to_string(lbl.size()));
  }
  if (img.count == 0) throw ValidationError("IDX files contain no samples");

  Dataset data;
  const auto dims = img.rows * img.cols;
  data.features.resize(static_cast<Eigen::Index>(img.count), static_cast<Eigen::Index>(dims));
  data.labels.resize(img.count);
  int max_label = 0;
  for (std::size_t i = 0; i < img.count; ++i) {
    for (std::size_t j = 0; j < dims; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(img.pixels[i * dims + j]) / 255.0;
    }
    data.labels[i] = lbl[i];
    max_label = std::max(max_label, static_cast<int>(lbl[i]));
  }
  data.n_classes = std::max(max_label + 1, 2);
  return split_dataset(data, train_fraction, rng);
}

Dataset synthesize_dataset(int classes, std::size_t dims, std::size_t samples, double separation,
                           RngStream& rng) {
  if (classes < 2) throw DomainError("synthetic dataset needs at least two classes");
  if (samples == 0) throw DomainError("synthetic dataset would be empty (samples = 0)");
  if (dims < static_cast<std::size_t>(classes)) {
    throw DomainError("synthetic dataset needs dims >= classes");
  }
  const double offset = separation / std::sqrt(2.0);
  Dataset data;
  data.n_classes = classes;
  data.features.resize(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(dims));
  data.labels.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    data.labels[i] = c;
    for (std::size_t j = 0; j < dims; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
    }
    data.features(static_cast<Eigen::Index>(i), c) += offset;
  }
  return data;
}

}  // namespace faota
