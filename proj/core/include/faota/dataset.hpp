#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <vector>

#include <Eigen/Dense>

#include "faota/rng.hpp"

namespace faota {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Labelled feature matrix, one sample per row.
struct Dataset {
  RowMatrix features;
  std::vector<int> labels;
  int n_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(features.cols()); }
  /// Rows at `indices`, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Raw IDX image file (magic 2051): count x rows x cols unsigned bytes.
struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<unsigned char> pixels;
};

/// Parses a big-endian IDX3 image stream. ParseError names the failing offset.
IdxImages read_idx_images(std::istream& in);
/// Parses a big-endian IDX1 label stream (magic 2049).
std::vector<unsigned char> read_idx_labels(std::istream& in);

/// Loads MNIST-style IDX files, scales pixels to [0, 1] and splits train/test with a
/// seeded shuffle. The train part holds round(train_fraction * n) samples.
TrainTestSplit ingest_mnist(const std::filesystem::path& images, const std::filesystem::path& labels,
                            double train_fraction, RngStream& rng);

/// Seeded shuffle-and-split used by ingest_mnist.
TrainTestSplit split_dataset(const Dataset& data, double train_fraction, RngStream& rng);

/// Gaussian blobs with unit covariance, one per class; class c is centred at
/// (separation / sqrt 2) * e_c so every pair of means is `separation` apart.
/// Requires dims >= classes >= 2 and samples >= 1.
Dataset synthesize_dataset(int classes, std::size_t dims, std::size_t samples, double separation,
                           RngStream& rng);

}  // namespace faota
