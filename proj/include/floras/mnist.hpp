#pragma once

// MNIST IDX ingestion: big-endian IDX parsing (gzip or raw), 28x28 -> 20x20
// centre crop, [0,1] scaling and seeded subsampling.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "floras/rng.hpp"

namespace floras::mnist {

inline constexpr std::size_t kSide = 20;
inline constexpr std::size_t kFeatures = kSide * kSide;
inline constexpr std::size_t kClasses = 10;

struct Dataset {
  std::vector<double> images;  // n x 400, row-major
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(images).subspan(i * kFeatures, kFeatures);
  }
};

struct RawImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;
};

// Whole file contents, transparently gunzipped. Throws IngestionError.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Parse IDX buffers. Magic 0x00000803 for images, 0x00000801 for labels.
// Errors name the byte offset of the offending field.
RawImages parse_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_labels(std::span<const std::uint8_t> bytes);

// Rows/cols 4..23 of a 28x28 image, scaled by 1/255.
void crop_and_scale(std::span<const std::uint8_t> image28, std::span<double> out400);

enum class Subsample { uniform, stratified };

// n examples without replacement. Stratified draws n/10 per class (n must be
// a multiple of 10 and every class must have enough examples).
Dataset build_dataset(const RawImages& images, std::span<const std::uint8_t> labels, std::size_t n,
                      Subsample mode, Rng& rng);

struct Split {
  Dataset train;
  Dataset test;
};

struct LoadOptions {
  std::size_t n_train = 4000;
  std::size_t n_test = 1000;
  Subsample mode = Subsample::uniform;
};

// Loads train-images-idx3-ubyte[.gz], train-labels-idx1-ubyte[.gz],
// t10k-images-idx3-ubyte[.gz] and t10k-labels-idx1-ubyte[.gz] from `dir`.
Split load_mnist(const std::filesystem::path& dir, const LoadOptions& opts, Rng& rng);

// Explicit file paths variant.
Split load_mnist(const std::filesystem::path& train_images, const std::filesystem::path& train_labels,
                 const std::filesystem::path& test_images, const std::filesystem::path& test_labels,
                 const LoadOptions& opts, Rng& rng);

}  // namespace floras::mnist
