#include "floras/mnist.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "floras/error.hpp"

namespace floras::mnist {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
  if (offset + 4 > bytes.size()) {
    throw IngestionError(std::string("IDX truncated reading ") + what + " at offset " +
                         std::to_string(offset) + " (file has " + std::to_string(bytes.size()) +
                         " bytes)");
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::string hex32(std::uint32_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s = "0x";
  for (int shift = 28; shift >= 0; shift -= 4) s += digits[(v >> shift) & 0xf];
  return s;
}

void check_magic(std::span<const std::uint8_t> bytes, std::uint32_t expected) {
  const std::uint32_t magic = read_be32(bytes, 0, "magic number");
  if (magic != expected) {
    throw IngestionError("IDX magic mismatch at offset 0: expected " + hex32(expected) + ", found " +
                         hex32(magic));
  }
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IngestionError("missing file: " + path.string());
  // gzread passes uncompressed files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw IngestionError("cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> buf{};
  for (;;) {
    const int n = gzread(f, buf.data(), static_cast<unsigned>(buf.size()));
    if (n < 0) {
      int code = 0;
      const std::string msg = gzerror(f, &code);
      gzclose(f);
      throw IngestionError("corrupt stream in " + path.string() + " after " +
                           std::to_string(out.size()) + " bytes: " + msg);
    }
    if (n == 0) break;
    out.insert(out.end(), buf.begin(), buf.begin() + n);
  }
  gzclose(f);
  return out;
}

RawImages parse_images(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kImageMagic);
  RawImages r;
  r.count = read_be32(bytes, 4, "image count");
  r.rows = read_be32(bytes, 8, "row count");
  r.cols = read_be32(bytes, 12, "column count");
  if (r.rows != 28 || r.cols != 28) {
    throw IngestionError("expected 28x28 images, header at offset 8 says " + std::to_string(r.rows) +
                         "x" + std::to_string(r.cols));
  }
  const std::size_t need = 16 + r.count * r.rows * r.cols;
  if (bytes.size() < need) {
    throw IngestionError("IDX image payload truncated: header at offset 4 declares " +
                         std::to_string(r.count) + " images (" + std::to_string(need) +
                         " bytes), file has " + std::to_string(bytes.size()));
  }
  r.pixels.assign(bytes.begin() + 16, bytes.begin() + static_cast<std::ptrdiff_t>(need));
  return r;
}

std::vector<std::uint8_t> parse_labels(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kLabelMagic);
  const std::size_t count = read_be32(bytes, 4, "label count");
  if (bytes.size() < 8 + count) {
    throw IngestionError("IDX label payload truncated: header at offset 4 declares " +
                         std::to_string(count) + " labels, file has " +
                         std::to_string(bytes.size() - 8) + " after the header");
  }
  std::vector<std::uint8_t> labels(bytes.begin() + 8,
                                   bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kClasses) {
      throw IngestionError("label " + std::to_string(labels[i]) + " out of range at offset " +
                           std::to_string(8 + i));
    }
  }
  return labels;
}

void crop_and_scale(std::span<const std::uint8_t> image28, std::span<double> out400) {
  if (image28.size() != 28 * 28 || out400.size() != kFeatures) {
    throw ArgumentError("crop expects a 784-pixel image and a 400-entry output");
  }
  constexpr std::size_t border = 4;
  for (std::size_t r = 0; r < kSide; ++r) {
    for (std::size_t c = 0; c < kSide; ++c) {
      out400[r * kSide + c] = image28[(r + border) * 28 + (c + border)] / 255.0;
    }
  }
}

Dataset build_dataset(const RawImages& images, std::span<const std::uint8_t> labels, std::size_t n,
                      Subsample mode, Rng& rng) {
  if (labels.size() != images.count) {
    throw IngestionError("image file holds " + std::to_string(images.count) +
                         " images but label file holds " + std::to_string(labels.size()));
  }
  if (n > images.count) {
    throw IngestionError("requested " + std::to_string(n) + " examples, only " +
                         std::to_string(images.count) + " available");
  }
  std::vector<std::size_t> picked;
  if (mode == Subsample::uniform) {
    std::vector<std::size_t> idx(images.count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    picked.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    if (n % kClasses != 0) throw ConfigError("stratified subsampling needs n divisible by 10");
    std::array<std::vector<std::size_t>, kClasses> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (auto& cls : by_class) {
      if (cls.size() < n / kClasses) {
        throw IngestionError("not enough examples of one class for stratified subsampling");
      }
      std::shuffle(cls.begin(), cls.end(), rng);
      picked.insert(picked.end(), cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(n / kClasses));
    }
    std::shuffle(picked.begin(), picked.end(), rng);
  }

  Dataset d;
  d.images.resize(n * kFeatures);
  d.labels.resize(n);
  const std::size_t pix = images.rows * images.cols;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = picked[i];
    crop_and_scale(std::span<const std::uint8_t>(images.pixels).subspan(src * pix, pix),
                   std::span<double>(d.images).subspan(i * kFeatures, kFeatures));
    d.labels[i] = labels[src];
  }
  return d;
}

namespace {

std::filesystem::path locate(const std::filesystem::path& dir, const std::string& stem) {
  for (const auto& candidate : {dir / (stem + ".gz"), dir / stem}) {
    if (std::filesystem::exists(candidate)) return candidate;
  }
  throw IngestionError("missing " + stem + "[.gz] in " + dir.string());
}

}  // namespace

Split load_mnist(const std::filesystem::path& train_images, const std::filesystem::path& train_labels,
                 const std::filesystem::path& test_images, const std::filesystem::path& test_labels,
                 const LoadOptions& opts, Rng& rng) {
  const auto tr_img = parse_images(read_file(train_images));
  const auto tr_lab = parse_labels(read_file(train_labels));
  const auto te_img = parse_images(read_file(test_images));
  const auto te_lab = parse_labels(read_file(test_labels));
  Split s;
  s.train = build_dataset(tr_img, tr_lab, opts.n_train, opts.mode, rng);
  s.test = build_dataset(te_img, te_lab, opts.n_test, opts.mode, rng);
  return s;
}

Split load_mnist(const std::filesystem::path& dir, const LoadOptions& opts, Rng& rng) {
  return load_mnist(locate(dir, "train-images-idx3-ubyte"), locate(dir, "train-labels-idx1-ubyte"),
                    locate(dir, "t10k-images-idx3-ubyte"), locate(dir, "t10k-labels-idx1-ubyte"),
                    opts, rng);
}

}  // namespace floras::mnist
