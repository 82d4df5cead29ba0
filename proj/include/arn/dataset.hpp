#ifndef ARN_DATASET_HPP
#define ARN_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace arn {

// Grayscale image with pixels normalized into [0, 1].
struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;  // row-major

    double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
    double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }

    bool operator==(const Image&) const = default;
};

struct LabeledImageSet {
    std::vector<Image> images;
    std::vector<int> labels;
    std::string image_source;
    std::string label_source;

    std::size_t size() const { return images.size(); }
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;  // 2051
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;  // 2049

// Parses a pair of IDX byte buffers (big-endian magic + dims, row-major
// unsigned bytes). Throws ParseError on bad magic, truncation, or a count
// mismatch between the two files.
LabeledImageSet parse_idx(const std::vector<unsigned char>& image_bytes,
                          const std::vector<unsigned char>& label_bytes);

// Reads a file fully; gzip-compressed files are inflated transparently.
std::vector<unsigned char> read_file_maybe_gz(const std::string& path);

// parse_idx over two files on disk.
LabeledImageSet load_idx_files(const std::string& image_path,
                               const std::string& label_path);

// Uniform sample without replacement of n_per_class images from every class,
// drawn with a seeded mt19937 (partial Fisher-Yates with rejection-sampled
// bounded draws, so the selection is identical on every platform). Output
// order interleaves classes round-robin: 0,1,...,9,0,1,...
LabeledImageSet sample_per_class(const LabeledImageSet& set,
                                 std::size_t n_per_class,
                                 std::uint64_t seed);

}  // namespace arn

#endif
