#include "arn/dataset.hpp"

#include <zlib.h>

#include <array>
#include <random>

#include "arn/errors.hpp"

namespace arn {

namespace {

std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t off) {
    if (off + 4 > b.size()) throw ParseError("truncated IDX header");
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

// Uniform integer in [0, n) from raw 32-bit draws, by rejection. Avoids
// std::uniform_int_distribution, whose mapping differs across standard
// library implementations.
std::uint32_t bounded(std::mt19937& rng, std::uint32_t n) {
    const std::uint64_t span = 0x100000000ull;
    const std::uint64_t limit = span - span % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r < limit) return static_cast<std::uint32_t>(r % n);
    }
}

}  // namespace

LabeledImageSet parse_idx(const std::vector<unsigned char>& image_bytes,
                          const std::vector<unsigned char>& label_bytes) {
    const std::uint32_t img_magic = read_be32(image_bytes, 0);
    if (img_magic != kIdxImageMagic) {
        throw ParseError("bad image magic: expected 2051, got " +
                         std::to_string(img_magic));
    }
    const std::uint32_t lab_magic = read_be32(label_bytes, 0);
    if (lab_magic != kIdxLabelMagic) {
        throw ParseError("bad label magic: expected 2049, got " +
                         std::to_string(lab_magic));
    }
    const std::uint32_t n_images = read_be32(image_bytes, 4);
    const std::uint32_t rows = read_be32(image_bytes, 8);
    const std::uint32_t cols = read_be32(image_bytes, 12);
    const std::uint32_t n_labels = read_be32(label_bytes, 4);
    if (n_images != n_labels) {
        throw ParseError("image/label count mismatch: " + std::to_string(n_images) +
                         " vs " + std::to_string(n_labels));
    }
    const std::size_t pix = static_cast<std::size_t>(rows) * cols;
    if (image_bytes.size() != 16 + static_cast<std::size_t>(n_images) * pix) {
        throw ParseError("image payload truncated or oversized");
    }
    if (label_bytes.size() != 8 + n_labels) {
        throw ParseError("label payload truncated or oversized");
    }

    LabeledImageSet set;
    set.images.reserve(n_images);
    set.labels.reserve(n_images);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        Image img;
        img.height = rows;
        img.width = cols;
        img.pixels.resize(pix);
        const std::size_t base = 16 + static_cast<std::size_t>(i) * pix;
        for (std::size_t p = 0; p < pix; ++p) {
            img.pixels[p] = image_bytes[base + p] / 255.0;
        }
        set.images.push_back(std::move(img));
        set.labels.push_back(label_bytes[8 + i]);
    }
    return set;
}

std::vector<unsigned char> read_file_maybe_gz(const std::string& path) {
    // gzread inflates gzip streams and passes plain files through unchanged.
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    std::vector<unsigned char> out;
    std::array<unsigned char, 1 << 16> buf;
    for (;;) {
        const int n = gzread(f, buf.data(), static_cast<unsigned>(buf.size()));
        if (n < 0) {
            gzclose(f);
            throw IoError("read error in " + path);
        }
        if (n == 0) break;
        out.insert(out.end(), buf.begin(), buf.begin() + n);
    }
    gzclose(f);
    return out;
}

LabeledImageSet load_idx_files(const std::string& image_path,
                               const std::string& label_path) {
    LabeledImageSet set =
        parse_idx(read_file_maybe_gz(image_path), read_file_maybe_gz(label_path));
    set.image_source = image_path;
    set.label_source = label_path;
    return set;
}

LabeledImageSet sample_per_class(const LabeledImageSet& set,
                                 std::size_t n_per_class,
                                 std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const int c = set.labels[i];
        if (c < 0) throw ParameterError("negative class label");
        if (by_class.size() <= static_cast<std::size_t>(c)) by_class.resize(c + 1);
        by_class[c].push_back(i);
    }
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::vector<std::vector<std::size_t>> picks(by_class.size());
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& pool = by_class[c];
        if (pool.size() < n_per_class) {
            throw ParameterError("class " + std::to_string(c) + " has only " +
                                 std::to_string(pool.size()) + " members, need " +
                                 std::to_string(n_per_class));
        }
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const std::uint32_t j =
                static_cast<std::uint32_t>(i) +
                bounded(rng, static_cast<std::uint32_t>(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
    }
    LabeledImageSet out;
    out.image_source = set.image_source;
    out.label_source = set.label_source;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            const std::size_t idx = by_class[c][i];
            out.images.push_back(set.images[idx]);
            out.labels.push_back(set.labels[idx]);
        }
    }
    return out;
}

}  // namespace arn
