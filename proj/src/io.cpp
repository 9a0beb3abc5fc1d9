#include "salm/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <fmt/format.h>
#include "json.hpp"

#include "salm/errors.hpp"
#include "salm/problems.hpp"

namespace salm::io {

namespace {

constexpr std::array<std::uint8_t, 4> kTensorMagic{'M', 'R', 'T', '1'};
constexpr std::array<std::uint8_t, 4> kMaskMagic{'M', 'R', 'M', '1'};

class ByteWriter {
public:
    void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

    template <typename UInt>
    void uint_le(UInt v) {
        for (std::size_t b = 0; b < sizeof(UInt); ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }

    void f64(double v) { uint_le(std::bit_cast<std::uint64_t>(v)); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

    void reserve(std::size_t n) { out_.reserve(n); }

private:
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}

    std::uint64_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    void need(std::uint64_t n, const char* field) const {
        if (n > remaining()) {
            throw FormatError(fmt::format("{}: truncated {}: {} more bytes needed", what_, field, n - remaining()),
                              pos_);
        }
    }

    void expect_magic(const std::array<std::uint8_t, 4>& magic) {
        if (bytes_.empty()) throw FormatError(std::string(what_) + ": empty file", 0);
        need(4, "magic");
        if (!std::equal(magic.begin(), magic.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_))) {
            throw FormatError(std::string(what_) + ": bad magic", pos_);
        }
        pos_ += 4;
    }

    template <typename UInt>
    UInt uint_le(const char* field) {
        need(sizeof(UInt), field);
        UInt v = 0;
        for (std::size_t b = 0; b < sizeof(UInt); ++b) v |= static_cast<UInt>(bytes_[pos_ + b]) << (8 * b);
        pos_ += sizeof(UInt);
        return v;
    }

    double f64() {
        std::uint64_t bits = 0;
        for (std::size_t b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
        pos_ += 8;
        return std::bit_cast<double>(bits);
    }

    void expect_end() const {
        if (remaining() != 0) {
            throw FormatError(fmt::format("{}: {} unexpected trailing bytes", what_, remaining()), pos_);
        }
    }

private:
    std::span<const std::uint8_t> bytes_;
    const char* what_;
    std::size_t pos_ = 0;
};

// Checked count * width for payload sizes.
std::uint64_t payload_bytes(std::uint64_t count, std::uint64_t width, const ByteReader& r, const char* what) {
    if (count > std::numeric_limits<std::uint64_t>::max() / width) {
        throw FormatError(std::string(what) + ": payload size overflows", r.offset());
    }
    return count * width;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor and mask files

std::vector<std::uint8_t> encode_tensor(const DenseTensor& t) {
    ByteWriter w;
    w.reserve(8 + 8 * t.shape().order() + 8 * t.size());
    w.raw(kTensorMagic);
    w.uint_le(static_cast<std::uint32_t>(t.shape().order()));
    for (std::size_t d : t.shape().dims()) w.uint_le(static_cast<std::uint64_t>(d));
    for (double v : t.data()) w.f64(v);
    return w.take();
}

DenseTensor decode_tensor(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, "tensor file");
    r.expect_magic(kTensorMagic);
    const auto order = r.uint_le<std::uint32_t>("mode count");
    if (order == 0) throw FormatError("tensor file: zero modes", r.offset() - 4);

    r.need(payload_bytes(order, 8, r, "tensor file"), "extents");
    std::vector<std::size_t> dims;
    dims.reserve(order);
    std::uint64_t numel = 1;
    for (std::uint32_t k = 0; k < order; ++k) {
        const std::uint64_t at = r.offset();
        const auto d = r.uint_le<std::uint64_t>("extent");
        if (d == 0) throw FormatError("tensor file: zero extent", at);
        if (d > std::numeric_limits<std::size_t>::max() || numel > std::numeric_limits<std::uint64_t>::max() / d ||
            numel * d > std::numeric_limits<std::size_t>::max() / 8) {
            throw FormatError("tensor file: extent overflow", at);
        }
        numel *= d;
        dims.push_back(static_cast<std::size_t>(d));
    }

    r.need(payload_bytes(numel, 8, r, "tensor file"), "payload");
    std::vector<double> data(static_cast<std::size_t>(numel));
    for (double& v : data) v = r.f64();
    r.expect_end();
    return DenseTensor(Shape(std::move(dims)), std::move(data));
}

std::vector<std::uint8_t> encode_mask(const SamplingMask& mask) {
    ByteWriter w;
    w.reserve(12 + 16 * mask.size());
    w.raw(kMaskMagic);
    w.uint_le(static_cast<std::uint64_t>(mask.size()));
    for (std::size_t offset : mask.indices()) w.uint_le(static_cast<std::uint64_t>(offset));
    for (double v : mask.values()) w.f64(v);
    return w.take();
}

SamplingMask decode_mask(std::span<const std::uint8_t> bytes, const Shape& shape) {
    ByteReader r(bytes, "mask file");
    r.expect_magic(kMaskMagic);
    const auto count = r.uint_le<std::uint64_t>("count");
    if (count == 0) throw FormatError("mask file: empty index set", r.offset() - 8);
    if (count > shape.numel()) throw FormatError("mask file: more offsets than tensor entries", r.offset() - 8);

    r.need(payload_bytes(count, 16, r, "mask file"), "payload");
    std::vector<std::size_t> indices(static_cast<std::size_t>(count));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const std::uint64_t at = r.offset();
        const auto offset = r.uint_le<std::uint64_t>("offset");
        if (offset >= shape.numel()) throw FormatError("mask file: offset out of range for " + shape.to_string(), at);
        if (k > 0 && offset <= indices[k - 1]) throw FormatError("mask file: offsets not strictly increasing", at);
        indices[k] = static_cast<std::size_t>(offset);
    }
    std::vector<double> values(indices.size());
    for (double& v : values) {
        const std::uint64_t at = r.offset();
        v = r.f64();
        if (!std::isfinite(v)) throw FormatError("mask file: non-finite value", at);
    }
    r.expect_end();
    return SamplingMask(shape, std::move(indices), std::move(values));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("error reading " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("error writing " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t) { write_file(path, encode_tensor(t)); }

DenseTensor read_tensor(const std::filesystem::path& path) { return decode_tensor(read_file(path)); }

void write_mask(const std::filesystem::path& path, const SamplingMask& mask) { write_file(path, encode_mask(mask)); }

SamplingMask read_mask(const std::filesystem::path& path, const Shape& shape) {
    return decode_mask(read_file(path), shape);
}

// ---------------------------------------------------------------------------
// PPM

namespace {

class PpmHeaderParser {
public:
    explicit PpmHeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
                ++pos_;
            } else {
                return;
            }
        }
    }

    std::uint64_t number(const char* field) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            if (v > 1'000'000'000ULL) throw FormatError(std::string("ppm: ") + field + " too large", start);
            v = v * 10 + (bytes_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) throw FormatError(std::string("ppm: expected ") + field, start);
        return v;
    }

    void single_whitespace() {
        if (pos_ >= bytes_.size()) throw FormatError("ppm: truncated header", pos_);
        const auto c = bytes_[pos_];
        if (!(c == ' ' || c == '\t' || c == '\n' || c == '\r')) throw FormatError("ppm: expected whitespace", pos_);
        ++pos_;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw FormatError("ppm: empty file", 0);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw FormatError("ppm: not a binary P6 pixmap", 0);
    PpmHeaderParser p(bytes.subspan(2));
    const auto width = p.number("width");
    const auto height = p.number("height");
    const std::size_t maxval_at = p.pos() + 2;
    const auto maxval = p.number("maxval");
    p.single_whitespace();
    if (width == 0 || height == 0) throw FormatError("ppm: zero image dimension", 2);

    Image img;
    img.width = static_cast<std::size_t>(width);
    img.height = static_cast<std::size_t>(height);
    if (maxval == 255) {
        img.depth = 8;
    } else if (maxval == 65535) {
        img.depth = 16;
    } else {
        throw FormatError("ppm: unsupported maxval " + std::to_string(maxval) + " (need 255 or 65535)", maxval_at);
    }

    const std::size_t start = p.pos() + 2;
    const std::size_t count = img.width * img.height * 3;
    const std::size_t bytes_per = img.depth == 8 ? 1 : 2;
    const std::size_t available = bytes.size() - start;
    if (available < count * bytes_per) {
        throw FormatError(fmt::format("ppm: truncated raster: {} more bytes needed", count * bytes_per - available),
                          bytes.size());
    }
    img.samples.resize(count);
    const std::uint8_t* raster = bytes.data() + start;
    for (std::size_t k = 0; k < count; ++k) {
        img.samples[k] = bytes_per == 1 ? raster[k]
                                        : static_cast<std::uint16_t>((raster[2 * k] << 8) | raster[2 * k + 1]);
    }
    return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
    if (image.depth != 8 && image.depth != 16) throw FormatError("ppm: unsupported depth", 0);
    if (image.samples.size() != image.width * image.height * 3) {
        throw DimensionError("ppm: sample count does not match image dimensions");
    }
    const std::string header = fmt::format("P6\n{} {}\n{}\n", image.width, image.height, image.max_value());
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + image.samples.size() * (image.depth / 8));
    for (std::uint16_t s : image.samples) {
        if (s > image.max_value()) throw DomainError("ppm: sample exceeds maxval");
        if (image.depth == 16) out.push_back(static_cast<std::uint8_t>(s >> 8));
        out.push_back(static_cast<std::uint8_t>(s & 0xFF));
    }
    return out;
}

Image read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

void write_ppm(const std::filesystem::path& path, const Image& image) { write_file(path, encode_ppm(image)); }

ImageTensor image_to_tensor(const Image& image, std::string source) {
    if (image.depth != 8 && image.depth != 16) {
        throw FormatError("image depth " + std::to_string(image.depth) + " is not supported (need 8 or 16)", 0);
    }
    if (image.width == 0 || image.height == 0) throw DimensionError("image has no pixels");
    if (image.samples.size() != image.width * image.height * 3) {
        throw DimensionError("image sample count does not match its dimensions");
    }
    const std::size_t h = image.height;
    const std::size_t w = image.width;
    const double scale = 1.0 / static_cast<double>(image.max_value());
    DenseTensor t(Shape{h, w, 3});
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t col = 0; col < w; ++col) {
            for (std::size_t row = 0; row < h; ++row) {
                t[row + h * (col + w * c)] = static_cast<double>(image.sample(row, col, c)) * scale;
            }
        }
    }
    return {std::move(t), std::move(source), image.depth};
}

Image tensor_to_image(const DenseTensor& t, int depth) {
    if (depth != 8 && depth != 16) throw FormatError("image depth " + std::to_string(depth) + " is not supported", 0);
    const Shape& s = t.shape();
    if (s.order() != 3 || s[2] != 3) throw DimensionError("image tensor must be H x W x 3, got " + s.to_string());
    Image img;
    img.height = s[0];
    img.width = s[1];
    img.depth = depth;
    img.samples.resize(img.height * img.width * 3);
    const double maxval = img.max_value();
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t col = 0; col < img.width; ++col) {
            for (std::size_t row = 0; row < img.height; ++row) {
                double v = t[row + img.height * (col + img.width * c)];
                v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
                img.sample(row, col, c) = static_cast<std::uint16_t>(std::lround(v * maxval));
            }
        }
    }
    return img;
}

SamplingMask mask_from_image(const ImageTensor& image, const MissingRule& rule) {
    const DenseTensor& t = image.tensor;
    const Shape& s = t.shape();
    if (s.order() != 3 || s[2] != 3) throw DimensionError("image tensor must be H x W x 3, got " + s.to_string());
    const std::size_t sites = s[0] * s[1];

    std::vector<std::size_t> indices;
    if (const auto* r = std::get_if<RandomEntries>(&rule)) {
        RandomStream rng = RandomStream::substream(r->seed, Stream::Mask);
        indices = sample_without_replacement(s.numel(), observed_count(r->sampling_ratio, s.numel()), rng);
    } else if (const auto* r = std::get_if<RandomPixels>(&rule)) {
        RandomStream rng = RandomStream::substream(r->seed, Stream::Mask);
        const auto kept = sample_without_replacement(sites, observed_count(r->sampling_ratio, sites), rng);
        indices.reserve(kept.size() * 3);
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t site : kept) indices.push_back(site + sites * c);
        }
    } else {
        const auto& color = std::get<SentinelColor>(rule).rgb;
        const double maxval = static_cast<double>((1u << image.depth) - 1u);
        std::vector<bool> missing(sites, true);
        for (std::size_t site = 0; site < sites; ++site) {
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = std::clamp(t[site + sites * c], 0.0, 1.0);
                if (std::lround(v * maxval) != static_cast<long>(color[c])) {
                    missing[site] = false;
                    break;
                }
            }
        }
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t site = 0; site < sites; ++site) {
                if (!missing[site]) indices.push_back(site + sites * c);
            }
        }
        if (indices.empty()) throw ParameterError("every pixel matches the sentinel color");
    }
    return SamplingMask::from_tensor(t, std::move(indices));
}

// ---------------------------------------------------------------------------
// Reports

std::string format_trace_csv(std::span<const IterTrace> trace, std::size_t modes) {
    std::string out = "iter,objective,rel_change,beta,elapsed_ms";
    for (std::size_t i = 1; i <= modes; ++i) out += fmt::format(",res_{}", i);
    out += '\n';
    for (const IterTrace& rec : trace) {
        if (rec.residuals.size() != modes) throw DimensionError("trace record has wrong number of residuals");
        out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}", rec.iter, rec.objective, rec.rel_change, rec.beta,
                           rec.elapsed_ms);
        for (double r : rec.residuals) out += fmt::format(",{:.17g}", r);
        out += '\n';
    }
    return out;
}

void write_trace_csv(std::span<const IterTrace> trace, std::size_t modes, const std::filesystem::path& path) {
    write_text(path, format_trace_csv(trace, modes));
}

std::string format_summary_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["shape"] = std::vector<std::size_t>(s.shape.dims().begin(), s.shape.dims().end());
    if (s.ranks) j["ranks"] = *s.ranks;
    j["sampling_ratio"] = s.sampling_ratio;
    if (s.noise_sigma) j["noise_sigma"] = *s.noise_sigma;
    if (s.seed) j["seed"] = *s.seed;
    nlohmann::ordered_json cfg;
    cfg["beta0"] = s.config.beta0;
    cfg["rho"] = s.config.rho;
    cfg["tol"] = s.config.tol;
    if (s.config.eps) {
        cfg["eps"] = *s.config.eps;
    } else {
        cfg["eps"] = nullptr;
    }
    cfg["max_iter"] = s.config.max_iter;
    cfg["beta_max"] = s.config.beta_max;
    j["config"] = std::move(cfg);
    j["iterations"] = s.iterations;
    j["status"] = std::string(to_string(s.status));
    if (s.rel_err) j["rel_err"] = *s.rel_err;
    if (s.nrmse) j["nrmse"] = *s.nrmse;
    j["wall_ms"] = s.wall_ms;
    return j.dump(2) + "\n";
}

void write_summary_json(const RunSummary& summary, const std::filesystem::path& path) {
    write_text(path, format_summary_json(summary));
}

}  // namespace salm::io
