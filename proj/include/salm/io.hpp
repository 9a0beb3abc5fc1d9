#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "salm/solver.hpp"
#include "salm/tensor.hpp"

namespace salm::io {

// Binary formats. All multi-byte fields are little-endian.
//
//   tensor  "MRT1" | u32 N | N x u64 extents | numel x f64, first index fastest
//   mask    "MRM1" | u64 count | count x u64 offsets | count x f64 values
//
// The mask file does not record the tensor shape; readers supply it.

std::vector<std::uint8_t> encode_tensor(const DenseTensor& t);
DenseTensor decode_tensor(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_mask(const SamplingMask& mask);
SamplingMask decode_mask(std::span<const std::uint8_t> bytes, const Shape& shape);

void write_tensor(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor read_tensor(const std::filesystem::path& path);

void write_mask(const std::filesystem::path& path, const SamplingMask& mask);
SamplingMask read_mask(const std::filesystem::path& path, const Shape& shape);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

// ---------------------------------------------------------------------------
// Images

/// Interleaved RGB raster, row-major, `depth` bits per channel (8 or 16).
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    int depth = 8;
    std::vector<std::uint16_t> samples;  // height * width * 3

    std::uint16_t max_value() const { return static_cast<std::uint16_t>((1u << depth) - 1u); }
    std::uint16_t& sample(std::size_t row, std::size_t col, std::size_t channel) {
        return samples[(row * width + col) * 3 + channel];
    }
    std::uint16_t sample(std::size_t row, std::size_t col, std::size_t channel) const {
        return samples[(row * width + col) * 3 + channel];
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Binary PPM (P6), maxval 255 or 65535 (16-bit samples big-endian, as PPM requires).
Image decode_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_ppm(const Image& image);
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& image);

/// H x W x 3 tensor with entries in [0, 1].
struct ImageTensor {
    DenseTensor tensor;
    std::string source;
    int depth = 8;
};

/// Entry (row, col, channel) = sample / (2^depth - 1). Throws FormatError for depths other than 8 or 16.
ImageTensor image_to_tensor(const Image& image, std::string source = {});

/// Inverse map: clamp to [0, 1], scale by 2^depth - 1 and round.
Image tensor_to_image(const DenseTensor& t, int depth);

/// Every entry missing independently of channel: uniform over all H·W·3 entries.
struct RandomEntries {
    double sampling_ratio = 1.0;
    std::uint64_t seed = 0;
};

/// Whole pixels missing: uniform over the H·W sites, all three channels together.
struct RandomPixels {
    double sampling_ratio = 1.0;
    std::uint64_t seed = 0;
};

/// Pixels whose quantized color equals `rgb` are missing.
struct SentinelColor {
    std::array<std::uint16_t, 3> rgb{};
};

using MissingRule = std::variant<RandomEntries, RandomPixels, SentinelColor>;

/// Mask over the retained entries of `image`, with values copied from it.
/// Random rules draw from the mask substream of their seed.
SamplingMask mask_from_image(const ImageTensor& image, const MissingRule& rule);

// ---------------------------------------------------------------------------
// Run reports

/// "iter,objective,rel_change,beta,elapsed_ms,res_1,...,res_N" then one row per
/// record, reals printed with 17 significant digits.
std::string format_trace_csv(std::span<const IterTrace> trace, std::size_t modes);
void write_trace_csv(std::span<const IterTrace> trace, std::size_t modes, const std::filesystem::path& path);

struct RunSummary {
    Shape shape;
    std::optional<std::vector<std::size_t>> ranks;
    double sampling_ratio = 0.0;
    std::optional<double> noise_sigma;
    std::optional<std::uint64_t> seed;
    SolverConfig config;
    std::size_t iterations = 0;
    SolveStatus status = SolveStatus::MaxIter;
    std::optional<double> rel_err;
    std::optional<double> nrmse;
    double wall_ms = 0.0;
};

/// JSON object with keys shape, ranks?, sampling_ratio, noise_sigma?, seed?,
/// config{beta0, rho, tol, eps, max_iter, beta_max}, iterations, status,
/// rel_err?, nrmse?, wall_ms. Optional keys are omitted when unset.
std::string format_summary_json(const RunSummary& summary);
void write_summary_json(const RunSummary& summary, const std::filesystem::path& path);

}  // namespace salm::io
