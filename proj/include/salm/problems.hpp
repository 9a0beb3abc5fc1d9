#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "salm/solver.hpp"
#include "salm/tensor.hpp"

namespace salm {

/// Independent random streams drawn from one problem seed.
enum class Stream : std::uint64_t { Core = 0, Factors = 1, Noise = 2, Mask = 3 };

/// Portable random source: std::mt19937_64 seeded through SplitMix64.
///
/// Substream s of seed k is seeded with splitmix64(k + (s + 1) * 0x9E3779B97F4A7C15).
/// uniform() maps the top 53 bits of one engine draw to [0, 1). normal() is
/// Box-Muller on (1 - u1, u2), returning the cosine branch and then the sine
/// branch of each pair. uniform_index() uses rejection to stay unbiased.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t engine_seed) : engine_(engine_seed) {}

    static RandomStream substream(std::uint64_t seed, Stream stream);

    double uniform();
    double normal();
    /// Uniform integer in [0, n); n >= 1.
    std::uint64_t uniform_index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// `count` distinct values from [0, pool_size), uniformly without replacement
/// (partial Fisher-Yates), returned ascending.
std::vector<std::size_t> sample_without_replacement(std::size_t pool_size, std::size_t count, RandomStream& rng);

/// round(sr · numel), clamped to [1, numel].
std::size_t observed_count(double sampling_ratio, std::size_t numel);

struct ProblemSpec {
    Shape shape;
    std::vector<std::size_t> ranks;
    double sampling_ratio = 1.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    /// Throws SpecError for a rank list of the wrong length or ranks outside [1, n_i],
    /// and ParameterError for sr outside (0, 1] or a negative/non-finite sigma.
    void validate() const;
};

struct GeneratedProblem {
    DenseTensor truth;     // noiseless Tucker-form tensor
    DenseTensor observed;  // truth + sigma · E
    SamplingMask mask;     // values taken from `observed`
};

/// Tucker-form random problem: a standard-normal core of extents `ranks`
/// multiplied along every mode by a standard-normal n_i x r_i factor, plus
/// optional Gaussian noise, observed on a uniformly random index set.
/// Deterministic in spec.seed. The multilinear rank of the truth is
/// min(r_i, prod_{j != i} r_j) in mode i almost surely.
GeneratedProblem gen_lowrank(const ProblemSpec& spec);

/// ||x_sol - m||_F / ||m||_F. Throws MetricError when m is zero.
double rel_err(const DenseTensor& x_sol, const DenseTensor& m);

/// Root mean square error over the unobserved entries, normalized by the range
/// of the ground truth there. Throws MetricError when the complement is empty or
/// the truth is constant on it.
double nrmse(const DenseTensor& x_opt, const DenseTensor& m_bar, const SamplingMask& mask);

/// Per-mode count of singular values above rel_cutoff · sigma_max.
std::vector<std::size_t> numerical_multilinear_rank(const DenseTensor& x, double rel_cutoff = 1e-9);

}  // namespace salm
