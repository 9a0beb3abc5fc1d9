#include "salm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "salm/errors.hpp"
#include "salm/prox.hpp"

namespace salm {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomStream RandomStream::substream(std::uint64_t seed, Stream stream) {
    const auto s = static_cast<std::uint64_t>(stream);
    return RandomStream(splitmix64(seed + (s + 1) * 0x9E3779B97F4A7C15ULL));
}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw ParameterError("uniform_index: empty range");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;  // draws above limit are rejected
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw > limit);
    return draw % n;
}

std::vector<std::size_t> sample_without_replacement(std::size_t pool_size, std::size_t count, RandomStream& rng) {
    if (count > pool_size) throw ParameterError("cannot sample more entries than the pool holds");
    std::vector<std::size_t> pool(pool_size);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(pool_size - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::size_t observed_count(double sampling_ratio, std::size_t numel) {
    if (!(sampling_ratio > 0.0 && sampling_ratio <= 1.0)) {
        throw ParameterError("sampling ratio must lie in (0, 1], got " + std::to_string(sampling_ratio));
    }
    const auto rounded = static_cast<std::size_t>(std::llround(sampling_ratio * static_cast<double>(numel)));
    return std::clamp<std::size_t>(rounded, 1, numel);
}

void ProblemSpec::validate() const {
    if (ranks.size() != shape.order()) {
        throw SpecError("expected " + std::to_string(shape.order()) + " ranks, got " + std::to_string(ranks.size()));
    }
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] < 1 || ranks[i] > shape[i]) {
            throw SpecError("rank " + std::to_string(ranks[i]) + " of mode " + std::to_string(i + 1) +
                            " is outside [1, " + std::to_string(shape[i]) + "]");
        }
    }
    if (!(sampling_ratio > 0.0 && sampling_ratio <= 1.0)) throw ParameterError("sampling ratio must lie in (0, 1]");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ParameterError("noise sigma must be >= 0");
}

GeneratedProblem gen_lowrank(const ProblemSpec& spec) {
    spec.validate();
    const std::size_t n = spec.shape.order();

    RandomStream core_rng = RandomStream::substream(spec.seed, Stream::Core);
    DenseTensor truth(Shape(spec.ranks));
    for (double& v : truth.data()) v = core_rng.normal();

    RandomStream factor_rng = RandomStream::substream(spec.seed, Stream::Factors);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::MatrixXd factor(static_cast<Eigen::Index>(spec.shape[i]), static_cast<Eigen::Index>(spec.ranks[i]));
        for (Eigen::Index k = 0; k < factor.size(); ++k) factor.data()[k] = factor_rng.normal();
        truth = mode_product(truth, factor, i);
    }

    DenseTensor observed = truth;
    if (spec.noise_sigma > 0.0) {
        RandomStream noise_rng = RandomStream::substream(spec.seed, Stream::Noise);
        for (double& v : observed.data()) v += spec.noise_sigma * noise_rng.normal();
    }

    RandomStream mask_rng = RandomStream::substream(spec.seed, Stream::Mask);
    const std::size_t numel = spec.shape.numel();
    auto indices = sample_without_replacement(numel, observed_count(spec.sampling_ratio, numel), mask_rng);
    SamplingMask mask = SamplingMask::from_tensor(observed, std::move(indices));
    return {std::move(truth), std::move(observed), std::move(mask)};
}

double rel_err(const DenseTensor& x_sol, const DenseTensor& m) {
    if (x_sol.shape() != m.shape()) throw DimensionError("rel_err: shape mismatch");
    const double denom = frobenius_norm(m);
    if (denom == 0.0) throw MetricError("rel_err: ground truth is zero");
    return (x_sol.vec() - m.vec()).norm() / denom;
}

double nrmse(const DenseTensor& x_opt, const DenseTensor& m_bar, const SamplingMask& mask) {
    if (x_opt.shape() != m_bar.shape() || m_bar.shape() != mask.shape()) {
        throw DimensionError("nrmse: shape mismatch");
    }
    const std::vector<std::size_t> unobserved = mask.complement();
    if (unobserved.empty()) throw MetricError("nrmse: every entry is observed");

    double sq = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t offset : unobserved) {
        const double d = x_opt[offset] - m_bar[offset];
        sq += d * d;
        lo = std::min(lo, m_bar[offset]);
        hi = std::max(hi, m_bar[offset]);
    }
    if (!(hi > lo)) throw MetricError("nrmse: ground truth is constant on the unobserved entries");
    return std::sqrt(sq) / ((hi - lo) * std::sqrt(static_cast<double>(unobserved.size())));
}

std::vector<std::size_t> numerical_multilinear_rank(const DenseTensor& x, double rel_cutoff) {
    std::vector<std::size_t> ranks;
    ranks.reserve(x.shape().order());
    for (std::size_t i = 0; i < x.shape().order(); ++i) {
        const Eigen::VectorXd sigma = svd_full(unfold(x, i).matrix).sigma;
        const double cutoff = rel_cutoff * (sigma.size() ? sigma[0] : 0.0);
        ranks.push_back(static_cast<std::size_t>((sigma.array() > cutoff).count()));
    }
    return ranks;
}

}  // namespace salm
