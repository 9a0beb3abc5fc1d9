#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salm/tensor.hpp"

namespace salm {

/// The observed index set Ω (sorted, unique linear offsets into the flat
/// first-index-fastest layout) together with the observed values M_Ω.
class SamplingMask {
public:
    /// Validates: indices strictly increasing and below shape.numel(), one finite
    /// value per index, at least one index.
    SamplingMask(Shape shape, std::vector<std::size_t> indices, std::vector<double> values);

    /// Mask over `indices` with values read from `observed`.
    static SamplingMask from_tensor(const DenseTensor& observed, std::vector<std::size_t> indices);

    const Shape& shape() const noexcept { return shape_; }
    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return indices_.size(); }

    /// |Ω| / numel.
    double sampling_ratio() const noexcept {
        return static_cast<double>(indices_.size()) / static_cast<double>(shape_.numel());
    }

    /// Offsets not in Ω, ascending.
    std::vector<std::size_t> complement() const;

    friend bool operator==(const SamplingMask&, const SamplingMask&) = default;

private:
    Shape shape_;
    std::vector<std::size_t> indices_;
    std::vector<double> values_;
};

struct SolverConfig {
    double beta0 = 0.1;
    double rho = 5.0;
    double tol = 1e-8;
    /// Threshold on the relative change below which beta grows by rho.
    /// Unset means "pick from the sampling ratio" (see default_eps).
    std::optional<double> eps;
    std::size_t max_iter = 1000;
    double beta_max = 1e12;
    /// Run the N mode updates of one iteration concurrently.
    bool parallel_modes = false;

    /// Throws ParameterError unless beta0 > 0, rho >= 1, 0 < tol < 1, eps > 0 (when set),
    /// max_iter >= 1 and beta_max >= beta0.
    void validate() const;
};

/// 1e-3 when sr > 0.5, otherwise 1e-4 (sr = 0.5 takes the smaller value).
double default_eps(double sampling_ratio);

/// Copy of `cfg` with eps filled from default_eps(sampling_ratio) when unset.
SolverConfig resolve_config(SolverConfig cfg, double sampling_ratio);

/// One iterate of the splitting scheme: X, the split copies Y_i and multipliers Λ_i.
struct SolverState {
    DenseTensor x;
    std::vector<DenseTensor> y;
    std::vector<DenseTensor> lambda;
    double beta = 0.0;
    std::size_t iter = 0;
};

struct IterTrace {
    std::size_t iter = 0;             // 1-based count of completed iterations
    double objective = 0.0;           // sum_i ||Y_i,(i)||_*
    double rel_change = 0.0;          // ||X^{k+1} - X^k||_F / max(1, ||X^k||_F)
    std::vector<double> residuals;    // ||X^{k+1} - Y_i^{k+1}||_F per mode
    double beta = 0.0;                // penalty used in this iteration
    double elapsed_ms = 0.0;          // wall time since the solve started
    std::vector<std::size_t> ranks;   // numerical rank of each Y_i,(i)
};

enum class SolveStatus { Converged, MaxIter, NumericalError };

std::string_view to_string(SolveStatus status);

/// Orthogonal projector onto the affine constraint set {X : A(X) = b}.
using Projector = std::function<DenseTensor(const DenseTensor&)>;

using TraceSink = std::function<void(const IterTrace&)>;

/// Completion projector: `z` with the entries in Ω replaced by the observations.
DenseTensor project_completion(const DenseTensor& z, const SamplingMask& mask);

Projector completion_projector(SamplingMask mask);

/// X^{k+1} = P((1/(Nβ)) (Σ Λ_i + β Σ Y_i)).
DenseTensor x_update(const SolverState& state, const Projector& project);
DenseTensor x_update(const SolverState& state, const SamplingMask& mask);

struct ModeUpdate {
    DenseTensor y;
    double nuclear_norm = 0.0;
    std::size_t rank = 0;
};

/// Y_i = refold_i(D_{1/β}(X_(i) - Λ_i,(i) / β)).
DenseTensor y_update(const DenseTensor& x_new, const DenseTensor& lambda_i, double beta, std::size_t mode);
ModeUpdate y_update_detailed(const DenseTensor& x_new, const DenseTensor& lambda_i, double beta, std::size_t mode);

/// Λ_i - β (X - Y_i).
DenseTensor multiplier_update(const DenseTensor& lambda_i, const DenseTensor& x_new, const DenseTensor& y_new_i,
                              double beta);

/// min(ρβ, beta_max) when rel_change <= eps, otherwise β. `cfg.eps` must be set.
double beta_update(double beta, double rel_change, const SolverConfig& cfg);

double relative_change(const DenseTensor& x_prev, const DenseTensor& x_new);

struct StopCheck {
    bool stop = false;
    double rel_change = 0.0;
};

StopCheck check_stop(const DenseTensor& x_prev, const DenseTensor& x_new, double tol);

/// Drives the iteration one step at a time and exposes the iterate between steps.
///
/// Initial iterate: X^0 = 0, Y_i^0 = 0, Λ_i^0 = 0, β^0 = cfg.beta0, so the first
/// X-update yields P(0) and the first relative change is measured against zero.
/// Each step performs the X-update, the N mode updates (each reading X^{k+1} and
/// Λ_i^k only), the multiplier updates, the stopping test and the β update.
class SalmIteration {
public:
    /// `cfg.eps` must be set (see resolve_config). Requires shape.order() >= 2.
    SalmIteration(Projector project, const Shape& shape, SolverConfig cfg);

    /// Completion problem; eps defaults from the mask's sampling ratio.
    SalmIteration(const SamplingMask& mask, SolverConfig cfg);

    /// Advance one iteration. Propagates NumericalError from the SVD; the state is
    /// left at the last completed iterate in that case.
    IterTrace step();

    /// True once the last step met the stopping tolerance.
    bool converged() const noexcept { return converged_; }

    const SolverState& state() const noexcept { return state_; }
    const SolverConfig& config() const noexcept { return cfg_; }

private:
    Projector project_;
    SolverConfig cfg_;
    SolverState state_;
    bool converged_ = false;
    double elapsed_ms_ = 0.0;
};

struct SolveResult {
    DenseTensor x;
    std::vector<IterTrace> trace;
    SolveStatus status = SolveStatus::MaxIter;
    std::string message;  // set for NumericalError
    SolverState state;
};

/// Runs the splitting augmented Lagrangian iteration until the relative change of X
/// drops below tol or max_iter iterations have completed.
SolveResult solve(const SamplingMask& mask, const SolverConfig& cfg, const TraceSink& on_iter = {});

/// Same, for a user-supplied projector. `cfg.eps` must be set.
SolveResult solve(Projector project, const Shape& shape, const SolverConfig& cfg, const TraceSink& on_iter = {});

}  // namespace salm
