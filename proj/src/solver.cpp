#include "salm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <utility>

#include "salm/errors.hpp"
#include "salm/prox.hpp"

namespace salm {

namespace {

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
    if (a != b) throw DimensionError(std::string(what) + ": shape mismatch " + a.to_string() + " vs " + b.to_string());
}

void require_positive_beta(double beta, const char* what) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError(std::string(what) + ": beta must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------
// SamplingMask

SamplingMask::SamplingMask(Shape shape, std::vector<std::size_t> indices, std::vector<double> values)
    : shape_(std::move(shape)), indices_(std::move(indices)), values_(std::move(values)) {
    if (indices_.empty()) throw ParameterError("sampling mask must observe at least one entry");
    if (indices_.size() != values_.size()) throw DimensionError("sampling mask: index and value counts differ");
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (indices_[k] >= shape_.numel()) throw DimensionError("sampling mask: offset out of range");
        if (k > 0 && indices_[k] <= indices_[k - 1]) {
            throw DimensionError("sampling mask: offsets must be strictly increasing");
        }
        if (!std::isfinite(values_[k])) throw DomainError("sampling mask: observed value is not finite");
    }
}

SamplingMask SamplingMask::from_tensor(const DenseTensor& observed, std::vector<std::size_t> indices) {
    std::vector<double> values;
    values.reserve(indices.size());
    for (std::size_t offset : indices) {
        if (offset >= observed.size()) throw DimensionError("sampling mask: offset out of range");
        values.push_back(observed[offset]);
    }
    return SamplingMask(observed.shape(), std::move(indices), std::move(values));
}

std::vector<std::size_t> SamplingMask::complement() const {
    std::vector<std::size_t> out;
    out.reserve(shape_.numel() - indices_.size());
    std::size_t next = 0;
    for (std::size_t offset = 0; offset < shape_.numel(); ++offset) {
        if (next < indices_.size() && indices_[next] == offset) {
            ++next;
        } else {
            out.push_back(offset);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

void SolverConfig::validate() const {
    if (!(beta0 > 0.0)) throw ParameterError("beta0 must be positive");
    if (!(rho >= 1.0)) throw ParameterError("rho must be at least 1");
    if (!(tol > 0.0 && tol < 1.0)) throw ParameterError("tol must lie in (0, 1)");
    if (eps && !(*eps > 0.0)) throw ParameterError("eps must be positive");
    if (max_iter == 0) throw ParameterError("max_iter must be at least 1");
    if (!(beta_max >= beta0)) throw ParameterError("beta_max must be at least beta0");
}

double default_eps(double sampling_ratio) { return sampling_ratio > 0.5 ? 1e-3 : 1e-4; }

SolverConfig resolve_config(SolverConfig cfg, double sampling_ratio) {
    if (!cfg.eps) cfg.eps = default_eps(sampling_ratio);
    return cfg;
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max_iter";
        case SolveStatus::NumericalError: return "numerical_error";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Update steps

DenseTensor project_completion(const DenseTensor& z, const SamplingMask& mask) {
    require_same_shape(z.shape(), mask.shape(), "project_completion");
    DenseTensor out = z;
    const auto idx = mask.indices();
    const auto val = mask.values();
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = val[k];
    return out;
}

Projector completion_projector(SamplingMask mask) {
    return [mask = std::move(mask)](const DenseTensor& z) { return project_completion(z, mask); };
}

DenseTensor x_update(const SolverState& state, const Projector& project) {
    require_positive_beta(state.beta, "x_update");
    if (state.y.empty() || state.y.size() != state.lambda.size()) {
        throw DimensionError("x_update: need one multiplier per split block");
    }
    const double beta = state.beta;
    DenseTensor sum(state.y.front().shape());
    for (std::size_t i = 0; i < state.y.size(); ++i) {
        require_same_shape(state.y[i].shape(), sum.shape(), "x_update");
        require_same_shape(state.lambda[i].shape(), sum.shape(), "x_update");
        sum.vec() += state.lambda[i].vec() + beta * state.y[i].vec();
    }
    sum *= 1.0 / (static_cast<double>(state.y.size()) * beta);
    return project(sum);
}

DenseTensor x_update(const SolverState& state, const SamplingMask& mask) {
    return x_update(state, [&mask](const DenseTensor& z) { return project_completion(z, mask); });
}

ModeUpdate y_update_detailed(const DenseTensor& x_new, const DenseTensor& lambda_i, double beta, std::size_t mode) {
    require_positive_beta(beta, "y_update");
    require_same_shape(x_new.shape(), lambda_i.shape(), "y_update");
    DenseTensor shifted = x_new;
    shifted.vec() -= (1.0 / beta) * lambda_i.vec();
    ShrinkResult shrunk = matrix_shrink_detailed(unfold(shifted, mode).matrix, 1.0 / beta);
    return {refold(shrunk.matrix, mode, x_new.shape()), shrunk.nuclear_norm, shrunk.rank};
}

DenseTensor y_update(const DenseTensor& x_new, const DenseTensor& lambda_i, double beta, std::size_t mode) {
    return y_update_detailed(x_new, lambda_i, beta, mode).y;
}

DenseTensor multiplier_update(const DenseTensor& lambda_i, const DenseTensor& x_new, const DenseTensor& y_new_i,
                              double beta) {
    require_positive_beta(beta, "multiplier_update");
    require_same_shape(lambda_i.shape(), x_new.shape(), "multiplier_update");
    require_same_shape(lambda_i.shape(), y_new_i.shape(), "multiplier_update");
    DenseTensor out = lambda_i;
    out.vec() -= beta * (x_new.vec() - y_new_i.vec());
    return out;
}

double beta_update(double beta, double rel_change, const SolverConfig& cfg) {
    require_positive_beta(beta, "beta_update");
    if (!cfg.eps) throw ParameterError("beta_update: eps is not set");
    if (rel_change <= *cfg.eps) return std::min(cfg.rho * beta, cfg.beta_max);
    return beta;
}

double relative_change(const DenseTensor& x_prev, const DenseTensor& x_new) {
    require_same_shape(x_prev.shape(), x_new.shape(), "relative_change");
    const double diff = (x_new.vec() - x_prev.vec()).norm();
    return diff / std::max(1.0, frobenius_norm(x_prev));
}

StopCheck check_stop(const DenseTensor& x_prev, const DenseTensor& x_new, double tol) {
    const double rel = relative_change(x_prev, x_new);
    return {rel < tol, rel};
}

// ---------------------------------------------------------------------------
// Iteration driver

SalmIteration::SalmIteration(Projector project, const Shape& shape, SolverConfig cfg)
    : project_(std::move(project)), cfg_(std::move(cfg)) {
    cfg_.validate();
    if (!cfg_.eps) throw ParameterError("solver: eps must be set for a general projector");
    if (shape.order() < 2) throw DimensionError("solver: tensor must have at least two modes");

    const std::size_t n = shape.order();
    state_.x = DenseTensor(shape);
    state_.y.assign(n, state_.x);
    state_.lambda.assign(n, DenseTensor(shape));
    state_.beta = cfg_.beta0;
    state_.iter = 0;
}

SalmIteration::SalmIteration(const SamplingMask& mask, SolverConfig cfg)
    : SalmIteration(completion_projector(mask), mask.shape(), resolve_config(std::move(cfg), mask.sampling_ratio())) {}

IterTrace SalmIteration::step() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = state_.y.size();
    const double beta = state_.beta;

    DenseTensor x_new = x_update(state_, project_);
    require_same_shape(x_new.shape(), state_.x.shape(), "solver projector");

    std::vector<ModeUpdate> updates(n);
    if (cfg_.parallel_modes && n > 1) {
        std::vector<std::future<ModeUpdate>> pending;
        pending.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            pending.push_back(std::async(std::launch::async, [&, i] {
                return y_update_detailed(x_new, state_.lambda[i], beta, i);
            }));
        }
        for (std::size_t i = 0; i < n; ++i) updates[i] = pending[i].get();
    } else {
        for (std::size_t i = 0; i < n; ++i) updates[i] = y_update_detailed(x_new, state_.lambda[i], beta, i);
    }

    IterTrace rec;
    rec.beta = beta;
    rec.residuals.resize(n);
    rec.ranks.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        state_.lambda[i] = multiplier_update(state_.lambda[i], x_new, updates[i].y, beta);
        rec.residuals[i] = (x_new.vec() - updates[i].y.vec()).norm();
        rec.ranks[i] = updates[i].rank;
        rec.objective += updates[i].nuclear_norm;
        state_.y[i] = std::move(updates[i].y);
    }

    const StopCheck stop = check_stop(state_.x, x_new, cfg_.tol);
    rec.rel_change = stop.rel_change;
    converged_ = stop.stop;

    state_.x = std::move(x_new);
    state_.beta = beta_update(beta, stop.rel_change, cfg_);
    rec.iter = ++state_.iter;

    elapsed_ms_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rec.elapsed_ms = elapsed_ms_;
    return rec;
}

namespace {

SolveResult run(SalmIteration& it, const TraceSink& on_iter) {
    SolveResult result;
    const std::size_t max_iter = it.config().max_iter;
    result.trace.reserve(std::min<std::size_t>(max_iter, 4096));
    result.status = SolveStatus::MaxIter;
    while (it.state().iter < max_iter) {
        try {
            result.trace.push_back(it.step());
        } catch (const NumericalError& e) {
            result.status = SolveStatus::NumericalError;
            result.message = e.what();
            break;
        }
        if (on_iter) on_iter(result.trace.back());
        if (it.converged()) {
            result.status = SolveStatus::Converged;
            break;
        }
    }
    result.state = it.state();
    result.x = result.state.x;
    return result;
}

}  // namespace

SolveResult solve(const SamplingMask& mask, const SolverConfig& cfg, const TraceSink& on_iter) {
    SalmIteration it(mask, cfg);
    return run(it, on_iter);
}

SolveResult solve(Projector project, const Shape& shape, const SolverConfig& cfg, const TraceSink& on_iter) {
    SalmIteration it(std::move(project), shape, cfg);
    return run(it, on_iter);
}

}  // namespace salm
