#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taxisfv/split_problem.hpp"
#include "taxisfv/tableau.hpp"

namespace taxisfv {

enum class Method {
    Explicit,
    Cnd,
    Ros2,
    Ros3,
    Ros3Atc,
    Strang,
    StrangCnd,
    StrangIr,
    Imex2,
    Imex3,
    Imex3Atc,
    Imex3AtcIr,
    Imex3AtcUpwind1,
};

[[nodiscard]] std::string_view method_name(Method m) noexcept;
[[nodiscard]] std::optional<Method> parse_method(std::string_view name) noexcept;
[[nodiscard]] const std::vector<Method>& all_methods();

/// Uses embedded error estimation and adaptive step sizes.
[[nodiscard]] bool is_adaptive(Method m) noexcept;
/// Requires first-order upwind fluxes in the spatial discretization.
[[nodiscard]] bool uses_first_order_fluxes(Method m) noexcept;
/// Needs the coupled Jacobian d(D + R)/dw (1D only).
[[nodiscard]] bool needs_coupled_jacobian(Method m) noexcept;

/// A state with a NaN or infinity.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(double t, std::size_t cell, std::size_t species);
    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] std::size_t cell() const noexcept { return cell_; }
    [[nodiscard]] std::size_t species() const noexcept { return species_; }

private:
    double t_;
    std::size_t cell_, species_;
};

/// Step-size control gave up or a Newton iteration did not converge.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct StepControllerConfig {
    double cfl = 0.49;
    double tol_floor = 1e-6;
    double tol_relative = 1e-6;
    double safety = 0.9;
    double exponent = 1.0 / 3.0;
    double growth_cap = 2.0;
    int max_retries = 20;
    double newton_tolerance = 1e-10;
    int newton_max_iterations = 25;
};

/// Retry factor 0.9 (tol / eps)^(1/3) of the step-size rule.
[[nodiscard]] double step_size_factor(double eps, double tol, const StepControllerConfig& cfg);

/**
 * Single-step kernels. `out` receives the new state; `low`, when non-empty,
 * receives the embedded lower-order solution (methods with embedded weights
 * only). Work vectors are reused between calls.
 */
class Stepper {
public:
    explicit Stepper(Method method, StepControllerConfig config = {});

    [[nodiscard]] Method method() const noexcept { return method_; }
    [[nodiscard]] bool has_embedded() const noexcept;

    void step(SplitProblem& p, std::span<const double> w, double tau, std::span<double> out,
              std::span<double> low = {});

    // Individual schemes, also used by the order tests.
    void explicit_euler(SplitProblem& p, std::span<const double> w, double tau, std::span<double> out);
    void cnd(SplitProblem& p, std::span<const double> w, double tau, std::span<double> out);
    void rosenbrock(SplitProblem& p, const RosenbrockTableau& t, std::span<const double> w,
                    double tau, std::span<double> out, std::span<double> low);
    void imex(SplitProblem& p, const ImexTableau& t, bool implicit_reaction,
              std::span<const double> w, double tau, std::span<double> out, std::span<double> low);
    enum class DiffusionSub { TrBdf2, CrankNicolson };
    enum class ReactionSub { Rk4, Ros2 };
    void strang(SplitProblem& p, DiffusionSub dsub, ReactionSub rsub, std::span<const double> w,
                double tau, std::span<double> out);

    // Sub-flows of the splitting.
    void rk4_advection(SplitProblem& p, std::span<double> w, double tau);
    void rk4_reaction(SplitProblem& p, std::span<double> w, double tau);
    void ros2_reaction(SplitProblem& p, std::span<double> w, double tau);
    void trbdf2_diffusion(SplitProblem& p, std::span<double> w, double tau);
    void cn_diffusion(SplitProblem& p, std::span<double> w, double tau);

private:
    std::vector<double>& buf(std::size_t k, std::size_t n);
    void newton_stage(SplitProblem& p, double sigma, std::span<const double> rhs,
                      std::span<double> W);

    Method method_;
    StepControllerConfig config_;
    RosenbrockTableau ros_;
    ImexTableau imex_;
    std::vector<std::vector<double>> work_;
};

/// Outcome of one accepted step.
struct StepInfo {
    double tau = 0.0;
    int retries = 0;
    double error_estimate = 0.0;
};

/**
 * Advances a state by one accepted step with CFL-limited (and, for the -ATC
 * methods, error-controlled) step sizes.
 */
class TimeIntegrator {
public:
    explicit TimeIntegrator(Method method, StepControllerConfig config = {});

    [[nodiscard]] Method method() const noexcept { return stepper_.method(); }
    [[nodiscard]] const StepControllerConfig& config() const noexcept { return config_; }

    /// CFL bound for the state (plus the diffusion limit for EXPLICIT).
    [[nodiscard]] double step_bound(SplitProblem& p, std::span<const double> w) const;

    /// One accepted step from t, never passing t_end. w is updated in place.
    StepInfo advance(SplitProblem& p, std::vector<double>& w, double t, double t_end);

    /// Forget the carried step size (after a grid change).
    void reset() noexcept { tau_next_.reset(); }

    [[nodiscard]] std::size_t rejected_steps() const noexcept { return rejected_; }

private:
    Stepper stepper_;
    StepControllerConfig config_;
    std::optional<double> tau_next_;
    std::vector<double> out_, low_;
    std::size_t rejected_ = 0;
};

/// Throws NumericalFailure at the first non-finite entry.
void check_finite(std::span<const double> w, std::size_t n_species, double t);

struct IntegrateResult {
    double t = 0.0;
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

using StepObserver = std::function<void(double t, double tau, std::span<const double> w)>;

/// Integrates from t0 to t_end, calling `observer` after every accepted step.
IntegrateResult integrate(SplitProblem& p, TimeIntegrator& integrator, std::vector<double>& w,
                          double t0, double t_end, const StepObserver& observer = {});

}  // namespace taxisfv
