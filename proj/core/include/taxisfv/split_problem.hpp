#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "taxisfv/discretization.hpp"
#include "taxisfv/linear_solver.hpp"

namespace taxisfv {

/**
 * Semi-discrete system w' = A(w) + D(w) + R(w) as seen by the time integrators.
 *
 * D is linear. Implicit solves are expressed through shifted operators
 * (Id - sigma J). Problems that cannot provide a capability throw
 * std::logic_error from the corresponding call.
 */
class SplitProblem {
public:
    virtual ~SplitProblem() = default;

    [[nodiscard]] virtual std::size_t unknowns() const = 0;
    [[nodiscard]] virtual std::size_t n_species() const = 0;

    virtual void advection(std::span<const double> w, std::span<double> out) = 0;
    virtual void diffusion(std::span<const double> w, std::span<double> out) = 0;
    virtual void reaction(std::span<const double> w, std::span<double> out) = 0;

    /// x = (Id - sigma D)^{-1} b
    virtual void solve_diffusion(double sigma, std::span<const double> b, std::span<double> x) = 0;

    /// Freeze J = d(D + R)/dw at `state` for the calls below.
    virtual void linearize(std::span<const double> state);
    /// out = J v
    virtual void apply_jacobian(std::span<const double> v, std::span<double> out);
    /// x = (Id - sigma J)^{-1} b with the frozen J
    virtual void solve_shifted(double sigma, std::span<const double> b, std::span<double> x);

    /// Cell-wise reaction Jacobian: out = J_R(state) v
    virtual void apply_reaction_jacobian(std::span<const double> state, std::span<const double> v,
                                         std::span<double> out);
    /// Cell-wise x = (Id - sigma J_R(state))^{-1} b
    virtual void solve_reaction_shifted(double sigma, std::span<const double> state,
                                        std::span<const double> b, std::span<double> x);

    /// max |P| / h over all interfaces.
    [[nodiscard]] virtual double max_velocity_rate(std::span<const double> w) = 0;
    /// Forward-Euler stability limit of the diffusion part.
    [[nodiscard]] virtual double explicit_diffusion_limit() const = 0;
    /// Cap on the step size when velocities vanish.
    [[nodiscard]] virtual double tau_max() const { return 0.1; }
    /// Volume-weighted L1 norm summed over species.
    [[nodiscard]] virtual double l1_norm(std::span<const double> w) const = 0;
};

/// 1D finite-volume problem with cached factorizations.
class Problem1D final : public SplitProblem {
public:
    explicit Problem1D(Discretization1D disc);

    [[nodiscard]] const Discretization1D& discretization() const noexcept { return disc_; }
    [[nodiscard]] std::size_t unknowns() const override { return disc_.unknowns(); }
    [[nodiscard]] std::size_t n_species() const override { return disc_.n_species(); }

    void advection(std::span<const double> w, std::span<double> out) override { disc_.advection(w, out); }
    void diffusion(std::span<const double> w, std::span<double> out) override { disc_.diffusion(w, out); }
    void reaction(std::span<const double> w, std::span<double> out) override { disc_.reaction(w, out); }

    void solve_diffusion(double sigma, std::span<const double> b, std::span<double> x) override;
    void linearize(std::span<const double> state) override;
    void apply_jacobian(std::span<const double> v, std::span<double> out) override;
    void solve_shifted(double sigma, std::span<const double> b, std::span<double> x) override;
    void apply_reaction_jacobian(std::span<const double> state, std::span<const double> v,
                                 std::span<double> out) override;
    void solve_reaction_shifted(double sigma, std::span<const double> state,
                                std::span<const double> b, std::span<double> x) override;

    [[nodiscard]] double max_velocity_rate(std::span<const double> w) override {
        return disc_.max_velocity_rate(w);
    }
    [[nodiscard]] double explicit_diffusion_limit() const override {
        return disc_.explicit_diffusion_limit();
    }
    [[nodiscard]] double tau_max() const override { return disc_.options().tau_max; }
    [[nodiscard]] double l1_norm(std::span<const double> w) const override;

private:
    Discretization1D disc_;
    std::map<double, std::unique_ptr<ShiftedOperator1D>> diffusion_cache_;
    std::vector<double> linearized_state_;
    std::unique_ptr<BandedMatrix> jacobian_;
    std::map<double, std::unique_ptr<ShiftedOperator1D>> shifted_cache_;
};

/// 2D finite-volume problem (diffusion-implicit methods only).
class Problem2D final : public SplitProblem {
public:
    explicit Problem2D(Discretization2D disc);

    [[nodiscard]] const Discretization2D& discretization() const noexcept { return disc_; }
    [[nodiscard]] std::size_t unknowns() const override { return disc_.unknowns(); }
    [[nodiscard]] std::size_t n_species() const override { return disc_.n_species(); }

    void advection(std::span<const double> w, std::span<double> out) override { disc_.advection(w, out); }
    void diffusion(std::span<const double> w, std::span<double> out) override { disc_.diffusion(w, out); }
    void reaction(std::span<const double> w, std::span<double> out) override { disc_.reaction(w, out); }

    void solve_diffusion(double sigma, std::span<const double> b, std::span<double> x) override;
    void apply_reaction_jacobian(std::span<const double> state, std::span<const double> v,
                                 std::span<double> out) override;
    void solve_reaction_shifted(double sigma, std::span<const double> state,
                                std::span<const double> b, std::span<double> x) override;

    [[nodiscard]] double max_velocity_rate(std::span<const double> w) override {
        return disc_.max_velocity_rate(w);
    }
    [[nodiscard]] double explicit_diffusion_limit() const override {
        return disc_.explicit_diffusion_limit();
    }
    [[nodiscard]] double l1_norm(std::span<const double> w) const override;

    /// Largest CG iteration count seen so far.
    [[nodiscard]] int max_cg_iterations() const noexcept { return max_cg_iterations_; }

private:
    Discretization2D disc_;
    std::map<double, std::unique_ptr<ShiftedDiffusion2D>> diffusion_cache_;
    int max_cg_iterations_ = 0;
};

}  // namespace taxisfv
