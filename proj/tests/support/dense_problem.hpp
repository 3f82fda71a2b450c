#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <span>

#include "taxisfv/split_problem.hpp"

namespace taxisfv::testkit {

/**
 * Small dense SplitProblem: w' = A w + D w + R(w) with constant matrices A, D
 * and a user reaction with Jacobian. Implicit solves use dense LU.
 */
class DenseProblem final : public SplitProblem {
public:
    using Reaction = std::function<void(std::span<const double>, std::span<double>)>;
    using ReactionJacobian = std::function<Eigen::MatrixXd(std::span<const double>)>;

    DenseProblem(Eigen::MatrixXd A, Eigen::MatrixXd D, Reaction R = {}, ReactionJacobian JR = {})
        : A_(std::move(A)), D_(std::move(D)), R_(std::move(R)), JR_(std::move(JR)) {}

    std::size_t unknowns() const override { return static_cast<std::size_t>(D_.rows()); }
    std::size_t n_species() const override { return 1; }

    void advection(std::span<const double> w, std::span<double> out) override { mul(A_, w, out); }
    void diffusion(std::span<const double> w, std::span<double> out) override { mul(D_, w, out); }
    void reaction(std::span<const double> w, std::span<double> out) override {
        if (R_) {
            R_(w, out);
        } else {
            for (auto& x : out) x = 0.0;
        }
    }

    void solve_diffusion(double sigma, std::span<const double> b, std::span<double> x) override {
        solve(identity() - sigma * D_, b, x);
    }
    void linearize(std::span<const double> state) override { J_ = D_ + reaction_jacobian(state); }
    void apply_jacobian(std::span<const double> v, std::span<double> out) override { mul(J_, v, out); }
    void solve_shifted(double sigma, std::span<const double> b, std::span<double> x) override {
        solve(identity() - sigma * J_, b, x);
    }
    void apply_reaction_jacobian(std::span<const double> state, std::span<const double> v,
                                 std::span<double> out) override {
        mul(reaction_jacobian(state), v, out);
    }
    void solve_reaction_shifted(double sigma, std::span<const double> state, std::span<const double> b,
                                std::span<double> x) override {
        solve(identity() - sigma * reaction_jacobian(state), b, x);
    }

    double max_velocity_rate(std::span<const double>) override { return 0.0; }
    double explicit_diffusion_limit() const override {
        return std::numeric_limits<double>::infinity();
    }
    double tau_max() const override { return tau_max_; }
    double l1_norm(std::span<const double> w) const override {
        double s = 0.0;
        for (double x : w) s += std::abs(x);
        return s;
    }

    void set_tau_max(double t) { tau_max_ = t; }

private:
    Eigen::MatrixXd identity() const { return Eigen::MatrixXd::Identity(D_.rows(), D_.cols()); }
    Eigen::MatrixXd reaction_jacobian(std::span<const double> state) const {
        if (JR_) return JR_(state);
        return Eigen::MatrixXd::Zero(D_.rows(), D_.cols());
    }
    static void mul(const Eigen::MatrixXd& M, std::span<const double> w, std::span<double> out) {
        const Eigen::Map<const Eigen::VectorXd> x(w.data(), static_cast<Eigen::Index>(w.size()));
        Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = M * x;
    }
    static void solve(const Eigen::MatrixXd& M, std::span<const double> b, std::span<double> x) {
        const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
        const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
        Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) = sol;
    }

    Eigen::MatrixXd A_, D_, J_;
    Reaction R_;
    ReactionJacobian JR_;
    double tau_max_ = 0.1;
};

}  // namespace taxisfv::testkit
