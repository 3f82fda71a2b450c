#include "taxisfv/time_integration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "taxisfv/linear_solver.hpp"

namespace taxisfv {

namespace {

// Fixed so that references returned by Stepper::buf stay valid.
constexpr std::size_t kWorkBuffers = 64;

struct MethodEntry {
    Method method;
    std::string_view name;
};

constexpr std::array<MethodEntry, 13> kMethods{{
    {Method::Explicit, "EXPLICIT"},
    {Method::Cnd, "CND"},
    {Method::Ros2, "ROS2"},
    {Method::Ros3, "ROS3"},
    {Method::Ros3Atc, "ROS3-ATC"},
    {Method::Strang, "STRANG"},
    {Method::StrangCnd, "STRANG-CND"},
    {Method::StrangIr, "STRANG-IR"},
    {Method::Imex2, "IMEX2"},
    {Method::Imex3, "IMEX3"},
    {Method::Imex3Atc, "IMEX3-ATC"},
    {Method::Imex3AtcIr, "IMEX3-ATC-IR"},
    {Method::Imex3AtcUpwind1, "IMEX3-ATC-UPWIND1"},
}};

// y = x + tau * sum_j coeff[j] * k[j], skipping zero coefficients.
void combine(std::span<const double> x, double tau, std::span<const double> coeff,
             const std::vector<std::vector<double>*>& k, std::span<double> y) {
    std::copy(x.begin(), x.end(), y.begin());
    for (std::size_t j = 0; j < coeff.size(); ++j) {
        const double c = tau * coeff[j];
        if (c == 0.0) continue;
        const auto& kj = *k[j];
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * kj[i];
    }
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::string_view method_name(Method m) noexcept {
    for (const auto& e : kMethods) {
        if (e.method == m) return e.name;
    }
    return "UNKNOWN";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    for (const auto& e : kMethods) {
        if (e.name == name) return e.method;
    }
    return std::nullopt;
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = [] {
        std::vector<Method> v;
        for (const auto& e : kMethods) v.push_back(e.method);
        return v;
    }();
    return methods;
}

bool is_adaptive(Method m) noexcept {
    return m == Method::Ros3Atc || m == Method::Imex3Atc || m == Method::Imex3AtcIr ||
           m == Method::Imex3AtcUpwind1;
}

bool uses_first_order_fluxes(Method m) noexcept { return m == Method::Imex3AtcUpwind1; }

bool needs_coupled_jacobian(Method m) noexcept {
    return m == Method::Ros2 || m == Method::Ros3 || m == Method::Ros3Atc || m == Method::Imex3AtcIr;
}

NumericalFailure::NumericalFailure(double t, std::size_t cell, std::size_t species)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "non-finite value at t=" << t << ", cell " << cell << ", species " << species;
          return os.str();
      }()),
      t_(t),
      cell_(cell),
      species_(species) {}

double step_size_factor(double eps, double tol, const StepControllerConfig& cfg) {
    return cfg.safety * std::pow(tol / eps, cfg.exponent);
}

void check_finite(std::span<const double> w, std::size_t n_species, double t) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!std::isfinite(w[i])) throw NumericalFailure(t, i / n_species, i % n_species);
    }
}

// ---------------------------------------------------------------------------

Stepper::Stepper(Method method, StepControllerConfig config)
    : method_(method), config_(config), work_(kWorkBuffers) {
    switch (method) {
        case Method::Ros2: ros_ = ros2_tableau(); break;
        case Method::Ros3:
        case Method::Ros3Atc: ros_ = ros3_tableau(); break;
        case Method::Imex2: imex_ = imex2_tableau(); break;
        case Method::Imex3:
        case Method::Imex3Atc:
        case Method::Imex3AtcIr:
        case Method::Imex3AtcUpwind1: imex_ = imex3_tableau(); break;
        default: break;
    }
}

bool Stepper::has_embedded() const noexcept { return is_adaptive(method_); }

std::vector<double>& Stepper::buf(std::size_t k, std::size_t n) {
    work_.at(k).resize(n);
    return work_[k];
}

void Stepper::step(SplitProblem& p, std::span<const double> w, double tau, std::span<double> out,
                   std::span<double> low) {
    switch (method_) {
        case Method::Explicit: explicit_euler(p, w, tau, out); break;
        case Method::Cnd: cnd(p, w, tau, out); break;
        case Method::Ros2:
        case Method::Ros3: rosenbrock(p, ros_, w, tau, out, {}); break;
        case Method::Ros3Atc: rosenbrock(p, ros_, w, tau, out, low); break;
        case Method::Strang: strang(p, DiffusionSub::TrBdf2, ReactionSub::Rk4, w, tau, out); break;
        case Method::StrangCnd:
            strang(p, DiffusionSub::CrankNicolson, ReactionSub::Rk4, w, tau, out);
            break;
        case Method::StrangIr: strang(p, DiffusionSub::TrBdf2, ReactionSub::Ros2, w, tau, out); break;
        case Method::Imex2:
        case Method::Imex3: imex(p, imex_, false, w, tau, out, {}); break;
        case Method::Imex3Atc:
        case Method::Imex3AtcUpwind1: imex(p, imex_, false, w, tau, out, low); break;
        case Method::Imex3AtcIr: imex(p, imex_, true, w, tau, out, low); break;
    }
}

void Stepper::explicit_euler(SplitProblem& p, std::span<const double> w, double tau,
                             std::span<double> out) {
    const std::size_t n = w.size();
    auto& f = buf(0, n);
    auto& g = buf(1, n);
    p.advection(w, f);
    p.reaction(w, g);
    for (std::size_t i = 0; i < n; ++i) f[i] += g[i];
    p.diffusion(w, g);
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] + tau * (f[i] + g[i]);
}

void Stepper::cnd(SplitProblem& p, std::span<const double> w, double tau, std::span<double> out) {
    const std::size_t n = w.size();
    auto& f = buf(0, n);
    auto& g = buf(1, n);
    auto& rhs = buf(2, n);
    p.advection(w, f);
    p.reaction(w, g);
    for (std::size_t i = 0; i < n; ++i) f[i] += g[i];
    p.diffusion(w, g);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] + tau * (0.5 * g[i] + f[i]);
    p.solve_diffusion(0.5 * tau, rhs, out);
}

void Stepper::rosenbrock(SplitProblem& p, const RosenbrockTableau& t, std::span<const double> w,
                         double tau, std::span<double> out, std::span<double> low) {
    const std::size_t n = w.size();
    const std::size_t s = t.stages();
    std::vector<std::vector<double>*> k(s);
    for (std::size_t j = 0; j < s; ++j) k[j] = &buf(10 + j, n);
    auto& arg = buf(0, n);
    auto& g = buf(1, n);
    auto& tmp = buf(2, n);
    auto& sum = buf(3, n);
    auto& rhs = buf(4, n);

    p.linearize(w);
    std::vector<double> alpha(s), gam(s);
    for (std::size_t j = 0; j < s; ++j) {
        for (std::size_t v = 0; v < s; ++v) {
            alpha[v] = v < j ? t.a(j, v) + t.gamma(j, v) : 0.0;
            gam[v] = v < j ? t.gamma(j, v) : 0.0;
        }
        combine(w, tau, alpha, k, arg);
        p.advection(arg, g);
        p.reaction(arg, tmp);
        for (std::size_t i = 0; i < n; ++i) g[i] += tmp[i];
        p.diffusion(arg, tmp);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = g[i] + tmp[i];
        if (std::any_of(gam.begin(), gam.end(), [](double x) { return x != 0.0; })) {
            std::fill(sum.begin(), sum.end(), 0.0);
            for (std::size_t v = 0; v < j; ++v) {
                if (gam[v] == 0.0) continue;
                const auto& kv = *k[v];
                for (std::size_t i = 0; i < n; ++i) sum[i] += gam[v] * kv[i];
            }
            p.apply_jacobian(sum, tmp);
            for (std::size_t i = 0; i < n; ++i) rhs[i] -= tau * tmp[i];
        }
        p.solve_shifted(t.a(j, j) * tau, rhs, *k[j]);
        for (double x : *k[j]) {
            if (!std::isfinite(x)) {
                throw ConvergenceFailure("Rosenbrock stage diverged", std::numeric_limits<double>::infinity());
            }
        }
    }
    combine(w, tau, t.b, k, out);
    if (!low.empty() && t.b_low) combine(w, tau, *t.b_low, k, low);
}

void Stepper::newton_stage(SplitProblem& p, double sigma, std::span<const double> rhs,
                           std::span<double> W) {
    const std::size_t n = rhs.size();
    auto& F = buf(30, n);
    auto& tmp = buf(31, n);
    auto& delta = buf(32, n);
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < config_.newton_max_iterations; ++it) {
        p.diffusion(W, F);
        p.reaction(W, tmp);
        for (std::size_t i = 0; i < n; ++i) F[i] = rhs[i] - W[i] + sigma * (F[i] + tmp[i]);
        p.linearize(W);
        p.solve_shifted(sigma, F, delta);
        for (std::size_t i = 0; i < n; ++i) W[i] += delta[i];
        last = max_abs(delta);
        if (!std::isfinite(last)) break;
        if (last <= config_.newton_tolerance * (1.0 + max_abs(W))) return;
    }
    throw ConvergenceFailure("Newton iteration for an implicit stage did not converge", last);
}

void Stepper::imex(SplitProblem& p, const ImexTableau& t, bool implicit_reaction,
                   std::span<const double> w, double tau, std::span<double> out,
                   std::span<double> low) {
    const std::size_t n = w.size();
    const std::size_t s = t.stages();
    std::vector<std::vector<double>*> E(s), I(s);
    for (std::size_t j = 0; j < s; ++j) {
        E[j] = &buf(10 + j, n);
        I[j] = &buf(20 + j, n);
    }
    auto& rhs = buf(0, n);
    auto& W = buf(1, n);
    auto& tmp = buf(2, n);

    for (std::size_t i = 0; i < s; ++i) {
        std::copy(w.begin(), w.end(), rhs.begin());
        for (std::size_t j = 0; j < i; ++j) {
            const double ce = tau * t.a_bar(i, j);
            const double ci = tau * t.a(i, j);
            const auto& Ej = *E[j];
            const auto& Ij = *I[j];
            if (ce != 0.0) {
                for (std::size_t q = 0; q < n; ++q) rhs[q] += ce * Ej[q];
            }
            if (ci != 0.0) {
                for (std::size_t q = 0; q < n; ++q) rhs[q] += ci * Ij[q];
            }
        }
        const double sigma = tau * t.a(i, i);
        if (sigma == 0.0) {
            W = rhs;
        } else if (implicit_reaction) {
            W = rhs;
            newton_stage(p, sigma, rhs, W);
        } else {
            p.solve_diffusion(sigma, rhs, W);
        }
        auto& Ii = *I[i];
        auto& Ei = *E[i];
        p.diffusion(W, Ii);
        p.advection(W, Ei);
        p.reaction(W, tmp);
        auto& target = implicit_reaction ? Ii : Ei;
        for (std::size_t q = 0; q < n; ++q) target[q] += tmp[q];
    }

    auto finish = [&](std::span<const double> bb, std::span<const double> bi, std::span<double> y) {
        std::copy(w.begin(), w.end(), y.begin());
        for (std::size_t j = 0; j < s; ++j) {
            const double ce = tau * bb[j];
            const double ci = tau * bi[j];
            const auto& Ej = *E[j];
            const auto& Ij = *I[j];
            for (std::size_t q = 0; q < n; ++q) y[q] += ce * Ej[q] + ci * Ij[q];
        }
    };
    finish(t.b_bar, t.b, out);
    if (!low.empty() && t.b_bar_low && t.b_low) finish(*t.b_bar_low, *t.b_low, low);
}

void Stepper::rk4_advection(SplitProblem& p, std::span<double> w, double tau) {
    const std::size_t n = w.size();
    auto& k = buf(40, n);
    auto& arg = buf(41, n);
    auto& acc = buf(42, n);
    static const ButcherTableau rk = rk4_tableau();
    std::fill(acc.begin(), acc.end(), 0.0);
    std::copy(w.begin(), w.end(), arg.begin());
    for (std::size_t j = 0; j < 4; ++j) {
        p.advection(arg, k);
        for (std::size_t i = 0; i < n; ++i) acc[i] += rk.b[j] * k[i];
        if (j + 1 < 4) {
            const double c = tau * rk.a(j + 1, j);
            for (std::size_t i = 0; i < n; ++i) arg[i] = w[i] + c * k[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) w[i] += tau * acc[i];
}

void Stepper::rk4_reaction(SplitProblem& p, std::span<double> w, double tau) {
    const std::size_t n = w.size();
    auto& k = buf(40, n);
    auto& arg = buf(41, n);
    auto& acc = buf(42, n);
    static const ButcherTableau rk = rk4_tableau();
    std::fill(acc.begin(), acc.end(), 0.0);
    std::copy(w.begin(), w.end(), arg.begin());
    for (std::size_t j = 0; j < 4; ++j) {
        p.reaction(arg, k);
        for (std::size_t i = 0; i < n; ++i) acc[i] += rk.b[j] * k[i];
        if (j + 1 < 4) {
            const double c = tau * rk.a(j + 1, j);
            for (std::size_t i = 0; i < n; ++i) arg[i] = w[i] + c * k[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) w[i] += tau * acc[i];
}

void Stepper::ros2_reaction(SplitProblem& p, std::span<double> w, double tau) {
    static const RosenbrockTableau t = ros2_tableau();
    const std::size_t n = w.size();
    auto& w0 = buf(43, n);
    auto& k1 = buf(44, n);
    auto& k2 = buf(45, n);
    auto& arg = buf(46, n);
    auto& rhs = buf(47, n);
    auto& tmp = buf(48, n);
    std::copy(w.begin(), w.end(), w0.begin());
    const double sigma = t.a(0, 0) * tau;

    p.reaction(w0, rhs);
    p.solve_reaction_shifted(sigma, w0, rhs, k1);

    const double alpha = t.a(1, 0) + t.gamma(1, 0);
    for (std::size_t i = 0; i < n; ++i) arg[i] = w0[i] + tau * alpha * k1[i];
    p.reaction(arg, rhs);
    p.apply_reaction_jacobian(w0, k1, tmp);
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= tau * t.gamma(1, 0) * tmp[i];
    p.solve_reaction_shifted(t.a(1, 1) * tau, w0, rhs, k2);

    for (std::size_t i = 0; i < n; ++i) w[i] = w0[i] + tau * (t.b[0] * k1[i] + t.b[1] * k2[i]);
}

void Stepper::trbdf2_diffusion(SplitProblem& p, std::span<double> w, double tau) {
    const std::size_t n = w.size();
    auto& f1 = buf(50, n);
    auto& f2 = buf(51, n);
    auto& rhs = buf(52, n);
    auto& w2 = buf(53, n);
    p.diffusion(w, f1);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] + 0.25 * tau * f1[i];
    p.solve_diffusion(0.25 * tau, rhs, w2);
    p.diffusion(w2, f2);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] + tau / 3.0 * (f1[i] + f2[i]);
    p.solve_diffusion(tau / 3.0, rhs, w);
}

void Stepper::cn_diffusion(SplitProblem& p, std::span<double> w, double tau) {
    const std::size_t n = w.size();
    auto& f = buf(50, n);
    auto& rhs = buf(52, n);
    p.diffusion(w, f);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] + 0.5 * tau * f[i];
    p.solve_diffusion(0.5 * tau, rhs, w);
}

void Stepper::strang(SplitProblem& p, DiffusionSub dsub, ReactionSub rsub,
                     std::span<const double> w, double tau, std::span<double> out) {
    std::copy(w.begin(), w.end(), out.begin());
    auto diffuse = [&](double h) {
        if (dsub == DiffusionSub::TrBdf2) {
            trbdf2_diffusion(p, out, h);
        } else {
            cn_diffusion(p, out, h);
        }
    };
    rk4_advection(p, out, 0.5 * tau);
    diffuse(0.5 * tau);
    if (rsub == ReactionSub::Rk4) {
        rk4_reaction(p, out, tau);
    } else {
        ros2_reaction(p, out, tau);
    }
    diffuse(0.5 * tau);
    rk4_advection(p, out, 0.5 * tau);
}

// ---------------------------------------------------------------------------

TimeIntegrator::TimeIntegrator(Method method, StepControllerConfig config)
    : stepper_(method, config), config_(config) {
    if (!(config.cfl > 0.0 && config.cfl <= 1.0)) {
        throw std::invalid_argument("CFL number must lie in (0, 1]");
    }
}

double TimeIntegrator::step_bound(SplitProblem& p, std::span<const double> w) const {
    const double rate = p.max_velocity_rate(w);
    double tau = p.tau_max();
    if (rate > 0.0) tau = std::min(tau, config_.cfl / rate);
    if (stepper_.method() == Method::Explicit) tau = std::min(tau, p.explicit_diffusion_limit());
    return tau;
}

StepInfo TimeIntegrator::advance(SplitProblem& p, std::vector<double>& w, double t, double t_end) {
    const std::size_t n = w.size();
    out_.resize(n);
    const double remaining = t_end - t;
    const double bound = step_bound(p, w);
    const auto clip = [&](double tau) { return std::min(tau, remaining); };

    StepInfo info;
    if (!is_adaptive(stepper_.method())) {
        info.tau = clip(bound);
        stepper_.step(p, w, info.tau, out_);
        check_finite(out_, p.n_species(), t + info.tau);
        w.swap(out_);
        return info;
    }

    low_.resize(n);
    double tau = clip(std::min(tau_next_.value_or(bound), bound));
    const double tol = std::max(config_.tol_floor, config_.tol_relative * p.l1_norm(w));
    double eps = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        bool ok = true;
        try {
            stepper_.step(p, w, tau, out_, low_);
        } catch (const LinearSolverError&) {
            ok = false;
        } catch (const ConvergenceFailure&) {
            ok = false;
        }
        eps = std::numeric_limits<double>::infinity();
        if (ok) {
            eps = 0.0;
            for (std::size_t i = 0; i < n; ++i) eps = std::max(eps, std::abs(out_[i] - low_[i]));
        }
        if (std::isfinite(eps) && eps < tol) {
            const double grow = eps == 0.0 ? config_.growth_cap
                                           : std::min(config_.growth_cap,
                                                      step_size_factor(eps, tol, config_));
            tau_next_ = std::min(tau * grow, bound);
            check_finite(out_, p.n_species(), t + tau);
            info.tau = tau;
            info.retries = attempt;
            info.error_estimate = eps;
            w.swap(out_);
            return info;
        }
        ++rejected_;
        tau *= std::isfinite(eps) ? step_size_factor(eps, tol, config_) : 0.25;
    }
    throw ConvergenceFailure("step-size control exceeded the retry limit", eps);
}

IntegrateResult integrate(SplitProblem& p, TimeIntegrator& integrator, std::vector<double>& w,
                          double t0, double t_end, const StepObserver& observer) {
    IntegrateResult r;
    r.t = t0;
    const std::size_t rejected0 = integrator.rejected_steps();
    const double snap = 1e-12 * std::max(1.0, std::abs(t_end));
    while (r.t < t_end) {
        const StepInfo info = integrator.advance(p, w, r.t, t_end);
        r.t += info.tau;
        if (t_end - r.t <= snap) r.t = t_end;
        ++r.steps;
        if (observer) observer(r.t, info.tau, w);
    }
    r.rejected = integrator.rejected_steps() - rejected0;
    return r;
}

}  // namespace taxisfv
