#include "taxisfv/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taxisfv {

const std::array<UpaParameters::Field, 23>& UpaParameters::fields() {
    static const std::array<Field, 23> table{{
        {"D_c", &UpaParameters::D_c},         {"D_u", &UpaParameters::D_u},
        {"D_p", &UpaParameters::D_p},         {"D_m", &UpaParameters::D_m},
        {"chi_u", &UpaParameters::chi_u},     {"chi_p", &UpaParameters::chi_p},
        {"chi_v", &UpaParameters::chi_v},     {"mu_1", &UpaParameters::mu_1},
        {"mu_2", &UpaParameters::mu_2},       {"delta", &UpaParameters::delta},
        {"alpha_3", &UpaParameters::alpha_3}, {"alpha_4", &UpaParameters::alpha_4},
        {"alpha_5", &UpaParameters::alpha_5}, {"phi_13", &UpaParameters::phi_13},
        {"phi_21", &UpaParameters::phi_21},   {"phi_22", &UpaParameters::phi_22},
        {"phi_31", &UpaParameters::phi_31},   {"phi_33", &UpaParameters::phi_33},
        {"phi_41", &UpaParameters::phi_41},   {"phi_42", &UpaParameters::phi_42},
        {"phi_51", &UpaParameters::phi_51},   {"phi_52", &UpaParameters::phi_52},
        {"phi_53", &UpaParameters::phi_53},
    }};
    return table;
}

double* UpaParameters::find(std::string_view name) {
    for (const auto& f : fields()) {
        if (f.name == name) return &(this->*f.member);
    }
    return nullptr;
}

const double* UpaParameters::find(std::string_view name) const {
    return const_cast<UpaParameters*>(this)->find(name);
}

const std::array<ReducedParameters::Field, 6>& ReducedParameters::fields() {
    static const std::array<Field, 6> table{{
        {"D_c", &ReducedParameters::D_c},
        {"D_u", &ReducedParameters::D_u},
        {"chi", &ReducedParameters::chi},
        {"mu", &ReducedParameters::mu},
        {"alpha", &ReducedParameters::alpha},
        {"beta", &ReducedParameters::beta},
    }};
    return table;
}

double* ReducedParameters::find(std::string_view name) {
    for (const auto& f : fields()) {
        if (f.name == name) return &(this->*f.member);
    }
    return nullptr;
}

SpeciesSystem::SpeciesSystem(std::vector<std::string> names, std::vector<double> diffusivities,
                             std::vector<double> taxis, ReactionFn reaction, JacobianFn jacobian,
                             std::optional<double> saturation)
    : names_(std::move(names)),
      diffusivities_(std::move(diffusivities)),
      taxis_(std::move(taxis)),
      reaction_(std::move(reaction)),
      jacobian_(std::move(jacobian)),
      saturation_(saturation) {
    const std::size_t n = names_.size();
    if (n == 0 || diffusivities_.size() != n || taxis_.size() != n * n) {
        throw std::invalid_argument("SpeciesSystem: inconsistent dimensions");
    }
    for (double d : diffusivities_) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw std::invalid_argument("SpeciesSystem: diffusivities must be finite and >= 0");
        }
    }
    if (saturation_ && !(*saturation_ > 0.0)) {
        throw std::invalid_argument("SpeciesSystem: saturation cap must be positive");
    }
    for (std::size_t s = 0; s < n; ++s) {
        const bool nonzero = std::any_of(taxis_.begin() + s * n, taxis_.begin() + (s + 1) * n,
                                         [](double x) { return x != 0.0; });
        if (!nonzero) continue;
        if (advected_) {
            throw std::invalid_argument("SpeciesSystem: only one species may be advected");
        }
        advected_ = s;
    }
}

std::span<const double> SpeciesSystem::taxis_row() const noexcept {
    if (!advected_) return {};
    return std::span<const double>(taxis_).subspan(*advected_ * n_species(), n_species());
}

double SpeciesSystem::max_diffusivity() const noexcept {
    return *std::max_element(diffusivities_.begin(), diffusivities_.end());
}

SpeciesSystem SpeciesSystem::without_taxis() const {
    return SpeciesSystem(names_, diffusivities_, std::vector<double>(taxis_.size(), 0.0),
                         reaction_, jacobian_, saturation_);
}

SpeciesSystem SpeciesSystem::with_diffusivity(std::size_t s, double value) const {
    auto d = diffusivities_;
    d.at(s) = value;
    return SpeciesSystem(names_, std::move(d), taxis_, reaction_, jacobian_, saturation_);
}

std::array<double, 5> upa_reaction(const UpaParameters& p, std::span<const double, 5> w) {
    const double c = w[0], v = w[1], u = w[2], pa = w[3], m = w[4];
    return {
        p.phi_13 * c * u + p.mu_1 * c * (1.0 - c),
        -p.delta * v * m + p.phi_21 * u * pa - p.phi_22 * v * pa + p.mu_2 * v * (1.0 - v),
        -p.phi_31 * pa * u - p.phi_33 * c * u + p.alpha_3 * c,
        -p.phi_41 * pa * u - p.phi_42 * pa * v + p.alpha_4 * m,
        -p.phi_51 * pa * u + p.phi_52 * pa * v + p.phi_53 * u * c - p.alpha_5 * m,
    };
}

std::array<double, 25> upa_reaction_jacobian(const UpaParameters& p,
                                             std::span<const double, 5> w) {
    const double c = w[0], v = w[1], u = w[2], pa = w[3], m = w[4];
    // Columns: c, v, u, p, m.
    return {
        // dR_c
        p.phi_13 * u + p.mu_1 * (1.0 - 2.0 * c), 0.0, p.phi_13 * c, 0.0, 0.0,
        // dR_v
        0.0, -p.delta * m - p.phi_22 * pa + p.mu_2 * (1.0 - 2.0 * v), p.phi_21 * pa,
        p.phi_21 * u - p.phi_22 * v, -p.delta * v,
        // dR_u
        p.alpha_3 - p.phi_33 * u, 0.0, -p.phi_31 * pa - p.phi_33 * c, -p.phi_31 * u, 0.0,
        // dR_p
        0.0, -p.phi_42 * pa, -p.phi_41 * pa, -p.phi_41 * u - p.phi_42 * v, p.alpha_4,
        // dR_m
        p.phi_53 * u, p.phi_52 * pa, -p.phi_51 * pa + p.phi_53 * c, -p.phi_51 * u + p.phi_52 * v,
        -p.alpha_5,
    };
}

std::array<double, 2> reduced_reaction(const ReducedParameters& p, std::span<const double, 2> w) {
    const double c = w[0], u = w[1];
    return {p.mu * c * (1.0 - c), p.alpha * c - p.beta * u};
}

std::array<double, 4> reduced_reaction_jacobian(const ReducedParameters& p,
                                                std::span<const double, 2> w) {
    return {p.mu * (1.0 - 2.0 * w[0]), 0.0, p.alpha, -p.beta};
}

SpeciesSystem make_upa_system(const UpaParameters& p) {
    std::vector<double> taxis(25, 0.0);
    taxis[kCancer * 5 + kEcm] = p.chi_v;
    taxis[kCancer * 5 + kUpa] = p.chi_u;
    taxis[kCancer * 5 + kPai] = p.chi_p;
    auto reaction = [p](std::span<const double> w, std::span<double> out) {
        const auto r = upa_reaction(p, w.first<5>());
        std::copy(r.begin(), r.end(), out.begin());
    };
    auto jacobian = [p](std::span<const double> w, std::span<double> out) {
        const auto j = upa_reaction_jacobian(p, w.first<5>());
        std::copy(j.begin(), j.end(), out.begin());
    };
    return SpeciesSystem({"c", "v", "u", "p", "m"}, {p.D_c, 0.0, p.D_u, p.D_p, p.D_m},
                         std::move(taxis), reaction, jacobian);
}

SpeciesSystem make_reduced_system(const ReducedParameters& p, std::optional<double> saturation) {
    auto reaction = [p](std::span<const double> w, std::span<double> out) {
        const auto r = reduced_reaction(p, w.first<2>());
        out[0] = r[0];
        out[1] = r[1];
    };
    auto jacobian = [p](std::span<const double> w, std::span<double> out) {
        const auto j = reduced_reaction_jacobian(p, w.first<2>());
        std::copy(j.begin(), j.end(), out.begin());
    };
    return SpeciesSystem({"c", "u"}, {p.D_c, p.D_u}, {0.0, p.chi, 0.0, 0.0}, reaction, jacobian,
                         saturation);
}

double saturate(double y, double S) noexcept {
    const double mag = std::abs(y);
    if (mag <= S) return y;
    const double r = mag - S;
    return std::copysign(r / std::sqrt(1.0 + r * r) + S, y);
}

std::vector<double> saturated_flux_Q(std::span<const double> g, double chi, double S) {
    if (!(S > 0.0)) {
        throw std::invalid_argument("saturated_flux_Q: S must be positive");
    }
    std::vector<double> out(g.size(), 0.0);
    double norm_g = 0.0;
    for (double x : g) norm_g += x * x;
    norm_g = std::sqrt(norm_g);
    if (norm_g == 0.0) return out;
    const double drift = std::abs(chi) * norm_g;
    if (drift <= S) {
        for (std::size_t k = 0; k < g.size(); ++k) out[k] = chi * g[k];
        return out;
    }
    const double r = drift - S;
    const double magnitude = r / std::sqrt(1.0 + r * r) + S;
    // Direction of chi * g.
    const double sign = chi < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = sign * magnitude * g[k] / norm_g;
    return out;
}

}  // namespace taxisfv
