#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace taxisfv {

/**
 * Dimensionless coefficients of the five-species uPA invasion model
 * (c, v, u, p, m). Field names follow the symbols used in configuration
 * files: `D_c`, `chi_u`, `phi_21`, ...
 */
struct UpaParameters {
    double D_c = 3.5e-4;
    double D_u = 2.5e-3;
    double D_p = 3.5e-3;
    double D_m = 4.91e-3;
    double chi_u = 3.05e-2;
    double chi_p = 3.75e-2;
    double chi_v = 2.85e-2;
    double mu_1 = 0.25;
    double mu_2 = 0.15;
    double delta = 8.15;
    double alpha_3 = 0.215;
    double alpha_4 = 0.5;
    double alpha_5 = 0.5;
    double phi_13 = 0.0;
    double phi_21 = 0.75;
    double phi_22 = 0.55;
    double phi_31 = 0.75;
    double phi_33 = 0.3;
    double phi_41 = 0.75;
    double phi_42 = 0.55;
    double phi_51 = 0.0;
    double phi_52 = 0.11;
    double phi_53 = 0.75;

    /// The fitted parameter set "P".
    static UpaParameters preset_P() { return {}; }

    struct Field {
        std::string_view name;
        double UpaParameters::*member;
    };
    static const std::array<Field, 23>& fields();

    /// Lookup by symbol name; nullptr when the name is unknown.
    double* find(std::string_view name);
    const double* find(std::string_view name) const;
};

/// Coefficients of the two-species chemotaxis model with logistic source.
struct ReducedParameters {
    double D_c = 5.25e-3;
    double D_u = 2.5e-3;
    double chi = 4e-2;
    double mu = 0.1;
    double alpha = 0.115;
    double beta = 0.4;

    struct Field {
        std::string_view name;
        double ReducedParameters::*member;
    };
    static const std::array<Field, 6>& fields();
    double* find(std::string_view name);
};

/**
 * Generic advection-reaction-diffusion system
 *
 *   w_t = D lap(w) - div(w_s * sum_r X[s][r] grad w_r) + R(w)
 *
 * with a single advected species s (the only nonzero row of X). Both built-in
 * models are instances of this type; discretizations and integrators only see
 * this interface.
 */
class SpeciesSystem {
public:
    /// out = R(state); both spans have n_species entries.
    using ReactionFn = std::function<void(std::span<const double>, std::span<double>)>;
    /// out = dR/dw(state), row-major n x n.
    using JacobianFn = std::function<void(std::span<const double>, std::span<double>)>;

    SpeciesSystem(std::vector<std::string> names, std::vector<double> diffusivities,
                  std::vector<double> taxis, ReactionFn reaction, JacobianFn jacobian,
                  std::optional<double> saturation = std::nullopt);

    [[nodiscard]] std::size_t n_species() const noexcept { return names_.size(); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] std::span<const double> diffusivities() const noexcept { return diffusivities_; }
    [[nodiscard]] double diffusivity(std::size_t s) const { return diffusivities_[s]; }
    /// X[s][r]: sensitivity of species s to the gradient of species r.
    [[nodiscard]] double taxis(std::size_t s, std::size_t r) const {
        return taxis_[s * names_.size() + r];
    }
    [[nodiscard]] std::span<const double> taxis_matrix() const noexcept { return taxis_; }
    /// Row of X for the advected species.
    [[nodiscard]] std::span<const double> taxis_row() const noexcept;
    /// Index of the species carried by the taxis flux, or nullopt if X == 0.
    [[nodiscard]] std::optional<std::size_t> advected_species() const noexcept { return advected_; }
    [[nodiscard]] std::optional<double> saturation() const noexcept { return saturation_; }
    [[nodiscard]] double max_diffusivity() const noexcept;

    void reaction(std::span<const double> state, std::span<double> out) const {
        reaction_(state, out);
    }
    void reaction_jacobian(std::span<const double> state, std::span<double> out) const {
        jacobian_(state, out);
    }

    /// Copy with X set to zero (used for the chemotaxis-free dispersion check).
    [[nodiscard]] SpeciesSystem without_taxis() const;
    /// Copy with a different diffusivity for species s.
    [[nodiscard]] SpeciesSystem with_diffusivity(std::size_t s, double value) const;

private:
    std::vector<std::string> names_;
    std::vector<double> diffusivities_;
    std::vector<double> taxis_;
    ReactionFn reaction_;
    JacobianFn jacobian_;
    std::optional<double> saturation_;
    std::optional<std::size_t> advected_;
};

/// Species order of the uPA model.
enum UpaSpecies : std::size_t { kCancer = 0, kEcm = 1, kUpa = 2, kPai = 3, kPlasmin = 4 };

[[nodiscard]] std::array<double, 5> upa_reaction(const UpaParameters& p,
                                                 std::span<const double, 5> w);
/// Row-major 5x5 Jacobian of upa_reaction.
[[nodiscard]] std::array<double, 25> upa_reaction_jacobian(const UpaParameters& p,
                                                           std::span<const double, 5> w);

[[nodiscard]] std::array<double, 2> reduced_reaction(const ReducedParameters& p,
                                                     std::span<const double, 2> w);
[[nodiscard]] std::array<double, 4> reduced_reaction_jacobian(const ReducedParameters& p,
                                                              std::span<const double, 2> w);

[[nodiscard]] SpeciesSystem make_upa_system(const UpaParameters& p);
[[nodiscard]] SpeciesSystem make_reduced_system(const ReducedParameters& p,
                                                std::optional<double> saturation = std::nullopt);

/**
 * Saturated taxis velocity Q(chi * g).
 *
 * Identity while |chi g| <= S; beyond that the magnitude grows as
 * S + r / sqrt(1 + r^2) with r = |chi g| - S, so |Q| < S + 1.
 */
[[nodiscard]] std::vector<double> saturated_flux_Q(std::span<const double> g, double chi, double S);
/// Scalar (1D) form: y is the already scaled drift chi * g.
[[nodiscard]] double saturate(double y, double S) noexcept;

}  // namespace taxisfv
