#include "taxisfv/tableau.hpp"

#include <cmath>

namespace taxisfv {

namespace {

constexpr double frac(double num, double den) { return num / den; }

}  // namespace

double ros3_diagonal() {
    const double theta = std::atan(std::sqrt(2.0) / 4.0) / 3.0;
    return 1.0 - 0.5 * std::sqrt(2.0) * std::cos(theta) + 0.5 * std::sqrt(6.0) * std::sin(theta);
}

RosenbrockTableau ros2_tableau() {
    RosenbrockTableau t;
    t.name = "ROS2";
    t.order = 2;
    const double r2 = std::sqrt(2.0);
    t.a = Coefficients(2);
    t.a(0, 0) = 1.0 - r2 / 2.0;
    t.a(1, 0) = r2 - 1.0;
    t.a(1, 1) = 1.0 - r2 / 2.0;
    t.gamma = Coefficients(2);
    t.gamma(1, 0) = 2.0 - r2;
    t.b = {0.5, 0.5};
    return t;
}

RosenbrockTableau ros3_tableau() {
    // Converted from the (alpha, Gamma, m, e) form of Sandu et al.:
    // a_jv + gamma_jv equals alpha_jv, and gamma_jv changes sign with the J term.
    RosenbrockTableau t;
    t.name = "ROS3";
    t.order = 3;
    const double g = 0.43586652150845899966;
    t.a = Coefficients(3);
    t.gamma = Coefficients(3);
    for (std::size_t j = 0; j < 3; ++j) t.a(j, j) = g;
    t.gamma(1, 0) = 0.19294655696029095597;
    t.a(1, 0) = g - t.gamma(1, 0);
    t.gamma(2, 0) = 0.0;
    t.a(2, 0) = g;
    t.gamma(2, 1) = -1.7492714812579468537;
    t.a(2, 1) = -t.gamma(2, 1);
    t.b = {-0.75457412385404315920, 1.9410040706196442036, -0.18642994676560104473};
    t.b_low = std::vector<double>{-1.5335874578414958553, 2.8174513114862577231,
                                  -0.28386385364476186859};
    return t;
}

RosenbrockTableau ros3_printed_tableau() {
    RosenbrockTableau t;
    t.name = "ROS3-printed";
    t.order = 1;
    const double a = ros3_diagonal();
    t.a = Coefficients(3);
    t.a(0, 0) = a;
    t.a(1, 0) = 0.5;
    t.a(1, 1) = a;
    t.a(2, 0) = 0.5;
    t.a(2, 1) = 0.5;
    t.a(2, 2) = a;
    const double g32 = 0.5 - 3.0 * a;
    const double g31 = -(6.0 * a * a * a - 12.0 * a * a + 6.0 * (1.0 + g32) * a +
                         2.0 * g32 * g32 - 0.5) /
                       (1.0 + 2.0 * g32);
    const double g21 = -(3.0 * a + g31 + g32);
    t.gamma = Coefficients(3);
    t.gamma(1, 0) = g21;
    t.gamma(2, 0) = g31;
    t.gamma(2, 1) = g32;
    t.b = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    t.b_low = std::vector<double>{0.5, 0.5, 0.0};
    return t;
}

ImexTableau imex2_tableau() {
    ImexTableau t;
    t.name = "IMEX2";
    t.order = 2;
    t.a_bar = Coefficients(2);
    t.a_bar(1, 0) = 0.5;
    t.a = Coefficients(2);
    t.a(1, 1) = 0.5;
    t.b_bar = {0.0, 1.0};
    t.b = {0.0, 1.0};
    t.c = {0.0, 0.5};
    return t;
}

ImexTableau imex3_tableau() {
    ImexTableau t;
    t.name = "IMEX3";
    t.order = 3;
    const double gd = frac(1767732205903.0, 4055673282236.0);
    const double c2 = frac(1767732205903.0, 2027836641118.0);
    t.c = {0.0, c2, 0.6, 1.0};

    t.a_bar = Coefficients(4);
    t.a_bar(1, 0) = c2;
    t.a_bar(2, 0) = frac(5535828885825.0, 10492691773637.0);
    t.a_bar(2, 1) = frac(788022342437.0, 10882634858940.0);
    t.a_bar(3, 0) = frac(6485989280629.0, 16251701735622.0);
    t.a_bar(3, 1) = -frac(4246266847089.0, 9704473918619.0);
    t.a_bar(3, 2) = frac(10755448449292.0, 10357097424841.0);

    const double b1 = frac(1471266399579.0, 7840856788654.0);
    const double b2 = -frac(4482444167858.0, 7529755066697.0);
    const double b3 = frac(11266239266428.0, 11593286722821.0);
    t.a = Coefficients(4);
    t.a(1, 0) = gd;
    t.a(1, 1) = gd;
    t.a(2, 0) = frac(2746238789719.0, 10658868560708.0);
    t.a(2, 1) = -frac(640167445237.0, 6845629431997.0);
    t.a(2, 2) = gd;
    t.a(3, 0) = b1;
    t.a(3, 1) = b2;
    t.a(3, 2) = b3;
    t.a(3, 3) = gd;

    t.b_bar = {b1, b2, b3, gd};
    t.b = {b1, b2, b3, gd};
    const std::vector<double> low = {
        frac(2756255671327.0, 12835298489170.0), -frac(10771552573575.0, 22201958757719.0),
        frac(9247589265047.0, 10645013368117.0), frac(2193209047091.0, 5459859503100.0)};
    t.b_bar_low = low;
    t.b_low = low;
    return t;
}

ButcherTableau rk4_tableau() {
    ButcherTableau t;
    t.name = "RK4";
    t.order = 4;
    t.a = Coefficients(4);
    t.a(1, 0) = 0.5;
    t.a(2, 1) = 0.5;
    t.a(3, 2) = 1.0;
    t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
    t.c = {0.0, 0.5, 0.5, 1.0};
    return t;
}

ButcherTableau trbdf2_tableau() {
    ButcherTableau t;
    t.name = "TR-BDF2";
    t.order = 2;
    t.a = Coefficients(3);
    t.a(1, 0) = 0.25;
    t.a(1, 1) = 0.25;
    t.a(2, 0) = 1.0 / 3.0;
    t.a(2, 1) = 1.0 / 3.0;
    t.a(2, 2) = 1.0 / 3.0;
    t.b = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    t.c = {0.0, 0.5, 1.0};
    return t;
}

}  // namespace taxisfv
