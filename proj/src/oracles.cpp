#include "qlc/oracles.hpp"

#include <cmath>
#include <complex>

#include "qlc/errors.hpp"

namespace qlc {

namespace {

void check_rates(const CavityOracleParams& p) {
    if (p.k1 < 0.0 || p.k2 < 0.0 || p.k3 < 0.0 || p.k_n < 0.0)
        throw InvalidKindParams("cavity oracle: rates must be nonnegative");
}

double guard_denominator(double den) {
    if (den <= 0.0)
        throw InvalidKindParams("cavity oracle: nonpositive denominator");
    return den;
}

double squeezer_cost(const CavityOracleParams& p, double thermal_term) {
    const double sh = std::sinh(p.eta);
    const double ch = std::cosh(p.eta);
    const double root = std::sqrt(p.k1 * p.k2);
    const cplx loop = std::polar(1.0, p.phi);
    const cplx g = p.k1 + p.k2 + p.k3 + 2.0 * root * ch * loop;
    const cplx pole = g + cplx(0.0, 2.0 * p.delta);
    const double num =
        (p.k2 * sh * sh + thermal_term -
         2.0 * p.k2 * root * ch * sh * sh * (loop / pole))
            .real();
    const double den =
        (g - 4.0 * p.k1 * p.k2 * sh * sh / pole).real();
    return num / guard_denominator(den);
}

}  // namespace

double oracle_cavity_cost(CavityOracleKind kind,
                          const CavityOracleParams& p) {
    check_rates(p);
    const double total = p.k1 + p.k2 + p.k3;
    const double root = std::sqrt(p.k1 * p.k2);
    switch (kind) {
        case CavityOracleKind::no_control:
            return p.k3 * p.k_n / guard_denominator(total);
        case CavityOracleKind::trivial:
            return p.k3 * p.k_n / guard_denominator(total + 2.0 * root);
        case CavityOracleKind::heterodyne: {
            const double sh = std::sinh(p.eta);
            return (p.k2 * sh * sh + p.k3 * p.k_n) /
                   guard_denominator(total + 2.0 * root * sh);
        }
        case CavityOracleKind::squeezer:
            return squeezer_cost(p, 2.0 * p.k_n);
        case CavityOracleKind::two_mode: {
            const double sh = std::sinh(p.eta);
            const double ch = std::cosh(p.eta);
            return (p.k2 * sh * sh + p.k3 * p.k_n) /
                   guard_denominator(total + 2.0 * root * ch);
        }
    }
    throw InvalidKindParams("cavity oracle: unknown kind");
}

double oracle_squeezer_k3(const CavityOracleParams& p) {
    check_rates(p);
    return squeezer_cost(p, p.k3 * p.k_n);
}

double oracle_threshold(double k1, double k2, double k3) {
    if (k1 * k2 <= 0.0 || k3 <= 0.0)
        throw DivisionByZero("oracle_threshold: needs k1 k2 > 0 and k3 > 0");
    const double root = std::sqrt(k1 * k2);
    return k1 * (k1 + k2 + k3 + 2.0 * root) / (root * k3);
}

double oracle_refrigerator(double k_m, double kappa, double t_hot) {
    if (kappa + k_m <= 0.0)
        throw DivisionByZero("oracle_refrigerator: kappa + k_m must be > 0");
    return k_m * t_hot / (kappa + k_m);
}

}  // namespace qlc
