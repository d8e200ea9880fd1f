#include "bandtouch/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bandtouch {

namespace {

using std::numbers::pi;

void require(bool cond, const char* msg) {
    if (!cond) {
        throw std::invalid_argument(msg);
    }
}

}  // namespace

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) {
        r *= x;
    }
    return r;
}

void validate(const ModelSpec& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PWave>) {
                require(m.m > 0.0, "pw: mass m must be positive");
                require(std::abs(m.delta) != 0.0, "pw: coupling delta must be nonzero");
            } else if constexpr (std::is_same_v<T, GrapheneQuadratic> ||
                                 std::is_same_v<T, GrapheneTightBinding>) {
                require(m.hopping > 0.0, "graphene: hopping must be positive");
                require(m.lattice > 0.0, "graphene: lattice constant must be positive");
            } else if constexpr (std::is_same_v<T, PolyDiag>) {
                require(!m.coeffs.empty(), "poly: coefficient list must be non-empty");
                require(m.delta != 0.0, "poly: delta must be nonzero");
            } else if constexpr (std::is_same_v<T, GL>) {
                require(m.n >= 1, "gl: exponent n must be >= 1");
                require(m.delta1 > 0.0, "gl: delta1 must be positive");
            } else {
                static_assert(std::is_same_v<T, GP>);
                require(m.n >= 1, "gp: exponent n must be >= 1");
                require(m.delta2 > 0.0, "gp: delta2 must be positive");
            }
        },
        model);
}

std::string family_name(const ModelSpec& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PWave>) {
                return "pw";
            } else if constexpr (std::is_same_v<T, GrapheneQuadratic>) {
                return "graphene_quadratic";
            } else if constexpr (std::is_same_v<T, GrapheneTightBinding>) {
                return "graphene_tb";
            } else if constexpr (std::is_same_v<T, PolyDiag>) {
                return "poly";
            } else if constexpr (std::is_same_v<T, GL>) {
                return "gl";
            } else {
                return "gp";
            }
        },
        model);
}

namespace {

double poly_eval(const std::vector<double>& coeffs, double lambda) {
    // g(λ) = Σ_{j>=1} a_j λ^j, coeffs[j-1] = a_j
    double g = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        g = g * lambda + coeffs[j];
    }
    return g * lambda;
}

double poly_deriv(const std::vector<double>& coeffs, double lambda) {
    double d = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        d = d * lambda + static_cast<double>(j + 1) * coeffs[j];
    }
    return d;
}

cplx structure_factor(double h, double a, double kx, double ky) {
    const cplx i(0.0, 1.0);
    return -h * std::exp(-i * kx * a) *
           (1.0 + 2.0 * std::exp(i * 1.5 * kx * a) *
                      std::cos(0.5 * std::sqrt(3.0) * ky * a));
}

cplx structure_factor_dkx(double h, double a, double kx, double ky) {
    const cplx i(0.0, 1.0);
    const double c = std::cos(0.5 * std::sqrt(3.0) * ky * a);
    const cplx e1 = std::exp(-i * kx * a);
    const cplx e2 = std::exp(i * 1.5 * kx * a);
    return -h * (-i * a * e1 * (1.0 + 2.0 * e2 * c) + e1 * 2.0 * (i * 1.5 * a) * e2 * c);
}

}  // namespace

HermitianMatrix2 eval_hamiltonian(const ModelSpec& model, double lambda) {
    return std::visit(
        [lambda](const auto& m) -> HermitianMatrix2 {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PWave>) {
                const double d = lambda * lambda / (2.0 * m.m);
                return {d, -d, lambda * m.delta};
            } else if constexpr (std::is_same_v<T, GrapheneQuadratic>) {
                const double g = m.gamma();
                const double d = 0.5 * g * m.lattice * lambda * lambda;
                return {d, -d, cplx(-2.0 * g * lambda)};
            } else if constexpr (std::is_same_v<T, GrapheneTightBinding>) {
                const double kx = 2.0 * pi / (3.0 * m.lattice) + lambda;
                const double ky = 2.0 * pi / (3.0 * m.lattice * std::sqrt(3.0));
                return {0.0, 0.0, structure_factor(m.hopping, m.lattice, kx, ky)};
            } else if constexpr (std::is_same_v<T, PolyDiag>) {
                const double g = poly_eval(m.coeffs, lambda);
                return {g, -g, cplx(m.delta * lambda)};
            } else if constexpr (std::is_same_v<T, GL>) {
                const double d = ipow(lambda, m.n);
                return {d, -d, cplx(m.delta1 * lambda)};
            } else {
                const double d = ipow(lambda, m.n);
                return {d, -d, cplx(m.delta2)};
            }
        },
        model);
}

HermitianMatrix2 hamiltonian_derivative(const ModelSpec& model, double lambda) {
    return std::visit(
        [lambda](const auto& m) -> HermitianMatrix2 {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PWave>) {
                const double d = lambda / m.m;
                return {d, -d, m.delta};
            } else if constexpr (std::is_same_v<T, GrapheneQuadratic>) {
                const double g = m.gamma();
                const double d = g * m.lattice * lambda;
                return {d, -d, cplx(-2.0 * g)};
            } else if constexpr (std::is_same_v<T, GrapheneTightBinding>) {
                const double kx = 2.0 * pi / (3.0 * m.lattice) + lambda;
                const double ky = 2.0 * pi / (3.0 * m.lattice * std::sqrt(3.0));
                return {0.0, 0.0, structure_factor_dkx(m.hopping, m.lattice, kx, ky)};
            } else if constexpr (std::is_same_v<T, PolyDiag>) {
                const double d = poly_deriv(m.coeffs, lambda);
                return {d, -d, cplx(m.delta)};
            } else if constexpr (std::is_same_v<T, GL>) {
                const double d = m.n * ipow(lambda, m.n - 1);
                return {d, -d, cplx(m.delta1)};
            } else {
                const double d = m.n * ipow(lambda, m.n - 1);
                return {d, -d, cplx(0.0)};
            }
        },
        model);
}

cplx graphene_structure_factor(const GrapheneTightBinding& model, double kx,
                               double ky) {
    return structure_factor(model.hopping, model.lattice, kx, ky);
}

cplx graphene_structure_factor_quadratic(const GrapheneTightBinding& model,
                                         double q) {
    // Taylor of s(K + (q,0)) to second order. The relative phase between
    // the linear and quadratic coefficients is what survives gauging.
    const double h = model.hopping;
    const double a = model.lattice;
    const cplx i(0.0, 1.0);
    const cplx alpha_conj = std::exp(-i * (2.0 * pi / 3.0));
    return -(1.5 * h * a) * alpha_conj * (-i * q) -
           (0.375 * h * a * a) * alpha_conj * (i * q) * (i * q);
}

ModelSpec graphene_effective_model(const GrapheneTightBinding& model) {
    return GrapheneQuadratic{model.hopping, model.lattice};
}

nlohmann::json model_to_json(const ModelSpec& model) {
    nlohmann::json j;
    j["family"] = family_name(model);
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PWave>) {
                j["m"] = m.m;
                j["delta_re"] = m.delta.real();
                j["delta_im"] = m.delta.imag();
            } else if constexpr (std::is_same_v<T, GrapheneQuadratic> ||
                                 std::is_same_v<T, GrapheneTightBinding>) {
                j["hopping"] = m.hopping;
                j["lattice"] = m.lattice;
            } else if constexpr (std::is_same_v<T, PolyDiag>) {
                j["coeffs"] = m.coeffs;
                j["delta"] = m.delta;
            } else if constexpr (std::is_same_v<T, GL>) {
                j["n"] = m.n;
                j["delta1"] = m.delta1;
            } else {
                j["n"] = m.n;
                j["delta2"] = m.delta2;
            }
        },
        model);
    return j;
}

ModelSpec model_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    ModelSpec model;
    if (family == "pw") {
        model = PWave{j.at("m").get<double>(),
                      cplx(j.at("delta_re").get<double>(),
                           j.value("delta_im", 0.0))};
    } else if (family == "graphene_quadratic") {
        model = GrapheneQuadratic{j.at("hopping").get<double>(),
                                  j.at("lattice").get<double>()};
    } else if (family == "graphene_tb") {
        model = GrapheneTightBinding{j.at("hopping").get<double>(),
                                     j.at("lattice").get<double>()};
    } else if (family == "poly") {
        model = PolyDiag{j.at("coeffs").get<std::vector<double>>(),
                         j.at("delta").get<double>()};
    } else if (family == "gl") {
        model = GL{j.at("n").get<int>(), j.at("delta1").get<double>()};
    } else if (family == "gp") {
        model = GP{j.at("n").get<int>(), j.at("delta2").get<double>()};
    } else {
        throw std::invalid_argument("unknown model family: " + family);
    }
    validate(model);
    return model;
}

}  // namespace bandtouch
