#include "bandtouch/fis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bandtouch/io.hpp"

namespace bandtouch {

namespace {

// p²Δ²λ^{2(p-1)} / (4 (Δ² + λ^{2p})²). Shared by GL (p = n-1) and
// GP (p = n) so their identity holds bitwise.
double chi_monomial(int p, double delta, double lambda) {
    if (p == 0) {
        return 0.0;
    }
    const double num = p * delta * ipow(lambda, p - 1);
    const double w = ipow(lambda, p);
    const double den = delta * delta + w * w;
    return (num * num) / (4.0 * den * den);
}

// (Δ/2 · (a₂ + λk(λ)) / (Δ² + (g(λ)/λ)²))², written without the removable
// division so λ = 0 evaluates directly to the limit.
double chi_poly(const std::vector<double>& coeffs, double delta,
                double lambda) {
    // a₂ + λk(λ) = Σ_{j>=2} (j-1) a_j λ^{j-2}
    double t = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 1;) {
        t = t * lambda + static_cast<double>(j) * coeffs[j];
    }
    // g(λ)/λ = Σ_{j>=1} a_j λ^{j-1}
    double u = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        u = u * lambda + coeffs[j];
    }
    const double den = delta * delta + u * u;
    const double q = 0.5 * delta * t / den;
    return q * q;
}

// Golden-section search for the extremum of f on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, bool maximize, double tol = 1e-10) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    const double sign = maximize ? 1.0 : -1.0;
    while (b - a > tol) {
        if (sign * f1 > sign * f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

bool has_closed_form(const ModelSpec& model) {
    return !std::holds_alternative<GrapheneTightBinding>(model);
}

}  // namespace

double chi_matrix_element(const HermitianMatrix2& h,
                          const HermitianMatrix2& dh) {
    const EigenSystem es = eigensystem(h);
    if (es.degenerate) {
        throw DegenerateError(
            "chi_matrix_element: eigensystem is degenerate; use the closed "
            "form or the zero limit at the touching point");
    }
    const cplx me = inner(es.v_excited, dh.apply(es.v_ground));
    const double amp = std::abs(me) / es.gap();
    return amp * amp;
}

double chi_matrix_element(const ModelSpec& model, double lambda) {
    return chi_matrix_element(eval_hamiltonian(model, lambda),
                              hamiltonian_derivative(model, lambda));
}

double chi_closed_form(const ModelSpec& model, double lambda) {
    return std::visit(
        [lambda](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GL>) {
                return chi_monomial(m.n - 1, m.delta1, lambda);
            } else if constexpr (std::is_same_v<T, GP>) {
                return chi_monomial(m.n, m.delta2, lambda);
            } else if constexpr (std::is_same_v<T, PolyDiag>) {
                return chi_poly(m.coeffs, m.delta, lambda);
            } else if constexpr (std::is_same_v<T, PWave>) {
                return chi_poly({0.0, 0.5 / m.m}, std::abs(m.delta), lambda);
            } else if constexpr (std::is_same_v<T, GrapheneQuadratic>) {
                const double g = m.gamma();
                return chi_poly({0.0, 0.5 * g * m.lattice}, 2.0 * g, lambda);
            } else {
                throw UnsupportedFamilyError(
                    "chi_closed_form: no closed form for the tight-binding "
                    "model");
            }
        },
        model);
}

double chi_zero_limit(const ModelSpec& model) {
    return chi_closed_form(model, 0.0);
}

std::vector<double> mfp_closed_form(const ModelSpec& model) {
    if (const auto* gl = std::get_if<GL>(&model); gl && gl->n >= 3) {
        const double lam = std::pow(
            (gl->n - 2.0) / gl->n * gl->delta1 * gl->delta1,
            1.0 / (2.0 * (gl->n - 1.0)));
        return {-lam, lam};
    }
    if (const auto* gp = std::get_if<GP>(&model); gp && gp->n >= 2) {
        const double lam = std::pow(
            (gp->n - 1.0) / (gp->n + 1.0) * gp->delta2 * gp->delta2,
            1.0 / (2.0 * gp->n));
        return {-lam, lam};
    }
    return {};
}

FisProfile fis_profile(const ModelSpec& model, double lambda_min,
                       double lambda_max, int samples) {
    if (samples < 3) {
        throw std::invalid_argument("fis_profile: samples must be >= 3");
    }
    if (!(lambda_min < lambda_max)) {
        throw std::invalid_argument("fis_profile: lambda_min must be < lambda_max");
    }

    const bool closed = has_closed_form(model);
    const auto chi_fn = [&](double lam) {
        return closed ? chi_closed_form(model, lam)
                      : chi_matrix_element(model, lam);
    };

    FisProfile profile;
    profile.lambdas.reserve(samples);
    profile.chi.reserve(samples);
    const double step = (lambda_max - lambda_min) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double lam = lambda_min + i * step;
        profile.lambdas.push_back(lam);
        profile.chi.push_back(chi_fn(lam));
    }

    for (int i = 1; i + 1 < samples; ++i) {
        if (profile.chi[i] > profile.chi[i - 1] &&
            profile.chi[i] > profile.chi[i + 1]) {
            profile.mfp.push_back(golden_section(
                chi_fn, profile.lambdas[i - 1], profile.lambdas[i + 1], true));
        }
    }

    const auto gap_fn = [&](double lam) {
        return eigensystem(eval_hamiltonian(model, lam)).gap();
    };
    int imin = 0;
    for (int i = 1; i < samples; ++i) {
        if (gap_fn(profile.lambdas[i]) < gap_fn(profile.lambdas[imin])) {
            imin = i;
        }
    }
    const double lo = profile.lambdas[std::max(0, imin - 1)];
    const double hi = profile.lambdas[std::min(samples - 1, imin + 1)];
    profile.mgp = golden_section(gap_fn, lo, hi, false);
    // on a locally flat gap the search can stall anywhere in the bracket;
    // prefer the touching point itself when it does at least as well
    if (lo <= 0.0 && 0.0 <= hi && gap_fn(0.0) <= gap_fn(profile.mgp)) {
        profile.mgp = 0.0;
    }
    if (std::abs(profile.mgp) < 1e-9) {
        profile.mgp = 0.0;
    }

    profile.mfp_closed = mfp_closed_form(model);
    profile.chi_at_zero = closed
                              ? chi_zero_limit(model)
                              : std::numeric_limits<double>::quiet_NaN();
    return profile;
}

double chi_pwave_variant(const PWave& model, double lambda) {
    const double md2 = 2.0 * model.m * std::abs(model.delta);
    const double q = md2 / (md2 * md2 + lambda * lambda);
    return q * q;
}

double chi_graphene_variant(const GrapheneQuadratic& model, double lambda) {
    const double a = model.lattice;
    const double q = 4.0 * a / (a * a * lambda * lambda + 16.0);
    return q * q;
}

void write_csv(const FisProfile& profile, std::ostream& out) {
    out << "lambda,chi\n";
    for (std::size_t i = 0; i < profile.lambdas.size(); ++i) {
        out << format_double(profile.lambdas[i]) << ','
            << format_double(profile.chi[i]) << '\n';
    }
}

nlohmann::json to_json(const FisProfile& profile) {
    return nlohmann::json{{"lambdas", profile.lambdas},
                          {"chi", profile.chi},
                          {"mfp", profile.mfp},
                          {"mgp", profile.mgp},
                          {"chi_at_zero", profile.chi_at_zero}};
}

}  // namespace bandtouch
