#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bandtouch/types.hpp"

namespace bandtouch {

/// p-wave boundary Hamiltonian: diagonal ±λ²/2m, off-diagonal λΔ with
/// complex coupling Δ.
struct PWave {
    double m = 1.0;
    cplx delta{1.0, 0.0};
};

/// Real-symmetric quadratic expansion of graphene around the touching
/// point, already gauged: diagonal ±γaλ²/2, off-diagonal -2γλ with
/// γ = 3ah/4.
struct GrapheneQuadratic {
    double hopping = 1.0;
    double lattice = 1.0;

    double gamma() const { return 0.75 * lattice * hopping; }
};

/// Full graphene tight-binding model restricted to the line k = K + (λ, 0)
/// through the touching point K = (2π/3a)(1, 1/√3).
struct GrapheneTightBinding {
    double hopping = 1.0;
    double lattice = 1.0;
};

/// Diagonal g(λ) = Σ aₙλⁿ (coeffs[0] = a₁), off-diagonal Δλ.
struct PolyDiag {
    std::vector<double> coeffs;
    double delta = 1.0;
};

/// Gapless family: diagonal ±λⁿ, off-diagonal Δ₁λ.
struct GL {
    int n = 1;
    double delta1 = 1.0;
};

/// Gapped family: diagonal ±λⁿ, off-diagonal Δ₂. n = 1 is the
/// Landau-Zener Hamiltonian.
struct GP {
    int n = 1;
    double delta2 = 1.0;
};

using ModelSpec = std::variant<PWave, GrapheneQuadratic, GrapheneTightBinding,
                               PolyDiag, GL, GP>;

/// Throws std::invalid_argument when a parameter violates its constraint
/// (m > 0, Δ ≠ 0, n >= 1, non-empty coefficient list, ...).
void validate(const ModelSpec& model);

/// "pw", "graphene_quadratic", "graphene_tb", "poly", "gl" or "gp".
std::string family_name(const ModelSpec& model);

HermitianMatrix2 eval_hamiltonian(const ModelSpec& model, double lambda);

/// Entrywise analytic d/dλ of eval_hamiltonian.
HermitianMatrix2 hamiltonian_derivative(const ModelSpec& model, double lambda);

/// s(k) = -h e^{-ik_x a} (1 + 2 e^{i 3k_x a/2} cos(√3 k_y a / 2)).
cplx graphene_structure_factor(const GrapheneTightBinding& model, double kx,
                               double ky);

/// Second-order Taylor polynomial of s(K + (q, 0)) in q. The residual
/// against graphene_structure_factor is third order in q.
cplx graphene_structure_factor_quadratic(const GrapheneTightBinding& model,
                                         double q);

/// Collapses the tight-binding model to its gauged quadratic expansion
/// along the q_y = 0 line (same hopping and lattice constant).
ModelSpec graphene_effective_model(const GrapheneTightBinding& model);

/// integer power, n >= 0
double ipow(double x, int n);

nlohmann::json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const nlohmann::json& j);

}  // namespace bandtouch
