#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bandtouch/model.hpp"

namespace bandtouch {

/// Fidelity susceptibility sampled on a λ grid, with located extrema.
struct FisProfile {
    std::vector<double> lambdas;
    std::vector<double> chi;
    std::vector<double> mfp;         ///< refined locations of χ local maxima
    std::vector<double> mfp_closed;  ///< closed-form MFP when the family has one
    double mgp = 0.0;                ///< location of the minimum energy gap
    double chi_at_zero = 0.0;        ///< lim λ→0 χ(λ)
};

/// χ(λ) = |⟨1_λ|∂λH|0_λ⟩ / (E₁-E₀)|² from the generic matrix-element
/// definition. Throws DegenerateError at (or numerically at) a touching
/// point; use chi_closed_form / chi_zero_limit there.
double chi_matrix_element(const ModelSpec& model, double lambda);

/// Matrix-element χ for an explicit pair (H, dH/dλ). χ is invariant under
/// any fixed unitary conjugation applied to both.
double chi_matrix_element(const HermitianMatrix2& h,
                          const HermitianMatrix2& dh);

/// Model-specific closed form of χ, including the removable λ = 0 limit.
/// Supported: GL, GP, PolyDiag, PWave, GrapheneQuadratic. Throws
/// UnsupportedFamilyError for the tight-binding model.
double chi_closed_form(const ModelSpec& model, double lambda);

/// lim λ→0 of chi_closed_form. Nonzero only when the diagonal carries a
/// genuine quadratic term (GL n=2, PolyDiag with a₂ ≠ 0, PWave,
/// GrapheneQuadratic) or the model is gapped with n=1.
double chi_zero_limit(const ModelSpec& model);

/// Closed-form MFP pair ±((n-2)Δ₁²/n)^{1/(2(n-1))} for GL n >= 3,
/// ±((n-1)Δ₂²/(n+1))^{1/2n} for GP n >= 2; empty otherwise.
std::vector<double> mfp_closed_form(const ModelSpec& model);

/// Grid-sampled χ with local maxima refined by golden-section search
/// (tolerance 1e-10 in λ) and the MGP from the energy gap.
FisProfile fis_profile(const ModelSpec& model, double lambda_min,
                       double lambda_max, int samples);

/// Alternate closed form (2mΔ/((2mΔ)²+λ²))². Differs from the
/// matrix-element definition by a constant factor of 4; kept only for
/// comparison, never used in the main path.
double chi_pwave_variant(const PWave& model, double lambda);

/// Alternate closed form (4a/(a²λ²+16))², same constant factor of 4
/// relative to the matrix-element definition.
double chi_graphene_variant(const GrapheneQuadratic& model, double lambda);

/// CSV with header "lambda,chi", shortest round-trip float formatting.
void write_csv(const FisProfile& profile, std::ostream& out);

nlohmann::json to_json(const FisProfile& profile);

}  // namespace bandtouch
