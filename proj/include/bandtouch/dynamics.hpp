#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bandtouch/model.hpp"

namespace bandtouch {

enum class ProtocolKind { PL1, PL2, PLNeg, PLPos, Custom };

/// Linear driving λ(t) = c·t between protocol-defined endpoints.
/// PL1: -λ₀ → λ₀, PL2: -Λ → Λ, PLNeg: -Λ → -ε, PLPos: ε → Λ.
struct Protocol {
    ProtocolKind kind = ProtocolKind::PL2;
    double c = 1.0;
    double lambda0 = 0.1;
    double lambda_inf = 10.0;
    double epsilon = 1e-6;
    double dt = 1e-3;
    double custom_start = 0.0;
    double custom_end = 0.0;

    static Protocol pl1(double c);
    static Protocol pl2(double c);
    static Protocol plneg(double c);
    static Protocol plpos(double c);
    static Protocol custom(double c, double lambda_start, double lambda_end);

    double lambda_start() const;
    double lambda_end() const;

    /// Throws std::invalid_argument unless c > 0, dt > 0 and
    /// ε < λ₀ < Λ.
    void validate() const;
};

struct TrajectorySample {
    double t = 0.0;
    double lambda = 0.0;
    Vec2 psi;
    double p_ground = 0.0;
    double p_excited = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    ModelSpec model;
    Protocol protocol;

    const TrajectorySample& final_sample() const { return samples.back(); }
};

/// Split-evolution amplitudes and interference phase of a PL2 drive
/// factored at the midpoint.
struct PhaseDecomposition {
    cplx alpha_plus;   ///< ⟨φ₁(mid)|U(mid,-Λ)|φ₀(-Λ)⟩
    cplx alpha_minus;  ///< ⟨φ₀(mid)|U(mid,-Λ)|φ₀(-Λ)⟩
    cplx beta_pp;      ///< ⟨φ₁(Λ)|U(Λ,mid)|φ₁(mid)⟩
    cplx beta_pm;      ///< ⟨φ₀(Λ)|U(Λ,mid)|φ₁(mid)⟩
    cplx beta_mp;      ///< ⟨φ₁(Λ)|U(Λ,mid)|φ₀(mid)⟩
    cplx beta_mm;      ///< ⟨φ₀(Λ)|U(Λ,mid)|φ₀(mid)⟩
    double delta_phi = 0.0;  ///< Im ln[α₋β₋⁺(α₊β₊⁺)*] in [-π, π)
    double p_reconstructed = 0.0;
    double p_direct = 0.0;
};

struct AdiabaticFrameResult {
    cplx c_ground;
    cplx c_excited;
    double max_berry = 0.0;  ///< max |⟨n|ṅ⟩| seen along the path
};

enum class StartState { Ground, Excited };

/// One Cayley step (I + i·dt/2·H)⁻¹ (I - i·dt/2·H) ψ; exactly unitary
/// up to roundoff for any Hermitian H.
Vec2 cn_step(const HermitianMatrix2& h_mid, const Vec2& psi, double dt);

/// Crank-Nicolson evolution starting from an instantaneous eigenstate at
/// λ_start, with H evaluated at the temporal midpoint λ(t + dt/2). The
/// last step is shortened so the trajectory ends exactly at λ_end.
/// sample_every = 0 records only the first and final samples.
Trajectory evolve(const ModelSpec& model, const Protocol& protocol,
                  int sample_every = 0,
                  StartState start = StartState::Ground);

/// Same stepping, arbitrary (normalized) initial state.
Trajectory evolve_from(const ModelSpec& model, const Protocol& protocol,
                       const Vec2& psi0, int sample_every = 0);

/// P = |⟨φ₁(λ(t_f))|ψ(t_f)⟩|². Throws DegenerateError when the final
/// eigensystem is degenerate.
double transition_probability(const Trajectory& traj);

/// Independent fixed-basis RK4 integrator used as verification oracle.
/// Requires dt_oracle <= protocol.dt / 5.
Trajectory rk4_oracle_evolve(const ModelSpec& model, const Protocol& protocol,
                             double dt_oracle,
                             StartState start = StartState::Ground);

/// Integrates the instantaneous-basis equations of motion (coefficients
/// c_n with dynamical + geometric phases θ_n) by RK4. The Berry term is
/// obtained by centered differencing of continuity-aligned eigenvectors.
/// Throws DegenerateError if the gap collapses along the path.
AdiabaticFrameResult adiabatic_frame_evolve(const ModelSpec& model,
                                            const Protocol& protocol);

/// Factors a PL2 drive at the midpoint (λ = 0 for gapped models, -ε for
/// gapless ones), yielding the α/β amplitudes, ΔΦ and the reconstructed
/// transition probability next to the single-shot one.
PhaseDecomposition split_phase_analysis(const ModelSpec& model,
                                        const Protocol& protocol);

/// Flat-region estimate [4·λ₊MFP·Δ₂/c] mod 2π - π for the gapped family.
double delta_phi_estimate(int n, double delta2, double c);
double delta_phi_estimate(const GP& model, double c);

/// Landau-Zener formula exp(-πΔ²/c).
double lz_probability(double delta, double c);

/// maps into [-π, π) preserving the represented angle
double wrap_to_pi(double x);

/// the "Ξ mod 2π - π" reduction: x mod 2π in [0, 2π), then shifted by -π
double mod_minus_pi(double x);

/// CSV header: t,lambda,re_psi0,im_psi0,re_psi1,im_psi1,p_ground,p_excited
void write_csv(const Trajectory& traj, std::ostream& out);

nlohmann::json to_json(const PhaseDecomposition& d);

}  // namespace bandtouch
