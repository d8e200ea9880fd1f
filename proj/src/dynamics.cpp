#include "bandtouch/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bandtouch/io.hpp"

namespace bandtouch {

namespace {

using std::numbers::pi;

constexpr cplx kImag{0.0, 1.0};

void require(bool cond, const char* msg) {
    if (!cond) {
        throw std::invalid_argument(msg);
    }
}

}  // namespace

Protocol Protocol::pl1(double c) { return {ProtocolKind::PL1, c}; }
Protocol Protocol::pl2(double c) { return {ProtocolKind::PL2, c}; }
Protocol Protocol::plneg(double c) { return {ProtocolKind::PLNeg, c}; }
Protocol Protocol::plpos(double c) { return {ProtocolKind::PLPos, c}; }

Protocol Protocol::custom(double c, double lambda_start, double lambda_end) {
    Protocol p{ProtocolKind::Custom, c};
    p.custom_start = lambda_start;
    p.custom_end = lambda_end;
    return p;
}

double Protocol::lambda_start() const {
    switch (kind) {
        case ProtocolKind::PL1:
            return -lambda0;
        case ProtocolKind::PL2:
        case ProtocolKind::PLNeg:
            return -lambda_inf;
        case ProtocolKind::PLPos:
            return epsilon;
        case ProtocolKind::Custom:
            return custom_start;
    }
    return 0.0;
}

double Protocol::lambda_end() const {
    switch (kind) {
        case ProtocolKind::PL1:
            return lambda0;
        case ProtocolKind::PL2:
        case ProtocolKind::PLPos:
            return lambda_inf;
        case ProtocolKind::PLNeg:
            return -epsilon;
        case ProtocolKind::Custom:
            return custom_end;
    }
    return 0.0;
}

void Protocol::validate() const {
    require(c > 0.0, "protocol: speed c must be positive");
    require(dt > 0.0, "protocol: dt must be positive");
    require(epsilon > 0.0, "protocol: epsilon must be positive");
    require(epsilon < lambda0 && lambda0 < lambda_inf,
            "protocol: require epsilon < lambda0 < lambda_inf");
    require(lambda_start() < lambda_end(),
            "protocol: lambda_start must be < lambda_end");
}

double lz_probability(double delta, double c) {
    require(c > 0.0, "lz_probability: c must be positive");
    return std::exp(-pi * delta * delta / c);
}

double mod_minus_pi(double x) {
    double r = std::fmod(x, 2.0 * pi);
    if (r < 0.0) {
        r += 2.0 * pi;
    }
    return r - pi;
}

double wrap_to_pi(double x) { return mod_minus_pi(x + pi); }

Vec2 cn_step(const HermitianMatrix2& h_mid, const Vec2& psi, double dt) {
    const double tau = 0.5 * dt;
    // phi = (I - i tau H) psi
    const Vec2 hpsi = h_mid.apply(psi);
    const Vec2 phi{psi.a - kImag * tau * hpsi.a, psi.b - kImag * tau * hpsi.b};
    // solve (I + i tau H) psi' = phi
    const cplx a00 = 1.0 + kImag * tau * h_mid.h00;
    const cplx a11 = 1.0 + kImag * tau * h_mid.h11;
    const cplx a01 = kImag * tau * h_mid.h01;
    const cplx a10 = kImag * tau * std::conj(h_mid.h01);
    const cplx det = a00 * a11 - a01 * a10;
    return {(a11 * phi.a - a01 * phi.b) / det,
            (a00 * phi.b - a10 * phi.a) / det};
}

namespace {

struct Stepper {
    const ModelSpec& model;
    const Protocol& protocol;

    template <typename StepFn>
    Trajectory run(Vec2 psi, int sample_every, double dt, StepFn step) const {
        const double c = protocol.c;
        const double t0 = protocol.lambda_start() / c;
        const double t1 = protocol.lambda_end() / c;
        const long nsteps =
            static_cast<long>(std::ceil((t1 - t0) / dt - 1e-12));

        Trajectory traj{{}, model, protocol};
        auto record = [&](double t, const Vec2& state) {
            const double lam = c * t;
            const EigenSystem es = eigensystem(eval_hamiltonian(model, lam));
            const double pg = std::norm(inner(es.v_ground, state));
            const double pe = std::norm(inner(es.v_excited, state));
            traj.samples.push_back({t, lam, state, pg, pe});
        };

        record(t0, psi);
        for (long i = 0; i < nsteps; ++i) {
            const double t = t0 + i * dt;
            const double h = std::min(dt, t1 - t);
            psi = step(t, h, psi);
            if (sample_every > 0 && (i + 1) % sample_every == 0 &&
                i + 1 < nsteps) {
                record(t + h, psi);
            }
        }
        record(t1, psi);
        return traj;
    }
};

Vec2 initial_state(const ModelSpec& model, const Protocol& protocol,
                   StartState start) {
    const EigenSystem es =
        eigensystem(eval_hamiltonian(model, protocol.lambda_start()));
    if (es.degenerate) {
        throw DegenerateError(
            "evolve: eigensystem at lambda_start is degenerate; offset the "
            "endpoint by epsilon");
    }
    return start == StartState::Ground ? es.v_ground : es.v_excited;
}

}  // namespace

Trajectory evolve_from(const ModelSpec& model, const Protocol& protocol,
                       const Vec2& psi0, int sample_every) {
    protocol.validate();
    const double c = protocol.c;
    return Stepper{model, protocol}.run(
        psi0, sample_every, protocol.dt, [&](double t, double h, Vec2 psi) {
            const HermitianMatrix2 hm =
                eval_hamiltonian(model, c * (t + 0.5 * h));
            return cn_step(hm, psi, h);
        });
}

Trajectory evolve(const ModelSpec& model, const Protocol& protocol,
                  int sample_every, StartState start) {
    protocol.validate();
    return evolve_from(model, protocol, initial_state(model, protocol, start),
                       sample_every);
}

double transition_probability(const Trajectory& traj) {
    const TrajectorySample& last = traj.final_sample();
    const EigenSystem es =
        eigensystem(eval_hamiltonian(traj.model, last.lambda));
    if (es.degenerate) {
        throw DegenerateError(
            "transition_probability: degenerate endpoint; use an "
            "epsilon-offset endpoint");
    }
    return std::norm(inner(es.v_excited, last.psi));
}

Trajectory rk4_oracle_evolve(const ModelSpec& model, const Protocol& protocol,
                             double dt_oracle, StartState start) {
    protocol.validate();
    require(dt_oracle > 0.0 && dt_oracle <= protocol.dt / 5.0,
            "rk4_oracle_evolve: dt_oracle must be <= dt/5");
    const double c = protocol.c;

    auto rhs = [&](double t, const Vec2& psi) -> Vec2 {
        const Vec2 hpsi = eval_hamiltonian(model, c * t).apply(psi);
        return {-kImag * hpsi.a, -kImag * hpsi.b};
    };

    return Stepper{model, protocol}.run(
        initial_state(model, protocol, start), 0, dt_oracle,
        [&](double t, double h, Vec2 psi) {
            const Vec2 k1 = rhs(t, psi);
            const Vec2 k2 = rhs(t + 0.5 * h, {psi.a + 0.5 * h * k1.a,
                                              psi.b + 0.5 * h * k1.b});
            const Vec2 k3 = rhs(t + 0.5 * h, {psi.a + 0.5 * h * k2.a,
                                              psi.b + 0.5 * h * k2.b});
            const Vec2 k4 = rhs(t + h, {psi.a + h * k3.a, psi.b + h * k3.b});
            return Vec2{
                psi.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
                psi.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b)};
        });
}

namespace {

cplx align_phase(const Vec2& ref, const Vec2& v) {
    const cplx ov = inner(ref, v);
    const double mag = std::abs(ov);
    return mag > 0.0 ? ov / mag : cplx(1.0);
}

Vec2 dephased(const Vec2& v, const cplx& phase) {
    return {v.a / phase, v.b / phase};
}

// Eigensystem with both vectors phase-aligned against reference vectors,
// so the basis stays continuous along a driving path even where the
// global gauge convention jumps.
EigenSystem aligned_eigensystem(const ModelSpec& model, double lambda,
                                const Vec2& ref_ground,
                                const Vec2& ref_excited) {
    EigenSystem es = eigensystem(eval_hamiltonian(model, lambda));
    if (es.degenerate) {
        throw DegenerateError(
            "adiabatic_frame_evolve: gap collapsed along the path");
    }
    es.v_ground = dephased(es.v_ground, align_phase(ref_ground, es.v_ground));
    es.v_excited =
        dephased(es.v_excited, align_phase(ref_excited, es.v_excited));
    return es;
}

}  // namespace

AdiabaticFrameResult adiabatic_frame_evolve(const ModelSpec& model,
                                            const Protocol& protocol) {
    protocol.validate();
    const double c = protocol.c;
    const double t0 = protocol.lambda_start() / c;
    const double t1 = protocol.lambda_end() / c;
    const double dt = protocol.dt;
    const long nsteps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-12));
    const double dlam = 1e-7;  // centered-difference step for the Berry term

    EigenSystem ref = eigensystem(eval_hamiltonian(model, c * t0));
    if (ref.degenerate) {
        throw DegenerateError(
            "adiabatic_frame_evolve: degenerate start point");
    }

    // State: instantaneous-basis coefficients with the phase factored out,
    // plus the accumulated phases (theta0, theta1), all real-valued phases.
    cplx ct0(1.0, 0.0);
    cplx ct1(0.0, 0.0);
    double th0 = 0.0;
    double th1 = 0.0;
    double max_berry = 0.0;

    struct Deriv {
        cplx d0, d1;
        double dth0, dth1;
    };

    auto deriv = [&](double t, const cplx& a0, const cplx& a1, double q0,
                     double q1) -> Deriv {
        const double lam = c * t;
        const EigenSystem es =
            aligned_eigensystem(model, lam, ref.v_ground, ref.v_excited);
        const HermitianMatrix2 dh = hamiltonian_derivative(model, lam);
        const cplx w10 = inner(es.v_excited, dh.apply(es.v_ground)) /
                         (es.e_ground - es.e_excited);
        const cplx w01 = inner(es.v_ground, dh.apply(es.v_excited)) /
                         (es.e_excited - es.e_ground);

        // Berry connection by centered differencing of aligned vectors.
        const EigenSystem ep =
            aligned_eigensystem(model, lam + dlam, es.v_ground, es.v_excited);
        const EigenSystem em =
            aligned_eigensystem(model, lam - dlam, es.v_ground, es.v_excited);
        const cplx b0 =
            c * inner(es.v_ground, Vec2{(ep.v_ground.a - em.v_ground.a) /
                                            (2.0 * dlam),
                                        (ep.v_ground.b - em.v_ground.b) /
                                            (2.0 * dlam)});
        const cplx b1 =
            c * inner(es.v_excited, Vec2{(ep.v_excited.a - em.v_excited.a) /
                                             (2.0 * dlam),
                                         (ep.v_excited.b - em.v_excited.b) /
                                             (2.0 * dlam)});
        max_berry = std::max({max_berry, std::abs(b0), std::abs(b1)});

        Deriv d;
        d.d0 = -std::exp(kImag * (q0 - q1)) * a1 * c * w01;
        d.d1 = -std::exp(kImag * (q1 - q0)) * a0 * c * w10;
        d.dth0 = es.e_ground + b0.imag();
        d.dth1 = es.e_excited + b1.imag();
        return d;
    };

    for (long i = 0; i < nsteps; ++i) {
        const double t = t0 + i * dt;
        const double h = std::min(dt, t1 - t);

        const Deriv k1 = deriv(t, ct0, ct1, th0, th1);
        const Deriv k2 = deriv(t + 0.5 * h, ct0 + 0.5 * h * k1.d0,
                               ct1 + 0.5 * h * k1.d1, th0 + 0.5 * h * k1.dth0,
                               th1 + 0.5 * h * k1.dth1);
        const Deriv k3 = deriv(t + 0.5 * h, ct0 + 0.5 * h * k2.d0,
                               ct1 + 0.5 * h * k2.d1, th0 + 0.5 * h * k2.dth0,
                               th1 + 0.5 * h * k2.dth1);
        const Deriv k4 =
            deriv(t + h, ct0 + h * k3.d0, ct1 + h * k3.d1, th0 + h * k3.dth0,
                  th1 + h * k3.dth1);

        ct0 += h / 6.0 * (k1.d0 + 2.0 * k2.d0 + 2.0 * k3.d0 + k4.d0);
        ct1 += h / 6.0 * (k1.d1 + 2.0 * k2.d1 + 2.0 * k3.d1 + k4.d1);
        th0 += h / 6.0 * (k1.dth0 + 2.0 * k2.dth0 + 2.0 * k3.dth0 + k4.dth0);
        th1 += h / 6.0 * (k1.dth1 + 2.0 * k2.dth1 + 2.0 * k3.dth1 + k4.dth1);

        // advance the continuity reference to the end of the step
        ref = aligned_eigensystem(model, c * (t + h), ref.v_ground,
                                  ref.v_excited);
    }

    AdiabaticFrameResult res;
    res.c_ground = ct0 * std::exp(-kImag * th0);
    res.c_excited = ct1 * std::exp(-kImag * th1);
    res.max_berry = max_berry;
    return res;
}

PhaseDecomposition split_phase_analysis(const ModelSpec& model,
                                        const Protocol& protocol) {
    protocol.validate();
    require(protocol.kind == ProtocolKind::PL2,
            "split_phase_analysis: requires a PL2-kind protocol");

    const double lam_inf = protocol.lambda_inf;
    const bool gapless =
        eigensystem(eval_hamiltonian(model, 0.0)).degenerate;
    const double lam_mid = gapless ? -protocol.epsilon : 0.0;

    auto leg = [&](double a, double b) {
        Protocol p = protocol;
        p.kind = ProtocolKind::Custom;
        p.custom_start = a;
        p.custom_end = b;
        return p;
    };

    const Trajectory first = evolve(model, leg(-lam_inf, lam_mid));
    const EigenSystem mid = eigensystem(eval_hamiltonian(model, lam_mid));
    if (mid.degenerate) {
        throw DegenerateError(
            "split_phase_analysis: degenerate midpoint projection");
    }

    PhaseDecomposition d;
    const Vec2& psi_mid = first.final_sample().psi;
    d.alpha_plus = inner(mid.v_excited, psi_mid);
    d.alpha_minus = inner(mid.v_ground, psi_mid);

    const EigenSystem fin =
        eigensystem(eval_hamiltonian(model, lam_inf));
    const Trajectory up =
        evolve_from(model, leg(lam_mid, lam_inf), mid.v_excited);
    const Trajectory down =
        evolve_from(model, leg(lam_mid, lam_inf), mid.v_ground);
    d.beta_pp = inner(fin.v_excited, up.final_sample().psi);
    d.beta_pm = inner(fin.v_ground, up.final_sample().psi);
    d.beta_mp = inner(fin.v_excited, down.final_sample().psi);
    d.beta_mm = inner(fin.v_ground, down.final_sample().psi);

    const cplx path_plus = d.alpha_plus * d.beta_pp;
    const cplx path_minus = d.alpha_minus * d.beta_mp;
    if (std::abs(path_plus) < 1e-12 || std::abs(path_minus) < 1e-12) {
        throw VanishingAmplitudeError(
            "split_phase_analysis: an interfering amplitude vanishes; "
            "delta_phi is undefined");
    }
    // sign convention: the ground-state path accumulates the smaller
    // dynamical phase, so the relative phase grows with the gap
    d.delta_phi = wrap_to_pi(std::arg(path_minus * std::conj(path_plus)));
    d.p_reconstructed = std::norm(path_plus + path_minus);
    d.p_direct = transition_probability(evolve(model, protocol));
    return d;
}

double delta_phi_estimate(int n, double delta2, double c) {
    require(n >= 2, "delta_phi_estimate: requires n >= 2");
    require(c > 0.0, "delta_phi_estimate: c must be positive");
    const double lam_mfp =
        std::pow((n - 1.0) / (n + 1.0) * delta2 * delta2, 1.0 / (2.0 * n));
    return mod_minus_pi(4.0 * lam_mfp * delta2 / c);
}

double delta_phi_estimate(const GP& model, double c) {
    return delta_phi_estimate(model.n, model.delta2, c);
}

void write_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,lambda,re_psi0,im_psi0,re_psi1,im_psi1,p_ground,p_excited\n";
    for (const TrajectorySample& s : traj.samples) {
        out << format_double(s.t) << ',' << format_double(s.lambda) << ','
            << format_double(s.psi.a.real()) << ','
            << format_double(s.psi.a.imag()) << ','
            << format_double(s.psi.b.real()) << ','
            << format_double(s.psi.b.imag()) << ','
            << format_double(s.p_ground) << ',' << format_double(s.p_excited)
            << '\n';
    }
}

nlohmann::json to_json(const PhaseDecomposition& d) {
    auto pair = [](const cplx& z) {
        return nlohmann::json::array({z.real(), z.imag()});
    };
    return nlohmann::json{{"alpha_plus", pair(d.alpha_plus)},
                          {"alpha_minus", pair(d.alpha_minus)},
                          {"beta_pp", pair(d.beta_pp)},
                          {"beta_pm", pair(d.beta_pm)},
                          {"beta_mp", pair(d.beta_mp)},
                          {"beta_mm", pair(d.beta_mm)},
                          {"delta_phi", d.delta_phi},
                          {"p_reconstructed", d.p_reconstructed},
                          {"p_direct", d.p_direct}};
}

}  // namespace bandtouch
