#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace bandtouch {

using cplx = std::complex<double>;

/// Raised when an eigensystem (or a gap along a path) is too close to
/// degenerate for the requested projection to be meaningful.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a closed form is requested for a family that has none.
struct UnsupportedFamilyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised by the split-evolution analysis when one of the interfering
/// amplitudes vanishes and the relative phase is undefined.
struct VanishingAmplitudeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Normalized complex two-component state.
struct Vec2 {
    cplx a{0.0, 0.0};
    cplx b{0.0, 0.0};
};

inline cplx inner(const Vec2& x, const Vec2& y) {
    return std::conj(x.a) * y.a + std::conj(x.b) * y.b;
}

inline double norm(const Vec2& v) {
    return std::sqrt(std::norm(v.a) + std::norm(v.b));
}

inline Vec2 normalized(const Vec2& v) {
    const double n = norm(v);
    return {v.a / n, v.b / n};
}

/// 2x2 Hermitian matrix. Only the upper triangle is stored; h10 is
/// always conj(h01), so hermiticity cannot be violated by construction.
struct HermitianMatrix2 {
    double h00 = 0.0;
    double h11 = 0.0;
    cplx h01{0.0, 0.0};

    Vec2 apply(const Vec2& v) const {
        return {h00 * v.a + h01 * v.b, std::conj(h01) * v.a + h11 * v.b};
    }

    double frobenius_norm() const {
        return std::sqrt(h00 * h00 + h11 * h11 + 2.0 * std::norm(h01));
    }
};

/// Spectral decomposition of a HermitianMatrix2 with a fixed gauge:
/// in each eigenvector the component of largest modulus is made real
/// and positive (first component on a modulus tie).
struct EigenSystem {
    double e_ground = 0.0;
    double e_excited = 0.0;
    Vec2 v_ground;
    Vec2 v_excited;
    bool degenerate = false;

    double gap() const { return e_excited - e_ground; }
};

/// Closed-form diagonalization: E = (h00+h11)/2 ∓ sqrt(delta^2 + |h01|^2)
/// with delta = (h00-h11)/2. The degenerate flag is set when the gap is
/// below 1e-14 * max(1, ||H||_F); the returned vectors are still an
/// orthonormal basis but carry no physical meaning there.
EigenSystem eigensystem(const HermitianMatrix2& h);

}  // namespace bandtouch
