#include "bandtouch/types.hpp"

#include <algorithm>

namespace bandtouch {

namespace {

// Makes the component of largest modulus real and positive. On a modulus
// tie the first component wins.
Vec2 gauge_fix(const Vec2& v) {
    const bool second = std::abs(v.b) > std::abs(v.a);
    const cplx pivot = second ? v.b : v.a;
    const double mag = std::abs(pivot);
    if (mag == 0.0) {
        return v;
    }
    const cplx phase = pivot / mag;
    return {v.a / phase, v.b / phase};
}

}  // namespace

EigenSystem eigensystem(const HermitianMatrix2& h) {
    const double mean = 0.5 * (h.h00 + h.h11);
    const double delta = 0.5 * (h.h00 - h.h11);
    const double od = std::abs(h.h01);
    const double r = std::hypot(delta, od);

    EigenSystem es;
    es.e_ground = mean - r;
    es.e_excited = mean + r;
    es.degenerate = 2.0 * r <= 1e-14 * std::max(1.0, h.frobenius_norm());

    if (od == 0.0) {
        if (delta >= 0.0) {
            es.v_ground = {cplx(0.0), cplx(1.0)};
            es.v_excited = {cplx(1.0), cplx(0.0)};
        } else {
            es.v_ground = {cplx(1.0), cplx(0.0)};
            es.v_excited = {cplx(0.0), cplx(1.0)};
        }
        return es;
    }

    // Two algebraically equivalent null-space formulas per level; pick the
    // branch whose diagonal entry does not cancel against r.
    Vec2 vg = delta >= 0.0 ? Vec2{h.h01, cplx(-(delta + r))}
                           : Vec2{cplx(r - delta), -std::conj(h.h01)};
    Vec2 ve = delta <= 0.0 ? Vec2{h.h01, cplx(r - delta)}
                           : Vec2{cplx(r + delta), std::conj(h.h01)};

    es.v_ground = gauge_fix(normalized(vg));
    es.v_excited = gauge_fix(normalized(ve));
    return es;
}

}  // namespace bandtouch
